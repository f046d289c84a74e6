"""Brute-force ground truth for sparsifiers.

Weights are recomputed here from raw arrays; nothing in this module calls the
encoders or evaluators of the other modules.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field
from math import ceil, comb, log2, prod

import numpy as np

SLACK = 1e-6
SAMPLE_COUNT = 100_000


class CapExceededError(ValueError):
    pass


@dataclass
class VerificationReport:
    kind: str
    checked: int
    min_ratio: float
    max_ratio: float
    epsilon: float
    tolerance: tuple[float, float]
    violations: list = field(default_factory=list)
    mode: str = "exhaustive"
    seed: int | None = None

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        d["violations"] = [{"input": list(map(int, x)), "exact": float(e), "approx": float(a)}
                           for x, e, a in self.violations]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _bounds(eps: float) -> tuple[float, float]:
    return (1 - eps) * (1 - SLACK), (1 + eps) * (1 + SLACK)


def _compare(kind, inputs, exact, approx, eps, mode="exhaustive", seed=None, keep=50):
    lo, hi = _bounds(eps)
    exact = np.asarray(exact, dtype=float)
    approx = np.asarray(approx, dtype=float)
    pos = exact > 0
    ratio = np.where(pos, approx / np.where(pos, exact, 1.0), 1.0)
    bad = np.where(pos, (ratio < lo) | (ratio > hi), approx != 0)
    idx = np.flatnonzero(bad)[:keep]
    viol = [(tuple(inputs[i]), exact[i], approx[i]) for i in idx]
    rs = ratio[pos]
    return VerificationReport(kind, int(exact.size), float(rs.min()) if rs.size else 1.0,
                              float(rs.max()) if rs.size else 1.0, float(eps), (lo, hi), viol,
                              mode, seed)


def _result_pairs(result):
    """(indices, weights) from a SparsifierResult, a mapping or an iterable of pairs."""
    if hasattr(result, "indices") and hasattr(result, "weights"):
        return np.asarray(result.indices, dtype=np.int64), np.asarray(result.weights, dtype=float)
    items = result.items() if isinstance(result, dict) else result
    items = list(items)
    if not items:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    idx, w = zip(*items)
    return np.asarray(idx, dtype=np.int64), np.asarray(w, dtype=float)


def code_weights(entries, moduli, weights, messages) -> np.ndarray:
    """Weighted Hamming weight of G x for every row x of ``messages``."""
    entries = np.asarray(entries, dtype=np.int64)
    messages = np.asarray(messages, dtype=np.int64)
    nonzero = np.zeros((messages.shape[0], entries.shape[0]), dtype=bool)
    for p, q in enumerate(moduli):
        nonzero |= (messages @ entries[:, :, p].T) % q != 0
    return nonzero @ np.asarray(weights, dtype=float)


def _messages(n, q, cap, sample, seed):
    total = q ** n
    if total <= cap:
        return np.array(list(itertools.product(range(q), repeat=n)), dtype=np.int64), "exhaustive"
    if not sample:
        raise CapExceededError(f"{total} messages exceed the cap {cap}; enable sampling")
    rng = np.random.default_rng(seed)
    return rng.integers(0, q, size=(SAMPLE_COUNT, n)), "sampled"


def verify_code_sparsifier(G, result, eps: float, cap: int = 200_000, sample: bool = False,
                           seed: int = 0, chunk: int = 20_000) -> VerificationReport:
    """Every message x in [0, exponent)^n, or SAMPLE_COUNT random ones in sampling mode."""
    moduli = tuple(G.spec.moduli)
    exponent = np.lcm.reduce(np.array(moduli, dtype=object))
    entries = np.asarray(G.entries, dtype=np.int64)
    msgs, mode = _messages(G.n, int(exponent), cap, sample, seed)
    idx, w = _result_pairs(result)
    exact, approx = [], []
    for lo in range(0, len(msgs), chunk):
        block = msgs[lo:lo + chunk]
        exact.append(code_weights(entries, moduli, G.weights, block))
        approx.append(code_weights(entries[idx], moduli, w, block))
    return _compare("code", msgs, np.concatenate(exact), np.concatenate(approx), eps, mode,
                    seed if mode == "sampled" else None)


def _assignments(n):
    k = np.arange(2 ** n, dtype=np.int64)
    return ((k[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1).astype(np.int8)


def _fold_scopes(V, W, table, r):
    """Merge constraints on the same variable set into one table per set.

    Each table is re-indexed so that its bits follow the sorted variable order,
    then weighted tables of equal sorted scopes are summed.
    """
    order = np.argsort(V, axis=1, kind="stable")
    S = np.take_along_axis(V, order, axis=1)
    rank = np.argsort(order, axis=1)
    ybits = (np.arange(2 ** r)[:, None] >> np.arange(r - 1, -1, -1)[None, :]) & 1
    U, inv = np.unique(S, axis=0, return_inverse=True)
    inv = inv.ravel()
    folded = np.zeros((len(U), 2 ** r))
    step = max(1, 2 ** 22 // 2 ** r)
    for lo in range(0, len(V), step):
        rk = rank[lo:lo + step]
        # bit of original position pos is the bit of sorted position rk[pos]
        orig = np.zeros((len(rk), 2 ** r), dtype=np.int64)
        for pos in range(r):
            orig = (orig << 1) | ybits[:, rk[:, pos]].T
        np.add.at(folded, inv[lo:lo + step], table[orig] * W[lo:lo + step, None])
    return U, folded


def csp_values(constraints, n, X=None) -> np.ndarray:
    """Value of every assignment (rows of X, all of {0,1}^n by default).

    ``constraints`` is a list of (vars, weight, truth table bits) with x_1 the
    most significant bit of the table index.
    """
    X = _assignments(n) if X is None else np.asarray(X, dtype=np.int8)
    total = np.zeros(X.shape[0])
    groups: dict = {}
    for vars_, w, bits in constraints:
        groups.setdefault(len(vars_), []).append((vars_, w, bits))
    for r, items in groups.items():
        V = np.array([v for v, _, _ in items], dtype=np.int64).reshape(-1, r)
        W = np.array([w for _, w, _ in items], dtype=float)
        tables = np.array([b for _, _, b in items], dtype=float).reshape(-1, 2 ** r)
        uniq, inv = np.unique(tables, axis=0, return_inverse=True)
        folded = [_fold_scopes(V[inv.ravel() == t], W[inv.ravel() == t], uniq[t], r)
                  for t in range(len(uniq))]
        U = np.concatenate([f[0] for f in folded])
        T = np.concatenate([f[1] for f in folded])
        step = max(1, 2 ** 23 // max(1, X.shape[0]))
        for lo in range(0, len(U), step):
            idx = np.zeros((X.shape[0], min(step, len(U) - lo)), dtype=np.int64)
            for pos in range(r):
                idx = (idx << 1) | X[:, U[lo:lo + step, pos]]
            total += T[lo:lo + step][np.arange(idx.shape[1])[None, :], idx].sum(axis=1)
    return total


def _raw_constraints(inst):
    return [(c.vars, c.weight, c.predicate.table) for c in inst.constraints]


def verify_csp_sparsifier(inst, sparsified, eps: float, cap: int = 2 ** 20) -> VerificationReport:
    if 2 ** inst.n > cap:
        raise CapExceededError(f"2^{inst.n} assignments exceed the cap {cap}")
    X = _assignments(inst.n)
    exact = csp_values(_raw_constraints(inst), inst.n, X)
    approx = csp_values(_raw_constraints(sparsified), inst.n, X)
    return _compare("csp", X, exact, approx, eps)


def hedge_cut_values(n, hedges, X=None) -> np.ndarray:
    """Cut value of every vertex subset given as 0/1 rows of X; hedges are (weight, components)."""
    X = _assignments(n) if X is None else np.asarray(X, dtype=np.int8)
    total = np.zeros(X.shape[0])
    for w, comps in hedges:
        cut = np.zeros(X.shape[0], dtype=bool)
        for c in comps:
            s = X[:, list(c)].sum(axis=1)
            cut |= (s > 0) & (s < len(c))
        total += w * cut
    return total


def verify_hedge_sparsifier(h, sparsified, eps: float, cap: int = 2 ** 16) -> VerificationReport:
    if 2 ** h.n > cap:
        raise CapExceededError(f"2^{h.n} cuts exceed the cap {cap}")
    X = _assignments(h.n)
    raw = lambda g: [(e.weight, e.components) for e in g.hedges]
    return _compare("hedge", X, hedge_cut_values(h.n, raw(h), X),
                    hedge_cut_values(h.n, raw(sparsified), X), eps)


def cayley_eigenvalues(q, n, generators) -> tuple[np.ndarray, np.ndarray]:
    """(characters, eigenvalues) by summing 1 - Re chi_r(k s) over each generator cycle."""
    R = np.array(list(itertools.product(range(q), repeat=n)), dtype=np.int64).reshape(-1, n)
    vals = np.zeros(R.shape[0])
    ks = np.arange(1, q) if q > 2 else np.array([1])
    for s, w in generators:
        a = (R @ np.asarray(s, dtype=np.int64)) % q
        phase = 2 * np.pi * np.outer(a, ks) / q
        vals += w * (1 - np.cos(phase)).sum(axis=1)
    return R, vals


def verify_cayley_sparsifier(spec, sparsified, eps: float, cap: int = 200_000) -> VerificationReport:
    if spec.q ** spec.n > cap:
        raise CapExceededError(f"{spec.q ** spec.n} characters exceed the cap {cap}")
    R, exact = cayley_eigenvalues(spec.q, spec.n, spec.generators)
    _, approx = cayley_eigenvalues(spec.q, spec.n, sparsified.generators)
    exact[np.abs(exact) < 1e-9] = 0
    approx[np.abs(approx) < 1e-9] = 0
    return _compare("cayley", R, exact, approx, eps)


@dataclass(frozen=True)
class CensusRow:
    alpha: int
    count: int
    bound: int

    @property
    def within(self) -> bool:
        return self.count <= self.bound


def distinct_codewords(entries, moduli, cap: int = 200_000) -> np.ndarray:
    """All distinct codewords as an array (count, m, u)."""
    entries = np.asarray(entries, dtype=np.int64)
    m, n, u = entries.shape
    exponent = int(np.lcm.reduce(np.array(moduli, dtype=object))) if moduli else 1
    if exponent ** n > cap:
        raise CapExceededError(f"{exponent ** n} messages exceed the cap {cap}")
    X = np.array(list(itertools.product(range(exponent), repeat=n)), dtype=np.int64).reshape(-1, n)
    words = np.stack([(X @ entries[:, :, p].T) % q for p, q in enumerate(moduli)], axis=-1)
    return np.unique(words.reshape(len(X), -1), axis=0).reshape(-1, m, u)


def counting_bound_census(G, d: float, alpha_max: int = 2, cap: int = 200_000) -> list[CensusRow]:
    """Codewords of weight at most alpha*d against binom(ceil(n log2 q), alpha) q^(alpha+1)."""
    q = prod(G.spec.moduli)
    if G.m == 0:
        weights = np.zeros(1)
    else:
        words = distinct_codewords(G.entries, G.spec.moduli, cap)
        weights = words.any(axis=2) @ np.asarray(G.weights, dtype=float)
    top = ceil(G.n * log2(q) - 1e-12)
    return [CensusRow(a, int((weights <= a * d + 1e-9).sum()), comb(top, a) * q ** (a + 1))
            for a in range(1, alpha_max + 1)]


def lattice_points_bruteforce(B, box: int) -> set[tuple[int, ...]]:
    """Points of [-box, box]^d in the column lattice of B, by walking from 0 in +-column steps.

    The walk is confined to radius box + d * max|B|. By the Steinitz lemma the
    steps of any representation x = B z can be ordered so that every partial
    sum stays within d * max|B| of the segment from 0 to x, so nothing in the
    box is missed.
    """
    B = np.asarray(B, dtype=np.int64)
    d, l = B.shape
    top = int(np.abs(B).max()) if B.size else 0
    if top == 0:
        return {(0,) * d}
    R = box + d * top
    steps = np.concatenate([B.T, -B.T])
    seen = np.zeros((2 * R + 1,) * d, dtype=bool)
    frontier = np.zeros((1, d), dtype=np.int64)
    seen[(R,) * d] = True
    while frontier.size:
        nxt = (frontier[:, None, :] + steps[None, :, :]).reshape(-1, d)
        nxt = nxt[(np.abs(nxt) <= R).all(axis=1)]
        nxt = np.unique(nxt, axis=0)
        idx = tuple((nxt + R).T)
        nxt = nxt[~seen[idx]]
        seen[tuple((nxt + R).T)] = True
        frontier = nxt
    inner = seen[(slice(R - box, R + box + 1),) * d]
    return set(map(tuple, (np.argwhere(inner) - box).tolist()))
