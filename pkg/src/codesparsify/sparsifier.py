"""Randomized code sparsification.

Pipeline: split coordinates into weight classes, peel classes apart by
contraction (heaviest first), turn each class into an integer-multiplicity
code, then recursively keep a union of spanning subsets and subsample the
rest. ``sparsify`` runs the whole pipeline twice.

A code whose weights are nonnegative integers is treated as the unweighted
code in which row j is repeated ``w[j]`` times. Every step downstream of
unweighting works on these multiplicities, so replicas are never materialized.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import ceil, floor, log, log2, sqrt

import numpy as np

from .codes import GeneratingMatrix, contract_inplace, count_distinct_codewords
from .spanning import lg, spanning_cover


class ReplicaCapError(MemoryError):
    def __init__(self, required: int, cap: int):
        super().__init__(f"unweighting needs {required} replicas, above the cap of {cap}; "
                         f"raise replica_cap to at least {required}")
        self.required = required
        self.cap = cap


@dataclass(frozen=True)
class SparsifyConfig:
    """Constants of the sparsification recursion.

    Writing K = eta * n * lg(n)^2 * lg(q)^2 / eps^2 for a code with 2^n codewords
    over a group of order q, a call on a code of length m

    * returns the code unchanged when m <= threshold_factor * K,
    * sets d = m / (d_factor * K),
    * keeps t = ceil(subset_factor * b * lg(q)^[subset_log_q] * (lg n + lg q))
      disjoint spanning subsets, b = decomposition_factor * sqrt(d) * eta * lg(n) lg(q) / eps^2,
    * samples the rest at rate min(1, max(sampling_factor / sqrt(d), sample_floor / (eps^2 m))).

    The floor keeps the expected sample at sample_floor / eps^2 or more; without
    it a code with few codewords is cut down to a few dozen samples.

    ``eta=None`` means eta = 100 (log2(m/eps) * lg(log2 q))^2 at the pipeline
    level, with m the length of the code handed to ``final_code_sparsify``.
    ``asymptotic()`` holds the asymptotic constants, under which every desk-sized
    input falls below the threshold and is returned as is. ``desk()`` (the
    default) lowers the threshold so that long codes with few codewords
    actually shrink, and samples hard once a code is above it. Codes near the
    threshold are the ones whose light codewords would not survive sampling at
    the requested eps, so they are kept whole. Its accuracy is established
    empirically by the acceptance suite rather than by the union bounds.
    """

    eta: float | None = 40.0
    threshold_factor: float = 100.0
    d_factor: float = 2.0
    decomposition_factor: float = 1.0
    sampling_factor: float = 1.0
    sample_floor: float = 0.0
    subset_factor: float = 2.0
    subset_log_q: bool = True
    unweight_share: float = 1 / 8
    code_share: float = 1 / 80
    alpha_exponent: float = 3.0
    replica_cap: int = 10**7

    @classmethod
    def asymptotic(cls) -> SparsifyConfig:
        return cls(eta=None)

    @classmethod
    def desk(cls) -> SparsifyConfig:
        return cls(
            eta=40.0,
            threshold_factor=0.3,
            d_factor=1.5e-6,
            decomposition_factor=1e-6,
            sampling_factor=1.0,
            sample_floor=32.0,
            unweight_share=1.0,
            code_share=1.0,
        )

    def with_(self, **kw) -> SparsifyConfig:
        return replace(self, **kw)


DEFAULT_CONFIG = SparsifyConfig.desk()


@dataclass(frozen=True)
class SparsifierResult:
    """Surviving coordinates (labels of the input rows, sorted) and their new weights."""

    indices: np.ndarray
    weights: np.ndarray
    epsilon: float
    seed: int
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def entries(self) -> list[tuple[int, float]]:
        return [(int(i), float(w)) for i, w in zip(self.indices, self.weights)]

    def __len__(self):
        return int(self.indices.size)

    def as_dict(self) -> dict[int, float]:
        return dict(self.entries)


def _result(labels, weights, eps, seed, stats) -> SparsifierResult:
    labels = np.asarray(labels, dtype=np.int64)
    weights = np.asarray(weights, dtype=float)
    if labels.size:
        uniq, inv = np.unique(labels, return_inverse=True)
        merged = np.zeros(uniq.size)
        np.add.at(merged, inv, weights)
    else:
        uniq, merged = labels, weights
    keep = merged > 0
    return SparsifierResult(uniq[keep], merged[keep], float(eps), int(seed), stats)


def apply_result(C: GeneratingMatrix, result: SparsifierResult) -> GeneratingMatrix:
    """The reweighted sub-code of C that a result describes."""
    pos = {int(l): j for j, l in enumerate(C.labels)}
    rows = [pos[int(i)] for i in result.indices]
    return C.restrict(rows).with_weights(result.weights)


def _root_seed(rng) -> int:
    if rng is None:
        return 0
    if isinstance(rng, (int, np.integer)):
        return int(rng)
    if isinstance(rng, np.random.Generator):
        return int(rng.integers(0, 2**63 - 1))
    raise TypeError(f"rng must be an int seed or numpy Generator, got {type(rng).__name__}")


def _stream(seed: int, path) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(path)))


# weight classes

@dataclass(frozen=True)
class WeightClasses:
    """Class i holds the coordinates with weight in [alpha^(i-1), alpha^i)."""

    classes: dict
    d_odd: np.ndarray
    d_even: np.ndarray
    alpha: float

    def class_of(self) -> dict[int, int]:
        return {int(j): i for i, rows in self.classes.items() for j in rows}

    def range(self, i: int) -> tuple[float, float]:
        return self.alpha ** (i - 1), self.alpha ** i


def weight_class_index(w: float, alpha: float) -> int:
    i = floor(log(w) / log(alpha)) + 1
    while w < alpha ** (i - 1):
        i -= 1
    while w >= alpha ** i:
        i += 1
    return i


def weight_class_decomposition(G: GeneratingMatrix, eps: float, alpha: float) -> WeightClasses:
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    if (G.weights <= 0).any():
        raise ValueError("weight classes need strictly positive weights")
    idx = np.array([weight_class_index(float(w), alpha) for w in G.weights], dtype=np.int64)
    classes = {int(i): np.flatnonzero(idx == i) for i in np.unique(idx)}
    odd = np.flatnonzero(idx % 2 != 0)
    even = np.flatnonzero(idx % 2 == 0)
    return WeightClasses(classes, odd, even, float(alpha))


def single_span_decomposition(D: GeneratingMatrix, alpha: float, i: int):
    """Split off class i: returns (D restricted to E_i, the rest after contracting E_i away)."""
    idx = np.array([weight_class_index(float(w), alpha) for w in D.weights], dtype=np.int64)
    rows = np.flatnonzero(idx == i)
    if rows.size == 0:
        raise ValueError(f"weight class {i} is empty")
    kept = D.restrict(rows)
    E = D.entries.copy()
    for j in rows:
        if E[j].any():
            contract_inplace(E, D.spec, int(j))
    rest = np.flatnonzero(idx != i)
    contracted = GeneratingMatrix(D.spec, E[rest], D.weights[rest], D.labels[rest])
    return kept, contracted


def span_decomposition(D: GeneratingMatrix, alpha: float) -> list[tuple[int, GeneratingMatrix]]:
    """Heaviest class first: store the class, contract it away, continue on the rest.

    The span counts of the returned pieces multiply to the span count of D.
    """
    if D.m == 0:
        return []
    idx = np.array([weight_class_index(float(w), alpha) for w in D.weights], dtype=np.int64)
    E = D.entries.copy()
    out = []
    for i in sorted(set(idx.tolist()), reverse=True):
        rows = np.flatnonzero(idx == i)
        out.append((i, GeneratingMatrix(D.spec, E[rows], D.weights[rows], D.labels[rows])))
        for j in rows:
            if E[j].any():
                contract_inplace(E, D.spec, int(j))
    return out


# unweighting

@dataclass(frozen=True)
class Unweighted:
    """An integer-multiplicity code: row j of ``matrix`` stands for ``matrix.weights[j]``
    unit-weight replicas of coordinate ``matrix.labels[j]``."""

    matrix: GeneratingMatrix
    scale: float

    @property
    def length(self) -> int:
        return int(self.matrix.weights.sum())

    def expand(self) -> tuple[GeneratingMatrix, np.ndarray]:
        """Materialize the replicas; returns (unit-weight matrix, replica -> origin label)."""
        counts = self.matrix.weights.astype(np.int64)
        rows = np.repeat(np.arange(self.matrix.m), counts)
        G = self.matrix.restrict(rows).with_weights(np.ones(rows.size))
        return G, self.matrix.labels[rows]


def make_unweighted(C: GeneratingMatrix, alpha: float, i: int, eps: float,
                    cap: int = 10**7, base: float | None = None) -> Unweighted:
    """Divide weights by ``base`` (alpha^(i-1) unless given) and replicate coordinate j
    floor(10 w_j / eps) times; the replicas carry weight ``base * eps / 10`` each."""
    if base is None:
        base = alpha ** (i - 1)
    counts = np.floor(10 * (C.weights / base) / eps + 1e-9).astype(np.int64)
    total = int(counts.sum())
    if total > cap:
        raise ReplicaCapError(total, cap)
    keep = np.flatnonzero(counts > 0)
    M = C.restrict(keep).with_weights(counts[keep])
    return Unweighted(M, base * eps / 10)


# recursive sparsification of an integer-multiplicity code

def _size_unit(n: float, q: int, eps: float, eta: float) -> float:
    return eta * n * lg(n) ** 2 * lg(q) ** 2 / eps ** 2


def _code_sparsify(G, mult, n, eps, eta, seed, path, cfg, stats, depth):
    """Weights (per row of G) of the sparsifier of the multiplicity code (G, mult)."""
    q = G.spec.order
    M = int(mult.sum())
    unit = _size_unit(n, q, eps, eta)
    stats["depth"] = max(stats["depth"], depth)
    stats["levels"].setdefault(depth, []).append(M)
    if M <= cfg.threshold_factor * unit:
        return mult.astype(float)
    d = M / (cfg.d_factor * unit)
    p = min(1.0, max(cfg.sampling_factor / sqrt(d), cfg.sample_floor / (eps ** 2 * M)))
    if p >= 1.0:
        return mult.astype(float)
    b = max(1.0, cfg.decomposition_factor * sqrt(d) * eta * lg(n) * lg(q) / eps ** 2)
    t = ceil(cfg.subset_factor * b * (lg(q) if cfg.subset_log_q else 1.0) * (lg(n) + lg(q)))
    if t >= M:
        # every subset takes at least one replica, so T would swallow the code
        return mult.astype(float)
    active = np.flatnonzero(mult > 0)
    taken = np.zeros_like(mult)
    taken[active], _ = spanning_cover(G.restrict(active), mult[active], t)
    rest = mult - taken
    if rest.sum() == 0:
        return mult.astype(float)
    sampled = _stream(seed, path).binomial(rest, p)
    stats["kept"] += int(taken.sum())
    out = _code_sparsify(G, taken, n, eps, eta, seed, path + (0,), cfg, stats, depth + 1)
    if sampled.any():
        out += _code_sparsify(G, sampled, n, eps, eta, seed, path + (1,), cfg, stats,
                              depth + 1) / p
    return out


def code_sparsify(C: GeneratingMatrix, n_log_count: float, eps: float, eta: float,
                  rng=None, config: SparsifyConfig | None = None) -> SparsifierResult:
    """Sparsify an unweighted code; integer weights are read as replica counts.

    ``n_log_count`` is log2 of the number of distinct codewords.
    """
    cfg = config or DEFAULT_CONFIG
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if eta < 1:
        raise ValueError("eta must be at least 1")
    w = C.weights
    if (w != np.round(w)).any():
        raise ValueError("code_sparsify expects unit or integer weights; unweight first")
    seed = _root_seed(rng)
    stats = {"depth": 0, "levels": {}, "kept": 0}
    out = _code_sparsify(C, w.astype(np.int64), max(n_log_count, 1.0), eps, eta, seed, (),
                         cfg, stats, 0)
    return _result(C.labels, out, eps, seed, stats)


def pipeline_eta(m: int, eps: float, q: int, cfg: SparsifyConfig) -> float:
    if cfg.eta is not None:
        return float(cfg.eta)
    return 100 * (log2(m / eps) * lg(log2(q))) ** 2


def _final(C, eps, seed, path, cfg, stats):
    live = np.flatnonzero((C.weights > 0) & C.nonzero_rows())
    C = C.restrict(live)
    m = C.m
    if m == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    alpha = (m / eps) ** cfg.alpha_exponent
    eta = pipeline_eta(m, eps, C.spec.order, cfg)
    classes = weight_class_decomposition(C, eps, alpha)
    labels, weights = [], []
    stats.setdefault("classes", 0)
    for parity, rows in (("odd", classes.d_odd), ("even", classes.d_even)):
        if rows.size == 0:
            continue
        for i, H in span_decomposition(C.restrict(rows), alpha):
            if not H.nonzero_rows().any():
                continue
            stats["classes"] += 1
            U = make_unweighted(H, alpha, i, eps * cfg.unweight_share, cfg.replica_cap,
                                base=float(H.weights.min()))
            n_log = log2(count_distinct_codewords(U.matrix))
            sub = {"depth": 0, "levels": {}, "kept": 0}
            w = _code_sparsify(U.matrix, U.matrix.weights.astype(np.int64), max(n_log, 1.0),
                               eps * cfg.code_share, eta, seed, path + (i,), cfg, sub, 0)
            stats["depth"] = max(stats.get("depth", 0), sub["depth"])
            stats.setdefault("pieces", []).append(
                {"class": i, "rows": H.m, "replicas": U.length, "log2_count": n_log,
                 "levels": {k: sum(v) for k, v in sub["levels"].items()}})
            labels.append(U.matrix.labels)
            weights.append(w * U.scale)
    if not labels:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    return np.concatenate(labels), np.concatenate(weights)


def final_code_sparsify(C: GeneratingMatrix, eps: float, rng=None,
                        config: SparsifyConfig | None = None) -> SparsifierResult:
    cfg = config or DEFAULT_CONFIG
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    seed = _root_seed(rng)
    stats = {}
    labels, weights = _final(C, eps, seed, (0,), cfg, stats)
    return _result(labels, weights, eps, seed, stats)


def sparsify(C: GeneratingMatrix, eps: float, rng=None,
             config: SparsifyConfig | None = None) -> SparsifierResult:
    """Two passes of ``final_code_sparsify`` at eps/2, the second on the output of the first."""
    cfg = config or DEFAULT_CONFIG
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    seed = _root_seed(rng)
    s1, s2 = {}, {}
    first = _result(*_final(C, eps / 2, seed, (1,), cfg, s1), eps / 2, seed, s1)
    mid = apply_result(C, first)
    second = _result(*_final(mid, eps / 2, seed, (2,), cfg, s2), eps, seed, s2)
    stats = {"passes": [s1, s2], "sizes": [C.m, len(first), len(second)],
             "depth": max(s1.get("depth", 0), s2.get("depth", 0))}
    return replace(second, stats=stats)
