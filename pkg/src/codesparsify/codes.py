"""Generating matrices over finite Abelian groups, contraction and exact counting."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import lcm, log2, prod

import numpy as np

from .groups import GroupElement, GroupSpec, _apply_multi, component_order


class EnumerationCapError(ValueError):
    pass


class GeneratingMatrix:
    """An m x n matrix of group elements with nonnegative row weights.

    ``entries`` has shape (m, n, u): entry [j, i, p] is residue p of the group
    element in row j, column i. The code is {Gx : x in Z^n}. ``labels`` carries
    an identifier per row (defaults to 0..m-1) so that restrictions can be
    mapped back to coordinates of the matrix they came from.
    """

    __slots__ = ("spec", "entries", "weights", "labels")

    def __init__(self, spec: GroupSpec, entries, weights=None, labels=None):
        mod = spec.modvec()
        arr = np.asarray(entries, dtype=spec.dtype)
        if arr.ndim == 2 and spec.u == 1:
            arr = arr[:, :, None]
        if arr.ndim != 3 or arr.shape[2] != spec.u:
            raise ValueError(f"entries must have shape (m, n, {spec.u}), got {arr.shape}")
        if arr.shape[1] < 1:
            raise ValueError("a generating matrix needs at least one column")
        arr = arr % mod
        m = arr.shape[0]
        w = np.ones(m) if weights is None else np.asarray(weights, dtype=float).reshape(-1)
        if w.shape[0] != m:
            raise ValueError(f"{w.shape[0]} weights for {m} rows")
        if (w < 0).any() or not np.isfinite(w).all():
            raise ValueError("weights must be finite and nonnegative")
        lab = np.arange(m) if labels is None else np.asarray(labels, dtype=np.int64)
        if lab.shape != (m,):
            raise ValueError("labels must have one entry per row")
        arr.setflags(write=False)
        w.setflags(write=False)
        lab.setflags(write=False)
        self.spec = spec
        self.entries = arr
        self.weights = w
        self.labels = lab

    @classmethod
    def from_rows(cls, spec: GroupSpec, rows, weights=None) -> GeneratingMatrix:
        """Build from nested rows; a row entry is an int (u=1) or a residue tuple."""
        rows = [[tuple(e) if isinstance(e, GroupElement) else e for e in r] for r in rows]
        arr = np.array(rows, dtype=object)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        return cls(spec, arr, weights)

    @classmethod
    def from_columns(cls, spec: GroupSpec, columns, weights=None) -> GeneratingMatrix:
        cols = [list(c) for c in columns]
        return cls.from_rows(spec, list(map(list, zip(*cols))), weights)

    @classmethod
    def identity(cls, spec: GroupSpec, n: int) -> GeneratingMatrix:
        arr = np.zeros((n, n, spec.u), dtype=spec.dtype)
        for i in range(n):
            arr[i, i, :] = 1
        return cls(spec, arr)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    def __repr__(self):
        return f"GeneratingMatrix({self.spec}, m={self.m}, n={self.n})"

    def element(self, j: int, i: int) -> GroupElement:
        return GroupElement(tuple(int(x) for x in self.entries[j, i]))

    def restrict(self, rows) -> GeneratingMatrix:
        """Keep the given rows (indices into this matrix), with their weights and labels."""
        rows = np.asarray(rows, dtype=np.int64).reshape(-1)
        return GeneratingMatrix(self.spec, self.entries[rows], self.weights[rows], self.labels[rows])

    def with_weights(self, weights) -> GeneratingMatrix:
        return GeneratingMatrix(self.spec, self.entries, weights, self.labels)

    def with_entries(self, entries) -> GeneratingMatrix:
        return GeneratingMatrix(self.spec, entries, self.weights, self.labels)

    def nonzero_rows(self) -> np.ndarray:
        return self.entries.reshape(self.m, -1).any(axis=1)

    def column_orders(self) -> list[int]:
        """Order of each column as an element of A^m."""
        out = []
        for i in range(self.n):
            o = 1
            for p, q in enumerate(self.spec.moduli):
                for x in np.unique(self.entries[:, i, p]):
                    o = lcm(o, component_order(x, q))
            out.append(o)
        return out


@dataclass(frozen=True)
class Codeword:
    values: np.ndarray  # shape (m, u)

    def nonzero(self) -> np.ndarray:
        return self.values.any(axis=1)

    def __len__(self):
        return self.values.shape[0]

    def elements(self) -> list[GroupElement]:
        return [GroupElement(tuple(int(x) for x in row)) for row in self.values]

    def key(self) -> bytes:
        return np.ascontiguousarray(self.values, dtype=np.int64).tobytes()


@dataclass(frozen=True)
class CodeStats:
    distinct_count: int
    support_size: int
    density: float


def encode(G: GeneratingMatrix, x) -> Codeword:
    x = [int(v) for v in x]
    if len(x) != G.n:
        raise ValueError(f"message has length {len(x)}, matrix has {G.n} columns")
    mod = G.spec.modvec()
    xs = np.array([v % G.spec.exponent for v in x], dtype=G.spec.dtype)
    vals = np.einsum("jip,i->jp", G.entries, xs) % mod if G.spec.dtype is np.int64 \
        else (G.entries * xs[None, :, None]).sum(axis=1) % mod
    return Codeword(vals)


def weighted_weight(G: GeneratingMatrix, c: Codeword) -> float:
    if len(c) != G.m:
        raise ValueError("codeword length does not match the matrix")
    return float(G.weights[c.nonzero()].sum())


def support(G: GeneratingMatrix) -> set[int]:
    return set(np.flatnonzero(G.nonzero_rows()).tolist())


def contract_inplace(E: np.ndarray, spec: GroupSpec, j: int) -> int:
    """Contract the working array E (m, n, u) on row j; return the factor removed.

    For each group component in ascending order the row entries are reduced to a
    single gcd pivot by integer column operations, the pivot column is swapped to
    position 0, the other entries of the row are cancelled against it and the
    pivot column is multiplied by the order of its pivot entry.
    """
    mod = spec.modvec()
    factor = 1
    n = E.shape[1]
    for p, q in enumerate(spec.moduli):
        row = [int(x) for x in E[j, :, p]]
        if not any(row):
            continue
        # Euclid: repeatedly reduce every entry by the smallest nonzero one
        while True:
            nz = [i for i in range(n) if row[i]]
            piv = min(nz, key=lambda i: (row[i], i))
            if len(nz) == 1:
                break
            s = row[piv]
            ks = [0] * n
            for i in nz:
                if i != piv:
                    ks[i] = row[i] // s
                    row[i] -= ks[i] * s
            _apply_multi(E, mod, piv, ks)
        if piv != 0:
            E[:, [0, piv], :] = E[:, [piv, 0], :]
        g = int(E[j, 0, p])
        # Euclid already cleared the rest of the row, so only the scaling remains
        eta = component_order(g, q)
        E[:, 0, :] = (E[:, 0, :] * eta) % mod
        factor *= eta
    return factor


def contract(G: GeneratingMatrix, j: int) -> GeneratingMatrix:
    """Return G' with Span(G') = {c in Span(G) : c_j = 0}."""
    if not 0 <= j < G.m:
        raise IndexError(f"row {j} out of range for m={G.m}")
    E = G.entries.copy()
    contract_inplace(E, G.spec, j)
    return G.with_entries(E)


def count_distinct_codewords(G: GeneratingMatrix) -> int:
    """|Span(G)| exactly, as the product of the factors removed by contraction."""
    E = G.entries.copy()
    total = 1
    start = 0
    m = E.shape[0]
    while start < m:
        nz = E[start:].reshape(m - start, -1).any(axis=1)
        hits = np.flatnonzero(nz)
        if hits.size == 0:
            break
        j = start + int(hits[0])
        total *= contract_inplace(E[j:], G.spec, 0)
        start = j + 1
    return total


def code_stats(G: GeneratingMatrix) -> CodeStats:
    count = count_distinct_codewords(G)
    supp = len(support(G))
    return CodeStats(count, supp, log2(count) / supp if supp else 0.0)


def log2_count(G: GeneratingMatrix) -> float:
    return log2(count_distinct_codewords(G))


def enumerate_codewords(G: GeneratingMatrix, cap: int):
    """Yield (message, Codeword) for every x in prod_i [0, order of column i).

    Refuses when that message count exceeds ``cap``.
    """
    orders = G.column_orders()
    total = prod(orders)
    if total > cap:
        raise EnumerationCapError(f"{total} messages exceed the enumeration cap {cap}")
    for x in itertools.product(*(range(o) for o in orders)):
        yield x, encode(G, x)
