"""Maximum spanning subsets and the decomposition that peels off dense rows."""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log2

import numpy as np

from .codes import GeneratingMatrix, contract_inplace
from .groups import GroupSpec


def lg(x: float) -> float:
    """log2 clamped below at 1, so that log factors never vanish or go negative."""
    return max(1.0, log2(x)) if x > 0 else 1.0


def subset_size_bound(n: int, q: int) -> int:
    """ceil(n log2 q): every kept row at least doubles the span count."""
    return ceil(n * log2(q) - 1e-12)


@dataclass(frozen=True)
class SpanningSubset:
    indices: tuple[int, ...]
    span_count: int


@dataclass(frozen=True)
class Decomposition:
    kept: frozenset[int]
    remainder: GeneratingMatrix
    subsets: tuple[SpanningSubset, ...] = ()


def _greedy(spec: GroupSpec, E: np.ndarray) -> tuple[list[int], int]:
    """Greedy pass over the rows of the working array E (modified in place).

    A row is kept iff its current contracted image is nonzero, which is the
    same as it strictly increasing the span count of the kept rows; contracting
    on it then folds it into the kept set. Rows before the scan position are
    never looked at again, so only the tail is updated.
    """
    kept = []
    count = 1
    start = 0
    m = E.shape[0]
    while start < m:
        tail = E[start:]
        hits = np.flatnonzero(tail.reshape(m - start, -1).any(axis=1))
        if hits.size == 0:
            break
        j = start + int(hits[0])
        count *= contract_inplace(E[j:], spec, 0)
        kept.append(j)
        start = j + 1
    return kept, count


def build_max_spanning_subset(G: GeneratingMatrix) -> SpanningSubset:
    kept, count = _greedy(G.spec, G.entries.copy())
    return SpanningSubset(tuple(kept), count)


class _Scanner:
    """Greedy spanning-subset state without rewriting the whole matrix.

    Column operations compose into one transform S (an n x n integer matrix per
    group component), so the current image of row r is E[r] S. Contracting on a
    row only updates S.
    """

    def __init__(self, spec: GroupSpec, E: np.ndarray):
        self.spec = spec
        self.E = E
        self.mod = spec.modvec()
        n = E.shape[1]
        S = np.zeros((n, n, spec.u), dtype=E.dtype)
        for i in range(n):
            S[i, i, :] = 1
        self.S0 = S

    def images(self, S, rows) -> np.ndarray:
        blk = self.E[rows]
        out = np.empty_like(blk)
        for p, q in enumerate(self.spec.moduli):
            out[:, :, p] = (blk[:, :, p] @ S[:, :, p]) % q
        return out

    def absorb(self, S, image) -> tuple[np.ndarray, int]:
        A = np.concatenate([image[None], S], axis=0)
        factor = contract_inplace(A, self.spec, 0)
        return A[1:], factor

    def run(self, S, count, order, target=None):
        """Greedy over ``order`` from state (S, count); stop early once ``count`` hits target.

        Returns kept rows with the (state, count) seen just before each was kept.
        """
        kept, states = [], []
        pos, block = 0, 32
        while pos < order.size and (target is None or count < target):
            rows = order[pos:pos + block]
            img = self.images(S, rows)
            hits = np.flatnonzero(img.reshape(rows.size, -1).any(axis=1))
            if hits.size == 0:
                pos += rows.size
                block = min(block * 2, 4096)
                continue
            h = int(hits[0])
            kept.append(int(rows[h]))
            states.append((S, count))
            S, f = self.absorb(S, img[h])
            count *= f
            pos += h + 1
            block = 32
        return kept, states, S, count


def spanning_cover(G: GeneratingMatrix, multiplicity, t: int):
    """Disjoint maximum spanning subsets of G where row j is available
    ``multiplicity[j]`` times.

    Row j stands for that many identical coordinates placed consecutively, so a
    greedy subset never takes two copies of one row. As long as the set of rows
    with copies left does not change, every further subset is identical; those
    are emitted in one batch. Returns (taken, batches) where ``taken[j]`` is the
    number of copies of row j inside the union and ``batches`` lists
    (row indices, span count, repeat count) in construction order.
    """
    remaining = np.asarray(multiplicity, dtype=np.int64).copy()
    taken = np.zeros_like(remaining)
    batches = []
    left = int(t)
    scan = _Scanner(G.spec, G.entries)
    kept, states, S, count = scan.run(scan.S0, 1, np.flatnonzero(remaining > 0))
    while left > 0 and kept:
        reps = int(min(left, remaining[kept].min()))
        remaining[kept] -= reps
        taken[kept] += reps
        batches.append((tuple(kept), count, reps))
        left -= reps
        if left == 0:
            break
        # rows before the first exhausted one keep their greedy decisions
        i = next(k for k, r in enumerate(kept) if remaining[r] == 0)
        S0, c0 = states[i]
        after = kept[i]
        order = np.flatnonzero(remaining[after + 1:] > 0) + after + 1
        # the available set only shrinks, so the old count is an upper bound
        more, more_states, S, new_count = scan.run(S0, c0, order, target=count)
        kept = kept[:i] + more
        states = states[:i] + more_states
        count = new_count
    return taken, batches


def construct_spanning_subsets(G: GeneratingMatrix, t: int) -> list[SpanningSubset]:
    if t < 1:
        raise ValueError("t must be at least 1")
    _, batches = spanning_cover(G, np.ones(G.m, dtype=np.int64), t)
    return [SpanningSubset(rows, count) for rows, count, reps in batches for _ in range(reps)]


def default_subset_count(d: float, n: float, q: int) -> int:
    """ceil(2 d log2(q) (log2 n + log2 q)), the conservative reading of the subset count."""
    return ceil(2 * d * lg(q) * (lg(n) + lg(q)))


def code_decomposition(G: GeneratingMatrix, d: float, t: int | None = None) -> Decomposition:
    """Remove the union T of t disjoint maximum spanning subsets.

    After removal, codewords of weight at most alpha*d are few (the counting bound
    checked by ``oracle.counting_bound_census``).
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    if t is None:
        t = default_subset_count(d, G.n, G.spec.order)
    subsets = construct_spanning_subsets(G, t)
    kept = frozenset(i for s in subsets for i in s.indices)
    rest = np.array(sorted(set(range(G.m)) - kept), dtype=np.int64)
    return Decomposition(kept, G.restrict(rest), tuple(subsets))
