"""Cayley graphs, hedge-graphs and cardinality-based splitting functions as codes."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .codes import GeneratingMatrix
from .csp import CspInstance, Predicate, sparsify_symmetric_csp
from .groups import GroupSpec
from .lattice import least_prime_at_least
from .sparsifier import DEFAULT_CONFIG, SparsifyConfig, sparsify


class UnsupportedCaseError(ValueError):
    pass


@dataclass(frozen=True)
class CayleySpec:
    """Cayley graph on Z_q^n with weighted generators.

    With ``cyclically_closed`` each generator s stands for its whole cycle
    s, 2s, ..., (q-1)s, every element carrying the weight of s. For q = 2 the
    cycle of s is just s.
    """

    q: int
    n: int
    generators: tuple[tuple[tuple[int, ...], float], ...]
    cyclically_closed: bool = True

    def __post_init__(self):
        gens = []
        for vec, w in self.generators:
            vec = tuple(int(v) for v in vec)
            if len(vec) != self.n:
                raise ValueError(f"generator {vec} does not have length {self.n}")
            if any(not 0 <= v < self.q for v in vec):
                raise ValueError(f"generator {vec} has entries outside [0, {self.q})")
            if not any(vec):
                raise ValueError("the zero vector is not a generator")
            if not w > 0:
                raise ValueError("generator weights must be positive")
            gens.append((vec, float(w)))
        object.__setattr__(self, "generators", tuple(gens))

    @property
    def vertices(self) -> int:
        return self.q ** self.n

    def matrix(self) -> np.ndarray:
        return np.array([v for v, _ in self.generators], dtype=np.int64).reshape(-1, self.n)

    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.generators])


def cayley_to_code(spec: CayleySpec) -> GeneratingMatrix:
    """One row per generator; the codeword of character r is H r."""
    if spec.q > 2 and not spec.cyclically_closed:
        raise UnsupportedCaseError("over Z_q with q > 2 only cyclically closed generator sets reduce to codes")
    return GeneratingMatrix(GroupSpec.cyclic(spec.q), spec.matrix(), spec.weights())


def cayley_eigenvalue(spec: CayleySpec, r) -> float:
    """Laplacian eigenvalue of the character chi_r: q times the weight of H r."""
    r = np.asarray(r, dtype=np.int64)
    if r.shape != (spec.n,):
        raise ValueError(f"character must have length {spec.n}")
    if not spec.generators:
        return 0.0
    hit = (spec.matrix() @ r) % spec.q != 0
    return float(spec.q * spec.weights()[hit].sum())


def cayley_spectrum(spec: CayleySpec) -> dict[tuple[int, ...], float]:
    return {r: cayley_eigenvalue(spec, r)
            for r in itertools.product(range(spec.q), repeat=spec.n)}


def _vertex_index(x, q):
    out = 0
    for v in x:
        out = out * q + int(v)
    return out


def cayley_laplacian(spec: CayleySpec, max_vertices: int = 81) -> np.ndarray:
    """The explicit q^n x q^n Laplacian (vertices in lexicographic order)."""
    N = spec.vertices
    if N > max_vertices:
        raise ValueError(f"{N} vertices exceed the cap of {max_vertices}")
    q = spec.q
    verts = list(itertools.product(range(q), repeat=spec.n))
    A = np.zeros((N, N))
    steps = range(1, q) if (spec.cyclically_closed and q > 2) else (1,)
    for s, w in spec.generators:
        s = np.array(s)
        for k in steps:
            for x in verts:
                y = tuple((np.array(x) + k * s) % q)
                A[_vertex_index(x, q), _vertex_index(y, q)] += w
    return np.diag(A.sum(axis=1)) - A


def sparsify_cayley(spec: CayleySpec, eps: float, rng=None,
                    config: SparsifyConfig | None = None) -> CayleySpec:
    G = cayley_to_code(spec)
    res = sparsify(G, eps, rng, config or DEFAULT_CONFIG)
    gens = tuple((spec.generators[int(i)][0], float(w)) for i, w in zip(res.indices, res.weights))
    return CayleySpec(spec.q, spec.n, gens, spec.cyclically_closed)


@dataclass(frozen=True)
class Hedge:
    weight: float
    components: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class HedgeGraph:
    """Hedges given by their connected components of size at least 2."""

    n: int
    hedges: tuple[Hedge, ...]

    def __post_init__(self):
        hedges = []
        for h in self.hedges:
            if not isinstance(h, Hedge):
                w, comps = h
                h = Hedge(float(w), tuple(tuple(int(v) for v in c) for c in comps))
            seen = set()
            for c in h.components:
                if len(set(c)) < 2:
                    raise ValueError("hedge components need at least two vertices")
                if any(not 0 <= v < self.n for v in c):
                    raise ValueError(f"component {c} has a vertex outside [0, {self.n})")
                if seen & set(c):
                    raise ValueError("components of one hedge must be disjoint")
                seen |= set(c)
            if not h.components:
                raise ValueError("a hedge needs at least one component")
            if h.weight < 0:
                raise ValueError("hedge weights must be nonnegative")
            hedges.append(Hedge(float(h.weight), tuple(tuple(sorted(set(c))) for c in h.components)))
        object.__setattr__(self, "hedges", tuple(hedges))

    @property
    def m(self) -> int:
        return len(self.hedges)

    @property
    def R(self) -> int:
        return max((len(h.components) for h in self.hedges), default=1)

    def cut_value(self, S) -> float:
        """Total weight of hedges with a component meeting both S and its complement."""
        S = set(int(v) for v in S)
        total = 0.0
        for h in self.hedges:
            if any(0 < len(S.intersection(c)) < len(c) for c in h.components):
                total += h.weight
        return total


def hedge_to_code(h: HedgeGraph):
    """Code over (Z_p)^R: component i of the row of a hedge evaluates
    sum_{v in C_i} x_v - |C_i| x_{v*}, v* the largest vertex of C_i.

    Returns (G, lift, p) with lift(S) the indicator vector of S.
    """
    R = h.R
    p = least_prime_at_least(max(2, h.n))
    E = np.zeros((h.m, h.n, R), dtype=np.int64)
    for j, e in enumerate(h.hedges):
        for i, c in enumerate(e.components):
            E[j, list(c), i] += 1
            E[j, max(c), i] -= len(c)
    G = GeneratingMatrix(GroupSpec((p,) * R), E % p, [e.weight for e in h.hedges])

    def lift(S):
        x = [0] * h.n
        for v in S:
            x[int(v)] = 1
        return tuple(x)

    return G, lift, p


def sparsify_hedge(h: HedgeGraph, eps: float, rng=None,
                   config: SparsifyConfig | None = None) -> HedgeGraph:
    live = [j for j, e in enumerate(h.hedges) if e.weight > 0]
    G, _, _ = hedge_to_code(h)
    res = sparsify(G.restrict(live), eps, rng, config or DEFAULT_CONFIG)
    return HedgeGraph(h.n, tuple(Hedge(float(w), h.hedges[int(i)].components)
                                 for i, w in zip(res.indices, res.weights)))


@dataclass(frozen=True)
class SplittingSpec:
    """A {0,1}-valued splitting function that depends only on |S cap e|."""

    r: int
    levels: tuple[int, ...]

    def __post_init__(self):
        levels = tuple(int(v) for v in self.levels)
        if len(levels) != self.r + 1 or any(v not in (0, 1) for v in levels):
            raise ValueError("a splitting function needs r + 1 values in {0, 1}")
        object.__setattr__(self, "levels", levels)

    def predicate(self) -> Predicate:
        return Predicate.symmetric(self.r, self.levels)


def splitting_to_csp(n: int, hyperedges, spec: SplittingSpec, weights=None) -> CspInstance:
    edges = [tuple(int(v) for v in e) for e in hyperedges]
    if any(len(e) != spec.r for e in edges):
        raise ValueError(f"every hyperedge must have arity {spec.r}")
    return CspInstance.uniform(n, spec.predicate(), edges, weights)


def sparsify_splitting(n: int, hyperedges, spec: SplittingSpec, eps: float, rng=None,
                       weights=None, config: SparsifyConfig | None = None) -> CspInstance:
    """Raises ClassificationError (with an AND_2 witness) for aperiodic splitting functions."""
    return sparsify_symmetric_csp(splitting_to_csp(n, hyperedges, spec, weights), eps, rng, config)
