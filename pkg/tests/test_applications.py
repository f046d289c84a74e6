import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from codesparsify import (CayleySpec, ClassificationError, HedgeGraph, SplittingSpec,
                          UnsupportedCaseError, cayley_eigenvalue, cayley_laplacian, cayley_spectrum,
                          cayley_to_code, hedge_to_code, sparsify_cayley, sparsify_hedge,
                          sparsify_splitting, splitting_to_csp)
from codesparsify.csp import periodicity, symmetric_levels
from codesparsify.oracle import (cayley_eigenvalues, hedge_cut_values, verify_cayley_sparsifier,
                                 verify_csp_sparsifier, verify_hedge_sparsifier)

from _util import all_assignments


def random_generators(rng, q, n, m):
    out = []
    while len(out) < m:
        v = tuple(int(x) for x in rng.integers(0, q, size=n))
        if any(v):
            out.append((v, float(rng.uniform(0.5, 2))))
    return tuple(out)


def random_hedges(rng, n, m, R=2):
    out = []
    for _ in range(m):
        k = int(rng.integers(1, R + 1))
        perm = rng.permutation(n)
        comps, pos = [], 0
        for _ in range(k):
            s = int(rng.integers(2, 5))
            comps.append(tuple(int(v) for v in perm[pos:pos + s]))
            pos += s
        out.append((1.0, comps))
    return HedgeGraph(n, tuple(out))


def test_cayley_to_code():
    spec = CayleySpec(2, 3, (((1, 0, 0), 1.0), ((0, 1, 1), 2.0)))
    G = cayley_to_code(spec)
    assert G.entries[:, :, 0].tolist() == [[1, 0, 0], [0, 1, 1]]
    assert G.weights.tolist() == [1.0, 2.0]
    G = cayley_to_code(CayleySpec(3, 1, (((1,), 1.0),)))
    assert G.entries.tolist() == [[[1]]]


def test_cayley_unsupported():
    spec = CayleySpec(3, 1, (((1,), 1.0),), cyclically_closed=False)
    with pytest.raises(UnsupportedCaseError):
        cayley_to_code(spec)
    cayley_to_code(CayleySpec(2, 1, (((1,), 1.0),), cyclically_closed=False))


def test_cayley_validation():
    with pytest.raises(ValueError):
        CayleySpec(3, 2, (((0, 0), 1.0),))
    with pytest.raises(ValueError):
        CayleySpec(3, 2, (((1, 3), 1.0),))
    with pytest.raises(ValueError):
        CayleySpec(3, 2, (((1, 1), 0.0),))


def test_triangle_eigenvalues():
    spec = CayleySpec(3, 1, (((1,), 1.0),))
    assert cayley_eigenvalue(spec, (0,)) == 0
    assert cayley_eigenvalue(spec, (1,)) == 3
    ev = np.sort(np.linalg.eigvalsh(cayley_laplacian(spec)))
    assert np.allclose(ev, [0, 3, 3])


def test_f2_character_sum():
    rng = np.random.default_rng(0)
    spec = CayleySpec(2, 4, random_generators(rng, 2, 4, 30))
    for r in itertools.product((0, 1), repeat=4):
        direct = sum(w * (1 - (-1) ** (np.dot(r, s) % 2)) for s, w in spec.generators)
        assert cayley_eigenvalue(spec, r) == pytest.approx(direct)


def test_formula_matches_dense_laplacian():
    rng = np.random.default_rng(1)
    for q, n in [(2, 3), (3, 2), (4, 2), (5, 2), (3, 4)]:
        spec = CayleySpec(q, n, random_generators(rng, q, n, 12))
        ev = np.sort(np.linalg.eigvalsh(cayley_laplacian(spec)))
        fv = np.sort(list(cayley_spectrum(spec).values()))
        assert np.allclose(ev, fv, rtol=1e-6, atol=1e-9)
        _, ov = cayley_eigenvalues(q, n, spec.generators)
        assert np.allclose(np.sort(ov), fv)


def test_laplacian_cap():
    with pytest.raises(ValueError):
        cayley_laplacian(CayleySpec(3, 5, (((1, 0, 0, 0, 0), 1.0),)))


def test_sparsify_cayley_small_unchanged():
    spec = CayleySpec(3, 2, random_generators(np.random.default_rng(2), 3, 2, 20))
    out = sparsify_cayley(spec, 0.25, 0)
    assert [v for v, _ in out.generators] == [v for v, _ in spec.generators]
    assert (out.q, out.n) == (spec.q, spec.n)


def test_sparsify_cayley_f2():
    spec = CayleySpec(2, 4, random_generators(np.random.default_rng(3), 2, 4, 5000))
    out = sparsify_cayley(spec, 0.25, 0)
    assert len(out.generators) < 5000
    assert verify_cayley_sparsifier(spec, out, 0.25).passed


def test_hedge_pair_component():
    h = HedgeGraph(4, ((1.0, [(1, 3)]),))
    G, lift, p = hedge_to_code(h)
    for S in [(), (1,), (3,), (1, 3), (0, 2)]:
        row = (G.entries[0, :, 0] @ np.array(lift(S))) % p
        assert bool(row) == (len(set(S) & {1, 3}) == 1)


def test_hyperedge_is_single_component_cut():
    h = HedgeGraph(5, ((1.0, [(0, 2, 4)]),))
    G, lift, p = hedge_to_code(h)
    assert G.spec.moduli == (5,)
    for S in itertools.chain.from_iterable(itertools.combinations(range(5), k) for k in range(6)):
        val = (G.entries[0, :, 0] @ np.array(lift(S))) % p
        assert bool(val) == (0 < len(set(S) & {0, 2, 4}) < 3)


def _code_cuts(h):
    G, lift, p = hedge_to_code(h)
    X = all_assignments(h.n)
    vals = np.stack([(X @ G.entries[:, :, i].T) % p for i in range(G.spec.u)], -1)
    return vals.any(axis=2) @ G.weights


def test_hedge_code_matches_cuts_n6():
    h = HedgeGraph(6, ((1.0, [(0, 1), (2, 3)]), (2.0, [(1, 4, 5), (0, 2)])))
    X = all_assignments(6)
    direct = [h.cut_value(np.flatnonzero(x)) for x in X]
    assert np.allclose(_code_cuts(h), direct)
    assert np.allclose(hedge_cut_values(6, [(e.weight, e.components) for e in h.hedges]), direct)


def test_hedge_validation():
    with pytest.raises(ValueError):
        HedgeGraph(4, ((1.0, [(0,)]),))
    with pytest.raises(ValueError):
        HedgeGraph(4, ((1.0, [(0, 1), (1, 2)]),))
    with pytest.raises(ValueError):
        HedgeGraph(4, ((1.0, [(0, 7)]),))
    with pytest.raises(ValueError):
        HedgeGraph(4, ((1.0, []),))


def test_single_hedge_preserved():
    h = HedgeGraph(5, ((2.5, [(0, 1), (2, 3, 4)]),))
    out = sparsify_hedge(h, 0.3, 0)
    assert out.m == 1 and out.hedges[0].components == h.hedges[0].components
    assert out.hedges[0].weight == pytest.approx(2.5, rel=0.02)


def test_doubled_weights_double_cuts():
    h = random_hedges(np.random.default_rng(4), 6, 30)
    h2 = HedgeGraph(6, tuple((2 * e.weight, e.components) for e in h.hedges))
    assert np.allclose(_code_cuts(h2), 2 * _code_cuts(h))
    out = sparsify_hedge(h2, 0.3, 0)
    assert verify_hedge_sparsifier(h2, out, 0.3).passed


def test_sparsify_hedge_random():
    h = random_hedges(np.random.default_rng(5), 10, 2000)
    assert verify_hedge_sparsifier(h, sparsify_hedge(h, 0.3, 1), 0.3).passed


@given(st.integers(2, 9), st.integers(0, 2**32 - 1))
def test_no_false_zeros(n, seed):
    rng = np.random.default_rng(seed)
    h = random_hedges(rng, max(n, 8), 1, R=2)
    G, lift, p = hedge_to_code(h)
    S = np.flatnonzero(rng.integers(0, 2, size=h.n))
    row = np.stack([(G.entries[0, :, i] @ np.array(lift(S))) % p for i in range(G.spec.u)])
    assert bool(row.any()) == (h.cut_value(S) > 0)


def test_splitting_reductions():
    cut = SplittingSpec(3, (0, 1, 1, 0))
    assert periodicity(symmetric_levels(cut.predicate())) == (0, 3)
    rng = np.random.default_rng(6)
    edges = [tuple(rng.choice(10, 3, replace=False)) for _ in range(3000)]
    inst = splitting_to_csp(10, edges, cut)
    out = sparsify_splitting(10, edges, cut, 0.3, 0)
    assert verify_csp_sparsifier(inst, out, 0.3).passed
    six = SplittingSpec(6, (1, 0, 1, 1, 1, 0, 1))
    assert periodicity(symmetric_levels(six.predicate())) == (1, 4)


def test_splitting_aperiodic():
    levels = tuple(0 if k % 6 in (0, 1) else 1 for k in range(21))
    with pytest.raises(ClassificationError) as exc:
        sparsify_splitting(20, [tuple(range(20))], SplittingSpec(20, levels), 0.3)
    assert exc.value.witness is not None
    with pytest.raises(ValueError):
        SplittingSpec(2, (0, 1))
    with pytest.raises(ValueError):
        splitting_to_csp(4, [(0, 1)], SplittingSpec(3, (0, 1, 1, 0)))
