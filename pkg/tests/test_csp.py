import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from codesparsify import (AND, OR, ClassificationError, CspInstance, GroupSpec, Predicate,
                          and_projection_general, and_projection_symmetric, classify_arity3,
                          evaluate_csp, nontrivial_sparsify, periodicity, sparsify_symmetric_csp)
from codesparsify.csp import (AffineRepresentation, Projection, affine_from_periodic,
                              encode_affine_csp, localize, or_of_affine, or_of_polynomials,
                              polynomial_to_linear, predicate_polynomial, symmetric_levels,
                              two_assignment_polynomial)
from codesparsify.oracle import code_weights, csp_values, verify_csp_sparsifier

from _util import all_assignments

MOD6 = Predicate.symmetric(20, zeros=[k for k in range(21) if k % 6 in (0, 1)])
SIX = Predicate.symmetric(6, zeros=[1, 5])


def test_predicate_tables():
    P = Predicate.from_bits("0001")
    assert P == AND(2) and P(1, 1) == 1 and P(0, 1) == 0
    assert Predicate.from_function(2, lambda x: x[0] | x[1]) == OR(2)
    assert Predicate.from_zero_set(2, [(0, 0)]) == OR(2)
    assert OR(3).satisfying()[0] == (0, 0, 1) and OR(3).zeros() == [(0, 0, 0)]
    with pytest.raises(ValueError):
        Predicate(2, (0, 1, 1))


def test_evaluate_csp():
    inst = CspInstance.uniform(3, OR(2), [(0, 1), (1, 2)], [1.0, 2.5])
    assert evaluate_csp(inst, (0, 0, 0)) == 0
    assert evaluate_csp(inst, (0, 0, 1)) == 2.5
    assert evaluate_csp(inst, (0, 1, 0)) == 3.5
    with pytest.raises(ValueError):
        evaluate_csp(inst, (0, 1))


def test_evaluate_matches_oracle():
    rng = np.random.default_rng(0)
    for _ in range(10):
        P = Predicate(3, tuple(int(b) for b in rng.integers(0, 2, size=8)))
        scopes = rng.integers(0, 6, size=(30, 3))
        inst = CspInstance.uniform(6, P, scopes, rng.uniform(0, 3, size=30))
        X = all_assignments(6)
        ours = [evaluate_csp(inst, a) for a in X]
        assert np.allclose(ours, csp_values([(c.vars, c.weight, c.predicate.table)
                                             for c in inst.constraints], 6))


def test_instance_validation():
    with pytest.raises(ValueError):
        CspInstance.uniform(2, OR(2), [(0, 2)])
    with pytest.raises(ValueError):
        CspInstance.uniform(3, OR(2), [(0, 1, 2)])
    with pytest.raises(ValueError):
        CspInstance.uniform(2, OR(2), [(0, 1)], [-1.0])


def test_symmetric_levels():
    assert symmetric_levels(AND(2)) == (0, 0, 1)
    assert symmetric_levels(Predicate.from_bits("0011")) is None
    cut = Predicate.symmetric(4, zeros=[0, 4])
    assert symmetric_levels(cut) == (0, 1, 1, 1, 0)


def test_periodicity_examples():
    assert periodicity(symmetric_levels(SIX)) == (1, 4)
    assert periodicity((0, 1, 1, 1, 0)) == (0, 4)
    assert periodicity(symmetric_levels(MOD6)) is None
    assert periodicity((1, 0, 1, 1)) == (1, 4)
    with pytest.raises(ValueError):
        periodicity((1, 1, 1))


def test_periodic_form_exact():
    c, ell = periodicity(symmetric_levels(SIX))
    rep = affine_from_periodic(6, c, ell)
    assert rep.represents(SIX)
    assert rep.spec == GroupSpec.cyclic(4)


def test_and2_witness_from_triple():
    levels = (1, 1, 0, 0, 1)  # r=4, zeros at 2 and 3
    w = and_projection_symmetric(levels)
    assert w is not None and w.is_and_of(Predicate.symmetric(4, levels))
    assert and_projection_symmetric(symmetric_levels(SIX)) is None


def test_mod6_witness():
    w = and_projection_symmetric(symmetric_levels(MOD6))
    assert w.c == 2 and w.is_and_of(MOD6)


def test_symmetric_exhaustive_r10():
    for r in range(1, 11):
        for mask in range(1, 2 ** (r + 1)):
            levels = tuple(0 if mask >> k & 1 else 1 for k in range(r + 1))
            brute = any(all(levels[k] == int(k % ell != c) for k in range(r + 1))
                        for ell in range(1, r + 2) for c in range(ell))
            per = periodicity(levels)
            assert (per is not None) == brute
            if per is None:
                assert and_projection_symmetric(levels).is_and_of(Predicate.symmetric(r, levels))
            else:
                assert affine_from_periodic(r, *per).represents(Predicate.symmetric(r, levels))


def test_general_projection():
    assert and_projection_general(AND(3), 3).images == ("x1", "x2", "x3")
    assert and_projection_general(OR(3), 2) is None
    f = Predicate.from_function(3, lambda x: 1 if x[0] else x[1] & x[2])
    w = and_projection_general(f, 2)
    assert w.is_and_of(f) and w.images[0] == "0"
    wide = Predicate.from_function(13, lambda x: x[0] & (1 - x[1]))
    with pytest.raises(ValueError):
        and_projection_general(wide, 2)


def test_mod6_has_no_and3():
    assert and_projection_general(MOD6, 3) is None


def test_projection_restrict():
    p = Projection(("x1", "~x2", "1"), 2)
    R = p.restrict(Predicate.from_function(3, lambda x: x[0] & (1 - x[1]) & x[2]))
    assert R == AND(2)


def test_classify_goldens():
    assert classify_arity3(AND(3)).c == 3
    assert classify_arity3(OR(3)).c == 1
    f = Predicate.from_function(3, lambda x: 1 if x[0] else x[1] & x[2])
    cls = classify_arity3(f)
    assert cls.c == 2 and cls.satisfying == 5 and cls.witness.is_and_of(f)
    with pytest.raises(ValueError):
        classify_arity3(AND(2))


def test_two_satisfying_family():
    for pair in itertools.combinations(range(8), 2):
        P = Predicate.from_zero_set(3, [k for k in range(8) if k not in pair])
        assert classify_arity3(P).c == 2


def test_arity3_census():
    got = Counter()
    for t in range(256):
        P = Predicate(3, tuple((t >> (7 - k)) & 1 for k in range(8)))
        cls = classify_arity3(P)
        got[cls.c] += 1
        if cls.c == 3:
            assert len(P.satisfying()) == 1
    assert got[3] == 8


def test_two_assignment_polynomials():
    p = two_assignment_polynomial((1, 0), (0, 1))
    assert p.table() == (0, 1, 1, 0) and p.degree <= 1
    p = two_assignment_polynomial((1, 1, 1), (1, 1, 0))
    assert p.table() == (0, 0, 0, 0, 0, 0, 1, 1)
    with pytest.raises(ValueError):
        two_assignment_polynomial((1, 0), (1, 0))


def test_two_assignment_degree_audit():
    rng = np.random.default_rng(1)
    for _ in range(60):
        r = int(rng.integers(2, 9))
        a, b = (tuple(int(v) for v in rng.integers(0, 2, size=r)) for _ in range(2))
        if a == b:
            continue
        p = two_assignment_polynomial(a, b)
        assert p.degree <= r - 1
        sat = [k for k, v in enumerate(p.table()) if v]
        assert sorted(sat) == sorted(int("".join(map(str, x)), 2) for x in (a, b))


def test_or_of_affine():
    z2 = GroupSpec.cyclic(2)
    one = AffineRepresentation(z2, (z2.element(1), z2.element(0)), z2.element(0))
    assert or_of_affine([one]).table() == one.table()
    two = AffineRepresentation(z2, (z2.element(0), z2.element(1)), z2.element(0))
    both = or_of_affine([one, two])
    assert both.table() == tuple(a | b for a, b in zip(one.table(), two.table()))
    with pytest.raises(ValueError):
        or_of_affine([one, AffineRepresentation(z2, (z2.element(1),), z2.element(0))])


def test_or_of_affine_exhaustive():
    rng = np.random.default_rng(2)
    z2 = GroupSpec.cyclic(2)
    for _ in range(30):
        r, s = int(rng.integers(1, 7)), int(rng.integers(1, 4))
        reps = [AffineRepresentation(z2, tuple(z2.element(int(v)) for v in rng.integers(0, 2, size=r)),
                                     z2.element(int(rng.integers(0, 2)))) for _ in range(s)]
        want = np.bitwise_or.reduce(np.array([p.table() for p in reps]), axis=0)
        assert or_of_affine(reps).table() == tuple(int(v) for v in want)


def test_encode_affine_repeated_variable_and_b():
    z5 = GroupSpec.cyclic(5)
    rep = AffineRepresentation(z5, (z5.element(1), z5.element(1)), z5.element(0))
    P = Predicate.from_function(2, lambda x: int((x[0] + x[1]) % 5 != 0))
    inst = CspInstance.uniform(3, P, [(1, 1), (0, 2)])
    G, lift = encode_affine_csp(inst, rep)
    assert G.entries[0, 1, 0] == 2 and not G.entries[:, 3].any()
    assert lift((1, 0, 1)) == (1, 0, 1, 1)


def test_encode_affine_faithful():
    rng = np.random.default_rng(3)
    inst = CspInstance.uniform(10, SIX, rng.integers(0, 10, size=(200, 6)), rng.uniform(0.5, 2, 200))
    G, lift = encode_affine_csp(inst, affine_from_periodic(6, 1, 4))
    X = all_assignments(10)
    msgs = np.array([lift(a) for a in X])
    assert np.allclose(code_weights(G.entries, G.spec.moduli, G.weights, msgs),
                       [evaluate_csp(inst, a) for a in X])


def test_encode_affine_rejects_mixed():
    inst = CspInstance(3, tuple(CspInstance.uniform(3, P, [(0, 1)]).constraints[0]
                                for P in (OR(2), AND(2))))
    with pytest.raises(ValueError):
        encode_affine_csp(inst, affine_from_periodic(2, 0, 3))


def test_polynomial_to_linear_single_monomial():
    z2 = GroupSpec.cyclic(2)
    p = two_assignment_polynomial((1, 1, 1), (1, 1, 0))
    G, cols, lift = polynomial_to_linear([p], 3)
    assert cols == [frozenset({0, 1})] and lift((1, 1, 0)) == (1,)
    with pytest.raises(ValueError):
        polynomial_to_linear([p], 3, ell=1)
    assert G.spec == z2


def test_polynomial_to_linear_random_z3():
    from codesparsify.csp import PolynomialRep
    rng = np.random.default_rng(4)
    z3 = GroupSpec.cyclic(3)
    X = all_assignments(5)
    for _ in range(10):
        polys = []
        for _ in range(6):
            mons = {}
            for _ in range(4):
                S = frozenset(int(v) for v in rng.choice(5, size=int(rng.integers(0, 3)), replace=False))
                mons[S] = z3.element(int(rng.integers(1, 3)))
            polys.append(PolynomialRep(z3, tuple(mons.items()), 5))
        G, cols, lift = polynomial_to_linear(polys, 5, ell=2)
        assert cols == sorted(cols, key=lambda S: (len(S), sorted(S)))
        for a in X:
            vals = (G.entries[:, :, 0] @ np.array(lift(a))) % 3
            assert vals.tolist() == [int(p.values()[int("".join(map(str, a)), 2)][0]) % 3 for p in polys]


def test_or_of_polynomials_matches_pointwise_or():
    rng = np.random.default_rng(5)
    for _ in range(30):
        r = int(rng.integers(2, 7))
        pts = [tuple(int(v) for v in rng.integers(0, 2, size=r)) for _ in range(4)]
        pairs = [(a, b) for a, b in zip(pts, pts[1:]) if a != b]
        if not pairs:
            continue
        polys = [two_assignment_polynomial(a, b) for a, b in pairs]
        want = np.bitwise_or.reduce(np.array([p.table() for p in polys]), axis=0)
        assert or_of_polynomials(polys, r).table() == tuple(int(v) for v in want)


def test_predicate_polynomial():
    assert predicate_polynomial(Predicate(2, (0, 0, 0, 0))) is None
    with pytest.raises(ClassificationError):
        predicate_polynomial(AND(3))
    P = Predicate.from_zero_set(3, [0, 1, 2, 4, 5, 7])
    assert predicate_polynomial(P).represents(P)


def test_localize_merges_repeats():
    p = two_assignment_polynomial((1, 1, 1), (1, 1, 0))
    q = localize(p, (2, 2, 0), 4)
    assert {frozenset(S) for S, _ in q.monomials} == {frozenset({2})}


def test_nontrivial_drops_never_satisfied():
    never = Predicate(3, (0,) * 8)
    inst = CspInstance.uniform(4, never, [(0, 1, 2)] * 5)
    assert nontrivial_sparsify(inst, 0.3).m == 0


def test_nontrivial_rejects_single_satisfying():
    inst = CspInstance.uniform(4, AND(3), [(0, 1, 2)])
    with pytest.raises(ClassificationError):
        nontrivial_sparsify(inst, 0.3)


def test_nontrivial_mixed_predicates():
    rng = np.random.default_rng(6)
    preds = [Predicate.from_zero_set(3, [k for k in range(8) if k not in (3, 6)]), OR(3), SIX]
    cons = []
    for j in range(900):
        P = preds[j % 3]
        scope = tuple(int(v) for v in rng.choice(9, size=P.arity, replace=False))
        cons.extend(CspInstance.uniform(9, P, [scope]).constraints)
    inst = CspInstance(9, tuple(cons))
    out = nontrivial_sparsify(inst, 0.3, 1)
    assert verify_csp_sparsifier(inst, out, 0.3).passed


def test_nontrivial_two_satisfying():
    rng = np.random.default_rng(5)
    P = Predicate.from_zero_set(3, [k for k in range(8) if k not in (3, 6)])
    scopes = [tuple(rng.choice(10, 3, replace=False)) for _ in range(3000)]
    inst = CspInstance.uniform(10, P, scopes)
    assert verify_csp_sparsifier(inst, nontrivial_sparsify(inst, 0.3, 0), 0.3).passed


def test_symmetric_driver_cut_and_six():
    rng = np.random.default_rng(7)
    cut = Predicate.symmetric(3, zeros=[0, 3])
    inst = CspInstance.uniform(10, cut, rng.integers(0, 10, size=(4000, 3)))
    out = sparsify_symmetric_csp(inst, 0.3, 0)
    assert verify_csp_sparsifier(inst, out, 0.3).passed
    inst = CspInstance.uniform(10, SIX, rng.integers(0, 10, size=(5000, 6)))
    assert verify_csp_sparsifier(inst, sparsify_symmetric_csp(inst, 0.3, 0), 0.3).passed


def test_symmetric_driver_aperiodic():
    inst = CspInstance.uniform(20, MOD6, [tuple(range(20))])
    with pytest.raises(ClassificationError) as exc:
        sparsify_symmetric_csp(inst, 0.3)
    assert exc.value.witness.is_and_of(MOD6)


def test_symmetric_driver_degenerate():
    always = Predicate.symmetric(2, levels=(1, 1, 1))
    inst = CspInstance.uniform(3, always, [(0, 1), (1, 2)], [1.0, 2.0])
    out = sparsify_symmetric_csp(inst, 0.3)
    assert out.m == 1 and out.constraints[0].weight == 3.0 and out.origin == (0,)
    never = Predicate.symmetric(2, levels=(0, 0, 0))
    assert sparsify_symmetric_csp(CspInstance.uniform(3, never, [(0, 1)]), 0.3).m == 0


def test_origin_tracks_source_constraints():
    rng = np.random.default_rng(8)
    inst = CspInstance.uniform(8, SIX, rng.integers(0, 8, size=(20000, 6)))
    out = sparsify_symmetric_csp(inst, 0.3, 0)
    assert out.m < inst.m
    assert all(inst.constraints[i].vars == c.vars for i, c in zip(out.origin, out.constraints))


@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_polynomial_rep_sound(r, seed):
    rng = np.random.default_rng(seed)
    P = Predicate(r, tuple(int(b) for b in rng.integers(0, 2, size=2 ** r)))
    if len(P.satisfying()) == 1:
        return
    rep = predicate_polynomial(P)
    assert rep is None or rep.represents(P)
