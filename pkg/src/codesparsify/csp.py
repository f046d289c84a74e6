"""Boolean predicates, their affine and polynomial encodings, and CSP sparsification.

Truth tables are indexed with x_1 as the most significant bit, so the table
entry for the assignment written "011100100" is at int("011100100", 2).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .codes import GeneratingMatrix
from .groups import GroupElement, GroupSpec
from .sparsifier import DEFAULT_CONFIG, SparsifyConfig, sparsify


class ClassificationError(ValueError):
    """The instance falls outside the sparsifiable class the driver handles."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def bits_of(index: int, r: int) -> tuple[int, ...]:
    return tuple((index >> (r - 1 - i)) & 1 for i in range(r))


def index_of(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | (int(b) & 1)
    return out


def _all_points(r: int) -> np.ndarray:
    """Every x in {0,1}^r, row k being the bits of k."""
    k = np.arange(2 ** r)
    return ((k[:, None] >> np.arange(r - 1, -1, -1)[None, :]) & 1).astype(np.int64)


@dataclass(frozen=True)
class Predicate:
    arity: int
    table: tuple[int, ...]

    def __post_init__(self):
        table = tuple(int(b) for b in self.table)
        if len(table) != 2 ** self.arity:
            raise ValueError(f"a predicate of arity {self.arity} needs {2 ** self.arity} bits")
        if any(b not in (0, 1) for b in table):
            raise ValueError("truth table entries must be 0 or 1")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_bits(cls, bits) -> Predicate:
        if isinstance(bits, str):
            bits = [int(ch) for ch in bits.strip()]
        bits = list(bits)
        r = len(bits).bit_length() - 1
        if 2 ** r != len(bits):
            raise ValueError("truth table length must be a power of two")
        return cls(r, tuple(bits))

    @classmethod
    def from_function(cls, r: int, f) -> Predicate:
        return cls(r, tuple(int(bool(f(bits_of(k, r)))) for k in range(2 ** r)))

    @classmethod
    def symmetric(cls, r: int, levels=None, zeros=None) -> Predicate:
        """From a level function P0 on {0..r}, or from the set of zero levels."""
        if levels is None:
            zs = set(int(z) for z in zeros)
            if any(not 0 <= z <= r for z in zs):
                raise ValueError("zero levels must lie in [0, r]")
            levels = [0 if k in zs else 1 for k in range(r + 1)]
        levels = list(levels)
        if len(levels) != r + 1:
            raise ValueError("a level function needs r + 1 values")
        return cls(r, tuple(levels[bin(k).count("1")] for k in range(2 ** r)))

    @classmethod
    def from_zero_set(cls, r: int, zeros) -> Predicate:
        zs = {index_of(z) if not isinstance(z, int) else z for z in zeros}
        return cls(r, tuple(0 if k in zs else 1 for k in range(2 ** r)))

    def __call__(self, *x) -> int:
        if len(x) == 1 and not isinstance(x[0], (int, np.integer)):
            x = tuple(x[0])
        return self.table[index_of(x)]

    def satisfying(self) -> list[tuple[int, ...]]:
        """Satisfying assignments in lexicographic order."""
        return [bits_of(k, self.arity) for k, b in enumerate(self.table) if b]

    def zeros(self) -> list[tuple[int, ...]]:
        return [bits_of(k, self.arity) for k, b in enumerate(self.table) if not b]

    def bitstring(self) -> str:
        return "".join(map(str, self.table))


def AND(r: int) -> Predicate:
    return Predicate.symmetric(r, zeros=range(r))


def OR(r: int) -> Predicate:
    return Predicate.symmetric(r, zeros=[0])


@dataclass(frozen=True)
class Constraint:
    vars: tuple[int, ...]
    weight: float
    predicate: Predicate


@dataclass(frozen=True)
class CspInstance:
    n: int
    constraints: tuple[Constraint, ...]
    # index of each constraint in the instance it was taken from
    origin: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for c in self.constraints:
            if len(c.vars) != c.predicate.arity:
                raise ValueError(f"constraint on {c.vars} does not match arity {c.predicate.arity}")
            if any(not 0 <= v < self.n for v in c.vars):
                raise ValueError(f"constraint variables {c.vars} out of range for n={self.n}")
            if c.weight < 0:
                raise ValueError("constraint weights must be nonnegative")

    @classmethod
    def uniform(cls, n: int, predicate: Predicate, scopes, weights=None) -> CspInstance:
        scopes = [tuple(int(v) for v in s) for s in scopes]
        weights = [1.0] * len(scopes) if weights is None else [float(w) for w in weights]
        return cls(n, tuple(Constraint(s, w, predicate) for s, w in zip(scopes, weights)))

    @property
    def m(self) -> int:
        return len(self.constraints)

    def predicates(self) -> list[Predicate]:
        seen = {}
        for c in self.constraints:
            seen.setdefault(c.predicate.table, c.predicate)
        return list(seen.values())

    def reweighted(self, picks) -> CspInstance:
        """Keep constraint indices with new weights, given as (index, weight) pairs."""
        picks = [(int(i), float(w)) for i, w in picks]
        return CspInstance(self.n, tuple(
            Constraint(self.constraints[i].vars, w, self.constraints[i].predicate)
            for i, w in picks), tuple(i for i, _ in picks))


def evaluate_csp(inst: CspInstance, assignment) -> float:
    a = [int(v) for v in assignment]
    if len(a) != inst.n:
        raise ValueError(f"assignment has length {len(a)}, instance has {inst.n} variables")
    return float(sum(c.weight for c in inst.constraints if c.predicate(tuple(a[v] for v in c.vars))))


# symmetric predicates

def symmetric_levels(P: Predicate) -> tuple[int, ...] | None:
    levels = [None] * (P.arity + 1)
    for k, b in enumerate(P.table):
        w = bin(k).count("1")
        if levels[w] is None:
            levels[w] = b
        elif levels[w] != b:
            return None
    return tuple(levels)


def _zero_levels(levels) -> list[int]:
    return [k for k, v in enumerate(levels) if v == 0]


def periodicity(levels, r: int | None = None) -> tuple[int, int] | None:
    """(c, l) with P0(k) = 1[k != c mod l] on [0, r], or None when no such pair exists.

    c is the smallest zero level and l the common difference (r + 1 for a single
    zero, 1 when every level is zero).
    """
    levels = tuple(levels)
    r = len(levels) - 1 if r is None else r
    zs = _zero_levels(levels)
    if not zs:
        raise ValueError("periodicity needs at least one zero level")
    c = zs[0]
    ell = r + 1 if len(zs) == 1 else zs[1] - zs[0]
    if zs != [k for k in range(r + 1) if k % ell == c % ell]:
        return None
    if any(levels[k] != int(k % ell != c % ell) for k in range(r + 1)):
        return None
    return c, ell


@dataclass(frozen=True)
class Projection:
    """Images of x_1..x_r among "0", "1", "x1", "~x1", ..., "xc", "~xc"."""

    images: tuple[str, ...]
    c: int

    def restrict(self, P: Predicate) -> Predicate:
        def f(y):
            bits = []
            for s in self.images:
                if s in ("0", "1"):
                    bits.append(int(s))
                elif s.startswith("~"):
                    bits.append(1 - y[int(s[2:]) - 1])
                else:
                    bits.append(y[int(s[1:]) - 1])
            return P(bits)
        return Predicate.from_function(self.c, f)

    def is_and_of(self, P: Predicate) -> bool:
        return self.restrict(P) == AND(self.c)


def _symbols(c: int) -> list[str]:
    out = ["0", "1"]
    for k in range(1, c + 1):
        out += [f"x{k}", f"~x{k}"]
    return out


def and_projection_symmetric(levels, r: int | None = None) -> Projection | None:
    """AND_2 projection of an aperiodic symmetric predicate, or None if periodic.

    Scans pairs of zero levels a < b by gap, then by a, looking for a satisfied
    level 2b - a (checked first) or 2a - b.
    """
    levels = tuple(levels)
    r = len(levels) - 1 if r is None else r
    zs = _zero_levels(levels)
    if not zs or periodicity(levels, r) is not None:
        return None
    P = Predicate.symmetric(r, levels)
    pairs = sorted(((b - a, a, b) for a, b in itertools.combinations(zs, 2)))
    for _, a, b in pairs:
        if 2 * b - a <= r and levels[2 * b - a] == 1:
            imgs = ["0"] * (r - 2 * b + a) + ["x1"] * (b - a) + ["x2"] * (b - a) + ["1"] * a
        elif 2 * a - b >= 0 and levels[2 * a - b] == 1:
            imgs = ["1"] * (2 * a - b) + ["~x1"] * (b - a) + ["~x2"] * (b - a) + ["0"] * (r - b)
        else:
            continue
        proj = Projection(tuple(imgs), 2)
        if proj.is_and_of(P):
            return proj
    raise AssertionError("aperiodic predicate without a reflection witness")


def _value_table(c: int) -> np.ndarray:
    """val[s, k]: value of symbol k under setting s of (x1..xc), x1 most significant."""
    syms = _symbols(c)
    val = np.zeros((2 ** c, len(syms)), dtype=np.int64)
    for s in range(2 ** c):
        y = bits_of(s, c)
        for k, sym in enumerate(syms):
            if sym in ("0", "1"):
                val[s, k] = int(sym)
            elif sym.startswith("~"):
                val[s, k] = 1 - y[int(sym[2:]) - 1]
            else:
                val[s, k] = y[int(sym[1:]) - 1]
    return val


def _symmetric_projection(levels, r: int, c: int) -> Projection | None:
    """Exhaustive search over symbol counts; enough because permuting variables
    of a symmetric predicate changes nothing. Returns the lexicographically
    smallest projection."""
    B = 2 * c + 2
    val = _value_table(c)
    target = np.zeros(2 ** c, dtype=np.int64)
    target[-1] = 1
    lv = np.asarray(levels, dtype=np.int64)
    best = None
    # compositions of r into B parts, streamed in chunks
    bars = itertools.combinations(range(r + B - 1), B - 1)
    while True:
        chunk = list(itertools.islice(bars, 200_000))
        if not chunk:
            break
        bb = np.array(chunk, dtype=np.int64)
        edges = np.hstack([np.full((len(bb), 1), -1), bb, np.full((len(bb), 1), r + B - 1)])
        counts = np.diff(edges, axis=1) - 1
        ok = np.ones(len(bb), dtype=bool)
        for s in range(2 ** c):
            ok &= lv[counts @ val[s]] == target[s]
        for row in counts[ok]:
            key = tuple(-row)
            if best is None or key < best:
                best = key
    if best is None:
        return None
    syms = _symbols(c)
    imgs = [syms[k] for k, cnt in enumerate(best) for _ in range(-cnt)]
    return Projection(tuple(imgs), c)


def and_projection_general(P: Predicate, c: int, max_arity: int = 12) -> Projection | None:
    """First map (lexicographic, x_1 most significant, symbol order 0 < 1 < x1 < ~x1 < ...)
    turning P into AND_c, or None.

    Symmetric predicates are searched over symbol counts instead, which is
    exhaustive for them at any arity.
    """
    r = P.arity
    levels = symmetric_levels(P)
    if levels is not None:
        return _symmetric_projection(levels, r, c)
    if r > max_arity:
        raise ValueError(f"brute-force projection search refuses arity {r} > {max_arity}")
    B = 2 * c + 2
    val = _value_table(c)
    table = np.asarray(P.table, dtype=np.int8)
    target = np.zeros(2 ** c, dtype=np.int8)
    target[-1] = 1
    pow2 = 1 << np.arange(r - 1, -1, -1, dtype=np.int64)
    placevals = B ** np.arange(r - 1, -1, -1, dtype=np.int64)
    total = B ** r
    step = max(1, 2_000_000 // r)
    for lo in range(0, total, step):
        k = np.arange(lo, min(total, lo + step), dtype=np.int64)
        digits = (k[:, None] // placevals[None, :]) % B
        ok = np.ones(k.size, dtype=bool)
        for s in range(2 ** c):
            ok &= table[val[s][digits] @ pow2] == target[s]
            if not ok.any():
                break
        hits = np.flatnonzero(ok)
        if hits.size:
            syms = _symbols(c)
            return Projection(tuple(syms[d] for d in digits[hits[0]]), c)
    return None


@dataclass(frozen=True)
class Classification:
    c: int
    satisfying: int
    witness: Projection | None


def classify_arity3(P: Predicate) -> Classification:
    """Largest c such that P projects to AND_c."""
    if P.arity != 3:
        raise ValueError("classify_arity3 expects a predicate of arity 3")
    sat = P.satisfying()
    if len(sat) == 1:
        imgs = tuple("x%d" % (i + 1) if b else "~x%d" % (i + 1) for i, b in enumerate(sat[0]))
        return Classification(3, 1, Projection(imgs, 3))
    w = and_projection_general(P, 2)
    if w is not None:
        return Classification(2, len(sat), w)
    return Classification(1, len(sat), None)


# affine and polynomial representations

@dataclass(frozen=True)
class AffineRepresentation:
    """P(x) = 1 iff sum_i a_i x_i != b."""

    spec: GroupSpec
    coefficients: tuple[GroupElement, ...]
    b: GroupElement

    @property
    def arity(self) -> int:
        return len(self.coefficients)

    def values(self) -> np.ndarray:
        """sum_i a_i x_i - b at every x in {0,1}^r, shape (2^r, u)."""
        A = np.array([a.residues for a in self.coefficients], dtype=np.int64).reshape(self.arity, -1)
        X = _all_points(self.arity)
        return (X @ A - np.array(self.b.residues)) % np.array(self.spec.moduli)

    def table(self) -> tuple[int, ...]:
        return tuple(int(v) for v in self.values().any(axis=1))

    def represents(self, P: Predicate) -> bool:
        return P.arity == self.arity and self.table() == P.table

    def validated(self, P: Predicate) -> AffineRepresentation:
        if not self.represents(P):
            raise ValueError("affine representation disagrees with the predicate")
        return self


def affine_from_periodic(r: int, c: int, ell: int) -> AffineRepresentation:
    """1[sum x != c mod ell] over Z_ell.

    ell = 1 (never satisfied) has no group Z_1 and is written as 0 != 0 over Z_2.
    """
    if ell == 1:
        z2 = GroupSpec.cyclic(2)
        return AffineRepresentation(z2, (z2.zero(),) * r, z2.zero())
    spec = GroupSpec.cyclic(ell)
    return AffineRepresentation(spec, tuple(spec.element(1) for _ in range(r)), spec.element(c))


@dataclass(frozen=True)
class PolynomialRep:
    """P(x) = 1 iff sum over monomials of coef * prod_{v in S} x_v is nonzero.

    Monomials are keyed by frozensets of variable indices; the empty set is the
    constant term. ``arity`` is the number of variables.
    """

    spec: GroupSpec
    monomials: tuple[tuple[frozenset, GroupElement], ...]
    arity: int

    @property
    def degree(self) -> int:
        return max((len(s) for s, c in self.monomials if not c.is_zero()), default=0)

    def values(self) -> np.ndarray:
        X = _all_points(self.arity)
        out = np.zeros((X.shape[0], self.spec.u), dtype=np.int64)
        for S, coef in self.monomials:
            on = X[:, sorted(S)].all(axis=1) if S else np.ones(X.shape[0], dtype=bool)
            out[on] += np.array(coef.residues)
        return out % np.array(self.spec.moduli)

    def table(self) -> tuple[int, ...]:
        return tuple(int(v) for v in self.values().any(axis=1))

    def represents(self, P: Predicate) -> bool:
        return P.arity == self.arity and self.table() == P.table


def _poly_from_dict(spec: GroupSpec, terms: dict, arity: int) -> PolynomialRep:
    mons = []
    for S in sorted(terms, key=lambda s: (len(s), sorted(s))):
        coef = spec.element(terms[S])
        if not coef.is_zero():
            mons.append((frozenset(S), coef))
    return PolynomialRep(spec, tuple(mons), arity)


def two_assignment_polynomial(a, b) -> PolynomialRep:
    """Degree r-1 polynomial over Z_2 that is nonzero exactly at a and b.

    With D the positions where a and b differ and k the first of them, it is the
    product of y_i (a_i = b_i = 1), 1 - y_i (a_i = b_i = 0), and for i in D \\ {k}
    either y_k + y_i - 1 (a_i = a_k) or y_k - y_i (a_i != a_k).
    """
    a, b = tuple(int(v) for v in a), tuple(int(v) for v in b)
    if len(a) != len(b):
        raise ValueError("assignments must have equal length")
    if a == b:
        raise ValueError("two_assignment_polynomial needs two distinct assignments")
    r = len(a)
    diff = [i for i in range(r) if a[i] != b[i]]
    k = diff[0]
    factors = []  # each factor: dict frozenset -> coefficient mod 2
    for i in range(r):
        if i in diff:
            if i == k:
                continue
            if a[i] == a[k]:
                factors.append({frozenset([k]): 1, frozenset([i]): 1, frozenset(): 1})
            else:
                factors.append({frozenset([k]): 1, frozenset([i]): 1})
        elif a[i] == 1:
            factors.append({frozenset([i]): 1})
        else:
            factors.append({frozenset(): 1, frozenset([i]): 1})
    poly = {frozenset(): 1}
    for f in factors:
        nxt = {}
        for S, c in poly.items():
            for T, d in f.items():
                U = S | T
                nxt[U] = (nxt.get(U, 0) + c * d) % 2
        poly = {S: c for S, c in nxt.items() if c}
    rep = _poly_from_dict(GroupSpec.cyclic(2), poly, r)
    X = _all_points(r)
    want = ((X == np.array(a)).all(axis=1) | (X == np.array(b)).all(axis=1)).astype(int)
    assert tuple(want.tolist()) == rep.table()
    return rep


def or_of_affine(reps) -> AffineRepresentation:
    """Stack s affine reps on one variable set into one rep over the product group.

    Component block i evaluates rep i, so the combined value is zero iff every
    rep is zero: the predicate is the OR of the inputs.
    """
    reps = list(reps)
    if not reps:
        raise ValueError("or_of_affine needs at least one representation")
    r = reps[0].arity
    if any(rep.arity != r for rep in reps):
        raise ValueError("representations must share an arity")
    spec = GroupSpec(tuple(q for rep in reps for q in rep.spec.moduli))
    coeffs = tuple(GroupElement(tuple(x for rep in reps for x in rep.coefficients[i].residues))
                   for i in range(r))
    b = GroupElement(tuple(x for rep in reps for x in rep.b.residues))
    return AffineRepresentation(spec, coeffs, b)


def or_of_polynomials(polys, arity: int | None = None) -> PolynomialRep:
    polys = list(polys)
    spec = GroupSpec(tuple(q for p in polys for q in p.spec.moduli))
    arity = polys[0].arity if arity is None else arity
    terms: dict = {}
    offset = 0
    for p in polys:
        for S, coef in p.monomials:
            cur = list(terms.get(S, (0,) * spec.u))
            for t, x in enumerate(coef.residues):
                cur[offset + t] = x
            terms[S] = tuple(cur)
        offset += p.spec.u
    return _poly_from_dict(spec, terms, arity)


# encodings into codes

def _shared_predicate(inst: CspInstance) -> Predicate:
    preds = inst.predicates()
    if len(preds) != 1:
        raise ValueError("every constraint must use the same predicate")
    return preds[0]


def encode_affine_csp(inst: CspInstance, rep: AffineRepresentation):
    """Rows sum_i a_i x_{v_i} - b; returns (G, lift) with lift(a) = (a, 1).

    Repeated variables within a constraint have their coefficients summed.
    """
    if inst.m:
        P = _shared_predicate(inst)
        rep.validated(P)
    spec = rep.spec
    mod = np.array(spec.moduli, dtype=np.int64)
    E = np.zeros((inst.m, inst.n + 1, spec.u), dtype=np.int64)
    A = np.array([a.residues for a in rep.coefficients], dtype=np.int64)
    for j, c in enumerate(inst.constraints):
        for pos, v in enumerate(c.vars):
            E[j, v] += A[pos]
        E[j, inst.n] -= np.array(rep.b.residues)
    E %= mod
    G = GeneratingMatrix(spec, E, [c.weight for c in inst.constraints])

    def lift(a):
        return tuple(int(v) for v in a) + (1,)

    return G, lift


def monomial_order(sets) -> list[frozenset]:
    return sorted(set(sets), key=lambda s: (len(s), sorted(s)))


def polynomial_to_linear(polys, n: int, ell: int | None = None, weights=None):
    """One row per polynomial (over global variables), one column per monomial.

    Columns are the distinct monomials sorted by (degree, variable list). Returns
    (G, columns, lift) with lift(a) the 0/1 vector of monomial values, so that
    (G lift(a))_j = P_j(a).
    """
    polys = list(polys)
    if not polys:
        raise ValueError("polynomial_to_linear needs at least one polynomial")
    spec = polys[0].spec
    if any(p.spec != spec for p in polys):
        raise ValueError("polynomials must share a group")
    if ell is not None:
        for p in polys:
            if any(len(S) > ell for S, _ in p.monomials):
                raise ValueError(f"monomial of degree above {ell}")
    cols = monomial_order(S for p in polys for S, _ in p.monomials)
    pos = {S: i for i, S in enumerate(cols)}
    E = np.zeros((len(polys), len(cols), spec.u), dtype=np.int64)
    for j, p in enumerate(polys):
        for S, coef in p.monomials:
            E[j, pos[S]] += np.array(coef.residues)
    G = GeneratingMatrix(spec, E % np.array(spec.moduli), weights)

    def lift(a):
        a = [int(v) for v in a]
        return tuple(int(all(a[v] for v in S)) for S in cols)

    return G, cols, lift


def localize(poly: PolynomialRep, scope, n: int) -> PolynomialRep:
    """Substitute y_i = x_{scope[i]}; repeated variables merge since x^2 = x on {0,1}."""
    terms: dict = {}
    mod = poly.spec.moduli
    for S, coef in poly.monomials:
        T = frozenset(scope[i] for i in S)
        cur = terms.get(T, (0,) * poly.spec.u)
        terms[T] = tuple((x + y) % q for x, y, q in zip(cur, coef.residues, mod))
    return _poly_from_dict(poly.spec, terms, n)


def predicate_polynomial(P: Predicate, width: int | None = None) -> PolynomialRep | None:
    """OR of the two-assignment polynomials L(a_1, a_k) over (Z_2)^(s-1), where a_1 is the
    lexicographically smallest satisfying assignment; None when P is never satisfied.
    ``width`` pads the group to that many Z_2 components."""
    sat = P.satisfying()
    if not sat:
        return None
    if len(sat) == 1:
        raise ClassificationError(
            "predicate has exactly one satisfying assignment; it projects to AND_r and "
            "admits no sub-n^r sparsifier", witness=classify_projection_single(P))
    polys = [two_assignment_polynomial(sat[0], s) for s in sat[1:]]
    width = len(polys) if width is None else width
    z2 = GroupSpec.cyclic(2)
    polys += [PolynomialRep(z2, (), P.arity)] * (width - len(polys))
    rep = or_of_polynomials(polys, P.arity)
    assert rep.represents(P)
    return rep


def classify_projection_single(P: Predicate) -> Projection:
    (a,) = P.satisfying()
    return Projection(tuple("x%d" % (i + 1) if b else "~x%d" % (i + 1) for i, b in enumerate(a)),
                      P.arity)


# drivers

def _map_back(inst: CspInstance, rows, result) -> CspInstance:
    return inst.reweighted((rows[int(i)], w) for i, w in zip(result.indices, result.weights))


def nontrivial_sparsify(inst: CspInstance, eps: float, rng=None,
                        config: SparsifyConfig | None = None) -> CspInstance:
    """Sparsify any CSP whose predicates each have 0 or at least 2 satisfying assignments.

    All constraints go into one code over (Z_2)^s with one column per monomial of
    degree below the arity.
    """
    preds = inst.predicates()
    width = max((len(P.satisfying()) - 1 for P in preds), default=0)
    local = {}
    for P in preds:
        local[P.table] = predicate_polynomial(P, max(width, 1))
    rows, polys, weights = [], [], []
    for j, c in enumerate(inst.constraints):
        rep = local[c.predicate.table]
        if rep is None or c.weight == 0:
            continue
        rows.append(j)
        polys.append(localize(rep, c.vars, inst.n))
        weights.append(c.weight)
    if not polys:
        return CspInstance(inst.n, ())
    G, _, _ = polynomial_to_linear(polys, inst.n, weights=weights)
    res = sparsify(G, eps, rng, config or DEFAULT_CONFIG)
    return _map_back(inst, rows, res)


def sparsify_symmetric_csp(inst: CspInstance, eps: float, rng=None,
                           config: SparsifyConfig | None = None) -> CspInstance:
    """Sparsify a CSP on one symmetric periodic predicate through its Z_l affine form."""
    if inst.m == 0:
        return inst
    P = _shared_predicate(inst)
    levels = symmetric_levels(P)
    if levels is None:
        raise ClassificationError("predicate is not symmetric")
    zs = _zero_levels(levels)
    if not zs:
        total = sum(c.weight for c in inst.constraints)
        return inst.reweighted([(0, total)]) if total > 0 else CspInstance(inst.n, ())
    per = periodicity(levels, P.arity)
    if per is None:
        raise ClassificationError("predicate is aperiodic", and_projection_symmetric(levels, P.arity))
    c, ell = per
    if ell == 1:
        return CspInstance(inst.n, ())
    rep = affine_from_periodic(P.arity, c, ell)
    G, _ = encode_affine_csp(inst, rep)
    live = [j for j, con in enumerate(inst.constraints) if con.weight > 0]
    res = sparsify(G.restrict(live), eps, rng, config or DEFAULT_CONFIG)
    return inst.reweighted((int(i), w) for i, w in zip(res.indices, res.weights))


def affine_sparsify(inst: CspInstance, rep: AffineRepresentation, eps: float, rng=None,
                    config: SparsifyConfig | None = None) -> CspInstance:
    G, _ = encode_affine_csp(inst, rep)
    res = sparsify(G, eps, rng, config or DEFAULT_CONFIG)
    return inst.reweighted((int(i), w) for i, w in zip(res.indices, res.weights))
