"""Integer lattices generated by 0/1 zero sets: HNF, membership equations, affine synthesis.

Matrices are lists of rows of Python ints so that determinants never overflow.
"""

from __future__ import annotations

from dataclasses import dataclass

from .csp import AffineRepresentation, Predicate, bits_of
from .groups import GroupSpec


def _copy(B):
    return [[int(x) for x in row] for row in B]


def _shape(B):
    return len(B), (len(B[0]) if B else 0)


def bareiss_det(M) -> int:
    """Determinant of a square integer matrix by fraction-free elimination."""
    A = _copy(M)
    k = len(A)
    if k == 0:
        return 1
    sign, prev = 1, 1
    for i in range(k - 1):
        if A[i][i] == 0:
            swap = next((r for r in range(i + 1, k) if A[r][i]), None)
            if swap is None:
                return 0
            A[i], A[swap] = A[swap], A[i]
            sign = -sign
        for r in range(i + 1, k):
            for c in range(i + 1, k):
                A[r][c] = (A[r][c] * A[i][i] - A[r][i] * A[i][c]) // prev
        prev = A[i][i]
    return sign * A[k - 1][k - 1]


def integer_rank(B) -> int:
    """Rank over Q by fraction-free elimination."""
    A = _copy(B)
    d, l = _shape(A)
    rank, prev = 0, 1
    for c in range(l):
        piv = next((r for r in range(rank, d) if A[r][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for r in range(rank + 1, d):
            for cc in range(c + 1, l):
                A[r][cc] = (A[r][cc] * A[rank][c] - A[r][c] * A[rank][cc]) // prev
            A[r][c] = 0
        prev = A[rank][c]
        rank += 1
        if rank == d:
            break
    return rank


def adjugate(M):
    """adj(M) with M adj(M) = det(M) I, from cofactors."""
    k = len(M)
    if k == 1:
        return [[1]]
    adj = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            minor = [row[:j] + row[j + 1:] for r, row in enumerate(M) if r != i]
            adj[j][i] = (-1) ** (i + j) * bareiss_det(minor)
    return adj


def hermite_normal_form(B):
    """Lower-triangular HNF of the column lattice of B, with the column-op trace.

    Returns (H, U) with B U = [H | 0]: H is d x d with positive diagonal and
    row entries left of the diagonal reduced into [0, H[i][i]); U is unimodular.
    B must have full row rank. An all-zero B gives an empty H (d x 0).
    """
    A = _copy(B)
    d, l = _shape(A)
    U = [[int(i == j) for j in range(l)] for i in range(l)]

    def addcol(dst, src, k):
        for row in A:
            row[dst] += k * row[src]
        for row in U:
            row[dst] += k * row[src]

    def swapcol(a, b):
        for row in A:
            row[a], row[b] = row[b], row[a]
        for row in U:
            row[a], row[b] = row[b], row[a]

    def negcol(a):
        for row in A:
            row[a] = -row[a]
        for row in U:
            row[a] = -row[a]

    if all(x == 0 for row in A for x in row):
        return [[] for _ in range(d)], U
    if d > l:
        raise ValueError("B has more rows than columns, so it cannot have full row rank")
    for i in range(d):
        while True:
            nz = [c for c in range(i, l) if A[i][c]]
            if not nz:
                raise ValueError(f"B is rank deficient at row {i}; split dependent rows first")
            piv = min(nz, key=lambda c: (abs(A[i][c]), c))
            if len(nz) == 1:
                break
            for c in nz:
                if c != piv:
                    addcol(c, piv, -(A[i][c] // A[i][piv]))
        if piv != i:
            swapcol(i, piv)
        if A[i][i] < 0:
            negcol(i)
        for c in range(i):
            addcol(c, i, -(A[i][c] // A[i][i]))
    H = [row[:d] for row in A]
    return H, U


@dataclass(frozen=True)
class MembershipSystem:
    """x is in the lattice iff every modular and every linear equation holds.

    ``modular`` holds (coefficients, modulus) meaning sum c_i x_i = 0 mod M;
    ``linear`` holds coefficient vectors meaning sum c_i x_i = 0 over Z.
    """

    dim: int
    modular: tuple[tuple[tuple[int, ...], int], ...]
    linear: tuple[tuple[int, ...], ...]
    rank: int

    def contains(self, x) -> bool:
        x = [int(v) for v in x]
        if len(x) != self.dim:
            raise ValueError("vector dimension does not match the lattice")
        for c, M in self.modular:
            if sum(a * b for a, b in zip(c, x)) % M:
                return False
        return all(sum(a * b for a, b in zip(c, x)) == 0 for c in self.linear)

    def max_coefficient(self) -> int:
        vals = [abs(a) for c, _ in self.modular for a in c] + [abs(a) for c in self.linear for a in c]
        return max(vals, default=0)


def independent_rows(B) -> list[int]:
    """Greedy by row index: keep a row iff it raises the rank."""
    keep = []
    for j in range(len(B)):
        if integer_rank([B[i] for i in keep + [j]]) > len(keep):
            keep.append(j)
    return keep


def independent_columns(B) -> list[int]:
    """First full-rank column subset, greedily in column order."""
    cols = list(zip(*B)) if B else []
    keep = []
    for c in range(len(cols)):
        if integer_rank([cols[i] for i in keep + [c]]) > len(keep):
            keep.append(c)
    return keep


def membership_system(B) -> MembershipSystem:
    """Membership equations for the column lattice of the d x l integer matrix B.

    With I the independent rows and H the HNF of B restricted to I, x_I is in
    the lattice iff adj(H) x_I = 0 mod det(H). Every other row j is a fixed
    rational combination of rows I; with M the first invertible k x k block
    B[I, A], that reads det(M) x_j - B[j, A] adj(M) x_I = 0.
    """
    B = _copy(B)
    d = len(B)
    I = independent_rows(B)
    k = len(I)
    modular, linear = [], []
    if k:
        BI = [B[i] for i in I]
        H, _ = hermite_normal_form(BI)
        det = 1
        for i in range(k):
            det *= H[i][i]
        adjH = adjugate(H)
        for row in adjH:
            c = [0] * d
            for pos, i in enumerate(I):
                c[i] = row[pos]
            modular.append((tuple(c), det))
        A = independent_columns(BI)
        M = [[BI[r][a] for a in A] for r in range(k)]
        detM = bareiss_det(M)
        adjM = adjugate(M)
        if detM < 0:
            detM = -detM
            adjM = [[-x for x in row] for row in adjM]
    else:
        detM, adjM, A = 1, [], []
    for j in range(d):
        if j in I:
            continue
        lam = [sum(B[j][A[s]] * adjM[s][t] for s in range(k)) for t in range(k)]
        c = [0] * d
        c[j] = detM
        for pos, i in enumerate(I):
            c[i] -= lam[pos]
        linear.append(tuple(c))
    return MembershipSystem(d, tuple(modular), tuple(linear), k)


@dataclass(frozen=True)
class ClosureResult:
    closed: bool
    counterexample: tuple[int, ...] | None
    system: MembershipSystem

    def __bool__(self):
        return self.closed


def _zero_matrix(P: Predicate):
    """r x |P^-1(0)|, one column per unsatisfying assignment (duplicates impossible)."""
    zs = P.zeros()
    return [[z[i] for z in zs] for i in range(P.arity)]


def is_closed_zero_set(P: Predicate) -> ClosureResult:
    """Whether the lattice spanned by P^-1(0) meets {0,1}^r exactly in P^-1(0).

    The counterexample is the first satisfying assignment (in table order) that
    the lattice contains.
    """
    if P.table[0] != 0:
        raise ValueError("the zero set must contain the all-zero assignment")
    system = membership_system(_zero_matrix(P))
    for k, b in enumerate(P.table):
        if b and system.contains(bits_of(k, P.arity)):
            return ClosureResult(False, bits_of(k, P.arity), system)
    return ClosureResult(True, None, system)


class NotClosedError(ValueError):
    def __init__(self, counterexample):
        super().__init__(f"zero set is not closed: lattice contains {''.join(map(str, counterexample))}")
        self.counterexample = counterexample


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def least_prime_at_least(x: int) -> int:
    p = max(2, int(x))
    while not is_prime(p):
        p += 1
    return p


def _complemented(P: Predicate, z0) -> Predicate:
    r = P.arity
    flip = sum(b << (r - 1 - i) for i, b in enumerate(z0))
    return Predicate(r, tuple(P.table[k ^ flip] for k in range(2 ** r)))


def affine_rep_from_closed_zeros(P: Predicate) -> AffineRepresentation:
    """Affine form over Z_{M_1} x ... x Z_p x ... from the membership equations.

    Modular equations with modulus above 1 become Z_M components; each linear
    equation becomes a Z_p component with p the least prime at least 2 r c_max,
    so that a 0/1 evaluation is zero over Z iff it is zero mod p. When P(0^r) = 1
    the variables set in the first zero z are complemented first and the
    constant b absorbs the shift.
    """
    r = P.arity
    zeros = P.zeros()
    if not zeros:
        raise ValueError("a predicate without zeros has no zero lattice")
    z0 = zeros[0]
    Q = _complemented(P, z0) if any(z0) else P
    res = is_closed_zero_set(Q)
    if not res.closed:
        cx = res.counterexample
        raise NotClosedError(tuple(a ^ b for a, b in zip(cx, z0)))
    sysm = res.system
    comps = []  # (modulus, coefficient vector)
    for c, M in sysm.modular:
        if M > 1:
            comps.append((M, [a % M for a in c]))
    if sysm.linear:
        p = least_prime_at_least(2 * r * max(1, sysm.max_coefficient()))
        for c in sysm.linear:
            comps.append((p, [a % p for a in c]))
    if not comps:
        comps = [(2, [0] * r)]
    seen, uniq = set(), []
    for q, c in comps:
        key = (q, tuple(c))
        if key not in seen and any(c):
            seen.add(key)
            uniq.append((q, c))
    comps = uniq or [(2, [0] * r)]
    spec = GroupSpec(tuple(q for q, _ in comps))
    coeffs = []
    shift = [0] * len(comps)
    for i in range(r):
        res_i = []
        for t, (q, c) in enumerate(comps):
            if z0[i]:
                res_i.append((-c[i]) % q)
                shift[t] += c[i]
            else:
                res_i.append(c[i] % q)
        coeffs.append(spec.element(tuple(res_i)))
    b = spec.element(tuple((-s) % q for s, (q, _) in zip(shift, comps)))
    return AffineRepresentation(spec, tuple(coeffs), b).validated(P)
