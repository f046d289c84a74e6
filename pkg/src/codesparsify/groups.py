"""Finite Abelian groups written as products of cyclic groups."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, lcm, prod

import numpy as np


@dataclass(frozen=True)
class GroupSpec:
    """The group Z_{q1} x ... x Z_{qu}.

    The single cyclic group Z_q is the one-component case ``GroupSpec((q,))``.
    """

    moduli: tuple[int, ...]
    order: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        moduli = tuple(int(q) for q in self.moduli)
        if not moduli:
            raise ValueError("a group needs at least one cyclic factor")
        if any(q < 2 for q in moduli):
            raise ValueError(f"every modulus must be at least 2, got {moduli}")
        object.__setattr__(self, "moduli", moduli)
        object.__setattr__(self, "order", prod(moduli))

    @classmethod
    def cyclic(cls, q: int) -> GroupSpec:
        return cls((q,))

    @property
    def u(self) -> int:
        return len(self.moduli)

    @property
    def exponent(self) -> int:
        """Least common multiple of the moduli."""
        return lcm(*self.moduli)

    @property
    def dtype(self):
        # int64 products of two reduced residues stay exact below 2**31
        return np.int64 if max(self.moduli) < 2**31 else object

    def modvec(self) -> np.ndarray:
        return np.array(self.moduli, dtype=self.dtype)

    def element(self, *residues) -> GroupElement:
        if len(residues) == 1 and not isinstance(residues[0], (int, np.integer)):
            residues = tuple(residues[0])
        if len(residues) != self.u:
            raise ValueError(f"expected {self.u} residues, got {len(residues)}")
        return GroupElement(tuple(int(r) % q for r, q in zip(residues, self.moduli)))

    def zero(self) -> GroupElement:
        return GroupElement((0,) * self.u)

    def elements(self):
        """Iterate over every element in lexicographic residue order."""
        for flat in range(self.order):
            res = []
            for q in reversed(self.moduli):
                flat, r = divmod(flat, q)
                res.append(r)
            yield GroupElement(tuple(reversed(res)))

    def __str__(self):
        return " x ".join(f"Z_{q}" for q in self.moduli)


@dataclass(frozen=True)
class GroupElement:
    residues: tuple[int, ...]

    def is_zero(self) -> bool:
        return not any(self.residues)

    def __iter__(self):
        return iter(self.residues)

    def __len__(self):
        return len(self.residues)


def _check(spec: GroupSpec, *elems: GroupElement):
    for a in elems:
        if len(a.residues) != spec.u:
            raise ValueError(f"element {a.residues} does not belong to {spec}")
        if any(not 0 <= r < q for r, q in zip(a.residues, spec.moduli)):
            raise ValueError(f"element {a.residues} is not reduced for {spec}")


def add(spec: GroupSpec, a: GroupElement, b: GroupElement) -> GroupElement:
    _check(spec, a, b)
    return GroupElement(tuple((x + y) % q for x, y, q in zip(a, b, spec.moduli)))


def neg(spec: GroupSpec, a: GroupElement) -> GroupElement:
    return scale(spec, -1, a)


def scale(spec: GroupSpec, k: int, a: GroupElement) -> GroupElement:
    _check(spec, a)
    return GroupElement(tuple((k * x) % q for x, q in zip(a, spec.moduli)))


def order_of(spec: GroupSpec, a: GroupElement) -> int:
    """Smallest c >= 1 with c*a = 0."""
    _check(spec, a)
    return lcm(*(q // gcd(x, q) for x, q in zip(a, spec.moduli)))


def component_order(x: int, q: int) -> int:
    return q // gcd(int(x), q)


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b)."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        k, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - k * x1
        y0, y1 = y1, y0 - k * y1
    return a, x0, y0


def column_op(cols: np.ndarray, moduli: np.ndarray, target: int, source: int, k: int):
    """In place: column ``target`` += k * column ``source`` on an (m, n, u) array."""
    cols[:, target, :] = (cols[:, target, :] + k * cols[:, source, :]) % moduli


def row_gcd_reduce(spec: GroupSpec, row, columns: np.ndarray | None = None,
                   component: int = 0) -> int:
    """Euclidean reduction of one row by integer column operations.

    ``row`` holds integer entries (a list or 1-d array, reduced residues of one
    group component) and is updated in place. Every step is ``c_a <- c_a - l*c_b``
    and is mirrored onto ``columns`` (shape (m, n, u)) when given. On return only
    the pivot position is nonzero and it holds the gcd of the original entries.
    Returns the pivot index.
    """
    vals = [int(x) for x in row]
    if not any(vals):
        raise ValueError("row has no nonzero entry, so there is no pivot")
    moduli = spec.modvec() if columns is not None else None
    while True:
        nz = [i for i, x in enumerate(vals) if x]
        if len(nz) == 1:
            piv = nz[0]
            break
        piv = min(nz, key=lambda i: (vals[i], i))
        s = vals[piv]
        ks = np.zeros(len(vals), dtype=object)
        for i in nz:
            if i != piv:
                ks[i] = vals[i] // s
                vals[i] -= ks[i] * s
        if columns is not None:
            _apply_multi(columns, moduli, piv, ks)
    for i, x in enumerate(vals):
        row[i] = x
    return piv


def _apply_multi(columns: np.ndarray, moduli: np.ndarray, piv: int, ks):
    """columns[:, a] -= ks[a] * columns[:, piv] for every a at once."""
    ks = np.asarray(ks, dtype=columns.dtype)
    cols = np.flatnonzero(ks)
    if cols.size == 0:
        return
    src = columns[:, piv, :]
    # only rows where the pivot column is nonzero change
    rows = np.flatnonzero(src.any(axis=1))
    if rows.size == 0:
        return
    block = np.ix_(rows, cols)
    sub = columns[block] - src[rows][:, None, :] * ks[cols][None, :, None]
    columns[block] = sub % moduli
