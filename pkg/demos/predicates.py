"""
Which CSPs sparsify
===================

Symmetric predicates split into periodic ones (affine, so they sparsify
well) and aperiodic ones, which contain an AND of two variables.
"""

import numpy as np

from codesparsify import (AND, OR, CspInstance, Predicate, and_projection_general, classify_arity3,
                          sparsify_symmetric_csp)
from codesparsify.csp import and_projection_symmetric, periodicity, symmetric_levels
from codesparsify.oracle import verify_csp_sparsifier

# zeros at Hamming weights 1 and 5 among 6 bits: a mod-4 condition
P = Predicate.symmetric(6, zeros=[1, 5])
print("period:", periodicity(symmetric_levels(P), 6))

rng = np.random.default_rng(2)
inst = CspInstance.uniform(12, P, [rng.choice(12, 6, replace=False) for _ in range(20_000)])
out = sparsify_symmetric_csp(inst, 0.3, rng=0)
print("constraints:", inst.m, "->", out.m, "verified:", verify_csp_sparsifier(inst, out, 0.3).passed)

# zeros at weights 0, 1 mod 6 among 20 bits: no period
Q = Predicate.symmetric(20, zeros=[k for k in range(21) if k % 6 in (0, 1)])
w = and_projection_symmetric(symmetric_levels(Q), 20)
print("AND2 witness:", " ".join(w.images), "valid:", w.is_and_of(Q))
print("AND3 projection:", and_projection_general(Q, 3))

# arity 3: the exponent of the sparsifier size
for name, R in [("AND3", AND(3)), ("OR3", OR(3)), ("two ones", Predicate.from_zero_set(3, [0, 1, 2, 4, 5, 7]))]:
    print(name, "c =", classify_arity3(R).c)
