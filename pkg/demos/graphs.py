"""
Cayley graphs and hedge-graphs
==============================

Both reduce to codes: eigenvalues of a Cayley graph on Z_q^n are codeword
weights, and hedge cuts are nonzero coordinates.
"""

import numpy as np

from codesparsify import (CayleySpec, HedgeGraph, cayley_laplacian, cayley_spectrum, sparsify_cayley,
                          sparsify_hedge)
from codesparsify.oracle import verify_cayley_sparsifier, verify_hedge_sparsifier

rng = np.random.default_rng(4)

gens = []
while len(gens) < 2000:
    v = tuple(int(x) for x in rng.integers(0, 3, size=2))
    if any(v):
        gens.append((v, 1.0))
spec = CayleySpec(3, 2, tuple(gens))

# character formula against the dense 9 x 9 Laplacian
dense = np.sort(np.linalg.eigvalsh(cayley_laplacian(spec)))
print("max eigenvalue gap:", np.abs(dense - np.sort(list(cayley_spectrum(spec).values()))).max())

small = sparsify_cayley(spec, 0.25, rng=0)
print("generators:", len(spec.generators), "->", len(small.generators),
      "verified:", verify_cayley_sparsifier(spec, small, 0.25).passed)

# each hedge is one or two disjoint components; cutting any component cuts the hedge
hedges = []
for _ in range(4000):
    perm = rng.permutation(12)
    sizes = rng.integers(2, 5, size=int(rng.integers(1, 3)))
    cuts = np.cumsum(sizes)
    hedges.append((1.0, [perm[a - s:a] for a, s in zip(cuts, sizes)]))
h = HedgeGraph(12, tuple(hedges))
out = sparsify_hedge(h, 0.3, rng=0)
print("hedges:", h.m, "->", out.m, "verified:", verify_hedge_sparsifier(h, out, 0.3).passed)
print("cut of {0..5}:", h.cut_value(range(6)), "vs", round(out.cut_value(range(6)), 1))
