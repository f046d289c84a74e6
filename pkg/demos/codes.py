"""
Sparsifying a code over Z_5
===========================

Build a long random code, shrink it, and check every codeword weight.
"""

import numpy as np

from codesparsify import GeneratingMatrix, GroupSpec, count_distinct_codewords, sparsify
from codesparsify.oracle import verify_code_sparsifier

rng = np.random.default_rng(0)

# 50000 coordinates, 3 message symbols: only 125 codewords, so most rows are redundant
G = GeneratingMatrix(GroupSpec.cyclic(5), rng.integers(0, 5, size=(50_000, 3)))
print("rows:", G.m, "distinct codewords:", count_distinct_codewords(G))

res = sparsify(G, 0.25, rng=7)
print("kept:", len(res), "sizes by stage:", res.stats["sizes"])

# the oracle recomputes all 125 weights from scratch
report = verify_code_sparsifier(G, res, 0.25)
print(f"ratios in [{report.min_ratio:.3f}, {report.max_ratio:.3f}], passed={report.passed}")

# groups need not be cyclic: Z_2 x Z_3 residues sit in the last axis
H = GeneratingMatrix(GroupSpec((2, 3)), np.stack([rng.integers(0, 2, (4000, 2)),
                                                  rng.integers(0, 3, (4000, 2))], axis=-1))
print("Z2xZ3 code:", H.m, "->", len(sparsify(H, 0.3, rng=1)))
