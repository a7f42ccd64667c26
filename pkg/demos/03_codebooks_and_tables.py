# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:light
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # From groups to SCMA codebooks
#
# Six users share four resources, each user on two of them. Every resource
# is used by three users, who are given the three different members of the
# group, so each resource sees a uniquely decomposable superposition.

import numpy as np

from scma_udcg import DesignParams, SearchConfig, design_pipeline
from scma_udcg.codebook import allocate_generation_matrix, latin_property_holds

cbs = design_pipeline(DesignParams(M=4, r=2, a=0.5), SearchConfig())
print(cbs.graph.describe())
print(allocate_generation_matrix(cbs.graph).describe())
print("Latin property:", latin_property_holds(cbs))

# User 1's normalized codebook: rows are resources, columns codewords.

print(np.round(cbs.books[0], 4))

# ## Per-resource minimum distances
#
# Reported with each codebook scaled to unit total energy, four digits.

for M, r, crit in [(4, 2, "codebook"), (8, 2, "codebook"), (16, 3, "superimposed")]:
    rep = design_pipeline(DesignParams(M=M, r=r), SearchConfig(criterion=crit)).report
    print(f"M={M:>2}: " + "/".join(f"{d:.4f}" for d in rep.per_rn_med_table))

# ## Both objectives side by side

print(f"{'M':>3} {'r':>2}  d(t_c)/d(t_x)")
for M in (4, 8, 16):
    for r in range(1, int(np.log2(M)) + 1):
        d = [design_pipeline(DesignParams(M=M, r=r), SearchConfig(criterion=c)).report
             .per_rn_med_table[0] for c in ("superimposed", "codebook")]
        print(f"{M:>3} {r:>2}  {d[0]:.4f}/{d[1]:.4f}")

# ## Heavier overload
#
# Ten users on five resources (200 %) need four group members per resource.

big = design_pipeline(DesignParams(M=4, r=1, K=5, J=10, epsilons=(1, 1, 2)),
                      SearchConfig(criterion="superimposed"))
print("d_f =", big.graph.d_f, " t =", big.report.extra["t"],
      " per-resource MED:", np.round(big.report.per_rn_med, 4))
