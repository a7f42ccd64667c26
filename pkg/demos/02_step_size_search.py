# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:light
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # Choosing the ring step t
#
# For multi-ring groups the spacing t between rings trades distance against
# energy. Two objectives are searched on a grid over (0, 2] with a = 0.5:
# the coding gain of the superimposed constellation and the coding gain of a
# single codebook.

import numpy as np

from scma_udcg import DesignParams, SearchConfig, optimize_step_size
from scma_udcg.optimizer import max_plateaus

cases = [(4, 1), (8, 1), (8, 2), (16, 2), (16, 3)]

print(f"{'M':>3} {'r':>2} {'t_c':>6} {'t_x':>6}")
for M, r in cases:
    p = DesignParams(M=M, r=r, a=0.5)
    tc = optimize_step_size(p, SearchConfig(criterion="superimposed")).t_star
    tx = optimize_step_size(p, SearchConfig(criterion="codebook")).t_star
    print(f"{M:>3} {r:>2} {tc:>6.2f} {tx:>6.2f}")

# ## Shape of the landscape
#
# The codebook objective rises linearly in t until the ring spacing matches
# the in-ring spacing, then decays. The superimposed objective is jagged
# because different point pairs take turns being closest, yet its maximum is
# still attained on one contiguous stretch of the grid.

res = optimize_step_size(DesignParams(M=8, r=2), SearchConfig(criterion="superimposed"))
t, gain = np.array(res.trace).T
for ti, gi in zip(t[::4], gain[::4]):
    print(f"t = {ti:4.2f}  gain = {gi:.3e}  " + "#" * int(60 * gi / gain.max()))
print("maximal plateaus:", max_plateaus(res.trace))
