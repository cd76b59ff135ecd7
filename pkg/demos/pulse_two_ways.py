"""A body-force pulse on a channel, solved in the time and in the frequency domain.

The time march collocates a first-kind Volterra equation; the frequency solve
divides by the complex viscosity mu_F(w).  Both start from rest, so they must
agree, and halving dt should cut the gap about fourfold.
"""

import numpy as np

from viscomem.scenarios import builtin
from viscomem.solver import apriori_bound_check, solve_frequency_domain, solve_time_domain

for dt in (0.1, 0.05, 0.025):
    sc = builtin("channel-exp-pulse", dt=dt)
    vt, _ = solve_time_domain(sc, evolve=False)
    vf = solve_frequency_domain(sc)
    gap = np.linalg.norm(vt.velocity - vf.velocity) / np.linalg.norm(vt.velocity)
    print(f"dt={dt:<6} relative L2 gap {gap:.2e}")

sc = builtin("channel-exp-pulse")
v, traj = solve_time_domain(sc)
peak = np.abs(v.velocity).max(axis=1)
print(f"\npeak speed {peak.max():.4f} at t={v.times[peak.argmax()]:.2f}; "
      f"at t={v.times[-1]:.2f} it is {peak[-1]:.2e}")
r = apriori_bound_check(sc, v)
print(f"a-priori bound: H_mu norm of grad v {r.lhs:.4f} <= S_mu norm of data {r.rhs:.4f}")
