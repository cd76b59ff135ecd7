"""Force-free relaxation of a strained channel: exponential versus algebraic memory.

Starting from a block strain history, the minimal state carries all memory.
Its energy Psi never increases, and it decays like exp(-lambda t / alpha) for an
exponential kernel and like (1+t)^(-c / alpha) for (1+s)^-p, with c = p + 1.
The script writes energy traces to out/demos/ for plotting.
"""

from pathlib import Path

import numpy as np

from viscomem.analysis import fit_decay, run_with_energy
from viscomem.scenarios import builtin

out = Path("out/demos")
out.mkdir(parents=True, exist_ok=True)

for name, cls in (("channel-exp-relax", "exponential"), ("channel-poly-relax", "polynomial")):
    tr, v, _ = run_with_energy(builtin(name))
    fit = fit_decay(tr, cls)
    worst = np.max(np.diff(tr.psi)) / tr.psi[0]
    print(f"{name}: Psi(0)={tr.psi[0]:.4g}, largest step increase {worst:.1e} of Psi(0)")
    print(f"  alpha={tr.alpha:.3f}, beta={tr.beta:.3f}, xi={tr.xi.kind} c={tr.xi.c:.3g}")
    print(f"  fitted slope {fit.slope:.3f} vs guaranteed {-tr.xi.c / tr.alpha:.3f} "
          f"({'log Psi vs t' if cls == 'exponential' else 'log Psi vs log(1+t)'})")
    tr.to_csv(out / f"{name}-energy.csv")
print(f"traces written to {out}/")
