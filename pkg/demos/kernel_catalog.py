"""Which relaxation functions are admissible, and how fast do they forget?

For each kernel we print the sign checks on mu', mu'' and the curvature
bound mu'' >= -xi mu', the tightest rate profile xi, and the total viscosity
that governs the steady response.
"""

import numpy as np

from viscomem import kernel as K

catalog = {
    "exponential rate 0.5": K.exponential(1.0, 0.5),
    "exponential rate 2": K.exponential(1.0, 2.0),
    "two-mode Prony": K.prony([0.5, 1.0], [0.5, 3.0]),
    "(1+s)^-2": K.polynomial(1.0, 2.0),
    "(1+s)^-3": K.polynomial(1.0, 3.0),
    "1 + s (growing)": K.from_callable(lambda s: 1 + s, lambda s: 1 + 0 * s, lambda s: 0 * s,
                                       horizon=50.0, integrable=False),
}

for name, k in catalog.items():
    rep = K.check_admissibility(k)
    xi = rep.tightest_xi
    if xi is None:
        xi_txt = "-"
    elif xi.kind in ("constant", "inverse_linear"):
        xi_txt = f"{xi.kind} c={xi.c:.3g}"
    else:
        xi_txt = f"{xi.kind}, xi(0)={float(xi(np.array([0.0]))[0]):.3g}"
    total = f"{K.total_viscosity(k):.4g}" if k.integrable else "inf"
    print(f"{name:22s} admissible={rep.admissible!s:5s} class={rep.decay_class:12s} "
          f"xi: {xi_txt:24s} min mu_c={rep.min_cosine:.3g}  total viscosity={total}")

# the cosine transform of (1+s)^-c is known in closed form through E_c(i w)
k = K.polynomial(1.0, 3.0)
w = np.array([0.5, 1.0, 4.0])
print("\n(1+s)^-3 closed form vs Filon quadrature")
for wi, a, b in zip(w, k.fourier(w), K.fourier_quadrature(k, w)):
    print(f"  w={wi:4.1f}  {a.real:.12f}  {b.real:.12f}")
