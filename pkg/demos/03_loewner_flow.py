# The Loewner ODE and the parametric representation f = lim e^t phi(., t).
import math

import numpy as np

from loewnerball import coeff_evolution, integrate_point, koebe_field, linear_field, pure_power_field
from loewnerball.herglotz import rotate_field
from loewnerball.loewner import parametric_map_report

u2 = 3 * math.sqrt(3) / 2
G = pure_power_field(2, u2, degree=5)

# pointwise: the z1 equation is linear, so the flow has a closed form
z = np.array([0.2 - 0.1j, 0.6 + 0.3j])
t = 2.0
w = integrate_point(G, z, 0, t)
exact = [math.exp(-t) * z[0] + u2 * z[1] ** 2 * math.exp(-t) * (1 - math.exp(-t)), math.exp(-t) * z[1]]
print("RK4 vs closed form:", np.abs(w - exact).max())

# coefficients: e^t a^1_{0,2}(0, t) climbs to u2 like 1 - e^{-t}
rec = coeff_evolution(G, 3, 0, 10.0, time_grid=np.linspace(0, 10, 6))
for ti, a in zip(rec.time_grid, rec.rescaled[:, 0, 5]):
    print(f"  t={ti:4.1f}  e^t a^1_(0,2) = {a.real:.6f}")

# the limit, with the tail estimate that decides convergence
r = parametric_map_report(G, 5, T=20)
print("b^1_{0,2} =", r.map.comp1[0, 2].real, " tail estimate", f"{r.tail_estimate:.1e}")

# the Koebe field generates z/(1+z)^2; rotating by pi gives z/(1-z)^2
for name, K in [("koebe", koebe_field(5)), ("rotated", rotate_field(koebe_field(5), math.pi, 0))]:
    f = parametric_map_report(K, 5, T=25).map
    print(f"{name:>8}: b^1_(m,0) =", np.round([f.comp1[m, 0].real for m in range(2, 6)], 6))

# the linear field does nothing beyond the scaling
print("linear field map is identity:",
      np.allclose(parametric_map_report(linear_field(3), T=20).map.array[:, 3:], 0))
