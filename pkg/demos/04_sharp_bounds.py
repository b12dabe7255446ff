# Sharp bounds for pure terms and the shear radius.
import math

from loewnerball import check_b02_extremal, shear_radius, sharp_q0m_bound, verify_q0m_numeric

print(" m   closed form     grid search     error      optimizer")
for m in range(2, 9):
    r = verify_q0m_numeric(m)
    print(f"{m:2d}  {r.closed_form:.10f}  {r.numeric:.10f}  {r.abs_err:.1e}  "
          f"({r.optimizer_point[0]:.6f}, {r.optimizer_point[1]:.6f})")

# the optimizer for m = 2 sits at (1/sqrt 3, sqrt(2/3))
print("1/sqrt3, sqrt(2/3) =", 1 / math.sqrt(3), math.sqrt(2 / 3))

# running the coefficient ODE on the extremal field recovers u_2
print("e^T a^1_(0,2)(0,T):", check_b02_extremal(), " u_2 =", sharp_q0m_bound(2))
print("half the forcing, half the coefficient:", check_b02_extremal(scale=0.5))

# (z1 + a z2^2, z2) rescaled by t stays in S^0 up to t = u_2 / |a|
for a in [1, 1j, 3 * math.sqrt(3) / 2, 3 * math.sqrt(3)]:
    print(f"shear radius for a={a}: {shear_radius(a):.6f}")
