# Exponential squeezing: the margin sup Re<G(z),z>/|z|^2 and the ratio test
# |phi_{s,t}(z)| <= e^{a(s-t)} |z|.
import numpy as np

from loewnerball import koebe_field, linear_field, squeezing_equiv_check, squeezing_margin
from loewnerball.herglotz import SampleGrid

print("linear margin:", squeezing_margin(linear_field()).margin)
print("koebe margin :", squeezing_margin(koebe_field()).margin)
for r in (0.5, 0.9, 0.99):
    m = squeezing_margin(koebe_field(), np.array([[-r, 0]])).margin
    print(f"  koebe at (-{r}, 0): {m:+.6f}  vs -(1-r)/(1+r) = {-(1 - r) / (1 + r):+.6f}")

pts = SampleGrid(4, 4, 4, r_max=0.95).points()
for a in (0.99, 1 - 1e-9, 1.1):
    bad = squeezing_equiv_check(linear_field(), a, 0, 1, pts).ratio_violations
    print(f"linear field, a={a}: {len(bad)} of {len(pts)} samples violate the ratio")

# near z1 = -1 the Koebe flow creeps, then decays like e^{-t} with a large constant,
# so a = 1/2 fails for moderate t - s and holds again once t - s is large
edge = np.array([[-0.99, 0], [-0.98, 0.1]])
for t in (1, 5, 10, 15, 20, 25):
    bad = squeezing_equiv_check(koebe_field(), 0.5, 0, t, edge, step=1e-2).ratio_violations
    print(f"koebe, a=0.5, t-s={t:2d}: {len(bad)} violations")
