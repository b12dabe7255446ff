# Truncated power series in two variables.
# Everything lives in a dense vector ordered by total degree; terms above
# the truncation degree N are simply never stored.
import math

import numpy as np

from loewnerball import PolyMap2, PolySeries, coeff, compose, evaluate, mul, rotate
from loewnerball.powerseries import align_phase, basis

N = 4
print("storage order for N=2:", [tuple(a) for a in basis(2).alphas])

# (1 + z1)(1 - z1) = 1 - z1^2
p = PolySeries(N, {(0, 0): 1, (1, 0): 1})
q = PolySeries(N, {(0, 0): 1, (1, 0): -1})
print("(1+z1)(1-z1) =", mul(p, q))

# products drop whatever lands above N
cube = PolySeries(N, {(1, 1): 1})
print("(z1 z2)^2 at N=4:", mul(cube, cube), " (z1 z2)^3 at N=4:", mul(mul(cube, cube), cube))

# composition: z1 z2 after (z1 + z2^2, z2) gives z1 z2 + z2^3
shear = PolyMap2.from_terms(N, {(0, 2): 1.0})
print("z1 z2 o shear =", compose(PolySeries(N, {(1, 1): 1}), shear))

# evaluation accepts a single pair or a batch of shape (n, 2)
f = PolySeries(N, {(1, 0): 1, (0, 2): 2})
print("z1 + 2 z2^2 at (0, 0.5):", evaluate(f, (0, 0.5)))
pts = np.array([[0.1, 0.2j], [0.0, 0.5]])
print("batch:", evaluate(f, pts))

# the shear with coefficient 3 sqrt 3 / 2 reappears later as an extremal map
u2 = 3 * math.sqrt(3) / 2
Phi = PolyMap2.from_terms(N, {(0, 2): u2})
print("b^1_{0,2} of Phi:", coeff(Phi, 1, (0, 2)))

# rotations U* f(U z) keep the normalization and only shift phases
g = rotate(PolyMap2.from_terms(N, {(0, 2): 2 * np.exp(0.9j)}), 0.0, 0.0)
th = align_phase(g, 1, (0, 2))
print("phase-aligned coefficient:", coeff(rotate(g, *th), 1, (0, 2)), "using angles", th)
