# Herglotz fields: membership, decoupling and the slice reduction.
import math

import numpy as np

from loewnerball import (caratheodory_coeff_bound, caratheodory_toeplitz, decouple, koebe_field,
                         linear_field, membership_test, pure_power_field, random_member, slice)
from loewnerball.bounds import field_dictionary
from loewnerball.herglotz import defining_function, sample_member, unit_vectors

u2 = 3 * math.sqrt(3) / 2

# Re<G(z), z> <= 0 on the ball is checked on a sampled grid
for name, G in [("linear", linear_field()), ("koebe", koebe_field()),
                ("-z1 + u2 z2^2", pure_power_field(2, u2)), ("-z1 + 3 z2^2", pure_power_field(2, 3.0))]:
    v = membership_test(G)
    print(f"{name:>15}: passed={v.passed} worst={v.worst_value:+.4f}")

# at the support point the defining function of the extremal field vanishes
z = np.array([1 / math.sqrt(3), math.sqrt(2 / 3)])
print("Re<G,z> at (1/sqrt3, sqrt(2/3)):", defining_function(pure_power_field(2, u2), z))

# decoupling keeps only the monomials resonant with (k1, k2)
rng = np.random.default_rng(1)
G = sample_member(rng, field_dictionary())
for k in [(0, 1), (1, 0), (2, 1), (1, 2)]:
    D = decouple(G, *k)
    nz = [(j, tuple(a)) for j, c in ((1, D.series.comp1), (2, D.series.comp2)) for a in c.coeffs if a.degree > 1]
    print(f"decouple{k}: terms kept {nz}  member={membership_test(D, 10, 8).passed}")

# restricting to a complex line gives a Caratheodory function
p = slice(koebe_field(), [1, 0], 4)
print("Koebe slice c_m:", p.c.real)
print("coefficient bound:", caratheodory_coeff_bound(p))
print("Toeplitz order 3:", caratheodory_toeplitz(p, 3))

worst = 0.0
for v in unit_vectors(rng, 200):
    worst = max(worst, np.abs(slice(G, v, 6).c).max())
print("largest |c_m| over 200 directions of a random member:", round(worst, 6))

# averaging with weights is a convex combination
half = random_member([linear_field(), koebe_field()], [0.5, 0.5])
print("1/2 linear + 1/2 koebe, q^1_{m,0}:", [half.series.comp1[m, 0].real for m in range(2, 6)])
