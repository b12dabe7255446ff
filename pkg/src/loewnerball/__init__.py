"""Loewner theory on the unit ball of C^2: Herglotz fields, coefficient ODEs and sharp bounds."""

from .bounds import (BoundResult, bound_qm0, check_b02_extremal, extremal_field, field_dictionary,
                     shear_radius, sharp_q0m_bound, verify_q0m_numeric)
from .errors import (ConvergenceError, DegreeMismatchError, InstabilityError, InvalidCompositionError,
                     LoewnerBallError, NormalizationError, NumericalError, OutOfRangeError,
                     ParameterError, ValidationError, WeightError)
from .herglotz import (HerglotzField, SliceFunction, caratheodory_coeff_bound, caratheodory_toeplitz,
                       decouple, koebe_field, linear_field, make_field, membership_test,
                       pure_power_field, random_member, rotate_field, slice)
from .loewner import (EvolutionRecord, coeff_evolution, integrate_point, parametric_map,
                      squeezing_equiv_check, squeezing_margin)
from .powerseries import MultiIndex, PolyMap2, PolySeries, coeff, compose, evaluate, mul, rotate

__version__ = "0.1.0"
