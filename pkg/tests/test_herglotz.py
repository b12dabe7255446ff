import math

import numpy as np
import pytest

from loewnerball import (NormalizationError, ParameterError, PolyMap2, WeightError,
                         caratheodory_coeff_bound, caratheodory_toeplitz, decouple, koebe_field,
                         linear_field, make_field, membership_test, pure_power_field, random_member,
                         slice)
from loewnerball.bounds import field_dictionary, sharp_q0m_bound
from loewnerball.herglotz import (FieldPiece, SliceFunction, defining_function, rotate_field,
                                  sample_member, toeplitz_matrix, unit_vectors)
from loewnerball.powerseries import basis

U2 = 3 * math.sqrt(3) / 2


def full_field(degree=4, seed=0):
    """Normalized field with every nonlinear coefficient nonzero (not in -M in general)."""
    rng = np.random.default_rng(seed)
    b = basis(degree)
    arr = 0.1 * (rng.normal(size=(2, b.size)) + 1j * rng.normal(size=(2, b.size)))
    arr[:, b.deg <= 1] = 0
    arr[0, b.index[(1, 0)]] = arr[1, b.index[(0, 1)]] = -1
    return make_field(PolyMap2.from_arrays(degree, arr))


class TestMakeField:
    def test_linear(self):
        G = linear_field(4)
        assert G.is_autonomous and G.series.linear_part().tolist() == [[-1, 0], [0, -1]]

    def test_koebe_coefficients(self):
        G = koebe_field(6)
        assert all(G.series.comp1[m, 0] == -2 for m in range(2, 7))

    def test_bad_normalization_names_coefficient(self):
        with pytest.raises(NormalizationError, match="component 1 coefficient of z\\^\\(1, 0\\)"):
            make_field(PolyMap2.from_terms(3, linear=-2.0))

    def test_piece_times(self):
        f = PolyMap2.from_terms(3, linear=-1.0)
        with pytest.raises(ParameterError):
            make_field([(0.5, f)])
        with pytest.raises(ParameterError):
            make_field([(0.0, f), (1.0, f), (1.0, f)])
        G = make_field([(0.0, f), (1.0, PolyMap2.from_terms(3, {(2, 0): -1}, linear=-1.0))])
        assert G.breakpoints == [0.0, 1.0]
        assert G.piece_at(0.99).series is f
        assert G.shifted(1.5).is_autonomous

    def test_koebe_tail_gives_exact_values(self):
        z = np.array([[0.7 - 0.2j, 0.1]])
        exact = -z[0, 0] * (1 + z[0, 0]) / (1 - z[0, 0])
        assert abs(koebe_field(4)(z)[0, 0] - exact) < 1e-14


class TestMembership:
    def test_linear(self):
        v = membership_test(linear_field())
        assert v.passed and abs(v.worst_value + 0.05 ** 2) < 1e-15

    def test_koebe(self):
        assert membership_test(koebe_field()).passed

    def test_extremal_passes_up_to_rounding(self):
        assert membership_test(pure_power_field(2, sharp_q0m_bound(2))).passed

    def test_too_large_coefficient_fails_with_witness(self):
        v = membership_test(pure_power_field(2, 3.0))
        assert not v.passed and v.worst_value > 0.1
        x, y = np.abs(v.witness) / np.linalg.norm(v.witness)
        assert abs(x - 1 / math.sqrt(3)) < 0.05 and abs(y - math.sqrt(2 / 3)) < 0.05

    def test_defining_function_at_support_point(self):
        z = np.array([1 / math.sqrt(3), math.sqrt(2 / 3)], dtype=complex)
        assert abs(defining_function(pure_power_field(2, U2), z)) < 1e-9
        want = -1 + 3 * (1 / math.sqrt(3)) * (2 / 3)
        assert abs(defining_function(pure_power_field(2, 3.0), z) - want) < 1e-12

    def test_grid_is_rotation_closed(self):
        # the grid phases form a group, so rotating by a grid phase cannot change the verdict value
        G = sample_member(np.random.default_rng(3), field_dictionary())
        a = membership_test(G, 6, 6, phase_samples=8).worst_value
        b = membership_test(rotate_field(G, 2 * math.pi / 8, 3 * 2 * math.pi / 8), 6, 6,
                            phase_samples=8).worst_value
        assert abs(a - b) < 1e-12


class TestDecouple:
    def test_zero_one_filter(self):
        D = decouple(full_field(5), 0, 1)
        b = basis(5)
        for k, a in enumerate(b.alphas):
            if a.degree < 2:
                continue
            assert (D.series.comp1.array[k] != 0) == (a.a2 == 0)
            assert (D.series.comp2.array[k] != 0) == (a.a2 == 1)

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_m_one_filter(self, m):
        G = full_field(5, seed=m)
        D = decouple(G, m, 1)
        nonlinear = {(j, a) for j, comp in ((1, D.series.comp1), (2, D.series.comp2))
                     for a in comp.coeffs if a.degree >= 2}
        assert nonlinear == {(1, (0, m))}
        assert D.series.comp1[0, m] == G.series.comp1[0, m]

    def test_linear_untouched(self):
        assert decouple(linear_field(4), 2, 1).series == linear_field(4).series

    def test_idempotent(self):
        G = full_field(6)
        once = decouple(G, 1, 2)
        assert decouple(once, 1, 2).series == once.series

    def test_zero_pair_rejected(self):
        with pytest.raises(ParameterError):
            decouple(linear_field(), 0, 0)

    def test_koebe_tail_follows_filter(self):
        z = np.array([[0.6, 0.3]], dtype=complex)
        K = koebe_field(4)
        assert np.allclose(decouple(K, 0, 1)(z), K(z), atol=1e-15)
        assert np.allclose(decouple(K, 1, 0)(z), -z, atol=1e-15)


class TestSlice:
    def test_koebe(self):
        assert np.allclose(slice(koebe_field(), [1, 0], 4).c, 2)

    def test_extremal_transverse(self):
        assert np.allclose(slice(pure_power_field(2, U2), [0, 1], 3).c, 0)

    def test_linear(self):
        v = unit_vectors(np.random.default_rng(0), 1)[0]
        assert np.allclose(slice(linear_field(), v, 3).c, 0)

    def test_non_unit_direction(self):
        with pytest.raises(NormalizationError):
            slice(linear_field(), [1, 1], 2)

    def test_order_too_high(self):
        with pytest.raises(ParameterError):
            slice(linear_field(4), [1, 0], 4)

    def test_matches_definition(self):
        # -zeta p(zeta) = <G(zeta v), v> up to truncation
        G = full_field(6, seed=5)
        v = unit_vectors(np.random.default_rng(1), 1)[0]
        p = slice(G, v, 5)
        zeta = 0.01 * np.exp(0.4j)
        lhs = -zeta * p(zeta)
        g = G(zeta * v)
        rhs = g[0] * np.conj(v[0]) + g[1] * np.conj(v[1])
        assert abs(lhs - rhs) < 1e-11

    def test_linear_in_the_field(self):
        A, B = full_field(5, 1), full_field(5, 2)
        v = np.array([0.6, 0.8j])
        mix = make_field(PolyMap2.from_arrays(5, 0.3 * A.series.array + 0.7 * B.series.array))
        assert np.allclose(slice(mix, v, 4).c, 0.3 * slice(A, v, 4).c + 0.7 * slice(B, v, 4).c, atol=1e-14)


class TestCaratheodory:
    def test_koebe_boundary(self):
        r = caratheodory_coeff_bound(SliceFunction(np.full(4, 2.0 + 0j)))
        assert r.passed and r.boundary == [1, 2, 3, 4] and "convex combination" in r.diagnostic

    def test_constant(self):
        r = caratheodory_coeff_bound(SliceFunction(np.zeros(3, complex)))
        assert r.passed and not r.boundary and r.diagnostic is None

    def test_violation(self):
        r = caratheodory_coeff_bound(SliceFunction(np.array([2.5 + 0j])))
        assert not r.passed and r.violations == [1]

    @pytest.mark.parametrize("m", [1, 2, 4])
    def test_toeplitz_constant(self, m):
        r = caratheodory_toeplitz(SliceFunction(np.zeros(4, complex)), m)
        assert r.passed and r.min_eigenvalue == pytest.approx(2.0)

    def test_toeplitz_koebe(self):
        p = SliceFunction(np.full(3, 2.0 + 0j))
        r = caratheodory_toeplitz(p, 3)
        assert r.passed and abs(r.min_eigenvalue) < 1e-12
        assert np.linalg.eigvalsh(toeplitz_matrix(p, 3))[-1] == pytest.approx(8.0)

    def test_toeplitz_is_hermitian(self):
        T = toeplitz_matrix(SliceFunction(np.array([0.5j, 1 - 0.2j])), 2)
        assert np.allclose(T, T.conj().T) and T[1, 0] == 0.5j

    def test_toeplitz_order_range(self):
        with pytest.raises(ParameterError):
            caratheodory_toeplitz(SliceFunction(np.zeros(2, complex)), 3)

    def test_toeplitz_catches_what_moduli_miss(self):
        # |c_m| <= 2 each, yet p = 1 + 2 zeta - 2 zeta^2 is not Caratheodory
        p = SliceFunction(np.array([2.0, -2.0 + 0j]))
        assert caratheodory_coeff_bound(p).passed
        assert not caratheodory_toeplitz(p, 2).passed


class TestRandomMember:
    def test_single_entry(self):
        K = koebe_field()
        assert random_member([K], [1.0]) is K

    def test_half_linear_half_koebe(self):
        G = random_member([linear_field(), koebe_field()], [0.5, 0.5])
        assert all(abs(G.series.comp1[m, 0] + 1) < 1e-15 for m in range(2, 9))
        z = np.array([[0.9, 0.0]], dtype=complex)
        assert abs(G(z)[0, 0] - 0.5 * (-0.9 - 0.9 * 1.9 / 0.1)) < 1e-12

    @pytest.mark.parametrize("weights", [[0.5, 0.6], [-0.1, 1.1], [1.0]])
    def test_bad_weights(self, weights):
        with pytest.raises(WeightError):
            random_member([linear_field(), koebe_field()], weights)

    def test_samples_are_members(self):
        rng = np.random.default_rng(11)
        D = field_dictionary()
        for _ in range(5):
            assert membership_test(sample_member(rng, D), 8, 8, phase_samples=8).passed


def test_piece_evaluation_shapes():
    p = FieldPiece(0.0, koebe_field(3).series)
    g1, g2 = p(np.zeros((2, 3)), np.zeros((2, 3)))
    assert g1.shape == (2, 3) and g2.shape == (2, 3)
