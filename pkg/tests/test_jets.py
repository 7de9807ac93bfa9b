import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from schwarzian_lab.errors import SingularEvaluationError, UsageError
from schwarzian_lab.jets import ComplexJet3, jet_binary, jet_compose, jet_elementary


def poly_jet(coeffs, z):
    """Oracle: derivatives via numpy's polynomial class, independent of jet arithmetic."""
    p = np.polynomial.Polynomial(coeffs)
    return ComplexJet3(z, *(complex(p.deriv(k)(z)) if k else complex(p(z)) for k in range(4)))


def coeffs_of(j):
    return np.array(j.coefficients(), dtype=complex)


class TestBinary:
    def test_square_of_identity(self):
        z = ComplexJet3.identity(0.3)
        sq = jet_binary("mul", z, z)
        np.testing.assert_allclose(coeffs_of(sq), [0.09, 0.6, 2, 0], atol=1e-15)

    def test_additive_inverse(self):
        z = ComplexJet3.identity(0.3)
        sq = z * z
        assert np.all(coeffs_of(jet_binary("add", sq, -sq)) == 0)

    def test_quotient(self):
        z = ComplexJet3.identity(0.5)
        q = jet_binary("div", z * z, z)
        np.testing.assert_allclose(coeffs_of(q), [0.5, 1, 0, 0], atol=1e-15)

    def test_quotient_matches_mpmath(self):
        # 1/(1 - z + z^3) against high-precision numerical differentiation
        z0 = 0.2 + 0.1j
        b = poly_jet([1, -1, 0, 1], z0)
        got = coeffs_of(1 / b)
        want = [complex(mpmath.diff(lambda t: 1 / (1 - t + t**3), z0, k)) for k in range(4)]
        np.testing.assert_allclose(got, want, rtol=1e-12)

    def test_base_point_mismatch(self):
        with pytest.raises(UsageError):
            ComplexJet3.identity(0.1) + ComplexJet3.identity(0.2)

    def test_zero_division(self):
        with pytest.raises(SingularEvaluationError):
            ComplexJet3.identity(0.3) / ComplexJet3.constant(0.3, 0)

    def test_unknown_op(self):
        with pytest.raises(UsageError):
            jet_binary("pow", ComplexJet3.identity(0.1), ComplexJet3.identity(0.1))

    def test_non_finite_rejected(self):
        with pytest.raises(SingularEvaluationError):
            ComplexJet3(0, float("nan"))

    def test_array_jets_are_elementwise(self, rng):
        z = rng.random(5) + 1j * rng.random(5) - 0.5
        arr = ComplexJet3.identity(z)
        sq = arr * arr / (1 + arr)
        for k, zk in enumerate(z):
            s = ComplexJet3.identity(zk)
            one = s * s / (1 + s)
            np.testing.assert_allclose([c[k] for c in sq.coefficients()], coeffs_of(one), rtol=1e-15)


class TestCompose:
    def test_identity_outer(self):
        j = poly_jet([0.1, 2, -1, 0.5], 0.3j)
        out = jet_compose(ComplexJet3.identity(j.d0), j)
        assert out.allclose(j, rtol=0, atol=0)

    def test_identity_inner(self):
        z = ComplexJet3.identity(0.4)
        out = jet_compose(z * z, z)
        np.testing.assert_allclose(coeffs_of(out), coeffs_of(z * z))

    def test_square_of_square(self):
        outer = poly_jet([0, 0, 1], 0.25)
        inner = poly_jet([0, 0, 1], 0.5)
        np.testing.assert_allclose(coeffs_of(jet_compose(outer, inner)), [0.0625, 0.5, 3, 12])

    def test_mismatch(self):
        with pytest.raises(UsageError):
            jet_compose(ComplexJet3.identity(0.3), ComplexJet3.identity(0.5))


class TestElementary:
    def test_power_one(self):
        w = poly_jet([1, -1, 0.3], 0.2)
        np.testing.assert_allclose(coeffs_of(jet_elementary("principal_power", w, 1)), coeffs_of(w))

    def test_power_two(self):
        w = poly_jet([1, -1], 0.0)
        np.testing.assert_allclose(coeffs_of(jet_elementary("principal_power", w, 2)), [1, -2, 2, 0])

    def test_exp_zero(self):
        e = jet_elementary("exp", ComplexJet3.constant(0.2, 0))
        np.testing.assert_allclose(coeffs_of(e), [1, 0, 0, 0])

    @pytest.mark.parametrize("kind,fn,alpha", [
        ("exp", mpmath.exp, None),
        ("log", mpmath.log, None),
        ("principal_power", lambda w: w**1.5, 1.5),
        ("principal_power", lambda w: w**-0.7, -0.7),
    ])
    def test_against_mpmath(self, kind, fn, alpha):
        z0 = 0.3 - 0.4j
        w = poly_jet([1, -1, 0.2j], z0)
        got = coeffs_of(jet_elementary(kind, w, alpha))
        want = [complex(mpmath.diff(lambda t: fn(1 - t + 0.2j * t**2), z0, k)) for k in range(4)]
        np.testing.assert_allclose(got, want, rtol=1e-12)

    def test_branch_cut(self):
        w = ComplexJet3.constant(0.1, -2.0)
        with pytest.raises(SingularEvaluationError):
            jet_elementary("log", w)
        with pytest.raises(SingularEvaluationError):
            jet_elementary("principal_power", w, 0.5)

    def test_integer_power_needs_no_branch(self):
        w = ComplexJet3.constant(0.1, -2.0)
        assert jet_elementary("principal_power", w, 3).d0 == -8


# properties -----------------------------------------------------------------

coef = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)
polys = st.lists(coef, min_size=1, max_size=6)
points = st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False)


def rel_close(a, b, tol):
    a, b = coeffs_of(a), coeffs_of(b)
    scale = max(1.0, np.max(np.abs(b)))
    return np.max(np.abs(a - b)) <= tol * scale


@given(polys, polys, points)
def test_arithmetic_matches_coefficient_derivatives(p, q, z):
    jp, jq = poly_jet(p, z), poly_jet(q, z)
    prod = np.polynomial.polynomial.polymul(p, q)
    assert rel_close(jp * jq, poly_jet(prod, z), 1e-12)
    summed = np.polynomial.polynomial.polyadd(p, q)
    assert rel_close(jp + jq, poly_jet(summed, z), 1e-12)


@given(polys, polys, polys, points)
def test_compose_associative(p, q, r, z):
    jr = poly_jet(r, z)
    jq = poly_jet(q, jr.d0)
    jp = poly_jet(p, jq.d0)
    left = jet_compose(jet_compose(jp, jq), jr)
    right = jet_compose(jp, jet_compose(jq, jr))
    assert rel_close(left, right, 1e-12)


@given(st.floats(0.2, 3.0), st.complex_numbers(max_magnitude=0.6, allow_nan=False, allow_infinity=False))
def test_power_roundtrip(alpha, z):
    w = poly_jet([1, 0.5, -0.2], z)  # Re w > 0 on |z| <= 0.6
    back = jet_elementary("principal_power", jet_elementary("principal_power", w, alpha), 1 / alpha)
    assert rel_close(back, w, 1e-10)
