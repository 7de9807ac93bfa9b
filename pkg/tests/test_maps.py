import cmath

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from schwarzian_lab.errors import DomainError, UsageError
from schwarzian_lab.maps import (
    Constant,
    MobiusTransform,
    Polynomial,
    affine_transform,
    blaschke,
    disk_automorphism,
    eval_harmonic,
    from_h_omega,
    harmonic_mobius,
    identity,
    make_f_alpha,
    normalizing_automorphism,
    parse_map,
    scaling_map,
    shear,
)

from conftest import disk_points


def h_alpha(a, z):
    return (1 - (1 - z) ** a) / a


def g_alpha(a, z):
    return (1 - (1 + a * z) * (1 - z) ** a) / (a * (1 + a))


class TestFAlpha:
    def test_alpha_one(self):
        assert eval_harmonic(make_f_alpha(1), 0.5) == pytest.approx(0.625, abs=1e-15)

    @pytest.mark.parametrize("alpha", [0.5, 1, 1.5, 3])
    def test_origin(self, alpha):
        assert eval_harmonic(make_f_alpha(alpha), 0) == 0

    def test_h_prime(self):
        assert make_f_alpha(1.5).h.derivative()(0.5) == pytest.approx(0.5**0.5, abs=1e-15)

    @pytest.mark.parametrize("alpha", [0, -1])
    def test_rejects_nonpositive(self, alpha):
        with pytest.raises(DomainError):
            make_f_alpha(alpha)

    def test_closed_disk_flag(self):
        f = make_f_alpha(1.5)
        assert f.closed_disk
        assert eval_harmonic(f, 1.0) == pytest.approx(h_alpha(1.5, 1) + g_alpha(1.5, 1))

    @pytest.mark.parametrize("alpha", [0.7, 1, 1.25, 2.5])
    def test_components_and_dilatation(self, alpha, rng):
        z = disk_points(rng, 1000, 0.999)
        f = make_f_alpha(alpha)
        np.testing.assert_allclose(f.h(z) - f.g(z), h_alpha(alpha, z) - g_alpha(alpha, z), atol=1e-13)
        assert np.array_equal(f.dilatation(z), z)


class TestShear:
    def test_f1_as_shear(self, rng):
        f = shear(Polynomial([0, 1, -0.5]), identity())
        z = disk_points(rng, 50, 0.95)
        np.testing.assert_allclose(f.h(z), z, atol=1e-13)
        np.testing.assert_allclose(f.g(z), z**2 / 2, atol=1e-13)

    def test_zero_dilatation(self):
        F = Polynomial([0, 1, 0.2])
        f = shear(F, Constant(0))
        assert f.h(0.3) == F(0.3) and f.g(0.3) == 0

    def test_constant_dilatation(self):
        c = 0.3 + 0.1j
        f = shear(identity(), Constant(c))
        z = 0.2 - 0.5j
        assert f.h(z) == pytest.approx(z / (1 - c), abs=1e-15)
        assert f.g(z) == pytest.approx(c * z / (1 - c), abs=1e-15)

    def test_base_value(self):
        f = shear(identity(), identity(), base_value=0.25)
        assert f.g(0) == 0.25
        assert f.h(0.3) - f.g(0.3) == pytest.approx(0.3, abs=1e-14)

    @pytest.mark.parametrize("build", [
        lambda: shear(Polynomial([0, 1, 0.1j, -0.05]), blaschke([0.3, -0.2j])),
        lambda: from_h_omega(Polynomial([0, 1, 0.2]), blaschke([0.5 + 0.1j], 1j)),
        lambda: make_f_alpha(1.5),
        lambda: affine_transform(make_f_alpha(1.2), 0.4 - 0.2j),
        lambda: harmonic_mobius(MobiusTransform(1, 0.2, 0.1, 2), 0.3j),
    ])
    def test_shear_consistency(self, build, rng):
        f = build()
        z = disk_points(rng, 200, 0.95)
        dg, dh = f.g.derivative()(z), f.h.derivative()(z)
        np.testing.assert_allclose(dg, f.dilatation(z) * dh, atol=1e-12, rtol=0)


class TestHarmonicMobius:
    def test_identity(self):
        assert eval_harmonic(harmonic_mobius(MobiusTransform(1, 0, 0, 1), 0), 0.4j) == 0.4j

    def test_constant_dilatation(self):
        f = harmonic_mobius(MobiusTransform(1, 0, 0, 1), 0.5)
        z = 0.3 + 0.2j
        assert eval_harmonic(f, z) == pytest.approx(z + 0.5 * z.conjugate())
        assert f.dilatation(z) == 0.5

    def test_pole_in_disk(self):
        with pytest.raises(DomainError):
            harmonic_mobius(MobiusTransform(1, 0, 1, -0.5), 0.1)
        with pytest.raises(DomainError):
            harmonic_mobius(MobiusTransform(1, 0, 1, -1), 0.1)

    def test_large_c(self):
        with pytest.raises(DomainError):
            harmonic_mobius(MobiusTransform(1, 0, 0, 1), 1)


class TestAffine:
    def test_zero(self):
        f = make_f_alpha(1)
        assert affine_transform(f, 0) is f

    def test_dilatation_at_origin(self):
        assert affine_transform(make_f_alpha(1), 0.3).dilatation(0) == pytest.approx(0.3)

    def test_values(self):
        f = make_f_alpha(1.3)
        a = 0.2 + 0.5j
        F = affine_transform(f, a)
        z = 0.1 - 0.6j
        assert eval_harmonic(F, z) == pytest.approx(f(z) + a * np.conj(f(z)), abs=1e-14)

    def test_rejects(self):
        with pytest.raises(DomainError):
            affine_transform(make_f_alpha(1), 1.0)


class TestAutomorphisms:
    def test_disk_automorphism(self):
        assert disk_automorphism(0)(0.3j) == 0.3j
        phi = disk_automorphism(0.5)
        assert phi(0) == 0.5 and phi(-0.5) == 0

    def test_normalizing(self):
        assert normalizing_automorphism(0)(0.2 + 0.1j) == pytest.approx(0.2 + 0.1j)
        assert normalizing_automorphism(0.4)(0.4) == 0
        assert abs(normalizing_automorphism(0.3 + 0.2j)(1) - 1) < 1e-14

    def test_scaling(self):
        assert scaling_map(0.8, 0.8)(0.3 + 0.4j) == pytest.approx(0.3 + 0.4j)
        assert scaling_map(0.8j, 0.4)(0.8j) == pytest.approx(0.4)
        psi = scaling_map(0.6 * cmath.exp(1j * np.pi / 4), 0.3)
        z = 0.2 - 0.7j
        assert abs(psi(z)) == pytest.approx(0.5 * abs(z))
        assert psi(0) == 0

    @pytest.mark.parametrize("ctor,arg", [
        (disk_automorphism, 1.0),
        (normalizing_automorphism, 1.2j),
        (lambda z0: scaling_map(z0, 0.6), 0.5),
        (lambda z0: scaling_map(z0, 0.1), 0),
    ])
    def test_domain_errors(self, ctor, arg):
        with pytest.raises(DomainError):
            ctor(arg)

    def test_near_boundary_images(self, rng):
        z = 0.999 * np.exp(2j * np.pi * rng.random(50))
        for a in disk_points(rng, 5, 0.95):
            assert np.all(np.abs(disk_automorphism(a)(z)) < 1)
            assert np.all(np.abs(normalizing_automorphism(a)(z)) < 1)


coef = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)
point = st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False)


@given(st.tuples(coef, coef, coef, coef), st.tuples(coef, coef, coef, coef), point)
def test_mobius_composition(m1, m2, z):
    if abs(m1[0] * m1[3] - m1[1] * m1[2]) < 1e-2 or abs(m2[0] * m2[3] - m2[1] * m2[2]) < 1e-2:
        return
    A, B = MobiusTransform(*m1), MobiusTransform(*m2)
    inner = B(z)
    den = A.c * inner + A.d
    if abs(B.c * z + B.d) < 1e-2 or abs(den) < 1e-2 or abs(inner) > 1e3:
        return
    want = A(inner)
    got = (A @ B)(z)
    assert abs(got - want) <= 1e-12 * max(1.0, abs(want)) * max(1.0, abs(inner)) * 10


@given(st.complex_numbers(max_magnitude=0.95, allow_nan=False), st.floats(0, 2 * np.pi))
def test_automorphisms_preserve_circle(a, t):
    z = np.exp(1j * t)
    assert abs(abs(disk_automorphism(a)(z)) - 1) < 1e-12
    assert abs(abs(normalizing_automorphism(a)(z)) - 1) < 1e-12


def test_mobius_inverse():
    M = MobiusTransform(1 + 1j, 0.3, -0.2, 2)
    assert (M @ M.inverse())(0.3 - 0.1j) == pytest.approx(0.3 - 0.1j, abs=1e-14)


def test_singular_mobius():
    with pytest.raises((DomainError, UsageError)):
        MobiusTransform(1, 2, 2, 4)


class TestParse:
    def test_roundtrip_description(self):
        desc = {"kind": "affine", "base": {"kind": "f_alpha", "alpha": 1.5}, "a": [0.1, 0.2]}
        f = parse_map(desc)
        assert f.describe() == desc
        z = 0.3 + 0.3j
        assert f(z) == affine_transform(make_f_alpha(1.5), 0.1 + 0.2j)(z)

    def test_shear(self):
        f = parse_map({"kind": "shear", "F": [0, 1, -0.5], "omega": {"kind": "identity"}})
        assert f(0.5) == pytest.approx(0.625, abs=1e-13)

    @pytest.mark.parametrize("desc", [
        {"kind": "f_alpha", "alpha": 1, "extra": 0},
        {"kind": "f_alpha"},
        {"kind": "nope"},
        {"kind": "shear", "F": [0, 1], "omega": {"kind": "wat"}},
        {"kind": "f_alpha", "alpha": True},
        {"kind": "affine", "base": {"kind": "f_alpha", "alpha": 1}, "a": "x"},
    ])
    def test_rejects(self, desc):
        with pytest.raises(UsageError):
            parse_map(desc)


def test_domain_check():
    f = from_h_omega(identity(), blaschke([0.2]))
    with pytest.raises(DomainError):
        f(1.01)
    with pytest.raises(DomainError):
        make_f_alpha(1)(1.01)


@given(st.floats(-1, 1), st.floats(-1, 1))
def test_one_minus_abs2_exact(x, y):
    from fractions import Fraction

    from schwarzian_lab.maps import one_minus_abs2

    exact = 1 - Fraction(x) ** 2 - Fraction(y) ** 2
    got = float(one_minus_abs2(complex(x, y)))
    assert abs(Fraction(got) - exact) <= Fraction(4.5e-16) * abs(exact) + Fraction(1e-300)
