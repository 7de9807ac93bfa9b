import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from schwarzian_lab.criteria import (
    CriterionVerdict,
    affine_invariance_residuals,
    identity_suite,
    lemma_check,
    lemma_gap,
    lemma_suite,
    random_blaschke,
    random_shear,
    sh_decomposition_residual,
    solve_c,
    thm3_check,
    thm4_check,
)
from schwarzian_lab.errors import SensePreservationError
from schwarzian_lab.maps import (
    Constant,
    MobiusTransform,
    Polynomial,
    blaschke,
    from_h_omega,
    harmonic_mobius,
    holomorphic_map,
    identity,
    make_f_alpha,
)
from schwarzian_lab.schwarzian import GridSpec

from conftest import disk_points

SMALL = GridSpec(levels=10, angular_base=16)


class TestLemma:
    def test_identity(self, rng):
        gaps = lemma_gap(identity(), disk_points(rng, 100, 0.99))
        assert np.max(np.abs(gaps)) < 1e-14

    def test_constant(self):
        assert lemma_gap(Constant(0.3 + 0.1j), 0.4) == -1

    def test_square_equality(self):
        assert lemma_gap(Polynomial([0, 0, 1]), 0j) == 0

    def test_outside(self):
        with pytest.raises(SensePreservationError):
            lemma_gap(Polynomial([0, 2]), 0.7)

    def test_random_products(self):
        rng = np.random.default_rng(3)
        for k in range(20):
            om = random_blaschke(rng, 1 + k % 4)
            assert np.max(lemma_gap(om, disk_points(rng, 500, 0.999))) <= 1e-12

    def test_suite_seeded(self):
        a, b = lemma_suite(42), lemma_suite(42)
        assert a == b
        assert a["max_gap"] <= 1e-12 and a["identity_gap"] <= 1e-12 and a["square_gap_at_0"] == 0

    def test_check_verdict(self):
        v = lemma_check(blaschke([0.5, -0.3j]), SMALL)
        assert v.satisfied and not v.inconclusive


class TestThm3:
    def test_harmonic_mobius(self):
        f = harmonic_mobius(MobiusTransform(1, 0.2, 0.1j, 1.5), 0.3 + 0.2j)
        for grid in (SMALL, GridSpec()):
            v = thm3_check(f, grid)
            assert v.satisfied and v.worst_margin >= -1e-12

    def test_affine(self):
        v = thm3_check(harmonic_mobius(MobiusTransform(1, 0, 0, 1), 0.6j), SMALL)
        assert v.satisfied

    def test_f1_violated(self):
        v = thm3_check(make_f_alpha(1), SMALL)
        assert not v.satisfied
        assert abs(v.worst_point) ** 2 > 1 / 3
        assert v.worst_margin < 0

    def test_witness_retained_on_refinement(self):
        f = make_f_alpha(1.2)
        coarse = thm3_check(f, GridSpec(levels=5, angular_base=8))
        fine = thm3_check(f, GridSpec(levels=3, angular_base=4), previous=coarse)
        assert not fine.satisfied
        assert fine.worst_margin <= coarse.worst_margin

    def test_inconclusive(self):
        f = from_h_omega(identity(), Polynomial([0, 2]))
        v = thm3_check(f, SMALL)
        assert v.inconclusive and v.unverified
        assert v.to_dict()["inconclusive"]


class TestThm4:
    def test_identity_h(self):
        assert thm4_check(from_h_omega(identity(), blaschke([0.3])), SMALL).satisfied

    def test_small_perturbation(self):
        v = thm4_check(holomorphic_map(Polynomial([0, 1, 0.01])), SMALL)
        assert v.satisfied and v.worst_margin > 0.8

    def test_h2_violated(self):
        v = thm4_check(make_f_alpha(2), SMALL)
        assert not v.satisfied
        assert "no hyperbolic weight" in v.to_dict()["note"]


class TestRoot:
    def test_value(self):
        c = solve_c()
        assert abs(2 * c * math.tan(c) - 1) < 1e-12
        assert abs(c - 0.6533) < 5e-4
        assert 2 * c * c == pytest.approx(0.8536, abs=1e-4)

    def test_mpmath_oracle(self):
        ref = mpmath.findroot(lambda x: 2 * x * mpmath.tan(x) - 1, 0.65)
        assert abs(solve_c() - float(ref)) < 1e-15

    @pytest.mark.parametrize("cap", [60, 100, 500, 5000])
    def test_cap_independent(self, cap):
        assert solve_c(cap) == solve_c()


class TestDecomposition:
    def test_holomorphic(self):
        f = holomorphic_map(Polynomial([0, 1, 0.3, 0.1j]))
        assert sh_decomposition_residual(f, 0.4 - 0.2j) == 0

    def test_f1(self):
        assert sh_decomposition_residual(make_f_alpha(1), 0.4 + 0.2j) < 1e-10

    def test_suite(self):
        out = identity_suite(7)
        assert out["max_residual"] < 1e-9


class TestAffineResiduals:
    def test_zero(self):
        assert affine_invariance_residuals(make_f_alpha(1.3), 0, 0.2) == (0, 0)

    def test_f1(self):
        s, w = affine_invariance_residuals(make_f_alpha(1), 0.5, 0.3)
        assert s < 1e-11 and w < 1e-11


@given(st.integers(0, 2**32 - 1))
def test_random_shear_is_sense_preserving(seed):
    rng = np.random.default_rng(seed)
    f = random_shear(rng)
    z = disk_points(rng, 64, 0.95)
    f.check_sense_preserving(z)
    assert np.max(sh_decomposition_residual(f, z)) < 1e-9


@given(st.integers(0, 2**32 - 1), st.complex_numbers(max_magnitude=0.9, allow_nan=False))
def test_affine_property(seed, a):
    rng = np.random.default_rng(seed)
    s, w = affine_invariance_residuals(random_shear(rng), a, disk_points(rng, 16, 0.9))
    assert np.max(s) < 1e-10 and np.max(w) < 1e-10


def test_verdict_serialization():
    v = CriterionVerdict("thm3", True, 0.0, 0.5j, 10, 1e-9, GridSpec(levels=2))
    d = v.to_dict()
    assert d["worst_point"] == [0.0, 0.5] and d["grid"]["levels"] == 2
