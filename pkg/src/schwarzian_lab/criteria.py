"""Univalence criteria for harmonic maps of the disk, checked on samples.

A satisfied verdict only says the hypothesis holds at every sampled point;
a violated one carries the worst sample as a witness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SensePreservationError
from .maps import (
    HarmonicMap,
    Holomorphic,
    Polynomial,
    affine_transform,
    blaschke,
    complement_abs2,
    from_h_omega,
    one_minus_abs2,
)
from .schwarzian import (
    GENERIC_RADIUS_CAP,
    GridSpec,
    _local,
    _slope_jet,
    _pre_and_schwarzian_from_slope,
    _harmonic_schwarzian,
    _unwrap,
    evaluate_on_points,
    harmonic_order,
    harmonic_schwarzian,
    omega_star,
)

DEFAULT_TOL = 1e-9


@dataclass
class CriterionVerdict:
    criterion: str
    satisfied: bool
    worst_margin: float
    worst_point: complex
    samples_evaluated: int
    tolerance: float
    grid: GridSpec | None = None
    unverified: list = field(default_factory=list)
    note: str = ""

    @property
    def inconclusive(self) -> bool:
        return bool(self.unverified)

    def to_dict(self) -> dict:
        out = {
            "criterion": self.criterion,
            "satisfied": self.satisfied,
            "inconclusive": self.inconclusive,
            "worst_margin": self.worst_margin,
            "worst_point": [self.worst_point.real, self.worst_point.imag],
            "samples_evaluated": self.samples_evaluated,
            "grid": None if self.grid is None else self.grid.to_dict(),
            "tolerance": self.tolerance,
            "unverified": [[z.real, z.imag] for z in self.unverified],
        }
        if self.note:
            out["note"] = self.note
        return out


# Schwarz-Pick lemma for the hyperbolic derivative ---------------------------


def _lemma_terms(omega: Holomorphic, z):
    z = np.asarray(z, dtype=complex)
    wj = omega.jet(z)
    d = one_minus_abs2(z)
    dw = complement_abs2(omega, z, wj.d0)
    if np.any(dw <= 0):
        raise SensePreservationError("self-map reached the unit circle")
    ws = d * wj.d1 / dw
    inner = d**2 * wj.d2 / (2 * dw) - np.conj(z) * ws + np.conj(wj.d0) * ws**2
    return wj.d0, ws, inner


def lemma_gap(omega: Holomorphic, z):
    """``|(1-|z|^2)^2 w''/(2(1-|w|^2)) - conj(z) w* + conj(w) w*^2| - (1 - |w*|^2)``.

    Nonpositive for every holomorphic self-map of the disk.
    """
    if np.any(np.abs(np.asarray(z)) >= 1):
        raise DomainError("point outside the open unit disk")
    _, ws, inner = _lemma_terms(omega, z)
    return _unwrap(z, np.abs(inner) - (1 - np.abs(ws) ** 2))


# Schwarzian / hyperbolic-derivative criterion --------------------------------


def _thm3_margin(f: HarmonicMap):
    def margin(z):
        L = _local(f, z)
        d = one_minus_abs2(z)
        ws = d * L.w1 / L.one_minus_w2
        pf = L.ph - np.conj(L.w) * L.w1 / L.one_minus_w2
        af = 0.5 * d * pf - np.conj(z)
        sf = _harmonic_schwarzian(L)
        return 0.5 * np.abs(ws) ** 2 - d**2 * np.abs(sf) - 2 * np.abs(ws * af)

    return margin


def _thm4_margin(f: HarmonicMap, bound: float):
    def margin(z):
        _, sh = _pre_and_schwarzian_from_slope(_slope_jet(f.h, z))
        return bound - np.abs(sh)

    return margin


def _scan(name, margin, grid, tol, previous, note="") -> CriterionVerdict:
    pts = grid.points()
    if previous is not None and not previous.satisfied:
        # keep the old witness so refinement cannot lose a known violation
        pts = np.concatenate([[previous.worst_point], pts])
    vals, failed = evaluate_on_points(margin, pts)
    masked = np.where(failed, np.inf, vals)
    i = int(np.argmin(masked))
    worst = float(masked[i])
    return CriterionVerdict(
        criterion=name,
        satisfied=bool(worst >= -tol),
        worst_margin=worst,
        worst_point=complex(pts[i]),
        samples_evaluated=int((~failed).sum()),
        tolerance=tol,
        grid=grid,
        unverified=[complex(z) for z in pts[failed]],
        note=note,
    )


def thm3_check(
    f: HarmonicMap,
    grid: GridSpec | None = None,
    tol: float = DEFAULT_TOL,
    previous: CriterionVerdict | None = None,
) -> CriterionVerdict:
    """Check ``(1-|z|^2)^2 |S_f| + 2 |w* A_f| <= |w*|^2 / 2`` on a grid."""
    grid = (grid or GridSpec()).capped(GENERIC_RADIUS_CAP)
    return _scan("thm3", _thm3_margin(f), grid, tol, previous)


def thm4_check(
    f: HarmonicMap,
    grid: GridSpec | None = None,
    tol: float = DEFAULT_TOL,
    previous: CriterionVerdict | None = None,
) -> CriterionVerdict:
    """Check the unweighted bound ``|Sh(z)| <= 2 c^2`` with ``2 c tan c = 1``."""
    grid = (grid or GridSpec()).capped(GENERIC_RADIUS_CAP)
    bound = 2 * solve_c() ** 2
    note = "pointwise uniform bound |Sh(z)| <= 2c^2, no hyperbolic weight"
    return _scan("thm4", _thm4_margin(f, bound), grid, tol, previous, note)


def lemma_check(
    omega: Holomorphic, grid: GridSpec | None = None, tol: float = DEFAULT_TOL
) -> CriterionVerdict:
    grid = (grid or GridSpec()).capped(GENERIC_RADIUS_CAP)
    return _scan("lemma", lambda z: -lemma_gap(omega, z), grid, tol, None)


# decomposition identity behind the criterion ------------------------------


def sh_decomposition_residual(f: HarmonicMap, z):
    """Mismatch between ``(1-|z|^2)^2 Sh`` and its expression through ``S_f``, ``A_f``, ``w*``."""
    za = np.asarray(z, dtype=complex)
    d = one_minus_abs2(za)
    _, sh = _pre_and_schwarzian_from_slope(_slope_jet(f.h, z))
    left = d**2 * sh
    w, ws, inner = _lemma_terms(f.dilatation, z)
    sf = harmonic_schwarzian(f, z)
    af = harmonic_order(f, z)
    wb = np.conj(w)
    right = d**2 * sf - 2 * wb * ws * af - 1.5 * (wb * ws) ** 2 + 2 * wb * inner
    return _unwrap(z, np.abs(left - right))


# transcendental constant ----------------------------------------------------


def solve_c(max_iter: int = 200) -> float:
    """Smallest positive root of ``2x tan x = 1``, by bisection on ``(0, pi/2)``.

    Stops once the bracket can no longer shrink in floating point, so any
    ``max_iter`` past convergence gives the same float.
    """

    def g(x):
        return 2 * x * math.tan(x) - 1

    lo, hi = 1e-6, math.pi / 2 - 1e-6
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return lo if abs(g(lo)) <= abs(g(hi)) else hi


# affine invariance ----------------------------------------------------------


def affine_invariance_residuals(f: HarmonicMap, a: complex, z) -> tuple:
    """``(|S_F - S_f|, ||w_F*| - |w*||)`` for ``F = f + a conj(f)``."""
    F = affine_transform(f, a)
    ds = np.abs(harmonic_schwarzian(F, z) - harmonic_schwarzian(f, z))
    dw = np.abs(np.abs(omega_star(F.dilatation, z)) - np.abs(omega_star(f.dilatation, z)))
    return _unwrap(z, ds), _unwrap(z, dw)


# seeded random suites -------------------------------------------------------


def random_disk_points(rng: np.random.Generator, n: int, r_max: float) -> np.ndarray:
    r = r_max * np.sqrt(rng.random(n))
    return r * np.exp(2j * np.pi * rng.random(n))


def random_blaschke(rng: np.random.Generator, degree: int, zero_radius: float = 0.9) -> Holomorphic:
    zeros = random_disk_points(rng, degree, zero_radius)
    return blaschke(zeros, np.exp(2j * np.pi * rng.random()))


def random_shear(rng: np.random.Generator) -> HarmonicMap:
    """``h = z + a2 z^2 + ... `` (degree <= 4, ``sum k|a_k| < 1``) with Blaschke dilatation of degree 1 or 2."""
    deg = int(rng.integers(2, 5))
    raw = rng.normal(size=deg - 1) + 1j * rng.normal(size=deg - 1)
    ks = np.arange(2, deg + 1)
    budget = 0.9 * rng.random()
    scale = budget / max(np.sum(ks * np.abs(raw)), 1e-300)
    h = Polynomial([0, 1, *(raw * scale)])
    omega = random_blaschke(rng, int(rng.integers(1, 3)))
    return from_h_omega(h, omega)


def _children(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def lemma_suite(seed: int, products: int = 20, points: int = 500, r_max: float = 0.999) -> dict:
    """Max lemma gap over random Blaschke products of degree 1..4, plus the equality cases."""
    worst = -np.inf
    for i, rng in enumerate(_children(seed, products)):
        omega = random_blaschke(rng, 1 + i % 4)
        worst = max(worst, float(np.max(lemma_gap(omega, random_disk_points(rng, points, r_max)))))
    ident = Polynomial([0, 1])
    eq_identity = float(np.max(np.abs(lemma_gap(ident, random_disk_points(_children(seed + 1, 1)[0], points, r_max)))))
    eq_square = float(lemma_gap(Polynomial([0, 0, 1]), 0j))
    return {
        "suite": "lemma",
        "seed": seed,
        "max_gap": worst,
        "identity_gap": eq_identity,
        "square_gap_at_0": eq_square,
    }


def identity_suite(seed: int, shears: int = 10, points: int = 1000, r_max: float = 0.9) -> dict:
    worst = 0.0
    for rng in _children(seed, shears):
        f = random_shear(rng)
        zs = random_disk_points(rng, points, r_max)
        worst = max(worst, float(np.max(sh_decomposition_residual(f, zs))))
    return {"suite": "identity", "seed": seed, "max_residual": worst}


def affine_suite(seed: int, samples: int = 1000, r_max: float = 0.9) -> dict:
    ws = wd = 0.0
    for rng in _children(seed, samples):
        f = random_shear(rng)
        a = complex(random_disk_points(rng, 1, 0.95)[0])
        z = complex(random_disk_points(rng, 1, r_max)[0])
        s, d = affine_invariance_residuals(f, a, z)
        ws, wd = max(ws, s), max(wd, d)
    return {"suite": "affine", "seed": seed, "max_schwarzian_residual": ws, "max_omega_star_residual": wd}
