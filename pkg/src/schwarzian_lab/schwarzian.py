"""Pre-Schwarzian and Schwarzian operators, hyperbolic quantities, and the
hyperbolically weighted supremum estimator.

All operators accept a scalar ``z`` or a numpy array of points.  Array input
raises on the first offending point; :func:`evaluate_on_points` wraps that
with a pointwise fallback so grid scans can skip and report bad samples.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError, SchwarzianLabError, SensePreservationError, SingularEvaluationError
from .jets import ComplexJet3
from .maps import HarmonicMap, Holomorphic, complement_abs2, one_minus_abs2

log = logging.getLogger(__name__)

GENERIC_RADIUS_CAP = 1 - 1e-6


def _unwrap(z, out):
    if np.ndim(z) == 0 and not isinstance(z, np.ndarray):
        return complex(out) if np.iscomplexobj(out) else float(out)
    return out


def _check_disk(z):
    if np.any(np.abs(np.asarray(z)) >= 1):
        raise DomainError("point outside the open unit disk")


def hyperbolic_density(z):
    """Poincare density ``1/(1-|z|^2)`` of the unit disk."""
    _check_disk(z)
    return _unwrap(z, 1 / one_minus_abs2(z))


# holomorphic operators -----------------------------------------------------


def pre_schwarzian(j: ComplexJet3):
    if np.any(j.d1 == 0):
        raise SingularEvaluationError("f' vanishes: not locally univalent")
    return j.d2 / j.d1


def schwarzian(j: ComplexJet3):
    if np.any(j.d1 == 0):
        raise SingularEvaluationError("f' vanishes: not locally univalent")
    p = j.d2 / j.d1
    return j.d3 / j.d1 - 1.5 * p**2


def _slope_jet(ev: Holomorphic, z) -> ComplexJet3:
    """Jet of ``ev'``; its entries are ``(f', f'', f''', f'''')``."""
    dj = ev.derivative().jet(z)
    if np.any(dj.d0 == 0):
        raise SingularEvaluationError("f' vanishes: not locally univalent")
    return dj


def _pre_and_schwarzian_from_slope(dj: ComplexJet3):
    p = dj.d1 / dj.d0
    return p, dj.d2 / dj.d0 - 1.5 * p**2


# harmonic operators --------------------------------------------------------


@dataclass
class _Local:
    """Jets and dilatation data shared by the harmonic operators at ``z``."""

    z: object
    ph: object
    sh: object
    w: object
    w1: object
    w2: object
    one_minus_w2: object


def _local(f: HarmonicMap, z) -> _Local:
    _check_disk(z)
    ph, sh = _pre_and_schwarzian_from_slope(_slope_jet(f.h, z))
    omega = f.dilatation
    wj = omega.jet(z)
    one_minus_w2 = complement_abs2(omega, z, wj.d0)
    if np.any(one_minus_w2 <= 0):
        raise SensePreservationError("dilatation has modulus >= 1")
    return _Local(z, ph, sh, wj.d0, wj.d1, wj.d2, one_minus_w2)


def harmonic_pre_schwarzian(f: HarmonicMap, z):
    """``P_f = Ph - conj(w) w' / (1 - |w|^2)``."""
    L = _local(f, z)
    return _unwrap(z, L.ph - np.conj(L.w) * L.w1 / L.one_minus_w2)


def _harmonic_schwarzian(L: _Local):
    q = np.conj(L.w) / L.one_minus_w2
    return L.sh + q * (L.ph * L.w1 - L.w2) - 1.5 * (L.w1 * q) ** 2


def harmonic_schwarzian(f: HarmonicMap, z):
    """``S_f = Sh + conj(w)/(1-|w|^2) (Ph w' - w'') - 3/2 (w' conj(w)/(1-|w|^2))^2``."""
    return _unwrap(z, _harmonic_schwarzian(_local(f, z)))


def omega_star(omega: Holomorphic, z):
    """Hyperbolic derivative ``(1-|z|^2) w'(z) / (1-|w(z)|^2)``."""
    _check_disk(z)
    wj = omega.jet(z)
    den = complement_abs2(omega, z, wj.d0)
    if np.any(den <= 0):
        raise SensePreservationError("dilatation has modulus >= 1")
    return _unwrap(z, one_minus_abs2(z) * wj.d1 / den)


def harmonic_order(f: HarmonicMap, z):
    """``A_f = (1-|z|^2) P_f / 2 - conj(z)``."""
    p = harmonic_pre_schwarzian(f, z)
    za = np.asarray(z)
    return _unwrap(z, 0.5 * one_minus_abs2(za) * p - np.conj(za))


def s_f_alpha_closed_form(alpha: float, z):
    _check_disk(z)
    z = np.asarray(z, dtype=complex)
    zb = np.conj(z)
    d = one_minus_abs2(z)
    out = (
        (1 - alpha**2) / (2 * (1 - z) ** 2)
        + (1 - alpha) * zb / (d * (1 - z))
        - 3 * zb**2 / (2 * d**2)
    )
    return _unwrap(z if z.ndim else complex(z), out)


def _weighted_f_alpha(alpha: float, z):
    # (1-|z|^2)^2 S_{f_alpha} with the powers of (1-|z|^2) cancelled by hand
    z = np.asarray(z, dtype=complex)
    zb = np.conj(z)
    d = one_minus_abs2(z)
    s = (1 - alpha**2) * d**2 / (2 * (1 - z) ** 2) + (1 - alpha) * zb * d / (1 - z) - 1.5 * zb**2
    return np.abs(s)


def weighted_schwarzian(f: HarmonicMap, z):
    """``(1-|z|^2)^2 |S_f(z)|``, the integrand of the Schwarzian norm."""
    _check_disk(z)
    if f.family is not None and f.family[0] == "f_alpha":
        return _unwrap(z, _weighted_f_alpha(f.family[1], z))
    s = harmonic_schwarzian(f, z)
    return _unwrap(z, one_minus_abs2(z) ** 2 * np.abs(s))


def norm_bound_f_alpha(alpha: float) -> float:
    """Upper bound ``2(a^2-1) + 2(a-1) + 3/2`` for the Schwarzian norm of ``f_alpha``."""
    if alpha < 1:
        raise DomainError("the bound is stated for alpha >= 1")
    return 2 * (alpha**2 - 1) + 2 * (alpha - 1) + 1.5


# sampling grids ------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Polar sampling grid: origin, radii ``1 - 2**-k`` below ``r_max``, then ``r_max``.

    Level ``k`` carries ``angular_base * round(2**(k/2))`` equispaced angles
    starting at 0, so doubling ``angular_base`` gives a grid containing the old one.
    """

    levels: int = 14
    r_max: float = 1 - 1e-4
    angular_base: int = 64

    def __post_init__(self):
        if not 0 < self.r_max < 1:
            raise DomainError("r_max must lie in (0, 1)")
        if self.levels < 1 or self.angular_base < 1:
            raise DomainError("grid needs at least one level and one angle")

    def level_table(self) -> list[tuple[float, int]]:
        rows = []
        for k in range(1, self.levels + 1):
            r = 1 - 2.0**-k
            if r < self.r_max:
                rows.append((r, self._count(k)))
        k_top = max(1, math.ceil(-math.log2(1 - self.r_max)))
        rows.append((self.r_max, self._count(k_top)))
        return rows

    def _count(self, k: int) -> int:
        return self.angular_base * round(2 ** (k / 2))

    def points(self) -> np.ndarray:
        pts = [np.zeros(1, dtype=complex)]
        for r, n in self.level_table():
            pts.append(r * np.exp(2j * np.pi * np.arange(n) / n))
        return np.concatenate(pts)

    def refined(self) -> "GridSpec":
        return replace(self, levels=self.levels + 1, angular_base=2 * self.angular_base)

    def capped(self, r_cap: float) -> "GridSpec":
        return self if self.r_max <= r_cap else replace(self, r_max=r_cap)

    def to_dict(self) -> dict:
        return asdict(self)


# grid evaluation -----------------------------------------------------------


def worker_count() -> int:
    raw = os.environ.get("SCHWARZIAN_LAB_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


_CHUNK = 4096


def evaluate_on_points(fn: Callable, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate a vectorized real-valued ``fn`` on ``points``.

    Returns ``(values, failed)``; failed entries hold NaN.  A chunk that raises
    is re-evaluated point by point so one bad sample does not poison the rest.
    Results are assembled in input order regardless of worker scheduling.
    """

    def run(chunk):
        try:
            with np.errstate(all="ignore"):
                vals = np.asarray(fn(chunk), dtype=float)
        except SchwarzianLabError:
            vals = np.empty(chunk.shape)
            for i, z in enumerate(chunk):
                try:
                    with np.errstate(all="ignore"):
                        vals[i] = float(fn(np.array([z]))[0])
                except SchwarzianLabError:
                    vals[i] = np.nan
        return vals

    chunks = [points[i : i + _CHUNK] for i in range(0, len(points), _CHUNK)]
    workers = min(worker_count(), len(chunks)) or 1
    if workers == 1:
        parts = [run(c) for c in chunks]
    else:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, chunks))
    values = np.concatenate(parts) if parts else np.empty(0)
    failed = ~np.isfinite(values)
    values[failed] = np.nan
    return values, failed


# norm estimation -----------------------------------------------------------


@dataclass
class NormEstimate:
    lower_bound: float
    witness_point: complex
    grid_spec: GridSpec
    refinement_history: list = field(default_factory=list)
    extrapolated: float | None = None
    skipped_points: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "lower_bound": self.lower_bound,
            "witness": [self.witness_point.real, self.witness_point.imag],
            "grid": self.grid_spec.to_dict(),
            "history": [
                {"stage": stage, "grid": g.to_dict(), "lower_bound": b}
                for stage, g, b in self.refinement_history
            ],
            "extrapolated": self.extrapolated,
            "certified": "lower_bound",
            "skipped": [[z.real, z.imag] for z in self.skipped_points],
        }


def _weighted_fn(f: HarmonicMap):
    return lambda zs: weighted_schwarzian(f, zs)


def _polish(fn, z0: complex, r_max: float, scale: float) -> tuple[float, complex]:
    """Local maximization of ``fn`` inside ``|z| <= r_max`` starting from ``z0``."""

    def objective(xy):
        z = complex(xy[0], xy[1])
        if abs(z) > r_max:
            return np.inf
        try:
            with np.errstate(all="ignore"):
                v = float(fn(np.array([z]))[0])
        except SchwarzianLabError:
            return np.inf
        return -v if np.isfinite(v) else np.inf

    x0 = np.array([z0.real, z0.imag])
    simplex = np.array([x0, x0 + [scale, 0], x0 + [0, scale]])
    with np.errstate(invalid="ignore"):
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"initial_simplex": simplex, "xatol": 1e-12, "fatol": 1e-15, "maxiter": 2000},
        )
    if not np.isfinite(res.fun):
        return -np.inf, z0
    return -float(res.fun), complex(res.x[0], res.x[1])


def _aitken(values: list[float]) -> float | None:
    if len(values) < 3:
        return None
    a, b, c = values[-3:]
    den = (c - b) - (b - a)
    if den == 0 or not np.isfinite(den):
        return None
    return c - (c - b) ** 2 / den


def schwarzian_norm_estimate(
    f: HarmonicMap, grid: GridSpec | None = None, refinements: int = 0, polish: bool = True
) -> NormEstimate:
    """Certified lower bound for ``sup (1-|z|^2)^2 |S_f(z)|`` over the disk.

    The grid maximum (first maximizer in scan order) is optionally improved by
    a local Nelder-Mead search; each refinement doubles the angular density.
    """
    grid = grid or GridSpec()
    closed_form = f.family is not None and f.family[0] == "f_alpha"
    if not closed_form:
        grid = grid.capped(GENERIC_RADIUS_CAP)
    fn = _weighted_fn(f)

    best, witness = -np.inf, 0j
    history = []
    grid_values = []
    skipped: list[complex] = []
    spec = grid
    for stage in range(refinements + 1):
        if stage:
            spec = spec.refined()
        pts = spec.points()
        vals, failed = evaluate_on_points(fn, pts)
        if failed.any():
            bad = [complex(z) for z in pts[failed]]
            log.warning("skipped %d grid points where evaluation failed", len(bad))
            skipped.extend(z for z in bad if z not in skipped)
        masked = np.where(failed, -np.inf, vals)
        i = int(np.argmax(masked))
        if masked[i] > best:
            best, witness = float(masked[i]), complex(pts[i])
        history.append(("grid", spec, best))
        grid_values.append(best)

    if not np.isfinite(best):
        raise SingularEvaluationError("weighted Schwarzian could not be evaluated at any grid point")

    if polish:
        r_max = spec.r_max
        scale = min(0.05, max(1e-6, 0.25 * (1 - abs(witness))))
        v, z = _polish(fn, witness, r_max, scale)
        if v > best:
            best, witness = v, z
        history.append(("polish", spec, best))

    return NormEstimate(
        lower_bound=best,
        witness_point=witness,
        grid_spec=spec,
        refinement_history=history,
        extrapolated=_aitken(grid_values),
        skipped_points=skipped,
    )
