"""Geometric diagnostics: local univalence, collision scans, boundary curves,
self-intersections, cusps and SVG rendering of boundary images."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import least_squares, minimize_scalar

from .errors import DomainError
from .maps import HarmonicMap

log = logging.getLogger(__name__)

SCAN_RADIUS = 1 - 1e-3
IMAGE_GAP_MAX = 1e-10


def jacobian(f: HarmonicMap, z):
    """``|h'|^2 - |g'|^2``; positive exactly where ``f`` is sense-preserving."""
    z_arr = np.asarray(z, dtype=complex)
    if np.any(np.abs(z_arr) >= 1):
        raise DomainError("point outside the open unit disk")
    out = np.abs(f.h.derivative()(z_arr)) ** 2 - np.abs(f.g.derivative()(z_arr)) ** 2
    return float(out) if np.ndim(z) == 0 else out


# injectivity scan -----------------------------------------------------------


@dataclass
class CollisionWitness:
    z1: complex
    z2: complex
    image_gap: float
    preimage_gap: float

    def to_dict(self) -> dict:
        return {
            "z1": [self.z1.real, self.z1.imag],
            "z2": [self.z2.real, self.z2.imag],
            "image_gap": self.image_gap,
            "preimage_gap": self.preimage_gap,
        }


@dataclass
class InjectivityReport:
    verdict: str  # no_collision_at_resolution | collision_found | inconclusive
    witness: CollisionWitness | None
    resolution: int
    delta: float
    candidates: int = 0

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "resolution": self.resolution,
            "delta": self.delta,
            "candidates": self.candidates,
        }


def _polar_grid(resolution: int, r_outer: float) -> np.ndarray:
    r = r_outer * np.arange(1, resolution + 1) / resolution
    t = 2 * np.pi * np.arange(resolution) / resolution
    return (r[:, None] * np.exp(1j * t)[None, :]).ravel()


def _cell_groups(keys: np.ndarray):
    order = np.argsort(keys, kind="stable")
    uniq, starts, counts = np.unique(keys[order], return_index=True, return_counts=True)
    return order, dict(zip(uniq.tolist(), zip(starts.tolist(), counts.tolist())))


def _collision_candidates(z: np.ndarray, w: np.ndarray, resolution: int, delta: float) -> np.ndarray:
    """Pairs ``(i, j)``, ``i < j``, whose images share or neighbour a hash cell
    while their preimages are at least ``delta`` apart.  Each point keeps only
    its image-nearest such partner."""
    x, y = w.real, w.imag
    x0, y0 = x.min(), y.min()
    diameter = max(x.max() - x0, y.max() - y0)
    side = diameter / resolution if diameter > 0 else 1.0
    ix = np.floor((x - x0) / side).astype(np.int64)
    iy = np.floor((y - y0) / side).astype(np.int64)
    stride = int(iy.max()) + 3
    keys = (ix + 1) * stride + (iy + 1)
    order, cells = _cell_groups(keys)
    offsets = [dx * stride + dy for dx in (-1, 0, 1) for dy in (-1, 0, 1)]

    pairs = []
    for key in sorted(cells):
        s, c = cells[key]
        mine = order[s : s + c]
        around = [order[cells[key + o][0] : cells[key + o][0] + cells[key + o][1]] for o in offsets if key + o in cells]
        nb = np.concatenate(around)
        far = np.abs(z[mine][:, None] - z[nb][None, :]) >= delta
        if not far.any():
            continue
        dist = np.where(far, np.abs(w[mine][:, None] - w[nb][None, :]), np.inf)
        best = np.argmin(dist, axis=1)
        ok = np.isfinite(dist[np.arange(len(mine)), best])
        a, b = mine[ok], nb[best[ok]]
        pairs.append(np.stack([np.minimum(a, b), np.maximum(a, b)], axis=1))
    if not pairs:
        return np.empty((0, 2), dtype=np.int64)
    return np.unique(np.concatenate(pairs), axis=0)


def _newton_partner(f: HarmonicMap, z1: np.ndarray, z2: np.ndarray, iters: int = 60):
    """Damped Newton on ``f(z2) = f(z1)`` with ``z1`` frozen, vectorized over candidates.

    Returns the final ``z2`` and a mask of candidates whose real Jacobian was
    singular at some step.
    """
    hp, gp = f.h.derivative(), f.g.derivative()
    target = f.h(z1) + np.conj(f.g(z1))

    def resid(z, tgt):
        return f.h(z) + np.conj(f.g(z)) - tgt

    z2 = z2.copy()
    r = resid(z2, target)
    singular = np.zeros(z2.shape, dtype=bool)
    active = np.ones(z2.shape, dtype=bool)
    for _ in range(iters):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        zz, rr, tg = z2[idx], r[idx], target[idx]
        A, B = hp(zz), np.conj(gp(zz))
        J = np.abs(A) ** 2 - np.abs(B) ** 2
        sing = np.abs(J) < 1e-14 * np.maximum(np.abs(A) ** 2, 1e-300)
        singular[idx[sing]] = True
        with np.errstate(all="ignore"):
            step = (-rr * np.conj(A) + B * np.conj(rr)) / J
        step[sing] = 0
        t = np.ones(idx.size)
        accepted = np.zeros(idx.size, dtype=bool)
        new_z, new_r = zz.copy(), rr.copy()
        for _ in range(30):
            todo = ~accepted
            if not todo.any():
                break
            cand = zz[todo] + t[todo] * step[todo]
            inside = np.abs(cand) < 1
            cr = np.full(cand.shape, np.inf, dtype=complex)
            if inside.any():
                cr[inside] = resid(cand[inside], tg[todo][inside])
            good = inside & (np.abs(cr) < np.abs(rr[todo]))
            sub = np.flatnonzero(todo)
            new_z[sub[good]], new_r[sub[good]] = cand[good], cr[good]
            accepted[sub[good]] = True
            t[todo] *= 0.5
        z2[idx], r[idx] = new_z, new_r
        done = (~accepted) | (np.abs(new_r) < 1e-15 * np.maximum(1.0, np.abs(target[idx]))) | sing
        active[idx[done]] = False
    return z2, singular


def _least_squares_pair(f: HarmonicMap, z1: complex, z2: complex, delta: float) -> tuple[complex, complex]:
    def residuals(v):
        a, b = complex(v[0], v[1]), complex(v[2], v[3])
        d = complex(f.h(a) + np.conj(f.g(a)) - f.h(b) - np.conj(f.g(b)))
        penalty = max(0.0, delta - abs(a - b))
        return [d.real, d.imag, penalty]

    x0 = [z1.real, z1.imag, z2.real, z2.imag]
    lim = SCAN_RADIUS
    res = least_squares(residuals, x0, bounds=([-lim] * 4, [lim] * 4), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return complex(res.x[0], res.x[1]), complex(res.x[2], res.x[3])


def verify_witness(f: HarmonicMap, z1: complex, z2: complex, delta: float) -> CollisionWitness | None:
    """Independent re-check of a collision: both points in the disk, far apart, same image."""
    if not (abs(z1) < 1 and abs(z2) < 1):
        return None
    image_gap = abs(f(z1) - f(z2))
    preimage_gap = abs(z1 - z2)
    if image_gap < IMAGE_GAP_MAX and preimage_gap >= delta:
        return CollisionWitness(complex(z1), complex(z2), float(image_gap), float(preimage_gap))
    return None


def injectivity_scan(f: HarmonicMap, resolution: int = 400, delta: float = 0.05, fallback_limit: int = 64) -> InjectivityReport:
    """Search for ``z1 != z2`` with ``f(z1) = f(z2)``.

    Can certify non-injectivity with a witness, never injectivity.
    """
    if resolution < 32:
        raise DomainError("resolution must be at least 32")
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    z = _polar_grid(resolution, SCAN_RADIUS)
    with np.errstate(all="ignore"):
        w = f.h(z) + np.conj(f.g(z))
    if not np.all(np.isfinite(w)):
        return InjectivityReport("inconclusive", None, resolution, delta)

    pairs = _collision_candidates(z, w, resolution, delta)
    report = InjectivityReport("no_collision_at_resolution", None, resolution, delta, len(pairs))
    if len(pairs) == 0:
        return report
    z1, z2 = z[pairs[:, 0]], z[pairs[:, 1]]
    with np.errstate(all="ignore"):
        z2_new, singular = _newton_partner(f, z1, z2)
    with np.errstate(all="ignore"):
        gaps = np.abs(f.h(z1) + np.conj(f.g(z1)) - f.h(z2_new) - np.conj(f.g(z2_new)))
    hopeful = (gaps < IMAGE_GAP_MAX) & (np.abs(z1 - z2_new) >= delta) & (np.abs(z2_new) < 1)
    for k in np.flatnonzero(hopeful):
        wit = verify_witness(f, z1[k], z2_new[k], delta)
        if wit is not None:
            report.verdict, report.witness = "collision_found", wit
            return report
    # frozen-z1 system singular: joint least squares with a separation penalty
    for k in np.flatnonzero(singular)[:fallback_limit]:
        a, b = _least_squares_pair(f, complex(z1[k]), complex(z2[k]), delta)
        wit = verify_witness(f, a, b, delta)
        if wit is not None:
            report.verdict, report.witness = "collision_found", wit
            return report
    return report


# boundary curves ------------------------------------------------------------


@dataclass
class BoundaryCurve:
    theta: np.ndarray
    points: np.ndarray
    closed: bool = True
    source: Callable | None = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.theta) < 3:
            raise DomainError("a boundary curve needs at least 3 samples")
        if np.any(np.diff(self.theta) <= 0):
            raise DomainError("curve parameters must be strictly increasing")


def boundary_curve(f: HarmonicMap, n: int = 4096) -> BoundaryCurve:
    """Samples ``f(exp(i theta))`` at ``n`` equispaced angles starting at 0."""
    if not f.closed_disk:
        raise DomainError("map is not known to extend continuously to the closed disk")
    if n < 64:
        raise DomainError("need at least 64 boundary samples")

    def source(theta):
        u = np.exp(1j * np.asarray(theta, dtype=float))
        return f.h(u) + np.conj(f.g(u))

    theta = 2 * np.pi * np.arange(n) / n
    return BoundaryCurve(theta, source(theta), True, source)


def unit_circle(n: int = 4096) -> BoundaryCurve:
    theta = 2 * np.pi * np.arange(n) / n
    return BoundaryCurve(theta, np.exp(1j * theta), True, lambda t: np.exp(1j * np.asarray(t)))


# self-intersections -----------------------------------------------------------


@dataclass
class Crossing:
    i: int
    j: int
    point: complex


@dataclass
class SelfIntersections:
    crossings: list
    overlaps: list

    def __len__(self):
        return len(self.crossings)

    def __iter__(self):
        return iter(self.crossings)

    def points(self) -> np.ndarray:
        return np.array([c.point for c in self.crossings], dtype=complex)


def _orient(a, b, c):
    return (b.real - a.real) * (c.imag - a.imag) - (b.imag - a.imag) * (c.real - a.real)


def _orient_exact(a: complex, b: complex, c: complex) -> int:
    ax, ay, bx, by, cx, cy = (Fraction(v) for v in (a.real, a.imag, b.real, b.imag, c.real, c.imag))
    d = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (d > 0) - (d < 0)


def _orient_sign(a, b, c) -> np.ndarray:
    """Sign of the orientation determinant.

    Float result is trusted when it exceeds a forward error bound; the rest
    are redone in exact rational arithmetic.
    """
    left = (b.real - a.real) * (c.imag - a.imag)
    right = (b.imag - a.imag) * (c.real - a.real)
    det = left - right
    bound = 4 * np.finfo(float).eps * (np.abs(left) + np.abs(right))
    sign = np.sign(det).astype(int)
    for k in np.flatnonzero(np.abs(det) <= bound):
        sign[k] = _orient_exact(complex(a[k]), complex(b[k]), complex(c[k]))
    return sign


def _hash_segment_pairs(p: np.ndarray, q: np.ndarray, cell: float) -> np.ndarray:
    lo_x = np.floor(np.minimum(p.real, q.real) / cell).astype(np.int64)
    hi_x = np.floor(np.maximum(p.real, q.real) / cell).astype(np.int64)
    lo_y = np.floor(np.minimum(p.imag, q.imag) / cell).astype(np.int64)
    hi_y = np.floor(np.maximum(p.imag, q.imag) / cell).astype(np.int64)
    segs, cx, cy = [], [], []
    span = int(max((hi_x - lo_x).max(), (hi_y - lo_y).max()))
    for dx in range(span + 1):
        for dy in range(span + 1):
            m = (lo_x + dx <= hi_x) & (lo_y + dy <= hi_y)
            idx = np.flatnonzero(m)
            segs.append(idx)
            cx.append(lo_x[idx] + dx)
            cy.append(lo_y[idx] + dy)
    segs, cx, cy = np.concatenate(segs), np.concatenate(cx), np.concatenate(cy)
    order = np.lexsort((segs, cy, cx))
    segs, cx, cy = segs[order], cx[order], cy[order]
    out = []
    d = 1
    while d < len(segs):
        same = (cx[d:] == cx[:-d]) & (cy[d:] == cy[:-d])
        if not same.any():
            break
        out.append(np.stack([segs[:-d][same], segs[d:][same]], axis=1))
        d += 1
    if not out:
        return np.empty((0, 2), dtype=np.int64)
    pairs = np.concatenate(out)
    pairs = np.stack([pairs.min(axis=1), pairs.max(axis=1)], axis=1)
    return np.unique(pairs, axis=0)


def _segment_point(a, b, c, d) -> complex:
    r, s = b - a, d - c
    den = r.real * s.imag - r.imag * s.real
    if den == 0:
        return (a + b + c + d) / 4
    t = ((c - a).real * s.imag - (c - a).imag * s.real) / den
    return a + t * r


def _segments_cross(a, b, c, d) -> bool:
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    return o1 * o2 <= 0 and o3 * o4 <= 0 and not (o1 == o2 == o3 == o4 == 0)


def _refine_crossing(source, ti: tuple, tj: tuple, steps: int = 48) -> complex:
    """Bisect both parameter intervals, keeping a pair of halves whose chords still cross."""
    (a0, a1), (b0, b1) = ti, tj
    pa = source(np.array([a0, a1]))
    pb = source(np.array([b0, b1]))
    for _ in range(steps):
        am, bm = 0.5 * (a0 + a1), 0.5 * (b0 + b1)
        if am in (a0, a1) or bm in (b0, b1):
            break
        va, vb = source(np.array([am, bm]))
        halves_a = [((a0, am), (pa[0], va)), ((am, a1), (va, pa[1]))]
        halves_b = [((b0, bm), (pb[0], vb)), ((bm, b1), (vb, pb[1]))]
        for (ia, sa), (ib, sb) in ((x, y) for x in halves_a for y in halves_b):
            if _segments_cross(sa[0], sa[1], sb[0], sb[1]):
                (a0, a1), pa = ia, np.array(sa)
                (b0, b1), pb = ib, np.array(sb)
                break
        else:
            break
    return complex(_segment_point(pa[0], pa[1], pb[0], pb[1]))


def self_intersections(curve: BoundaryCurve, merge_tol: float = 1e-9) -> SelfIntersections:
    """Crossings between non-adjacent chords of the closed polyline.

    Candidate pairs come from a uniform spatial hash; crossings are decided by
    orientation signs and, when the curve has a parametrization, refined by
    bisection on both parameter intervals.
    """
    p = curve.points
    n = len(p)
    q = np.roll(p, -1)
    theta_end = np.append(curve.theta[1:], curve.theta[0] + 2 * np.pi)
    lengths = np.abs(q - p)
    cell = max(2 * float(np.median(lengths)), 1e-12)
    pairs = _hash_segment_pairs(p, q, cell)
    if len(pairs):
        gap = (pairs[:, 1] - pairs[:, 0]) % n
        pairs = pairs[(gap > 1) & (gap < n - 1)]
    if len(pairs) == 0:
        return SelfIntersections([], [])
    i, j = pairs[:, 0], pairs[:, 1]
    a, b, c, d = p[i], q[i], p[j], q[j]
    o1, o2 = _orient_sign(a, b, c), _orient_sign(a, b, d)
    o3, o4 = _orient_sign(c, d, a), _orient_sign(c, d, b)
    collinear = (o1 == 0) & (o2 == 0)
    hit = (o1 * o2 <= 0) & (o3 * o4 <= 0) & ~collinear

    overlaps = []
    for k in np.flatnonzero(collinear):
        lo_i, hi_i = sorted([a[k].real, b[k].real]) if a[k].real != b[k].real else sorted([a[k].imag, b[k].imag])
        axis = (lambda v: v.real) if a[k].real != b[k].real else (lambda v: v.imag)
        lo_j, hi_j = sorted([axis(c[k]), axis(d[k])])
        if min(hi_i, hi_j) >= max(lo_i, lo_j):
            overlaps.append((int(i[k]), int(j[k])))

    crossings: list[Crossing] = []
    for k in np.flatnonzero(hit):
        ii, jj = int(i[k]), int(j[k])
        if curve.source is not None:
            pt = _refine_crossing(
                curve.source, (curve.theta[ii], theta_end[ii]), (curve.theta[jj], theta_end[jj])
            )
        else:
            pt = complex(_segment_point(a[k], b[k], c[k], d[k]))
        if any(abs(pt - cr.point) < merge_tol for cr in crossings):
            continue
        crossings.append(Crossing(ii, jj, pt))
    return SelfIntersections(crossings, overlaps)


# cusps ----------------------------------------------------------------------


def boundary_speed(f: HarmonicMap, theta) -> np.ndarray:
    """``|d/dtheta f(e^{i theta})| = |z h'(z) - conj(z g'(z))|`` on the unit circle."""
    u = np.exp(1j * np.asarray(theta, dtype=float))
    with np.errstate(all="ignore"):
        return np.abs(u * f.h.derivative()(u) - np.conj(u * f.g.derivative()(u)))


def cusp_candidates(f: HarmonicMap, n: int = 4096, tol: float = 1e-6) -> list[float]:
    """Angles where the boundary speed vanishes (to ``tol``), refined by golden-section search."""
    if not f.closed_disk:
        raise DomainError("map is not known to extend continuously to the closed disk")
    if n < 256:
        raise DomainError("need at least 256 boundary samples")
    theta = 2 * np.pi * np.arange(n) / n
    step = 2 * np.pi / n
    s = boundary_speed(f, theta)
    prev, nxt = np.roll(s, 1), np.roll(s, -1)
    minima = np.flatnonzero((s <= prev) & (s <= nxt) & ~((s == prev) & (s == nxt)))
    found = []
    speed = lambda t: float(boundary_speed(f, t))  # noqa: E731
    for k in minima:
        t0, v0 = theta[k], s[k]
        try:
            res = minimize_scalar(
                speed, bracket=(t0 - step, t0, t0 + step), method="golden", options={"xtol": 1e-12}
            )
            if res.fun < v0:
                t0, v0 = float(res.x), float(res.fun)
        except ValueError:
            pass
        if v0 < tol:
            found.append(float(np.mod(t0, 2 * np.pi)))
    found.sort()
    merged: list[float] = []
    for t in found:
        if not merged or t - merged[-1] > 2 * step:
            merged.append(t)
    if len(merged) > 1 and merged[0] + 2 * np.pi - merged[-1] <= 2 * step:
        merged.pop()
    return merged


# SVG rendering --------------------------------------------------------------


def _fmt(v: float) -> str:
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


def render_svg(
    curves: Sequence[BoundaryCurve],
    crossings: Sequence[complex] = (),
    cusps: Sequence[complex] = (),
    size: int = 512,
    stroke: str = "#1f3b73",
) -> str:
    """Standalone SVG 1.1 document with equal-aspect viewBox and a 5% margin."""
    if not curves:
        raise DomainError("nothing to render")
    pts = np.concatenate([c.points for c in curves])
    xmin, xmax = pts.real.min(), pts.real.max()
    ymin, ymax = pts.imag.min(), pts.imag.max()
    cx, cy = 0.5 * (xmin + xmax), 0.5 * (ymin + ymax)
    half = 0.5 * max(xmax - xmin, ymax - ymin) or 1.0
    half *= 1.05
    # SVG y axis points down
    vb = (cx - half, -cy - half, 2 * half, 2 * half)
    stroke_w = 2 * half / size
    mark = 0.015 * 2 * half

    lines = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="{" ".join(_fmt(v) for v in vb)}">',
    ]
    for c in curves:
        d = " ".join(f"{'M' if k == 0 else 'L'}{_fmt(z.real)} {_fmt(-z.imag)}" for k, z in enumerate(c.points))
        if c.closed:
            d += " Z"
        lines.append(f'<path d="{d}" fill="none" stroke="{stroke}" stroke-width="{_fmt(stroke_w)}"/>')
    for z in crossings:
        lines.append(
            f'<circle class="crossing" cx="{_fmt(z.real)}" cy="{_fmt(-z.imag)}" r="{_fmt(mark)}" '
            f'fill="none" stroke="#c0392b" stroke-width="{_fmt(stroke_w)}"/>'
        )
    for z in cusps:
        x, y = z.real, -z.imag
        lines.append(
            f'<path class="cusp" d="M{_fmt(x - mark)} {_fmt(y - mark)} L{_fmt(x + mark)} {_fmt(y + mark)} '
            f'M{_fmt(x - mark)} {_fmt(y + mark)} L{_fmt(x + mark)} {_fmt(y - mark)}" '
            f'stroke="#27ae60" stroke-width="{_fmt(stroke_w)}"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
