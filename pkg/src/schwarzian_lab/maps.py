"""Holomorphic evaluators, Mobius transforms and harmonic maps on the unit disk.

Evaluators form small expression trees.  Each node knows how to

* evaluate itself on a numpy array (``ev(z)``),
* produce an order-3 jet (``ev.jet(z)``, scalar or array ``z``),
* return its derivative as another evaluator (``ev.derivative()``).

The last point lets the Schwarzian operators work from ``h'`` jets, so maps
built by shearing never need quadrature just to compute ``Sh`` or ``S_f``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import (
    DomainError,
    NumericError,
    SensePreservationError,
    SingularEvaluationError,
    UsageError,
)
from .jets import ComplexJet3, jet_compose, jet_elementary


def _arr(z):
    return np.asarray(z, dtype=complex)


def _unwrap(z, out):
    """Return a Python complex when the input was scalar."""
    if np.ndim(z) == 0 and not isinstance(z, np.ndarray):
        return complex(out)
    return out


class Holomorphic:
    """Base class for evaluators of holomorphic functions."""

    #: True when evaluation extends continuously to the closed disk.
    closed_disk: bool = False

    def __call__(self, z):
        raise NotImplementedError

    def jet(self, z) -> ComplexJet3:
        raise NotImplementedError

    def derivative(self) -> "Holomorphic":
        raise NotImplementedError

    def describe(self) -> dict | None:
        return None

    def compose(self, inner: "Holomorphic") -> "Holomorphic":
        return Composition(self, inner)

    def __add__(self, other):
        return Sum(self, as_evaluator(other))

    def __radd__(self, other):
        return Sum(as_evaluator(other), self)

    def __sub__(self, other):
        return Sum(self, Product(Constant(-1), as_evaluator(other)))

    def __rsub__(self, other):
        return Sum(as_evaluator(other), Product(Constant(-1), self))

    def __neg__(self):
        return Product(Constant(-1), self)

    def __mul__(self, other):
        return Product(self, as_evaluator(other))

    def __rmul__(self, other):
        return Product(as_evaluator(other), self)

    def __truediv__(self, other):
        return Quotient(self, as_evaluator(other))

    def __rtruediv__(self, other):
        return Quotient(as_evaluator(other), self)


def as_evaluator(x) -> Holomorphic:
    if isinstance(x, Holomorphic):
        return x
    return Constant(x)


class Polynomial(Holomorphic):
    """Polynomial with ascending coefficients ``c0 + c1 z + c2 z^2 + ...``."""

    closed_disk = True

    def __init__(self, coeffs: Sequence[complex]):
        c = [complex(a) for a in coeffs] or [0j]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)!r})"

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        z = _arr(z)
        out = np.zeros_like(z)
        for c in reversed(self.coeffs):
            out = out * z + c
        return out

    def _derivative_coeffs(self):
        return [k * c for k, c in enumerate(self.coeffs)][1:]

    def derivative(self):
        return Polynomial(self._derivative_coeffs())

    def jet(self, z):
        p = self
        values = []
        for _ in range(4):
            values.append(_unwrap(z, p(z)))
            p = p.derivative()
        return ComplexJet3(z, *values)

    def describe(self):
        return {"kind": "poly", "coeffs": [_cdump(c) for c in self.coeffs]}


class Constant(Polynomial):
    def __init__(self, value: complex):
        super().__init__([value])

    @property
    def value(self) -> complex:
        return self.coeffs[0]

    def __repr__(self):
        return f"Constant({self.value!r})"

    def describe(self):
        return {"kind": "constant", "value": _cdump(self.value)}


def identity() -> Polynomial:
    return Polynomial([0, 1])


@dataclass(frozen=True)
class MobiusTransform(Holomorphic):
    """``z -> (a z + b) / (c z + d)`` with ``ad - bc != 0``."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.determinant == 0:
            raise DomainError("Mobius transform with vanishing determinant")

    @property
    def determinant(self) -> complex:
        return self.a * self.d - self.b * self.c

    @property
    def pole(self) -> complex | None:
        if self.c == 0:
            return None
        return -self.d / self.c

    @property
    def closed_disk(self) -> bool:
        p = self.pole
        return p is None or abs(p) > 1

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @classmethod
    def from_matrix(cls, m) -> "MobiusTransform":
        return cls(m[0][0], m[0][1], m[1][0], m[1][1])

    def __matmul__(self, other: "MobiusTransform") -> "MobiusTransform":
        """Composition ``self o other``."""
        return MobiusTransform.from_matrix(self.matrix() @ other.matrix())

    def inverse(self) -> "MobiusTransform":
        return MobiusTransform(self.d, -self.b, -self.c, self.a)

    def __call__(self, z):
        z = _arr(z)
        return (self.a * z + self.b) / (self.c * z + self.d)

    def jet(self, z):
        den = self.c * _arr(z) + self.d
        if np.any(den == 0):
            raise SingularEvaluationError("Mobius transform evaluated at its pole")
        det = self.determinant
        w = 1 / den
        return ComplexJet3(
            z,
            _unwrap(z, (self.a * _arr(z) + self.b) * w),
            _unwrap(z, det * w**2),
            _unwrap(z, -2 * self.c * det * w**3),
            _unwrap(z, 6 * self.c**2 * det * w**4),
        )

    def derivative(self):
        return Quotient(Constant(self.determinant), Power(Polynomial([self.d, self.c]), 2))

    def describe(self):
        return {"kind": "mobius", "coeffs": [_cdump(v) for v in (self.a, self.b, self.c, self.d)]}


class Sum(Holomorphic):
    def __init__(self, left: Holomorphic, right: Holomorphic):
        self.left, self.right = left, right
        self.closed_disk = left.closed_disk and right.closed_disk

    def __call__(self, z):
        return self.left(z) + self.right(z)

    def jet(self, z):
        return self.left.jet(z) + self.right.jet(z)

    def derivative(self):
        return Sum(self.left.derivative(), self.right.derivative())


class Product(Holomorphic):
    def __init__(self, left: Holomorphic, right: Holomorphic):
        self.left, self.right = left, right
        self.closed_disk = left.closed_disk and right.closed_disk

    def __call__(self, z):
        return self.left(z) * self.right(z)

    def jet(self, z):
        return self.left.jet(z) * self.right.jet(z)

    def derivative(self):
        if isinstance(self.left, Constant):
            return Product(self.left, self.right.derivative())
        return Sum(
            Product(self.left.derivative(), self.right),
            Product(self.left, self.right.derivative()),
        )


class Quotient(Holomorphic):
    def __init__(self, num: Holomorphic, den: Holomorphic):
        self.num, self.den = num, den
        # continuity on the closed disk is only known when the denominator is a nonzero constant
        self.closed_disk = (
            num.closed_disk and isinstance(den, Constant) and den.value != 0
        )

    def __call__(self, z):
        return self.num(z) / self.den(z)

    def jet(self, z):
        return self.num.jet(z) / self.den.jet(z)

    def derivative(self):
        n, d = self.num, self.den
        top = Sum(Product(n.derivative(), d), Product(Constant(-1), Product(n, d.derivative())))
        return Quotient(top, Power(d, 2))


class Composition(Holomorphic):
    """``outer(inner(z))``."""

    def __init__(self, outer: Holomorphic, inner: Holomorphic):
        self.outer, self.inner = outer, inner
        self.closed_disk = False

    def __call__(self, z):
        return self.outer(self.inner(z))

    def jet(self, z):
        inner = self.inner.jet(z)
        return jet_compose(self.outer.jet(inner.d0), inner)

    def derivative(self):
        return Product(Composition(self.outer.derivative(), self.inner), self.inner.derivative())


class Exp(Holomorphic):
    def __init__(self, inner: Holomorphic):
        self.inner = inner
        self.closed_disk = inner.closed_disk

    def __call__(self, z):
        return np.exp(self.inner(z))

    def jet(self, z):
        return jet_elementary("exp", self.inner.jet(z))

    def derivative(self):
        return Product(self, self.inner.derivative())


class Log(Holomorphic):
    """Principal logarithm of the inner evaluator."""

    def __init__(self, inner: Holomorphic):
        self.inner = inner

    def __call__(self, z):
        return np.log(self.inner(z))

    def jet(self, z):
        return jet_elementary("log", self.inner.jet(z))

    def derivative(self):
        return Quotient(self.inner.derivative(), self.inner)


class Power(Holomorphic):
    """Principal power ``inner(z) ** alpha``; integer exponents >= 0 are entire."""

    def __init__(self, inner: Holomorphic, alpha: float, closed_disk: bool | None = None):
        self.inner = inner
        self.alpha = float(alpha)
        if closed_disk is None:
            closed_disk = inner.closed_disk and self.alpha.is_integer() and self.alpha >= 0
        self.closed_disk = closed_disk

    def __call__(self, z):
        w = self.inner(z)
        if self.alpha.is_integer() and self.alpha >= 0:
            return w ** int(self.alpha)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.exp(self.alpha * np.log(w))
        return np.where(w == 0, 0j if self.alpha > 0 else np.nan, out)

    def jet(self, z):
        return jet_elementary("principal_power", self.inner.jet(z), self.alpha)

    def derivative(self):
        if self.alpha == 0:
            return Constant(0)
        return Product(
            Constant(self.alpha),
            Product(
                Power(self.inner, self.alpha - 1, closed_disk=self.closed_disk and self.alpha >= 1),
                self.inner.derivative(),
            ),
        )


def blaschke(zeros: Sequence[complex], unimodular: complex = 1.0) -> "Blaschke":
    """Finite Blaschke product ``u * prod (z - a_k)/(1 - conj(a_k) z)``."""
    return Blaschke(zeros, unimodular)


class Blaschke(Holomorphic):
    closed_disk = True

    def __init__(self, zeros: Sequence[complex], unimodular: complex = 1.0):
        u = complex(unimodular)
        if not math.isclose(abs(u), 1.0, rel_tol=0, abs_tol=1e-12):
            raise DomainError("Blaschke factor must be unimodular")
        self.zeros = tuple(complex(a) for a in zeros)
        if any(abs(a) >= 1 for a in self.zeros):
            raise DomainError("Blaschke zeros must lie in the open disk")
        self.unimodular = u
        ev: Holomorphic = Constant(u)
        for a in self.zeros:
            ev = Product(ev, MobiusTransform(1, -a, -a.conjugate(), 1))
        self._tree = ev

    def __call__(self, z):
        return self._tree(z)

    def jet(self, z):
        return self._tree.jet(z)

    def derivative(self):
        return self._tree.derivative()

    def complement_abs2(self, z):
        """``1 - |B(z)|^2`` without cancellation: each factor contributes
        ``(1-|a|^2)(1-|z|^2)/|1-conj(a) z|^2`` and ``1 - prod(1 - q_k)`` is
        accumulated as ``s + q (1 - s)``."""
        z = _arr(z)
        d = one_minus_abs2(z)
        s = np.zeros(z.shape)
        for a in self.zeros:
            q = one_minus_abs2(a) * d / np.abs(1 - a.conjugate() * z) ** 2
            s = s + q * (1 - s)
        return s if self.zeros else np.zeros(z.shape)

    def describe(self):
        return {
            "kind": "blaschke",
            "zeros": [_cdump(a) for a in self.zeros],
            "unimodular": _cdump(self.unimodular),
        }


_SPLIT = 134217729.0  # 2**27 + 1


def _two_prod(a, b):
    # Dekker: a*b = p + e exactly
    p = a * b
    c = _SPLIT * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLIT * b
    bh = c - (c - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def one_minus_abs2(z):
    """``1 - |z|^2`` with compensated arithmetic, accurate to a few ulps near the circle."""
    z = _arr(z)
    x, y = z.real, z.imag
    px, ex = _two_prod(x, x)
    py, ey = _two_prod(y, y)
    s, e1 = _two_sum(1.0, -px)
    s, e2 = _two_sum(s, -py)
    return s + ((e1 + e2) - (ex + ey))


def complement_abs2(ev: Holomorphic, z, value=None):
    """``1 - |ev(z)|^2``, exact-complement form when the evaluator provides one."""
    if hasattr(ev, "complement_abs2"):
        return ev.complement_abs2(z)
    return one_minus_abs2(ev(z) if value is None else value)


class _Described(Holomorphic):
    """Wraps an evaluator with a JSON description and an explicit closure flag."""

    def __init__(self, inner: Holomorphic, description: dict | None, closed_disk: bool | None = None):
        self.inner = inner
        self.description = description
        self.closed_disk = inner.closed_disk if closed_disk is None else closed_disk

    def __call__(self, z):
        return self.inner(z)

    def jet(self, z):
        return self.inner.jet(z)

    def derivative(self):
        return self.inner.derivative()

    def describe(self):
        return self.description


def log_ratio() -> Holomorphic:
    """``log((1+z)/(1-z))``; Schwarzian ``2/(1-z^2)^2``."""
    return _Described(Log(Quotient(Polynomial([1, 1]), Polynomial([1, -1]))), {"kind": "log_ratio"})


def koebe() -> Holomorphic:
    """``z/(1-z)^2``; Schwarzian ``-6/(1-z^2)^2``."""
    return _Described(Quotient(identity(), Power(Polynomial([1, -1]), 2)), {"kind": "koebe"})


class Antiderivative(Holomorphic):
    """``base_value + integral of derivative`` along the segment ``[base_point, z]``.

    Composite Gauss-Legendre with panel doubling until successive estimates
    agree to 1e-12 (at most 2**14 panels).
    """

    ORDER = 8
    MAX_PANELS = 2**14
    TOL = 1e-12

    def __init__(self, derivative: Holomorphic, base_point: complex = 0j, base_value: complex = 0j):
        self._derivative = derivative
        self.base_point = complex(base_point)
        self.base_value = complex(base_value)
        self.closed_disk = derivative.closed_disk
        self._nodes, self._weights = np.polynomial.legendre.leggauss(self.ORDER)

    def _integrate(self, z, panels):
        z0 = self.base_point
        dz = z - z0
        edges = np.arange(panels) / panels
        t = (edges[:, None] + (self._nodes[None, :] + 1) / (2 * panels)).ravel()
        w = np.tile(self._weights / (2 * panels), panels)
        pts = z0 + t[None, :] * dz[:, None]
        vals = self._derivative(pts.ravel()).reshape(pts.shape)
        return (vals @ w) * dz

    def __call__(self, z):
        z = _arr(z)
        flat = z.ravel()
        out = np.empty_like(flat)
        todo = np.arange(flat.size)
        panels = 1
        prev = self._integrate(flat, panels)
        while todo.size:
            panels *= 2
            if panels > self.MAX_PANELS:
                bad = flat[todo[0]]
                raise NumericError(f"quadrature did not converge at z={bad!r}")
            cur = self._integrate(flat[todo], panels)
            done = np.abs(cur - prev) < self.TOL * np.maximum(1.0, np.abs(cur))
            out[todo[done]] = cur[done]
            todo, prev = todo[~done], cur[~done]
        return (out + self.base_value).reshape(z.shape)

    def jet(self, z):
        dj = self._derivative.jet(z)
        return ComplexJet3(z, _unwrap(z, self(z)), dj.d0, dj.d1, dj.d2)

    def derivative(self):
        return self._derivative


# ---------------------------------------------------------------------------
# harmonic maps


@dataclass(frozen=True, eq=False)
class HarmonicMap:
    """``f = h + conj(g)``.  ``omega`` overrides the derived dilatation ``g'/h'``."""

    h: Holomorphic
    g: Holomorphic
    omega: Holomorphic | None = None
    family: tuple | None = None
    description: dict | None = field(default=None, repr=False)

    @property
    def dilatation(self) -> Holomorphic:
        if self.omega is not None:
            return self.omega
        return Quotient(self.g.derivative(), self.h.derivative())

    @property
    def closed_disk(self) -> bool:
        return self.h.closed_disk and self.g.closed_disk

    def check_domain(self, z, allow_boundary: bool | None = None):
        if allow_boundary is None:
            allow_boundary = self.closed_disk
        r = np.abs(_arr(z))
        if np.any(r > 1) or (not allow_boundary and np.any(r >= 1)):
            raise DomainError("point outside the domain of the map")

    def __call__(self, z):
        self.check_domain(z)
        return _unwrap(z, self.h(z) + np.conj(self.g(z)))

    def check_sense_preserving(self, z) -> None:
        if np.any(self.h.derivative()(z) == 0):
            raise DomainError("h' vanishes at a queried point")
        if np.any(np.abs(self.dilatation(z)) >= 1):
            raise SensePreservationError("dilatation has modulus >= 1 at a queried point")

    def describe(self) -> dict | None:
        return self.description


def eval_harmonic(f: HarmonicMap, z) -> complex:
    return f(z)


def from_h_omega(h: Holomorphic, omega: Holomorphic, base_value: complex = 0j) -> HarmonicMap:
    """Harmonic map with analytic part ``h`` and dilatation ``omega``; ``g' = omega h'``."""
    g = Antiderivative(Product(omega, h.derivative()), 0j, base_value)
    return HarmonicMap(h, g, omega)


def make_f_alpha(alpha: float) -> HarmonicMap:
    """Harmonic map with ``h = (1-(1-z)^a)/a`` and ``g = (1-(1+az)(1-z)^a)/(a(1+a))``."""
    alpha = float(alpha)
    if not alpha > 0:
        raise DomainError("f_alpha needs alpha > 0")
    one_minus_z = Polynomial([1, -1])
    p = Power(one_minus_z, alpha, closed_disk=True)
    h = (1 - p) / alpha
    g = (1 - Polynomial([1, alpha]) * p) / (alpha * (1 + alpha))
    # exact derivatives: h' = (1-z)^(a-1), g' = z (1-z)^(a-1)
    dp = Power(one_minus_z, alpha - 1, closed_disk=alpha >= 1)
    h = _WithDerivative(h, dp, closed_disk=True)
    g = _WithDerivative(g, Product(identity(), dp), closed_disk=True)
    desc = {"kind": "f_alpha", "alpha": alpha}
    return HarmonicMap(h, g, identity(), family=("f_alpha", alpha), description=desc)


class _WithDerivative(Holomorphic):
    """Evaluator whose derivative is supplied in simplified closed form."""

    def __init__(self, inner: Holomorphic, derivative: Holomorphic, closed_disk: bool):
        self.inner = inner
        self._derivative = derivative
        self.closed_disk = closed_disk

    def __call__(self, z):
        return self.inner(z)

    def jet(self, z):
        return self.inner.jet(z)

    def derivative(self):
        return self._derivative


def _is_zero_constant(ev: Holomorphic) -> bool:
    return isinstance(ev, Constant) and ev.value == 0


def shear(F: Holomorphic, omega: Holomorphic, base_value: complex = 0j) -> HarmonicMap:
    """Shear of ``F`` along the dilatation ``omega``: ``h - g = F``, ``g' = omega h'``."""
    base_value = complex(base_value)
    if isinstance(omega, Constant):
        c = omega.value
        if abs(c) >= 1:
            raise SensePreservationError("constant dilatation must have modulus < 1")
        if c == 0:
            return HarmonicMap(F + base_value if base_value else F, Constant(base_value), omega)
        shift = F - complex(F(0j))
        g = Sum(Product(Constant(c / (1 - c)), shift), Constant(base_value))
        return HarmonicMap(Sum(F, g), g, omega)
    h_prime = Quotient(F.derivative(), 1 - omega)
    g = Antiderivative(Product(omega, h_prime), 0j, base_value)
    h = _WithDerivative(Sum(F, g), h_prime, closed_disk=False)
    return HarmonicMap(h, g, omega)


def harmonic_mobius(M: MobiusTransform, c: complex) -> HarmonicMap:
    c = complex(c)
    if abs(c) >= 1:
        raise DomainError("affine coefficient must satisfy |c| < 1")
    if not M.closed_disk:
        raise DomainError("Mobius pole lies in the closed disk")
    desc = {"kind": "harmonic_mobius", "mobius": M.describe()["coeffs"], "c": _cdump(c)}
    return HarmonicMap(M, Product(Constant(c), M), Constant(c), description=desc)


def affine_transform(f: HarmonicMap, a: complex) -> HarmonicMap:
    """``F = f + a conj(f)``: analytic part ``h + a g``, co-analytic part ``g + conj(a) h``."""
    a = complex(a)
    if abs(a) >= 1:
        raise DomainError("affine parameter must satisfy |a| < 1")
    if a == 0:
        return f
    ab = a.conjugate()
    w = f.dilatation
    h = Sum(f.h, Product(Constant(a), f.g))
    g = Sum(f.g, Product(Constant(ab), f.h))
    omega = Quotient(Sum(w, Constant(ab)), Sum(Constant(1), Product(Constant(a), w)))
    desc = None
    if f.description is not None:
        desc = {"kind": "affine", "base": f.description, "a": _cdump(a)}
    return HarmonicMap(h, g, omega, description=desc)


def holomorphic_map(h: Holomorphic) -> HarmonicMap:
    desc = None if h.describe() is None else {"kind": "holomorphic", "h": h.describe()}
    return HarmonicMap(h, Constant(0), Constant(0), description=desc)


def disk_automorphism(a: complex) -> MobiusTransform:
    """``z -> (a + z)/(1 + conj(a) z)``."""
    a = complex(a)
    if abs(a) >= 1:
        raise DomainError("automorphism parameter must satisfy |a| < 1")
    return MobiusTransform(1, a, a.conjugate(), 1)


def normalizing_automorphism(p: complex) -> MobiusTransform:
    """Automorphism sending ``p`` to 0 and fixing the boundary point 1."""
    p = complex(p)
    if abs(p) >= 1:
        raise DomainError("point must lie in the open disk")
    k = (1 - p.conjugate()) / (1 - p)
    return MobiusTransform(k, -k * p, -p.conjugate(), 1)


def scaling_map(z0: complex, x: float) -> MobiusTransform:
    """``z -> exp(-i arg z0) (x/|z0|) z``: fixes 0 and sends ``z0`` to ``x``."""
    z0 = complex(z0)
    r0 = abs(z0)
    if z0 == 0 or r0 >= 1:
        raise DomainError("z0 must satisfy 0 < |z0| < 1")
    if not 0 < x <= r0:
        raise DomainError("x must lie in (0, |z0|]")
    k = (x / r0) * (z0.conjugate() / r0)
    return MobiusTransform(k, 0, 0, 1)


# ---------------------------------------------------------------------------
# JSON descriptions


def _cdump(c: complex) -> Any:
    c = complex(c)
    if c.imag == 0:
        return c.real
    return [c.real, c.imag]


def _cload(v) -> complex:
    if isinstance(v, bool):
        raise UsageError(f"expected a number, got {v!r}")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in v
    ):
        return complex(v[0], v[1])
    raise UsageError(f"expected a real number or [re, im], got {v!r}")


def _fields(desc: dict, required: set, optional: set = frozenset()) -> None:
    keys = set(desc) - {"kind"}
    missing = required - keys
    unknown = keys - required - set(optional)
    if missing:
        raise UsageError(f"{desc.get('kind')}: missing fields {sorted(missing)}")
    if unknown:
        raise UsageError(f"{desc.get('kind')}: unknown fields {sorted(unknown)}")


def parse_evaluator(desc) -> Holomorphic:
    """Build a holomorphic evaluator from its JSON description.

    A bare list is read as ascending polynomial coefficients.
    """
    if isinstance(desc, list):
        return Polynomial([_cload(c) for c in desc])
    if not isinstance(desc, dict) or "kind" not in desc:
        raise UsageError(f"bad evaluator description {desc!r}")
    kind = desc["kind"]
    if kind == "poly":
        _fields(desc, {"coeffs"})
        return Polynomial([_cload(c) for c in desc["coeffs"]])
    if kind == "constant":
        _fields(desc, {"value"})
        return Constant(_cload(desc["value"]))
    if kind == "identity":
        _fields(desc, set())
        return identity()
    if kind == "mobius":
        _fields(desc, {"coeffs"})
        coeffs = [_cload(c) for c in desc["coeffs"]]
        if len(coeffs) != 4:
            raise UsageError("mobius needs four coefficients")
        return MobiusTransform(*coeffs)
    if kind == "blaschke":
        _fields(desc, {"zeros"}, {"unimodular"})
        return blaschke([_cload(a) for a in desc["zeros"]], _cload(desc.get("unimodular", 1.0)))
    if kind == "log_ratio":
        _fields(desc, set())
        return log_ratio()
    if kind == "koebe":
        _fields(desc, set())
        return koebe()
    raise UsageError(f"unknown evaluator kind {kind!r}")


def parse_map(desc: dict) -> HarmonicMap:
    """Build a :class:`HarmonicMap` from its JSON description."""
    if not isinstance(desc, dict) or "kind" not in desc:
        raise UsageError(f"bad map description {desc!r}")
    kind = desc["kind"]
    if kind == "f_alpha":
        _fields(desc, {"alpha"})
        alpha = desc["alpha"]
        if isinstance(alpha, bool) or not isinstance(alpha, (int, float)):
            raise UsageError("alpha must be a number")
        return make_f_alpha(alpha)
    if kind == "shear":
        _fields(desc, {"F", "omega"}, {"base_value"})
        f = shear(
            parse_evaluator(desc["F"]),
            parse_evaluator(desc["omega"]),
            _cload(desc.get("base_value", 0.0)),
        )
    elif kind == "harmonic_mobius":
        _fields(desc, {"mobius", "c"})
        m = parse_evaluator({"kind": "mobius", "coeffs": desc["mobius"]})
        f = harmonic_mobius(m, _cload(desc["c"]))
    elif kind == "affine":
        _fields(desc, {"base", "a"})
        f = affine_transform(parse_map(desc["base"]), _cload(desc["a"]))
    elif kind == "holomorphic":
        _fields(desc, {"h"})
        f = holomorphic_map(parse_evaluator(desc["h"]))
    else:
        raise UsageError(f"unknown map kind {kind!r}")
    return HarmonicMap(f.h, f.g, f.omega, f.family, desc)
