"""Order-3 Taylor jets of holomorphic functions.

A :class:`ComplexJet3` carries ``(f, f', f'', f''')`` at a base point.  Every
field may be a Python complex or a numpy array of complex values; arrays are
treated elementwise, so an entire sampling grid can be pushed through the same
arithmetic in one pass.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import SingularEvaluationError, UsageError

Scalar = Union[complex, float, int]


def _as_value(x):
    if isinstance(x, np.ndarray):
        return x.astype(complex, copy=False)
    return complex(x)


def _same_point(p, q) -> bool:
    if p is q:
        return True
    if isinstance(p, np.ndarray) or isinstance(q, np.ndarray):
        return np.shape(p) == np.shape(q) and bool(np.array_equal(p, q))
    return p == q


def _any(mask) -> bool:
    return bool(np.any(mask))


@dataclass(frozen=True, eq=False)
class ComplexJet3:
    base_point: complex
    d0: complex
    d1: complex = 0j
    d2: complex = 0j
    d3: complex = 0j

    def __post_init__(self):
        for name in ("base_point", "d0", "d1", "d2", "d3"):
            object.__setattr__(self, name, _as_value(getattr(self, name)))
        if not all(_all_finite(v) for v in self.coefficients()):
            raise SingularEvaluationError("jet has non-finite entries")

    @classmethod
    def identity(cls, z) -> "ComplexJet3":
        z = _as_value(z)
        return cls(z, z, np.ones_like(z) if isinstance(z, np.ndarray) else 1.0)

    @classmethod
    def constant(cls, z, value) -> "ComplexJet3":
        return cls(z, _broadcast(value, z))

    def coefficients(self) -> tuple:
        return (self.d0, self.d1, self.d2, self.d3)

    def allclose(self, other: "ComplexJet3", rtol=1e-12, atol=1e-12) -> bool:
        return all(
            np.allclose(a, b, rtol=rtol, atol=atol)
            for a, b in zip(self.coefficients(), other.coefficients())
        )

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "ComplexJet3":
        if isinstance(other, ComplexJet3):
            if not _same_point(self.base_point, other.base_point):
                raise UsageError("jets have different base points")
            return other
        return ComplexJet3.constant(self.base_point, other)

    def __add__(self, other):
        o = self._coerce(other)
        return ComplexJet3(self.base_point, *(a + b for a, b in zip(self.coefficients(), o.coefficients())))

    __radd__ = __add__

    def __neg__(self):
        return ComplexJet3(self.base_point, *(-a for a in self.coefficients()))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        b = self._coerce(other)
        a0, a1, a2, a3 = self.coefficients()
        b0, b1, b2, b3 = b.coefficients()
        return ComplexJet3(
            self.base_point,
            a0 * b0,
            a1 * b0 + a0 * b1,
            a2 * b0 + 2 * a1 * b1 + a0 * b2,
            a3 * b0 + 3 * a2 * b1 + 3 * a1 * b2 + a0 * b3,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "ComplexJet3":
        b0, b1, b2, b3 = self.coefficients()
        if _any(b0 == 0):
            raise SingularEvaluationError("division by a jet with zero value")
        r = 1 / b0
        return ComplexJet3(
            self.base_point,
            r,
            -b1 * r**2,
            (2 * b1**2 - b0 * b2) * r**3,
            (-6 * b1**3 + 6 * b0 * b1 * b2 - b0**2 * b3) * r**4,
        )

    def __truediv__(self, other):
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()


def _all_finite(v) -> bool:
    return bool(np.all(np.isfinite(v)))


def _broadcast(value, like):
    if isinstance(like, np.ndarray):
        return np.full(like.shape, value, dtype=complex)
    return complex(value)


def jet_binary(op: str, a: ComplexJet3, b: ComplexJet3) -> ComplexJet3:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise UsageError(f"unknown jet operation {op!r}")


def jet_compose(outer: ComplexJet3, inner: ComplexJet3) -> ComplexJet3:
    """Jet of ``outer(inner(z))`` by Faa di Bruno's formula truncated at order 3."""
    if not _same_point(outer.base_point, inner.d0):
        raise UsageError("outer jet must be based at the value of the inner jet")
    f0, f1, f2, f3 = outer.coefficients()
    g0, g1, g2, g3 = inner.coefficients()
    return ComplexJet3(
        inner.base_point,
        f0,
        f1 * g1,
        f2 * g1**2 + f1 * g2,
        f3 * g1**3 + 3 * f2 * g1 * g2 + f1 * g3,
    )


def _check_branch(w0, kind):
    on_cut = (np.imag(w0) == 0) & (np.real(w0) <= 0)
    if _any(on_cut):
        raise SingularEvaluationError(f"{kind} evaluated on the closed negative real axis")


def _outer_power(w0, alpha: float):
    a = alpha
    if float(a).is_integer() and a >= 0:
        n = int(a)
        coeffs = [1.0, n, n * (n - 1), n * (n - 1) * (n - 2)]
        return tuple(c * w0 ** max(n - k, 0) if k <= n else 0 * w0 for k, c in enumerate(coeffs))
    _check_branch(w0, "principal power")
    p = np.exp(a * np.log(w0))
    return (p, a * p / w0, a * (a - 1) * p / w0**2, a * (a - 1) * (a - 2) * p / w0**3)


def jet_elementary(kind: str, w: ComplexJet3, alpha: float | None = None) -> ComplexJet3:
    """Jet of ``exp(w)``, ``log(w)`` or the principal power ``w**alpha``."""
    w0 = w.d0
    if kind == "exp":
        e = np.exp(w0)
        outer = (e, e, e, e)
    elif kind == "log":
        _check_branch(w0, "log")
        outer = (np.log(w0), 1 / w0, -1 / w0**2, 2 / w0**3)
    elif kind == "principal_power":
        if alpha is None:
            raise UsageError("principal_power needs an exponent")
        outer = _outer_power(w0, float(alpha))
    else:
        raise UsageError(f"unknown elementary function {kind!r}")
    return jet_compose(ComplexJet3(w0, *outer), w)
