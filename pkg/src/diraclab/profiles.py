"""Warping profiles, slice mean curvature, and smooth cutoff functions.

A cylinder ``[0, t] x N`` carries the warped metric ``du^2 + rho(u)^2 dsigma^2``.
Everything downstream needs ``rho`` together with a few derivatives, the mean
curvature ``H = -rho'/rho`` of the slices, and the C-infinity cutoffs used to
glue a neck into a closed manifold.  To keep derivative bookkeeping exact we
represent coefficient functions as small expression trees (:class:`SmoothFn`)
whose nodes know their own derivatives; products use the Leibniz rule and the
mollified step uses symbolically differentiated ``exp(-1/x)`` gluing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import sympy as sp
from scipy.interpolate import make_interp_spline

from .errors import InvalidProfileError, ResolutionError, UsageError

__all__ = [
    "SmoothFn", "Const", "ExpLin", "SplineFn", "AffineOf", "MollifiedStep",
    "WarpingProfile", "MeanCurvature", "mean_curvature",
    "CutoffSet", "make_cutoffs",
]


# ---------------------------------------------------------------------------
# smooth functions with derivatives
# ---------------------------------------------------------------------------

class SmoothFn:
    """A scalar function of one variable exposing derivatives of any order.

    Subclasses implement ``_eval(u, d)`` for vectorized ``u``.  Arithmetic
    (+, -, *) builds new nodes so that composite metric coefficients keep
    exact derivatives.
    """

    def __call__(self, u, d: int = 0):
        if d < 0:
            raise ValueError("derivative order must be >= 0")
        u = np.asarray(u, dtype=float)
        return self._eval(u, d)

    def _eval(self, u, d):  # pragma: no cover - abstract
        raise NotImplementedError

    def __add__(self, other):
        return Sum(self, _as_fn(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Sum(self, Product(Const(-1.0), _as_fn(other)))

    def __rsub__(self, other):
        return Sum(_as_fn(other), Product(Const(-1.0), self))

    def __mul__(self, other):
        return Product(self, _as_fn(other))

    __rmul__ = __mul__

    def __neg__(self):
        return Product(Const(-1.0), self)


def _as_fn(x) -> "SmoothFn":
    if isinstance(x, SmoothFn):
        return x
    return Const(float(x))


class Const(SmoothFn):
    def __init__(self, value: float):
        self.value = float(value)

    def _eval(self, u, d):
        if d == 0:
            return np.full_like(u, self.value)
        return np.zeros_like(u)


class ExpLin(SmoothFn):
    """c * exp(r * u); the closed form covers every derivative order."""

    def __init__(self, c: float, r: float):
        self.c = float(c)
        self.r = float(r)

    def _eval(self, u, d):
        return self.c * self.r**d * np.exp(self.r * u)


class Sum(SmoothFn):
    def __init__(self, a: SmoothFn, b: SmoothFn):
        self.a, self.b = a, b

    def _eval(self, u, d):
        return self.a(u, d) + self.b(u, d)


class Product(SmoothFn):
    def __init__(self, a: SmoothFn, b: SmoothFn):
        self.a, self.b = a, b

    def _eval(self, u, d):
        # Leibniz rule
        out = np.zeros_like(u)
        for j in range(d + 1):
            out += math.comb(d, j) * self.a(u, j) * self.b(u, d - j)
        return out


class AffineOf(SmoothFn):
    """f(scale * u + shift) with the chain rule scale**d applied."""

    def __init__(self, f: SmoothFn, scale: float, shift: float):
        self.f, self.scale, self.shift = f, float(scale), float(shift)

    def _eval(self, u, d):
        return self.scale**d * self.f(self.scale * u + self.shift, d)


class SplineFn(SmoothFn):
    """B-spline leaf; derivative orders beyond the spline degree raise."""

    def __init__(self, spline, order: int):
        self.spline = spline
        self.order = int(order)

    def _eval(self, u, d):
        if d > self.order:
            raise ResolutionError(
                f"sampled data of spline order {self.order} cannot provide "
                f"derivative order {d}")
        if d == 0:
            return np.asarray(self.spline(u), dtype=float)
        return np.asarray(self.spline.derivative(d)(u), dtype=float)


# -- mollified step ---------------------------------------------------------

_X = sp.Symbol("x")
_H = sp.exp(-1 / _X)
_STEP_EXPR = _H / (_H + _H.subs(_X, 1 - _X))


@lru_cache(maxsize=None)
def _step_deriv(d: int):
    expr = sp.diff(_STEP_EXPR, _X, d) if d else _STEP_EXPR
    return sp.lambdify(_X, expr, modules="numpy")


class MollifiedStep(SmoothFn):
    """The standard C-infinity step: 0 for x <= 0, 1 for x >= 1, and
    ``e^{-1/x} / (e^{-1/x} + e^{-1/(1-x)})`` in between.

    Evaluation masks the plateaus explicitly so the exponential gluing is only
    touched strictly inside (0, 1); derivatives come from symbolic
    differentiation of the gluing expression.
    """

    _EDGE = 1e-8

    def _eval(self, x, d):
        shape = np.shape(x)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros(x.shape)
        if d == 0:
            out[x >= 1.0 - self._EDGE] = 1.0
        inside = (x > self._EDGE) & (x < 1.0 - self._EDGE)
        if inside.any():
            with np.errstate(all="ignore"):
                vals = _step_deriv(d)(x[inside])
            out[inside] = np.nan_to_num(vals, nan=0.0)
        return out.reshape(shape)


_STEP = MollifiedStep()


def smooth_step(x, d: int = 0):
    """Module-level evaluation of the mollified step (mainly for tests)."""
    return _STEP(x, d)


# ---------------------------------------------------------------------------
# warping profiles
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class WarpingProfile:
    """Radial profile rho on [0, domain_length].

    kind = "exponential":  rho(u) = exp(-u / (2 (m - 1))), m >= 2
    kind = "constant":     rho(u) = c > 0
    kind = "sampled":      spline through (knots, values), spline degree
                           ``order`` (default 3)

    Exponential and constant profiles evaluate anywhere (the neck gluing needs
    the collar [t, t+1]); sampled profiles extrapolate with their spline, and
    positivity is validated on the knots.
    """

    kind: str
    domain_length: float
    m: int | None = None
    c: float | None = None
    knots: np.ndarray | None = None
    values: np.ndarray | None = None
    order: int = 3
    _fn: SmoothFn = field(init=False, repr=False)

    def __post_init__(self):
        t = float(self.domain_length)
        if not t > 0:
            raise InvalidProfileError("domain_length must be positive")
        self.domain_length = t
        if self.kind == "exponential":
            if self.m is None or int(self.m) < 2:
                raise InvalidProfileError("exponential profile needs integer m >= 2")
            self.m = int(self.m)
            self._fn = ExpLin(1.0, -1.0 / (2.0 * (self.m - 1)))
        elif self.kind == "constant":
            if self.c is None or not float(self.c) > 0:
                raise InvalidProfileError("constant profile needs c > 0")
            self.c = float(self.c)
            self._fn = Const(self.c)
        elif self.kind == "sampled":
            knots = np.asarray(self.knots, dtype=float)
            values = np.asarray(self.values, dtype=float)
            if knots.ndim != 1 or knots.shape != values.shape or knots.size < 2:
                raise InvalidProfileError("sampled profile needs matching 1-D knots/values")
            if np.any(np.diff(knots) <= 0):
                raise InvalidProfileError("knots must be strictly increasing")
            if np.any(values <= 0):
                raise InvalidProfileError("profile values must be strictly positive")
            if self.order >= knots.size:
                raise InvalidProfileError("spline order must be below the knot count")
            self.knots, self.values = knots, values
            spline = make_interp_spline(knots, values, k=self.order)
            self._fn = SplineFn(spline, self.order)
        else:
            raise InvalidProfileError(f"unknown profile kind {self.kind!r}")

    # -- evaluation --------------------------------------------------------

    def rho(self, u, d: int = 0):
        """d-th derivative of rho at u (vectorized)."""
        return self._fn(u, d)

    def rho_fn(self) -> SmoothFn:
        return self._fn

    def rho_sq_fn(self) -> SmoothFn:
        if self.kind == "exponential":
            return ExpLin(1.0, -1.0 / (self.m - 1))
        if self.kind == "constant":
            return Const(self.c**2)
        return Product(self._fn, self._fn)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        doc = {"kind": self.kind, "domain_length": self.domain_length}
        if self.kind == "exponential":
            doc["m"] = self.m
        elif self.kind == "constant":
            doc["c"] = self.c
        else:
            doc.update(knots=list(map(float, self.knots)),
                       values=list(map(float, self.values)), order=self.order)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "WarpingProfile":
        kind = doc.get("kind")
        t = doc.get("domain_length")
        if kind == "exponential":
            return cls(kind, t, m=doc.get("m"))
        if kind == "constant":
            return cls(kind, t, c=doc.get("c"))
        if kind == "sampled":
            return cls(kind, t, knots=np.asarray(doc.get("knots"), dtype=float),
                       values=np.asarray(doc.get("values"), dtype=float),
                       order=int(doc.get("order", 3)))
        raise InvalidProfileError(f"unknown profile kind {kind!r}")


def exponential_profile(m: int, domain_length: float) -> WarpingProfile:
    return WarpingProfile("exponential", domain_length, m=m)


def constant_profile(c: float, domain_length: float) -> WarpingProfile:
    return WarpingProfile("constant", domain_length, c=c)


# ---------------------------------------------------------------------------
# mean curvature of the slices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeanCurvature:
    """H = -rho'/rho and its derivative H' = -rho''/rho + H^2, as callables."""

    h: object
    h_prime: object

    def __call__(self, u):
        return self.h(u)


def mean_curvature(profile: WarpingProfile) -> MeanCurvature:
    """Mean curvature of the u-slices of du^2 + rho(u)^2 dsigma^2.

    The sign convention makes the exponentially shrinking profile
    rho = exp(-u/(2(m-1))) have constant H = 1/(2(m-1)).
    """

    def h(u):
        u = np.asarray(u, dtype=float)
        return -profile.rho(u, 1) / profile.rho(u, 0)

    def h_prime(u):
        u = np.asarray(u, dtype=float)
        r0 = profile.rho(u, 0)
        r1 = profile.rho(u, 1)
        r2 = profile.rho(u, 2)
        return -r2 / r0 + (r1 / r0) ** 2

    return MeanCurvature(h=h, h_prime=h_prime)


# ---------------------------------------------------------------------------
# cutoffs for the neck gluing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CutoffSet:
    """The four cutoffs of the neck construction, as :class:`SmoothFn` trees.

    psi      : 0 for u <= -1, 1 for u >= 0       (entry collar)
    chi      : 0 for u <= t,  1 for u >= t + 1   (exit collar)
    phi_inf  : 1 for u <= -1 and u >= 2, 0 on [0, 1]
    phi_t    : 1 - (1 - e^{-t}) (1 - phi_inf); equals e^{-t} on [0, 1]
    """

    t: float
    psi: SmoothFn
    chi: SmoothFn
    phi_inf: SmoothFn
    phi_t: SmoothFn


def make_cutoffs(t: float) -> CutoffSet:
    if not t > 0:
        raise UsageError("cutoffs need t > 0")
    psi = AffineOf(_STEP, 1.0, 1.0)                   # step(u + 1)
    chi = AffineOf(_STEP, 1.0, -float(t))             # step(u - t)
    phi_inf = Const(1.0) - AffineOf(_STEP, 1.0, 1.0) + AffineOf(_STEP, 1.0, -1.0)
    phi_t = Const(1.0) - Const(1.0 - math.exp(-float(t))) * (Const(1.0) - phi_inf)
    return CutoffSet(t=float(t), psi=psi, chi=chi, phi_inf=phi_inf, phi_t=phi_t)
