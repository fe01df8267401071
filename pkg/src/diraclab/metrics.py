"""Piecewise cylinder metrics: the glued neck family, volumes, Sobolev norms.

A closed manifold with a neck inserted decomposes into five pieces

    complement | collar_in [-1,0] | cylinder [0,t] | collar_out [t,t+1] | core

where the three middle pieces are warped cylinders a(u) du^2 + r(u)^2 dsigma^2
over a fixed cross-section and the outer two are abstract blocks carrying
user-supplied volume and norm constants.  Two metrics live on this skeleton:

* the stretched metric, with the profile rho running over [0, t] and collars
  interpolating to the boundary values rho(0) and rho(t);
* the rescaled metric on the t = 1 skeleton, obtained by pulling the cylinder
  back under u -> t u and damping the middle by the plateau cutoff phi_t
  (equal to e^{-t} on [0, 1]).

The exit collar of the rescaled metric is built by shifting the stretched
metric's own exit collar to [1, 2]; damping the t = 1 collar instead (as one
sometimes sees written) would leave a radius jump of size |rho(t) - rho(1)| at
u = 1, violating the gluing.

Sobolev norms use the flat product cylinder as reference metric and the
coordinate frame, so the H^k squared norm of a(u) du^2 + r(u)^2 dsigma^2
reduces to one-dimensional quadratures

    sum_{j<=k} int [ (a^(j))^2 + (m-1) ((r^2)^(j))^2 ] du * vol(cross-section).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from .errors import DiracLabError, UsageError
from .profiles import (AffineOf, Const, CutoffSet, Product, SmoothFn,
                       WarpingProfile, make_cutoffs)
from .util import simpson_integrate

__all__ = [
    "CylinderPiece", "BlockPiece", "PiecewiseMetric", "NeckFamily",
    "build_neck_family", "flat_cylinder", "cylinder_metric",
    "pullback_cylinder_metric", "sobolev_hk_norm", "family_volume",
    "DEFAULT_BLOCK_VOLUMES", "DEFAULT_BLOCK_NORM",
]

_INTERFACE_TOL = 1e-12
DEFAULT_BLOCK_VOLUMES = {"complement": 1.0, "core": 1.0}
DEFAULT_BLOCK_NORM = 1.0


@dataclass(frozen=True)
class CylinderPiece:
    """One warped segment a(u) du^2 + r(u)^2 dsigma^2 on [u_start, u_end]."""

    label: str
    u_start: float
    u_end: float
    longitudinal: SmoothFn     # a(u), the du^2 coefficient
    radial_sq: SmoothFn        # r(u)^2

    def __post_init__(self):
        if not self.u_end > self.u_start:
            raise UsageError(f"piece {self.label!r} has an empty span")

    def r(self, u):
        return np.sqrt(self.radial_sq(np.asarray(u, dtype=float)))

    def volume(self, m: int, cross_section_volume: float,
               panels: int = 4096) -> float:
        def density(u):
            a = self.longitudinal(u)
            r2 = self.radial_sq(u)
            return np.sqrt(a) * r2 ** ((m - 1) / 2.0)
        value, _ = simpson_integrate(density, self.u_start, self.u_end, panels)
        return value * cross_section_volume

    def hk_norm_sq(self, k: int, m: int, cross_section_volume: float,
                   panels: int = 4096) -> float:
        total = 0.0
        for j in range(k + 1):
            def density(u, _j=j):
                return (self.longitudinal(u, _j) ** 2
                        + (m - 1) * self.radial_sq(u, _j) ** 2)
            value, _ = simpson_integrate(density, self.u_start, self.u_end, panels)
            total += value
        return total * cross_section_volume

    def scaled(self, factor: float) -> "CylinderPiece":
        factor = float(factor)
        return replace(self, longitudinal=Const(factor) * self.longitudinal,
                       radial_sq=Const(factor) * self.radial_sq)


@dataclass(frozen=True)
class BlockPiece:
    """Abstract non-cylinder piece: a reference volume and norm constant,
    with a tensor scale factor applied to the metric on the block."""

    label: str
    base_volume: float = 1.0
    scale: float = 1.0
    norm_constant: float = DEFAULT_BLOCK_NORM

    def __post_init__(self):
        if not (self.base_volume > 0 and self.scale > 0):
            raise UsageError(f"block {self.label!r} needs positive volume and scale")

    def volume(self, m: int) -> float:
        return self.base_volume * self.scale ** (m / 2.0)

    def norm_sq(self) -> float:
        # norm_constant is the reference-norm^2 of the unit-scale block
        # metric; a tensor factor enters any coefficient norm quadratically
        return self.norm_constant * self.scale**2

    def scaled(self, factor: float) -> "BlockPiece":
        return replace(self, scale=self.scale * float(factor))


Piece = Union[CylinderPiece, BlockPiece]


@dataclass(frozen=True)
class PiecewiseMetric:
    """An ordered run of cylinder and block pieces over one cross-section."""

    pieces: tuple
    m: int
    cross_section_volume: float = 1.0

    def __post_init__(self):
        if self.m < 2:
            raise UsageError("dimension m must be at least 2")
        if not self.cross_section_volume > 0:
            raise UsageError("cross-section volume must be positive")
        if not self.pieces:
            raise UsageError("a piecewise metric needs at least one piece")

    def piece(self, label: str) -> Piece:
        for p in self.pieces:
            if p.label == label:
                return p
        raise UsageError(f"no piece labeled {label!r}")

    def cylinder_pieces(self):
        return [p for p in self.pieces if isinstance(p, CylinderPiece)]

    def max_interface_defect(self) -> float:
        """Largest radius mismatch between abutting cylinder pieces."""
        worst = 0.0
        cyls = self.cylinder_pieces()
        for left, right in zip(cyls, cyls[1:]):
            if abs(left.u_end - right.u_start) > 1e-9:
                continue
            gap = abs(float(left.r(left.u_end)) - float(right.r(right.u_start)))
            worst = max(worst, gap)
        return worst

    def piece_volumes(self, panels: int = 4096) -> dict:
        out = {}
        for p in self.pieces:
            if isinstance(p, CylinderPiece):
                out[p.label] = p.volume(self.m, self.cross_section_volume, panels)
            else:
                out[p.label] = p.volume(self.m)
        return out

    def total_volume(self, panels: int = 4096) -> float:
        return float(sum(self.piece_volumes(panels).values()))

    def hk_norm_sq(self, k: int, panels: int = 4096) -> float:
        """Squared H^k norm against the flat product reference; block pieces
        contribute their fixed norm constants."""
        if k < 0:
            raise UsageError("Sobolev order k must be >= 0")
        total = 0.0
        for p in self.pieces:
            if isinstance(p, CylinderPiece):
                total += p.hk_norm_sq(k, self.m, self.cross_section_volume, panels)
            else:
                total += p.norm_sq()
        return total

    def scaled(self, factor: float) -> "PiecewiseMetric":
        """Multiply the metric tensor by ``factor`` on every piece."""
        if not factor > 0:
            raise UsageError("metric scale factor must be positive")
        return replace(self, pieces=tuple(p.scaled(factor) for p in self.pieces))

    def normalized_unit_volume(self, panels: int = 4096):
        """Rescale to total volume one; returns (metric, tensor_factor).

        A tensor factor c multiplies every volume element by c^{m/2}, so the
        normalizing factor is Vol^{-2/m} (length scaling Vol^{-1/m})."""
        vol = self.total_volume(panels)
        factor = vol ** (-2.0 / self.m)
        return self.scaled(factor), factor


# ---------------------------------------------------------------------------
# canonical single-cylinder metrics
# ---------------------------------------------------------------------------

def flat_cylinder(m: int, t: float, cross_section_volume: float = 1.0) -> PiecewiseMetric:
    """du^2 + dsigma^2 on [0, t]."""
    piece = CylinderPiece("cylinder", 0.0, float(t), Const(1.0), Const(1.0))
    return PiecewiseMetric((piece,), m, cross_section_volume)


def cylinder_metric(profile: WarpingProfile, m: Optional[int] = None,
                    cross_section_volume: float = 1.0) -> PiecewiseMetric:
    """du^2 + rho(u)^2 dsigma^2 on [0, t] for the given profile."""
    m = _resolve_m(profile, m)
    piece = CylinderPiece("cylinder", 0.0, profile.domain_length,
                          Const(1.0), profile.rho_sq_fn())
    return PiecewiseMetric((piece,), m, cross_section_volume)


def pullback_cylinder_metric(profile: WarpingProfile, t: float,
                             m: Optional[int] = None,
                             cross_section_volume: float = 1.0) -> PiecewiseMetric:
    """The stretched cylinder pulled back to unit length:
    t^2 du^2 + rho(t u)^2 dsigma^2 on [0, 1]."""
    m = _resolve_m(profile, m)
    t = float(t)
    if not t > 0:
        raise UsageError("stretch parameter t must be positive")
    piece = CylinderPiece("cylinder", 0.0, 1.0, Const(t * t),
                          AffineOf(profile.rho_sq_fn(), t, 0.0))
    return PiecewiseMetric((piece,), m, cross_section_volume)


def _resolve_m(profile: WarpingProfile, m: Optional[int]) -> int:
    if m is None:
        if profile.kind == "exponential":
            return profile.m
        raise UsageError("dimension m is required for non-exponential profiles")
    return int(m)


# ---------------------------------------------------------------------------
# the neck family
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NeckFamily:
    """The stretched metric and its volume-damped companion for one t."""

    t: float
    m: int
    profile: WarpingProfile = field(repr=False)
    cutoffs: CutoffSet = field(repr=False)
    stretched: PiecewiseMetric = field(repr=False)
    rescaled: PiecewiseMetric = field(repr=False)
    block_volumes: dict = field(default_factory=lambda: dict(DEFAULT_BLOCK_VOLUMES))
    core_scale_stretched: float = 1.0
    core_scale_rescaled: float = 1.0
    cross_section_volume: float = 1.0

    def max_interface_defect(self) -> float:
        return max(self.stretched.max_interface_defect(),
                   self.rescaled.max_interface_defect())

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "m": self.m,
            "profile": self.profile.to_dict(),
            "cross_section_volume": self.cross_section_volume,
            "block_volumes": dict(self.block_volumes),
            "core_scale_stretched": self.core_scale_stretched,
            "core_scale_rescaled": self.core_scale_rescaled,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "NeckFamily":
        profile = WarpingProfile.from_dict(doc["profile"])
        return build_neck_family(
            profile, doc["t"],
            block_volumes=doc.get("block_volumes"),
            core_scale_stretched=doc.get("core_scale_stretched"),
            core_scale_rescaled=doc.get("core_scale_rescaled"),
            cross_section_volume=doc.get("cross_section_volume", 1.0))


def build_neck_family(profile: WarpingProfile, t: Optional[float] = None,
                      m: Optional[int] = None,
                      cutoffs: Optional[CutoffSet] = None,
                      block_volumes: Optional[dict] = None,
                      core_scale_stretched: Optional[float] = None,
                      core_scale_rescaled: Optional[float] = None,
                      cross_section_volume: float = 1.0) -> NeckFamily:
    """Assemble both glued metrics for stretch parameter t.

    ``cutoffs`` is injectable (e.g. a set with the damping plateau forced to 1
    reproduces the stretched metric at t = 1 exactly).  The core-block tensor
    scale defaults to rho(t+1)^2 for the stretched metric and rho(2)^2 for the
    rescaled one, and both can be overridden.
    """
    if t is None:
        t = profile.domain_length
    t = float(t)
    if not t > 0:
        raise UsageError("stretch parameter t must be positive")
    if abs(t - profile.domain_length) > 1e-12 * max(1.0, t):
        raise UsageError("profile domain length must equal the stretch parameter")
    m = _resolve_m(profile, m)
    if cutoffs is None:
        cutoffs = make_cutoffs(t)
    volumes = dict(DEFAULT_BLOCK_VOLUMES)
    if block_volumes:
        volumes.update(block_volumes)

    rho_sq = profile.rho_sq_fn()
    rho0_sq = float(profile.rho(0.0) ** 2)
    rho_t_sq = float(profile.rho(t) ** 2)
    if core_scale_stretched is None:
        core_scale_stretched = float(profile.rho(t + 1.0) ** 2)
    if core_scale_rescaled is None:
        core_scale_rescaled = float(profile.rho(2.0) ** 2)

    one = Const(1.0)
    # entry collar [-1, 0]: interpolate the unit cross-section to rho(0)^2
    r2_in = one + Const(rho0_sq - 1.0) * cutoffs.psi
    # exit collar [t, t+1]: interpolate rho(u)^2 to the constant rho(t)^2
    r2_out = (one - cutoffs.chi) * rho_sq + cutoffs.chi * Const(rho_t_sq)

    stretched = PiecewiseMetric((
        BlockPiece("complement", volumes["complement"], 1.0),
        CylinderPiece("collar_in", -1.0, 0.0, one, r2_in),
        CylinderPiece("cylinder", 0.0, t, one, rho_sq),
        CylinderPiece("collar_out", t, t + 1.0, one, r2_out),
        BlockPiece("core", volumes["core"], core_scale_stretched),
    ), m, cross_section_volume)

    phi = cutoffs.phi_t
    # unit-length skeleton: pull the cylinder back by u -> t u, damp by phi_t,
    # and reuse the stretched exit collar shifted to [1, 2]
    rescaled = PiecewiseMetric((
        BlockPiece("complement", volumes["complement"], 1.0),
        CylinderPiece("collar_in", -1.0, 0.0, phi, Product(phi, r2_in)),
        CylinderPiece("cylinder", 0.0, 1.0, Product(phi, Const(t * t)),
                      Product(phi, AffineOf(rho_sq, t, 0.0))),
        CylinderPiece("collar_out", 1.0, 2.0, phi,
                      Product(phi, AffineOf(r2_out, 1.0, t - 1.0))),
        BlockPiece("core", volumes["core"], core_scale_rescaled),
    ), m, cross_section_volume)

    family = NeckFamily(t=t, m=m, profile=profile, cutoffs=cutoffs,
                        stretched=stretched, rescaled=rescaled,
                        block_volumes=volumes,
                        core_scale_stretched=core_scale_stretched,
                        core_scale_rescaled=core_scale_rescaled,
                        cross_section_volume=cross_section_volume)
    defect = family.max_interface_defect()
    if defect > _INTERFACE_TOL:
        raise DiracLabError(
            f"neck pieces fail to glue: radius jump {defect:.3e} at an interface")
    return family


# ---------------------------------------------------------------------------
# module-level conveniences
# ---------------------------------------------------------------------------

def sobolev_hk_norm(metric: PiecewiseMetric, k: int, panels: int = 4096) -> float:
    """Squared H^k norm of a piecewise metric against the flat reference."""
    return metric.hk_norm_sq(k, panels)


def family_volume(metric: PiecewiseMetric, panels: int = 4096) -> float:
    """Total volume of a piecewise metric."""
    return metric.total_volume(panels)
