"""Assemble per-branch cylinder spectra into the global Dirichlet spectrum.

Every transverse eigenvalue mu spawns one branch problem with normal-form
potential V = mu(u)^2 - mu'(u) (the paired -mu entry of a symmetric spectrum
appears as its own entry, carrying the sign-flipped potential mu^2 + mu').
The global Dirichlet spectrum of the cylinder Dirac-Laplacian is the merged,
multiplicity-weighted multiset of the branch spectra.

A branch may be skipped once min_u V exceeds the current K-th smallest merged
eigenvalue: its Dirichlet spectrum lies above min V + pi^2/t^2, so it cannot
contribute to the lowest K values.  The same estimate applied to the first
*omitted* transverse eigenvalue decides whether a truncated spectrum is safe;
an unsafe truncation raises :class:`TruncationRiskError`.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import TruncationRiskError, UsageError
from .profiles import WarpingProfile, mean_curvature
from .sturm import BranchProblem, liouville_transform, solve_transformed
from .transverse import TransverseSpectrum

__all__ = [
    "BranchEigenvalue", "AssembledSpectrum",
    "assemble_spectrum", "lowest_eigenvalue_bound", "worker_count",
]

CLUSTER_TOL = 1e-9


def worker_count() -> int:
    """Parallelism cap from DIRAC_LAB_THREADS (default: sequential)."""
    raw = os.environ.get("DIRAC_LAB_THREADS", "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


@dataclass(frozen=True)
class BranchEigenvalue:
    """One merged eigenvalue with its branch provenance."""

    value: float
    mu0: float
    branch_id: int
    branch_index: int
    multiplicity: int
    error_estimate: float
    cluster: int = -1


@dataclass
class AssembledSpectrum:
    """Lowest-K merged spectrum with provenance and truncation bookkeeping."""

    records: list
    count: int
    mesh_size: int
    truncation_safe: bool
    branches_solved: int
    branches_skipped: int
    meta: dict = field(default_factory=dict)

    def values(self) -> np.ndarray:
        """The lowest ``count`` eigenvalues, multiplicities expanded."""
        out = []
        for rec in self.records:
            out.extend([rec.value] * rec.multiplicity)
        return np.array(out[: self.count])

    def to_rows(self):
        header = ["index", "value", "mu0", "branch_id", "branch_index",
                  "multiplicity", "cluster", "error_estimate"]
        rows = [[i, r.value, r.mu0, r.branch_id, r.branch_index,
                 r.multiplicity, r.cluster, r.error_estimate]
                for i, r in enumerate(self.records)]
        return header, rows

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mesh_size": self.mesh_size,
            "truncation_safe": self.truncation_safe,
            "branches_solved": self.branches_solved,
            "branches_skipped": self.branches_skipped,
            "eigenvalues": [
                {"value": r.value, "mu0": r.mu0, "branch_id": r.branch_id,
                 "branch_index": r.branch_index, "multiplicity": r.multiplicity,
                 "cluster": r.cluster, "error_estimate": r.error_estimate}
                for r in self.records
            ],
            "meta": self.meta,
        }


def lowest_eigenvalue_bound(t: float, spectrum: TransverseSpectrum) -> float:
    """Upper bound pi^2/t^2 for the lowest global Dirichlet eigenvalue.

    Valid because the harmonic branch (mu = 0) contributes the exact values
    pi^2 (n+1)^2 / t^2; a spectrum without a harmonic entry gives no such
    closed form and the call refuses.
    """
    if not t > 0:
        raise UsageError("t must be positive")
    if not spectrum.has_harmonic:
        raise UsageError("bound requires a harmonic transverse entry (mu = 0)")
    return math.pi**2 / t**2


def _branch_vmin(problem, grid) -> float:
    tp = liouville_transform(problem)
    return float(np.min(tp.v(grid)))


def _tail_potential_floor(nu: float, s: np.ndarray, habs: np.ndarray) -> float:
    """Pointwise-minimized lower bound of V for any branch with |mu0| >= nu.

    V(u; x) >= s^2 x^2 - s |H| x for x = |mu0|; minimizing the quadratic over
    x >= nu gives the floor used in the truncation-safety test.
    """
    vertex = habs / (2.0 * s)
    at_nu = s**2 * nu**2 - s * habs * nu
    at_vertex = -(habs**2) / 4.0
    floor = np.where(nu >= vertex, at_nu, at_vertex)
    return float(np.min(floor))


def assemble_spectrum(profile: WarpingProfile, spectrum: TransverseSpectrum,
                      t: float, m: int, K: int, mesh: int = 2048,
                      strict_truncation: bool = True) -> AssembledSpectrum:
    """Lowest K eigenvalues of the cylinder Dirac-Laplacian with Dirichlet ends.

    ``t`` must match the profile's domain length (it is kept explicit as a
    guard).  Branch solves may run concurrently up to the DIRAC_LAB_THREADS
    cap; the merge is deterministic regardless, with ties broken by
    (value, branch_id, branch_index) and near-equal values across branches
    annotated with a shared cluster id.
    """
    if K < 1:
        raise UsageError("K must be >= 1")
    if abs(t - profile.domain_length) > 1e-12 * max(1.0, abs(t)):
        raise UsageError("t must equal the profile's domain length")

    branches = []
    for branch_id, (mu0, mult) in enumerate(spectrum.entries):
        branches.append((branch_id, mu0, mult,
                         BranchProblem.from_profile(profile, mu0,
                                                    branch_id=branch_id, m=m)))

    grid = np.linspace(0.0, t, 2049)
    order = sorted(branches, key=lambda b: (_branch_vmin(b[3], grid), b[0]))
    vmins = {b[0]: _branch_vmin(b[3], grid) for b in branches}

    records = []

    def kth_value():
        total = 0
        for rec in sorted(records, key=lambda r: r.value):
            total += rec.multiplicity
            if total >= K:
                return rec.value
        return math.inf

    workers = worker_count()
    solved = skipped = 0
    pos = 0
    while pos < len(order):
        # everything with min V above the current K-th merged value (and, by
        # the vmin ordering, everything after it) cannot enter the lowest K
        chunk = []
        while pos < len(order) and len(chunk) < max(1, workers):
            branch_id, mu0, mult, problem = order[pos]
            if len(records) and vmins[branch_id] > kth_value():
                pos = len(order)
                break
            chunk.append((branch_id, mu0, mult, problem))
            pos += 1
        if not chunk:
            break

        def run(job):
            branch_id, mu0, mult, problem = job
            res = solve_transformed(liouville_transform(problem), K, mesh)
            return branch_id, mu0, mult, res

        if workers > 1 and len(chunk) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(run, chunk))
        else:
            results = [run(job) for job in chunk]

        for branch_id, mu0, mult, res in results:
            solved += 1
            for j, val in enumerate(res.values):
                records.append(BranchEigenvalue(
                    value=float(val), mu0=mu0, branch_id=branch_id,
                    branch_index=j, multiplicity=mult,
                    error_estimate=float(res.error_estimates[j])))

    skipped = len(branches) - solved
    records.sort(key=lambda r: (r.value, r.branch_id, r.branch_index))

    # keep just enough records to cover K values (multiplicities included)
    kept, total = [], 0
    for rec in records:
        if total >= K:
            break
        kept.append(rec)
        total += rec.multiplicity

    # cluster annotation: runs of values within CLUSTER_TOL share an id
    clustered = []
    cluster_id = -1
    prev = None
    for rec in kept:
        if prev is None or rec.value - prev > CLUSTER_TOL:
            cluster_id += 1
        prev = rec.value
        clustered.append(BranchEigenvalue(rec.value, rec.mu0, rec.branch_id,
                                          rec.branch_index, rec.multiplicity,
                                          rec.error_estimate, cluster_id))

    kth = clustered[-1].value if total >= K else math.inf
    kth_err = clustered[-1].error_estimate if clustered else 0.0

    safe = True
    gap = spectrum.omitted_abs_min
    if math.isfinite(gap):
        curv = mean_curvature(profile)
        s = float(profile.rho(0.0)) / np.asarray(profile.rho(grid, 0), dtype=float)
        habs = np.abs(np.asarray(curv.h(grid), dtype=float))
        tail_floor = _tail_potential_floor(abs(gap), s, habs) + math.pi**2 / t**2
        safe = tail_floor > kth + kth_err
    if total < K:
        safe = False

    if not safe and strict_truncation:
        raise TruncationRiskError(
            f"transverse truncation (first omitted |mu| >= {gap:.6g}) cannot "
            f"guarantee the lowest K={K} eigenvalues; supply more branches")

    return AssembledSpectrum(records=clustered, count=K, mesh_size=mesh,
                             truncation_safe=safe, branches_solved=solved,
                             branches_skipped=skipped,
                             meta={"t": t, "m": m,
                                   "profile": profile.to_dict(),
                                   "spectrum": spectrum.to_dict()})
