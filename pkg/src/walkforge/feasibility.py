"""Feasibility of a target distribution under nearest-neighbor dynamics.

The probability-conservation recursion determines the flux field J(n, t)
uniquely from rho; a sequence is realisable by some walk (quantum or
classical) exactly when |J(n, t)| <= rho(n, t) everywhere.  The flux is
reconstructed in real space by a left-to-right recursion anchored at the
left cone edge; a redundant right-to-left pass anchored at the right edge
must agree with it, which catches non-conserving (malformed) inputs before
any synthesis is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import (
    FluxField,
    IntegrityError,
    ProbabilitySequence,
    from_storage_index,
)

DEFAULT_TOL = 1e-10

# Maximum allowed disagreement between the two recursion directions.
PASS_AGREEMENT = 1e-10


def flux_from_rho(rho: ProbabilitySequence) -> FluxField:
    """Reconstruct J(n, t) for t = 0..T-1 from the conservation recursion.

    Left-to-right: J(-t, t) = rho(-t, t) - 2 rho(-t-1, t+1), then
    J(n+2, t) = J(n, t) + rho(n, t) + rho(n+2, t) - 2 rho(n+1, t+1).

    Raises
    ------
    IntegrityError
        If the redundant right-to-left pass disagrees beyond 1e-10, which
        signals a non-conserving input.
    """
    slices = []
    for t in range(rho.horizon):
        cur = rho.slices[t]
        nxt = rho.slices[t + 1]
        ltr = np.empty(t + 1)
        ltr[0] = cur[0] - 2.0 * nxt[0]
        for k in range(t):
            ltr[k + 1] = ltr[k] + cur[k] + cur[k + 1] - 2.0 * nxt[k + 1]
        rtl = np.empty(t + 1)
        rtl[t] = 2.0 * nxt[t + 1] - cur[t]
        for k in range(t - 1, -1, -1):
            rtl[k] = rtl[k + 1] - cur[k] - cur[k + 1] + 2.0 * nxt[k + 1]
        gap = float(np.max(np.abs(ltr - rtl))) if t else abs(ltr[0] - rtl[0])
        if gap > PASS_AGREEMENT:
            raise IntegrityError(
                f"flux recursions disagree by {gap:.3e} at t={t}; "
                "input sequence does not conserve probability")
        # Each pass accumulates rounding noise proportional to the mass it
        # has swept over, so take every value from the pass anchored at the
        # nearer cone edge; this preserves the relative accuracy of fluxes
        # through low-probability tails.
        mass = np.cumsum(cur)
        slices.append(np.where(mass <= 0.5, ltr, rtl))
    return FluxField(slices)


@dataclass(frozen=True)
class Violation:
    n: int
    t: int
    flux: float
    rho: float

    def to_dict(self) -> dict:
        return {"n": self.n, "t": self.t, "J": self.flux, "rho": self.rho}


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    violations: tuple[Violation, ...]
    # Sites where |J| equals rho up to the tolerance: the walker is pushed
    # deterministically.  Feasible, but flagged.
    boundary_sites: tuple[tuple[int, int], ...] = field(default=())
    # Sites with rho = 0 (and |J| <= tol): feasible with undefined local
    # dynamics.
    undefined_sites: tuple[tuple[int, int], ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "violations": [v.to_dict() for v in self.violations],
            "boundary_sites": [{"n": n, "t": t} for n, t in self.boundary_sites],
            "undefined_sites": [{"n": n, "t": t} for n, t in self.undefined_sites],
        }


def validate_sequence(rho: ProbabilitySequence,
                      tol: float = DEFAULT_TOL) -> FeasibilityReport:
    """Check the flux bound |J| <= rho + tol at every on-support site.

    Infeasibility is a report outcome, not an error.  The tolerance is
    additive because rho can be exactly zero at interior sites.
    """
    flux = flux_from_rho(rho)
    violations = []
    boundary = []
    undefined = []
    for t in range(flux.steps):
        js = flux.slices[t]
        rs = rho.slices[t]
        for k in range(t + 1):
            n = from_storage_index(k, t)
            j = float(js[k])
            r = float(rs[k])
            if r == 0.0:
                if abs(j) > tol:
                    violations.append(Violation(n, t, j, r))
                else:
                    undefined.append((n, t))
                continue
            if abs(j) > r + tol:
                violations.append(Violation(n, t, j, r))
            elif abs(abs(j) - r) <= tol:
                boundary.append((n, t))
    return FeasibilityReport(
        feasible=not violations,
        violations=tuple(violations),
        boundary_sites=tuple(boundary),
        undefined_sites=tuple(undefined),
    )


def flux_from_wavefield(w) -> FluxField:
    """J(n, t) = |psi+(n+1, t+1)|^2 - |psi-(n-1, t+1)|^2 for any wave field."""
    slices = []
    for t in range(w.horizon):
        wp = np.abs(w.plus_slices[t + 1]) ** 2
        wm = np.abs(w.minus_slices[t + 1]) ** 2
        slices.append(wp[1:] - wm[:-1])
    return FluxField(slices)
