"""Closed-form phase optimization of the primary rate, with a grid oracle.

The device rate is invariant to the base phase, so the constrained problems
(maximize the primary rate subject to a minimum device rate) reduce to a
one-time feasibility check plus an unconstrained phase choice.  Amplitude
keying aligns the common phase against the composite channel phase; phase
keying centers the symbol fan so that the two symbols nearest the channel
phase straddle it symmetrically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bd_rate import bd_rate
from .channel import TWO_PI, ChannelTriple, SystemParams
from .constellation import equal_power_psk_amplitude, mask_constellation, mpsk_constellation
from .pt_rate import mask_rate_curve, mpsk_rate_curve, pt_rate_finite


@dataclass(frozen=True)
class PhaseOptProblem:
    """One rate-maximization instance: scheme, order, and device-rate floor."""

    scheme: str
    order: int
    alpha0: float | None = None
    min_bd_rate_bits: float = 0.0

    def __post_init__(self) -> None:
        if self.scheme not in ("mask", "mpsk"):
            raise ValueError(f"scheme must be 'mask' or 'mpsk', got {self.scheme!r}")
        if not (isinstance(self.order, int) and self.order >= 2):
            raise ValueError(f"order must be an integer >= 2, got {self.order!r}")
        if self.scheme == "mpsk" and self.alpha0 is None:
            raise ValueError("mpsk problems need a ring amplitude alpha0")
        if self.min_bd_rate_bits < 0.0:
            raise ValueError("min_bd_rate_bits must be >= 0")

    def resolved_alpha0(self) -> float:
        if self.scheme == "mask":
            return 1.0
        return self.alpha0 if self.alpha0 is not None else equal_power_psk_amplitude(self.order)


@dataclass(frozen=True)
class PhaseSolution:
    """An optimal base phase, its wrap index, and optionally the achieved rate."""

    phase_rad: float
    wrap_index: int
    achieved_pt_rate: float | None = None
    feasible: bool = True


def optimal_phase_ask(theta0: float) -> PhaseSolution:
    """Common phase maximizing the amplitude-keyed rate: (-theta0) mod 2pi.

    Every summand of the rate is maximized simultaneously when
    cos(theta0 + phi0) = 1; the wrap index is the integer lambda with
    phi0 = 2 lambda pi - theta0.  Independent of the modulation order.
    """
    phase = (-theta0) % TWO_PI
    if phase >= TWO_PI:
        phase -= TWO_PI
    lam = round((phase + theta0) / TWO_PI)
    return PhaseSolution(phase_rad=phase, wrap_index=int(lam))


def optimal_phase_psk(theta0: float, M: int) -> PhaseSolution:
    """Base phase maximizing the order-M phase-keyed rate: (pi/M - theta0) mod 2pi/M.

    Proven optimal for M a power of two; for other orders the same formula is
    applied, and callers that care cross-check against the grid oracle (the
    acceptance suite records where they disagree).  The wrap index eta
    satisfies phi0 = pi/M + 2 eta pi / M - theta0.
    """
    if not (isinstance(M, int) and M >= 2):
        raise ValueError(f"modulation order must be an integer >= 2, got {M!r}")
    period = TWO_PI / M
    phase = (math.pi / M - theta0) % period
    if phase >= period:
        phase -= period
    eta = round((phase + theta0 - math.pi / M) / period)
    return PhaseSolution(phase_rad=phase, wrap_index=int(eta))


def grid_search_phase(objective: Callable, lo: float, hi: float,
                      points: int) -> tuple[float, float]:
    """Argmax of the objective over a uniform grid on [lo, hi).

    The grid includes `lo` and excludes `hi`; ties break toward the smaller
    phase.  The objective may be vectorized over numpy arrays (preferred for
    dense grids) or a plain scalar callable.
    """
    if points < 3:
        raise ValueError(f"grid needs at least 3 points, got {points!r}")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got lo={lo!r} hi={hi!r}")
    grid = np.linspace(lo, hi, points, endpoint=False)
    try:
        vals = np.asarray(objective(grid), dtype=float)
        if vals.shape != grid.shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.array([float(objective(x)) for x in grid])
    best = int(np.argmax(vals))  # argmax takes the first maximum: smaller phase
    return float(grid[best]), float(vals[best])


def check_feasibility(problem: PhaseOptProblem, sys: SystemParams,
                      ch: ChannelTriple) -> bool:
    """Whether the device-rate floor is met; one evaluation suffices.

    The device rate does not depend on the base phase, so feasibility at any
    phase settles the constraint for every phase.
    """
    if problem.min_bd_rate_bits == 0.0:
        return True
    if problem.min_bd_rate_bits > math.log2(problem.order):
        return False
    if problem.scheme == "mask":
        c = mask_constellation(problem.order, 0.0)
    else:
        c = mpsk_constellation(problem.order, problem.resolved_alpha0(), 0.0)
    return bd_rate(sys, ch, c).value_bits >= problem.min_bd_rate_bits


def solve_phase_problem(problem: PhaseOptProblem, sys: SystemParams,
                        ch: ChannelTriple) -> PhaseSolution:
    """Closed-form optimum with the achieved rate and feasibility filled in.

    Infeasible instances still return the optimal phase, with feasible=False,
    rather than erroring: the phase choice is unaffected by the floor.
    """
    theta0 = ch.theta0
    if problem.scheme == "mask":
        sol = optimal_phase_ask(theta0)
        c = mask_constellation(problem.order, sol.phase_rad)
    else:
        sol = optimal_phase_psk(theta0, problem.order)
        c = mpsk_constellation(problem.order, problem.resolved_alpha0(), sol.phase_rad)
    return PhaseSolution(
        phase_rad=sol.phase_rad,
        wrap_index=sol.wrap_index,
        achieved_pt_rate=pt_rate_finite(sys, ch, c),
        feasible=check_feasibility(problem, sys, ch),
    )


def mask_objective(sys: SystemParams, ch: ChannelTriple, M: int) -> Callable:
    """Vectorized phase->rate objective for the amplitude-keyed grid oracle."""
    return lambda phases: mask_rate_curve(sys, ch, M, phases)


def mpsk_objective(sys: SystemParams, ch: ChannelTriple, M: int,
                   alpha0: float) -> Callable:
    """Vectorized phase->rate objective for the phase-keyed grid oracle."""
    return lambda phases: mpsk_rate_curve(sys, ch, M, alpha0, phases)
