"""Scenario-driven command line emitting diff-friendly CSV artifacts.

Subcommands: `rate`, `phase-sweep`, `ratio-sweep`, `order-sweep`, `optimize`,
`mi`.  Every run is a pure function of the scenario file plus flags: rows
are emitted in grid order, floats at full precision, metadata in leading
`#` rows, so identical inputs give byte-identical outputs.  Exit codes:
0 success, 2 scenario error, 3 numerical-precision failure.
"""

from __future__ import annotations

import argparse
import math
import sys as _sys
from pathlib import Path

import numpy as np

from .bd_rate import PrecisionError, bd_rate, mi_monte_carlo, mrc_statistics, mi_quadrature
from .channel import TWO_PI, ChannelTriple
from .constellation import equal_power_psk_amplitude
from .phase_opt import PhaseOptProblem, optimal_phase_ask, optimal_phase_psk, solve_phase_problem
from .pt_rate import (mask_rate_curve, max_pt_rate_ask, max_pt_rate_psk, mpsk_rate_curve,
                      pt_rate_no_bd, pt_rate_psk_infinite, rate_gain)
from .scenario import Scenario, ScenarioError, load_scenario, scenario_hash

#: Equal-power ring amplitude in the infinite-order limit of the amplitude grid.
_EQUAL_POWER_LIMIT = math.sqrt(1.0 / 3.0)


def _fmt(x: float) -> str:
    return repr(float(x))


def _scaled_h1(ch: ChannelTriple, ratio: float) -> ChannelTriple:
    """Channel with |h1| set to ratio * |h2||h3|, direct-link phase kept."""
    if ch.a1 == 0.0:
        raise ScenarioError("ratio sweep needs a nonzero direct-link fading sample")
    return ChannelTriple(h1=ch.h1 * (ratio * ch.a23 / ch.a1), h2=ch.h2, h3=ch.h3)


def _meta(scn: Scenario, command: str) -> list[str]:
    return [f"# scenario={scenario_hash(scn)}", f"# command={command}"]


def cmd_rate(scn: Scenario, args) -> list[str]:
    sy, ch = scn.system, scn.channel()
    c = scn.build_constellation(ch)
    report = rate_gain(sy, ch, c)
    bd = bd_rate(sy, ch, c)
    lines = _meta(scn, "rate")
    lines.append("pt_rate_bits,no_bd_rate_bits,gain_bits,bd_rate_bits")
    lines.append(",".join(_fmt(v) for v in
                          (report.pt_rate, report.no_bd_rate, report.gain, bd.value_bits)))
    return lines


def cmd_phase_sweep(scn: Scenario, args) -> list[str]:
    if scn.sweep is None or scn.sweep.variable != "base_phase":
        raise ScenarioError("phase-sweep needs sweep.variable = 'base_phase'")
    sy, ch = scn.system, scn.channel()
    M = scn.order
    limit = TWO_PI if scn.scheme == "mask" else TWO_PI / M
    lo = scn.sweep.lo if scn.sweep.lo is not None else 0.0
    hi = scn.sweep.hi if scn.sweep.hi is not None else limit
    if not (0.0 <= lo < hi <= limit):
        raise ScenarioError(f"sweep range [{lo}, {hi}) outside the base-phase "
                            f"domain [0, {limit:g})")
    steps = args.grid or scn.sweep.steps
    if not steps:
        raise ScenarioError("phase-sweep needs sweep.steps (or --grid)")
    grid = np.linspace(lo, hi, steps, endpoint=False)
    no_bd = pt_rate_no_bd(sy, ch)
    if scn.scheme == "mask":
        rates = mask_rate_curve(sy, ch, M, grid)
        sol = optimal_phase_ask(ch.theta0)
        best = max_pt_rate_ask(sy, ch, M)
    else:
        alpha0 = scn.resolved_alpha0()
        rates = mpsk_rate_curve(sy, ch, M, alpha0, grid)
        sol = optimal_phase_psk(ch.theta0, M)
        best = max_pt_rate_psk(sy, ch, M, alpha0)
    lines = _meta(scn, "phase-sweep")
    lines.append(f"# scheme={scn.scheme} order={M}")
    lines.append("phase_rad,pt_rate_bits,no_bd_rate_bits")
    for phi, r in zip(grid, rates):
        lines.append(f"{_fmt(phi)},{_fmt(r)},{_fmt(no_bd)}")
    lines.append(f"# closed_form_optimum_phase_rad={_fmt(sol.phase_rad)} "
                 f"closed_form_max_rate_bits={_fmt(best)}")
    return lines


def cmd_ratio_sweep(scn: Scenario, args) -> list[str]:
    if scn.sweep is None or scn.sweep.variable != "channel_ratio":
        raise ScenarioError("ratio-sweep needs sweep.variable = 'channel_ratio'")
    if scn.sweep.lo is None or scn.sweep.hi is None:
        raise ScenarioError("ratio-sweep needs sweep.lo and sweep.hi")
    if not (0.0 < scn.sweep.lo < scn.sweep.hi):
        raise ScenarioError("ratio-sweep needs 0 < sweep.lo < sweep.hi")
    steps = args.grid or scn.sweep.steps
    if not steps or steps < 2:
        raise ScenarioError("ratio-sweep needs at least 2 grid points")
    sy, ch = scn.system, scn.channel()
    M = scn.order
    alpha0 = equal_power_psk_amplitude(M)  # equal average power per order
    grid = np.linspace(scn.sweep.lo, scn.sweep.hi, steps)

    def ask_minus_psk(ratio: float) -> float:
        chr_ = _scaled_h1(ch, ratio)
        return max_pt_rate_ask(sy, chr_, M) - max_pt_rate_psk(sy, chr_, M, alpha0)

    lines = _meta(scn, "ratio-sweep")
    lines.append(f"# order={M} psk_amplitude={_fmt(alpha0)}")
    lines.append("ratio,rate_ask_opt_bits,rate_psk_opt_bits")
    diffs = []
    for r in grid:
        chr_ = _scaled_h1(ch, float(r))
        ask = max_pt_rate_ask(sy, chr_, M)
        psk = max_pt_rate_psk(sy, chr_, M, alpha0)
        diffs.append(ask - psk)
        lines.append(f"{_fmt(r)},{_fmt(ask)},{_fmt(psk)}")
    sign = np.sign(diffs)
    brackets = [i for i in range(len(grid) - 1)
                if sign[i] != sign[i + 1] and sign[i] != 0]
    crossings = []
    for i in brackets:
        a, b = float(grid[i]), float(grid[i + 1])
        fa = diffs[i]
        for _ in range(80):  # bisection to machine precision on the grid cell
            mid = 0.5 * (a + b)
            fm = ask_minus_psk(mid)
            if fm == 0.0:
                a = b = mid
                break
            if (fm > 0) == (fa > 0):
                a, fa = mid, fm
            else:
                b = mid
        crossings.append(0.5 * (a + b))
    r0 = crossings[0] if len(crossings) == 1 else float("nan")
    lines.append(f"# sign_changes={len(crossings)} crossing_ratio_r0="
                 f"{_fmt(r0) if crossings else 'nan'}")
    return lines


def _power_of_two_orders(lo: float, hi: float) -> list[int]:
    orders = []
    m = 2
    while m <= hi:
        if m >= lo:
            orders.append(m)
        m *= 2
    if not orders:
        raise ScenarioError(f"no power-of-two orders inside [{lo}, {hi}]")
    return orders


def cmd_order_sweep(scn: Scenario, args) -> list[str]:
    if scn.sweep is None or scn.sweep.variable != "order":
        raise ScenarioError("order-sweep needs sweep.variable = 'order'")
    lo = scn.sweep.lo if scn.sweep.lo is not None else 2
    hi = scn.sweep.hi if scn.sweep.hi is not None else 256
    orders = _power_of_two_orders(lo, hi)
    sy, ch = scn.system, scn.channel()
    lines = _meta(scn, "order-sweep")
    amp_note = "equal-power" if (scn.equal_power or scn.amplitude is None) \
        else _fmt(scn.amplitude)
    lines.append(f"# psk_amplitude={amp_note} psk_suboptimal_phase=anti-optimal")
    lines.append("order,rate_ask_opt_bits,rate_psk_opt_bits,rate_psk_subopt_bits")
    for M in orders:
        alpha0 = scn.resolved_alpha0(M)
        ask = max_pt_rate_ask(sy, ch, M)
        psk = max_pt_rate_psk(sy, ch, M, alpha0)
        # Anti-optimal base phase: half a symbol spacing off the optimum.
        sub_phase = (optimal_phase_psk(ch.theta0, M).phase_rad + math.pi / M) % (TWO_PI / M)
        sub = float(mpsk_rate_curve(sy, ch, M, alpha0, np.array([sub_phase]))[0])
        lines.append(f"{M},{_fmt(ask)},{_fmt(psk)},{_fmt(sub)}")
    alpha_inf = _EQUAL_POWER_LIMIT if (scn.equal_power or scn.amplitude is None) \
        else scn.amplitude
    lines.append(f"# psk_infinite_rate_bits={_fmt(pt_rate_psk_infinite(sy, ch, alpha_inf))}")
    return lines


def cmd_optimize(scn: Scenario, args) -> list[str]:
    sy, ch = scn.system, scn.channel()
    problem = PhaseOptProblem(
        scheme=scn.scheme,
        order=scn.order,
        alpha0=(scn.resolved_alpha0() if scn.scheme == "mpsk" else None),
        min_bd_rate_bits=scn.min_bd_rate_bits,
    )
    sol = solve_phase_problem(problem, sy, ch)
    return [f"scheme={scn.scheme} order={scn.order} "
            f"optimal_phase_rad={_fmt(sol.phase_rad)} "
            f"achieved_pt_rate_bits={_fmt(sol.achieved_pt_rate)} "
            f"feasible={str(sol.feasible).lower()} wrap_index={sol.wrap_index}"]


def cmd_mi(scn: Scenario, args) -> list[str]:
    sy, ch = scn.system, scn.channel()
    c = scn.build_constellation(ch)
    if args.method == "monte-carlo":
        est = mi_monte_carlo(c, mrc_statistics(sy, ch), samples=args.samples,
                             seed=(args.seed if args.seed is not None else scn.seed))
    else:
        est = mi_quadrature(c, mrc_statistics(sy, ch))
    lines = _meta(scn, "mi")
    lines.append("value_bits,std_error_bits,method")
    lines.append(f"{_fmt(est.value_bits)},{_fmt(est.std_error_bits)},{est.method}")
    return lines


_COMMANDS = {
    "rate": cmd_rate,
    "phase-sweep": cmd_phase_sweep,
    "ratio-sweep": cmd_ratio_sweep,
    "order-sweep": cmd_order_sweep,
    "optimize": cmd_optimize,
    "mi": cmd_mi,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbcrate",
        description="Backscatter link rates, phase optimization, and sweeps as CSV.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", type=Path, default=None,
                        help="scenario JSON file (built-in defaults if omitted)")
    common.add_argument("--out", type=Path, default=None,
                        help="output path (stdout if omitted)")
    common.add_argument("--seed", type=int, default=None,
                        help="override the scenario seed")
    common.add_argument("--grid", type=int, default=None,
                        help="override the sweep step count")
    common.add_argument("--override", action="append", default=[],
                        metavar="KEY=VALUE",
                        help="scenario override, e.g. modulation.order=4 (repeatable)")
    for name in _COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "mi":
            p.add_argument("--method", choices=("quadrature", "monte-carlo"),
                           default="quadrature")
            p.add_argument("--samples", type=int, default=100_000,
                           help="Monte Carlo sample count")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scn = load_scenario(args.scenario, args.override)
        lines = _COMMANDS[args.command](scn, args)
    except (ScenarioError, ValueError) as exc:
        print(f"scenario error: {exc}", file=_sys.stderr)
        return 2
    except PrecisionError as exc:
        print(f"numerical-precision failure: {exc} "
              f"(achieved {exc.estimate.value_bits!r} bits)", file=_sys.stderr)
        return 3
    text = "\n".join(lines) + "\n"
    if args.out is None:
        _sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
