#!/usr/bin/env python3
"""Reproduce the whole experiment set as CSV tables under out/.

Runs the default operating point through every sweep: amplitude-keyed phase
sweeps at several orders, BPSK/QPSK phase sweeps, the channel-ratio sweep
that locates the ASK/PSK crossing for each order, and the two order sweeps
(equal-power comparison and fixed-ring convergence).  Plotting is left to
whatever tool consumes the CSVs.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from sbcrate.cli import main  # noqa: E402

OUT = Path(__file__).resolve().parents[1] / "out"


def run(name: str, *argv: str) -> None:
    path = OUT / name
    code = main([*argv, "--out", str(path)])
    if code != 0:
        raise SystemExit(f"{name} failed with exit code {code}")
    print(f"wrote {path}")


def main_script() -> None:
    OUT.mkdir(exist_ok=True)

    # Primary rate versus the amplitude-keying common phase, several orders.
    for m in (2, 4, 8):
        run(f"phase_sweep_ask_M{m}.csv", "phase-sweep",
            "--override", f"modulation.order={m}")

    # Primary rate versus the phase-keying base phase (BPSK and QPSK).
    for m in (2, 4):
        run(f"phase_sweep_psk_M{m}.csv", "phase-sweep",
            "--override", "modulation.scheme=mpsk",
            "--override", f"modulation.order={m}",
            "--override", "modulation.amplitude=0.9")

    # ASK/PSK crossing ratio at equal average power, per order.
    for m in (2, 4, 8):
        run(f"ratio_sweep_M{m}.csv", "ratio-sweep",
            "--override", f"modulation.order={m}",
            "--override", 'sweep={"variable":"channel_ratio","lo":0.02,"hi":3.0,"steps":400}')

    # Rate versus order: equal-power comparison, then fixed-ring convergence.
    run("order_sweep_equal_power.csv", "order-sweep",
        "--override", "modulation.scheme=mpsk",
        "--override", "modulation.amplitude=equal-power",
        "--override", 'sweep={"variable":"order","lo":2,"hi":256,"steps":1}')
    run("order_sweep_alpha09.csv", "order-sweep",
        "--override", "modulation.scheme=mpsk",
        "--override", "modulation.amplitude=0.9",
        "--override", 'sweep={"variable":"order","lo":2,"hi":256,"steps":1}')

    # Single-point reports at the optimum.
    run("rate_ask_M2.csv", "rate")
    run("optimize_ask_M2.txt", "optimize")
    run("mi_ask_M2.csv", "mi")


if __name__ == "__main__":
    main_script()
