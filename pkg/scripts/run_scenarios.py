#!/usr/bin/env python3
"""Run the three bench-emulation scenarios and write their QBER time series.

Usage: python scripts/run_scenarios.py [outdir]
"""

import sys
from pathlib import Path

from pognac.cli import CliInvocation, run
from pognac.presets import REFERENCE_QBER, preset_config, preset_expected_qber


def main():
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out")
    outdir.mkdir(parents=True, exist_ok=True)
    for name in ("fig2", "fig3", "fig4"):
        out = outdir / f"{name}.csv"
        print(f"=== {name} -> {out}")
        status = run(CliInvocation(scenario=name, output_path=str(out)))
        if status != 0:
            sys.exit(status)
        for (preset, label), target in REFERENCE_QBER.items():
            if preset == name:
                exp = preset_expected_qber(preset_config(name), label)
                print(f"    {label}: analytic expectation {exp:.4%}, emulated target {target:.2%}")
    print(f"done; series written to {outdir}/")


if __name__ == "__main__":
    main()
