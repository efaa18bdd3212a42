#!/usr/bin/env python3
"""Side-by-side drift study: loop encoder vs inline modulator under a slow
sinusoidal loop-phase drift (amplitude pi, period 600 s).

Writes the two windowed QBER series and prints where the inline reference
degrades while the loop encoder stays put.

Usage: python scripts/drift_study.py [outdir]
"""

import sys
from pathlib import Path

from pognac.presets import drift_config
from pognac.runner import drift_comparison


def main():
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out")
    outdir.mkdir(parents=True, exist_ok=True)
    config = drift_config()
    paired = drift_comparison(config, config.encoder.drift)

    (outdir / "drift_pognac.csv").write_text(paired.pognac.series.to_csv())
    (outdir / "drift_inline.csv").write_text(paired.inline.series.to_csv())

    def worst_window(series, label):
        rows = [r for r in series.rows if r.sent_label == label and r.n_correct + r.n_error > 0]
        return max(rows, key=lambda r: r.qber)

    for label in ("H", "V"):
        w_loop = worst_window(paired.pognac.series, label)
        w_inline = worst_window(paired.inline.series, label)
        print(
            f"{label}: worst loop-encoder window qber {w_loop.qber:.4f} @ {w_loop.window_start_s:.0f} s; "
            f"worst inline window qber {w_inline.qber:.4f} @ {w_inline.window_start_s:.0f} s"
        )
    loop_mean = {k: s.qber for k, s in paired.pognac.summary.items()}
    inline_mean = {k: s.qber for k, s in paired.inline.summary.items()}
    print(f"loop-encoder mean QBER:   {loop_mean}")
    print(f"inline-reference mean QBER: {inline_mean}")
    print(f"series written to {outdir}/drift_pognac.csv and {outdir}/drift_inline.csv")


if __name__ == "__main__":
    main()
