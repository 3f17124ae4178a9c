#!/usr/bin/env python3
"""Render figures from squeezecool sweep CSVs.

    plot_fig.py --kind fig2_like --csv single_sweep.csv --out fig2.svg
    plot_fig.py --kind fig3a_like --csv continuum_sweep.csv --out fig3a.svg
    plot_fig.py --kind fig3b_like --csv continuum_sweep.csv --out fig3b.svg

fig2_like: squeezing (dB) against eta2/eta1, one curve per Q, with the
ideal-limit curve dashed.  fig3a_like: occupation in the squeezed-pair basis
against the offset frequency nu, one curve per Q.  fig3b_like: squeezing (dB)
against nu, one curve per Q.

The CSV header must match the documented sweep schema exactly; plotted
coordinates are taken verbatim from the file (no sorting, no rescaling).
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

SINGLE_SWEEP_HEADER = [
    "eta2_over_eta1", "Q", "kappa", "gamma_sq_re", "var_x", "var_p", "S_db",
    "S_db_ideal", "occ_bare", "occ_D", "flag_gsq_over_gammaq", "flag_trunc",
]
CONTINUUM_SWEEP_HEADER = [
    "nu", "Q", "u_nu", "v_nu", "gamma_sq_re", "gamma_sq_im", "occ_D", "occ_Dbar",
    "var_Xnu", "S_db", "S_db_fig3_convention", "flags",
]

#: kind -> (expected header, x column, y column, axis labels)
KINDS = {
    "fig2_like": (SINGLE_SWEEP_HEADER, "eta2_over_eta1", "S_db",
                  (r"$\eta_2/\eta_1$", "squeezing S (dB below vacuum)")),
    "fig3a_like": (CONTINUUM_SWEEP_HEADER, "nu", "occ_D",
                   (r"$\nu$ (GHz)", "occupation in the squeezed-pair basis")),
    "fig3b_like": (CONTINUUM_SWEEP_HEADER, "nu", "S_db",
                   (r"$\nu$ (GHz)", "squeezing S (dB below vacuum)")),
}


class SchemaError(ValueError):
    pass


@dataclass
class PlotJob:
    csv_path: Path
    kind: str
    out_path: Path

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}")


@dataclass
class RenderResult:
    out_path: Path
    curves: dict = field(default_factory=dict)  # label -> (x list, y list)


def load_rows(path: Path, expected_header: list[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if header != expected_header:
            raise SchemaError(
                f"{path}: header {header!r} does not match the documented schema")
        rows = [dict(zip(header, line)) for line in reader if line]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def render(job: PlotJob) -> RenderResult:
    """Draw the requested figure; returns the plotted coordinates per curve."""
    header, xcol, ycol, (xlabel, ylabel) = KINDS[job.kind]
    rows = load_rows(job.csv_path, header)

    by_q: dict[str, list[dict]] = {}
    for row in rows:
        by_q.setdefault(row["Q"], []).append(row)

    fig, ax = plt.subplots(figsize=(4.2, 3.2), dpi=150)
    result = RenderResult(out_path=job.out_path)
    for q_label, q_rows in by_q.items():
        xs = [float(r[xcol]) for r in q_rows]
        ys = [float(r[ycol]) for r in q_rows]
        label = f"Q = {float(q_label):g}"
        ax.plot(xs, ys, lw=1.3, label=label)
        result.curves[label] = (xs, ys)

    if job.kind == "fig2_like":
        # ideal squeezed-vacuum reference (identical for every Q slice)
        first = next(iter(by_q.values()))
        xs = [float(r[xcol]) for r in first]
        ys = [float(r["S_db_ideal"]) for r in first]
        ax.plot(xs, ys, "k:", lw=1.2, label="ideal")
        result.curves["ideal"] = (xs, ys)

    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if job.kind == "fig3a_like":
        ax.set_yscale("log")
    ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    job.out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(job.out_path)
    plt.close(fig)
    return result


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--kind", required=True, choices=sorted(KINDS))
    parser.add_argument("--csv", required=True, type=Path)
    parser.add_argument("--out", required=True, type=Path)
    args = parser.parse_args(argv)
    try:
        render(PlotJob(args.csv, args.kind, args.out))
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
