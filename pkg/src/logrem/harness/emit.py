"""Result records and their CSV/JSON/plot-file emission.

The CSV column order is fixed and documented: experiment, n, beta, sigma1,
sigma2, alpha, u, gamma, q, estimate, se, theory, seed, wallclockMs, followed
by the two echo columns roundedAlpha and theoryTag.  Floats are written with
repr, which round-trips exactly.  Rows without a limiting prediction carry an
empty theory cell and the explicit marker tag "no-limit-prediction".
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from importlib import resources

CSV_COLUMNS = [
    "experiment",
    "n",
    "beta",
    "sigma1",
    "sigma2",
    "alpha",
    "u",
    "gamma",
    "q",
    "estimate",
    "se",
    "theory",
    "seed",
    "wallclockMs",
    "roundedAlpha",
    "theoryTag",
]

NO_PREDICTION = "no-limit-prediction"


@dataclass
class ResultRecord:
    experiment: str
    estimate: float
    se: float | None = None
    n: int | None = None
    beta: float | None = None
    sigma1: float | None = None
    sigma2: float | None = None
    alpha: float | None = None
    u: float | None = None
    gamma: float | None = None
    q: float | None = None
    theory: float | None = None
    seed: int | None = None
    wallclock_ms: float | None = None
    rounded_alpha: float | None = None
    theory_tag: str = field(default="")
    plot_x: float | None = None

    def finalized_tag(self) -> str:
        if self.theory is None:
            return NO_PREDICTION
        return self.theory_tag

    def as_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "n": self.n,
            "beta": self.beta,
            "sigma1": self.sigma1,
            "sigma2": self.sigma2,
            "alpha": self.alpha,
            "u": self.u,
            "gamma": self.gamma,
            "q": self.q,
            "estimate": self.estimate,
            "se": self.se,
            "theory": self.theory,
            "seed": self.seed,
            "wallclockMs": self.wallclock_ms,
            "roundedAlpha": self.rounded_alpha,
            "theoryTag": self.finalized_tag(),
        }


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        row = rec.as_dict()
        writer.writerow([_cell(row[col]) for col in CSV_COLUMNS])
    return buf.getvalue()


def records_to_json(records) -> str:
    return json.dumps([rec.as_dict() for rec in records], indent=2) + "\n"


def parse_csv(text: str):
    """Inverse of records_to_csv for the numeric fields (round-trip exact)."""
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    out = []
    for row in body:
        out.append({col: (None if cell == "" else cell) for col, cell in zip(header, row)})
    return out


def plot_rows(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "y", "yerr", "theory"])
    for rec in records:
        if rec.plot_x is None:
            continue
        writer.writerow(
            [_cell(rec.plot_x), _cell(rec.estimate), _cell(rec.se), _cell(rec.theory)]
        )
    return buf.getvalue()


def emit(records, fmt: str, path: str, experiment: str) -> list[str]:
    """Write the result file (or stdout when path is empty) plus plot data.

    Returns the paths written.  With an empty path the records go to stdout
    and no plot file is produced.
    """
    if not records:
        raise ValueError("nothing to emit")
    text = records_to_csv(records) if fmt == "csv" else records_to_json(records)
    if not path:
        sys.stdout.write(text)
        return []
    written = []
    main_path = path if path.endswith("." + fmt) else f"{path}.{fmt}"
    with open(main_path, "w") as fh:
        fh.write(text)
    written.append(main_path)
    plot_text = plot_rows(records)
    if plot_text.count("\n") > 1:
        directory = os.path.dirname(main_path)
        plot_path = os.path.join(directory, f"{experiment}.plot.csv") if directory else f"{experiment}.plot.csv"
        with open(plot_path, "w") as fh:
            fh.write(plot_text)
        written.append(plot_path)
    return written


def result_schema() -> dict:
    """The shipped JSON schema for result files."""
    with resources.files("logrem.harness").joinpath("result_schema.json").open() as fh:
        return json.load(fh)
