"""Mode reports: the exportable bundle of an operator's analysis results.

A ModeReport echoes the operator (weights plus family K) and carries the EQ
counts, priority spectrum, BM statistics and both class labels. CSV holds
the per-level numeric table (one row per gray level, header row, empty
fields for absent channels); JSON mirrors the whole report. Floats are
serialized with repr so parsing an emitted file reproduces the in-memory
numbers exactly.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .classify import BmClass, ClassifierConfig, DEFAULT_CONFIG, EqClass, classify_bm, classify_eq
from .color import L, LinearOperator, gray_brightness
from .families import family_of
from .modes import BmMode, EqMode, compute_modes, priority

CSV_COLUMNS = ("j", "eq_count", "priority", "gray_brightness",
               "mean_lstar", "std_lstar")


@dataclass(frozen=True)
class ModeReport:
    operator: LinearOperator
    eq: EqMode
    bm: BmMode
    priority: np.ndarray
    eq_class: EqClass
    bm_class: BmClass

    def __post_init__(self) -> None:
        if not np.array_equal(self.eq.counts, self.bm.counts):
            raise ValueError("EQ and BM counts disagree")

    @property
    def k(self) -> float:
        return family_of(self.operator)


def analyze_operator(op: LinearOperator, workers: int = 1,
                     config: ClassifierConfig = DEFAULT_CONFIG) -> ModeReport:
    """Compute modes, priority and class labels for one operator."""
    eq, bm = compute_modes(op, workers=workers)
    return ModeReport(op, eq, bm, priority(eq),
                      classify_eq(eq, config), classify_bm(bm, config))


def to_csv(report: ModeReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(CSV_COLUMNS)
    for j in range(L):
        present = bool(report.bm.present[j])
        writer.writerow([
            j,
            int(report.eq.counts[j]),
            repr(float(report.priority[j])),
            repr(gray_brightness(j)),
            repr(float(report.bm.mean_lstar[j])) if present else "",
            repr(float(report.bm.std_lstar[j])) if present else "",
        ])
    return out.getvalue()


def from_csv(text: str) -> tuple[EqMode, BmMode, np.ndarray]:
    """Parse an analyze CSV back into mode data (counts, stats, priority)."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError(f"expected header {CSV_COLUMNS}")
    counts = np.zeros(L, dtype=np.int64)
    prio = np.zeros(L, dtype=np.float64)
    mean = np.full(L, np.nan)
    std = np.full(L, np.nan)
    for row in rows[1:]:
        j = int(row[0])
        counts[j] = int(row[1])
        prio[j] = float(row[2])
        if row[4] != "":
            mean[j] = float(row[4])
            std[j] = float(row[5])
    return EqMode(counts), BmMode(counts, mean, std), prio


def to_json_dict(report: ModeReport) -> dict:
    mean = [float(v) if p else None
            for v, p in zip(report.bm.mean_lstar, report.bm.present)]
    std = [float(v) if p else None
           for v, p in zip(report.bm.std_lstar, report.bm.present)]
    return {
        "operator": {
            "lambda_r": report.operator.lambda_r,
            "lambda_g": report.operator.lambda_g,
            "lambda_b": report.operator.lambda_b,
            "k": report.k,
        },
        "eq_class": report.eq_class.label,
        "bm_class": report.bm_class.kind,
        "eq_counts": [int(c) for c in report.eq.counts],
        "priority": [float(p) for p in report.priority],
        "mean_lstar": mean,
        "std_lstar": std,
    }


def from_json_dict(data: dict) -> ModeReport:
    op = LinearOperator(data["operator"]["lambda_r"],
                        data["operator"]["lambda_g"],
                        data["operator"]["lambda_b"])
    counts = np.asarray(data["eq_counts"], dtype=np.int64)
    mean = np.array([np.nan if v is None else v for v in data["mean_lstar"]])
    std = np.array([np.nan if v is None else v for v in data["std_lstar"]])
    eq = EqMode(counts)
    bm = BmMode(counts, mean, std)
    shape, _, corner = data["eq_class"].partition("-")
    return ModeReport(op, eq, bm, np.asarray(data["priority"]),
                      EqClass(shape, corner or None), BmClass(data["bm_class"]))


def to_json(report: ModeReport) -> str:
    return json.dumps(to_json_dict(report), indent=2)
