"""Regression from speckle features to OCR suspect counts, plus the
correction-work estimate.

The model is plain least squares with an intercept: suspects are
regressed on the low and high speckle counts per page.  Suspect and
error counts come from outside (an operator running an OCR engine);
this module only consumes them via the records CSV.
"""

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .cluster import PageFeatures
from .errors import DegenerateDesignError, FormatError, InsufficientDataError

# Relative weight of a false positive in the correction-work estimate;
# false negatives and plain errors count full.
FALSE_POS_WEIGHT = 0.7


@dataclass(frozen=True)
class PageRecord:
    """One page's features joined with externally observed counts."""

    page_id: str
    features: PageFeatures
    suspects: int
    false_pos: int = 0
    false_neg: int = 0

    def __post_init__(self):
        if self.suspects < 0 or self.false_pos < 0 or self.false_neg < 0:
            raise ValueError(f"counts must be non-negative in record {self.page_id!r}")


@dataclass(frozen=True)
class RegressionModel:
    beta0: float
    beta_bsfl: float
    beta_bsfh: float
    r_squared: float
    n: int


@dataclass(frozen=True)
class WorkEstimate:
    cost: float
    e: int
    f_plus: int
    f_minus: int


def fit(records) -> RegressionModel:
    """Least-squares fit of suspects on (1, bsfl, bsfh).

    Needs at least 3 rows and a full-rank design; r_squared is
    1 - SSres/SStot (1.0 when the response has no variance)."""
    records = list(records)
    if len(records) < 3:
        raise InsufficientDataError(
            f"insufficient data: need at least 3 pages, got {len(records)}"
        )
    X = np.array(
        [[1.0, r.features.bsfl, r.features.bsfh] for r in records], dtype=np.float64
    )
    y = np.array([r.suspects for r in records], dtype=np.float64)
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise DegenerateDesignError(
            "degenerate design: bsfl/bsfh values do not span the model "
            "(are all pages identical?)"
        )
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    residuals = y - X @ beta
    ss_res = float(residuals @ residuals)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    r_squared = min(1.0, max(0.0, r_squared))
    return RegressionModel(
        beta0=float(beta[0]),
        beta_bsfl=float(beta[1]),
        beta_bsfh=float(beta[2]),
        r_squared=r_squared,
        n=len(records),
    )


def predict_suspects(model: RegressionModel, feats: PageFeatures) -> float:
    """Point prediction; may be negative, callers clamp if they care."""
    return model.beta0 + model.beta_bsfl * feats.bsfl + model.beta_bsfh * feats.bsfh


def work_cost(e: int, f_plus: int, f_minus: int) -> WorkEstimate:
    """Estimated human correction effort for a page with ``e`` errors,
    ``f_plus`` false positives, and ``f_minus`` false negatives."""
    if e < 0 or f_plus < 0 or f_minus < 0:
        raise ValueError(f"counts must be non-negative, got ({e}, {f_plus}, {f_minus})")
    return WorkEstimate(
        cost=e + FALSE_POS_WEIGHT * f_plus + f_minus,
        e=e,
        f_plus=f_plus,
        f_minus=f_minus,
    )


# ---------------------------------------------------------------------------
# Scatter CSV (plot data for external tools)


def scatter_export(pairs, labels) -> bytes:
    """CSV of labeled (x, y) pairs, order preserved."""
    pairs = list(pairs)
    labels = list(labels)
    if len(pairs) != len(labels):
        raise ValueError(f"{len(pairs)} pairs but {len(labels)} labels")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["label", "x", "y"])
    for label, (x, y) in zip(labels, pairs):
        writer.writerow([label, repr(float(x)), repr(float(y))])
    return out.getvalue().encode("utf-8")


def read_scatter(data: bytes) -> tuple[list[tuple[float, float]], list[str]]:
    reader = csv.reader(io.StringIO(data.decode("utf-8")))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("empty scatter CSV") from None
    if header != ["label", "x", "y"]:
        raise FormatError(f"bad scatter CSV header: {header!r}")
    pairs, labels = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise FormatError(f"scatter CSV line {lineno}: expected 3 fields")
        try:
            pairs.append((float(row[1]), float(row[2])))
        except ValueError:
            raise FormatError(f"scatter CSV line {lineno}: non-numeric value") from None
        labels.append(row[0])
    return pairs, labels


# ---------------------------------------------------------------------------
# Records CSV (feature columns filled by the pipeline, count columns by
# the operator) and model JSON.

RECORDS_CSV_HEADER = [
    "page_id",
    "bsfl",
    "bsfh",
    "total_black_clusters",
    "total_black_pixels",
    "suspects",
    "false_pos",
    "false_neg",
]


def read_records(data: bytes) -> list[PageRecord]:
    reader = csv.reader(io.StringIO(data.decode("utf-8")))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("empty records CSV") from None
    if header != RECORDS_CSV_HEADER:
        raise FormatError(f"bad records CSV header: {header!r}")
    records = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(RECORDS_CSV_HEADER):
            raise FormatError(
                f"records CSV line {lineno}: expected {len(RECORDS_CSV_HEADER)} fields, "
                f"got {len(row)}"
            )
        try:
            values = [int(v) for v in row[1:]]
        except ValueError:
            raise FormatError(f"records CSV line {lineno}: non-integer value") from None
        try:
            records.append(
                PageRecord(
                    page_id=row[0],
                    features=PageFeatures(*values[:4]),
                    suspects=values[4],
                    false_pos=values[5],
                    false_neg=values[6],
                )
            )
        except ValueError as exc:
            raise FormatError(f"records CSV line {lineno}: {exc}") from None
    return records


def write_records(records) -> bytes:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(RECORDS_CSV_HEADER)
    for r in records:
        writer.writerow(
            [
                r.page_id,
                r.features.bsfl,
                r.features.bsfh,
                r.features.total_black_clusters,
                r.features.total_black_pixels,
                r.suspects,
                r.false_pos,
                r.false_neg,
            ]
        )
    return out.getvalue().encode("utf-8")


def model_to_json(model: RegressionModel) -> str:
    doc = {
        "beta0": model.beta0,
        "beta_bsfl": model.beta_bsfl,
        "beta_bsfh": model.beta_bsfh,
        "r_squared": model.r_squared,
        "n": model.n,
    }
    return json.dumps(doc, indent=2) + "\n"


def model_from_json(text: str | bytes) -> RegressionModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"model is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FormatError("model must be a JSON object")
    try:
        return RegressionModel(
            beta0=float(doc["beta0"]),
            beta_bsfl=float(doc["beta_bsfl"]),
            beta_bsfh=float(doc["beta_bsfh"]),
            r_squared=float(doc["r_squared"]),
            n=int(doc["n"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad model JSON: {exc}") from None
