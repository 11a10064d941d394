"""Windowed compactness estimators with three-valued verdicts.

Every criterion here is a limit of window suprema.  The limits are
reported as grid evaluations plus a stabilization rule: the grid is
stabilized when its last ``window`` values lie within ``tolerance`` of
each other, and the limit estimate is the final grid value.  Verdicts
are three-valued because finite windows cannot decide the infinite
objects: ``compact`` requires the upper bound stabilized below the
tolerance, ``noncompact`` the lower bound stabilized above it, and
everything else is ``inconclusive``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .coefficients import FractionalOrder
from .errors import CostGuardError
from .matrix_domain import (
    SUBSET_GUARD_ENV,
    MatrixSource,
    _enumerate_subsets,
    _greedy_subset,
    _pad_rows,
    hat_matrix,
    subset_guard_limit,
)
from .serialize import format_float
from .transforms import Exponent, lq_norm

VERDICT_COMPACT = "compact"
VERDICT_NONCOMPACT = "noncompact"
VERDICT_INCONCLUSIVE = "inconclusive"

_WINDOW_NOTE = "finite-window evidence only"


@dataclass(frozen=True)
class StabilizationPolicy:
    """Grid stabilization rule: last ``window`` values within ``tolerance``."""

    window: int = 4
    tolerance: float = 1e-8

    def __post_init__(self):
        if not isinstance(self.window, int) or self.window < 2:
            raise ValueError(f"stabilization window must be an integer >= 2, got {self.window!r}")
        if not (self.tolerance > 0.0):
            raise ValueError(f"stabilization tolerance must be positive, got {self.tolerance!r}")


@dataclass(frozen=True)
class LimitGrid:
    """Evaluations of a window supremum along a truncation-parameter grid."""

    r_values: tuple
    values: tuple
    stabilization_window: int
    tolerance: float

    def __post_init__(self):
        if len(self.r_values) != len(self.values) or not self.r_values:
            raise ValueError("grid needs matching, nonempty r_values and values")
        for a, b in zip(self.r_values, self.r_values[1:]):
            if b <= a:
                raise ValueError("grid r_values must be strictly increasing")
        for v in self.values:
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0.0):
                raise ValueError(f"grid values must be finite and nonnegative, got {v!r}")

    @property
    def stabilized(self) -> bool:
        w = self.stabilization_window
        if len(self.values) < w:
            return False
        tail = self.values[-w:]
        return max(tail) - min(tail) <= self.tolerance

    @property
    def estimate(self) -> float:
        return float(self.values[-1])

    def to_json_dict(self) -> dict:
        return {
            "r_values": list(self.r_values),
            "values": [float(v) for v in self.values],
            "stabilization_window": self.stabilization_window,
            "tolerance": float(self.tolerance),
            "stabilized": self.stabilized,
            "estimate": self.estimate,
        }


@dataclass(frozen=True)
class AlphaHatEstimate:
    """Estimated column limit of the transformed window."""

    k: int
    samples: tuple
    estimate: float
    converged: bool


@dataclass(frozen=True)
class CompactnessReport:
    criterion_id: str
    grid: LimitGrid
    lower_value: float
    upper_value: float
    verdict: str
    notes: str

    def __post_init__(self):
        if self.lower_value > self.upper_value:
            raise ValueError("lower_value must not exceed upper_value")

    def to_json_dict(self) -> dict:
        return {
            "criterion": self.criterion_id,
            "lower": float(self.lower_value),
            "upper": float(self.upper_value),
            "verdict": self.verdict,
            "grid": self.grid.to_json_dict(),
            "notes": self.notes,
        }

    def render_table(self) -> str:
        lines = [
            f"criterion   {self.criterion_id}",
            f"verdict     {self.verdict}",
            f"lower       {format_float(self.lower_value)}",
            f"upper       {format_float(self.upper_value)}",
            f"stabilized  {'yes' if self.grid.stabilized else 'no'}"
            f" (window {self.grid.stabilization_window},"
            f" tolerance {format_float(self.grid.tolerance)})",
            f"{'r':>8}  value",
        ]
        for r, v in zip(self.grid.r_values, self.grid.values):
            lines.append(f"{r:>8}  {format_float(v)}")
        lines.append(f"notes       {self.notes}")
        return "\n".join(lines) + "\n"


def _verdict(grid: LimitGrid, lower: float, upper: float) -> str:
    if not grid.stabilized:
        return VERDICT_INCONCLUSIVE
    if upper < grid.tolerance:
        return VERDICT_COMPACT
    if lower > grid.tolerance:
        return VERDICT_NONCOMPACT
    return VERDICT_INCONCLUSIVE


def _check_grid(name: str, grid, *, upper_exclusive: int | None = None) -> list[int]:
    try:
        values = [int(v) for v in grid]
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be a list of integers") from None
    if not values:
        raise ValueError(f"{name} must be nonempty")
    for a, b in zip(values, values[1:]):
        if b <= a:
            raise ValueError(f"{name} must be strictly increasing")
    if values[0] < 0:
        raise ValueError(f"{name} entries must be nonnegative")
    if upper_exclusive is not None and values[-1] >= upper_exclusive:
        raise ValueError(
            f"{name} entries must stay below {upper_exclusive} so the window can populate the grid"
        )
    return values


def _float_rows(A: MatrixSource, order, row_count: int, column_bound: int):
    window = hat_matrix(A, order, row_count, column_bound)
    return window.as_float_rows()


def _suffix_max(values) -> list[float]:
    out = [0.0] * len(values)
    best = 0.0
    for i in range(len(values) - 1, -1, -1):
        best = max(best, values[i])
        out[i] = best
    return out


def mnc_c0(A: MatrixSource, order, p, *, r_grid, row_count, column_bound,
           stabilization: StabilizationPolicy = StabilizationPolicy()) -> CompactnessReport:
    """Noncompactness estimator toward the null-sequence target.

    Grid value at ``r``: sup over rows ``n >= r`` in the window of the
    conjugate-index row norm.  The estimator is an identity, so lower
    and upper coincide.  ``p = 1`` switches the row norm to a sup over
    columns.
    """
    order = FractionalOrder.of(order)
    q = Exponent.of(p).q
    grid = _check_grid("r_grid", r_grid, upper_exclusive=row_count)
    rows = _float_rows(A, order, row_count, column_bound)
    norms = [lq_norm(row, q) for row in rows]
    suffix = _suffix_max(norms)
    values = [suffix[r] for r in grid]
    limit = LimitGrid(tuple(grid), tuple(values), stabilization.window, stabilization.tolerance)
    est = limit.estimate
    notes = (
        f"sup of row norms (q={format_float(q)}) over rows [r, {row_count}); "
        f"{_WINDOW_NOTE}"
    )
    return CompactnessReport("MNC-C0", limit, est, est, _verdict(limit, est, est), notes)


def estimate_alpha_hat(A: MatrixSource, order, *, row_count, column_bound,
                       stabilization: StabilizationPolicy = StabilizationPolicy()) -> list[AlphaHatEstimate]:
    """Per-column limits of the transformed window, from the trailing rows."""
    rows = _float_rows(A, FractionalOrder.of(order), row_count, column_bound)
    w = stabilization.window
    eps = stabilization.tolerance
    out = []
    for k in range(column_bound):
        samples = [row[k] if k < len(row) else 0.0 for row in rows]
        tail = samples[-w:]
        estimate = sum(tail) / len(tail)
        converged = len(samples) >= w and all(abs(s - estimate) <= eps for s in tail)
        kept = samples[-2 * w:]
        out.append(AlphaHatEstimate(k, tuple(kept), estimate, converged))
    return out


def mnc_c(A: MatrixSource, order, p, *, r_grid, row_count, column_bound,
          stabilization: StabilizationPolicy = StabilizationPolicy()) -> CompactnessReport:
    """Noncompactness bounds toward the convergent-sequence target.

    Column limits are estimated first on ``[0, column_bound)`` (assumed
    zero beyond); grid value at ``r`` is the sup over rows ``n >= r`` of
    the conjugate-index norm of the row minus the column-limit vector.
    The true value lies between half the stabilized limit and the limit.
    Unconverged columns force an inconclusive verdict but leave the
    value grid intact.
    """
    order = FractionalOrder.of(order)
    q = Exponent.of(p).q
    grid = _check_grid("r_grid", r_grid, upper_exclusive=row_count)
    rows = _float_rows(A, order, row_count, column_bound)
    alpha = estimate_alpha_hat(A, order, row_count=row_count, column_bound=column_bound,
                               stabilization=stabilization)
    alpha_vec = [a.estimate for a in alpha]
    bad = [a.k for a in alpha if not a.converged]
    norms = []
    for row in rows:
        width = max(len(row), column_bound)
        diff = [
            (row[k] if k < len(row) else 0.0) - (alpha_vec[k] if k < column_bound else 0.0)
            for k in range(width)
        ]
        norms.append(lq_norm(diff, q))
    suffix = _suffix_max(norms)
    values = [suffix[r] for r in grid]
    limit = LimitGrid(tuple(grid), tuple(values), stabilization.window, stabilization.tolerance)
    est = limit.estimate
    lower, upper = est / 2.0, est
    verdict = _verdict(limit, lower, upper)
    notes = (
        f"sup of row-minus-column-limit norms (q={format_float(q)}) over rows [r, {row_count}); "
        f"column limits on [0, {column_bound}), assumed zero beyond; {_WINDOW_NOTE}"
    )
    if bad:
        verdict = VERDICT_INCONCLUSIVE
        notes += f"; column limits unconverged at k={bad}"
    return CompactnessReport("MNC-C", limit, lower, upper, verdict, notes)


def mnc_l1(A: MatrixSource, order, p, *, r_grid, row_count, column_bound,
           method: str = "exhaustive",
           stabilization: StabilizationPolicy = StabilizationPolicy()) -> CompactnessReport:
    """Noncompactness bounds toward the absolutely-summable target.

    Grid value at ``r``: sup over nonempty subsets of rows
    ``{r+1, ..., row_count-1}`` of the conjugate-index norm of the
    summed rows.  The true value lies between the stabilized limit and
    four times it.  ``greedy`` replaces the exhaustive supremum by a
    monotone lower bound.
    """
    order = FractionalOrder.of(order)
    q = Exponent.of(p).q
    grid = _check_grid("r_grid", r_grid, upper_exclusive=row_count - 1)
    rows = _float_rows(A, order, row_count, column_bound)
    pool = _pad_rows(rows[1:])  # subset members always exceed r >= 0
    pool_size = row_count - 1
    if method == "exhaustive":
        limit_rows = subset_guard_limit()
        if pool_size > limit_rows:
            raise CostGuardError(
                f"exhaustive subset enumeration over {pool_size} rows exceeds the "
                f"limit of {limit_rows} (override via {SUBSET_GUARD_ENV})"
            )
        _, _, by_min = _enumerate_subsets(pool, q, want_by_min=True)
        suffix = _suffix_max(by_min.tolist())  # by_min[j] covers original row j+1
        values = [suffix[r] if r < pool_size else 0.0 for r in grid]
    elif method == "greedy":
        raw = [_greedy_subset(pool, q, list(range(r, pool_size)))[0] for r in grid]
        values = _suffix_max(raw)  # a certificate found at larger r is valid at smaller r
    else:
        raise ValueError(f'method must be "exhaustive" or "greedy", got {method!r}')
    limit = LimitGrid(tuple(grid), tuple(values), stabilization.window, stabilization.tolerance)
    est = limit.estimate
    lower, upper = est, 4.0 * est
    notes = (
        f"sup over nonempty subsets of rows (r, {row_count}) of the summed-row norm "
        f"(q={format_float(q)}, method={method}); {_WINDOW_NOTE}"
    )
    return CompactnessReport("MNC-L1", limit, lower, upper, _verdict(limit, lower, upper), notes)


def _column_tail_report(A, order, q, criterion_id, *, r_grid, row_count, column_bound,
                        stabilization) -> CompactnessReport:
    grid = _check_grid("r_grid", r_grid)
    rows = _float_rows(A, FractionalOrder.of(order), row_count, column_bound)
    values = []
    for r in grid:
        best = 0.0
        for row in rows:
            v = lq_norm(row[r + 1:], q)
            if v > best:
                best = v
        values.append(best)
    limit = LimitGrid(tuple(grid), tuple(values), stabilization.window, stabilization.tolerance)
    est = limit.estimate
    notes = (
        f"sup over rows [0, {row_count}) of the column-tail norm beyond index r "
        f"(q={format_float(q)}); {_WINDOW_NOTE}"
    )
    return CompactnessReport(criterion_id, limit, est, est, _verdict(limit, est, est), notes)


def criterion_linf_target(A: MatrixSource, order, p, *, r_grid, row_count, column_bound,
                          stabilization: StabilizationPolicy = StabilizationPolicy()) -> CompactnessReport:
    """Compactness criterion toward the bounded target: column tails vanish.

    Grid value at ``r``: sup over window rows of the conjugate-index
    norm restricted to columns ``k > r``.  Requires ``1 < p < inf``.
    """
    p = Exponent.of(p)
    if p.p <= 1.0 or p.is_inf:
        raise ValueError(f"p must satisfy 1 < p < inf, got {p.label()}")
    return _column_tail_report(A, order, p.q, "T3", r_grid=r_grid, row_count=row_count,
                               column_bound=column_bound, stabilization=stabilization)


def criterion_linf_domain(A: MatrixSource, order, *, r_grid, row_count, column_bound,
                          stabilization: StabilizationPolicy = StabilizationPolicy()) -> CompactnessReport:
    """Bounded-domain, bounded-target criterion: absolute column tails vanish."""
    return _column_tail_report(A, order, 1.0, "LINF-DOMAIN", r_grid=r_grid, row_count=row_count,
                               column_bound=column_bound, stabilization=stabilization)


def sargent_criterion(A: MatrixSource, order, *, m_grid, row_count, column_window,
                      stabilization: StabilizationPolicy = StabilizationPolicy()) -> CompactnessReport:
    """Uniform column-pair criterion for the summable domain, bounded target.

    For each column pair the sup over all window rows of the entry
    difference must be reached uniformly by the sups over rows
    ``0..m``.  Grid value at ``m``: the largest remaining defect over
    pairs from ``[0, column_window)``.  The defect is nonnegative and
    nonincreasing in ``m``.
    """
    order = FractionalOrder.of(order)
    grid = _check_grid("m_grid", m_grid, upper_exclusive=row_count)
    if not isinstance(column_window, int) or column_window < 2:
        raise ValueError(f"column_window must be an integer >= 2, got {column_window!r}")
    rows = _float_rows(A, order, row_count, column_window)
    C = _pad_rows(rows, width=column_window)
    defects = np.zeros(len(grid))
    for k1 in range(column_window - 1):
        diffs = np.abs(C[:, k1 + 1:] - C[:, k1: k1 + 1])
        full = diffs.max(axis=0)
        running = np.maximum.accumulate(diffs, axis=0)
        for gi, m in enumerate(grid):
            gap = (full - running[m]).max()
            if gap > defects[gi]:
                defects[gi] = gap
    values = [float(v) for v in defects]
    limit = LimitGrid(tuple(grid), tuple(values), stabilization.window, stabilization.tolerance)
    est = limit.estimate
    notes = (
        f"uniformity defect of column-pair sups, pairs from [0, {column_window}), "
        f"truncated sup over rows [0, m]; {_WINDOW_NOTE}"
    )
    return CompactnessReport("T7", limit, est, est, _verdict(limit, est, est), notes)


_TABLE_ITEMS = {1, 2, 3, 4, 5, 6, 7}


def table_criterion(item: int, A: MatrixSource, order, *, p=None, r_grid=None, m_grid=None,
                    row_count, column_bound, method: str = "exhaustive",
                    stabilization: StabilizationPolicy = StabilizationPolicy()) -> CompactnessReport:
    """Dispatch the numbered compactness conditions T1..T7.

    Items 1-4 take the domain index ``p`` with ``1 < p < inf``; items
    5-7 fix the summable domain.  The report is relabeled with the
    table identifier.
    """
    if item not in _TABLE_ITEMS:
        raise ValueError(f"table item must be in {sorted(_TABLE_ITEMS)}, got {item!r}")
    if item in (1, 2, 3, 4):
        if p is None:
            raise ValueError(f"table item {item} requires p")
        pe = Exponent.of(p)
        if pe.p <= 1.0 or pe.is_inf:
            raise ValueError(f"table item {item} requires 1 < p < inf, got {pe.label()}")
    if item == 7:
        if m_grid is None:
            raise ValueError("table item 7 requires m_grid")
    elif r_grid is None:
        raise ValueError(f"table item {item} requires r_grid")

    if item == 1:
        report = mnc_c0(A, order, p, r_grid=r_grid, row_count=row_count,
                        column_bound=column_bound, stabilization=stabilization)
    elif item == 2:
        report = mnc_c(A, order, p, r_grid=r_grid, row_count=row_count,
                       column_bound=column_bound, stabilization=stabilization)
    elif item == 3:
        report = criterion_linf_target(A, order, p, r_grid=r_grid, row_count=row_count,
                                       column_bound=column_bound, stabilization=stabilization)
    elif item == 4:
        report = mnc_l1(A, order, p, r_grid=r_grid, row_count=row_count,
                        column_bound=column_bound, method=method, stabilization=stabilization)
    elif item == 5:
        report = mnc_c0(A, order, 1, r_grid=r_grid, row_count=row_count,
                        column_bound=column_bound, stabilization=stabilization)
    elif item == 6:
        report = mnc_c(A, order, 1, r_grid=r_grid, row_count=row_count,
                       column_bound=column_bound, stabilization=stabilization)
    else:
        return sargent_criterion(A, order, m_grid=m_grid, row_count=row_count,
                                 column_window=column_bound, stabilization=stabilization)
    return dataclasses.replace(report, criterion_id=f"T{item}")
