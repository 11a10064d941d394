"""Finite representations of infinite matrices and their transformed windows.

A :class:`MatrixSource` yields one finitely stored row at a time.  The
transformed window applies the upper-triangular dual convolution (the
inverse-order coefficients) to every row; the result satisfies
``A x == Ahat y`` entrywise whenever ``y`` is the forward transform of
``x``, which is the integration contract the tests pin down.

Operator norms toward bounded-sequence targets are sups of
conjugate-index row norms; the absolutely-summable target requires a
supremum over nonempty row subsets, provided here both as exhaustive
enumeration (cost-guarded) and as a sign-greedy lower bound.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coefficients import FractionalOrder, raw_prefix
from .errors import CostGuardError, SourceError
from .transforms import Exponent, lq_norm, _is_exact_number

KIND_DENSE = "dense-window"
KIND_BANDED = "banded"
KIND_GENERATOR = "generator"

GENERATOR_RULES = ("identity", "diagonal", "finite-rows", "row-scaled-shift")

DEFAULT_SUBSET_GUARD = 22
SUBSET_GUARD_ENV = "FRACSEQ_MAX_SUBSET_ROWS"

_CHUNK = 1 << 14


def subset_guard_limit() -> int:
    raw = os.environ.get(SUBSET_GUARD_ENV)
    if raw is None:
        return DEFAULT_SUBSET_GUARD
    try:
        limit = int(raw)
    except ValueError:
        raise ValueError(f"{SUBSET_GUARD_ENV} must be an integer, got {raw!r}") from None
    if limit < 1:
        raise ValueError(f"{SUBSET_GUARD_ENV} must be positive, got {limit}")
    return limit


def _check_row_values(values, n: int) -> list:
    out = list(values)
    for k, v in enumerate(out):
        if _is_exact_number(v):
            continue
        if isinstance(v, float) and math.isfinite(v):
            continue
        raise SourceError(f"row {n} entry {k} is not a finite number: {v!r}")
    return out


class MatrixSource:
    """A row-indexed description of an infinite matrix.

    ``row(n)`` returns the finitely stored entries of row ``n`` for
    columns ``[0, len(result))``.  When ``declared_column_decay`` holds,
    the zero tail beyond the stored entries is the true tail; otherwise
    the matrix is only known on the stored window.  ``declared_row_bound``
    asserts that rows at or past the bound are identically zero.
    """

    def __init__(self, kind, row_fn, *, row_bound=None, column_decay=True, payload=None):
        if kind not in (KIND_DENSE, KIND_BANDED, KIND_GENERATOR):
            raise ValueError(f"unknown matrix kind {kind!r}")
        if row_bound is not None and (not isinstance(row_bound, int) or row_bound < 0):
            raise ValueError(f"row_bound must be a nonnegative integer, got {row_bound!r}")
        self.kind = kind
        self.declared_row_bound = row_bound
        self.declared_column_decay = bool(column_decay)
        self._row_fn = row_fn
        self._payload = payload or {}

    def row(self, n: int) -> list:
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise ValueError(f"row index must be a nonnegative integer, got {n!r}")
        if self.declared_row_bound is not None and n >= self.declared_row_bound:
            return []
        try:
            values = self._row_fn(n)
        except (ValueError, SourceError):
            raise
        except Exception as exc:
            raise SourceError(f"matrix source failed at row {n}: {exc}") from exc
        return _check_row_values(values, n)

    # -- constructors ---------------------------------------------------

    @classmethod
    def dense_window(cls, rows, *, row_bound=None, column_decay=True) -> "MatrixSource":
        stored = [list(r) for r in rows]
        if row_bound is not None:
            for n in range(row_bound, len(stored)):
                if any(v != 0 for v in stored[n]):
                    raise ValueError(f"row {n} is nonzero but row_bound={row_bound} declares it zero")

        def row_fn(n):
            if n < len(stored):
                return list(stored[n])
            raise SourceError(f"row {n} outside the stored window of {len(stored)} rows")

        return cls(
            KIND_DENSE,
            row_fn,
            row_bound=row_bound,
            column_decay=column_decay,
            payload={"rows": stored},
        )

    @classmethod
    def banded(cls, offsets, diagonals, *, row_bound=None) -> "MatrixSource":
        """Band storage: ``a[n, n + offsets[j]] = diagonals[j][n]``.

        A scalar diagonal is constant along its band; list diagonals are
        indexed by row and contribute zero past their end.
        """
        offsets = [int(o) for o in offsets]
        if len(offsets) != len(diagonals):
            raise ValueError("offsets and diagonals must have equal length")
        diags = []
        for d in diagonals:
            if isinstance(d, (int, float)) and not isinstance(d, bool):
                diags.append(float(d))
            else:
                diags.append([float(v) for v in d])
        if row_bound is None and all(isinstance(d, list) for d in diags):
            row_bound = max((len(d) for d in diags), default=0)

        def row_fn(n):
            width = 0
            pairs = []
            for o, d in zip(offsets, diags):
                col = n + o
                if col < 0:
                    continue
                val = d if isinstance(d, float) else (d[n] if n < len(d) else 0.0)
                pairs.append((col, val))
                width = max(width, col + 1)
            out = [0.0] * width
            for col, val in pairs:
                out[col] += val
            return out

        return cls(
            KIND_BANDED,
            row_fn,
            row_bound=row_bound,
            column_decay=True,
            payload={"offsets": offsets, "diagonals": diags},
        )

    @classmethod
    def generator(cls, rule: str, params: dict | None = None) -> "MatrixSource":
        params = dict(params or {})
        if rule == "identity":
            row_fn = lambda n: [0.0] * n + [1.0]
            bound = None
        elif rule == "diagonal":
            if "values" in params:
                values = [float(v) for v in params["values"]]
                row_fn = lambda n: ([0.0] * n + [values[n]]) if n < len(values) else []
                bound = len(values)
            elif "ratio" in params:
                scale = float(params.get("scale", 1.0))
                ratio = float(params["ratio"])
                row_fn = lambda n: [0.0] * n + [scale * ratio**n]
                bound = None
            else:
                raise ValueError('diagonal rule needs params "values" or "ratio"')
        elif rule == "finite-rows":
            if "rows" not in params:
                raise ValueError('finite-rows rule needs params "rows"')
            stored = [[float(v) for v in r] for r in params["rows"]]
            row_fn = lambda n: list(stored[n]) if n < len(stored) else []
            bound = len(stored)
        elif rule == "row-scaled-shift":
            scale = float(params.get("scale", 1.0))
            ratio = float(params.get("ratio", 1.0))
            shift = int(params.get("shift", 0))
            if shift < 0:
                raise ValueError('row-scaled-shift param "shift" must be nonnegative')
            row_fn = lambda n: [0.0] * (n + shift) + [scale * ratio**n]
            bound = None
        else:
            raise ValueError(f"unknown generator rule {rule!r}; expected one of {GENERATOR_RULES}")
        return cls(
            KIND_GENERATOR,
            row_fn,
            row_bound=bound,
            column_decay=True,
            payload={"rule": rule, "params": params},
        )

    @classmethod
    def from_callable(cls, row_fn, *, row_bound=None, column_decay=True) -> "MatrixSource":
        """Wrap an arbitrary ``n -> entries`` callable (not serializable)."""
        return cls(
            KIND_GENERATOR,
            row_fn,
            row_bound=row_bound,
            column_decay=column_decay,
            payload={"rule": "custom", "params": {}},
        )

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        if self.kind == KIND_DENSE:
            return {
                "kind": self.kind,
                "rows": [[float(v) for v in r] for r in self._payload["rows"]],
                "row_bound": self.declared_row_bound,
                "column_decay": self.declared_column_decay,
            }
        if self.kind == KIND_BANDED:
            return {
                "kind": self.kind,
                "band": {
                    "offsets": self._payload["offsets"],
                    "diagonals": self._payload["diagonals"],
                },
                "row_bound": self.declared_row_bound,
            }
        if self._payload.get("rule") == "custom":
            raise ValueError("a custom-callable matrix source cannot be serialized")
        return {
            "kind": self.kind,
            "rule": self._payload["rule"],
            "params": self._payload["params"],
        }

    @classmethod
    def from_json_dict(cls, obj) -> "MatrixSource":
        if not isinstance(obj, dict):
            raise ValueError("matrix JSON must be an object")
        kind = obj.get("kind")
        if kind == KIND_DENSE:
            rows = obj.get("rows")
            if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
                raise ValueError('matrix field "rows" must be an array of arrays')
            return cls.dense_window(
                [[float(v) for v in r] for r in rows],
                row_bound=obj.get("row_bound"),
                column_decay=bool(obj.get("column_decay", True)),
            )
        if kind == KIND_BANDED:
            band = obj.get("band")
            if not isinstance(band, dict) or "offsets" not in band or "diagonals" not in band:
                raise ValueError('matrix field "band" must hold "offsets" and "diagonals"')
            return cls.banded(band["offsets"], band["diagonals"], row_bound=obj.get("row_bound"))
        if kind == KIND_GENERATOR:
            rule = obj.get("rule")
            if not isinstance(rule, str):
                raise ValueError('matrix field "rule" must be a string')
            return cls.generator(rule, obj.get("params") or {})
        raise ValueError(f'matrix field "kind" must be one of {(KIND_DENSE, KIND_BANDED, KIND_GENERATOR)}, got {kind!r}')


@dataclass(frozen=True)
class HatMatrixWindow:
    """Transformed rows, each stored at its natural support length."""

    rows: tuple
    column_bound: int
    exactness: str  # "exact" | "truncated"

    @property
    def row_count(self) -> int:
        return len(self.rows)

    def as_float_rows(self) -> list[list[float]]:
        return [[float(v) for v in r] for r in self.rows]

    def dense(self, width: int | None = None) -> list[list[float]]:
        if width is None:
            width = max([len(r) for r in self.rows] + [self.column_bound])
        out = []
        for r in self.rows:
            row = [float(v) for v in r[:width]]
            row.extend(0.0 for _ in range(width - len(row)))
            out.append(row)
        return out

    def to_json_dict(self) -> dict:
        return {
            "rows": self.dense(),
            "column_bound": self.column_bound,
            "exactness": self.exactness,
        }


@dataclass(frozen=True)
class RowSubsetFamily:
    """Nonempty subsets of ``{r+1, ..., m}``."""

    r: int
    m: int

    def __post_init__(self):
        if self.r < 0 or self.m < 0:
            raise ValueError("subset family bounds must be nonnegative")

    @property
    def members(self) -> range:
        return range(self.r + 1, self.m + 1)

    @property
    def count(self) -> int:
        return max(0, 2 ** len(self.members) - 1)

    def subsets(self):
        members = list(self.members)
        for size in range(1, len(members) + 1):
            yield from itertools.combinations(members, size)


def _window_args(row_count, column_bound):
    for name, v in (("row_count", row_count), ("column_bound", column_bound)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise ValueError(f"{name} must be a positive integer, got {v!r}")


def hat_matrix(A: MatrixSource, order, row_count: int, column_bound: int) -> HatMatrixWindow:
    """Transformed window: each row convolved with the inverse-order prefix.

    Exact when the source declares finite row supports (stored entries
    are the whole row); otherwise rows are clipped at ``column_bound``
    and the window is tagged truncated.
    """
    order = FractionalOrder.of(order)
    _window_args(row_count, column_bound)
    stored_rows = []
    for n in range(row_count):
        values = A.row(n)
        if not A.declared_column_decay and len(values) > column_bound:
            values = values[:column_bound]
        stored_rows.append(values)
    exact = order.is_exact and all(all(_is_exact_number(v) for v in r) for r in stored_rows)
    max_len = max((len(r) for r in stored_rows), default=0)
    alpha = -order.exact if exact else -order.value
    coeffs = raw_prefix(alpha, max_len) if max_len else []
    hat_rows = []
    for values in stored_rows:
        s = len(values)
        if s == 0:
            hat_rows.append(())
            continue
        if exact:
            row = []
            for k in range(s):
                acc = Fraction(0)
                for j in range(k, s):
                    acc += coeffs[j - k] * values[j]
                row.append(acc)
            hat_rows.append(tuple(row))
        else:
            floats = [float(v) for v in values]
            conv = np.convolve(floats[::-1], coeffs[:s])[:s][::-1]
            hat_rows.append(tuple(conv.tolist()))
    return HatMatrixWindow(
        rows=tuple(hat_rows),
        column_bound=column_bound,
        exactness="exact" if A.declared_column_decay else "truncated",
    )


def opnorm_to_linf(A: MatrixSource, order, p, row_count: int, column_bound: int) -> float:
    """Sup over window rows of the conjugate-index norm of the transformed row.

    This is the operator norm toward each of the bounded, convergent,
    and null target spaces.
    """
    q = Exponent.of(p).q
    window = hat_matrix(A, order, row_count, column_bound)
    best = 0.0
    for row in window.rows:
        v = lq_norm(row, q)
        if v > best:
            best = v
    return best


def _mask_tuple(mask: int) -> tuple:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _pad_rows(rows, width: int | None = None) -> np.ndarray:
    if width is None:
        width = max([len(r) for r in rows] + [1])
    arr = np.zeros((len(rows), width))
    for i, r in enumerate(rows):
        vals = [float(v) for v in r[:width]]
        arr[i, : len(vals)] = vals
    return arr


def _chunk_norms(sums: np.ndarray, q: float) -> np.ndarray:
    a = np.abs(sums)
    if math.isinf(q):
        return a.max(axis=1)
    if q == 1.0:
        return a.sum(axis=1)
    return (a**q).sum(axis=1) ** (1.0 / q)


def _enumerate_subsets(rows: np.ndarray, q: float, want_by_min: bool):
    """Scan all nonempty subsets of the row set.

    Returns ``(best_value, best_certificate, by_min)`` where
    ``by_min[v]`` is the best value among subsets whose smallest element
    is ``v`` (zeros when ``want_by_min`` is false).  The certificate is
    the lexicographically smallest maximizer.
    """
    m = rows.shape[0]
    total = 1 << m
    col_ids = np.arange(m, dtype=np.int64)
    best_val = -1.0
    best_cert = None
    by_min = np.zeros(m)
    for start in range(1, total, _CHUNK):
        stop = min(start + _CHUNK, total)
        masks = np.arange(start, stop, dtype=np.int64)
        bits = ((masks[:, None] >> col_ids) & 1).astype(float)
        vals = _chunk_norms(bits @ rows, q)
        if want_by_min:
            low = (masks & -masks).astype(float)
            vidx = np.frexp(low)[1] - 1
            np.maximum.at(by_min, vidx, vals)
        cmax = float(vals.max())
        if cmax > best_val:
            best_val = cmax
            ties = masks[vals == cmax]
            best_cert = min(_mask_tuple(int(t)) for t in ties)
        elif cmax == best_val:
            ties = masks[vals == cmax]
            cand = min(_mask_tuple(int(t)) for t in ties)
            if cand < best_cert:
                best_cert = cand
    return best_val, best_cert, by_min


def _greedy_subset(rows: np.ndarray, q: float, indices) -> tuple[float, tuple]:
    """Include a row iff it strictly increases the accumulated norm."""
    current = np.zeros(rows.shape[1])
    value = 0.0
    chosen = []
    for n in indices:
        cand = current + rows[n]
        cval = lq_norm(cand.tolist(), q)
        if cval > value:
            current = cand
            value = cval
            chosen.append(n)
    if not chosen:
        return 0.0, (indices[0],) if len(indices) else ()
    return value, tuple(chosen)


def opnorm_to_l1(
    A: MatrixSource,
    order,
    p,
    row_count: int,
    column_bound: int,
    method: str = "exhaustive",
) -> tuple[float, tuple]:
    """Operator norm toward the absolutely-summable target.

    Maximizes the conjugate-index norm of the sum of a nonempty subset
    of transformed rows.  ``exhaustive`` enumerates all subsets (guarded
    at :func:`subset_guard_limit` rows, lexicographically smallest
    maximizer as certificate); ``greedy`` returns a lower bound.
    """
    q = Exponent.of(p).q
    window = hat_matrix(A, order, row_count, column_bound)
    rows = _pad_rows(window.rows)
    if method == "exhaustive":
        limit = subset_guard_limit()
        if row_count > limit:
            raise CostGuardError(
                f"exhaustive subset enumeration over {row_count} rows exceeds the "
                f"limit of {limit} (override via {SUBSET_GUARD_ENV})"
            )
        _, cert, _ = _enumerate_subsets(rows, q, want_by_min=False)
        value = lq_norm(rows[list(cert)].sum(axis=0).tolist(), q)
        return value, cert
    if method == "greedy":
        return _greedy_subset(rows, q, list(range(row_count)))
    raise ValueError(f'method must be "exhaustive" or "greedy", got {method!r}')
