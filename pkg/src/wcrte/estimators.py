"""Nonparametric estimators of the weighted cumulative residual measures.

All estimators work on order statistics of a nonnegative sample. Each public
function accepts either a single sample (1-D array or :class:`Sample`) and
returns a float, or a batch of samples as a 2-D array of shape (B, n) and
returns a length-B vector; the Monte Carlo harness relies on the batch path.

Five estimator kinds are provided for the order-``a`` measure and for its
order -> 1 limit (the WCRE):

* ``empirical``: plug the empirical survival function into the defining
  integral; a sum over squared order statistic differences.
* ``vasicek``: replace the density-like slope with a symmetric difference of
  squared order statistics over a window of half-width ``m``.
* ``ebrahimi``: the same spacing sum with boundary-corrected denominators.
* ``modified_n``: boundary correction applied with squared denominators.
* ``lstat``: a linear combination of squared order statistics with smooth
  coefficients; the only kind with a companion variance estimator.

Windowed kinds clamp out-of-range order statistics to the sample extremes,
so the first and last spacings are one-sided.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Literal

import numpy as np

from .distributions import check_order
from .errors import DomainError, ParseError
from .sample import Sample, read_sample

__all__ = [
    "EstimatorKind",
    "EstimatorSpec",
    "Sample",
    "read_sample",
    "parse_estimator",
    "parse_kind",
    "estimate",
    "ebrahimi_weights",
    "clamp_order_stat",
    "max_window",
    "wcrte_empirical",
    "wcrte_vasicek",
    "wcrte_ebrahimi",
    "wcrte_modified_n",
    "wcrte_lstat",
    "wcrte_lstat_variance",
    "wcre_empirical",
    "wcre_vasicek",
    "wcre_ebrahimi",
    "wcre_modified_n",
    "wcre_lstat",
    "wcre_lstat_variance",
]

PlottingPosition = Literal["n", "n+1"]


class EstimatorKind(str, Enum):
    EMPIRICAL = "empirical"
    VASICEK = "vasicek"
    EBRAHIMI = "ebrahimi"
    MODIFIED_N = "modified_n"
    LSTAT = "lstat"

    @property
    def needs_window(self) -> bool:
        return self in (
            EstimatorKind.VASICEK,
            EstimatorKind.EBRAHIMI,
            EstimatorKind.MODIFIED_N,
        )


def _as_rows(x) -> tuple[np.ndarray, bool]:
    """Normalize input to a (B, n) float array; report whether to squeeze."""
    if isinstance(x, Sample):
        x = x.values
    arr = np.asarray(x, dtype=float)
    if arr.ndim > 2:
        raise DomainError(f"sample must be 1-D or 2-D, got shape {arr.shape}")
    squeeze = arr.ndim == 1
    rows = np.atleast_2d(arr)
    if rows.shape[1] < 2:
        raise DomainError(f"need at least 2 observations per sample, got {rows.shape[1]}")
    if not np.all(np.isfinite(rows)):
        raise DomainError("sample contains non-finite values")
    if rows.min() < 0.0:
        raise DomainError("sample values must be nonnegative")
    return rows, squeeze


def _ret(out: np.ndarray, squeeze: bool):
    return float(out[0]) if squeeze else out


def _sorted_squares(rows: np.ndarray) -> np.ndarray:
    # Values are nonnegative, so squaring preserves the order.
    s = np.sort(rows, axis=1)
    return s * s


def max_window(n: int) -> int:
    """Largest admissible spacing half-width for a sample of size n."""
    return int(math.ceil(n / 2)) - 1


def clamp_order_stat(sample, i) -> float:
    """Order statistic with the index clamped to the sample range.

    For a 1-based index i, returns the sorted value at position
    max(1, min(n, i)).  Out-of-range indices therefore map to the
    sample minimum or maximum, which is the convention the windowed
    estimators use near the edges.
    """
    values = np.sort(np.asarray(getattr(sample, "values", sample), dtype=float))
    if values.ndim != 1 or values.size < 1:
        raise DomainError("need a nonempty 1-D sample")
    try:
        ii = int(i)
    except (TypeError, ValueError):
        raise DomainError(f"index must be an integer, got {i!r}") from None
    if ii != i:
        raise DomainError(f"index must be an integer, got {i!r}")
    n = values.size
    return float(values[max(1, min(n, ii)) - 1])


def _check_window(n: int, m) -> int:
    try:
        mi = int(m)
    except (TypeError, ValueError):
        raise DomainError(f"window m must be an integer, got {m!r}") from None
    if mi != m or mi < 1 or 2 * mi >= n:
        raise DomainError(f"window m must satisfy 1 <= m < n/2, got m={m!r} for n={n}")
    return mi


def _warn_below_one(a: float) -> None:
    if a < 1.0:
        warnings.warn(
            f"order {a:g} is below 1; the underlying measure may be infinite "
            "and the spacing estimate need not stabilize",
            stacklevel=3,
        )


def _clamped_spacings(s2: np.ndarray, m: int) -> np.ndarray:
    """m-step symmetric differences of sorted squares with clamped indices.

    Entry i (1-based) is s2[min(i+m, n)] - s2[max(i-m, 1)].
    """
    n = s2.shape[1]
    idx = np.arange(1, n + 1)
    hi = np.minimum(idx + m, n) - 1
    lo = np.maximum(idx - m, 1) - 1
    return s2[:, hi] - s2[:, lo]


def _wcrte_tail_weights(n: int, a: float, upto_n: bool) -> np.ndarray:
    """Weights (1 - i/n) - (1 - i/n)**a for i = 1..n-1 (or 1..n)."""
    i = np.arange(1, (n + 1) if upto_n else n, dtype=float)
    tail = 1.0 - i / n
    return tail - tail**a


def _wcre_tail_weights(n: int, upto_n: bool = False) -> np.ndarray:
    """Weights -(1 - i/n) * log(1 - i/n), nonnegative, zero at i = n."""
    i = np.arange(1, (n + 1) if upto_n else n, dtype=float)
    tail = 1.0 - i / n
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -tail * np.log(tail)
    if upto_n:
        out[-1] = 0.0
    return out


def ebrahimi_weights(n: int, m) -> np.ndarray:
    """Boundary-corrected denominators c_i for the spacing estimators.

    c_i ramps linearly from 1 + (i-1)/m near the lower edge up to 2 in the
    interior, and back down symmetrically near the upper edge.
    """
    mi = _check_window(n, m)
    i = np.arange(1, n + 1, dtype=float)
    c = np.full(n, 2.0)
    head = i <= mi
    c[head] = 1.0 + (i[head] - 1.0) / mi
    tail = i >= n - mi + 1
    c[tail] = 1.0 + (n - i[tail]) / mi
    return c


# --- WCRTE estimators --------------------------------------------------------


def wcrte_empirical(x, order):
    """Plug-in estimate of the order-``order`` measure.

    Sum over i = 1..n-1 of (x2_(i+1) - x2_(i)) * ((1-i/n) - (1-i/n)**a),
    divided by 2(a - 1). Nonnegative for orders above 1.
    """
    a = check_order(order)
    rows, squeeze = _as_rows(x)
    n = rows.shape[1]
    s2 = _sorted_squares(rows)
    w = _wcrte_tail_weights(n, a, upto_n=False)
    out = (np.diff(s2, axis=1) * w).sum(axis=1) / (2.0 * (a - 1.0))
    return _ret(out, squeeze)


def wcrte_vasicek(x, order, m):
    """Spacing estimate with symmetric m-step differences, sum over i = 1..n."""
    a = check_order(order)
    _warn_below_one(a)
    rows, squeeze = _as_rows(x)
    n = rows.shape[1]
    mi = _check_window(n, m)
    s2 = _sorted_squares(rows)
    w = _wcrte_tail_weights(n, a, upto_n=True)
    out = (_clamped_spacings(s2, mi) * w).sum(axis=1) / (4.0 * mi * (a - 1.0))
    return _ret(out, squeeze)


def wcrte_ebrahimi(x, order, m):
    """Spacing estimate with boundary-corrected denominators c_i."""
    a = check_order(order)
    _warn_below_one(a)
    rows, squeeze = _as_rows(x)
    n = rows.shape[1]
    mi = _check_window(n, m)
    s2 = _sorted_squares(rows)
    w = _wcrte_tail_weights(n, a, upto_n=True)
    c = ebrahimi_weights(n, mi)
    out = (_clamped_spacings(s2, mi) / c * w).sum(axis=1) / (2.0 * mi * (a - 1.0))
    return _ret(out, squeeze)


def wcrte_modified_n(x, order, m):
    """Spacing estimate with squared boundary-corrected denominators."""
    a = check_order(order)
    _warn_below_one(a)
    rows, squeeze = _as_rows(x)
    n = rows.shape[1]
    mi = _check_window(n, m)
    s2 = _sorted_squares(rows)
    w = _wcrte_tail_weights(n, a, upto_n=True)
    c = ebrahimi_weights(n, mi)
    out = (_clamped_spacings(s2, mi) / (c * c) * w).sum(axis=1) / (mi * (a - 1.0))
    return _ret(out, squeeze)


def _lstat_positions(n: int, plotting: PlottingPosition) -> np.ndarray:
    if plotting == "n":
        return np.arange(1, n + 1, dtype=float) / n
    if plotting == "n+1":
        return np.arange(1, n + 1, dtype=float) / (n + 1)
    raise DomainError(f"plotting position must be 'n' or 'n+1', got {plotting!r}")


def _check_order_above_one(order) -> float:
    a = check_order(order)
    if a < 1.0:
        raise DomainError(
            f"the L-statistic requires order > 1, got {a:g}; "
            "orders in (0, 1) are not supported for this kind"
        )
    return a


def wcrte_lstat(x, order, plotting: PlottingPosition = "n"):
    """L-statistic: sum of x2_(i) * (1 - a*(1 - p_i)**(a-1)) / (2 (a-1) n).

    Plotting positions p_i default to i/n; ``plotting="n+1"`` uses i/(n+1).
    Requires order > 1.
    """
    a = _check_order_above_one(order)
    rows, squeeze = _as_rows(x)
    n = rows.shape[1]
    p = _lstat_positions(n, plotting)
    w = 1.0 - a * (1.0 - p) ** (a - 1.0)
    s2 = _sorted_squares(rows)
    out = (s2 * w).sum(axis=1) / (2.0 * (a - 1.0) * n)
    return _ret(out, squeeze)


def wcrte_lstat_variance(x, order):
    """Variance estimator attached to the L-statistic (order > 1, n >= 3).

    Estimates the variance of sqrt(n) * (estimate - target). The double sum
    over ordered index pairs is evaluated in O(n) via a cumulative sum; a
    literal O(n^2) version is kept in the test suite as an oracle. Small
    samples can produce a negative value, which is reported with a warning
    rather than clipped.
    """
    a = _check_order_above_one(order)
    rows, squeeze = _as_rows(x)
    n = rows.shape[1]
    if n < 3:
        raise DomainError(f"variance estimation needs n >= 3, got {n}")
    s2 = _sorted_squares(rows)
    d = np.diff(s2, axis=1)  # i = 1..n-1
    i = np.arange(1, n, dtype=float)
    tail = 1.0 - i / n
    coef = 1.0 - a * tail ** (a - 1.0)
    upper = tail * coef * d  # factor carrying the larger index
    lower = (i / n) * coef * d  # factor carrying the smaller index
    cum = np.cumsum(lower, axis=1)
    inner = (upper[:, 1:] * cum[:, :-1]).sum(axis=1)
    # Twice the ordered-pair sum covers the symmetric index square and
    # estimates the variance of the auxiliary statistic 2(order - 1) times
    # the estimate; dividing by (2(order - 1))^2 rescales to the estimate.
    out = inner / (2.0 * (a - 1.0) ** 2)
    if np.any(out < 0.0):
        warnings.warn("negative variance estimate (small-sample artifact)", stacklevel=2)
    return _ret(out, squeeze)


# --- WCRE estimators (order -> 1 limit) ---------------------------------------


def wcre_empirical(x):
    """Plug-in estimate of the WCRE; nonnegative by construction."""
    rows, squeeze = _as_rows(x)
    n = rows.shape[1]
    s2 = _sorted_squares(rows)
    w = _wcre_tail_weights(n)
    out = (np.diff(s2, axis=1) * w).sum(axis=1) / 2.0
    return _ret(out, squeeze)


def wcre_vasicek(x, m):
    """Symmetric-difference estimate of the WCRE, sum over i = 1..n-1."""
    rows, squeeze = _as_rows(x)
    n = rows.shape[1]
    mi = _check_window(n, m)
    s2 = _sorted_squares(rows)
    w = _wcre_tail_weights(n)
    out = (_clamped_spacings(s2, mi)[:, :-1] * w).sum(axis=1) / (4.0 * mi)
    return _ret(out, squeeze)


def wcre_ebrahimi(x, m):
    rows, squeeze = _as_rows(x)
    n = rows.shape[1]
    mi = _check_window(n, m)
    s2 = _sorted_squares(rows)
    w = _wcre_tail_weights(n)
    c = ebrahimi_weights(n, mi)[:-1]
    out = (_clamped_spacings(s2, mi)[:, :-1] / c * w).sum(axis=1) / (2.0 * mi)
    return _ret(out, squeeze)


def wcre_modified_n(x, m):
    rows, squeeze = _as_rows(x)
    n = rows.shape[1]
    mi = _check_window(n, m)
    s2 = _sorted_squares(rows)
    w = _wcre_tail_weights(n)
    c = ebrahimi_weights(n, mi)[:-1]
    out = (_clamped_spacings(s2, mi)[:, :-1] / (c * c) * w).sum(axis=1) / mi
    return _ret(out, squeeze)


def wcre_lstat(x, plotting: PlottingPosition = "n+1"):
    """L-statistic for the WCRE: -sum of x2_(i) * (1 + log(1 - p_i)) / (2n).

    Defaults to plotting positions i/(n+1), which keep every term finite.
    With ``plotting="n"`` the i = n term contains log(0) and is dropped,
    with a diagnostic warning.
    """
    rows, squeeze = _as_rows(x)
    n = rows.shape[1]
    s2 = _sorted_squares(rows)
    if plotting == "n":
        warnings.warn(
            "plotting position i/n makes the last WCRE L-statistic term "
            "log(0); dropping the i = n term",
            stacklevel=2,
        )
        p = np.arange(1, n, dtype=float) / n
        w = 1.0 + np.log(1.0 - p)
        out = -(s2[:, :-1] * w).sum(axis=1) / (2.0 * n)
    else:
        p = _lstat_positions(n, plotting)
        w = 1.0 + np.log(1.0 - p)
        out = -(s2 * w).sum(axis=1) / (2.0 * n)
    return _ret(out, squeeze)


def wcre_lstat_variance(x):
    """Variance estimator attached to the WCRE L-statistic (n >= 3)."""
    rows, squeeze = _as_rows(x)
    n = rows.shape[1]
    if n < 3:
        raise DomainError(f"variance estimation needs n >= 3, got {n}")
    s2 = _sorted_squares(rows)
    d = np.diff(s2, axis=1)
    i = np.arange(1, n, dtype=float)
    tail = 1.0 - i / n
    coef = 1.0 + np.log(tail)
    upper = tail * coef * d
    lower = (i / n) * coef * d
    cum = np.cumsum(lower, axis=1)
    inner = (upper[:, 1:] * cum[:, :-1]).sum(axis=1)
    # Same structure as the ordered variant: twice the ordered-pair sum
    # estimates the variance of -2 times the estimate, so the net constant
    # is 2/4 = 1/2.
    out = inner / 2.0
    if np.any(out < 0.0):
        warnings.warn("negative variance estimate (small-sample artifact)", stacklevel=2)
    return _ret(out, squeeze)


# --- estimator specs and dispatch ---------------------------------------------

_KIND_TOKENS = {
    "e": EstimatorKind.EMPIRICAL,
    "empirical": EstimatorKind.EMPIRICAL,
    "v": EstimatorKind.VASICEK,
    "vasicek": EstimatorKind.VASICEK,
    "eb": EstimatorKind.EBRAHIMI,
    "ebrahimi": EstimatorKind.EBRAHIMI,
    "n": EstimatorKind.MODIFIED_N,
    "mn": EstimatorKind.MODIFIED_N,
    "modified": EstimatorKind.MODIFIED_N,
    "modified_n": EstimatorKind.MODIFIED_N,
    "l": EstimatorKind.LSTAT,
    "lstat": EstimatorKind.LSTAT,
}


def parse_kind(token) -> EstimatorKind:
    """Resolve an estimator-kind token or enum member."""
    if isinstance(token, EstimatorKind):
        return token
    key = str(token).strip().lower()
    if key not in _KIND_TOKENS:
        known = ", ".join(sorted(set(_KIND_TOKENS)))
        raise ParseError(f"unknown estimator kind {token!r} (known: {known})")
    return _KIND_TOKENS[key]


@dataclass(frozen=True)
class EstimatorSpec:
    """A fully resolved estimator choice.

    ``order=None`` selects the WCRE limit. ``window`` must be present exactly
    for the three spacing kinds (it may be left None and resolved against a
    concrete sample size by the caller). ``plotting`` applies to the
    L-statistic only; None means the kind's default.
    """

    kind: EstimatorKind
    order: float | None = None
    window: int | None = None
    plotting: str | None = None

    def __post_init__(self):
        kind = EstimatorKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if self.order is not None:
            a = check_order(self.order)
            if kind is EstimatorKind.LSTAT and a < 1.0:
                raise DomainError("the L-statistic requires order > 1")
            object.__setattr__(self, "order", a)
        if self.window is not None:
            if not kind.needs_window:
                raise DomainError(f"estimator kind {kind.value} takes no window")
            w = int(self.window)
            if w != self.window or w < 1:
                raise DomainError(f"window must be a positive integer, got {self.window!r}")
            object.__setattr__(self, "window", w)
        if self.plotting is not None:
            if kind is not EstimatorKind.LSTAT:
                raise DomainError("plotting positions apply to the L-statistic only")
            if self.plotting not in ("n", "n+1"):
                raise DomainError(f"plotting must be 'n' or 'n+1', got {self.plotting!r}")

    @property
    def measure(self) -> str:
        return "wcre" if self.order is None else "wcrte"

    def label(self) -> str:
        parts = [f"{self.measure}:{self.kind.value}"]
        if self.order is not None:
            parts.append(f"alpha={self.order:g}")
        if self.window is not None:
            parts.append(f"m={self.window}")
        if self.plotting is not None:
            parts.append(f"plotting={self.plotting}")
        return ",".join(parts)


def parse_estimator(text: str) -> EstimatorSpec:
    """Parse an estimator spec such as ``wcrte:l,alpha=2`` or ``wcre:eb,m=3``.

    The leading token picks the measure (``wcrte`` needs ``alpha=...``,
    ``wcre`` forbids it), the second the kind (single-letter aliases are
    accepted), and the remaining ``key=value`` pairs set ``m`` and
    ``plotting``.
    """
    spec = text.strip()
    head, _, rest = spec.partition(":")
    measure = head.strip().lower()
    if measure not in ("wcrte", "wcre"):
        raise ParseError(f"{spec!r}: estimator spec must start with wcrte: or wcre:")
    pieces = [p.strip() for p in rest.split(",") if p.strip()]
    if not pieces:
        raise ParseError(f"{spec!r}: missing estimator kind")
    kind_token = pieces[0].lower()
    if kind_token not in _KIND_TOKENS:
        raise ParseError(
            f"{spec!r}: unknown estimator kind {pieces[0]!r} "
            f"(known: {', '.join(sorted(set(_KIND_TOKENS)))})"
        )
    kind = _KIND_TOKENS[kind_token]

    order: float | None = None
    window: int | None = None
    plotting: str | None = None
    for piece in pieces[1:]:
        key, eq, val = piece.partition("=")
        key = key.strip().lower()
        val = val.strip()
        if eq != "=":
            raise ParseError(f"{spec!r}: expected key=value, got {piece!r}")
        if key == "alpha":
            if measure == "wcre":
                raise ParseError(f"{spec!r}: wcre takes no alpha (it is the order -> 1 limit)")
            try:
                order = float(val)
            except ValueError:
                raise ParseError(f"{spec!r}: not a number: {val!r}") from None
        elif key == "m":
            try:
                window = int(val)
            except ValueError:
                raise ParseError(f"{spec!r}: window m must be an integer, got {val!r}") from None
        elif key == "plotting":
            plotting = val
        else:
            raise ParseError(f"{spec!r}: unknown key {key!r} (expected alpha, m, plotting)")

    if measure == "wcrte" and order is None:
        raise ParseError(f"{spec!r}: wcrte requires alpha=<order>")
    try:
        return EstimatorSpec(kind=kind, order=order, window=window, plotting=plotting)
    except DomainError as exc:
        raise ParseError(f"{spec!r}: {exc}") from None


def estimate(spec: EstimatorSpec, x):
    """Dispatch to the estimator selected by ``spec``.

    Windowed kinds need ``spec.window`` resolved; callers that want an
    automatic choice resolve it first (see ``mc.heuristic_window``).
    """
    kind = spec.kind
    if kind.needs_window:
        if spec.window is None:
            raise DomainError(
                f"estimator {spec.label()} needs a window; set m or resolve one first"
            )
        if spec.order is None:
            fn = {
                EstimatorKind.VASICEK: wcre_vasicek,
                EstimatorKind.EBRAHIMI: wcre_ebrahimi,
                EstimatorKind.MODIFIED_N: wcre_modified_n,
            }[kind]
            return fn(x, spec.window)
        fn = {
            EstimatorKind.VASICEK: wcrte_vasicek,
            EstimatorKind.EBRAHIMI: wcrte_ebrahimi,
            EstimatorKind.MODIFIED_N: wcrte_modified_n,
        }[kind]
        return fn(x, spec.order, spec.window)
    if kind is EstimatorKind.EMPIRICAL:
        return wcre_empirical(x) if spec.order is None else wcrte_empirical(x, spec.order)
    # L-statistic
    if spec.order is None:
        return wcre_lstat(x) if spec.plotting is None else wcre_lstat(x, spec.plotting)
    if spec.plotting is None:
        return wcrte_lstat(x, spec.order)
    return wcrte_lstat(x, spec.order, spec.plotting)
