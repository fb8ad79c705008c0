"""Monte Carlo bias/MSE comparison harness.

A study is a grid over (model, sample size, order, estimator kind, window).
Each (model, sample size) pair draws one (R, n) batch of samples from its own
stream, keyed by (master seed, model position, n) on a counter-based
generator; every order, kind and window in the grid is then evaluated on
those common draws. Sharing draws is what makes the bias/MSE columns and the
window sweeps directly comparable: two estimators differ because of how they
treat the same samples, not because of draw noise.

Worker threads parallelize across (model, n) blocks and the reduction happens
in grid order, which keeps output bit-identical for any thread count.
"""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import estimators as est
from .distributions import Model, closed_wcrte, order_from_label, parse_model
from .errors import DivergenceError, DomainError, ParseError
from .estimators import EstimatorKind

__all__ = [
    "DEFAULT_SEED",
    "derive_stream",
    "McStudyConfig",
    "McCell",
    "McStudyResult",
    "run_study",
    "heuristic_window",
    "best_window",
    "study_config_from_json",
]

#: Default master seed used by the command line.
DEFAULT_SEED = 0xC0FFEE

# Stream purpose tags (first spawn-key word) keeping the harness's draws,
# the null-distribution draws, and the alternative draws mutually independent.
_PURPOSE_MC = 1
_PURPOSE_GOF_NULL = 2
_PURPOSE_GOF_ALT = 3


def derive_stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for (seed, key), stable across processes.

    Built on a counter-based bit generator, so streams for different keys
    never overlap and creation order is irrelevant.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seed=ss))


def mc_stream(seed: int, model_index: int, n: int) -> np.random.Generator:
    return derive_stream(seed, _PURPOSE_MC, model_index, n)


def gof_null_stream(seed: int, n: int) -> np.random.Generator:
    return derive_stream(seed, _PURPOSE_GOF_NULL, n)


def gof_alternative_stream(seed: int, n: int, alternative_index: int) -> np.random.Generator:
    return derive_stream(seed, _PURPOSE_GOF_ALT, n, alternative_index)


def heuristic_window(kind, n: int) -> int:
    """Window rule of thumb, clamped into the admissible range.

    Vasicek and Ebrahimi kinds: floor(n/2) - 1 up to n = 20, floor(n/3)
    beyond. Modified-N: floor(n/4) + 1.
    """
    kind = EstimatorKind(kind)
    n = int(n)
    if n < 3:
        raise DomainError(f"windowed estimators need n >= 3, got {n}")
    if kind in (EstimatorKind.VASICEK, EstimatorKind.EBRAHIMI):
        m = n // 2 - 1 if n <= 20 else n // 3
    elif kind is EstimatorKind.MODIFIED_N:
        m = n // 4 + 1
    else:
        raise DomainError(f"estimator kind {kind.value} takes no window")
    return max(1, min(m, est.max_window(n)))


@dataclass(frozen=True)
class McStudyConfig:
    """Grid definition for one study.

    ``orders`` may contain None for the WCRE limit. ``windows`` is either the
    string "auto" (one heuristic window per kind and n), the string "sweep"
    (every admissible window), or an explicit tuple applied to all windowed
    kinds; explicit windows must be admissible for every n in the grid.
    """

    models: tuple[Model, ...]
    sample_sizes: tuple[int, ...]
    orders: tuple[float | None, ...]
    kinds: tuple[EstimatorKind, ...]
    windows: str | tuple[int, ...] = "auto"
    replications: int = 10_000
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        object.__setattr__(self, "orders", tuple(self.orders))
        object.__setattr__(self, "kinds", tuple(EstimatorKind(k) for k in self.kinds))
        if not self.models or not self.sample_sizes or not self.orders or not self.kinds:
            raise DomainError("study grid must have at least one entry on every axis")
        if any(n < 2 for n in self.sample_sizes):
            raise DomainError("sample sizes must be at least 2")
        if int(self.replications) < 1:
            raise DomainError("replications must be positive")
        object.__setattr__(self, "replications", int(self.replications))
        if isinstance(self.windows, str):
            if self.windows not in ("auto", "sweep"):
                raise DomainError(f"windows must be 'auto', 'sweep' or a tuple, got {self.windows!r}")
        else:
            ws = tuple(int(m) for m in self.windows)
            object.__setattr__(self, "windows", ws)
            for n in self.sample_sizes:
                for m in ws:
                    if m < 1 or 2 * m >= n:
                        raise DomainError(
                            f"window m={m} is not admissible for n={n} (need 1 <= m < n/2)"
                        )

    def windows_for(self, kind: EstimatorKind, n: int) -> tuple[int | None, ...]:
        if not kind.needs_window:
            return (None,)
        if self.windows == "auto":
            return (heuristic_window(kind, n),)
        if self.windows == "sweep":
            return tuple(range(1, est.max_window(n) + 1))
        return self.windows


@dataclass(frozen=True)
class McCell:
    """One grid cell's result."""

    model: str
    n: int
    order: float | None
    kind: EstimatorKind
    window: int | None
    truth: float
    bias: float
    mse: float
    mse_se: float
    replications: int


@dataclass(frozen=True)
class McStudyResult:
    cells: tuple[McCell, ...]
    skipped: tuple[str, ...]
    seed: int
    replications: int

    def best_windows(self) -> dict[tuple[str, str, int], int]:
        return best_window(self.cells)


def _batch_estimate(kind: EstimatorKind, xs: np.ndarray, order, window) -> np.ndarray:
    if kind is EstimatorKind.EMPIRICAL:
        return est.wcre_empirical(xs) if order is None else est.wcrte_empirical(xs, order)
    if kind is EstimatorKind.LSTAT:
        return est.wcre_lstat(xs) if order is None else est.wcrte_lstat(xs, order)
    if order is None:
        fn = {
            EstimatorKind.VASICEK: est.wcre_vasicek,
            EstimatorKind.EBRAHIMI: est.wcre_ebrahimi,
            EstimatorKind.MODIFIED_N: est.wcre_modified_n,
        }[kind]
        return fn(xs, window)
    fn = {
        EstimatorKind.VASICEK: est.wcrte_vasicek,
        EstimatorKind.EBRAHIMI: est.wcrte_ebrahimi,
        EstimatorKind.MODIFIED_N: est.wcrte_modified_n,
    }[kind]
    return fn(xs, order, window)


@dataclass(frozen=True)
class _CellSpec:
    order: float | None
    kind: EstimatorKind
    window: int | None
    truth: float


@dataclass(frozen=True)
class _BlockPlan:
    model_index: int
    model: Model
    n: int
    specs: tuple[_CellSpec, ...]


def _plan_blocks(config: McStudyConfig) -> tuple[list[_BlockPlan], list[str]]:
    """Group the grid into (model, n) blocks that share one draw batch.

    Block streams are keyed by (model position, n) alone, so adding orders,
    kinds or windows to a study never changes any draw, and cells whose
    target measure diverges are skipped without affecting the rest.
    """
    blocks: list[_BlockPlan] = []
    skipped: list[str] = []
    truth_cache: dict[tuple[int, float | None], float | None] = {}
    for (mi, model), n in itertools.product(enumerate(config.models), config.sample_sizes):
        specs: list[_CellSpec] = []
        for order, kind in itertools.product(config.orders, config.kinds):
            key = (mi, order)
            if key not in truth_cache:
                try:
                    truth_cache[key] = closed_wcrte(model, order)
                except DivergenceError as exc:
                    truth_cache[key] = None
                    skipped.append(str(exc))
            truth = truth_cache[key]
            if truth is None:
                continue
            for window in config.windows_for(kind, n):
                specs.append(_CellSpec(order, kind, window, truth))
        blocks.append(_BlockPlan(mi, model, n, tuple(specs)))
    return blocks, skipped


def _run_block(block: _BlockPlan, replications: int, seed: int) -> list[McCell]:
    if not block.specs:
        return []
    stream = mc_stream(seed, block.model_index, block.n)
    xs = block.model.quantile(stream.random((replications, block.n)))
    cells: list[McCell] = []
    for spec in block.specs:
        values = _batch_estimate(spec.kind, xs, spec.order, spec.window)
        err = values - spec.truth
        sq = err * err
        cells.append(
            McCell(
                model=block.model.spec_string(),
                n=block.n,
                order=spec.order,
                kind=spec.kind,
                window=spec.window,
                truth=spec.truth,
                bias=float(err.mean()),
                mse=float(sq.mean()),
                mse_se=float(sq.std() / math.sqrt(replications)),
                replications=replications,
            )
        )
    return cells


def run_study(config: McStudyConfig, threads: int | None = None) -> McStudyResult:
    """Run every cell of the grid; deterministic for a fixed config and seed.

    ``threads=None`` or 1 runs serially; larger values parallelize across
    (model, n) blocks without changing any output bit.
    """
    blocks, skipped = _plan_blocks(config)
    if threads is not None and int(threads) < 1:
        raise DomainError(f"threads must be positive, got {threads!r}")
    workers = 1 if threads is None else int(threads)
    if workers == 1:
        parts = [_run_block(b, config.replications, config.seed) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _run_block(b, config.replications, config.seed), blocks))
    cells = [cell for part in parts for cell in part]
    return McStudyResult(
        cells=tuple(cells),
        skipped=tuple(skipped),
        seed=config.seed,
        replications=config.replications,
    )


def study_config_from_json(doc) -> McStudyConfig:
    """Build a study config from a JSON document (text, dict, or file object).

    Recognized keys (all optional except ``models``): ``models`` (model spec
    strings), ``n`` (sample sizes), ``alpha`` (orders; 1 or null select the
    WCRE limit), ``estimators`` (kind tokens), ``m`` ("auto", "sweep" or a
    list of windows), ``replications``, ``seed``. Unknown keys are rejected
    so that typos fail loudly.
    """
    if hasattr(doc, "read"):
        doc = doc.read()
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON study config: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError(f"study config must be a JSON object, got {type(doc).__name__}")
    known = {"models", "n", "alpha", "estimators", "m", "replications", "seed"}
    extra = sorted(set(doc) - known)
    if extra:
        raise ParseError(f"unknown study config keys: {', '.join(extra)}")
    if "models" not in doc:
        raise ParseError("study config needs a 'models' list")

    def as_list(key, fallback):
        value = doc.get(key, fallback)
        if isinstance(value, (str, bytes)) or not hasattr(value, "__iter__"):
            value = [value]
        return list(value)

    models = tuple(
        parse_model(m) if isinstance(m, str) else m for m in as_list("models", ())
    )
    sizes = tuple(int(n) for n in as_list("n", (10, 20, 30)))
    orders = tuple(order_from_label(a) for a in as_list("alpha", (2.0,)))
    kinds = tuple(est.parse_kind(k) for k in as_list("estimators", ("empirical",)))
    windows = doc.get("m", "auto")
    if not isinstance(windows, str):
        windows = tuple(int(m) for m in as_list("m", ()))
    return McStudyConfig(
        models=models,
        sample_sizes=sizes,
        orders=orders,
        kinds=kinds,
        windows=windows,
        replications=int(doc.get("replications", 10_000)),
        seed=int(doc.get("seed", DEFAULT_SEED)),
    )


def best_window(cells) -> dict[tuple[str, str, int], int]:
    """Minimum-MSE window per (model, kind, n); ties go to the smaller window.

    Only windowed cells participate.
    """
    best: dict[tuple[str, str, int], tuple[float, int]] = {}
    for cell in cells:
        if cell.window is None:
            continue
        key = (cell.model, cell.kind.value, cell.n)
        cand = (cell.mse, cell.window)
        if key not in best or cand < best[key]:
            best[key] = cand
    if not best:
        raise DomainError("no windowed cells in the study")
    return {key: m for key, (_, m) in best.items()}
