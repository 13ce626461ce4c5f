"""Safe Bayesian optimization on a finite grid driven by scenario tubes.

Sets are arrays of grid indices.  At iteration ``t`` a tube is built from
the data gathered so far with confidence ``kappa_t``; the safe set keeps the
points whose constraint lower bounds clear their thresholds, the maximizer
set keeps the safe points that might still beat the best safe lower bound,
and the expanders are safe non-maximizers nearest to some unsafe point.
The next parameter is the candidate with the widest tube over all outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging

import numpy as np
from scipy.spatial.distance import cdist

from .certificates import ConfidenceSchedule, Certificate
from .domain import DomainGrid
from .sampler import PLANT, SCENARIOS, Dataset, FunctionModel, Stream
from .tubes import Tube, build_tube

__all__ = [
    "SafeBOConfig",
    "SafeBOState",
    "HistoryRow",
    "PlantError",
    "safe_set",
    "maximizer_set",
    "expander_set",
    "acquire",
    "run_safe_bo",
]

log = logging.getLogger(__name__)


class PlantError(RuntimeError):
    """An experiment could not be carried out; carries the partial state."""

    def __init__(self, msg, state=None):
        super().__init__(msg)
        self.state = state


@dataclass(frozen=True)
class SafeBOConfig:
    """Loop settings.

    ``thresholds`` maps each constrained output index to its safety
    threshold.  Normally these are the outputs ``1..|I|-1``; a single-output
    problem may constrain output 0 itself.
    """

    thresholds: dict
    initial_safe: tuple
    horizon: int = 30
    nu: float = 0.1
    kappa: float = 1e-3
    method: str = "wait_and_judge"
    tube_options: dict = field(default_factory=dict)
    distance: str = "euclidean"

    def __post_init__(self):
        if len(self.initial_safe) == 0:
            raise ValueError("the initial safe set must be non-empty")
        thr = {int(k): float(v) for k, v in dict(self.thresholds).items()}
        if not thr or not all(np.isfinite(list(thr.values()))):
            raise ValueError("thresholds must be a non-empty map of finite values")
        object.__setattr__(self, "thresholds", thr)
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")


@dataclass
class HistoryRow:
    t: int
    index: int
    y: np.ndarray
    certificate: Certificate | None = None
    n_safe: int | None = None
    n_max: int | None = None
    n_exp: int | None = None
    truly_safe: bool | None = None


@dataclass
class SafeBOState:
    t: int
    dataset: Dataset
    tube: Tube | None = None
    safe: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    maximizers: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    expanders: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    history: list = field(default_factory=list)
    recommendation: int | None = None
    stopped_early: bool = False


def _threshold_map(thresholds) -> dict:
    if isinstance(thresholds, dict):
        return {int(k): float(v) for k, v in thresholds.items()}
    # a plain sequence lists the constraint outputs 1, 2, ...
    return {k: float(v) for k, v in enumerate(thresholds, start=1)}


def safe_set(tube: Tube, thresholds) -> np.ndarray:
    """Indices where every constrained lower bound is at least its threshold.

    ``thresholds`` is a map ``{output: threshold}`` or a sequence for the
    outputs ``1, 2, ...``; outputs without a threshold impose nothing.
    """
    lower = tube.lower
    ok = np.ones(lower.shape[1], dtype=bool)
    for k, h in _threshold_map(thresholds).items():
        if not 0 <= k < lower.shape[0]:
            raise ValueError("tube does not cover every constrained output")
        ok &= lower[k] >= h
    return np.flatnonzero(ok)


def maximizer_set(tube: Tube, S) -> np.ndarray:
    S = np.asarray(S, dtype=int)
    if S.size == 0:
        return S
    best_lower = tube.lower[0, S].max()
    return S[tube.upper[0, S] >= best_lower]


def expansion_counts(grid: DomainGrid, S, metric: str = "euclidean") -> np.ndarray:
    """``g[a]``: number of unsafe points having ``a`` among their nearest safe points."""
    S = np.asarray(S, dtype=int)
    g = np.zeros(grid.size, dtype=int)
    unsafe = np.setdiff1d(np.arange(grid.size), S)
    if S.size == 0 or unsafe.size == 0:
        return g
    d = cdist(grid.points[unsafe], grid.points[S], metric=metric)
    # relative slack so grid-symmetric ties survive round-off
    nearest = d <= d.min(axis=1, keepdims=True) * (1.0 + 1e-12)
    np.add.at(g, S, nearest.sum(axis=0))
    return g


def expander_set(tube: Tube, S, M, grid: DomainGrid, metric: str = "euclidean") -> np.ndarray:
    S = np.asarray(S, dtype=int)
    g = expansion_counts(grid, S, metric)
    rest = np.setdiff1d(S, M)
    return rest[g[rest] > 0]


def acquire(tube: Tube, candidates) -> int | None:
    """Candidate with the largest width over outputs; lowest index on ties.

    Returns ``None`` for an empty candidate set.
    """
    cand = np.unique(np.asarray(candidates, dtype=int))
    if cand.size == 0:
        return None
    width = (tube.upper[:, cand] - tube.lower[:, cand]).max(axis=0)
    return int(cand[np.argmax(width)])


def recommend(tube: Tube, S, fallback) -> int:
    S = np.asarray(S, dtype=int)
    if S.size == 0:
        S = np.asarray(fallback, dtype=int)
    return int(S[np.argmax(tube.lower[0, S])])


def _is_safe(plant, idx: int, thresholds) -> bool | None:
    truth = getattr(plant, "truth", None)
    if truth is None:
        return None
    h = truth(idx)
    return bool(all(h[k] >= thr for k, thr in _threshold_map(thresholds).items()))


def run_safe_bo(model: FunctionModel, plant, config: SafeBOConfig, stream: Stream,
                callback=None) -> SafeBOState:
    """Run the safe BO loop for ``config.horizon`` iterations.

    Every point of the initial safe set is evaluated once before ``t = 1``.
    The loop stops early when no maximizer or expander is left.  A failing
    plant query raises :class:`PlantError` with the partial state attached.
    """
    schedule = ConfidenceSchedule(config.kappa)
    init = np.asarray(config.initial_safe, dtype=int)
    data = Dataset.empty(model.num_outputs)
    state = SafeBOState(t=0, dataset=data)

    def query(idx: int, t: int):
        try:
            y = np.asarray(plant.query(idx, stream.child(PLANT, t, len(state.dataset))), dtype=float)
        except Exception as exc:
            raise PlantError(f"plant query failed at index {idx}: {exc}", state) from exc
        if y.shape != (model.num_outputs,) or not np.all(np.isfinite(y)):
            raise PlantError(f"plant returned invalid observation {y!r}", state)
        return y

    for idx in init:
        y = query(int(idx), 0)
        state.dataset = state.dataset.append(int(idx), y)
        state.history.append(HistoryRow(0, int(idx), y, truly_safe=_is_safe(plant, int(idx), config.thresholds)))

    def tube_at(t: int) -> Tube:
        return build_tube(config.method, model, state.dataset, config.nu, schedule.at(t),
                          stream.child(SCENARIOS, t), t=t, keep_batch=False, **config.tube_options)

    for t in range(1, config.horizon + 1):
        state.t = t
        tube = tube_at(t)
        S = safe_set(tube, config.thresholds)
        M = maximizer_set(tube, S)
        G = expander_set(tube, S, M, model.grid, config.distance)
        state.tube, state.safe, state.maximizers, state.expanders = tube, S, M, G
        nxt = acquire(tube, np.union1d(M, G))
        cert = tube.certificate
        log.info("t=%d m=%d s=%d |S|=%d |M|=%d |G|=%d next=%s", t, cert.m, cert.s, S.size, M.size, G.size, nxt)
        if nxt is None:
            state.stopped_early = True
            break
        y = query(nxt, t)
        state.dataset = state.dataset.append(nxt, y)
        row = HistoryRow(t, nxt, y, cert, S.size, M.size, G.size, _is_safe(plant, nxt, config.thresholds))
        state.history.append(row)
        if callback is not None:
            callback(state)

    if state.tube is None:
        state.t = 1
        tube = tube_at(1)
        state.tube = tube
        state.safe = safe_set(tube, config.thresholds)
        state.maximizers = maximizer_set(tube, state.safe)
        state.expanders = expander_set(tube, state.safe, state.maximizers, model.grid, config.distance)
    state.recommendation = recommend(state.tube, state.safe, init)
    return state
