"""Uncertainty tubes from scenario batches.

The scenario program minimizes the total width ``sum(u - l)`` subject to
every scenario lying inside ``[l, u]``; its solution is the pointwise
minimum / maximum of the batch.  Two certified constructions are provided:
the a-priori bound (:func:`classic_tubes`) and the iterative wait-and-judge
loop (:func:`wait_and_judge_tubes`) that certifies from the observed number
of support scenarios.
"""

from __future__ import annotations

from dataclasses import dataclass
import logging

import numpy as np

from .certificates import (
    TRIALS_AS_WRITTEN,
    Certificate,
    classic_sample_size,
    wj_sample_size_for,
    wj_solve_tau,
)
from .sampler import Dataset, FunctionModel, ScenarioBatch, Stream, draw_scenarios

__all__ = [
    "Tube",
    "solve_scenario_program",
    "count_support",
    "support_indices",
    "support_by_removal",
    "classic_tubes",
    "wait_and_judge_tubes",
    "build_tube",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Tube:
    """Lower / upper bounds of shape ``(I, N)`` with their certificate."""

    lower: np.ndarray
    upper: np.ndarray
    t: int
    certificate: Certificate
    batch: ScenarioBatch | None = None

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, values: np.ndarray) -> np.ndarray:
        """Per-function containment flags for values of shape ``(..., I, N)``."""
        v = np.asarray(values)
        inside = (v >= self.lower) & (v <= self.upper)
        return inside.reshape(v.shape[:-2] + (-1,)).all(axis=-1)


def _values(batch) -> np.ndarray:
    v = batch.values if isinstance(batch, ScenarioBatch) else np.asarray(batch, dtype=float)
    if v.ndim == 2:
        v = v[:, None, :]
    if v.shape[0] < 1:
        raise ValueError("scenario batch is empty")
    return v


def solve_scenario_program(batch) -> tuple[np.ndarray, np.ndarray]:
    """Tightest enclosing tube: pointwise min and max over scenarios."""
    v = _values(batch)
    return v.min(axis=0), v.max(axis=0)


def support_indices(batch, tube=None) -> np.ndarray:
    """Sorted indices of scenarios that uniquely attain an extremum somewhere.

    A point where two scenarios share the extremal value contributes no
    support scenario (dropping either leaves the bound unchanged).
    """
    v = _values(batch)
    m = v.shape[0]
    if m == 1:
        return np.array([0])
    flat = v.reshape(m, -1)
    order = np.argpartition(flat, (1, m - 2), axis=0) if m > 2 else np.argsort(flat, axis=0)
    cols = np.arange(flat.shape[1])
    lo0, lo1 = flat[order[0], cols], flat[order[1], cols]
    hi0, hi1 = flat[order[-1], cols], flat[order[-2], cols]
    winners = np.concatenate([order[0][lo0 < lo1], order[-1][hi0 > hi1]])
    return np.unique(winners)


def count_support(batch, tube=None) -> int:
    """Number of support scenarios of the min/max scenario program."""
    return int(support_indices(batch).size)


def support_by_removal(batch) -> np.ndarray:
    """Support scenarios by brute force: drop each one and re-solve.

    Quadratic in ``m``; intended as a check on small batches.
    """
    v = _values(batch)
    m = v.shape[0]
    if m == 1:
        return np.array([0])
    lo, hi = solve_scenario_program(v)
    keep = []
    for j in range(m):
        rest = np.delete(v, j, axis=0)
        l2, u2 = solve_scenario_program(rest)
        if not (np.array_equal(l2, lo) and np.array_equal(u2, hi)):
            keep.append(j)
    return np.array(keep, dtype=int)


def _support_dim(model: FunctionModel) -> int:
    return 2 * model.grid.size * model.num_outputs


def classic_tubes(model: FunctionModel, data: Dataset, nu: float, kappa_t: float,
                  stream: Stream, t: int = 1, trials: str = TRIALS_AS_WRITTEN,
                  ridge: float | None = None, keep_batch: bool = True) -> Tube:
    """Tube from the a-priori scenario count with support dimension ``2 N |I|``."""
    m = classic_sample_size(_support_dim(model), nu, kappa_t, model.num_outputs, trials)
    batch = draw_scenarios(model, data, m, stream, ridge=ridge)
    lo, hi = solve_scenario_program(batch)
    s = count_support(batch)
    cert = Certificate(m=m, s=s, tau=1.0 - nu, nu=nu, kappa_t=kappa_t, method="classic")
    return Tube(lo, hi, t, cert, batch if keep_batch else None)


def wait_and_judge_tubes(model: FunctionModel, data: Dataset, nu: float, kappa_t: float,
                         stream: Stream, t: int = 1, trials: str = TRIALS_AS_WRITTEN,
                         ridge: float | None = None, increase: str = "jump",
                         reuse: bool = True, init: str = "jump",
                         keep_batch: bool = True) -> Tube:
    """Wait-and-judge tube: grow ``m`` until the support count certifies ``1 - nu``.

    ``increase="jump"`` jumps to the smallest ``m`` certifiable with the
    observed support count, ``"unit"`` adds one scenario.  ``reuse=False``
    redraws the whole batch each round instead of extending it.  The loop
    stops at the a-priori count, in which case the classic certificate is
    returned (``capped=True``).
    """
    if increase not in ("jump", "unit"):
        raise ValueError(f"unknown increase rule {increase!r}")
    m_cap = classic_sample_size(_support_dim(model), nu, kappa_t, model.num_outputs, trials)
    m = wj_sample_size_for(1, nu, kappa_t) if init == "jump" else 1
    m = min(m, m_cap)
    batch = None
    rounds = 0
    while True:
        rounds += 1
        if batch is None or not reuse:
            sub = stream if reuse else stream.child(rounds)
            batch = draw_scenarios(model, data, m, sub, ridge=ridge)
        elif batch.m < m:
            batch = batch.extend(draw_scenarios(model, data, m - batch.m, stream, start=batch.m, ridge=ridge))
        lo, hi = solve_scenario_program(batch)
        s = count_support(batch)
        tau = wj_solve_tau(m, s, kappa_t)
        log.debug("wait-and-judge round %d: m=%d s=%d tau=%.6f", rounds, m, s, tau)
        if tau >= 1.0 - nu:
            cert = Certificate(m=m, s=s, tau=tau, nu=nu, kappa_t=kappa_t,
                               method="wait_and_judge", rounds=rounds)
            break
        if m >= m_cap:
            cert = Certificate(m=m, s=s, tau=1.0 - nu, nu=nu, kappa_t=kappa_t,
                               method="classic", rounds=rounds, capped=True)
            break
        nxt = wj_sample_size_for(max(s, 1), nu, kappa_t) if increase == "jump" else m + 1
        m = min(max(nxt, m + 1), m_cap)
    return Tube(lo, hi, t, cert, batch if keep_batch else None)


_WJ_ONLY = ("increase", "reuse", "init")


def build_tube(method: str, *args, **kwargs) -> Tube:
    if method == "classic":
        for key in _WJ_ONLY:
            kwargs.pop(key, None)
        return classic_tubes(*args, **kwargs)
    if method == "wait_and_judge":
        return wait_and_judge_tubes(*args, **kwargs)
    raise ValueError(f"unknown tube method {method!r}")
