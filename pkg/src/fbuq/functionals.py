"""Scalar functionals of discretized functions and their order-statistic bounds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .certificates import scalar_sample_size
from .domain import DomainGrid
from .sampler import Dataset, FunctionModel, Stream, draw_scenarios

__all__ = ["Functional", "ScalarBound", "check_functional", "eval_functional", "eval_functional_batch", "scalar_bound"]

KINDS = ("lipschitz", "supremum", "infimum", "integral", "rkhs_norm")


@dataclass(frozen=True)
class Functional:
    kind: str
    orientation: str = "upper"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown functional {self.kind!r}")
        if self.orientation not in ("upper", "lower"):
            raise ValueError("orientation must be 'upper' or 'lower'")


@dataclass(frozen=True)
class ScalarBound:
    functional: str
    orientation: str
    bound: float
    m: int
    p: int
    nu: float
    kappa_t: float
    discards: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _riemann_weights(grid: DomainGrid) -> np.ndarray:
    # left Riemann sum: each point weighs the gap to its successor, the last point zero
    w = np.ones(1)
    for k, n in enumerate(grid.points_per_axis):
        axis = np.unique(grid.points[:, k])
        gaps = np.append(np.diff(axis), 0.0) if n > 1 else np.ones(1)
        w = np.outer(w, gaps).ravel()
    return w


def eval_functional_batch(kind: str, values: np.ndarray, grid: DomainGrid,
                          coeffs: np.ndarray | None = None, gram: np.ndarray | None = None) -> np.ndarray:
    """Evaluate a functional on each row of ``values`` (shape ``(m, N)``)."""
    f = np.atleast_2d(np.asarray(values, dtype=float))
    if kind == "supremum":
        return f.max(axis=1)
    if kind == "infimum":
        return f.min(axis=1)
    if kind == "integral":
        return f @ _riemann_weights(grid)
    if kind == "lipschitz":
        if grid.size < 2:
            return np.zeros(f.shape[0])
        if grid.ndim == 1:
            # in 1-D the steepest chord is always between neighbours
            gaps = np.diff(grid.points[:, 0])
            return np.max(np.abs(np.diff(f, axis=1)) / gaps, axis=1)
        dist = pdist(grid.points)
        return np.array([np.max(pdist(row[:, None], "cityblock") / dist) for row in f])
    if kind == "rkhs_norm":
        if coeffs is None or gram is None:
            raise ValueError("rkhs_norm needs kernel-section coefficients and their Gram matrix")
        c = np.atleast_2d(np.asarray(coeffs, dtype=float))
        q = np.einsum("jr,rs,js->j", c, gram, c)
        return np.sqrt(np.clip(q, 0.0, None))
    raise ValueError(f"unknown functional {kind!r}")


def eval_functional(kind: str, f_values, grid: DomainGrid, coeffs=None, gram=None) -> float:
    """Scalar functional of one discretized function.

    >>> from fbuq.domain import build_grid
    >>> eval_functional("lipschitz", [0.0, 2.0, 1.0], build_grid([[0, 1]], [3]))
    4.0
    """
    c = None if coeffs is None else np.asarray(coeffs, dtype=float)[None, :]
    return float(eval_functional_batch(kind, np.asarray(f_values, dtype=float)[None, :], grid, c, gram)[0])


def check_functional(model: FunctionModel, functional: Functional, output: int):
    if functional.kind == "rkhs_norm" and model.basis[output].kind != "kernel_sections":
        raise ValueError("rkhs_norm requires a kernel_sections basis")


def scenario_functionals(model: FunctionModel, batch, functional: Functional, output: int = 0) -> np.ndarray:
    vals = batch.values[:, output, :]
    coeffs = gram = None
    if functional.kind == "rkhs_norm":
        R = model.num_functions(output)
        coeffs = batch.coeffs[:, output, :R]
        gram = model.basis_matrix(output)
    return eval_functional_batch(functional.kind, vals, model.grid, coeffs, gram)


def scalar_bound(model: FunctionModel, data: Dataset, functional: Functional, nu: float,
                 kappa_t: float, discards: int, stream: Stream, output: int = 0) -> ScalarBound:
    """High-probability one-sided bound on ``S(h_output)``.

    Draws ``m`` scenarios and returns the ``p``-th smallest functional value
    (upper orientation) or the ``p``-th largest (lower orientation), with
    ``(m, p)`` from :func:`~fbuq.certificates.scalar_sample_size`.
    """
    check_functional(model, functional, output)
    m, p = scalar_sample_size(nu, kappa_t, discards)
    batch = draw_scenarios(model, data, m, stream)
    vals = scenario_functionals(model, batch, functional, output)
    if functional.orientation == "upper":
        bound = np.sort(vals, kind="stable")[p - 1]
    else:
        bound = -np.sort(-vals, kind="stable")[p - 1]
    return ScalarBound(functional.kind, functional.orientation, float(bound), m, p, nu, kappa_t, int(discards))
