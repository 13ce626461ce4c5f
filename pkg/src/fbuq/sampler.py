"""Random-function model and data-consistent scenario generation.

Scenario ``j`` is produced from its own random stream: prior coefficients
are drawn for every output block, then one noise value per observation
``(i, t')``, and the coefficients are projected with a minimum-norm update so
that the scenario reproduces ``y - noise`` at the sampled parameters.

Random streams
--------------
A :class:`Stream` is a root seed plus a tuple of non-negative integers.  The
generator behind a stream is ``PCG64(SeedSequence(seed, spawn_key=key))``, so
distinct keys give independent streams and the mapping is reproducible
across runs, machines and batch sizes.  Within a tube construction the
scenario ``j`` of iteration ``t`` uses the key ``(SCENARIOS, t, j)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .domain import BasisFamily, DesignMatrix, DomainGrid, eval_basis

__all__ = [
    "Stream",
    "CoeffDistribution",
    "NoiseDistribution",
    "FunctionModel",
    "Dataset",
    "ScenarioBatch",
    "RankDeficientError",
    "sample_prior_coeffs",
    "project_coeffs",
    "draw_scenarios",
    "auto_ridge",
]

# top-level stream tags
SCENARIOS = 0
PLANT = 1
TRUTH = 2
TESTS = 3


@dataclass(frozen=True)
class Stream:
    """Deterministic random substream identified by ``(seed, key)``."""

    seed: int
    key: tuple = ()

    def child(self, *ids: int) -> "Stream":
        return Stream(self.seed, self.key + tuple(int(i) for i in ids))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=self.key)
        return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class CoeffDistribution:
    """Prior over basis coefficients, i.i.d. across coordinates.

    ``gaussian`` uses ``mean`` and ``variance``; ``student_t`` draws
    ``scale * T_dof``; ``uniform`` draws from ``[lo, hi)``.
    """

    kind: str = "gaussian"
    mean: float = 0.0
    variance: float = 0.1
    dof: float = 10.0
    scale: float = 1.0
    lo: float = -1.0
    hi: float = 1.0

    def __post_init__(self):
        if self.kind == "gaussian":
            if not self.variance > 0:
                raise ValueError("gaussian prior needs variance > 0")
        elif self.kind == "student_t":
            if not (self.dof > 0 and self.scale > 0):
                raise ValueError("student_t prior needs dof > 0 and scale > 0")
        elif self.kind == "uniform":
            if not self.lo < self.hi:
                raise ValueError("uniform prior needs lo < hi")
        else:
            raise ValueError(f"unknown coefficient distribution {self.kind!r}")

    def sample(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self.kind == "gaussian":
            return rng.normal(self.mean, math.sqrt(self.variance), shape)
        if self.kind == "student_t":
            return self.scale * rng.standard_t(self.dof, shape)
        return rng.uniform(self.lo, self.hi, shape)


@dataclass(frozen=True)
class NoiseDistribution:
    """Observation noise: ``uniform(-delta, delta)``, ``gaussian(0, variance)`` or ``none``.

    ``none`` is the zero-noise limit: scenarios interpolate the data exactly.
    """

    kind: str = "uniform"
    delta: float = 0.1
    variance: float = 0.0

    def __post_init__(self):
        if self.kind == "uniform":
            if not self.delta > 0:
                raise ValueError("uniform noise needs delta > 0")
        elif self.kind == "gaussian":
            if not self.variance > 0:
                raise ValueError("gaussian noise needs variance > 0")
        elif self.kind != "none":
            raise ValueError(f"unknown noise distribution {self.kind!r}")

    @property
    def std(self) -> float:
        if self.kind == "gaussian":
            return math.sqrt(self.variance)
        if self.kind == "uniform":
            return self.delta / math.sqrt(3.0)
        return 0.0

    def sample(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self.kind == "uniform":
            return rng.uniform(-self.delta, self.delta, shape)
        if self.kind == "gaussian":
            return rng.normal(0.0, self.std, shape)
        return np.zeros(shape)


@dataclass(frozen=True, eq=False)
class FunctionModel:
    """Random function ``h_i(a) = sum_r c_{i,r} phi_{i,r}(a)`` on a grid.

    Output 0 is the reward; outputs ``1..`` are constraints.  ``basis`` is
    either one family shared by all outputs or one family per output.
    """

    grid: DomainGrid
    basis: BasisFamily | tuple
    prior: CoeffDistribution = field(default_factory=CoeffDistribution)
    noise: NoiseDistribution = field(default_factory=NoiseDistribution)
    num_outputs: int = 1

    def __post_init__(self):
        if self.num_outputs < 1:
            raise ValueError("at least one output is required")
        fams = self.basis if isinstance(self.basis, tuple) else (self.basis,) * self.num_outputs
        if len(fams) != self.num_outputs:
            raise ValueError("one basis family per output is required")
        object.__setattr__(self, "basis", tuple(fams))
        mats = []
        cache = {}
        for fam in fams:
            if fam not in cache:
                B = eval_basis(fam, self.grid)
                if not np.all(np.isfinite(B)):
                    raise ValueError("basis evaluates to non-finite values")
                B.setflags(write=False)
                cache[fam] = B
            mats.append(cache[fam])
        object.__setattr__(self, "_matrices", tuple(mats))

    def basis_matrix(self, i: int = 0) -> np.ndarray:
        """``N x R_i`` evaluation matrix of output ``i``."""
        return self._matrices[i]

    def num_functions(self, i: int = 0) -> int:
        return self._matrices[i].shape[1]

    def design(self, i: int, indices) -> DesignMatrix:
        idx = np.asarray(indices, dtype=int).reshape(-1)
        return DesignMatrix(self._matrices[i][idx].copy(), idx)

    def evaluate(self, coeffs: np.ndarray) -> np.ndarray:
        """Values on the grid for coefficient blocks; ``(..., I, R) -> (..., I, N)``."""
        coeffs = np.asarray(coeffs, dtype=float)
        out = np.empty(coeffs.shape[:-1] + (self.grid.size,))
        for i in range(self.num_outputs):
            out[..., i, :] = coeffs[..., i, :] @ self._matrices[i].T
        return out


@dataclass(frozen=True, eq=False)
class Dataset:
    """Evaluated grid indices and the observation table ``y[t', i]``."""

    indices: np.ndarray
    observations: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int).reshape(-1)
        y = np.asarray(self.observations, dtype=float)
        if y.ndim == 1:
            y = y.reshape(-1, 1) if idx.size else y.reshape(0, max(1, y.size))
        if y.shape[0] != idx.size:
            raise ValueError("one observation row per evaluated parameter is required")
        if not np.all(np.isfinite(y)):
            raise ValueError("observation table must be complete and finite")
        idx.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "observations", y)

    @classmethod
    def empty(cls, num_outputs: int = 1) -> "Dataset":
        return cls(np.zeros(0, dtype=int), np.zeros((0, num_outputs)))

    def __len__(self):
        return self.indices.size

    @property
    def num_outputs(self) -> int:
        return self.observations.shape[1]

    def append(self, index: int, y: Sequence[float]) -> "Dataset":
        y = np.asarray(y, dtype=float).reshape(1, -1)
        if len(self) and y.shape[1] != self.num_outputs:
            raise ValueError("observation has the wrong number of outputs")
        return Dataset(np.append(self.indices, int(index)),
                       np.vstack([self.observations.reshape(-1, y.shape[1]), y]))


@dataclass(frozen=True, eq=False)
class ScenarioBatch:
    """``m`` scenarios: ``values[j, i, a]`` and coefficients ``coeffs[j, i, r]``.

    ``noise[j, t', i]`` holds the noise realizations each scenario was
    projected against; scenario ``j`` came from ``stream.child(first + j)``.
    """

    values: np.ndarray
    coeffs: np.ndarray
    noise: np.ndarray
    stream: Stream
    first: int = 0

    @property
    def m(self) -> int:
        return self.values.shape[0]

    def __len__(self):
        return self.m

    def extend(self, other: "ScenarioBatch") -> "ScenarioBatch":
        if other.stream != self.stream or other.first != self.first + self.m:
            raise ValueError("batches are not consecutive substreams")
        return ScenarioBatch(
            np.concatenate([self.values, other.values]),
            np.concatenate([self.coeffs, other.coeffs]),
            np.concatenate([self.noise, other.noise]),
            self.stream,
            self.first,
        )

    def subset(self, keep) -> "ScenarioBatch":
        keep = np.asarray(keep)
        return ScenarioBatch(self.values[keep], self.coeffs[keep], self.noise[keep], self.stream, self.first)


class RankDeficientError(np.linalg.LinAlgError):
    """``Phi Phi^T`` is singular and no ridge was supplied."""


def sample_prior_coeffs(dist: CoeffDistribution, count: int, stream: Stream, dim: int = 1) -> np.ndarray:
    """``count`` i.i.d. coefficient vectors of length ``dim``; shape (count, dim)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return dist.sample(stream.generator(), (count, dim))


def auto_ridge(gram: np.ndarray, cond_limit: float = 1e12) -> float:
    """Tikhonov constant for a numerically singular Gram matrix, else 0."""
    t = gram.shape[0]
    if t == 0:
        return 0.0
    tr = float(np.trace(gram))
    if not tr > 0:
        return 1e-8
    if np.linalg.cond(gram) > cond_limit:
        return 1e-8 * tr / t
    return 0.0


def _factor(gram: np.ndarray, ridge: float):
    g = gram + ridge * np.eye(gram.shape[0]) if ridge else gram
    try:
        return cho_factor(g, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise RankDeficientError("Phi Phi^T is not positive definite; supply a ridge") from exc


def project_coeffs(c_prior, phi, target, ridge: float = 0.0) -> np.ndarray:
    """Minimum-norm update of prior coefficients onto ``Phi c = target``.

    Computes ``c + Phi^T (Phi Phi^T + ridge I)^{-1} (target - Phi c)`` through a
    Cholesky factorization.  ``c_prior`` may be a single vector ``(R,)`` or a
    stack ``(m, R)`` with matching ``target`` of shape ``(t,)`` or ``(m, t)``.
    """
    Phi = phi.entries if isinstance(phi, DesignMatrix) else np.asarray(phi, dtype=float)
    c = np.asarray(c_prior, dtype=float)
    tgt = np.asarray(target, dtype=float)
    if Phi.ndim != 2 or tgt.shape[-1] != Phi.shape[0] or c.shape[-1] != Phi.shape[1]:
        raise ValueError("shapes of Phi, coefficients and target do not agree")
    if Phi.shape[0] == 0:
        return c.copy()
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    gram = Phi @ Phi.T
    if ridge == 0 and np.linalg.matrix_rank(Phi) < Phi.shape[0]:
        raise RankDeficientError("Phi does not have full row rank; supply a ridge")
    fac = _factor(gram, ridge)
    out = c + cho_solve(fac, (tgt - c @ Phi.T).T, check_finite=False).T @ Phi
    if ridge == 0:
        # one refinement step; recovers accuracy lost to an ill-conditioned Gram
        out += cho_solve(fac, (tgt - out @ Phi.T).T, check_finite=False).T @ Phi
    return out


def draw_scenarios(model: FunctionModel, data: Dataset, m: int, stream: Stream,
                   start: int = 0, ridge: float | None = None) -> ScenarioBatch:
    """Draw scenarios ``start .. start+m-1`` for ``data``.

    ``ridge=None`` selects :func:`auto_ridge` per output block; with an empty
    dataset the scenarios are plain prior draws.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    I = model.num_outputs
    t = len(data)
    if t and data.num_outputs != I:
        raise ValueError("dataset outputs do not match the model")
    R = max(model.num_functions(i) for i in range(I))
    coeffs = np.zeros((m, I, R))
    noise = np.empty((m, t, I))
    for j in range(m):
        rng = stream.child(start + j).generator()
        for i in range(I):
            coeffs[j, i, : model.num_functions(i)] = model.prior.sample(rng, model.num_functions(i))
        noise[j] = model.noise.sample(rng, (t, I))
    if t:
        y = data.observations
        for i in range(I):
            Ri = model.num_functions(i)
            D = model.design(i, data.indices)
            lam = auto_ridge(D.entries @ D.entries.T) if ridge is None else ridge
            target = y[:, i][None, :] - noise[:, :, i]
            coeffs[:, i, :Ri] = project_coeffs(coeffs[:, i, :Ri], D, target, lam)
    values = np.empty((m, I, model.grid.size))
    for i in range(I):
        Ri = model.num_functions(i)
        values[:, i, :] = coeffs[:, i, :Ri] @ model.basis_matrix(i).T
    return ScenarioBatch(values, coeffs, noise, stream, start)
