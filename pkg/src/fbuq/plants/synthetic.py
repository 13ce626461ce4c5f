"""Seeded synthetic plants whose ground truth lies in the model's span."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..domain import BasisFamily, build_grid
from ..sampler import TRUTH, CoeffDistribution, FunctionModel, NoiseDistribution, Stream

__all__ = [
    "SyntheticPlant",
    "draw_truth",
    "example1_model",
    "example1_plant",
    "example1_initial_index",
    "haar_model",
    "haar_plant",
    "EXAMPLE1_SEED",
    "HAAR_SEED",
]

# calibrated so that the 20% quantile of the default truth sits near -2.15
EXAMPLE1_SEED = 10
HAAR_SEED = 0


@dataclass(frozen=True, eq=False)
class SyntheticPlant:
    """Plant returning ``truth + noise`` for a fixed function table.

    ``values`` has shape ``(I, N)`` over the model grid; ``coeffs`` keeps the
    generating coefficients, shape ``(I, R)``.
    """

    model: FunctionModel
    values: np.ndarray
    coeffs: np.ndarray | None = None

    @property
    def num_outputs(self) -> int:
        return self.values.shape[0]

    def truth(self, idx: int) -> np.ndarray:
        return self.values[:, int(idx)].copy()

    def query(self, idx: int, stream: Stream) -> np.ndarray:
        eps = self.model.noise.sample(stream.generator(), self.num_outputs)
        return self.values[:, int(idx)] + eps


def draw_truth(model: FunctionModel, stream: Stream) -> SyntheticPlant:
    """One prior draw of every output, used as ground truth."""
    rng = stream.generator()
    R = max(model.num_functions(i) for i in range(model.num_outputs))
    coeffs = np.zeros((model.num_outputs, R))
    for i in range(model.num_outputs):
        coeffs[i, : model.num_functions(i)] = model.prior.sample(rng, model.num_functions(i))
    values = np.empty((model.num_outputs, model.grid.size))
    for i in range(model.num_outputs):
        values[i] = model.basis_matrix(i) @ coeffs[i, : model.num_functions(i)]
    values.setflags(write=False)
    return SyntheticPlant(model, values, coeffs)


def example1_model(num_points: int = 1000, basis_size: int = 101, variance: float = 0.1,
                   delta: float = 0.1) -> FunctionModel:
    """Cosine basis ``cos(0.05 pi r a)``, ``r < basis_size``, on ``num_points`` points of [0, 1]."""
    grid = build_grid([[0.0, 1.0]], [num_points])
    return FunctionModel(
        grid,
        BasisFamily("trigonometric", size=basis_size),
        CoeffDistribution("gaussian", 0.0, variance),
        NoiseDistribution("uniform", delta),
    )


def example1_plant(seed: int = EXAMPLE1_SEED, model: FunctionModel | None = None) -> SyntheticPlant:
    model = example1_model() if model is None else model
    return draw_truth(model, Stream(seed).child(TRUTH))


def example1_initial_index(plant: SyntheticPlant, threshold: float, near: float = 0.53,
                           margin: float = 0.5) -> int:
    """Grid point closest to ``near`` whose true reward clears ``threshold + margin``.

    The margin keeps the start point certifiably safe once the noise range
    is subtracted from its observation.
    """
    grid = plant.model.grid
    ok = np.flatnonzero(plant.values[0] >= threshold + margin)
    if ok.size == 0:
        raise ValueError("no grid point clears the threshold with the requested margin")
    d = np.abs(grid.points[ok, 0] - near)
    return int(ok[np.argmin(d)])


def haar_model(num_points: int = 1000, scale: float = 1e-2, dof: float = 10.0,
               noise_variance: float = 1e-2) -> FunctionModel:
    """Haar wavelets with heavy-tailed coefficients and gaussian noise."""
    grid = build_grid([[0.0, 1.0]], [num_points])
    return FunctionModel(
        grid,
        BasisFamily("haar"),
        CoeffDistribution("student_t", dof=dof, scale=scale),
        NoiseDistribution("gaussian", variance=noise_variance),
    )


def haar_plant(seed: int = HAAR_SEED, model: FunctionModel | None = None) -> SyntheticPlant:
    model = haar_model() if model is None else model
    return draw_truth(model, Stream(seed).child(TRUTH))
