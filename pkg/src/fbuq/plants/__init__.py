"""Experiment backends: seeded synthetic functions and a simulated pendulum."""

from .furuta import (
    FURUTA_INITIAL,
    FURUTA_PRESETS,
    FurutaParams,
    FurutaPlant,
    Trajectory,
    furuta_model,
    furuta_plant,
    furuta_reward_constraints,
    furuta_rollout,
    lqr_gain,
)
from .synthetic import (
    EXAMPLE1_SEED,
    HAAR_SEED,
    SyntheticPlant,
    draw_truth,
    example1_initial_index,
    example1_model,
    example1_plant,
    haar_model,
    haar_plant,
)

__all__ = [
    "FURUTA_INITIAL",
    "FURUTA_PRESETS",
    "FurutaParams",
    "FurutaPlant",
    "Trajectory",
    "furuta_model",
    "furuta_plant",
    "furuta_reward_constraints",
    "furuta_rollout",
    "lqr_gain",
    "EXAMPLE1_SEED",
    "HAAR_SEED",
    "SyntheticPlant",
    "draw_truth",
    "example1_initial_index",
    "example1_model",
    "example1_plant",
    "haar_model",
    "haar_plant",
]
