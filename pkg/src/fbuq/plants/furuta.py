"""Linearized Furuta pendulum under linear state feedback.

The state is ``x = [theta, alpha, theta_dot, alpha_dot]`` (arm angle,
pendulum angle from upright, and their rates); the input is the motor
voltage ``u = K x``.  The continuous model is the standard linearization of
a rotary inverted pendulum about the upright position with Qube-Servo-class
parameters, discretized with a zero-order hold.

The two tuned gains ``(K1, K2)`` are affine images of ``a in [0, 1]^2``;
``K3, K4`` stay fixed.  The default preset was calibrated so that
``a = (0.23, 0.40)`` stabilizes the pendulum with both angle margins above
0.4 rad while the box also contains unstable gains; see
``scripts/calibrate_presets.py``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.linalg import expm, solve_discrete_are

from ..domain import BasisFamily, DomainGrid, build_grid
from ..sampler import CoeffDistribution, FunctionModel, NoiseDistribution, Stream

__all__ = [
    "FurutaParams",
    "Trajectory",
    "continuous_model",
    "discretize",
    "lqr_gain",
    "furuta_rollout",
    "furuta_reward_constraints",
    "FurutaPlant",
    "furuta_plant",
    "furuta_model",
    "FURUTA_PRESETS",
    "FURUTA_INITIAL",
]


@dataclass(frozen=True)
class FurutaParams:
    # motor
    Rm: float = 8.4
    km: float = 0.042
    # rotary arm
    mr: float = 0.095
    Lr: float = 0.085
    Dr: float = 0.0015
    # pendulum
    mp: float = 0.024
    Lp: float = 0.129
    Dp: float = 0.0005
    g: float = 9.81
    dt: float = 0.005
    horizon: int = 1000
    x0: tuple = (0.5, 0.3, 0.0, 0.0)
    k1_range: tuple = (0.5, 6.5)
    k2_range: tuple = (-65.0, -15.0)
    k34: tuple = (0.6, -1.4)
    angle_limit: float = math.pi

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("episode horizon must be >= 1")
        if self.dt <= 0:
            raise ValueError("sample time must be positive")
        for lo, hi in (self.k1_range, self.k2_range):
            if not lo < hi:
                raise ValueError("gain ranges must satisfy lo < hi")

    def gains(self, a) -> np.ndarray:
        """Feedback row ``[K1, K2, K3, K4]`` for ``a`` in the unit square."""
        a = np.asarray(a, dtype=float).reshape(-1)
        if a.shape != (2,) or np.any(a < 0) or np.any(a > 1):
            raise ValueError(f"gain parameter {a} outside [0, 1]^2")
        (l1, h1), (l2, h2) = self.k1_range, self.k2_range
        return np.array([l1 + a[0] * (h1 - l1), l2 + a[1] * (h2 - l2), *self.k34])

    def parameter_for(self, k1: float, k2: float) -> np.ndarray:
        """Inverse of the gain map on its first two entries."""
        (l1, h1), (l2, h2) = self.k1_range, self.k2_range
        return np.array([(k1 - l1) / (h1 - l1), (k2 - l2) / (h2 - l2)])


def continuous_model(p: FurutaParams) -> tuple[np.ndarray, np.ndarray]:
    """``(A, B)`` of the linearization about the upright equilibrium."""
    Jr = p.mr * p.Lr ** 2 / 3.0
    Jp = p.mp * p.Lp ** 2 / 3.0
    c = 0.5 * p.mp * p.Lp * p.Lr
    M = np.array([[Jr + p.mp * p.Lr ** 2, -c], [-c, Jp]])
    Minv = np.linalg.inv(M)
    # generalized forces: stiffness on alpha, viscous damping, back-EMF on theta
    Kq = np.array([[0.0, 0.0], [0.0, 0.5 * p.mp * p.g * p.Lp]])
    Dq = np.diag([p.Dr + p.km ** 2 / p.Rm, p.Dp])
    bq = np.array([p.km / p.Rm, 0.0])
    A = np.zeros((4, 4))
    A[:2, 2:] = np.eye(2)
    A[2:, :2] = Minv @ Kq
    A[2:, 2:] = -Minv @ Dq
    B = np.zeros((4, 1))
    B[2:, 0] = Minv @ bq
    return A, B


def discretize(A: np.ndarray, B: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Zero-order-hold discretization via the augmented matrix exponential."""
    n, k = B.shape
    aug = np.zeros((n + k, n + k))
    aug[:n, :n] = A
    aug[:n, n:] = B
    E = expm(aug * dt)
    return E[:n, :n], E[:n, n:]


def lqr_gain(p: FurutaParams, Q=(5.0, 1.0, 0.1, 0.1), R=1.0) -> np.ndarray:
    """Discrete LQR gain in the ``u = K x`` sign convention."""
    Ad, Bd = discretize(*continuous_model(p), p.dt)
    Qm = np.diag(Q)
    Rm = np.atleast_2d(R)
    P = solve_discrete_are(Ad, Bd, Qm, Rm)
    K = np.linalg.solve(Rm + Bd.T @ P @ Bd, Bd.T @ P @ Ad)
    return -K.ravel()


@dataclass(frozen=True, eq=False)
class Trajectory:
    states: np.ndarray      # (T_e, 4), states x_1 .. x_{T_e}
    inputs: np.ndarray      # (T_e,)
    saturated: bool = False

    @property
    def theta(self):
        return self.states[:, 0]

    @property
    def alpha(self):
        return self.states[:, 1]


def furuta_rollout(p: FurutaParams, a, dynamics=None) -> Trajectory:
    """Closed-loop simulation for ``p.horizon`` steps from ``p.x0``.

    Angles are clipped to ``[-pi, pi]``; once the state leaves that box or
    turns non-finite the remaining samples are held at the clipped values
    and the trajectory is flagged as saturated.
    """
    K = p.gains(a)
    Ad, Bd = dynamics if dynamics is not None else discretize(*continuous_model(p), p.dt)
    Acl = Ad + Bd @ K[None, :]
    x = np.asarray(p.x0, dtype=float)
    T = p.horizon
    states = np.empty((T, 4))
    inputs = np.empty(T)
    lim = p.angle_limit
    saturated = False
    for k in range(T):
        u = float(K @ x)
        x = Acl @ x
        if not np.all(np.isfinite(x)) or abs(x[0]) > lim or abs(x[1]) > lim:
            saturated = True
            held = np.clip(np.nan_to_num(x, nan=lim, posinf=lim, neginf=-lim), -lim, lim)
            held[2:] = 0.0
            states[k:] = held
            inputs[k:] = u if np.isfinite(u) else 0.0
            break
        states[k] = x
        inputs[k] = u
    return Trajectory(states, inputs, saturated)


def furuta_reward_constraints(traj: Trajectory) -> np.ndarray:
    """``[h0, h1, h2]``: stabilization reward and the two angle margins.

    ``h1 = pi/2 - max|theta|`` and ``h2 = pi/4 - max|alpha|`` are
    non-negative exactly when the angle limits hold.
    """
    th = np.abs(traj.theta)
    al = np.abs(traj.alpha)
    inner = np.maximum(1.0 - (0.8 * al + 0.2 * th) / math.pi, 0.0)
    h0 = float(np.mean(inner ** 2))
    return np.array([h0, math.pi / 2 - float(th.max()), math.pi / 4 - float(al.max())])


@dataclass(frozen=True, eq=False)
class FurutaPlant:
    """Simulated pendulum: outputs ``(h0, h1, h2)`` plus bounded measurement noise.

    Noiseless values are cached per grid index; they do not depend on any
    random stream.
    """

    params: FurutaParams
    grid: DomainGrid
    noise: NoiseDistribution
    _cache: dict = field(default_factory=dict, repr=False)

    num_outputs = 3

    def __post_init__(self):
        if self.grid.ndim != 2:
            raise ValueError("the gain grid must be two-dimensional")
        object.__setattr__(self, "_dyn", discretize(*continuous_model(self.params), self.params.dt))

    def rollout(self, idx: int) -> Trajectory:
        return furuta_rollout(self.params, self.grid.points[int(idx)], self._dyn)

    def truth(self, idx: int) -> np.ndarray:
        idx = int(idx)
        if idx not in self._cache:
            self._cache[idx] = furuta_reward_constraints(self.rollout(idx))
        return self._cache[idx].copy()

    def truth_table(self) -> np.ndarray:
        """Noiseless outputs at every grid point, shape ``(3, N)``."""
        return np.stack([self.truth(i) for i in range(self.grid.size)], axis=1)

    def query(self, idx: int, stream: Stream) -> np.ndarray:
        return self.truth(idx) + self.noise.sample(stream.generator(), 3)


def furuta_plant(params: FurutaParams | None = None, noise: NoiseDistribution | None = None,
                 points_per_axis: int = 21) -> FurutaPlant:
    params = FurutaParams() if params is None else params
    noise = NoiseDistribution("uniform", 0.05) if noise is None else noise
    grid = build_grid([[0.0, 1.0], [0.0, 1.0]], [points_per_axis, points_per_axis])
    return FurutaPlant(params, grid, noise)


def furuta_model(plant: FurutaPlant, lengthscale: float = 0.3, variance: float = 0.03) -> FunctionModel:
    """Kernel-section model for the three outputs on the plant's grid."""
    return FunctionModel(
        plant.grid,
        BasisFamily("kernel_sections", lengthscale=lengthscale),
        CoeffDistribution("gaussian", 0.0, variance),
        plant.noise,
        num_outputs=3,
    )


# model and grid settings per preset; "full_scale" is the full 101 x 101 grid
FURUTA_PRESETS = {
    "default": {"params": FurutaParams(), "points_per_axis": 21, "lengthscale": 0.3, "variance": 0.03},
    "full_scale": {"params": FurutaParams(), "points_per_axis": 101, "lengthscale": 1e-2, "variance": 0.1},
}
FURUTA_INITIAL = (0.23, 0.40)
