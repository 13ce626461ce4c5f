"""Sample sizes and confidence levels for scenario-based certificates.

Everything here is pure numerics on integers and probabilities:

* binomial lower tails in log space (``binomial_tail``),
* the a-priori scenario count for a convex program of support dimension
  ``d`` (``classic_sample_size``),
* the a-posteriori wait-and-judge level ``tau`` for ``s`` observed support
  scenarios out of ``m`` (``wj_solve_tau``) and its inverse in ``m``
  (``wj_sample_size_for``),
* the order-statistic sample size for scalar functionals
  (``scalar_sample_size``).

Tail sums use log-gamma terms and a max-shifted, compensated summation so
that trial counts of ``10^5``-``10^6`` stay well inside double range.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
import math

import numpy as np
from scipy.special import gammaln

__all__ = [
    "ConfidenceSchedule",
    "Certificate",
    "kappa_at",
    "log_binomial_tail",
    "binomial_tail",
    "classic_sample_size",
    "wj_solve_tau",
    "wj_sample_size_for",
    "scalar_sample_size",
]

TRIALS_AS_WRITTEN = "as_written"
TRIALS_JOINT = "joint"


@dataclass(frozen=True)
class ConfidenceSchedule:
    """Per-iteration confidence budget ``kappa_t = 6 kappa / (pi^2 t^2)``.

    The budgets sum to ``kappa`` over ``t = 1, 2, ...``.
    """

    kappa: float

    def __post_init__(self):
        if not 0.0 < self.kappa < 1.0:
            raise ValueError("kappa must lie in (0, 1)")

    def at(self, t: int) -> float:
        return kappa_at(self, t)


def kappa_at(schedule: ConfidenceSchedule | float, t: int) -> float:
    kappa = schedule.kappa if isinstance(schedule, ConfidenceSchedule) else float(schedule)
    if t < 1:
        raise ValueError("iterations start at t = 1")
    return 6.0 * kappa / (math.pi ** 2 * t * t)


@dataclass(frozen=True)
class Certificate:
    """Provenance of a tube or bound.

    ``tau`` is the certified inner level: the tube misses the unknown
    function with probability at most ``1 - tau``, with confidence at least
    ``1 - kappa_t`` over the scenario draw.
    """

    m: int
    s: int
    tau: float
    nu: float
    kappa_t: float
    method: str
    rounds: int = 1
    capped: bool = False

    def __post_init__(self):
        if self.method not in ("classic", "wait_and_judge"):
            raise ValueError(f"unknown certificate method {self.method!r}")
        if not 0 <= self.s <= self.m:
            raise ValueError("support count must satisfy 0 <= s <= m")
        if self.method == "wait_and_judge" and self.tau < 1.0 - self.nu:
            raise ValueError("wait-and-judge certificate below the requested level")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        return cls(**d)


def _check_prob(nu: float, name: str = "nu"):
    if not (0.0 < nu < 1.0):
        raise ValueError(f"{name} must lie in (0, 1), got {nu}")


def log_binomial_tail(m: int, k: int, nu: float) -> float:
    """``log P[Binomial(m, nu) <= k]``."""
    _check_prob(nu)
    m, k = int(m), int(k)
    if m < 0 or not 0 <= k <= m:
        raise ValueError("need 0 <= k <= m")
    if k == m:
        return 0.0
    r = np.arange(k + 1, dtype=float)
    terms = (
        gammaln(m + 1.0) - gammaln(r + 1.0) - gammaln(m - r + 1.0)
        + r * math.log(nu) + (m - r) * math.log1p(-nu)
    )
    top = float(terms.max())
    return top + math.log(math.fsum(np.exp(terms - top)))


def binomial_tail(m: int, k: int, nu: float) -> float:
    """Lower binomial tail ``sum_{r<=k} C(m,r) nu^r (1-nu)^(m-r)``.

    Equals the regularized incomplete beta ``I_{1-nu}(m-k, k+1)``.
    """
    return math.exp(log_binomial_tail(m, k, nu))


def _minimal_integer(pred, start: int) -> int:
    """Smallest ``m >= start`` with ``pred(m)``, for a monotone predicate."""
    if pred(start):
        return start
    lo, step = start, 1
    hi = start + step
    while not pred(hi):
        lo = hi
        step *= 2
        hi = start + step
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def classic_sample_size(dim: int, nu: float, kappa_t: float, outputs: int = 1,
                        trials: str = TRIALS_AS_WRITTEN) -> int:
    """Minimal scenario count for a convex scenario program.

    Finds the smallest ``m`` with
    ``binomial_tail(m * outputs, dim - 1, nu) <= kappa_t``; with
    ``trials="joint"`` the trial count is ``m`` regardless of ``outputs``.

    >>> classic_sample_size(1, 0.1, 1e-3)
    66
    """
    _check_prob(nu)
    _check_prob(kappa_t, "kappa_t")
    if dim < 1:
        raise ValueError("support dimension must be >= 1")
    if trials not in (TRIALS_AS_WRITTEN, TRIALS_JOINT):
        raise ValueError(f"unknown trials mode {trials!r}")
    factor = int(outputs) if trials == TRIALS_AS_WRITTEN else 1
    log_kappa = math.log(kappa_t)

    def ok(m):
        # fewer trials than the cutoff leave the whole mass in the tail
        return m * factor > dim - 1 and log_binomial_tail(m * factor, dim - 1, nu) <= log_kappa

    m = _minimal_integer(ok, 1)
    assert ok(m) and (m == 1 or not ok(m - 1))
    return m


def _wj_log_residual(m: int, s: int, log_kappa: float, tau: float,
                     lc: np.ndarray, lcm: float) -> float:
    # log of kappa/(m+1) * sum_r C(r,s) tau^(r-s)  minus  log of C(m,s) tau^(m-s)
    if tau <= 0.0:
        return math.inf
    lt = math.log(tau)
    expo = lc + np.arange(lc.shape[0]) * lt
    top = float(expo.max())
    lhs = log_kappa - math.log(m + 1.0) + top + math.log(math.fsum(np.exp(expo - top)))
    return lhs - (lcm + (m - s) * lt)


def wj_solve_tau(m: int, s: int, kappa_t: float, tol: float = 1e-12) -> float:
    """Wait-and-judge level for ``s`` support scenarios among ``m``.

    Returns the root in ``(0, 1)`` of
    ``kappa_t/(m+1) * sum_{r=s}^{m} C(r,s) tau^(r-s) - C(m,s) tau^(m-s)``,
    approached from below (the returned value never exceeds the root).
    For ``s == m`` there is no root and 0 is returned.
    """
    _check_prob(kappa_t, "kappa_t")
    m, s = int(m), int(s)
    if m < 1 or not 0 <= s <= m:
        raise ValueError("need m >= 1 and 0 <= s <= m")
    if s == m:
        return 0.0
    r = np.arange(s, m + 1, dtype=float)
    lc = gammaln(r + 1.0) - gammaln(s + 1.0) - gammaln(r - s + 1.0)
    lcm = float(lc[-1])
    log_kappa = math.log(kappa_t)
    lo, hi = 0.0, 1.0
    # the tolerance is absolute near 1 and relative for small roots
    while hi - lo > tol * min(1.0, hi):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _wj_log_residual(m, s, log_kappa, mid, lc, lcm) > 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def wj_residual(m: int, s: int, kappa_t: float, tau: float) -> float:
    """Residual scaled by ``C(m,s) tau^(m-s)``; zero at the wait-and-judge root."""
    r = np.arange(s, m + 1, dtype=float)
    lc = gammaln(r + 1.0) - gammaln(s + 1.0) - gammaln(r - s + 1.0)
    return math.expm1(_wj_log_residual(m, s, math.log(kappa_t), tau, lc, float(lc[-1])))


def wj_sample_size_for(s_guess: int, nu: float, kappa_t: float) -> int:
    """Smallest ``m >= s_guess`` whose wait-and-judge level reaches ``1 - nu``."""
    _check_prob(nu)
    _check_prob(kappa_t, "kappa_t")
    s = int(s_guess)
    if s < 1:
        raise ValueError("s_guess must be >= 1")
    target = 1.0 - nu
    log_kappa = math.log(kappa_t)

    # the residual is positive below the root, so one evaluation per m suffices
    def clears(m):
        if m == s:
            return False
        r = np.arange(s, m + 1, dtype=float)
        lc = gammaln(r + 1.0) - gammaln(s + 1.0) - gammaln(r - s + 1.0)
        return _wj_log_residual(m, s, log_kappa, target, lc, float(lc[-1])) >= 0.0

    m = _minimal_integer(clears, s)
    # settle bisection round-off so the loop's exit test agrees
    while wj_solve_tau(m, s, kappa_t) < target:
        m += 1
    return m


def scalar_sample_size(nu: float, kappa_t: float, discards: int = 0) -> tuple[int, int]:
    """``(m, p)`` such that the ``p``-th smallest of ``m`` samples bounds from above.

    ``m`` is minimal with ``binomial_tail(m, discards, nu) <= kappa_t`` and
    ``p = m - discards``.

    >>> scalar_sample_size(0.1, 6 * 1e-3 / 3.141592653589793 ** 2)
    (71, 71)
    """
    _check_prob(nu)
    _check_prob(kappa_t, "kappa_t")
    k = int(discards)
    if k < 0:
        raise ValueError("discards must be >= 0")
    log_kappa = math.log(kappa_t)
    m = _minimal_integer(lambda n: log_binomial_tail(n, k, nu) <= log_kappa, k + 1)
    return m, m - k
