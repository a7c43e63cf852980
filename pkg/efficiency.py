"""
efficiency.py — Closed-form AR(1) thinning efficiency
It costs 1 unit to advance the chain and theta units to evaluate f.
The lag-l autocorrelation of f along the chain is rho**l.
"""

import math
from dataclasses import dataclass, asdict

import numpy as np

from errors import DomainError


# ══════════════════════════════════════════════════════
# 📦  PROBLEM TYPES
# ══════════════════════════════════════════════════════

def check_theta(theta: float) -> float:
    theta = float(theta)
    if not theta >= 0 or math.isinf(theta):
        raise DomainError("theta must be nonnegative")
    return theta


def check_rho(rho: float) -> float:
    rho = float(rho)
    if not -1.0 < rho < 1.0:
        raise DomainError(f"rho must lie in (-1, 1), got {rho}")
    return rho


@dataclass(frozen=True)
class ThinningProblem:
    theta: float
    rho  : float

    def __post_init__(self):
        object.__setattr__(self, "theta", check_theta(self.theta))
        object.__setattr__(self, "rho", check_rho(self.rho))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class AcceptanceAdjustedProblem:
    """theta is the cost of f per *accepted* proposal; rejected ones reuse f."""
    theta: float
    rho  : float
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "theta", check_theta(self.theta))
        object.__setattr__(self, "rho", check_rho(self.rho))
        alpha = float(self.alpha)
        if not 0.0 <= alpha <= 1.0:
            raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
        object.__setattr__(self, "alpha", alpha)

    def to_dict(self) -> dict:
        return asdict(self)


# ══════════════════════════════════════════════════════
# 🔧  POWERS OF RHO
# ══════════════════════════════════════════════════════

def _as_k(k, minimum: int = 1) -> np.ndarray:
    ks = np.asarray(k)
    if ks.dtype.kind not in "iu":
        if not np.all(np.asarray(ks, dtype=float) == np.floor(ks)):
            raise DomainError("thinning factor k must be an integer")
        ks = ks.astype(np.int64)
    if np.any(ks < minimum):
        raise DomainError(f"thinning factor k must be >= {minimum}")
    return ks


def _out(values: np.ndarray, like):
    return float(values) if np.ndim(like) == 0 else values


def rho_power(rho: float, k) -> np.ndarray:
    """rho**k as sign(rho)**k * exp(k*log|rho|); underflows cleanly to 0."""
    k = np.asarray(k, dtype=np.float64)
    if rho == 0.0:
        return np.where(k == 0, 1.0, 0.0)
    mag = np.exp(k * math.log(abs(rho)))
    if rho > 0:
        return mag
    return np.where(np.mod(k, 2) == 0, mag, -mag)


def one_minus_rho_power(rho: float, k) -> np.ndarray:
    """1 - rho**k, without cancellation when rho is close to 1."""
    k = np.asarray(k, dtype=np.float64)
    if rho > 0:
        return -np.expm1(k * math.log(rho))
    return 1.0 - rho_power(rho, k)


def log_variance_factor(rho: float, k) -> np.ndarray:
    """log((1 + rho**k) / (1 - rho**k)), the AR(1) variance inflation at stride k."""
    return np.log1p(rho_power(rho, k)) - np.log(one_minus_rho_power(rho, k))


# ══════════════════════════════════════════════════════
# 📐  EFFICIENCY
# ══════════════════════════════════════════════════════

def eff(k, p: ThinningProblem):
    """Asymptotic efficiency of thinning factor k versus k=1.

    Evaluated as exp of a sum of logs, so it stays finite at rho near 1 and
    large theta.
    """
    ks = _as_k(k)
    t1 = math.log1p(p.theta) - np.log(ks + p.theta)
    t2 = math.log1p(p.rho) - math.log1p(-p.rho)
    t3 = -log_variance_factor(p.rho, ks)
    return _out(np.exp(t1 + t2 + t3), k)


def leff_prime(k, p: ThinningProblem):
    """log(eff(k)) minus the constant log((1+theta)(1+rho)/(1-rho)).

    When rho**k underflows the value is -log(k+theta), the exact limit.
    """
    ks = _as_k(k)
    vals = -np.log(ks + p.theta) - log_variance_factor(p.rho, ks)
    return _out(vals, k)


def eff_limit_rho1(k, theta: float):
    """Limit of eff(k) as rho -> 1: k(1+theta)/(k+theta), increasing to 1+theta."""
    theta = check_theta(theta)
    ks = _as_k(k)
    return _out(ks * (1.0 + theta) / (ks + theta), k)


def acceptance_adjusted_eff(k, q: AcceptanceAdjustedProblem):
    """Efficiency when f is only recomputed after an accepted proposal.

    Thinning by k costs k + theta*(1 - alpha**k) per retained value.
    """
    ks = _as_k(k)
    cost_1 = 1.0 + q.theta * (1.0 - q.alpha)
    cost_k = ks + q.theta * (1.0 - np.power(q.alpha, ks.astype(np.float64)))
    t2 = math.log1p(q.rho) - math.log1p(-q.rho)
    t3 = -log_variance_factor(q.rho, ks)
    return _out(cost_1 / cost_k * np.exp(t2 + t3), k)


# ══════════════════════════════════════════════════════
# 🚦  THRESHOLDS
# ══════════════════════════════════════════════════════

def critical_theta(k: int, rho: float) -> float:
    """Cost beyond which thinning by k beats no thinning (0 < rho < 1, k >= 2)."""
    k = int(_as_k(k, minimum=2))
    if not 0.0 < rho < 1.0:
        raise DomainError(f"critical_theta needs 0 < rho < 1, got {rho}")
    # rho - rho**k = rho * (1 - rho**(k-1))
    gap = rho * float(one_minus_rho_power(rho, k - 1))
    num = (1.0 - rho) * (1.0 + float(rho_power(rho, k)))
    return 0.5 * (k - 1) * num / gap - 1.0


def no_thinning_threshold(rho: float) -> float:
    """(1-rho)^2/(2 rho): k=1 is optimal for every theta at or below this."""
    if rho <= 0:
        return math.inf
    return (1.0 - rho) ** 2 / (2.0 * rho)


def no_thinning_is_optimal(p: ThinningProblem) -> bool:
    if p.rho <= 0:
        return True
    return p.theta <= no_thinning_threshold(p.rho)


def critical_rho_for_no_thinning(theta: float) -> float:
    """Largest rho at which k=1 stays optimal: 1 + theta - sqrt(theta^2 + 2 theta)."""
    theta = check_theta(theta)
    if theta == 0:
        return 1.0
    return 1.0 / (1.0 + theta + math.sqrt(theta * theta + 2.0 * theta))


def thinning_improves(r: int, s: int, p: ThinningProblem) -> bool:
    """True iff eff(r) > eff(s), decided by the polynomial inequality in rho."""
    r, s = int(_as_k(r)), int(_as_k(s))
    if r <= s:
        raise DomainError("thinning_improves needs r > s >= 1")
    rs, rr = float(rho_power(p.rho, s)), float(rho_power(p.rho, r))
    lhs = 2.0 * (p.theta + s) * (rs - rr)
    rhs = (r - s) * float(one_minus_rho_power(p.rho, s)) * (1.0 + rr)
    return lhs > rhs


def half_cost_k(theta: float) -> int:
    """Thin so that about half the budget goes to chain transitions: k ~ theta."""
    theta = check_theta(theta)
    return max(1, int(math.floor(theta + 0.5)))
