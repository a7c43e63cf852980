"""
bands.py — Thinning decisions when rho is only known to lie in a band
For rho in [rho_lo, rho_hi] the efficiency ratio of r versus s is bracketed by
evaluating each variance factor at the band end that makes it extreme.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

import config
from efficiency import ThinningProblem, check_theta, log_variance_factor, _as_k
from errors import DomainError, KCapTooSmallError, OptimumTooExpensiveError
from optimizer import getkmax

logger = logging.getLogger("bands")


# ══════════════════════════════════════════════════════
# 📦  TYPES
# ══════════════════════════════════════════════════════

@dataclass(frozen=True)
class RhoBand:
    rho_lo: float
    rho_hi: float

    def __post_init__(self):
        lo, hi = float(self.rho_lo), float(self.rho_hi)
        if not 0.0 <= lo <= hi < 1.0:
            raise DomainError(f"band must satisfy 0 <= rho_lo <= rho_hi < 1, got [{lo}, {hi}]")
        object.__setattr__(self, "rho_lo", lo)
        object.__setattr__(self, "rho_hi", hi)

    @property
    def degenerate(self) -> bool:
        return self.rho_lo == self.rho_hi

    def to_dict(self) -> dict:
        return {"rho_lo": self.rho_lo, "rho_hi": self.rho_hi}


@dataclass(frozen=True)
class KInterval:
    """Inclusive range lo..hi. contiguous=False means lo..hi is the hull of a gappy set."""
    lo        : int
    hi        : int
    contiguous: bool = True

    def __len__(self) -> int:
        return self.hi - self.lo + 1

    def __contains__(self, k) -> bool:
        return self.lo <= k <= self.hi

    def __str__(self) -> str:
        return f"{self.lo}..{self.hi}" if self.contiguous else f"{self.lo}..{self.hi} (hull)"

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "contiguous": self.contiguous}


@dataclass
class BandReport:
    band              : RhoBand
    theta             : float
    k_search_cap      : int
    candidate_set     : KInterval
    max_certified_gain: float
    gain_sets         : dict = field(default_factory=dict)   # gain -> KInterval | None

    def to_dict(self) -> dict:
        return {
            **self.band.to_dict(),
            "theta"             : self.theta,
            "k_search_cap"      : self.k_search_cap,
            "candidate_set"     : self.candidate_set.to_dict(),
            "max_certified_gain": self.max_certified_gain,
            "gain_sets"         : {str(g): (iv.to_dict() if iv else None)
                                   for g, iv in self.gain_sets.items()},
        }


# ══════════════════════════════════════════════════════
# 📐  BOUNDS
# ══════════════════════════════════════════════════════

def _log_cost(ks, theta: float) -> np.ndarray:
    return np.log(np.asarray(ks, dtype=np.float64) + theta)


def eff_bounds(r: int, s: int, band: RhoBand, theta: float) -> tuple[float, float]:
    """(lower, upper) bounds on eff(r)/eff(s) over every rho in the band.

    Both bounds are attained (at rho_lo or rho_hi) and coincide with the exact
    AR(1) ratio when the band is a single point.
    """
    theta = check_theta(theta)
    r, s = int(_as_k(r)), int(_as_k(s))
    cost = math.log(s + theta) - math.log(r + theta)
    lower = cost + float(log_variance_factor(band.rho_lo, s)) \
                 - float(log_variance_factor(band.rho_hi, r))
    upper = cost + float(log_variance_factor(band.rho_hi, s)) \
                 - float(log_variance_factor(band.rho_lo, r))
    return math.exp(lower), math.exp(upper)


def _log_u1k(ks: np.ndarray, band: RhoBand, theta: float) -> np.ndarray:
    """log U_1k: the largest possible log(eff(1)/eff(k)) over the band."""
    return (_log_cost(ks, theta) - math.log1p(theta)
            + log_variance_factor(band.rho_hi, ks)
            - float(log_variance_factor(band.rho_lo, 1)))


def default_k_cap(band: RhoBand, theta: float) -> int:
    return config.BAND_CAP_FACTOR * getkmax(ThinningProblem(theta, band.rho_hi))


def _check_cap(cap: int) -> int:
    cap = int(cap)
    if cap < 1:
        raise DomainError("k_cap must be >= 1")
    if cap > config.K_LIMIT:
        raise OptimumTooExpensiveError(
            f"Band search too expensive. It requires checking {cap} values "
            f"(limit {config.K_LIMIT}).")
    return cap


def analytic_gain_cap(band: RhoBand, theta: float, gain: float) -> int:
    """Every k beyond this has U_1k >= 1/gain, so the search can stop there.

    Uses A(rho_hi, k) > 1: (k+theta)/(1+theta)/A(rho_lo, 1) < 1/gain needs
    k < (1+theta) A(rho_lo, 1)/gain - theta.
    """
    theta = check_theta(theta)
    log_a1 = float(log_variance_factor(band.rho_lo, 1))
    bound = (1.0 + theta) * math.exp(log_a1) / gain - theta
    return max(1, int(math.floor(bound)) + 1)


def _interval(ks: np.ndarray, mask: np.ndarray, what: str) -> KInterval | None:
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return None
    lo, hi = int(ks[idx[0]]), int(ks[idx[-1]])
    contiguous = idx.size == hi - lo + 1
    if not contiguous:
        logger.warning(f"{what} is not contiguous in {lo}..{hi}; reporting its hull")
    return KInterval(lo, hi, contiguous)


# ══════════════════════════════════════════════════════
# 🎯  SETS
# ══════════════════════════════════════════════════════

def guaranteed_gain_interval(band: RhoBand, theta: float, gain: float,
                             k_cap: int | None = None) -> KInterval | None:
    """k values that beat k=1 by at least `gain` for every rho in the band.

    The condition is U_1k < 1/gain, U_1k being the upper bound on eff(1)/eff(k).
    None when no k qualifies.
    """
    theta = check_theta(theta)
    gain = float(gain)
    if not gain >= 1.0:
        raise DomainError(f"gain must be >= 1, got {gain}")

    needed = analytic_gain_cap(band, theta, gain)
    cap = min(needed, config.K_LIMIT) if k_cap is None else _check_cap(k_cap)
    ks = np.arange(1, cap + 1)
    mask = _log_u1k(ks, band, theta) < -math.log(gain)

    if mask[-1] and cap < needed:
        if k_cap is None:
            raise KCapTooSmallError(
                f"gain {gain:g} set reaches the search limit k={cap}")
        logger.warning(f"gain {gain:g} set reaches k_cap={cap}; it may extend further")
    return _interval(ks, mask, f"gain {gain:g} set")


def nondominated_set(band: RhoBand, theta: float, k_cap: int | None = None) -> np.ndarray:
    """Every r not beaten by some s for all rho in the band (U_rs >= 1 for all s).

    U_rs >= 1 splits as h(r) <= g(s) with h(r) = (r+theta)A(rho_lo, r) and
    g(s) = (s+theta)A(rho_hi, s), so r survives iff h(r) <= min_s g(s).
    """
    theta = check_theta(theta)
    cap = _check_cap(default_k_cap(band, theta) if k_cap is None else k_cap)
    ks = np.arange(1, cap + 1)
    log_g = _log_cost(ks, theta) + log_variance_factor(band.rho_hi, ks)
    log_h = _log_cost(ks, theta) + log_variance_factor(band.rho_lo, ks)
    keep = log_h <= log_g.min()
    if keep[-1]:
        raise KCapTooSmallError(
            f"non-dominated set reaches k_cap={cap}; rerun with a larger k_cap")
    return ks[keep]


def band_report(band: RhoBand, theta: float, gains=config.BAND_GAINS,
                k_cap: int | None = None) -> BandReport:
    theta = check_theta(theta)
    cap = _check_cap(default_k_cap(band, theta) if k_cap is None else k_cap)
    candidates = nondominated_set(band, theta, cap)
    candidate_set = _interval(candidates, np.ones(candidates.size, dtype=bool),
                              "non-dominated set")
    best_gain = math.exp(-float(_log_u1k(np.arange(1, cap + 1), band, theta).min()))

    gain_sets = {float(g): guaranteed_gain_interval(band, theta, g, k_cap) for g in gains}
    logger.info(f"Band [{band.rho_lo:g}, {band.rho_hi:g}] theta={theta:g}: "
                f"candidates {candidate_set}, certified gain {best_gain:.4g}")
    return BandReport(band, theta, cap, candidate_set, best_gain, gain_sets)
