"""
acf.py — Thinning efficiency for arbitrary autocorrelation sequences
Works only through the sums R, R_k and R_{-k}; the AR(1) closed forms in
efficiency.py are the special case rho_l = rho**l.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

import config
from efficiency import check_theta, check_rho, _as_k
from errors import DomainError, InvalidAcfError, ZeroSampleError

logger = logging.getLogger("acf")

TAIL_POLICIES = ("truncate", "geometric_extrapolate")


# ══════════════════════════════════════════════════════
# 📦  TYPES
# ══════════════════════════════════════════════════════

@dataclass
class AcfSequence:
    """Lag autocorrelations rho_1..rho_L plus a rule for lags beyond L.

    geometric_extrapolate continues with rho_L * r**(l-L), r = rho_L/rho_{L-1}
    (rho_0 = 1 when L = 1). A ratio r <= 0 falls back to
    truncation; r >= 1 is rejected because the tail sum diverges.
    """
    values     : np.ndarray
    tail_policy: str = "truncate"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64).ravel()
        if vals.size < 1:
            raise InvalidAcfError("autocorrelation sequence needs at least one lag")
        if not np.all(np.isfinite(vals)) or np.any(np.abs(vals) >= 1.0):
            raise InvalidAcfError("every autocorrelation must satisfy |rho_l| < 1")
        if self.tail_policy not in TAIL_POLICIES:
            raise DomainError(f"unknown tail policy {self.tail_policy!r}")
        self.values = vals
        self._ratio = self._tail_ratio()

    @classmethod
    def ar1(cls, rho: float, length: int, tail_policy: str = "truncate") -> "AcfSequence":
        rho = check_rho(rho)
        lags = np.arange(1, int(length) + 1)
        return cls(rho ** lags, tail_policy)

    def _tail_ratio(self) -> float | None:
        if self.tail_policy == "truncate":
            return None
        last = self.values[-1]
        prev = self.values[-2] if self.values.size > 1 else 1.0
        if last == 0 or prev == 0:
            return None
        r = last / prev
        if r <= 0:
            return None
        if r >= 1:
            raise InvalidAcfError(
                f"geometric tail ratio {r:.6g} >= 1 gives a divergent autocorrelation sum")
        return float(r)

    @property
    def tail_ratio(self) -> float | None:
        """Geometric ratio used past lag L, or None when the tail is truncated."""
        return self._ratio

    def __len__(self) -> int:
        return int(self.values.size)

    def to_dict(self) -> dict:
        return {"values": self.values.tolist(), "tail_policy": self.tail_policy}


@dataclass(frozen=True)
class AcfSums:
    R        : float
    R_k      : float
    R_minus_k: float
    k        : int


@dataclass(frozen=True)
class Budget:
    B: float

    def __post_init__(self):
        b = float(self.B)
        if not b > 0 or math.isinf(b):
            raise DomainError("budget B must be positive")
        object.__setattr__(self, "B", b)


def n_samples(k: int, theta: float, budget: Budget) -> int:
    """Largest n with n(k + theta) <= B."""
    return int(math.floor(budget.B / (k + theta)))


# ══════════════════════════════════════════════════════
# ➕  SUMS AND EFFICIENCY
# ══════════════════════════════════════════════════════

def acf_sums(acf: AcfSequence, k: int) -> AcfSums:
    k = int(_as_k(k))
    vals = acf.values
    L    = vals.size
    on_k = (np.arange(1, L + 1) % k) == 0

    head_k     = float(vals[on_k].sum())
    head_minus = float(vals[~on_k].sum())
    tail_k = tail_minus = 0.0

    r = acf.tail_ratio
    if r is not None:
        last       = float(vals[-1])
        log_r      = math.log(r)
        tail_total = last * r / (1.0 - r)
        first_mult = k * (L // k + 1)          # first multiple of k past L
        tail_k     = last * math.exp((first_mult - L) * log_r) / -math.expm1(k * log_r)
        tail_minus = tail_total - tail_k

    R_k       = head_k + tail_k
    R_minus_k = head_minus + tail_minus
    return AcfSums(R=R_k + R_minus_k, R_k=R_k, R_minus_k=R_minus_k, k=k)


def _variance_factors(sums: AcfSums) -> tuple[float, float]:
    full    = 1.0 + 2.0 * sums.R
    thinned = 1.0 + 2.0 * sums.R_k
    if thinned <= 0 or full <= 0:
        raise InvalidAcfError(
            f"autocorrelations give a non-positive asymptotic variance "
            f"(1+2R={full:.6g}, 1+2R_k={thinned:.6g} at k={sums.k})")
    return full, thinned


def efford(k: int, acf: AcfSequence, theta: float) -> float:
    """Asymptotic efficiency of thinning factor k versus k=1 for a general ACF."""
    theta = check_theta(theta)
    sums = acf_sums(acf, k)
    full, thinned = _variance_factors(sums)
    return (1.0 + theta) / (sums.k + theta) * full / thinned


def efford_ratio(r: int, s: int, acf: AcfSequence, theta: float) -> float:
    """Efficiency of thinning by r relative to thinning by s."""
    return efford(r, acf, theta) / efford(s, acf, theta)


def efford_finite_budget(k: int, acf: AcfSequence, theta: float, b: Budget) -> float:
    """Efficiency at a finite budget, where sample counts are floored."""
    theta = check_theta(theta)
    k  = int(_as_k(k))
    n1 = n_samples(1, theta, b)
    if n1 < 1:
        raise ZeroSampleError(f"budget {b.B:g} buys no unthinned sample at theta={theta:g}")
    nk = n_samples(k, theta, b)
    if nk < 1:
        raise ZeroSampleError(f"budget {b.B:g} buys no sample at k={k}, theta={theta:g}")
    full, thinned = _variance_factors(acf_sums(acf, k))
    return nk / n1 * full / thinned


def thinning_hurts(k: int, acf: AcfSequence, theta: float) -> bool:
    """True iff R_{-k} < (k-1)/(theta+1) * (R_k + 1/2), i.e. efford(k) < 1."""
    theta = check_theta(theta)
    k = int(_as_k(k, minimum=2))
    sums = acf_sums(acf, k)
    return sums.R_minus_k < (k - 1) / (theta + 1.0) * (sums.R_k + 0.5)


def monotone_theta_bound(acf: AcfSequence, k: int) -> float:
    """1/(2 R_k): any theta at or above it makes thinning by k at least break even.

    Needs rho_1 >= rho_2 >= ... >= 0. Returns math.inf when R_k = 0, where
    the bound places no constraint on theta.
    """
    vals = acf.values
    if np.any(vals < 0) or np.any(np.diff(vals) > 0):
        raise InvalidAcfError("bound needs nonnegative, nonincreasing autocorrelations")
    sums = acf_sums(acf, k)
    if sums.R_k <= 0:
        logger.info(f"R_k = 0 at k={sums.k}: no constraint on theta")
        return math.inf
    return 1.0 / (2.0 * sums.R_k)


# ══════════════════════════════════════════════════════
# 📈  ESTIMATION FROM A TRACE
# ══════════════════════════════════════════════════════

def sample_acf(series, max_lag: int) -> np.ndarray:
    """Sample autocorrelations at lags 1..max_lag via FFT (biased normalization)."""
    y = np.asarray(series, dtype=np.float64).ravel()
    n = y.size
    if max_lag < 1:
        raise DomainError("max_lag must be a positive integer")
    if n <= max_lag:
        raise InvalidAcfError(f"series of length {n} is too short for max_lag={max_lag}")
    if not np.all(np.isfinite(y)):
        raise InvalidAcfError("series contains non-finite values")
    if np.ptp(y) == 0:
        raise InvalidAcfError("series is constant (zero variance)")

    z    = y - y.mean()
    nfft = scipy.fft.next_fast_len(2 * n)
    f    = scipy.fft.rfft(z, nfft)
    acov = scipy.fft.irfft(f * np.conj(f), nfft)[: max_lag + 1]
    return acov[1:] / acov[0]


def estimate_acf(series, max_lag: int = config.DEFAULT_MAX_LAG) -> AcfSequence:
    """Estimated ACF cut where the initial positive sequence ends.

    The cut falls at the first lag l with rho_l + rho_{l+1} <= 0; lags from l
    on are dropped (lag 1 is always kept). Input must be post-warmup.
    """
    rho = sample_acf(series, max_lag)
    n = np.asarray(series).size
    if n < 10 * max_lag:
        logger.warning(f"series length {n} < 10*max_lag ({10 * max_lag}); "
                       f"high lags are noisy")

    pair_sums = rho[:-1] + rho[1:]
    ends = np.flatnonzero(pair_sums <= 0)
    cut  = int(ends[0]) if ends.size else rho.size
    cut  = max(cut, 1)
    logger.debug(f"ACF kept {cut} of {rho.size} lags")

    bound = 1.0 - config.RHO_CLAMP
    return AcfSequence(np.clip(rho[:cut], -bound, bound), "truncate")


def fit_ar1_rho(acf: AcfSequence) -> float:
    """Yule-Walker AR(1) fit: the lag-1 autocorrelation, kept inside (-1, 1)."""
    bound = 1.0 - config.RHO_CLAMP
    return float(np.clip(acf.values[0], -bound, bound))
