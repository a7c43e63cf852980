"""
simulator.py — Monte Carlo check of predicted thinning efficiency
Simulates stationary AR(1) chains under a fixed budget, estimates the
variance of the thinned mean across replicates and compares the empirical
efficiency ratio with the closed-form prediction.
"""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict, field

import numpy as np
import pandas as pd
from scipy.signal import lfilter

import config
from acf import Budget, n_samples
from efficiency import ThinningProblem, check_rho, eff, log_variance_factor
from errors import DomainError, ZeroSampleError

logger = logging.getLogger("simulator")


# ══════════════════════════════════════════════════════
# 📦  TYPES
# ══════════════════════════════════════════════════════

@dataclass(frozen=True)
class SimulationConfig:
    rho         : float
    theta       : float
    budget      : Budget
    k_values    : tuple
    replications: int
    seed        : int
    sigma2      : float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "rho", check_rho(self.rho))
        theta = float(self.theta)
        if not theta > 0 or math.isinf(theta):
            raise DomainError("theta must be positive")
        object.__setattr__(self, "theta", theta)
        if not isinstance(self.budget, Budget):
            object.__setattr__(self, "budget", Budget(self.budget))

        ks = tuple(int(k) for k in self.k_values)
        if not ks or any(k < 1 for k in ks):
            raise DomainError("k_values must be a non-empty list of positive integers")
        if len(set(ks)) != len(ks):
            raise DomainError("k_values must not repeat")
        object.__setattr__(self, "k_values", ks)

        if int(self.replications) < 3:
            raise DomainError("replications must be at least 3")
        object.__setattr__(self, "replications", int(self.replications))
        if not 0 <= int(self.seed) < 2 ** 63:
            raise DomainError("seed must be a nonnegative 63-bit integer")
        object.__setattr__(self, "seed", int(self.seed))
        if not float(self.sigma2) > 0:
            raise DomainError("sigma2 must be positive")
        object.__setattr__(self, "sigma2", float(self.sigma2))

        for k in ks:
            nk = n_samples(k, theta, self.budget)
            if nk < 1:
                raise ZeroSampleError(f"budget {self.budget.B:g} buys no sample at k={k}")
            if nk < config.SIM_MIN_SAMPLES:
                raise DomainError(f"budget {self.budget.B:g} buys only {nk} samples at k={k}; "
                                  f"need at least {config.SIM_MIN_SAMPLES}")

    def to_dict(self) -> dict:
        return {
            "rho"         : self.rho,
            "theta"       : self.theta,
            "budget"      : self.budget.B,
            "k_values"    : list(self.k_values),
            "replications": self.replications,
            "seed"        : self.seed,
            "sigma2"      : self.sigma2,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimulationConfig":
        return cls(d["rho"], d["theta"], Budget(d["budget"]), tuple(d["k_values"]),
                   d["replications"], d["seed"], d.get("sigma2", 1.0))


@dataclass(frozen=True)
class ThinnedVariance:
    k      : int
    n_k    : int
    var_hat: float
    se     : float


@dataclass(frozen=True)
class SimulationRecord:
    k       : int
    n_k     : int
    var_hat : float
    se      : float
    eff_emp : float
    eff_se  : float
    eff_pred: float
    eff_asym: float
    flag    : bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SimulationReport:
    config : SimulationConfig
    records: list = field(default_factory=list)

    @property
    def flagged(self) -> list:
        return [r.k for r in self.records if r.flag]

    def to_dict(self) -> dict:
        return {"config": self.config.to_dict(),
                "records": [r.to_dict() for r in self.records]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "SimulationReport":
        return cls(SimulationConfig.from_dict(d["config"]),
                   [SimulationRecord(**r) for r in d["records"]])

    @classmethod
    def from_json(cls, text: str) -> "SimulationReport":
        return cls.from_dict(json.loads(text))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.to_dict() for r in self.records],
                            columns=list(SimulationRecord.__dataclass_fields__))


# ══════════════════════════════════════════════════════
# 🎲  CHAINS
# ══════════════════════════════════════════════════════

def generate_ar1(rho: float, n: int, sigma2: float = 1.0, seed=None) -> np.ndarray:
    """Stationary AR(1) path: x_0 ~ N(0, sigma2), x_t = rho x_{t-1} + e_t.

    Innovations have variance sigma2 (1 - rho^2). `seed` is an int, a
    SeedSequence or a Generator.
    """
    rho = check_rho(rho)
    n = int(n)
    if n < 1:
        raise DomainError("chain length must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    e = rng.standard_normal(n)
    e[0] *= math.sqrt(sigma2)
    e[1:] *= math.sqrt(sigma2 * (1.0 - rho * rho))
    return lfilter([1.0], [1.0, -rho], e)


def _replicate_mean(cfg: SimulationConfig, k: int, n_k: int, rep: int) -> float:
    ss = np.random.SeedSequence(cfg.seed, spawn_key=(k, rep))
    path = generate_ar1(cfg.rho, k * n_k, cfg.sigma2, np.random.default_rng(ss))
    return float(path[k - 1::k].mean())


def _jackknife_variance_se(x: np.ndarray) -> float:
    """Jackknife standard error of the sample variance (ddof=1)."""
    R = x.size
    z = x - x.mean()
    s1, s2 = z.sum(), (z * z).sum()
    loo_mean = (s1 - z) / (R - 1)
    loo_var = ((s2 - z * z) - (R - 1) * loo_mean ** 2) / (R - 2)
    return float(math.sqrt((R - 1) / R * ((loo_var - loo_var.mean()) ** 2).sum()))


def thinned_mean_variance(cfg: SimulationConfig, k: int,
                          workers: int = config.SIM_WORKERS) -> ThinnedVariance:
    """Across-replicate variance of the thinned mean at factor k.

    Every (k, replicate) pair draws from its own spawned stream, so results
    do not depend on `workers`.
    """
    k = int(k)
    n_k = n_samples(k, cfg.theta, cfg.budget)
    reps = range(cfg.replications)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            means = list(pool.map(lambda r: _replicate_mean(cfg, k, n_k, r), reps))
    else:
        means = [_replicate_mean(cfg, k, n_k, r) for r in reps]
    means = np.asarray(means)
    var_hat = float(np.var(means, ddof=1))
    return ThinnedVariance(k, n_k, var_hat, _jackknife_variance_se(means))


def predicted_efficiency(cfg: SimulationConfig, k: int) -> float:
    """Finite-budget AR(1) prediction: (n_k/n_1) A(rho, 1)/A(rho, k)."""
    n1 = n_samples(1, cfg.theta, cfg.budget)
    nk = n_samples(k, cfg.theta, cfg.budget)
    log_ratio = float(log_variance_factor(cfg.rho, 1) - log_variance_factor(cfg.rho, k))
    return nk / n1 * math.exp(log_ratio)


def empirical_efficiency(cfg: SimulationConfig,
                         workers: int = config.SIM_WORKERS) -> SimulationReport:
    """Simulated eff(k) = var(k=1)/var(k) for every k in cfg.k_values (which must include 1)."""
    if 1 not in cfg.k_values:
        raise DomainError("k_values must include 1 as the reference")
    logger.info(f"Simulating rho={cfg.rho:g} theta={cfg.theta:g} B={cfg.budget.B:g} "
                f"k={list(cfg.k_values)} reps={cfg.replications}")

    base = thinned_mean_variance(cfg, 1, workers)
    problem = ThinningProblem(cfg.theta, cfg.rho)
    records = []
    for k in cfg.k_values:
        tv = base if k == 1 else thinned_mean_variance(cfg, k, workers)
        if k == 1:
            emp, emp_se = 1.0, 0.0
        else:
            emp = base.var_hat / tv.var_hat
            emp_se = emp * math.hypot(base.se / base.var_hat, tv.se / tv.var_hat)
        pred = predicted_efficiency(cfg, k)
        flag = abs(emp - pred) > config.SIM_FLAG_SE * emp_se
        if flag:
            logger.warning(f"k={k}: empirical {emp:.4g} vs predicted {pred:.4g} "
                           f"(se {emp_se:.3g})")
        records.append(SimulationRecord(k, tv.n_k, tv.var_hat, tv.se, emp, emp_se,
                                        pred, float(eff(k, problem)), bool(flag)))
    return SimulationReport(cfg, records)
