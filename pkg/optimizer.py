"""
optimizer.py — Optimal and near-optimal thinning factors for AR(1) chains
Finds k_opt by doubling a bracket on the log-efficiency, then scanning it.
Also builds the theta x rho summary tables.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

import config
from efficiency import ThinningProblem, check_theta, leff_prime
from errors import DomainError, OptimumTooExpensiveError, ThinningError

logger = logging.getLogger("optimizer")


def _check_search(p: ThinningProblem):
    if p.rho < 0:
        raise DomainError("rho must be nonnegative for the optimal-k search")


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 < eta < 1.0:
        raise DomainError(f"eta must lie in (0, 1), got {eta}")
    return eta


# ══════════════════════════════════════════════════════
# 🔍  BRACKET + SCAN
# ══════════════════════════════════════════════════════

def getkmax(p: ThinningProblem) -> int:
    """Return 2m for the first m in 1, 2, 4, ... with leff(2m) <= leff(m).

    leff is unimodal in k, so k_opt <= 2m.
    """
    _check_search(p)
    m = 1
    while leff_prime(2 * m, p) > leff_prime(m, p):
        m *= 2
    logger.debug(f"getkmax theta={p.theta:g} rho={p.rho:g}: kmax={2 * m}")
    return 2 * m


def _scan(p: ThinningProblem, k_limit: int) -> tuple[int, np.ndarray]:
    kmax = getkmax(p)
    if kmax > k_limit:
        raise OptimumTooExpensiveError(
            f"Optimal k too expensive. It requires checking {kmax} values.")
    return kmax, leff_prime(np.arange(1, kmax + 1), p)


def _first_ok(values: np.ndarray, k_opt: int, eta: float) -> int:
    floor = values[k_opt - 1] + math.log1p(-eta)
    return int(np.argmax(values[:k_opt] >= floor)) + 1


def kopt(p: ThinningProblem, k_limit: int = config.K_LIMIT) -> int:
    """Smallest k maximising eff(k)."""
    _, values = _scan(p, k_limit)
    return int(np.argmax(values)) + 1


def kok(p: ThinningProblem, eta: float = config.DEFAULT_ETA,
        k_limit: int = config.K_LIMIT) -> int:
    """Smallest k whose efficiency is at least (1 - eta) times the optimum."""
    eta = _check_eta(eta)
    _, values = _scan(p, k_limit)
    return _first_ok(values, int(np.argmax(values)) + 1, eta)


def k_for_rho1_limit(theta: float, eta: float = config.DEFAULT_ETA) -> int:
    """Smallest k reaching (1 - eta)(1 + theta) in the rho -> 1 limit: ceil(theta(1-eta)/eta)."""
    theta = check_theta(theta)
    eta = _check_eta(eta)
    if theta == 0:
        raise DomainError("theta must be positive for the rho -> 1 limit")
    x = theta * (1.0 - eta) / eta
    nearest = round(x)
    k = nearest if abs(x - nearest) <= 1e-12 * max(1.0, x) else math.ceil(x)
    return max(1, int(k))


# ══════════════════════════════════════════════════════
# 📈  EFFICIENCY CURVE
# ══════════════════════════════════════════════════════

@dataclass
class EfficiencyCurve:
    problem: ThinningProblem
    eta    : float
    k_opt  : int
    k_ok   : int
    log_eff: np.ndarray = field(repr=False)   # leff' over k = 1..kmax

    @property
    def kmax(self) -> int:
        return int(self.log_eff.size)

    def efficiency(self, k) -> float | np.ndarray:
        """eff(k) relative to k=1, for k within the scanned bracket."""
        ks = np.asarray(k)
        vals = np.exp(self.log_eff[ks - 1] - self.log_eff[0])
        return float(vals) if ks.ndim == 0 else vals

    @property
    def best_efficiency(self) -> float:
        return self.efficiency(self.k_opt)

    def to_dict(self) -> dict:
        return {
            **self.problem.to_dict(),
            "eta"      : self.eta,
            "kmax"     : self.kmax,
            "k_opt"    : self.k_opt,
            "eff_k_opt": self.best_efficiency,
            "k_ok"     : self.k_ok,
            "eff_k_ok" : self.efficiency(self.k_ok),
        }


def efficiency_curve(p: ThinningProblem, eta: float = config.DEFAULT_ETA,
                     k_limit: int = config.K_LIMIT) -> EfficiencyCurve:
    """k_opt, k_ok and the scanned log-efficiency from a single bracket scan.

    rho <= 0 never benefits from thinning and short-circuits to k = 1.
    """
    eta = _check_eta(eta)
    if p.rho <= 0:
        return EfficiencyCurve(p, eta, 1, 1, np.array([float(leff_prime(1, p))]))
    _, values = _scan(p, k_limit)
    best = int(np.argmax(values)) + 1
    return EfficiencyCurve(p, eta, best, _first_ok(values, best, eta), values)


# ══════════════════════════════════════════════════════
# 📋  TABLES
# ══════════════════════════════════════════════════════

@dataclass(frozen=True)
class TableSpec:
    theta_values: tuple = tuple(config.TABLE_THETAS)
    rho_values  : tuple = tuple(config.TABLE_RHOS)
    eta         : float = config.DEFAULT_ETA

    def __post_init__(self):
        thetas = tuple(check_theta(t) for t in self.theta_values)
        rhos = tuple(float(r) for r in self.rho_values)
        if not thetas or not rhos:
            raise DomainError("table grids must be non-empty")
        for r in rhos:
            if not 0.0 <= r < 1.0:
                raise DomainError(f"table rho values must lie in [0, 1), got {r}")
        object.__setattr__(self, "theta_values", thetas)
        object.__setattr__(self, "rho_values", rhos)
        object.__setattr__(self, "eta", _check_eta(self.eta))


@dataclass
class ThinningTables:
    spec    : TableSpec
    k_opt   : pd.DataFrame     # Int64, NA where the cell failed
    eff     : pd.DataFrame     # eff(k_opt) relative to k = 1
    k_ok    : pd.DataFrame
    failures: list = field(default_factory=list)


def _cell(theta: float, rho: float, eta: float, k_limit: int):
    try:
        c = efficiency_curve(ThinningProblem(theta, rho), eta, k_limit)
        return c.k_opt, c.best_efficiency, c.k_ok, None
    except ThinningError as e:
        return None, None, None, f"theta={theta:g}, rho={rho:g}: {e}"


def make_tables(spec: TableSpec | None = None, workers: int = 1,
                k_limit: int = config.K_LIMIT) -> ThinningTables:
    """k_opt, eff(k_opt) and k_ok over the theta x rho grid (rows theta, columns rho).

    A cell whose search fails is left NA and reported in `failures`.
    """
    spec = spec or TableSpec()
    cells = [(t, r) for t in spec.theta_values for r in spec.rho_values]
    t0 = time.perf_counter()

    def run(cell):
        return _cell(cell[0], cell[1], spec.eta, k_limit)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, cells))
    else:
        results = [run(c) for c in cells]

    shape = (len(spec.theta_values), len(spec.rho_values))
    index = pd.Index(spec.theta_values, name="theta")
    columns = pd.Index(spec.rho_values, name="rho")

    def frame(pos: int, dtype: str) -> pd.DataFrame:
        if dtype == "Int64":
            vals = np.array([res[pos] for res in results], dtype=object).reshape(shape)
            return pd.DataFrame(vals, index=index, columns=columns).astype("Int64")
        vals = np.array([np.nan if res[pos] is None else res[pos] for res in results],
                        dtype="float64").reshape(shape)
        return pd.DataFrame(vals, index=index, columns=columns)

    failures = [res[3] for res in results if res[3] is not None]
    for msg in failures:
        logger.warning(f"Table cell skipped: {msg}")
    logger.info(f"Tables: {len(cells)} cells in {time.perf_counter() - t0:.2f}s")

    return ThinningTables(spec, frame(0, "Int64"), frame(1, "float64"),
                          frame(2, "Int64"), failures)
