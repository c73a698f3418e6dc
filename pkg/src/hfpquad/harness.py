"""Convergence tables, empirical rate fits, and roundoff-floor comparisons.

Reproduces the error-vs-n table layout used to validate the rules: one row
per n holding the rule value and its error against a trusted oracle, a
least-squares rate fit over the rows that sit clearly above the roundoff
floor, and a check that the observed error plateau stays under the floor
model's envelope.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InsufficientPreFloorDataError
from .oracles import GeometricKernelCase, exact_supersingular
from .quadrature import (
    COMPACT_PAIRS,
    PeriodicIntegrand,
    RuleSpec,
    roundoff_floor,
    t_hat,
)

__all__ = [
    "ReportRow",
    "ConvergenceReport",
    "RateFit",
    "FloorCheck",
    "convergence_table",
    "convergence_table_for",
    "empirical_rate",
    "floor_check",
    "integrand_norms",
]

DOUBLE_UNIT = 2.0**-53

#: errors above this multiple of the floor estimate count as pre-floor data
PRE_FLOOR_FACTOR = 100.0


@dataclass
class ReportRow:
    n: int
    value: float
    error: float


@dataclass
class ConvergenceReport:
    """Error table for one case: rows sorted by strictly increasing n."""

    m: int
    s: int
    t: float
    period: float
    eta: Optional[float]
    oracle_name: str
    oracle_value: float
    rows: list[ReportRow]
    g_norms: tuple[float, float, float]
    floor_estimate: float
    fitted_rate: Optional[float] = None

    def errors(self) -> np.ndarray:
        return np.array([r.error for r in self.rows])

    def ns(self) -> np.ndarray:
        return np.array([r.n for r in self.rows])

    def floor_at(self, n: int, unit: float = DOUBLE_UNIT) -> float:
        g, gp, gppp = self.g_norms
        return roundoff_floor(g, gp, gppp, self.period, n, unit)


@dataclass
class RateFit:
    slope: float
    rows_used: int
    floor_dominated: bool


@dataclass
class FloorCheck:
    rows: list[tuple[int, float, float]]  # (n, error, bound)
    safety_factor: float
    passed: bool


def _max_workers() -> int:
    try:
        return max(1, int(os.environ.get("HFPQUAD_THREADS", "1")))
    except ValueError:
        return 1


def integrand_norms(
    integrand: PeriodicIntegrand, samples: int = 4096
) -> tuple[float, float, float]:
    """Crude max-norms of g, g', g''' by sampling and differencing.

    Order-of-magnitude accuracy is all the floor model needs.
    """
    xs = np.linspace(integrand.a, integrand.b, samples)
    g = np.asarray(integrand.g_eval(xs), dtype=float)
    dx = xs[1] - xs[0]
    g1 = np.gradient(g, dx)
    g2 = np.gradient(g1, dx)
    g3 = np.gradient(g2, dx)
    return float(np.max(np.abs(g))), float(np.max(np.abs(g1))), float(np.max(np.abs(g3)))


def _preferred_path(m: int, s: int) -> str:
    return "compact" if (m, s) in COMPACT_PAIRS else "generic"


def convergence_table_for(
    integrand: PeriodicIntegrand,
    oracle_value: float,
    oracle_name: str,
    s: int,
    n_list: Sequence[int],
    eta: Optional[float] = None,
    path: Optional[str] = None,
    unit: float = DOUBLE_UNIT,
) -> ConvergenceReport:
    """Table of rule values and errors against a precomputed oracle value."""
    ns = sorted(set(int(n) for n in n_list))
    rule_path = path or _preferred_path(integrand.m, s)

    def one(n: int) -> ReportRow:
        val = t_hat(RuleSpec(integrand.m, s, n, path=rule_path), integrand)
        return ReportRow(n=n, value=val, error=abs(val - oracle_value))

    workers = _max_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, ns))
    else:
        rows = [one(n) for n in ns]

    norms = integrand_norms(integrand)
    floor_est = roundoff_floor(*norms, integrand.period, max(ns), unit)
    return ConvergenceReport(
        m=integrand.m,
        s=s,
        t=integrand.t,
        period=integrand.period,
        eta=eta,
        oracle_name=oracle_name,
        oracle_value=oracle_value,
        rows=rows,
        g_norms=norms,
        floor_estimate=floor_est,
    )


def convergence_table(
    case: GeometricKernelCase,
    s: int,
    n_list: Sequence[int],
    path: Optional[str] = None,
    unit: float = DOUBLE_UNIT,
) -> ConvergenceReport:
    """Error table for the geometric-kernel case against its closed form."""
    integrand = case.integrand(n_derivs=3)
    return convergence_table_for(
        integrand,
        oracle_value=case.exact(),
        oracle_name="exact_supersingular",
        s=s,
        n_list=n_list,
        eta=case.eta,
        path=path,
        unit=unit,
    )


def empirical_rate(
    report: ConvergenceReport,
    unit: float = DOUBLE_UNIT,
    min_rows: int = 3,
    flat_slope: float = 0.05,
) -> RateFit:
    """Least-squares slope of ln(error) vs n over the pre-floor rows.

    For the geometric-kernel family the expected slope is ln(eta).  Rows
    whose error is within PRE_FLOOR_FACTOR of the per-n floor estimate are
    excluded; fewer than ``min_rows`` surviving rows is an error.
    """
    pre = [
        r
        for r in report.rows
        if r.error > PRE_FLOOR_FACTOR * report.floor_at(r.n, unit) and r.error > 0.0
    ]
    if len(pre) < min_rows:
        raise InsufficientPreFloorDataError(
            f"insufficient pre-floor data: {len(pre)} rows above "
            f"{PRE_FLOOR_FACTOR}x floor, need {min_rows}"
        )
    ns = np.array([r.n for r in pre], dtype=float)
    logs = np.log([r.error for r in pre])
    slope = float(np.polyfit(ns, logs, 1)[0])
    fit = RateFit(
        slope=slope, rows_used=len(pre), floor_dominated=abs(slope) < flat_slope
    )
    report.fitted_rate = slope
    return fit


def floor_check(
    report: ConvergenceReport,
    g_norms: Optional[tuple[float, float, float]] = None,
    unit: float = DOUBLE_UNIT,
    safety_factor: float = PRE_FLOOR_FACTOR,
) -> FloorCheck:
    """Observed plateau vs the floor model: error_n <= safety * K(n) u n^2."""
    norms = g_norms if g_norms is not None else report.g_norms
    rows = []
    ok = True
    for r in report.rows:
        bound = safety_factor * roundoff_floor(*norms, report.period, r.n, unit)
        rows.append((r.n, r.error, bound))
        if r.error > bound:
            ok = False
    return FloorCheck(rows=rows, safety_factor=safety_factor, passed=ok)
