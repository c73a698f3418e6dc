"""Collocation solvers for periodic supersingular integral equations.

lambda*phi(t) + FP-integral of K(t,x) phi(x) dx = w(t), with K(t,x) =
U(t,x)/(x-t)^3 extended T-periodically.  Two discretizations:

* "simple": the derivative-free rule on a grid of 4n points per period,
  encoded by the integer weight pattern epsilon_ij in {8, -2, 0};
* "advanced": the n-point corrected rule, with the unknown derivatives of
  phi expressed through derivatives of the trigonometric cardinal kernel
  D_n, so the system stays n-by-n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .em_constants import bernoulli_even
from .errors import (
    DerivativesRequiredError,
    ReferenceConvergenceError,
    SingularSystemError,
)
from .integrands import numerator_factor, numerator_factor_derivs
from .quadrature import PeriodicIntegrand, RuleSpec, roundoff_floor, t_hat

__all__ = [
    "PeriodicKernel",
    "CollocationSystem",
    "CollocationSolution",
    "epsilon_weight",
    "build_simple_system",
    "cardinal_derivative_matrix",
    "dirichlet_kernel",
    "dirichlet_kernel_deriv",
    "ak_coefficients",
    "build_advanced_system",
    "solve_collocation",
    "manufactured_rhs",
    "supersingular_cotangent_kernel",
]

_Z_SWITCH = 1e-4  # |z| below this uses the series branch of D_n


@dataclass(frozen=True)
class PeriodicKernel:
    """K(t,x) = U(t,x)/(x-t)^3 on [a,b]^2, T-periodic in both arguments.

    ``u_eval`` must broadcast over numpy arrays.  ``u_xderivs_diag``, when
    present, holds four callables t -> (d^k U/dx^k)(t,t) for k = 0..3; the
    advanced discretization requires them.  ``u_centered``, when present,
    evaluates (t, y) -> K_per(t, t+y) * y^3 for centered offsets |y| <= T/2,
    where K_per is the periodic extension of K; near the wrap-around pole
    this is far better conditioned than the in-square U/(x-t)^3 split and
    the assemblies prefer it.
    """

    u_eval: Callable
    a: float
    b: float
    u_xderivs_diag: Optional[tuple[Callable, ...]] = None
    u_centered: Optional[Callable] = None

    m = 3

    @property
    def period(self) -> float:
        return self.b - self.a

    def k_eval(self, t, x):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        return np.asarray(self.u_eval(t, x), dtype=float) / (x - t) ** 3

    def numerator_centered(self, t, y):
        """K_per(t, t+y) * y^3 for centered offsets, y array-like."""
        t = np.asarray(t, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.u_centered is not None:
            return np.asarray(self.u_centered(t, y), dtype=float)
        T = self.period
        x = t + y
        x_ab = x - T * np.floor((x - self.a) / T)
        x_ab = np.where(x_ab >= self.b, x_ab - T, x_ab)
        y_ab = y + T * np.round((x_ab - x) / T)
        wrapped = y_ab != y
        ratio = np.where(wrapped, (y / np.where(wrapped, y_ab, 1.0)) ** 3, 1.0)
        return np.asarray(self.u_eval(t, x_ab), dtype=float) * ratio

    def diag_derivs(self, t: float) -> tuple[float, float, float, float]:
        if self.u_xderivs_diag is None or len(self.u_xderivs_diag) < 4:
            raise DerivativesRequiredError(
                "advanced approach requires U_k(t,t) for k = 0..3"
            )
        return tuple(float(fn(t)) for fn in self.u_xderivs_diag)


@dataclass
class CollocationSystem:
    """Dense collocation system: matrix @ phi_hat = rhs on ``grid``."""

    grid: np.ndarray
    matrix: np.ndarray
    rhs: np.ndarray
    approach: str
    lam: float


@dataclass
class CollocationSolution:
    values: np.ndarray
    residual: float
    condition: float


# ---------------------------------------------------------------------------
# simple approach
# ---------------------------------------------------------------------------


def epsilon_weight(i: int, j: int) -> int:
    """Quadrature weight pattern: 8, -2 or 0 depending on i - j.

    8 when |i-j-2| is divisible by 4, -2 when |i-j-1| is divisible by 2,
    0 otherwise; in particular the diagonal weight is 0, so the kernel is
    never evaluated at its singular point.
    """
    if abs(i - j - 2) % 4 == 0:
        return 8
    if abs(i - j - 1) % 2 == 0:
        return -2
    return 0


def _epsilon_matrix(N: int) -> np.ndarray:
    idx = np.arange(1, N + 1)
    diff = idx[:, None] - idx[None, :]
    eight = np.abs(diff - 2) % 4 == 0
    minus = np.abs(diff - 1) % 2 == 0
    return np.where(eight, 8, np.where(minus, -2, 0)).astype(np.int64)


def build_simple_system(
    kernel: PeriodicKernel, w_eval: Callable, lam: float, n: int
) -> CollocationSystem:
    """Collocation system of the derivative-free rule on 4n grid points.

    Grid x_j = a + j*hhat, hhat = T/(4n), j = 1..4n; entries
    eps_ij * hhat * K(x_i, x_j) + lam on the diagonal pattern.  Kernel
    differences use integer index spacing times hhat so the singular
    denominators carry no wrap cancellation.
    """
    if n < 2:
        raise ValueError("simple approach needs n >= 2")
    N = 4 * n
    T = kernel.period
    hh = (T / n) / 4.0
    js = np.arange(1, N + 1, dtype=np.int64)
    grid = kernel.a + js * hh
    eps = _epsilon_matrix(N)
    # centered integer offsets keep the singular denominators accurate and
    # let the kernel be evaluated away from its wrap-around pole
    off = (js[None, :] - js[:, None] + 2 * n) % N - 2 * n
    dy = off * hh
    mask = eps != 0
    ti = np.broadcast_to(grid[:, None], (N, N))
    kmat = np.zeros((N, N))
    kmat[mask] = kernel.numerator_centered(ti[mask], dy[mask]) / dy[mask] ** 3
    matrix = eps * hh * kmat + lam * np.eye(N)
    rhs = np.asarray(w_eval(grid), dtype=float)
    return CollocationSystem(grid=grid, matrix=matrix, rhs=rhs, approach="simple", lam=lam)


# ---------------------------------------------------------------------------
# cardinal kernel D_n and derivatives
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _dirichlet_taylor(n: int, n_terms: int = 10) -> tuple[float, ...]:
    # even z-series of sin(n z) cot(z)/n about z = 0, via the Bernoulli
    # expansion cot z = sum (-4)^k B_2k z^(2k-1)/(2k)!
    coeffs = []
    for q in range(n_terms):
        acc = Fraction(0)
        for k in range(q + 1):
            acc += (
                Fraction((-1) ** (q - k))
                * Fraction(n ** (2 * (q - k)), math.factorial(2 * (q - k) + 1))
                * Fraction((-4) ** k)
                * bernoulli_even(k)
                / math.factorial(2 * k)
            )
        coeffs.append(float(acc))
    return tuple(coeffs)


def _check_even_n(n: int):
    if n < 2 or n % 2 != 0:
        raise ValueError(f"odd n unsupported for the cardinal kernel (got n={n})")


def _dirichlet_eval(order: int, n: int, y, period: float):
    _check_even_n(n)
    y = np.asarray(y, dtype=float)
    shape = y.shape
    yw = y - period * np.round(y / period)
    z = (math.pi / period) * np.atleast_1d(yw).ravel()
    taylor = np.array(_dirichlet_taylor(n))
    vals = _kernels.dirichlet_dz(z, n, order, taylor, _Z_SWITCH)
    vals = vals * (math.pi / period) ** order
    vals = vals.reshape(shape)
    return vals if shape else float(vals)


def dirichlet_kernel(n: int, y, period: float):
    """Trigonometric cardinal kernel sin(n pi y/T) cot(pi y/T)/n, n even.

    Equals 1 at y = 0 (mod T) and 0 at the other grid points jT/n.
    """
    return _dirichlet_eval(0, n, y, period)


def dirichlet_kernel_deriv(k: int, n: int, y, period: float):
    """k-th derivative of the cardinal kernel, k in 1..3.

    Removable singularities at multiples of T are evaluated from the series
    branch; elsewhere the closed form of the derivative is used.
    """
    if not 1 <= k <= 3:
        raise ValueError("derivative order must be 1, 2 or 3")
    return _dirichlet_eval(k, n, y, period)


def cardinal_derivative_matrix(k: int, n: int, period: float) -> np.ndarray:
    """Spectral differentiation matrix on the uniform n-point grid, n even.

    Entry (i, j) is D_n^(k)((i-j) T/n); applied to samples of a smooth
    periodic function it returns spectrally accurate k-th derivative values
    at the grid points.  This is the opt-in way to supply derivative values
    to rules that need them when analytic derivatives are unavailable; note
    the approximation changes the rule's error expansion.
    """
    _check_even_n(n)
    js = np.arange(n, dtype=np.int64)
    offs = js * (period / n)
    row = np.asarray(_dirichlet_eval(k, n, offs, period))
    return row[(js[:, None] - js[None, :]) % n]


# ---------------------------------------------------------------------------
# advanced approach
# ---------------------------------------------------------------------------


def ak_coefficients(kernel: PeriodicKernel, t: float, h: float):
    """Coefficients A_0..A_3 multiplying phi(t), phi'(t), phi''(t), phi'''(t)
    in the corrected rule applied to K(t,.)phi."""
    u0, u1, u2, u3 = kernel.diag_derivs(t)
    pi2_3 = math.pi**2 / 3.0
    a0 = -pi2_3 * u1 / h + u3 * h / 6.0
    a1 = -pi2_3 * u0 / h + u2 * h / 2.0
    a2 = u1 * h / 2.0
    a3 = u0 * h / 6.0
    return a0, a1, a2, a3


def build_advanced_system(
    kernel: PeriodicKernel, w_eval: Callable, lam: float, n: int
) -> CollocationSystem:
    """n-point collocation system of the corrected rule, n even >= 4.

    Grid x_j = a + j T/n, j = 0..n-1; matrix
    [lam + A_0(x_i)] delta_ij + h K(x_i,x_j)(1-delta_ij)
    + sum_k A_k(x_i) D_n^(k)(x_i - x_j).
    """
    _check_even_n(n)
    if n < 4:
        raise ValueError("advanced approach needs even n >= 4")
    T = kernel.period
    h = T / n
    js = np.arange(n, dtype=np.int64)
    grid = kernel.a + js * h

    dmat = {k: cardinal_derivative_matrix(k, n, T) for k in (1, 2, 3)}

    off = (js[None, :] - js[:, None] + n // 2) % n - n // 2
    dy = off * h
    off_diag = ~np.eye(n, dtype=bool)
    ti = np.broadcast_to(grid[:, None], (n, n))
    kmat = np.zeros((n, n))
    kmat[off_diag] = (
        kernel.numerator_centered(ti[off_diag], dy[off_diag]) / dy[off_diag] ** 3
    )

    amat = np.array([ak_coefficients(kernel, float(t), h) for t in grid])
    matrix = h * kmat
    matrix[np.arange(n), np.arange(n)] += lam + amat[:, 0]
    for k in (1, 2, 3):
        matrix += amat[:, k][:, None] * dmat[k]
    rhs = np.asarray(w_eval(grid), dtype=float)
    return CollocationSystem(
        grid=grid, matrix=matrix, rhs=rhs, approach="advanced", lam=lam
    )


# ---------------------------------------------------------------------------
# solve + manufactured problems
# ---------------------------------------------------------------------------


def solve_collocation(system: CollocationSystem) -> CollocationSolution:
    """Direct dense solve with a residual and condition report."""
    cond = float(np.linalg.cond(system.matrix))
    if not np.isfinite(cond) or cond > 0.05 / np.finfo(float).eps:
        raise SingularSystemError(
            f"collocation matrix singular to working precision (cond ~ {cond:.3e})",
            condition=cond,
        )
    values = np.linalg.solve(system.matrix, system.rhs)
    residual = float(
        np.max(np.abs(system.matrix @ values - system.rhs))
    )
    return CollocationSolution(values=values, residual=residual, condition=cond)


def _kernel_slice_integrand(kernel: PeriodicKernel, phi: Callable, t: float) -> PeriodicIntegrand:
    """f(x) = K_per(t,x) phi(x) as a periodic integrand centered at t.

    The fundamental interval is re-centered to [t - T/2, t + T/2), so the
    kernel numerator is evaluated at centered offsets and phi at the wrapped
    representative inside [a, b).
    """
    T = kernel.period
    a, b = kernel.a, kernel.b

    def g_eval(x):
        x = np.asarray(x, dtype=float)
        y = x - t
        x_ab = x - T * np.floor((x - a) / T)
        x_ab = np.where(x_ab >= b, x_ab - T, x_ab)
        u = kernel.numerator_centered(np.full_like(x, t), y)
        return u * np.asarray(phi(x_ab), dtype=float)

    return PeriodicIntegrand(m=3, t=t, a=t - T / 2.0, b=t + T / 2.0, g_eval=g_eval)


def manufactured_rhs(
    kernel: PeriodicKernel,
    phi: Callable,
    lam: float,
    n_high: int = 96,
    tol: float = 1e-11,
) -> Callable:
    """Right-hand side w(t) = lam*phi(t) + FP-integral of K(t,.)phi.

    The inner integral uses the derivative-free rule at n_high with a
    doubling self-check; failure of the check raises rather than returning
    an unconverged value.  Because the rule's own roundoff floor grows like
    u*(4n)^2 in double precision, the check allows that much noise on top of
    the stated tolerance (otherwise large n_high would fail spuriously while
    being as converged as the arithmetic permits).
    """

    def w(tval):
        tval = np.asarray(tval, dtype=float)
        if tval.shape:
            return np.array([w(float(tv)) for tv in tval])
        tv = float(tval)
        integrand = _kernel_slice_integrand(kernel, phi, tv)
        v1 = t_hat(RuleSpec(3, 2, n_high, path="compact"), integrand)
        v2 = t_hat(RuleSpec(3, 2, 2 * n_high, path="compact"), integrand)
        xs = np.linspace(integrand.a, integrand.b, 257)
        g_norm = float(np.max(np.abs(integrand.g_eval(xs))))
        noise = 50.0 * roundoff_floor(g_norm, 0.0, 0.0, kernel.period, 8 * n_high)
        if abs(v1 - v2) > tol * (1.0 + abs(v2)) + noise:
            raise ReferenceConvergenceError(
                f"inner quadrature doubling check failed at t={tv}: "
                f"|{v1 - v2:.3e}| above tolerance"
            )
        return lam * float(phi(tv)) + v2

    return w


def supersingular_cotangent_kernel(a: float = -math.pi, b: float = math.pi) -> PeriodicKernel:
    """The kernel K(t,x) = cos(pi(x-t)/T)/sin^3(pi(x-t)/T) as a PeriodicKernel.

    U(t,x) = psi_3(x-t); its diagonal x-derivatives are (T/pi)^3, 0, 0, 0.
    Translation invariance gives the exact centered numerator psi_3(y).
    """
    T = b - a
    psi0 = numerator_factor_derivs(3, 3, T)

    def u_eval(t, x):
        return numerator_factor(3, np.asarray(x, float) - np.asarray(t, float), T)

    def u_centered(t, y):
        return numerator_factor(3, y, T)

    diag = tuple((lambda v: (lambda t: v))(psi0[k]) for k in range(4))
    return PeriodicKernel(
        u_eval=u_eval, a=a, b=b, u_xderivs_diag=diag, u_centered=u_centered
    )
