"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  Tolerances and runtime limits are pinned here; the jit kernels are
warmed once up front so the limits measure algorithm cost, not compilation.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from hfpquad.em_constants import bernoulli_even, zeta_at
from hfpquad.harness import convergence_table, empirical_rate, floor_check
from hfpquad.ie_solver import (
    build_advanced_system,
    build_simple_system,
    dirichlet_kernel,
    dirichlet_kernel_deriv,
    manufactured_rhs,
    solve_collocation,
    supersingular_cotangent_kernel,
    _kernel_slice_integrand,
)
from hfpquad.integrands import PoissonKernelU, random_trig_polynomial, singular_periodic_integrand
from hfpquad.oracles import GeometricKernelCase, hfp_reference
from hfpquad.quadrature import (
    RuleSpec,
    extrapolation_weights,
    max_compact_level,
    t_hat,
)

TWO_PI = 2.0 * math.pi
UNIT = 2.0**-53


@pytest.fixture(scope="module", autouse=True)
def _warm_jit():
    case = GeometricKernelCase(eta=0.2, t=1.0)
    t_hat(RuleSpec(3, 2, 4, path="compact"), case.integrand())
    dirichlet_kernel_deriv(2, 4, 0.1, TWO_PI)
    yield


def _finish(num, desc, failures, elapsed, limit):
    ok = not failures and elapsed < limit
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num:02d} [{desc}]: {status} ({elapsed:.2f}s, limit {limit:g}s)")
    if elapsed >= limit:
        failures.append(f"runtime {elapsed:.2f}s exceeded {limit}s")
    assert not failures, f"criterion {num}: " + "; ".join(failures)


def test_criterion_01_zeta_and_bernoulli():
    start = time.perf_counter()
    failures = []
    for j, expected in ((2, math.pi**2 / 6), (4, math.pi**4 / 90), (6, math.pi**6 / 945)):
        got = zeta_at(j)
        if abs(got - expected) > 1e-14 * abs(expected):
            failures.append(f"zeta({j}) = {got!r}, expected {expected!r}")

    # second, independent route: tangent numbers via the zigzag triangle
    def zigzag(count):
        seed = [1] + [0] * count
        prev = [seed[0]]
        out = [prev[-1]]
        for n in range(1, count + 1):
            cur = [seed[n]]
            for k in range(1, n + 1):
                cur.append(cur[k - 1] + prev[n - k])
            prev = cur
            out.append(cur[-1])
        return out

    for k in range(0, 9):
        direct = bernoulli_even(k)
        if k == 0:
            other = Fraction(1)
        else:
            tangent = zigzag(2 * k)[2 * k - 1]
            other = Fraction((-1) ** (k - 1) * 2 * k * tangent, 4**k * (4**k - 1))
        if direct != other:
            failures.append(f"B_{2*k}: {direct} != {other}")
    _finish(1, "zeta/Bernoulli exactness", failures, time.perf_counter() - start, 1.0)


def test_criterion_02_extrapolation_weights():
    start = time.perf_counter()
    failures = []
    expected = {
        1: (Fraction(-1), Fraction(2)),
        2: (Fraction(-2), Fraction(5), Fraction(-2)),
        3: (Fraction(-16, 7), Fraction(6), Fraction(-3), Fraction(2, 7)),
    }
    for s, alpha in expected.items():
        got = extrapolation_weights(s).alpha
        if got != alpha:
            failures.append(f"s={s}: {got} != {alpha}")
    for s in range(0, 9):
        if sum(extrapolation_weights(s).alpha) != 1:
            failures.append(f"sum of weights for s={s} is not exactly 1")
    _finish(2, "extrapolation weights", failures, time.perf_counter() - start, 1.0)


def test_criterion_03_table_reproduction():
    start = time.perf_counter()
    failures = []
    case = GeometricKernelCase(eta=0.5, t=1.0)
    exact = case.exact()
    integ = case.integrand()
    targets = [
        (0, 10, 8.68e-3),
        (0, 20, 2.10e-5),
        (0, 30, 2.61e-8),
        (0, 40, 2.27e-11),
        (1, 10, 8.72e-3),
        (2, 10, 1.75e-2),
    ]
    for s, n, reported in targets:
        err = abs(t_hat(RuleSpec(3, s, n, path="compact"), integ) - exact)
        if not reported / 5.0 <= err <= reported * 5.0:
            failures.append(f"s={s} n={n}: error {err:.3e} vs reported {reported:.2e}")
    _finish(3, "error-table reproduction", failures, time.perf_counter() - start, 5.0)


def test_criterion_04_rate_law():
    start = time.perf_counter()
    failures = []
    n_list = list(range(8, 23, 2))
    for eta in (0.3, 0.4, 0.5):
        for s in (0, 1, 2):
            rep = convergence_table(GeometricKernelCase(eta=eta, t=1.0), s, n_list)
            fit = empirical_rate(rep)
            target = math.log(eta)
            if abs(fit.slope - target) > 0.10 * abs(target):
                failures.append(
                    f"eta={eta} s={s}: slope {fit.slope:.4f} vs ln eta {target:.4f}"
                )
    _finish(4, "O(eta^n) rate law", failures, time.perf_counter() - start, 10.0)


def test_criterion_05_oracle_equivalence():
    start = time.perf_counter()
    failures = []
    rng = np.random.default_rng(20250809)
    smoothing = 6
    for trial in range(20):
        u = random_trig_polynomial(rng, degree=6)
        t = float(rng.uniform(-2.0, 2.0))
        for m in (1, 2, 3, 4):
            s = max_compact_level(m)
            integ = singular_periodic_integrand(u, m=m, t=t, n_derivs=m + smoothing + 1)
            val = t_hat(RuleSpec(m, s, 64, path="compact"), integ)
            ref = hfp_reference(
                integ.g_eval,
                integ.g_derivs_at_t,
                m,
                integ.a,
                integ.b,
                t,
                smoothing=smoothing,
            )
            tol = 1e-8 * max(1.0, abs(ref))
            if abs(val - ref) > tol:
                failures.append(
                    f"trial {trial} m={m}: |{val:.6e} - {ref:.6e}| = "
                    f"{abs(val - ref):.2e} > {tol:.2e}"
                )
    _finish(5, "rule vs brute-force oracle", failures, time.perf_counter() - start, 30.0)


def test_criterion_06_exact_combination_identity():
    start = time.perf_counter()
    failures = []
    rng = np.random.default_rng(7)
    pairs = [(m, s) for m in (1, 2, 3, 4) for s in range(1, max_compact_level(m) + 1)]
    for m, s in pairs:
        for trial in range(10):
            u = random_trig_polynomial(rng, degree=6)
            t = float(rng.uniform(-1.5, 1.5))
            n = int(rng.choice([6, 8, 10, 12]))
            integ = singular_periodic_integrand(u, m=m, t=t, n_derivs=m)
            compact_val = t_hat(RuleSpec(m, s, n, path="compact"), integ)
            weights = extrapolation_weights(s).alpha
            parts = [
                float(w) * t_hat(RuleSpec(m, 0, (2**k) * n), integ)
                for k, w in enumerate(weights)
            ]
            combo = math.fsum(parts)
            scale = max(abs(compact_val), abs(combo), max(abs(p) for p in parts))
            if abs(compact_val - combo) > 1e-12 * scale:
                failures.append(
                    f"(m={m}, s={s}) trial {trial}: |{compact_val:.6e} - "
                    f"{combo:.6e}| > 1e-12 rel"
                )
    _finish(6, "compact = extrapolated combination", failures, time.perf_counter() - start, 30.0)


def test_criterion_07_epsilon_grid_equivalence():
    start = time.perf_counter()
    failures = []
    kernel = supersingular_cotangent_kernel()
    phi = PoissonKernelU(0.4)
    for n in (4, 8, 16):
        system = build_simple_system(kernel, lambda x: np.zeros_like(x), 1.0, n)
        samples = np.asarray(phi(system.grid))
        rows = (system.matrix - np.eye(4 * n)) @ samples
        row_scale = float(np.max(np.abs(rows)))
        for i in range(4 * n):
            integrand = _kernel_slice_integrand(kernel, phi, float(system.grid[i]))
            direct = t_hat(RuleSpec(3, 2, n, path="compact"), integrand)
            scale = max(abs(direct), abs(rows[i]), row_scale)
            if abs(rows[i] - direct) > 1e-13 * scale:
                failures.append(
                    f"n={n} row {i}: |{rows[i]:.6e} - {direct:.6e}| > 1e-13 rel"
                )
    _finish(7, "epsilon grid = derivative-free rule", failures, time.perf_counter() - start, 30.0)


def test_criterion_08_integral_equation_convergence():
    start = time.perf_counter()
    failures = []
    eta, lam = 0.3, 1.0
    kernel = supersingular_cotangent_kernel()
    phi = PoissonKernelU(eta)
    w = manufactured_rhs(kernel, phi, lam)

    errors = {}
    simple_solutions = {}
    for n in (4, 8, 16):
        system = build_simple_system(kernel, w, lam, n)
        sol = solve_collocation(system)
        errors[4 * n] = float(np.max(np.abs(sol.values - phi(system.grid))))
        simple_solutions[4 * n] = (system.grid, sol.values)
    if not (errors[16] >= 10 * errors[32] and errors[32] >= 10 * errors[64]):
        failures.append(f"errors {errors} do not drop 10x per doubling")
    if errors[64] > 1e-6:
        failures.append(f"error at 4n=64 is {errors[64]:.2e} > 1e-6")

    adv_system = build_advanced_system(kernel, w, lam, 32)
    adv = solve_collocation(adv_system)
    adv_err = float(np.max(np.abs(adv.values - phi(adv_system.grid))))
    grid64, values64 = simple_solutions[64]
    # advanced node j > 0 is simple node 2j (1-based), node 0 is node 64
    diffs = [abs(adv.values[j] - values64[2 * j - 1]) for j in range(1, 32)]
    diffs.append(abs(adv.values[0] - values64[63]))
    allowed = max(adv_err, errors[64]) + min(adv_err, errors[64])
    if max(diffs) > allowed:
        failures.append(
            f"simple/advanced disagree by {max(diffs):.2e} > {allowed:.2e}"
        )
    _finish(8, "integral-equation convergence", failures, time.perf_counter() - start, 60.0)


def test_criterion_09_floor_model():
    start = time.perf_counter()
    failures = []
    case = GeometricKernelCase(eta=0.1, t=1.0)
    rep = convergence_table(case, 0, [60, 70, 80, 90, 100])
    check = floor_check(rep, unit=UNIT, safety_factor=100.0)
    if not check.passed:
        for n, err, bound in check.rows:
            if err > bound:
                failures.append(f"n={n}: plateau {err:.2e} > bound {bound:.2e}")
    _finish(9, "roundoff-floor envelope", failures, time.perf_counter() - start, 30.0)


def test_criterion_10_dirichlet_kernel():
    start = time.perf_counter()
    failures = []
    rng = np.random.default_rng(13)

    def fft_deriv(order, n, y):
        # differentiate the discrete Fourier representation of the cardinal
        # function: coefficients from the FFT of the unit sample
        e0 = np.zeros(n)
        e0[0] = 1.0
        coeffs = np.fft.rfft(e0).real
        total = coeffs[0] if order == 0 else 0.0
        for j in range(1, n // 2):
            total += 2.0 * coeffs[j] * j**order * math.cos(j * y + order * math.pi / 2)
        j = n // 2
        total += coeffs[j] * j**order * math.cos(j * y + order * math.pi / 2)
        return total / n

    for n in (4, 8, 16):
        xs = np.arange(n) * TWO_PI / n
        v = rng.standard_normal(n)
        recon = dirichlet_kernel(n, xs[:, None] - xs[None, :], TWO_PI) @ v
        if np.max(np.abs(recon - v)) > 1e-14:
            failures.append(f"n={n}: cardinal interpolation off by {np.max(np.abs(recon - v)):.2e}")
        if dirichlet_kernel_deriv(1, n, 0.0, TWO_PI) != 0.0:
            failures.append(f"n={n}: D'(0) != 0")
        for order in (1, 2, 3):
            for y in (0.23, 1.7, TWO_PI / (2 * n), -2.9):
                got = dirichlet_kernel_deriv(order, n, y, TWO_PI)
                ref = fft_deriv(order, n, y)
                if abs(got - ref) > 1e-10:
                    failures.append(
                        f"n={n} k={order} y={y}: |{got:.6e} - {ref:.6e}| > 1e-10"
                    )
    _finish(10, "cardinal kernel properties", failures, time.perf_counter() - start, 30.0)
