"""Trapezoidal-type rules for finite-part integrals of periodic integrands.

The integrand model is f(x) = g(x)/(x - t)^m with f periodic of period
T = b - a and a single interior singular point t per period.  The plain
trapezoidal sum over one period, corrected by a short sum of derivative
terms at t, converges to the finite-part value faster than any power of n;
extrapolated combinations of the corrected rule trade derivative data for
extra function evaluations, down to fully derivative-free forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .em_constants import zeta_at
from .errors import DerivativesRequiredError, EvaluationError

__all__ = [
    "PeriodicIntegrand",
    "RuleSpec",
    "CompactRule",
    "NodeFamily",
    "DerivCorrection",
    "ExtrapolationWeights",
    "wrap_to_fundamental",
    "plain_trap_sum",
    "midpoint_sum",
    "correction_sum",
    "extrapolation_weights",
    "compact_rule",
    "t_hat",
    "roundoff_floor",
    "COMPACT_PAIRS",
    "max_compact_level",
]


# ---------------------------------------------------------------------------
# integrand
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodicIntegrand:
    """f(x) = g(x)/(x - t)^m, extended T-periodically from [a, b].

    ``g_eval`` must be valid on [a, b] and accept numpy arrays (a scalar-only
    callable is tolerated but slower).  ``g_derivs_at_t`` holds
    [g(t), g'(t), ...]; rules that need derivative corrections refuse to run
    without enough entries rather than finite-differencing silently.
    Instances are immutable; evaluators must be stateless for concurrent use.
    """

    m: int
    t: float
    a: float
    b: float
    g_eval: Callable
    g_derivs_at_t: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("singularity order m must be >= 1")
        if not self.a < self.t < self.b:
            raise ValueError("singular point must satisfy a < t < b")

    @property
    def period(self) -> float:
        return self.b - self.a

    def f_eval(self, x):
        """Evaluate f at x (scalar or array), wrapping into [a, b) first."""
        x = np.asarray(x, dtype=float)
        xw = wrap_to_fundamental(x, self)
        y = xw - self.t
        vals = _eval_array(self.g_eval, xw) / y**self.m
        return vals if vals.shape else float(vals)

    def deriv_at_t(self, order: int) -> float:
        if self.g_derivs_at_t is None or len(self.g_derivs_at_t) <= order:
            raise DerivativesRequiredError(
                f"g derivative of order {order} at t required but not supplied"
            )
        return float(self.g_derivs_at_t[order])


def wrap_to_fundamental(x, integrand: PeriodicIntegrand):
    """Shift x by the multiple of the period that lands it in [a, b)."""
    x = np.asarray(x, dtype=float)
    T = integrand.period
    out = x - T * np.floor((x - integrand.a) / T)
    # guard against x exactly at b mapping to b through floor rounding
    out = np.where(out >= integrand.b, out - T, out)
    return out if out.shape else float(out)


def _eval_array(fn, x: np.ndarray) -> np.ndarray:
    """Call an evaluator on an array, falling back to a scalar loop.

    Evaluator failures are re-raised as EvaluationError carrying the index
    of the first offending node.
    """
    try:
        vals = np.asarray(fn(x), dtype=float)
        if vals.shape != x.shape:
            raise ValueError
    except (TypeError, ValueError):
        flat = np.atleast_1d(x)
        out = np.empty(flat.shape)
        for idx, xi in enumerate(flat):
            try:
                out[idx] = float(fn(float(xi)))
            except Exception as exc:
                raise EvaluationError(
                    f"integrand evaluator failed at node {idx} (x={float(xi)!r}): {exc}",
                    node_index=idx,
                    node_x=float(xi),
                ) from exc
        vals = out.reshape(x.shape)
    if not np.all(np.isfinite(vals)):
        flat_bad = np.flatnonzero(~np.isfinite(np.atleast_1d(vals)))
        idx = int(flat_bad[0])
        xi = float(np.atleast_1d(x)[idx])
        raise EvaluationError(
            f"integrand evaluator returned a non-finite value at node {idx} (x={xi!r})",
            node_index=idx,
            node_x=xi,
        )
    return vals


# ---------------------------------------------------------------------------
# rule descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NodeFamily:
    """Equispaced node family: offsets (first + step*i)*hhat, i < count(n).

    hhat = h/substep_div is the finest substep of the rule; per-node weight
    is ``weight`` in units of hhat.  count(n) = count_factor*n + count_offset.
    """

    substep_div: int
    first: int
    step: int
    count_factor: int
    count_offset: int
    weight: Fraction

    def count(self, n: int) -> int:
        return self.count_factor * n + self.count_offset


@dataclass(frozen=True)
class DerivCorrection:
    """Additive term coef * pi^pi_power * g^(order)(t) * h^h_power."""

    order: int
    coef: Fraction
    pi_power: int
    h_power: int

    def value(self, integrand: PeriodicIntegrand, h: float) -> float:
        return (
            float(self.coef)
            * math.pi**self.pi_power
            * integrand.deriv_at_t(self.order)
            * h**self.h_power
        )


@dataclass(frozen=True)
class CompactRule:
    """Node/weight/correction descriptor of one closed-form rule."""

    m: int
    s: int
    families: tuple[NodeFamily, ...]
    deriv_corrections: tuple[DerivCorrection, ...]

    def node_offsets(self, n: int) -> np.ndarray:
        """All node offsets, in units of the finest substep hhat."""
        parts = [
            fam.first + fam.step * np.arange(fam.count(n), dtype=np.int64)
            for fam in self.families
        ]
        return np.concatenate(parts)

    def node_weights(self, n: int) -> list[Fraction]:
        """Per-node weights in units of hhat, aligned with node_offsets."""
        out: list[Fraction] = []
        for fam in self.families:
            out.extend([fam.weight] * fam.count(n))
        return out

    @property
    def substep_div(self) -> int:
        return max(f.substep_div for f in self.families)


def _fam(q, first, step, cf, co, w) -> NodeFamily:
    return NodeFamily(q, first, step, cf, co, Fraction(w))


def _cor(order, coef, pi_pow, h_pow) -> DerivCorrection:
    return DerivCorrection(order, Fraction(coef), pi_pow, h_pow)


_PLAIN = _fam(1, 1, 1, 1, -1, 1)
_MID1 = _fam(2, 1, 2, 1, 0, 2)  # h * sum f(t + jh - h/2)
_MID2A = _fam(4, 2, 4, 1, 0, 8)  # 2h * sum f(t + jh - h/2)
_MID2B = _fam(4, 1, 2, 2, 0, -2)  # -(h/2) * sum f(t + jh/2 - h/4)

_COMPACT_TABLE: dict[tuple[int, int], CompactRule] = {
    (1, 0): CompactRule(1, 0, (_PLAIN,), (_cor(1, 1, 0, 1),)),
    (1, 1): CompactRule(1, 1, (_MID1,), ()),
    (2, 0): CompactRule(
        2, 0, (_PLAIN,), (_cor(0, Fraction(-1, 3), 2, -1), _cor(2, Fraction(1, 2), 0, 1))
    ),
    (2, 1): CompactRule(2, 1, (_MID1,), (_cor(0, -1, 2, -1),)),
    (2, 2): CompactRule(2, 2, (_MID2A, _MID2B), ()),
    (3, 0): CompactRule(
        3, 0, (_PLAIN,), (_cor(1, Fraction(-1, 3), 2, -1), _cor(3, Fraction(1, 6), 0, 1))
    ),
    (3, 1): CompactRule(3, 1, (_MID1,), (_cor(1, -1, 2, -1),)),
    (3, 2): CompactRule(3, 2, (_MID2A, _MID2B), ()),
    (4, 0): CompactRule(
        4,
        0,
        (_PLAIN,),
        (
            _cor(0, Fraction(-1, 45), 4, -3),
            _cor(2, Fraction(-1, 6), 2, -1),
            _cor(4, Fraction(1, 24), 0, 1),
        ),
    ),
    (4, 1): CompactRule(
        4, 1, (_MID1,), (_cor(0, Fraction(-1, 3), 4, -3), _cor(2, Fraction(-1, 2), 2, -1))
    ),
    (4, 2): CompactRule(4, 2, (_MID2A, _MID2B), (_cor(0, 2, 4, -3),)),
    (4, 3): CompactRule(
        4,
        3,
        (
            _fam(8, 4, 8, 1, 0, Fraction(128, 7)),
            _fam(8, 2, 4, 2, 0, Fraction(-40, 7)),
            _fam(8, 1, 2, 4, 0, Fraction(2, 7)),
        ),
        (),
    ),
}

COMPACT_PAIRS = frozenset(_COMPACT_TABLE)


def max_compact_level(m: int) -> int:
    """Largest s with a tabulated closed-form rule for this m (derivative-free)."""
    levels = [s for (mm, s) in COMPACT_PAIRS if mm == m]
    if not levels:
        raise ValueError(f"no compact rules tabulated for m={m}")
    return max(levels)


def compact_rule(m: int, s: int) -> CompactRule:
    """Descriptor of the closed-form rule for (m, s)."""
    try:
        return _COMPACT_TABLE[(m, s)]
    except KeyError:
        raise ValueError(
            f"no compact rule for (m={m}, s={s}); tabulated pairs: "
            f"{sorted(COMPACT_PAIRS)}"
        ) from None


@dataclass(frozen=True)
class RuleSpec:
    """Which rule to apply: order m, extrapolation level s, base count n."""

    m: int
    s: int
    n: int
    path: str = "generic"

    def __post_init__(self):
        if self.path not in ("compact", "generic"):
            raise ValueError(f"unknown rule path: {self.path!r}")
        if self.m < 1 or self.s < 0 or self.n < 1:
            raise ValueError("require m >= 1, s >= 0, n >= 1")
        if self.s == 0 and self.n < 2:
            raise ValueError("base rule needs n >= 2")
        if self.path == "compact" and (self.m, self.s) not in COMPACT_PAIRS:
            raise ValueError(f"(m={self.m}, s={self.s}) has no compact form")


# ---------------------------------------------------------------------------
# node sums
# ---------------------------------------------------------------------------


def _family_sum(integrand: PeriodicIntegrand, n: int, fam: NodeFamily) -> float:
    """weight * hhat * sum of f over one node family.

    Offsets are kept as integers times the substep for as long as possible:
    the wrapped offset is (k - q*n)*delta rather than a wrapped coordinate
    difference, which keeps the relative error of the singular denominator
    at the rounding unit instead of growing with n.
    """
    T = integrand.period
    h = T / n
    delta = h / fam.substep_div
    total = fam.substep_div * n
    k = fam.first + fam.step * np.arange(fam.count(n), dtype=np.int64)
    wrapped = np.where(integrand.t + k * delta < integrand.b, k, k - total)
    y = wrapped * delta
    x_hat = np.clip(integrand.t + y, integrand.a, integrand.b)
    g_vals = _eval_array(integrand.g_eval, x_hat)
    return float(fam.weight) * delta * _kernels.singular_sum(g_vals, y, integrand.m)


def plain_trap_sum(integrand: PeriodicIntegrand, n: int) -> float:
    """h * sum_{j=1}^{n-1} f(t + j h), h = T/n, nodes wrapped into [a, b)."""
    if n < 2:
        raise ValueError("plain trapezoidal sum needs n >= 2")
    return _family_sum(integrand, n, _PLAIN)


def midpoint_sum(integrand: PeriodicIntegrand, n: int, level: int = 1) -> float:
    """Offset sums used by the extrapolated rules.

    level=1: h * sum_{j=1}^{n} f(t + jh - h/2)
    level=2: (h/2) * sum_{j=1}^{2n} f(t + jh/2 - h/4)
    """
    if n < 1:
        raise ValueError("midpoint sum needs n >= 1")
    if level == 1:
        return _family_sum(integrand, n, _MID1)
    if level == 2:
        return _family_sum(integrand, n, _fam(4, 1, 2, 2, 0, 2))
    raise ValueError("level must be 1 or 2")


def correction_sum(integrand: PeriodicIntegrand, n: int) -> float:
    """Finite derivative correction removed from the plain sum.

    For m = 2r the sum runs over even derivatives of g at t, for m = 2r+1
    over odd ones; the plain trapezoidal sum minus this value is the base
    (s = 0) rule.
    """
    m = integrand.m
    h = integrand.period / n
    r = m // 2 if m % 2 == 0 else (m - 1) // 2
    parity = 0 if m % 2 == 0 else 1
    if integrand.g_derivs_at_t is None or len(integrand.g_derivs_at_t) <= m:
        raise DerivativesRequiredError(
            f"derivatives of g at t up to order {m} required for the s=0 rule"
        )
    terms = []
    for i in range(r + 1):
        order = 2 * i + parity
        terms.append(
            2.0
            * integrand.deriv_at_t(order)
            / math.factorial(order)
            * zeta_at(2 * r - 2 * i)
            * h ** (-2 * r + 2 * i + 1)
        )
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# extrapolation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtrapolationWeights:
    """Exact coefficients alpha_k of the level-s combination of base rules."""

    s: int
    alpha: tuple[Fraction, ...]


def extrapolation_weights(s: int) -> ExtrapolationWeights:
    """Weights from eliminating the powers h^1, h^-1, h^-3, ... in turn.

    Each elimination step uses the doubling pair (n, 2n): annihilating h^p
    combines values as (2^p X_{2n} - X_n)/(2^p - 1).  The resulting weights
    over the sequence n, 2n, ..., 2^s n are independent of m and sum to 1
    exactly.
    """
    if s < 0:
        raise ValueError("s must be >= 0")
    alpha = [Fraction(1)]
    for step in range(1, s + 1):
        p = 1 if step == 1 else -(2 * step - 3)
        two_p = Fraction(2) ** p
        a = 1 / (1 - two_p)
        b = two_p / (two_p - 1)
        new = [Fraction(0)] * (len(alpha) + 1)
        for k, w in enumerate(alpha):
            new[k] += a * w
            new[k + 1] += b * w
        alpha = new
    return ExtrapolationWeights(s=s, alpha=tuple(alpha))


# ---------------------------------------------------------------------------
# rule evaluation
# ---------------------------------------------------------------------------


def _t_hat_base(integrand: PeriodicIntegrand, n: int) -> float:
    return plain_trap_sum(integrand, n) - correction_sum(integrand, n)


def _t_hat_compact(rule: CompactRule, integrand: PeriodicIntegrand, n: int) -> float:
    h = integrand.period / n
    total = math.fsum(_family_sum(integrand, n, fam) for fam in rule.families)
    total += math.fsum(c.value(integrand, h) for c in rule.deriv_corrections)
    return total


def t_hat(spec: RuleSpec, integrand: PeriodicIntegrand) -> float:
    """Evaluate the rule described by ``spec`` on ``integrand``.

    The generic path combines base rules at n, 2n, ..., 2^s n with the
    extrapolation weights and therefore needs g derivatives up to order m;
    the compact path evaluates the tabulated closed form directly and is
    derivative-free at the top level s for each m.
    """
    if spec.m != integrand.m:
        raise ValueError(
            f"rule order m={spec.m} does not match integrand m={integrand.m}"
        )
    if spec.path == "compact":
        return _t_hat_compact(compact_rule(spec.m, spec.s), integrand, spec.n)
    if spec.s == 0:
        return _t_hat_base(integrand, spec.n)
    weights = extrapolation_weights(spec.s).alpha
    vals = [
        float(w) * _t_hat_base(integrand, (2**k) * spec.n)
        for k, w in enumerate(weights)
    ]
    return math.fsum(vals)


# ---------------------------------------------------------------------------
# roundoff floor
# ---------------------------------------------------------------------------


def roundoff_floor(
    g_norm: float,
    gp_norm: float,
    gppp_norm: float,
    period: float,
    n: int,
    unit: float = 2.0**-53,
) -> float:
    """Upper envelope K(n) * u * n^2 for the computed-rule error at large n.

    K(n) = 2 zeta(3)/T^2 * ||g|| + pi^2/(3 T n) * ||g'|| + T/(6 n^3) * ||g'''||.
    """
    if min(g_norm, gp_norm, gppp_norm) < 0 or unit <= 0:
        raise ValueError("norms must be >= 0 and unit > 0")
    K = (
        2.0 * zeta_at(3) / period**2 * g_norm
        + math.pi**2 / (3.0 * period * n) * gp_norm
        + period / (6.0 * n**3) * gppp_norm
    )
    return K * unit * n**2
