"""Real Gauss hypergeometric evaluation for strongly negative arguments.

Three regimes, dispatched on z:

* |z| <= crossover_z: defining power series (term recurrence, no Gamma).
* crossover_z < |z| < 1, z < 0: Pfaff map w = z/(z-1) in (0, 1/2), then the
  series in w.
* z <= -1, parameterized z = -exp(2t) with t >= 0: two-branch connection
  formula.  Each branch's inner sum is itself Pfaff-mapped so its argument
  is 1/(1+exp(2t)) in (0, 1/2]; this keeps a geometric ratio <= 1/2 on the
  whole range (the raw inner sums in powers of exp(-2t) degenerate to a
  conditionally convergent alternating series as z -> -1 whenever
  c = a + b, which is the case for every parameter triple used here).

The connection prefactors Gamma(c)Gamma(b-a)/(Gamma(b)Gamma(c-a)) and the
a<->b mirror are assembled from log-gamma values with explicit sign
tracking; series terms always come from the ratio recurrence so no Gamma is
ever formed at high order.  hyp2f1_neg takes an optional scale_exp sigma
and returns exp(sigma*t) * 2F1 with the exponential folded into each branch
separately, which is what downstream rescaled component assembly relies on
to avoid overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

__all__ = [
    "HypArgs",
    "EvalConfig",
    "Pole",
    "InvalidC",
    "NonConvergence",
    "DegenerateParameters",
    "gamma_real",
    "log_gamma",
    "gamma_sign",
    "hyp2f1_series",
    "hyp2f1_pfaff",
    "hyp2f1_neg",
    "hyp2f1",
    "hyp2f1_deriv",
]

ArrayLike = Union[float, np.ndarray]


class Pole(ArithmeticError):
    """Gamma evaluated at a non-positive integer."""


class InvalidC(ValueError):
    """Lower parameter c is a non-positive integer, 2F1 undefined."""


class NonConvergence(RuntimeError):
    """Series failed to meet the stopping rule within max_terms."""


class DegenerateParameters(ValueError):
    """Parameter combination outside the supported generic case."""


@dataclass(frozen=True)
class HypArgs:
    a: float
    b: float
    c: float
    z: float


@dataclass(frozen=True)
class EvalConfig:
    """Series controls: relative tolerance, term cap, regime switch.

    crossover_z is the |z| threshold at which evaluation leaves the direct
    series for the transformed regimes; it must stay inside (0.5, 1) so
    both sides of the switch keep a workable geometric ratio.
    """

    rel_tol: float = 1e-12
    max_terms: int = 400
    crossover_z: float = 0.75

    def __post_init__(self) -> None:
        if self.rel_tol <= 0.0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 8:
            raise ValueError("max_terms must be >= 8")
        if not 0.5 < self.crossover_z < 1.0:
            raise ValueError("crossover_z must lie in (0.5, 1)")


_DEFAULT = EvalConfig()


def _is_nonpos_int(x: float, tol: float = 1e-12) -> bool:
    return x <= tol and abs(x - round(x)) < tol


def _is_int(x: float, tol: float = 1e-12) -> bool:
    return abs(x - round(x)) < tol


def gamma_real(s: float) -> float:
    """Gamma on the real line; raises Pole at 0, -1, -2, ..."""
    if _is_nonpos_int(s):
        raise Pole(f"gamma pole at s={s}")
    return math.gamma(s)


def log_gamma(s: float) -> float:
    """log|Gamma(s)|; raises Pole at the poles. Pair with gamma_sign."""
    if _is_nonpos_int(s):
        raise Pole(f"log-gamma pole at s={s}")
    return math.lgamma(s)


def gamma_sign(s: float) -> float:
    """Sign of Gamma(s) for non-pole real s."""
    if s > 0.0:
        return 1.0
    # Gamma alternates sign on the negative unit intervals
    return -1.0 if (math.floor(-s) % 2 == 0) else 1.0


def _gamma_ratio(num: Sequence[float], den: Sequence[float]) -> float:
    """prod Gamma(num) / prod Gamma(den) via log_gamma + sign tracking.

    A pole in a denominator factor makes the ratio exactly zero; a pole in
    a numerator factor is the caller's degeneracy to reject beforehand.
    """
    for d in den:
        if _is_nonpos_int(d):
            return 0.0
    lg = 0.0
    sign = 1.0
    for s in num:
        lg += log_gamma(s)
        sign *= gamma_sign(s)
    for s in den:
        lg -= log_gamma(s)
        sign *= gamma_sign(s)
    return sign * math.exp(lg)


def _series_sum(a: float, b: float, c: float, z: np.ndarray, cfg: EvalConfig) -> np.ndarray:
    """sum_n (a)_n (b)_n / ((c)_n n!) z^n via the term ratio recurrence.

    Stops once three consecutive terms fall below rel_tol * |partial sum|
    at every requested point (same rule for scalars and batches so batched
    and one-at-a-time evaluation agree to rounding).
    """
    if _is_nonpos_int(c):
        raise InvalidC(f"lower parameter c={c} is a non-positive integer")
    term = np.ones_like(z)
    total = np.ones_like(z)
    streak = np.zeros(z.shape, dtype=np.int64)
    for n in range(cfg.max_terms):
        term = term * (((a + n) * (b + n)) / ((c + n) * (n + 1.0))) * z
        total = total + term
        small = np.abs(term) <= cfg.rel_tol * np.abs(total)
        streak = np.where(small, streak + 1, 0)
        if bool(np.all(streak >= 3)):
            return total
    raise NonConvergence(
        f"series(a={a}, b={b}, c={c}) not converged in {cfg.max_terms} terms "
        f"(max |z| = {float(np.max(np.abs(z))):.3g})"
    )


def _as_array(x: ArrayLike) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return np.atleast_1d(arr), arr.ndim == 0


def hyp2f1_series(args: HypArgs, cfg: Optional[EvalConfig] = None) -> float:
    """Direct power series; requires |z| < 1."""
    cfg = cfg or _DEFAULT
    if abs(args.z) >= 1.0:
        raise NonConvergence(f"direct series needs |z| < 1, got z={args.z}")
    z = np.array([args.z])
    return float(_series_sum(args.a, args.b, args.c, z, cfg)[0])


def hyp2f1_pfaff(args: HypArgs, cfg: Optional[EvalConfig] = None) -> float:
    """Pfaff transform (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)); requires z < 1/2."""
    cfg = cfg or _DEFAULT
    a, b, c, z = args.a, args.b, args.c, args.z
    if z >= 0.5:
        raise NonConvergence(f"pfaff map needs z < 1/2, got z={z}")
    w = z / (z - 1.0)
    inner = _series_sum(a, c - b, c, np.array([w]), cfg)[0]
    return float((1.0 - z) ** (-a) * inner)


def hyp2f1_neg(
    a: float,
    b: float,
    c: float,
    t: ArrayLike,
    cfg: Optional[EvalConfig] = None,
    scale_exp: float = 0.0,
) -> ArrayLike:
    """exp(scale_exp*t) * 2F1(a, b; c; -exp(2t)) for t >= 0, vectorized.

    Connection form with Pfaff-mapped inner sums (zeta = 1/(1+exp(2t))):

        A exp((s-2a)t) (1+exp(-2t))^(-a) 2F1(a, c-b; a-b+1; zeta)
      + B exp((s-2b)t) (1+exp(-2t))^(-b) 2F1(b, c-a; b-a+1; zeta)

    with A = G(c)G(b-a)/(G(b)G(c-a)) and B its a<->b mirror.  The
    exponential prefactors absorb scale_exp branch by branch, so rescaled
    evaluations never form exp(scale_exp*t) on its own.

    Raises DegenerateParameters when b - a is an integer (the generic-case
    connection coefficients pole) and InvalidC when c is a non-positive
    integer.
    """
    cfg = cfg or _DEFAULT
    if _is_nonpos_int(c):
        raise InvalidC(f"lower parameter c={c} is a non-positive integer")
    if _is_int(b - a):
        raise DegenerateParameters(
            f"b - a = {b - a} is an integer; generic connection formula pole"
        )
    ts, scalar = _as_array(t)
    if ts.size and float(np.min(ts)) < 0.0:
        raise ValueError("hyp2f1_neg requires t >= 0")

    A = _gamma_ratio([c, b - a], [b, c - a])
    B = _gamma_ratio([c, a - b], [a, c - b])

    em2t = np.exp(-2.0 * ts)
    zeta = em2t / (1.0 + em2t)
    sum_a = _series_sum(a, c - b, a - b + 1.0, zeta, cfg) if A != 0.0 else 0.0
    sum_b = _series_sum(b, c - a, b - a + 1.0, zeta, cfg) if B != 0.0 else 0.0
    base = 1.0 + em2t
    with np.errstate(over="ignore"):
        out = A * np.exp((scale_exp - 2.0 * a) * ts) * base ** (-a) * sum_a
        out = out + B * np.exp((scale_exp - 2.0 * b) * ts) * base ** (-b) * sum_b
    return float(out[0]) if scalar else out


def hyp2f1(args: HypArgs, cfg: Optional[EvalConfig] = None) -> float:
    """Regime-dispatched 2F1 on the real ray z <= crossover_z < 1."""
    cfg = cfg or _DEFAULT
    z = args.z
    if z != z:  # NaN
        raise ValueError("z is NaN")
    if z >= 1.0:
        raise ValueError(f"real-ray evaluation needs z < 1, got z={z}")
    if abs(z) <= cfg.crossover_z:
        return hyp2f1_series(args, cfg)
    if z > -1.0:
        if z > 0.0:
            # positive z close to 1 is outside this module's focus but the
            # Pfaff map still converges for z < 1/2; fall back to series
            return hyp2f1_series(args, cfg)
        return hyp2f1_pfaff(args, cfg)
    return float(hyp2f1_neg(args.a, args.b, args.c, 0.5 * math.log(-z), cfg))


def hyp2f1_deriv(args: HypArgs, cfg: Optional[EvalConfig] = None) -> float:
    """d/dz 2F1(a,b;c;z) = (a b / c) 2F1(a+1, b+1; c+1; z)."""
    cfg = cfg or _DEFAULT
    shifted = HypArgs(args.a + 1.0, args.b + 1.0, args.c + 1.0, args.z)
    return (args.a * args.b / args.c) * hyp2f1(shifted, cfg)
