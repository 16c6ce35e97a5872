"""Exact and asymptotic analysis of the agreement dynamics.

Covers: the hypergeometric law of flip outcomes, its signed-sum
identity, the exact expected one-step drift of the agreement count, the
density-limit drift polynomial p(x), its fixed-step RK4 integration,
lower bounds on p, and upper bounds on the time to reach a target
density multiple.

Binomial coefficients are exact integers with the convention
C(a, b) = 0 for b < 0 or b > a, which makes the drift sum total over
all j.  Probabilities are returned as Fractions where exactness is part
of the contract.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np


@dataclass(frozen=True)
class DriftModel:
    """Sample size k and flip size l; the flip threshold is fixed at
    ceil(k/2) disagreements."""

    k: int
    l: int

    def __post_init__(self) -> None:
        if not 1 <= self.l <= self.k:
            raise ValueError(f"need 1 <= l <= k, got l={self.l} k={self.k}")

    @property
    def threshold(self) -> int:
        return (self.k + 1) // 2


def _comb0(a: int, b: int) -> int:
    # C(a, b) with the vanishing convention for infeasible b.
    if b < 0 or b > a:
        return 0
    return comb(a, b)


def hypergeom_flip_prob(k: int, j: int, l: int, s: int) -> Fraction:
    """Probability that exactly s of l uniformly chosen positions (out
    of k, of which j are disagreements) land on disagreements."""
    if not (0 <= j <= k and 0 <= l <= k and 0 <= s <= l):
        raise ValueError(f"need 0 <= j <= k, 0 <= l <= k, 0 <= s <= l; got k={k} j={j} l={l} s={s}")
    return Fraction(_comb0(j, s) * _comb0(k - j, l - s), comb(k, l))


def signed_flip_identity(k: int, j: int, l: int) -> Fraction:
    """Closed form of sum_s (2s - l) * hypergeom_flip_prob(k, j, l, s)."""
    if not (0 <= j <= k and 0 <= l <= k):
        raise ValueError(f"need 0 <= j <= k and 0 <= l <= k; got k={k} j={j} l={l}")
    return (Fraction(2 * j, k) - 1) * l


def expected_drift_exact(n: int, x: int, k: int, l: int) -> Fraction:
    """Exact expected one-step change of the agreement count when the
    current count is x: the sampled disagreement count j is
    hypergeometric, and flips happen when j >= ceil(k/2)."""
    if not (0 <= x <= n and 1 <= l <= k <= n):
        raise ValueError(f"need 0 <= x <= n and 1 <= l <= k <= n; got n={n} x={x} k={k} l={l}")
    r = (k + 1) // 2
    denom = comb(n, k)
    total = Fraction(0)
    for j in range(r, k + 1):
        weight = _comb0(n - x, j) * _comb0(x, k - j)
        if weight:
            total += (Fraction(2 * j, k) - 1) * l * Fraction(weight, denom)
    return total


def p_of_x(model: DriftModel, x: float) -> float:
    """Density-limit drift polynomial: the expected one-step change per
    unit of scaled time at agreement density x."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    k, l = model.k, model.l
    total = 0.0
    for j in range(model.threshold, k + 1):
        total += l * (2 * j / k - 1) * comb(k, j) * (1 - x) ** j * x ** (k - j)
    return total


def dp_dx(model: DriftModel, x: float) -> float:
    """Analytic derivative of p_of_x."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    k, l = model.k, model.l
    total = 0.0
    for j in range(model.threshold, k + 1):
        c = l * (2 * j / k - 1) * comb(k, j)
        term = 0.0
        if j >= 1:
            term -= j * (1 - x) ** (j - 1) * x ** (k - j)
        if k - j >= 1:
            term += (k - j) * (1 - x) ** j * x ** (k - j - 1)
        total += c * term
    return total


@dataclass(frozen=True)
class OdeSolution:
    """Fixed-step trajectory of the deterministic agreement density."""

    ts: np.ndarray
    xs: np.ndarray
    dt: float
    x0: float

    @property
    def final(self) -> float:
        return float(self.xs[-1])

    def at(self, t: float) -> float:
        """Linear interpolation on the sample grid."""
        return float(np.interp(t, self.ts, self.xs))


def integrate_ode(model: DriftModel, x0: float, t_end: float, dt: float = 1e-3) -> OdeSolution:
    """Classical RK4 on dx/dt = p(x) from x(0) = x0, samples clamped to
    [0, 1]."""
    if not 0.0 <= x0 <= 1.0:
        raise ValueError(f"x0={x0} outside [0, 1]")
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_end < dt:
        raise ValueError("t_end must be at least dt")
    n_steps = int(round(t_end / dt))
    ts = np.empty(n_steps + 1)
    xs = np.empty(n_steps + 1)
    ts[0], xs[0] = 0.0, x0
    x = x0
    p = lambda v: p_of_x(model, min(max(v, 0.0), 1.0))
    for i in range(1, n_steps + 1):
        k1 = p(x)
        k2 = p(x + 0.5 * dt * k1)
        k3 = p(x + 0.5 * dt * k2)
        k4 = p(x + dt * k3)
        x = x + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        x = min(max(x, 0.0), 1.0)
        ts[i] = i * dt
        xs[i] = x
    return OdeSolution(ts=ts, xs=xs, dt=dt, x0=x0)


def lower_bound_p(model: DriftModel, x: float) -> float:
    """Provable lower bound on p_of_x, piecewise at x = 1/2."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    k, l = model.k, model.l
    if x < 0.5:
        return l * (x**k + 1 - 2 * x)
    return (l / k) * (1 - x) ** k * comb(k, model.threshold) * model.threshold


def hitting_time_bound(model: DriftModel, x0: float, h: float) -> float:
    """Closed-form upper bound on the scaled time until the density
    grows from x0 to h*x0, piecewise at h*x0 = 1/2."""
    _check_h(x0, h)
    k, l = model.k, model.l
    target = h * x0
    if h == 1.0:
        return 0.0
    if target < 0.5:
        return x0 * (h - 1) / (l * (target**k + 1 - 2 * target))
    return k * x0 * (h - 1) / (l * (1 - target) ** k * comb(k, model.threshold) * model.threshold)


def hitting_time_bound_generic(model: DriftModel, x0: float, h: float) -> float:
    """Sharper tangent-line bound x0*(h-1)/p(h*x0); never looser than
    hitting_time_bound because p >= lower_bound_p."""
    _check_h(x0, h)
    if h == 1.0:
        return 0.0
    return x0 * (h - 1) / p_of_x(model, h * x0)


def _check_h(x0: float, h: float) -> None:
    if not 0.0 < x0 <= 1.0:
        raise ValueError(f"x0={x0} outside (0, 1]")
    if not 1.0 <= h <= 1.0 / x0:
        raise ValueError(f"h={h} outside [1, {1.0 / x0}]")


def ode_hitting_time(
    model: DriftModel,
    x0: float,
    h: float,
    dt: float = 1e-3,
    t_max: float = 1e4,
) -> float:
    """Scaled time at which the integrated density first reaches h*x0,
    linearly interpolated across the crossing step."""
    _check_h(x0, h)
    target = h * x0
    if target <= x0:
        return 0.0
    x = x0
    t = 0.0
    p = lambda v: p_of_x(model, min(max(v, 0.0), 1.0))
    while t < t_max:
        k1 = p(x)
        k2 = p(x + 0.5 * dt * k1)
        k3 = p(x + 0.5 * dt * k2)
        k4 = p(x + dt * k3)
        x_next = min(max(x + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0, 0.0), 1.0)
        if x_next >= target:
            frac = (target - x) / (x_next - x) if x_next > x else 1.0
            return t + frac * dt
        x, t = x_next, t + dt
    raise RuntimeError(f"density never reached {target} within t_max={t_max}")


def lipschitz_estimate(model: DriftModel, grid_points: int = 10_000) -> float:
    """max |dp/dx| over a uniform grid on [0, 1]; since p is a degree-k
    polynomial this bounds the Lipschitz constant up to grid error."""
    xs = np.linspace(0.0, 1.0, grid_points)
    return max(abs(dp_dx(model, float(x))) for x in xs)
