"""The energy functional and its dissipation check for the auxiliary problem.

The energy of a state is

    F(t) = 1/2 int u_t^2 + (1 - mu_tilde)/2 int |grad u|^2
         + 1/2 int_0^inf mu(s) int |grad eta(s)|^2 dx ds
         + (theta |k| e^tau / 2) int_{t-tau}^t e^{-(t-s)} int u_t(s)^2 dx ds.

Spatial integrals use the trapezoid rule on the x-grid with gradients by
centered differences (one-sided at the boundary); the s-integral uses the
discretization's own quadrature weights; the delay integral is a trapezoid
over the velocity ring buffer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import solver as solver_mod
from .solver import Discretization, ModelParams, SimState, Trace

__all__ = [
    "EnergyBreakdown",
    "SampleRow",
    "WrongMode",
    "DissipationReport",
    "energy",
    "sample_state",
    "check_dissipation",
]


class WrongMode(ValueError):
    """The dissipation estimate only holds for auxiliary-problem traces."""


@dataclass(frozen=True)
class EnergyBreakdown:
    """The four additive terms of F(t); all nonnegative."""

    kinetic: float
    elastic: float
    memory: float
    delay: float

    @property
    def total(self) -> float:
        return self.kinetic + self.elastic + self.memory + self.delay


@dataclass(frozen=True)
class SampleRow:
    """EnergyBreakdown terms plus the raw integrals the dissipation check needs."""

    kinetic: float
    elastic: float
    memory: float
    delay: float
    ut_sq: float
    ut_tau_sq: float
    delay_raw: float
    mu_prime_eta: float


def grad_full(interior: np.ndarray, dx: float) -> np.ndarray:
    """Gradient on the padded grid: centered inside, one-sided at the ends."""
    full = np.zeros(interior.shape[:-1] + (interior.shape[-1] + 2,))
    full[..., 1:-1] = interior
    g = np.empty_like(full)
    g[..., 1:-1] = (full[..., 2:] - full[..., :-2]) / (2.0 * dx)
    g[..., 0] = (full[..., 1] - full[..., 0]) / dx
    g[..., -1] = (full[..., -1] - full[..., -2]) / dx
    return g


def integral_x(values_full: np.ndarray, dx: float) -> np.ndarray:
    """Trapezoid over the padded x-grid (last axis)."""
    return dx * (
        values_full.sum(axis=-1) - 0.5 * (values_full[..., 0] + values_full[..., -1])
    )


def _interior_sq_integral(interior: np.ndarray, dx: float) -> float:
    # trapezoid with zero Dirichlet endpoints collapses to a plain sum
    return dx * float(interior @ interior)


def _delay_integral(state: SimState, disc: Discretization) -> float:
    """int_{t-tau}^t e^{-(t-s)} ||u_t(s)||^2 ds over the velocity ring buffer."""
    if disc.n_delay == 0 or state.v_hist is None:
        return 0.0
    nd = disc.n_delay
    dt = disc.dt
    buf = state.v_hist
    idx = (buf.head + np.arange(nd + 1)) % buf.capacity
    rows = buf.data[idx]
    norms = disc.dx * np.einsum("ij,ij->i", rows, rows)
    w = np.full(nd + 1, dt)
    w[0] = w[-1] = 0.5 * dt
    return float(w @ (np.exp(-dt * np.arange(nd + 1)) * norms))


def energy(state: SimState, params: ModelParams, disc: Discretization) -> EnergyBreakdown:
    """Term-by-term energy of a state."""
    row = sample_state(state, params, disc)
    return EnergyBreakdown(
        kinetic=row.kinetic, elastic=row.elastic, memory=row.memory, delay=row.delay
    )


def sample_state(state: SimState, params: ModelParams, disc: Discretization) -> SampleRow:
    # near-blow-up states report inf/nan energy instead of warning
    with np.errstate(over="ignore", invalid="ignore"):
        return _sample_state(state, params, disc)


def _sample_state(state: SimState, params: ModelParams, disc: Discretization) -> SampleRow:
    dx = disc.dx
    kinetic = 0.5 * _interior_sq_integral(state.v, dx)
    mu_tilde = params.kernel.mu_tilde
    gu = grad_full(state.u, dx)
    elastic = 0.5 * (1.0 - mu_tilde) * float(integral_x(gu * gu, dx))

    if params.kernel.is_empty:
        memory = 0.0
        mu_prime_eta = 0.0
    else:
        eta = solver_mod.eta_field(state, params, disc)
        ge = grad_full(eta, dx)
        grad_sq = integral_x(ge * ge, dx)  # per s-node
        s_inner = disc.s_nodes[1:]
        w_inner = disc.s_weights[1:]
        memory = 0.5 * float(w_inner @ (params.kernel.value(s_inner) * grad_sq))
        mu_prime_eta = 0.5 * float(
            w_inner @ (params.kernel.derivative(s_inner) * grad_sq)
        )

    delay_raw = _delay_integral(state, disc)
    coeff = params.theta * abs(params.k) * math.exp(disc.tau)
    delay = 0.5 * coeff * delay_raw if params.k != 0.0 and disc.tau > 0.0 else 0.0

    ut_sq = _interior_sq_integral(state.v, dx)
    if disc.n_delay == 0:
        v_tau = state.v
    else:
        v_tau = solver_mod.delayed_velocity(state, params, disc)
    ut_tau_sq = _interior_sq_integral(v_tau, dx)

    return SampleRow(
        kinetic=kinetic,
        elastic=elastic,
        memory=memory,
        delay=delay,
        ut_sq=ut_sq,
        ut_tau_sq=ut_tau_sq,
        delay_raw=delay_raw,
        mu_prime_eta=mu_prime_eta,
    )


@dataclass(frozen=True)
class DissipationReport:
    """Discrete check of the auxiliary problem's energy decrease."""

    max_increment: float          # largest F(t_{i+1}) - F(t_i)
    max_violation: float          # largest dF/dt - RHS(left sample), clipped at 0
    increment_tol: float          # allowed increment, absolute (scaled by F(0))
    violation_tol: float          # allowed slope violation, absolute
    passed: bool
    n_pairs: int


def _stima_rhs(trace: Trace, params: ModelParams, i: int) -> float:
    """Right-hand side of the dissipation estimate at sample i."""
    k_abs = abs(params.k)
    theta = params.theta
    exp_tau = math.exp(trace.disc.tau)
    return (
        trace.mu_prime_eta[i]
        - 0.5 * k_abs * (theta * exp_tau - 1.0) * trace.ut_sq[i]
        - 0.5 * k_abs * (theta - 1.0) * trace.ut_tau_sq[i]
        - 0.5 * theta * k_abs * exp_tau * trace.delay_raw[i]
    )


def check_dissipation(trace: Trace, params: ModelParams,
                      increment_tol: float = 1e-6,
                      violation_tol: float = 0.5) -> DissipationReport:
    """Verify F is non-increasing and satisfies the derivative estimate.

    Both tolerances are relative to F(0): ``increment_tol`` bounds any
    positive per-sample increment, ``violation_tol`` bounds the difference
    quotient's excess over the estimate's right-hand side (evaluated at the
    left sample; the excess is first order in the sampling interval and
    must shrink under refinement).
    """
    if trace.mode != "auxiliary":
        raise WrongMode(
            "dissipation estimate requires an auxiliary-mode trace; the original "
            "problem's energy is not monotone in general"
        )
    t = trace.times
    f = trace.total
    if t.size < 2:
        return DissipationReport(0.0, 0.0, increment_tol, violation_tol, True, 0)
    f0 = f[0]
    scale = f0 if f0 > 0.0 else 1.0
    increments = np.diff(f)
    max_increment = float(increments.max())
    worst = 0.0
    for i in range(t.size - 1):
        dt_pair = t[i + 1] - t[i]
        if dt_pair <= 0.0:
            continue
        slope = (f[i + 1] - f[i]) / dt_pair
        worst = max(worst, slope - _stima_rhs(trace, params, i))
    inc_tol_abs = float(increment_tol * scale)
    vio_tol_abs = float(violation_tol * scale)
    passed = max_increment <= inc_tol_abs and worst <= vio_tol_abs
    return DissipationReport(
        max_increment=float(max_increment),
        max_violation=float(worst),
        increment_tol=inc_tol_abs,
        violation_tol=vio_tol_abs,
        passed=bool(passed),
        n_pairs=int(t.size - 1),
    )
