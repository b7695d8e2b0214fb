"""Method-of-lines integrator for the 1-D viscoelastic wave equation with
delayed velocity feedback.

The evolved system is the history-variable reformulation

    u_tt  = (1 - mu_tilde) u_xx + int mu(s) eta_xx(s) ds - k z(., 1, t)
    eta_t = -eta_s + u_t                (memory coordinate s > 0)
    tau z_t + z_rho = 0, z(., 0) = u_t  (delay coordinate rho in (0, 1))

on (0, L) with homogeneous Dirichlet ends, plus an extra damping term
-theta |k| e^tau u_t in the "auxiliary" mode.

Two realizations of the memory term are provided:

* ``prony_modes`` (default): the convolution against a Prony kernel is
  carried by auxiliary fields q_i = int_0^inf exp(-b_i s) u(t - s) ds
  with q_i' = u - b_i q_i, which integrates the s-direction exactly.
  The history field eta is reconstructed on the geometric s-grid from a
  ring buffer of past u fields (the transport equation is solved exactly
  along characteristics, eta(s) = u(t) - u(t - s)).
* ``eta_grid``: eta is evolved directly on the s-grid with first-order
  upwinding and the memory force is the trapezoid s-quadrature.  Kept as
  a cross-validation mode; its first-order transport error is far too
  large for quantitative use at desk resolutions.

The delay likewise has an exact ring-buffer realization (default) and a
first-order upwind rho-grid realization for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kernel import MemoryKernel, validate_kernel, quadrature_weights

__all__ = [
    "SolverError",
    "CflViolation",
    "DelayUnresolvable",
    "NonFinite",
    "ModelParams",
    "Discretization",
    "InitialData",
    "SimState",
    "Snapshot",
    "Trace",
    "discretize",
    "geometric_s_grid",
    "build",
    "step",
    "run",
    "delayed_velocity",
    "eta_field",
    "extra_damping",
    "dissipativity_spot_check",
    "SpotCheckReport",
]

MODES = ("original", "auxiliary")
DELAY_REALIZATIONS = ("ring_buffer", "rho_grid")
MEMORY_REALIZATIONS = ("prony_modes", "eta_grid")


class SolverError(RuntimeError):
    pass


class CflViolation(SolverError):
    pass


class DelayUnresolvable(SolverError):
    pass


class NonFinite(SolverError):
    """A field left the finite range; carries the offending step index."""

    def __init__(self, step_index: int):
        super().__init__(f"state became non-finite at step {step_index}")
        self.step_index = step_index


@dataclass(frozen=True)
class ModelParams:
    """Which problem variant runs, and with what coefficients."""

    length: float = 1.0
    tau: float = 0.0
    k: float = 0.0
    theta: float = 2.0
    kernel: MemoryKernel = MemoryKernel()
    mode: str = "original"
    delay_realization: str = "ring_buffer"
    memory_realization: str = "prony_modes"

    def __post_init__(self):
        if not (math.isfinite(self.length) and self.length > 0.0):
            raise ValueError(f"length must be positive, got {self.length!r}")
        if not (math.isfinite(self.tau) and self.tau >= 0.0):
            raise ValueError(f"tau must be >= 0, got {self.tau!r}")
        if not math.isfinite(self.k):
            raise ValueError(f"k must be finite, got {self.k!r}")
        if not (math.isfinite(self.theta) and self.theta > 0.0):
            raise ValueError(f"theta must be positive, got {self.theta!r}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.delay_realization not in DELAY_REALIZATIONS:
            raise ValueError(
                f"delay_realization must be one of {DELAY_REALIZATIONS}, "
                f"got {self.delay_realization!r}"
            )
        if self.memory_realization not in MEMORY_REALIZATIONS:
            raise ValueError(
                f"memory_realization must be one of {MEMORY_REALIZATIONS}, "
                f"got {self.memory_realization!r}"
            )


def extra_damping(params: ModelParams, disc: "Discretization") -> float:
    """Coefficient of the added damping term: theta |k| e^tau in auxiliary mode."""
    if params.mode != "auxiliary":
        return 0.0
    return params.theta * abs(params.k) * math.exp(disc.tau)


def geometric_s_grid(s_max: float, ns: int, first_interval: float,
                     max_ratio: float = 1.15) -> np.ndarray:
    """Nodes 0 = s_0 < ... < s_{ns-1} = s_max with geometrically growing gaps.

    The growth ratio is solved so that ns nodes starting from the requested
    first interval land exactly on s_max; it is capped at ``max_ratio`` (the
    first interval then widens), and the grid degrades to uniform when even
    constant spacing overshoots.
    """
    if ns < 2:
        raise ValueError(f"ns must be at least 2, got {ns}")
    if not s_max > 0.0:
        raise ValueError(f"s_max must be positive, got {s_max!r}")
    m = ns - 1
    if first_interval * m >= s_max:
        return np.linspace(0.0, s_max, ns)

    def span(ratio: float) -> float:
        return first_interval * (ratio ** m - 1.0) / (ratio - 1.0)

    if span(max_ratio) < s_max:
        ratio = max_ratio
        h0 = s_max * (ratio - 1.0) / (ratio ** m - 1.0)
    else:
        lo, hi = 1.0 + 1e-12, max_ratio
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if span(mid) < s_max:
                lo = mid
            else:
                hi = mid
        ratio = 0.5 * (lo + hi)
        h0 = first_interval
    gaps = h0 * ratio ** np.arange(m)
    nodes = np.concatenate(([0.0], np.cumsum(gaps)))
    nodes[-1] = s_max  # absorb the bisection residue
    return nodes


@dataclass(frozen=True, eq=False)
class Discretization:
    """Grid parameters; ``tau`` is the delay snapped to the step grid."""

    nx: int
    dx: float
    dt: float
    cfl: float
    tau: float
    n_delay: int
    s_nodes: np.ndarray
    s_weights: np.ndarray
    s_max: float
    n_hist: int

    @property
    def ns(self) -> int:
        return int(self.s_nodes.size)

    def x_interior(self, length: float) -> np.ndarray:
        return self.dx * np.arange(1, self.nx + 1)


def discretize(params: ModelParams, nx: int = 200, cfl: float = 0.25,
               ns: int = 64, tail_tol: float = 1e-8) -> Discretization:
    """Build the grids for ``params``; snaps tau to a whole number of steps."""
    if nx < 3:
        raise ValueError(f"nx must be at least 3, got {nx}")
    if not (0.0 < cfl <= 0.5):
        raise CflViolation(f"cfl must lie in (0, 0.5], got {cfl!r}")
    dx = params.length / (nx + 1)
    dt = cfl * dx
    if params.tau > 0.0:
        n_delay = int(round(params.tau / dt))
        if n_delay == 0:
            raise DelayUnresolvable(
                f"tau={params.tau} is below the step size dt={dt}; "
                "refine the grid or drop the delay"
            )
        tau_snapped = n_delay * dt
    else:
        n_delay = 0
        tau_snapped = 0.0
    if params.kernel.is_empty:
        s_nodes = np.zeros(0)
        s_weights = np.zeros(0)
        s_max = 0.0
        n_hist = 0
    else:
        report = validate_kernel(params.kernel, tail_tol)
        s_nodes = geometric_s_grid(report.s_max, ns, dx)
        s_weights = quadrature_weights(s_nodes)
        s_max = report.s_max
        n_hist = int(math.ceil(s_max / dt)) + 2
    return Discretization(
        nx=nx, dx=dx, dt=dt, cfl=cfl,
        tau=tau_snapped, n_delay=n_delay,
        s_nodes=s_nodes, s_weights=s_weights, s_max=s_max, n_hist=n_hist,
    )


@dataclass(frozen=True)
class InitialData:
    """Initial displacement profile and its prescribed past.

    The past is ``u0(x, t) = profile(x) * factor(t)`` for t <= 0, with
    factor 1 (frozen) or cos(omega t) (modulated).  Both give zero initial
    velocity; frozen history additionally kills all history terms.
    """

    shape: str = "sine"
    mode_index: int = 1
    center: float = 0.5
    width: float = 0.1
    history: str = "frozen"
    omega: float = 1.0

    def __post_init__(self):
        if self.shape not in ("sine", "gaussian", "zero"):
            raise ValueError(
                f"shape must be 'sine', 'gaussian' or 'zero', got {self.shape!r}"
            )
        if self.shape == "sine" and self.mode_index < 1:
            raise ValueError(f"mode_index must be >= 1, got {self.mode_index}")
        if self.shape == "gaussian" and not self.width > 0.0:
            raise ValueError(f"width must be positive, got {self.width!r}")
        if self.history not in ("frozen", "modulated"):
            raise ValueError(
                f"history must be 'frozen' or 'modulated', got {self.history!r}"
            )

    def profile(self, x: np.ndarray, length: float) -> np.ndarray:
        if self.shape == "sine":
            return np.sin(self.mode_index * np.pi * x / length)
        if self.shape == "gaussian":
            return np.exp(-((x - self.center) ** 2) / (2.0 * self.width ** 2))
        return np.zeros_like(x)

    def history_factor(self, t: float) -> float:
        if self.history == "frozen":
            return 1.0
        return math.cos(self.omega * t)

    def history_rate(self, t: float) -> float:
        if self.history == "frozen":
            return 0.0
        return -self.omega * math.sin(self.omega * t)

    def memory_weight(self, b: float) -> float:
        """int_0^inf exp(-b s) * factor(-s) ds, in closed form."""
        if self.history == "frozen":
            return 1.0 / b
        return b / (b * b + self.omega ** 2)


class RingBuffer:
    """Fixed-capacity ring of past fields; ``back(0)`` is the newest."""

    __slots__ = ("data", "head")

    def __init__(self, capacity: int, width: int):
        self.data = np.zeros((capacity, width))
        self.head = 0

    @property
    def capacity(self) -> int:
        return self.data.shape[0]

    def push(self, row: np.ndarray) -> None:
        self.head = (self.head - 1) % self.capacity
        self.data[self.head] = row

    def back(self, steps: int) -> np.ndarray:
        return self.data[(self.head + steps) % self.capacity]

    def back_interp(self, steps: float) -> np.ndarray:
        """Linear interpolation between stored slots at a fractional offset."""
        j = int(math.floor(steps))
        frac = steps - j
        if frac == 0.0:
            return self.back(j)
        newer = self.back(j)
        # written so equal neighbours interpolate bitwise-exactly
        return newer + frac * (self.back(j + 1) - newer)


@dataclass
class SimState:
    """One snapshot of the discrete system; owned by a single integrator."""

    t: float
    step_index: int
    u: np.ndarray
    v: np.ndarray
    q: np.ndarray | None = None        # (n_terms, nx) exponential memory modes
    eta: np.ndarray | None = None      # (ns-1, nx) evolved history field
    u_hist: RingBuffer | None = None   # past u fields, for eta reconstruction
    v_hist: RingBuffer | None = None   # past u_t fields, the delay line
    z_rho: np.ndarray | None = None    # (n_delay, nx) transported delay field

    def full_grid(self, values: np.ndarray) -> np.ndarray:
        """Interior values padded with the Dirichlet boundary zeros."""
        out = np.zeros(values.shape[:-1] + (values.shape[-1] + 2,))
        out[..., 1:-1] = values
        return out

    def nbytes(self) -> int:
        """Rough state footprint, used to check that disabled terms cost nothing."""
        total = self.u.nbytes + self.v.nbytes
        for arr in (self.q, self.eta, self.z_rho):
            if arr is not None:
                total += arr.nbytes
        for buf in (self.u_hist, self.v_hist):
            if buf is not None:
                total += buf.data.nbytes
        return total


def build(params: ModelParams, init: InitialData, disc: Discretization) -> SimState:
    """State at t = 0 with every history structure filled from the prescribed past."""
    if disc.tau > 0.0 and params.tau <= 0.0:
        raise DelayUnresolvable("discretization carries a delay but params.tau is 0")
    x = disc.x_interior(params.length)
    phi = init.profile(x, params.length)
    u = phi.copy()
    v = phi * init.history_rate(0.0)
    state = SimState(t=0.0, step_index=0, u=u, v=v)

    kernel = params.kernel
    if not kernel.is_empty:
        if params.memory_realization == "prony_modes":
            state.q = np.stack([phi * init.memory_weight(b) for b in kernel.rates])
            hist = RingBuffer(disc.n_hist, disc.nx)
            for j in range(hist.capacity):
                hist.data[j] = phi * init.history_factor(-j * disc.dt)
            state.u_hist = hist
        else:
            s_inner = disc.s_nodes[1:]
            state.eta = np.stack(
                [phi * (1.0 - init.history_factor(-s)) for s in s_inner]
            )

    if disc.n_delay > 0:
        vbuf = RingBuffer(disc.n_delay + 2, disc.nx)
        for j in range(vbuf.capacity):
            vbuf.data[j] = phi * init.history_rate(-j * disc.dt)
        state.v_hist = vbuf
        if params.delay_realization == "rho_grid":
            # z(x, rho_l, 0) = u_t history at -tau*rho_l; rho_l = l/n_delay, l >= 1
            state.z_rho = np.stack(
                [phi * init.history_rate(-l * disc.dt) for l in range(1, disc.n_delay + 1)]
            )
    return state


def laplacian(w: np.ndarray, dx: float) -> np.ndarray:
    """Standard 3-point second difference with homogeneous Dirichlet rows."""
    out = -2.0 * w
    out[..., 1:] += w[..., :-1]
    out[..., :-1] += w[..., 1:]
    out /= dx * dx
    return out


def _memory_force_coeffs(params: ModelParams, disc: Discretization) -> np.ndarray:
    """w_j mu(s_j) for the interior s-nodes (node 0 carries eta = 0)."""
    s = disc.s_nodes[1:]
    return disc.s_weights[1:] * params.kernel.value(s)


def _rhs(params: ModelParams, disc: Discretization, state: SimState,
         u: np.ndarray, v: np.ndarray, mem, z, c: float):
    """Stage derivative of (u, v, mem, z) at stage offset c in [0, 1]."""
    k = params.k
    damp = extra_damping(params, disc)

    # delayed velocity z(., 1, t + c dt)
    if disc.n_delay == 0:
        zd = v
    elif params.delay_realization == "ring_buffer":
        zd = state.v_hist.back_interp(disc.n_delay - c)
    else:
        zd = z[-1]

    if mem is None:
        dv = laplacian(u, disc.dx)
        dmem = None
    elif params.memory_realization == "prony_modes":
        # int mu(s) eta_xx ds = mu_tilde u_xx - sum_i a_i q_i_xx, exactly
        a = params.kernel.amplitudes
        b = params.kernel.rates
        dv = laplacian(u - a @ mem, disc.dx)
        dmem = u[None, :] - b[:, None] * mem
    else:
        mu_tilde = params.kernel.mu_tilde
        wmu = _memory_force_coeffs(params, disc)
        dv = laplacian((1.0 - mu_tilde) * u + wmu @ mem, disc.dx)
        gaps = np.diff(disc.s_nodes)
        upwind = mem.copy()
        upwind[1:] -= mem[:-1]
        dmem = v[None, :] - upwind / gaps[:, None]

    if k != 0.0:
        dv = dv - k * zd
    if damp != 0.0:
        dv = dv - damp * v

    if z is not None:
        # tau z_t = -z_rho with inflow z(rho=0) = v; tau * drho equals dt
        upz = z.copy()
        upz[1:] -= z[:-1]
        upz[0] -= v
        dz = -upz / disc.dt
    else:
        dz = None
    return v, dv, dmem, dz


def _axpy(y, a: float, d):
    if y is None:
        return None
    return y + a * d


def step(state: SimState, params: ModelParams, disc: Discretization) -> SimState:
    """Advance one dt by the classical 4-stage explicit scheme (in place)."""
    dt = disc.dt
    u0, v0, m0, z0 = state.u, state.v, state.q, state.z_rho
    if m0 is None:
        m0 = state.eta

    # a blowing-up state overflows to inf/nan and is caught below
    with np.errstate(over="ignore", invalid="ignore"):
        k1 = _rhs(params, disc, state, u0, v0, m0, z0, 0.0)
        k2 = _rhs(params, disc, state,
                  u0 + 0.5 * dt * k1[0], v0 + 0.5 * dt * k1[1],
                  _axpy(m0, 0.5 * dt, k1[2]), _axpy(z0, 0.5 * dt, k1[3]), 0.5)
        k3 = _rhs(params, disc, state,
                  u0 + 0.5 * dt * k2[0], v0 + 0.5 * dt * k2[1],
                  _axpy(m0, 0.5 * dt, k2[2]), _axpy(z0, 0.5 * dt, k2[3]), 0.5)
        k4 = _rhs(params, disc, state,
                  u0 + dt * k3[0], v0 + dt * k3[1],
                  _axpy(m0, dt, k3[2]), _axpy(z0, dt, k3[3]), 1.0)

        w = dt / 6.0
        state.u = u0 + w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        state.v = v0 + w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        if m0 is not None:
            mnew = m0 + w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
            if params.memory_realization == "prony_modes":
                state.q = mnew
            else:
                state.eta = mnew
        if z0 is not None:
            state.z_rho = z0 + w * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])

    state.t += dt
    state.step_index += 1
    if state.u_hist is not None:
        state.u_hist.push(state.u)
    if state.v_hist is not None:
        state.v_hist.push(state.v)
    if not (np.isfinite(state.u).all() and np.isfinite(state.v).all()):
        raise NonFinite(state.step_index)
    return state


def delayed_velocity(state: SimState, params: ModelParams,
                     disc: Discretization) -> np.ndarray:
    """z(., 1, t) at a whole-step time (bit-exact for the ring buffer)."""
    if disc.n_delay == 0:
        return state.v
    if params.delay_realization == "ring_buffer":
        return state.v_hist.back(disc.n_delay)
    return state.z_rho[-1]


def eta_field(state: SimState, params: ModelParams, disc: Discretization) -> np.ndarray:
    """History field eta(x, s_j) on the interior s-nodes (shape (ns-1, nx)).

    For the prony_modes realization this is the exact characteristics
    solution eta(s) = u(t) - u(t - s) read off the u ring buffer; for
    eta_grid it is the evolved array itself.
    """
    if params.kernel.is_empty:
        return np.zeros((0, disc.nx))
    if state.eta is not None:
        return state.eta
    steps = disc.s_nodes[1:] / disc.dt
    out = np.empty((steps.size, disc.nx))
    for row, sb in enumerate(steps):
        out[row] = state.u - state.u_hist.back_interp(float(sb))
    return out


@dataclass
class Snapshot:
    """Volumetric record used by the memory-identity check."""

    t: float
    u: np.ndarray
    v: np.ndarray
    eta: np.ndarray
    v_delayed: np.ndarray


@dataclass
class Trace:
    """Sampled energy history of one run (plus optional volumetric snapshots)."""

    params: ModelParams
    disc: Discretization
    times: np.ndarray
    kinetic: np.ndarray
    elastic: np.ndarray
    memory: np.ndarray
    delay: np.ndarray
    total: np.ndarray
    ut_sq: np.ndarray
    ut_tau_sq: np.ndarray
    delay_raw: np.ndarray
    mu_prime_eta: np.ndarray
    snapshots: list[Snapshot] = field(default_factory=list)
    aborted_step: int | None = None
    final_state: SimState | None = None

    @property
    def mode(self) -> str:
        return self.params.mode


def run(params: ModelParams, init: InitialData, disc: Discretization,
        horizon: float, sample_every: int = 0, snapshots: bool = False) -> Trace:
    """Integrate to ``horizon`` sampling the energy every ``sample_every`` steps.

    ``sample_every = 0`` picks a cadence of about 1000 samples.  A
    non-finite state aborts the run; the partial trace is still returned
    with ``aborted_step`` set.
    """
    from .energy import sample_state  # deferred: energy imports this module

    if horizon < 0.0:
        raise ValueError(f"horizon must be >= 0, got {horizon!r}")
    n_steps = int(round(horizon / disc.dt))
    if sample_every <= 0:
        sample_every = max(1, n_steps // 1000)

    state = build(params, init, disc)
    times = []
    rows = []
    snaps = []

    def take_sample():
        times.append(state.t)
        rows.append(sample_state(state, params, disc))
        if snapshots:
            snaps.append(
                Snapshot(
                    t=state.t,
                    u=state.u.copy(),
                    v=state.v.copy(),
                    eta=eta_field(state, params, disc).copy(),
                    v_delayed=delayed_velocity(state, params, disc).copy(),
                )
            )

    take_sample()
    aborted = None
    for n in range(1, n_steps + 1):
        try:
            step(state, params, disc)
        except NonFinite as err:
            aborted = err.step_index
            break
        if n % sample_every == 0 or n == n_steps:
            take_sample()

    cols = np.array(
        [
            [r.kinetic, r.elastic, r.memory, r.delay,
             r.ut_sq, r.ut_tau_sq, r.delay_raw, r.mu_prime_eta]
            for r in rows
        ]
    )
    return Trace(
        params=params,
        disc=disc,
        times=np.array(times),
        kinetic=cols[:, 0],
        elastic=cols[:, 1],
        memory=cols[:, 2],
        delay=cols[:, 3],
        total=cols[:, 0] + cols[:, 1] + cols[:, 2] + cols[:, 3],
        ut_sq=cols[:, 4],
        ut_tau_sq=cols[:, 5],
        delay_raw=cols[:, 6],
        mu_prime_eta=cols[:, 7],
        snapshots=snaps,
        aborted_step=aborted,
        final_state=state,
    )


# -- dissipativity spot check ---------------------------------------------------

@dataclass(frozen=True)
class SpotCheckReport:
    max_quotient: float
    c_shift: float
    trials: int
    passed: bool


def _edge_energy(w: np.ndarray, dx: float) -> float:
    """Dirichlet gradient energy sum_edges (dw/dx)^2 dx, exact partner of laplacian()."""
    full = np.zeros(w.size + 2)
    full[1:-1] = w
    d = np.diff(full)
    return float(d @ d) / dx


def _edge_inner(w1: np.ndarray, w2: np.ndarray, dx: float) -> float:
    f1 = np.zeros(w1.size + 2)
    f1[1:-1] = w1
    f2 = np.zeros(w2.size + 2)
    f2[1:-1] = w2
    return float(np.diff(f1) @ np.diff(f2)) / dx


def dissipativity_spot_check(params: ModelParams, disc: Discretization,
                             trials: int = 16, c_shift: float = 0.0,
                             seed: int = 0) -> SpotCheckReport:
    """Max Rayleigh quotient of the semi-discrete generator over random states.

    The generator is assembled in the eta-grid / rho-grid realization (the
    one whose state matches the abstract system) and the quotient is taken
    in the discrete energy inner product.  Components that cannot feed back
    into the dynamics are excluded: eta when the kernel is empty, z when
    k = 0 or tau = 0.  PASS means the maximum stays at or below ``c_shift``.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    dx = disc.dx
    kernel = params.kernel
    use_eta = not kernel.is_empty
    use_z = disc.n_delay > 0 and params.k != 0.0
    mu_tilde = kernel.mu_tilde
    wmu = _memory_force_coeffs(params, disc) if use_eta else None
    gaps = np.diff(disc.s_nodes) if use_eta else None
    damp = extra_damping(params, disc)
    d_rho = 1.0 / disc.n_delay if use_z else 0.0

    def norm_sq(u, v, eta, z) -> float:
        out = (1.0 - mu_tilde) * _edge_energy(u, dx) + dx * float(v @ v)
        if use_eta:
            out += sum(
                wmu[j] * _edge_energy(eta[j], dx) for j in range(eta.shape[0])
            )
        if use_z:
            out += d_rho * dx * float((z * z).sum())
        return out

    def pairing(du, dv, deta, dz, u, v, eta, z) -> float:
        out = (1.0 - mu_tilde) * _edge_inner(du, u, dx) + dx * float(dv @ v)
        if use_eta:
            out += sum(
                wmu[j] * _edge_inner(deta[j], eta[j], dx) for j in range(eta.shape[0])
            )
        if use_z:
            out += d_rho * dx * float((dz * z).sum())
        return out

    def generator(u, v, eta, z):
        du = v
        if use_eta:
            dv = laplacian((1.0 - mu_tilde) * u + wmu @ eta, dx)
            upe = eta.copy()
            upe[1:] -= eta[:-1]
            deta = v[None, :] - upe / gaps[:, None]
        else:
            dv = laplacian(u, dx)
            deta = None
        if params.k != 0.0:
            zd = z[-1] if use_z else v
            dv = dv - params.k * zd
        if damp != 0.0:
            dv = dv - damp * v
        if use_z:
            upz = z.copy()
            upz[1:] -= z[:-1]
            upz[0] -= v
            dz = -upz / (disc.tau * d_rho)
        else:
            dz = None
        return du, dv, deta, dz

    worst = -math.inf
    for _ in range(trials):
        u = rng.standard_normal(disc.nx)
        v = rng.standard_normal(disc.nx)
        eta = rng.standard_normal((disc.ns - 1, disc.nx)) if use_eta else None
        z = rng.standard_normal((disc.n_delay, disc.nx)) if use_z else None
        denom = norm_sq(u, v, eta, z)
        du, dv, deta, dz = generator(u, v, eta, z)
        quotient = pairing(du, dv, deta, dz, u, v, eta, z) / denom
        worst = max(worst, quotient)
    return SpotCheckReport(
        max_quotient=worst, c_shift=c_shift, trials=trials, passed=worst <= c_shift
    )
