"""Consensus simulators: noiseless, fixed-delay, first- and second-order noisy.

The noisy protocols are integrated with Euler-Maruyama using unit-intensity
Brownian increments per agent, ``sqrt(dt) * N(0, 1)``. Under that scaling
the steady-state deviation variance equals the spectral coherence sums.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import config
from .errors import SimulationError
from .graph import Graph, laplacian, require_connected
from .spectral import extremes, numeric_spectrum

_CHUNK = 512


@dataclass(frozen=True)
class SimConfig:
    dt: float
    steps: int
    burn_in: int = 0
    trials: int = 1
    seed: int = 0
    eps: float = 0.0
    method: str = "euler"
    record_every: int = 1

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise SimulationError(f"dt must be positive, got {self.dt}")
        if self.steps < 1:
            raise SimulationError("steps must be >= 1")
        if not 0 <= self.burn_in < self.steps:
            raise SimulationError(f"burn_in must lie in [0, steps), got {self.burn_in}")
        if self.trials < 1:
            raise SimulationError("trials must be >= 1")
        if self.eps < 0:
            raise SimulationError("delay eps must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise SimulationError("seed must be a 64-bit unsigned integer")
        if self.method not in ("euler", "rk4"):
            raise SimulationError(f"unknown method {self.method!r}")
        if self.record_every < 1:
            raise SimulationError("record_every must be >= 1")


@dataclass
class SimulationTrace:
    times: np.ndarray
    states: np.ndarray
    disagreement: np.ndarray
    converged: bool
    seed_used: int
    diverged: bool = False
    # largest |mean(x_k+1) - mean(x_k)| over all steps
    max_mean_step: float = 0.0
    ystates: np.ndarray | None = None
    variance_estimate: float | None = None
    extra: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        n = self.states.shape[1]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t"] + [f"x_{i}" for i in range(n)] + ["disagreement"])
        for t, x, d in zip(self.times, self.states, self.disagreement):
            w.writerow([_f(t)] + [_f(v) for v in x] + [_f(d)])
        return buf.getvalue()


def _f(x: float) -> str:
    return format(float(x), ".17g")


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based stream for one trial: Philox keyed by (seed, trial)."""
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) | int(trial)))


def _disagreement(x: np.ndarray) -> float:
    return float(np.max(np.abs(x - x.mean())))


def _lambda_max(g: Graph) -> float:
    return extremes(numeric_spectrum(g)).lambdaN


def simulate_noiseless(g: Graph, x0, cfg: SimConfig) -> SimulationTrace:
    """Integrate ``dX/dt = -L X`` from ``x0``."""
    require_connected(g)
    x = np.array(x0, dtype=float)
    if x.shape != (g.n,):
        raise SimulationError(f"x0 must have length {g.n}")
    lam_n = _lambda_max(g)
    # real-axis stability limits of explicit Euler and classical RK4
    limit = 2.0 if cfg.method == "euler" else 2.785
    if cfg.dt * lam_n >= limit:
        raise SimulationError(
            f"dt*lambda_N = {cfg.dt * lam_n:.4g} is not below {limit} ({cfg.method} unstable)"
        )
    L = laplacian(g)
    dt = cfg.dt

    def rhs(v):
        return -(L @ v)

    times, states, dis = [0.0], [x.copy()], [_disagreement(x)]
    prev_mean = x.mean()
    max_step = 0.0
    for k in range(1, cfg.steps + 1):
        if cfg.method == "euler":
            x = x + dt * rhs(x)
        else:
            k1 = rhs(x)
            k2 = rhs(x + 0.5 * dt * k1)
            k3 = rhs(x + 0.5 * dt * k2)
            k4 = rhs(x + dt * k3)
            x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        mean = x.mean()
        max_step = max(max_step, abs(mean - prev_mean))
        prev_mean = mean
        if k % cfg.record_every == 0 or k == cfg.steps:
            times.append(k * dt)
            states.append(x.copy())
            dis.append(_disagreement(x))
    return SimulationTrace(
        times=np.array(times),
        states=np.array(states),
        disagreement=np.array(dis),
        converged=dis[-1] < config.CONVERGENCE_TOL,
        seed_used=cfg.seed,
        max_mean_step=max_step,
    )


def delay_slots(eps: float, dt: float) -> int:
    """Number of steps spanned by the delay; ``eps`` must sit on the time grid."""
    k = round(eps / dt)
    if k < 1 or abs(k * dt - eps) > 1e-9 * max(eps, dt):
        raise SimulationError(f"delay eps={eps} is not a positive multiple of dt={dt}")
    if k < config.MIN_DELAY_SLOTS:
        raise SimulationError(
            f"dt={dt} gives only {k} delay slots; need at least {config.MIN_DELAY_SLOTS}"
        )
    return k


def simulate_delay(g: Graph, x0, cfg: SimConfig) -> SimulationTrace:
    """Integrate ``dX/dt = -L X(t - eps)`` with constant history ``X = x0`` on ``[-eps, 0]``.

    Stops early once the disagreement exceeds ``DIVERGENCE_FACTOR`` times
    its initial value. ``converged`` requires the disagreement to stay below
    tolerance over the final delay window, so a transient zero crossing of
    an oscillating mode does not count.
    """
    require_connected(g)
    if cfg.eps <= 0:
        raise SimulationError("the delay protocol needs eps > 0")
    k = delay_slots(cfg.eps, cfg.dt)
    x = np.array(x0, dtype=float)
    if x.shape != (g.n,):
        raise SimulationError(f"x0 must have length {g.n}")
    L = laplacian(g)
    dt = cfg.dt
    # ring[j % (k+1)] holds X at step j; X(t - eps) at step j is X_{j-k}
    ring = np.tile(x, (k + 1, 1))
    d0 = _disagreement(x)
    blowup = config.DIVERGENCE_FACTOR * d0
    times, states, dis = [0.0], [x.copy()], [d0]
    prev_mean = x.mean()
    max_step = 0.0
    recent_max = np.zeros(k + 1)
    recent_max[0] = d0
    diverged = False
    last = 0
    for j in range(1, cfg.steps + 1):
        # slots not yet overwritten still hold the constant history x0
        delayed = ring[(j - 1 - k) % (k + 1)]
        x = x - dt * (L @ delayed)
        ring[j % (k + 1)] = x
        mean = x.mean()
        max_step = max(max_step, abs(mean - prev_mean))
        prev_mean = mean
        d = _disagreement(x)
        recent_max[j % (k + 1)] = d
        last = j
        if j % cfg.record_every == 0 or j == cfg.steps:
            times.append(j * dt)
            states.append(x.copy())
            dis.append(d)
        if d0 > 0 and d > blowup:
            diverged = True
            if times[-1] != j * dt:
                times.append(j * dt)
                states.append(x.copy())
                dis.append(d)
            break
    window = recent_max if last >= k else recent_max[: last + 1]
    converged = (not diverged) and float(window.max()) < config.CONVERGENCE_TOL
    return SimulationTrace(
        times=np.array(times),
        states=np.array(states),
        disagreement=np.array(dis),
        converged=converged,
        seed_used=cfg.seed,
        diverged=diverged,
        max_mean_step=max_step,
        extra={"delay_slots": k, "steps_run": last},
    )


def _second_order_roots(lam: np.ndarray) -> np.ndarray:
    """Roots ``s`` of ``s^2 + lam s + lam = 0`` for each Laplacian eigenvalue, shape (m, 2)."""
    disc = np.sqrt((lam * lam - 4 * lam).astype(complex))
    return np.stack([(-lam + disc) / 2, (-lam - disc) / 2], axis=1)


def _check_noisy(g: Graph, cfg: SimConfig, order: int) -> None:
    if cfg.trials > config.MAX_TRIALS:
        raise SimulationError(f"trials={cfg.trials} exceeds budget {config.MAX_TRIALS}")
    if cfg.method != "euler":
        raise SimulationError("noisy protocols use Euler-Maruyama only")
    spec = numeric_spectrum(g)
    lam = np.array([v for v, _ in spec.nonzero()])
    if order == 1:
        if cfg.dt * lam.max() >= 2.0:
            raise SimulationError(f"dt*lambda_N = {cfg.dt * lam.max():.4g} >= 2 (unstable)")
        rate = lam.min()
    else:
        s = _second_order_roots(lam)
        amp = np.abs(1 + cfg.dt * s)
        if amp.max() >= 1.0:
            raise SimulationError("dt too large: Euler step of the (X, Y) system is unstable")
        rate = float(-s.real.max())
    if math.exp(-rate * cfg.burn_in * cfg.dt) >= 1e-3:
        raise SimulationError(
            f"burn-in of {cfg.burn_in * cfg.dt:.4g} time units is too short for decay rate {rate:.4g}"
        )


def noisy_trial_means(g: Graph, cfg: SimConfig, order: int) -> np.ndarray:
    """Per-trial time average of ``mean_i (x_i - xbar)^2`` after burn-in.

    Trials advance together as rows of one array, but trial ``t`` only ever
    consumes its own stream ``trial_rng(seed, t)``, so its result does not
    depend on how many other trials run alongside it.
    """
    require_connected(g)
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    _check_noisy(g, cfg, order)
    L = laplacian(g)
    n, T, dt = g.n, cfg.trials, cfg.dt
    sq = math.sqrt(dt)
    rngs = [trial_rng(cfg.seed, t) for t in range(T)]
    X = np.zeros((T, n))
    Y = np.zeros((T, n))
    acc = np.zeros(T)
    count = 0
    step = 0
    while step < cfg.steps:
        c = min(_CHUNK, cfg.steps - step)
        noise = np.stack([rng.standard_normal((c, n)) for rng in rngs], axis=1)
        for j in range(c):
            if order == 1:
                X = X - dt * (X @ L) + sq * noise[j]
            else:
                X, Y = X + dt * Y, Y - dt * ((X + Y) @ L) + sq * noise[j]
            step += 1
            if step > cfg.burn_in:
                dev = X - X.mean(axis=1, keepdims=True)
                acc += np.einsum("ij,ij->i", dev, dev) / n
                count += 1
    return acc / count


def _estimate(g: Graph, cfg: SimConfig, order: int) -> tuple[float, float]:
    means = noisy_trial_means(g, cfg, order)
    est = float(np.mean(means))
    err = float(np.std(means, ddof=1) / math.sqrt(len(means))) if len(means) > 1 else float("nan")
    return est, err


def estimate_h1(g: Graph, cfg: SimConfig) -> tuple[float, float]:
    """Monte Carlo first-order coherence ``(estimate, stderr)``."""
    return _estimate(g, cfg, 1)


def estimate_h2(g: Graph, cfg: SimConfig) -> tuple[float, float]:
    """Monte Carlo second-order coherence ``(estimate, stderr)``; variance of X only."""
    return _estimate(g, cfg, 2)


def default_noisy_config(
    g: Graph,
    order: int = 1,
    *,
    trials: int = 200,
    seed: int = 0,
    horizon: float | None = None,
    dt: float | None = None,
) -> SimConfig:
    """``dt = 0.1/lambda_N``, burn-in ``20/lambda_2`` time units, then ``horizon`` of sampling."""
    ext = extremes(numeric_spectrum(g))
    dt = 0.1 / ext.lambdaN if dt is None else dt
    burn = math.ceil(20.0 / ext.lambda2 / dt)
    horizon = 100.0 / ext.lambda2 if horizon is None else horizon
    return SimConfig(dt=dt, steps=burn + math.ceil(horizon / dt), burn_in=burn, trials=trials, seed=seed)


def noisy_pass(estimate: float, stderr: float, target: float, rel: float = 0.15) -> bool:
    tol = max(3 * stderr if math.isfinite(stderr) else 0.0, rel * abs(target))
    return abs(estimate - target) <= tol
