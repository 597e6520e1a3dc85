"""No-U-Turn sampler over R^n with a diagonal metric.

Multinomial state selection: each leapfrog state enters the trajectory with
log-weight -(H - H0); subtrees are merged by sampling proportional to total
weight, and the top-level doubling uses biased progressive sampling. The
doubling stops on a velocity-based U-turn between trajectory endpoints, on
divergence (energy error above ``DELTA_MAX``), or once the subtree depth
exceeds ``max_tree_depth`` (depth 0 degenerates to a single leapfrog step).

Warmup follows the usual three-phase schedule: an initial step-size-only
buffer, expanding diagonal-mass windows (dual averaging restarts after each
mass update), and a terminal step-size buffer. After warmup the step size is
frozen at the dual-averaging average.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import FitError

DELTA_MAX = 1000.0

LogDensityAndGrad = Callable[[np.ndarray], tuple[float, np.ndarray]]


@dataclass(frozen=True)
class McmcConfig:
    chains: int = 4
    warmup_draws: int = 1000
    kept_draws: int = 1000
    target_accept: float = 0.8
    max_tree_depth: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.chains < 1:
            raise ValueError("chains must be >= 1")
        if self.warmup_draws < 0 or self.kept_draws < 1:
            raise ValueError("draw counts must be positive")
        if not 0.0 < self.target_accept < 1.0:
            raise ValueError("target_accept must lie in (0, 1)")
        if self.max_tree_depth < 0:
            raise ValueError("max_tree_depth must be >= 0")


@dataclass
class NutsResult:
    draws: np.ndarray  # (chains, kept, dim)
    divergences: np.ndarray  # (chains,) post-warmup counts
    step_sizes: np.ndarray  # (chains,)
    inv_mass_diag: np.ndarray  # (chains, dim): adapted position variances
    accept_stat: np.ndarray  # (chains, kept)
    tree_depth: np.ndarray  # (chains, kept) int
    n_leapfrog: np.ndarray  # (chains, kept) int


class _DualAveraging:
    """Nesterov dual averaging of log step size toward a target acceptance."""

    def __init__(self, eps0: float, gamma=0.05, t0=10.0, kappa=0.75):
        self.mu = math.log(10.0 * eps0)
        self.log_eps = math.log(eps0)
        self.log_eps_bar = 0.0
        self.h_bar = 0.0
        self.t = 0
        self.gamma, self.t0, self.kappa = gamma, t0, kappa

    def update(self, accept_stat: float, target: float) -> float:
        self.t += 1
        eta = 1.0 / (self.t + self.t0)
        self.h_bar = (1.0 - eta) * self.h_bar + eta * (target - accept_stat)
        self.log_eps = self.mu - math.sqrt(self.t) / self.gamma * self.h_bar
        w = self.t ** (-self.kappa)
        self.log_eps_bar = w * self.log_eps + (1.0 - w) * self.log_eps_bar
        return math.exp(self.log_eps)

    def final(self) -> float:
        return math.exp(self.log_eps_bar)


def warmup_window_spans(num_warmup: int, init_buffer=75, term_buffer=50, base_window=25):
    """Mass-estimation spans [(start, end), ...] over 0-based warmup indices.

    The initial ``init_buffer`` and final ``term_buffer`` iterations adapt the
    step size only; between them the windows double in width, and the mass
    matrix is re-estimated at the end of each span. Short warmups shrink the
    buffers proportionally; warmups under 20 iterations adapt step size only.
    """
    if num_warmup < 20:
        return []
    if num_warmup < init_buffer + term_buffer + base_window:
        init_buffer = int(0.15 * num_warmup)
        term_buffer = int(0.10 * num_warmup)
        base_window = num_warmup - init_buffer - term_buffer
    spans = []
    start = init_buffer
    window = base_window
    last = num_warmup - term_buffer
    while start + window < last:
        spans.append((start, start + window))
        start += window
        window *= 2
    spans.append((start, last))
    return spans


class _RunningVariance:
    def __init__(self, dim: int):
        self.n = 0
        self.mean = np.zeros(dim)
        self.m2 = np.zeros(dim)

    def update(self, x: np.ndarray):
        self.n += 1
        delta = x - self.mean
        self.mean += delta / self.n
        self.m2 += delta * (x - self.mean)

    def regularized(self) -> np.ndarray:
        if self.n < 2:
            return np.ones_like(self.mean)
        var = self.m2 / (self.n - 1)
        w = self.n / (self.n + 5.0)
        return w * var + (1.0 - w) * 1e-3


def _kinetic(p: np.ndarray, inv_mass: np.ndarray) -> float:
    # Extreme momenta during warmup exploration may overflow to inf, which
    # the tree builder treats as a divergence.
    with np.errstate(over="ignore", invalid="ignore"):
        return 0.5 * float(p @ (p * inv_mass))


def leapfrog(fn: LogDensityAndGrad, q, p, grad, eps, inv_mass):
    """One leapfrog step of size eps; returns (q', p', grad', logp')."""
    with np.errstate(over="ignore", invalid="ignore"):
        p_half = p + 0.5 * eps * grad
        q_new = q + eps * (p_half * inv_mass)
        logp_new, grad_new = fn(q_new)
        p_new = p_half + 0.5 * eps * grad_new
    return q_new, p_new, grad_new, logp_new


def find_reasonable_epsilon(fn, q, inv_mass, rng, target=0.5) -> float:
    """Double/halve the step size until the one-step acceptance crosses target."""
    eps = 1.0
    logp, grad = fn(q)
    p0 = rng.standard_normal(q.shape[0]) / np.sqrt(inv_mass)
    h0 = -logp + _kinetic(p0, inv_mass)

    def log_accept(e):
        _, p1, _, logp1 = leapfrog(fn, q, p0, grad, e, inv_mass)
        h1 = -logp1 + _kinetic(p1, inv_mass) if math.isfinite(logp1) else math.inf
        if not math.isfinite(h1):
            return -math.inf
        return min(0.0, h0 - h1)

    log_target = math.log(target)
    direction = 1.0 if log_accept(eps) > log_target else -1.0
    for _ in range(100):
        eps_next = eps * (2.0**direction)
        if not 1e-10 < eps_next < 1e4:
            break
        crossed = (log_accept(eps_next) <= log_target) == (direction > 0)
        if crossed:
            if direction < 0:
                eps = eps_next
            break
        eps = eps_next
    return eps


class _Tree:
    """One subtree: endpoints, multinomial proposal, and bookkeeping."""

    __slots__ = (
        "q_minus", "p_minus", "grad_minus",
        "q_plus", "p_plus", "grad_plus",
        "proposal", "proposal_logp", "proposal_grad", "log_weight",
        "turning", "diverging", "alpha_sum", "n_alpha", "n_leapfrog",
    )


def _leaf(fn, q, p, grad, eps, v, inv_mass, h0) -> _Tree:
    q1, p1, g1, logp1 = leapfrog(fn, q, p, grad, v * eps, inv_mass)
    h1 = -logp1 + _kinetic(p1, inv_mass) if math.isfinite(logp1) else math.inf
    energy_error = h1 - h0
    t = _Tree()
    t.q_minus = t.q_plus = t.proposal = q1
    t.p_minus = t.p_plus = p1
    t.grad_minus = t.grad_plus = t.proposal_grad = g1
    t.proposal_logp = logp1
    t.diverging = not math.isfinite(energy_error) or energy_error > DELTA_MAX
    t.turning = False
    t.log_weight = -energy_error if not t.diverging else -math.inf
    t.alpha_sum = math.exp(min(0.0, -energy_error)) if math.isfinite(energy_error) else 0.0
    t.n_alpha = 1
    t.n_leapfrog = 1
    return t


def _is_uturn(q_minus, q_plus, p_minus, p_plus, inv_mass) -> bool:
    dq = q_plus - q_minus
    return bool(dq @ (inv_mass * p_minus) < 0.0 or dq @ (inv_mass * p_plus) < 0.0)


def _build_tree(fn, q, p, grad, depth, eps, v, inv_mass, h0, rng) -> _Tree:
    if depth == 0:
        return _leaf(fn, q, p, grad, eps, v, inv_mass, h0)
    first = _build_tree(fn, q, p, grad, depth - 1, eps, v, inv_mass, h0, rng)
    if first.turning or first.diverging:
        return first
    if v > 0:
        second = _build_tree(
            fn, first.q_plus, first.p_plus, first.grad_plus,
            depth - 1, eps, v, inv_mass, h0, rng,
        )
        first.q_plus = second.q_plus
        first.p_plus = second.p_plus
        first.grad_plus = second.grad_plus
    else:
        second = _build_tree(
            fn, first.q_minus, first.p_minus, first.grad_minus,
            depth - 1, eps, v, inv_mass, h0, rng,
        )
        first.q_minus = second.q_minus
        first.p_minus = second.p_minus
        first.grad_minus = second.grad_minus

    total = np.logaddexp(first.log_weight, second.log_weight)
    if math.isfinite(second.log_weight) and math.log(rng.random()) < (
        second.log_weight - total
    ):
        first.proposal = second.proposal
        first.proposal_logp = second.proposal_logp
        first.proposal_grad = second.proposal_grad
    first.log_weight = total
    first.alpha_sum += second.alpha_sum
    first.n_alpha += second.n_alpha
    first.n_leapfrog += second.n_leapfrog
    first.diverging = second.diverging
    first.turning = second.turning or _is_uturn(
        first.q_minus, first.q_plus, first.p_minus, first.p_plus, inv_mass
    )
    return first


def nuts_transition(fn, q0, logp0, grad0, eps, inv_mass, max_tree_depth, rng):
    """One NUTS draw.

    Returns (q, logp, grad, accept_stat, depth, n_leapfrog, divergent). The
    trajectory starts as the single current state and is doubled with
    subtrees of depth 0, 1, ... until a stop condition fires, so
    ``max_tree_depth = 0`` yields exactly one leapfrog step.
    """
    dim = q0.shape[0]
    p0 = rng.standard_normal(dim) / np.sqrt(inv_mass)
    h0 = -logp0 + _kinetic(p0, inv_mass)

    q_minus = q_plus = q0
    p_minus = p_plus = p0
    grad_minus = grad_plus = grad0
    proposal, proposal_logp, proposal_grad = q0, logp0, grad0
    log_weight = 0.0  # the initial state has zero energy error
    alpha_sum, n_alpha, n_leapfrog = 0.0, 0, 0
    divergent = False
    depth = 0

    while True:
        v = 1 if rng.random() < 0.5 else -1
        if v > 0:
            tree = _build_tree(
                fn, q_plus, p_plus, grad_plus, depth, eps, v, inv_mass, h0, rng
            )
            q_plus, p_plus, grad_plus = tree.q_plus, tree.p_plus, tree.grad_plus
        else:
            tree = _build_tree(
                fn, q_minus, p_minus, grad_minus, depth, eps, v, inv_mass, h0, rng
            )
            q_minus, p_minus, grad_minus = tree.q_minus, tree.p_minus, tree.grad_minus

        alpha_sum += tree.alpha_sum
        n_alpha += tree.n_alpha
        n_leapfrog += tree.n_leapfrog
        divergent = divergent or tree.diverging

        if tree.diverging or tree.turning:
            break
        # Biased progressive sampling: favor the newly built half.
        if math.log(rng.random()) < tree.log_weight - log_weight:
            proposal = tree.proposal
            proposal_logp = tree.proposal_logp
            proposal_grad = tree.proposal_grad
        log_weight = np.logaddexp(log_weight, tree.log_weight)
        depth += 1
        if depth > max_tree_depth:
            break
        if _is_uturn(q_minus, q_plus, p_minus, p_plus, inv_mass):
            break

    accept_stat = alpha_sum / max(n_alpha, 1)
    return proposal, proposal_logp, proposal_grad, accept_stat, depth, n_leapfrog, divergent


def nuts_sample(fn: LogDensityAndGrad, init: np.ndarray, cfg: McmcConfig) -> NutsResult:
    """Sample ``cfg.kept_draws`` per chain after warmup adaptation.

    ``init`` has shape (dim,), shared across chains, or (chains, dim).
    Chains run sequentially with independent seed streams, so results are
    deterministic given ``cfg.seed``.
    """
    init = np.atleast_2d(np.asarray(init, dtype=float))
    if init.shape[0] == 1 and cfg.chains > 1:
        init = np.repeat(init, cfg.chains, axis=0)
    if init.shape[0] != cfg.chains:
        raise ValueError(f"init must provide {cfg.chains} chain starts")
    dim = init.shape[1]

    draws = np.empty((cfg.chains, cfg.kept_draws, dim))
    divergences = np.zeros(cfg.chains, dtype=int)
    step_sizes = np.empty(cfg.chains)
    mass_out = np.empty((cfg.chains, dim))
    accept_out = np.empty((cfg.chains, cfg.kept_draws))
    depth_out = np.empty((cfg.chains, cfg.kept_draws), dtype=int)
    leapfrog_out = np.empty((cfg.chains, cfg.kept_draws), dtype=int)

    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.chains)
    spans = warmup_window_spans(cfg.warmup_draws)

    for chain in range(cfg.chains):
        rng = np.random.Generator(np.random.PCG64(seeds[chain]))
        q = init[chain].copy()
        logp, grad = fn(q)
        if not math.isfinite(logp):
            raise FitError(f"log density not finite at chain {chain} init")

        inv_mass = np.ones(dim)
        eps = find_reasonable_epsilon(fn, q, inv_mass, rng)
        da = _DualAveraging(eps)
        welford = _RunningVariance(dim)
        span_idx = 0
        warmup_divergent = 0

        for it in range(cfg.warmup_draws):
            q, logp, grad, astat, _, _, div = nuts_transition(
                fn, q, logp, grad, eps, inv_mass, cfg.max_tree_depth, rng
            )
            warmup_divergent += int(div)
            eps = da.update(astat, cfg.target_accept)
            if span_idx < len(spans) and spans[span_idx][0] <= it:
                welford.update(q)
                if it + 1 == spans[span_idx][1]:
                    inv_mass = welford.regularized()
                    welford = _RunningVariance(dim)
                    span_idx += 1
                    eps = find_reasonable_epsilon(fn, q, inv_mass, rng)
                    da = _DualAveraging(eps)
        if cfg.warmup_draws > 0:
            if warmup_divergent >= cfg.warmup_draws:
                raise FitError(
                    f"chain {chain}: every warmup transition diverged",
                    diagnostics={"warmup_divergences": warmup_divergent},
                )
            eps = da.final()

        for it in range(cfg.kept_draws):
            q, logp, grad, astat, depth, nlf, div = nuts_transition(
                fn, q, logp, grad, eps, inv_mass, cfg.max_tree_depth, rng
            )
            draws[chain, it] = q
            accept_out[chain, it] = astat
            depth_out[chain, it] = depth
            leapfrog_out[chain, it] = nlf
            divergences[chain] += int(div)

        step_sizes[chain] = eps
        mass_out[chain] = inv_mass

    return NutsResult(
        draws=draws,
        divergences=divergences,
        step_sizes=step_sizes,
        inv_mass_diag=mass_out,
        accept_stat=accept_out,
        tree_depth=depth_out,
        n_leapfrog=leapfrog_out,
    )
