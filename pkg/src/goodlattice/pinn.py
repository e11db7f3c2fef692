"""
Small physics-informed solver for the s-dimensional Poisson problem.

The problem is Delta(u) + f = 0 on [0, 1]^s with zero Dirichlet boundary,
forcing f(x) = prod_k sin(k*pi*x_k), and exact solution
prod_k sin(k*pi*x_k) / (s*k^2*pi^2).  A tanh network's output is
multiplied by the boundary mask prod_k x_k*(1 - x_k), so the boundary
condition holds for any weights and the squared residual (the training
loss integrand) vanishes on the cube faces, which keeps it periodic.

Derivatives of the network are exact, never finite differences: each
input axis is propagated forward as a second-order jet (value, first,
and second derivative along that axis), and parameter gradients of the
loss come from reverse accumulation through the jet computation.  The
training loss is therefore a pure equal-weight quadrature of the squared
residual over the collocation batch, which is exactly the quantity the
sampler comparison is about.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

import numpy as np

from .rng import derive_seed, stream
from .samplers import SampleBatch, SamplerKind, sample

__all__ = [
    "MlpState",
    "SecondOrderJet",
    "PoissonProblem",
    "TrainConfig",
    "Checkpoint",
    "TrainReport",
    "init_mlp",
    "evaluate_jet",
    "masked_output",
    "masked_value",
    "residual",
    "physics_informed_loss",
    "loss_gradient",
    "train",
    "relative_error",
    "evaluation_grid",
    "poisson_residual_surrogate",
]


@dataclass
class MlpState:
    """Dense tanh network: weight matrices (in x out) and bias vectors."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def widths(self) -> tuple[int, ...]:
        return (self.weights[0].shape[0],) + tuple(w.shape[1] for w in self.weights)

    def copy(self) -> "MlpState":
        return MlpState(weights=[w.copy() for w in self.weights],
                        biases=[b.copy() for b in self.biases])


def init_mlp(widths, seed: int) -> MlpState:
    """Network with layer sizes ``widths``; weights uniform in
    +-1/sqrt(fan_in), biases zero."""
    widths = [int(w) for w in widths]
    if len(widths) < 2:
        raise ValueError("need at least an input and an output width")
    rng = stream(seed, "init")
    weights, biases = [], []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        bound = 1.0 / math.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpState(weights=weights, biases=biases)


@dataclass(frozen=True)
class SecondOrderJet:
    """Values with per-axis first and pure second derivatives.

    ``value`` has shape (n,), ``grad`` and ``second`` shape (n, s) where
    ``second[:, a]`` is the second derivative along axis a alone.
    """

    value: np.ndarray
    grad: np.ndarray
    second: np.ndarray

    @property
    def laplacian(self) -> np.ndarray:
        return self.second.sum(axis=1)


@dataclass(frozen=True)
class PoissonProblem:
    """Poisson problem Delta(u) + f = 0 with product-of-sines forcing."""

    s: int
    k: int = 2

    def __post_init__(self):
        if self.s < 1 or self.k < 1:
            raise ValueError("need s >= 1 and k >= 1")

    def forcing(self, x: np.ndarray) -> np.ndarray:
        """f(x) = prod_k sin(k*pi*x_k)."""
        return np.prod(np.sin(self.k * np.pi * np.asarray(x)), axis=-1)

    def exact_solution(self, x: np.ndarray) -> np.ndarray:
        """u(x) = prod_k sin(k*pi*x_k) / (s*k^2*pi^2), so Delta(u) = -f."""
        return self.forcing(x) / (self.s * (self.k * np.pi) ** 2)

    def exact_solution_jet(self, x: np.ndarray) -> SecondOrderJet:
        """Analytic value, gradient, and per-axis second derivatives of u."""
        x = np.asarray(x, dtype=np.float64)
        kp = self.k * np.pi
        sin, cos = np.sin(kp * x), np.cos(kp * x)
        scale = 1.0 / (self.s * kp**2)
        value = np.prod(sin, axis=1) * scale
        others = _leave_one_out_product(sin)
        grad = kp * cos * others * scale
        second = -(kp**2) * scale * sin * others
        return SecondOrderJet(value=value, grad=grad, second=second)


def _leave_one_out_product(v: np.ndarray) -> np.ndarray:
    """out[:, a] = prod over l != a of v[:, l], zero-safe."""
    n, s = v.shape
    left = np.ones((n, s))
    right = np.ones((n, s))
    for a in range(1, s):
        left[:, a] = left[:, a - 1] * v[:, a - 1]
        right[:, s - 1 - a] = right[:, s - a] * v[:, s - a]
    return left * right


def _tanh_gains(t: np.ndarray):
    g1 = 1.0 - t * t           # tanh'
    g2 = -2.0 * t * g1         # tanh''
    return g1, g2


def _forward_value(net: MlpState, x: np.ndarray):
    """Shared value pass; returns per-layer inputs, activations, and gains."""
    L = len(net.weights)
    hs, g1s, g2s = [x], [], []
    h = x
    for l in range(L):
        p = h @ net.weights[l] + net.biases[l]
        if l < L - 1:
            h = np.tanh(p)
            g1, g2 = _tanh_gains(h)
            g1s.append(g1)
            g2s.append(g2)
        else:
            h = p
        hs.append(h)
    return hs, g1s, g2s


def _forward_axis(net: MlpState, g1s, g2s, axis: int, n: int, s: int):
    """Jet channels along one axis; returns per-layer (D_in, Dp, DD_in, DDp)."""
    L = len(net.weights)
    D = np.zeros((n, s))
    D[:, axis] = 1.0
    DD = np.zeros((n, s))
    trace = []
    for l in range(L):
        Dp = D @ net.weights[l]
        DDp = DD @ net.weights[l]
        trace.append((D, Dp, DD, DDp))
        if l < L - 1:
            D = g1s[l] * Dp
            DD = g1s[l] * DDp + g2s[l] * Dp * Dp
        else:
            D, DD = Dp, DDp
    return trace, D[:, 0], DD[:, 0]


def evaluate_jet(net: MlpState, x) -> SecondOrderJet:
    """Value, gradient, and per-axis second derivatives of the raw network.

    Exact forward-mode propagation, one pass per axis; no finite
    differences anywhere.  Raises on non-finite output.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    n, s = x.shape
    with np.errstate(over="ignore", invalid="ignore"):
        hs, g1s, g2s = _forward_value(net, x)
        value = hs[-1][:, 0]
        grad = np.empty((n, s))
        second = np.empty((n, s))
        for a in range(s):
            _, d, dd = _forward_axis(net, g1s, g2s, a, n, s)
            grad[:, a] = d
            second[:, a] = dd
    if not (np.all(np.isfinite(value)) and np.all(np.isfinite(grad))
            and np.all(np.isfinite(second))):
        raise FloatingPointError("network evaluation produced non-finite values")
    return SecondOrderJet(value=value, grad=grad, second=second)


def _mask_jets(x: np.ndarray):
    """Boundary mask prod x_k(1-x_k) with its per-axis first/second derivatives."""
    q = x * (1.0 - x)
    others = _leave_one_out_product(q)
    m = q[:, 0] * others[:, 0]
    md = (1.0 - 2.0 * x) * others
    mdd = -2.0 * others
    return m, md, mdd


def masked_output(net: MlpState, x) -> SecondOrderJet:
    """Jet of mask(x) * net(x); exactly zero on every boundary face."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    jet = evaluate_jet(net, x)
    m, md, mdd = _mask_jets(x)
    value = m * jet.value
    grad = md * jet.value[:, None] + m[:, None] * jet.grad
    second = (mdd * jet.value[:, None] + 2.0 * md * jet.grad
              + m[:, None] * jet.second)
    return SecondOrderJet(value=value, grad=grad, second=second)


def masked_value(net: MlpState, x) -> np.ndarray:
    """mask(x) * net(x) without derivative channels (for evaluation grids)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    hs, _, _ = _forward_value(net, x)
    return np.prod(x * (1.0 - x), axis=1) * hs[-1][:, 0]


def _batch_points(batch) -> np.ndarray:
    pts = batch.points if isinstance(batch, SampleBatch) else np.asarray(batch)
    pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
    if pts.shape[0] == 0:
        raise ValueError("empty collocation batch")
    return pts


def residual(net: MlpState, problem: PoissonProblem, x) -> np.ndarray:
    """Pointwise Delta(mask * net) + f."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    return masked_output(net, x).laplacian + problem.forcing(x)


def physics_informed_loss(net: MlpState, problem: PoissonProblem, batch) -> float:
    """Mean squared residual over the collocation batch."""
    pts = _batch_points(batch)
    r = residual(net, problem, pts)
    with np.errstate(over="ignore"):
        return float(np.mean(r * r))


def _loss_and_grad(net: MlpState, problem: PoissonProblem, pts: np.ndarray):
    """Loss and its exact parameter gradient by reverse accumulation.

    The forward jet computation is replayed per axis; the reverse sweep
    pushes the residual adjoints back through both the derivative
    channels and (via the tanh gain factors) the value channel.
    Non-finite values are left to the caller's divergence check.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        return _loss_and_grad_core(net, problem, pts)


def _loss_and_grad_core(net: MlpState, problem: PoissonProblem, pts: np.ndarray):
    n, s = pts.shape
    L = len(net.weights)
    hs, g1s, g2s = _forward_value(net, pts)
    value = hs[-1][:, 0]

    axis_traces = []
    grad_cols = np.empty((n, s))
    second_cols = np.empty((n, s))
    for a in range(s):
        trace, d, dd = _forward_axis(net, g1s, g2s, a, n, s)
        axis_traces.append(trace)
        grad_cols[:, a] = d
        second_cols[:, a] = dd

    m, md, mdd = _mask_jets(pts)
    r = (mdd.sum(axis=1) * value + 2.0 * (md * grad_cols).sum(axis=1)
         + m * second_cols.sum(axis=1) + problem.forcing(pts))
    loss = float(np.mean(r * r))

    dW = [np.zeros_like(w) for w in net.weights]
    db = [np.zeros_like(b) for b in net.biases]
    dr = 2.0 * r / n
    adj_value = dr * mdd.sum(axis=1)

    for a in range(s):
        trace = axis_traces[a]
        # output adjoints of this axis pass; the shared value channel is
        # credited to pass 0 only so it is not double counted
        dh = np.zeros((n, 1))
        if a == 0:
            dh[:, 0] = adj_value
        dD = np.zeros((n, 1))
        dD[:, 0] = dr * 2.0 * md[:, a]
        dDD = np.zeros((n, 1))
        dDD[:, 0] = dr * m
        for l in range(L - 1, -1, -1):
            if l < L - 1:
                # undo the tanh jet: t = tanh(p), D_out = g1*Dp,
                # DD_out = g1*DDp + g2*Dp^2
                g1, g2 = g1s[l], g2s[l]
                t = hs[l + 1]
                g3 = -2.0 * (g1 * g1 + t * g2)
                Dp_here = trace[l][1]
                DDp_here = trace[l][3]
                dp = dh * g1 + dD * Dp_here * g2 + dDD * (DDp_here * g2 + Dp_here**2 * g3)
                dDp = dD * g1 + dDD * 2.0 * g2 * Dp_here
                dDDp = dDD * g1
            else:
                dp, dDp, dDDp = dh, dD, dDD
            D_in, _, DD_in, _ = trace[l]
            h_in = hs[l]
            dW[l] += h_in.T @ dp + D_in.T @ dDp + DD_in.T @ dDDp
            db[l] += dp.sum(axis=0)
            dh = dp @ net.weights[l].T
            dD = dDp @ net.weights[l].T
            dDD = dDDp @ net.weights[l].T
    return loss, list(zip(dW, db))


def loss_gradient(net: MlpState, problem: PoissonProblem, batch):
    """Exact gradient of `physics_informed_loss` in parameter shapes.

    Returns one (dW, db) pair per layer.  Raises on non-finite values.
    """
    pts = _batch_points(batch)
    loss, grads = _loss_and_grad(net, problem, pts)
    if not math.isfinite(loss) or not all(
            np.all(np.isfinite(g)) and np.all(np.isfinite(b)) for g, b in grads):
        raise FloatingPointError("loss gradient diverged")
    return grads


def poisson_residual_surrogate(s: int, k: int = 2, eps: float = 0.1):
    """Loss integrand of a nearly converged solver, with exact integral.

    The trial function is the boundary-masked exact-solution shape scaled
    by (1 + eps): v = (1+eps) * prod_k x_k(1-x_k) sin(k*pi*x_k) / (s*k^2*pi^2).
    Returns (fn, exact) where fn maps an (n, s) batch to the squared
    residual (Delta v + f)^2 and ``exact`` is its integral over the unit
    cube, assembled in closed form from one-dimensional sine/polynomial
    moments of g = x(1-x)sin(k*pi*x):

        A = int g sin      = 1/12 + 1/(4 pi^2 k^2)
        B = int g'' sin    = -(pi^2 k^2/12 + 1/4)
        C = int g^2        = 1/60 + 3/(4 pi^4 k^4)
        D = int g g''      = -(pi^2 k^2/60 + 1/6 - 1/(4 pi^2 k^2))
        E = int (g'')^2    = pi^4 k^4/60 + pi^2 k^2 + 3/4

        int (Delta v + f)^2 = c^2 [s E C^(s-1) + s(s-1) D^2 C^(s-2)]
                              + 2 c s B A^(s-1) + 2^-s,   c = (1+eps)/(s k^2 pi^2)
    """
    if s < 1 or k < 1:
        raise ValueError("need s >= 1 and k >= 1")
    kp = k * np.pi
    pk2 = kp * kp
    c = (1.0 + eps) / (s * pk2)

    A = 1.0 / 12.0 + 1.0 / (4.0 * pk2)
    B = -(pk2 / 12.0 + 0.25)
    C = 1.0 / 60.0 + 3.0 / (4.0 * pk2 * pk2)
    D = -(pk2 / 60.0 + 1.0 / 6.0 - 1.0 / (4.0 * pk2))
    E = pk2 * pk2 / 60.0 + pk2 + 0.75
    cross = 0.0 if s < 2 else s * (s - 1) * D * D * C ** (s - 2)
    exact = c * c * (s * E * C ** (s - 1) + cross) + 2.0 * c * s * B * A ** (s - 1) + 0.5**s

    def fn(x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        sin, cos = np.sin(kp * x), np.cos(kp * x)
        g = x * (1.0 - x) * sin
        gpp = -pk2 * g + 2.0 * kp * (1.0 - 2.0 * x) * cos - 2.0 * sin
        others = _leave_one_out_product(g)
        lap = c * (gpp * others).sum(axis=1)
        r = lap + np.prod(sin, axis=1)
        return r * r

    return fn, float(exact)


@dataclass(frozen=True)
class TrainConfig:
    """Everything a training trial depends on.

    The step size follows a single cosine half-cycle from ``lr`` to zero
    over ``iterations`` steps.  With ``resample`` set, every iteration
    draws a fresh batch from a per-iteration sub-seed (a fresh shift for
    lattice and grid kinds, fresh points for mc and lhs; the Sobol
    sequence is deterministic and unaffected).
    """

    kind: SamplerKind
    n: int
    iterations: int
    seed: int
    lr: float = 2e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    resample: bool = True
    checkpoint_every: int = 1000
    eval_points_per_axis: int | None = None

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be nonnegative")
        if self.n < 1:
            raise ValueError("need n >= 1")
        if self.lr <= 0 or not 0 <= self.beta1 < 1 or not 0 <= self.beta2 < 1:
            raise ValueError("bad optimizer constants")
        if self.checkpoint_every < 1:
            raise ValueError("checkpoint interval must be >= 1")


@dataclass(frozen=True)
class Checkpoint:
    iteration: int
    loss: float
    rel_error: float


@dataclass(frozen=True)
class TrainReport:
    """Checkpoint history plus the trained network and the config echo."""

    checkpoints: tuple[Checkpoint, ...]
    final_loss: float
    final_rel_error: float
    diverged_at: int | None
    config: TrainConfig
    net: MlpState = field(repr=False)


def evaluation_grid(s: int, points_per_axis: int | None = None) -> np.ndarray:
    """Uniformly spaced evaluation grid including the cube faces.

    The default density scales down with dimension (201 per axis at
    s <= 2, 41 at s = 3, 21 at s >= 4) to keep the grid size sane.
    """
    if points_per_axis is None:
        points_per_axis = 201 if s <= 2 else (41 if s == 3 else 21)
    axes = [np.linspace(0.0, 1.0, points_per_axis)] * s
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def relative_error(net: MlpState, problem: PoissonProblem, grid=None) -> float:
    """Normalized error ||masked net - u|| / ||u|| on an evaluation grid."""
    pts = evaluation_grid(problem.s) if grid is None else np.atleast_2d(np.asarray(grid))
    if pts.shape[0] == 0:
        raise ValueError("empty evaluation grid")
    approx = masked_value(net, pts)
    exact = problem.exact_solution(pts)
    denom = math.sqrt(float(np.dot(exact, exact)))
    if denom == 0.0:
        raise ZeroDivisionError("exact solution vanishes on the whole grid")
    return math.sqrt(float(np.dot(approx - exact, approx - exact))) / denom


def train(problem: PoissonProblem, net_init: MlpState, config: TrainConfig) -> TrainReport:
    """Adam training of the masked network on the physics-informed loss.

    Deterministic in (net_init, config): batches come from sub-seeds
    derived from the config seed and iteration counter, and the optimizer
    is plain first/second-moment Adam with bias correction under the
    cosine step schedule.  Divergence (non-finite loss or gradient)
    aborts the trial and is reported with its iteration index; the trial
    is never retried.
    """
    net = copy.deepcopy(net_init)
    grid = evaluation_grid(problem.s, config.eval_points_per_axis)

    def make_batch(iteration: int) -> np.ndarray:
        idx = iteration if config.resample else 0
        seed = derive_seed(config.seed, "batch", idx)
        return sample(config.kind, config.n, problem.s, seed).points

    mom = [(np.zeros_like(w), np.zeros_like(b))
           for w, b in zip(net.weights, net.biases)]
    vel = [(np.zeros_like(w), np.zeros_like(b))
           for w, b in zip(net.weights, net.biases)]

    checkpoints: list[Checkpoint] = []
    diverged_at = None
    try:
        last_loss = physics_informed_loss(net, problem, make_batch(0))
    except FloatingPointError:
        last_loss = math.inf

    for t in range(config.iterations):
        pts = make_batch(t)
        loss, grads = _loss_and_grad(net, problem, pts)
        last_loss = loss
        finite = math.isfinite(loss) and all(
            np.all(np.isfinite(g)) and np.all(np.isfinite(gb)) for g, gb in grads)
        if not finite:
            diverged_at = t
            break
        eta = config.lr * 0.5 * (1.0 + math.cos(math.pi * t / config.iterations))
        b1c = 1.0 - config.beta1 ** (t + 1)
        b2c = 1.0 - config.beta2 ** (t + 1)
        for l, (gw, gb) in enumerate(grads):
            mw, mb = mom[l]
            vw, vb = vel[l]
            mw *= config.beta1
            mw += (1.0 - config.beta1) * gw
            mb *= config.beta1
            mb += (1.0 - config.beta1) * gb
            vw *= config.beta2
            vw += (1.0 - config.beta2) * gw * gw
            vb *= config.beta2
            vb += (1.0 - config.beta2) * gb * gb
            net.weights[l] -= eta * (mw / b1c) / (np.sqrt(vw / b2c) + config.adam_eps)
            net.biases[l] -= eta * (mb / b1c) / (np.sqrt(vb / b2c) + config.adam_eps)
        done = t + 1
        if done % config.checkpoint_every == 0 or done == config.iterations:
            checkpoints.append(Checkpoint(
                iteration=done, loss=loss,
                rel_error=relative_error(net, problem, grid)))

    final_rel = relative_error(net, problem, grid)
    if config.iterations == 0 or not checkpoints:
        checkpoints.append(Checkpoint(iteration=0, loss=last_loss, rel_error=final_rel))
    return TrainReport(checkpoints=tuple(checkpoints), final_loss=last_loss,
                       final_rel_error=final_rel, diverged_at=diverged_at,
                       config=config, net=net)
