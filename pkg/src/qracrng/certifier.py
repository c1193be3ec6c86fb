"""Certified min-entropy as a function of the observed witness value.

The adversary picks any qubit strategy (pure states, projective measurements)
whose witness equals the observed ``t_target`` and tries to make one outcome as
predictable as possible. The supremum of that largest outcome probability,
``p_guess``, bounds the randomness of every compatible device:
``h_min = -log2(p_guess)``.

Search layout. Each candidate position (a*, y*, b*) of the largest entry is
optimized separately. Gauge: measurement 1 is fixed to +z and measurement 2
to the xz half-plane. All states other than a* enter only through T, and for
fixed measurements each contributes ``s_a . v_a / 2`` anywhere in
``[-|v_a|, |v_a|] / 2``. They are profiled out in closed form, leaving the
measurement angles and the two angles of state a* as search variables. The
constraint becomes ``T_reach >= t_target`` with

    T_reach = (s* . v_{a*} + sum_{a != a*} |v_a|) / 2

and any slack is removed afterwards by rotating the other states, so the
reported witness strategy hits ``t_target`` exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ._seeding import derive_seed
from .bloch import DomainError
from .classical import classical_max_T
from .seesaw import quantum_max_T
from .strategy import (
    Strategy,
    check_n,
    probability_table,
    sign_matrix,
    witness_T,
    witness_range,
)

logger = logging.getLogger(__name__)

MAX_CERTIFIER_N = 5
POLISH_TOP = 6
POSITIVITY_MARGIN = 1e-4
THRESHOLD_WIDTH = 1e-3


@dataclass(frozen=True)
class CertifierConfig:
    starts: int = 200
    constraint_tol: float = 1e-6
    penalty_schedule: tuple[float, ...] = (1e1, 1e2, 1e3, 1e4, 1e5)
    local_step_tol: float = 1e-9
    max_iters_per_weight: int = 200
    seed: int = 0
    exploit_symmetry: bool = True

    def __post_init__(self):
        sched = tuple(float(w) for w in self.penalty_schedule)
        object.__setattr__(self, "penalty_schedule", sched)
        if self.starts < 1 or self.max_iters_per_weight < 1:
            raise DomainError("starts and max_iters_per_weight must be positive")
        if not sched or any(w <= 0 for w in sched) or any(
            b <= a for a, b in zip(sched, sched[1:])
        ):
            raise DomainError("penalty_schedule must be positive and strictly increasing")
        if not 0 < self.constraint_tol <= 1e-6:
            raise DomainError("constraint_tol must lie in (0, 1e-6]")
        if not self.local_step_tol > 0:
            raise DomainError("local_step_tol must be positive")


@dataclass(frozen=True)
class EntropyPoint:
    n: int
    t_target: float
    p_guess: float | None
    h_min: float | None
    feasible: bool
    witness_strategy: Strategy | None = field(repr=False)
    constraint_residual: float
    candidate: tuple[int, int, int] | None = None
    start_index: int | None = None


@dataclass(frozen=True)
class _Candidate:
    """Largest entry sought at P(b | a, y); ``y`` is zero-based."""

    a: int
    y: int
    b: int


def candidate_positions(n: int, exploit_symmetry: bool) -> list[_Candidate]:
    if not exploit_symmetry:
        return [_Candidate(a, y, b) for a in range(2**n) for y in range(n) for b in (0, 1)]
    # Permuting measurements moves y* to the first slot; flipping bit y' of
    # every input while swapping outcome labels of measurement y' preserves T
    # and maps (a*, y*=1, b*) onto a* in {0, 10..0} with b* = 0.
    reps = [_Candidate(0, 0, 0)]
    if n > 1:
        reps.append(_Candidate(2 ** (n - 1), 0, 0))
    return reps


def n_search_params(n: int) -> int:
    return 2 * n - 1 if n > 1 else 2


def _sphere(polar, azimuth):
    s = np.sin(polar)
    return np.stack([s * np.cos(azimuth), s * np.sin(azimuth), np.cos(polar)], axis=-1)


def measurement_vectors(X: np.ndarray, n: int) -> np.ndarray:
    """(B, k) parameters -> (B, n, 3) gauge-fixed measurement Bloch vectors."""
    B = X.shape[0]
    m = np.empty((B, n, 3))
    m[:, 0] = (0.0, 0.0, 1.0)
    if n > 1:
        m[:, 1] = _sphere(X[:, 0], np.zeros(B))
        for j in range(2, n):
            m[:, j] = _sphere(X[:, 2 * j - 3], X[:, 2 * j - 2])
    return m


def target_state_vectors(X: np.ndarray) -> np.ndarray:
    return _sphere(X[:, -2], X[:, -1])


def _evaluate(X: np.ndarray, n: int, cand: _Candidate):
    """Return (gain, t_reach) for a batch; p = (1 + gain) / 2."""
    m = measurement_vectors(X, n)
    s = target_state_vectors(X)
    v = np.einsum("ay,byk->bak", sign_matrix(n), m)
    r = np.linalg.norm(v, axis=2)
    target = m[:, cand.y] * (1.0 if cand.b == 0 else -1.0)
    gain = np.einsum("bk,bk->b", s, target)
    t_reach = 0.5 * (np.einsum("bk,bk->b", s, v[:, cand.a]) + r.sum(axis=1) - r[:, cand.a])
    return gain, t_reach


def _pattern_search(fun, X, step0, step_tol, max_sweeps):
    """Batched coordinate search with per-start adaptive step length."""
    X = X.copy()
    B, k = X.shape
    F = fun(X)
    step = np.full(B, step0)
    rows = np.arange(B)
    for _ in range(max_sweeps):
        active = step >= step_tol
        if not active.any():
            break
        improved = np.zeros(B, dtype=bool)
        for j in range(k):
            for sgn in (1.0, -1.0):
                Xt = X.copy()
                Xt[rows, j] += sgn * step * active
                Ft = fun(Xt)
                better = active & (Ft > F)
                X[better] = Xt[better]
                F[better] = Ft[better]
                improved |= better
        step = np.where(improved, np.minimum(step * 1.5, 1.0), step * 0.5)
    return X, F


def _polish(x0: np.ndarray, n: int, cand: _Candidate, t_eff: float):
    """Constrained local refinement: max gain subject to t_reach >= t_eff."""

    def neg_gain(x):
        return -_evaluate(x[None, :], n, cand)[0][0]

    def slack(x):
        return _evaluate(x[None, :], n, cand)[1][0] - t_eff

    res = minimize(
        neg_gain,
        x0,
        method="SLSQP",
        constraints=[{"type": "ineq", "fun": slack}],
        options={"ftol": 1e-15, "maxiter": 500},
    )
    return res.x


def _repair(x: np.ndarray, n: int, cand: _Candidate, t_eff: float) -> np.ndarray:
    """Tilt state a* toward v_{a*} just enough to close a residual T deficit."""
    if _evaluate(x[None, :], n, cand)[1][0] >= t_eff:
        return x
    X = x[None, :]
    s0 = target_state_vectors(X)[0]
    v = (sign_matrix(n) @ measurement_vectors(X, n)[0])[cand.a]
    norm = np.linalg.norm(v)
    if norm < 1e-12:
        return x

    def with_state(lam):
        s = (1.0 - lam) * s0 + lam * v / norm
        y = x.copy()
        y[-2] = math.acos(max(-1.0, min(1.0, s[2] / np.linalg.norm(s))))
        y[-1] = math.atan2(s[1], s[0])
        return y

    lo, hi = 0.0, 1.0
    if _evaluate(with_state(hi)[None, :], n, cand)[1][0] < t_eff:
        return with_state(hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _evaluate(with_state(mid)[None, :], n, cand)[1][0] >= t_eff:
            hi = mid
        else:
            lo = mid
    return with_state(hi)


def _perpendicular(u: np.ndarray) -> np.ndarray:
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(u)))] = 1.0
    w = np.cross(u, axis)
    return w / np.linalg.norm(w)


def reconstruct_strategy(x: np.ndarray, n: int, cand: _Candidate, t_target: float) -> Strategy:
    """Full strategy for search point ``x`` with witness as close to ``t_target`` as possible."""
    X = x[None, :]
    m = measurement_vectors(X, n)[0]
    s_star = target_state_vectors(X)[0]
    v = sign_matrix(n) @ m
    r = np.linalg.norm(v, axis=1)
    others = np.arange(2**n) != cand.a
    dirs = np.tile(s_star, (2**n, 1))
    ok = r > 1e-12
    dirs[ok] = v[ok] / r[ok, None]
    states = dirs.copy()
    states[cand.a] = s_star
    excess = 0.5 * (s_star @ v[cand.a] + r[others].sum()) - t_target
    budget = r[others].sum()
    if excess > 0 and budget > 0:
        kappa = max(-1.0, 1.0 - 2.0 * excess / budget)
        lift = math.sqrt(max(0.0, 1.0 - kappa * kappa))
        for a in np.flatnonzero(others & ok):
            states[a] = kappa * dirs[a] + lift * _perpendicular(dirs[a])
    return Strategy.from_bloch(n, states, m)


def _flip_outcomes(strategy: Strategy) -> Strategy:
    """Swap every measurement's outcome labels; negates T, keeps max probability."""
    return Strategy.from_bloch(strategy.n, strategy.state_vectors, -strategy.measurement_vectors)


def _search_candidate(n: int, cand: _Candidate, t_eff: float, config: CertifierConfig, rng):
    k = n_search_params(n)
    X = rng.uniform(0.0, 2.0 * np.pi, size=(config.starts, k))
    for weight in config.penalty_schedule:
        def penalized(Z, w=weight):
            gain, reach = _evaluate(Z, n, cand)
            deficit = np.maximum(0.0, t_eff - reach)
            return gain - w * deficit**2

        X, F = _pattern_search(
            penalized, X, 0.5 if weight == config.penalty_schedule[0] else 0.05,
            config.local_step_tol, config.max_iters_per_weight,
        )
    order = np.argsort(-F, kind="stable")[:POLISH_TOP]
    out = []
    for i in order:
        out.append((int(i), _repair(X[i], n, cand, t_eff)))
        out.append((int(i), _repair(_polish(X[i], n, cand, t_eff), n, cand, t_eff)))
    return out


def _infeasible(n, t_target, residual):
    return EntropyPoint(n, t_target, None, None, False, None, residual)


def guessing_probability(n: int, t_target: float, config: CertifierConfig | None = None) -> EntropyPoint:
    """Worst-case guessing probability over qubit strategies with witness ``t_target``."""
    n = check_n(n, upper=MAX_CERTIFIER_N)
    config = config or CertifierConfig()
    t_target = float(t_target)
    if not math.isfinite(t_target) or abs(t_target) > witness_range(n):
        raise DomainError(f"t_target {t_target} outside [-{witness_range(n)}, {witness_range(n)}]")
    t_abs = abs(t_target)
    t_q = quantum_max_T(n)
    if t_abs > t_q + config.constraint_tol:
        logger.info("t=%.9f exceeds qubit maximum %.9f for n=%d", t_target, t_q, n)
        return _infeasible(n, t_target, t_abs - t_q)
    t_eff = min(t_abs, t_q)

    best = None  # (p_guess, -cand_idx, -start, strategy, residual, cand)
    for ci, cand in enumerate(candidate_positions(n, config.exploit_symmetry)):
        rng = np.random.default_rng(derive_seed(config.seed, ci))
        for start, x in _search_candidate(n, cand, t_eff, config, rng):
            strategy = reconstruct_strategy(x, n, cand, t_abs)
            table = probability_table(strategy)
            residual = abs(witness_T(table) - t_abs)
            if residual > config.constraint_tol:
                continue
            p = table.max_probability
            key = (p, -ci, -start)
            if best is None or key > best[0]:
                best = (key, strategy, residual, cand, start)
    if best is None:
        logger.warning("no feasible point found for n=%d t=%.9f", n, t_target)
        return _infeasible(n, t_target, float("nan"))
    (p, _, _), strategy, residual, cand, start = best
    if t_target < 0:
        strategy = _flip_outcomes(strategy)
    p = probability_table(strategy).max_probability
    return EntropyPoint(
        n, t_target, p, abs(-math.log2(p)), True, strategy, residual,
        (cand.a, cand.y + 1, cand.b), start,
    )


def entropy_curve(n: int, t_min: float, t_max: float, steps: int,
                  config: CertifierConfig | None = None) -> list[EntropyPoint]:
    if steps < 2:
        raise DomainError("steps must be at least 2")
    if not t_min < t_max:
        raise DomainError("t_min must be smaller than t_max")
    grid = np.linspace(t_min, t_max, steps)
    return [guessing_probability(n, float(t), config) for t in grid]


def positivity_threshold(n: int, config: CertifierConfig | None = None) -> float:
    """Smallest witness value (to width 1e-3) certifying p_guess <= 1 - 1e-4."""
    if n not in (2, 3, 4, 5):
        raise DomainError("positivity threshold is defined for n in 2..5")
    lo = classical_max_T(n).t_max
    hi = quantum_max_T(n)

    def positive(t):
        point = guessing_probability(n, t, config)
        return point.feasible and point.p_guess <= 1.0 - POSITIVITY_MARGIN

    while hi - lo > THRESHOLD_WIDTH:
        mid = 0.5 * (lo + hi)
        if positive(mid):
            hi = mid
        else:
            lo = mid
        logger.debug("threshold bracket n=%d [%.6f, %.6f]", n, lo, hi)
    return hi
