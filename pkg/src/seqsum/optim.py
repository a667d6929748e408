"""Witness-certified search over unit balls and free parameter domains.

Sup-defined quantities are reported as lower bounds attained by an explicit
feasible witness; inf-defined quantities as upper bounds attained by an
explicit parameter choice.  The engine is a deterministic multi-start compass
search: derivative free, so it runs unchanged over every norm family here,
including the nonsmooth ones.

Determinism contract: identical inputs and budget (including the seed) give
bit-identical results.  Each restart draws from its own child generator of
np.random.SeedSequence(entropy=seed, spawn_key=(restart,)), so results do not
depend on evaluation order across restarts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "OptBudget",
    "Witnessed",
    "Ball",
    "InfeasibleSeedError",
    "free_domain",
    "concat_domain",
    "maximize_over_ball",
    "minimize_over_family",
]


class InfeasibleSeedError(ValueError):
    """A caller-supplied starting point is not in the search domain."""


@dataclass(frozen=True)
class OptBudget:
    """Search effort knobs.

    iterations counts full coordinate sweeps per restart, not objective
    evaluations.  A restart stops early once the step drops below min_step.
    """

    restarts: int = 8
    iterations: int = 300
    init_step: float = 0.5
    shrink: float = 0.5
    min_step: float = 1e-9
    seed: int = 1729

    def __post_init__(self):
        if self.restarts < 1 or self.iterations < 1:
            raise ValueError("budget needs restarts >= 1 and iterations >= 1")
        if not (0.0 < self.shrink < 1.0):
            raise ValueError("shrink must lie in (0, 1)")
        if self.init_step <= 0.0 or self.min_step <= 0.0:
            raise ValueError("steps must be positive")


@dataclass(eq=False)
class Witnessed:
    """A bound together with the point that attains it.

    bound_direction is one of "lower-of-sup", "upper-of-inf", or "exact".
    The value is always the objective recomputed at the reported witness
    (or the closed-form value when direction is "exact").
    """

    value: float
    witness: np.ndarray | None
    bound_direction: str
    converged: bool
    details: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class Ball:
    """Search domain with a feasibility projection.

    project must be idempotent and land inside the feasible set; membership
    is the ground-truth test used to certify witnesses.  to_boundary, when
    set, rescales a nonzero point onto the unit sphere of the domain and is
    only used to polish maximizers of homogeneous objectives.
    """

    dim: int
    project: Callable[[np.ndarray], np.ndarray]
    membership: Callable[[np.ndarray], bool]
    random_point: Callable[[np.random.Generator], np.ndarray]
    to_boundary: Callable[[np.ndarray], np.ndarray] | None = None
    label: str = "domain"


def free_domain(dim: int, scale: float = 1.0, label: str = "free") -> Ball:
    """Unconstrained parameter block of the given dimension."""
    return Ball(
        dim=dim,
        project=lambda v: v,
        membership=lambda v: bool(np.all(np.isfinite(v))),
        random_point=lambda rng: scale * rng.standard_normal(dim),
        label=label,
    )


def concat_domain(parts: list[Ball], label: str | None = None) -> Ball:
    """Cartesian product of domains, searched as one flat vector."""
    dims = [b.dim for b in parts]
    offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    total = int(offsets[-1])

    def split(v):
        return [v[offsets[i]: offsets[i + 1]] for i in range(len(parts))]

    def project(v):
        return np.concatenate([b.project(piece) for b, piece in zip(parts, split(v))])

    def membership(v):
        return all(b.membership(piece) for b, piece in zip(parts, split(v)))

    def random_point(rng):
        return np.concatenate([b.random_point(rng) for b in parts])

    return Ball(
        dim=total,
        project=project,
        membership=membership,
        random_point=random_point,
        label=label or "x".join(b.label for b in parts),
    )


def _check_value(v: float) -> float:
    v = float(v)
    if math.isnan(v):
        raise ValueError("objective returned NaN")
    return v


def _sweep_search(objective, domain: Ball, x0: np.ndarray, budget: OptBudget):
    """Compass search from x0.  Returns (best_x, best_f, converged, evals)."""
    x = domain.project(np.array(x0, dtype=float))
    best = _check_value(objective(x))
    step = budget.init_step
    evals = 1
    converged = False
    dim = domain.dim
    for _ in range(budget.iterations):
        moved = False
        for i in range(dim):
            for sign in (1.0, -1.0):
                cand = x.copy()
                cand[i] += sign * step
                cand = domain.project(cand)
                f = _check_value(objective(cand))
                evals += 1
                if f > best:
                    best = f
                    x = cand
                    moved = True
                    break
        if not moved:
            step *= budget.shrink
            if step < budget.min_step:
                converged = True
                break
    return x, best, converged, evals


def _run(objective, domain: Ball, budget: OptBudget | None, seeds, sign: float,
         homogeneous: bool):
    budget = budget or OptBudget()
    seeds = list(seeds or [])
    if domain.dim == 0:
        val = sign * _check_value(objective(np.zeros(0)))
        return np.zeros(0), val, True, {"evals": 1, "restarts": 0}

    def f(v):
        return sign * _check_value(objective(v))

    prepared = []
    for s in seeds:
        arr = np.asarray(s, dtype=float).ravel()
        if arr.shape != (domain.dim,) or not np.all(np.isfinite(arr)):
            raise InfeasibleSeedError(
                f"seed of shape {arr.shape} unusable for {domain.label} (dim {domain.dim})"
            )
        if not domain.membership(arr):
            raise InfeasibleSeedError(f"seed fails membership in {domain.label}")
        # projection only cleans up float drift; feasibility was checked raw so
        # the seed-domination guarantee refers to the caller's point
        prepared.append(domain.project(arr))

    best_x, best_f = None, -math.inf
    total_evals = 0
    any_converged = False
    # every seed is scored as-is up front, so the final value can never fall
    # below the best seed even if every restart wanders off
    for arr in prepared:
        val = f(arr)
        total_evals += 1
        if val > best_f:
            best_f, best_x = val, arr

    for r in range(budget.restarts):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=budget.seed, spawn_key=(r,))
        )
        if r < len(prepared):
            x0 = prepared[r]
        else:
            x0 = domain.project(np.asarray(domain.random_point(rng), dtype=float))
        x, val, conv, ev = _sweep_search(f, domain, x0, budget)
        total_evals += ev
        any_converged = any_converged or conv
        if val > best_f:
            best_f, best_x = val, x

    if homogeneous and domain.to_boundary is not None and best_x is not None:
        xb = domain.to_boundary(best_x)
        if np.all(np.isfinite(xb)) and domain.membership(xb):
            vb = f(xb)
            total_evals += 1
            if vb >= best_f:
                best_f, best_x = vb, xb

    if best_x is None:
        raise RuntimeError("search produced no candidate point")
    # recompute at the reported witness so value and witness always agree
    best_f = f(best_x)
    return best_x, best_f, any_converged, {
        "evals": total_evals,
        "restarts": budget.restarts,
        "domain": domain.label,
    }


def maximize_over_ball(objective, domain: Ball, budget: OptBudget | None = None,
                       seeds=None, homogeneous: bool = False) -> Witnessed:
    """Witnessed lower bound of sup { objective(x) : x in domain }.

    The witness is feasible by construction, so the reported value is sound.
    Optional seeds are scored directly and also used as restart origins; a
    seed that fails membership raises InfeasibleSeedError rather than being
    silently dropped.
    """
    x, val, conv, det = _run(objective, domain, budget, seeds, sign=1.0,
                             homogeneous=homogeneous)
    return Witnessed(value=val, witness=x, bound_direction="lower-of-sup",
                     converged=conv, details=det)


def minimize_over_family(objective, domain: Ball, budget: OptBudget | None = None,
                         seeds=None) -> Witnessed:
    """Witnessed upper bound of inf { objective(x) : x in domain }."""
    x, val, conv, det = _run(objective, domain, budget, seeds, sign=-1.0,
                             homogeneous=False)
    return Witnessed(value=-val, witness=x, bound_direction="upper-of-inf",
                     converged=conv, details=det)
