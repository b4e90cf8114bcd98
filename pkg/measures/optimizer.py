from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from utils.logger import logger, _log_fields
from .measure_types import OptimizerConfig


@dataclass
class SearchOutcome:
    best_value: float
    best_x: np.ndarray
    n_restarts: int
    n_iterations: int
    converged: bool


def maximize(objective: Callable[[np.ndarray], float],
             opt: OptimizerConfig,
             rng: np.random.Generator,
             sample_start: Callable[[np.random.Generator], np.ndarray],
             identity_start: Optional[np.ndarray] = None,
             warm_starts: Sequence[np.ndarray] = (),
             label: str = "objective",
             n_restarts: Optional[int] = None) -> SearchOutcome:
    """
    Multi-start Nelder-Mead maximization.

    The identity start (when enabled) and the warm starts are searched first,
    then up to `n_restarts` (default `opt.n_restarts`) random starts drawn in
    sequence from `rng`. The best point is kept over a growing prefix of
    starts, so the result is monotone in the restart budget. With
    `opt.patience` set, the random restarts stop once that many in a row fail
    to improve the best value by more than `opt.tolerance`.
    """
    starts = [identity_start] if (opt.include_identity_start and identity_start is not None) else []
    starts += list(warm_starts)
    budget = opt.n_restarts if n_restarts is None else n_restarts
    best_value, best_x, converged = -np.inf, None, False
    n_iterations = 0
    n_searches = 0
    stale = 0

    def negated(x):
        return -objective(x)

    for k in range(len(starts) + budget):
        if opt.patience is not None and k >= len(starts) and stale >= opt.patience:
            break
        x0 = starts[k] if k < len(starts) else sample_start(rng)
        result = minimize(
            negated, x0, method="Nelder-Mead",
            options={
                "maxiter": opt.iteration_cap(x0.size),
                "xatol": opt.tolerance,
                "fatol": opt.tolerance,
                "adaptive": x0.size > 10,
            })
        n_searches += 1
        n_iterations += int(result.nit)
        value = -float(result.fun)
        stale = 0 if value > best_value + opt.tolerance else stale + 1
        if value > best_value:
            best_value, best_x, converged = value, np.asarray(result.x), bool(result.success)

    if not converged:
        logger.warning("optimizer did not converge", **_log_fields(
            criterion=label, n_restarts=n_searches, n_iterations=n_iterations, best_value=best_value))
    logger.debug("optimizer finished", **_log_fields(
        criterion=label, n_restarts=n_searches, n_iterations=n_iterations, best_value=best_value))

    return SearchOutcome(
        best_value=best_value, best_x=best_x, n_restarts=n_searches,
        n_iterations=n_iterations, converged=converged)


def minimize_from(objective: Callable[[np.ndarray], float],
                  opt: OptimizerConfig,
                  rng: np.random.Generator,
                  sample_start: Callable[[np.random.Generator], np.ndarray],
                  identity_start: Optional[np.ndarray] = None,
                  warm_starts: Sequence[np.ndarray] = (),
                  label: str = "objective",
                  n_restarts: Optional[int] = None) -> SearchOutcome:
    """Same search as `maximize`, for objectives that are minimized."""
    outcome = maximize(lambda x: -objective(x), opt, rng, sample_start,
                       identity_start, warm_starts, label, n_restarts)
    outcome.best_value = -outcome.best_value
    return outcome
