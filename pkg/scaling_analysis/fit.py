import math
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import curve_fit
from scipy.stats import linregress

from utils.logger import logger, _log_fields
from .geometry import chord_length
from .scaling_types import (
    ExcludedPoint, FitDomain, FitExclusions, FitResult, OrderingCheck, SeriesPoint, WeightedFit)


def _apply_exclusions(series: Sequence[SeriesPoint], exclusions: FitExclusions
                      ) -> tuple[list[SeriesPoint], list[ExcludedPoint]]:
    """Parity first, then explicit x, then the largest remaining x, then unusable means."""
    kept, excluded = [], []
    for p in sorted(series, key=lambda p: p.x):
        if exclusions.parity is not None and (p.x % 2 == 0) != (exclusions.parity == "even"):
            excluded.append(ExcludedPoint(x=p.x, reason="parity"))
        elif p.x in exclusions.exclude_x:
            excluded.append(ExcludedPoint(x=p.x, reason="explicit"))
        else:
            kept.append(p)
    if exclusions.exclude_last and kept:
        excluded.append(ExcludedPoint(x=kept[-1].x, reason="last"))
        kept = kept[:-1]

    usable = []
    for p in kept:
        if p.empty:
            excluded.append(ExcludedPoint(x=p.x, reason="empty"))
        elif p.mean <= 0:
            logger.warning("dropping point without positive mean from fit", **_log_fields(
                observable=p.observable, x=p.x, mean=p.mean, n_total=p.n_total))
            excluded.append(ExcludedPoint(x=p.x, reason="non_positive_mean"))
        else:
            usable.append(p)
    return usable, excluded


def _weighted(log_u: np.ndarray, log_m: np.ndarray, points: list[SeriesPoint]) -> Optional[WeightedFit]:
    sigma = np.array([p.stderr / p.mean for p in points])
    if len(points) < 3 or np.any(sigma <= 0):
        return None
    params, covariance = curve_fit(
        lambda lu, alpha, c: c - alpha * lu, log_u, log_m,
        p0=(1.0, float(log_m[0])), sigma=sigma, absolute_sigma=True)
    return WeightedFit(alpha=float(params[0]), alpha_err=float(np.sqrt(covariance[0, 0])))


def fit_power_law(series: Sequence[SeriesPoint], exclusions: Optional[FitExclusions] = None,
                  domain: FitDomain = "x", N: Optional[int] = None) -> FitResult:
    """
    Fits mean = C u^-alpha on log-log axes. In the inverse_ccr domain u is
    1/eta = w(N, x)^2 for single-spin regions on a ring of N sites.
    """
    exclusions = exclusions or FitExclusions()
    if domain == "inverse_ccr" and N is None:
        raise ValueError("the inverse_ccr domain needs the chain length N")
    used, excluded = _apply_exclusions(series, exclusions)
    if len(used) < 2:
        raise ValueError(f"fewer than 2 usable points after exclusions ({len(used)} left)")
    observable = used[0].observable

    if domain == "x":
        u = np.array([float(p.x) for p in used])
    else:
        u = np.array([chord_length(N, p.x) ** 2 for p in used])
    log_u = np.log(u)
    log_m = np.log(np.array([p.mean for p in used]))

    line = linregress(log_u, log_m)
    result = FitResult(
        observable=observable, domain=domain, alpha=-float(line.slope),
        alpha_err=float(line.stderr) if len(used) >= 3 else None,
        intercept=float(line.intercept), points_used=used, excluded=excluded,
        weighted=_weighted(log_u, log_m, used))
    logger.info("power-law fit", **_log_fields(
        observable=observable, domain=domain, alpha=result.alpha, alpha_err=result.alpha_err,
        n_points=len(used), n_excluded=len(excluded)))
    return result


def two_point_alpha(x1: float, m1: float, x2: float, m2: float) -> float:
    return math.log(m1 / m2) / math.log(x2 / x1)


def exponent_ordering(fits: dict[str, FitResult]) -> Optional[OrderingCheck]:
    """alpha_W >= alpha_E and alpha_I2 >= alpha_E; None unless all three fits exist."""
    if not all(name in fits for name in ("E", "W", "I2")):
        return None
    e, w, i2 = fits["E"].alpha, fits["W"].alpha, fits["I2"].alpha
    return OrderingCheck(alpha_E=e, alpha_W=w, alpha_I2=i2,
                         w_decays_faster=w >= e, i2_decays_faster=i2 >= e)


def write_fit_report(result: FitResult, path: str | Path):
    Path(path).write_text(result.model_dump_json(indent=2) + "\n", encoding="utf-8")


def write_plot_data(result: FitResult, path: str | Path, N: Optional[int] = None):
    """Two columns, u and mean, for the points that entered the fit."""
    header = "x" if result.domain == "x" else "inverse_ccr"
    lines = [f"# {header} mean"]
    for p in result.points_used:
        u = float(p.x) if result.domain == "x" else chord_length(N, p.x) ** 2
        lines.append(f"{u!r} {p.mean!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
