"""Least-squares fit of ``P_L = alpha * (beta * p) ** ((d + 1) / 2)``.

Taking logs, ``log P_L - k log p = log alpha + k log beta`` with
``k = (d + 1) / 2``, which is linear in ``(log alpha, log beta)``. Points are
weighted by failure count, the inverse variance of ``log P_L`` for a
binomial estimate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..codemodel import FailureFit
from ..errors import FitError
from .montecarlo import TrialStats


@dataclass(frozen=True)
class FitResult:
    fit: FailureFit
    log_residuals: np.ndarray
    points: int
    rms: float

    @property
    def alpha(self) -> float:
        return self.fit.alpha

    @property
    def beta(self) -> float:
        return self.fit.beta


def fit_points(d: Sequence[int], p: Sequence[float], p_l: Sequence[float],
               weights: Sequence[float] | None = None, valid_p_max: float | None = None) -> FitResult:
    """Fit from raw ``(d, p, P_L)`` triples; every ``P_L`` must be positive."""
    d = np.asarray(d, dtype=float)
    p = np.asarray(p, dtype=float)
    p_l = np.asarray(p_l, dtype=float)
    w = np.ones_like(p) if weights is None else np.asarray(weights, dtype=float)
    ok = (p_l > 0) & (w > 0)
    if len(np.unique(d[ok])) < 2 or len(np.unique(p[ok])) < 2:
        raise FitError("need at least two distances and two error rates with nonzero failures")
    d, p, p_l, w = d[ok], p[ok], p_l[ok], w[ok]
    k = (d + 1) / 2
    a = np.column_stack([np.ones_like(k), k])
    y = np.log(p_l) - k * np.log(p)
    sw = np.sqrt(w)
    coef, *_ = np.linalg.lstsq(a * sw[:, None], y * sw, rcond=None)
    resid = y - a @ coef
    alpha, beta = float(np.exp(coef[0])), float(np.exp(coef[1]))
    vmax = valid_p_max if valid_p_max is not None else float(p.max())
    return FitResult(FailureFit(alpha, beta, vmax), resid, len(p), float(np.sqrt(np.mean(resid ** 2))))


def fit_failure_model(stats: Sequence[TrialStats], valid_p_max: float | None = None) -> FitResult:
    """Fit Monte Carlo results; rows with zero failures or ``p > valid_p_max`` are dropped."""
    rows = [s for s in stats if valid_p_max is None or s.p <= valid_p_max]
    return fit_points(
        [s.d for s in rows], [s.p for s in rows], [s.p_l for s in rows],
        weights=[s.failures for s in rows], valid_p_max=valid_p_max,
    )
