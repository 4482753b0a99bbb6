"""Universality verdicts at (parameter, temperature) and the boundary T*(parameter).

The 2D criterion asks for a renormalized phase error 3 p_z / k(p_l) at or
below 1e-7 with loss p_l at most 40%. The 3D criterion is the linear
trade-off p_l / 0.249 + p_z / 0.0293 <= 1. Threshold relations quoted as
approximate are used as inclusive inequalities.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cluster_errors import loss_rate, phase_error_rate
from .constants import (
    LOSS_THRESHOLD_3D,
    LOSS_TOLERANCE_2D,
    PHASE_THRESHOLD_2D,
    PHASE_THRESHOLD_3D,
    T_MAX,
)
from .ghz_distill import distill_channel
from .pauli_channel import extract_error_probs, twirl
from .percolation import KRangeError
from .thermal_state import thermal_state
from .unit_models import Model, ModelParams, deformation_parameter

__all__ = [
    "PhasePoint",
    "BoundaryPoint",
    "PhaseDiagram",
    "error_rates",
    "evaluate_point",
    "boundary_temperature",
    "sweep",
]

DIMS = ("2d", "3d")


@dataclass(frozen=True)
class PhasePoint:
    params: ModelParams
    T: float
    p_z: float
    p_l: float
    universal_2d: bool
    universal_3d: bool
    margin_2d: float
    margin_3d: float
    note: str = ""

    def universal(self, dim):
        return self.universal_2d if _dim(dim) == "2d" else self.universal_3d

    def margin(self, dim):
        return self.margin_2d if _dim(dim) == "2d" else self.margin_3d


@dataclass(frozen=True)
class BoundaryPoint:
    param: float
    T_star: float
    margin: float
    flag: str = ""


@dataclass
class PhaseDiagram:
    model: Model
    dim: str
    grid: list
    boundary: list
    k_source: str
    tol: float
    meta: dict = field(default_factory=dict)

    def universal_mask(self):
        """Boolean array of shape (n_param, n_T) in grid order."""
        params = sorted({p.params.value for p in self.grid})
        temps = sorted({p.T for p in self.grid})
        mask = np.zeros((len(params), len(temps)), dtype=bool)
        for pt in self.grid:
            mask[params.index(pt.params.value), temps.index(pt.T)] = pt.universal(self.dim)
        return np.array(params), np.array(temps), mask


def _dim(dim):
    d = str(dim).lower()
    if d not in DIMS:
        raise ValueError(f"dim must be one of {DIMS}, got {dim!r}")
    return d


def error_rates(params, T):
    """(p_z, p_l, distribution) for one unit at temperature T."""
    a = deformation_parameter(params)
    ghz = distill_channel(thermal_state(params, T), a)
    dist = extract_error_probs(twirl(ghz.rho16), ghz.p_s)
    p_z = max(0.0, phase_error_rate(dist))  # clip round-off below zero
    return p_z, loss_rate(min(1.0, max(0.0, ghz.p_s))), dist


def _margin_3d(p_z, p_l):
    return 1.0 - (p_l / LOSS_THRESHOLD_3D + p_z / PHASE_THRESHOLD_3D)


def _margin_2d(p_z, p_l, kcurve):
    loss_margin = 1.0 - p_l / LOSS_TOLERANCE_2D
    if p_l == 0.0:
        k = 1.0
    elif kcurve is None:
        return math.nan, "2D verdict needs a k(p_l) table in the lossy regime"
    elif p_l > LOSS_TOLERANCE_2D:
        return loss_margin, f"loss {p_l:.4g} above the 2D tolerance"
    else:
        try:
            k = kcurve.k_at(p_l)
        except KRangeError as exc:
            return math.nan, f"unusable: {exc}"
    phase_margin = 1.0 - 3.0 * p_z / (k * PHASE_THRESHOLD_2D)
    return min(loss_margin, phase_margin), ""


def evaluate_point(params, T, kcurve=None):
    """Compose thermal state, distillation, twirl and error rates into verdicts.

    Parameters
    ----------
    params : ModelParams
    T : float
        Temperature, T >= 0.
    kcurve : KCurve, optional
        Needed for the 2D verdict whenever p_l > 0.
    """
    if T < 0:
        raise ValueError(f"temperature must be non-negative, got {T}")
    if params.ferromagnetic:
        return PhasePoint(params, float(T), math.nan, math.nan, False, False,
                          -math.inf, -math.inf, "ferromagnetic unit: no entangled resource")
    p_z, p_l, _ = error_rates(params, T)
    m3 = _margin_3d(p_z, p_l)
    m2, note = _margin_2d(p_z, p_l, kcurve)
    u2 = bool(np.isfinite(m2) and m2 >= 0.0)
    return PhasePoint(params, float(T), float(p_z), float(p_l), u2, bool(m3 >= 0.0),
                      float(m2), float(m3), note)


def boundary_temperature(model, param, dim, kcurve=None, tol=1e-6, t_max=T_MAX):
    """Temperature where the ``dim`` criterion is met with equality.

    Returns None when the point is not universal at T = 0. Bisection on
    [0, t_max] relies on the error rates growing with T and stops once
    |margin| < ``tol``. If the point is still universal at ``t_max`` the
    result is ``t_max`` flagged ``"above_t_max"``.
    """
    dim = _dim(dim)
    params = ModelParams(model, param)
    margin = lambda T: evaluate_point(params, T, kcurve).margin(dim)  # noqa: E731

    m0 = margin(0.0)
    if not (np.isfinite(m0) and m0 >= 0.0):
        return None
    m_hi = margin(t_max)
    if np.isfinite(m_hi) and m_hi >= 0.0:
        return BoundaryPoint(float(param), float(t_max), float(m_hi), "above_t_max")

    lo, hi = 0.0, float(t_max)
    m_lo = m0
    for _ in range(200):
        if abs(m_lo) < tol:
            return BoundaryPoint(float(param), lo, float(m_lo))
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        m = margin(mid)
        if np.isfinite(m) and m >= 0.0:
            lo, m_lo = mid, m
        else:
            hi = mid
    return BoundaryPoint(float(param), lo, float(m_lo), "tolerance_not_reached")


def _map(fn, items, workers):
    if workers is None or workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def sweep(model, param_grid, T_grid, dim, kcurve=None, tol=1e-6, workers=1):
    """Evaluate the (param, T) grid and trace the boundary curve for ``dim``.

    Rows are ordered parameter-major regardless of ``workers``.
    """
    dim = _dim(dim)
    model = Model(model)
    params = [float(p) for p in param_grid]
    temps = [float(t) for t in T_grid]
    if not params or not temps:
        raise ValueError("parameter and temperature grids must be non-empty")
    for name, g in (("parameter", params), ("temperature", temps)):
        if any(b <= a for a, b in zip(g, g[1:])):
            raise ValueError(f"{name} grid must be strictly increasing")

    cells = [(p, t) for p in params for t in temps]
    grid = _map(lambda c: evaluate_point(ModelParams(model, c[0]), c[1], kcurve), cells, workers)
    found = _map(lambda p: boundary_temperature(model, p, dim, kcurve, tol), params, workers)
    boundary = [b for b in found if b is not None]

    if dim == "3d":
        k_source = "not used"
    elif kcurve is None:
        k_source = "none (k = 1 at zero loss only)"
    else:
        k_source = kcurve.source
    return PhaseDiagram(model=model, dim=dim, grid=grid, boundary=boundary,
                        k_source=k_source, tol=tol)
