"""Exact and semi-analytic solutions of the mean-field system without recovery.

With ``nu = 0`` the susceptible mass ``s_c = f(c) - i_c`` of every class is
a power of the reference class's susceptible mass,

    s_c(t) = c_c * s_ref(t) ** (k_c / k_ref),

so the whole system collapses onto one scalar ODE for the reference class.
When every node has the same in-degree ``d`` the out-degree weighted
infected share ``theta`` is logistic with rate ``lam * d`` and every class
has a closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .degree_model import JointDegreePMF
from .epidemic_sim import EpidemicParams
from .meanfield import (
    DEFAULT_DT,
    ClassState,
    IntegrationError,
    conditional_to_absolute,
    default_grid,
    integrate_fixed_step,
)
from .trajectory import Trajectory

BALANCE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CouplingConstants:
    ref_class: tuple[int, int]
    ref_index: int
    c: np.ndarray
    exponents: np.ndarray
    ref_base: float


def default_reference(initial: ClassState) -> tuple[int, int]:
    """(1, 1) when present, else the class with smallest ``k >= 1`` that
    still has susceptible mass (ties broken by smallest ``l``)."""
    state = conditional_to_absolute(initial)
    pmf = state.pmf
    remaining = pmf.p - state.i
    if pmf.mass(1, 1) > 0 and remaining[pmf.index(1, 1)] > 0:
        return (1, 1)
    for j in np.lexsort((pmf.l, pmf.k)):
        if pmf.k[j] >= 1 and remaining[j] > 0:
            return (int(pmf.k[j]), int(pmf.l[j]))
    raise ValueError("no class with in-degree >= 1 has susceptible mass left")


def coupling_constants(initial: ClassState, ref_class: Optional[tuple[int, int]] = None) -> CouplingConstants:
    """Constants linking each class's susceptible mass to the reference class.

    ``c[j] = (f_j - i_j(0)) / (f_ref - i_ref(0)) ** (k_j / k_ref)``.
    """
    state = conditional_to_absolute(initial)
    if np.any(state.r != 0):
        raise ValueError("the no-recovery solution needs r = 0 initially")
    pmf = state.pmf
    ref_class = default_reference(state) if ref_class is None else tuple(ref_class)
    kref, _ = ref_class
    if kref < 1:
        raise ValueError(f"reference class needs in-degree >= 1, got {ref_class}")
    jref = pmf.index(*ref_class)
    base = pmf.p[jref] - state.i[jref]
    if not base > 0:
        raise ValueError(f"reference class {ref_class} has no susceptible mass at t=0")
    expo = pmf.k / kref
    c = (pmf.p - state.i) / base**expo
    c[jref] = 1.0
    return CouplingConstants(ref_class, jref, c, expo, float(base))


def solve_reference_ode(
    initial: ClassState,
    params: EpidemicParams,
    ref_class: Optional[tuple[int, int]] = None,
    t_max: Optional[float] = None,
    dt: float = DEFAULT_DT,
    grid=None,
) -> Trajectory:
    """Integrate the scalar reference-class equation and rebuild every class.

    Only the reference susceptible mass ``x`` is integrated (RK4):

        dx/dt = -lam * k_ref * x * sum_c l_c (f_c - c_c x**(k_c/k_ref)) / E[L]
    """
    if params.nu != 0:
        raise ValueError("the reference-class reduction only holds for nu = 0")
    state = conditional_to_absolute(initial)
    pmf = state.pmf
    cc = coupling_constants(state, ref_class)
    t_max = params.t_max if t_max is None else t_max
    grid = default_grid(t_max, dt) if grid is None else np.asarray(grid, dtype=float)

    l = pmf.l.astype(float)
    el = float(np.dot(l, pmf.p))
    if el <= 0:
        raise ValueError("every class has out-degree 0")
    kref = cc.ref_class[0]
    lam = params.lam

    def susceptible(x):
        return cc.c * np.maximum(x, 0.0) ** cc.exponents

    def fun(y):
        x = y[0]
        pressure = np.dot(l, pmf.p - susceptible(x)) / el
        return np.array([-lam * kref * x * pressure])

    def after_step(y_old, y_new):
        if y_new[0] < -1e-9 or y_new[0] > y_old[0] + 1e-12:
            raise IntegrationError("reference susceptible mass left [0, x0] or grew")
        return np.maximum(y_new, 0.0)

    xs = integrate_fixed_step(fun, np.array([cc.ref_base]), grid, dt, after_step)[:, 0]
    s0 = pmf.p - state.i
    s = np.array([susceptible(x) for x in xs])
    s[0] = s0  # exact at t=0 irrespective of the power identity
    ci = state.i + (s0 - s)
    return Trajectory.from_classes(grid, pmf.classes, ci, np.zeros_like(ci))


@dataclass(frozen=True)
class LogisticTheta:
    theta0: float
    rate: float

    def __post_init__(self):
        if not 0 < self.theta0 <= 1:
            raise ValueError(f"theta0 must lie in (0, 1], got {self.theta0}")


def theta_closed_form(th: LogisticTheta, t):
    """``theta0 / (theta0 + (1 - theta0) exp(-rate t))``, elementwise in ``t``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    out = th.theta0 / (th.theta0 + (1.0 - th.theta0) * np.exp(-th.rate * t))
    return out if out.ndim else float(out)


def _deterministic_degree(pmf: JointDegreePMF) -> int:
    if np.any(pmf.k != pmf.k[0]):
        raise ValueError("in-degree is not deterministic for this pmf")
    return int(pmf.k[0])


def theta_of_state(state: ClassState) -> float:
    """Out-degree weighted infected share ``sum_j j i_j / sum_j j f_j``."""
    state = conditional_to_absolute(state)
    pmf = state.pmf
    return float(np.dot(pmf.l, state.i) / np.dot(pmf.l, pmf.p))


def closed_form_deterministic_indegree(
    pmf: JointDegreePMF,
    initial: ClassState,
    lam: float,
    t,
    *,
    require_balanced: bool = True,
) -> ClassState:
    """Exact no-recovery state at time ``t`` when every in-degree equals ``d``.

        i_l(t) = f_l - (f_l - i_l(0)) / (1 - theta0 + theta0 * exp(lam d t))

    ``theta`` is normalized by ``E[L]``, which equals ``d`` for a balanced
    law; pass ``require_balanced=False`` to accept ``E[L] != d`` (the
    formula stays exact for the equations with that normalization).
    """
    state = conditional_to_absolute(initial)
    if state.pmf is not pmf and state.pmf.classes != pmf.classes:
        raise ValueError("initial state is defined on a different support")
    if np.any(state.r != 0):
        raise ValueError("the no-recovery solution needs r = 0")
    d = _deterministic_degree(pmf)
    el = float(np.dot(pmf.l, pmf.p))
    if require_balanced and abs(el - d) > BALANCE_TOL:
        raise ValueError(f"mean out-degree {el} differs from the in-degree {d}")
    theta0 = theta_of_state(state)
    with np.errstate(over="ignore"):
        denom = 1.0 - theta0 + theta0 * np.exp(lam * d * float(t))
    # rearranged so that denom == 1 reproduces the initial state bit for bit
    i = state.i + (pmf.p - state.i) * (1.0 - 1.0 / denom)
    return ClassState(pmf, i, np.zeros(len(pmf)))
