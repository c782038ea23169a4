"""Degree-class mean-field equations and a fixed-step RK4 integrator.

Two coordinate systems are supported.  In the ``ABSOLUTE`` form ``i[c]`` is
the share of all nodes that are infected and in class ``c`` (so it ranges
over ``[0, f(c)]``); in the ``CONDITIONED`` form it is the infected share
within class ``c`` (range ``[0, 1]``).  Both describe the same dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .degree_model import JointDegreePMF
from .epidemic_sim import EpidemicParams
from .trajectory import Trajectory

CLAMP_TOL = 1e-9
DEFAULT_DT = 1e-2


class MeanFieldForm(Enum):
    ABSOLUTE = "absolute"
    CONDITIONED = "conditioned"


class IntegrationError(ArithmeticError):
    """Integration left the admissible box or produced non-finite values."""


@dataclass(eq=False)
class ClassState:
    """Infected and recovered shares per support point of ``pmf``."""

    pmf: JointDegreePMF
    i: np.ndarray
    r: np.ndarray
    form: MeanFieldForm = MeanFieldForm.ABSOLUTE

    def __post_init__(self):
        self.i = np.asarray(self.i, dtype=float).copy()
        self.r = np.asarray(self.r, dtype=float).copy()
        if self.i.shape != self.pmf.p.shape or self.r.shape != self.pmf.p.shape:
            raise ValueError("state vectors must have one entry per support point")

    @property
    def cap(self) -> np.ndarray:
        """Upper bound of ``i + r`` per class in this state's convention."""
        if self.form is MeanFieldForm.ABSOLUTE:
            return self.pmf.p
        return np.ones_like(self.pmf.p)

    def violation(self) -> float:
        """Largest amount by which the state leaves its admissible box."""
        return float(
            max(
                0.0,
                -self.i.min(),
                -self.r.min(),
                (self.i + self.r - self.cap).max(),
            )
        )

    @classmethod
    def uniform_seed(cls, pmf: JointDegreePMF, frac: float) -> "ClassState":
        """Absolute state with the same infected share ``frac`` in every class."""
        return cls(pmf, frac * pmf.p, np.zeros(len(pmf)))


def conditional_to_absolute(state: ClassState) -> ClassState:
    if state.form is MeanFieldForm.ABSOLUTE:
        return state
    f = state.pmf.p
    return ClassState(state.pmf, state.i * f, state.r * f, MeanFieldForm.ABSOLUTE)


def absolute_to_conditional(state: ClassState) -> ClassState:
    if state.form is MeanFieldForm.CONDITIONED:
        return state
    f = state.pmf.p
    if np.any(f <= 0):
        raise ZeroDivisionError("cannot condition on a class with zero mass")
    return ClassState(state.pmf, state.i / f, state.r / f, MeanFieldForm.CONDITIONED)


def _mean_out_degree(pmf: JointDegreePMF) -> float:
    el = float(np.dot(pmf.l, pmf.p))
    if el <= 0:
        raise ValueError("every class has out-degree 0; the infection pressure is undefined")
    return el


def _derivative(i, r, k, l, f, el, lam, nu, form):
    if form is MeanFieldForm.ABSOLUTE:
        pressure = np.dot(l, i) / el
        di = lam * k * (f - i - r) * pressure - nu * i
    else:
        pressure = np.dot(l * f, i) / el
        di = lam * k * (1.0 - i - r) * pressure - nu * i
    return di, nu * i


def rhs(state: ClassState, params: EpidemicParams, form: Optional[MeanFieldForm] = None):
    """Time derivatives ``(di, dr)`` of the mean-field system at ``state``.

    ``form`` defaults to the state's own convention.
    """
    form = state.form if form is None else form
    pmf = state.pmf
    el = _mean_out_degree(pmf)
    return _derivative(
        state.i, state.r, pmf.k.astype(float), pmf.l.astype(float), pmf.p, el,
        params.lam, params.nu, form,
    )


def default_grid(t_max: float, dt: float) -> np.ndarray:
    n = max(1, int(round(t_max / dt)))
    return np.linspace(0.0, t_max, n + 1)


def rk4_step(fun, y: np.ndarray, h: float) -> np.ndarray:
    k1 = fun(y)
    k2 = fun(y + 0.5 * h * k1)
    k3 = fun(y + 0.5 * h * k2)
    k4 = fun(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_fixed_step(fun, y0: np.ndarray, grid: np.ndarray, dt: float, after_step=None) -> np.ndarray:
    """Classical RK4 reporting at every point of ``grid``.

    Each grid interval is split into the fewest equal sub-steps of length at
    most ``dt``, so grid points are hit exactly.  ``after_step(y_old, y_new)``
    may validate or repair each new state and returns the state to keep.
    """
    if not dt > 0:
        raise ValueError(f"step size must be > 0, got {dt}")
    out = np.empty((len(grid), len(y0)))
    y = np.array(y0, dtype=float)
    out[0] = y
    for j in range(1, len(grid)):
        span = grid[j] - grid[j - 1]
        nsub = max(1, math.ceil(span / dt - 1e-9))
        h = span / nsub
        for _ in range(nsub):
            y_new = rk4_step(fun, y, h)
            if not np.all(np.isfinite(y_new)):
                raise IntegrationError(f"non-finite state near t={grid[j]:.6g}")
            y = after_step(y, y_new) if after_step is not None else y_new
        out[j] = y
    return out


def integrate(
    initial: ClassState,
    params: EpidemicParams,
    form: Optional[MeanFieldForm] = None,
    t_max: Optional[float] = None,
    dt: float = DEFAULT_DT,
    grid=None,
) -> Trajectory:
    """Integrate the mean-field system and return absolute class fractions.

    The initial state is converted into ``form`` (default: its own form)
    before integrating.  After every step, negative or over-capacity values
    within ``1e-9`` are clamped; larger excursions, or susceptible mass
    that grows by more than that, raise ``IntegrationError``.
    """
    form = initial.form if form is None else form
    t_max = params.t_max if t_max is None else t_max
    grid = default_grid(t_max, dt) if grid is None else np.asarray(grid, dtype=float)
    if grid[0] != 0.0:
        raise ValueError("integration grid must start at 0")

    start = conditional_to_absolute(initial)
    if form is MeanFieldForm.CONDITIONED:
        start = absolute_to_conditional(start)
    if start.violation() > CLAMP_TOL:
        raise ValueError(f"initial state violates its bounds by {start.violation():.3g}")

    pmf = initial.pmf
    k, l, f = pmf.k.astype(float), pmf.l.astype(float), pmf.p
    el = _mean_out_degree(pmf)
    cap = start.cap
    lam, nu = params.lam, params.nu
    n = len(f)

    def fun(y):
        di, dr = _derivative(y[:n], y[n:], k, l, f, el, lam, nu, form)
        return np.concatenate([di, dr])

    def after_step(y_old, y_new):
        i, r = y_new[:n], y_new[n:]
        s_old = cap - y_old[:n] - y_old[n:]
        s_new = cap - i - r
        worst = max(0.0, -i.min(), -r.min(), -s_new.min(), (s_new - s_old).max())
        if worst > CLAMP_TOL:
            raise IntegrationError(
                f"state left the admissible box by {worst:.3g}; reduce dt (now {dt})"
            )
        i = np.clip(i, 0.0, cap)
        r = np.clip(r, 0.0, cap - i)
        return np.concatenate([i, r])

    y0 = np.concatenate([np.clip(start.i, 0, cap), np.clip(start.r, 0, cap)])
    ys = integrate_fixed_step(fun, y0, grid, dt, after_step)
    ci, cr = ys[:, :n], ys[:, n:]
    if form is MeanFieldForm.CONDITIONED:
        ci, cr = ci * f, cr * f
    return Trajectory.from_classes(grid, pmf.classes, ci, cr)


def final_state(traj: Trajectory, pmf: JointDegreePMF) -> ClassState:
    """Absolute class state at the last grid point of ``traj``."""
    if traj.classes != pmf.classes:
        raise ValueError("trajectory classes do not match the pmf support")
    return ClassState(pmf, traj.class_i[-1], traj.class_r[-1])
