"""
Cascades without recovery: closed forms
=======================================

With recovery rate 0 every class's susceptible mass is a power of one
reference class's susceptible mass, so one scalar ODE determines the whole
system.  If in addition every in-degree equals ``d`` the out-degree
weighted infected share is logistic and each class has a closed form.
"""

import numpy as np
import matplotlib.pyplot as plt

from dicascade import (
    ClassState,
    EpidemicParams,
    JointDegreePMF,
    LogisticTheta,
    closed_form_deterministic_indegree,
    integrate,
    solve_reference_ode,
    theta_closed_form,
)
from dicascade.analytic import theta_of_state

###############################################################################
# Reference-class reduction on a two-class system.
pmf = JointDegreePMF.from_dict({(1, 2): 0.5, (2, 1): 0.5})
init = ClassState.uniform_seed(pmf, 0.05)
params = EpidemicParams(lam=1.0, nu=0.0, init_frac=0.05, t_max=10.0)
reduced = solve_reference_ode(init, params, dt=1e-3)
full = integrate(init, params, dt=1e-3)
print("reduction vs full system:", np.abs(reduced.class_i - full.class_i).max())

###############################################################################
# Deterministic in-degree 2 with out-degrees 1 and 3 (mean 2).
pmf = JointDegreePMF.from_dict({(2, 1): 0.5, (2, 3): 0.5})
init = ClassState(pmf, [0.01, 0.03], [0.0, 0.0])
grid = np.linspace(0, 3, 61)
numeric = integrate(init, EpidemicParams(1.5, 0.0, 0.02, 3.0), dt=1e-3, grid=grid)
closed = np.array([closed_form_deterministic_indegree(pmf, init, 1.5, t).i for t in grid])
theta = theta_closed_form(LogisticTheta(theta_of_state(init), 1.5 * 2), grid)
print("closed form vs RK4:", np.abs(closed - numeric.class_i).max())

plt.plot(grid, closed.sum(axis=1), label="closed form, all nodes")
plt.plot(grid, numeric.i, ":", label="RK4")
plt.plot(grid, theta, "--", label="theta (logistic)")
plt.xlabel("time")
plt.ylabel("fraction")
plt.legend()
plt.savefig("no_recovery.png", dpi=120)
