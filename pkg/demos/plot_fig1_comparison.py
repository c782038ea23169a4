"""
Stochastic cascades against the mean-field equations
====================================================

Two 20000-node graphs share the out-degree law uniform{1..20} and differ
in the in-degree law: deterministic 10 versus zipf on {1..71} with
exponent 1.2.  With infection rate 1, recovery rate 0.5 and 5% initial
seeds we average 10 simulated cascades per graph and integrate the
degree-class ODEs fed with the graph's own degree classes.
"""

import matplotlib.pyplot as plt

from dicascade import ExperimentConfig, MarginalSpec, run_experiment
from dicascade.harness import emit_svg

base = dict(n=20000, out_spec=MarginalSpec.uniform(1, 20), lam=1.0, nu=0.5,
            init_frac=0.05, t_max=10.0, replicas=10, seed=0)
setups = {
    "deterministic in-degree": MarginalSpec.deterministic(10),
    "zipf in-degree": MarginalSpec.zipf(1, 71, 1.2),
}

fig, axes = plt.subplots(1, 2, figsize=(11, 4), sharey=True)
for ax, (name, in_spec) in zip(axes, setups.items()):
    res = run_experiment(ExperimentConfig(in_spec=in_spec, **base))
    rep = res.report
    print(f"{name}: sup distance {rep.sup_dist:.4f}, L2 {rep.l2_dist:.4f}, "
          f"t_half sim/ode {rep.t_half[0]:.2f}/{rep.t_half[1]:.2f}, "
          f"peak {rep.peak_value[0]:.3f} at t={rep.peak_time[0]:.2f}")
    ax.plot(res.sim.grid, res.sim.i, label="simulation (10 runs)")
    ax.plot(res.ode.grid, res.ode.i, "--", label="mean-field ODE")
    ax.set_title(name)
    ax.set_xlabel("time")
    emit_svg([("simulation", res.sim.grid, res.sim.i), ("mean-field ODE", res.ode.grid, res.ode.i)],
             f"fig1_{in_spec.kind}.svg", title=name)

axes[0].set_ylabel("fraction of nodes infected")
axes[0].legend()
plt.tight_layout()
plt.savefig("fig1_comparison.png", dpi=120)

###############################################################################
# The simulated curves lag the ODE slightly on the rising edge: on a fixed
# graph a node that has already broadcast exerts no further pressure,
# whereas the mean-field closure keeps re-randomizing its targets.
