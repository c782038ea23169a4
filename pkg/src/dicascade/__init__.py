"""Information cascades on directed configuration-model graphs.

Stochastic SIR simulation with broadcast transmission, the degree-stratified
mean-field ODEs that approximate it, and closed-form solutions for the
no-recovery case.
"""

from .degree_model import (
    DegreeSequence,
    JointDegreePMF,
    MarginalSpec,
    balance_stubs,
    empirical_pmf,
    make_marginal_pmf,
    moments,
    product_joint,
    sample_degree_sequence,
)
from .graph import DirectedGraph, build_configuration_graph, degree_census
from .trajectory import Trajectory
from .epidemic_sim import (
    EpidemicParams,
    NodeState,
    run_replicas,
    seed_infection,
    simulate,
)
from .meanfield import (
    ClassState,
    MeanFieldForm,
    absolute_to_conditional,
    conditional_to_absolute,
    integrate,
    rhs,
)
from .analytic import (
    CouplingConstants,
    LogisticTheta,
    closed_form_deterministic_indegree,
    coupling_constants,
    solve_reference_ode,
    theta_closed_form,
)
from .harness import (
    ComparisonReport,
    ExperimentConfig,
    compare_trajectories,
    emit_csv,
    emit_svg,
    read_csv,
    run_experiment,
)

__version__ = "0.1.0"
