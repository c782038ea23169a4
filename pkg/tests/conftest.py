import pytest

from dicascade.degree_model import MarginalSpec, empirical_pmf
from dicascade.harness import ExperimentConfig, build_network


def fig1_config(in_spec=None, **kw):
    """The 20000-node setup with uniform{1..20} out-degrees."""
    in_spec = in_spec or MarginalSpec.deterministic(10)
    base = dict(n=20000, in_spec=in_spec, out_spec=MarginalSpec.uniform(1, 20),
                lam=1.0, nu=0.5, init_frac=0.05, t_max=10.0, replicas=10, seed=0)
    base.update(kw)
    return ExperimentConfig(**base)


@pytest.fixture(scope="session")
def fig1_left_pmf():
    seq, _ = build_network(fig1_config())
    return empirical_pmf(seq)


ACCEPTANCE_LINES = []


@pytest.fixture
def record():
    """Log one acceptance line; call with (criterion, passed, detail)."""

    def _record(name, passed, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
