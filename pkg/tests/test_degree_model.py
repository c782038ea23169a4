import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from dicascade.degree_model import (
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

# 1 / sum_{k=1}^{71} k^-1.2, by direct summation
ZIPF_1_71_P1 = 0.28877410579664703


def fig1_left_pmf():
    return product_joint(
        make_marginal_pmf(MarginalSpec.deterministic(10)),
        make_marginal_pmf(MarginalSpec.uniform(1, 20)),
    )


class TestMarginals:
    def test_deterministic_unit_mass(self):
        p = make_marginal_pmf(MarginalSpec.deterministic(10))
        assert p[10] == 1.0
        assert p.sum() == 1.0

    def test_uniform_equal_mass(self):
        p = make_marginal_pmf(MarginalSpec.uniform(1, 20))
        np.testing.assert_allclose(p[1:21], 0.05)
        assert p[0] == 0.0

    def test_zipf_head_mass(self):
        p = make_marginal_pmf(MarginalSpec.zipf(1, 71, 1.2))
        assert p[1] == pytest.approx(ZIPF_1_71_P1, rel=1e-12)
        assert p[1] == pytest.approx(0.289, abs=5e-4)
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        # p(k) proportional to k^-s
        assert p[2] / p[1] == pytest.approx(2**-1.2)

    @pytest.mark.parametrize(
        "build",
        [
            lambda: MarginalSpec.uniform(5, 4),
            lambda: MarginalSpec.zipf(0, 10, 1.2),
            lambda: MarginalSpec.zipf(1, 10, 0.0),
            lambda: MarginalSpec.deterministic(-1),
            lambda: MarginalSpec("poisson", 1, 2),
        ],
    )
    def test_invalid_specs(self, build):
        with pytest.raises(ValueError):
            build()

    def test_dict_round_trip(self):
        for spec in (MarginalSpec.deterministic(3), MarginalSpec.uniform(1, 4), MarginalSpec.zipf(1, 71, 1.2)):
            assert MarginalSpec.from_dict(spec.to_dict()) == spec

    def test_dict_rejects_extra_fields(self):
        with pytest.raises(ValueError):
            MarginalSpec.from_dict({"kind": "uniform", "lo": 1, "hi": 2, "exponent": 1.0})


class TestJoint:
    def test_fig1_left_product(self):
        pmf = fig1_left_pmf()
        assert pmf.classes == [(10, l) for l in range(1, 21)]
        np.testing.assert_allclose(pmf.p, 0.05)
        assert (pmf.k_max, pmf.l_max) == (10, 20)

    def test_point_mass(self):
        pmf = product_joint([0, 1], [0, 1])
        assert pmf.as_dict() == {(1, 1): 1.0}

    def test_four_quarters(self):
        u = make_marginal_pmf(MarginalSpec.uniform(1, 2))
        pmf = product_joint(u, u)
        assert pmf.as_dict() == {(1, 1): 0.25, (1, 2): 0.25, (2, 1): 0.25, (2, 2): 0.25}

    def test_zero_zero_removed_and_renormalized(self):
        u = make_marginal_pmf(MarginalSpec.uniform(0, 1))
        pmf = product_joint(u, u)
        assert (0, 0) not in pmf.classes
        assert pmf.as_dict() == pytest.approx({(0, 1): 1 / 3, (1, 0): 1 / 3, (1, 1): 1 / 3})

    def test_all_mass_at_zero(self):
        with pytest.raises(ValueError):
            product_joint([1.0], [1.0])

    def test_rejects_bad_support(self):
        with pytest.raises(ValueError):
            JointDegreePMF([0, 1], [0, 1], [0.5, 0.5])
        with pytest.raises(ValueError):
            JointDegreePMF([1, 1], [1, 2], [0.5, 0.4])
        with pytest.raises(ValueError):
            JointDegreePMF([1, 1], [1, 1], [0.5, 0.5])


class TestMoments:
    def test_fig1_left(self):
        ek, el, vk, vl = moments(fig1_left_pmf())
        assert ek == pytest.approx(10.0)
        assert el == pytest.approx(10.5)
        assert vk == pytest.approx(0.0)
        assert vl == pytest.approx((20**2 - 1) / 12)

    def test_point_mass(self):
        assert moments(JointDegreePMF.from_dict({(1, 1): 1.0})) == (1.0, 1.0, 0.0, 0.0)

    def test_symmetric_pair(self):
        ek, el, _, _ = moments(JointDegreePMF.from_dict({(1, 2): 0.5, (2, 1): 0.5}))
        assert ek == el == 1.5


class TestSampling:
    def test_point_mass(self):
        seq = sample_degree_sequence(JointDegreePMF.from_dict({(1, 1): 1.0}), 5, seed=3)
        assert seq.in_deg.tolist() == [1] * 5
        assert seq.out_deg.tolist() == [1] * 5

    def test_deterministic_given_seed(self):
        pmf = fig1_left_pmf()
        assert sample_degree_sequence(pmf, 300, 11) == sample_degree_sequence(pmf, 300, 11)
        assert sample_degree_sequence(pmf, 300, 11) != sample_degree_sequence(pmf, 300, 12)

    def test_fig1_scale(self):
        seq = sample_degree_sequence(fig1_left_pmf(), 20000, 0)
        assert np.all(seq.in_deg == 10)
        assert abs(seq.out_deg.mean() - 10.5) < 0.2

    def test_zero_nodes(self):
        with pytest.raises(ValueError):
            sample_degree_sequence(fig1_left_pmf(), 0, 0)

    def test_never_draws_isolated_nodes(self):
        u = make_marginal_pmf(MarginalSpec.uniform(0, 1))
        seq = sample_degree_sequence(product_joint(u, u), 5000, 4)
        assert not np.any((seq.in_deg == 0) & (seq.out_deg == 0))

    @pytest.mark.parametrize(
        "spec", [MarginalSpec.uniform(1, 20), MarginalSpec.zipf(1, 71, 1.2)], ids=["uniform", "zipf"]
    )
    def test_chi_square_marginals(self, spec):
        p = make_marginal_pmf(spec)
        pmf = product_joint(p, make_marginal_pmf(MarginalSpec.deterministic(1)))
        n = 100_000
        seq = sample_degree_sequence(pmf, n, 2024)
        observed = np.bincount(seq.in_deg, minlength=len(p))[spec.lo :]
        expected = n * p[spec.lo :]
        assert stats.chisquare(observed, expected).pvalue > 1e-6


class TestBalancing:
    def test_out_side_topped_up(self):
        seq = balance_stubs(DegreeSequence([2, 2, 2], [1, 1, 2]), 0)
        assert seq.in_deg.tolist() == [2, 2, 2]
        assert seq.out_deg.sum() == 6
        assert np.all(seq.out_deg >= [1, 1, 2])

    def test_in_side_topped_up(self):
        seq = balance_stubs(DegreeSequence([1, 0], [3, 2]), 5)
        assert seq.out_deg.tolist() == [3, 2]
        assert seq.in_deg.sum() == 5

    def test_already_balanced_is_unchanged(self):
        seq = DegreeSequence([1, 2], [2, 1])
        assert balance_stubs(seq, 0) == seq

    def test_single_node(self):
        assert balance_stubs(DegreeSequence([1], [0]), 0).out_deg.tolist() == [1]

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=1, max_size=40),
        st.integers(0, 2**31),
    )
    def test_balances_and_is_idempotent(self, pairs, seed):
        seq = DegreeSequence(*zip(*pairs))
        bal = balance_stubs(seq, seed)
        assert bal.is_balanced
        assert balance_stubs(bal, seed + 1) == bal
        # only the deficient side changes, and only upward
        if seq.in_deg.sum() >= seq.out_deg.sum():
            assert np.array_equal(bal.in_deg, seq.in_deg)
            assert np.all(bal.out_deg >= seq.out_deg)
        else:
            assert np.array_equal(bal.out_deg, seq.out_deg)
            assert np.all(bal.in_deg >= seq.in_deg)


class TestEmpirical:
    def test_single_class(self):
        assert empirical_pmf(DegreeSequence([1, 1], [1, 1])).as_dict() == {(1, 1): 1.0}

    def test_two_classes(self):
        assert empirical_pmf(DegreeSequence([1, 2], [2, 1])).as_dict() == {(1, 2): 0.5, (2, 1): 0.5}

    def test_rejects_isolated_node(self):
        with pytest.raises(ValueError):
            empirical_pmf(DegreeSequence([0, 1], [0, 1]))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 400), st.integers(0, 2**31))
    def test_balanced_means_agree(self, n, seed):
        pmf = product_joint(
            make_marginal_pmf(MarginalSpec.zipf(1, 30, 1.5)),
            make_marginal_pmf(MarginalSpec.uniform(1, 9)),
        )
        seq = balance_stubs(sample_degree_sequence(pmf, n, seed), seed)
        emp = empirical_pmf(seq)
        ek, el, _, _ = moments(emp)
        assert ek == pytest.approx(el, abs=1e-9)
        assert abs(emp.p.sum() - 1.0) <= 1e-12
        assert np.all(emp.p > 0)
