import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from permugibbs import (ChainConfig, SamplerError, boundary,
                        compatible_domain_image, enumerate_compatible,
                        exact_probability, mcmc_run, power, tv_distance, zero)


def vol(*xs):
    return tuple(float(x) for x in xs)


class TestDomainImage:
    def test_tau0_full(self, lattice):
        d, i = compatible_domain_image(boundary("shift", lattice, n=0), vol(0, 1, 2))
        assert d == i == vol(0, 1, 2)

    def test_tau1_loses_edges(self, lattice):
        d, i = compatible_domain_image(boundary("shift", lattice, n=1),
                                       vol(*range(-2, 3)))
        assert d == vol(-2, -1, 0, 1) and i == vol(-1, 0, 1, 2)

    def test_dyadic(self, lattice):
        d, i = compatible_domain_image(boundary("dyadic", lattice),
                                       vol(*range(-4, 5)))
        assert d == vol(-4, -3, -2, -1, 0, 1)
        assert i == vol(-1, 0, 1, 2, 3, 4)


class TestEnumeration:
    def test_two_state_closed_form(self, lattice):
        table = enumerate_compatible(boundary("shift", lattice, n=0),
                                     vol(0, 1), power())
        probs = table.distribution()
        assert probs[(0, 1)] == pytest.approx(1.0 / (1.0 + math.exp(-2.0)), abs=1e-14)
        assert probs[(1, 0)] == pytest.approx(math.exp(-2.0) / (1.0 + math.exp(-2.0)),
                                              abs=1e-14)

    def test_three_state_partition_function(self, lattice):
        table = enumerate_compatible(boundary("shift", lattice, n=0),
                                     vol(0, 1, 2), power())
        z_expected = 1 + 2 * math.exp(-2) + 2 * math.exp(-6) + math.exp(-8)
        assert table.z == pytest.approx(z_expected, rel=1e-14)
        assert table.distribution()[(0, 1, 2)] == pytest.approx(1 / z_expected,
                                                                rel=1e-14)

    def test_zero_potential_uniform(self, lattice):
        for bc_kind, kw in (("shift", {"n": 1}), ("reflection", {}),
                            ("dyadic", {})):
            bc = boundary(bc_kind, lattice, **kw)
            table = enumerate_compatible(bc, vol(*range(-2, 3)), zero())
            target = 1.0 / len(table.states)
            assert max(abs(p - target) for p in table.probabilities) < 1e-15

    def test_probabilities_normalized(self, lattice):
        table = enumerate_compatible(boundary("shift", lattice, n=2),
                                     vol(*range(-3, 4)), power(0.3))
        assert float(np.sum(table.probabilities)) == pytest.approx(1.0, abs=1e-12)

    def test_cap_enforced(self, lattice):
        with pytest.raises(SamplerError, match="capped at 9"):
            enumerate_compatible(boundary("shift", lattice, n=0),
                                 vol(*range(10)), power())

    def test_large_alpha_log_domain(self, lattice):
        # naive exp would underflow: energies reach 10 * 6^2 * 7 and beyond
        table = enumerate_compatible(boundary("shift", lattice, n=0),
                                     vol(*range(-3, 4)), power(10.0))
        assert float(np.sum(table.probabilities)) == pytest.approx(1.0, abs=1e-12)
        assert all(p >= 0 for p in table.probabilities)

    def test_lexicographic_order(self, lattice):
        table = enumerate_compatible(boundary("shift", lattice, n=0),
                                     vol(0, 1, 2), zero())
        assert table.states == sorted(table.states)

    def test_z_depends_only_on_domain_and_image(self, lattice):
        # same (D, I) through different boundaries gives the same Z
        V = power(0.7)
        symmetric = vol(*range(-2, 3))
        t_refl = enumerate_compatible(boundary("reflection", lattice), symmetric, V)
        t_tau0 = enumerate_compatible(boundary("shift", lattice, n=0), symmetric, V)
        assert t_refl.domain == t_tau0.domain and t_refl.image == t_tau0.image
        assert t_refl.log_z == pytest.approx(t_tau0.log_z, rel=1e-14)
        fm = boundary("finite-modification", lattice, n=0,
                      overrides={-2.0: 2.0, 2.0: -2.0})
        t_fm = enumerate_compatible(fm, symmetric, V)
        assert t_fm.domain == t_tau0.domain and t_fm.image == t_tau0.image
        assert t_fm.log_z == pytest.approx(t_tau0.log_z, rel=1e-14)

    def test_all_states_share_boundary_flow(self, lattice):
        from permugibbs import flow_at
        for n in (0, 1, 2):
            table = enumerate_compatible(boundary("shift", lattice, n=n),
                                         vol(*range(-3, 4)), power())
            for idx in range(len(table.states)):
                sigma = table.permutation_at(idx)
                assert flow_at(sigma, 0.5).value == n


class TestExactProbability:
    def test_everything_is_one(self, lattice):
        table = enumerate_compatible(boundary("shift", lattice, n=0),
                                     vol(0, 1, 2), power())
        assert exact_probability(table, lambda s: True) == pytest.approx(1.0)

    def test_uniform_complement(self, lattice):
        table = enumerate_compatible(boundary("shift", lattice, n=0),
                                     vol(0, 1, 2), zero())
        not_boundary = exact_probability(
            table, lambda s: any(s.image_of(x) != x for x in vol(0, 1, 2)))
        assert not_boundary == pytest.approx(1.0 - 1.0 / 6.0, abs=1e-14)

    def test_jump_event_closed_form(self, lattice):
        table = enumerate_compatible(boundary("shift", lattice, n=0),
                                     vol(0, 1), power())
        p = exact_probability(table, lambda s: s.image_of(0.0) == 1.0)
        assert p == pytest.approx(math.exp(-2.0) / (1.0 + math.exp(-2.0)), abs=1e-14)

    def test_state_view_preimage(self, lattice):
        table = enumerate_compatible(boundary("shift", lattice, n=1),
                                     vol(*range(-2, 3)), power())
        view = table.state_view(0)
        for x in table.domain:
            assert view.preimage_of(view.image_of(x)) == x
        # off-domain points fall through to the boundary
        assert view.image_of(10.0) == 11.0


class TestTvDistance:
    def test_identical(self):
        p = {"a": 0.5, "b": 0.5}
        assert tv_distance(p, p) == 0.0

    def test_disjoint_point_masses(self):
        assert tv_distance({"a": 1.0}, {"b": 1.0}) == 1.0

    def test_uniform_vs_biased(self):
        assert tv_distance({"a": 0.5, "b": 0.5}, {"a": 0.75, "b": 0.25}) \
            == pytest.approx(0.25)

    def test_normalizes_counts(self):
        assert tv_distance({"a": 5, "b": 5}, {"a": 3, "b": 1}) == pytest.approx(0.25)

    @given(st.dictionaries(st.sampled_from("abcdef"), st.floats(0.01, 10.0),
                           min_size=1),
           st.dictionaries(st.sampled_from("abcdef"), st.floats(0.01, 10.0),
                           min_size=1))
    def test_bounds_and_symmetry(self, p, q):
        d = tv_distance(p, q)
        assert 0.0 <= d <= 1.0 + 1e-12
        assert d == pytest.approx(tv_distance(q, p))


class TestChainConfig:
    def test_validation(self):
        with pytest.raises(SamplerError):
            ChainConfig(seed=0, steps=10, burn_in=10)
        with pytest.raises(SamplerError):
            ChainConfig(seed=0, steps=10, burn_in=0, thinning=0)

    def test_kept(self):
        assert ChainConfig(seed=0, steps=110, burn_in=10, thinning=10).kept == 10


class TestMcmc:
    def test_deterministic_given_seed(self, lattice):
        bc = boundary("shift", lattice, n=0)
        cfg = ChainConfig(seed=7, steps=20_000, burn_in=1_000, thinning=3)
        a = mcmc_run(bc, vol(*range(4)), power(), cfg)["state"]
        b = mcmc_run(bc, vol(*range(4)), power(), cfg)["state"]
        assert a.counts == b.counts and a.batch_totals == b.batch_totals

    def test_v0_uniform_target(self, lattice):
        bc = boundary("shift", lattice, n=0)
        cfg = ChainConfig(seed=11, steps=400_000, burn_in=5_000)
        emp = mcmc_run(bc, vol(*range(4)), zero(), cfg)["state"]
        uniform = {s: 1.0 / 24.0 for s in itertools.permutations(range(4))}
        assert tv_distance(emp.distribution(), uniform) < 0.02

    def test_matches_exact_table(self, lattice):
        bc = boundary("shift", lattice, n=0)
        V = power()
        table = enumerate_compatible(bc, vol(*range(5)), V)
        cfg = ChainConfig(seed=3, steps=1_000_000, burn_in=10_000)
        emp = mcmc_run(bc, vol(*range(5)), V, cfg)["state"]
        assert tv_distance(emp.distribution(), table.distribution()) < 0.01

    def test_tv_shrinks_with_chain_length(self, lattice):
        bc = boundary("shift", lattice, n=0)
        V = power()
        exact = enumerate_compatible(bc, vol(*range(4)), V).distribution()
        tvs = []
        for steps in (2_000, 20_000, 200_000):
            cfg = ChainConfig(seed=19, steps=steps, burn_in=1_000)
            emp = mcmc_run(bc, vol(*range(4)), V, cfg)["state"]
            tvs.append(tv_distance(emp.distribution(), exact))
        assert tvs[2] < tvs[1] < tvs[0]

    def test_detailed_balance_exact(self, lattice):
        # gamma(s) P(s -> s') = gamma(s') P(s' -> s) for swap-adjacent states
        bc = boundary("shift", lattice, n=0)
        V = power()
        table = enumerate_compatible(bc, vol(*range(4)), V)
        probs = table.distribution()
        m = len(table.domain)
        proposal = 2.0 / (m * (m - 1))
        for s in table.states:
            for i, j in itertools.combinations(range(m), 2):
                t = list(s)
                t[i], t[j] = t[j], t[i]
                t = tuple(t)
                de = (V(table.image[s[j]] - table.domain[i])
                      + V(table.image[s[i]] - table.domain[j])
                      - V(table.image[s[i]] - table.domain[i])
                      - V(table.image[s[j]] - table.domain[j]))
                forward = probs[s] * proposal * min(1.0, math.exp(-de))
                backward = probs[t] * proposal * min(1.0, math.exp(de))
                assert forward == pytest.approx(backward, abs=1e-12)

    def test_needs_two_domain_points(self, lattice):
        with pytest.raises(SamplerError):
            mcmc_run(boundary("shift", lattice, n=0), vol(0), power(),
                     ChainConfig(seed=0, steps=100))

    def test_merge_is_concatenation(self, lattice):
        bc = boundary("shift", lattice, n=0)
        cfg1 = ChainConfig(seed=1, steps=5_000, burn_in=500)
        cfg2 = ChainConfig(seed=2, steps=5_000, burn_in=500)
        e1 = mcmc_run(bc, vol(*range(4)), power(), cfg1)["state"]
        e2 = mcmc_run(bc, vol(*range(4)), power(), cfg2)["state"]
        merged = e1.merge(e2)
        assert merged.total == e1.total + e2.total
        assert merged.counts == e1.counts + e2.counts

    def test_stderr_and_ess(self, lattice):
        bc = boundary("shift", lattice, n=0)
        cfg = ChainConfig(seed=5, steps=100_000, burn_in=2_000)
        emp = mcmc_run(bc, vol(*range(4)), power(), cfg)["state"]
        key = max(emp.counts, key=emp.counts.get)
        se = emp.stderr(key)
        assert 0.0 < se < 0.05
        assert 0 < emp.effective_samples(key) <= emp.total
