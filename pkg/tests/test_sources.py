"""Band-bounded and independent symbol sources."""

import itertools
import math

import numpy as np
import pytest

from piflab.prng import CounterRng
from piflab.sources import (
    IndepSourceSpec,
    SourceError,
    SvSourceSpec,
    embed_mod,
    exact_sum_mod_distribution,
    sample_indep_batch,
    sample_indep_string,
    sample_sv_batch,
    sample_sv_string,
    source_from_dict,
    sum_law_as_dist,
    sv_conditional,
    sv_renyi_entropy_bounds,
)


def string_probability(spec: SvSourceSpec, s) -> float:
    """Exact probability of a string: product of conditional probabilities."""
    p = 1.0
    for i, sym in enumerate(s):
        p *= sv_conditional(spec, s[:i])[sym]
    return p


class TestSvSpec:
    def test_band(self):
        spec = SvSourceSpec(2, 0.25, 5, "uniform")
        assert spec.band == (0.25, 0.75)

    def test_band_three_letters(self):
        spec = SvSourceSpec(3, 0.2, 4, "uniform")
        assert spec.band == pytest.approx((0.2, 0.6))

    def test_delta_range(self):
        with pytest.raises(SourceError):
            SvSourceSpec(2, 0.6, 5, "uniform")
        with pytest.raises(SourceError):
            SvSourceSpec(2, -0.1, 5, "uniform")
        # delta = 1/A is the degenerate fair case and is allowed
        SvSourceSpec(4, 0.25, 5, "uniform")

    def test_other_validation(self):
        with pytest.raises(SourceError):
            SvSourceSpec(1, 0.1, 5, "uniform")
        with pytest.raises(SourceError):
            SvSourceSpec(2, 0.1, 0, "uniform")
        with pytest.raises(SourceError):
            SvSourceSpec(2, 0.1, 5, "whimsical")

    def test_roundtrip(self):
        spec = SvSourceSpec(3, 0.15, 8, "seeded-random", policy_seed=9)
        assert source_from_dict(spec.to_dict()) == spec


class TestIndepSpec:
    def test_iid(self):
        spec = IndepSourceSpec.iid((0.7, 0.3), 3)
        assert spec.length == 3
        assert spec.etas == ((0.7, 0.3),) * 3

    def test_zeros_allowed(self):
        spec = IndepSourceSpec(((0.0, 1.0), (0.5, 0.5)))
        assert spec.length == 2

    def test_rejects_bad_sum(self):
        with pytest.raises(SourceError):
            IndepSourceSpec(((0.5, 0.4),))

    def test_rejects_negative(self):
        with pytest.raises(SourceError):
            IndepSourceSpec(((-0.1, 1.1),))

    def test_roundtrip(self):
        spec = IndepSourceSpec(((0.2, 0.8), (1.0, 0.0)))
        assert source_from_dict(spec.to_dict()) == spec

    def test_unknown_kind(self):
        with pytest.raises(SourceError):
            source_from_dict({"kind": "markov"})


class TestConditionals:
    def test_uniform_policy(self):
        spec = SvSourceSpec(4, 0.1, 6, "uniform")
        assert sv_conditional(spec, (1, 2)) == pytest.approx((0.25,) * 4)

    def test_extreme_policy_tracks_prefix_sum(self):
        spec = SvSourceSpec(3, 0.2, 6, "extreme")
        lo, hi = spec.band
        # favored symbol is sum(prefix) mod 3
        assert sv_conditional(spec, ()) == pytest.approx((hi, lo, lo))
        assert sv_conditional(spec, (1,)) == pytest.approx((lo, hi, lo))
        assert sv_conditional(spec, (1, 1)) == pytest.approx((lo, lo, hi))
        assert sv_conditional(spec, (2, 1)) == pytest.approx((hi, lo, lo))

    def test_seeded_policy_in_band_and_prefix_sensitive(self):
        spec = SvSourceSpec(3, 0.15, 6, "seeded-random", policy_seed=5)
        lo, hi = spec.band
        seen = set()
        for prefix in [(), (0,), (1,), (0, 1), (1, 0)]:
            probs = sv_conditional(spec, prefix)
            assert sum(probs) == pytest.approx(1.0, abs=1e-9)
            assert all(lo - 1e-12 <= p <= hi + 1e-12 for p in probs)
            seen.add(tuple(round(p, 12) for p in probs))
        assert len(seen) > 1

    def test_seeded_policy_seed_sensitive(self):
        a = SvSourceSpec(2, 0.25, 6, "seeded-random", policy_seed=1)
        b = SvSourceSpec(2, 0.25, 6, "seeded-random", policy_seed=2)
        assert sv_conditional(a, (0,)) != sv_conditional(b, (0,))

    def test_delta_at_cap_forces_fair(self):
        spec = SvSourceSpec(4, 0.25, 6, "seeded-random")
        assert sv_conditional(spec, (3, 1)) == pytest.approx((0.25,) * 4)

    def test_bad_prefix_symbol(self):
        spec = SvSourceSpec(2, 0.25, 6, "uniform")
        with pytest.raises(SourceError):
            sv_conditional(spec, (2,))


class TestSvSampling:
    def test_deterministic(self):
        spec = SvSourceSpec(3, 0.2, 12, "seeded-random")
        assert sample_sv_string(spec, 44) == sample_sv_string(spec, 44)

    def test_batch_rows_match_singletons(self):
        spec = SvSourceSpec(3, 0.2, 10, "seeded-random", policy_seed=3)
        seeds = [5, 6, 7, 8]
        batch = sample_sv_batch(spec, seeds)
        for row, seed in zip(batch, seeds):
            assert tuple(int(x) for x in row) == sample_sv_string(spec, seed)

    def test_symbols_in_range(self):
        spec = SvSourceSpec(5, 0.1, 20, "seeded-random")
        batch = sample_sv_batch(spec, range(50))
        assert batch.min() >= 0
        assert batch.max() < 5

    def test_extreme_delta_zero_is_constant(self):
        # Band [0, 1]: the favored symbol takes all mass, so the walk
        # stays at symbol 0 forever.
        spec = SvSourceSpec(3, 0.0, 15, "extreme")
        assert sample_sv_string(spec, 123) == (0,) * 15

    def test_empty_seed_list(self):
        spec = SvSourceSpec(2, 0.25, 4, "uniform")
        with pytest.raises(SourceError):
            sample_sv_batch(spec, [])

    def test_frequencies_match_exact_law(self):
        # Enumerate the exact law via conditional products and compare
        # against 100k sampled strings.
        spec = SvSourceSpec(2, 0.25, 3, "seeded-random", policy_seed=17)
        strings = list(itertools.product(range(2), repeat=3))
        exact = {s: string_probability(spec, s) for s in strings}
        assert sum(exact.values()) == pytest.approx(1.0, abs=1e-12)

        k = 100_000
        batch = sample_sv_batch(spec, range(k))
        counts = {s: 0 for s in strings}
        codes = batch[:, 0] * 4 + batch[:, 1] * 2 + batch[:, 2]
        binned = np.bincount(codes, minlength=8)
        for idx, s in enumerate(itertools.product(range(2), repeat=3)):
            counts[s] = int(binned[idx])
        for s in strings:
            p = exact[s]
            sigma = math.sqrt(p * (1.0 - p) / k)
            assert abs(counts[s] / k - p) < 4.0 * sigma + 1e-9

    def test_collision_bound_by_enumeration(self):
        # Sum of squared string probabilities is at most base^n with
        # base = (1 - (A-1)d)^2 + (A-1)d^2, so the Renyi-2 entropy of the
        # whole source sits inside the advertised interval.
        spec = SvSourceSpec(2, 0.25, 8, "seeded-random", policy_seed=2)
        collision = sum(
            string_probability(spec, s) ** 2
            for s in itertools.product(range(2), repeat=8)
        )
        h2 = -math.log2(collision)
        lower, upper = sv_renyi_entropy_bounds(2, 0.25, 8)
        assert lower - 1e-9 <= h2 <= upper + 1e-9


class TestEntropyBounds:
    def test_per_position_values(self):
        lower, upper = sv_renyi_entropy_bounds(2, 0.25, 1)
        assert upper == pytest.approx(1.0)
        assert lower == pytest.approx(-math.log2(0.75**2 + 0.25**2), abs=1e-12)
        assert lower == pytest.approx(0.678072, abs=1e-6)

    def test_linear_in_length(self):
        l1, u1 = sv_renyi_entropy_bounds(3, 0.2, 1)
        l5, u5 = sv_renyi_entropy_bounds(3, 0.2, 5)
        assert l5 == pytest.approx(5 * l1)
        assert u5 == pytest.approx(5 * u1)

    def test_fair_case_collapses(self):
        lower, upper = sv_renyi_entropy_bounds(2, 0.5, 10)
        assert lower == pytest.approx(upper) == pytest.approx(10.0)


class TestIndepSampling:
    def test_deterministic_and_batch_identity(self):
        spec = IndepSourceSpec.iid((0.3, 0.2, 0.5), 6)
        seeds = [1, 2, 3]
        batch = sample_indep_batch(spec, seeds)
        for row, seed in zip(batch, seeds):
            assert tuple(int(x) for x in row) == sample_indep_string(spec, seed)

    def test_degenerate_position(self):
        spec = IndepSourceSpec(((0.0, 1.0), (1.0, 0.0)))
        batch = sample_indep_batch(spec, range(20))
        assert (batch[:, 0] == 1).all()
        assert (batch[:, 1] == 0).all()

    def test_marginals(self):
        eta = (0.7, 0.3)
        spec = IndepSourceSpec.iid(eta, 2)
        k = 100_000
        batch = sample_indep_batch(spec, range(k))
        for j in range(2):
            freq = (batch[:, j] == 1).mean()
            sigma = math.sqrt(0.3 * 0.7 / k)
            assert abs(freq - 0.3) < 4.0 * sigma


class TestSumModLaw:
    def test_embed_pads(self):
        law = embed_mod((0.7, 0.3), 4)
        assert law == pytest.approx([0.7, 0.3, 0.0, 0.0])

    def test_embed_wraps(self):
        law = embed_mod((0.1, 0.2, 0.3, 0.2, 0.2), 3)
        assert law == pytest.approx([0.1 + 0.2, 0.2 + 0.2, 0.3])

    def test_known_binary_case(self):
        spec = IndepSourceSpec.iid((0.7, 0.3), 3)
        law = exact_sum_mod_distribution(spec, 2)
        # P(even) = 0.7^3 + 3 * 0.7 * 0.3^2 = 0.532
        assert law == pytest.approx([0.532, 0.468], abs=1e-12)

    def test_matches_brute_force(self):
        rng = CounterRng(0xCAFE)
        for _ in range(25):
            n = 1 + rng.randrange(4)
            m = 2 + rng.randrange(4)
            a = 2 + rng.randrange(3)
            etas = []
            for _ in range(n):
                w = [rng.uniform() + 1e-3 for _ in range(a)]
                s = sum(w)
                etas.append(tuple(x / s for x in w))
            spec = IndepSourceSpec(tuple(etas))
            law = exact_sum_mod_distribution(spec, m)
            brute = np.zeros(m)
            for combo in itertools.product(*(range(a) for _ in range(n))):
                p = 1.0
                for i, sym in enumerate(combo):
                    p *= etas[i][sym]
                brute[sum(combo) % m] += p
            assert law == pytest.approx(brute, abs=1e-12)

    def test_sampler_agrees_with_exact_law(self):
        spec = IndepSourceSpec.iid((0.5, 0.2, 0.3), 4)
        m = 3
        law = exact_sum_mod_distribution(spec, m)
        k = 100_000
        batch = sample_indep_batch(spec, range(k))
        sums = batch.sum(axis=1) % m
        freqs = np.bincount(sums, minlength=m) / k
        for r in range(m):
            sigma = math.sqrt(law[r] * (1 - law[r]) / k)
            assert abs(freqs[r] - law[r]) < 4.0 * sigma

    def test_sum_law_as_dist(self):
        spec = IndepSourceSpec.iid((0.7, 0.3), 3)
        dist = sum_law_as_dist(exact_sum_mod_distribution(spec, 2))
        assert dist.labels == ("0", "1")
        assert dist.probs == pytest.approx((0.532, 0.468))

    def test_sum_law_as_dist_rejects_zeros(self):
        law = np.array([1.0, 0.0])
        with pytest.raises(SourceError):
            sum_law_as_dist(law)
