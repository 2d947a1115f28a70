import math

import numpy as np
import pytest
from scipy import stats

from partcache import (
    AllocationError,
    NetworkRealization,
    RlncAllocation,
    SimulationError,
    SubfilePlacement,
    UcAllocation,
    coupon_pmf,
    sample_network,
    sic_decode_chain,
    simulate_baseline,
    simulate_rlnc,
    simulate_uc,
    stp_rlnc,
    stp_uc_file,
    subfile_cover_index,
    water_fill_mu,
    zipf_popularity,
)
from partcache.simulate import _strip_covers
from .conftest import make_cfg


# ----------------------------------------------------------- field sampling


def test_sample_network_shape(cfg5):
    rng = np.random.default_rng(1)
    counts = []
    for _ in range(200):
        net = sample_network(cfg5, rng, disc_scale=10.0)
        assert net.bs_distances.size == net.fading_powers.size
        assert net.bs_distances.size >= cfg5.sic_capability + 1
        assert np.all(np.diff(net.bs_distances) > 0)
        assert np.all(net.fading_powers > 0)
        counts.append(net.bs_distances.size)
    # station count is Poisson with mean disc_scale**2 (minus rare redraws)
    assert 90.0 < float(np.mean(counts)) < 110.0


def test_sample_network_rejects_bad_scale(cfg5):
    with pytest.raises(ValueError):
        sample_network(cfg5, np.random.default_rng(0), disc_scale=0.0)


def test_nearest_distance_distribution(cfg5):
    # d1^2 is exponential: F(x) = 1 - exp(-pi * density * x^2)
    rng = np.random.default_rng(7)
    draws = np.array(
        [sample_network(cfg5, rng, disc_scale=8.0).bs_distances[0] for _ in range(5000)]
    )
    lam = cfg5.bs_density

    def cdf(x):
        return 1.0 - np.exp(-math.pi * lam * np.asarray(x) ** 2)

    assert stats.kstest(draws, cdf).pvalue > 0.01


# ------------------------------------------------------------- decode chain


def crafted(distances, fading):
    return NetworkRealization(np.asarray(distances, float), np.asarray(fading, float))


def test_chain_passes_with_dominant_station(cfg5):
    net = crafted([1.0, 1000.0], [1.0, 1.0])
    assert sic_decode_chain(net, 1, 1, cfg5) is True


def test_chain_fails_under_heavy_interference(cfg5):
    net = crafted([1.0, 2.0], [1.0e-9, 1.0e9])
    assert sic_decode_chain(net, 1, 1, cfg5) is False


def test_chain_two_stage_outcomes(cfg5):
    # stage thresholds: 2**(1/2) - 1 per piece of a half-size split
    ok = crafted([1.0, 2.0, 1000.0], [1.0, 1.0, 1.0e-6])
    assert sic_decode_chain(ok, 2, 2, cfg5) is True
    # the near station is too weak once the second stage must be peeled first
    weak_near = crafted([1.0, 2.0, 1000.0], [0.02, 1.0, 1.0e-6])
    assert sic_decode_chain(weak_near, 2, 2, cfg5) is False


def test_chain_validation(cfg5):
    net = crafted([1.0, 2.0, 3.0, 4.0], [1.0] * 4)
    with pytest.raises(ValueError):
        sic_decode_chain(net, 2, 0, cfg5)
    with pytest.raises(ValueError):
        sic_decode_chain(net, 2, cfg5.sic_capability + 1, cfg5)
    with pytest.raises(AllocationError):
        sic_decode_chain(net, 0, 1, cfg5)
    with pytest.raises(SimulationError):
        sic_decode_chain(crafted([1.0, 2.0], [1.0, 1.0]), 2, 2, cfg5)


# ------------------------------------------------------------ piece covers


def test_cover_index_cases():
    assert subfile_cover_index((0, 1), 2) == 2
    assert subfile_cover_index((0, 0, 1), 2) == 3
    assert subfile_cover_index((1, 1), 2) == 0
    assert subfile_cover_index((0, 1, 0, 2), 3) == 4
    assert subfile_cover_index((), 2) == 0
    assert subfile_cover_index((0,), 1) == 1


def test_subfile_placement():
    placed = SubfilePlacement.from_draws(np.array([0, 1, 0]), 2)
    assert placed.piece_ids == (0, 1, 0)
    assert placed.first_cover == 2
    with pytest.raises(ValueError):
        SubfilePlacement.from_draws((0, 2), 2)


@pytest.mark.parametrize("splits", [2, 3])
def test_cover_index_distribution(splits):
    # frequency of each first-cover position against the closed-form pmf
    serve, m = 5, 100_000
    rng = np.random.default_rng(10 + splits)
    draws = rng.integers(0, splits, size=(m, serve))
    counts = np.zeros(serve + 1, dtype=np.int64)
    for row in draws:
        counts[subfile_cover_index(row, splits)] += 1
    probs = [coupon_pmf(splits, i, serve) for i in range(splits, serve + 1)]
    probs.insert(0, 1.0 - math.fsum(probs))  # fail bin
    keep = [0] + list(range(splits, serve + 1))  # positions below splits are impossible
    assert int(counts.sum()) == m and not counts[1:splits].any()
    assert stats.chisquare(counts[keep], np.array(probs) * m).pvalue > 0.01


# ------------------------------------------------------------- determinism


def test_simulation_is_reproducible(cfg5, pop5):
    alloc = RlncAllocation((1, 2, 2, 0, 0))
    a = simulate_rlnc(alloc, pop5, cfg5, 400, 11, disc_scale=20.0)
    b = simulate_rlnc(alloc, pop5, cfg5, 400, 11, disc_scale=20.0)
    assert a == b
    c = simulate_rlnc(alloc, pop5, cfg5, 400, 12, disc_scale=20.0)
    assert c.overall.mean != a.overall.mean


def test_input_validation(cfg5, pop5):
    alloc = RlncAllocation((1, 1, 0, 0, 0))
    for bad_seed in (-1, 2**64, True, 1.5):
        with pytest.raises(ValueError):
            simulate_rlnc(alloc, pop5, cfg5, 10, bad_seed)
    with pytest.raises(ValueError):
        simulate_rlnc(alloc, pop5, cfg5, 0, 1)
    with pytest.raises(AllocationError):
        simulate_rlnc(RlncAllocation((1, 1, 1, 0, 0)), pop5, cfg5, 10, 1)
    with pytest.raises(ValueError):
        simulate_baseline(5, pop5, cfg5, 10, 1)


# ----------------------------------------------------- design equivalences


def test_whole_file_designs_coincide(cfg5, pop5):
    codes = (1, 1, 0, 0, 0)
    coded = simulate_rlnc(RlncAllocation(codes), pop5, cfg5, 3000, 21, disc_scale=25.0)
    uncoded = simulate_uc(
        UcAllocation(codes, (1, 1, 0, 0, 0)), pop5, cfg5, 3000, 21, disc_scale=25.0
    )
    assert coded == uncoded


def test_top_files_baseline_equals_coded_whole_files(cfg5, pop5):
    top = simulate_rlnc(
        RlncAllocation((1, 1, 0, 0, 0)), pop5, cfg5, 2000, 99, disc_scale=25.0
    )
    base = simulate_baseline(1, pop5, cfg5, 2000, 99, disc_scale=25.0)
    assert base == top.overall


def test_uncoded_split_matches_analysis(cfg5, pop5):
    alloc = UcAllocation((1, 2, 0, 0, 0), (1, 3, 0, 0, 0))
    out = simulate_uc(alloc, pop5, cfg5, 10_000, 404, disc_scale=50.0)
    want = stp_uc_file(2, 3, cfg5)
    assert abs(out.per_file[1].mean - want) <= 0.05
    assert abs(out.per_file[1].mean - want) <= 3.0 * out.per_file[1].ci_half_width


def test_per_file_recomposition(cfg5, pop5):
    alloc = RlncAllocation((1, 2, 2, 0, 0))
    out = simulate_rlnc(alloc, pop5, cfg5, 1500, 8, disc_scale=20.0)
    assert sum(pf.trials for pf in out.per_file) == 1500
    successes = sum(round(pf.mean * pf.trials) for pf in out.per_file)
    assert successes == round(out.overall.mean * 1500)
    analytic = stp_rlnc(alloc, pop5, cfg5).total
    assert abs(out.overall.mean - analytic) <= 3.0 * out.overall.ci_half_width + 0.01


# ---------------------------------------------------------------- baselines


def test_strip_membership_marginals():
    rng = np.random.default_rng(5)
    u = rng.random(100_000)
    for lo, width in ((0.0, 0.3), (0.7, 0.35), (1.3, 0.25), (1.9, 0.1)):
        hit = _strip_covers(u, lo, width, 2)
        tol = 4.0 * math.sqrt(width * (1.0 - width) / u.size)
        assert abs(float(hit.mean()) - width) < tol


def test_water_fill_anchors():
    from partcache import Popularity

    mu, widths = water_fill_mu(Popularity((0.5, 0.3, 0.2)), 2)
    assert mu == pytest.approx(0.0, abs=1e-8)
    assert widths == pytest.approx((1.0, 0.6, 0.4), abs=1e-8)
    mu, widths = water_fill_mu(Popularity((0.7, 0.2, 0.1)), 2)
    assert mu == pytest.approx(0.2, abs=1e-8)
    assert widths == pytest.approx((1.0, 0.6, 0.4), abs=1e-8)
    with pytest.raises(ValueError):
        water_fill_mu(Popularity((0.5, 0.3, 0.2)), 3)


def test_water_fill_properties():
    rng = np.random.default_rng(17)
    for _ in range(50):
        n = int(rng.integers(2, 30))
        k = int(rng.integers(1, n))
        pop = zipf_popularity(n, float(rng.uniform(0.1, 3.0)))
        mu, widths = water_fill_mu(pop, k)
        assert mu >= 0.0
        assert math.fsum(widths) == pytest.approx(k, abs=1e-9)
        assert all(0.0 < w <= 1.0 for w in widths)
        assert all(a >= b - 1e-12 for a, b in zip(widths, widths[1:]))


def test_graded_baseline_runs(cfg5, pop5):
    out = simulate_baseline(3, pop5, cfg5, 1500, 13, disc_scale=25.0)
    assert 0.0 <= out.mean <= 1.0
    assert out.trials == 1500
    # grading toward popular files cannot fall behind uniform caching by much
    uniform = simulate_baseline(2, pop5, cfg5, 1500, 13, disc_scale=25.0)
    assert out.mean >= uniform.mean - 3.0 * (out.ci_half_width + uniform.ci_half_width)
