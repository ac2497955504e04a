import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hetcache import (
    CacheContents,
    CachingStrategy,
    NetworkConfig,
    PopularityProfile,
    miss_probability,
    offloading_loss,
    sample_cache,
    uniform_strategy,
    zipf_profile,
)
from hetcache.streams import generator

from conftest import make_config, sbs_density


# --- NetworkConfig validation ---------------------------------------------

def test_config_rejects_bad_values():
    with pytest.raises(ValueError):
        make_config(lambda_u=-0.1)
    with pytest.raises(ValueError):
        make_config(R=0.0)
    with pytest.raises(ValueError):
        make_config(N=0)
    with pytest.raises(ValueError):
        make_config(M=0)
    with pytest.raises(ValueError):
        make_config(formula_mode="bogus")


def test_config_derived_quantities():
    cfg = make_config(lambda_s=sbs_density(2.0), gamma=1.0, R=10.0, B=3.0, R0=1.5)
    assert cfg.sbs_neighbor_mean == pytest.approx(2.0)
    assert cfg.coverage_area == pytest.approx(100 * math.pi)
    assert cfg.backhaul_time == pytest.approx(2.0)


# --- simplex types ----------------------------------------------------------

def test_profile_normalizes_near_one():
    p = PopularityProfile([0.5, 0.5 + 1e-10])
    assert abs(p.p.sum() - 1.0) < 1e-12


def test_profile_rejects_bad_sum():
    with pytest.raises(ValueError):
        PopularityProfile([0.5, 0.6])
    with pytest.raises(ValueError):
        PopularityProfile([0.7, -0.3, 0.6])


def test_profile_rejects_negative_entries():
    with pytest.raises(ValueError):
        PopularityProfile([1.2, -0.2])


def test_profile_immutable():
    p = PopularityProfile([0.4, 0.6])
    with pytest.raises(ValueError):
        p.p[0] = 0.9


def test_profile_json_roundtrip():
    p = PopularityProfile([0.25, 0.75])
    assert PopularityProfile.from_json(p.to_json()) == p
    assert json.loads(p.to_json()) == [0.25, 0.75]


def test_strategy_json_roundtrip():
    s = CachingStrategy([0.1, 0.9])
    assert CachingStrategy.from_json(s.to_json()) == s


@given(st.lists(st.floats(0.01, 10.0), min_size=1, max_size=12))
def test_profile_accepts_any_normalized_vector(weights):
    arr = np.asarray(weights)
    p = PopularityProfile(arr / arr.sum())
    assert abs(p.p.sum() - 1.0) < 1e-12
    assert np.all(p.p >= 0)


# --- zipf --------------------------------------------------------------------

def test_zipf_uniform_when_s_zero():
    assert np.allclose(zipf_profile(4, 0.0).p, 0.25)


def test_zipf_hand_value():
    p = zipf_profile(2, 1.0)
    assert p.p[0] == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert p.p[1] == pytest.approx(1.0 / 3.0, abs=1e-15)


def test_zipf_single_file():
    assert zipf_profile(1, 7.3).p[0] == 1.0


def test_zipf_rejects_zero_files():
    with pytest.raises(ValueError):
        zipf_profile(0, 1.0)


# --- cache sampling ----------------------------------------------------------

def test_sample_cache_degenerate():
    cache = sample_cache(CachingStrategy([1.0, 0.0]), 3, generator(0))
    assert list(cache.entries) == [1, 1, 1]
    cache = sample_cache(CachingStrategy([0.0, 1.0, 0.0]), 2, generator(0))
    assert list(cache.entries) == [2, 2]


def test_sample_cache_frequency():
    rng = generator(1)
    strategy = CachingStrategy([0.5, 0.5])
    draws = np.array([sample_cache(strategy, 1, rng).entries[0] for _ in range(100_000)])
    freq = np.mean(draws == 1)
    se = math.sqrt(0.25 / draws.size)
    assert abs(freq - 0.5) <= 3 * se


def test_cache_contents_allows_duplicates():
    cc = CacheContents([2, 2, 1])
    assert len(cc) == 3
    assert 2 in cc and 3 not in cc


# --- miss probability and loss -----------------------------------------------

def test_miss_probability_never_cached():
    cfg = make_config(lambda_s=sbs_density(2.0), M=3)
    assert miss_probability(0.0, cfg) == 1.0


def test_miss_probability_always_cached_is_void_probability():
    cfg = make_config(lambda_s=sbs_density(2.0), M=3)
    assert miss_probability(1.0, cfg) == pytest.approx(math.exp(-2.0), abs=1e-15)


def test_miss_probability_hand_value():
    # pi=0.5, M=2, c=1 -> exp(-0.75)
    cfg = make_config(lambda_s=sbs_density(1.0), M=2)
    assert miss_probability(0.5, cfg) == pytest.approx(0.4723665527410147, abs=1e-12)


def test_miss_probability_rejects_out_of_range():
    cfg = make_config()
    with pytest.raises(ValueError):
        miss_probability(1.5, cfg)
    with pytest.raises(ValueError):
        miss_probability(-0.1, cfg)


def test_miss_probability_main_text_mode():
    cfg = make_config(lambda_u=2.0 / math.pi, M=2, formula_mode="main_text")
    # literal published form: exp(-lambda_u*pi*gamma^2*(1-pi)^M)
    assert miss_probability(0.5, cfg) == pytest.approx(math.exp(-0.5), abs=1e-15)
    assert miss_probability(1.0, cfg) == 1.0  # unphysical, but literal


def test_offloading_loss_hand_values():
    cfg = make_config(lambda_s=sbs_density(1.0), M=1, N=2)
    profile = PopularityProfile([0.8, 0.2])
    assert offloading_loss(CachingStrategy([0.5, 0.5]), profile, cfg) == pytest.approx(
        0.6065306597126334, abs=1e-12
    )
    assert offloading_loss(CachingStrategy([1.0, 0.0]), profile, cfg) == pytest.approx(
        0.4943035529371539, abs=1e-12
    )


def test_offloading_loss_no_sbs():
    cfg = make_config(lambda_s=0.0, N=3, M=2, B=2.0)
    profile = zipf_profile(3, 1.0)
    loss = offloading_loss(uniform_strategy(3), profile, cfg)
    assert loss == pytest.approx(cfg.backhaul_time, abs=1e-12)


def test_offloading_loss_length_mismatch():
    cfg = make_config(N=3)
    with pytest.raises(ValueError):
        offloading_loss(uniform_strategy(2), zipf_profile(3, 0.5), cfg)


def test_loss_bounded_by_backhaul_time():
    rng = generator(9)
    for _ in range(50):
        n = int(rng.integers(1, 8))
        cfg = make_config(
            lambda_s=float(rng.uniform(0, 3)),
            gamma=float(rng.uniform(0.2, 3)),
            M=int(rng.integers(1, 5)),
            N=n,
            B=float(rng.uniform(0.5, 4)),
            R0=float(rng.uniform(0.5, 4)),
        )
        profile = PopularityProfile(rng.dirichlet(np.ones(n)))
        strategy = CachingStrategy(rng.dirichlet(np.ones(n)))
        loss = offloading_loss(strategy, profile, cfg)
        assert 0.0 <= loss <= cfg.backhaul_time + 1e-15


def test_loss_monotone_in_density_radius_and_cache_size():
    rng = generator(10)
    for _ in range(25):
        n = int(rng.integers(2, 7))
        profile = PopularityProfile(rng.dirichlet(np.ones(n)))
        strategy = CachingStrategy(rng.dirichlet(np.ones(n)))
        base = dict(
            lambda_s=float(rng.uniform(0.1, 2)),
            gamma=float(rng.uniform(0.3, 2)),
            M=int(rng.integers(1, 4)),
            N=n,
        )
        loss = offloading_loss(strategy, profile, make_config(**base))
        for key, larger in (
            ("lambda_s", base["lambda_s"] * 1.7),
            ("gamma", base["gamma"] * 1.4),
            ("M", base["M"] + 1),
        ):
            grown = dict(base, **{key: larger})
            assert offloading_loss(strategy, profile, make_config(**grown)) <= loss + 1e-12


def test_miss_probability_strictly_decreasing():
    cfg = make_config(lambda_s=sbs_density(1.5), M=2)
    grid = np.linspace(0.0, 1.0, 21)
    values = [miss_probability(x, cfg) for x in grid]
    assert all(a > b for a, b in zip(values, values[1:]))
