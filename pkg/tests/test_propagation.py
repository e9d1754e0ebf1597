import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mimochan.errors import ConfigurationError, DomainError
from mimochan.propagation import (LinkGeometry, ScenarioParams, determine_los,
                                  large_scale_loss_db, load_scenario_params,
                                  p_los, path_loss_db, shadowing_db)
from mimochan.seeds import substream


def test_scenario_params_validation():
    p = ScenarioParams("UMi", "LoS", a_coef=21.0, b_coef=32.4, c_coef=20.0,
                       sigma_sf=4.0, o2i_loss=0.0, eta=1.0)
    assert p.eta == 1.0
    with pytest.raises(ConfigurationError):
        ScenarioParams("UMi", "open", 21.0, 32.4, 20.0, 4.0)
    with pytest.raises(ConfigurationError):
        ScenarioParams("UMi", "LoS", 21.0, 32.4, 20.0, -1.0)
    with pytest.raises(ConfigurationError):
        ScenarioParams("UMi", "LoS", 21.0, 32.4, 20.0, 4.0, eta=0.0)


def test_link_geometry_validation():
    g = LinkGeometry(d3d=100.0, d2d=99.0, fc=3.5)
    assert g.d3d == 100.0
    with pytest.raises(DomainError):
        LinkGeometry(d3d=0.0, d2d=0.0, fc=3.5)
    with pytest.raises(DomainError):
        LinkGeometry(d3d=50.0, d2d=60.0, fc=3.5)
    with pytest.raises(DomainError):
        LinkGeometry(d3d=50.0, d2d=40.0, fc=0.1)


def test_default_params_cover_all_scenarios():
    table = load_scenario_params()
    scenarios = {"UMi", "UMa", "RMa", "InH-OfficeMixed", "InH-OfficeOpen"}
    assert {k[0] for k in table} == scenarios
    for scn in scenarios:
        assert table[(scn, "LoS")].eta == 1.0
        assert_allclose(table[(scn, "NLoS")].eta, 1.0 / 19.0, rtol=1e-15)
    umi = table[("UMi", "NLoS")]
    assert umi.a_coef == 35.3 and umi.sigma_sf == 7.82


def test_params_parser_rejects_bad_input(tmp_path):
    good = "[UMi LoS]\na = 21\nb = 32.4\nc = 20\nsigma_sf = 4\no2i = 0\neta = 1\n"
    path = tmp_path / "p.txt"
    path.write_text(good + "[UMi LoS]\na = 1\nb = 1\nc = 1\nsigma_sf = 1\no2i = 0\neta = 1\n")
    with pytest.raises(ConfigurationError, match="duplicate"):
        load_scenario_params(path)
    path.write_text(good.replace("eta = 1\n", ""))
    with pytest.raises(ConfigurationError, match="eta"):
        load_scenario_params(path)
    path.write_text(good + "tilt = 3\n")
    with pytest.raises(ConfigurationError, match="tilt"):
        load_scenario_params(path)
    path.write_text("a = 21\n" + good)
    with pytest.raises(ConfigurationError):
        load_scenario_params(path)


def test_path_loss_hand_value():
    params = load_scenario_params()[("UMi", "LoS")]
    link = LinkGeometry(d3d=100.0, d2d=100.0, fc=3.5)
    # 21*log10(100) + 32.4 + 20*log10(3.5)
    assert_allclose(path_loss_db(params, link), 42.0 + 32.4 + 20.0 * math.log10(3.5),
                    rtol=1e-14)


def test_path_loss_monotone_in_distance_and_frequency():
    params = load_scenario_params()[("UMa", "NLoS")]
    pl = [path_loss_db(params, LinkGeometry(d, d, 3.5)) for d in (50.0, 100.0, 400.0)]
    assert pl[0] < pl[1] < pl[2]
    lo = path_loss_db(params, LinkGeometry(100.0, 100.0, 3.0))
    hi = path_loss_db(params, LinkGeometry(100.0, 100.0, 30.0))
    assert_allclose(hi - lo, params.c_coef, rtol=1e-12)  # one decade in fc


def test_shadowing_disabled_is_exactly_zero():
    params = load_scenario_params()[("UMi", "NLoS")]
    rng = substream(3, "sf")
    assert shadowing_db(params, rng, enabled=False) == 0.0
    zero_sigma = ScenarioParams("UMi", "LoS", 21.0, 32.4, 20.0, 0.0)
    assert shadowing_db(zero_sigma, rng) == 0.0


def test_shadowing_matches_sigma():
    params = load_scenario_params()[("UMi", "NLoS")]
    rng = substream(4, "sf-stats")
    draws = np.array([shadowing_db(params, rng) for _ in range(20000)])
    assert_allclose(draws.std(), params.sigma_sf, rtol=0.03)
    assert_allclose(draws.mean(), 0.0, atol=0.2)


def test_large_scale_loss_composition():
    params = ScenarioParams("UMi", "NLoS", 35.3, 22.4, 21.3, 7.82, o2i_loss=9.0,
                            eta=1.0 / 19.0)
    link = LinkGeometry(d3d=120.0, d2d=115.0, fc=28.0)
    pl = path_loss_db(params, link)
    assert_allclose(large_scale_loss_db(params, link, shadow_db=3.5), pl - 3.5 + 9.0,
                    rtol=1e-14)


def test_p_los_hand_values():
    assert p_los("UMi", 10.0) == 1.0
    assert p_los("UMi", 18.0) == 1.0
    assert_allclose(p_los("UMi", 36.0), 0.6839397206, rtol=1e-9)
    assert_allclose(p_los("UMa", 63.0), 0.5484853151, rtol=1e-9)
    assert p_los("RMa", 10.0) == 1.0
    assert_allclose(p_los("RMa", 1010.0), math.exp(-1.0), rtol=1e-12)
    assert p_los("InH-OfficeMixed", 1.0) == 1.0
    assert_allclose(p_los("InH-OfficeMixed", 3.55), math.exp(-0.5), rtol=1e-12)
    assert_allclose(p_los("InH-OfficeMixed", 6.5), 0.32, rtol=1e-12)
    assert p_los("InH-OfficeOpen", 5.0) == 1.0
    assert_allclose(p_los("InH-OfficeOpen", 49.0), 0.53716, rtol=1e-4)
    with pytest.raises(ConfigurationError):
        p_los("Orbit", 10.0)


def test_p_los_decreases_with_distance():
    for scn in ("UMi", "UMa", "RMa", "InH-OfficeMixed", "InH-OfficeOpen"):
        probs = [p_los(scn, d) for d in (1.0, 20.0, 80.0, 300.0)]
        assert all(a >= b for a, b in zip(probs, probs[1:])), scn
        assert all(0.0 <= q <= 1.0 for q in probs)


def test_determine_los_overrides():
    rng = substream(5, "los")
    assert determine_los("UMi", 50.0, rng, override=1.0) == "LoS"
    assert determine_los("UMi", 50.0, rng, override=0.0) == "NLoS"
    assert determine_los("UMi", 5.0, rng) == "LoS"  # p = 1 inside the cutoff
    got = determine_los("UMi", 1e5, rng)
    assert got == "NLoS"  # p ~ 2e-4 at 100 km
    assert determine_los("UMi", 40.0, rng, override=lambda d: 1.0) == "LoS"
    with pytest.raises(ConfigurationError):
        determine_los("UMi", 50.0, rng, override=1.5)
    with pytest.raises(DomainError):
        determine_los("UMi", -1.0, rng)


def test_determine_los_bernoulli_rate():
    rng = substream(6, "los-rate")
    n = 20000
    hits = sum(determine_los("UMi", 36.0, rng) == "LoS" for _ in range(n))
    assert_allclose(hits / n, 0.6839397206, atol=0.01)
