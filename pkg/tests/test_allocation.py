"""Association, bandwidth splits, SINR, rates, and the brute-force bound."""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from mmwshare import allocation
from mmwshare.allocation import (NONE, Association, InstanceSizeError,
                                 RateParams, assignment_objective,
                                 associate_blind, compute_sinr,
                                 coordinated_upper_bound, interferer_targets,
                                 network_sinr, split_bandwidth, user_rate)
from mmwshare.channel import (AntennaModel, ChannelParams, LinkState,
                              LinkTable, noise_power_dbm, path_loss_db)
from mmwshare.geometry import Region, wrapped_delta

FLAT = Region(1.0, 1.0, wraparound=False)


def make_table(bs_xy, ue_xy, region=FLAT, state=None, shadow=None, tx=30.0):
    """Hand-built link table: all-LOS, zero shadowing unless overridden."""
    bs_xy = np.asarray(bs_xy, dtype=float)
    ue_xy = np.asarray(ue_xy, dtype=float)
    params, antenna = ChannelParams(), AntennaModel()
    delta = wrapped_delta(bs_xy[:, None, :], ue_xy[None, :, :], region)
    dist_m = 1000.0 * np.hypot(delta[..., 0], delta[..., 1])
    state = (np.zeros(dist_m.shape, dtype=np.int8) if state is None
             else np.asarray(state, dtype=np.int8))
    shadow = (np.zeros(dist_m.shape) if shadow is None
              else np.asarray(shadow, dtype=float))
    ok = state != LinkState.OUT
    pl = np.full(dist_m.shape, np.inf)
    pl[ok] = path_loss_db(dist_m[ok], state[ok], params)
    sh = np.where(ok, shadow, 0.0)
    rx = np.where(ok, tx + antenna.bs_mainlobe_gain_db + antenna.ue_mainlobe_gain_db
                  - pl - sh, -np.inf)
    return LinkTable(region, bs_xy, ue_xy, tx, params, antenna,
                     dist_m, state, pl, sh, rx)


def test_blind_association_nearest_wins():
    links = make_table([[0.2, 0.5], [0.8, 0.5]], [[0.3, 0.5], [0.75, 0.5]])
    assoc = associate_blind(links, np.ones((2, 2), bool))
    assert_array_equal(assoc.serving_bs, [0, 1])
    assert_array_equal(assoc.load, [1, 1])
    assert_array_equal(assoc.ue_bandwidth_hz, [0.0, 0.0])


def test_blind_association_tie_breaks_low_index():
    # co-sited arrays present identical received powers
    links = make_table([[0.5, 0.5], [0.5, 0.5]], [[0.52, 0.5]])
    assoc = associate_blind(links, np.ones((2, 1), bool))
    assert assoc.serving_bs[0] == 0


def test_blind_association_respects_access():
    links = make_table([[0.2, 0.5], [0.8, 0.5]], [[0.3, 0.5]])
    access = np.array([[False], [True]])
    assoc = associate_blind(links, access)
    assert assoc.serving_bs[0] == 1


def test_blind_association_all_blocked():
    links = make_table([[0.2, 0.5]], [[0.3, 0.5]], state=[[LinkState.OUT]])
    assoc = associate_blind(links, np.ones((1, 1), bool))
    assert assoc.serving_bs[0] == NONE
    assert_array_equal(assoc.load, [0])
    w = split_bandwidth(assoc, 1e9)
    assert w.ue_bandwidth_hz[0] == 0.0


def test_split_bandwidth_conserves_pool():
    # loads of 1, 2 and 4 divide exactly in binary floating point
    serving = np.array([0, 1, 1, 2, 2, 2, 2])
    load = np.array([1, 2, 4])
    assoc = split_bandwidth(Association(serving, np.zeros(7), load), 1e9)
    for b in range(3):
        assert assoc.ue_bandwidth_hz[serving == b].sum() == 1e9
    assert_array_equal(assoc.ue_bandwidth_hz,
                       [1e9, 5e8, 5e8, 2.5e8, 2.5e8, 2.5e8, 2.5e8])


def test_split_bandwidth_full_mode_and_errors():
    assoc = Association(np.array([0, NONE]), np.zeros(2), np.array([1]))
    full = split_bandwidth(assoc, 1e9, full_bandwidth=True)
    assert_array_equal(full.ue_bandwidth_hz, [1e9, 0.0])
    with pytest.raises(ValueError):
        split_bandwidth(assoc, 0.0)


def test_interferer_targets_lowest_index():
    serving = np.array([2, 0, 0, NONE, 1])
    assert_array_equal(interferer_targets(serving, 4), [1, 4, 0, -1])


def test_sinr_worked_example():
    # serving BS 100 m west of the UE; interferer also 100 m out but 10 deg
    # off the UE boresight (inside the 30 deg receive lobe), with its own
    # mainlobe tracking a UE due north, 100 deg away from the victim.
    ang = math.radians(170.0)
    bs1 = (0.1 + 0.1 * math.cos(ang), 0.1 * math.sin(ang))
    links = make_table([[0.0, 0.0], bs1],
                       [[0.1, 0.0], [bs1[0], bs1[1] + 0.05]])
    assoc = Association(np.array([0, 1]), np.array([5e8, 5e8]),
                        np.array([1, 1]))
    # oracle, in dBm: serving 30+20+10-101.4 = -41.4; interferer sidelobe
    # out, mainlobe in: 30-10+10-101.4 = -71.4; noise over 500 MHz, NF 7
    noise_dbm = -174.0 + 10.0 * math.log10(5e8) + 7.0
    expected = 10.0 ** -4.14 / (10.0 ** (noise_dbm / 10.0) + 10.0 ** -7.14)
    gamma = compute_sinr(0, assoc, links, np.ones((2, 2), bool), 7.0)
    assert_allclose(gamma, expected, rtol=1e-9)
    assert abs(10.0 * math.log10(gamma) - 29.44) < 0.01


def test_sinr_without_interferers_is_snr():
    links = make_table([[0.0, 0.0]], [[0.1, 0.0]])
    assoc = Association(np.array([0]), np.array([5e8]), np.array([1]))
    gamma = compute_sinr(0, assoc, links, np.ones((1, 1), bool), 7.0)
    sig = 10.0 ** (float(links.serving_rx_dbm[0, 0]) / 10.0)
    assert gamma == sig / 10.0 ** (noise_power_dbm(5e8, 7.0) / 10.0)


def test_sinr_unassociated_ue_is_error():
    links = make_table([[0.0, 0.0]], [[0.1, 0.0]])
    assoc = Association(np.array([NONE]), np.zeros(1), np.array([0]))
    with pytest.raises(ValueError):
        compute_sinr(0, assoc, links, np.ones((1, 1), bool), 7.0)


def test_same_site_transmitter_adds_no_interference():
    # a loaded co-channel array on the serving tower is scheduled
    # orthogonally: the victim's SINR stays exactly at S/N
    links = make_table([[0.2, 0.2], [0.2, 0.2]], [[0.25, 0.2], [0.21, 0.2]])
    assoc = Association(np.array([0, 1]), np.array([5e8, 5e8]),
                        np.array([1, 1]))
    coch = np.ones((2, 2), bool)
    gamma = compute_sinr(0, assoc, links, coch, 7.0)
    sig = 10.0 ** (float(links.serving_rx_dbm[0, 0]) / 10.0)
    assert gamma == sig / 10.0 ** (noise_power_dbm(5e8, 7.0) / 10.0)
    # a barely off-site transmitter does interfere
    shifted = make_table([[0.2, 0.2], [0.2 + 1e-6, 0.2]],
                         [[0.25, 0.2], [0.21, 0.2]])
    assert compute_sinr(0, assoc, shifted, coch, 7.0) < gamma


def test_interference_ignores_access_rights():
    # a co-channel BS the victim may not attach to still degrades it
    links = make_table([[0.2, 0.5], [0.4, 0.5]],
                       [[0.25, 0.5], [0.41, 0.5]])
    access = np.array([[True, False], [False, True]])
    assoc = split_bandwidth(associate_blind(links, access), 5e8)
    both = compute_sinr(0, assoc, links, np.ones((2, 2), bool), 7.0)
    masked = compute_sinr(0, assoc, links,
                          np.array([[True, True], [False, True]]), 7.0)
    assert both < masked


def test_network_sinr_matches_scalar():
    rng = np.random.default_rng(17)
    region = Region(0.3, 0.3)
    for trial in range(6):
        n_bs = int(rng.integers(2, 7))
        n_ue = int(rng.integers(3, 12))
        bs = rng.random((n_bs, 2)) * 0.3
        ue = rng.random((n_ue, 2)) * 0.3
        if trial == 0:
            bs[1] = bs[0]   # exercise the co-sited branch
        links = LinkTable.realize(bs, ue, region, 30.0, ChannelParams(),
                                  AntennaModel(), seed=int(rng.integers(1 << 30)))
        assoc = split_bandwidth(associate_blind(links, np.ones((n_bs, n_ue), bool)), 1e9)
        coch = rng.random((n_bs, n_ue)) < 0.8
        vec = network_sinr(links, assoc, coch, 7.0)
        for u in range(n_ue):
            s = assoc.serving_bs[u]
            if s == NONE:
                assert vec[u] == 0.0
                continue
            assert_allclose(vec[u], compute_sinr(u, assoc, links, coch, 7.0),
                            rtol=1e-9)
            # interference can only hurt: capped by SNR over the UE's own slice
            noise = 10.0 ** (noise_power_dbm(float(assoc.ue_bandwidth_hz[u]), 7.0) / 10.0)
            snr = 10.0 ** (float(links.serving_rx_dbm[s, u]) / 10.0) / noise
            assert vec[u] <= snr * (1.0 + 1e-12)


def test_user_rate_examples():
    p = RateParams()
    assert user_rate(1.0, 1e9, p) == 2e8
    assert user_rate(15.0, 1e9, p) == 8e8
    assert user_rate(0.0, 1e9, p) == 0.0
    # linear in bandwidth, bit for bit
    assert user_rate(3.7, 2e8, p) == 2.0 * user_rate(3.7, 1e8, p)
    with pytest.raises(ValueError):
        user_rate(-0.1, 1e9, p)
    r = user_rate(np.array([1.0, 15.0]), 1e9, p)
    assert_array_equal(r, [2e8, 8e8])


def test_rate_params_validation():
    with pytest.raises(ValueError):
        RateParams(eta=0.0)
    with pytest.raises(ValueError):
        RateParams(duty_factor=1.5)
    with pytest.raises(ValueError):
        RateParams(overhead_beta=1.0)


def test_assignment_objective_matches_manual_sum():
    links = make_table([[0.1, 0.1], [0.25, 0.1]],
                       [[0.12, 0.1], [0.24, 0.1], [0.26, 0.1]])
    serving = np.array([0, 1, 1])
    coch = np.ones((2, 3), bool)
    params = RateParams()
    got = assignment_objective(links, serving, coch, 1e9, params, 7.0)
    assoc = split_bandwidth(Association(serving, np.zeros(3), np.array([1, 2])), 1e9)
    manual = 0.0
    for u in range(3):
        g = compute_sinr(u, assoc, links, coch, 7.0)
        manual += user_rate(g, float(assoc.ue_bandwidth_hz[u]), params)
    assert got == manual
    with pytest.raises(ValueError):
        assignment_objective(links, serving, coch, 1e9, params, 7.0,
                             objective="max_min")


def test_sum_log_objective():
    links = make_table([[0.1, 0.1], [0.25, 0.1]],
                       [[0.12, 0.1], [0.26, 0.1]],
                       state=[[0, 0], [0, LinkState.OUT]])
    coch = np.ones((2, 2), bool)
    params = RateParams()
    # unassociated UEs are skipped, not counted as zero rate
    one = assignment_objective(links, np.array([0, NONE]), coch, 1e9, params,
                               7.0, objective="sum_log_rate")
    assoc = split_bandwidth(Association(np.array([0, NONE]), np.zeros(2),
                                        np.array([1, 0])), 1e9)
    g = compute_sinr(0, assoc, links, coch, 7.0)
    assert one == math.log(user_rate(g, 1e9, params))
    # an assigned UE on a blocked link has rate 0: objective collapses
    bad = assignment_objective(links, np.array([0, 1]), coch, 1e9, params,
                               7.0, objective="sum_log_rate")
    assert bad == -math.inf


# --- independent mirror of the scalar evaluation chain, for the search oracle


def _wrap(p, q, region):
    dx = float(q[0]) - float(p[0])
    dy = float(q[1]) - float(p[1])
    if region.wraparound:
        dx -= region.width_km * round(dx / region.width_km)
        dy -= region.height_km * round(dy / region.height_km)
    return dx, dy


def _angle(v, w):
    nv = math.hypot(v[0], v[1])
    nw = math.hypot(w[0], w[1])
    if nv == 0.0 or nw == 0.0:
        return 0.0
    c = (v[0] * w[0] + v[1] * w[1]) / (nv * nw)
    return math.degrees(math.acos(max(-1.0, min(1.0, c))))


def _gain(angle, main, side, bw):
    a = abs(angle) % 360.0
    a = min(a, 360.0 - a)
    return main if a <= bw / 2.0 else side


def _oracle_value(links, serving, coch, pool_hz, params, nf, objective):
    ant = links.antenna
    load = [0] * links.n_bs
    for s in serving:
        if s != NONE:
            load[s] += 1
    targets = [-1] * links.n_bs
    for u in range(links.n_ue - 1, -1, -1):
        if serving[u] != NONE:
            targets[serving[u]] = u
    total = 0.0
    for u in range(links.n_ue):
        s = serving[u]
        if s == NONE:
            continue
        w = pool_hz / load[s]
        sig = 10.0 ** (float(links.serving_rx_dbm[s, u]) / 10.0)
        acc = 10.0 ** ((-174.0 + 10.0 * math.log10(w) + nf) / 10.0)
        sx, sy = float(links.bs_xy[s, 0]), float(links.bs_xy[s, 1])
        to_serving = _wrap(links.ue_xy[u], links.bs_xy[s], links.region)
        for b in range(links.n_bs):
            if load[b] == 0 or not coch[b, u]:
                continue
            if float(links.bs_xy[b, 0]) == sx and float(links.bs_xy[b, 1]) == sy:
                continue
            if links.state[b, u] == LinkState.OUT:
                continue
            bore = _wrap(links.bs_xy[b], links.ue_xy[targets[b]], links.region)
            to_victim = _wrap(links.bs_xy[b], links.ue_xy[u], links.region)
            gt = _gain(_angle(bore, to_victim), ant.bs_mainlobe_gain_db,
                       ant.bs_sidelobe_gain_db, ant.bs_beamwidth_deg)
            to_interferer = _wrap(links.ue_xy[u], links.bs_xy[b], links.region)
            gr = _gain(_angle(to_serving, to_interferer), ant.ue_mainlobe_gain_db,
                       ant.ue_sidelobe_gain_db, ant.ue_beamwidth_deg)
            rx = (links.tx_power_dbm + gt + gr
                  - float(links.path_loss_db[b, u]) - float(links.shadowing_db[b, u]))
            acc += 10.0 ** (rx / 10.0)
        gamma = sig / acc
        r = (params.eta * params.duty_factor * (1.0 - params.overhead_beta)
             * w * math.log2(1.0 + gamma))
        if objective == "sum_rate":
            total += r
        else:
            total += math.log(r) if r > 0.0 else -math.inf
    return total


def _oracle_search(links, access, coch, pool_hz, params, nf, objective):
    """Depth-first enumeration, candidates ascending, strict improvement."""
    order, cand = [], []
    for u in range(links.n_ue):
        acc = [b for b in range(links.n_bs) if access[b, u]]
        if not acc or all(links.state[b, u] == LinkState.OUT for b in acc):
            continue
        order.append(u)
        cand.append(acc)
    serving = [NONE] * links.n_ue
    best = {"v": None, "a": list(serving)}

    def rec(i):
        if i == len(order):
            v = _oracle_value(links, serving, coch, pool_hz, params, nf, objective)
            if best["v"] is None or v > best["v"]:
                best["v"], best["a"] = v, list(serving)
            return
        for b in cand[i]:
            serving[order[i]] = b
            rec(i + 1)
        serving[order[i]] = NONE

    rec(0)
    return np.array(best["a"], dtype=np.int64), best["v"]


def test_upper_bound_matches_independent_enumeration():
    rng = np.random.default_rng(91)
    region = Region(0.25, 0.25)
    params = RateParams()
    checked_none = 0
    for trial in range(30):
        n_bs = int(rng.integers(2, 5))
        n_ue = int(rng.integers(1, 6))
        bs = rng.random((n_bs, 2)) * 0.25
        ue = rng.random((n_ue, 2)) * 0.25
        links = LinkTable.realize(bs, ue, region, 30.0, ChannelParams(),
                                  AntennaModel(), seed=trial)
        access = rng.random((n_bs, n_ue)) < 0.85
        coch = np.ones((n_bs, n_ue), bool)
        objective = "sum_rate" if trial % 3 else "sum_log_rate"
        assoc, value = coordinated_upper_bound(
            links, access, coch, 1e9, params, 7.0, objective=objective)
        want_a, want_v = _oracle_search(links, access, coch, 1e9, params, 7.0,
                                        objective)
        assert value == want_v
        assert_array_equal(assoc.serving_bs, want_a)
        checked_none += int((assoc.serving_bs == NONE).any())
    assert checked_none > 0   # blocked/forced-unassociated cases did occur


def test_upper_bound_dominates_blind():
    rng = np.random.default_rng(31)
    region = Region(0.25, 0.25)
    params = RateParams()
    for trial in range(12):
        n_bs = int(rng.integers(2, 5))
        n_ue = int(rng.integers(2, 6))
        links = LinkTable.realize(rng.random((n_bs, 2)) * 0.25,
                                  rng.random((n_ue, 2)) * 0.25,
                                  region, 30.0, ChannelParams(), AntennaModel(),
                                  seed=100 + trial)
        access = np.ones((n_bs, n_ue), bool)
        coch = np.ones((n_bs, n_ue), bool)
        blind = associate_blind(links, access)
        blind_v = assignment_objective(links, blind.serving_bs, coch, 1e9,
                                       params, 7.0)
        _, ub_v = coordinated_upper_bound(links, access, coch, 1e9, params, 7.0)
        assert ub_v >= blind_v


def test_upper_bound_enumerates_every_combination(monkeypatch):
    links = make_table([[0.1, 0.1], [0.2, 0.1]],
                       [[0.11, 0.1], [0.15, 0.1], [0.19, 0.1]])
    calls = {"n": 0}
    real = allocation.assignment_objective

    def counting(*args, **kwargs):
        calls["n"] += 1
        return real(*args, **kwargs)

    monkeypatch.setattr(allocation, "assignment_objective", counting)
    coordinated_upper_bound(links, np.ones((2, 3), bool), np.ones((2, 3), bool),
                            1e9, RateParams(), 7.0)
    assert calls["n"] == 2 ** 3


def test_upper_bound_tie_breaks_lexicographically():
    # co-sited arrays give identical objectives; the search must keep BS 0
    links = make_table([[0.1, 0.1], [0.1, 0.1]], [[0.12, 0.1]])
    assoc, _ = coordinated_upper_bound(links, np.ones((2, 1), bool),
                                       np.ones((2, 1), bool), 1e9,
                                       RateParams(), 7.0)
    assert assoc.serving_bs[0] == 0


def test_upper_bound_forces_unassociated_when_blocked():
    links = make_table([[0.1, 0.1]], [[0.12, 0.1]], state=[[LinkState.OUT]])
    assoc, value = coordinated_upper_bound(links, np.ones((1, 1), bool),
                                           np.ones((1, 1), bool), 1e9,
                                           RateParams(), 7.0)
    assert assoc.serving_bs[0] == NONE
    assert value == 0.0


def test_upper_bound_size_refusals():
    big_ue = make_table([[0.1, 0.1]], [[0.1 + 0.01 * u, 0.1] for u in range(9)])
    with pytest.raises(InstanceSizeError):
        coordinated_upper_bound(big_ue, np.ones((1, 9), bool),
                                np.ones((1, 9), bool), 1e9, RateParams(), 7.0)
    big_bs = make_table([[0.1, 0.01 * b] for b in range(5)], [[0.1, 0.02]])
    with pytest.raises(InstanceSizeError):
        coordinated_upper_bound(big_bs, np.ones((5, 1), bool),
                                np.ones((5, 1), bool), 1e9, RateParams(), 7.0)
