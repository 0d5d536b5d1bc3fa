"""Link-level channel model: LOS/NLOS/blockage states, path loss, shadowing,
sectored antenna gains, and received power.

The model is a parameterized statistical stand-in for measurement-based
urban 28 GHz channels: a Friis intercept at 1 m, dual-slope distance
exponents, lognormal shadowing, an exponentially decaying LOS probability,
and a blockage (outage) state that is either a hard coverage radius or a
smooth exponential ramp. The antenna pattern is flat-top sectored
(mainlobe within a beamwidth, sidelobe floor outside).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .geometry import Region, distance

THERMAL_NOISE_DBM_PER_HZ = -174.0


class LinkState(IntEnum):
    LOS = 0
    NLOS = 1
    OUT = 2


@dataclass
class ChannelParams:
    """Propagation model parameters (defaults target dense-urban 28 GHz)."""

    carrier_ghz: float = 28.0
    pl_exponent_los: float = 2.0
    pl_exponent_nlos: float = 2.7
    pl_intercept_db: float = 61.4       # dB at 1 m (Friis at 28 GHz)
    shadow_sigma_los_db: float = 4.0
    shadow_sigma_nlos_db: float = 7.0
    outage_model: str = "hard_radius"   # "hard_radius" | "exponential"
    hard_coverage_area_km2: float = 0.03
    los_decay_per_m: float = 1.0 / 67.1
    outage_rise_per_m: float = 1.0 / 200.0  # exponential mode only

    def __post_init__(self):
        if self.outage_model not in ("hard_radius", "exponential"):
            raise ValueError(f"unknown outage_model {self.outage_model!r}")
        if self.shadow_sigma_los_db < 0 or self.shadow_sigma_nlos_db < 0:
            raise ValueError("shadowing sigmas must be >= 0")
        if self.hard_coverage_area_km2 <= 0:
            raise ValueError("hard_coverage_area_km2 must be > 0")
        if self.los_decay_per_m < 0 or self.outage_rise_per_m < 0:
            raise ValueError("decay rates must be >= 0")


@dataclass
class AntennaModel:
    """Flat-top sectored beam patterns for the BS and UE sides."""

    bs_mainlobe_gain_db: float = 20.0
    bs_sidelobe_gain_db: float = -10.0
    bs_beamwidth_deg: float = 10.0
    ue_mainlobe_gain_db: float = 10.0
    ue_sidelobe_gain_db: float = -10.0
    ue_beamwidth_deg: float = 30.0

    def __post_init__(self):
        for bw in (self.bs_beamwidth_deg, self.ue_beamwidth_deg):
            if not 0 < bw <= 360:
                raise ValueError("beamwidths must be in (0, 360]")
        if self.bs_mainlobe_gain_db <= self.bs_sidelobe_gain_db:
            raise ValueError("BS mainlobe must exceed sidelobe")
        if self.ue_mainlobe_gain_db <= self.ue_sidelobe_gain_db:
            raise ValueError("UE mainlobe must exceed sidelobe")


@dataclass
class LinkSample:
    """One realized link budget; rx power is the exact sum of its dB parts."""

    state: LinkState
    path_loss_db: float
    shadowing_db: float
    tx_gain_db: float
    rx_gain_db: float
    rx_power_dbm: float


def friis_intercept_db(carrier_ghz: float) -> float:
    """Free-space path loss at 1 m: 20*log10(4*pi*f/c)."""
    return 20.0 * math.log10(4.0 * math.pi * 1.0 * carrier_ghz * 1e9 / 299_792_458.0)


def outage_radius_m(params: ChannelParams) -> float:
    """Hard-blockage radius: the radius of a disc of the per-cell coverage area."""
    return 1000.0 * math.sqrt(params.hard_coverage_area_km2 / math.pi)


def _exact_pair(total, part):
    """Split `total` as (part, total - part) with an exactly representable sum.

    The smaller half is recomputed as the complement of the larger, which is
    exact by the Sterbenz lemma, so a + b == total holds bit-exactly.
    """
    other = total - part
    a = np.where(part >= other, part, total - other)
    b = np.where(part >= other, total - part, other)
    return a, b


def state_probabilities(distance_m, params: ChannelParams):
    """Return (p_los, p_nlos, p_out) for one or many distances.

    The triple sums to 1 exactly under the grouping ``p_los + (p_nlos + p_out)``.
    """
    d = np.asarray(distance_m, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be >= 0")
    p_los_raw = np.exp(-d * params.los_decay_per_m)
    if params.outage_model == "hard_radius":
        inside = d <= outage_radius_m(params)
        p_los, p_nlos = _exact_pair(1.0, p_los_raw)
        p_los = np.where(inside, p_los, 0.0)
        p_nlos = np.where(inside, p_nlos, 0.0)
        p_out = np.where(inside, 0.0, 1.0)
    else:
        p_los, rest = _exact_pair(1.0, p_los_raw)
        survive = np.exp(-d * params.outage_rise_per_m)
        p_nlos, p_out = _exact_pair(rest, rest * survive)
    if np.isscalar(distance_m):
        return float(p_los), float(p_nlos), float(p_out)
    return p_los, p_nlos, p_out


def draw_link_states(distance_m, params: ChannelParams, rng: np.random.Generator):
    """Draw LOS/NLOS/OUT states for an array of distances (one uniform per link)."""
    p_los, p_nlos, _ = state_probabilities(np.asarray(distance_m, dtype=float), params)
    u = rng.random(np.shape(distance_m))
    states = np.full(np.shape(distance_m), LinkState.OUT, dtype=np.int8)
    states[u < p_los + p_nlos] = LinkState.NLOS
    states[u < p_los] = LinkState.LOS
    return states

def link_state(distance_m: float, params: ChannelParams, rng: np.random.Generator) -> LinkState:
    """Draw the state of a single link."""
    if distance_m < 0:
        raise ValueError("distance must be >= 0")
    return LinkState(int(draw_link_states(np.float64(distance_m), params, rng)))


def path_loss_db(distance_m, state, params: ChannelParams):
    """Distance-power-law path loss in dB; distances are clamped below 1 m."""
    state_arr = np.asarray(state)
    if np.any(state_arr == LinkState.OUT):
        raise ValueError("path loss is undefined for blocked (OUT) links")
    d = np.maximum(np.asarray(distance_m, dtype=float), 1.0)
    exponent = np.where(state_arr == LinkState.LOS,
                        params.pl_exponent_los, params.pl_exponent_nlos)
    pl = params.pl_intercept_db + 10.0 * exponent * np.log10(d)
    return float(pl) if np.isscalar(distance_m) else pl


def beam_gain_db(angle_off_boresight_deg, mainlobe_db, sidelobe_db, beamwidth_deg):
    """Sectored pattern: mainlobe inside the half-beamwidth (inclusive), sidelobe outside."""
    a = np.abs(np.asarray(angle_off_boresight_deg, dtype=float)) % 360.0
    a = np.minimum(a, 360.0 - a)
    g = np.where(a <= beamwidth_deg / 2.0, mainlobe_db, sidelobe_db)
    return float(g) if np.isscalar(angle_off_boresight_deg) else g


def noise_power_dbm(bandwidth_hz: float, noise_figure_db: float) -> float:
    """Thermal noise power over a bandwidth, plus the receiver noise figure."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be > 0")
    return THERMAL_NOISE_DBM_PER_HZ + 10.0 * math.log10(bandwidth_hz) + noise_figure_db


def _angle_between_deg(bearing_a_deg: float, bearing_b_deg: float) -> float:
    d = abs(bearing_a_deg - bearing_b_deg) % 360.0
    return min(d, 360.0 - d)


def realize_link(
    bs_xy,
    ue_xy,
    serving: bool,
    tx_power_dbm: float,
    params: ChannelParams,
    antenna: AntennaModel,
    rng: np.random.Generator,
    region: Region | None = None,
) -> LinkSample:
    """Realize one BS->UE link.

    A serving link is boresight-aligned on both ends. An interfering link
    draws independent uniform boresight orientations for both antennas and
    evaluates the sectored pattern at the true link bearing. Draw order is
    state, shadowing, then orientations.
    """
    if region is None:
        region = Region(width_km=math.inf, height_km=math.inf, wraparound=False)
        d_km = math.hypot(ue_xy[0] - bs_xy[0], ue_xy[1] - bs_xy[1])
    else:
        d_km = distance(bs_xy, ue_xy, region)
    d_m = 1000.0 * d_km
    state = link_state(d_m, params, rng)
    if state == LinkState.OUT:
        return LinkSample(state, math.inf, 0.0, 0.0, 0.0, -math.inf)
    pl = path_loss_db(d_m, state, params)
    sigma = params.shadow_sigma_los_db if state == LinkState.LOS else params.shadow_sigma_nlos_db
    shadow = float(rng.normal(0.0, sigma))
    if serving:
        tx_gain = antenna.bs_mainlobe_gain_db
        rx_gain = antenna.ue_mainlobe_gain_db
    else:
        bearing = math.degrees(math.atan2(ue_xy[1] - bs_xy[1], ue_xy[0] - bs_xy[0]))
        tx_gain = beam_gain_db(
            _angle_between_deg(rng.uniform(0.0, 360.0), bearing),
            antenna.bs_mainlobe_gain_db, antenna.bs_sidelobe_gain_db,
            antenna.bs_beamwidth_deg)
        rx_gain = beam_gain_db(
            _angle_between_deg(rng.uniform(0.0, 360.0), bearing + 180.0),
            antenna.ue_mainlobe_gain_db, antenna.ue_sidelobe_gain_db,
            antenna.ue_beamwidth_deg)
    rx = tx_power_dbm + tx_gain + rx_gain - pl - shadow
    return LinkSample(state, pl, shadow, float(tx_gain), float(rx_gain), rx)


@dataclass
class LinkTable:
    """All BS->UE links of one drop, realized in bulk.

    `serving_rx_dbm` is the long-term received power with boresight-aligned
    gains on both ends (the blind association metric); blocked links are -inf.
    Interference gains are geometry-dependent and computed at SINR time.
    """

    region: Region
    bs_xy: np.ndarray          # (B, 2) km
    ue_xy: np.ndarray          # (U, 2) km
    tx_power_dbm: float
    params: ChannelParams
    antenna: AntennaModel
    dist_m: np.ndarray         # (B, U)
    state: np.ndarray          # (B, U) int8
    path_loss_db: np.ndarray   # (B, U), +inf where OUT
    shadowing_db: np.ndarray   # (B, U), 0 where OUT
    serving_rx_dbm: np.ndarray  # (B, U), -inf where OUT

    @property
    def n_bs(self) -> int:
        return len(self.bs_xy)

    @property
    def n_ue(self) -> int:
        return len(self.ue_xy)

    @classmethod
    def realize(cls, bs_xy, ue_xy, region, tx_power_dbm, params, antenna, seed: int) -> "LinkTable":
        from .geometry import pairwise_distance_km

        rng = np.random.default_rng(seed)
        bs_xy = np.asarray(bs_xy, dtype=float).reshape(-1, 2)
        ue_xy = np.asarray(ue_xy, dtype=float).reshape(-1, 2)
        n_ue = len(ue_xy)
        dist_m = 1000.0 * pairwise_distance_km(bs_xy, ue_xy, region)

        # Transmitters mounted on one tower share the propagation path, so
        # state and shadowing are drawn per site (exact coordinate match)
        # and expanded to co-located BSs. With all-distinct positions this
        # is a relabeling of the per-BS draw.
        sites, site_of_bs = np.unique(bs_xy, axis=0, return_inverse=True)
        site_of_bs = site_of_bs.reshape(-1)
        site_dist_m = 1000.0 * pairwise_distance_km(sites, ue_xy, region)
        site_states = draw_link_states(site_dist_m, params, rng)
        site_sigma = np.where(site_states == LinkState.LOS,
                              params.shadow_sigma_los_db, params.shadow_sigma_nlos_db)
        site_shadow = rng.normal(0.0, 1.0, (len(sites), n_ue)) * site_sigma
        states = site_states[site_of_bs]
        shadow = site_shadow[site_of_bs]

        blocked = states == LinkState.OUT
        exponent = np.where(states == LinkState.LOS,
                            params.pl_exponent_los, params.pl_exponent_nlos)
        pl = params.pl_intercept_db + 10.0 * exponent * np.log10(np.maximum(dist_m, 1.0))
        pl[blocked] = np.inf
        shadow[blocked] = 0.0
        rx = (tx_power_dbm + antenna.bs_mainlobe_gain_db + antenna.ue_mainlobe_gain_db
              - pl - shadow)
        return cls(region, bs_xy, ue_xy, tx_power_dbm, params, antenna,
                   dist_m, states, pl, shadow, rx)
