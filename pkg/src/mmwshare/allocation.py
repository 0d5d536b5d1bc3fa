"""User association, bandwidth splitting, SINR, and per-user rate.

Two allocators are provided:

- the blind allocator: each UE attaches to the accessible BS with the
  highest long-term received power, ignoring interference;
- a brute-force coordinated upper bound: exhaustive search over all
  UE -> accessible-BS assignments, re-evaluating loads, bandwidth splits
  and interference for each, maximizing a declared objective.

Interference is deterministic given positions and an association: every
loaded BS aims its mainlobe at its lowest-index attached UE, every victim
UE aims at its serving BS, and off-boresight angles come from the true
(torus) geometry. Transmitters mounted at the victim's serving site are
scheduled orthogonally by the shared site and add no interference (this
only triggers under co-located deployments, where the victim's receive
mainlobe would otherwise point straight at the co-sited array). Per-UE
SINR has a scalar reference implementation (`compute_sinr`,
ascending-index accumulation in linear units) that the search optimizes;
a vectorized equivalent handles Monte Carlo volume.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .channel import (THERMAL_NOISE_DBM_PER_HZ, LinkState, LinkTable,
                      beam_gain_db, noise_power_dbm)
from .geometry import wrapped_delta

NONE = -1   # serving_bs value for an unassociated UE

OBJECTIVES = ("sum_rate", "sum_log_rate")


class InstanceSizeError(ValueError):
    """Raised when an instance exceeds the brute-force search limits."""


@dataclass
class RateParams:
    eta: float = 0.5            # Shannon capacity rescaling
    duty_factor: float = 0.5    # TDD/half-duplex airtime share
    overhead_beta: float = 0.2  # control-plane overhead fraction
    target_rate_bps: float = 1e7  # below this a user counts as in outage

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("eta must be in (0, 1]")
        if not 0.0 < self.duty_factor <= 1.0:
            raise ValueError("duty_factor must be in (0, 1]")
        if not 0.0 <= self.overhead_beta < 1.0:
            raise ValueError("overhead_beta must be in [0, 1)")
        if self.target_rate_bps < 0:
            raise ValueError("target_rate_bps must be >= 0")


@dataclass
class Association:
    """UE -> BS assignment with per-UE bandwidth and per-BS load."""

    serving_bs: np.ndarray      # (U,) int64, NONE where unassociated
    ue_bandwidth_hz: np.ndarray  # (U,) float, 0 where unassociated
    load: np.ndarray            # (B,) int64


@dataclass
class UserResult:
    sinr_db: float              # -inf for an unassociated user
    rate_bps: float
    in_outage: bool


def associate_blind(links: LinkTable, access_bu: np.ndarray) -> Association:
    """Attach each UE to its strongest accessible BS, interference ignored.

    The metric is long-term received power with shadowing (blocked links
    are -inf). Ties break to the lowest BS index; a UE whose accessible
    links are all blocked stays unassociated.
    """
    n_bs, n_ue = links.n_bs, links.n_ue
    serving = np.full(n_ue, NONE, dtype=np.int64)
    if n_bs > 0 and n_ue > 0:
        rx = np.where(access_bu, links.serving_rx_dbm, -np.inf)
        best = np.argmax(rx, axis=0)   # first max wins: lowest index on ties
        reachable = ~np.isneginf(rx[best, np.arange(n_ue)])
        serving[reachable] = best[reachable]
    load = np.bincount(serving[serving != NONE], minlength=n_bs)
    return Association(serving, np.zeros(n_ue), load.astype(np.int64))


def split_bandwidth(assoc: Association, pool_hz: float,
                    full_bandwidth: bool = False) -> Association:
    """Divide each BS's pool equally among its attached UEs.

    With `full_bandwidth` every served UE is optimistically granted the
    whole pool (no per-BS conservation in that mode).
    """
    if pool_hz <= 0:
        raise ValueError("pool bandwidth must be > 0")
    served = assoc.serving_bs != NONE
    w = np.zeros(len(assoc.serving_bs))
    if full_bandwidth:
        w[served] = pool_hz
    else:
        w[served] = pool_hz / assoc.load[assoc.serving_bs[served]]
    return Association(assoc.serving_bs.copy(), w, assoc.load.copy())


def interferer_targets(serving_bs: np.ndarray, n_bs: int) -> np.ndarray:
    """Per BS, the UE its mainlobe tracks: the lowest-index attached UE (-1 if idle)."""
    targets = np.full(n_bs, -1, dtype=np.int64)
    for u in range(len(serving_bs) - 1, -1, -1):
        s = serving_bs[u]
        if s != NONE:
            targets[s] = u
    return targets


def _angle_between_deg(v, w) -> float:
    nv = math.hypot(v[0], v[1])
    nw = math.hypot(w[0], w[1])
    if nv == 0.0 or nw == 0.0:
        return 0.0   # coincident points: treat as boresight-aligned
    c = (v[0] * w[0] + v[1] * w[1]) / (nv * nw)
    return math.degrees(math.acos(max(-1.0, min(1.0, c))))


def compute_sinr(ue: int, assoc: Association, links: LinkTable,
                 cochannel_bu: np.ndarray, noise_figure_db: float) -> float:
    """Linear SINR of one served UE under a full association.

    Signal is the boresight-aligned serving-link power; noise is taken over
    the UE's allocated bandwidth; interference sums every loaded co-channel
    BS off the serving site with both sectored gains evaluated at the true
    geometry, accumulated in ascending BS index in linear milliwatts.
    """
    s = int(assoc.serving_bs[ue])
    if s == NONE:
        raise ValueError(f"UE {ue} has no serving BS")
    ant = links.antenna
    targets = interferer_targets(assoc.serving_bs, links.n_bs)
    sig_mw = 10.0 ** (float(links.serving_rx_dbm[s, ue]) / 10.0)
    acc = 10.0 ** (noise_power_dbm(float(assoc.ue_bandwidth_hz[ue]), noise_figure_db) / 10.0)
    site_x, site_y = float(links.bs_xy[s, 0]), float(links.bs_xy[s, 1])
    to_serving = wrapped_delta(links.ue_xy[ue], links.bs_xy[s], links.region)
    for b in range(links.n_bs):
        if assoc.load[b] == 0 or not cochannel_bu[b, ue]:
            continue
        if links.bs_xy[b, 0] == site_x and links.bs_xy[b, 1] == site_y:
            continue   # serving site (the server itself or a co-sited array)
        if links.state[b, ue] == LinkState.OUT:
            continue
        bore = wrapped_delta(links.bs_xy[b], links.ue_xy[targets[b]], links.region)
        to_victim = wrapped_delta(links.bs_xy[b], links.ue_xy[ue], links.region)
        gt = beam_gain_db(_angle_between_deg(bore, to_victim),
                          ant.bs_mainlobe_gain_db, ant.bs_sidelobe_gain_db,
                          ant.bs_beamwidth_deg)
        to_interferer = wrapped_delta(links.ue_xy[ue], links.bs_xy[b], links.region)
        gr = beam_gain_db(_angle_between_deg(to_serving, to_interferer),
                          ant.ue_mainlobe_gain_db, ant.ue_sidelobe_gain_db,
                          ant.ue_beamwidth_deg)
        rx_dbm = (links.tx_power_dbm + gt + gr
                  - float(links.path_loss_db[b, ue]) - float(links.shadowing_db[b, ue]))
        acc += 10.0 ** (rx_dbm / 10.0)
    return sig_mw / acc


def user_rate(gamma, bandwidth_hz, params: RateParams):
    """Per-user rate: eta * duty * (1 - overhead) * W * log2(1 + gamma)."""
    if np.any(np.asarray(gamma) < 0):
        raise ValueError("gamma must be >= 0")
    r = (params.eta * params.duty_factor * (1.0 - params.overhead_beta)
         * bandwidth_hz * np.log2(1.0 + gamma))
    return float(r) if np.isscalar(gamma) and np.isscalar(bandwidth_hz) else r


def network_sinr(links: LinkTable, assoc: Association, cochannel_bu: np.ndarray,
                 noise_figure_db: float) -> np.ndarray:
    """Vectorized linear SINR for every UE (0 where unassociated).

    Same model as `compute_sinr`; linear sums run in numpy order, so
    agreement with the scalar path is to rounding, not bit-exact.
    """
    n_bs, n_ue = links.n_bs, links.n_ue
    gamma = np.zeros(n_ue)
    served = assoc.serving_bs != NONE
    if n_bs == 0 or not served.any():
        return gamma
    ant = links.antenna
    s = assoc.serving_bs
    targets = interferer_targets(s, n_bs)
    active = assoc.load > 0

    delta = wrapped_delta(links.bs_xy[:, None, :], links.ue_xy[None, :, :],
                          links.region)          # (B, U, 2), bs -> ue
    norm = np.hypot(delta[..., 0], delta[..., 1])

    bore = delta[np.arange(n_bs), np.clip(targets, 0, None)]   # (B, 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        cos_bs = (np.einsum("bk,buk->bu", bore, delta)
                  / (np.hypot(bore[:, 0], bore[:, 1])[:, None] * norm))
    ang_bs = np.degrees(np.arccos(np.clip(np.nan_to_num(cos_bs, nan=1.0), -1.0, 1.0)))
    gt = np.where(ang_bs <= ant.bs_beamwidth_deg / 2.0,
                  ant.bs_mainlobe_gain_db, ant.bs_sidelobe_gain_db)

    # UE boresight: towards serving BS. Both UE-side vectors are negated
    # bs->ue deltas, so the sign cancels in the cosine.
    s_safe = np.where(served, s, 0)
    bore_ue = delta[s_safe, np.arange(n_ue)]                   # (U, 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        cos_ue = (np.einsum("uk,buk->bu", bore_ue, delta)
                  / (np.hypot(bore_ue[:, 0], bore_ue[:, 1])[None, :] * norm))
    ang_ue = np.degrees(np.arccos(np.clip(np.nan_to_num(cos_ue, nan=1.0), -1.0, 1.0)))
    gr = np.where(ang_ue <= ant.ue_beamwidth_deg / 2.0,
                  ant.ue_mainlobe_gain_db, ant.ue_sidelobe_gain_db)

    rx_dbm = (links.tx_power_dbm + gt + gr
              - links.path_loss_db - links.shadowing_db)       # -inf where OUT
    # serving-site mask subsumes b == s and drops co-sited arrays
    same_site = ((links.bs_xy[:, 0][:, None] == links.bs_xy[s_safe, 0][None, :])
                 & (links.bs_xy[:, 1][:, None] == links.bs_xy[s_safe, 1][None, :]))
    interferes = cochannel_bu & active[:, None] & served[None, :] & ~same_site
    i_mw = np.where(interferes, 10.0 ** (rx_dbm / 10.0), 0.0).sum(axis=0)

    w = assoc.ue_bandwidth_hz[served]
    noise_dbm = THERMAL_NOISE_DBM_PER_HZ + 10.0 * np.log10(w) + noise_figure_db
    noise_mw = 10.0 ** (noise_dbm / 10.0)
    sig_mw = 10.0 ** (links.serving_rx_dbm[s[served], np.flatnonzero(served)] / 10.0)
    gamma[served] = sig_mw / (noise_mw + i_mw[served])
    return gamma


def assignment_objective(links: LinkTable, serving_bs: np.ndarray,
                         cochannel_bu: np.ndarray, pool_hz: float,
                         params: RateParams, noise_figure_db: float,
                         objective: str = "sum_rate",
                         full_bandwidth: bool = False) -> float:
    """Objective value of a complete assignment, via the scalar SINR path.

    sum_rate adds user rates in ascending UE index; sum_log_rate adds
    natural logs of the rates of assigned UEs (-inf if any such rate is 0).
    Unassociated UEs contribute rate 0 and are skipped by sum_log_rate.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    load = np.bincount(serving_bs[serving_bs != NONE], minlength=links.n_bs).astype(np.int64)
    assoc = split_bandwidth(
        Association(np.asarray(serving_bs, dtype=np.int64), np.zeros(links.n_ue), load),
        pool_hz, full_bandwidth)
    total = 0.0
    for u in range(links.n_ue):
        if assoc.serving_bs[u] == NONE:
            continue
        gamma = compute_sinr(u, assoc, links, cochannel_bu, noise_figure_db)
        r = user_rate(gamma, float(assoc.ue_bandwidth_hz[u]), params)
        if objective == "sum_rate":
            total += r
        else:
            total += math.log(r) if r > 0.0 else -math.inf
    return total


def coordinated_upper_bound(
    links: LinkTable,
    access_bu: np.ndarray,
    cochannel_bu: np.ndarray,
    pool_hz: float,
    params: RateParams,
    noise_figure_db: float,
    max_ues: int = 8,
    max_bs_per_ue: int = 4,
    objective: str = "sum_rate",
    full_bandwidth: bool = False,
) -> tuple[Association, float]:
    """Exhaustive-search association maximizing the declared objective.

    Every UE ranges over all of its accessible BSs (a UE whose accessible
    links are all blocked is fixed unassociated); loads, bandwidth splits
    and interference are recomputed per assignment. Ties resolve to the
    lexicographically smallest assignment. Instances beyond `max_ues` UEs
    or `max_bs_per_ue` accessible BSs for some UE raise InstanceSizeError,
    signalling that only the blind allocator is practical.
    """
    n_ue = links.n_ue
    if n_ue > max_ues:
        raise InstanceSizeError(f"{n_ue} UEs exceeds the search limit of {max_ues}")
    candidates: list[list[int]] = []
    enumerated: list[int] = []
    fixed = np.full(n_ue, NONE, dtype=np.int64)
    for u in range(n_ue):
        acc = np.flatnonzero(access_bu[:, u])
        if len(acc) > max_bs_per_ue:
            raise InstanceSizeError(
                f"UE {u} has {len(acc)} accessible BSs, limit {max_bs_per_ue}")
        if len(acc) == 0 or np.all(links.state[acc, u] == LinkState.OUT):
            continue   # forced unassociated
        enumerated.append(u)
        candidates.append([int(b) for b in acc])

    best_assignment = fixed
    best_value = None
    # with no enumerated UEs, product() yields one empty combo: the fixed assignment
    for combo in itertools.product(*candidates):
        serving = fixed.copy()
        if enumerated:
            serving[enumerated] = combo
        value = assignment_objective(
            links, serving, cochannel_bu, pool_hz, params, noise_figure_db,
            objective, full_bandwidth)
        if best_value is None or value > best_value:
            # strict comparison: the first maximizer in product order wins,
            # i.e. the lexicographically smallest assignment
            best_value = value
            best_assignment = serving
    load = np.bincount(best_assignment[best_assignment != NONE],
                       minlength=links.n_bs).astype(np.int64)
    assoc = split_bandwidth(
        Association(best_assignment, np.zeros(n_ue), load), pool_hz, full_bandwidth)
    return assoc, float(best_value)
