"""Monte Carlo drop engine.

A drop realizes one scenario (deployments, link table, association, SINR,
rates) from a single seed. Scenario comparisons reuse the same drop seeds
for every kind, so all kinds see identical operator deployments and, where
geometry coincides, identical channel draws: differences between kinds are
purely structural (common random numbers).

Seed layout, all derived from the drop seed via mix_seed: operator m's
deployment uses k=m, its shared-BS selection k=M+m, the link table k=2M.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .allocation import (NONE, assignment_objective, associate_blind,
                         coordinated_upper_bound, network_sinr, split_bandwidth,
                         user_rate)
from .channel import LinkTable
from .config import ExperimentConfig
from .geometry import mix_seed
from .scenario import (SCENARIO_KINDS, RealizedScenario, Scenario, SpectrumPools,
                       build_scenario, shared_bs_selection)

ALLOCATORS = ("blind", "ub")


@dataclass
class DropOutcome:
    """Per-UE results of one drop (arrays over the full UE population)."""

    kind: str
    serving_bs: np.ndarray
    ue_bandwidth_hz: np.ndarray
    sinr_db: np.ndarray       # -inf for unassociated UEs
    rate_bps: np.ndarray
    in_outage: np.ndarray
    n_bs: int

    @property
    def n_ue(self) -> int:
        return len(self.rate_bps)


def run_drop(config: ExperimentConfig, kind: str, seed: int,
             allocator: str = "blind") -> DropOutcome:
    """Realize and evaluate one drop of `kind` from one seed."""
    if allocator not in ALLOCATORS:
        raise ValueError(f"unknown allocator {allocator!r}; expected one of {ALLOCATORS}")
    scn = replace(config.scenario, kind=kind)
    realized = build_scenario(scn, config.region, config.bs_density_per_km2,
                              config.ue_density_per_km2, seed)
    links = LinkTable.realize(
        realized.bs_xy, realized.ue_xy, config.region, config.tx_power_dbm,
        config.channel, config.antenna, mix_seed(seed, 2 * scn.num_operators))
    return _evaluate(config, realized, links, allocator)


def _evaluate(config: ExperimentConfig, realized: RealizedScenario,
              links: LinkTable, allocator: str) -> DropOutcome:
    access = realized.access_bu
    cochannel = realized.cochannel_bu
    if not config.interference_enabled:
        cochannel = np.zeros_like(cochannel)
    pool = realized.pool_bandwidth_hz
    if allocator == "ub":
        assoc, _ = coordinated_upper_bound(
            links, access, cochannel, pool, config.rate, config.noise_figure_db,
            full_bandwidth=config.full_bandwidth_per_ue)
    else:
        assoc = split_bandwidth(associate_blind(links, access), pool,
                                config.full_bandwidth_per_ue)
    gamma = network_sinr(links, assoc, cochannel, config.noise_figure_db)
    with np.errstate(divide="ignore"):
        sinr_db = 10.0 * np.log10(gamma)
    rate = user_rate(gamma, assoc.ue_bandwidth_hz, config.rate)
    return DropOutcome(realized.kind, assoc.serving_bs, assoc.ue_bandwidth_hz,
                       sinr_db, rate, rate < config.rate.target_rate_bps,
                       realized.n_bs)


@dataclass
class ScenarioRunResult:
    """Pooled per-UE samples for one kind over all drops, plus summary stats."""

    kind: str
    sinr_db: np.ndarray
    rate_bps: np.ndarray
    outage_fraction: float
    median_rate_bps: float
    p05_rate_bps: float
    median_sinr_db: float
    drops: int


def run_scenarios(config: ExperimentConfig, kinds=SCENARIO_KINDS,
                  allocator: str = "blind") -> dict[str, ScenarioRunResult]:
    """Run every requested kind over the same drop seeds and pool per-UE samples.

    Drop j uses seed mix_seed(master_seed, j) for every kind, so deployments
    are identical across kinds drop by drop.
    """
    from .metrics import cdf, outage_rate, percentile

    for kind in kinds:
        if kind not in SCENARIO_KINDS:
            raise ValueError(f"unknown scenario kind {kind!r}")
    results: dict[str, ScenarioRunResult] = {}
    for kind in kinds:
        sinr_parts, rate_parts = [], []
        for j in range(config.drops):
            out = run_drop(config, kind, mix_seed(config.master_seed, j), allocator)
            sinr_parts.append(out.sinr_db)
            rate_parts.append(out.rate_bps)
        sinr = np.concatenate(sinr_parts) if sinr_parts else np.empty(0)
        rate = np.concatenate(rate_parts) if rate_parts else np.empty(0)
        rate_cdf = cdf(rate)
        results[kind] = ScenarioRunResult(
            kind, sinr, rate,
            outage_rate(rate, config.rate.target_rate_bps),
            percentile(rate_cdf, 0.5), percentile(rate_cdf, 0.05),
            percentile(cdf(sinr), 0.5), config.drops)
    return results


@dataclass
class GapRow:
    instance_id: int
    blind_sum_rate_bps: float
    ub_sum_rate_bps: float
    gap_percent: float


def run_gap(config: ExperimentConfig, n_instances: int,
            max_ues: int = 6, max_bs_per_operator: int = 3,
            objective: str = "sum_rate") -> list[GapRow]:
    """Blind vs brute-force coordinated association on small random instances.

    Instance i draws its sizes and positions from mix_seed(master_seed, i):
    1..max_ues UEs with uniform operators and positions, and 1..max_bs
    BSs per operator. Both allocators are scored with the same scalar
    objective, so the upper bound dominates exactly.
    """
    scn = config.scenario
    m_ops = scn.num_operators
    rows = []
    for i in range(n_instances):
        inst_seed = mix_seed(config.master_seed, i)
        rng = np.random.default_rng(inst_seed)
        n_ue = int(rng.integers(1, max_ues + 1))
        n_bs_op = rng.integers(1, max_bs_per_operator + 1, size=m_ops)
        n_bs = int(n_bs_op.sum())
        size = np.array([config.region.width_km, config.region.height_km])
        bs_xy = rng.random((n_bs, 2)) * size
        ue_xy = rng.random((n_ue, 2)) * size
        bs_operator = np.repeat(np.arange(m_ops), n_bs_op)
        ue_operator = rng.integers(0, m_ops, size=n_ue)

        allowed = np.arange(m_ops)[:, None] == bs_operator[None, :]
        if scn.kind == "SpectrumAccess":
            offsets = np.cumsum([0, *n_bs_op])
            for m in range(m_ops):
                opened = shared_bs_selection(
                    int(n_bs_op[m]), scn.access_share_fraction,
                    mix_seed(inst_seed, m_ops + m))
                if len(opened):
                    allowed[np.ix_(np.flatnonzero(np.arange(m_ops) != m),
                                   offsets[m] + opened)] = True
        pools = SpectrumPools.for_scenario(scn)
        cochannel = pools.cochannel_mask(bs_operator, ue_operator)
        access = allowed[ue_operator].T
        links = LinkTable.realize(
            bs_xy, ue_xy, config.region, config.tx_power_dbm, config.channel,
            config.antenna, mix_seed(inst_seed, 2 * m_ops))

        blind = associate_blind(links, access)
        blind_val = assignment_objective(
            links, blind.serving_bs, cochannel, pools.pool_hz, config.rate,
            config.noise_figure_db, objective, config.full_bandwidth_per_ue)
        _, ub_val = coordinated_upper_bound(
            links, access, cochannel, pools.pool_hz, config.rate,
            config.noise_figure_db, objective=objective,
            full_bandwidth=config.full_bandwidth_per_ue)
        gap = 100.0 * (ub_val - blind_val) / ub_val if ub_val > 0 else 0.0
        rows.append(GapRow(i, blind_val, ub_val, gap))
    return rows
