"""How much does blind association leave on the table?

Small dense instances (a 200 m square, up to 6 UEs) are the only place
the exhaustive coordinated search is tractable; the gap it reports upper
bounds what any smarter association could recover.
"""
from dataclasses import replace

from mmwshare.config import default_config
from mmwshare.experiment import run_gap
from mmwshare.geometry import Region
from mmwshare.metrics import cdf, percentile
from mmwshare.scenario import Scenario

cfg = replace(default_config(), region=Region(0.2, 0.2),
              scenario=Scenario("Spectrum"))
rows = run_gap(cfg, n_instances=100)

gaps = [r.gap_percent for r in rows]
positive = [g for g in gaps if g > 0]
print(f"{len(rows)} instances, {len(positive)} with a positive gap")
print(f"median gap {percentile(cdf(gaps), 0.5):.2f}%, max {max(gaps):.2f}%")
if positive:
    print(f"median positive gap {percentile(cdf(positive), 0.5):.2f}%")

worst = max(rows, key=lambda r: r.gap_percent)
print(f"\nworst instance #{worst.instance_id}: blind "
      f"{worst.blind_sum_rate_bps / 1e6:.1f} Mb/s vs coordinated "
      f"{worst.ub_sum_rate_bps / 1e6:.1f} Mb/s")
