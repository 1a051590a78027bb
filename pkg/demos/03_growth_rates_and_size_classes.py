"""From windowed series to growth-rate samples and size-class bins.

A growth sample needs two calendar-adjacent windows with positive values;
gaps break the chain. Pages are binned by the earlier window's follower
count into the standard classes (10K-50K up to 500K-5M), or by quartiles
of prior engagement after a 5th-95th percentile trim.
"""

from datetime import date

import numpy as np

from pagegrowth.aggregate import Timescale, aggregate_dataset
from pagegrowth.growth import (
    DEFAULT_FOLLOWER_CLASSES,
    class_bins,
    engagement_quartile_bins,
    pooled_growth_samples,
    trim,
)
from pagegrowth.ingest import Dataset
from pagegrowth.synth import GeneratorConfig, generate

result = generate(
    GeneratorConfig(n_pages=30, start=date(2018, 1, 1), end=date(2019, 1, 1),
                    posts_per_day=1.0),
    seed=7,
)
dataset = Dataset(
    posts=sorted(result.posts, key=lambda p: (p.page_id, p.timestamp, p.post_id)),
    pages=result.pages,
)
weekly = aggregate_dataset(dataset, Timescale.W)
samples, skips = pooled_growth_samples(weekly, "engagement")
print(f"{len(samples)} weekly engagement growth samples "
      f"({skips.total} degenerate pairs skipped)")

logs = np.array([s.log_growth for s in samples])
print(f"log growth: mean {logs.mean():+.4f}, sd {logs.std():.4f}")

print("\ntrim keeps the 5th..95th percentile band:")
trimmed = trim(logs)
print(f"  {len(logs)} -> {len(trimmed)} values, "
      f"range [{trimmed.min():+.3f}, {trimmed.max():+.3f}]")

print("\nfollower size classes (by the earlier window's followers):")
for label, members in class_bins(samples, DEFAULT_FOLLOWER_CLASSES).items():
    print(f"  {label:>10}: {len(members)} samples")

print("\nquartile bins of prior engagement (trimmed covariate):")
for label, members in engagement_quartile_bins(samples).items():
    priors = [s.prior_engagement for s in members]
    print(f"  {label}: {len(members)} samples, priors {min(priors)}..{max(priors)}")

chain = samples[:3]
import math
if len(chain) == 3:
    telescoped = math.exp(sum(s.log_growth for s in chain))
    print(f"\ntelescoping: exp(sum of 3 log rates) = {telescoped:.6f} "
          f"(= last/first engagement ratio)")
