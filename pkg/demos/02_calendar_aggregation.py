"""Calendar windows and per-window follower representative points.

Engagement is summed inside each window; followers, already cumulative,
take one observed value per window: earliest date of the week, closest
date to the month's 15th, latest date of the quarter.
"""

from datetime import datetime, timezone

from pagegrowth.aggregate import Timescale, aggregate_engagement, window_of
from pagegrowth.ingest import PostRecord

print("window_of examples:")
for ts, scale in [
    (datetime(2020, 2, 29, 23, 59, 59, tzinfo=timezone.utc), Timescale.M),
    (datetime(2021, 1, 1, tzinfo=timezone.utc), Timescale.W),
    (datetime(2018, 5, 10, 12, tzinfo=timezone.utc), Timescale.Q),
]:
    w = window_of(ts, scale)
    print(f"  {ts.isoformat()} at {scale.value} -> [{w.start}, {w.end})")

posts = [
    PostRecord("page", "a", datetime(2021, 6, 8, 9, tzinfo=timezone.utc), 40,
               followers_at_posting=1000),       # Tuesday
    PostRecord("page", "b", datetime(2021, 6, 11, 15, tzinfo=timezone.utc), 25,
               followers_at_posting=1100),       # Friday, same ISO week
    PostRecord("page", "c", datetime(2021, 6, 14, 8, tzinfo=timezone.utc), 80,
               followers_at_posting=1150),       # closest to the 15th
    PostRecord("page", "d", datetime(2021, 6, 29, 8, tzinfo=timezone.utc), 10,
               followers_at_posting=1300),       # latest in the quarter
]

for scale in (Timescale.D, Timescale.W, Timescale.M, Timescale.Q):
    series = aggregate_engagement(posts, scale)
    print(f"\n{scale.value} series:")
    for e in series.entries:
        print(f"  [{e.window.start} .. {e.window.end}): engagement={e.engagement} "
              f"posts={e.post_count} followers={e.followers}")

total = sum(p.total_interactions for p in posts)
for scale in Timescale:
    assert aggregate_engagement(posts, scale).total_engagement() == total
print(f"\nconservation holds at every timescale: window sums = {total}")
