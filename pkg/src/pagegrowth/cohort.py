"""Reliability labels and matched sampling of the comparison cohort.

Pages with a trust score of at least 60 are labeled reliable, the rest
questionable; unscored pages are excluded and reported. The matched
reliable sample minimizes the total Euclidean distance to the
questionable cohort in standardized (max followers, lifespan) space,
solved as an exact rectangular assignment problem. A greedy
nearest-neighbour variant is available for comparison.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date

import numpy as np
from scipy.optimize import linear_sum_assignment

from .aggregate import AggregatedSeries
from .ingest import PageMeta

RELIABLE_THRESHOLD = 60.0


class MatchInfeasibleError(ValueError):
    """Reliable pool smaller than the questionable cohort."""


@dataclass(frozen=True)
class ReliabilityLabel:
    page_id: str
    score: float
    label: str  # "reliable" | "questionable"

    def __post_init__(self):
        expected = "reliable" if self.score >= RELIABLE_THRESHOLD else "questionable"
        if self.label != expected:
            raise ValueError(f"label {self.label!r} inconsistent with score {self.score}")


@dataclass(frozen=True)
class MatchResult:
    """One-to-one pairing of each questionable page with a reliable page."""

    pairs: list[tuple[str, str]]  # (questionable_id, reliable_id)
    total_distance: float
    method: str = "assignment"


def label_pages(pages: dict[str, PageMeta]) -> tuple[list[ReliabilityLabel], list[str]]:
    """Threshold-60 labels for scored pages; unscored ids returned separately."""
    labels: list[ReliabilityLabel] = []
    unscored: list[str] = []
    for page_id in sorted(pages):
        meta = pages[page_id]
        if meta.newsguard_score is None:
            unscored.append(page_id)
            continue
        label = "reliable" if meta.newsguard_score >= RELIABLE_THRESHOLD else "questionable"
        labels.append(ReliabilityLabel(page_id=page_id, score=meta.newsguard_score, label=label))
    return labels, unscored


def page_features(
    meta: PageMeta, series: AggregatedSeries, end_date: date
) -> tuple[float, float] | None:
    """Raw matching features: (max observed followers, lifespan in days).

    Returns None when the page never carries a follower observation;
    such pages cannot participate in matching.
    """
    observed = [e.followers for e in series.entries if e.followers is not None]
    if not observed:
        return None
    lifespan = float((end_date - meta.created_at).days)
    return float(max(observed)), lifespan


def standardize_features(
    features: dict[str, tuple[float, float]],
) -> dict[str, np.ndarray]:
    """Z-score each feature over the pooled cohort.

    Followers (~1e5) and lifespan days (~1e3) live on incommensurate
    scales; standardization keeps the Euclidean distance from being
    dominated by the larger one.
    """
    if not features:
        return {}
    ids = sorted(features)
    mat = np.array([features[i] for i in ids], dtype=float)
    mean = mat.mean(axis=0)
    sd = mat.std(axis=0, ddof=0)
    sd[sd == 0.0] = 1.0  # constant feature: center only
    standardized = (mat - mean) / sd
    return {i: standardized[j] for j, i in enumerate(ids)}


def _distance_matrix(
    questionable: dict[str, np.ndarray], pool: dict[str, np.ndarray]
) -> tuple[list[str], list[str], np.ndarray]:
    q_ids = sorted(questionable)
    r_ids = sorted(pool)
    q = np.array([questionable[i] for i in q_ids], dtype=float)
    r = np.array([pool[i] for i in r_ids], dtype=float)
    diff = q[:, None, :] - r[None, :, :]
    return q_ids, r_ids, np.sqrt(np.sum(diff * diff, axis=2))


def match_cohorts(
    questionable: dict[str, np.ndarray], reliable_pool: dict[str, np.ndarray]
) -> MatchResult:
    """Minimum-total-distance one-to-one assignment, solved exactly.

    Every questionable page is paired with a distinct page from the
    reliable pool; the summed Euclidean distance is globally minimal
    over all such pairings.
    """
    if len(reliable_pool) < len(questionable):
        raise MatchInfeasibleError(
            f"reliable pool ({len(reliable_pool)}) smaller than questionable "
            f"cohort ({len(questionable)})"
        )
    if not questionable:
        raise ValueError("match_cohorts: empty questionable cohort")
    q_ids, r_ids, dist = _distance_matrix(questionable, reliable_pool)
    rows, cols = linear_sum_assignment(dist)
    pairs = [(q_ids[i], r_ids[j]) for i, j in zip(rows, cols)]
    pairs.sort()
    total = float(dist[rows, cols].sum())
    return MatchResult(pairs=pairs, total_distance=total, method="assignment")


def greedy_match(
    questionable: dict[str, np.ndarray], reliable_pool: dict[str, np.ndarray]
) -> MatchResult:
    """Greedy alternative: each questionable page takes the nearest unused
    reliable page, in questionable-id order. Kept for comparison with the
    exact assignment; its total distance is never smaller."""
    if len(reliable_pool) < len(questionable):
        raise MatchInfeasibleError(
            f"reliable pool ({len(reliable_pool)}) smaller than questionable "
            f"cohort ({len(questionable)})"
        )
    if not questionable:
        raise ValueError("greedy_match: empty questionable cohort")
    q_ids, r_ids, dist = _distance_matrix(questionable, reliable_pool)
    used: set[int] = set()
    pairs = []
    total = 0.0
    for i, q_id in enumerate(q_ids):
        order = np.argsort(dist[i])
        j = next(int(col) for col in order if int(col) not in used)
        used.add(j)
        pairs.append((q_id, r_ids[j]))
        total += float(dist[i, j])
    pairs.sort()
    return MatchResult(pairs=pairs, total_distance=total, method="greedy")


MATCH_HEADER = ["questionable_id", "reliable_id", "distance"]


def write_match_csv(
    result: MatchResult,
    questionable: dict[str, np.ndarray],
    pool: dict[str, np.ndarray],
    stream,
) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(MATCH_HEADER)
    for q_id, r_id in result.pairs:
        d = float(np.linalg.norm(questionable[q_id] - pool[r_id]))
        writer.writerow([q_id, r_id, format(d, ".12g")])


COHORT_SUMMARY_HEADER = [
    "cohort",
    "pages",
    "mean_max_followers",
    "mean_lifespan_days",
]


def write_cohort_summary_csv(
    questionable_raw: dict[str, tuple[float, float]],
    matched_raw: dict[str, tuple[float, float]],
    stream,
) -> None:
    """Counts and raw feature means per cohort (the matching scatter data)."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(COHORT_SUMMARY_HEADER)
    for name, feats in (("questionable", questionable_raw), ("reliable_matched", matched_raw)):
        if feats:
            mat = np.array(list(feats.values()), dtype=float)
            writer.writerow(
                [
                    name,
                    len(feats),
                    format(float(mat[:, 0].mean()), ".12g"),
                    format(float(mat[:, 1].mean()), ".12g"),
                ]
            )
        else:
            writer.writerow([name, 0, "", ""])
