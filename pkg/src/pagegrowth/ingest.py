"""Canonical data model and parsers for post-level and page-level input files.

Input formats
-------------
Posts CSV header (exact, ordered)::

    page_id,post_id,timestamp,likes,comments,shares,total_interactions,followers_at_posting

Pages CSV header::

    page_id,name,created_at,newsguard_score,language

Posts may also arrive as JSONL, one object per line with the same field
names. Empty strings (CSV) and missing/null keys (JSONL) encode absence.

Timestamps must be RFC 3339 with an explicit UTC offset; they are
normalized to UTC at second precision on ingest. Rows that fail
validation are quarantined into a rejection report rather than aborting
the parse; only structural problems (bad header, duplicate page ids,
nothing left after filtering) are fatal.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from typing import BinaryIO, Iterable

POSTS_HEADER = [
    "page_id",
    "post_id",
    "timestamp",
    "likes",
    "comments",
    "shares",
    "total_interactions",
    "followers_at_posting",
]

PAGES_HEADER = ["page_id", "name", "created_at", "newsguard_score", "language"]


class FatalParseError(Exception):
    """Structural problem that invalidates the whole input."""


class NoUsableDataError(FatalParseError):
    """Every row was rejected or the input was empty."""


@dataclass(frozen=True)
class PostRecord:
    """One post. Component counts are absent (None), never zero-filled,
    when the source row only carries the total."""

    page_id: str
    post_id: str
    timestamp: datetime  # aware, UTC, second precision
    total_interactions: int
    likes: int | None = None
    comments: int | None = None
    shares: int | None = None
    followers_at_posting: int | None = None


@dataclass(frozen=True)
class PageMeta:
    page_id: str
    name: str
    created_at: date
    newsguard_score: float | None = None
    language: str | None = None


@dataclass(frozen=True)
class RejectedRow:
    line: int
    reason: str


@dataclass
class RejectionReport:
    """Quarantine for rows that failed validation."""

    rows: list[RejectedRow] = field(default_factory=list)

    def add(self, line: int, reason: str) -> None:
        self.rows.append(RejectedRow(line, reason))

    def __len__(self) -> int:
        return len(self.rows)

    def extend(self, other: "RejectionReport") -> None:
        self.rows.extend(other.rows)


@dataclass
class Dataset:
    """Validated posts sorted by (page_id, timestamp, post_id) plus page metadata."""

    posts: list[PostRecord]
    pages: dict[str, PageMeta]

    def pages_with_posts(self) -> list[str]:
        return sorted({p.page_id for p in self.posts})

    def posts_by_page(self) -> dict[str, list[PostRecord]]:
        out: dict[str, list[PostRecord]] = {}
        for post in self.posts:
            out.setdefault(post.page_id, []).append(post)
        return out

    @property
    def end_date(self) -> date:
        """Last posting date in the dataset (used as the lifespan anchor)."""
        if not self.posts:
            raise NoUsableDataError("no usable data")
        return max(p.timestamp.date() for p in self.posts)


def _text_lines(stream: BinaryIO | bytes | str) -> io.TextIOBase:
    if isinstance(stream, bytes):
        return io.StringIO(stream.decode("utf-8"))
    if isinstance(stream, str):
        return io.StringIO(stream)
    return io.TextIOWrapper(stream, encoding="utf-8")


def parse_timestamp(raw: str) -> datetime:
    """RFC 3339 with explicit offset, normalized to UTC, truncated to seconds."""
    text = raw.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(text)
    except ValueError as exc:
        raise ValueError(f"unparsable timestamp {raw!r}") from exc
    if ts.tzinfo is None:
        raise ValueError(f"timestamp {raw!r} lacks a UTC offset")
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def _opt_count(raw, what: str) -> int | None:
    """Non-negative integer or absence. Accepts CSV strings and JSON numbers."""
    if raw is None:
        return None
    if isinstance(raw, str):
        raw = raw.strip()
        if raw == "":
            return None
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{what} is not an integer: {raw!r}")
    elif isinstance(raw, bool):
        raise ValueError(f"{what} is not an integer: {raw!r}")
    elif isinstance(raw, int):
        value = raw
    elif isinstance(raw, float) and raw.is_integer():
        value = int(raw)
    else:
        raise ValueError(f"{what} is not an integer: {raw!r}")
    if value < 0:
        raise ValueError(f"{what} is negative")
    return value


def _build_post(fields: dict, line: int) -> PostRecord:
    page_id = (fields.get("page_id") or "").strip()
    post_id = (fields.get("post_id") or "").strip()
    if not page_id:
        raise ValueError("missing page_id")
    if not post_id:
        raise ValueError("missing post_id")
    raw_ts = fields.get("timestamp")
    if raw_ts is None or (isinstance(raw_ts, str) and not raw_ts.strip()):
        raise ValueError("missing timestamp")
    ts = parse_timestamp(str(raw_ts))

    likes = _opt_count(fields.get("likes"), "likes")
    comments = _opt_count(fields.get("comments"), "comments")
    shares = _opt_count(fields.get("shares"), "shares")
    total = _opt_count(fields.get("total_interactions"), "total_interactions")
    followers = _opt_count(fields.get("followers_at_posting"), "followers_at_posting")

    components = (likes, comments, shares)
    if total is None:
        if any(c is None for c in components):
            raise ValueError("missing interaction counts")
        total = likes + comments + shares  # type: ignore[operator]
    elif all(c is not None for c in components):
        if likes + comments + shares != total:  # type: ignore[operator]
            raise ValueError("component sum mismatch")

    return PostRecord(
        page_id=page_id,
        post_id=post_id,
        timestamp=ts,
        total_interactions=total,
        likes=likes,
        comments=comments,
        shares=shares,
        followers_at_posting=followers,
    )


def parse_posts(
    stream: BinaryIO | bytes | str, format: str = "csv"
) -> tuple[list[PostRecord], RejectionReport]:
    """Parse a posts file. Returns (accepted records, rejection report).

    Rows failing validation are quarantined with their line number; a
    malformed header is fatal. Exact post_id collisions are rejected
    (the later row loses).
    """
    if format not in ("csv", "jsonl"):
        raise FatalParseError(f"unknown posts format {format!r}")
    text = _text_lines(stream)
    report = RejectionReport()
    posts: list[PostRecord] = []
    seen_ids: set[str] = set()

    if format == "csv":
        reader = csv.reader(text)
        try:
            header = next(reader)
        except StopIteration:
            raise FatalParseError("empty posts file: missing header")
        if header != POSTS_HEADER:
            raise FatalParseError(
                f"malformed posts header: expected {','.join(POSTS_HEADER)}, "
                f"got {','.join(header)}"
            )
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(POSTS_HEADER):
                report.add(line, f"expected {len(POSTS_HEADER)} fields, got {len(row)}")
                continue
            fields = dict(zip(POSTS_HEADER, row))
            _accept_post(fields, line, posts, seen_ids, report)
    else:
        for line, raw in enumerate(text, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError:
                report.add(line, "invalid JSON")
                continue
            if not isinstance(obj, dict):
                report.add(line, "not a JSON object")
                continue
            unknown = set(obj) - set(POSTS_HEADER)
            if unknown:
                report.add(line, f"unknown fields: {sorted(unknown)}")
                continue
            _accept_post(obj, line, posts, seen_ids, report)

    return posts, report


def _accept_post(fields, line, posts, seen_ids, report) -> None:
    try:
        post = _build_post(fields, line)
    except ValueError as exc:
        report.add(line, str(exc))
        return
    if post.post_id in seen_ids:
        report.add(line, f"duplicate post_id {post.post_id!r}")
        return
    seen_ids.add(post.post_id)
    posts.append(post)


def parse_pages(
    stream: BinaryIO | bytes | str,
) -> tuple[dict[str, PageMeta], RejectionReport]:
    """Parse a pages CSV into page_id -> PageMeta. Duplicate ids are fatal."""
    text = _text_lines(stream)
    reader = csv.reader(text)
    try:
        header = next(reader)
    except StopIteration:
        raise FatalParseError("empty pages file: missing header")
    if header != PAGES_HEADER:
        raise FatalParseError(
            f"malformed pages header: expected {','.join(PAGES_HEADER)}, "
            f"got {','.join(header)}"
        )
    pages: dict[str, PageMeta] = {}
    duplicates: list[str] = []
    report = RejectionReport()
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(PAGES_HEADER):
            report.add(line, f"expected {len(PAGES_HEADER)} fields, got {len(row)}")
            continue
        page_id, name, raw_created, raw_score, language = (v.strip() for v in row)
        if not page_id:
            report.add(line, "missing page_id")
            continue
        if page_id in pages:
            duplicates.append(page_id)
            continue
        try:
            created = date.fromisoformat(raw_created)
        except ValueError:
            report.add(line, f"unparsable created_at {raw_created!r}")
            continue
        score: float | None = None
        if raw_score:
            try:
                score = float(raw_score)
            except ValueError:
                report.add(line, f"newsguard_score is not a number: {raw_score!r}")
                continue
            if not 0.0 <= score <= 100.0:
                report.add(line, f"newsguard_score {score} outside [0,100]")
                continue
        pages[page_id] = PageMeta(
            page_id=page_id,
            name=name,
            created_at=created,
            newsguard_score=score,
            language=language or None,
        )
    if duplicates:
        raise FatalParseError(f"duplicate page_id(s): {sorted(set(duplicates))}")
    return pages, report


def build_dataset(
    posts: Iterable[PostRecord], pages: dict[str, PageMeta]
) -> tuple[Dataset, RejectionReport]:
    """Join posts against page metadata, rejecting orphans, and sort.

    Raises NoUsableDataError when nothing survives filtering.
    """
    report = RejectionReport()
    kept: list[PostRecord] = []
    for i, post in enumerate(posts, start=1):
        if post.page_id not in pages:
            report.add(i, f"unknown page_id {post.page_id!r}")
            continue
        kept.append(post)
    if not kept:
        raise NoUsableDataError("no usable data")
    kept.sort(key=lambda p: (p.page_id, p.timestamp, p.post_id))
    return Dataset(posts=kept, pages=dict(pages)), report


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def write_posts_csv(posts: Iterable[PostRecord], stream) -> None:
    """Serialize posts in the canonical CSV format (round-trips through parse_posts)."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(POSTS_HEADER)
    for p in posts:
        writer.writerow(
            [
                p.page_id,
                p.post_id,
                format_timestamp(p.timestamp),
                "" if p.likes is None else p.likes,
                "" if p.comments is None else p.comments,
                "" if p.shares is None else p.shares,
                p.total_interactions,
                "" if p.followers_at_posting is None else p.followers_at_posting,
            ]
        )


def write_pages_csv(pages: dict[str, PageMeta], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(PAGES_HEADER)
    for page_id in sorted(pages):
        m = pages[page_id]
        writer.writerow(
            [
                m.page_id,
                m.name,
                m.created_at.isoformat(),
                "" if m.newsguard_score is None else format(m.newsguard_score, "g"),
                m.language or "",
            ]
        )
