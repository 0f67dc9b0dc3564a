"""Parsers for Stack Exchange dumps and the normalized JSONL thread format,
plus body cleaning (code stripping, tag removal, hyperlink detection)."""

from __future__ import annotations

import html
import json
import logging
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import IO, Iterable
from xml.parsers import expat

from qarank.model import (
    Answer,
    Dataset,
    IngestReport,
    Question,
    Thread,
    id_sort_key,
    to_utc,
)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class IngestError(ValueError):
    """Unrecoverable problem with an input file."""


@dataclass(frozen=True)
class CleanText:
    plain_text: str
    contained_hyperlink: bool
    stripped_code_blocks: int


_CODE_SPAN = re.compile(r"<(pre|code)\b[^>]*>.*?</\1\s*>", re.IGNORECASE | re.DOTALL)
_TAG = re.compile(r"<[/!?]?[A-Za-z][^<>]*(?:>|$)")
_COMMENT = re.compile(r"<!--.*?(?:-->|$)", re.DOTALL)
_ANCHOR = re.compile(r"<a\s[^>]*href", re.IGNORECASE)
_BARE_URL = re.compile(r"https?://", re.IGNORECASE)


def _clean_pass(text: str) -> tuple[str, int]:
    text, n_code = _CODE_SPAN.subn("", text)
    text = _COMMENT.sub("", text)
    text = _TAG.sub("", text)
    return html.unescape(text), n_code


def clean_body(body_html: str) -> CleanText:
    """Strip code blocks and markup from a post body.

    Passes repeat until the text stops changing, so that entity-escaped
    markup (``&lt;b&gt;``) is handled the same way as literal markup and
    cleaning a cleaned text is a no-op.
    """
    linked = bool(_ANCHOR.search(body_html) or _BARE_URL.search(body_html))
    text, blocks = body_html, 0
    while True:
        new, n = _clean_pass(text)
        blocks += n
        if new == text:
            break
        text = new
    return CleanText(text, linked, blocks)


def parse_timestamp(value) -> datetime:
    """ISO-8601 text (naive means UTC) or epoch seconds, truncated to seconds."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return datetime.fromtimestamp(int(value), tz=timezone.utc)
    if not isinstance(value, str):
        raise ValueError(f"bad timestamp {value!r}")
    s = value.strip()
    if s.endswith("Z"):
        s = s[:-1] + "+00:00"
    return to_utc(datetime.fromisoformat(s))


def format_timestamp(ts: datetime) -> str:
    return to_utc(ts).strftime("%Y-%m-%dT%H:%M:%SZ")


class _Builder:
    """Collects questions and answers in any order, then links them."""

    def __init__(self) -> None:
        self.questions: dict[str, Question] = {}
        self.answers: list[dict] = []
        self.ignored = 0

    def build(self, name: str, provenance: str, scores_absent: bool = False, meta=None) -> Dataset:
        by_q: dict[str, list[dict]] = {qid: [] for qid in self.questions}
        orphans = early = 0
        for a in self.answers:
            q = self.questions.get(a["question_id"])
            if q is None:
                orphans += 1
                continue
            if a["created_at"] < q.created_at:
                early += 1
                continue
            by_q[q.id].append(a)
        dangling = 0
        threads = []
        for qid in sorted(self.questions, key=id_sort_key):
            q = self.questions[qid]
            rows = sorted(by_q[qid], key=lambda a: (a["created_at"], id_sort_key(a["id"])))
            acc = q.accepted_answer_id
            if acc is not None and acc not in {a["id"] for a in rows}:
                dangling += 1
                q = Question(q.id, q.title, q.body_html, q.created_at, None)
                acc = None
            answers = tuple(
                Answer(
                    id=a["id"],
                    question_id=qid,
                    body_html=a["body"],
                    created_at=a["created_at"],
                    rating_score=a["score"],
                    is_accepted=a["id"] == acc,
                )
                for a in rows
            )
            threads.append(Thread(q, answers))
        if orphans:
            log.warning("%s: dropped %d orphan answers", name, orphans)
        if early:
            log.warning("%s: dropped %d answers dated before their question", name, early)
        report = IngestReport(orphans, early, self.ignored, dangling)
        return Dataset(name, tuple(threads), provenance, scores_absent, dict(meta or {}), report)


def parse_stackexchange_xml(stream: IO[bytes], name: str = "stackexchange") -> Dataset:
    """Stream a Posts.xml dump; questions are PostTypeId 1, answers 2."""
    b = _Builder()

    def start(tag: str, attrs: dict) -> None:
        if tag != "row":
            return
        ptype = attrs.get("PostTypeId")
        if ptype == "1":
            qid = attrs["Id"]
            if qid in b.questions:
                raise IngestError(f"duplicate question id {qid}")
            b.questions[qid] = Question(
                id=qid,
                title=attrs.get("Title", ""),
                body_html=attrs.get("Body", ""),
                created_at=parse_timestamp(attrs["CreationDate"]),
                accepted_answer_id=attrs.get("AcceptedAnswerId"),
            )
        elif ptype == "2":
            b.answers.append(
                {
                    "id": attrs["Id"],
                    "question_id": attrs.get("ParentId", ""),
                    "body": attrs.get("Body", ""),
                    "created_at": parse_timestamp(attrs["CreationDate"]),
                    "score": int(attrs.get("Score", 0)),
                }
            )
        else:
            b.ignored += 1

    parser = expat.ParserCreate()
    parser.StartElementHandler = start
    try:
        while True:
            chunk = stream.read(1 << 16)
            if not chunk:
                break
            parser.Parse(chunk, False)
        parser.Parse(b"", True)
    except expat.ExpatError as e:
        raise IngestError(
            f"malformed XML at byte offset {parser.ErrorByteIndex}: {expat.ErrorString(e.code)}"
        ) from e
    except (KeyError, ValueError) as e:
        if isinstance(e, IngestError):
            raise
        raise IngestError(f"bad row near byte offset {parser.CurrentByteIndex}: {e}") from e
    return b.build(name, "stackexchange_xml")


def parse_normalized_jsonl(
    stream: IO[bytes], name: str | None = None, default_name: str = "dataset"
) -> Dataset:
    """Read the normalized thread format (one JSON object per line).

    An optional first line ``{"schema": 1, ...}`` carries dataset-level
    metadata (name, provenance, scores_absent, meta).
    """
    b = _Builder()
    header: dict = {}
    seen_ids: set[str] = set()
    any_score = False
    for lineno, raw in enumerate(stream, 1):
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise IngestError(f"line {lineno}: invalid JSON ({e.msg})") from e
        if "schema" in rec:
            if lineno != 1 and header:
                raise IngestError(f"line {lineno}: repeated schema header")
            if rec["schema"] != SCHEMA_VERSION:
                raise IngestError(f"unsupported schema version {rec['schema']}")
            header = rec
            continue
        try:
            kind = rec["type"]
            rid = str(rec["id"])
            created = parse_timestamp(rec["created_at"])
        except (KeyError, ValueError) as e:
            raise IngestError(f"line {lineno}: bad record ({e})") from e
        if rid in seen_ids:
            raise IngestError(f"line {lineno}: duplicate id {rid}")
        seen_ids.add(rid)
        if kind == "question":
            acc = rec.get("accepted_answer_id")
            b.questions[rid] = Question(
                id=rid,
                title=rec.get("title", ""),
                body_html=rec.get("body", ""),
                created_at=created,
                accepted_answer_id=None if acc is None else str(acc),
            )
        elif kind == "answer":
            if "score" in rec:
                any_score = True
            b.answers.append(
                {
                    "id": rid,
                    "question_id": str(rec.get("parent_id", "")),
                    "body": rec.get("body", ""),
                    "created_at": created,
                    "score": int(rec.get("score", 0)),
                }
            )
        else:
            raise IngestError(f"line {lineno}: unknown record type {kind!r}")
    scores_absent = header.get("scores_absent", bool(b.answers) and not any_score)
    ds = b.build(
        name or header.get("name", default_name),
        header.get("provenance", "normalized_jsonl"),
        scores_absent=scores_absent,
        meta=header.get("meta"),
    )
    if not ds.threads:
        log.warning("%s: no threads found", ds.name)
    return ds


def dataset_records(d: Dataset) -> Iterable[dict]:
    yield {
        "schema": SCHEMA_VERSION,
        "name": d.name,
        "provenance": d.provenance,
        "scores_absent": d.scores_absent,
        "meta": d.meta,
    }
    for t in d.threads:
        q = t.question
        rec = {
            "type": "question",
            "id": q.id,
            "title": q.title,
            "body": q.body_html,
            "created_at": format_timestamp(q.created_at),
        }
        if q.accepted_answer_id is not None:
            rec["accepted_answer_id"] = q.accepted_answer_id
        yield rec
        for a in t.answers:
            rec = {
                "type": "answer",
                "id": a.id,
                "parent_id": a.question_id,
                "body": a.body_html,
                "created_at": format_timestamp(a.created_at),
            }
            if not d.scores_absent:
                rec["score"] = a.rating_score
            yield rec


def serialize_normalized_jsonl(d: Dataset) -> bytes:
    lines = [json.dumps(r, ensure_ascii=False, sort_keys=True) for r in dataset_records(d)]
    return ("\n".join(lines) + "\n").encode("utf-8")


def load_dataset(path, fmt: str | None = None) -> Dataset:
    """Open a dataset file, picking the parser from ``fmt`` or the extension."""
    from pathlib import Path

    path = Path(path)
    fmt = fmt or ("xml" if path.suffix.lower() == ".xml" else "jsonl")
    with path.open("rb") as fh:
        if fmt == "xml":
            return parse_stackexchange_xml(fh, name=path.stem)
        if fmt == "jsonl":
            return parse_normalized_jsonl(fh, default_name=path.stem)
    raise IngestError(f"unknown format {fmt!r}")
