import io
import json
from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qarank.ingestion import (
    IngestError,
    clean_body,
    load_dataset,
    parse_normalized_jsonl,
    parse_stackexchange_xml,
    parse_timestamp,
    serialize_normalized_jsonl,
)
from qarank.model import Answer, Dataset, Question, Thread, dataset_stats


def test_xml_fixture_matches_golden_bytes(fixtures):
    d = load_dataset(fixtures / "posts.xml")
    assert serialize_normalized_jsonl(d) == (fixtures / "posts.golden.jsonl").read_bytes()


def test_xml_fixture_report_counts(fixtures):
    r = load_dataset(fixtures / "posts.xml").report
    assert (r.orphan_answers, r.answers_before_question, r.ignored_posts, r.dangling_accepted) == (1, 1, 1, 1)


def test_xml_fixture_stats_render(fixtures):
    d = load_dataset(fixtures / "posts.xml")
    assert dataset_stats(d).render() == (fixtures / "posts.stats.txt").read_text()


def test_golden_jsonl_is_a_fixed_point(fixtures):
    raw = (fixtures / "posts.golden.jsonl").read_bytes()
    assert serialize_normalized_jsonl(parse_normalized_jsonl(io.BytesIO(raw))) == raw


def test_dangling_accepted_id_is_cleared(fixtures):
    d = load_dataset(fixtures / "posts.xml")
    q8 = next(t for t in d.threads if t.question.id == "8")
    assert q8.question.accepted_answer_id is None
    assert not q8.resolved


@pytest.mark.parametrize("case", json.loads(
    (__import__("pathlib").Path(__file__).parent / "fixtures" / "clean_body.json").read_text()))
def test_clean_body_fixtures(case):
    c = clean_body(case["html"])
    assert (c.plain_text, c.contained_hyperlink, c.stripped_code_blocks) == (
        case["text"], case["hyperlink"], case["code_blocks"])


@given(st.text(alphabet=st.sampled_from(list("ab <>/&;pre code!-lt gt amp")), max_size=80))
def test_clean_body_is_idempotent(s):
    once = clean_body(s).plain_text
    assert clean_body(once).plain_text == once


def test_malformed_xml_reports_byte_offset():
    bad = b'<posts>\n  <row Id="1" PostTypeId="1" CreationDate="2020-01-01T00:00:00"\n</posts>'
    with pytest.raises(IngestError, match=r"byte offset \d+"):
        parse_stackexchange_xml(io.BytesIO(bad))


def test_xml_row_missing_field_is_an_ingest_error():
    bad = b'<posts><row Id="1" PostTypeId="1" /></posts>'
    with pytest.raises(IngestError, match="bad row"):
        parse_stackexchange_xml(io.BytesIO(bad))


@pytest.mark.parametrize("lines, msg", [
    (['{"type": "question"'], "line 1: invalid JSON"),
    (['{"type": "question", "id": 1}'], "line 1: bad record"),
    (['{"type": "tag", "id": 1, "created_at": 0}'], "unknown record type"),
    (['{"type": "question", "id": 1, "created_at": 0}',
      '{"type": "answer", "id": 1, "parent_id": 1, "created_at": 5}'], "line 2: duplicate id"),
    (['{"schema": 99}'], "unsupported schema"),
])
def test_jsonl_errors(lines, msg):
    with pytest.raises(IngestError, match=msg):
        parse_normalized_jsonl(io.BytesIO("\n".join(lines).encode()))


def test_empty_jsonl_gives_empty_dataset():
    d = parse_normalized_jsonl(io.BytesIO(b""), default_name="empty")
    assert d.threads == () and d.name == "empty"


def test_missing_scores_flag_scores_absent():
    raw = b'{"type":"question","id":"1","created_at":0}\n{"type":"answer","id":"2","parent_id":"1","created_at":9}\n'
    d = parse_normalized_jsonl(io.BytesIO(raw))
    assert d.scores_absent
    assert b'"score"' not in serialize_normalized_jsonl(d)


def test_timestamps():
    assert parse_timestamp("2020-01-01T00:00:00") == datetime(2020, 1, 1, tzinfo=timezone.utc)
    assert parse_timestamp("2020-01-01T02:00:00+02:00") == datetime(2020, 1, 1, tzinfo=timezone.utc)
    assert parse_timestamp(86400) == datetime(1970, 1, 2, tzinfo=timezone.utc)


T0 = datetime(2019, 5, 1, tzinfo=timezone.utc)
body_st = st.text(st.characters(blacklist_categories=("Cs",)), max_size=30)


@st.composite
def datasets(draw):
    threads, nid = [], 1
    for _ in range(draw(st.integers(0, 4))):
        qid = str(nid)
        nid += 1
        qt = T0 + timedelta(seconds=draw(st.integers(0, 10**6)))
        answers = []
        for _ in range(draw(st.integers(0, 3))):
            answers.append(Answer(str(nid), qid, draw(body_st), qt + timedelta(seconds=nid),
                                  draw(st.integers(-5, 50)), False))
            nid += 1
        acc = draw(st.none() | st.sampled_from([a.id for a in answers])) if answers else None
        answers = tuple(Answer(a.id, a.question_id, a.body_html, a.created_at, a.rating_score, a.id == acc)
                        for a in answers)
        threads.append(Thread(Question(qid, draw(body_st), draw(body_st), qt, acc), answers))
    return Dataset(draw(st.text("abc", min_size=1, max_size=5)), tuple(threads))


@given(datasets())
def test_jsonl_round_trip(d):
    raw = serialize_normalized_jsonl(d)
    back = parse_normalized_jsonl(io.BytesIO(raw))
    assert back.threads == d.threads
    assert back.name == d.name
    assert serialize_normalized_jsonl(back) == raw
