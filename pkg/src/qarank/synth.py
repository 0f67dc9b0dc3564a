"""Synthetic Q&A corpora with a known acceptance mechanism.

Every answer carries five latent traits drawn from N(0, 1):

    vote     -> rating score
    slowness -> age (response delay)
    verbose  -> number and length of sentences
    wordy    -> word length (chars and syllables per word)
    common   -> share of high-frequency words (log-likelihood under the corpus)

A profile picks which traits drive acceptance.  In a resolved thread the
accepted answer is argmax(utility + temperature * Gumbel noise).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from datetime import datetime, timedelta, timezone

import numpy as np

from qarank.model import Answer, Dataset, Question, Thread

SIGNALS = {"rating": "vote", "speed": "slowness", "length": "verbose",
           "wordiness": "wordy", "vocabulary": "common"}
SPECIAL_PROFILES = ("no-signal", "interaction", "scaled")

_SYLLABLES = ("ka", "to", "ri", "men", "sa", "lo", "ne", "vi", "tra", "pol",
              "ex", "di", "un", "ber", "qua", "sio", "mo", "fen", "gar", "lu")


@dataclass(frozen=True)
class Profile:
    name: str
    weights: dict
    interaction: bool = False
    thread_scale: float = 0.0
    fixed_answers: int | None = None

    def utility(self, traits: dict[str, np.ndarray]) -> np.ndarray:
        n = len(traits["vote"])
        if self.interaction:
            return self.weights.get("interaction", 1.0) * traits["vote"] * traits["slowness"]
        u = np.zeros(n)
        for trait, w in self.weights.items():
            u += w * traits[trait]
        return u


def parse_profile(name: str) -> Profile:
    if name == "no-signal":
        return Profile(name, {}, fixed_answers=4)
    if name == "interaction":
        return Profile(name, {"interaction": 3.0}, interaction=True)
    if name == "scaled":
        return Profile(name, {"vote": 1.0, "slowness": -1.0, "verbose": 1.0, "wordy": 1.0,
                              "common": 1.0}, thread_scale=2.0)
    parts = name.split("+")
    bad = [p for p in parts if p not in SIGNALS]
    if bad or not name:
        raise ValueError(
            f"invalid profile {name!r}: use {', '.join(SPECIAL_PROFILES)} or a '+'-joined "
            f"combination of {', '.join(SIGNALS)}"
        )
    weights = {SIGNALS[p]: (-2.0 if p == "speed" else 2.0) for p in parts}
    return Profile(name, weights)


@dataclass(frozen=True)
class SynthConfig:
    n_threads: int = 500
    profile: str = "rating+speed"
    seed: int = 0
    span_days: float = 365.0
    resolved_rate: float = 0.9
    temperature: float = 0.5
    mean_answers: float = 3.0
    max_answers: int = 10
    accepted_vote_bonus: float = 1.0
    start: str = "2015-01-01T00:00:00Z"


def _lexicon(rng: np.random.Generator, size: int = 3000, n_common: int = 300) -> list[str]:
    """Pseudo-words; the first ``n_common`` form the frequent pool.  Each
    pool is sorted by length so a position in [0, 1) selects word length."""
    words: set[str] = set()
    while len(words) < size:
        k = int(rng.integers(1, 5))
        words.add("".join(rng.choice(_SYLLABLES, size=k)))
    lex = list(rng.permutation(sorted(words)))
    key = lambda w: (len(w), w)  # noqa: E731
    return sorted(lex[:n_common], key=key) + sorted(lex[n_common:], key=key)


def _text(rng, lex, n_common, wordy_shift, common_share, n_sent, wps) -> str:
    """Sentences of pseudo-words; wordy_shift biases toward longer words."""
    sentences = []
    n_lex = len(lex)
    for _ in range(n_sent):
        k = max(1, int(rng.poisson(wps)))
        use_common = rng.random(k) < common_share
        # position in the length-sorted lexicon, pushed up by wordiness
        pos = np.clip(rng.beta(2.0, 2.0, size=k) + 0.18 * wordy_shift, 0.0, 0.999)
        common_idx = (pos * n_common).astype(int)
        rare_idx = n_common + (pos * (n_lex - n_common)).astype(int)
        idx = np.where(use_common, common_idx, rare_idx)
        words = [lex[i] for i in idx]
        words[0] = words[0].capitalize()
        sentences.append(" ".join(words) + ".")
    return " ".join(sentences)


def generate(cfg: SynthConfig | None = None, **overrides) -> Dataset:
    cfg = cfg or SynthConfig()
    if overrides:
        cfg = SynthConfig(**{**asdict(cfg), **overrides})
    if cfg.n_threads < 1:
        raise ValueError("n_threads must be >= 1")
    profile = parse_profile(cfg.profile)
    rng = np.random.default_rng(cfg.seed)
    n_common = 300
    lex = _lexicon(np.random.default_rng(12345), n_common=n_common)
    start = datetime.fromisoformat(cfg.start.replace("Z", "+00:00")).astimezone(timezone.utc)
    q_offsets = np.sort(rng.uniform(0, cfg.span_days * 86400, size=cfg.n_threads))
    sc = profile.thread_scale
    # accepted answers attract extra votes, except where labels must carry no signal
    bonus = 0.0 if profile.name == "no-signal" else cfg.accepted_vote_bonus

    threads = []
    next_id = 1
    for t in range(cfg.n_threads):
        if profile.fixed_answers:
            n = profile.fixed_answers
        else:
            n = int(min(cfg.max_answers, 1 + rng.poisson(cfg.mean_answers - 1)))
        traits = {k: rng.normal(size=n) for k in ("vote", "slowness", "verbose", "wordy", "common")}
        verb_scale = np.exp(sc * 0.5 * rng.normal())
        time_scale = np.exp(sc * 1.5 * rng.normal())
        popularity = sc * 4.0 * rng.normal()
        wordy_shift_t = sc * 1.0 * rng.normal()
        common_shift_t = sc * 1.0 * rng.normal()

        resolved = rng.random() < cfg.resolved_rate
        accepted = -1
        if resolved:
            util = profile.utility(traits) + cfg.temperature * rng.gumbel(size=n)
            accepted = int(np.argmax(util))

        q_created = start + timedelta(seconds=int(q_offsets[t]))
        qid = str(next_id)
        next_id += 1
        ages = np.rint(time_scale * 1800.0 * np.exp(0.8 * traits["slowness"])).astype(int)
        votes = 1.0 + 1.5 * traits["vote"] + popularity + 0.3 * rng.normal(size=n)
        if accepted >= 0:
            votes[accepted] += bonus
        ratings = np.rint(votes).astype(int)
        order = np.lexsort((np.arange(n), ages))
        answers = []
        accepted_id = None
        for i in order:
            aid = str(next_id)
            next_id += 1
            n_sent = max(1, int(round(verb_scale * (3.0 + 1.2 * traits["verbose"][i] + 0.5 * rng.normal()))))
            wps = max(2.0, verb_scale * (11.0 + 3.0 * traits["verbose"][i]))
            common_share = 1 / (1 + np.exp(-(0.5 + 0.8 * traits["common"][i] + common_shift_t)))
            body = _text(rng, lex, n_common, traits["wordy"][i] + wordy_shift_t, common_share, n_sent, wps)
            extra = ""
            if rng.random() < 0.2:
                extra += ' See <a href="https://example.org/doc">the docs</a>.'
            if rng.random() < 0.3:
                extra += "<pre><code>x = f(y);</code></pre>"
            answers.append(Answer(
                id=aid, question_id=qid, body_html=f"<p>{body}{extra}</p>",
                created_at=q_created + timedelta(seconds=int(ages[i])),
                rating_score=int(ratings[i]), is_accepted=bool(i == accepted),
            ))
            if i == accepted:
                accepted_id = aid
        title = " ".join(rng.choice(lex[:n_common], size=5))
        question = Question(qid, title.capitalize() + "?", f"<p>{title}?</p>", q_created, accepted_id)
        threads.append(Thread(question, tuple(answers)))

    meta = {"generator": "qarank.synth", **asdict(cfg)}
    return Dataset(f"synthetic-{cfg.profile}-{cfg.seed}", tuple(threads), "synthetic", False, meta)
