"""Seeded synthetic corpora used for fixtures, tests and the acceptance suite.

Everything here is deterministic in ``seed`` and uses only numpy's PCG64
generator, so regenerated fixtures are byte-identical across runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date

import numpy as np

from .corpus import TweetRecord, window_schedule
from .stance.model import LabeledExample

VOCAB = {
    "anti": [
        "toxins", "poison", "autism", "depopulation", "scam", "mercury", "bigpharma", "coverup",
        "injury", "whistleblower", "aluminum", "adjuvant", "sterilize", "lies", "agenda", "natural",
    ],
    "pro": [
        "protect", "immunity", "herd", "safe", "effective", "prevent", "lives", "doctors",
        "research", "outbreak", "clinic", "schedule", "evidence", "campaign", "awareness", "saved",
    ],
    "neutral": [
        "band", "gig", "setlist", "album", "concert", "tour", "puppy", "kitten", "vet", "dog",
        "cat", "badger", "cattle", "farm", "song", "stage",
    ],
}
FILLER = ["the", "a", "today", "people", "new", "just", "really", "think", "this", "about", "so", "now"]
CHATTER = ["weather", "coffee", "monday", "traffic", "lunch", "weekend", "football", "movie", "sunny", "tired"]
STANCE_KEYWORDS = ["vaccine", "vaccines", "vaccinated", "vaccination", "vaxx", "unvaccinated"]

# published label shares of the rated target data after the unanimity filter
TARGET_LABEL_SHARES = {"anti": 0.188, "pro": 0.4567, "neutral": 0.355}

HASHTAG_THEMES = {
    "anti": ["cdcwhistleblower", "cdctruth", "vaxxed", "vaccinescauseautism", "antivax", "endautismnow"],
    "pro": ["vaccineswork", "immunization", "science", "measles", "polio", "hpv"],
    "neutral": ["music", "livemusic", "dog", "cat"],
}


def stance_text(rng: np.random.Generator, label: str, with_keyword: bool = True) -> str:
    words = list(rng.choice(VOCAB[label], size=int(rng.integers(3, 7))))
    words += list(rng.choice(FILLER, size=int(rng.integers(1, 4))))
    if with_keyword:
        words.append(str(rng.choice(STANCE_KEYWORDS)))
    rng.shuffle(words)
    return " ".join(words)


def chatter_text(rng: np.random.Generator) -> str:
    words = list(rng.choice(CHATTER, size=3)) + list(rng.choice(FILLER, size=2))
    rng.shuffle(words)
    return " ".join(words)


def stance_corpus(n: int = 300, seed: int = 0, shares=None) -> list[LabeledExample]:
    """``n`` labeled texts; class counts follow ``shares`` (default: equal thirds)."""
    rng = np.random.default_rng(seed)
    shares = shares or {"anti": 1 / 3, "pro": 1 / 3, "neutral": 1 / 3}
    labels = list(shares)
    counts = [int(round(shares[c] * n)) for c in labels]
    counts[-1] = n - sum(counts[:-1])
    out = []
    for label, count in zip(labels, counts):
        out.extend(LabeledExample(stance_text(rng, label), label) for _ in range(count))
    order = rng.permutation(len(out))
    return [out[i] for i in order]


def planted_ratings(n: int = 10_000, unanimous: int = 5358, seed: int = 0, shares=None):
    """Rater triples where exactly ``unanimous`` texts get three identical labels."""
    rng = np.random.default_rng(seed)
    shares = shares or TARGET_LABEL_SHARES
    labels = list(shares)
    probs = np.array([shares[c] for c in labels])
    probs = probs / probs.sum()
    rows = []
    for i in range(n):
        truth = labels[int(rng.choice(len(labels), p=probs))]
        text = stance_text(rng, truth) + f" #{i}"
        if i < unanimous:
            rows.append((text, [truth] * 3))
        else:
            other = labels[(labels.index(truth) + int(rng.integers(1, len(labels)))) % len(labels)]
            triple = [truth, truth, other]
            rng.shuffle(triple)
            rows.append((text, [str(t) for t in triple]))
    order = rng.permutation(n)
    return [rows[i] for i in order]


def hashtag_corpus(n: int = 600, seed: int = 0) -> list[str]:
    """Texts carrying one themed hashtag whose vocabulary matches the tag's theme."""
    rng = np.random.default_rng(seed)
    themes = list(HASHTAG_THEMES)
    texts = []
    for _ in range(n):
        theme = themes[int(rng.integers(len(themes)))]
        tag = str(rng.choice(HASHTAG_THEMES[theme]))
        words = stance_text(rng, theme).split()
        words.insert(int(rng.integers(len(words) + 1)), "#" + tag)
        texts.append(" ".join(words))
    return texts


# --- full tweet corpus for the pipeline fixture ---------------------------------

SHORTENERS = ["bit.ly", "t.co", "ow.ly"]
GROUP_DOMAINS = {
    "anti": [
        ("https://www.youtube.com/watch?v={code}", 5),
        ("https://www.naturalnews.com/{code}.html", 3),
        ("https://articles.mercola.com/sites/{code}.aspx", 2),
        ("https://www.facebook.com/posts/{code}", 1),
        ("https://worldtruth.tv/{code}/", 1),
    ],
    "pro": [
        ("https://www.cnn.com/health/{code}", 3),
        ("https://www.nytimes.com/{code}.html", 2),
        ("https://www.cdc.gov/vaccines/{code}", 2),
        ("https://www.sciencedaily.com/releases/{code}.htm", 2),
        ("https://www.youtube.com/watch?v={code}", 1),
        ("https://www.facebook.com/posts/{code}", 1),
        ("https://example-blog.org/{code}", 1),
    ],
}
GAZETTEER_ROWS = [
    ("springfield", "US-IL", 0.6),
    ("springfield", "US-MA", 0.4),
    ("new york", "US-NY", 1.0),
    ("bay area", "US-CA", 1.0),
    ("portland", "US-OR", 0.7),
    ("portland", "US-ME", 0.3),
]


@dataclass
class PipelineFixture:
    records: list[TweetRecord]
    chains: dict
    groups: dict[str, str]


def _pick_weighted(rng, items):
    weights = np.array([w for _, w in items], dtype=float)
    return items[int(rng.choice(len(items), p=weights / weights.sum()))][0]


def pipeline_corpus(n_records: int = 500, seed: int = 8) -> PipelineFixture:
    """A small corpus with planted stance groups, reciprocal conversations,
    shortened links (plus their redirect chains) and location hints."""
    rng = np.random.default_rng(seed)
    schedule = window_schedule()
    groups = {}
    for i in range(24):
        groups[f"a{i:02d}"] = "anti"
    for i in range(40):
        groups[f"p{i:02d}"] = "pro"
    for i in range(12):
        groups[f"n{i:02d}"] = "neutral"
    authors = sorted(groups)
    # heavy-tailed activity
    activity = rng.pareto(1.2, size=len(authors)) + 1.0
    activity /= activity.sum()

    # friendships: mostly within group
    friends = {a: set() for a in authors}
    for a in authors:
        for _ in range(2):
            same = rng.random() < 0.8
            pool = [b for b in authors if b != a and ((groups[b] == groups[a]) == same)]
            b = str(rng.choice(pool))
            friends[a].add(b)
            friends[b].add(a)

    chains: dict = {}
    records: list[TweetRecord] = []
    link_counter = 0

    def make_link(group: str) -> str:
        nonlocal link_counter
        link_counter += 1
        code = f"{link_counter:04d}"
        target = _pick_weighted(rng, GROUP_DOMAINS[group]).format(code=code)
        roll = rng.random()
        if roll < 0.5:
            short = f"http://{SHORTENERS[link_counter % 3]}/{code}"
            chains[short] = {"status": 301, "location": target}
            return short
        if roll < 0.7:
            first = f"http://t.co/{code}"
            second = f"https://bit.ly/{code}x"
            chains[first] = {"status": 301, "location": second}
            chains[second] = {"status": 302, "location": target}
            return first
        if roll < 0.75:
            loop = f"http://ow.ly/loop{code}"
            back = f"http://ow.ly/back{code}"
            chains[loop] = {"status": 302, "location": back}
            chains[back] = {"status": 302, "location": loop}
            return loop
        if roll < 0.78:
            slow = f"http://bit.ly/slow{code}"
            chains[slow] = {"timeout": True}
            return slow
        return target

    def make_record(author: str, ts: float, **extra) -> TweetRecord:
        group = groups[author]
        roll = rng.random()
        if roll < 0.15:
            text = chatter_text(rng)
        else:
            stance = group if rng.random() < 0.85 else "neutral"
            text = stance_text(rng, stance)
            if rng.random() < 0.25 and stance in HASHTAG_THEMES:
                text += " #" + str(rng.choice(HASHTAG_THEMES[stance]))
        urls = []
        if group in GROUP_DOMAINS and rng.random() < 0.45:
            urls.append(make_link(group))
            text += " " + urls[0]
        coords, location = None, None
        loc_roll = rng.random()
        if loc_roll < 0.1:
            coords = (round(float(rng.uniform(25, 49)), 4), round(float(rng.uniform(-124, -67)), 4))
        elif loc_roll < 0.5:
            location = str(rng.choice(["Springfield", " New  York ", "Bay Area", "portland", "Atlantis", "somewhere"]))
        hashtags = [t[1:] for t in text.split() if t.startswith("#")]
        return TweetRecord(
            id=f"t{len(records):05d}",
            author_id=author,
            timestamp=float(round(ts)),
            text=text,
            hashtags=hashtags,
            urls=urls,
            coordinates=coords,
            location_string=location,
            **extra,
        )

    while len(records) < n_records:
        author = authors[int(rng.choice(len(authors), p=activity))]
        w = schedule[int(rng.integers(len(schedule)))]
        ts = float(rng.uniform(w.start, w.end - 86400 * 3))
        if friends[author] and rng.random() < 0.6 and len(records) + 2 <= n_records:
            other = str(rng.choice(sorted(friends[author])))
            records.append(make_record(author, ts, mention_ids=[other]))
            kind = rng.random()
            if kind < 0.5:
                records.append(make_record(other, ts + 3600, reply_to=author))
            elif kind < 0.8:
                records.append(make_record(other, ts + 7200, retweet_of=author))
            else:
                records.append(make_record(other, ts + 1800, mention_ids=[author]))
        else:
            records.append(make_record(author, ts))
    records.sort(key=lambda r: (r.timestamp, r.id))
    return PipelineFixture(records=records, chains=chains, groups=groups)


@dataclass
class HomophilyCorpus:
    records: list[TweetRecord]
    groups: dict[str, str]
    p_within: float


def homophily_corpus(
    n_nodes: int = 400,
    p_within: float = 0.9,
    anti_share: float = 0.3,
    pairs_per_node: float = 4.0,
    seed: int = 0,
) -> HomophilyCorpus:
    """Reciprocal interactions where each pair is same-group with prob ``p_within``.

    Every planted pair talks in both directions within each of two distinct
    windows, so it survives the mutual and repeated-window filters. A layer of
    one-directional noise mentions is added on top; it must not survive.
    """
    rng = np.random.default_rng(seed)
    schedule = window_schedule(date(2013, 9, 1), 13, 3)
    n_anti = int(round(anti_share * n_nodes))
    groups = {f"u{i:03d}": ("anti" if i < n_anti else "pro") for i in range(n_nodes)}
    members = {"anti": [u for u, g in groups.items() if g == "anti"], "pro": [u for u, g in groups.items() if g == "pro"]}
    nodes = sorted(groups)
    records: list[TweetRecord] = []

    def emit(author, ts, text, **kw):
        records.append(TweetRecord(id=f"h{len(records):06d}", author_id=author, timestamp=ts, text=text, **kw))

    pairs = set()
    target = int(pairs_per_node * n_nodes / 2)
    while len(pairs) < target:
        u = nodes[int(rng.integers(n_nodes))]
        same = rng.random() < p_within
        pool = members[groups[u]] if same else members["pro" if groups[u] == "anti" else "anti"]
        v = pool[int(rng.integers(len(pool)))]
        if u != v:
            pairs.add((min(u, v), max(u, v)))
    for u, v in sorted(pairs):
        for wi in rng.choice(len(schedule), size=2, replace=False):
            w = schedule[int(wi)]
            ts = float(round(rng.uniform(w.start, w.end - 7200)))
            emit(u, ts, stance_text(rng, groups[u]), mention_ids=[v])
            emit(v, ts + 600, stance_text(rng, groups[v]), reply_to=u)
    for _ in range(n_nodes):
        u, v = rng.choice(nodes, size=2, replace=False)
        w = schedule[int(rng.integers(len(schedule)))]
        emit(str(u), float(round(rng.uniform(w.start, w.end))), chatter_text(rng), mention_ids=[str(v)])
    return HomophilyCorpus(records=records, groups=groups, p_within=p_within)


def write_chain_fixture(chains: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(chains, fh, indent=1, sort_keys=True)
        fh.write("\n")
