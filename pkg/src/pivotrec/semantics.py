"""Semantic oracle: significance, naming, trend/outlier rarity, aggregate fit.

Every semantic judgment goes through one interface with three providers:

* :class:`RuleBasedOracle` — offline, deterministic, no network I/O;
* :class:`RemoteOracle` — JSON-over-HTTP chat client with paraphrase retry
  and rule-based fallback;
* :class:`CachingOracle` — content-addressed read-through cache persisted
  as JSON lines, so recorded remote sessions replay deterministically.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import httpx

from ._util import canonical_json, value_to_label
from .dataset import (
    IDENTIFIER_LIKE,
    NUMERIC,
    AttributeMeta,
    Dataset,
    is_meaningless_name,
)
from .pivot import AGG_FUNCTIONS

VERY_LIKELY = "very_likely"
LIKELY = "likely"
NEUTRAL = "neutral"
UNLIKELY = "unlikely"
VERY_UNLIKELY = "very_unlikely"

LIKERT_LEVELS = (VERY_LIKELY, LIKELY, NEUTRAL, UNLIKELY, VERY_UNLIKELY)

# Inverse mapping: the less likely a trend, the more insightful it is.
LIKERT_VALUES = {
    VERY_LIKELY: 0.2,
    LIKELY: 0.4,
    NEUTRAL: 0.6,
    UNLIKELY: 0.8,
    VERY_UNLIKELY: 1.0,
}

# Rank position -> Pr_agg. Exact decimal constants, not arithmetic.
RANK_SCORES = (1.0, 0.8, 0.6, 0.4, 0.2)

SIGNIFICANCE = "significance"
ATTRIBUTE_NAMING = "attribute_naming"
CORRELATION_UNLIKELIHOOD = "correlation_unlikelihood"
RATIO_UNLIKELIHOOD = "ratio_unlikelihood"
OUTLIER_UNLIKELIHOOD = "outlier_unlikelihood"
AGGREGATE_RANKING = "aggregate_ranking"

QUERY_KINDS = (
    SIGNIFICANCE,
    ATTRIBUTE_NAMING,
    CORRELATION_UNLIKELIHOOD,
    RATIO_UNLIKELIHOOD,
    OUTLIER_UNLIKELIHOOD,
    AGGREGATE_RANKING,
)

UNLIKELIHOOD_KINDS = (
    CORRELATION_UNLIKELIHOOD,
    RATIO_UNLIKELIHOOD,
    OUTLIER_UNLIKELIHOOD,
)

# Attribute-name tokens that mark an attribute as uninteresting to group
# or aggregate by (identifiers and personally-identifying fields).
SIGNIFICANCE_DENY_TOKENS = frozenset({"id", "uuid", "name", "phone", "email", "ssn"})

_FN_PHRASES = {
    "COUNT": "Count of",
    "SUM": "Total",
    "AVG": "Average",
    "MIN": "Minimum",
    "MAX": "Maximum",
}


def likert_value(level: str) -> float:
    """Numeric weight of a five-point likelihood answer."""
    try:
        return LIKERT_VALUES[level]
    except KeyError:
        raise ValueError(f"unknown likert level {level!r}") from None


def aggregate_phrase(agg_fn: str, attr_name: str) -> str:
    """Human wording of F(V) used inside oracle prompts ("Average Salary")."""
    return f"{_FN_PHRASES[agg_fn]} {attr_name}"


@dataclass(frozen=True)
class OracleQuery:
    kind: str
    context: dict

    def __post_init__(self) -> None:
        if self.kind not in QUERY_KINDS:
            raise ValueError(f"unknown query kind {self.kind!r}")

    def normalized(self) -> str:
        return canonical_json({"kind": self.kind, "context": self.context})

    def digest(self) -> str:
        return hashlib.sha256(self.normalized().encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class OracleResponse:
    payload: dict
    provider: str
    cached: bool = False
    fallback: bool = False


def significance_query(attr: AttributeMeta) -> OracleQuery:
    return OracleQuery(
        SIGNIFICANCE,
        {"name": attr.resolved_name, "data_type": attr.data_type},
    )


def naming_query(index: int, name: str, sample: Sequence[object]) -> OracleQuery:
    return OracleQuery(
        ATTRIBUTE_NAMING,
        {
            "index": index,
            "name": name,
            "sample": [value_to_label(v) for v in sample],
        },
    )


def correlation_query(
    fv_phrase: str, group_i: str, group_j: str, across: Sequence[str], sign: str
) -> OracleQuery:
    return OracleQuery(
        CORRELATION_UNLIKELIHOOD,
        {
            "fv": fv_phrase,
            "group_i": group_i,
            "group_j": group_j,
            "across": list(across),
            "sign": sign,
        },
    )


def ratio_query(
    fv_phrase: str, group_i: str, group_j: str, across: Sequence[str], min_ratio: float
) -> OracleQuery:
    return OracleQuery(
        RATIO_UNLIKELIHOOD,
        {
            "fv": fv_phrase,
            "group_i": group_i,
            "group_j": group_j,
            "across": list(across),
            "min_ratio": round(float(min_ratio), 4),
        },
    )


def outlier_query(
    fv_phrase: str, group: str, header: str, value: float
) -> OracleQuery:
    return OracleQuery(
        OUTLIER_UNLIKELIHOOD,
        {
            "fv": fv_phrase,
            "group": group,
            "header": header,
            "value": round(float(value), 4),
        },
    )


def ranking_query(attr: AttributeMeta) -> OracleQuery:
    return OracleQuery(
        AGGREGATE_RANKING,
        {"name": attr.resolved_name, "data_type": attr.data_type},
    )


def repair_ranking(candidate: Sequence[str]) -> tuple[list[str], bool]:
    """Force a candidate ranking into a permutation of the aggregate
    functions, appending anything missing in canonical order. Returns the
    ranking and whether a repair was needed."""
    seen: list[str] = []
    for fn in candidate:
        fn_up = str(fn).upper()
        if fn_up in AGG_FUNCTIONS and fn_up not in seen:
            seen.append(fn_up)
    repaired = len(seen) != len(AGG_FUNCTIONS)
    for fn in AGG_FUNCTIONS:
        if fn not in seen:
            seen.append(fn)
    return seen, repaired


class SemanticOracle:
    """Base interface; subclasses implement :meth:`answer`."""

    provider_id = "abstract"

    def answer(self, query: OracleQuery) -> OracleResponse:
        raise NotImplementedError

    # Convenience wrappers -------------------------------------------------

    def significance(self, attr: AttributeMeta) -> float:
        value = float(self.answer(significance_query(attr)).payload["value"])
        return min(1.0, max(0.0, value))

    def suggest_attribute_name(
        self, index: int, name: str, sample: Sequence[object]
    ) -> str:
        suggested = str(self.answer(naming_query(index, name, sample)).payload["name"])
        return suggested if suggested else f"column_{index}"

    def assess_unlikelihood(self, query: OracleQuery) -> str:
        if query.kind not in UNLIKELIHOOD_KINDS:
            raise ValueError(f"{query.kind!r} is not an unlikelihood kind")
        level = self.answer(query).payload["level"]
        if level not in LIKERT_VALUES:
            raise ValueError(f"oracle returned invalid likert level {level!r}")
        return level

    def rank_aggregate_functions(self, attr: AttributeMeta) -> list[str]:
        ranking = self.answer(ranking_query(attr)).payload["ranking"]
        repaired, _ = repair_ranking(ranking)
        return repaired

    def aggregate_validity(self, agg_fn: str, attr: AttributeMeta) -> float:
        """Pr_agg(F, V): 1.0 for the best-ranked function down to 0.2."""
        ranking = self.rank_aggregate_functions(attr)
        return RANK_SCORES[ranking.index(agg_fn.upper())]


class RuleBasedOracle(SemanticOracle):
    """Deterministic offline provider.

    Significance is a deny-list over identifier-ish names and types;
    unlikelihood judgments are always neutral; aggregate rankings put COUNT
    first for identifiers and text, and put AVG ahead of SUM for numeric
    measures so that sums of ages and the like rank poorly.
    """

    provider_id = "rule_based"

    def answer(self, query: OracleQuery) -> OracleResponse:
        ctx = query.context
        if query.kind == SIGNIFICANCE:
            return self._respond({"value": self._significance(ctx)})
        if query.kind == ATTRIBUTE_NAMING:
            name = str(ctx.get("name", ""))
            if is_meaningless_name(name):
                name = f"column_{ctx.get('index', 0)}"
            return self._respond({"name": name})
        if query.kind in UNLIKELIHOOD_KINDS:
            return self._respond({"level": NEUTRAL})
        if query.kind == AGGREGATE_RANKING:
            return self._respond({"ranking": self._ranking(ctx)})
        raise ValueError(f"unsupported query kind {query.kind!r}")

    def _respond(self, payload: dict) -> OracleResponse:
        return OracleResponse(payload=payload, provider=self.provider_id)

    @staticmethod
    def _significance(ctx: dict) -> float:
        if ctx.get("data_type") == IDENTIFIER_LIKE:
            return 0.0
        tokens = set(re.split(r"[^a-z0-9]+", str(ctx.get("name", "")).lower()))
        if tokens & SIGNIFICANCE_DENY_TOKENS:
            return 0.0
        return 1.0

    @staticmethod
    def _ranking(ctx: dict) -> list[str]:
        dtype = ctx.get("data_type")
        if dtype == IDENTIFIER_LIKE:
            return ["COUNT", "MIN", "MAX", "AVG", "SUM"]
        if dtype == NUMERIC:
            return ["AVG", "MAX", "MIN", "SUM", "COUNT"]
        return ["COUNT", "MAX", "MIN", "AVG", "SUM"]


@dataclass
class RemoteOracleConfig:
    endpoint: str
    auth_token: str = ""
    timeout: float = 10.0
    max_in_flight: int = 4


_LIKERT_PHRASES = (
    ("very unlikely", VERY_UNLIKELY),
    ("very likely", VERY_LIKELY),
    ("unlikely", UNLIKELY),
    ("likely", LIKELY),
    ("neutral", NEUTRAL),
)


class RemoteOracle(SemanticOracle):
    """JSON-over-HTTP provider: POST {"prompt", "kind"} -> {"text"}.

    A malformed reply triggers one retry with a paraphrased prompt; any
    remaining failure (including timeouts) falls back to the rule-based
    provider with the response flagged."""

    provider_id = "remote"

    def __init__(self, config: RemoteOracleConfig, fallback: SemanticOracle | None = None):
        self.config = config
        self.fallback = fallback or RuleBasedOracle()
        self._client = httpx.Client(
            timeout=config.timeout,
            limits=httpx.Limits(max_connections=config.max_in_flight),
        )

    def answer(self, query: OracleQuery) -> OracleResponse:
        for prompt in self._prompts(query):
            try:
                text = self._post(prompt, query.kind)
                payload = self._parse(query, text)
            except (httpx.HTTPError, ValueError):
                continue
            if payload is not None:
                return OracleResponse(payload=payload, provider=self.provider_id)
        fallback = self.fallback.answer(query)
        return replace(fallback, fallback=True)

    def _post(self, prompt: str, kind: str) -> str:
        headers = {}
        if self.config.auth_token:
            headers["Authorization"] = f"Bearer {self.config.auth_token}"
        resp = self._client.post(
            self.config.endpoint,
            json={"prompt": prompt, "kind": kind},
            headers=headers,
        )
        resp.raise_for_status()
        return str(resp.json()["text"])

    @staticmethod
    def _prompts(query: OracleQuery) -> list[str]:
        ctx = query.context
        if query.kind == SIGNIFICANCE:
            name = ctx["name"]
            return [
                f"Answer yes or no: is {name} a significant attribute "
                "with respect to human interest?",
                f"Would a data analyst consider the attribute {name} "
                "interesting to group or aggregate by? Answer yes or no.",
            ]
        if query.kind == ATTRIBUTE_NAMING:
            sample = ", ".join(ctx["sample"])
            return [
                "Suggest a concise attribute name for a data column with "
                f"values such as: {sample}. Reply with the name only.",
                f"A table column contains: {sample}. What should this "
                "column be called? Reply with the name only.",
            ]
        if query.kind == CORRELATION_UNLIKELIHOOD:
            sign = "positively" if ctx["sign"] == "positive" else "negatively"
            across = ", ".join(ctx["across"])
            base = (
                "In a five-point scale from very likely to very unlikely, "
                f"how likely is it that the {ctx['fv']} for {ctx['group_i']} "
                f"and {ctx['group_j']} are {sign} correlated across {across}?"
            )
            return [base, base + " Answer with one of the five levels."]
        if query.kind == RATIO_UNLIKELIHOOD:
            across = ", ".join(ctx["across"])
            base = (
                "In a five-point scale from very likely to very unlikely, "
                f"how likely is it that the {ctx['fv']} for {ctx['group_i']} "
                f"is at least {ctx['min_ratio']} times that of "
                f"{ctx['group_j']} across {across}?"
            )
            return [base, base + " Answer with one of the five levels."]
        if query.kind == OUTLIER_UNLIKELIHOOD:
            base = (
                "In a five-point scale from very likely to very unlikely, "
                f"how likely is it that the {ctx['fv']} value "
                f"{ctx['value']} for {ctx['header']} is not an outlier "
                f"within {ctx['group']}?"
            )
            return [base, base + " Answer with one of the five levels."]
        if query.kind == AGGREGATE_RANKING:
            base = (
                "Rank the functions COUNT, SUM, AVG, MIN, and MAX based on "
                f"their appropriateness for analyzing {ctx['name']}. "
                "Reply with the five names in order."
            )
            return [base, base + " Best first."]
        raise ValueError(f"unsupported query kind {query.kind!r}")

    @staticmethod
    def _parse(query: OracleQuery, text: str) -> dict | None:
        lowered = text.lower()
        if query.kind == SIGNIFICANCE:
            number = re.search(r"\b(0?\.\d+|[01](\.0+)?)\b", lowered)
            if "yes" in lowered:
                return {"value": 1.0}
            if "no" in lowered:
                return {"value": 0.0}
            if number:
                value = float(number.group(1))
                if 0.0 <= value <= 1.0:
                    return {"value": value}
            return None
        if query.kind == ATTRIBUTE_NAMING:
            name = re.sub(r"[^A-Za-z0-9_ ]", "", text).strip()
            name = re.sub(r"\s+", "_", name)
            return {"name": name} if name else None
        if query.kind in UNLIKELIHOOD_KINDS:
            for phrase, level in _LIKERT_PHRASES:
                if phrase in lowered:
                    return {"level": level}
            return None
        if query.kind == AGGREGATE_RANKING:
            found = re.findall(r"count|sum|avg|average|min|max", lowered)
            candidate = ["AVG" if f == "average" else f.upper() for f in found]
            ranking, repaired = repair_ranking(candidate)
            if repaired and not candidate:
                return None
            return {"ranking": ranking}
        raise ValueError(f"unsupported query kind {query.kind!r}")


class OracleCache:
    """Append-only JSON-lines store of oracle responses, keyed by the
    sha256 of the normalized query."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self._entries: dict[str, dict] = {}
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self) -> None:
        assert self.path is not None
        with self.path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                self._entries[entry["query_hash"]] = entry

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, query: OracleQuery) -> dict | None:
        entry = self._entries.get(query.digest())
        return None if entry is None else entry["response"]

    def put(self, query: OracleQuery, payload: dict) -> None:
        entry = {
            "query_hash": query.digest(),
            "kind": query.kind,
            "context": query.context,
            "response": payload,
        }
        with self._lock:
            self._entries[entry["query_hash"]] = entry
            if self.path is not None:
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(canonical_json(entry) + "\n")


class CachingOracle(SemanticOracle):
    """Read-through cache around another oracle.

    With ``record=True`` misses are answered by the inner provider and
    persisted; with ``record=False`` the cache is replayed and misses still
    delegate (useful for replaying a recorded remote session on top of the
    rule-based provider)."""

    provider_id = "cached"

    def __init__(self, inner: SemanticOracle, cache: OracleCache, record: bool = True):
        self.inner = inner
        self.cache = cache
        self.record = record

    def answer(self, query: OracleQuery) -> OracleResponse:
        hit = self.cache.get(query)
        if hit is not None:
            return OracleResponse(payload=hit, provider=self.inner.provider_id, cached=True)
        resp = self.inner.answer(query)
        if self.record:
            self.cache.put(query, resp.payload)
        return resp


@dataclass
class ScriptedOracle(SemanticOracle):
    """Test/fixture provider: explicit answers by query digest, with a
    fallback provider for everything unscripted."""

    responses: dict[str, dict] = field(default_factory=dict)
    fallback: SemanticOracle = field(default_factory=RuleBasedOracle)
    provider_id = "scripted"

    def script(self, query: OracleQuery, payload: dict) -> None:
        self.responses[query.digest()] = payload

    def answer(self, query: OracleQuery) -> OracleResponse:
        hit = self.responses.get(query.digest())
        if hit is not None:
            return OracleResponse(payload=hit, provider=self.provider_id)
        return self.fallback.answer(query)


def resolve_attribute_names(d: Dataset, oracle: SemanticOracle) -> Dataset:
    """Replace missing or cryptic attribute names with oracle suggestions.

    Column storage is re-keyed to the new resolved names; duplicates get a
    numeric suffix.
    """
    new_names: list[str] = []
    taken: set[str] = set()
    for i, meta in enumerate(d.attributes):
        name = meta.resolved_name
        if is_meaningless_name(meta.name):
            col = d.columns[meta.resolved_name]
            sample = [v for v in col if v is not None][:5]
            name = oracle.suggest_attribute_name(i, meta.name, sample)
        base, n = name, 2
        while name in taken:
            name = f"{base}_{n}"
            n += 1
        taken.add(name)
        new_names.append(name)

    columns = {
        new_names[i]: d.columns[meta.resolved_name]
        for i, meta in enumerate(d.attributes)
    }
    attrs = tuple(
        replace(meta, resolved_name=new_names[i]) for i, meta in enumerate(d.attributes)
    )
    return Dataset(attributes=attrs, columns=columns, row_count=d.row_count)
