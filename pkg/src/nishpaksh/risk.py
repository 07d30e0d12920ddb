"""Lifecycle risk questionnaire scoring.

Seven assessment domains, each item rated 1 (very low risk) to 5 (very
high risk). Item ratings aggregate to domain scores, domain scores to a
composite, and the composite maps onto five equal-width categories over
[1,5]. Process/technical sub-scores are reported alongside but do not
alter the composite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources as importlib_resources
from pathlib import Path

from .errors import (
    DuplicateResponseError,
    IncompleteDomainsError,
    MissingResponseError,
    OutOfRangeError,
    SchemaValidationError,
)

DOMAINS = (
    "Data",
    "Model",
    "PipelineInfra",
    "InterfaceIntegration",
    "Deployment",
    "HumanInLoop",
    "SystemLevel",
)

FACTORS = ("process", "technical")

CATEGORIES = ("VeryLow", "Low", "Medium", "MediumHigh", "High")

# Half-open buckets of equal width over [1,5]; the last bucket closes at 5.
_BUCKETS = (
    ("VeryLow", 1.0, 1.8),
    ("Low", 1.8, 2.6),
    ("Medium", 2.6, 3.4),
    ("MediumHigh", 3.4, 4.2),
    ("High", 4.2, 5.0),
)

MIN_RATING = 1
MAX_RATING = 5


@dataclass(frozen=True)
class SurveyItem:
    """One questionnaire prompt with its domain, factor tag, and weight."""

    id: str
    domain: str
    text: str
    factor: str
    weight: float = 1.0

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise SchemaValidationError(
                f"item {self.id!r} has unknown domain {self.domain!r}"
            )
        if self.factor not in FACTORS:
            raise SchemaValidationError(
                f"item {self.id!r} has unknown factor {self.factor!r}"
            )
        if self.weight <= 0:
            raise SchemaValidationError(f"item {self.id!r} needs a positive weight")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "domain": self.domain,
            "text": self.text,
            "factor": self.factor,
            "weight": self.weight,
        }


@dataclass(frozen=True)
class SurveyResponse:
    item_id: str
    rating: int

    def __post_init__(self):
        if not isinstance(self.rating, int) or isinstance(self.rating, bool):
            raise OutOfRangeError(f"rating for {self.item_id!r} must be an integer")
        if not MIN_RATING <= self.rating <= MAX_RATING:
            raise OutOfRangeError(
                f"rating for {self.item_id!r} must lie in [{MIN_RATING},{MAX_RATING}]",
                details={"item_id": self.item_id, "rating": self.rating},
            )

    def to_dict(self) -> dict:
        return {"item_id": self.item_id, "rating": self.rating}


@dataclass(frozen=True)
class RiskProfile:
    domain_scores: dict[str, float]
    process_score: float
    technical_score: float
    composite: float
    category: str

    def to_dict(self) -> dict:
        return {
            "domain_scores": dict(self.domain_scores),
            "process_score": self.process_score,
            "technical_score": self.technical_score,
            "composite": self.composite,
            "category": self.category,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RiskProfile":
        return cls(
            domain_scores=dict(data["domain_scores"]),
            process_score=float(data["process_score"]),
            technical_score=float(data["technical_score"]),
            composite=float(data["composite"]),
            category=data["category"],
        )


def load_question_bank(path: str | Path | None = None) -> list[SurveyItem]:
    """Load the active question bank (the bundled default, or a JSON file).

    A bank must cover all seven domains and carry at least one process and
    one technical item so the sub-scores stay defined.
    """
    if path is None:
        text = (
            importlib_resources.files("nishpaksh.resources")
            .joinpath("question_bank.json")
            .read_text("utf-8")
        )
    else:
        text = Path(path).read_text("utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaValidationError(f"question bank is not valid JSON: {exc}") from exc
    if not isinstance(raw, list) or not raw:
        raise SchemaValidationError("question bank must be a non-empty JSON array")
    items = []
    seen = set()
    for entry in raw:
        item = SurveyItem(
            id=entry["id"],
            domain=entry["domain"],
            text=entry["text"],
            factor=entry["factor"],
            weight=float(entry.get("weight", 1.0)),
        )
        if item.id in seen:
            raise SchemaValidationError(f"duplicate item id {item.id!r}")
        seen.add(item.id)
        items.append(item)
    domains = {i.domain for i in items}
    missing = [d for d in DOMAINS if d not in domains]
    if missing:
        raise SchemaValidationError(
            f"question bank missing domains: {missing}", details={"domains": missing}
        )
    factors = {i.factor for i in items}
    if set(FACTORS) - factors:
        raise SchemaValidationError(
            "question bank needs at least one process and one technical item"
        )
    return items


def _response_map(responses: list[SurveyResponse]) -> dict[str, int]:
    by_id: dict[str, int] = {}
    for r in responses:
        if r.item_id in by_id:
            raise DuplicateResponseError(
                f"duplicate response for item {r.item_id!r}",
                details={"item_id": r.item_id},
            )
        by_id[r.item_id] = r.rating
    return by_id


def _weighted_mean(pairs: list[tuple[float, float]]) -> float:
    total_w = sum(w for _, w in pairs)
    return sum(v * w for v, w in pairs) / total_w


def score_domain(
    items: list[SurveyItem], responses: list[SurveyResponse], domain: str
) -> float:
    """Weighted mean rating over one domain's items; every item must be answered."""
    if domain not in DOMAINS:
        raise SchemaValidationError(f"unknown domain {domain!r}")
    domain_items = [i for i in items if i.domain == domain]
    if not domain_items:
        raise MissingResponseError(
            f"question bank has no items for domain {domain!r}"
        )
    by_id = _response_map(responses)
    unanswered = [i.id for i in domain_items if i.id not in by_id]
    if unanswered:
        raise MissingResponseError(
            f"unanswered items in domain {domain!r}: {unanswered}",
            details={"item_ids": unanswered},
        )
    return _weighted_mean([(by_id[i.id], i.weight) for i in domain_items])


def aggregate_risk(
    domain_scores: dict[str, float], domain_weights: dict[str, float] | None = None
) -> float:
    """Weighted mean of the seven domain scores (uniform weights by default)."""
    missing = [d for d in DOMAINS if d not in domain_scores]
    if missing:
        raise IncompleteDomainsError(
            f"domains not scored: {missing}", details={"domains": missing}
        )
    weights = domain_weights or {d: 1.0 for d in DOMAINS}
    for d in DOMAINS:
        if weights.get(d, 0) <= 0:
            raise OutOfRangeError(f"weight for domain {d!r} must be positive")
    return _weighted_mean([(domain_scores[d], weights[d]) for d in DOMAINS])


def classify_risk(composite: float) -> str:
    """Bucket a composite in [1,5] into one of the five risk categories."""
    if not MIN_RATING <= composite <= MAX_RATING:
        raise OutOfRangeError(
            f"composite {composite} outside [{MIN_RATING},{MAX_RATING}]"
        )
    for name, lo, hi in _BUCKETS:
        if composite < hi:
            return name
    return _BUCKETS[-1][0]  # composite == 5.0


def assess(
    items: list[SurveyItem],
    responses: list[SurveyResponse],
    domain_weights: dict[str, float] | None = None,
) -> RiskProfile:
    """Score every domain, the factor sub-scores, and classify the composite."""
    by_id = _response_map(responses)
    unanswered = [i.id for i in items if i.id not in by_id]
    if unanswered:
        raise MissingResponseError(
            f"unanswered items: {unanswered}", details={"item_ids": unanswered}
        )
    unknown = [item_id for item_id in by_id if item_id not in {i.id for i in items}]
    if unknown:
        raise SchemaValidationError(
            f"responses reference unknown items: {unknown}",
            details={"item_ids": unknown},
        )
    domain_scores = {d: score_domain(items, responses, d) for d in DOMAINS}
    factor_scores = {}
    for factor in FACTORS:
        pairs = [(by_id[i.id], i.weight) for i in items if i.factor == factor]
        factor_scores[factor] = _weighted_mean(pairs)
    composite = aggregate_risk(domain_scores, domain_weights)
    return RiskProfile(
        domain_scores=domain_scores,
        process_score=factor_scores["process"],
        technical_score=factor_scores["technical"],
        composite=composite,
        category=classify_risk(composite),
    )


def parse_responses(raw: list[dict]) -> list[SurveyResponse]:
    """Build responses from JSON-shaped dicts ({item_id, rating})."""
    out = []
    for entry in raw:
        try:
            rating = entry["rating"]
            if isinstance(rating, float) and rating.is_integer():
                rating = int(rating)
            out.append(SurveyResponse(item_id=entry["item_id"], rating=rating))
        except (KeyError, TypeError) as exc:
            raise SchemaValidationError(
                f"malformed survey response entry: {entry!r}"
            ) from exc
    return out
