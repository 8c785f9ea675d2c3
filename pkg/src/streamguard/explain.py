"""Natural-language rationales for predictions, capped at 500 characters.

The prompt carries the predicted category, the confidence percentage, the
seven boolean trait values and the raw post. Backend trouble degrades to a
deterministic template instead of raising.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from streamguard.llmfeats import LlmTraits

MAX_EXPLANATION_CHARS = 500

EXPLANATION_PROMPT_TEMPLATE = (
    "Generate an explanation in less than 500 characters\n"
    "that indicates why this post was categorized as\n"
    "{category} with {confidence}% confidence. Note\n"
    "that the features used by the model that generated\n"
    "the prediction are: derogatory={derogatory},\n"
    "humiliation={humiliation}, racist={racist}, sarcasm={sarcasm},\n"
    "sexual={sexual}, threatening={threatening} and violence={violence}.\n"
    "{post}"
)


@dataclass(frozen=True)
class ExplanationRequest:
    predicted: str  # "absent" | "present"
    confidence_pct: float  # 100 * max class probability
    traits: LlmTraits
    raw_text: str


@dataclass(frozen=True)
class Explanation:
    text: str
    generated_at: float
    degraded: bool = False


def _category_token(predicted: str) -> str:
    return "cyberbullying" if predicted == "present" else "no-cyberbullying"


def build_explanation_prompt(req: ExplanationRequest) -> str:
    t = req.traits
    return EXPLANATION_PROMPT_TEMPLATE.format(
        category=_category_token(req.predicted),
        confidence=f"{req.confidence_pct:.1f}",
        derogatory=int(t.derogatory),
        humiliation=int(t.humiliating),
        racist=int(t.racist),
        sarcasm=int(t.sarcasm),
        sexual=int(t.sexual),
        threatening=int(t.threatening),
        violence=int(t.violence),
        post=req.raw_text,
    )


def _truncate_on_word(text: str, limit: int) -> str:
    if len(text) <= limit:
        return text
    cut = text[:limit]
    space = cut.rfind(" ")
    if space > 0:
        cut = cut[:space]
    return cut


def fallback_text(req: ExplanationRequest) -> str:
    flagged = ", ".join(req.traits.active()) or "none"
    text = (
        f"Classified as {_category_token(req.predicted)} with "
        f"{req.confidence_pct:.1f}% confidence; flagged traits: {flagged}."
    )
    return _truncate_on_word(text, MAX_EXPLANATION_CHARS)


def generate_explanation(req: ExplanationRequest, backend) -> Explanation:
    """Never raises; backend failure returns the template with degraded set."""
    prompt = build_explanation_prompt(req)
    try:
        text = backend.complete(prompt)
    except Exception:
        return Explanation(text=fallback_text(req), generated_at=time.time(),
                           degraded=True)
    return Explanation(
        text=_truncate_on_word(text.strip(), MAX_EXPLANATION_CHARS),
        generated_at=time.time(),
    )
