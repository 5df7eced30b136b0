"""The seven single-edit typo models, their classifier, and the edit-distance oracle.

Every model produces labels exactly one optimal-string-alignment edit away from
the target: duplication, addition, removal, swapping, substitution, hyphenation,
and pluralization. All operations here are pure functions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from .corpus import Name

ETH_ALPHABET = "abcdefghijklmnopqrstuvwxyz0123456789-"
ADAH_ALPHABET = ETH_ALPHABET + "_."


def alphabet_for_namespace(namespace: str) -> str:
    return ADAH_ALPHABET if namespace == "adah" else ETH_ALPHABET


class TypoModel(enum.Enum):
    DUPLICATION = "Duplication"
    ADDITION = "Addition"
    REMOVAL = "Removal"
    SWAPPING = "Swapping"
    SUBSTITUTION = "Substitution"
    HYPHENATION = "Hyphenation"
    PLURALIZATION = "Pluralization"


# When one label arises under several models it is reported once, most specific
# model first.
MODEL_PRIORITY = (
    TypoModel.DUPLICATION,
    TypoModel.SWAPPING,
    TypoModel.SUBSTITUTION,
    TypoModel.REMOVAL,
    TypoModel.HYPHENATION,
    TypoModel.PLURALIZATION,
    TypoModel.ADDITION,
)


@dataclass(frozen=True)
class TypoVariant:
    target: Name
    variant_label: str
    model: TypoModel
    change_position: int  # 0-based index into the target label; len(label) for Pluralization


def _valid_label(label: str) -> bool:
    # Leading/trailing hyphens are invalid in all three namespaces.
    return bool(label) and not label.startswith("-") and not label.endswith("-")


def _mutations(label: str, model: TypoModel, alphabet: str) -> dict[str, int]:
    """Variant label -> change position for one model (first position wins)."""
    out: dict[str, int] = {}

    def add(variant: str, pos: int):
        if variant != label and _valid_label(variant) and variant not in out:
            out[variant] = pos

    n = len(label)
    if model is TypoModel.DUPLICATION:
        for i in range(n):
            add(label[: i + 1] + label[i] + label[i + 1 :], i)
    elif model is TypoModel.ADDITION:
        for i in range(n + 1):
            for ch in alphabet:
                add(label[:i] + ch + label[i:], i)
    elif model is TypoModel.REMOVAL:
        for i in range(n):
            add(label[:i] + label[i + 1 :], i)
    elif model is TypoModel.SWAPPING:
        for i in range(n - 1):
            add(label[:i] + label[i + 1] + label[i] + label[i + 2 :], i)
    elif model is TypoModel.SUBSTITUTION:
        for i in range(n):
            for ch in alphabet:
                if ch != label[i]:
                    add(label[:i] + ch + label[i + 1 :], i)
    elif model is TypoModel.HYPHENATION:
        for i in range(1, n):
            add(label[:i] + "-" + label[i:], i)
    elif model is TypoModel.PLURALIZATION:
        if not label.endswith("s"):
            add(label + "s", n)
    else:  # pragma: no cover
        raise ValueError(f"unknown model {model}")
    return out


def generate(target: Name, model: TypoModel, alphabet: str | None = None) -> set[TypoVariant]:
    """All registered-or-not variants of the target under one typo model."""
    if alphabet is None:
        alphabet = alphabet_for_namespace(target.namespace)
    return {
        TypoVariant(target, label, model, pos)
        for label, pos in _mutations(target.label, model, alphabet).items()
    }


def generate_all(target: Name, alphabet: str | None = None) -> set[TypoVariant]:
    """Union over all seven models, each label kept once under its priority model."""
    if alphabet is None:
        alphabet = alphabet_for_namespace(target.namespace)
    seen: dict[str, TypoVariant] = {}
    for model in MODEL_PRIORITY:
        for label, pos in _mutations(target.label, model, alphabet).items():
            if label not in seen:
                seen[label] = TypoVariant(target, label, model, pos)
    return set(seen.values())


def classify(candidate_label: str, target_label: str, alphabet: str = ETH_ALPHABET) -> set[TypoModel]:
    """Every model under which candidate is a variant of target.

    Empty set means the candidate is not a single-typo variant under these
    models. Mirrors generate() exactly without materializing variant sets.
    """
    c, t = candidate_label, target_label
    models: set[TypoModel] = set()
    if c == t or not _valid_label(c):
        return models
    lc, lt = len(c), len(t)
    if lc == lt + 1:
        for i in range(lc):
            if c[:i] + c[i + 1 :] != t:
                continue
            ch = c[i]
            if ch in alphabet:
                models.add(TypoModel.ADDITION)
            if (i > 0 and c[i - 1] == ch) or (i + 1 < lc and c[i + 1] == ch):
                models.add(TypoModel.DUPLICATION)
            if ch == "-" and 1 <= i <= lt - 1:
                models.add(TypoModel.HYPHENATION)
        if c == t + "s" and not t.endswith("s"):
            models.add(TypoModel.PLURALIZATION)
    elif lc == lt - 1:
        if any(t[:i] + t[i + 1 :] == c for i in range(lt)):
            models.add(TypoModel.REMOVAL)
    elif lc == lt:
        diffs = [i for i in range(lt) if c[i] != t[i]]
        if len(diffs) == 1 and c[diffs[0]] in alphabet:
            models.add(TypoModel.SUBSTITUTION)
        if (
            len(diffs) == 2
            and diffs[1] == diffs[0] + 1
            and c[diffs[0]] == t[diffs[1]]
            and c[diffs[1]] == t[diffs[0]]
        ):
            models.add(TypoModel.SWAPPING)
    return models


def primary_model(models: Iterable[TypoModel]) -> TypoModel | None:
    """Highest-priority model of a classify() result, or None if empty."""
    present = set(models)
    for model in MODEL_PRIORITY:
        if model in present:
            return model
    return None


def damerau_distance(a: str, b: str) -> int:
    """Optimal-string-alignment Damerau-Levenshtein distance, unit costs."""
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev2: list[int] = []
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        cur = [i] + [0] * lb
        for j in range(1, lb + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
            if i > 1 and j > 1 and a[i - 1] == b[j - 2] and a[i - 2] == b[j - 1]:
                cur[j] = min(cur[j], prev2[j - 2] + 1)
        prev2, prev = prev, cur
    return prev[lb]


def change_position_stats(variants: Iterable[TypoVariant]) -> float:
    """Fraction of variants whose edit touches the first character."""
    variants = list(variants)
    if not variants:
        return 0.0
    return sum(1 for v in variants if v.change_position == 0) / len(variants)
