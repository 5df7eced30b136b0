"""Squat-cluster construction, registration statistics, and squatter profiling.

Detection is generate-and-lookup: for each target we materialize all single-edit
variants and probe the dataset's display index, which keeps cost independent of
corpus size.
"""

from __future__ import annotations

import enum
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .corpus import Dataset, Name, Registration
from .similarity import (
    HIGHLY_SIMILAR_FROM,
    NOT_SIMILAR_BELOW,
    SimilaritySummary,
)
from .typo_models import TypoModel, TypoVariant, generate_all

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SquatEntry:
    registration: Registration
    model: TypoModel
    change_position: int


@dataclass
class SquatCluster:
    """One legitimate target plus the registered typo variants pointing at it."""

    target: Registration
    squats: list[SquatEntry] = field(default_factory=list)
    defensive: list[Registration] = field(default_factory=list)


class CampaignStyle(enum.Enum):
    SINGLE_TYPO = "SingleTypo"
    MULTI_TARGET_DISSIMILAR = "MultiTargetDissimilar"
    MULTI_TARGET_SIMILAR = "MultiTargetSimilar"
    UNCLASSIFIED = "Unclassified"


@dataclass
class SquatterProfile:
    wallet: str
    unique_targets: int
    typo_names: int
    total_domains_owned: int
    namespaces: set[str]
    campaign_style: CampaignStyle = CampaignStyle.UNCLASSIFIED


def _candidate_namespaces(target: Name, dataset: Dataset, cross_tld: bool) -> list[str]:
    if not cross_tld or not target.namespace.startswith("ud:"):
        return [target.namespace]
    return sorted(ns for ns in dataset.namespaces if ns.startswith("ud:"))


def detect(
    targets: list[Name],
    dataset: Dataset,
    alphabet: str | None = None,
    cross_tld: bool = False,
) -> list[SquatCluster]:
    """Build squat clusters for each target.

    Variants that are themselves targets or that predate the target are dropped;
    variants sharing the target's owner go under defensive. Clusters with no
    squats and no defensive entries are omitted. Output order follows target rank.
    """
    target_displays = {t.display for t in targets}
    clusters: list[SquatCluster] = []
    for target in targets:
        target_reg = dataset.by_display.get(target.display)
        if target_reg is None:
            log.warning("target %s not in dataset; skipped", target.display)
            continue
        cluster = SquatCluster(target=target_reg)
        seen: set[str] = set()
        for variant in sorted(generate_all(target, alphabet), key=lambda v: v.variant_label):
            for namespace in _candidate_namespaces(target, dataset, cross_tld):
                display = Name(variant.variant_label, namespace).display
                if display in target_displays or display in seen:
                    continue
                reg = dataset.by_display.get(display)
                if reg is None or reg.registered_at < target_reg.registered_at:
                    continue
                seen.add(display)
                if reg.owner == target_reg.owner:
                    cluster.defensive.append(reg)
                else:
                    cluster.squats.append(SquatEntry(reg, variant.model, variant.change_position))
        if cluster.squats or cluster.defensive:
            clusters.append(cluster)
    return clusters


@dataclass
class RegistrationStats:
    per_year: dict[int, int]
    delta_days: list[float]
    first_char_fraction: float
    model_histogram: dict[TypoModel, int]
    typos_per_target: dict[int, int]  # n_squats -> number of targets with that many


def registration_stats(clusters: list[SquatCluster]) -> RegistrationStats:
    per_year: Counter[int] = Counter()
    deltas: list[float] = []
    models: Counter[TypoModel] = Counter()
    typos_per_target: Counter[int] = Counter()
    first_char = 0
    total = 0
    for cluster in clusters:
        typos_per_target[len(cluster.squats)] += 1
        for entry in cluster.squats:
            total += 1
            per_year[entry.registration.registered_at.year] += 1
            delta = entry.registration.registered_at - cluster.target.registered_at
            deltas.append(delta.total_seconds() / 86400.0)
            models[entry.model] += 1
            if entry.change_position == 0:
                first_char += 1
    return RegistrationStats(
        per_year=dict(per_year),
        delta_days=deltas,
        first_char_fraction=first_char / total if total else 0.0,
        model_histogram=dict(models),
        typos_per_target=dict(typos_per_target),
    )


def squatter_profiles(clusters: list[SquatCluster], dataset: Dataset) -> list[SquatterProfile]:
    """Group squat registrations by owner wallet."""
    targets_by_wallet: dict[str, set[str]] = defaultdict(set)
    typos_by_wallet: dict[str, set[str]] = defaultdict(set)
    for cluster in clusters:
        for entry in cluster.squats:
            wallet = entry.registration.owner
            targets_by_wallet[wallet].add(cluster.target.name.display)
            typos_by_wallet[wallet].add(entry.registration.name.display)
    profiles = []
    for wallet in sorted(typos_by_wallet):
        owned = dataset.by_owner.get(wallet, set())
        profiles.append(
            SquatterProfile(
                wallet=wallet,
                unique_targets=len(targets_by_wallet[wallet]),
                typo_names=len(typos_by_wallet[wallet]),
                total_domains_owned=len(owned),
                namespaces={n.namespace for n in owned},
            )
        )
    return profiles


def cross_namespace_fraction(profiles: list[SquatterProfile]) -> float:
    """Fraction of squatter wallets owning names in more than one namespace."""
    if not profiles:
        return 0.0
    multi = sum(1 for p in profiles if len(p.namespaces) > 1)
    return multi / len(profiles)


def classify_campaign(
    profile: SquatterProfile,
    similarity_summary: SimilaritySummary | None,
    low: float = NOT_SIMILAR_BELOW,
    high: float = HIGHLY_SIMILAR_FROM,
) -> CampaignStyle:
    """Assign one of the three observed squatting styles, or Unclassified."""
    if profile.typo_names == 1 and profile.total_domains_owned == 1:
        return CampaignStyle.SINGLE_TYPO
    if similarity_summary is None:
        return CampaignStyle.UNCLASSIFIED
    avg = similarity_summary.many_to_many_avg
    if avg >= high:
        return CampaignStyle.MULTI_TARGET_SIMILAR
    if avg < low:
        return CampaignStyle.MULTI_TARGET_DISSIMILAR
    return CampaignStyle.UNCLASSIFIED
