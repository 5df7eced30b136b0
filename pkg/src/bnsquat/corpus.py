"""Core data model: normalized names, registrations, and the indexed dataset.

All matching in the toolkit happens on lowercase ASCII labels; internationalized
labels are stored in their punycode ("xn--") form. The Dataset is immutable after
load and safe for concurrent reads.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Iterator

from .errors import EmptyLabel, ParseError, UnknownNamespace

log = logging.getLogger(__name__)

SOURCES = ("ens", "ud-eth", "ud-polygon", "adah")
CHAIN_SYMBOLS = ("ETH", "MATIC", "ADA")

_UD_NS_RE = re.compile(r"^ud:([a-z0-9]+)$")


def _valid_namespace(namespace: str) -> bool:
    return namespace == "eth" or namespace == "adah" or bool(_UD_NS_RE.match(namespace))


def _to_punycode(label: str) -> str:
    if label.isascii():
        return label
    return "xn--" + label.encode("punycode").decode("ascii")


@dataclass(frozen=True)
class Name:
    """A normalized label within a namespace, the unit every algorithm operates on."""

    label: str
    namespace: str  # "eth", "ud:<tld>", or "adah"

    def __post_init__(self):
        if not self.label:
            raise EmptyLabel("label must be non-empty")
        if not _valid_namespace(self.namespace):
            raise UnknownNamespace(f"unknown namespace {self.namespace!r}")

    @property
    def display(self) -> str:
        if self.namespace == "eth":
            return f"{self.label}.eth"
        if self.namespace == "adah":
            return f"${self.label}"
        tld = _UD_NS_RE.match(self.namespace).group(1)
        return f"{self.label}.{tld}"


def normalize_name(raw: str, namespace: str) -> Name:
    """Normalize a raw display form into a Name.

    Lowercases, strips the namespace separator (".eth"/".<tld>" suffix or "$"
    prefix), and converts non-ASCII labels to punycode.
    """
    if not _valid_namespace(namespace):
        raise UnknownNamespace(f"unknown namespace {namespace!r}")
    label = raw.strip().lower()
    if namespace == "adah":
        label = label.removeprefix("$")
    elif namespace == "eth":
        label = label.removesuffix(".eth")
    else:
        tld = _UD_NS_RE.match(namespace).group(1)
        label = label.removesuffix("." + tld)
    if not label:
        raise EmptyLabel(f"nothing left of {raw!r} after stripping")
    return Name(label=_to_punycode(label), namespace=namespace)


def namespace_for_source(source: str) -> str | None:
    """Fixed namespace for sources that imply one; UD sources carry per-record TLDs."""
    return {"ens": "eth", "adah": "adah"}.get(source)


def infer_namespace(display: str, source: str) -> str:
    """Work out the namespace of a fixture display form given its source."""
    ns = namespace_for_source(source)
    if ns is not None:
        return ns
    if source not in SOURCES:
        raise UnknownNamespace(f"unknown source {source!r}")
    if "." not in display:
        raise ParseError(f"UD display {display!r} has no TLD", field="display")
    return "ud:" + display.rsplit(".", 1)[1].lower()


@dataclass(frozen=True)
class Registration:
    """A name bound to an owner wallet and resolution addresses."""

    name: Name
    owner: str
    resolution_addresses: dict[str, str]  # chain symbol -> address
    registered_at: datetime
    source: str

    def __post_init__(self):
        if not self.owner:
            raise ValueError("owner must be non-empty")
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")


def is_subdomain(reg: Registration) -> bool:
    """Subdomains (e.g. funds.johndoe.eth) are stored but excluded from targeting."""
    return reg.name.namespace == "eth" and "." in reg.name.label


@dataclass
class Dataset:
    """Immutable in-memory index over a set of registrations.

    Duplicate displays resolve last-wins; the number of overwrites is kept in
    ``duplicate_warnings``.
    """

    registrations: list[Registration] = field(default_factory=list)
    by_display: dict[str, Registration] = field(default_factory=dict)
    by_resolution: dict[str, set[Name]] = field(default_factory=dict)
    by_owner: dict[str, set[Name]] = field(default_factory=dict)
    duplicate_warnings: int = 0

    def __len__(self) -> int:
        return len(self.registrations)

    @property
    def namespaces(self) -> set[str]:
        return {r.name.namespace for r in self.registrations}


def build_dataset(regs: Iterable[Registration]) -> Dataset:
    """Index registrations, resolving duplicate displays last-wins."""
    by_display: dict[str, Registration] = {}
    duplicates = 0
    for reg in regs:
        key = reg.name.display
        if key in by_display:
            duplicates += 1
            log.warning("duplicate display %s: keeping later record", key)
        by_display[key] = reg
    ds = Dataset(
        registrations=list(by_display.values()),
        by_display=by_display,
        duplicate_warnings=duplicates,
    )
    for reg in ds.registrations:
        for addr in reg.resolution_addresses.values():
            ds.by_resolution.setdefault(addr, set()).add(reg.name)
        ds.by_owner.setdefault(reg.owner, set()).add(reg.name)
    return ds


def parse_registration_record(obj: dict, line: int | None = None) -> Registration:
    """Parse one fixture record (see the fixture schema in the README)."""
    for f in ("display", "owner", "registered_at", "source"):
        if f not in obj:
            raise ParseError("missing field", line=line, field=f)
    source = obj["source"]
    namespace = obj.get("namespace") or infer_namespace(obj["display"], source)
    name = normalize_name(obj["display"], namespace)
    resolution = obj.get("resolution") or {}
    if not isinstance(resolution, dict):
        raise ParseError("resolution must be an object", line=line, field="resolution")
    for symbol in resolution:
        if symbol not in CHAIN_SYMBOLS:
            raise ParseError(f"unknown chain symbol {symbol!r}", line=line, field="resolution")
    try:
        registered_at = datetime.fromisoformat(obj["registered_at"].replace("Z", "+00:00"))
    except (ValueError, AttributeError) as exc:
        raise ParseError(str(exc), line=line, field="registered_at") from exc
    if registered_at.tzinfo is None:
        registered_at = registered_at.replace(tzinfo=timezone.utc)
    return Registration(
        name=name,
        owner=obj["owner"],
        resolution_addresses=dict(resolution),
        registered_at=registered_at,
        source=source,
    )


def load_registrations(records: Iterable[dict]) -> Dataset:
    """Build a Dataset from parsed fixture records."""
    return build_dataset(parse_registration_record(obj, line=i + 1) for i, obj in enumerate(records))


def iter_jsonl(lines: Iterable[str]) -> Iterator[dict]:
    """Yield JSON objects from JSONL text, raising ParseError with line numbers."""
    for i, raw in enumerate(lines):
        raw = raw.strip()
        if not raw:
            continue
        try:
            yield json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc), line=i + 1) from exc
