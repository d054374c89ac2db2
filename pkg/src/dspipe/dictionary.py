"""API dictionary: which library call belongs to which pipeline stage.

Three match kinds are supported, tried in this order:

* ``exact``: the fully resolved name, e.g. ``pandas.read_csv``;
* ``root-prefix``: a dotted prefix of the resolved name, longest wins,
  e.g. ``sklearn.metrics`` covers ``sklearn.metrics.accuracy_score``;
* ``method-suffix``: the last attribute segment, for calls on receivers a
  static pass cannot type (``model.fit``).

Entries whose stage is ``GEN`` are recognized but excluded from pipelines.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .frontend import CallEvent
from .taxonomy import Stage, UnknownStageError, stage_from_code

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_DOTTED = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*$")

SEED_RESOURCE = "seed_dictionary.json"


class DictionaryError(ValueError):
    """Schema violation in a dictionary file."""

    def __init__(self, message: str, index: int | None = None) -> None:
        where = f"entry {index}: " if index is not None else ""
        super().__init__(where + message)
        self.index = index


class Match(enum.Enum):
    EXACT = "exact"
    ROOT_PREFIX = "root-prefix"
    METHOD_SUFFIX = "method-suffix"


@dataclass(frozen=True)
class DictEntry:
    pattern: str
    match: Match
    stage: Stage
    note: str = ""

    def to_json(self) -> dict:
        out = {"pattern": self.pattern, "match": self.match.value, "stage": self.stage.code}
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class ApiDictionary:
    version: int
    entries: tuple[DictEntry, ...]
    _exact: dict = field(init=False, repr=False, compare=False)
    _prefix: dict = field(init=False, repr=False, compare=False)
    _suffix: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        tables: dict[Match, dict[str, DictEntry]] = {m: {} for m in Match}
        for i, entry in enumerate(self.entries):
            table = tables[entry.match]
            if entry.pattern in table:
                raise DictionaryError(
                    f"duplicate ({entry.pattern!r}, {entry.match.value}) entry", i
                )
            table[entry.pattern] = entry
        object.__setattr__(self, "_exact", tables[Match.EXACT])
        object.__setattr__(self, "_prefix", tables[Match.ROOT_PREFIX])
        object.__setattr__(self, "_suffix", tables[Match.METHOD_SUFFIX])

    def __len__(self) -> int:
        return len(self.entries)

    def match_entry(self, event: CallEvent) -> DictEntry | None:
        """Return the entry that decides ``event``'s stage, or None."""
        name = event.resolved_name
        hit = self._exact.get(name)
        if hit is not None:
            return hit
        # walk prefixes from longest to shortest
        parts = name.split(".")
        for end in range(len(parts), 0, -1):
            hit = self._prefix.get(".".join(parts[:end]))
            if hit is not None:
                return hit
        return self._suffix.get(event.method_name)

    def to_json(self) -> dict:
        return {"version": self.version, "entries": [e.to_json() for e in self.entries]}


def lookup(dictionary: ApiDictionary, event: CallEvent) -> Stage | None:
    """Stage for ``event``; None means no entry matched."""
    entry = dictionary.match_entry(event)
    return entry.stage if entry is not None else None


def _parse_entry(raw, index: int) -> DictEntry:
    if not isinstance(raw, dict):
        raise DictionaryError("expected an object", index)
    for key in ("pattern", "match", "stage"):
        if not isinstance(raw.get(key), str):
            raise DictionaryError(f"{key!r} missing or not a string", index)
    try:
        match = Match(raw["match"])
    except ValueError:
        raise DictionaryError(f"unknown match kind {raw['match']!r}", index) from None
    try:
        stage = stage_from_code(raw["stage"])
    except UnknownStageError as exc:
        raise UnknownStageError(f"entry {index}: {exc}") from None
    pattern = raw["pattern"]
    if match is Match.METHOD_SUFFIX:
        if not _IDENT.match(pattern):
            raise DictionaryError(f"method-suffix pattern must be one identifier: {pattern!r}", index)
    elif not _DOTTED.match(pattern):
        raise DictionaryError(f"pattern is not a dotted name: {pattern!r}", index)
    note = raw.get("note", "")
    if not isinstance(note, str):
        raise DictionaryError("'note' must be a string", index)
    return DictEntry(pattern, match, stage, note)


def parse_dictionary(doc) -> ApiDictionary:
    if not isinstance(doc, dict):
        raise DictionaryError("top level must be an object")
    version = doc.get("version")
    if not isinstance(version, int) or isinstance(version, bool):
        raise DictionaryError("'version' must be an integer")
    raw_entries = doc.get("entries")
    if not isinstance(raw_entries, list):
        raise DictionaryError("'entries' must be a list")
    entries = tuple(_parse_entry(raw, i) for i, raw in enumerate(raw_entries))
    return ApiDictionary(version, entries)


def load_dictionary(path: str | Path) -> ApiDictionary:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DictionaryError(f"invalid JSON: {exc}") from None
    return parse_dictionary(doc)


_SEED: ApiDictionary | None = None


def seed_dictionary() -> ApiDictionary:
    """The dictionary shipped with the package (cached)."""
    global _SEED
    if _SEED is None:
        text = resources.files("dspipe.data").joinpath(SEED_RESOURCE).read_text(encoding="utf-8")
        _SEED = parse_dictionary(json.loads(text))
    return _SEED
