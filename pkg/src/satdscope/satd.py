"""SATD labeling: rule-based marker matching plus external annotations.

Rule matching only ever yields Easy-To-Find (ETF) labels; the subtler
Hard-To-Find kinds always come from an external annotation table, never from
this package.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path


class SatdKind(enum.Enum):
    ETF = "ETF"
    HTF_NOISY = "HTF_NOISY"
    HTF_VALIDATED = "HTF_VALIDATED"
    NONE = "NONE"


class LabelSource(enum.Enum):
    RULE = "rule"
    EXTERNAL = "external"


@dataclass(frozen=True)
class SatdLabel:
    satd: bool
    kind: SatdKind = SatdKind.NONE
    source: LabelSource | None = None
    matched_pattern: str | None = None

    def __post_init__(self) -> None:
        if self.satd == (self.kind is SatdKind.NONE):
            raise ValueError("satd status and kind disagree")
        if self.source is LabelSource.RULE and (
            self.kind is not SatdKind.ETF or self.matched_pattern is None
        ):
            raise ValueError("rule labels must be ETF with a matched pattern")


NOT_SATD = SatdLabel(satd=False)


@dataclass(frozen=True)
class Pattern:
    id: str
    mode: str  # "word" | "substring"
    text: str

    def compile(self) -> re.Pattern[str]:
        escaped = re.escape(self.text)
        if self.mode == "word":
            # explicit lookarounds: \b misbehaves when the pattern itself
            # starts or ends with a non-word character
            escaped = rf"(?<![0-9A-Za-z_]){escaped}(?![0-9A-Za-z_])"
        return re.compile(escaped, re.IGNORECASE)


class PatternSetError(ValueError):
    pass


class PatternSet:
    """Ordered, case-insensitive SATD marker patterns."""

    def __init__(self, patterns: list[Pattern], version: str = "custom") -> None:
        if not patterns:
            raise PatternSetError("pattern set must not be empty")
        seen: set[str] = set()
        for p in patterns:
            if not p.text:
                raise PatternSetError(f"pattern {p.id!r} has empty match text")
            if p.mode not in ("word", "substring"):
                raise PatternSetError(f"pattern {p.id!r} has unknown mode {p.mode!r}")
            if p.id in seen:
                raise PatternSetError(f"duplicate pattern id {p.id!r}")
            seen.add(p.id)
        self.patterns = list(patterns)
        self.version = version
        self._compiled = [(p, p.compile()) for p in self.patterns]

    def __len__(self) -> int:
        return len(self.patterns)

    def extended(self, extra: list[Pattern], version: str) -> "PatternSet":
        return PatternSet(self.patterns + extra, version=version)

    @staticmethod
    def default() -> "PatternSet":
        text = resources.files("satdscope.data").joinpath("patterns.tsv").read_text("utf-8")
        return PatternSet(parse_pattern_lines(text.splitlines()), version="default")


def parse_pattern_lines(lines: list[str]) -> list[Pattern]:
    """Parse `id<TAB>mode<TAB>text` lines; '#' comments and blanks allowed."""
    patterns: list[Pattern] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise PatternSetError(
                f"line {lineno}: expected id<TAB>mode<TAB>text, got {line!r}"
            )
        patterns.append(Pattern(id=parts[0], mode=parts[1], text=parts[2]))
    return patterns


def load_pattern_file(path: str | Path) -> list[Pattern]:
    return parse_pattern_lines(Path(path).read_text("utf-8").splitlines())


def match_etf(text: str, patterns: PatternSet) -> SatdLabel:
    """First-match ETF labeling; pattern order breaks ties deterministically."""
    for pattern, regex in patterns._compiled:
        if regex.search(text):
            return SatdLabel(
                satd=True,
                kind=SatdKind.ETF,
                source=LabelSource.RULE,
                matched_pattern=pattern.id,
            )
    return NOT_SATD


def external_label(kind: SatdKind) -> SatdLabel:
    if kind is SatdKind.NONE:
        return SatdLabel(satd=False, kind=SatdKind.NONE, source=LabelSource.EXTERNAL)
    return SatdLabel(satd=True, kind=kind, source=LabelSource.EXTERNAL)
