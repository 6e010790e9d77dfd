"""Tweet cleaning pipeline: anonymize, handle replacement, hashtag stripping,
lowercasing, and brand-to-generic drug normalization, applied in that fixed order.

Stage behavior:

* anonymize    -- emails become their domain ("john@gmail.com" -> "gmail.com"),
                  URLs become the literal "-URL-", and (c)/(tm)/(r) symbols are
                  dropped. Emails are handled first so a domain that itself
                  looks like a URL is caught in the same pass.
* handles      -- "@name" tokens become "-TH-".
* hashtags     -- a single leading "#" is stripped from each word.
* lowercase    -- plain str.lower(); note it also lowers the placeholders,
                  so fully processed text carries "-url-" and "-th-".
* drugnorm     -- whole-word, longest-match-first replacement of lexicon brand
                  names with generic names; requires lowercased input.

Output whitespace is always collapsed to single spaces and trimmed.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass, field
from pathlib import Path

STAGES = ("anonymize", "handles", "hashtags", "lowercase", "drugnorm")

# Word boundaries for handle and drug matching: unicode whitespace plus ASCII
# punctuation except "-" and "'" (kept so hyphenated drug names stay whole).
_DELIM_PUNCT = "".join(c for c in string.punctuation if c not in "-'")
_NON_DELIM = f"[^\\s{re.escape(_DELIM_PUNCT)}]"

_EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@([A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)+)")
_URL_RE = re.compile(r"https?://\S+|(?<![A-Za-z0-9.-])www\.\S+")
_SYMBOL_TABLE = str.maketrans("", "", "©™®")  # (c) (tm) (r)
_HANDLE_RE = re.compile(rf"(?<!{_NON_DELIM})@[A-Za-z0-9_]+")
_HASHTAG_RE = re.compile(r"(?:^|(?<=\s))#")


@dataclass(frozen=True)
class DrugLexicon:
    """Lowercase brand-name -> generic-name mapping.

    Keys may be multi-token ("tylenol pm"). Generic names must be fixpoints:
    no generic may itself appear as a brand key, which makes normalization
    idempotent.
    """

    entries: dict[str, str]
    _pattern: re.Pattern = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for brand, generic in self.entries.items():
            if not brand or not generic:
                raise ValueError("lexicon entries must be non-empty")
            if brand != brand.lower() or generic != generic.lower():
                raise ValueError(f"lexicon entry {brand!r} -> {generic!r} is not lowercase")
            if brand == generic:
                raise ValueError(f"self-mapping rejected: {brand!r}")
        generics = set(self.entries.values())
        offenders = generics & set(self.entries)
        if offenders:
            raise ValueError(
                f"generic names must not appear as brand keys: {sorted(offenders)}"
            )
        # Longest key first so overlapping brands resolve to the longest match.
        keys = sorted(self.entries, key=lambda k: (-len(k), k))
        if keys:
            pattern = re.compile(
                rf"(?<!{_NON_DELIM})(?:{'|'.join(re.escape(k) for k in keys)})(?!{_NON_DELIM})"
            )
        else:
            pattern = re.compile(r"(?!)")  # never matches
        object.__setattr__(self, "_pattern", pattern)

    def __len__(self) -> int:
        return len(self.entries)


def load_lexicon(path: str | Path) -> DrugLexicon:
    """Read a ``brand<TAB>generic`` file; '#'-prefixed lines are comments.

    Entries are lowercased; exact duplicate rows are allowed, conflicting
    duplicate keys are rejected.
    """
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ValueError(f"expected 2 tab-separated fields at line {lineno}")
            brand, generic = fields[0].strip().lower(), fields[1].strip().lower()
            if brand in entries and entries[brand] != generic:
                raise ValueError(
                    f"conflicting duplicate key {brand!r} at line {lineno}: "
                    f"{entries[brand]!r} vs {generic!r}"
                )
            entries[brand] = generic
    return DrugLexicon(entries)


@dataclass(frozen=True)
class PipelineConfig:
    """Which stages run. Stage order is fixed; enabled_stages must list them
    in pipeline order, and drugnorm requires lowercase (and a lexicon)."""

    enabled_stages: tuple[str, ...] = STAGES
    lexicon: DrugLexicon | None = None

    def __post_init__(self):
        object.__setattr__(self, "enabled_stages", tuple(self.enabled_stages))
        unknown = [s for s in self.enabled_stages if s not in STAGES]
        if unknown:
            raise ValueError(f"unknown stages: {unknown} (choose from {list(STAGES)})")
        if len(set(self.enabled_stages)) != len(self.enabled_stages):
            raise ValueError("duplicate stages in enabled_stages")
        ordered = tuple(s for s in STAGES if s in self.enabled_stages)
        if self.enabled_stages != ordered:
            raise ValueError(
                f"stages must follow the fixed pipeline order {list(STAGES)}"
            )
        if "drugnorm" in self.enabled_stages:
            if "lowercase" not in self.enabled_stages:
                raise ValueError("drugnorm requires the lowercase stage")
            if self.lexicon is None:
                raise ValueError("lexicon required when drugnorm is enabled")


def anonymize(text: str) -> str:
    """Strip emails to their domain, replace URLs with -URL-, drop (c)/(tm)/(r)."""
    text = _EMAIL_RE.sub(lambda m: m.group(1), text)
    text = _URL_RE.sub("-URL-", text)
    return text.translate(_SYMBOL_TABLE)


def replace_handles(text: str) -> str:
    """Replace each @name token with -TH-. Assumes emails were removed first."""
    return _HANDLE_RE.sub("-TH-", text)


def remove_hashtags(text: str) -> str:
    """Strip one leading '#' from each word; interior '#' stays put."""
    return _HASHTAG_RE.sub("", text)


def drug_normalize(text: str, lex: DrugLexicon) -> str:
    """Replace whole-word brand-name occurrences with generic names.

    Expects lowercased text; matching is whole-word with the longest brand
    winning where keys overlap.
    """
    return lex._pattern.sub(lambda m: lex.entries[m.group(0)], text)


def preprocess(text: str, cfg: PipelineConfig) -> str:
    """Run the enabled stages in pipeline order and normalize whitespace."""
    enabled = set(cfg.enabled_stages)
    if "anonymize" in enabled:
        text = anonymize(text)
    if "handles" in enabled:
        text = replace_handles(text)
    if "hashtags" in enabled:
        text = remove_hashtags(text)
    if "lowercase" in enabled:
        text = text.lower()
    # Collapse before drugnorm so multi-word brands match across any spacing.
    text = " ".join(text.split())
    if "drugnorm" in enabled:
        text = drug_normalize(text, cfg.lexicon)
    return text
