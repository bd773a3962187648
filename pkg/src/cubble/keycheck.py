"""Reconcile site identifiers between spatial and temporal sources.

Exact matches pair immediately. Among the leftovers, near-miss pairs
are proposed (one renamed catchment vs. its shorter official name, and
the like) so the analyst can reconcile the inputs before building a
cubble.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .table import Column, CubbleError, Kind, Table, scalar_to_text

# Minimum normalized Levenshtein similarity for a near-miss proposal.
SIMILARITY_THRESHOLD = 0.8

_PUNCT_RE = re.compile(r"[^\w\s]", re.UNICODE)
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class KeyReport:
    """Partition of key values into exact pairs, near misses, and leftovers."""

    paired: Table
    potential_pairs: Table
    others_spatial: tuple[str, ...] = field(default_factory=tuple)
    others_temporal: tuple[str, ...] = field(default_factory=tuple)

    @property
    def clean(self) -> bool:
        return (
            self.potential_pairs.nrow == 0
            and not self.others_spatial
            and not self.others_temporal
        )

    def to_json_dict(self) -> dict:
        return {
            "paired": [
                {"spatial": s, "temporal": t}
                for s, t in zip(
                    self.paired.column("spatial").values,
                    self.paired.column("temporal").values,
                )
            ],
            "potential_pairs": [
                {"spatial": s, "temporal": t}
                for s, t in zip(
                    self.potential_pairs.column("spatial").values,
                    self.potential_pairs.column("temporal").values,
                )
            ],
            "others_spatial": list(self.others_spatial),
            "others_temporal": list(self.others_temporal),
        }

    def render(self) -> str:
        lines = ["paired:"]
        for s, t in zip(
            self.paired.column("spatial").values,
            self.paired.column("temporal").values,
        ):
            lines.append(f"  {s}  =  {t}")
        lines.append("potential pairs:")
        for s, t in zip(
            self.potential_pairs.column("spatial").values,
            self.potential_pairs.column("temporal").values,
        ):
            lines.append(f"  {s}  ~  {t}")
        lines.append("others:")
        lines.append(f"  spatial:  {', '.join(self.others_spatial) or '(none)'}")
        lines.append(f"  temporal: {', '.join(self.others_temporal) or '(none)'}")
        return "\n".join(lines)


def normalize(text: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace."""
    out = _PUNCT_RE.sub(" ", text.lower())
    return _WS_RE.sub(" ", out).strip()


def levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost))
        prev = cur
    return prev[-1]


def similarity(a: str, b: str) -> float:
    """1 - normalized Levenshtein distance, on normalized strings."""
    na, nb = normalize(a), normalize(b)
    longest = max(len(na), len(nb))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(na, nb) / longest


def _is_candidate(a: str, b: str) -> bool:
    na, nb = normalize(a), normalize(b)
    if not na or not nb:
        return False
    if na.startswith(nb) or nb.startswith(na):
        return True
    ta, tb = set(na.split()), set(nb.split())
    if ta <= tb or tb <= ta:
        return True
    return similarity(a, b) >= SIMILARITY_THRESHOLD


def _key_texts(table: Table, column: str) -> list[str]:
    col = table.column(column)
    seen = set()
    out = []
    for v in col.values:
        text = scalar_to_text(v)
        if text not in seen:
            seen.add(text)
            out.append(text)
    return out


def check_key(spatial: Table, temporal: Table, by: dict[str, str]) -> KeyReport:
    """Summarise key matches between a spatial and a temporal table.

    `by` maps the spatial key column to the temporal key column. Keys are
    compared as text. The result partitions each side's distinct keys:
    exact matches, one-to-one near-miss proposals ranked by descending
    similarity (ties broken lexicographically), and unmatched leftovers.
    """
    if len(by) != 1:
        raise CubbleError("`by` must map exactly one spatial column to one temporal column")
    (s_col, t_col), = by.items()
    s_keys = _key_texts(spatial, s_col)
    t_keys = _key_texts(temporal, t_col)

    t_set = set(t_keys)
    paired = sorted(k for k in s_keys if k in t_set)
    paired_set = set(paired)

    s_rest = [k for k in s_keys if k not in paired_set]
    t_rest = [k for k in t_keys if k not in paired_set]

    candidates = []
    for s in s_rest:
        for t in t_rest:
            if _is_candidate(s, t):
                candidates.append((-similarity(s, t), s, t))
    candidates.sort()

    used_s: set[str] = set()
    used_t: set[str] = set()
    chosen: list[tuple[str, str]] = []
    for _, s, t in candidates:
        if s in used_s or t in used_t:
            continue
        used_s.add(s)
        used_t.add(t)
        chosen.append((s, t))
    chosen.sort()

    others_s = tuple(sorted(k for k in s_rest if k not in used_s))
    others_t = tuple(sorted(k for k in t_rest if k not in used_t))

    return KeyReport(
        paired=Table(
            [
                Column("spatial", paired, Kind.TEXT),
                Column("temporal", list(paired), Kind.TEXT),
            ]
        ),
        potential_pairs=Table(
            [
                Column("spatial", [s for s, _ in chosen], Kind.TEXT),
                Column("temporal", [t for _, t in chosen], Kind.TEXT),
            ]
        ),
        others_spatial=others_s,
        others_temporal=others_t,
    )
