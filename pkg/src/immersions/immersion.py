"""Immersion certificates and their text format.

A certificate names a pattern (``TT`` for the transitive tournament, ``KD``
for the complete digraph), the ordered branch vertices, and one directed
path per required pattern edge::

    pattern TT
    k 3
    branches 4 0 7
    4 0 : 4 0
    4 7 : 4 2 7
    0 7 : 0 7
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import permutations

from .errors import CertificateFormatError


class Pattern(enum.Enum):
    TRANSITIVE = "TT"
    COMPLETE = "KD"

    def required_pairs(self, branches: tuple[int, ...]) -> list[tuple[int, int]]:
        if self is Pattern.TRANSITIVE:
            return [(branches[i], branches[j]) for i in range(len(branches)) for j in range(i + 1, len(branches))]
        return list(permutations(branches, 2))


@dataclass(frozen=True)
class Immersion:
    pattern: Pattern
    branches: tuple[int, ...]
    paths: dict[tuple[int, int], tuple[int, ...]]

    @property
    def k(self) -> int:
        return len(self.branches)

    def length_histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for path in self.paths.values():
            hist[len(path) - 1] = hist.get(len(path) - 1, 0) + 1
        return dict(sorted(hist.items()))

    def max_length(self) -> int:
        return max((len(p) - 1 for p in self.paths.values()), default=0)

    def to_text(self) -> str:
        lines = [f"pattern {self.pattern.value}", f"k {self.k}", "branches " + " ".join(map(str, self.branches))]
        for u, w in self.pattern.required_pairs(self.branches):
            path = self.paths.get((u, w))
            if path is None:
                continue
            lines.append(f"{u} {w} : " + " ".join(map(str, path)))
        # extra keys (malformed certificates) are kept so the verifier can see them
        required = set(self.pattern.required_pairs(self.branches))
        for (u, w), path in sorted(self.paths.items()):
            if (u, w) not in required:
                lines.append(f"{u} {w} : " + " ".join(map(str, path)))
        return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> Immersion:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) < 3:
        raise CertificateFormatError("certificate needs pattern, k and branches lines")

    def field(line_no: int, name: str) -> str:
        key, _, rest = lines[line_no].partition(" ")
        if key != name:
            raise CertificateFormatError(f"line {line_no + 1}: expected '{name}', got {key!r}")
        return rest.strip()

    try:
        pattern = Pattern(field(0, "pattern"))
    except ValueError as exc:
        raise CertificateFormatError(f"line 1: unknown pattern ({exc})") from None
    try:
        k = int(field(1, "k"))
        branch_text = field(2, "branches")
        branches = tuple(int(x) for x in branch_text.split()) if branch_text else ()
    except ValueError:
        raise CertificateFormatError("lines 2-3: k and branches must be integers") from None
    if len(branches) != k:
        raise CertificateFormatError(f"k is {k} but {len(branches)} branches are listed")
    paths: dict[tuple[int, int], tuple[int, ...]] = {}
    for no, line in enumerate(lines[3:], start=4):
        head, sep, tail = line.partition(":")
        if not sep:
            raise CertificateFormatError(f"line {no}: missing ':'")
        try:
            u, w = (int(x) for x in head.split())
            path = tuple(int(x) for x in tail.split())
        except ValueError:
            raise CertificateFormatError(f"line {no}: expected 'u w : v0 v1 ...'") from None
        if (u, w) in paths:
            raise CertificateFormatError(f"line {no}: pair ({u}, {w}) listed twice")
        paths[(u, w)] = path
    return Immersion(pattern, branches, paths)
