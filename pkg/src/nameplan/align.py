"""Token alignment between candidate noun phrases and tokenized names.

Distances are character-based Levenshtein with insert/delete cost 1 and
substitution cost 2, case-insensitive. A pair's distance is normalized by
the summed character lengths of its two tokens (the maximum achievable cost
under these costs), giving a value in [0, 1]. Articles and connectives are
skipped when forming pairs but still count toward the phrase lengths in the
final score.
"""

from __future__ import annotations

from dataclasses import dataclass

from .text import ignorable_words


def levenshtein(a: str, b: str) -> int:
    """Edit distance with insert/delete cost 1, substitute cost 2 (case folded)."""
    a = a.lower()
    b = b.lower()
    prev = list(range(len(b) + 1))
    for i in range(1, len(a) + 1):
        cur = [i] + [0] * len(b)
        for j in range(1, len(b) + 1):
            sub = prev[j - 1] + (0 if a[i - 1] == b[j - 1] else 2)
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, sub)
        prev = cur
    return prev[len(b)]


def normalized_distance(a: str, b: str) -> float:
    total = len(a) + len(b)
    if total == 0:
        return 0.0
    return levenshtein(a, b) / total


@dataclass(frozen=True)
class Alignment:
    # (name token index, np token index, normalized distance)
    pairs: tuple[tuple[int, int, float], ...]
    crossed_edges: int


def _count_crossings(pairs: list[tuple[int, int, float]]) -> int:
    crossings = 0
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            if (pairs[i][0] - pairs[j][0]) * (pairs[i][1] - pairs[j][1]) < 0:
                crossings += 1
    return crossings


def align_tokens(name_tokens: list[str] | tuple[str, ...],
                 np_tokens: list[str] | tuple[str, ...]) -> Alignment:
    """Greedy one-to-one pairing by ascending normalized distance.

    Ignorable words (articles/connectives) on either side never form pairs.
    Ties break on (name index, np index) so the result is deterministic.
    """
    skip = ignorable_words()
    name_idx = [i for i, t in enumerate(name_tokens) if t.lower() not in skip]
    np_idx = [j for j, t in enumerate(np_tokens) if t.lower() not in skip]
    candidates = []
    for i in name_idx:
        for j in np_idx:
            d = normalized_distance(name_tokens[i], np_tokens[j])
            candidates.append((d, i, j))
    candidates.sort()
    used_name: set[int] = set()
    used_np: set[int] = set()
    pairs: list[tuple[int, int, float]] = []
    for d, i, j in candidates:
        if i in used_name or j in used_np:
            continue
        used_name.add(i)
        used_np.add(j)
        pairs.append((i, j, d))
    pairs.sort()
    return Alignment(tuple(pairs), _count_crossings(pairs))


def similarity(np_tokens: list[str] | tuple[str, ...],
               name_tokens: list[str] | tuple[str, ...]) -> tuple[float, Alignment]:
    """Alignment score in [0, 1]: sum of pair affinities over the longer length.

    Lengths count all tokens of each side, including the ignorable ones that
    were skipped while pairing.
    """
    alignment = align_tokens(name_tokens, np_tokens)
    if not np_tokens or not name_tokens:
        return 0.0, alignment
    total = sum(1.0 - d for _, _, d in alignment.pairs)
    score = total / max(len(np_tokens), len(name_tokens))
    return score, alignment
