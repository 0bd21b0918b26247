"""Shared text utilities: Porter stemming, token normalization, data files.

The stemmer is the classic Porter (1980) algorithm, implemented here because
the toolkit must run offline with no third-party NLP dependencies.
"""

from __future__ import annotations

import functools
import re
import unicodedata
from importlib import resources

NUM_TOKEN = "<num>"

_VOWELS = "aeiou"


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Number of VC sequences ("measure") in the stem."""
    forms = []
    for i in range(len(stem)):
        forms.append("c" if _is_consonant(stem, i) else "v")
    collapsed = re.sub(r"(.)\1+", r"\1", "".join(forms))
    return collapsed.count("vc")


def _contains_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_consonant(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    if not (
        _is_consonant(word, len(word) - 3)
        and not _is_consonant(word, len(word) - 2)
        and _is_consonant(word, len(word) - 1)
    ):
        return False
    return word[-1] not in "wxy"


def porter_stem(word: str) -> str:
    """Stem a single lowercase-ish token with the Porter algorithm."""
    w = word.lower()
    if len(w) <= 2:
        return w

    # Step 1a
    if w.endswith("sses"):
        w = w[:-2]
    elif w.endswith("ies"):
        w = w[:-2]
    elif w.endswith("ss"):
        pass
    elif w.endswith("s"):
        w = w[:-1]

    # Step 1b
    if w.endswith("eed"):
        if _measure(w[:-3]) > 0:
            w = w[:-1]
    else:
        flag = False
        if w.endswith("ed") and _contains_vowel(w[:-2]):
            w = w[:-2]
            flag = True
        elif w.endswith("ing") and _contains_vowel(w[:-3]):
            w = w[:-3]
            flag = True
        if flag:
            if w.endswith(("at", "bl", "iz")):
                w += "e"
            elif _ends_double_consonant(w) and not w.endswith(("l", "s", "z")):
                w = w[:-1]
            elif _measure(w) == 1 and _ends_cvc(w):
                w += "e"

    # Step 1c
    if w.endswith("y") and _contains_vowel(w[:-1]):
        w = w[:-1] + "i"

    # Step 2
    step2 = [
        ("ational", "ate"), ("tional", "tion"), ("enci", "ence"),
        ("anci", "ance"), ("izer", "ize"), ("abli", "able"),
        ("alli", "al"), ("entli", "ent"), ("eli", "e"), ("ousli", "ous"),
        ("ization", "ize"), ("ation", "ate"), ("ator", "ate"),
        ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
        ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"),
        ("biliti", "ble"),
    ]
    for suffix, repl in step2:
        if w.endswith(suffix):
            if _measure(w[: -len(suffix)]) > 0:
                w = w[: -len(suffix)] + repl
            break

    # Step 3
    step3 = [
        ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
        ("ical", "ic"), ("ful", ""), ("ness", ""),
    ]
    for suffix, repl in step3:
        if w.endswith(suffix):
            if _measure(w[: -len(suffix)]) > 0:
                w = w[: -len(suffix)] + repl
            break

    # Step 4
    step4 = [
        "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
        "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
    ]
    for suffix in step4:
        if w.endswith(suffix):
            stem = w[: -len(suffix)]
            if _measure(stem) > 1:
                if suffix == "ion" and not stem.endswith(("s", "t")):
                    break
                w = stem
            break

    # Step 5a
    if w.endswith("e"):
        stem = w[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            w = stem

    # Step 5b
    if _measure(w) > 1 and _ends_double_consonant(w) and w.endswith("l"):
        w = w[:-1]

    return w


def strip_accents(text: str) -> str:
    decomposed = unicodedata.normalize("NFD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


_NUMERIC_RE = re.compile(r"^[0-9]+([.,][0-9]+)*$")


def is_numeric_token(token: str) -> bool:
    return bool(_NUMERIC_RE.match(token))


def normalize_token(token: str) -> str:
    """Lowercase, accent-free stem; numeric tokens collapse to a pseudo-token."""
    if is_numeric_token(token):
        return NUM_TOKEN
    return porter_stem(strip_accents(token.lower()))


@functools.lru_cache(maxsize=1)
def _data_file(name: str) -> tuple[str, ...]:
    raw = resources.files("nameplan").joinpath("data").joinpath(name).read_text("utf-8")
    items = []
    for line in raw.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            items.append(line)
    return tuple(items)


def load_word_list(name: str) -> frozenset[str]:
    return frozenset(w.lower() for w in _data_file(name))


def load_pair_file(name: str) -> dict[str, str]:
    """Two-column data file: key value (whitespace-separated)."""
    mapping = {}
    for line in _data_file(name):
        parts = line.split()
        if len(parts) >= 2:
            mapping[parts[0].lower()] = parts[1]
    return mapping


@functools.lru_cache(maxsize=1)
def stop_words() -> frozenset[str]:
    return load_word_list("stopwords.txt")


@functools.lru_cache(maxsize=1)
def ignorable_words() -> frozenset[str]:
    """Articles and connectives skipped during token alignment."""
    return load_word_list("connectives.txt")


def content_stems(tokens: list[str] | tuple[str, ...]) -> list[str]:
    """Normalized stems with stop-words dropped (tf-idf vector terms)."""
    out = []
    for tok in tokens:
        if tok.lower() in stop_words():
            continue
        out.append(normalize_token(tok))
    return out
