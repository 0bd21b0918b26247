"""Candidate name extraction for ontology entities.

Pipeline per entity: shorten the tokenized identifier against the objects of
its triples (deciding anonymity), build alternative identifiers, collect
noun phrases from the entity's retrieved sentences, score them by token
alignment, and convert the best ones into annotated name structures.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field

from .align import Alignment, similarity
from .corpus import CorpusStore, SentenceOcc
from .ontology import Ontology, TokenizedName
from .realize import (
    AdjectiveSlot,
    ArticleSlot,
    InflectionLexicon,
    NLName,
    NounSlot,
    PrepositionSlot,
    StringSlot,
    default_lexicon,
    name_to_notation,
    realize_nlname,
)
from .text import is_numeric_token, load_word_list

NOUN_TAGS = {"NN": ("sing", False), "NNS": ("plur", False),
             "NNP": ("sing", True), "NNPS": ("plur", True)}
ADJ_TAGS = {"JJ", "JJR", "JJS"}
PREP_TAGS = {"IN", "TO"}


class NoHeadError(ValueError):
    pass


def entity_group(eid: str) -> str:
    return f"entity:{eid}"


# -- shortening and alternative names ------------------------------------------


@dataclass
class AltNameSet:
    primary: TokenizedName
    alternatives: list[TokenizedName] = field(default_factory=list)
    anonymous: bool = False

    def all_names(self) -> list[TokenizedName]:
        return [self.primary] + self.alternatives


def _remove_subsequence(tokens: list[str], part: tuple[str, ...]) -> list[str] | None:
    """Remove the first occurrence of `part` (contiguous, case-insensitive)."""
    n = len(part)
    if n == 0 or n > len(tokens):
        return None
    lowered = [t.lower() for t in tokens]
    target = [t.lower() for t in part]
    for i in range(len(tokens) - n + 1):
        if lowered[i : i + n] == target:
            return tokens[:i] + tokens[i + n :]
    return None


def shorten_tokenized_name(onto: Ontology, eid: str) -> AltNameSet:
    """Drop object-name parts from the entity's tokenized identifier.

    Longest object names are removed first and the scan restarts after every
    removal. The entity is anonymous when nothing usable remains (empty or
    all-numeric remainder).
    """
    primary = onto.token_name(eid)
    object_names = []
    for triple in onto.triples_about(eid):
        object_names.append(onto.token_name(triple.o).tokens)
    object_names.sort(key=lambda toks: (-len(toks), toks))

    remainder = list(primary.tokens)
    changed = True
    while changed and remainder:
        changed = False
        for part in object_names:
            shorter = _remove_subsequence(remainder, part)
            if shorter is not None:
                remainder = shorter
                changed = True
                break

    anonymous = not remainder or all(is_numeric_token(t) for t in remainder)
    result = AltNameSet(primary, anonymous=anonymous)
    if not anonymous and remainder != list(primary.tokens):
        result.alternatives.append(TokenizedName(tuple(remainder), "shortened"))
    return result


def _contains(tokens: tuple[str, ...], part: tuple[str, ...]) -> bool:
    lowered = [t.lower() for t in tokens]
    target = [t.lower() for t in part]
    n = len(target)
    return n > 0 and any(lowered[i : i + n] == target for i in range(len(tokens) - n + 1))


def make_alt_names(onto: Ontology, eid: str) -> AltNameSet:
    """Full alternative-name set: shortening plus ancestor-appended,
    number-stripped and bracket-part variants."""
    base = shorten_tokenized_name(onto, eid)
    if base.anonymous:
        return base
    primary = base.primary
    seen = {tuple(t.lower() for t in n.tokens) for n in base.all_names()}

    def add(tokens: tuple[str, ...], source: str):
        if not tokens:
            return
        key = tuple(t.lower() for t in tokens)
        if key in seen:
            return
        seen.add(key)
        base.alternatives.append(TokenizedName(tokens, source))

    ancestor_names = [onto.token_name(a).tokens for a in onto.ancestors_of(eid)]
    if not any(_contains(primary.tokens, anc) for anc in ancestor_names if anc):
        for anc in ancestor_names:
            # appended ancestors serve as common head nouns, hence lowercase
            add(primary.tokens + tuple(t.lower() for t in anc), "ancestor-appended")

    stripped = tuple(t for t in primary.tokens if not is_numeric_token(t))
    if stripped and stripped != primary.tokens:
        add(stripped, "number-stripped")

    if "(" in primary.tokens and ")" in primary.tokens:
        open_i = primary.tokens.index("(")
        close_i = primary.tokens.index(")")
        if open_i < close_i:
            outside = primary.tokens[:open_i] + primary.tokens[close_i + 1 :]
            inside = primary.tokens[open_i + 1 : close_i]
            add(outside, "bracket-part")
            add(inside, "bracket-part")
    return base


# -- noun phrase candidates ----------------------------------------------------


@dataclass
class NPOccurrence:
    occ: SentenceOcc
    span: tuple[int, int]

    @property
    def surfaces(self) -> tuple[str, ...]:
        start, end = self.span
        return tuple(t.surface for t in self.occ.sentence.tokens[start:end])

    @property
    def tags(self) -> tuple[str, ...]:
        start, end = self.span
        return tuple(t.pos for t in self.occ.sentence.tokens[start:end])

    @property
    def lemmas(self) -> tuple[str, ...]:
        start, end = self.span
        return tuple(t.lemma for t in self.occ.sentence.tokens[start:end])


@dataclass
class NPCandidate:
    key: tuple[str, ...]  # case-folded token tuple
    occurrences: list[NPOccurrence] = field(default_factory=list)
    score: float = 0.0
    best_alignment: Alignment | None = None
    matched_name: TokenizedName | None = None

    @property
    def frequency(self) -> int:
        return len(self.occurrences)

    @property
    def surfaces(self) -> tuple[str, ...]:
        return self.occurrences[0].surfaces

    @property
    def crossed_edges(self) -> int:
        return self.best_alignment.crossed_edges if self.best_alignment else 0


def extract_np_candidates(store: CorpusStore, group: str,
                          names: list[TokenizedName]) -> list[NPCandidate]:
    """All noun phrases (nested included) of the sentences that share a stem
    with any of the names, aggregated case-insensitively."""
    token_sets = [n.tokens for n in names if n.tokens]
    if not token_sets:
        return []
    sentences = store.candidate_sentences(token_sets, group, mode="any")
    by_key: dict[tuple[str, ...], NPCandidate] = {}
    for occ in sentences:
        for start, end, _base in occ.sentence.np_spans:
            surfaces = tuple(t.surface for t in occ.sentence.tokens[start:end])
            key = tuple(s.lower() for s in surfaces)
            cand = by_key.setdefault(key, NPCandidate(key))
            cand.occurrences.append(NPOccurrence(occ, (start, end)))
    return [by_key[k] for k in sorted(by_key)]


def score_candidates(candidates: list[NPCandidate], names: list[TokenizedName]):
    """Assign each NP the largest alignment similarity over all names."""
    for cand in candidates:
        best = (-1.0, 0)
        for name in names:
            score, alignment = similarity(cand.surfaces, name.tokens)
            rank_key = (score, -alignment.crossed_edges)
            if rank_key > (best[0], -best[1]):
                best = (score, alignment.crossed_edges)
                cand.score = score
                cand.best_alignment = alignment
                cand.matched_name = name
        if cand.best_alignment is None:
            cand.score = 0.0


def rank_nps(candidates: list[NPCandidate], seed: int = 0) -> list[NPCandidate]:
    """Decreasing score, then fewest crossed edges, then frequency, then a
    seeded pseudo-random tiebreak (stable across runs)."""

    def tiebreak(cand: NPCandidate) -> float:
        return random.Random(f"{seed}:{' '.join(cand.key)}").random()

    return sorted(
        candidates,
        key=lambda c: (-c.score, c.crossed_edges, -c.frequency, tiebreak(c)),
    )


# -- conversion to annotated names ----------------------------------------------


def majority_capitalization(store: CorpusStore, group: str) -> dict[str, str]:
    """Most frequent surface form per case-folded word over the group's texts."""
    counts: dict[str, Counter[str]] = {}
    for occ in store.sentences(group):
        for tok in occ.sentence.tokens:
            counts.setdefault(tok.surface.lower(), Counter())[tok.surface] += 1
    choice = {}
    for word, counter in counts.items():
        best = sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[0][0]
        choice[word] = best
    return choice


def _find_head(tags: tuple[str, ...], deps_rel: list[tuple[int, int, str]]) -> int:
    """Index of the head word inside the span; dependency-based with a
    rightmost-noun fallback."""
    content = [i for i, tag in enumerate(tags) if tag in NOUN_TAGS or tag in ADJ_TAGS]
    if not content:
        raise NoHeadError("no noun or adjective in the phrase")
    dependents = {d for _h, d, _label in deps_rel}
    free = [i for i in content if i not in dependents]
    nouns = [i for i in free if tags[i] in NOUN_TAGS]
    if nouns:
        return nouns[-1]
    if free:
        return free[-1]
    all_nouns = [i for i in content if tags[i] in NOUN_TAGS]
    if all_nouns:
        return all_nouns[-1]
    return content[-1]


def _relative_deps(occ: NPOccurrence) -> list[tuple[int, int, str]]:
    start, end = occ.span
    rel = []
    for head, dep, label in occ.occ.sentence.dependencies:
        if start <= head < end and start <= dep < end:
            rel.append((head - start, dep - start, label))
    return sorted(rel)


def np_to_nlnames(
    candidate: NPCandidate,
    capitalization: dict[str, str],
    lexicon: InflectionLexicon | None = None,
) -> list[NLName]:
    """One annotated name per distinct tag assignment of the phrase, most
    frequent assignment first."""
    lexicon = lexicon or default_lexicon()
    groups: dict[tuple[str, ...], list[NPOccurrence]] = {}
    order: list[tuple[str, ...]] = []
    for occ in candidate.occurrences:
        tags = occ.tags
        if tags not in groups:
            groups[tags] = []
            order.append(tags)
        groups[tags].append(occ)
    first_seen = {tags: i for i, tags in enumerate(order)}
    order.sort(key=lambda tags: (-len(groups[tags]), first_seen[tags]))

    names = []
    for tags in order:
        occs = groups[tags]
        parse_counts = Counter()
        for occ in occs:
            parse_counts[tuple(_relative_deps(occ))] += 1
        deps_rel = list(
            sorted(parse_counts.items(), key=lambda kv: (-kv[1], kv[0]))[0][0]
        )
        sample = occs[0]
        head_idx = _find_head(tags, deps_rel)
        names.append(
            _build_name(sample, tags, deps_rel, head_idx, capitalization, lexicon)
        )
    return names


def _cap_word(word: str, capitalization: dict[str, str]) -> str:
    return capitalization.get(word.lower(), word)


def _build_name(
    occ: NPOccurrence,
    tags: tuple[str, ...],
    deps_rel: list[tuple[int, int, str]],
    head_idx: int,
    capitalization: dict[str, str],
    lexicon: InflectionLexicon,
) -> NLName:
    surfaces = occ.surfaces
    lemmas = occ.lemmas
    det_heads = {d: h for h, d, label in deps_rel if label == "det"}
    slots: list = []
    word_slot: dict[int, int] = {}
    article_positions: list[tuple[int, int]] = []  # (word index, slot index)

    for i, tag in enumerate(tags):
        word = surfaces[i]
        if tag == "DT" and word.lower() in ("the", "a", "an"):
            slots.append(ArticleSlot(definite=word.lower() == "the"))
            article_positions.append((i, len(slots) - 1))
        elif tag in NOUN_TAGS:
            number, proper = NOUN_TAGS[tag]
            lemma = lemmas[i].lower()
            capitalized = _cap_word(word, capitalization)[:1].isupper()
            slots.append(
                NounSlot(
                    lemma,
                    head=i == head_idx,
                    number=number,
                    gender=lexicon.gender_of(lemma),
                    capitalized=capitalized,
                    proper=proper,
                )
            )
        elif tag in ADJ_TAGS:
            slots.append(AdjectiveSlot(lemmas[i].lower(), head=i == head_idx))
        elif tag in PREP_TAGS:
            slots.append(PrepositionSlot(word.lower()))
        else:
            slots.append(StringSlot(_cap_word(word, capitalization)))
        word_slot[i] = len(slots) - 1

    # article agreement: its det head if annotated, else the next noun slot
    for word_i, slot_i in article_positions:
        agr = None
        if word_i in det_heads and isinstance(
            slots[word_slot[det_heads[word_i]]], NounSlot
        ):
            agr = word_slot[det_heads[word_i]]
        else:
            for j in range(word_i + 1, len(tags)):
                if isinstance(slots[word_slot[j]], NounSlot):
                    agr = word_slot[j]
                    break
        art: ArticleSlot = slots[slot_i]
        slots[slot_i] = ArticleSlot(art.definite, agr)
    return NLName(slots).validate()


# -- articles ---------------------------------------------------------------------


def assign_articles(name: NLName, kind: str,
                    lexicon: InflectionLexicon | None = None) -> NLName:
    """Strip leading non-article determiners and set the main article:
    indefinite for classes, definite for individuals, omitted for adjective
    heads, plural heads, proper names, and bare mass nouns."""
    lexicon = lexicon or default_lexicon()
    determiners = load_word_list("determiners.txt")
    # the old main article is always replaced or dropped, like demonstratives
    slots = list(name.slots)
    while slots:
        first = slots[0]
        if isinstance(first, StringSlot) and first.text.lower() in determiners:
            slots.pop(0)
        elif isinstance(first, ArticleSlot):
            slots.pop(0)
        else:
            break
    if not slots:
        raise NoHeadError("name contains only determiners")

    interim = NLName(slots)
    head = interim.head()
    head_idx = interim.head_index()

    def is_proper_name() -> bool:
        words = []
        for s in slots:
            if isinstance(s, NounSlot):
                if not s.proper:
                    return False
                words.append(s.lemma)
            elif isinstance(s, (ArticleSlot,)):
                continue
            elif isinstance(s, StringSlot):
                words.append(s.text)
            else:
                return False
        gazetteer = lexicon.locations | lexicon.given_names
        phrase = " ".join(w.lower() for w in words)
        return phrase in gazetteer or all(w.lower() in gazetteer for w in words)

    omit = (
        isinstance(head, AdjectiveSlot)
        or (isinstance(head, NounSlot) and head.number == "plur")
        or is_proper_name()
        or (isinstance(head, NounSlot) and lexicon.is_mass_noun(head.lemma))
    )
    if omit:
        return NLName(slots).validate()
    article = ArticleSlot(definite=kind == "individual", agr=head_idx + 1)
    return NLName([article] + slots).validate()


# -- interest scores -----------------------------------------------------------------


@dataclass(frozen=True)
class InterestAssignment:
    s: str
    r: str
    o: str
    zero: bool


def _suffix_lemma(word: str) -> str:
    w = word.lower()
    if w.endswith("ies") and len(w) > 4:
        return w[:-3] + "y"
    if w.endswith(("ses", "xes", "zes", "ches", "shes")):
        return w[:-2]
    if w.endswith("s") and not w.endswith("ss") and len(w) > 3:
        return w[:-1]
    return w


def build_lemma_lookup(store: CorpusStore) -> dict[str, str]:
    lookup: dict[str, str] = {}
    for group in store.groups():
        for occ in store.sentences(group):
            for tok in occ.sentence.tokens:
                lookup.setdefault(tok.surface.lower(), tok.lemma.lower())
    return lookup


def _name_content_lemmas(name: NLName, lookup: dict[str, str]) -> set[str]:
    lemmas: set[str] = set()
    for slot in name.slots:
        if isinstance(slot, ArticleSlot):
            continue
        if isinstance(slot, NounSlot) or isinstance(slot, AdjectiveSlot):
            lemmas.add(slot.lemma.lower())
        elif isinstance(slot, PrepositionSlot):
            lemmas.add(slot.form.lower())
        elif isinstance(slot, StringSlot):
            for word in slot.text.split():
                lemmas.add(lookup.get(word.lower(), _suffix_lemma(word)))
    return lemmas


def infer_interest_scores(
    names: dict[str, NLName],
    triples,
    lemma_lookup: dict[str, str] | None = None,
) -> list[InterestAssignment]:
    """Zero interest when every content lemma of the object's name already
    appears in the subject's name."""
    lookup = lemma_lookup or {}
    out = []
    for t in triples:
        s_name = names.get(t.s)
        o_name = names.get(t.o)
        if s_name is None or o_name is None:
            continue
        s_words = _name_content_lemmas(s_name, lookup)
        o_words = _name_content_lemmas(o_name, lookup)
        zero = bool(o_words) and o_words <= s_words
        out.append(InterestAssignment(t.s, t.r, t.o, zero))
    return out


# -- orchestration ---------------------------------------------------------------------


@dataclass
class NameCandidate:
    cid: str
    name: NLName
    score: float
    crossed_edges: int
    frequency: int
    np_text: str

    @property
    def phrase(self) -> str:
        return realize_nlname(self.name)


@dataclass
class EntityNames:
    eid: str
    anonymous: bool
    candidates: list[NameCandidate] = field(default_factory=list)
    no_corpus: bool = False
    alt_names: AltNameSet | None = None


class NameExtractor:
    def __init__(self, onto: Ontology, store: CorpusStore,
                 top_k: int = 5, seed: int = 0,
                 lexicon: InflectionLexicon | None = None):
        self.onto = onto
        self.store = store
        self.top_k = top_k
        self.seed = seed
        self.lexicon = lexicon or default_lexicon()

    def extract(self, eid: str) -> EntityNames:
        alt = make_alt_names(self.onto, eid)
        if alt.anonymous:
            return EntityNames(eid, anonymous=True, alt_names=alt)
        group = entity_group(eid)
        if group not in self.store.groups():
            return EntityNames(eid, anonymous=False, no_corpus=True, alt_names=alt)
        candidates = extract_np_candidates(self.store, group, alt.all_names())
        score_candidates(candidates, alt.all_names())
        ranked = rank_nps(candidates, seed=self.seed)
        caps = majority_capitalization(self.store, group)
        kind = self.onto.entity(eid).kind
        out: list[NameCandidate] = []
        emitted: set[str] = set()
        for cand in ranked:
            if len(out) >= self.top_k:
                break
            try:
                nlnames = np_to_nlnames(cand, caps, self.lexicon)
            except NoHeadError:
                continue
            for nlname in nlnames:
                if len(out) >= self.top_k:
                    break
                try:
                    final = assign_articles(nlname, kind, self.lexicon)
                except NoHeadError:
                    continue
                notation = name_to_notation(final)
                if notation in emitted:
                    continue  # different NPs can collapse to one name
                emitted.add(notation)
                out.append(
                    NameCandidate(
                        cid=f"{eid}#n{len(out) + 1}",
                        name=final,
                        score=cand.score,
                        crossed_edges=cand.crossed_edges,
                        frequency=cand.frequency,
                        np_text=" ".join(cand.surfaces),
                    )
                )
        return EntityNames(eid, anonymous=False, candidates=out, alt_names=alt)

    def extract_all(self) -> dict[str, EntityNames]:
        return {eid: self.extract(eid) for eid in sorted(self.onto.entities)}
