"""Template and sentence-plan extraction for ontology relations.

Seed name pairs come from the relation's triples (plus class/ancestor
generalizations, flagged secondary). Sentences whose noun phrases match a
seed pair above the cosine threshold yield slotted templates; templates seen
in enough sentences are extended to the sentence boundaries and converted
into annotated sentence plans.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .corpus import CorpusStore, SentenceOcc
from .names import ADJ_TAGS, NOUN_TAGS, PREP_TAGS, majority_capitalization
from .ontology import Ontology
from .realize import (
    AdjectiveSlot,
    InflectionLexicon,
    NLName,
    NounSlot,
    PrepositionSlot,
    RefSlot,
    SentencePlan,
    StringSlot,
    VerbSlot,
    default_lexicon,
    inflect_noun,
    inflect_verb,
    plan_to_notation,
    realize_nlname,
)
from .text import load_word_list

DEFAULT_T = 0.1
S_MARK = "[S]"
O_MARK = "[O]"


def relation_group(rid: str) -> str:
    return f"relation:{rid}"


class PlanError(ValueError):
    pass


# -- seed name pairs ---------------------------------------------------------------


@dataclass(frozen=True)
class SeedName:
    tokens: tuple[str, ...]
    entity: str
    secondary: bool
    plural_text: str | None = None  # object-position rendering for generation

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    @property
    def key(self) -> tuple[str, ...]:
        return tuple(t.lower() for t in self.tokens)


@dataclass(frozen=True)
class SeedPair:
    n1: SeedName
    n2: SeedName

    @property
    def weight(self) -> float:
        if self.n1.secondary and self.n2.secondary:
            return 0.25
        if self.n1.secondary or self.n2.secondary:
            return 0.5
        return 1.0

    @property
    def key(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return (self.n1.key, self.n2.key)


def seed_text_for(eid: str, names: dict[str, NLName], onto: Ontology,
                  lexicon: InflectionLexicon | None = None) -> tuple[str, str]:
    """(singular seed text, plural rendering) for an entity; entities without
    a name fall back to their tokenized identifier."""
    lexicon = lexicon or default_lexicon()
    name = names.get(eid)
    if name is not None:
        sing = realize_nlname(name, article="none", lexicon=lexicon)
        plur = realize_nlname(name, article="none", number="plur", lexicon=lexicon)
        return sing, plur
    tokens = onto.token_name(eid).tokens
    text = " ".join(tokens)
    return text, text


def build_seed_pairs(onto: Ontology, rid: str, names: dict[str, NLName],
                     lexicon: InflectionLexicon | None = None) -> list[SeedPair]:
    """Original triple pairs plus generalizations through ancestor classes;
    generalized elements are secondary. Duplicate word sequences keep their
    strongest (least secondary) version."""
    lexicon = lexicon or default_lexicon()
    text_cache: dict[str, tuple[str, str]] = {}

    def seed(eid: str, secondary: bool) -> SeedName:
        if eid not in text_cache:
            text_cache[eid] = seed_text_for(eid, names, onto, lexicon)
        sing, plur = text_cache[eid]
        return SeedName(tuple(sing.split()), eid, secondary, plur)

    chosen: dict[tuple, SeedPair] = {}

    def add(pair: SeedPair):
        old = chosen.get(pair.key)
        if old is None or pair.weight > old.weight:
            chosen[pair.key] = pair

    for triple in onto.triples_of_relation(rid):
        s_variants = [seed(triple.s, False)] + [
            seed(a, True) for a in onto.ancestors_of(triple.s)
        ]
        o_variants = [seed(triple.o, False)] + [
            seed(a, True) for a in onto.ancestors_of(triple.o)
        ]
        for s_seed in s_variants:
            for o_seed in o_variants:
                add(SeedPair(s_seed, o_seed))
    return [chosen[k] for k in sorted(chosen)]


# -- anchor matching ------------------------------------------------------------------


@dataclass(frozen=True)
class MatchEvent:
    """One seed pair matching one ordered pair of noun phrases in a sentence."""

    seed: SeedPair
    occ: SentenceOcc
    s_span: tuple[int, int]  # anchor matched to n1 (the S side)
    o_span: tuple[int, int]  # anchor matched to n2 (the O side)

    def span_tokens(self, span: tuple[int, int]) -> tuple[str, ...]:
        return tuple(t.surface for t in self.occ.sentence.tokens[span[0]: span[1]])

    @property
    def a1(self) -> tuple[str, ...]:
        return tuple(t.lower() for t in self.span_tokens(self.s_span))

    @property
    def a2(self) -> tuple[str, ...]:
        return tuple(t.lower() for t in self.span_tokens(self.o_span))

    @property
    def anchor_key(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return (self.a1, self.a2)

    @property
    def sentence_key(self):
        return self.occ.key

    @property
    def weight(self) -> float:
        return self.seed.weight


def match_anchor_events(store: CorpusStore, group: str, pairs: list[SeedPair],
                        threshold: float = DEFAULT_T) -> list[MatchEvent]:
    """All (seed pair, NP pair) matches above the similarity threshold.

    When both assignments of the two phrases to the two seed names clear the
    threshold, the one with the larger similarity sum wins, so the S side is
    always the phrase matched to the pair's first name.
    """
    if not (0.0 < threshold < 1.0):
        raise PlanError(f"threshold must be in (0, 1), got {threshold}")
    events: list[MatchEvent] = []
    for pair in pairs:
        sentences = store.candidate_sentences(
            [pair.n1.tokens, pair.n2.tokens], group, mode="each"
        )
        for occ in sentences:
            spans = sorted(set((s, e) for s, e, _ in occ.sentence.np_spans))
            for idx_i in range(len(spans)):
                for idx_j in range(idx_i + 1, len(spans)):
                    first, second = spans[idx_i], spans[idx_j]
                    if first[1] > second[0]:
                        continue  # overlapping or nested spans
                    toks_first = [t.surface for t in occ.sentence.tokens[first[0]: first[1]]]
                    toks_second = [t.surface for t in occ.sentence.tokens[second[0]: second[1]]]
                    straight = (
                        store.cosine(toks_first, pair.n1.tokens, group),
                        store.cosine(toks_second, pair.n2.tokens, group),
                    )
                    flipped = (
                        store.cosine(toks_second, pair.n1.tokens, group),
                        store.cosine(toks_first, pair.n2.tokens, group),
                    )
                    ok_straight = min(straight) > threshold
                    ok_flipped = min(flipped) > threshold
                    if not ok_straight and not ok_flipped:
                        continue
                    if ok_straight and (not ok_flipped or sum(straight) >= sum(flipped)):
                        s_span, o_span = first, second
                    else:
                        s_span, o_span = second, first
                    events.append(MatchEvent(pair, occ, s_span, o_span))
    return events


# -- templates --------------------------------------------------------------------------


@dataclass(frozen=True)
class TemplateOcc:
    event: MatchEvent
    positions: tuple[int, ...]  # absolute sentence index per token, -1 at S/O

    def pos_sequence(self) -> tuple[str, ...]:
        toks = self.event.occ.sentence.tokens
        return tuple(toks[p].pos for p in self.positions if p >= 0)


@dataclass
class Template:
    tokens: tuple[str, ...]  # display tokens, S_MARK / O_MARK placeholders
    occurrences: list[TemplateOcc] = field(default_factory=list)
    extended_from: tuple[str, ...] | None = None

    @property
    def key(self) -> tuple[str, ...]:
        return tuple(t.lower() for t in self.tokens)

    @property
    def text(self) -> str:
        return " ".join(
            "S" if t == S_MARK else "O" if t == O_MARK else t for t in self.tokens
        )

    def interior_tokens(self) -> tuple[str, ...]:
        """Template words with the placeholders dropped."""
        return tuple(t for t in self.tokens if t not in (S_MARK, O_MARK))

    def distinct_sentences(self) -> int:
        return len({o.event.sentence_key for o in self.occurrences})

    def distinct_documents(self) -> int:
        return len({o.event.occ.doc.doc_id for o in self.occurrences})


def _occurrence_tokens(event: MatchEvent, left: int, right: int) -> tuple[tuple[str, ...], tuple[int, ...]]:
    sent = event.occ.sentence
    first, second = sorted([event.s_span, event.o_span])
    first_mark = S_MARK if first == event.s_span else O_MARK
    second_mark = O_MARK if first_mark == S_MARK else S_MARK
    tokens: list[str] = []
    positions: list[int] = []
    for p in range(first[0] - left, first[0]):
        tokens.append(sent.tokens[p].surface)
        positions.append(p)
    tokens.append(first_mark)
    positions.append(-1)
    for p in range(first[1], second[0]):
        tokens.append(sent.tokens[p].surface)
        positions.append(p)
    tokens.append(second_mark)
    positions.append(-1)
    for p in range(second[1], second[1] + right):
        tokens.append(sent.tokens[p].surface)
        positions.append(p)
    return tuple(tokens), tuple(positions)


def extract_templates(events: list[MatchEvent], min_sentences: int = 2) -> dict[tuple, Template]:
    """Base templates from anchor events, retained when extracted from at
    least `min_sentences` distinct sentences, then every prefix/suffix
    extension up to the sentence boundaries under the same retention rule."""
    base: dict[tuple, Template] = {}
    for event in events:
        tokens, positions = _occurrence_tokens(event, 0, 0)
        tpl = base.setdefault(tuple(t.lower() for t in tokens), Template(tokens))
        tpl.occurrences.append(TemplateOcc(event, positions))
    retained = {
        key: tpl for key, tpl in base.items()
        if tpl.distinct_sentences() >= min_sentences
    }

    extended: dict[tuple, Template] = {}
    for key in sorted(retained):
        tpl = retained[key]
        for occ in tpl.occurrences:
            event = occ.event
            first, second = sorted([event.s_span, event.o_span])
            sent_len = len(event.occ.sentence.tokens)
            for left in range(0, first[0] + 1):
                for right in range(0, sent_len - second[1] + 1):
                    if left == 0 and right == 0:
                        continue
                    tokens, positions = _occurrence_tokens(event, left, right)
                    ext_key = tuple(t.lower() for t in tokens)
                    ext = extended.setdefault(
                        ext_key, Template(tokens, extended_from=key)
                    )
                    ext.occurrences.append(TemplateOcc(event, positions))
    result = dict(retained)
    for key in sorted(extended):
        tpl = extended[key]
        if tpl.distinct_sentences() >= min_sentences and key not in result:
            result[key] = tpl
    return result


# -- template -> sentence plan ---------------------------------------------------------


_FINITE_TENSE = {"VBZ": "present", "VBP": "present", "VBD": "past", "VB": "present", "MD": "present"}


def _analyze_verb_group(items: list[tuple[str, str, str]]) -> VerbSlot:
    """items: (surface, tag, lemma) run of verb tokens with negations."""
    negations = load_word_list("negations.txt")
    polarity = True
    verbs = []
    for surface, tag, lemma in items:
        if surface.lower() in negations:
            polarity = False
        else:
            verbs.append((surface, tag, lemma))
    if not verbs:
        raise PlanError("verb group contains no verb")
    tense = "present"
    for _s, tag, _l in verbs:
        if tag in _FINITE_TENSE:
            tense = _FINITE_TENSE[tag]
            break
    last_surface, last_tag, last_lemma = verbs[-1]
    has_be = any(lemma.lower() == "be" for _s, _t, lemma in verbs[:-1])
    if len(verbs) == 1:
        if last_tag == "VBN":
            return VerbSlot(last_lemma.lower(), voice="passive", tense="present",
                            polarity=polarity, participle="past")
        if last_tag == "VBG":
            return VerbSlot(last_lemma.lower(), voice="active", tense="present",
                            polarity=polarity, participle="present")
        return VerbSlot(last_lemma.lower(), voice="active", tense=tense, polarity=polarity)
    if last_tag == "VBN" and has_be:
        return VerbSlot(last_lemma.lower(), voice="passive", tense=tense, polarity=polarity)
    if last_tag == "VBG" and has_be:
        return VerbSlot(last_lemma.lower(), voice="active", tense=tense,
                        polarity=polarity, progressive=True)
    return VerbSlot(last_lemma.lower(), voice="active", tense=tense, polarity=polarity)


_CASE_FOR_LABEL = {"subj": "nom", "obj": "acc", "prepcomp": "acc", "poss": "poss"}
_LABEL_PRIORITY = ("subj", "obj", "prepcomp", "poss")


def _ref_dependency(occ: TemplateOcc, span: tuple[int, int]):
    """(label, head abs index) for the anchor span's grammatical role."""
    found = {}
    for head, dep, label in occ.event.occ.sentence.dependencies:
        if span[0] <= dep < span[1] and label in _CASE_FOR_LABEL and label not in found:
            found[label] = head
    for label in _LABEL_PRIORITY:
        if label in found:
            return (label, found[label])
    return (None, None)


def template_to_plan(template: Template, store: CorpusStore, group: str,
                     lexicon: InflectionLexicon | None = None) -> SentencePlan:
    """Annotate the template's words: verb groups become verb slots with
    voice/tense/polarity, nouns and adjectives are base-formed, anchors become
    referring-expression slots with cases from the most frequent parse."""
    lexicon = lexicon or default_lexicon()
    if not template.occurrences:
        raise PlanError(f"template {template.text!r} has no occurrences")

    pos_counts: Counter[tuple[str, ...]] = Counter()
    order: dict[tuple[str, ...], int] = {}
    for i, occ in enumerate(template.occurrences):
        seq = occ.pos_sequence()
        pos_counts[seq] += 1
        order.setdefault(seq, i)
    best_seq = sorted(pos_counts.items(), key=lambda kv: (-kv[1], order[kv[0]]))[0][0]
    sample = next(o for o in template.occurrences if o.pos_sequence() == best_seq)

    dep_counts: Counter = Counter()
    dep_order: dict = {}
    for i, occ in enumerate(template.occurrences):
        sig = (
            _ref_dependency(occ, occ.event.s_span),
            _ref_dependency(occ, occ.event.o_span),
            occ.positions,
        )
        dep_counts[sig] += 1
        dep_order.setdefault(sig, i)
    (s_dep, o_dep, dep_positions) = sorted(
        dep_counts.items(), key=lambda kv: (-kv[1], dep_order[kv[0]])
    )[0][0]

    caps = majority_capitalization(store, group)
    sent_tokens = sample.event.occ.sentence.tokens
    negations = load_word_list("negations.txt")

    slots: list = []
    abs_to_slot: dict[int, int] = {}
    i = 0
    n = len(template.tokens)
    while i < n:
        token = template.tokens[i]
        pos_abs = sample.positions[i]
        if token == S_MARK or token == O_MARK:
            slots.append(RefSlot("S" if token == S_MARK else "O"))
            i += 1
            continue
        tok = sent_tokens[pos_abs]
        is_verbish = tok.pos.startswith("VB") or tok.pos == "MD"
        if is_verbish:
            run: list[tuple[str, str, str]] = []
            run_abs: list[int] = []
            j = i
            while j < n and sample.positions[j] >= 0:
                t2 = sent_tokens[sample.positions[j]]
                if t2.pos.startswith("VB") or t2.pos == "MD" or t2.surface.lower() in negations:
                    run.append((t2.surface, t2.pos, t2.lemma))
                    run_abs.append(sample.positions[j])
                    j += 1
                else:
                    break
            while run and run[-1][0].lower() in negations:
                run.pop()
                run_abs.pop()
                j -= 1
            slots.append(_analyze_verb_group(run))
            for p in run_abs:
                abs_to_slot[p] = len(slots) - 1
            i = j
            continue
        if tok.pos in NOUN_TAGS:
            number, proper = NOUN_TAGS[tok.pos]
            lemma = tok.lemma.lower()
            capitalized = caps.get(tok.surface.lower(), tok.surface)[:1].isupper()
            slots.append(NounSlot(lemma, number=number, proper=proper,
                                  gender=lexicon.gender_of(lemma),
                                  capitalized=capitalized))
        elif tok.pos in ADJ_TAGS:
            slots.append(AdjectiveSlot(tok.lemma.lower()))
        elif tok.pos in PREP_TAGS:
            slots.append(PrepositionSlot(tok.surface.lower()))
        else:
            slots.append(StringSlot(tok.surface))
        abs_to_slot[pos_abs] = len(slots) - 1
        i += 1

    plan = SentencePlan(slots)
    s_idx = plan.ref_index("S")
    o_idx = plan.ref_index("O")

    def dep_head_slot(head_abs):
        # map the dependency head through the chosen parse's positions
        if head_abs is None:
            return None
        try:
            k = dep_positions.index(head_abs)
        except ValueError:
            return None
        if sample.positions[k] in abs_to_slot:
            return abs_to_slot[sample.positions[k]]
        return None

    for ref_idx, (label, head_abs) in ((s_idx, s_dep), (o_idx, o_dep)):
        if label is None:
            continue
        slot: RefSlot = plan.slots[ref_idx]
        plan.slots[ref_idx] = RefSlot(slot.target, _CASE_FOR_LABEL[label], label)
        if label == "subj":
            verb_slot = dep_head_slot(head_abs)
            if verb_slot is not None and isinstance(plan.slots[verb_slot], VerbSlot):
                v: VerbSlot = plan.slots[verb_slot]
                plan.slots[verb_slot] = VerbSlot(
                    v.lemma, v.voice, v.tense, v.polarity, ref_idx,
                    v.progressive, v.participle,
                )
    return plan


# -- repairs and filters ------------------------------------------------------------------


def repair_plan(plan: SentencePlan) -> SentencePlan:
    """Insert an auxiliary for a single bare participle: past participle
    followed by a preposition becomes present passive, present participle
    becomes present continuous."""
    verbs = plan.verb_slots()
    if len(verbs) != 1:
        return plan
    idx, verb = verbs[0]
    if verb.participle is None:
        return plan
    try:
        s_idx = plan.ref_index("S")
    except Exception:
        s_idx = None
    agr = s_idx if (s_idx is not None and s_idx < idx) else verb.agr
    if verb.participle == "past":
        follows = plan.slots[idx + 1] if idx + 1 < len(plan.slots) else None
        if not isinstance(follows, PrepositionSlot):
            return plan
        fixed = VerbSlot(verb.lemma, "passive", "present", verb.polarity, agr)
    else:
        fixed = VerbSlot(verb.lemma, "active", "present", verb.polarity, agr,
                         progressive=True)
    slots = list(plan.slots)
    slots[idx] = fixed
    return SentencePlan(slots, repaired=True)


def interior_phrase(plan: SentencePlan, lexicon: InflectionLexicon | None = None) -> list[str]:
    """Surface tokens of the fixed sequence between the two ref slots."""
    lexicon = lexicon or default_lexicon()
    s_idx = plan.ref_index("S")
    o_idx = plan.ref_index("O")
    lo, hi = sorted((s_idx, o_idx))
    words: list[str] = []
    for slot in plan.slots[lo + 1: hi]:
        if isinstance(slot, VerbSlot):
            words.extend(
                inflect_verb(slot.lemma, voice=slot.voice, tense=slot.tense,
                             number="sing", polarity=slot.polarity,
                             progressive=slot.progressive,
                             participle=slot.participle, lexicon=lexicon).split()
            )
        elif isinstance(slot, NounSlot):
            form = inflect_noun(slot.lemma, slot.number, lexicon)
            if slot.capitalized:
                form = form[:1].upper() + form[1:]
            words.append(form)
        elif isinstance(slot, AdjectiveSlot):
            words.append(slot.lemma)
        elif isinstance(slot, PrepositionSlot):
            words.append(slot.form)
        elif isinstance(slot, StringSlot):
            words.extend(slot.text.split())
    return words


def _is_reversed_copula(plan: SentencePlan) -> bool:
    if len(plan.slots) != 3:
        return False
    first, mid, last = plan.slots
    return (
        isinstance(first, RefSlot) and first.target == "O"
        and isinstance(mid, VerbSlot) and mid.lemma == "be"
        and isinstance(last, RefSlot) and last.target == "S"
    )


def filter_plans(candidates: list["PlanCandidate"], store: CorpusStore, group: str,
                 lexicon: InflectionLexicon | None = None) -> list["PlanCandidate"]:
    """Structural discards (two slots, verb-initial, verbless, reversed
    copula) plus the corpus phrase filter on the interior word sequence."""
    lexicon = lexicon or default_lexicon()
    kept = []
    for cand in candidates:
        plan = cand.plan
        if len(plan.slots) < 3:
            continue
        if isinstance(plan.slots[0], VerbSlot):
            continue
        if not plan.verb_slots():
            continue
        if _is_reversed_copula(plan):
            continue
        words = interior_phrase(plan, lexicon)
        if words and store.phrase_search(words, group) < 1:
            continue
        kept.append(cand)
    return kept


# -- orchestration ----------------------------------------------------------------------


@dataclass
class PlanCandidate:
    pid: str
    plan: SentencePlan
    templates: list[Template]

    @property
    def notation(self) -> str:
        return plan_to_notation(self.plan)

    def occurrences(self) -> list[tuple[Template, TemplateOcc]]:
        out = []
        for tpl in self.templates:
            for occ in tpl.occurrences:
                out.append((tpl, occ))
        return out


@dataclass
class RelationExtraction:
    rid: str
    group: str
    seed_pairs: list[SeedPair]
    events: list[MatchEvent]
    templates: dict[tuple, Template]
    candidates: list[PlanCandidate]
    low_confidence: bool

    def template_list(self) -> list[Template]:
        return [self.templates[k] for k in sorted(self.templates)]


def extract_relation(
    onto: Ontology,
    store: CorpusStore,
    rid: str,
    names: dict[str, NLName],
    threshold: float = DEFAULT_T,
    min_sentences: int = 2,
    lexicon: InflectionLexicon | None = None,
) -> RelationExtraction:
    lexicon = lexicon or default_lexicon()
    group = relation_group(rid)
    pairs = build_seed_pairs(onto, rid, names, lexicon)
    if group in store.groups():
        events = match_anchor_events(store, group, pairs, threshold)
    else:
        events = []
    templates = extract_templates(events, min_sentences=min_sentences)

    by_plan: dict[str, PlanCandidate] = {}
    for key in sorted(templates):
        tpl = templates[key]
        try:
            plan = template_to_plan(tpl, store, group, lexicon)
        except PlanError:
            continue
        plan = repair_plan(plan)
        notation = plan_to_notation(plan)
        if notation in by_plan:
            by_plan[notation].templates.append(tpl)
        else:
            by_plan[notation] = PlanCandidate("", plan, [tpl])

    candidates = [by_plan[k] for k in sorted(by_plan)]
    candidates = filter_plans(candidates, store, group, lexicon)
    for i, cand in enumerate(candidates, start=1):
        cand.pid = f"{rid}#p{i}"
    return RelationExtraction(
        rid=rid,
        group=group,
        seed_pairs=pairs,
        events=events,
        templates=templates,
        candidates=candidates,
        low_confidence=len(pairs) < 10,
    )
