"""Slot structures for names and sentence plans, plus a minimal English
surface realizer (noun/verb inflection, articles, pronouns).

Only the morphology the slot vocabulary needs is implemented: be-forms,
regular -s/-ed/-ing with doubling, and a file-backed irregular lexicon.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field, replace

from .text import load_pair_file, load_word_list

SING, PLUR = "sing", "plur"
GENDERS = ("masc", "fem", "neut", "person")


class RealizeError(ValueError):
    pass


# -- slots ---------------------------------------------------------------------


@dataclass(frozen=True)
class ArticleSlot:
    definite: bool
    agr: int | None = None  # index of the noun slot it agrees with


@dataclass(frozen=True)
class NounSlot:
    lemma: str
    head: bool = False
    number: str = SING
    gender: str = "neut"
    capitalized: bool = False
    proper: bool = False


@dataclass(frozen=True)
class AdjectiveSlot:
    lemma: str
    head: bool = False


@dataclass(frozen=True)
class PrepositionSlot:
    form: str


@dataclass(frozen=True)
class StringSlot:
    text: str


@dataclass(frozen=True)
class RefSlot:
    target: str  # "S" or "O"
    case: str | None = None  # nom | acc | poss
    source_label: str | None = None  # dependency label the case came from


@dataclass(frozen=True)
class VerbSlot:
    lemma: str
    voice: str = "active"  # active | passive
    tense: str = "present"  # present | past
    polarity: bool = True  # False = negated
    agr: int | None = None  # index of the slot it agrees with
    progressive: bool = False
    participle: str | None = None  # bare participle with no auxiliary: past | present


@dataclass
class NLName:
    slots: list

    def head_index(self) -> int:
        heads = [
            i
            for i, s in enumerate(self.slots)
            if isinstance(s, (NounSlot, AdjectiveSlot)) and s.head
        ]
        if len(heads) != 1:
            raise RealizeError(f"name must have exactly one head, found {len(heads)}")
        return heads[0]

    def head(self):
        return self.slots[self.head_index()]

    def validate(self):
        idx = self.head_index()
        head = self.slots[idx]
        if isinstance(head, NounSlot) and head.number not in (SING, PLUR):
            raise RealizeError(f"bad head number {head.number!r}")
        for s in self.slots:
            if isinstance(s, NounSlot) and s.gender not in GENDERS:
                raise RealizeError(f"bad gender {s.gender!r}")
            if isinstance(s, ArticleSlot) and s.agr is not None:
                if not (0 <= s.agr < len(self.slots)) or not isinstance(
                    self.slots[s.agr], NounSlot
                ):
                    raise RealizeError(f"article agreement {s.agr} is not a noun slot")
        return self


@dataclass
class SentencePlan:
    slots: list
    repaired: bool = False

    def ref_index(self, target: str) -> int:
        idx = [
            i for i, s in enumerate(self.slots)
            if isinstance(s, RefSlot) and s.target == target
        ]
        if len(idx) != 1:
            raise RealizeError(f"plan must have exactly one ref({target}) slot")
        return idx[0]

    def verb_slots(self) -> list[tuple[int, VerbSlot]]:
        return [(i, s) for i, s in enumerate(self.slots) if isinstance(s, VerbSlot)]

    def validate(self):
        self.ref_index("S")
        self.ref_index("O")
        for s in self.slots:
            if isinstance(s, VerbSlot) and s.agr is not None:
                if not (0 <= s.agr < len(self.slots)):
                    raise RealizeError(f"verb agreement {s.agr} out of range")
        return self


@dataclass(frozen=True)
class GeneratedSentence:
    text: str
    plan_id: str | None = None
    seed_pair: tuple[str, str] | None = None


# -- lexicon ---------------------------------------------------------------------


class InflectionLexicon:
    """File-backed irregular forms, mass nouns, gazetteers and genders."""

    def __init__(self):
        self.noun_plurals = load_pair_file("irregular_nouns.txt")
        self.verbs: dict[str, tuple[str, str, str, str]] = {}
        for line in _rows("irregular_verbs.txt"):
            lemma, third, past, pastpart, prespart = line
            self.verbs[lemma] = (third, past, pastpart, prespart)
        self.mass_nouns = load_word_list("mass_nouns.txt")
        self.given_names = load_word_list("given_names.txt")
        self.locations = load_word_list("locations.txt")
        self.genders = load_pair_file("gender_lexicon.txt")

    def gender_of(self, word: str) -> str:
        w = word.lower()
        if w in self.genders:
            return self.genders[w]
        if w in self.given_names:
            return "person"
        return "neut"

    def is_person(self, word: str) -> bool:
        return self.gender_of(word) == "person" or word.lower() in self.given_names

    def is_location(self, word: str) -> bool:
        return word.lower() in self.locations

    def is_mass_noun(self, word: str) -> bool:
        return word.lower() in self.mass_nouns


def _rows(name: str):
    from .text import _data_file

    for line in _data_file(name):
        parts = line.split()
        if parts:
            yield parts


@functools.lru_cache(maxsize=1)
def default_lexicon() -> InflectionLexicon:
    return InflectionLexicon()


# -- morphology -------------------------------------------------------------------

_VOWELS = "aeiou"


def _match_case(form: str, model: str) -> str:
    if model[:1].isupper():
        return form[:1].upper() + form[1:]
    return form


def inflect_noun(lemma: str, number: str, lexicon: InflectionLexicon | None = None) -> str:
    if not lemma:
        raise RealizeError("empty noun lemma")
    lexicon = lexicon or default_lexicon()
    if number == SING:
        return lemma
    low = lemma.lower()
    if low in lexicon.noun_plurals:
        return _match_case(lexicon.noun_plurals[low], lemma)
    if low.endswith("y") and len(low) > 1 and low[-2] not in _VOWELS:
        return lemma[:-1] + "ies"
    if low.endswith(("s", "x", "z", "ch", "sh")):
        return lemma + "es"
    return lemma + "s"


def _doubles_final(word: str) -> bool:
    w = word.lower()
    return (
        len(w) >= 3
        and w[-1] not in _VOWELS + "wxy"
        and w[-2] in _VOWELS
        and w[-3] not in _VOWELS
    )


def _verb_forms(lemma: str, lexicon: InflectionLexicon) -> tuple[str, str, str, str]:
    low = lemma.lower()
    if low in lexicon.verbs:
        return lexicon.verbs[low]
    if low.endswith("y") and len(low) > 1 and low[-2] not in _VOWELS:
        third = low[:-1] + "ies"
    elif low.endswith(("s", "x", "z", "ch", "sh", "o")):
        third = low + "es"
    else:
        third = low + "s"
    if low.endswith("e"):
        past = low + "d"
    elif low.endswith("y") and len(low) > 1 and low[-2] not in _VOWELS:
        past = low[:-1] + "ied"
    elif _doubles_final(low):
        past = low + low[-1] + "ed"
    else:
        past = low + "ed"
    if low.endswith("e") and not low.endswith(("ee", "oe", "ye")):
        prespart = low[:-1] + "ing"
    elif _doubles_final(low):
        prespart = low + low[-1] + "ing"
    else:
        prespart = low + "ing"
    return (third, past, past, prespart)


def _be_form(tense: str, number: str) -> str:
    if tense == "past":
        return "was" if number == SING else "were"
    return "is" if number == SING else "are"


def past_participle(lemma: str, lexicon: InflectionLexicon | None = None) -> str:
    lexicon = lexicon or default_lexicon()
    return _verb_forms(lemma, lexicon)[2]


def present_participle(lemma: str, lexicon: InflectionLexicon | None = None) -> str:
    lexicon = lexicon or default_lexicon()
    return _verb_forms(lemma, lexicon)[3]


def inflect_verb(
    lemma: str,
    voice: str = "active",
    tense: str = "present",
    number: str = SING,
    person: int = 3,
    polarity: bool = True,
    progressive: bool = False,
    participle: str | None = None,
    lexicon: InflectionLexicon | None = None,
) -> str:
    """Inflected verb group as a single string (may contain spaces)."""
    if not lemma:
        raise RealizeError("empty verb lemma")
    lexicon = lexicon or default_lexicon()
    third, past, pastpart, prespart = _verb_forms(lemma, lexicon)
    neg = "" if polarity else "not "
    if participle == "past":
        return pastpart
    if participle == "present":
        return prespart
    if voice == "passive":
        return f"{_be_form(tense, number)} {neg}{pastpart}"
    if progressive:
        return f"{_be_form(tense, number)} {neg}{prespart}"
    if lemma.lower() == "be":
        form = _be_form(tense, number)
        return f"{form} not" if not polarity else form
    if not polarity:
        do = "does" if (tense == "present" and number == SING) else (
            "did" if tense == "past" else "do"
        )
        return f"{do} not {lemma.lower()}"
    if tense == "past":
        return past
    if number == SING and person == 3:
        return third
    return lemma.lower()


_AN_EXCEPTIONS = {"hour", "honest", "honor", "heir"}
_A_EXCEPTIONS = ("uni", "use", "euro", "one", "ewe")


def indefinite_article(following: str) -> str:
    w = following.lower()
    if any(w.startswith(p) for p in _A_EXCEPTIONS):
        return "a"
    if w[:1] in _VOWELS or any(w.startswith(p) for p in _AN_EXCEPTIONS):
        return "an"
    return "a"


# -- name realization -----------------------------------------------------------


def pronoun_for(name: NLName) -> str:
    head = name.head()
    if isinstance(head, NounSlot):
        if head.number == PLUR:
            return "they"
        return {"masc": "he", "fem": "she", "person": "he/she", "neut": "it"}[head.gender]
    return "it"


def realize_nlname(
    name: NLName,
    number: str | None = None,
    article: str | None = None,  # None=keep | "none" | "def" | "indef"
    pronoun: bool = False,
    lexicon: InflectionLexicon | None = None,
) -> str:
    """Concatenate the slots of a name; options override head number and the
    main article; `pronoun=True` yields the matching pronoun instead."""
    name.validate()
    lexicon = lexicon or default_lexicon()
    head_idx = name.head_index()
    head = name.slots[head_idx]
    head_number = number or (head.number if isinstance(head, NounSlot) else SING)
    if pronoun:
        effective = head
        if isinstance(head, NounSlot) and number:
            effective = replace(head, number=head_number)
            return pronoun_for(NLName([effective]))
        return pronoun_for(name)

    words: list[str] = []
    pending_article: list[tuple[int, ArticleSlot]] = []

    def flush_article(next_word: str):
        while pending_article:
            pos, art = pending_article.pop()
            agrees_head = art.agr == head_idx or (art.agr is None and pos < head_idx)
            override = article if agrees_head else None
            definite = art.definite
            if override == "none" and agrees_head:
                continue
            if override in ("def", "indef"):
                definite = override == "def"
            art_number = head_number if agrees_head else SING
            if art.agr is not None and art.agr != head_idx:
                agr_slot = name.slots[art.agr]
                if isinstance(agr_slot, NounSlot):
                    art_number = agr_slot.number
            if definite:
                words.append("the")
            elif art_number == PLUR:
                continue  # plural indefinite article is void
            else:
                words.append(indefinite_article(next_word))

    for i, slot in enumerate(name.slots):
        if isinstance(slot, ArticleSlot):
            pending_article.append((i, slot))
            continue
        if isinstance(slot, NounSlot):
            n = head_number if i == head_idx else slot.number
            form = inflect_noun(slot.lemma, n, lexicon)
            if slot.capitalized:
                form = form[:1].upper() + form[1:]
            flush_article(form)
            words.append(form)
        elif isinstance(slot, AdjectiveSlot):
            flush_article(slot.lemma)
            words.append(slot.lemma)
        elif isinstance(slot, PrepositionSlot):
            flush_article(slot.form)
            words.append(slot.form)
        elif isinstance(slot, StringSlot):
            flush_article(slot.text)
            words.append(slot.text)
        else:
            raise RealizeError(f"slot {slot!r} not allowed in a name")
    flush_article("")
    return " ".join(w for w in words if w)


# -- plan realization -------------------------------------------------------------


def realize_plan(
    plan: SentencePlan,
    s_text: str,
    o_text: str,
    s_number: str = SING,
    o_number: str = SING,
    plan_id: str | None = None,
    seed_pair: tuple[str, str] | None = None,
    lexicon: InflectionLexicon | None = None,
) -> GeneratedSentence:
    """Fill the ref slots with the given texts and inflect the verbs.

    Verb agreement follows each verb's `agr` slot; by convention that is the
    subject ref slot, whose number the caller supplies.
    """
    plan.validate()
    lexicon = lexicon or default_lexicon()
    numbers = {plan.ref_index("S"): s_number, plan.ref_index("O"): o_number}
    words: list[str] = []
    for i, slot in enumerate(plan.slots):
        if isinstance(slot, RefSlot):
            text = s_text if slot.target == "S" else o_text
            if slot.case == "poss":
                text = text + ("'" if text.endswith("s") else "'s")
            words.append(text)
        elif isinstance(slot, VerbSlot):
            number = numbers.get(slot.agr, SING) if slot.agr is not None else SING
            words.append(
                inflect_verb(
                    slot.lemma,
                    voice=slot.voice,
                    tense=slot.tense,
                    number=number,
                    polarity=slot.polarity,
                    progressive=slot.progressive,
                    participle=slot.participle,
                    lexicon=lexicon,
                )
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
            words.append(slot.text)
        elif isinstance(slot, ArticleSlot):
            words.append("the" if slot.definite else "a")
        else:
            raise RealizeError(f"cannot realize slot {slot!r}")
    text = " ".join(w for w in words if w)
    if not text:
        raise RealizeError("plan realized to an empty sentence")
    text = text[:1].upper() + text[1:]
    if not text.endswith("."):
        text += "."
    return GeneratedSentence(text, plan_id, seed_pair)


# -- canonical slot notation --------------------------------------------------------


def _bool_flags(*pairs: tuple[bool, str]) -> list[str]:
    return [flag for cond, flag in pairs if cond]


def slot_to_notation(slot, _plan: bool = False) -> str:
    if isinstance(slot, ArticleSlot):
        fields = ["article", "def" if slot.definite else "indef"]
        if slot.agr is not None:
            fields.append(f"agr={slot.agr + 1}")
        return " ".join(fields)
    if isinstance(slot, NounSlot):
        kind = "headnoun" if slot.head else "noun"
        fields = [kind, slot.lemma, slot.number, slot.gender]
        fields += _bool_flags((slot.capitalized, "cap"), (slot.proper, "proper"))
        return " ".join(fields)
    if isinstance(slot, AdjectiveSlot):
        return " ".join(["headadj" if slot.head else "adj", slot.lemma])
    if isinstance(slot, PrepositionSlot):
        return f"prep {slot.form}"
    if isinstance(slot, StringSlot):
        return f"str {slot.text}"
    if isinstance(slot, RefSlot):
        # source_label is extraction provenance, not part of the notation
        fields = [f"ref({slot.target})"]
        if slot.case:
            fields.append(slot.case)
        return " ".join(fields)
    if isinstance(slot, VerbSlot):
        fields = ["verb", slot.lemma, slot.voice, slot.tense]
        if slot.agr is not None:
            fields.append(f"agr={slot.agr + 1}")
        fields.append("+" if slot.polarity else "-")
        fields += _bool_flags((slot.progressive, "prog"),)
        if slot.participle:
            fields.append(f"part={slot.participle}")
        return " ".join(fields)
    raise RealizeError(f"cannot serialize slot {slot!r}")


def name_to_notation(name: NLName) -> str:
    return "".join(f"[{slot_to_notation(s)}]" for s in name.slots)


def plan_to_notation(plan: SentencePlan) -> str:
    body = "".join(f"[{slot_to_notation(s)}]" for s in plan.slots)
    return body + ("[repaired]" if plan.repaired else "")


def _split_groups(notation: str) -> list[str]:
    groups = []
    depth = 0
    buf: list[str] = []
    for ch in notation:
        if ch == "[":
            if depth == 0:
                buf = []
            else:
                buf.append(ch)
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                raise RealizeError("unbalanced ] in notation")
            if depth == 0:
                groups.append("".join(buf))
            else:
                buf.append(ch)
        elif depth > 0:
            buf.append(ch)
        elif ch.strip():
            raise RealizeError(f"stray character {ch!r} outside slots")
    if depth != 0:
        raise RealizeError("unbalanced [ in notation")
    return groups


def _parse_slot(group: str):
    parts = group.split()
    if not parts:
        raise RealizeError("empty slot")
    kind = parts[0]
    rest = parts[1:]

    def flags_and_options(items):
        opts = {}
        flags = set()
        for item in items:
            if "=" in item:
                key, _, value = item.partition("=")
                opts[key] = value
            else:
                flags.add(item)
        return opts, flags

    if kind == "article":
        opts, flags = flags_and_options(rest)
        definite = "def" in flags
        agr = int(opts["agr"]) - 1 if "agr" in opts else None
        return ArticleSlot(definite, agr)
    if kind in ("noun", "headnoun"):
        lemma, number, gender = rest[0], rest[1], rest[2]
        opts, flags = flags_and_options(rest[3:])
        return NounSlot(
            lemma, kind == "headnoun", number, gender,
            capitalized="cap" in flags, proper="proper" in flags,
        )
    if kind in ("adj", "headadj"):
        return AdjectiveSlot(rest[0], kind == "headadj")
    if kind == "prep":
        return PrepositionSlot(rest[0])
    if kind == "str":
        return StringSlot(group.split(None, 1)[1] if rest else "")
    if kind in ("ref(S)", "ref(O)"):
        opts, flags = flags_and_options(rest)
        case = next((f for f in ("nom", "acc", "poss") if f in flags), None)
        return RefSlot(kind[4], case)
    if kind == "verb":
        lemma, voice, tense = rest[0], rest[1], rest[2]
        opts, flags = flags_and_options(rest[3:])
        return VerbSlot(
            lemma, voice, tense,
            polarity="-" not in flags,
            agr=int(opts["agr"]) - 1 if "agr" in opts else None,
            progressive="prog" in flags,
            participle=opts.get("part"),
        )
    raise RealizeError(f"unknown slot kind {kind!r}")


def name_from_notation(notation: str) -> NLName:
    slots = [_parse_slot(g) for g in _split_groups(notation)]
    return NLName(slots).validate()


def plan_from_notation(notation: str) -> SentencePlan:
    groups = _split_groups(notation)
    repaired = False
    if groups and groups[-1].strip() == "repaired":
        repaired = True
        groups = groups[:-1]
    slots = [_parse_slot(g) for g in groups]
    return SentencePlan(slots, repaired=repaired).validate()
