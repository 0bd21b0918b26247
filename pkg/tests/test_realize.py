import pytest

from nameplan.realize import (
    AdjectiveSlot,
    ArticleSlot,
    NLName,
    NounSlot,
    PrepositionSlot,
    RealizeError,
    RefSlot,
    SentencePlan,
    StringSlot,
    VerbSlot,
    indefinite_article,
    inflect_noun,
    inflect_verb,
    name_from_notation,
    name_to_notation,
    plan_from_notation,
    plan_to_notation,
    realize_nlname,
    realize_plan,
)


def traditional_wine_name():
    return NLName([
        ArticleSlot(definite=False, agr=2),
        AdjectiveSlot("traditional"),
        NounSlot("wine", head=True, number="sing", gender="neut"),
        PrepositionSlot("from"),
        ArticleSlot(definite=True, agr=5),
        NounSlot("piemonte", number="sing", gender="neut", capitalized=True, proper=True),
        NounSlot("region", number="sing", gender="neut"),
    ])


def made_from_plan():
    return SentencePlan([
        RefSlot("S", case="nom"),
        VerbSlot("make", voice="passive", tense="present", agr=0),
        PrepositionSlot("from"),
        RefSlot("O", case="acc"),
    ])


# -- inflection ----------------------------------------------------------------

def test_inflect_noun_regular_plural():
    assert inflect_noun("wine", "plur") == "wines"
    assert inflect_noun("grape", "sing") == "grape"
    assert inflect_noun("box", "plur") == "boxes"
    assert inflect_noun("winery", "plur") == "wineries"


def test_inflect_noun_irregular():
    assert inflect_noun("child", "plur") == "children"
    assert inflect_noun("person", "plur") == "people"


def test_inflect_verb_passive():
    assert inflect_verb("make", voice="passive", tense="present", number="sing") == "is made"
    assert inflect_verb("make", voice="passive", tense="present", number="plur") == "are made"


def test_inflect_verb_active():
    assert inflect_verb("be", number="sing") == "is"
    assert inflect_verb("have", number="sing") == "has"
    assert inflect_verb("grow", number="plur") == "grow"
    assert inflect_verb("grow", tense="past") == "grew"


def test_inflect_verb_progressive_and_negation():
    assert inflect_verb("make", progressive=True) == "is making"
    assert inflect_verb("make", voice="passive", polarity=False) == "is not made"
    assert inflect_verb("contain", polarity=False) == "does not contain"
    assert inflect_verb("be", polarity=False) == "is not"


def test_indefinite_article_selection():
    assert indefinite_article("wine") == "a"
    assert indefinite_article("exhibit") == "an"
    assert indefinite_article("hour") == "an"
    assert indefinite_article("university") == "a"


# -- names ----------------------------------------------------------------------

def test_realize_traditional_wine_name():
    assert realize_nlname(traditional_wine_name()) == "a traditional wine from the Piemonte region"


def test_plural_indefinite_article_is_void():
    text = realize_nlname(traditional_wine_name(), number="plur")
    assert text == "traditional wines from the Piemonte region"


def test_pronoun_for_neuter_head():
    assert realize_nlname(traditional_wine_name(), pronoun=True) == "it"


def test_pronoun_variants():
    person = NLName([NounSlot("maker", head=True, gender="person")])
    assert realize_nlname(person, pronoun=True) == "he/she"
    plural = NLName([NounSlot("grape", head=True, number="plur")])
    assert realize_nlname(plural, pronoun=True) == "they"


def test_article_override_none():
    assert realize_nlname(traditional_wine_name(), article="none") == (
        "traditional wine from the Piemonte region"
    )


def test_article_override_definite():
    assert realize_nlname(traditional_wine_name(), article="def").startswith("the traditional")


def test_name_requires_exactly_one_head():
    with pytest.raises(RealizeError, match="head"):
        realize_nlname(NLName([NounSlot("wine"), NounSlot("grape")]))


def test_head_adjective_name():
    name = NLName([AdjectiveSlot("strong", head=True)])
    assert realize_nlname(name) == "strong"


# -- plans ----------------------------------------------------------------------

def test_realize_made_from_singular():
    got = realize_plan(made_from_plan(), "St. Emilion", "Cabernet Sauvignon grapes")
    assert got.text == "St. Emilion is made from Cabernet Sauvignon grapes."


def test_realize_made_from_plural_subject():
    got = realize_plan(made_from_plan(), "wines", "grapes", s_number="plur")
    assert got.text == "Wines are made from grapes."


def test_realize_semillon_sentence():
    got = realize_plan(made_from_plan(), "Semillon", "Semillon grapes")
    assert got.text == "Semillon is made from Semillon grapes."


def test_realize_is_a_kind_of():
    plan = SentencePlan([
        RefSlot("S", case="nom"),
        VerbSlot("be", voice="active", tense="present", agr=0),
        StringSlot("a kind of"),
        RefSlot("O"),
    ])
    got = realize_plan(plan, "St. Emilion", "Bordeaux")
    assert got.text == "St. Emilion is a kind of Bordeaux."


def test_negative_polarity_inserts_negation():
    plan = made_from_plan()
    plan.slots[1] = VerbSlot("make", voice="passive", tense="present", agr=0, polarity=False)
    got = realize_plan(plan, "Semillon", "Semillon grapes")
    assert got.text == "Semillon is not made from Semillon grapes."


def test_possessive_ref_case():
    plan = SentencePlan([
        RefSlot("S", case="poss"),
        NounSlot("maker"),
        VerbSlot("be", agr=0),
        RefSlot("O"),
    ])
    got = realize_plan(plan, "Piemonte", "somebody")
    assert got.text.startswith("Piemonte's maker")


def test_plural_subject_forces_plural_verb():
    got = realize_plan(made_from_plan(), "grapes", "vines", s_number="plur")
    assert " are made " in got.text


def test_plan_requires_both_refs():
    with pytest.raises(RealizeError):
        realize_plan(SentencePlan([RefSlot("S"), VerbSlot("be")]), "a", "b")


# -- canonical notation ----------------------------------------------------------

def test_name_notation_round_trip():
    name = traditional_wine_name()
    notation = name_to_notation(name)
    assert notation == (
        "[article indef agr=3][adj traditional][headnoun wine sing neut]"
        "[prep from][article def agr=6][noun piemonte sing neut cap proper]"
        "[noun region sing neut]"
    )
    parsed = name_from_notation(notation)
    assert name_to_notation(parsed) == notation
    assert realize_nlname(parsed) == realize_nlname(name)


def test_plan_notation_round_trip():
    plan = made_from_plan()
    notation = plan_to_notation(plan)
    assert notation == (
        "[ref(S) nom][verb make passive present agr=1 +][prep from][ref(O) acc]"
    )
    parsed = plan_from_notation(notation)
    assert plan_to_notation(parsed) == notation


def test_repaired_flag_round_trips():
    plan = made_from_plan()
    plan.repaired = True
    parsed = plan_from_notation(plan_to_notation(plan))
    assert parsed.repaired


def test_fixed_string_with_spaces_round_trips():
    plan = SentencePlan([
        RefSlot("S"), VerbSlot("be", agr=0), StringSlot("a kind of"), RefSlot("O"),
    ])
    parsed = plan_from_notation(plan_to_notation(plan))
    assert parsed.slots[2] == StringSlot("a kind of")
