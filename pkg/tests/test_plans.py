import pytest

from nameplan.corpus import CorpusStore
from nameplan.ontology import load_ontology
from nameplan.plans import (
    PlanCandidate,
    SeedName,
    SeedPair,
    build_seed_pairs,
    extract_relation,
    extract_templates,
    filter_plans,
    interior_phrase,
    match_anchor_events,
    relation_group,
    repair_plan,
    template_to_plan,
)
from nameplan.realize import (
    PrepositionSlot,
    RefSlot,
    SentencePlan,
    StringSlot,
    VerbSlot,
    name_from_notation,
    plan_to_notation,
)

from conftest import FIXTURES

GROUP = relation_group(":madeFrom")


def load_manual_names():
    names = {}
    for line in (FIXTURES / "manual_names.txt").read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        eid, notation = line.split(None, 1)
        names[eid] = name_from_notation(notation)
    return names


@pytest.fixture(scope="module")
def wine():
    return load_ontology(str(FIXTURES / "wine.ont"))


@pytest.fixture(scope="module")
def store():
    s = CorpusStore()
    s.ingest(str(FIXTURES / "corpus_madefrom.txt"), GROUP)
    return s


@pytest.fixture(scope="module")
def names():
    return load_manual_names()


@pytest.fixture(scope="module")
def extraction(wine, store, names):
    return extract_relation(wine, store, ":madeFrom", names)


# -- seed pairs ---------------------------------------------------------------

def test_seed_pairs_include_wine_grape(wine, names):
    pairs = build_seed_pairs(wine, ":madeFrom", names)
    texts = {(p.n1.text, p.n2.text) for p in pairs}
    assert ("wine", "grape") in texts
    assert ("Semillon", "Semillon grape") in texts
    assert ("St. Emilion", "Cabernet Sauvignon grape") in texts


def test_generalized_pairs_are_secondary(wine, names):
    pairs = build_seed_pairs(wine, ":madeFrom", names)
    by_text = {(p.n1.text, p.n2.text): p for p in pairs}
    assert by_text[("Semillon", "Semillon grape")].weight == 1.0
    assert by_text[("Semillon", "grape")].weight == 0.5
    assert by_text[("wine", "grape")].weight == 0.25


def test_relation_with_no_triples_yields_no_pairs(wine, names):
    assert build_seed_pairs(wine, ":unknownRelation", names) == []


def test_generalizations_cover_all_ancestor_combinations(wine, names):
    pairs = build_seed_pairs(wine, ":madeFrom", names)
    texts = {(p.n1.text, p.n2.text) for p in pairs}
    # :StEmilion generalizes through :Bordeaux and :Wine, its O through :Grape
    assert ("a Bordeaux".replace("a ", ""), "grape") in texts or ("bordeaux", "grape") in {
        (a.lower(), b.lower()) for a, b in texts
    }


# -- anchor matching -------------------------------------------------------------

def test_fig3_sentence_yields_semillon_anchor_pair(wine, store, names):
    pairs = build_seed_pairs(wine, ":madeFrom", names)
    events = match_anchor_events(store, GROUP, pairs)
    semillon_events = [
        e for e in events
        if (e.seed.n1.text, e.seed.n2.text) == ("Semillon", "Semillon grape")
    ]
    assert semillon_events
    anchors = {(" ".join(e.a1), " ".join(e.a2)) for e in semillon_events}
    assert ("semillon", "semillon grapes") in anchors


def test_extreme_threshold_keeps_only_perfect_matches(wine, store, names):
    pairs = build_seed_pairs(wine, ":madeFrom", names)
    events = match_anchor_events(store, GROUP, pairs, threshold=0.99)
    # partial stem overlaps (e.g. seed "grape" vs NP "Semillon grapes") are
    # gone; whatever remains matched with cosine 1 on both sides
    for e in events:
        assert store.cosine(e.a1, e.seed.n1.tokens, GROUP) > 0.99
        assert store.cosine(e.a2, e.seed.n2.tokens, GROUP) > 0.99
    partial = [
        e for e in events if (e.seed.n1.text, e.seed.n2.text) == ("Semillon", "grape")
    ]
    assert partial == []


def test_stopword_only_seed_never_matches(store):
    seed = SeedPair(
        SeedName(("the",), ":X", False), SeedName(("of",), ":Y", False)
    )
    assert match_anchor_events(store, GROUP, [seed]) == []


# -- template extraction -----------------------------------------------------------

def test_fig3_template_and_extensions(extraction):
    texts = {t.text for t in extraction.template_list()}
    assert texts == {
        "S is made from O",
        "obviously S is made from O",
        "obviously S is made from O in",
        "obviously S is made from O in California",
        "S is made from O in",
        "S is made from O in California",
    }


def test_single_occurrence_template_discarded(extraction):
    texts = {t.text for t in extraction.template_list()}
    assert "S is produced from O" not in texts


def test_retained_templates_have_two_sentences(extraction):
    for tpl in extraction.template_list():
        assert tpl.distinct_sentences() >= 2


def test_extension_contains_base_tokens(extraction):
    by_key = extraction.templates
    for tpl in extraction.template_list():
        if tpl.extended_from is not None:
            base = by_key[tpl.extended_from]
            base_text = base.text
            assert base_text in tpl.text


def test_adjacent_anchor_template(wine, store, names, tmp_path):
    corpus = tmp_path / "adjacent.corpus"
    corpus.write_text(
        "doc a1 q 1\nsent\n"
        "tok Semillon/NNP/Semillon grapes/NNS/grape\n"
        "np NP(0,1,1) NP(1,2,1)\ndep subj(1,0)\n"
        "doc a2 q 2\nsent\n"
        "tok Semillon/NNP/Semillon grapes/NNS/grape\n"
        "np NP(0,1,1) NP(1,2,1)\ndep subj(1,0)\n"
    )
    s = CorpusStore()
    s.ingest(str(corpus), GROUP)
    result = extract_relation(wine, s, ":madeFrom", names)
    texts = {t.text for t in result.template_list()}
    assert "S O" in texts  # extracted...
    assert all(len(c.plan.slots) >= 3 for c in result.candidates)  # ...but filtered


# -- plan conversion ----------------------------------------------------------------

def test_made_from_plan_slots(extraction):
    plans = {c.notation for c in extraction.candidates}
    assert "[ref(S) nom][verb make passive present agr=1 +][prep from][ref(O) acc]" in plans


def test_negative_polarity_absorbed(wine, names, tmp_path):
    corpus = tmp_path / "neg.corpus"
    sent = (
        "tok Semillon/NNP/Semillon is/VBZ/be not/RB/not made/VBN/make "
        "from/IN/from Semillon/JJ/Semillon grapes/NNS/grape\n"
        "np NP(0,1,1) NP(5,7,1)\ndep subj(3,0) prepcomp(4,6)\n"
    )
    corpus.write_text(
        "doc n1 q 1\nsent\n" + sent + "doc n2 q 2\nsent\n" + sent
    )
    s = CorpusStore()
    s.ingest(str(corpus), GROUP)
    result = extract_relation(wine, s, ":madeFrom", names)
    notations = {c.notation for c in result.candidates}
    assert "[ref(S) nom][verb make passive present agr=1 -][prep from][ref(O) acc]" in notations


def test_possessive_case(wine, names, tmp_path):
    corpus = tmp_path / "poss.corpus"
    sent = (
        "tok Semillon/NNP/Semillon 's/POS/'s source/NN/source is/VBZ/be "
        "Semillon/JJ/Semillon grapes/NNS/grape\n"
        "np NP(0,1,1) NP(4,6,1)\ndep poss(2,0) subj(3,2)\n"
    )
    corpus.write_text("doc p1 q 1\nsent\n" + sent + "doc p2 q 2\nsent\n" + sent)
    s = CorpusStore()
    s.ingest(str(corpus), GROUP)
    result = extract_relation(wine, s, ":madeFrom", names)
    cases = {
        c.plan.slots[c.plan.ref_index("S")].case for c in result.candidates
    }
    assert "poss" in cases


# -- repairs ---------------------------------------------------------------------------

def test_repair_past_participle_with_preposition():
    plan = SentencePlan([
        RefSlot("S"),
        VerbSlot("make", voice="passive", tense="present", participle="past"),
        PrepositionSlot("in"),
        RefSlot("O"),
    ])
    fixed = repair_plan(plan)
    assert fixed.repaired
    verb = fixed.slots[1]
    assert verb.voice == "passive" and verb.participle is None
    assert verb.agr == 0


def test_repair_present_participle():
    plan = SentencePlan([
        RefSlot("S"),
        VerbSlot("make", voice="active", tense="present", participle="present"),
        RefSlot("O"),
    ])
    fixed = repair_plan(plan)
    assert fixed.repaired and fixed.slots[1].progressive


def test_finite_verb_not_repaired():
    plan = SentencePlan([
        RefSlot("S"), VerbSlot("make", voice="passive", agr=0),
        PrepositionSlot("from"), RefSlot("O"),
    ])
    assert repair_plan(plan) is plan and not plan.repaired


def test_bare_past_participle_without_preposition_kept():
    plan = SentencePlan([
        RefSlot("S"),
        VerbSlot("make", voice="passive", participle="past"),
        RefSlot("O"),
    ])
    fixed = repair_plan(plan)
    assert not fixed.repaired


# -- filters --------------------------------------------------------------------------

def _candidate(plan):
    return PlanCandidate("x", plan, [])


def test_two_slot_plan_discarded(store):
    plans = [_candidate(SentencePlan([RefSlot("S"), RefSlot("O")]))]
    assert filter_plans(plans, store, GROUP) == []


def test_verb_initial_plan_discarded(store):
    plan = SentencePlan([VerbSlot("make", agr=None), RefSlot("S"), RefSlot("O")])
    assert filter_plans([_candidate(plan)], store, GROUP) == []


def test_verbless_plan_discarded(store):
    plan = SentencePlan([RefSlot("S"), PrepositionSlot("of"), RefSlot("O")])
    assert filter_plans([_candidate(plan)], store, GROUP) == []


def test_reversed_copula_always_discarded(store):
    plan = SentencePlan([RefSlot("O"), VerbSlot("be", agr=0), RefSlot("S")])
    assert filter_plans([_candidate(plan)], store, GROUP) == []
    forward = SentencePlan([RefSlot("S"), VerbSlot("be", agr=0), RefSlot("O")])
    # forward copula survives structure but must pass the phrase filter
    assert interior_phrase(forward) == ["is"]


def test_phrase_filter_discards_unseen_interior(store):
    plan = SentencePlan([
        RefSlot("S"), VerbSlot("distill", agr=0), PrepositionSlot("from"), RefSlot("O"),
    ])
    assert filter_plans([_candidate(plan)], store, GROUP) == []
    surviving = SentencePlan([
        RefSlot("S"),
        VerbSlot("make", voice="passive", agr=0),
        PrepositionSlot("from"),
        RefSlot("O"),
    ])
    assert filter_plans([_candidate(surviving)], store, GROUP) != []


def test_interior_phrase_realization():
    plan = SentencePlan([
        RefSlot("S"),
        VerbSlot("make", voice="passive", agr=0),
        PrepositionSlot("from"),
        RefSlot("O"),
    ])
    assert interior_phrase(plan) == ["is", "made", "from"]


# -- structural invariants ---------------------------------------------------------------

def test_surviving_plans_structurally_sound(extraction):
    for cand in extraction.candidates:
        plan = cand.plan
        assert len(plan.slots) >= 3
        assert plan.verb_slots()
        assert not isinstance(plan.slots[0], VerbSlot)
        plan.validate()  # exactly one RefS and one RefO


def test_low_confidence_flag(extraction):
    # the fixture has fewer than 10 seed pairs... unless generalization
    # produced more; the flag must simply match the count
    assert extraction.low_confidence == (len(extraction.seed_pairs) < 10)


def test_extraction_is_deterministic(wine, store, names):
    a = extract_relation(wine, store, ":madeFrom", names)
    b = extract_relation(wine, store, ":madeFrom", names)
    assert [c.notation for c in a.candidates] == [c.notation for c in b.candidates]
    assert {t.text for t in a.template_list()} == {t.text for t in b.template_list()}
