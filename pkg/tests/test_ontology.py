import pytest

from nameplan.ontology import (
    Identifier,
    MessageTriple,
    OntologyError,
    load_ontology,
    tokenize_identifier,
)

from conftest import FIXTURES


@pytest.fixture(scope="module")
def wine():
    return load_ontology(str(FIXTURES / "wine.ont"))


def test_tokenize_camelcase():
    assert tokenize_identifier(Identifier(":KalinCellarsSemillon")).tokens == (
        "Kalin", "Cellars", "Semillon",
    )


def test_tokenize_digit_runs():
    assert tokenize_identifier(Identifier(":exhibit23")).tokens == ("exhibit", "23")


def test_tokenize_underscores_and_hyphens():
    assert tokenize_identifier(Identifier(":has_symptom")).tokens == ("has", "symptom")
    assert tokenize_identifier(Identifier(":national-arch-napoli")).tokens == (
        "national", "arch", "napoli",
    )


def test_tokenize_label_takes_priority():
    ident = Identifier(":DOID_1328", label="Rift Valley Fever")
    assert tokenize_identifier(ident).tokens == ("Rift", "Valley", "Fever")


def test_tokenize_brackets_in_label():
    ident = Identifier(":gerbil", label="gerbil (dessert rat)")
    assert tokenize_identifier(ident).tokens == ("gerbil", "(", "dessert", "rat", ")")


def test_tokenize_is_stable_on_join():
    first = tokenize_identifier(Identifier(":SouthAustraliaRegion"))
    again = tokenize_identifier(Identifier(first.text(), label=first.text()))
    assert again.tokens == first.tokens


def test_wine_fixture_loads_with_expected_hierarchy(wine):
    assert wine.entity(":Semillon").kind == "class"
    assert ":Wine" in wine.ancestors_of(":Semillon")


def test_ancestors_match_worked_example(wine):
    assert wine.ancestors_of(":KalinCellarsSemillon") == [
        ":Semillon", ":SemillonOrSauvignonBlanc", ":Wine",
    ]


def test_ancestors_of_root_is_empty(wine):
    assert wine.ancestors_of(":Wine") == []


def test_ancestors_have_no_duplicates_and_exclude_self(tmp_path):
    path = tmp_path / "diamond.ont"
    path.write_text(
        "class :Top\nclass :Left\nclass :Right\nclass :Bottom\n"
        "subclass :Left :Top\nsubclass :Right :Top\n"
        "subclass :Bottom :Left\nsubclass :Bottom :Right\n"
    )
    onto = load_ontology(str(path))
    anc = onto.ancestors_of(":Bottom")
    assert anc == [":Left", ":Right", ":Top"]
    assert len(anc) == len(set(anc))
    assert ":Bottom" not in anc


def test_equivalent_class_parents_are_collected(tmp_path):
    path = tmp_path / "equiv.ont"
    path.write_text(
        "class :A\nclass :B\nclass :C\nequivalent :A :B\nsubclass :B :C\n"
    )
    onto = load_ontology(str(path))
    assert onto.ancestors_of(":A") == [":C"]


def test_triples_about_includes_isa(wine):
    triples = wine.triples_about(":KalinCellarsSemillon")
    assert MessageTriple(":KalinCellarsSemillon", "isA", ":Semillon") in triples
    assert all(t.s == ":KalinCellarsSemillon" for t in triples)
    assert {t.r for t in triples} == {"isA", ":hasMaker", ":hasFlavor"}


def test_triples_about_parent_only(wine):
    assert wine.triples_about(":red") == [
        MessageTriple(":red", "instanceOf", ":Color")
    ]


def test_triples_about_entity_with_no_facts(tmp_path):
    path = tmp_path / "bare.ont"
    path.write_text("class :Lonely\n")
    onto = load_ontology(str(path))
    assert onto.triples_about(":Lonely") == []


def test_triples_about_subset_of_all(wine):
    everything = wine.all_triples()
    for t in wine.triples_about(":StEmilion"):
        assert t in everything


def test_empty_file_is_an_error(tmp_path):
    path = tmp_path / "empty.ont"
    path.write_text("# nothing here\n")
    with pytest.raises(OntologyError, match="no entities"):
        load_ontology(str(path))


def test_cycle_is_an_error(tmp_path):
    path = tmp_path / "cycle.ont"
    path.write_text("class :A\nclass :B\nsubclass :A :B\nsubclass :B :A\n")
    with pytest.raises(OntologyError, match="cycle"):
        load_ontology(str(path))


def test_dangling_reference_is_an_error(tmp_path):
    path = tmp_path / "dangle.ont"
    path.write_text("class :A\nsubclass :A :Ghost\n")
    with pytest.raises(OntologyError, match="dangling"):
        load_ontology(str(path))


def test_parse_error_reports_line_number(tmp_path):
    path = tmp_path / "bad.ont"
    path.write_text("class :A\nfrobnicate :A\n")
    with pytest.raises(OntologyError, match=r"bad\.ont:2"):
        load_ontology(str(path))
