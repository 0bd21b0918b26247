import pytest
from hypothesis import given, strategies as st

from nameplan.align import align_tokens, levenshtein, normalized_distance, similarity

WORDS = st.text(alphabet="abcdefg", min_size=1, max_size=6)


def test_levenshtein_insert_delete_cost_one():
    assert levenshtein("arch", "archa") == 1
    assert levenshtein("archa", "arch") == 1


def test_levenshtein_substitution_costs_two():
    assert levenshtein("cat", "cut") == 2


def test_levenshtein_napoli_naples_is_four():
    assert levenshtein("napoli", "Naples") == 4


def test_levenshtein_case_ignored():
    assert levenshtein("national", "National") == 0


def test_levenshtein_arch_archaeological():
    assert levenshtein("arch", "Archaeological") == 10
    assert normalized_distance("arch", "Archaeological") == pytest.approx(10 / 18)


@given(WORDS, WORDS)
def test_levenshtein_symmetric(a, b):
    assert levenshtein(a, b) == levenshtein(b, a)


@given(WORDS, WORDS)
def test_normalized_distance_in_unit_interval(a, b):
    assert 0.0 <= normalized_distance(a, b) <= 1.0


def test_alignment_museum_example():
    name = ["national", "arch", "napoli", "museum"]
    np_tokens = ["the", "Naples", "National", "Archaeological", "Museum"]
    alignment = align_tokens(name, np_tokens)
    # pairs keyed by name token -> np token
    by_name = {name[i]: np_tokens[j] for i, j, _ in alignment.pairs}
    assert by_name == {
        "national": "National",
        "arch": "Archaeological",
        "napoli": "Naples",
        "museum": "Museum",
    }
    # "the" is ignorable and never aligned
    assert all(np_tokens[j] != "the" for _, j, _ in alignment.pairs)


def test_alignment_each_token_used_once():
    alignment = align_tokens(["wine", "wine"], ["wine"])
    assert len(alignment.pairs) == 1


def test_crossed_edges_counted():
    # the best pairs connect in reversed order -> one crossing
    alignment = align_tokens(["alpha", "beta"], ["beta", "alpha"])
    assert alignment.crossed_edges == 1
    straight = align_tokens(["alpha", "beta"], ["alpha", "beta"])
    assert straight.crossed_edges == 0


def test_similarity_museum_example_matches_hand_value():
    score, _ = similarity(
        ["the", "Naples", "National", "Archaeological", "Museum"],
        ["national", "arch", "napoli", "museum"],
    )
    expected = (1 + (1 - 10 / 18) + (1 - 4 / 12) + 1) / 5
    assert score == pytest.approx(expected, abs=1e-9)
    assert score == pytest.approx(0.6222222222, abs=1e-9)


def test_similarity_identity_single_token():
    score, _ = similarity(["Semillon"], ["Semillon"])
    assert score == 1.0


def test_similarity_no_aligned_pairs_is_zero():
    score, alignment = similarity(["the"], ["a"])  # both ignorable
    assert score == 0.0 and alignment.pairs == ()


@given(st.lists(WORDS, min_size=1, max_size=4), st.lists(WORDS, min_size=1, max_size=4))
def test_similarity_in_unit_interval(np_tokens, name_tokens):
    score, _ = similarity(np_tokens, name_tokens)
    assert 0.0 <= score <= 1.0 + 1e-12


def test_adding_identical_pair_never_lowers_score():
    base, _ = similarity(["red", "wine"], ["red", "wine"])
    grown, _ = similarity(["red", "wine", "cellar"], ["red", "wine", "cellar"])
    assert grown >= base - 1e-12
