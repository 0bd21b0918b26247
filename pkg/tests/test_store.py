import pytest

from nameplan.store import (
    Bundle,
    BundleError,
    agreement_report,
    cohens_kappa,
    load_bundle,
    save_bundle,
)


def sample_bundle():
    bundle = Bundle(ontology_hash="abc123")
    bundle.names = {
        ":red": {
            "anonymous": False,
            "candidates": [
                {"id": ":red#n1", "rank": 1, "notation": "[headadj red]", "phrase": "red"},
                {"id": ":red#n2", "rank": 2, "notation": "[adj red][headnoun color sing neut]",
                 "phrase": "the red color"},
            ],
        },
        ":KalinCellarsSemillon": {"anonymous": True, "candidates": []},
    }
    bundle.plans = {
        ":madeFrom": {
            "candidates": [
                {"id": ":madeFrom#p1", "rank": 1,
                 "notation": "[ref(S) nom][verb make passive present agr=1 +][prep from][ref(O) acc]",
                 "template": "S is made from O"},
            ],
        },
    }
    return bundle


# -- round trip -----------------------------------------------------------------

def test_save_load_round_trip(tmp_path):
    bundle = sample_bundle()
    path = tmp_path / "bundle.json"
    save_bundle(bundle, str(path))
    loaded = load_bundle(str(path))
    assert loaded.to_json() == bundle.to_json()


def test_round_trip_is_byte_identical(tmp_path):
    bundle = sample_bundle()
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_bundle(bundle, str(p1))
    save_bundle(load_bundle(str(p1)), str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def test_empty_bundle_is_valid(tmp_path):
    path = tmp_path / "empty.json"
    save_bundle(Bundle(), str(path))
    assert load_bundle(str(path)).names == {}


def test_dangling_selection_is_error():
    bundle = sample_bundle()
    bundle.selections = {":red": {"j1": {"candidates": [":red#n9"], "timestamp": ""}}}
    with pytest.raises(BundleError, match="unknown candidate"):
        bundle.to_json()


# -- selections -----------------------------------------------------------------

def test_record_selection_by_rank():
    bundle = sample_bundle()
    bundle.record_selection(":red", [":red#n2"], "j1")
    assert bundle.selected_candidate(":red") == ":red#n2"


def test_record_none_selection():
    bundle = sample_bundle()
    bundle.record_selection(":red", None, "j1")
    assert bundle.selections[":red"]["j1"]["candidates"] == []
    assert bundle.selected_candidate(":red") is None


def test_two_selectors_both_stored():
    bundle = sample_bundle()
    bundle.record_selection(":red", [":red#n1"], "j1")
    bundle.record_selection(":red", [":red#n2"], "j2")
    assert set(bundle.selections[":red"]) == {"j1", "j2"}


def test_unknown_candidate_rejected():
    bundle = sample_bundle()
    with pytest.raises(BundleError, match="unknown candidate"):
        bundle.record_selection(":red", ["nope"], "j1")


def test_unknown_target_rejected():
    bundle = sample_bundle()
    with pytest.raises(BundleError, match="unknown target"):
        bundle.record_selection(":ghost", None, "j1")


def test_reselection_replaces():
    bundle = sample_bundle()
    bundle.record_selection(":red", [":red#n1"], "j1")
    bundle.record_selection(":red", [":red#n2"], "j1")
    assert bundle.selections[":red"]["j1"]["candidates"] == [":red#n2"]


# -- kappa ----------------------------------------------------------------------

def test_kappa_identical_choices():
    assert cohens_kappa(["a", "b", "a"], ["a", "b", "a"]) == 1.0


def test_kappa_hand_computed():
    # observed agreement 0.5; expected: p(a)=0.5*0.5 + p(b)=0.5*0.5 = 0.5
    a = ["x", "x", "y", "y"]
    b = ["x", "y", "x", "y"]
    kappa = cohens_kappa(a, b)
    assert kappa == pytest.approx((0.5 - 0.5) / 0.5)


def test_kappa_range():
    assert -1.0 <= cohens_kappa(["a", "b"], ["b", "a"]) <= 1.0


# -- agreement report --------------------------------------------------------------

def four_target_bundle():
    bundle = Bundle()
    bundle.names = {
        f":t{i}": {
            "anonymous": False,
            "candidates": [
                {"id": f":t{i}#n{r}", "rank": r, "notation": "", "phrase": ""}
                for r in range(1, 6)
            ],
        }
        for i in range(1, 5)
    }
    return bundle


def test_agreement_identical_selections():
    bundle = four_target_bundle()
    for i in range(1, 5):
        bundle.record_selection(f":t{i}", [f":t{i}#n1"], "j1")
        bundle.record_selection(f":t{i}", [f":t{i}#n1"], "j2")
    report = agreement_report(bundle)
    assert report["micro-precision"] == 1.0
    assert report["macro-precision"] == 1.0
    assert report["pseudo-recall"] == 1.0
    assert report["kappa"] == 1.0


def test_agreement_disjoint_marks():
    bundle = four_target_bundle()
    for i in range(1, 5):
        bundle.record_selection(f":t{i}", [f":t{i}#n1"], "j1")
        bundle.record_selection(f":t{i}", [f":t{i}#n2"], "j2")
    report = agreement_report(bundle)
    assert report["micro-precision"] == 0.0
    assert report["kappa"] <= 0.0 + 1e-9


def test_agreement_hand_computed_mixed():
    bundle = four_target_bundle()
    # j1 marks two candidates on t1; j2 agrees on one of them
    bundle.record_selection(":t1", [":t1#n1", ":t1#n2"], "j1")
    bundle.record_selection(":t1", [":t1#n2"], "j2")
    # t2: agreement on n1
    bundle.record_selection(":t2", [":t2#n1"], "j1")
    bundle.record_selection(":t2", [":t2#n1"], "j2")
    # t3: j1 marks nothing, j2 marks n3
    bundle.record_selection(":t3", [], "j1")
    bundle.record_selection(":t3", [":t3#n3"], "j2")
    # t4: both mark nothing
    bundle.record_selection(":t4", [], "j1")
    bundle.record_selection(":t4", [], "j2")
    report = agreement_report(bundle)
    # micro: j2 marked 3 candidates, 2 agreed
    assert report["micro-precision"] == pytest.approx(2 / 3)
    # macro over targets where j2 marked: t1 -> 1, t2 -> 1, t3 -> 0
    assert report["macro-precision"] == pytest.approx(2 / 3)
    # pseudo-recall: j1 marked on t1, t2; j2 also marked there
    assert report["pseudo-recall"] == 1.0
    # kappa categories: j1 choices (n1, n1, none, none), j2 (n2, n1, n3, none)
    observed = 2 / 4
    j1_choices = [":t1#n1", ":t2#n1", "<none>", "<none>"]
    j2_choices = [":t1#n2", ":t2#n1", ":t3#n3", "<none>"]
    cats = set(j1_choices) | set(j2_choices)
    expected = sum(
        (j1_choices.count(c) / 4) * (j2_choices.count(c) / 4) for c in cats
    )
    assert report["kappa"] == pytest.approx((observed - expected) / (1 - expected))


def test_agreement_needs_two_selectors():
    bundle = four_target_bundle()
    bundle.record_selection(":t1", [":t1#n1"], "j1")
    with pytest.raises(BundleError, match="two selectors"):
        agreement_report(bundle)
