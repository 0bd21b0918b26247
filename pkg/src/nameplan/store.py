"""Resource bundle: everything the pipeline produces, in one canonical JSON
file that round-trips byte-identically, plus reviewer selections and the
agreement metrics over them."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field


class BundleError(ValueError):
    pass


BUNDLE_FORMAT = "nameplan-bundle"
BUNDLE_VERSION = 1


@dataclass
class Bundle:
    ontology_hash: str = ""
    config: dict = field(default_factory=dict)
    names: dict = field(default_factory=dict)  # entity id -> name record
    plans: dict = field(default_factory=dict)  # relation id -> plan record
    interest: list = field(default_factory=list)
    selections: dict = field(default_factory=dict)  # target -> selector -> record

    # -- candidate access ---------------------------------------------------------

    def candidate_ids(self, target: str) -> list[str]:
        record = self.names.get(target) or self.plans.get(target)
        if record is None:
            raise BundleError(f"unknown target {target!r}")
        return [c["id"] for c in record.get("candidates", [])]

    def targets(self) -> list[str]:
        return sorted(self.names) + sorted(self.plans)

    # -- selections ----------------------------------------------------------------

    def record_selection(self, target: str, candidate_ids: list[str] | None,
                         selector: str, timestamp: str = "") -> None:
        """Store a selector's marked candidates for a target; None or an
        empty list records an explicit "none correct" decision."""
        known = set(self.candidate_ids(target))
        marked = list(candidate_ids or [])
        for cid in marked:
            if cid not in known:
                raise BundleError(f"unknown candidate {cid!r} for {target!r}")
        self.selections.setdefault(target, {})[selector] = {
            "candidates": marked,
            "timestamp": timestamp,
        }

    def selected_candidate(self, target: str, selector: str | None = None) -> str | None:
        """First marked candidate for a target (any selector unless given)."""
        record = self.selections.get(target, {})
        selectors = [selector] if selector else sorted(record)
        for sel in selectors:
            marked = record.get(sel, {}).get("candidates", [])
            if marked:
                return marked[0]
        return None

    # -- serialization ----------------------------------------------------------------

    def validate(self) -> None:
        for target, by_selector in self.selections.items():
            known = set(self.candidate_ids(target))
            for selector, record in by_selector.items():
                for cid in record.get("candidates", []):
                    if cid not in known:
                        raise BundleError(
                            f"selection by {selector!r} references unknown candidate {cid!r}"
                        )

    def to_json(self) -> str:
        self.validate()
        payload = {
            "format": BUNDLE_FORMAT,
            "version": BUNDLE_VERSION,
            "ontology_hash": self.ontology_hash,
            "config": self.config,
            "names": self.names,
            "plans": self.plans,
            "interest": self.interest,
            "selections": self.selections,
        }
        return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Bundle":
        payload = json.loads(text)
        if payload.get("format") != BUNDLE_FORMAT:
            raise BundleError("not a resource bundle file")
        bundle = cls(
            ontology_hash=payload.get("ontology_hash", ""),
            config=payload.get("config", {}),
            names=payload.get("names", {}),
            plans=payload.get("plans", {}),
            interest=payload.get("interest", []),
            selections=payload.get("selections", {}),
        )
        bundle.validate()
        return bundle


def save_bundle(bundle: Bundle, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(bundle.to_json())


def load_bundle(path: str) -> Bundle:
    with open(path, "r", encoding="utf-8") as fh:
        return Bundle.from_json(fh.read())


def ontology_hash(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()[:16]


# -- agreement metrics -----------------------------------------------------------------


def cohens_kappa(choices_a: list, choices_b: list) -> float:
    """Kappa over paired categorical choices."""
    if len(choices_a) != len(choices_b) or not choices_a:
        raise BundleError("kappa needs paired, non-empty choice lists")
    n = len(choices_a)
    observed = sum(1 for a, b in zip(choices_a, choices_b) if a == b) / n
    categories = set(choices_a) | set(choices_b)
    expected = 0.0
    for cat in categories:
        pa = sum(1 for a in choices_a if a == cat) / n
        pb = sum(1 for b in choices_b if b == cat) / n
        expected += pa * pb
    if expected == 1.0:
        return 1.0
    return (observed - expected) / (1.0 - expected)


def agreement_report(bundle: Bundle, judge_gold: str | None = None,
                     judge_other: str | None = None, top_k: int = 5) -> dict[str, float]:
    """Micro/macro precision, per-judge 1-in-k, pseudo-recall and Cohen's
    Kappa between two selectors. The first judge's marks count as gold; the
    kappa uses each judge's top-most mark, with "none" as a sixth category."""
    selectors = sorted({s for record in bundle.selections.values() for s in record})
    if judge_gold is None or judge_other is None:
        if len(selectors) < 2:
            raise BundleError("agreement needs two selectors with recorded choices")
        judge_gold, judge_other = selectors[0], selectors[1]

    targets = [
        t for t, record in sorted(bundle.selections.items())
        if judge_gold in record and judge_other in record
    ]
    if not targets:
        raise BundleError("the two selectors share no reviewed targets")

    gold_marks: dict[str, set[str]] = {}
    other_marks: dict[str, set[str]] = {}
    for t in targets:
        gold_marks[t] = set(bundle.selections[t][judge_gold]["candidates"])
        other_marks[t] = set(bundle.selections[t][judge_other]["candidates"])

    other_total = sum(len(m) for m in other_marks.values())
    both = sum(len(gold_marks[t] & other_marks[t]) for t in targets)
    micro = both / other_total if other_total else 0.0

    macro_terms = []
    for t in targets:
        if other_marks[t]:
            macro_terms.append(len(gold_marks[t] & other_marks[t]) / len(other_marks[t]))
    macro = sum(macro_terms) / len(macro_terms) if macro_terms else 0.0

    gold_one_in_k = sum(1 for t in targets if gold_marks[t]) / len(targets)
    other_one_in_k = sum(1 for t in targets if other_marks[t]) / len(targets)
    both_any = sum(1 for t in targets if gold_marks[t] and other_marks[t])
    gold_any = sum(1 for t in targets if gold_marks[t])
    pseudo_recall = both_any / gold_any if gold_any else 0.0

    def top_choice(marks: set[str], target: str) -> str:
        order = bundle.candidate_ids(target)[:top_k]
        for cid in order:
            if cid in marks:
                return cid
        return "<none>"

    kappa = cohens_kappa(
        [top_choice(gold_marks[t], t) for t in targets],
        [top_choice(other_marks[t], t) for t in targets],
    )
    return {
        "micro-precision": micro,
        "macro-precision": macro,
        f"{judge_gold} 1-in-{top_k}": gold_one_in_k,
        f"{judge_other} 1-in-{top_k}": other_one_in_k,
        "pseudo-recall": pseudo_recall,
        "kappa": kappa,
        "targets": float(len(targets)),
    }
