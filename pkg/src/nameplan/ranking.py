"""Candidate plan ranking: classifier order, coverage re-ranking of the top
ten, and the bootstrapping baseline with its confidence score."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .corpus import CorpusStore
from .features import compute_relation_features
from .maxent import Model, predict_proba
from .plans import (
    DEFAULT_T,
    MatchEvent,
    PlanCandidate,
    RelationExtraction,
    SeedName,
    SeedPair,
    Template,
    extract_templates,
    match_anchor_events,
)
from .realize import default_lexicon, realize_plan

TOP_RERANKED = 10


class RankingError(ValueError):
    pass


@dataclass
class RankedCandidate:
    pid: str
    probability: float
    coverage: float | None = None
    combined: float | None = None

    @property
    def score(self) -> float:
        return self.combined if self.combined is not None else self.probability


@dataclass
class RankedCandidates:
    relation: str
    method: str  # SP | SP* | BOOT
    entries: list[RankedCandidate] = field(default_factory=list)


def uniform_model(feature_names: list[str]) -> Model:
    """Zero-weight model: every candidate gets probability 0.5 (useful before
    any labeled data exists; ties then break on candidate id)."""
    import numpy as np

    return Model(np.zeros(len(feature_names)), 0.0, list(feature_names))


def rank_sp(extraction: RelationExtraction, vectors: dict[str, dict[str, float]],
            model: Model) -> RankedCandidates:
    """Candidates by decreasing classifier probability; ties break on id."""
    entries = []
    for pid in sorted(vectors):
        prob = float(predict_proba(model, vectors[pid]))
        entries.append(RankedCandidate(pid, prob))
    entries.sort(key=lambda e: (-e.probability, e.pid))
    return RankedCandidates(extraction.rid, "SP", entries)


# -- coverage ----------------------------------------------------------------------


@dataclass
class CoverageReport:
    relation: str
    pid: str
    sentences: list[tuple[str, str, int]]  # (seed pair text, sentence, page hits)
    coverage: float


def coverage(candidate: PlanCandidate, extraction: RelationExtraction,
             store: CorpusStore, lexicon=None) -> CoverageReport:
    """Fraction of the relation's seed pairs whose realized sentence occurs
    verbatim in the retrieved documents. Pairs that never produced any plan
    get no sentence and count as uncovered."""
    from .features import usable_seed_pairs

    lexicon = lexicon or default_lexicon()
    usable = usable_seed_pairs(extraction)
    rows = []
    covered = 0
    for pair in extraction.seed_pairs:
        if pair.key not in usable:
            rows.append((f"{pair.n1.text} / {pair.n2.text}", "", 0))
            continue
        try:
            sentence = realize_plan(
                candidate.plan, pair.n1.text, pair.n2.plural_text or pair.n2.text,
                s_number="sing", o_number="plur", lexicon=lexicon,
            )
        except Exception:
            rows.append((f"{pair.n1.text} / {pair.n2.text}", "", 0))
            continue
        tokens = sentence.text.rstrip(".").split()
        hits = store.phrase_search(tokens, extraction.group) if tokens else 0
        rows.append((f"{pair.n1.text} / {pair.n2.text}", sentence.text, hits))
        if hits >= 1:
            covered += 1
    total = len(extraction.seed_pairs)
    return CoverageReport(
        extraction.rid, candidate.pid, rows, covered / total if total else 0.0
    )


def rank_sp_star(ranked: RankedCandidates, extraction: RelationExtraction,
                 store: CorpusStore, lexicon=None,
                 coverage_fn=None) -> RankedCandidates:
    """Re-rank only the classifier's top ten by probability x coverage; the
    tail keeps its positions. `coverage_fn(pid) -> float` may replace the
    corpus-backed coverage computation."""
    if coverage_fn is None:
        by_pid = {c.pid: c for c in extraction.candidates}

        def coverage_fn(pid):
            return coverage(by_pid[pid], extraction, store, lexicon).coverage

    head = ranked.entries[:TOP_RERANKED]
    tail = ranked.entries[TOP_RERANKED:]
    rescored = []
    for entry in head:
        cov = coverage_fn(entry.pid)
        rescored.append(
            RankedCandidate(
                entry.pid,
                entry.probability,
                coverage=cov,
                combined=entry.probability * cov,
            )
        )
    rescored.sort(key=lambda e: (-e.combined, e.pid))
    return RankedCandidates(ranked.relation, "SP*", rescored + list(tail))


def select_top(ranked: RankedCandidates, k: int) -> list[RankedCandidate]:
    if k < 1:
        raise RankingError("k must be at least 1")
    return ranked.entries[:k]


# -- bootstrapping baseline ---------------------------------------------------------


def bootstrap_conf(hits: float, misses: float, finds: float) -> float:
    """hits/(hits+misses) * ln(finds); zero when nothing was found."""
    if hits <= 0 or finds <= 0:
        return 0.0
    return hits / (hits + misses) * math.log(finds)


@dataclass
class BootResult:
    relation: str
    templates: dict[tuple, Template]
    anchor_pairs: set  # all distinct NP anchor pairs seen across iterations
    iterations: int
    scored: list[tuple[float, str, Template]] = field(default_factory=list)


def _template_sentence_matches(template: Template, store: CorpusStore, group: str):
    interior = [t for t in template.interior_tokens()]
    if not interior:
        return []
    return store.phrase_sentences(interior, group)


def bootstrap_extract(extraction_events: list[MatchEvent], store: CorpusStore,
                      group: str, relation: str, target_count: int = 150,
                      max_iterations: int = 10) -> BootResult:
    """Iterative template harvesting: when fewer than `target_count` templates
    exist, template interiors become phrase queries whose surrounding noun
    phrases form new seed pairs (pairs and templates seen in a single
    document are discarded)."""
    templates = extract_templates(extraction_events, min_sentences=2)
    anchor_pairs = {e.anchor_key for e in extraction_events}
    seen_pair_keys = {e.seed.key for e in extraction_events}
    iterations = 1

    while len(templates) < target_count and iterations < max_iterations:
        new_pairs: dict[tuple, SeedPair] = {}
        pair_docs: dict[tuple, set[str]] = {}
        for key in sorted(templates):
            template = templates[key]
            for occ in _template_sentence_matches(template, store, group):
                sentence = occ.sentence
                interior = [t.lower() for t in template.interior_tokens()]
                hay = [t.surface.lower() for t in sentence.tokens]
                n = len(interior)
                for start in range(len(hay) - n + 1):
                    if hay[start : start + n] != interior:
                        continue
                    before = [
                        (s, e) for s, e, _b in sentence.np_spans if e == start
                    ]
                    after = [
                        (s, e) for s, e, _b in sentence.np_spans if s == start + n
                    ]
                    for b_span in before:
                        for a_span in after:
                            n1 = tuple(
                                t.surface for t in sentence.tokens[b_span[0]: b_span[1]]
                            )
                            n2 = tuple(
                                t.surface for t in sentence.tokens[a_span[0]: a_span[1]]
                            )
                            pair = SeedPair(
                                SeedName(n1, "", True), SeedName(n2, "", True)
                            )
                            if pair.key in seen_pair_keys:
                                continue
                            new_pairs.setdefault(pair.key, pair)
                            pair_docs.setdefault(pair.key, set()).add(occ.doc.doc_id)
        kept_pairs = [
            new_pairs[k] for k in sorted(new_pairs) if len(pair_docs[k]) >= 2
        ]
        if not kept_pairs:
            break
        seen_pair_keys |= {p.key for p in kept_pairs}
        new_events = match_anchor_events(store, group, kept_pairs, DEFAULT_T)
        anchor_pairs |= {e.anchor_key for e in new_events}
        new_templates = extract_templates(new_events, min_sentences=2)
        added = False
        for key in sorted(new_templates):
            tpl = new_templates[key]
            if tpl.distinct_documents() < 2:
                continue
            if key not in templates:
                templates[key] = tpl
                added = True
        iterations += 1
        if not added:
            break

    result = BootResult(relation, templates, anchor_pairs, iterations)
    scored = []
    for key in sorted(templates):
        template = templates[key]
        extracted = {o.event.anchor_key for o in template.occurrences}
        hits = len(extracted)
        misses = len(anchor_pairs - extracted)
        finds = len(_template_sentence_matches(template, store, group))
        conf = bootstrap_conf(hits, misses, finds)
        scored.append((conf, template.text, template))
    scored.sort(key=lambda item: (-item[0], item[1]))
    result.scored = scored
    return result


def rank_boot(result: BootResult) -> RankedCandidates:
    entries = [
        RankedCandidate(template.text, conf, combined=conf)
        for conf, _text, template in result.scored
    ]
    return RankedCandidates(result.relation, "BOOT", entries)


# -- evaluation metrics -------------------------------------------------------------


def reciprocal_rank(marks: list[bool], top_k: int = 5) -> float:
    """1/rank of the first correct candidate within the top_k, else 0."""
    for i, correct in enumerate(marks[:top_k], start=1):
        if correct:
            return 1.0 / i
    return 0.0


def ranking_metrics(gold: dict[str, list[bool]],
                    weights: dict[str, float] | None = None) -> dict[str, float]:
    """1-in-k and MRR over per-target correctness marks (candidate order);
    weighted variants weigh each target by its mention count."""
    if not gold:
        return {}
    weights = weights or {}
    metrics: dict[str, float] = {}
    for label, k in (("1-in-1", 1), ("1-in-3", 3), ("1-in-5", 5)):
        plain = weighted = weight_total = 0.0
        for target, marks in gold.items():
            hit = float(any(marks[:k]))
            w = weights.get(target, 1.0)
            plain += hit
            weighted += hit * w
            weight_total += w
        metrics[label] = plain / len(gold)
        metrics[f"weighted {label}"] = weighted / weight_total if weight_total else 0.0
    plain = weighted = weight_total = 0.0
    for target, marks in gold.items():
        rr = reciprocal_rank(marks)
        w = weights.get(target, 1.0)
        plain += rr
        weighted += rr * w
        weight_total += w
    metrics["MRR"] = plain / len(gold)
    metrics["weighted MRR"] = weighted / weight_total if weight_total else 0.0
    return metrics
