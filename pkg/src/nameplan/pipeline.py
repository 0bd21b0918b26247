"""End-to-end runs: corpus loading, name extraction, plan extraction and the
feature dump / training data plumbing. The CLI is a thin wrapper over this."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .corpus import CorpusStore
from .features import (
    FEATURE_NAMES,
    compute_relation_features,
)
from .maxent import Model
from .names import NameExtractor, build_lemma_lookup, entity_group, infer_interest_scores
from .ontology import INSTANCE_OF, IS_A, Ontology, load_ontology
from .plans import extract_relation, relation_group
from .ranking import (
    bootstrap_extract,
    rank_boot,
    rank_sp,
    rank_sp_star,
    uniform_model,
)
from .realize import (
    NLName,
    default_lexicon,
    indefinite_article,
    name_from_notation,
    name_to_notation,
    plan_to_notation,
    realize_nlname,
    realize_plan,
)
from .store import Bundle, ontology_hash


class PipelineError(ValueError):
    pass


@dataclass
class RunConfig:
    ontology: str = ""
    corpus: str = ""
    max_docs_per_query: int = 10
    threshold: float = 0.1
    top_k: int = 5
    seed: int = 0
    model_path: str = ""
    boot_target: int = 150
    relax_min_sentences: bool = False
    names_source: str = "top1"  # manual | selected | top1
    manual_names: str = ""

    def snapshot(self) -> dict:
        return {
            "ontology": self.ontology,
            "corpus": self.corpus,
            "max_docs_per_query": self.max_docs_per_query,
            "threshold": self.threshold,
            "top_k": self.top_k,
            "seed": self.seed,
            "model_path": self.model_path,
            "boot_target": self.boot_target,
            "relax_min_sentences": self.relax_min_sentences,
            "names_source": self.names_source,
            "manual_names": self.manual_names,
        }


# -- corpus manifest ---------------------------------------------------------------


def load_corpus(manifest_path: str, max_docs_per_query: int = 10) -> CorpusStore:
    """Manifest lines: `entity <id> <path>` or `relation <id> <path>`, paths
    relative to the manifest file."""
    store = CorpusStore(max_docs_per_query=max_docs_per_query)
    base = os.path.dirname(os.path.abspath(manifest_path))
    with open(manifest_path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3 or parts[0] not in ("entity", "relation"):
                raise PipelineError(
                    f"{manifest_path}:{lineno}: expected 'entity|relation <id> <path>'"
                )
            kind, target, rel_path = parts
            group = entity_group(target) if kind == "entity" else relation_group(target)
            store.ingest(os.path.join(base, rel_path), group)
    return store


def load_manual_names(path: str) -> dict[str, NLName]:
    names: dict[str, NLName] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                eid, notation = line.split(None, 1)
                names[eid] = name_from_notation(notation)
            except Exception as exc:
                raise PipelineError(f"{path}:{lineno}: {exc}") from exc
    return names


# -- example sentences ----------------------------------------------------------------


def _object_phrase(oid: str, onto: Ontology, phrases: dict[str, str],
                   lexicon) -> str:
    if oid in phrases:
        return phrases[oid]
    return " ".join(onto.token_name(oid).tokens).lower()


def example_sentences(eid: str, name: NLName, onto: Ontology,
                      phrases: dict[str, str], lexicon=None) -> tuple[str, str]:
    """(example sentence, pronoun variant) illustrating a candidate name."""
    lexicon = lexicon or default_lexicon()
    phrase = realize_nlname(name, lexicon=lexicon)
    pronoun = realize_nlname(name, pronoun=True, lexicon=lexicon)
    triples = onto.triples_about(eid)
    hierarchy = [t for t in triples if t.r in (IS_A, INSTANCE_OF)]
    triple = hierarchy[0] if hierarchy else (triples[0] if triples else None)

    def finish(text: str) -> str:
        text = text[0].upper() + text[1:]
        return text if text.endswith(".") else text + "."

    if triple is None:
        return finish(f"this is {phrase}"), finish(f"this is {pronoun}")
    o_text = _object_phrase(triple.o, onto, phrases, lexicon)
    if triple.r == IS_A:
        body = f"is a kind of {o_text}"
    elif triple.r == INSTANCE_OF:
        stripped = _strip_leading_article(o_text)
        body = f"is {indefinite_article(stripped)} {stripped}"
    else:
        rel_words = " ".join(onto.token_name(triple.r).tokens).lower()
        body = f"{rel_words} {o_text}"
    return finish(f"{phrase} {body}"), finish(f"{pronoun} {body}")


def _strip_leading_article(text: str) -> str:
    words = text.split()
    if words and words[0].lower() in ("a", "an", "the"):
        return " ".join(words[1:]) or text
    return text


# -- name extraction ---------------------------------------------------------------------


def run_extract_names(config: RunConfig) -> Bundle:
    onto = load_ontology(config.ontology)
    store = load_corpus(config.corpus, config.max_docs_per_query)
    lexicon = default_lexicon()
    extractor = NameExtractor(onto, store, top_k=config.top_k, seed=config.seed,
                              lexicon=lexicon)
    results = extractor.extract_all()

    top_phrases: dict[str, str] = {}
    top_names: dict[str, NLName] = {}
    for eid, result in results.items():
        if result.candidates:
            top_phrases[eid] = result.candidates[0].phrase
            top_names[eid] = result.candidates[0].name

    bundle = Bundle(ontology_hash=ontology_hash(config.ontology),
                    config=config.snapshot())
    for eid in sorted(results):
        result = results[eid]
        record = {
            "kind": onto.entity(eid).kind,
            "anonymous": result.anonymous,
            "no_candidates": (not result.anonymous) and not result.candidates,
            "alt_names": sorted(
                n.text() for n in (result.alt_names.alternatives if result.alt_names else [])
            ),
            "candidates": [],
        }
        for rank, cand in enumerate(result.candidates, start=1):
            example, pronoun_example = example_sentences(
                eid, cand.name, onto, top_phrases, lexicon
            )
            record["candidates"].append({
                "id": cand.cid,
                "rank": rank,
                "notation": name_to_notation(cand.name),
                "phrase": cand.phrase,
                "score": round(cand.score, 9),
                "crossed_edges": cand.crossed_edges,
                "frequency": cand.frequency,
                "np_text": cand.np_text,
                "example": example,
                "pronoun_example": pronoun_example,
            })
        bundle.names[eid] = record

    lemma_lookup = build_lemma_lookup(store)
    assignments = infer_interest_scores(top_names, onto.all_triples(), lemma_lookup)
    bundle.interest = [
        {"s": a.s, "r": a.r, "o": a.o, "score": 0 if a.zero else "default"}
        for a in sorted(assignments, key=lambda a: (a.s, a.r, a.o))
    ]
    return bundle


# -- plan extraction ----------------------------------------------------------------------


def resolve_names(config: RunConfig, bundle: Bundle | None) -> dict[str, NLName]:
    """Names feeding the seed pairs: a manual file, the reviewer's selected
    candidates, or each entity's top-ranked candidate. Entities without a
    resolvable name are left out (seeds fall back to tokenized identifiers)."""
    source = config.names_source
    if source == "manual":
        if not config.manual_names:
            raise PipelineError("names source 'manual' needs a manual names file")
        return load_manual_names(config.manual_names)
    if source not in ("selected", "top1"):
        raise PipelineError(f"unknown names source {source!r}")
    if bundle is None:
        raise PipelineError(f"names source {source!r} needs an existing bundle")
    names: dict[str, NLName] = {}
    for eid, record in bundle.names.items():
        candidates = record.get("candidates", [])
        if not candidates:
            continue
        if source == "selected":
            chosen = bundle.selected_candidate(eid)
            if chosen is None:
                continue
            by_id = {c["id"]: c for c in candidates}
            names[eid] = name_from_notation(by_id[chosen]["notation"])
        else:
            names[eid] = name_from_notation(candidates[0]["notation"])
    return names


def run_extract_plans(config: RunConfig, bundle: Bundle | None = None,
                      method: str = "sp") -> Bundle:
    onto = load_ontology(config.ontology)
    store = load_corpus(config.corpus, config.max_docs_per_query)
    lexicon = default_lexicon()
    names = resolve_names(config, bundle)

    if bundle is None:
        bundle = Bundle(ontology_hash=ontology_hash(config.ontology),
                        config=config.snapshot())
    else:
        bundle.config = config.snapshot()

    if config.model_path:
        with open(config.model_path, "r", encoding="utf-8") as fh:
            model = Model.from_json(fh.read())
    else:
        model = uniform_model(FEATURE_NAMES)

    min_sentences = 1 if config.relax_min_sentences else 2
    for rid in sorted(onto.relations):
        extraction = extract_relation(
            onto, store, rid, names,
            threshold=config.threshold, min_sentences=min_sentences,
            lexicon=lexicon,
        )
        record = {
            "low_confidence": extraction.low_confidence,
            "seed_pair_count": len(extraction.seed_pairs),
            "candidates": [],
        }
        if method == "boot":
            record["method"] = "BOOT"
            result = bootstrap_extract(
                extraction.events, store, extraction.group, rid,
                target_count=config.boot_target,
            )
            ranked = rank_boot(result)
            for rank, entry in enumerate(ranked.entries[: config.top_k], start=1):
                record["candidates"].append({
                    "id": f"{rid}#b{rank}",
                    "rank": rank,
                    "template": entry.pid,
                    "confidence": round(entry.probability, 9),
                })
        else:
            record["method"] = "SP*"
            vectors = compute_relation_features(
                extraction, store, onto.token_name(rid).tokens
            )
            ranked = rank_sp(extraction, vectors, model)
            starred = rank_sp_star(ranked, extraction, store, lexicon)
            by_pid = {c.pid: c for c in extraction.candidates}
            for rank, entry in enumerate(starred.entries[: config.top_k], start=1):
                cand = by_pid[entry.pid]
                example = _plan_example(cand, extraction, lexicon)
                record["candidates"].append({
                    "id": entry.pid,
                    "rank": rank,
                    "notation": cand.notation,
                    "template": cand.templates[0].text,
                    "templates": sorted(t.text for t in cand.templates),
                    "probability": round(entry.probability, 9),
                    "coverage": (
                        round(entry.coverage, 9) if entry.coverage is not None else None
                    ),
                    "combined": (
                        round(entry.combined, 9) if entry.combined is not None else None
                    ),
                    "example": example,
                })
        bundle.plans[rid] = record
    return bundle


def _plan_example(candidate, extraction, lexicon) -> str:
    for pair in extraction.seed_pairs:
        if pair.weight == 1.0:
            try:
                return realize_plan(
                    candidate.plan, pair.n1.text, pair.n2.plural_text or pair.n2.text,
                    s_number="sing", o_number="plur", lexicon=lexicon,
                ).text
            except Exception:
                continue
    return ""


# -- feature dumps -------------------------------------------------------------------------


def write_feature_dump(config: RunConfig, path: str,
                       names: dict[str, NLName] | None = None,
                       labels: dict[str, int] | None = None) -> int:
    """TSV dump of the feature vectors of every plan candidate (one row per
    candidate, stable column order), optionally with labels. Unlabeled rows
    carry -1 so a human can fill the column in before training."""
    onto = load_ontology(config.ontology)
    store = load_corpus(config.corpus, config.max_docs_per_query)
    if names is None:
        names = resolve_names(config, None)
    rows = 0
    with open(path, "w", encoding="utf-8") as fh:
        header = ["candidate", "label"] + list(FEATURE_NAMES)
        fh.write("\t".join(header) + "\n")
        min_sentences = 1 if config.relax_min_sentences else 2
        for rid in sorted(onto.relations):
            extraction = extract_relation(
                onto, store, rid, names, threshold=config.threshold,
                min_sentences=min_sentences,
            )
            vectors = compute_relation_features(
                extraction, store, onto.token_name(rid).tokens
            )
            for pid in sorted(vectors):
                label = (labels or {}).get(pid, -1)
                values = [f"{vectors[pid][n]:.9f}" for n in FEATURE_NAMES]
                fh.write("\t".join([pid, str(label)] + values) + "\n")
                rows += 1
    return rows


def read_feature_dump(path: str):
    """(ids, labels, matrix rows) from a feature dump TSV."""
    import numpy as np

    ids: list[str] = []
    labels: list[float] = []
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header[:2] != ["candidate", "label"]:
            raise PipelineError(f"{path}: not a feature dump (bad header)")
        names = header[2:]
        if names != list(FEATURE_NAMES):
            raise PipelineError(f"{path}: feature schema mismatch")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != len(header):
                raise PipelineError(f"{path}:{lineno}: wrong column count")
            ids.append(parts[0])
            try:
                labels.append(float(parts[1]))
                rows.append([float(v) for v in parts[2:]])
            except ValueError as exc:
                raise PipelineError(f"{path}:{lineno}: {exc}") from exc
    return ids, np.asarray(labels), np.asarray(rows)
