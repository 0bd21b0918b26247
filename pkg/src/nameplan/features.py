"""The 251-feature representation of a candidate sentence plan.

Groups: 100 productivity features (20 variants x 5 stats), 20 prominence
features, 55 normalized-PMI features (11 variants x 5 stats), 55 token-based
features (11 variants x 5 stats), 4 grammaticality features, 17 others.

Every hit count is weighted by the matching seed pair: 1 for primary pairs,
1/2 when one seed name is secondary, 1/4 when both are.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .corpus import CorpusStore
from .plans import (
    MatchEvent,
    PlanCandidate,
    RelationExtraction,
    Template,
    TemplateOcc,
)
from .realize import (
    AdjectiveSlot,
    NounSlot,
    PrepositionSlot,
    RefSlot,
    SentencePlan,
    StringSlot,
    VerbSlot,
    default_lexicon,
    realize_plan,
)
from .text import content_stems

STATS = ("max", "min", "avg", "total", "std")

PRODUCTIVITY_VARIANTS = (
    "seed_pair", "seed1", "seed2",
    "anchor_pair", "anchor1", "anchor2",
    "template", "sentence",
    "seed_pair_template", "seed1_template", "seed2_template",
    "anchor_pair_template", "anchor1_template", "anchor2_template",
    "seed_pair_anchor_pair", "seed1_anchor1", "seed2_anchor2",
    "seed_pair_anchor_pair_template", "seed1_anchor1_template", "seed2_anchor2_template",
)

PMI_VARIANTS = (
    ("seed_pair", "seed1", "seed2"),
    ("seed_pair_template", "seed_pair", "template"),
    ("seed1_template", "seed1", "template"),
    ("seed2_template", "seed2", "template"),
    ("anchor_pair", "anchor1", "anchor2"),
    ("anchor_pair_template", "anchor_pair", "template"),
    ("anchor1_template", "anchor1", "template"),
    ("anchor2_template", "anchor2", "template"),
    ("seed_pair_anchor_pair", "seed_pair", "anchor_pair"),
    ("seed1_anchor1", "seed1", "anchor1"),
    ("seed2_anchor2", "seed2", "anchor2"),
)

TOKEN_VARIANTS = (
    "cos_seed1_anchor1", "cos_seed2_anchor2",
    "tokpmi_seed1_anchor1", "tokpmi_seed2_anchor2",
    "tokpmi_anchor1_template", "tokpmi_anchor2_template",
    "cos_template_relation", "tokpmi_template_relation",
    "tokpmi_anchor1_anchor2", "tokpmi_anchor1_anchor1", "tokpmi_anchor2_anchor2",
)

GRAMMAR_STATS = ("max", "min", "avg", "std")

MISC_FEATURES = (
    "has_bare_present_participle",
    "has_active_main_verb",
    "subject_before_object",
    "ref_is_subject",
    "ref_is_object",
    "all_sources_wellformed",
    "was_repaired",
    "slot_count",
    "slots_before_subject",
    "slots_after_object",
    "slots_between_refs",
    "doc_rank_max",
    "doc_rank_min",
    "doc_rank_avg",
    "doc_rank_total",
    "doc_rank_std",
    "source_doc_count",
)

BOOLEAN_FEATURES = frozenset(MISC_FEATURES[:7])


def feature_names() -> list[str]:
    names: list[str] = []
    for variant in PRODUCTIVITY_VARIANTS:
        names.extend(f"productivity_{variant}_{s}" for s in STATS)
    names.extend(f"prominence_{variant}" for variant in PRODUCTIVITY_VARIANTS)
    for variant, _a, _b in PMI_VARIANTS:
        names.extend(f"pmi_{variant}_{s}" for s in STATS)
    for variant in TOKEN_VARIANTS:
        names.extend(f"{variant}_{s}" for s in STATS)
    names.extend(f"grammar_{s}" for s in GRAMMAR_STATS)
    names.extend(MISC_FEATURES)
    return names


FEATURE_NAMES = feature_names()
assert len(FEATURE_NAMES) == 251

GROUP_OF_FEATURE = {}
for _n in FEATURE_NAMES:
    if _n.startswith("productivity_"):
        GROUP_OF_FEATURE[_n] = "productivity"
    elif _n.startswith("prominence_"):
        GROUP_OF_FEATURE[_n] = "prominence"
    elif _n.startswith("pmi_"):
        GROUP_OF_FEATURE[_n] = "pmi"
    elif _n.startswith(("cos_", "tokpmi_")):
        GROUP_OF_FEATURE[_n] = "token"
    elif _n.startswith("grammar_"):
        GROUP_OF_FEATURE[_n] = "grammaticality"
    else:
        GROUP_OF_FEATURE[_n] = "other"


def _stats(values: list[float]) -> dict[str, float]:
    if not values:
        return {s: 0.0 for s in STATS}
    n = len(values)
    mean = sum(values) / n
    variance = sum((v - mean) ** 2 for v in values) / n  # population std
    return {
        "max": max(values),
        "min": min(values),
        "avg": mean,
        "total": sum(values),
        "std": math.sqrt(variance),
    }


# -- hit counters ---------------------------------------------------------------------


def _item_keys(event: MatchEvent, tpl_key: tuple) -> dict[str, tuple]:
    """Item identity per variant for one (event, template) extraction record."""
    seed = event.seed.key
    return {
        "seed_pair": seed,
        "seed1": seed[0],
        "seed2": seed[1],
        "anchor_pair": event.anchor_key,
        "anchor1": event.a1,
        "anchor2": event.a2,
        "template": tpl_key,
        "sentence": event.sentence_key,
        "seed_pair_template": (seed, tpl_key),
        "seed1_template": (seed[0], tpl_key),
        "seed2_template": (seed[1], tpl_key),
        "anchor_pair_template": (event.anchor_key, tpl_key),
        "anchor1_template": (event.a1, tpl_key),
        "anchor2_template": (event.a2, tpl_key),
        "seed_pair_anchor_pair": (seed, event.anchor_key),
        "seed1_anchor1": (seed[0], event.a1),
        "seed2_anchor2": (seed[1], event.a2),
        "seed_pair_anchor_pair_template": (seed, event.anchor_key, tpl_key),
        "seed1_anchor1_template": (seed[0], event.a1, tpl_key),
        "seed2_anchor2_template": (seed[1], event.a2, tpl_key),
    }


@dataclass
class HitCounters:
    """Weighted extraction counts per variant, for a whole relation."""

    hits: dict[str, dict[tuple, float]] = field(default_factory=dict)
    totals: dict[str, float] = field(default_factory=dict)

    @classmethod
    def from_extraction(cls, extraction: RelationExtraction) -> "HitCounters":
        counters = cls()
        hits: dict[str, dict[tuple, float]] = {
            v: defaultdict(float) for v in PRODUCTIVITY_VARIANTS
        }
        for tpl_key in sorted(extraction.templates):
            tpl = extraction.templates[tpl_key]
            for occ in tpl.occurrences:
                keys = _item_keys(occ.event, tpl_key)
                w = occ.event.weight
                for variant, key in keys.items():
                    hits[variant][key] += w
        counters.hits = {v: dict(hits[v]) for v in PRODUCTIVITY_VARIANTS}
        counters.totals = {
            v: sum(hits[v].values()) for v in PRODUCTIVITY_VARIANTS
        }
        return counters

    def productivity(self, variant: str, key: tuple) -> float:
        total = self.totals.get(variant, 0.0)
        if total == 0.0:
            return 0.0
        return self.hits[variant].get(key, 0.0) / total


# -- normalized PMI ----------------------------------------------------------------------


def normalized_pmi(joint: float, marginal_a: float, marginal_b: float) -> float:
    """PMI over productivity scores, scaled to [-1, 1] by 1/(-log joint);
    1 when the items always co-occur, -1 when they never do."""
    if joint <= 0.0:
        return -1.0
    if marginal_a <= 0.0 or marginal_b <= 0.0:
        return -1.0
    if joint >= 1.0:
        return 1.0
    pmi = math.log(joint / (marginal_a * marginal_b))
    value = pmi / (-math.log(joint))
    return max(-1.0, min(1.0, value))


# -- token-level statistics ----------------------------------------------------------------


class TokenStats:
    """Per-sentence token occurrence probabilities with Laplace smoothing.

    P(tau) = (df(tau) + 1) / (L + V) where L is the number of parsed
    sentences of the relation and V the vocabulary size; joint counts use the
    same denominator, so P(tau, tau) = P(tau).
    """

    def __init__(self, store: CorpusStore, group: str):
        self.store = store
        self.group = group
        sentences = store.sentences(group) if group in store.groups() else []
        self.sentence_count = len(sentences)
        self.df: Counter[str] = Counter()
        self.joint_df: Counter[tuple[str, str]] = Counter()
        for occ in sentences:
            stems = sorted(set(content_stems(occ.sentence.surfaces())))
            for i, a in enumerate(stems):
                self.df[a] += 1
                for b in stems[i:]:
                    self.joint_df[(a, b)] += 1
        self.vocabulary = len(self.df)

    def _denominator(self) -> float:
        return self.sentence_count + max(self.vocabulary, 1)

    def prob(self, stem: str) -> float:
        return (self.df.get(stem, 0) + 1) / self._denominator()

    def joint_prob(self, a: str, b: str) -> float:
        key = (a, b) if a <= b else (b, a)
        return (self.joint_df.get(key, 0) + 1) / self._denominator()

    def avg_tok_pmi(self, tokens_a, tokens_b) -> float:
        stems_a = content_stems(list(tokens_a))
        stems_b = content_stems(list(tokens_b))
        if not stems_a or not stems_b:
            return 0.0
        total = 0.0
        for a in stems_a:
            pa = self.prob(a)
            for b in stems_b:
                pb = self.prob(b)
                pab = self.joint_prob(a, b)
                if pab >= 1.0:
                    total += 1.0
                    continue
                total += math.log(pab / (pa * pb)) / (-math.log(pab))
        return total / (len(stems_a) * len(stems_b))

    def cosine(self, tokens_a, tokens_b) -> float:
        return self.store.cosine(list(tokens_a), list(tokens_b), self.group)


# -- per-plan provenance ---------------------------------------------------------------------


def _plan_records(candidate: PlanCandidate) -> list[tuple[tuple, MatchEvent]]:
    """(template key, event) extraction records behind a candidate plan."""
    records = []
    for tpl in candidate.templates:
        for occ in tpl.occurrences:
            records.append((tpl.key, occ.event))
    return records


def usable_seed_pairs(extraction: RelationExtraction) -> set:
    """Seed pairs that produced at least one surviving sentence plan; the
    other pairs are skipped when generating scoring/coverage sentences."""
    usable = set()
    for candidate in extraction.candidates:
        for _tpl_key, event in _plan_records(candidate):
            usable.add(event.seed.key)
    return usable


def _plan_items(candidate: PlanCandidate) -> dict[str, list[tuple]]:
    """Distinct items of each variant that participated in the plan,
    in first-seen order."""
    items: dict[str, list[tuple]] = {v: [] for v in PRODUCTIVITY_VARIANTS}
    seen: dict[str, set] = {v: set() for v in PRODUCTIVITY_VARIANTS}
    for tpl_key, event in _plan_records(candidate):
        keys = _item_keys(event, tpl_key)
        for variant, key in keys.items():
            if key not in seen[variant]:
                seen[variant].add(key)
                items[variant].append(key)
    return items


# -- the feature extractor ------------------------------------------------------------------


class FeatureExtractor:
    def __init__(self, extraction: RelationExtraction, store: CorpusStore,
                 lexicon=None):
        self.extraction = extraction
        self.store = store
        self.lexicon = lexicon or default_lexicon()
        self.counters = HitCounters.from_extraction(extraction)
        self.tokens = TokenStats(store, extraction.group)
        self.usable_pairs = usable_seed_pairs(extraction)

    # productivity / prominence / pmi ------------------------------------------

    def _productivity_values(self, candidate: PlanCandidate) -> dict[str, list[float]]:
        items = _plan_items(candidate)
        return {
            variant: [self.counters.productivity(variant, key) for key in keys]
            for variant, keys in items.items()
        }

    def _prominence(self, candidate: PlanCandidate) -> dict[str, float]:
        plan_hits: dict[str, set] = {v: set() for v in PRODUCTIVITY_VARIANTS}
        for tpl_key, event in _plan_records(candidate):
            keys = _item_keys(event, tpl_key)
            for variant, key in keys.items():
                plan_hits[variant].add(key)
        out = {}
        for variant in PRODUCTIVITY_VARIANTS:
            denominator = len(self.counters.hits.get(variant, {}))
            numerator = len(plan_hits[variant])
            out[variant] = numerator / denominator if denominator else 0.0
        return out

    def _pmi_values(self, candidate: PlanCandidate) -> dict[str, list[float]]:
        items = _plan_items(candidate)
        out: dict[str, list[float]] = {}
        for joint_variant, var_a, var_b in PMI_VARIANTS:
            values = []
            for key in items[joint_variant]:
                if joint_variant in ("seed_pair", "anchor_pair"):
                    key_a, key_b = key[0], key[1]
                else:
                    key_a, key_b = key[0], key[1]
                joint = self.counters.productivity(joint_variant, key)
                pa = self.counters.productivity(var_a, key_a)
                pb = self.counters.productivity(var_b, key_b)
                values.append(normalized_pmi(joint, pa, pb))
            out[joint_variant] = values
        return out

    # token-based ------------------------------------------------------------------

    def _token_values(self, candidate: PlanCandidate,
                      relation_tokens: tuple[str, ...]) -> dict[str, list[float]]:
        items = _plan_items(candidate)
        templates = {t.key: t for t in candidate.templates}

        def template_words(tpl_key):
            return templates[tpl_key].interior_tokens()

        out: dict[str, list[float]] = {v: [] for v in TOKEN_VARIANTS}
        for seed1, anchor1 in items["seed1_anchor1"]:
            out["cos_seed1_anchor1"].append(self.tokens.cosine(seed1, anchor1))
            out["tokpmi_seed1_anchor1"].append(self.tokens.avg_tok_pmi(seed1, anchor1))
        for seed2, anchor2 in items["seed2_anchor2"]:
            out["cos_seed2_anchor2"].append(self.tokens.cosine(seed2, anchor2))
            out["tokpmi_seed2_anchor2"].append(self.tokens.avg_tok_pmi(seed2, anchor2))
        for anchor1, tpl_key in items["anchor1_template"]:
            out["tokpmi_anchor1_template"].append(
                self.tokens.avg_tok_pmi(anchor1, template_words(tpl_key))
            )
        for anchor2, tpl_key in items["anchor2_template"]:
            out["tokpmi_anchor2_template"].append(
                self.tokens.avg_tok_pmi(anchor2, template_words(tpl_key))
            )
        for tpl_key in items["template"]:
            words = template_words(tpl_key)
            out["cos_template_relation"].append(self.tokens.cosine(words, relation_tokens))
            out["tokpmi_template_relation"].append(
                self.tokens.avg_tok_pmi(words, relation_tokens)
            )
        for a1, a2 in items["anchor_pair"]:
            out["tokpmi_anchor1_anchor2"].append(self.tokens.avg_tok_pmi(a1, a2))
        for a1 in items["anchor1"]:
            out["tokpmi_anchor1_anchor1"].append(self.tokens.avg_tok_pmi(a1, a1))
        for a2 in items["anchor2"]:
            out["tokpmi_anchor2_anchor2"].append(self.tokens.avg_tok_pmi(a2, a2))
        return out

    # grammaticality ------------------------------------------------------------------

    def _grammar_values(self, candidate: PlanCandidate,
                        scorer: "SentenceScorer") -> list[float]:
        values = []
        for pair in self.extraction.seed_pairs:
            if pair.key not in self.usable_pairs:
                continue  # pair never produced a plan; assumed poor
            try:
                sentence = realize_plan(
                    candidate.plan,
                    pair.n1.text,
                    pair.n2.plural_text or pair.n2.text,
                    s_number="sing",
                    o_number="plur",
                    lexicon=self.lexicon,
                )
            except Exception:
                continue
            tokens = sentence.text.rstrip(".").split()
            if not tokens:
                continue
            values.append(scorer.score(tokens) / len(tokens))
        return values

    # misc -----------------------------------------------------------------------------

    def _misc_values(self, candidate: PlanCandidate) -> dict[str, float]:
        plan = candidate.plan
        s_idx = plan.ref_index("S")
        o_idx = plan.ref_index("O")
        verbs = plan.verb_slots()
        bare_present = any(v.participle == "present" for _i, v in verbs)
        main_active = bool(verbs) and verbs[0][1].voice == "active" and (
            verbs[0][1].participle is None
        )
        labels = {
            s.source_label
            for s in plan.slots
            if isinstance(s, RefSlot) and s.source_label
        }
        records = _plan_records(candidate)
        wellformed = all(
            event.occ.sentence.well_formed for _k, event in records
        ) if records else False
        doc_records = {}
        for _key, event in records:
            doc_records[(event.occ.doc.query_id, event.occ.doc.doc_id)] = event.occ.doc.rank
        ranks = [float(r) for r in sorted(doc_records.values())]
        rank_stats = _stats(ranks)
        lo, hi = sorted((s_idx, o_idx))
        return {
            "has_bare_present_participle": float(bare_present),
            "has_active_main_verb": float(main_active),
            "subject_before_object": float(s_idx < o_idx),
            "ref_is_subject": float("subj" in labels),
            "ref_is_object": float("obj" in labels),
            "all_sources_wellformed": float(wellformed),
            "was_repaired": float(plan.repaired),
            "slot_count": float(len(plan.slots)),
            "slots_before_subject": float(s_idx),
            "slots_after_object": float(len(plan.slots) - 1 - o_idx),
            "slots_between_refs": float(hi - lo - 1),
            "doc_rank_max": rank_stats["max"],
            "doc_rank_min": rank_stats["min"],
            "doc_rank_avg": rank_stats["avg"],
            "doc_rank_total": rank_stats["total"],
            "doc_rank_std": rank_stats["std"],
            "source_doc_count": float(len({d for _q, d in doc_records})),
        }

    # assembly ---------------------------------------------------------------------------

    def raw_features(self, candidate: PlanCandidate,
                     relation_tokens: tuple[str, ...],
                     scorer: "SentenceScorer") -> dict[str, float]:
        values: dict[str, float] = {}
        productivity = self._productivity_values(candidate)
        for variant in PRODUCTIVITY_VARIANTS:
            stats = _stats(productivity[variant])
            for s in STATS:
                values[f"productivity_{variant}_{s}"] = stats[s]
        prominence = self._prominence(candidate)
        for variant in PRODUCTIVITY_VARIANTS:
            values[f"prominence_{variant}"] = prominence[variant]
        pmi = self._pmi_values(candidate)
        for variant, _a, _b in PMI_VARIANTS:
            stats = _stats(pmi[variant])
            for s in STATS:
                values[f"pmi_{variant}_{s}"] = stats[s]
        token_values = self._token_values(candidate, relation_tokens)
        for variant in TOKEN_VARIANTS:
            stats = _stats(token_values[variant])
            for s in STATS:
                values[f"{variant}_{s}"] = stats[s]
        grammar = _stats(self._grammar_values(candidate, scorer))
        for s in GRAMMAR_STATS:
            values[f"grammar_{s}"] = grammar[s]
        values.update(self._misc_values(candidate))
        assert len(values) == 251
        return values


# -- sentence scorer -------------------------------------------------------------------------


class SentenceScorer:
    """Average-log-probability trigram model over a corpus group; stands in
    for a parser's confidence score."""

    def __init__(self, store: CorpusStore, group: str, order: int = 3):
        self.order = order
        self.context_counts: Counter = Counter()
        self.continuations: Counter = Counter()
        vocabulary: set[str] = set()
        sentences = store.sentences(group) if group in store.groups() else []
        for occ in sentences:
            words = [t.surface.lower() for t in occ.sentence.tokens]
            vocabulary.update(words)
            padded = ["<s>"] * (order - 1) + words + ["</s>"]
            for i in range(order - 1, len(padded)):
                context = tuple(padded[i - order + 1: i])
                self.context_counts[context] += 1
                self.continuations[context + (padded[i],)] += 1
        self.vocabulary_size = max(len(vocabulary) + 1, 2)

    def score(self, tokens: list[str]) -> float:
        """Sum of add-one smoothed trigram log-probabilities."""
        words = [t.lower() for t in tokens]
        padded = ["<s>"] * (self.order - 1) + words + ["</s>"]
        total = 0.0
        for i in range(self.order - 1, len(padded)):
            context = tuple(padded[i - self.order + 1: i])
            num = self.continuations.get(context + (padded[i],), 0) + 1
            den = self.context_counts.get(context, 0) + self.vocabulary_size
            total += math.log(num / den)
        return total


# -- normalization and vector assembly ----------------------------------------------------------


def normalize_features(rows: list[dict[str, float]]) -> list[dict[str, float]]:
    """Min-max scale each non-boolean feature over the candidate set of one
    relation; constant features collapse to 0."""
    if not rows:
        return []
    out = [dict(r) for r in rows]
    for name in FEATURE_NAMES:
        if name in BOOLEAN_FEATURES:
            continue
        values = [r[name] for r in rows]
        lo, hi = min(values), max(values)
        span = hi - lo
        for r in out:
            r[name] = (r[name] - lo) / span if span > 0 else 0.0
    return out


def compute_relation_features(
    extraction: RelationExtraction,
    store: CorpusStore,
    relation_tokens: tuple[str, ...],
    scorer: SentenceScorer | None = None,
    normalize: bool = True,
) -> dict[str, dict[str, float]]:
    """Feature vectors for every candidate of a relation, keyed by plan id."""
    scorer = scorer or SentenceScorer(store, extraction.group)
    extractor = FeatureExtractor(extraction, store)
    raw = {
        cand.pid: extractor.raw_features(cand, relation_tokens, scorer)
        for cand in extraction.candidates
    }
    if not normalize:
        return raw
    pids = sorted(raw)
    rows = normalize_features([raw[p] for p in pids])
    return {pid: row for pid, row in zip(pids, rows)}
