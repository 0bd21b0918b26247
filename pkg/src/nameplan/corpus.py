"""Offline annotated-corpus store: ingestion, boolean/phrase search, tf-idf.

Stands in for a web search engine: documents arrive pre-parsed and carry the
search-result rank they were retrieved at. One store holds many groups; a
group is the document collection retrieved for one entity or one relation,
and idf statistics never cross groups.

File format (UTF-8, `#` comments):

    doc <doc_id> <query_id> <rank>
    sent wellformed=1 [score=<real>]
    tok surface/POS/lemma surface/POS/lemma ...
    np NP(start,end,base) ...
    dep label(head,dep) ...

`np` and `dep` lines are optional and may repeat; spans are 0-based
half-open; dependency labels are subj, obj, prepcomp, poss, det, amod, other.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field

from .text import content_stems, normalize_token

DEP_LABELS = ("subj", "obj", "prepcomp", "poss", "det", "amod", "other")


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class AnnotatedToken:
    surface: str
    pos: str
    lemma: str
    stem: str


@dataclass
class AnnotatedSentence:
    tokens: list[AnnotatedToken]
    np_spans: list[tuple[int, int, bool]] = field(default_factory=list)
    dependencies: list[tuple[int, int, str]] = field(default_factory=list)  # (head, dep, label)
    well_formed: bool = True
    parse_score: float | None = None

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def stems(self) -> set[str]:
        return {t.stem for t in self.tokens}


@dataclass
class DocumentRecord:
    doc_id: str
    query_id: str
    rank: int
    sentences: list[AnnotatedSentence] = field(default_factory=list)

    @property
    def key(self) -> tuple[str, str]:
        return (self.query_id, self.doc_id)


@dataclass(frozen=True)
class SentenceOcc:
    """One sentence occurrence inside a document of a group."""

    group: str
    doc: DocumentRecord
    index: int

    @property
    def sentence(self) -> AnnotatedSentence:
        return self.doc.sentences[self.index]

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.doc.query_id, self.doc.doc_id, self.index)


class _Group:
    def __init__(self):
        self.documents: list[DocumentRecord] = []
        self.frozen = False
        self.df: Counter[str] = Counter()
        self.doc_count = 0


class CorpusStore:
    def __init__(self, max_docs_per_query: int = 10):
        self.max_docs_per_query = max_docs_per_query
        self._groups: dict[str, _Group] = {}

    # -- ingestion ----------------------------------------------------------

    def ingest(self, path: str, group: str) -> int:
        """Parse a corpus file into `group`; returns documents added."""
        grp = self._groups.setdefault(group, _Group())
        if grp.frozen:
            raise CorpusError(f"group {group!r} is frozen")
        docs = _parse_corpus_file(path)
        seen = {d.key for d in grp.documents}
        for doc in docs:
            if doc.key in seen:
                raise CorpusError(
                    f"{path}: duplicate doc_id {doc.doc_id!r} for query {doc.query_id!r}"
                )
            seen.add(doc.key)
        grp.documents.extend(docs)
        return len(docs)

    def _freeze(self, group: str) -> _Group:
        grp = self._groups.get(group)
        if grp is None:
            grp = self._groups[group] = _Group()
        if grp.frozen:
            return grp
        per_query: dict[str, list[DocumentRecord]] = {}
        for doc in grp.documents:
            per_query.setdefault(doc.query_id, []).append(doc)
        kept: list[DocumentRecord] = []
        for qid in per_query:
            ordered = sorted(per_query[qid], key=lambda d: (d.rank, d.doc_id))
            kept.extend(ordered[: self.max_docs_per_query])
        kept.sort(key=lambda d: (d.rank, d.query_id, d.doc_id))
        grp.documents = kept
        # document frequencies over distinct pages (doc_id)
        page_stems: dict[str, set[str]] = {}
        for doc in kept:
            stems = page_stems.setdefault(doc.doc_id, set())
            for sent in doc.sentences:
                stems.update(content_stems(sent.surfaces()))
        grp.df = Counter()
        for stems in page_stems.values():
            grp.df.update(stems)
        grp.doc_count = len(page_stems)
        grp.frozen = True
        return grp

    # -- access -------------------------------------------------------------

    def groups(self) -> list[str]:
        return sorted(self._groups)

    def documents(self, group: str) -> list[DocumentRecord]:
        return list(self._freeze(group).documents)

    def sentences(self, group: str) -> list[SentenceOcc]:
        out = []
        for doc in self._freeze(group).documents:
            for i in range(len(doc.sentences)):
                out.append(SentenceOcc(group, doc, i))
        return out

    # -- search -------------------------------------------------------------

    def boolean_search(self, terms: list[str], group: str) -> list[DocumentRecord]:
        """Documents whose stems contain every query term's stem, by rank."""
        if not terms:
            raise CorpusError("boolean_search requires at least one term")
        wanted = {normalize_token(t) for t in terms}
        hits = []
        for doc in self._freeze(group).documents:
            stems: set[str] = set()
            for sent in doc.sentences:
                stems.update(sent.stems())
            if wanted <= stems:
                hits.append(doc)
        return hits

    def phrase_sentences(self, tokens: list[str], group: str) -> list[SentenceOcc]:
        """Sentence occurrences containing `tokens` contiguously (case-insensitive)."""
        if not tokens:
            raise CorpusError("phrase search requires at least one token")
        needle = [t.lower() for t in tokens]
        out = []
        for occ in self.sentences(group):
            hay = [t.surface.lower() for t in occ.sentence.tokens]
            n = len(needle)
            if any(hay[i : i + n] == needle for i in range(len(hay) - n + 1)):
                out.append(occ)
        return out

    def phrase_search(self, tokens: list[str], group: str) -> int:
        """Number of distinct pages containing the exact phrase."""
        return len({occ.doc.doc_id for occ in self.phrase_sentences(tokens, group)})

    def candidate_sentences(
        self, names: list[tuple[str, ...]], group: str, mode: str = "any"
    ) -> list[SentenceOcc]:
        """Sentences whose stems overlap the given names.

        mode="any": at least one stemmed word shared with any name.
        mode="each": at least one stemmed word shared with every name.
        """
        if not names:
            raise CorpusError("candidate_sentences requires at least one name")
        if mode not in ("any", "each"):
            raise CorpusError(f"unknown mode {mode!r}")
        name_stems = [{normalize_token(t) for t in name} for name in names]
        out = []
        for occ in self.sentences(group):
            stems = occ.sentence.stems()
            if mode == "any":
                ok = any(stems & ns for ns in name_stems)
            else:
                ok = all(stems & ns for ns in name_stems)
            if ok:
                out.append(occ)
        return out

    # -- tf-idf --------------------------------------------------------------

    def idf(self, stem: str, group: str) -> float:
        grp = self._freeze(group)
        return math.log((1 + grp.doc_count) / (1 + grp.df.get(stem, 0))) + 1.0

    def tfidf_vector(self, tokens: list[str] | tuple[str, ...], group: str) -> dict[str, float]:
        counts = Counter(content_stems(list(tokens)))
        return {s: tf * self.idf(s, group) for s, tf in sorted(counts.items())}

    def cosine(self, a: list[str] | tuple[str, ...], b: list[str] | tuple[str, ...], group: str) -> float:
        va = self.tfidf_vector(a, group)
        vb = self.tfidf_vector(b, group)
        dot = sum(w * vb.get(s, 0.0) for s, w in va.items())
        na = math.sqrt(sum(w * w for w in va.values()))
        nb = math.sqrt(sum(w * w for w in vb.values()))
        if na == 0.0 or nb == 0.0:
            return 0.0
        return dot / (na * nb)


# -- parsing ------------------------------------------------------------------

_NP_RE = re.compile(r"^NP\((\d+),(\d+),([01])\)$")
_DEP_RE = re.compile(r"^([a-z]+)\((\d+),(\d+)\)$")


def _parse_corpus_file(path: str) -> list[DocumentRecord]:
    docs: list[DocumentRecord] = []
    doc: DocumentRecord | None = None
    sent: AnnotatedSentence | None = None

    def err(lineno: int, msg: str):
        raise CorpusError(f"{path}:{lineno}: {msg}")

    def close_sentence(lineno: int):
        if sent is not None and not sent.tokens:
            err(lineno, "sentence has no tok line")

    lineno = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            kind = parts[0]
            if kind == "doc":
                close_sentence(lineno)
                if len(parts) != 4:
                    err(lineno, "doc expects <doc_id> <query_id> <rank>")
                try:
                    rank = int(parts[3])
                except ValueError:
                    err(lineno, f"bad rank {parts[3]!r}")
                if rank < 1:
                    err(lineno, "rank must be >= 1")
                doc = DocumentRecord(parts[1], parts[2], rank)
                docs.append(doc)
                sent = None
            elif kind == "sent":
                close_sentence(lineno)
                if doc is None:
                    err(lineno, "sent before any doc")
                well_formed = True
                score = None
                for opt in parts[1:]:
                    key, _, value = opt.partition("=")
                    if key == "wellformed":
                        well_formed = value == "1"
                    elif key == "score":
                        try:
                            score = float(value)
                        except ValueError:
                            err(lineno, f"bad score {value!r}")
                    else:
                        err(lineno, f"unknown sentence option {key!r}")
                sent = AnnotatedSentence([], well_formed=well_formed, parse_score=score)
                doc.sentences.append(sent)
            elif kind == "tok":
                if sent is None:
                    err(lineno, "tok before any sent")
                for spec in parts[1:]:
                    fields = spec.split("/")
                    if len(fields) != 3 or not fields[0]:
                        err(lineno, f"bad token {spec!r} (want surface/POS/lemma)")
                    surface, pos, lemma = fields
                    sent.tokens.append(
                        AnnotatedToken(surface, pos, lemma, normalize_token(surface))
                    )
            elif kind == "np":
                if sent is None:
                    err(lineno, "np before any sent")
                for spec in parts[1:]:
                    m = _NP_RE.match(spec)
                    if not m:
                        err(lineno, f"bad NP span {spec!r}")
                    start, end, base = int(m.group(1)), int(m.group(2)), m.group(3) == "1"
                    if not (0 <= start < end <= len(sent.tokens)):
                        err(lineno, f"NP span {spec!r} out of bounds")
                    sent.np_spans.append((start, end, base))
            elif kind == "dep":
                if sent is None:
                    err(lineno, "dep before any sent")
                seen = {(lab, d) for h, d, lab in sent.dependencies}
                for spec in parts[1:]:
                    m = _DEP_RE.match(spec)
                    if not m:
                        err(lineno, f"bad dependency {spec!r}")
                    label, head, dep = m.group(1), int(m.group(2)), int(m.group(3))
                    if label not in DEP_LABELS:
                        err(lineno, f"unknown dependency label {label!r}")
                    if not (0 <= head < len(sent.tokens) and 0 <= dep < len(sent.tokens)):
                        err(lineno, f"dependency {spec!r} out of bounds")
                    if (label, dep) in seen:
                        err(lineno, f"duplicate dependent {dep} for label {label!r}")
                    seen.add((label, dep))
                    sent.dependencies.append((head, dep, label))
            else:
                err(lineno, f"unknown record {kind!r}")
        close_sentence(lineno)
    return docs
