"""Ontology loading, message triples, identifier tokenization, hierarchy.

The input is a line-oriented triple format (see README): `class`,
`individual`, `subclass`, `equivalent`, `instance` and `fact` directives,
with `#` comments. Relations are declared implicitly by `fact` lines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

IS_A = "isA"
INSTANCE_OF = "instanceOf"
BUILTIN_RELATIONS = (IS_A, INSTANCE_OF)


class OntologyError(ValueError):
    pass


@dataclass(frozen=True)
class Identifier:
    raw: str
    label: str | None = None

    def __post_init__(self):
        if not self.raw:
            raise OntologyError("empty identifier")


@dataclass
class Entity:
    id: Identifier
    kind: str  # "class" | "individual"
    parents: list[str] = field(default_factory=list)
    equivalents: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class Relation:
    id: Identifier


@dataclass(frozen=True)
class MessageTriple:
    s: str
    r: str  # relation id, or a builtin relation name
    o: str


@dataclass(frozen=True)
class TokenizedName:
    tokens: tuple[str, ...]
    source: str = "primary"  # primary|shortened|ancestor-appended|number-stripped|bracket-part

    def text(self) -> str:
        return " ".join(self.tokens)


_CAMEL_RE = re.compile(
    r"[A-Z]+(?=[A-Z][a-z])|[A-Z][a-z]+|[A-Z]+|[a-z]+|[0-9]+|[()]"
)


def tokenize_identifier(ident: Identifier) -> TokenizedName:
    """Tokenize an identifier (or its label when present).

    CamelCase, underscores, hyphens and digit runs split into separate
    tokens; bracket characters become their own tokens so bracketed label
    parts stay recoverable.
    """
    if ident.label is not None:
        text = ident.label
    else:
        text = ident.raw.lstrip(":")
    text = text.replace("_", " ").replace("-", " ")
    tokens: list[str] = []
    for chunk in text.split():
        tokens.extend(_CAMEL_RE.findall(chunk))
    return TokenizedName(tuple(tokens))


class Ontology:
    def __init__(self):
        self.entities: dict[str, Entity] = {}
        self.relations: dict[str, Relation] = {}
        self.facts: list[MessageTriple] = []
        self._labels: dict[str, str] = {}

    # -- access -----------------------------------------------------------

    def entity(self, eid: str) -> Entity:
        try:
            return self.entities[eid]
        except KeyError:
            raise OntologyError(f"unknown entity {eid!r}") from None

    def identifier(self, name: str) -> Identifier:
        return Identifier(name, self._labels.get(name))

    def token_name(self, name: str) -> TokenizedName:
        return tokenize_identifier(self.identifier(name))

    def all_triples(self) -> list[MessageTriple]:
        triples = list(self.facts)
        for eid in sorted(self.entities):
            ent = self.entities[eid]
            rel = IS_A if ent.kind == "class" else INSTANCE_OF
            for parent in ent.parents:
                triples.append(MessageTriple(eid, rel, parent))
        return triples

    def triples_about(self, eid: str) -> list[MessageTriple]:
        self.entity(eid)
        return [t for t in self.all_triples() if t.s == eid]

    def triples_of_relation(self, rid: str) -> list[MessageTriple]:
        return [t for t in self.all_triples() if t.r == rid]

    def ancestors_of(self, eid: str) -> list[str]:
        """Named ancestor classes of an entity, via parents and the parents
        of equivalent classes; equivalents of visited ancestors count as
        ancestors themselves. Never contains the entity."""
        start = self.entity(eid)
        seen: set[str] = set()
        frontier: list[str] = []

        def expand(ent: Entity, include_self_equivalents: bool):
            frontier.extend(ent.parents)
            for eq in ent.equivalents:
                if include_self_equivalents:
                    frontier.append(eq)
                if eq in self.entities:
                    frontier.extend(self.entities[eq].parents)

        expand(start, include_self_equivalents=False)
        while frontier:
            name = frontier.pop()
            if name == eid or name in seen or name not in self.entities:
                continue
            seen.add(name)
            expand(self.entities[name], include_self_equivalents=True)
        return sorted(seen)

    # -- validation ---------------------------------------------------------

    def _check_cycles(self):
        WHITE, GREY, BLACK = 0, 1, 2
        color = {eid: WHITE for eid in self.entities}

        def visit(eid: str, trail: list[str]):
            color[eid] = GREY
            for parent in self.entities[eid].parents:
                if color.get(parent) == GREY:
                    cycle = " -> ".join(trail + [eid, parent])
                    raise OntologyError(f"hierarchy cycle: {cycle}")
                if color.get(parent) == WHITE:
                    visit(parent, trail + [eid])
            color[eid] = BLACK

        for eid in sorted(self.entities):
            if color[eid] == WHITE:
                visit(eid, [])

    def validate(self):
        if not self.entities:
            raise OntologyError("no entities")
        for eid, ent in self.entities.items():
            for ref in ent.parents + ent.equivalents:
                target = self.entities.get(ref)
                if target is None:
                    raise OntologyError(f"{eid}: dangling reference {ref!r}")
                if target.kind != "class":
                    raise OntologyError(f"{eid}: {ref!r} is not a class")
        for t in self.facts:
            for ref in (t.s, t.o):
                if ref not in self.entities:
                    raise OntologyError(f"fact references unknown entity {ref!r}")
        self._check_cycles()


def load_ontology(path: str) -> Ontology:
    onto = Ontology()
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()

    def err(lineno: int, msg: str):
        raise OntologyError(f"{path}:{lineno}: {msg}")

    label_re = re.compile(r'^(\S+)(?:\s+label\s+"([^"]*)")?\s*$')

    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        directive, rest = parts[0], (parts[1] if len(parts) > 1 else "")
        if directive in ("class", "individual"):
            m = label_re.match(rest)
            if not m:
                err(lineno, f"cannot parse {directive} declaration")
            name, label = m.group(1), m.group(2)
            if name in onto.entities:
                err(lineno, f"duplicate declaration of {name}")
            onto.entities[name] = Entity(Identifier(name, label), directive)
            if label is not None:
                onto._labels[name] = label
        elif directive in ("subclass", "instance", "equivalent"):
            refs = rest.split()
            if len(refs) != 2:
                err(lineno, f"{directive} expects two identifiers")
            child, parent = refs
            if child not in onto.entities:
                err(lineno, f"undeclared entity {child!r}")
            if directive == "equivalent":
                onto.entities[child].equivalents.append(parent)
            else:
                expected = "class" if directive == "subclass" else "individual"
                if onto.entities[child].kind != expected:
                    err(lineno, f"{directive} used on a {onto.entities[child].kind}")
                onto.entities[child].parents.append(parent)
        elif directive == "fact":
            refs = rest.split()
            if len(refs) != 3:
                err(lineno, "fact expects <S> <R> <O>")
            s, r, o = refs
            onto.facts.append(MessageTriple(s, r, o))
            if r not in onto.relations:
                onto.relations[r] = Relation(Identifier(r))
        else:
            err(lineno, f"unknown directive {directive!r}")

    try:
        onto.validate()
    except OntologyError as exc:
        raise OntologyError(f"{path}: {exc}") from None
    return onto
