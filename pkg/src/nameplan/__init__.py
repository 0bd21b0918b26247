"""Toolkit that induces entity names and sentence plans for an ontology from
an offline annotated corpus, ranks the candidates, and supports a
human-in-the-loop review flow."""

__version__ = "0.1.0"
