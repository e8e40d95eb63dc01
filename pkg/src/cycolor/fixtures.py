"""Access to bundled data files."""

from __future__ import annotations

from importlib import resources

from .configlang import ReductionPair, parse_reduction_file
from .planegraph import PlaneGraph, parse_graph


def data_text(name: str) -> str:
    return resources.files("cycolor.data").joinpath(name).read_text()


def eight0_text() -> str:
    """Verbatim reduction input certifying the EIGHT_0 family."""
    return data_text("eight0.txt")


def eight0_pair() -> ReductionPair:
    return parse_reduction_file(eight0_text())


def bundled_graph(name: str) -> PlaneGraph:
    return parse_graph(data_text(f"graphs/{name}.txt"))
