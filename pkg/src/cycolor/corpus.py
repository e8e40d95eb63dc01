"""Bundled plane graphs used for conservation and oracle regression tests.

Rotations were derived once from planar embeddings and are frozen here; the
build step re-validates them against Euler's formula on every construction.
"""

from __future__ import annotations

from typing import Callable, Dict

from .planegraph import PlaneGraph, build_plane_graph

_ROTATIONS = {
    "k4": [[1, 3, 2], [0, 2, 3], [1, 0, 3], [2, 0, 1]],
    "cube": [
        [4, 1, 2], [3, 0, 5], [6, 0, 3], [2, 1, 7],
        [0, 6, 5], [1, 4, 7], [4, 2, 7], [5, 6, 3],
    ],
    # hub is vertex 0
    "wheel5": [[1, 5, 4, 3, 2], [0, 2, 5], [1, 0, 3], [2, 0, 4], [3, 0, 5], [4, 0, 1]],
    "dodecahedron": [
        [1, 10, 19], [0, 2, 8], [1, 3, 6], [2, 19, 4], [3, 17, 5],
        [4, 15, 6], [5, 7, 2], [6, 14, 8], [7, 9, 1], [8, 13, 10],
        [9, 11, 0], [10, 12, 18], [11, 13, 16], [12, 9, 14], [13, 7, 15],
        [14, 5, 16], [15, 17, 12], [16, 4, 18], [17, 19, 11], [18, 3, 0],
    ],
    "pentagonal_prism": [
        [1, 5, 4], [0, 2, 6], [1, 3, 7], [2, 4, 8], [3, 0, 9],
        [9, 0, 6], [5, 1, 7], [6, 2, 8], [7, 3, 9], [4, 5, 8],
    ],
}


def k4() -> PlaneGraph:
    return build_plane_graph(_ROTATIONS["k4"])


def cube() -> PlaneGraph:
    return build_plane_graph(_ROTATIONS["cube"])


def wheel5() -> PlaneGraph:
    return build_plane_graph(_ROTATIONS["wheel5"])


def dodecahedron() -> PlaneGraph:
    return build_plane_graph(_ROTATIONS["dodecahedron"])


def pentagonal_prism() -> PlaneGraph:
    return build_plane_graph(_ROTATIONS["pentagonal_prism"])


BUILDERS: Dict[str, Callable[[], PlaneGraph]] = {
    "k4": k4,
    "cube": cube,
    "wheel5": wheel5,
    "dodecahedron": dodecahedron,
    "pentagonal_prism": pentagonal_prism,
}


def all_graphs() -> Dict[str, PlaneGraph]:
    return {name: make() for name, make in BUILDERS.items()}
