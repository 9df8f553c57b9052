"""Small named graph families used throughout the tests and docs."""

from __future__ import annotations

from .graph import Edge, MetricGraph


def rose(n: int, length: float = 1.0) -> MetricGraph:
    """``n`` directed loops attached to a single vertex."""
    if n < 0:
        raise ValueError("loop count must be nonnegative")
    edges = [Edge(f"e{i + 1}", "v", "v", length) for i in range(n)]
    return MetricGraph(["v"] if n else [], edges)


def directed_cycle(n: int, lengths=None) -> MetricGraph:
    """Directed cycle on ``n`` vertices; ``n = 1`` is a single loop."""
    if n < 1:
        raise ValueError("cycle needs at least one edge")
    if lengths is None:
        lengths = [1.0] * n
    if len(lengths) != n:
        raise ValueError("need one length per edge")
    vertices = [f"v{i + 1}" for i in range(n)]
    edges = [
        Edge(f"e{i + 1}", vertices[i], vertices[(i + 1) % n], float(lengths[i]))
        for i in range(n)
    ]
    return MetricGraph(vertices, edges)


def looped_dumbbell() -> MetricGraph:
    """Two vertices joined by a directed 2-cycle, with one loop on each vertex.

    Its collection-counting polynomial is ``t^4 - 2 t^3``; a second,
    structurally different 4-edge graph shares the same polynomial (see
    :data:`COSPECTRAL_MATE_COEFFS`), so the polynomial does not determine the
    graph.
    """
    edges = [
        Edge("a", "u", "u"),
        Edge("b", "w", "w"),
        Edge("c", "u", "w"),
        Edge("d", "w", "u"),
    ]
    return MetricGraph(["u", "w"], edges)


# Collection-counting polynomial of a known 4-edge companion graph of the
# looped dumbbell: identical coefficients t^4 - 2 t^3 (low degree first), even
# though the graphs differ.  Only the polynomial is reproducible here.
COSPECTRAL_MATE_COEFFS: tuple[int, ...] = (0, 0, 0, -2, 1)


def bidirected_triangle() -> MetricGraph:
    """Triangle with both orientations of every side: six edges, three vertices."""
    edges = [
        Edge("e12", "v1", "v2"),
        Edge("e21", "v2", "v1"),
        Edge("e23", "v2", "v3"),
        Edge("e32", "v3", "v2"),
        Edge("e31", "v3", "v1"),
        Edge("e13", "v1", "v3"),
    ]
    return MetricGraph(["v1", "v2", "v3"], edges)
