"""Trace spaces, boundary subspaces and vertex-compatible edge maps.

The trace of a function on a metric graph collects its values at both ends
of every edge.  For fibre dimension ``r`` the trace space has dimension
``2 r |E|``; coordinates are laid out edge by edge, start value before end
value, in graph edge order.  A boundary condition for the first order
operator ``i d/dx`` is a linear subspace of this trace space, and the
questions answered here are linear algebra: dimension counts, adjoint
subspaces with respect to the boundary pairing, locality at vertices, and
reconstruction of a vertex-compatible edge map whose graph realizes a given
self-adjoint condition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .graph import MetricGraph, is_eulerian_components

# Refusal reasons reported by self_adjointness_witness, in check order.
REASON_NOT_LOCAL = "not local"
REASON_NOT_EULERIAN = "graph not Eulerian"
REASON_DIMENSION = "dim != |E|"
REASON_NOT_SELF_ADJOINT = "B != B^ad"


@dataclass(frozen=True)
class TraceSpace:
    """Coordinate bookkeeping for boundary values on a metric graph.

    For each edge ``r`` start components come first, then ``r`` end
    components; edges follow graph order.  All embeddings and projections
    between the edge value space (dimension ``r |E|``) and the trace space
    (dimension ``2 r |E|``) are defined here so index conventions live in a
    single place.
    """

    graph: MetricGraph
    rank: int = 1

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("fibre rank must be positive")

    @property
    def dim(self) -> int:
        return 2 * self.rank * self.graph.n_edges

    @property
    def edge_dim(self) -> int:
        return self.rank * self.graph.n_edges

    def start_slice(self, edge_index: int) -> slice:
        base = 2 * self.rank * edge_index
        return slice(base, base + self.rank)

    def end_slice(self, edge_index: int) -> slice:
        base = 2 * self.rank * edge_index + self.rank
        return slice(base, base + self.rank)

    def _start_indices(self) -> np.ndarray:
        r, n = self.rank, self.graph.n_edges
        return (2 * r * np.arange(n)[:, None] + np.arange(r)[None, :]).ravel()

    def _end_indices(self) -> np.ndarray:
        return self._start_indices() + self.rank

    def embed_start(self, values: np.ndarray) -> np.ndarray:
        """Edge values as a trace vector supported on start components."""
        values = np.asarray(values, dtype=complex)
        out = np.zeros(values.shape[:-1] + (self.dim,), dtype=complex)
        out[..., self._start_indices()] = values
        return out

    def embed_end(self, values: np.ndarray) -> np.ndarray:
        """Edge values as a trace vector supported on end components."""
        values = np.asarray(values, dtype=complex)
        out = np.zeros(values.shape[:-1] + (self.dim,), dtype=complex)
        out[..., self._end_indices()] = values
        return out

    def project_start(self, trace: np.ndarray) -> np.ndarray:
        return np.asarray(trace, dtype=complex)[self._start_indices()]

    def project_end(self, trace: np.ndarray) -> np.ndarray:
        return np.asarray(trace, dtype=complex)[self._end_indices()]

    def vertex_coordinates(self, vertex_id: str) -> np.ndarray:
        """Trace coordinates attached to one vertex.

        Start components of edges leaving the vertex plus end components of
        edges arriving at it.  A loop contributes both of its blocks.
        """
        idx: list[int] = []
        for ei in self.graph.out_edges(vertex_id):
            s = self.start_slice(ei)
            idx.extend(range(s.start, s.stop))
        for ei in self.graph.in_edges(vertex_id):
            s = self.end_slice(ei)
            idx.extend(range(s.start, s.stop))
        return np.array(sorted(idx), dtype=int)

    def constant_trace_matrix(self) -> np.ndarray:
        """Matrix sending edge values ``w`` to the trace of the piecewise constant ``w``.

        Column ``j`` is the trace vector with the value 1 at both ends of
        edge ``j`` (per fibre component).
        """
        m = np.zeros((self.dim, self.edge_dim), dtype=complex)
        cols = np.arange(self.edge_dim)
        m[self._start_indices(), cols] = 1.0
        m[self._end_indices(), cols] = 1.0
        return m


@dataclass(frozen=True)
class TraceVector:
    """One element of a trace space, with per-edge accessors."""

    space: TraceSpace
    data: np.ndarray

    def start_part(self, edge_id: str) -> np.ndarray:
        ei = self.space.graph.edge_index(edge_id)
        return self.data[self.space.start_slice(ei)]

    def end_part(self, edge_id: str) -> np.ndarray:
        ei = self.space.graph.edge_index(edge_id)
        return self.data[self.space.end_slice(ei)]


class BoundarySubspace:
    """Subspace of a trace space, stored as a column basis."""

    def __init__(self, space: TraceSpace, basis: np.ndarray, rtol: float = linalg.RANK_RTOL):
        basis = np.asarray(basis, dtype=complex)
        if basis.ndim == 1:
            basis = basis[:, None]
        if basis.size == 0:
            basis = basis.reshape(space.dim, 0)
        if basis.shape[0] != space.dim:
            raise ValueError(
                f"basis has ambient dimension {basis.shape[0]}, expected {space.dim}"
            )
        if linalg.numeric_rank(basis, rtol) != basis.shape[1]:
            raise ValueError("basis columns are linearly dependent")
        self.space = space
        self.matrix = basis
        self._ortho: np.ndarray | None = None

    @classmethod
    def zero(cls, space: TraceSpace) -> "BoundarySubspace":
        return cls(space, np.zeros((space.dim, 0), dtype=complex))

    @classmethod
    def full(cls, space: TraceSpace) -> "BoundarySubspace":
        return cls(space, np.eye(space.dim, dtype=complex))

    @classmethod
    def span(cls, space: TraceSpace, vectors) -> "BoundarySubspace":
        cols = [np.asarray(v, dtype=complex) for v in vectors]
        if not cols:
            return cls.zero(space)
        return cls(space, np.stack(cols, axis=1))

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def orthonormal_basis(self) -> np.ndarray:
        if self._ortho is None:
            self._ortho = linalg.orthonormal_columns(self.matrix)
        return self._ortho

    def contains(self, vector: np.ndarray, tol: float = linalg.SUBSPACE_TOL) -> bool:
        v = np.asarray(vector, dtype=complex)
        nv = np.linalg.norm(v)
        if nv == 0:
            return True
        q = self.orthonormal_basis()
        resid = v - q @ (q.conj().T @ v)
        return bool(np.linalg.norm(resid) <= tol * nv)

    def equals(self, other: "BoundarySubspace", rtol: float = linalg.SUBSPACE_TOL) -> bool:
        return linalg.spans_equal(self.matrix, other.matrix, rtol)

    def distance(self, other: "BoundarySubspace") -> float:
        """Spectral norm distance of the orthogonal projectors."""
        return linalg.span_distance(self.matrix, other.matrix)

    def __repr__(self) -> str:  # pragma: no cover
        return f"BoundarySubspace(dim={self.dim}, ambient={self.space.dim})"


class TraceForm:
    """Boundary pairing data of a first order operator.

    ``start_blocks[e]`` and ``end_blocks[e]`` are the ``r x r`` matrices the
    pairing applies to the start and end components of edge ``e``; for the
    scalar operator ``i d/dx`` they are ``-i`` and ``+i``.  Blocks must be
    invertible.
    """

    def __init__(self, space: TraceSpace, start_blocks, end_blocks):
        r = space.rank
        n = space.graph.n_edges
        self.space = space
        self.start_blocks = [np.atleast_2d(np.asarray(b, dtype=complex)) for b in start_blocks]
        self.end_blocks = [np.atleast_2d(np.asarray(b, dtype=complex)) for b in end_blocks]
        if len(self.start_blocks) != n or len(self.end_blocks) != n:
            raise ValueError("need one block per edge and per side")
        for b in self.start_blocks + self.end_blocks:
            if b.shape != (r, r):
                raise ValueError(f"block shape {b.shape} does not match fibre rank {r}")
            if linalg.numeric_rank(b) < r:
                raise ValueError("singular boundary pairing block")

    @classmethod
    def scalar_dirac(cls, space: TraceSpace) -> "TraceForm":
        """Pairing of ``i d/dx``: ``-i`` on start components, ``+i`` on ends."""
        if space.rank != 1:
            raise ValueError("scalar pairing needs fibre rank 1")
        n = space.graph.n_edges
        return cls(space, [-1j] * n, [1j] * n)

    def matrix(self) -> np.ndarray:
        m = np.zeros((self.space.dim, self.space.dim), dtype=complex)
        for ei in range(self.space.graph.n_edges):
            s, t = self.space.start_slice(ei), self.space.end_slice(ei)
            m[s, s] = self.start_blocks[ei]
            m[t, t] = self.end_blocks[ei]
        return m

    def apply(self, vectors: np.ndarray) -> np.ndarray:
        return self.matrix() @ np.asarray(vectors, dtype=complex)


class GEndomorphism:
    """Edge space map compatible with the vertex structure of a graph.

    The matrix acts on edge values; entry ``(e, f)`` may be nonzero only when
    edge ``f`` ends where edge ``e`` starts, so the map sends values on edges
    arriving at a vertex to values on edges leaving it.  Rows index targets,
    columns index sources, both in graph edge order.
    """

    def __init__(self, graph: MetricGraph, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=complex)
        n = graph.n_edges
        if matrix.shape != (n, n):
            raise ValueError(f"matrix shape {matrix.shape} does not match {n} edges")
        support = self.allowed_support(graph)
        bad = np.nonzero(~support & (matrix != 0))
        if bad[0].size:
            i, j = int(bad[0][0]), int(bad[1][0])
            raise ValueError(
                f"entry ({graph.edges[i].id!r}, {graph.edges[j].id!r}) is nonzero but "
                f"edge {graph.edges[j].id!r} does not end where {graph.edges[i].id!r} starts"
            )
        self.graph = graph
        self.matrix = matrix

    @staticmethod
    def allowed_support(graph: MetricGraph) -> np.ndarray:
        """Boolean mask of admissible entries: target starts where source ends."""
        tails = np.array([graph.vertex_index(e.tail) for e in graph.edges])
        heads = np.array([graph.vertex_index(e.head) for e in graph.edges])
        return tails[:, None] == heads[None, :]

    @classmethod
    def cleaned(cls, graph: MetricGraph, matrix: np.ndarray, atol: float) -> "GEndomorphism":
        """Construct after zeroing entries with magnitude at most ``atol``."""
        matrix = np.asarray(matrix, dtype=complex).copy()
        matrix[np.abs(matrix) <= atol] = 0.0
        return cls(graph, matrix)

    @property
    def n_edges(self) -> int:
        return self.graph.n_edges

    def __repr__(self) -> str:  # pragma: no cover
        return f"GEndomorphism(on {self.graph!r})"


def is_unitary(a: GEndomorphism, tol: float = 1e-10) -> bool:
    """Whether ``A* A = 1`` up to ``tol`` in the entrywise maximum norm."""
    n = a.n_edges
    gram = a.matrix.conj().T @ a.matrix - np.eye(n)
    return bool(np.max(np.abs(gram), initial=0.0) <= tol)


def graph_of(a: GEndomorphism, space: TraceSpace | None = None) -> BoundarySubspace:
    """Boundary subspace ``{end values x, start values A x}`` of an edge map.

    Always local, always of dimension ``|E|``.  Basis column ``j`` places a 1
    in the end slot of edge ``j`` and distributes column ``j`` of the matrix
    over the start slots.
    """
    if space is None:
        space = TraceSpace(a.graph, 1)
    if space.rank != 1 or space.graph is not a.graph:
        raise ValueError("trace space must be the rank 1 space of the map's graph")
    basis = space.embed_end(np.eye(a.n_edges, dtype=complex)).T
    basis += space.embed_start(a.matrix.T).T
    return BoundarySubspace(space, basis)


def endomorphism_from_subspace(b: BoundarySubspace) -> GEndomorphism | None:
    """Edge map whose graph is ``b``, or ``None`` when no such map exists.

    Requires dimension ``|E|`` with the end projections of a basis
    invertible; the candidate map is then "end values to start values".
    Vertex compatibility of the result and a final span comparison guard
    against subspaces that merely look like graphs.
    """
    space = b.space
    if space.rank != 1:
        raise ValueError("edge map recovery needs fibre rank 1")
    n = space.graph.n_edges
    if b.dim != n:
        return None
    if n == 0:
        return GEndomorphism(space.graph, np.zeros((0, 0)))
    ends = np.stack([space.project_end(col) for col in b.matrix.T], axis=1)
    starts = np.stack([space.project_start(col) for col in b.matrix.T], axis=1)
    if linalg.numeric_rank(ends, 1e-10) < n:
        return None
    a = starts @ np.linalg.inv(ends)
    scale = np.max(np.abs(a), initial=1.0)
    try:
        endo = GEndomorphism.cleaned(space.graph, a, 1e-9 * scale)
    except ValueError:
        return None
    if not graph_of(endo, space).equals(b):
        return None
    return endo


def local_decomposition(
    b: BoundarySubspace, rtol: float = linalg.RANK_RTOL
) -> dict[str, np.ndarray] | None:
    """Per-vertex blocks of a local subspace, or ``None`` when not local.

    A subspace is local when it is the direct sum of its intersections with
    the per-vertex coordinate blocks.  Each intersection is computed as the
    part of the subspace vanishing outside one vertex block; the subspace is
    local exactly when the block dimensions add up to its dimension.  Blocks
    are returned as ambient column bases keyed by vertex, zero blocks
    omitted.
    """
    space = b.space
    blocks: dict[str, np.ndarray] = {}
    total = 0
    all_idx = np.arange(space.dim)
    for v in space.graph.vertices:
        coords = space.vertex_coordinates(v)
        outside = np.setdiff1d(all_idx, coords)
        coeffs = linalg.null_space(b.matrix[outside, :], rtol)
        k = coeffs.shape[1]
        if k:
            blocks[v] = b.matrix @ coeffs
        total += k
    return blocks if total == b.dim else None


def is_local(b: BoundarySubspace, rtol: float = linalg.RANK_RTOL) -> bool:
    return local_decomposition(b, rtol) is not None


def adjoint_condition(b: BoundarySubspace, form: TraceForm | None = None) -> BoundarySubspace:
    """Subspace of traces pairing to zero with every element of ``b``.

    With the pairing matrix ``S`` this is the orthogonal complement of
    ``S b``; its dimension is the ambient dimension minus ``dim b``.  A
    subspace equal to its adjoint condition describes a self-adjoint
    realization of the underlying formally self-adjoint operator.
    """
    if form is None:
        form = TraceForm.scalar_dirac(b.space)
    if form.space.dim != b.space.dim:
        raise ValueError("pairing and subspace live on different trace spaces")
    paired = form.matrix() @ b.matrix
    basis = linalg.null_space(paired.conj().T)
    return BoundarySubspace(b.space, basis)


def index(b: BoundarySubspace) -> int:
    """Fredholm index of the realization with boundary condition ``b``.

    Equals ``dim b`` minus ``r |E|`` regardless of edge lengths or the
    detailed shape of the subspace.
    """
    return b.dim - b.space.edge_dim


def scalar_kernel_dim(b: BoundarySubspace, rtol: float = linalg.RANK_RTOL) -> int:
    """Dimension of the kernel of the scalar operator ``i d/dx`` under ``b``.

    Kernel elements are constant on every edge, so the kernel is the
    intersection of ``b`` with the span of constant traces.
    """
    if b.space.rank != 1:
        raise ValueError("scalar kernel needs fibre rank 1")
    constants = b.space.constant_trace_matrix()
    return linalg.intersection_dim(constants, b.matrix, rtol)


def scalar_cokernel_dim(
    b: BoundarySubspace,
    form: TraceForm | None = None,
    rtol: float = linalg.RANK_RTOL,
) -> int:
    """Cokernel dimension, computed as the kernel under the adjoint condition."""
    return scalar_kernel_dim(adjoint_condition(b, form), rtol)


@dataclass(frozen=True)
class WitnessResult:
    """Outcome of the self-adjointness check: an edge map or a refusal reason."""

    endomorphism: GEndomorphism | None
    reason: str | None = None

    @property
    def ok(self) -> bool:
        return self.endomorphism is not None


def self_adjointness_witness(
    b: BoundarySubspace,
    form: TraceForm | None = None,
    subspace_tol: float = linalg.SUBSPACE_TOL,
) -> WitnessResult:
    """Certify a local boundary condition as self-adjoint by an explicit unitary.

    A local condition for the scalar operator ``i d/dx`` is self-adjoint
    exactly when it is the graph of a unitary vertex-compatible edge map.
    The construction restricts a basis to its end components, orthonormalizes
    them by QR (they are independent whenever the condition equals its
    adjoint condition), and reads the map off as "end components to start
    components".  Refusals, in check order: the subspace is not local, the
    graph has a degree imbalance (no closed trail through all edges, hence
    no vertex-compatible unitary exists), the dimension differs from the
    edge count, or the condition differs from its adjoint condition.
    """
    space = b.space
    if space.rank != 1:
        raise ValueError("witness construction needs fibre rank 1")
    if form is None:
        form = TraceForm.scalar_dirac(space)
    n = space.graph.n_edges

    if local_decomposition(b) is None:
        return WitnessResult(None, REASON_NOT_LOCAL)
    if not is_eulerian_components(space.graph):
        return WitnessResult(None, REASON_NOT_EULERIAN)
    if b.dim != n:
        return WitnessResult(None, REASON_DIMENSION)
    if not b.equals(adjoint_condition(b, form), subspace_tol):
        return WitnessResult(None, REASON_NOT_SELF_ADJOINT)

    ends = np.stack([space.project_end(col) for col in b.matrix.T], axis=1)
    starts = np.stack([space.project_start(col) for col in b.matrix.T], axis=1)
    q, r = np.linalg.qr(ends)
    # Self-adjointness guarantees the end projections are independent; a
    # failure here means the subspace equality above passed on noise.
    if np.min(np.abs(np.diag(r))) <= 1e-12 * np.max(np.abs(np.diag(r))):
        return WitnessResult(None, REASON_NOT_SELF_ADJOINT)
    a = starts @ np.linalg.solve(r, q.conj().T)
    scale = np.max(np.abs(a), initial=1.0)
    endo = GEndomorphism.cleaned(space.graph, a, 1e-10 * scale)
    return WitnessResult(endo, None)
