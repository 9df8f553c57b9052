"""Multivariate characteristic polynomials of vertex-compatible edge maps.

For an edge map ``A`` on a graph with edges ``e_1 .. e_n`` the object of
interest is ``P_A(x) = det(diag(x_1, .., x_n) - A)``, a polynomial of degree
at most one in every variable.  Substituting ``x_e = exp(i lambda l_e)``
turns it into the secular function whose zeros are the eigenvalues of the
operator realization attached to ``A``; substituting ``x_e = z^{m_e}`` for
integer multipliers turns it into an ordinary polynomial.  Everything here
keeps the monomial structure exact: the determinant is expanded by a
memoized Laplace recursion, never by LU factorization, so integer inputs
produce integer coefficients without rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from .boundary import GEndomorphism
from .errors import EnumerationCapExceeded
from .graph import DEFAULT_EDGE_CAP, Edge, MetricGraph, Subgraph

# Relative size below which an accumulated coefficient is considered
# cancellation dust and dropped.
COEFF_CLEANUP = 1e-13


@dataclass(frozen=True)
class MultiPoly:
    """Polynomial of degree at most one per variable, one variable per edge.

    ``terms`` maps a bitmask over ``edge_ids`` (bit ``i`` set means the
    monomial contains the variable of edge ``i``) to a complex coefficient.
    """

    edge_ids: tuple[str, ...]
    terms: dict[int, complex] = field(default_factory=dict)

    @property
    def n_vars(self) -> int:
        return len(self.edge_ids)

    def cleaned(self, threshold: float = COEFF_CLEANUP) -> "MultiPoly":
        """Drop coefficients below ``threshold`` relative to the largest one."""
        if not self.terms:
            return self
        cut = threshold * max(1.0, max(abs(c) for c in self.terms.values()))
        kept = {m: c for m, c in self.terms.items() if abs(c) > cut}
        return MultiPoly(self.edge_ids, kept)

    def term_edge_sets(self) -> dict[frozenset[str], complex]:
        """Terms keyed by the set of edge ids appearing in the monomial."""
        out = {}
        for mask, c in self.terms.items():
            ids = frozenset(
                self.edge_ids[i] for i in range(self.n_vars) if mask >> i & 1
            )
            out[ids] = c
        return out

    @classmethod
    def from_edge_sets(cls, edge_ids, mapping) -> "MultiPoly":
        edge_ids = tuple(edge_ids)
        pos = {eid: i for i, eid in enumerate(edge_ids)}
        terms: dict[int, complex] = {}
        for ids, c in mapping.items():
            mask = 0
            for eid in ids:
                mask |= 1 << pos[eid]
            terms[mask] = terms.get(mask, 0.0) + complex(c)
        return cls(edge_ids, terms)

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        if self.edge_ids != other.edge_ids:
            raise ValueError("polynomials index different edge lists")
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0.0) + c
        return MultiPoly(self.edge_ids, terms)

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        """Product, defined only when no variable occurs in both factors."""
        if self.edge_ids != other.edge_ids:
            raise ValueError("polynomials index different edge lists")
        terms: dict[int, complex] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                if m1 & m2:
                    raise ValueError(
                        "product would exceed degree one in a shared variable"
                    )
                m = m1 | m2
                terms[m] = terms.get(m, 0.0) + c1 * c2
        return MultiPoly(self.edge_ids, terms)

    def scaled(self, factor: complex) -> "MultiPoly":
        return MultiPoly(self.edge_ids, {m: factor * c for m, c in self.terms.items()})

    def substitute_one(self, edge_id: str) -> "MultiPoly":
        """Set one variable to 1 and drop it from the variable list."""
        pos = self.edge_ids.index(edge_id)
        low = (1 << pos) - 1
        terms: dict[int, complex] = {}
        for mask, c in self.terms.items():
            new = (mask & low) | ((mask >> (pos + 1)) << pos)
            terms[new] = terms.get(new, 0.0) + c
        ids = self.edge_ids[:pos] + self.edge_ids[pos + 1 :]
        return MultiPoly(ids, terms)

    def evaluate_point(self, values) -> complex:
        """Evaluate at one complex value per edge (in ``edge_ids`` order)."""
        values = np.asarray(values, dtype=complex)
        total = 0.0 + 0.0j
        for mask, c in self.terms.items():
            prod = c
            m = mask
            while m:
                i = (m & -m).bit_length() - 1
                prod *= values[i]
                m &= m - 1
            total += prod
        return complex(total)


def char_poly(a: GEndomorphism, cap: int = DEFAULT_EDGE_CAP) -> MultiPoly:
    """Exact expansion of ``det(diag(x) - A)`` as a :class:`MultiPoly`.

    Laplace expansion along rows with memoization on the set of unused
    columns; the row being expanded is determined by that set, so the cost is
    of order ``2^n`` states.  Sums and products of matrix entries are the
    only arithmetic involved, hence integer matrices yield exactly integer
    coefficients.  The leading monomial ``x_1 .. x_n`` always has
    coefficient one.
    """
    n = a.n_edges
    if n > cap:
        raise EnumerationCapExceeded(
            f"determinant expansion over {n} edges exceeds the cap of {cap}"
        )
    mat = a.matrix
    memo: dict[int, dict[int, complex]] = {}

    def det(mask: int) -> dict[int, complex]:
        if mask == 0:
            return {0: 1.0 + 0.0j}
        cached = memo.get(mask)
        if cached is not None:
            return cached
        row = n - bin(mask).count("1")
        result: dict[int, complex] = {}
        sign = 1.0
        m = mask
        while m:
            j = (m & -m).bit_length() - 1
            m &= m - 1
            child = det(mask & ~(1 << j))
            entry = mat[row, j]
            if j == row:
                bit = 1 << row
                for cm, cc in child.items():
                    key = cm | bit
                    result[key] = result.get(key, 0.0) + sign * cc
            if entry != 0:
                factor = -sign * entry
                for cm, cc in child.items():
                    result[cm] = result.get(cm, 0.0) + factor * cc
            sign = -sign
        memo[mask] = result
        return result

    full = det((1 << n) - 1)
    ids = tuple(e.id for e in a.graph.edges)
    return MultiPoly(ids, full).cleaned()


def reduce_vertex(a: GEndomorphism, vertex_id: str) -> tuple[MetricGraph, GEndomorphism]:
    """Contract a degree-(1,1) non-loop vertex out of the graph and the map.

    The incoming and outgoing edge at the vertex merge into a single edge
    whose length is the sum of both.  Writing ``alpha`` for the matrix entry
    that forwards the incoming edge onto the outgoing one, the merged edge
    keeps the outgoing edge's behaviour as a source and the incoming edge's
    behaviour (scaled by ``alpha``) as a target.  The characteristic
    polynomial transforms by substituting the product of the two old
    variables for the new one, and the secular function is unchanged.
    """
    g = a.graph
    ins, outs = g.in_edges(vertex_id), g.out_edges(vertex_id)
    if len(ins) != 1 or len(outs) != 1:
        raise ValueError(f"vertex {vertex_id!r} does not have in and out degree one")
    i_in, i_out = ins[0], outs[0]
    if i_in == i_out:
        raise ValueError(f"vertex {vertex_id!r} carries a loop; nothing to contract")
    e_in, e_out = g.edges[i_in], g.edges[i_out]

    merged_id = f"{e_in.id}~{e_out.id}"
    taken = {e.id for e in g.edges}
    while merged_id in taken:
        merged_id += "'"
    merged = Edge(merged_id, e_in.tail, e_out.head, e_in.length + e_out.length)

    # Merged edge takes the incoming edge's slot to keep ordering stable.
    new_order: list[int | None] = []
    for i in range(g.n_edges):
        if i == i_in:
            new_order.append(None)
        elif i != i_out:
            new_order.append(i)
    edges = [merged if i is None else g.edges[i] for i in new_order]
    vertices = [v for v in g.vertices if v != vertex_id]
    new_graph = MetricGraph(vertices, edges)

    alpha = a.matrix[i_out, i_in]
    nm = len(edges)
    mat = np.zeros((nm, nm), dtype=complex)
    for p, i in enumerate(new_order):
        for q, j in enumerate(new_order):
            if i is None and j is None:
                mat[p, q] = alpha * a.matrix[i_in, i_out]
            elif i is None:
                mat[p, q] = alpha * a.matrix[i_in, j]
            elif j is None:
                mat[p, q] = a.matrix[i, i_out]
            else:
                mat[p, q] = a.matrix[i, j]
    return new_graph, GEndomorphism(new_graph, mat)


def _scc(n: int, succ: list[list[int]]) -> list[list[int]]:
    """Strongly connected components of a digraph on 0..n-1, Tarjan, iterative."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for k in range(pi, len(succ[v])):
                w = succ[v][k]
                if index[w] == -1:
                    work[-1] = (v, k + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps


def split_reducible(a: GEndomorphism) -> list[tuple[frozenset[str], GEndomorphism]]:
    """Finest splitting of the edge set into invariant blocks.

    A subset of edges is invariant when the matrix maps values supported on
    it back into it; the finest decomposition consists of the strongly
    connected components of the support digraph (an arc from source edge to
    target edge for every nonzero entry).  Blocks are returned in a
    topological order of that digraph, so the full matrix is block
    triangular with the returned blocks on the diagonal: the characteristic
    polynomial factors over the blocks and the spectrum is the union of the
    block spectra.  An irreducible map comes back as a single block.
    """
    g = a.graph
    n = g.n_edges
    succ: list[list[int]] = [[] for _ in range(n)]
    rows, cols = np.nonzero(a.matrix)
    for i, j in zip(rows.tolist(), cols.tolist()):
        succ[j].append(i)
    comps = _scc(n, succ)

    comp_of = {}
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    cross: list[set[int]] = [set() for _ in comps]
    indeg = [0] * len(comps)
    for j in range(n):
        for i in succ[j]:
            cj, ci = comp_of[j], comp_of[i]
            if cj != ci and ci not in cross[cj]:
                cross[cj].add(ci)
                indeg[ci] += 1
    # Kahn topological sort, smallest leading edge index first for determinism.
    order: list[int] = []
    ready = sorted(
        (ci for ci in range(len(comps)) if indeg[ci] == 0),
        key=lambda ci: comps[ci][0],
    )
    while ready:
        ci = ready.pop(0)
        order.append(ci)
        for cj in cross[ci]:
            indeg[cj] -= 1
            if indeg[cj] == 0:
                ready.append(cj)
        ready.sort(key=lambda c: comps[c][0])

    out = []
    for ci in order:
        comp = comps[ci]
        ids = frozenset(g.edges[i].id for i in comp)
        sub = Subgraph(g, ids).induced_graph()
        idx = [g.edge_index(e.id) for e in sub.edges]
        block = a.matrix[np.ix_(idx, idx)]
        out.append((ids, GEndomorphism(sub, block)))
    return out


class CharFunction:
    """Secular function ``lambda -> P_A(exp(i lambda l_e))`` of an edge map.

    Each monomial is evaluated as a single exponential of ``i lambda`` times
    the summed length of its edges, which stays stable for complex
    ``lambda`` where per-edge products would accumulate error.
    """

    def __init__(self, poly: MultiPoly, lengths):
        lengths = np.asarray(lengths, dtype=float)
        if lengths.shape != (poly.n_vars,):
            raise ValueError("need one length per variable")
        self.poly = poly
        self.lengths = lengths
        masks = list(poly.terms)
        self._coeffs = np.array([poly.terms[m] for m in masks], dtype=complex)
        self._mask_lengths = np.array(
            [sum(lengths[i] for i in range(poly.n_vars) if m >> i & 1) for m in masks],
            dtype=float,
        )

    @property
    def scale(self) -> float:
        """Sum of coefficient magnitudes; the natural size for residuals."""
        return float(np.sum(np.abs(self._coeffs))) if self._coeffs.size else 0.0

    @property
    def total_length(self) -> float:
        return float(np.sum(self.lengths))

    def eval(self, lam):
        """Value at a complex point or an array of points."""
        lam = np.asarray(lam, dtype=complex)
        phases = np.exp(1j * np.multiply.outer(lam, self._mask_lengths))
        return phases @ self._coeffs

    def eval_deriv(self, lam):
        """Derivative in ``lambda``; each monomial picks up ``i`` times its length."""
        return self.eval_dk(lam, 1)

    def eval_dk(self, lam, k: int):
        """k-th derivative in ``lambda``."""
        lam = np.asarray(lam, dtype=complex)
        phases = np.exp(1j * np.multiply.outer(lam, self._mask_lengths))
        return phases @ ((1j * self._mask_lengths) ** k * self._coeffs)

    def __call__(self, lam):
        return self.eval(lam)


def char_function(a: GEndomorphism, lengths=None, cap: int = DEFAULT_EDGE_CAP) -> CharFunction:
    """Secular function of an edge map, defaulting to the graph's edge lengths."""
    if lengths is None:
        lengths = a.graph.lengths()
    return CharFunction(char_poly(a, cap), lengths)


def evaluate(poly: MultiPoly, lengths, lam) -> complex:
    """Evaluate a characteristic polynomial at ``x_e = exp(i lam l_e)``."""
    return complex(CharFunction(poly, lengths).eval(lam))


def specialize_univariate(poly: MultiPoly, multipliers) -> np.ndarray:
    """Coefficients of ``P(z^{m_1}, .., z^{m_n})``, lowest degree first.

    ``multipliers`` is either a sequence of nonnegative integers in edge
    order or a mapping from edge id to integer.
    """
    if isinstance(multipliers, dict):
        mult = [int(multipliers[eid]) for eid in poly.edge_ids]
    else:
        mult = [int(m) for m in multipliers]
    if len(mult) != poly.n_vars:
        raise ValueError("need one multiplier per variable")
    if any(m < 0 for m in mult):
        raise ValueError("multipliers must be nonnegative")
    degree = 0
    powers = {}
    for mask in poly.terms:
        p = sum(mult[i] for i in range(poly.n_vars) if mask >> i & 1)
        powers[mask] = p
        degree = max(degree, p)
    coeffs = np.zeros(degree + 1, dtype=complex)
    for mask, c in poly.terms.items():
        coeffs[powers[mask]] += c
    return coeffs


def detect_commensurable(
    lengths,
    max_denominator: int = 10**6,
    rtol: float = 1e-9,
) -> tuple[list[int], float] | None:
    """Integer multipliers and a base length reproducing ``lengths``, if any.

    Each pairwise ratio to the first length is reconstructed as a fraction
    with denominator at most ``max_denominator``; when every length is
    matched within relative ``rtol`` the common refinement ``delta`` and the
    list of multipliers ``m_e`` with ``l_e = m_e * delta`` are returned,
    otherwise ``None``.
    """
    lengths = [float(x) for x in lengths]
    if not lengths or any(x <= 0 for x in lengths):
        return None
    base = lengths[0]
    fracs = []
    for x in lengths:
        f = Fraction(x / base).limit_denominator(max_denominator)
        if f <= 0:
            return None
        fracs.append(f)
    common = 1
    for f in fracs:
        common = common * f.denominator // gcd(common, f.denominator)
    delta = base / common
    mult = [int(f.numerator * (common // f.denominator)) for f in fracs]
    for m, x in zip(mult, lengths):
        if abs(m * delta - x) > rtol * x:
            return None
    return mult, delta


def univariate_to_string(coeffs, var: str = "t") -> str:
    """Human readable form of a univariate polynomial, highest degree first."""
    coeffs = np.asarray(coeffs, dtype=complex)
    parts: list[str] = []
    for p in range(len(coeffs) - 1, -1, -1):
        c = coeffs[p]
        if c == 0:
            continue
        if abs(c.imag) < 1e-12 and abs(c.real - round(c.real)) < 1e-9:
            cr = round(c.real)
            mag = abs(cr)
            sign = "-" if cr < 0 else "+"
            body = "" if (mag == 1 and p > 0) else str(mag)
        else:
            sign = "+"
            body = f"({c.real:.6g}{c.imag:+.6g}i)"
        if p == 0:
            term = body or "1"
        elif p == 1:
            term = f"{body} {var}".strip()
        else:
            term = f"{body} {var}^{p}".strip()
        if not parts:
            parts.append(term if sign == "+" else f"-{term}")
        else:
            parts.append(f"{sign} {term}")
    return " ".join(parts) if parts else "0"
