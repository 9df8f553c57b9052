"""Eigenvalue solvers: exact commensurable, real-line scan, contour search."""

import math

import numpy as np
import pytest

from diracgraph import (
    GEndomorphism,
    Window,
    directed_cycle,
    eigenfunction_residual,
    general_eigencondition,
    graph_from_edges,
    graph_of,
    multiplicity,
    rose,
    spectrum_complex,
    spectrum_exact_commensurable,
    spectrum_numeric,
)
from diracgraph.errors import DiracGraphError, WindowTooLargeError
from diracgraph.randgen import (
    random_eulerian_graph,
    random_g_endomorphism,
    random_unitary_g_endomorphism,
)
from diracgraph.spectrum import as_window


def shift_map(g, weights):
    """Cyclic shift on a directed cycle: edge j feeds edge j+1 with weight."""
    n = g.n_edges
    m = np.zeros((n, n), dtype=complex)
    for i in range(n):
        m[(i + 1) % n, i] = weights[i]
    return GEndomorphism(g, m)


def scaled_identity_rose(n, a):
    """n loops at one vertex, each mapped to itself with factor ``a``.

    The secular function is ``(exp(i lam) - a)**n``: a single point spectrum
    ``-i ln a + 2 pi k`` of multiplicity ``n``, handy for multiple-zero tests.
    """
    g = rose(n)
    return g, GEndomorphism(g, a * np.eye(n))


# -- windows --------------------------------------------------------------


def test_window_from_pair_is_real_interval():
    w = as_window((-1.0, 2.0))
    assert w.is_real_interval
    assert w.contains(1.5) and w.contains(1.5 - 40j)
    assert not w.contains(2.5)


def test_rect_window_membership_and_slack():
    w = Window.rect(0, 1, -1, 0)
    assert w.contains(0.5 - 0.5j)
    assert not w.contains(0.5 + 0.1j)
    assert w.contains(0.5 + 0.1j, slack=0.2)
    assert not w.is_real_interval


def test_empty_window_rejected():
    with pytest.raises(ValueError):
        Window.rect(1, 0, 0, 1)


# -- multiplicity ---------------------------------------------------------


def test_multiplicity_identity_loop():
    g = rose(1)
    a = GEndomorphism(g, np.eye(1))
    m, kernel = multiplicity(a, [1.0], 2 * math.pi)
    assert m == 1 and kernel.shape == (1, 1)
    assert multiplicity(a, [1.0], math.pi)[0] == 0


def test_multiplicity_full_kernel_for_scaled_identity():
    g, a = scaled_identity_rose(3, 2.0)
    lam = -1j * math.log(2.0)
    m, kernel = multiplicity(a, [1.0] * 3, lam)
    assert m == 3
    # orthonormal kernel basis
    assert np.allclose(kernel.conj().T @ kernel, np.eye(3))


def test_multiplicity_threshold_uses_operand_scale():
    # Near the eigenvalue the difference matrix is uniformly tiny; comparing
    # singular values against its own largest one would report full rank.
    g, a = scaled_identity_rose(2, 2.0)
    lam = -1j * math.log(2.0) + 1e-12
    assert multiplicity(a, [1.0, 1.0], lam)[0] == 2


def test_multiplicity_zero_map():
    g = rose(2)
    a = GEndomorphism(g, np.zeros((2, 2)))
    # exp(i lam l) is never zero, so the difference is always invertible
    assert multiplicity(a, [1.0, 1.0], 0.3 - 0.2j)[0] == 0


# -- exact solver on commensurable lengths --------------------------------


def test_exact_single_loop_lattice():
    g = rose(1)
    a = GEndomorphism(g, np.eye(1))
    rep = spectrum_exact_commensurable(a, [1], 1.0, (-7.0, 7.0))
    want = [2 * math.pi * k for k in (-1, 0, 1)]
    assert np.allclose(rep.values(), want, atol=1e-9)
    assert all(e.multiplicity == 1 for e in rep.eigenvalues)
    assert all(e.residual < 1e-12 for e in rep.eigenvalues)


def test_exact_rose_adjacency_damped_lattice():
    # All-ones map on n loops: specialization t^n - n t^{n-1}, so the only
    # root family is exp(i lam) = n, giving 2 pi k - i ln n.
    for n in (2, 3, 4):
        g = rose(n)
        a = GEndomorphism(g, np.ones((n, n)))
        rep = spectrum_exact_commensurable(
            a, [1] * n, 1.0, Window.rect(-0.5, 7.0, -3.0, 0.5)
        )
        want = [-1j * math.log(n), 2 * math.pi - 1j * math.log(n)]
        assert len(rep.eigenvalues) == 2
        assert np.allclose(rep.values(), want, atol=1e-9)
        assert all(e.multiplicity == 1 for e in rep.eigenvalues)


def test_exact_multiple_root_centroid():
    # (z - 2)^2 after specialization; the clustered companion roots must
    # recover the double root to full precision, not to sqrt(eps).
    g, a = scaled_identity_rose(2, 2.0)
    rep = spectrum_exact_commensurable(a, [1, 1], 1.0, Window.rect(-1, 1, -2, 0))
    assert len(rep.eigenvalues) == 1
    entry = rep.eigenvalues[0]
    assert entry.multiplicity == 2
    assert entry.value == pytest.approx(-1j * math.log(2.0), abs=1e-9)


def test_exact_high_multiplicity_roots():
    # companion roots of (z - 2)^n scatter by eps**(1/n); the derivative
    # polish has to recover the exact location before the rank test
    for n in (3, 4, 5):
        g, a = scaled_identity_rose(n, 2.0)
        rep = spectrum_exact_commensurable(a, [1] * n, 1.0, Window.rect(-1, 1, -2, 0))
        assert len(rep.eigenvalues) == 1
        entry = rep.eigenvalues[0]
        assert entry.multiplicity == n
        assert entry.value == pytest.approx(-1j * math.log(2.0), abs=1e-9)


def test_exact_mixed_lengths_against_closed_form():
    # Single cycle of total length 3 delta: exp(3 i lam delta) = 1.
    g = graph_from_edges([("e1", "u", "v", 0.5), ("e2", "v", "u", 1.0)])
    a = shift_map(g, [1.0, 1.0])
    rep = spectrum_exact_commensurable(a, [1, 2], 0.5, (-0.1, 9.0))
    want = [2 * math.pi * k / 1.5 for k in range(3)]
    assert np.allclose(rep.values(), want, atol=1e-9)


def test_exact_dict_multipliers():
    g = graph_from_edges([("e1", "u", "v", 0.5), ("e2", "v", "u", 1.0)])
    a = shift_map(g, [1.0, 1.0])
    rep = spectrum_exact_commensurable(a, {"e1": 1, "e2": 2}, 0.5, (-0.1, 1.0))
    assert np.allclose(rep.values(), [0.0], atol=1e-9)


def test_exact_zero_root_discarded():
    # P = (x1 - 1) x2 specializes to z^2 - z; the z = 0 root is not an
    # eigenvalue and only the z = 1 lattice remains.
    g = rose(2)
    a = GEndomorphism(g, np.diag([1.0, 0.0]))
    rep = spectrum_exact_commensurable(a, [1, 1], 1.0, (-0.1, 0.1))
    assert np.allclose(rep.values(), [0.0], atol=1e-9)
    assert rep.eigenvalues[0].multiplicity == 1


def test_exact_singular_monomial_warns_empty():
    g = rose(1)
    a = GEndomorphism(g, np.zeros((1, 1)))
    rep = spectrum_exact_commensurable(a, [1], 1.0, (-10.0, 10.0))
    assert rep.eigenvalues == ()
    assert any("single monomial" in w for w in rep.warnings)


def test_exact_input_validation():
    g = rose(1)
    a = GEndomorphism(g, np.eye(1))
    with pytest.raises(ValueError):
        spectrum_exact_commensurable(a, [1], 0.0, (-1, 1))
    with pytest.raises(ValueError):
        spectrum_exact_commensurable(a, [0], 1.0, (-1, 1))


# -- scan solver ----------------------------------------------------------


def test_scan_cycle_phases_closed_form():
    rng = np.random.default_rng(101)
    for n in (1, 2, 3, 5):
        g = directed_cycle(n)
        phases = rng.uniform(0, 2 * math.pi, size=n)
        a = shift_map(g, np.exp(1j * phases))
        total = float(sum(g.lengths()))
        rep = spectrum_numeric(a, window=(-6.0, 6.0))
        want = []
        k = math.floor((-6.0 * total - phases.sum()) / (2 * math.pi)) - 1
        while True:
            lam = (phases.sum() + 2 * math.pi * k) / total
            if lam > 6.0:
                break
            if lam >= -6.0:
                want.append(lam)
            k += 1
        assert len(rep.eigenvalues) == len(want)
        assert np.allclose(rep.values(), want, atol=1e-8)
        assert all(e.multiplicity == 1 for e in rep.eigenvalues)


def test_scan_agrees_with_exact_on_random_unitary_maps():
    rng = np.random.default_rng(103)
    for _ in range(15):
        g = random_eulerian_graph(rng, max_edges=5)
        a = random_unitary_g_endomorphism(g, rng)
        scan = spectrum_numeric(a, window=(-4.0, 4.0))
        exact = spectrum_exact_commensurable(a, [1] * g.n_edges, 1.0, (-4.0, 4.0))
        assert len(scan.eigenvalues) == len(exact.eigenvalues)
        for s, e in zip(scan.eigenvalues, exact.eigenvalues):
            assert s.value == pytest.approx(e.value, abs=1e-8)
            assert s.multiplicity == e.multiplicity


def test_scan_degenerate_eigenvalues():
    # Two identical loops: every eigenvalue doubles.
    g, a = scaled_identity_rose(2, 1.0)
    rep = spectrum_numeric(a, window=(-0.5, 7.0))
    assert np.allclose(rep.values(), [0.0, 2 * math.pi], atol=1e-9)
    assert [e.multiplicity for e in rep.eigenvalues] == [2, 2]


def test_scan_high_multiplicity_lattice():
    for n in (3, 5, 8):
        g, a = scaled_identity_rose(n, 1.0)
        rep = spectrum_numeric(a, window=(-0.5, 7.0))
        assert [e.multiplicity for e in rep.eigenvalues] == [n, n]
        assert np.allclose(rep.values(), [0.0, 2 * math.pi], atol=1e-9)


def test_scan_refuses_nonunitary():
    g, a = scaled_identity_rose(1, 2.0)
    with pytest.raises(DiracGraphError, match="unitary"):
        spectrum_numeric(a, window=(-1.0, 1.0))


def test_scan_rejects_window_off_the_real_line():
    g, a = scaled_identity_rose(1, 1.0)
    with pytest.raises(ValueError):
        spectrum_numeric(a, window=Window.rect(-1, 1, 0.5, 1.0))


def test_scan_window_size_guard():
    g, a = scaled_identity_rose(1, 1.0)
    with pytest.raises(WindowTooLargeError):
        spectrum_numeric(a, window=(-1e6, 1e6))


def test_scan_eigenfunctions_solve_the_edge_equation():
    rng = np.random.default_rng(107)
    g = random_eulerian_graph(rng, max_edges=4)
    a = random_unitary_g_endomorphism(g, rng)
    lengths = np.array(g.lengths())
    # every root of det(zI - A) spawns a real lattice of spacing 2 pi, so a
    # window wider than that always holds an eigenvalue
    rep = spectrum_numeric(a, window=(-4.5, 4.5))
    assert rep.eigenvalues, "expected at least one eigenvalue in the window"
    for entry in rep.eigenvalues:
        assert len(entry.eigenfunctions) == entry.multiplicity
        for f in entry.eigenfunctions:
            ends = f.amplitudes * np.exp(-1j * f.eigenvalue * lengths)
            defect = np.diag(np.exp(1j * f.eigenvalue * lengths)) @ ends - a.matrix @ ends
            assert np.linalg.norm(defect) < 1e-8 * np.linalg.norm(f.amplitudes)


# -- contour solver -------------------------------------------------------


def test_contour_rose_adjacency_rect():
    g = rose(2)
    a = GEndomorphism(g, np.ones((2, 2)))
    rep = spectrum_complex(a, rect=(-1.0, 7.0, -2.0, 0.5))
    want = [-1j * math.log(2.0), 2 * math.pi - 1j * math.log(2.0)]
    assert rep.winding == 2
    assert len(rep.eigenvalues) == 2
    assert np.allclose(rep.values(), want, atol=1e-9)
    assert all(e.residual < 1e-9 for e in rep.eigenvalues)


def test_contour_multiple_zeros():
    for n in (2, 3):
        g, a = scaled_identity_rose(n, 2.0)
        rep = spectrum_complex(a, rect=(-1.0, 1.0, -1.5, 0.5))
        assert rep.winding == n
        assert len(rep.eigenvalues) == 1
        entry = rep.eigenvalues[0]
        assert entry.multiplicity == n
        assert entry.value == pytest.approx(-1j * math.log(2.0), abs=1e-8)


def test_contour_zero_on_boundary_perturbs():
    g, a = scaled_identity_rose(1, 1.0)
    rep = spectrum_complex(a, rect=(0.0, 2 * math.pi, -1.0, 1.0))
    assert any("perturbed" in w for w in rep.warnings)
    assert rep.winding == 2
    assert np.allclose(rep.values(), [0.0, 2 * math.pi], atol=1e-7)


def test_contour_agrees_with_exact_on_random_maps():
    rng = np.random.default_rng(109)
    checked = 0
    for _ in range(10):
        g = random_eulerian_graph(rng, max_edges=4)
        a = random_g_endomorphism(g, rng)
        rect = Window.rect(-3.3, 3.3, -1.6, 1.6)
        exact = spectrum_exact_commensurable(a, [1] * g.n_edges, 1.0, rect)
        contour = spectrum_complex(a, rect=rect)
        assert len(contour.eigenvalues) == len(exact.eigenvalues)
        for c, e in zip(contour.eigenvalues, exact.eigenvalues):
            assert c.value == pytest.approx(e.value, abs=1e-8)
            assert c.multiplicity == e.multiplicity
        checked += len(exact.eigenvalues)
    assert checked > 10


def test_contour_winding_matches_multiplicity_sum():
    rng = np.random.default_rng(113)
    g = random_eulerian_graph(rng, max_edges=4)
    a = random_g_endomorphism(g, rng)
    rep = spectrum_complex(a, rect=(-2.1, 2.1, -1.3, 1.3))
    assert rep.winding == sum(e.multiplicity for e in rep.eigenvalues)
    assert not any("disagree" in w for w in rep.warnings)


def test_contour_requires_finite_rectangle():
    g, a = scaled_identity_rose(1, 1.0)
    with pytest.raises(ValueError):
        spectrum_complex(a, rect=None)
    with pytest.raises(ValueError):
        spectrum_complex(a, rect=Window.real(-1.0, 1.0))


def test_contour_empty_rectangle():
    g, a = scaled_identity_rose(1, 1.0)
    rep = spectrum_complex(a, rect=(2.0, 3.0, 0.5, 1.5))
    assert rep.winding == 0
    assert rep.eigenvalues == ()


def test_report_values_sorted():
    g, a = scaled_identity_rose(1, 1.0)
    rep = spectrum_numeric(a, window=(-13.0, 13.0))
    vals = rep.values()
    assert vals == sorted(vals, key=lambda z: (z.real, z.imag))


# -- boundary subspaces beyond edge maps ----------------------------------


def test_general_eigencondition_matches_multiplicity():
    rng = np.random.default_rng(127)
    for _ in range(10):
        g = random_eulerian_graph(rng, max_edges=4)
        a = random_unitary_g_endomorphism(g, rng)
        b = graph_of(a)
        lengths = np.array(g.lengths())
        rep = spectrum_numeric(a, window=(-3.0, 3.0))
        for entry in rep.eigenvalues:
            assert (
                general_eigencondition(b, lengths, entry.value)
                == entry.multiplicity
            )
        lam = float(rng.uniform(-3, 3))
        assert general_eigencondition(b, lengths, lam) == multiplicity(
            a, lengths, lam
        )[0]


def test_eigenfunction_residual_small_for_true_eigenfunctions():
    rng = np.random.default_rng(131)
    g = random_eulerian_graph(rng, max_edges=5)
    a = random_unitary_g_endomorphism(g, rng)
    b = graph_of(a)
    rep = spectrum_numeric(a, window=(-3.0, 3.0))
    assert rep.eigenvalues
    for entry in rep.eigenvalues:
        for f in entry.eigenfunctions:
            assert eigenfunction_residual(b, f) < 1e-8


def test_eigenfunction_residual_detects_wrong_subspace():
    g = rose(1)
    a = GEndomorphism(g, np.eye(1))
    rep = spectrum_numeric(a, window=(-0.5, 0.5))
    f = rep.eigenvalues[0].eigenfunctions[0]
    other = graph_of(GEndomorphism(g, -np.eye(1)))
    assert eigenfunction_residual(other, f) > 0.5


def test_eigenfunction_residual_rejects_zero_amplitudes():
    from diracgraph import Eigenfunction

    g = rose(1)
    b = graph_of(GEndomorphism(g, np.eye(1)))
    with pytest.raises(ValueError):
        eigenfunction_residual(b, Eigenfunction(0.0, np.zeros(1, dtype=complex)))
