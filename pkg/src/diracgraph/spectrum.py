"""Eigenvalue solvers for boundary conditions given by edge maps.

The point spectrum of the realization attached to the graph of an edge map
``A`` consists of the zeros of the secular function
``P_A(exp(i lambda l_1), .., exp(i lambda l_n))``.  Three solvers cover the
practical cases:

* commensurable lengths reduce the secular function to an ordinary
  polynomial in ``z = exp(i lambda delta)``; its nonzero roots generate
  periodic eigenvalue families (exact route),
* unitary maps have real spectrum, found by a grid scan of the secular
  function on a real window followed by Newton polishing,
* general maps have complex zeros, located by winding numbers over a
  rectangle with recursive subdivision.

Multiplicities never come from root clustering: every reported eigenvalue is
confirmed by the kernel dimension of ``diag(exp(i lambda l)) - A`` via SVD,
and the kernel vectors double as eigenfunction amplitudes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundarySubspace, GEndomorphism, is_unitary
from .charpoly import CharFunction, char_function, char_poly, specialize_univariate
from .errors import ContourError, DiracGraphError, WindowTooLargeError
from . import linalg

# Default tolerances: residuals are relative to the coefficient sum of the
# secular function, rank decisions are relative SVD cutoffs, and nearby roots
# merge within the dedupe radius.
RESIDUAL_TOL = 1e-10
RANK_RTOL = 1e-8
DEDUPE_RADIUS = 1e-7

# Refuse real windows expected to contain more roots than this.
MAX_EXPECTED_ROOTS = 10**5


@dataclass(frozen=True)
class Window:
    """Axis-aligned region of the complex plane used to select eigenvalues.

    A real interval is the special case with unbounded imaginary part.
    """

    re_min: float
    re_max: float
    im_min: float = -math.inf
    im_max: float = math.inf

    def __post_init__(self):
        if self.re_min > self.re_max or self.im_min > self.im_max:
            raise ValueError("empty window")

    @classmethod
    def real(cls, a: float, b: float) -> "Window":
        return cls(float(a), float(b))

    @classmethod
    def rect(cls, re_min, re_max, im_min, im_max) -> "Window":
        return cls(float(re_min), float(re_max), float(im_min), float(im_max))

    @property
    def is_real_interval(self) -> bool:
        return math.isinf(self.im_min) and math.isinf(self.im_max)

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        return (
            self.re_min - slack <= z.real <= self.re_max + slack
            and self.im_min - slack <= z.imag <= self.im_max + slack
        )


def as_window(w) -> Window:
    if isinstance(w, Window):
        return w
    a, b = w
    return Window.real(a, b)


@dataclass(frozen=True)
class Eigenfunction:
    """Eigenfunction data: per-edge amplitudes of ``w_e exp(-i lambda x)``."""

    eigenvalue: complex
    amplitudes: np.ndarray


@dataclass(frozen=True)
class EigenvalueEntry:
    value: complex
    multiplicity: int
    residual: float
    eigenfunctions: tuple[Eigenfunction, ...] = ()


@dataclass(frozen=True)
class SpectrumReport:
    """Outcome of one solver run: sorted eigenvalues plus diagnostics."""

    solver: str
    window: Window
    eigenvalues: tuple[EigenvalueEntry, ...]
    warnings: tuple[str, ...] = ()
    winding: int | None = None

    def values(self) -> list[complex]:
        return [e.value for e in self.eigenvalues]


def _sorted_entries(entries) -> tuple[EigenvalueEntry, ...]:
    return tuple(sorted(entries, key=lambda e: (e.value.real, e.value.imag)))


def multiplicity(
    a: GEndomorphism,
    lengths,
    lam: complex,
    rank_rtol: float = RANK_RTOL,
) -> tuple[int, np.ndarray]:
    """Eigenvalue multiplicity from the kernel of ``diag(exp(i lam l)) - A``.

    Returns the kernel dimension together with an orthonormal kernel basis
    (columns).  The kernel vectors are the edge values of eigenfunctions at
    the edge ends; zero dimension means ``lam`` is not an eigenvalue.
    """
    lengths = np.asarray(lengths, dtype=float)
    phases = np.exp(1j * lam * lengths)
    m = np.diag(phases) - a.matrix
    u, s, vh = np.linalg.svd(m)
    # Threshold against the operand scale, not s[0]: at an eigenvalue of a
    # diagonal map the whole difference is tiny and every singular value
    # would look nonzero relative to the largest.
    scale = max(
        float(s[0]) if s.size else 0.0,
        float(np.max(np.abs(phases), initial=0.0)),
        float(np.linalg.norm(a.matrix)),
    )
    if scale == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(s > rank_rtol * scale))
    kernel = vh[rank:].conj().T
    return kernel.shape[1], kernel


def _eigenfunctions_from_kernel(lam, lengths, kernel) -> tuple[Eigenfunction, ...]:
    # Kernel vectors hold end values; start amplitudes differ by exp(i lam l).
    lengths = np.asarray(lengths, dtype=float)
    grow = np.exp(1j * lam * lengths)
    return tuple(
        Eigenfunction(complex(lam), grow * kernel[:, k]) for k in range(kernel.shape[1])
    )


def _entry(a, lengths, cf, lam, rank_rtol) -> EigenvalueEntry | None:
    m, kernel = multiplicity(a, lengths, lam, rank_rtol)
    if m == 0:
        return None
    scale = cf.scale or 1.0
    residual = abs(complex(cf.eval(lam))) / scale
    return EigenvalueEntry(
        complex(lam), m, residual, _eigenfunctions_from_kernel(lam, lengths, kernel)
    )


def _guarded_newton(value, deriv, z0: complex, mult: int = 1, maxiter: int = 80) -> complex:
    """Newton iteration that never lets the target magnitude increase.

    Inside the evaluation-noise basin of a zero the computed value is junk
    and a raw step of ``mult*f/f'`` can be enormous; backtracking rejects
    such steps so the iterate parks at the best point reached.
    """
    z = complex(z0)
    # trial steps may land where the exponentials overflow; the guard
    # rejects non-finite values, so the numpy warnings are just noise
    with np.errstate(over="ignore", invalid="ignore"):
        fz = abs(complex(value(z)))
        for _ in range(maxiter):
            if not math.isfinite(fz):
                break
            dp = complex(deriv(z))
            if dp == 0:
                break
            step = mult * complex(value(z)) / dp
            if not cmath.isfinite(step):
                break
            accepted = False
            for _damp in range(10):
                cand = z - step
                fc = abs(complex(value(cand)))
                if math.isfinite(fc) and fc <= fz:
                    accepted = True
                    break
                step /= 2
            if not accepted:
                break
            z, fz = cand, fc
            if abs(step) <= 1e-14 * (1.0 + abs(z)):
                break
    return z


def _newton(cf: CharFunction, z0: complex, maxiter: int = 80, mult: int = 1) -> complex:
    return _guarded_newton(cf.eval, cf.eval_deriv, z0, mult, maxiter)


def _polish_mult(cf: CharFunction, z0: complex, mult: int) -> complex:
    """Refine an m-fold zero by solving for the simple zero of the (m-1)-th
    derivative, which is conditioned like an ordinary root there."""
    if mult <= 1:
        return _newton(cf, z0)
    return _guarded_newton(
        lambda z: cf.eval_dk(z, mult - 1),
        lambda z: cf.eval_dk(z, mult),
        z0,
    )


def _certify(a, lengths, cf, lam, rank_rtol, real_axis: bool = False):
    """Rank-test a candidate, escalating through derivative polishes.

    Values of the secular function locate an ``m``-fold zero only to about
    ``eps**(1/m)``, far too coarse for the rank test, so on rejection the
    candidate is re-polished as an assumed multiple zero of increasing order
    until some multiplicity certifies.  A certified multiple zero is then
    re-polished once more at its actual multiplicity, pinning the value to
    machine accuracy.  ``real_axis`` restricts to real candidates (unitary
    maps have real spectrum; a polish drifting off the axis is discarded).
    """

    def snap(z: complex) -> complex | None:
        if not real_axis:
            return z
        if abs(z.imag) > 1e-6:
            return None
        return complex(z.real)

    entry = _entry(a, lengths, cf, lam, rank_rtol)
    if entry is None:
        for m in range(2, a.n_edges + 1):
            z = snap(_polish_mult(cf, complex(lam), m))
            if z is None:
                continue
            entry = _entry(a, lengths, cf, z, rank_rtol)
            if entry is not None:
                break
    if entry is not None and entry.multiplicity > 1:
        z = snap(_polish_mult(cf, complex(entry.value), entry.multiplicity))
        if z is not None:
            better = _entry(a, lengths, cf, z, rank_rtol)
            if better is not None and better.multiplicity == entry.multiplicity:
                entry = better
    return entry


# -- exact solver for commensurable lengths ------------------------------


def _cluster_roots(roots: np.ndarray, radius: float) -> list[complex]:
    """Centroids of root clusters.

    Eigensolver output scatters a multiplicity ``m`` root symmetrically, so
    the cluster centroid restores nearly full accuracy where the individual
    roots only carry ``m``-th root of machine precision.
    """
    points = sorted((complex(z) for z in roots), key=lambda z: (z.real, z.imag))
    used = [False] * len(points)
    out: list[complex] = []
    for i, z in enumerate(points):
        if used[i]:
            continue
        cluster = [z]
        used[i] = True
        grew = True
        while grew:
            grew = False
            for j, y in enumerate(points):
                if used[j]:
                    continue
                if any(abs(y - c) <= radius for c in cluster):
                    cluster.append(y)
                    used[j] = True
                    grew = True
        out.append(sum(cluster) / len(cluster))
    return out


def spectrum_exact_commensurable(
    a: GEndomorphism,
    multipliers,
    delta: float,
    window,
    *,
    residual_tol: float = RESIDUAL_TOL,
    rank_rtol: float = RANK_RTOL,
) -> SpectrumReport:
    """Spectrum for edge lengths ``l_e = m_e * delta`` with integer ``m_e``.

    Substituting ``z = exp(i lambda delta)`` turns the secular function into
    the polynomial ``Q(z) = P_A(z^{m_1}, .., z^{m_n})``.  Nonzero roots are
    found once by a companion matrix eigensolver; roots at ``z = 0``
    correspond to no eigenvalue and are discarded.  Each root ``z`` with
    argument ``phi`` in ``[0, 2 pi)`` and modulus ``exp(alpha)`` yields the
    eigenvalue family ``(phi + 2 pi k - i alpha) / delta`` over all integers
    ``k``; the report lists the members inside the window.
    """
    window = as_window(window)
    if delta <= 0:
        raise ValueError("base length must be positive")
    if isinstance(multipliers, dict):
        mult = [int(multipliers[e.id]) for e in a.graph.edges]
    else:
        mult = [int(m) for m in multipliers]
    if any(m <= 0 for m in mult):
        raise ValueError("multipliers must be positive integers")
    lengths = np.array(mult, dtype=float) * delta
    poly = char_poly(a)
    coeffs = specialize_univariate(poly, mult)
    if not np.any(coeffs):
        raise DiracGraphError("secular polynomial is identically zero")
    cf = CharFunction(poly, lengths)

    warnings: list[str] = []
    low = int(np.argmax(np.abs(coeffs) > 0))
    trimmed = coeffs[low:]
    entries: list[EigenvalueEntry] = []
    if trimmed.size <= 1:
        warnings.append(
            "secular polynomial is a single monomial; the map is singular and "
            "the spectrum in any window is empty"
        )
    else:
        roots = np.polynomial.polynomial.polyroots(trimmed)
        roots = roots[np.abs(roots) > 1e-12]
        radius = min(1e-5, math.pi / (4 * max(1, len(trimmed))))
        period = 2 * math.pi / delta
        for z0 in _cluster_roots(roots, radius):
            phi = math.atan2(z0.imag, z0.real) % (2 * math.pi)
            alpha = math.log(abs(z0))
            base = (phi - 1j * alpha) / delta
            k_lo = math.ceil((window.re_min - base.real) / period - 1e-12)
            k_hi = math.floor((window.re_max - base.real) / period + 1e-12)
            for k in range(k_lo, k_hi + 1):
                lam = base + k * period
                if not window.contains(lam, slack=1e-12):
                    continue
                entry = _certify(a, lengths, cf, lam, rank_rtol)
                if entry is None:
                    warnings.append(
                        f"root family member {lam:.6g} rejected by rank check"
                    )
                    continue
                if entry.residual > residual_tol:
                    warnings.append(
                        f"eigenvalue {lam:.6g} kept with residual {entry.residual:.2e}"
                    )
                entries.append(entry)
    # Scattered companion roots of a multiple zero certify to the same
    # polished eigenvalue, once per scattered copy; collapse them.
    unique: list[EigenvalueEntry] = []
    for entry in _sorted_entries(entries):
        if unique and abs(entry.value - unique[-1].value) <= 1e-9 * (
            1 + abs(entry.value)
        ):
            continue
        unique.append(entry)
    return SpectrumReport(
        "exact-commensurable", window, tuple(unique), tuple(warnings)
    )


# -- real line scan for unitary maps -------------------------------------


def spectrum_numeric(
    a: GEndomorphism,
    lengths=None,
    window=(-10.0, 10.0),
    *,
    residual_tol: float = RESIDUAL_TOL,
    rank_rtol: float = RANK_RTOL,
    dedupe_radius: float = DEDUPE_RADIUS,
    unitary_tol: float = 1e-8,
) -> SpectrumReport:
    """Real spectrum of a unitary edge map on a real window, by scan and polish.

    The secular function is sampled on a grid fine enough that no zero can
    hide between samples (its derivative is bounded by the total length
    times the coefficient sum).  Local minima of the magnitude below a
    promotion threshold derived from that bound are polished by Newton
    iteration, deduplicated, and confirmed by the SVD rank test.  For a map
    that is not unitary the spectrum need not be real and this solver
    refuses; use the contour solver instead.
    """
    if lengths is None:
        lengths = a.graph.lengths()
    lengths = np.asarray(lengths, dtype=float)
    window = as_window(window)
    if not window.is_real_interval and not (window.im_min <= 0.0 <= window.im_max):
        raise ValueError("scan solver needs a window containing the real line")
    if not is_unitary(a, unitary_tol):
        raise DiracGraphError(
            "edge map is not unitary, its spectrum need not be real; "
            "use the contour solver on a rectangle instead"
        )
    cf = char_function(a, lengths)
    total = cf.total_length
    width = window.re_max - window.re_min
    expected = width * total / (2 * math.pi)
    if expected > MAX_EXPECTED_ROOTS:
        raise WindowTooLargeError(
            f"window of width {width:.3g} holds about {expected:.2e} eigenvalues; "
            "split it into smaller pieces"
        )

    warnings: list[str] = []
    if len(cf.poly.terms) <= 1:
        warnings.append(
            "secular function is a single exponential with no zeros; "
            "empty spectrum (singular map)"
        )
        return SpectrumReport("scan", window, (), tuple(warnings))

    step = min(0.01, math.pi / (4 * total)) if total > 0 else 0.01
    n_steps = max(2, int(math.ceil(width / step)) + 1)
    grid = np.linspace(window.re_min, window.re_max, n_steps)
    vals = np.abs(cf.eval(grid))
    scale = cf.scale
    # A zero within half a grid step of a sample keeps the sampled magnitude
    # below the derivative bound times that distance; promote generously and
    # let the rank test reject false alarms.
    threshold = scale * max(1e-3, total * step)

    candidates: list[float] = []
    for i in range(len(grid)):
        left = vals[i - 1] if i > 0 else math.inf
        right = vals[i + 1] if i + 1 < len(grid) else math.inf
        if vals[i] <= left and vals[i] <= right and vals[i] < threshold:
            candidates.append(float(grid[i]))

    roots: list[float] = []
    for x0 in candidates:
        z = _newton(cf, x0)
        # A unitary spectrum is real, but inside the noise plateau of an
        # m-fold zero the Newton limit drifts off axis by about eps**(1/m);
        # gate generously and let certification reject what is not a zero.
        if abs(z.imag) > 1e-3:
            continue
        x = float(z.real)
        if not (window.re_min - dedupe_radius <= x <= window.re_max + dedupe_radius):
            continue
        x = min(max(x, window.re_min), window.re_max)
        if any(abs(x - r) <= dedupe_radius for r in roots):
            continue
        roots.append(x)

    entries = []
    for x in sorted(roots):
        entry = _certify(a, lengths, cf, x, rank_rtol, real_axis=True)
        if entry is None:
            continue
        if not (
            window.re_min - dedupe_radius
            <= entry.value.real
            <= window.re_max + dedupe_radius
        ):
            continue
        if any(abs(entry.value - prev.value) <= dedupe_radius for prev in entries):
            # the flat noise basin of a high order zero can promote several
            # grid minima that all polish to the same eigenvalue
            continue
        if entry.residual > residual_tol:
            warnings.append(
                f"candidate {x:.9g} dropped: residual {entry.residual:.2e}"
            )
            continue
        entries.append(entry)
    return SpectrumReport("scan", window, _sorted_entries(entries), tuple(warnings))


# -- contour solver for general maps -------------------------------------


def _phase_winding(cf: CharFunction, corners: list[complex], floor: float) -> float:
    """Total argument change of the secular function around a closed polygon.

    Sides are first split so that no single exponential term can advance by
    more than a quarter turn per segment; comparing only segment endpoints
    would otherwise alias away whole turns on long sides.  Each segment is
    then refined until consecutive phase jumps stay below a quarter turn; a
    sample magnitude below ``floor`` aborts with :class:`ContourError`
    since a zero sits on or near the contour.
    """
    total = 0.0
    # arg(e^{i lam L}) moves at rate L along the real direction
    rate = max(cf.total_length, 1e-9)
    for s in range(len(corners)):
        z1, z2 = corners[s], corners[(s + 1) % len(corners)]
        n = max(1, math.ceil(abs(z2 - z1) * rate / (math.pi / 2)))
        knots = [z1 + (z2 - z1) * (k / n) for k in range(n + 1)]
        vals = [complex(cf.eval(z)) for z in knots]
        stack = [(knots[k], knots[k + 1], vals[k], vals[k + 1], 0) for k in range(n)]
        while stack:
            a_, b_, fa, fb, depth = stack.pop()
            mid = (a_ + b_) / 2
            fm = complex(cf.eval(mid))
            if min(abs(fa), abs(fm), abs(fb)) < floor:
                raise ContourError("zero on or near the contour")
            d1 = cmath.phase(fm / fa)
            d2 = cmath.phase(fb / fm)
            # Near a zero the swing concentrates in a short stretch and the
            # endpoint jump aliases mod 2 pi; the midpoint half-jumps and
            # the magnitude variation both blow up there, so gate on them.
            steady = max(abs(fa), abs(fm), abs(fb)) < 8.0 * min(
                abs(fa), abs(fm), abs(fb)
            )
            if abs(d1) < math.pi / 2 and abs(d2) < math.pi / 2 and steady:
                total += d1 + d2
                continue
            if depth >= 48:
                raise ContourError("phase change does not settle, zero too close")
            stack.append((mid, b_, fm, fb, depth + 1))
            stack.append((a_, mid, fa, fm, depth + 1))
    return total


def _rect_corners(re0, re1, im0, im1) -> list[complex]:
    return [
        complex(re0, im0),
        complex(re1, im0),
        complex(re1, im1),
        complex(re0, im1),
    ]


def _winding_number(cf, re0, re1, im0, im1, floor) -> int:
    total = _phase_winding(cf, _rect_corners(re0, re1, im0, im1), floor)
    w = total / (2 * math.pi)
    if abs(w - round(w)) > 0.25:
        raise ContourError(f"winding number {w:.3f} is not close to an integer")
    return int(round(w))


def _zeros_in_rect(cf, re0, re1, im0, im1, floor, tol, depth=0) -> list[complex]:
    w = _winding_number(cf, re0, re1, im0, im1, floor)
    if w == 0:
        return []
    size = max(re1 - re0, im1 - im0)
    center = complex((re0 + re1) / 2, (im0 + im1) / 2)
    slack = max(10 * tol, 1e-3 * size)
    if w == 1:
        z = _newton(cf, center)
        # Accept only a strictly interior limit: Newton may converge to a
        # different zero just outside the cell while the counted one is
        # inside, and any zero actually on the boundary would have tripped
        # the floor guard already.
        if re0 <= z.real <= re1 and im0 <= z.imag <= im1:
            return [z]
        # Newton escaped the cell; shrink it further below.
    if size < 64 * tol or depth >= 40:
        # Either a multiple zero (the winding never isolates to one) or a
        # stubborn cell: polish from the center and let the rank test assign
        # the multiplicity.
        z = _newton(cf, center, mult=w)
        if not (re0 - slack <= z.real <= re1 + slack and im0 - slack <= z.imag <= im1 + slack):
            z = center
        return [z] * w
    # Quadrisect, nudging the split lines off any zero they would graze.
    for fraction in (0.5, 0.43, 0.57, 0.36, 0.64):
        rm = re0 + fraction * (re1 - re0)
        im_ = im0 + fraction * (im1 - im0)
        try:
            zeros = []
            for (ra, rb, ia, ib) in (
                (re0, rm, im0, im_),
                (rm, re1, im0, im_),
                (re0, rm, im_, im1),
                (rm, re1, im_, im1),
            ):
                zeros.extend(_zeros_in_rect(cf, ra, rb, ia, ib, floor, tol, depth + 1))
            return zeros
        except ContourError:
            continue
    # Every split grazes the zero set.  Around an m-fold zero the secular
    # function dips below the evaluation floor on a whole disk, so once the
    # cell center is inside that basin subdivision cannot make progress;
    # report the winding-weighted center and let the rank test refine it.
    if abs(complex(cf.eval(center))) < 1e3 * floor:
        z = _newton(cf, center, mult=w)
        if not (re0 - slack <= z.real <= re1 + slack and im0 - slack <= z.imag <= im1 + slack):
            z = center
        return [z] * w
    raise ContourError("could not separate zeros by subdivision")


def spectrum_complex(
    a: GEndomorphism,
    lengths=None,
    rect=None,
    *,
    residual_tol: float = RESIDUAL_TOL,
    rank_rtol: float = RANK_RTOL,
    dedupe_radius: float = DEDUPE_RADIUS,
) -> SpectrumReport:
    """Complex zeros of the secular function inside a rectangle.

    The winding number of the secular function around the rectangle counts
    the enclosed zeros; recursive subdivision isolates them and Newton
    iteration polishes each one.  If a zero sits on the contour the
    rectangle is perturbed slightly and the computation retried, up to five
    times.  The report's ``winding`` field carries the total count as an
    independent check on the listed multiplicities.
    """
    if lengths is None:
        lengths = a.graph.lengths()
    lengths = np.asarray(lengths, dtype=float)
    if rect is None:
        raise ValueError("contour solver needs a rectangle")
    window = rect if isinstance(rect, Window) else Window.rect(*rect)
    if window.is_real_interval or math.isinf(window.im_min) or math.isinf(window.im_max):
        raise ValueError("contour solver needs finite imaginary bounds")
    cf = char_function(a, lengths)
    warnings: list[str] = []
    if len(cf.poly.terms) <= 1:
        warnings.append(
            "secular function is a single exponential with no zeros; empty spectrum"
        )
        return SpectrumReport("contour", window, (), tuple(warnings), winding=0)

    scale = cf.scale or 1.0
    floor = 1e-13 * scale
    re0, re1 = window.re_min, window.re_max
    im0, im1 = window.im_min, window.im_max
    pad = 0.0
    zeros: list[complex] | None = None
    total_winding = 0
    size = max(re1 - re0, im1 - im0)
    for attempt in range(5):
        try:
            total_winding = _winding_number(
                cf, re0 - pad, re1 + pad, im0 - pad, im1 + pad, floor
            )
            zeros = _zeros_in_rect(
                cf, re0 - pad, re1 + pad, im0 - pad, im1 + pad, floor, residual_tol
            )
            break
        except ContourError:
            pad = (attempt + 1) * max(residual_tol, 1e-7) * (1.0 + size)
            if attempt == 4:
                raise
    assert zeros is not None
    if pad > 0:
        warnings.append(f"contour perturbed outward by {pad:.2e} to avoid a zero")

    # Group nearby candidates; unresolved cells emit a zero once per unit of
    # winding, so the group size hints the algebraic multiplicity.
    groups: list[list[complex]] = []
    for z in sorted(zeros, key=lambda v: (v.real, v.imag)):
        if groups and abs(z - groups[-1][-1]) <= dedupe_radius:
            groups[-1].append(z)
        else:
            groups.append([z])

    entries = []
    reported = 0
    for grp in groups:
        hint = len(grp)
        z = _polish_mult(cf, _newton(cf, sum(grp) / hint, mult=hint), hint)
        if not window.contains(z, slack=pad + dedupe_radius):
            continue
        entry = _entry(a, lengths, cf, z, rank_rtol)
        if entry is not None and entry.multiplicity > 1 and hint == 1:
            # a lone candidate can still sit on a multiple zero
            z2 = _polish_mult(cf, z, entry.multiplicity)
            e2 = _entry(a, lengths, cf, z2, rank_rtol)
            if e2 is not None:
                z, entry = z2, e2
        if entry is None and hint > 1:
            # An m-fold zero located to eps**(1/m) at worst; loosen the
            # rank tolerance to match rather than drop a winding-certified
            # zero whose kernel the strict test cannot see.
            loose = max(rank_rtol, 20.0 * float(np.finfo(float).eps) ** (1.0 / hint))
            entry = _entry(a, lengths, cf, z, loose)
            if entry is not None:
                warnings.append(
                    f"rank tolerance loosened to {loose:.1e} at {z:.6g} "
                    f"(winding multiplicity {hint})"
                )
        if entry is None:
            warnings.append(f"candidate {z:.6g} rejected by rank check")
            continue
        if entry.residual > residual_tol:
            warnings.append(f"candidate {z:.6g} dropped: residual {entry.residual:.2e}")
            continue
        entries.append(entry)
        reported += entry.multiplicity
    if reported != total_winding:
        warnings.append(
            f"winding number {total_winding} and reported multiplicity sum "
            f"{reported} disagree"
        )
    return SpectrumReport(
        "contour", window, _sorted_entries(entries), tuple(warnings), winding=total_winding
    )


# -- boundary conditions beyond graphs of edge maps ----------------------


def general_eigencondition(
    b: BoundarySubspace,
    lengths,
    lam: complex,
    rank_rtol: float = RANK_RTOL,
) -> int:
    """Eigenvalue multiplicity of ``lam`` under an arbitrary boundary subspace.

    Solutions of the scalar equation at ``lam`` have traces spanned by
    ``start_e + exp(-i lam l_e) end_e``; the multiplicity is the dimension
    of the intersection of that solution span with ``b``, computed from the
    rank of the stacked bases.  Conditions whose dimension differs from the
    edge count make every complex number an eigenvalue of the full spectrum
    problem; this function still reports the pointwise count.
    """
    space = b.space
    if space.rank != 1:
        raise ValueError("general eigencondition is implemented for fibre rank 1")
    lengths = np.asarray(lengths, dtype=float)
    n = space.graph.n_edges
    decay = np.exp(-1j * lam * lengths)
    sol = space.embed_start(np.eye(n, dtype=complex)).T
    sol += space.embed_end(np.diag(decay)).T
    return linalg.intersection_dim(sol, b.matrix, rank_rtol)


def eigenfunction_residual(b: BoundarySubspace, f: Eigenfunction, lengths=None) -> float:
    """Distance of an eigenfunction's trace from the boundary subspace.

    The trace has the amplitude at each edge start and the amplitude damped
    by ``exp(-i lambda l_e)`` at each edge end; the residual is the norm of
    its component orthogonal to ``b``, normalized by the amplitude norm.
    """
    space = b.space
    if lengths is None:
        lengths = space.graph.lengths()
    lengths = np.asarray(lengths, dtype=float)
    w = np.asarray(f.amplitudes, dtype=complex)
    norm = np.linalg.norm(w)
    if norm == 0:
        raise ValueError("zero amplitude vector is not an eigenfunction")
    trace = space.embed_start(w) + space.embed_end(w * np.exp(-1j * f.eigenvalue * lengths))
    q = b.orthonormal_basis()
    resid = trace - q @ (q.conj().T @ trace) if q.size else trace
    return float(np.linalg.norm(resid) / norm)
