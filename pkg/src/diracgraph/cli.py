"""Command line interface.

Subcommands: validate, index, spectrum, charpoly, trails, topology,
selfadjoint.  Standard output carries exactly one machine readable payload
(JSON unless another format is selected); all diagnostics go to standard
error.  Exit codes: 0 success, 1 domain refusal (valid input, no answer of
the requested kind), 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .adjacency import (
    CoefficientProfile,
    build_adjacency,
    charpoly_via_collections,
    topology_from_coefficients,
)
from .boundary import (
    adjoint_condition,
    endomorphism_from_subspace,
    graph_of,
    index as boundary_index,
    is_unitary,
    scalar_cokernel_dim,
    scalar_kernel_dim,
    self_adjointness_witness,
)
from .charpoly import (
    char_poly,
    detect_commensurable,
    specialize_univariate,
    univariate_to_string,
)
from .errors import DiracGraphError, InputFormatError
from .graph import validate as validate_graph
from .jsonio import (
    decomposition_to_json,
    endomorphism_to_json,
    load_boundary,
    load_graph,
    multipoly_to_json,
    parse_decomposition,
    profile_to_json,
    report_to_csv,
    report_to_json,
    topology_to_json,
)
from .spectrum import (
    Window,
    spectrum_complex,
    spectrum_exact_commensurable,
    spectrum_numeric,
)
from .trails import (
    decomposition_to_permutation,
    enumerate_g_permutations,
    longest_trail_from_spectrum,
    permutation_spectrum,
    permutation_to_decomposition,
)

EXIT_OK = 0
EXIT_REFUSAL = 1
EXIT_BAD_INPUT = 2

# Length ratios are only treated as commensurable up to this denominator;
# beyond it the specialized polynomial degree would be impractical and the
# lengths are handled as incommensurable instead.
MAX_DENOMINATOR = 1000


def _emit(payload, fmt: str, pretty_lines=None) -> None:
    if fmt == "pretty" and pretty_lines is not None:
        for line in pretty_lines:
            print(line)
        return
    if fmt == "csv" and isinstance(payload, str):
        sys.stdout.write(payload)
        return
    print(json.dumps(payload, indent=2))


def _warn(message: str) -> None:
    print(message, file=sys.stderr)


def _load_valid_graph(path):
    g = load_graph(path)
    problems = validate_graph(g)
    if problems:
        raise DiracGraphError("invalid graph: " + "; ".join(problems))
    return g


def _resolve_endomorphism(bc, g):
    """Edge map behind a boundary condition, or a refusal."""
    if bc.endomorphism is not None:
        return bc.endomorphism
    endo = endomorphism_from_subspace(bc.subspace)
    if endo is None:
        raise DiracGraphError(
            "boundary subspace is not the graph of a vertex-compatible edge "
            "map; only pointwise multiplicity queries are available for it"
        )
    return endo


# -- subcommands ---------------------------------------------------------


def cmd_validate(args) -> int:
    g = load_graph(args.graph)
    problems = validate_graph(g)
    payload = {"valid": not problems, "violations": problems}
    lines = ["valid"] if not problems else [f"violation: {p}" for p in problems]
    _emit(payload, args.format, lines)
    return EXIT_OK if not problems else EXIT_REFUSAL


def cmd_index(args) -> int:
    g = _load_valid_graph(args.graph)
    bc = load_boundary(args.bc, g)
    sub = bc.subspace if bc.subspace is not None else graph_of(bc.endomorphism)
    idx = boundary_index(sub)
    payload = {"index": idx}
    lines = [f"index = {idx}"]
    if args.verify:
        kernel = scalar_kernel_dim(sub)
        coker = scalar_cokernel_dim(sub)
        payload.update({"kernel": kernel, "cokernel": coker})
        lines.append(f"kernel = {kernel}, cokernel = {coker}")
        if kernel - coker != idx:
            _warn(
                f"index identity violated numerically: {kernel} - {coker} != {idx}"
            )
    _emit(payload, args.format, lines)
    return EXIT_OK


def _report_payload(report, args):
    if args.format == "csv":
        return report_to_csv(report)
    return report_to_json(report)


def _report_lines(report):
    lines = [f"solver: {report.solver}"]
    for e in report.eigenvalues:
        lines.append(
            f"  {e.value.real:+.12g} {e.value.imag:+.12g}i  "
            f"mult={e.multiplicity}  residual={e.residual:.2e}"
        )
    if not report.eigenvalues:
        lines.append("  (empty)")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    return lines


def cmd_spectrum(args) -> int:
    g = _load_valid_graph(args.graph)
    bc = load_boundary(args.bc, g)
    window = Window.real(*args.window)
    rect = Window.rect(*args.rect) if args.rect else None

    if bc.kind == "subspace" and bc.subspace.dim != g.n_edges:
        _warn(
            f"boundary subspace has dimension {bc.subspace.dim}, edge count is "
            f"{g.n_edges}: the spectrum is the whole complex plane"
        )
        payload = {
            "solver": "none",
            "spectrum_is_all_of_C": True,
            "eigenvalues": [],
            "warnings": ["dimension differs from edge count"],
        }
        _emit(payload, args.format, ["spectrum = C (dimension mismatch)"])
        return EXIT_OK

    a = _resolve_endomorphism(bc, g)
    lengths = g.lengths()
    commensurable = detect_commensurable(lengths, max_denominator=MAX_DENOMINATOR)

    mode = args.mode
    if mode is None:
        if args.rect is not None:
            mode = "contour"
        elif commensurable is not None:
            mode = "exact"
        elif is_unitary(a, 1e-8):
            mode = "scan"
        else:
            raise DiracGraphError(
                "edge map is not unitary and lengths are incommensurable; "
                "pass --contour with --rect to search a complex rectangle"
            )

    if mode == "exact":
        if commensurable is None:
            raise DiracGraphError(
                "edge lengths are not commensurable; use --scan or --contour"
            )
        mult, delta = commensurable
        report = spectrum_exact_commensurable(
            a, mult, delta, window, residual_tol=args.tol
        )
    elif mode == "scan":
        if not is_unitary(a, 1e-8):
            _warn(
                "edge map is not unitary; the real-line scan would miss complex "
                "eigenvalues, use --contour with --rect"
            )
            raise DiracGraphError("scan refused for non-unitary edge map")
        report = spectrum_numeric(a, lengths, window, residual_tol=args.tol)
    else:
        if rect is None:
            raise DiracGraphError("contour solver needs --rect RE0 RE1 IM0 IM1")
        report = spectrum_complex(a, lengths, rect, residual_tol=args.tol)

    for w in report.warnings:
        _warn(w)
    _emit(_report_payload(report, args), args.format, _report_lines(report))
    return EXIT_OK


def cmd_charpoly(args) -> int:
    g = _load_valid_graph(args.graph)
    if args.adjacency:
        poly = charpoly_via_collections(g)
    else:
        if not args.bc:
            raise DiracGraphError("charpoly needs --bc FILE or --adjacency")
        bc = load_boundary(args.bc, g)
        poly = char_poly(_resolve_endomorphism(bc, g))

    if args.multivariate:
        payload = multipoly_to_json(poly)
        lines = [json.dumps(payload)]
        _emit(payload, args.format, lines)
        return EXIT_OK

    commensurable = detect_commensurable(g.lengths(), max_denominator=MAX_DENOMINATOR)
    if commensurable is None:
        raise DiracGraphError(
            "edge lengths are not commensurable; a univariate specialization "
            "does not exist, use --multivariate"
        )
    mult, delta = commensurable
    coeffs = specialize_univariate(poly, mult)
    if np.allclose(coeffs.imag, 0, atol=1e-9) and np.allclose(
        coeffs.real, np.round(coeffs.real), atol=1e-9
    ):
        listed = [int(round(c.real)) for c in coeffs]
    else:
        listed = [[float(c.real), float(c.imag)] for c in coeffs]
    payload = {"base_length": delta, "coeffs_low_to_high": listed}
    _emit(payload, args.format, [univariate_to_string(coeffs)])
    return EXIT_OK


def cmd_trails(args) -> int:
    g = _load_valid_graph(args.graph)
    if args.enumerate:
        perms = enumerate_g_permutations(g)
        if not perms:
            raise DiracGraphError(
                "no vertex-compatible edge permutations: in and out degrees "
                "are unbalanced"
            )
        decomps = [permutation_to_decomposition(p) for p in perms]
        payload = {
            "count": len(decomps),
            "decompositions": [decomposition_to_json(d) for d in decomps],
        }
        lines = [f"{len(decomps)} decompositions"] + [
            "  " + " | ".join(",".join(t) for t in d.trails) for d in decomps
        ]
        _emit(payload, args.format, lines)
        return EXIT_OK

    if not args.from_permutation:
        raise DiracGraphError(
            "trails needs --enumerate or --from-permutation FILE"
        )
    try:
        with open(args.from_permutation, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputFormatError(f"cannot read permutation: {exc}") from exc
    if isinstance(data, dict) and "trails" in data:
        perm = decomposition_to_permutation(parse_decomposition(data, g))
    else:
        from .jsonio import parse_boundary

        if isinstance(data, dict) and "map" in data and "type" not in data:
            data = {"type": "permutation", **data}
        bc = parse_boundary(data, g)
        if bc.permutation is None:
            raise InputFormatError("file does not describe an edge permutation")
        perm = bc.permutation
    decomp = permutation_to_decomposition(perm)

    if args.spectrum:
        report = permutation_spectrum(perm, g.lengths(), Window.real(*args.window))
        payload = _report_payload(report, args)
        if args.format != "csv":
            payload["trails"] = [list(t) for t in decomp.trails]
            try:
                length, count = longest_trail_from_spectrum(report)
                payload["longest_trail"] = {"length": length, "count": count}
            except ValueError:
                _warn("window contains no positive eigenvalue; longest trail omitted")
        _emit(payload, args.format, _report_lines(report))
        return EXIT_OK

    _emit(
        decomposition_to_json(decomp),
        args.format,
        [" -> ".join(t) for t in decomp.trails],
    )
    return EXIT_OK


def cmd_topology(args) -> int:
    g = _load_valid_graph(args.graph)
    profile = CoefficientProfile.from_graph(g, cap=args.cap)
    try:
        report = topology_from_coefficients(profile, args.k_connectivity)
    except DiracGraphError:
        _warn("graph has no cycles; girth undefined")
        raise
    payload = topology_to_json(report)
    payload["profile"] = profile_to_json(profile)
    lines = [
        f"girth = {report.girth}",
        f"loops = {report.loop_count}",
        "cycle counts: "
        + ", ".join(f"{l}: {c}" for l, c in sorted(report.cycle_counts.items())),
        "profile: " + univariate_to_string(profile.as_array()),
    ]
    _emit(payload, args.format, lines)
    return EXIT_OK


def cmd_selfadjoint(args) -> int:
    g = _load_valid_graph(args.graph)
    bc = load_boundary(args.bc, g)
    sub = bc.subspace if bc.subspace is not None else graph_of(bc.endomorphism)
    result = self_adjointness_witness(sub, subspace_tol=args.tol)
    if not result.ok:
        _warn(f"refused: {result.reason}")
        _emit({"selfadjoint": False, "reason": result.reason}, args.format,
              [f"refused: {result.reason}"])
        return EXIT_REFUSAL
    payload = {
        "selfadjoint": True,
        "unitary": endomorphism_to_json(result.endomorphism)["matrix"],
    }
    lines = ["self-adjoint; unitary edge map:"]
    for row in result.endomorphism.matrix:
        lines.append("  " + "  ".join(f"{x.real:+.6f}{x.imag:+.6f}i" for x in row))
    _emit(payload, args.format, lines)
    return EXIT_OK


# -- argument parsing ----------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diracgraph",
        description="Spectral analysis of first order operators on metric digraphs.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-10,
                        help="residual / subspace tolerance (default 1e-10)")
    common.add_argument("--format", choices=("json", "csv", "pretty"),
                        default="json", help="output format (default json)")
    common.add_argument("--threads", type=int, default=0,
                        help="solver thread budget; 0 means library default. "
                             "Solvers are vectorized, the flag is advisory.")
    common.add_argument("--cap", type=int, default=24,
                        help="edge count cap for exponential enumerations")
    common.add_argument("--seed", type=int, default=None,
                        help="seed for randomized helpers; core commands are "
                             "deterministic and ignore it")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common],
                       help="check a graph file for structural violations")
    p.add_argument("graph")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("index", parents=[common],
                       help="Fredholm index of a boundary condition")
    p.add_argument("graph")
    p.add_argument("--bc", required=True, help="boundary condition JSON file")
    p.add_argument("--verify", action="store_true",
                   help="also compute kernel and cokernel dimensions")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("spectrum", parents=[common],
                       help="eigenvalues of a boundary condition")
    p.add_argument("graph")
    p.add_argument("--bc", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--exact", dest="mode", action="store_const", const="exact",
                       help="force the commensurable-lengths solver")
    group.add_argument("--scan", dest="mode", action="store_const", const="scan",
                       help="force the real-line scan (unitary maps)")
    group.add_argument("--contour", dest="mode", action="store_const", const="contour",
                       help="force the complex contour solver")
    p.add_argument("--window", nargs=2, type=float, default=(-10.0, 10.0),
                   metavar=("A", "B"), help="real window (default -10 10)")
    p.add_argument("--rect", nargs=4, type=float, default=None,
                   metavar=("RE0", "RE1", "IM0", "IM1"),
                   help="complex rectangle for the contour solver")
    p.set_defaults(func=cmd_spectrum, mode=None)

    p = sub.add_parser("charpoly", parents=[common],
                       help="characteristic polynomial of an edge map")
    p.add_argument("graph")
    p.add_argument("--bc", default=None)
    p.add_argument("--adjacency", action="store_true",
                   help="use the directed edge adjacency map")
    p.add_argument("--multivariate", action="store_true",
                   help="emit the full multivariate polynomial")
    p.add_argument("--univariate", action="store_true",
                   help="specialize to one variable (default)")
    p.set_defaults(func=cmd_charpoly)

    p = sub.add_parser("trails", parents=[common],
                       help="closed trail decompositions and their spectra")
    p.add_argument("graph")
    p.add_argument("--enumerate", action="store_true",
                   help="enumerate all edge permutations as decompositions")
    p.add_argument("--from-permutation", default=None, metavar="FILE",
                   help="permutation or decomposition JSON file")
    p.add_argument("--spectrum", action="store_true",
                   help="closed-form spectrum of the given permutation")
    p.add_argument("--window", nargs=2, type=float, default=(-10.0, 10.0),
                   metavar=("A", "B"))
    p.set_defaults(func=cmd_trails)

    p = sub.add_parser("topology", parents=[common],
                       help="girth and cycle counts from the coefficient profile")
    p.add_argument("graph")
    p.add_argument("--k-connectivity", type=int, default=None,
                   help="known edge connectivity, unlocks long cycle counts")
    p.set_defaults(func=cmd_topology)

    p = sub.add_parser("selfadjoint", parents=[common],
                       help="certify a boundary condition by a unitary edge map")
    p.add_argument("graph")
    p.add_argument("--bc", required=True)
    p.set_defaults(func=cmd_selfadjoint)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputFormatError as exc:
        _warn(f"input error: {exc}")
        return EXIT_BAD_INPUT
    except DiracGraphError as exc:
        _warn(f"refused: {exc}")
        return EXIT_REFUSAL


def console() -> None:  # pragma: no cover
    sys.exit(main())
