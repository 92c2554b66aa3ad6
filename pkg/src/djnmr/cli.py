"""Command-line front end.

Exit codes: 0 success, 2 validation error, 1 internal error.  Validation
errors print a single ``error: <reason>`` line on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys as _sys
from pathlib import Path

from . import __version__
from .entangle import EntanglementKind, census_by_class, factorizes_over, finest_factorization
from .oracles import (
    Classification,
    algebraic_normal_form,
    build_phase_oracle,
    canonical_operators,
    classify,
    enumerate_functions,
    require_promise,
    resolve_function,
    run_dj,
)
from .nmr.compiler import compile_oracle, printed_sequence, verify_sequence
from .nmr.experiment import (
    StickSpectrum,
    format_terms,
    run_experiment,
    spectral_verdict,
    spin_patterns,
)
from .nmr.sequence import parse_sequence
from .nmr.spins import SpinSystem
from .qcore import DEFAULT_TOL


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _canonical_names(n):
    names = {}
    for op in canonical_operators(n):
        names.setdefault(op.function.key, []).append(op.name)
    return names


def _anf_text(f):
    terms = []
    for m in algebraic_normal_form(f):
        terms.append("1" if not m else "".join(f"x{q}" for q in m))
    return " + ".join(terms) if terms else "0"


def _load_system(args, n=None):
    if args.config:
        return SpinSystem.from_file(args.config)
    return SpinSystem.default(n if n is not None else args.n)


# --- subcommands -----------------------------------------------------------

def cmd_enumerate(args, out):
    n = args.n_pos if args.n_pos is not None else args.n
    funcs = enumerate_functions(n)
    names = _canonical_names(n)
    census = census_by_class(n)
    rows = []
    for f in funcs:
        ent = finest_factorization(build_phase_oracle(f))
        rows.append([
            f.key, f.bitstring, classify(f).value, ent.kind.value,
            str(ent.finest_partition), "/".join(names.get(f.key, [])),
        ])
    header = ["key", "truth_table", "class", "entanglement", "partition", "names"]
    kinds = [(k.value, census.counts[k]) for k in EntanglementKind]
    by_class = {c: sum(1 for r in rows if r[2] == c.value) for c in (Classification.CONSTANT, Classification.BALANCED)}
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        out.write(f"# total {len(rows)}\n")
        for c, count in by_class.items():
            out.write(f"# {c.value} {count}\n")
        for name, count in kinds:
            out.write(f"# {name} {count}\n")
    else:
        widths = [max(len(str(r[i])) for r in rows + [header]) for i in range(len(header))]
        fmt = "  ".join(f"{{:<{w}}}" for w in widths)
        out.write(fmt.format(*header).rstrip() + "\n")
        for r in rows:
            out.write(fmt.format(*map(str, r)).rstrip() + "\n")
        out.write(f"total: {len(rows)}\n")
        out.write("  ".join(f"{c.value}: {count}" for c, count in by_class.items()) + "\n")
        out.write("  ".join(f"{name}: {count}" for name, count in kinds) + "\n")
    return 0


def cmd_run(args, out):
    f = resolve_function(args.n, args.function)
    _, verdict = run_dj(f)
    out.write(f"function {f.bitstring} (key {f.key}), n = {f.n_bits}\n")
    out.write(f"amplitude {abs(verdict.zero_state_amplitude):.6f}, {verdict.kind.value.upper()}\n")
    return 0


def cmd_classify(args, out):
    f = resolve_function(args.n, args.function)
    kind = classify(f)
    out.write(f"function {f.bitstring} (key {f.key}), n = {f.n_bits}\n")
    out.write(f"anf: {_anf_text(f)}\n")
    out.write(f"class: {kind.value}\n")
    if kind is Classification.NEITHER:
        return 0
    oracle = build_phase_oracle(f)
    ent = finest_factorization(oracle)
    for q in range(1, f.n_bits + 1) if f.n_bits > 1 else ():
        out.write(f"factorizes over {{{q}}}: {'yes' if factorizes_over(oracle, [q]) else 'no'}\n")
    out.write(f"entanglement: {ent.kind.value} {ent.finest_partition}\n")
    return 0


def cmd_compile(args, out):
    sys = _load_system(args)
    n = sys.n_spins
    if args.printed:
        if n != 3:
            raise ValueError("printed sequences exist only for the three-spin system")
        name = args.function.upper()
        seq = printed_sequence(name, args.tau_factor)
        target = next(op.oracle for op in canonical_operators(n) if op.name == name)
    else:
        f = resolve_function(n, args.function)
        seq = compile_oracle(sys, f, args.mode)
        target = build_phase_oracle(f)
    seq.validate(sys)
    out.write(seq.to_text())
    if args.verify or args.printed:
        report = verify_sequence(sys, seq, target, args.mode)
        out.write(f"# fidelity {report.fidelity:.12f}\n")
        out.write(f"# phase-free fidelity {report.phase_free_fidelity:.12f}\n")
        out.write(f"# {'PASS' if report.passed else 'FAIL'} at 1 - {DEFAULT_TOL:g}\n")
    return 0


def cmd_simulate(args, out):
    sys = _load_system(args)
    if args.program:
        seq = parse_sequence(Path(args.program).read_text(), sys, name=args.program)
        result = run_experiment(sys, sequence=seq, mode=args.mode)
    elif args.function:
        f = resolve_function(sys.n_spins, args.function)
        require_promise(f)
        result = run_experiment(sys, f, args.mode)
    else:
        raise UsageError("simulate needs --function or --program")
    text = result.spectrum.to_csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    if args.ops:
        out.write("product operators:\n")
        out.write(format_terms(result.terms) + "\n")
    for spin, pattern in result.patterns.items():
        out.write(f"spin {spin}: {pattern}\n")
    out.write(f"spectral verdict: {result.verdict}\n")
    return 0


def cmd_spectrum_verdict(args, out):
    spectrum = StickSpectrum.from_csv(Path(args.spectrum).read_text())
    if not spectrum.lines:
        raise ValueError("spectrum has no lines")
    for spin, pattern in spin_patterns(spectrum).items():
        out.write(f"spin {spin}: {pattern}\n")
    out.write(f"spectral verdict: {spectral_verdict(spectrum)}\n")
    return 0


# --- parser ----------------------------------------------------------------

def _n(value):
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"n must be an integer, got {value!r}") from None
    if not 1 <= n <= 3:
        raise argparse.ArgumentTypeError(f"n must be in 1..3, got {n}")
    return n


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="spin-system JSON file")
    common.add_argument("--format", choices=("table", "csv"), default=argparse.SUPPRESS)

    p = _Parser(prog="djnmr", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"djnmr {__version__}")
    p.add_argument("--config", default=None, help="spin-system JSON file")
    p.add_argument("--format", choices=("table", "csv"), default="table")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    e = sub.add_parser("enumerate", parents=[common], help="list constant and balanced functions")
    e.add_argument("n_pos", nargs="?", type=_n, metavar="N")
    e.add_argument("--n", type=_n, default=3)
    e.set_defaults(func=cmd_enumerate)

    r = sub.add_parser("run", parents=[common], help="run the algorithm on one function")
    r.add_argument("--n", type=_n, default=3)
    r.add_argument("--function", required=True, help="truth-table integer or U1..U9")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("classify", parents=[common], help="classification and entangling power")
    c.add_argument("--n", type=_n, default=3)
    c.add_argument("--function", required=True)
    c.set_defaults(func=cmd_classify)

    k = sub.add_parser("compile", parents=[common], help="emit the pulse program for an oracle")
    k.add_argument("--n", type=_n, default=3, help="use the shipped spin system for n spins")
    k.add_argument("--function", required=True)
    k.add_argument("--mode", choices=("ideal", "composite"), default="ideal")
    k.add_argument("--verify", action="store_true")
    k.add_argument("--printed", action="store_true",
                   help="emit the literal published sequence for U6..U9 and verify it")
    k.add_argument("--tau-factor", default="1", help="tau = factor / J for --printed")
    k.set_defaults(func=cmd_compile)

    s = sub.add_parser("simulate", parents=[common], help="simulate the NMR experiment")
    s.add_argument("--n", type=_n, default=3)
    s.add_argument("--function")
    s.add_argument("--program", help="pulse DSL file to run instead of a compiled oracle")
    s.add_argument("--mode", choices=("ideal", "composite"), default="ideal")
    s.add_argument("--out", help="write the spectrum CSV here instead of stdout")
    s.add_argument("--ops", action="store_true", help="print the product-operator decomposition")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("spectrum-verdict", parents=[common], help="verdict from a spectrum CSV")
    v.add_argument("spectrum")
    v.set_defaults(func=cmd_spectrum_verdict)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or _sys.stdout
    err = err or _sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("a subcommand is required")
        buf = io.StringIO()
        code = args.func(args, buf)
        out.write(buf.getvalue())
        return code
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return 2
    except (ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        err.write(f"error: {msg}\n")
        return 2
    except Exception as exc:  # pragma: no cover
        err.write(f"error: internal: {exc!r}\n")
        return 1


if __name__ == "__main__":
    _sys.exit(main())
