"""Command-line front end: model/experiment JSON in, CSV/JSON/tables out.

Exit codes: 0 success, 1 I/O or parse failure, 2 domain error (empty shell,
enumeration cap, ...), 3 selftest failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import __version__
from .equivalence import (
    dominated_convergence_demo,
    ensemble_convergence,
    per_site,
    ProbeSet,
    separating_observable,
    weakly_equivalent,
    write_report_csv,
)
from .errors import LatticeError
from .measurement import (
    outcome_distribution,
    sample_measurements,
    write_distribution_csv,
    write_samples_csv,
)
from .observables import (
    energy,
    magnetization,
    observable_from_name,
    read_observable_csv,
)
from .phase import DEFAULT_ENUM_CAP, ModelSpec, build_phase_space, ising_chain
from .questions import question_from_observable, question_to_json
from .selftest import run_selftest
from .spectral import BorelSet, apply_measure, spectral_measure
from .states import state_from_json, write_state_csv


class ParseFailure(Exception):
    """Bad command line, unreadable file, or malformed JSON/grammar."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse usage errors -> exit 1, not 2
        raise ParseFailure(message)


STATE_GRAMMAR = (
    "STATE is kind:key=val,... -- one of uniform | gibbs:beta=F | "
    "microcanonical:E=F[,dE=F] | grand-canonical:beta=F[,mu=F] | dirac:index=N, "
    "or @file.json holding {\"kind\": ...}"
)

OBSERVABLE_GRAMMAR = (
    "NAME is magnetization | energy | occupation | spin(I) | "
    "indicator(PRED) with PRED like magnetization==0 or energy in [-3,-1], "
    "or @file.csv with config_index,value rows"
)


def _build_parser() -> _Parser:
    parser = _Parser(prog="mackeylat", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, model=True):
        if model:
            p.add_argument("--model", required=True, help="model JSON path")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", default="table", choices=["csv", "json", "table"])

    p = sub.add_parser("enumerate", help="list every configuration with its index")
    common(p)

    p = sub.add_parser("state", help="emit the weight table of a state")
    common(p)
    p.add_argument("--state", required=True, help=STATE_GRAMMAR)

    p = sub.add_parser("measure", help="outcome distribution, or seeded sample draws")
    common(p)
    p.add_argument("--state", required=True, help=STATE_GRAMMAR)
    p.add_argument("--observable", required=True, help=OBSERVABLE_GRAMMAR)
    p.add_argument("--samples", type=int, default=0, help="emit N draws instead of the distribution")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("spectral", help="level-set decomposition of an observable (JSON)")
    common(p)
    p.add_argument("--observable", required=True, help=OBSERVABLE_GRAMMAR)
    p.add_argument("--borel", default=None, help="Borel-set JSON (inline or @file) to apply")

    p = sub.add_parser("separate", help="find a question telling two states apart")
    common(p)
    p.add_argument("--state1", required=True, help=STATE_GRAMMAR)
    p.add_argument("--state2", required=True, help=STATE_GRAMMAR)

    p = sub.add_parser("equivalent", help="weak equivalence of two states on a probe set")
    common(p)
    p.add_argument("--state1", required=True, help=STATE_GRAMMAR)
    p.add_argument("--state2", required=True, help=STATE_GRAMMAR)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--probe", action="append", default=None, help=OBSERVABLE_GRAMMAR + " (repeatable)")

    p = sub.add_parser("converge", help="ensemble comparison over growing chains")
    common(p, model=False)
    p.add_argument("--sizes", default="4,6,8,10", help="comma-separated chain lengths, ascending")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--boundary", default="open", choices=["open", "periodic"])
    p.add_argument("--probe", default="magnetization", choices=["magnetization", "energy"])
    p.add_argument("--experiment", default=None, help="experiment JSON overriding the flags")

    p = sub.add_parser("demo-ldct", help="convergence in probability without mean convergence")
    common(p, model=False)
    p.add_argument("--sizes", default="1,2,3,4,5,6,7,8", help="comma-separated chain lengths")
    p.add_argument("--bounded", action="store_true", help="use the bounded control (c=1)")

    p = sub.add_parser("selftest", help="run the built-in proposition suite")
    p.add_argument("--seed", type=int, default=0)

    return parser


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------

def _enum_cap() -> int:
    raw = os.environ.get("MACKEY_ENUM_CAP")
    if raw is None:
        return DEFAULT_ENUM_CAP
    try:
        return int(raw)
    except ValueError:
        raise ParseFailure(f"MACKEY_ENUM_CAP={raw!r} is not an integer") from None


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseFailure(f"{path}: invalid JSON: {exc}") from exc


def _load_space(args):
    try:
        spec = ModelSpec.from_json(_load_json(args.model))
    except LatticeError as exc:
        raise ParseFailure(f"{args.model}: {exc}") from exc
    return build_phase_space(spec, enum_cap=_enum_cap())


def _parse_state(space, text: str):
    if text.startswith("@"):
        return state_from_json(space, _load_json(text[1:]))
    kind, _, rest = text.partition(":")
    kv = {}
    if rest:
        for part in rest.split(","):
            key, eq, val = part.partition("=")
            if not eq:
                raise ParseFailure(f"bad state spec {text!r}: expected key=val, got {part!r}")
            kv[key.strip()] = val.strip()
    try:
        if kind == "uniform":
            doc = {"kind": "uniform"}
        elif kind == "gibbs":
            doc = {"kind": "gibbs", "beta": float(kv["beta"])}
        elif kind == "microcanonical":
            doc = {"kind": "microcanonical", "E": float(kv["E"]), "dE": float(kv.get("dE", 0.0))}
        elif kind in ("grand-canonical", "grand_canonical"):
            doc = {"kind": "grand-canonical", "beta": float(kv["beta"]), "mu": float(kv.get("mu", 0.0))}
        elif kind == "dirac":
            doc = {"kind": "dirac", "index": int(kv["index"])}
        else:
            raise ParseFailure(f"unknown state kind {kind!r}; {STATE_GRAMMAR}")
    except KeyError as exc:
        raise ParseFailure(f"state spec {text!r} is missing {exc}") from exc
    except ValueError as exc:
        raise ParseFailure(f"state spec {text!r}: {exc}") from exc
    return state_from_json(space, doc)


def _parse_observable(space, name: str):
    if name.startswith("@"):
        return read_observable_csv(space, name[1:])
    try:
        return observable_from_name(space, name)
    except LatticeError as exc:
        raise ParseFailure(str(exc)) from exc


def _parse_borel(text: str) -> BorelSet:
    obj = _load_json(text[1:]) if text.startswith("@") else None
    if obj is None:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseFailure(f"--borel: invalid JSON: {exc}") from exc
    try:
        return BorelSet.from_json(obj)
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseFailure(f"--borel: {exc}") from exc


def _parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise ParseFailure(f"--sizes: {exc}") from exc
    if not sizes:
        raise ParseFailure("--sizes: need at least one size")
    return sizes


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _write_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _emit_rows(header: list[str], rows: list[list], fmt: str, out: str | None) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        _write_text(buf.getvalue(), out)
    elif fmt == "json":
        doc = [dict(zip(header, row)) for row in rows]
        _write_text(json.dumps(doc, indent=2) + "\n", out)
    else:
        cells = [header] + [[_fmt(v) if not isinstance(v, float) else f"{v:.10g}" for v in row] for row in rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
        _write_text("\n".join(lines) + "\n", out)


def _emit_json_doc(doc, fmt: str, out: str | None) -> None:
    if fmt == "table":
        _write_text(json.dumps(doc, indent=2) + "\n", out)
    else:
        _write_text(json.dumps(doc, indent=2) + "\n", out)


def _emit_file(write_fn, args) -> None:
    """Route a module CSV writer to --out or stdout."""
    if args.out is not None:
        write_fn(args.out)
    else:
        import tempfile

        with tempfile.NamedTemporaryFile("r", suffix=".csv", delete=False) as fh:
            tmp = fh.name
        try:
            write_fn(tmp)
            with open(tmp) as fh:
                sys.stdout.write(fh.read())
        finally:
            os.unlink(tmp)


# ---------------------------------------------------------------------------
# Verbs
# ---------------------------------------------------------------------------

def _cmd_enumerate(args) -> int:
    space = _load_space(args)
    header = ["config_index"] + [
        "s" + "_".join(str(c) for c in site) for site in space.sites
    ]
    rows = [[k, *space.configuration(k)] for k in range(space.size)]
    _emit_rows(header, rows, args.format, args.out)
    return 0


def read_enumeration_csv(space, path: str) -> list[tuple[int, tuple[float, ...]]]:
    """Read back an ``enumerate`` CSV as (index, configuration) pairs."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "config_index" or len(header) != space.n_sites + 1:
            raise LatticeError(f"{path}: not an enumeration CSV for this model")
        for row in reader:
            out.append((int(row[0]), tuple(float(v) for v in row[1:])))
    return out


def read_question_csv(space, path: str):
    """Read back a ``spectral --borel`` CSV as a question."""
    from .questions import chi

    members = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["config_index"]:
            raise LatticeError(f"{path}: expected header config_index")
        members = [int(row[0]) for row in reader]
    return chi(space, members)


def _cmd_state(args) -> int:
    space = _load_space(args)
    zeta = _parse_state(space, args.state)
    if args.format == "csv":
        _emit_file(lambda path: write_state_csv(zeta, path), args)
    else:
        rows = [[k, float(w)] for k, w in enumerate(zeta.weights)]
        _emit_rows(["config_index", "weight"], rows, args.format, args.out)
    return 0


def _cmd_measure(args) -> int:
    space = _load_space(args)
    zeta = _parse_state(space, args.state)
    f = _parse_observable(space, args.observable)
    if args.samples > 0:
        draws = sample_measurements(f, zeta, args.samples, args.seed)
        if args.format == "csv":
            _emit_file(lambda path: write_samples_csv(draws, path), args)
        else:
            rows = [[k, float(v)] for k, v in enumerate(draws)]
            _emit_rows(["draw_index", "outcome"], rows, args.format, args.out)
    else:
        dist = outcome_distribution(f, zeta)
        if args.format == "csv":
            _emit_file(lambda path: write_distribution_csv(dist, path), args)
        else:
            rows = [[lam, p] for lam, p in dist.points]
            _emit_rows(["lambda", "probability"], rows, args.format, args.out)
    return 0


def _cmd_spectral(args) -> int:
    space = _load_space(args)
    f = _parse_observable(space, args.observable)
    Q = spectral_measure(f)
    if args.borel is not None:
        B = _parse_borel(args.borel)
        q = apply_measure(Q, B)
        rows = [[k] for k in sorted(q.members)]
        _emit_rows(["config_index"], rows, args.format, args.out)
    else:
        _emit_json_doc(Q.to_json(), args.format, args.out)
    return 0


def _cmd_separate(args) -> int:
    space = _load_space(args)
    z1 = _parse_state(space, args.state1)
    z2 = _parse_state(space, args.state2)
    witness = separating_observable(z1, z2)
    if witness is None:
        doc = {"separated": False, "gap": 0.0, "witness": []}
    else:
        from .states import pair

        gap = abs(pair(z1, witness) - pair(z2, witness))
        members = question_to_json(question_from_observable(witness))
        doc = {"separated": True, "gap": gap, "witness": members}
    _emit_json_doc(doc, args.format, args.out)
    return 0


def _cmd_equivalent(args) -> int:
    space = _load_space(args)
    z1 = _parse_state(space, args.state1)
    z2 = _parse_state(space, args.state2)
    names = args.probe or ["magnetization", "energy"]
    probes = ProbeSet(
        tuple(_parse_observable(space, name) for name in names), epsilon=args.epsilon
    )
    report = weakly_equivalent(z1, z2, probes)
    doc = {
        "equivalent": report.equivalent,
        "epsilon": report.epsilon,
        "gaps": [{"probe": name, "gap": gap} for name, gap in report.gaps],
    }
    _emit_json_doc(doc, args.format, args.out)
    return 0


def _cmd_converge(args) -> int:
    sizes, beta, delta, mu = _parse_sizes(args.sizes), args.beta, args.delta, args.mu
    boundary, probe_name = args.boundary, args.probe
    if args.experiment is not None:
        doc = _load_json(args.experiment)
        sizes = [int(n) for n in doc.get("sizes", sizes)]
        beta = float(doc.get("beta", beta))
        delta = float(doc.get("delta", delta))
        mu = float(doc.get("mu_chem", mu))
        boundary = doc.get("boundary", boundary)
        probe_name = doc.get("probe", probe_name)
    specs = [ising_chain(n, boundary) for n in sizes]
    builder = magnetization if probe_name == "magnetization" else energy
    report = ensemble_convergence(
        specs,
        probe_builder=lambda sp: per_site(builder(sp)),
        delta=delta,
        beta=beta,
        mu_chem=mu,
        enum_cap=_enum_cap(),
    )
    if args.format == "csv":
        _emit_file(lambda path: write_report_csv(report, path), args)
    else:
        rows = [
            [r.size, r.ensemble, r.probe_mean, r.deviation_prob, r.energy_per_site]
            for r in report.rows
        ]
        _emit_rows(
            ["size", "ensemble", "probe_mean", "deviation_prob", "energy_per_site"],
            rows,
            args.format,
            args.out,
        )
    return 0


def _cmd_demo_ldct(args) -> int:
    sizes = _parse_sizes(args.sizes)
    c_rule = (lambda space, p: 1.0) if args.bounded else None
    report = dominated_convergence_demo(sizes, c_rule=c_rule, enum_cap=_enum_cap())
    if args.format == "csv":
        _emit_file(lambda path: write_report_csv(report, path), args)
    else:
        rows = [[r.size, r.ensemble, r.probe_mean, r.deviation_prob] for r in report.rows]
        _emit_rows(["size", "ensemble", "expectation", "prob_nonzero"], rows, args.format, args.out)
    return 0


def _cmd_selftest(args) -> int:
    return 0 if run_selftest(seed=args.seed) else 3


_DISPATCH = {
    "enumerate": _cmd_enumerate,
    "state": _cmd_state,
    "measure": _cmd_measure,
    "spectral": _cmd_spectral,
    "separate": _cmd_separate,
    "equivalent": _cmd_equivalent,
    "converge": _cmd_converge,
    "demo-ldct": _cmd_demo_ldct,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except ParseFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return _DISPATCH[args.verb](args)
    except ParseFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except LatticeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
