"""Experiment runner: config handling, dispatch, persistence, figures.

Seven subcommands: spectrum, cube-audit, curve-sweep, incidence, expand,
composition, verify. A run appends one JSONL record per work cell (the
record carries a wall-clock timestamp, so the JSONL is not byte-stable),
and writes deterministic artifacts: a CSV of rows, a JSON summary whose
floats are fixed to 12 significant digits, and a PNG figure rendered
from the same rows (suppress with --no-figures). Reruns with the same
config and seed reproduce the CSV and summary byte for byte.

Exit codes: 0 success; 2 when a theorem-backed identity failed (cube
identity, mixing, zero-incidence, the constant-1 incidence bounds, the
point-count interval, a composition counterexample); 3 for bad inputs,
parse failures and exceeded caps.

Multi-field sweeps follow a partial-failure policy: a field whose kernel
fails validation is recorded as skipped and the sweep continues; the run
only exits 3 when every requested field was unusable.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from . import schemas
from .caps import get_caps
from .curves import reducibility_locus_sweep, weil_check, build_curve
from .errors import TheoremViolation, ValidationError, FFExpandError
from .expansion import erdos_preset, build_ternary, expansion_report
from .field import parse_field_spec
from .graph import (build_graph, cube_identity_audit, mixing_check, spectrum,
                    field_spec)
from .harness import composition_harness, verify_battery
from .incidence import theorem_sweep
from .poly import parse_poly, validate_kernel
from .seeding import stable_seed

EXIT_OK = 0
EXIT_THEOREM = 2
EXIT_VALIDATION = 3


# ---------------------------------------------------------------------------
# Config plumbing


@dataclass
class ExperimentConfig:
    experiment: str
    fields: tuple
    kernel: Optional[str] = None
    seed: int = 0
    out: Optional[str] = None
    results: Optional[str] = None
    jobs: int = 1
    figures: bool = True
    params: dict = dc_field(default_factory=dict)

    def canonical(self) -> dict:
        return {"experiment": self.experiment, "fields": list(self.fields),
                "kernel": self.kernel, "seed": self.seed,
                "params": {k: self.params[k] for k in sorted(self.params)}}

    def hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _round12(obj):
    if isinstance(obj, float):
        return float(format(obj, ".12g"))
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return _round12(float(obj))
    return obj


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(_round12(payload), sort_keys=True, indent=2) + "\n")


def write_csv(path: Path, rows: list[dict], columns: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c, "")) for c in columns])


def append_record(path: Path, config: ExperimentConfig, payload) -> None:
    record = {"config_hash": config.hash(), "timestamp": time.time(),
              "experiment": config.experiment, "payload": _round12(payload),
              "version": __version__}
    schemas.validate(record, "record")
    with open(path, "a") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")


class _Artifacts:
    """Resolves output paths from --out and collects what was written."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.written: list[str] = []
        if config.out:
            self.base = Path(config.out)
            self.base.parent.mkdir(parents=True, exist_ok=True)
        else:
            self.base = None
        if config.results:
            self.results = Path(config.results)
        elif self.base is not None:
            self.results = self.base.with_suffix(".jsonl")
        else:
            self.results = None

    def csv_path(self) -> Optional[Path]:
        if self.base is None:
            return None
        return self.base if self.base.suffix == ".csv" else self.base.with_suffix(".csv")

    def summary_path(self) -> Optional[Path]:
        if self.base is None:
            return None
        stem = self.base.with_suffix("")
        return Path(str(stem) + "_summary.json")

    def json_path(self) -> Optional[Path]:
        if self.base is None:
            return None
        return self.base if self.base.suffix == ".json" else self.base.with_suffix(".json")

    def figure_path(self) -> Optional[Path]:
        if self.base is None or not self.config.figures:
            return None
        return self.base.with_suffix(".png")

    def record(self, payload) -> None:
        if self.results is not None:
            append_record(self.results, self.config, payload)
            if str(self.results) not in self.written:
                self.written.append(str(self.results))

    def note(self, path: Optional[Path]) -> None:
        if path is not None:
            self.written.append(str(path))


def _emit_summary(art: _Artifacts, summary: dict, to_stdout: bool = True) -> None:
    summary = {"experiment": art.config.experiment,
               "config_hash": art.config.hash(), **summary}
    schemas.validate(_round12(summary), "summary")
    path = art.summary_path() or art.json_path()
    if path is not None:
        write_json(path, summary)
        art.note(path)
    if to_stdout or path is None:
        print(json.dumps(_round12(summary), sort_keys=True))


def _parse_fields(config: ExperimentConfig):
    """(usable ctx list, skip rows). Kernel validation happens per field."""
    ctxs, skipped = [], []
    for spec in config.fields:
        try:
            ctx = parse_field_spec(spec)
            if config.kernel is not None:
                validate_kernel(parse_poly(ctx, config.kernel))
            ctxs.append(ctx)
        except FFExpandError as exc:
            skipped.append({"field": spec, "error": str(exc)})
    return ctxs, skipped


# ---------------------------------------------------------------------------
# Experiments


def _run_spectrum(config: ExperimentConfig, art: _Artifacts) -> int:
    ctxs, skipped = _parse_fields(config)
    if not ctxs:
        raise ValidationError(f"no usable fields: {skipped}")
    caps = get_caps()
    method = config.params.get("method", "auto")
    reports = []
    for ctx in ctxs:
        kernel = validate_kernel(parse_poly(ctx, config.kernel))
        g = build_graph(kernel)
        use = method
        if method == "auto":
            use = "exact" if ctx.q <= caps.dense_spectrum_q else "iterative"
        rep = spectrum(g, use, seed=config.seed).to_json()
        schemas.validate(_round12(rep), "spectral")
        reports.append(rep)
        art.record(rep)
    rows = []
    for rep in reports:
        for metric in ("lambda1", "lambda2_abs", "ratio_q56"):
            rows.append({"q": rep["q"], "kernel": rep["kernel"], "metric": metric,
                         "value": rep[metric]})
    csv_path = art.csv_path()
    if csv_path is not None:
        write_csv(csv_path, rows, ["q", "kernel", "metric", "value"])
        art.note(csv_path)
    fig = art.figure_path()
    if fig is not None and reports:
        from .figures import spectrum_figure
        art.note(Path(spectrum_figure(reports, str(fig))))
    max_ratio = max((r["ratio_q56"] for r in reports), default=0.0)
    _emit_summary(art, {"per_q": {str(r["q"]): r for r in reports},
                        "max_ratio_q56": max_ratio, "skipped": skipped})
    return EXIT_OK


def _run_cube_audit(config: ExperimentConfig, art: _Artifacts) -> int:
    ctxs, skipped = _parse_fields(config)
    if not ctxs:
        raise ValidationError(f"no usable fields: {skipped}")
    sample = config.params.get("sample")
    inject = config.params.get("inject_adjacency_fault", False)
    payloads = []
    bad = 0
    for ctx in ctxs:
        kernel = validate_kernel(parse_poly(ctx, config.kernel))
        g = build_graph(kernel)
        if inject:
            # fault-injection fixture: corrupt one adjacency entry
            g.nbrs[0, 0] = (int(g.nbrs[0, 0]) + 1) % g.n
        use_sample = sample
        if use_sample is None and ctx.q > 7:
            use_sample = 1000
        audit = cube_identity_audit(g, sample=use_sample, seed=config.seed)
        payload = audit.to_json()
        schemas.validate(_round12(payload), "cube_audit")
        payloads.append(payload)
        art.record(payload)
        bad += payload["mismatch_count"]
    csv_path = art.csv_path()
    if csv_path is not None:
        write_csv(csv_path, payloads,
                  ["q", "field", "kernel", "checked", "exhaustive", "mismatch_count"])
        art.note(csv_path)
    _emit_summary(art, {"total_mismatches": bad, "cells": payloads, "skipped": skipped})
    if bad:
        print(f"cube identity violated in {bad} cells "
              "(path counts must equal curve point counts)", file=sys.stderr)
        return EXIT_THEOREM
    return EXIT_OK


def _run_curve_sweep(config: ExperimentConfig, art: _Artifacts) -> int:
    ctxs, skipped = _parse_fields(config)
    if not ctxs:
        raise ValidationError(f"no usable fields: {skipped}")
    caps = get_caps()
    sample = config.params.get("sample")
    rows, summaries, records_by_q = [], [], {}
    weil_violations = 0
    for ctx in ctxs:
        kernel = validate_kernel(parse_poly(ctx, config.kernel))
        use_sample = sample
        if use_sample is None and ctx.q > caps.sweep_exhaustive_q:
            use_sample = 4000
        report = reducibility_locus_sweep(kernel, sample=use_sample, seed=config.seed)
        cell_weil = 0
        for rec in report.records:
            if rec.abs_irred:
                curve = build_curve(kernel, rec.params)
                if not weil_check(curve).within_interval:
                    cell_weil += 1
            rows.append({"q": report.q, "a": rec.params.a, "b": rec.params.b,
                         "c": rec.params.c, "d": rec.params.d, "N": rec.N,
                         "D": rec.D, "abs_irred": rec.abs_irred})
        weil_violations += cell_weil
        summary = report.summary()
        summary["weil_violations"] = cell_weil
        schemas.validate(_round12(summary), "curve_sweep")
        summaries.append(summary)
        records_by_q[report.q] = report.records
        art.record(summary)
    csv_path = art.csv_path()
    if csv_path is not None:
        write_csv(csv_path, rows, ["q", "a", "b", "c", "d", "N", "D", "abs_irred"])
        art.note(csv_path)
    fig = art.figure_path()
    if fig is not None and summaries:
        from .figures import curve_sweep_figure
        art.note(Path(curve_sweep_figure(summaries, records_by_q, str(fig))))
    _emit_summary(art, {"cells": summaries, "weil_violations": weil_violations,
                        "skipped": skipped})
    if weil_violations:
        print(f"{weil_violations} absolutely irreducible curves fell outside "
              "the point-count interval", file=sys.stderr)
        return EXIT_THEOREM
    return EXIT_OK


def _run_incidence(config: ExperimentConfig, art: _Artifacts) -> int:
    theorem = int(config.params.get("theorem", 1))
    variant = {1: "line", 2: "polygraph", 3: "kernel"}.get(theorem)
    if variant is None:
        raise ValidationError(f"theorem must be 1, 2 or 3, got {theorem}")
    if variant == "kernel" and not config.kernel:
        raise ValidationError("theorem 3 sweeps need --kernel")
    config = config if variant == "kernel" else ExperimentConfig(
        **{**config.__dict__, "kernel": None})
    ctxs, skipped = _parse_fields(config)
    if not ctxs:
        raise ValidationError(f"no usable fields: {skipped}")
    trials = int(config.params.get("trials", 200))
    degree = int(config.params.get("degree", 2))
    sizes = config.params.get("sizes")
    kernels = None
    if variant == "kernel":
        kernels = {ctx.key: validate_kernel(parse_poly(ctx, config.kernel))
                   for ctx in ctxs}
    rows = theorem_sweep(variant, ctxs, trials, sizes=sizes, seed=config.seed,
                         kernels=kernels, degree=degree)
    for row in rows:
        schemas.validate(_round12(row), "incidence_row")
    art.record(rows[:64])
    csv_path = art.csv_path()
    columns = ["q", "variant", "trial", "p_size", "q_size", "incidences",
               "error_scale", "ratio", "collisions"]
    if csv_path is not None:
        write_csv(csv_path, rows, columns)
        art.note(csv_path)
    fig = art.figure_path()
    if fig is not None and rows:
        from .figures import incidence_figure
        art.note(Path(incidence_figure(rows, str(fig))))
    per_q = {}
    for row in rows:
        key = str(row["q"])
        per_q[key] = max(per_q.get(key, 0.0), row["ratio"])
    _emit_summary(art, {"max_ratio_per_q": per_q,
                        "max_ratio": max(per_q.values(), default=0.0),
                        "theorem": theorem, "trials": trials, "skipped": skipped})
    if variant in ("line", "polygraph") and any(
            r > 1 + 1e-9 for r in per_q.values()):
        print("an incidence instance exceeded the constant-1 bound",
              file=sys.stderr)
        return EXIT_THEOREM
    return EXIT_OK


def _parse_preset(text: str) -> dict:
    # "erdos:k=2" -> {"name": "erdos", "k": 2}
    name, _, rest = text.partition(":")
    out = {"name": name}
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            out[key.strip()] = int(val)
    return out


def _run_expand(config: ExperimentConfig, art: _Artifacts) -> int:
    ctx_specs = config.fields
    trials = int(config.params.get("trials", 1))
    sizes = config.params.get("sizes")
    densities = config.params.get("densities")
    preset = config.params.get("preset")
    caps = get_caps()
    rows = []
    skipped = []
    violations = 0
    for spec_str in ctx_specs:
        try:
            ctx = parse_field_spec(spec_str)
            for trial in range(trials):
                cell_seed = stable_seed("expand", config.seed, ctx.q, trial)
                crosscheck = bool(config.params.get(
                    "crosscheck", ctx.q <= caps.dense_spectrum_q))
                if preset:
                    info = _parse_preset(preset)
                    if info["name"] != "erdos":
                        raise ValidationError(f"unknown preset {info['name']!r}")
                    rep = erdos_preset(info.get("k", 2), ctx, sizes=sizes,
                                       densities=densities, seed=cell_seed,
                                       with_graph_crosscheck=crosscheck)
                else:
                    kernel = validate_kernel(parse_poly(ctx, config.params["F"]))
                    spec = build_ternary(kernel,
                                         parse_poly(ctx, config.params["G"]),
                                         parse_poly(ctx, config.params["H"]),
                                         parse_poly(ctx, config.params["J"]))
                    import random as _random
                    rng = _random.Random(cell_seed)
                    q = ctx.q
                    use = sizes or [q, q, q]
                    sets = [sorted(rng.sample(range(q), min(int(s), q)))
                            for s in use]
                    rep = expansion_report(spec, *sets,
                                           with_graph_crosscheck=crosscheck)
                payload = rep.to_json()
                schemas.validate(_round12(payload), "expansion")
                payload["trial"] = trial
                rows.append(payload)
                art.record(payload)
                if payload["incidence_count"] not in (None, 0):
                    violations += 1
                if payload["chain_ok"] is False:
                    violations += 1
        except FFExpandError as exc:
            skipped.append({"field": spec_str, "error": str(exc)})
    if not rows and skipped:
        raise ValidationError(f"no usable fields: {skipped}")
    csv_path = art.csv_path()
    if csv_path is not None:
        flat = [{**r, "x_size": r["sizes"][0], "y_size": r["sizes"][1],
                 "z_size": r["sizes"][2]} for r in rows]
        write_csv(csv_path, flat,
                  ["q", "trial", "x_size", "y_size", "z_size", "image_size",
                   "missing", "predicted_missing_scale", "ratio", "phi_image",
                   "phi_ratio", "incidence_count", "chain_ok"])
        art.note(csv_path)
    fig = art.figure_path()
    if fig is not None and rows:
        from .figures import expansion_figure
        art.note(Path(expansion_figure(rows, str(fig))))
    _emit_summary(art, {"cells": len(rows), "violations": violations,
                        "max_missing": max((r["missing"] for r in rows), default=0),
                        "skipped": skipped})
    if violations:
        print("zero-incidence or eigenvalue-chain identity violated",
              file=sys.stderr)
        return EXIT_THEOREM
    return EXIT_OK


def _run_composition(config: ExperimentConfig, art: _Artifacts) -> int:
    trials = int(config.params.get("trials", 500))
    payloads = []
    bad = 0
    for spec_str in config.fields:
        ctx = parse_field_spec(spec_str)
        payload = composition_harness(ctx, trials, seed=config.seed)
        schemas.validate(_round12(payload), "composition")
        payloads.append(payload)
        art.record(payload)
        bad += (payload["counterexamples"] + payload["relation_failures"]
                + payload["construction_failures"]
                + payload["additive_disagreements"])
    _emit_summary(art, {"cells": payloads, "failures": bad})
    if bad:
        print("composition harness found a counterexample; this would "
              "falsify a proven statement and therefore indicates a bug",
              file=sys.stderr)
        return EXIT_THEOREM
    return EXIT_OK


def _run_verify(config: ExperimentConfig, art: _Artifacts) -> int:
    if not config.kernel:
        raise ValidationError("verify needs --kernel")
    failures = 0
    payloads = []
    for spec_str in config.fields:
        ctx = parse_field_spec(spec_str)
        payload = verify_battery(ctx, config.kernel, seed=config.seed)
        schemas.validate(_round12(payload), "verify")
        payloads.append(payload)
        art.record(payload)
        if not payload["ok"]:
            failures += 1
    _emit_summary(art, {"cells": payloads,
                        "ok": failures == 0})
    if failures:
        print(f"{failures} verify cells failed a theorem-backed check",
              file=sys.stderr)
        return EXIT_THEOREM
    return EXIT_OK


_RUNNERS = {
    "spectrum": _run_spectrum,
    "cube-audit": _run_cube_audit,
    "curve-sweep": _run_curve_sweep,
    "incidence": _run_incidence,
    "expand": _run_expand,
    "composition": _run_composition,
    "verify": _run_verify,
}


def run(config: ExperimentConfig) -> int:
    """Dispatch one experiment; returns the process exit code."""
    art = _Artifacts(config)
    try:
        return _RUNNERS[config.experiment](config, art)
    except TheoremViolation as exc:
        print(f"theorem-backed invariant violated: {exc}", file=sys.stderr)
        return EXIT_THEOREM
    except (FFExpandError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


# ---------------------------------------------------------------------------
# Argument parsing


def _add_common(sub: argparse.ArgumentParser, kernel_required: bool = False):
    sub.add_argument("--field", action="append", dest="fields", metavar="p^n",
                     help="field spec; repeatable, or comma-separated for sweeps")
    sub.add_argument("--kernel", help='kernel polynomial, e.g. "(a+x)^2"',
                     required=False)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--out", help="primary artifact path (csv or json)")
    sub.add_argument("--results", help="JSONL results path (default: <out>.jsonl)")
    sub.add_argument("--jobs", type=int, default=None, help=argparse.SUPPRESS)
    sub.add_argument("--config", help="JSON config file; flags override it")
    fig = sub.add_mutually_exclusive_group()
    fig.add_argument("--figures", dest="figures", action="store_true", default=None)
    fig.add_argument("--no-figures", dest="figures", action="store_false")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ffexpand",
        description="incidence graphs, plane curves and polynomial expansion "
                    "experiments over small finite fields")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="experiment", required=True)

    sp = subs.add_parser("spectrum", help="eigenvalues of the incidence graph")
    _add_common(sp)
    sp.add_argument("--method", choices=["exact", "iter", "auto"], default=None)

    ca = subs.add_parser("cube-audit", help="A^3 entries vs curve point counts")
    _add_common(ca)
    ca.add_argument("--sample", type=int, default=None,
                    help="sampled tuples (default: exhaustive for q <= 7)")
    ca.add_argument("--inject-adjacency-fault", action="store_true",
                    help=argparse.SUPPRESS)

    cs = subs.add_parser("curve-sweep", help="reducibility locus sweep")
    _add_common(cs)
    cs.add_argument("--sample", type=int, default=None,
                    help="sampled parameter tuples (default: exhaustive under cap)")

    inc = subs.add_parser("incidence", help="randomised incidence sweeps")
    _add_common(inc)
    inc.add_argument("--theorem", type=int, choices=[1, 2, 3], default=None)
    inc.add_argument("--trials", type=int, default=None)
    inc.add_argument("--degree", type=int, default=None,
                     help="graph degree n for theorem 2")
    inc.add_argument("--sizes", default=None,
                     help="comma list of set sizes to draw from")

    ex = subs.add_parser("expand", help="value sets of ternary polynomials")
    _add_common(ex)
    ex.add_argument("--preset", default=None, help='e.g. "erdos:k=2"')
    ex.add_argument("--F", dest="F", default=None, help="kernel polynomial")
    ex.add_argument("--G", dest="G", default=None)
    ex.add_argument("--H", dest="H", default=None)
    ex.add_argument("--J", dest="J", default=None)
    ex.add_argument("--sizes", default=None, help="comma list: |X|,|Y|,|Z|")
    ex.add_argument("--densities", default=None, help="comma list of fractions of q")
    ex.add_argument("--trials", type=int, default=None)
    ex.add_argument("--crosscheck", dest="crosscheck", action="store_true",
                    default=None, help="force the eigenvalue chain crosscheck")

    co = subs.add_parser("composition", help="composition-lemma harness")
    _add_common(co)
    co.add_argument("--trials", type=int, default=None)

    ve = subs.add_parser("verify", help="full invariant battery at one cell")
    _add_common(ve)
    return parser


def _build_config(args: argparse.Namespace) -> ExperimentConfig:
    file_cfg = {}
    if getattr(args, "config", None):
        file_cfg = json.loads(Path(args.config).read_text())

    def pick(name, default=None):
        val = getattr(args, name, None)
        if val is None:
            val = file_cfg.get(name, default)
        return val

    raw_fields = getattr(args, "fields", None)
    if raw_fields is None:
        raw_fields = file_cfg.get("fields", file_cfg.get("field"))
    raw_fields = raw_fields or []
    if isinstance(raw_fields, str):
        raw_fields = [raw_fields]
    fields = []
    for item in raw_fields:
        fields.extend(s.strip() for s in str(item).split(",") if s.strip())
    if not fields:
        raise ValidationError("at least one --field is required")

    params = {}
    for key in ("method", "sample", "theorem", "trials", "degree", "preset",
                "F", "G", "H", "J", "densities", "crosscheck"):
        val = pick(key)
        if val is not None:
            params[key] = val
    sizes = pick("sizes")
    if sizes is not None:
        if isinstance(sizes, str):
            sizes = [int(s) for s in sizes.split(",") if s.strip()]
        params["sizes"] = list(sizes)
    densities = params.get("densities")
    if isinstance(densities, str):
        params["densities"] = [float(s) for s in densities.split(",") if s.strip()]
    if getattr(args, "inject_adjacency_fault", False):
        params["inject_adjacency_fault"] = True

    return ExperimentConfig(
        experiment=args.experiment,
        fields=tuple(fields),
        kernel=pick("kernel"),
        seed=int(pick("seed", 0) or 0),
        out=pick("out"),
        results=pick("results"),
        jobs=int(pick("jobs", 1) or 1),
        figures=bool(pick("figures", True) if pick("figures", True) is not None else True),
        params=params)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _build_config(args)
    except (FFExpandError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
