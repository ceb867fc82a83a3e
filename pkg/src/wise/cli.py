"""Command-line workflow: ingest, score, aggregate, export, serve.

Subcommands: ``score`` (write per-view score tables), ``heatmap`` (write
heatmap matrices and long-form aggregates, optionally after a drill-down
filter), ``synth`` (generate a synthetic log plus ground truth) and
``serve`` (host the HTTP API). A JSON config file named by the WISE_CONFIG
environment variable supplies defaults; explicit flags override it.

Exit codes: 0 success, 1 I/O or validation failure, 2 norm/log warnings
when running with --strict.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import aggregation, log_io, scoring, synthlog
from .errors import WiseError
from .norm import ProcessNorm, load_norm, validate_against_log

CONFIG_ENV = "WISE_CONFIG"


def _load_config() -> dict:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise WiseError(f"{CONFIG_ENV} file must hold a JSON object")
    return doc


def _merged(args: argparse.Namespace, config: dict, key: str, default=None):
    value = getattr(args, key, None)
    if value in (None, [], False):
        value = config.get(key, default)
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wise", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_log_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--log", help="event log file")
        p.add_argument("--format", choices=("xes", "csv"), help="log format (default: by suffix)")
        p.add_argument("--case-col", dest="case_col", default=None)
        p.add_argument("--activity-col", dest="activity_col", default=None)
        p.add_argument("--time-col", dest="time_col", default=None)
        p.add_argument("--time-format", dest="time_format", default=None)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--norm", help="norm document (JSON)")
        p.add_argument("--view", help="view name, or 'all' (score only)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--threads", type=int, default=None)

    score = sub.add_parser("score", help="score every trace, write per-view tables")
    add_log_flags(score)
    add_common(score)
    score.add_argument("--strict", action="store_true", help="treat norm/log warnings as errors")

    heatmap = sub.add_parser("heatmap", help="aggregate scores per feature, write matrices")
    add_log_flags(heatmap)
    add_common(heatmap)
    heatmap.add_argument("--feature", action="append", default=None, help="repeatable")
    heatmap.add_argument(
        "--filter", action="append", default=None, metavar="FEATURE=VALUE", help="repeatable"
    )
    heatmap.add_argument("--low-quantile", dest="low_quantile", type=float, default=None)

    synth = sub.add_parser("synth", help="generate a synthetic log with ground truth")
    synth.add_argument("--spec", help="generator spec (JSON)")
    synth.add_argument("--norm", help="reference norm document (JSON)")
    synth.add_argument("--view", help="reference view (default: first)")
    synth.add_argument("--seed", type=int, default=None, help="override the seed from --spec")
    synth.add_argument("--out", help="output directory")

    serve = sub.add_parser("serve", help="host the HTTP API")
    serve.add_argument("--port", type=int, default=None)
    serve.add_argument("--host", default=None)
    serve.add_argument("--allow-dir", dest="allow_dir", default=None, help="root for session log paths")
    serve.add_argument("--cors-origin", dest="cors_origin", default=None)
    serve.add_argument("--threads", type=int, default=None)

    return parser


def _read_log(args, config):
    path = _merged(args, config, "log")
    if not path:
        raise WiseError("no --log given")
    fmt = _merged(args, config, "format")
    if not fmt:
        fmt = "csv" if Path(path).suffix.lower() == ".csv" else "xes"
    raw = Path(path).read_bytes()
    if fmt == "csv":
        mapping = log_io.ColumnMapping(
            case_col=_merged(args, config, "case_col", "case_id"),
            activity_col=_merged(args, config, "activity_col", "activity"),
            time_col=_merged(args, config, "time_col"),
            time_format=_merged(args, config, "time_format"),
        )
        return log_io.parse_csv(raw, mapping)
    return log_io.parse_xes(raw)


def _read_norm(args, config) -> ProcessNorm:
    path = _merged(args, config, "norm")
    if not path:
        raise WiseError("no --norm given")
    return load_norm(Path(path).read_bytes())


def _select_views(norm: ProcessNorm, selector: str | None):
    if selector in (None, "all"):
        return list(norm.views)
    view = norm.view(selector)
    if view is None:
        raise WiseError(f"no view named {selector!r}")
    return [view]


def _out_dir(args, config) -> Path:
    out = Path(_merged(args, config, "out", "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _safe(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in name)


def cmd_score(args, config) -> int:
    norm = _read_norm(args, config)
    log = _read_log(args, config)
    views = _select_views(norm, _merged(args, config, "view"))
    threads = int(_merged(args, config, "threads", 1) or 1)

    warnings = validate_against_log(norm, log)
    for w in warnings:
        print(f"warning: view={w.view} layer={w.layer.key}: {w.message}", file=sys.stderr)
    if warnings and _merged(args, config, "strict", False):
        print("strict mode: warnings are fatal", file=sys.stderr)
        return 2

    out = _out_dir(args, config)
    for view in views:
        table = scoring.score_log(view, log, threads=threads)
        stem = out / f"scores_{_safe(view.name)}"
        stem.with_suffix(".csv").write_text(scoring.score_table_to_csv(table), encoding="utf-8")
        stem.with_suffix(".json").write_text(scoring.score_table_to_json(table), encoding="utf-8")
        n = len(table.rows)
        mean = sum(r.normalized_score for r in table.rows) / n if n else 1.0
        print(f"view={view.name} cases={n} mean={mean:.4f}")
    return 0


def _parse_filters(raw_filters, low_quantile, view_name) -> aggregation.FilterSpec | None:
    equals = []
    for item in raw_filters or []:
        if "=" not in item:
            raise WiseError(f"bad --filter {item!r}, expected FEATURE=VALUE")
        feature, value = item.split("=", 1)
        equals.append((feature, value))
    if not equals and low_quantile is None:
        return None
    return aggregation.FilterSpec(view=view_name, equals=equals, score_quantile=low_quantile)


def cmd_heatmap(args, config) -> int:
    norm = _read_norm(args, config)
    log = _read_log(args, config)
    views = _select_views(norm, _merged(args, config, "view"))
    view = views[0]
    threads = int(_merged(args, config, "threads", 1) or 1)
    features = _merged(args, config, "feature") or []
    if not features:
        raise WiseError("no --feature given")

    table = scoring.score_log(view, log, threads=threads)
    spec = _parse_filters(
        _merged(args, config, "filter"), _merged(args, config, "low_quantile"), view.name
    )
    if spec is not None:
        log, table = aggregation.apply_filter(log, table, spec)

    out = _out_dir(args, config)
    for feature in features:
        matrix = aggregation.build_heatmap(table, log, feature)
        cells = aggregation.aggregate(table, log, feature)
        base = f"{_safe(view.name)}_{_safe(feature)}"
        (out / f"heatmap_{base}.json").write_text(
            aggregation.heatmap_to_json(matrix), encoding="utf-8"
        )
        (out / f"aggregate_{base}.csv").write_text(
            aggregation.cells_to_csv(cells), encoding="utf-8"
        )
        print(f"view={view.name} feature={feature} rows={len(matrix.rows)}")
    return 0


def cmd_synth(args, config) -> int:
    spec_path = _merged(args, config, "spec")
    if not spec_path:
        raise WiseError("no --spec given")
    spec = synthlog.load_generator_spec(Path(spec_path).read_bytes())
    seed = _merged(args, config, "seed")
    if seed is not None:
        spec = synthlog.GeneratorSpec(
            seed=int(seed),
            n_cases=spec.n_cases,
            base_sequence=spec.base_sequence,
            features=spec.features,
            injections=spec.injections,
        )
    norm = _read_norm(args, config)
    view = _select_views(norm, _merged(args, config, "view") or norm.views[0].name)[0]

    log, truth = synthlog.generate(spec, view)
    out = _out_dir(args, config)
    (out / "log.xes").write_bytes(log_io.write_xes(log))
    mapping = log_io.ColumnMapping(case_col="case_id", activity_col="activity", time_col="timestamp")
    (out / "log.csv").write_bytes(log_io.write_csv(log, mapping))
    (out / "truth.json").write_text(synthlog.ground_truth_to_json(truth), encoding="utf-8")
    print(f"cases={truth.n_cases} events={truth.event_count}")
    return 0


def cmd_serve(args, config) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(
        allow_dir=_merged(args, config, "allow_dir", "."),
        cors_origin=_merged(args, config, "cors_origin", "*"),
        threads=int(_merged(args, config, "threads", 1) or 1),
    )
    host = _merged(args, config, "host", "127.0.0.1")
    port = int(_merged(args, config, "port", 8400) or 8400)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        print(f"error: cannot bind {host}:{port}: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # uvicorn exits itself on bind failure
        print(f"error: server failed to start on {host}:{port}", file=sys.stderr)
        return 1 if exc.code else 0
    return 0


_COMMANDS = {
    "score": cmd_score,
    "heatmap": cmd_heatmap,
    "synth": cmd_synth,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _load_config()
        return _COMMANDS[args.command](args, config)
    except (WiseError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyError as exc:
        print(f"error: missing field {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
