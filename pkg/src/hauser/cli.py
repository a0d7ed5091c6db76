"""Command line wiring for the whole pipeline.

Subcommands
-----------
index build   build a reference index from a simile corpus or a triple KB
prep          turn annotated similes into literal/simile rewrite pairs
score         score candidate sets against a literal (report JSONL)
rank          rerank report rows by the combined quality/creativity/
              informativeness rule
evaluate      correlate a report with human ratings; writes CSV tables,
              a JSON summary, scatter point files, and PNG charts
agreement     inter-rater agreement table on stdout

Exit codes: 0 success, 1 partial (some inputs failed, the rest were
processed), 2 usage or configuration problem, 3 backend transport failure.

Configuration file
------------------
Plain ``key = value`` lines (no sections, no quoting):

    # one directive per line; blank lines and '#' lines are ignored
    backend_url = http://127.0.0.1:8811
    timeout = 5.0
    mode = approx
    weights = 3,2,1

Keys: backend_url, timeout, backend (stub|remote), mode (kb|approx),
index_path, ratio (three colon-separated numbers), weights (three
comma-separated numbers), seed, cache_capacity, max_in_flight,
creativity_log (true|false). Values never span lines; inline comments are
not supported, so values may contain '#'. Unknown or duplicate keys are
errors. Command-line flags always win over the file; for the backend URL
the file wins over the HAUSER_BACKEND_URL environment variable.

Every command is deterministic: rerunning with the same inputs, flags, and
seed reproduces outputs byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
from pathlib import Path
from typing import Iterator, Sequence

from .figures import render_scatter, render_sweep
from .gateway import (
    BackendConfig,
    ClassifierGateway,
    GatewayError,
    RemoteBackend,
    StubBackend,
)
from .index import MODE_KB, ReferenceIndex, read_kb_tsv
from .meta import (
    METRIC_FOR_PERSPECTIVE,
    ColumnReport,
    SweepPoint,
    evaluate_column,
    report_column,
)
from .ratings import (
    PERSPECTIVES,
    RatingsDataset,
    filter_ratings,
    read_ratings_csv,
)
from .scoring import (
    DEFAULT_WEIGHTS,
    RELEVANCE_APPROX,
    RELEVANCE_KB,
    CandidateInput,
    CandidateScore,
    QualityWeights,
    combined_rerank,
    read_report,
    relevance,
    score_candidate_set,
    write_report,
)
from .similes import (
    CorpusFormatError,
    LinkingVerbRejection,
    SimileSentence,
    extract_components,
    make_literal,
    simile_from_record,
    simile_to_record,
)
from .stats import inter_rater_agreement, pearson, spearman

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_USAGE = 2
EXIT_TRANSPORT = 3

ENV_BACKEND_URL = "HAUSER_BACKEND_URL"

SIGNIFICANCE_LEVEL = 0.05


class CliError(Exception):
    """Fatal command failure with an explicit exit code."""

    def __init__(self, message: str, exit_code: int = EXIT_USAGE):
        super().__init__(message)
        self.exit_code = exit_code


class ConfigError(CliError):
    pass


# ---------------------------------------------------------------------------
# Configuration file


def _parse_ratio(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"ratio must be three colon-separated numbers, got {text!r}")
    values = tuple(float(p) for p in parts)
    if any(v < 0 for v in values) or sum(values) <= 0:
        raise ValueError(f"ratio components must be >= 0 with a positive sum: {text!r}")
    return values


def _parse_weights(text: str) -> QualityWeights:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"weights must be three comma-separated numbers, got {text!r}")
    return QualityWeights(*(float(p) for p in parts))


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise ValueError(f"expected a positive number, got {text!r}")
    return value


def _choice(options: tuple[str, ...]):
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return text

    return parse


_CONFIG_PARSERS = {
    "backend_url": str,
    "timeout": _positive_float,
    "backend": _choice(("stub", "remote")),
    "mode": _choice((RELEVANCE_KB, RELEVANCE_APPROX)),
    "index_path": str,
    "ratio": _parse_ratio,
    "weights": _parse_weights,
    "seed": int,
    "cache_capacity": int,
    "max_in_flight": int,
    "creativity_log": _parse_bool,
}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse and type-check the key = value grammar described above."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_PARSERS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = _CONFIG_PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from exc
    return values


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, source=str(path))


def _setting(flag_value, config: dict, key: str, default=None):
    # precedence: explicit flag, then config file, then default
    if flag_value is not None:
        return flag_value
    return config.get(key, default)


# ---------------------------------------------------------------------------
# Shared input helpers


def _iter_jsonl(path: str) -> Iterator[tuple[int, object]]:
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    with handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.strip()
            if not line:
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise CliError(f"{path}:{lineno}: invalid JSON: {exc}") from exc


def _coerce_simile(record: object, where: str) -> SimileSentence | None:
    """Accept a raw sentence, {'text': ...}, or a full annotated record.

    Returns None when no comparator can be found in un-annotated text.
    """
    if isinstance(record, str):
        return extract_components(record)
    if isinstance(record, dict) and "text" in record:
        if record.get("instances"):
            return simile_from_record(record)
        return extract_components(record["text"])
    raise CorpusFormatError(f"{where}: expected a sentence or a simile record")


def _load_index(path: str) -> ReferenceIndex:
    try:
        return ReferenceIndex.load(path)
    except OSError as exc:
        raise CliError(f"cannot read index {path}: {exc}") from exc


def _open_out(path: str):
    try:
        return open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from exc


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format(v) for v in row])


# ---------------------------------------------------------------------------
# index build


def cmd_index_build(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    fraction = args.sample_frac
    if fraction is not None and not 0.0 < fraction <= 1.0:
        raise CliError(f"--sample-frac must be in (0, 1], got {fraction}")
    seed = _setting(args.seed, config, "seed", 0)
    rng = random.Random(seed)

    def keep(_) -> bool:
        return fraction is None or rng.random() < fraction

    if args.corpus:
        records = [rec for _, rec in _iter_jsonl(args.corpus) if keep(rec)]
        index = ReferenceIndex.build_from_corpus(records, source=args.corpus)
    else:
        try:
            triples = [t for t in read_kb_tsv(args.kb) if keep(t)]
        except OSError as exc:
            raise CliError(f"cannot read {args.kb}: {exc}") from exc
        index = ReferenceIndex.build_from_kb(triples, source=args.kb)
    try:
        index.save(args.out)
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc}") from exc
    print(
        f"wrote {args.out}: mode={index.mode}, records={index.meta.get('records')}, "
        f"skipped={index.meta.get('skipped')}, entries={len(index)}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# prep


def cmd_prep(args: argparse.Namespace) -> int:
    kept = no_simile = linking = failed = 0
    with _open_out(args.out) as sink:
        for lineno, record in _iter_jsonl(args.similes):
            try:
                simile = _coerce_simile(record, f"{args.similes}:{lineno}")
            except (CorpusFormatError, ValueError) as exc:
                print(f"{args.similes}:{lineno}: {exc}", file=sys.stderr)
                failed += 1
                continue
            if simile is None or not simile.instances:
                no_simile += 1
                continue
            try:
                pair = make_literal(simile)
            except LinkingVerbRejection:
                linking += 1
                continue
            row = {
                "simile": simile_to_record(simile),
                "literal": pair.literal,
                "insertion_offsets": list(pair.insertion_offsets),
            }
            sink.write(json.dumps(row, ensure_ascii=False))
            sink.write("\n")
            kept += 1
    print(
        f"kept {kept} pairs; rejected {linking} linking-verb records and "
        f"{no_simile} without a simile; {failed} lines failed"
    )
    return EXIT_PARTIAL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# score


def _candidate_inputs(record: dict, where: str) -> tuple[str, str, list[CandidateInput]]:
    for field in ("set_id", "literal", "candidates"):
        if field not in record:
            raise CorpusFormatError(f"{where}: missing {field!r}")
    candidates = []
    for entry in record["candidates"]:
        if not isinstance(entry, dict) or "id" not in entry or "text" not in entry:
            raise CorpusFormatError(f"{where}: candidates need 'id' and 'text'")
        simile = None
        if entry.get("instances"):
            simile = simile_from_record(
                {"text": entry["text"], "instances": entry["instances"]}
            )
        candidates.append(CandidateInput(entry["id"], entry["text"], simile))
    return record["set_id"], record["literal"], candidates


def _make_gateway(args: argparse.Namespace, config: dict) -> ClassifierGateway:
    backend_kind = _setting(args.backend, config, "backend", "stub")
    if backend_kind == "stub":
        backend = StubBackend()
    else:
        url = _setting(args.backend_url, config, "backend_url") or os.environ.get(
            ENV_BACKEND_URL
        )
        if not url:
            raise CliError(
                "remote backend needs a URL: pass --backend-url, set backend_url "
                f"in the config, or export {ENV_BACKEND_URL}"
            )
        timeout = _setting(None, config, "timeout", 10.0)
        backend = RemoteBackend(BackendConfig(base_url=url, timeout=timeout))
    try:
        return ClassifierGateway(
            backend,
            cache_capacity=_setting(None, config, "cache_capacity", 4096),
            max_in_flight=_setting(None, config, "max_in_flight", 8),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_score(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    index_path = _setting(args.index, config, "index_path")
    if not index_path:
        raise CliError("score needs an index: pass --index or set index_path")
    index = _load_index(index_path)
    mode = _setting(args.mode, config, "mode", RELEVANCE_APPROX)
    if (mode == RELEVANCE_KB) != (index.mode == MODE_KB):
        raise CliError(
            f"--mode {mode} does not match the index ({index.mode}); "
            "use kb with a KB index and approx with a corpus index"
        )
    weights = _setting(None, config, "weights", DEFAULT_WEIGHTS)
    apply_log = _setting(None, config, "creativity_log", True)
    gateway = _make_gateway(args, config)

    rows: list[CandidateScore] = []
    failed: list[str] = []
    total = 0
    for lineno, record in _iter_jsonl(args.sets):
        where = f"{args.sets}:{lineno}"
        total += 1
        if not isinstance(record, dict):
            print(f"{where}: expected an object", file=sys.stderr)
            failed.append(where)
            continue
        if isinstance(record.get("set_id"), str):
            where = f"{where} (set {record['set_id']})"
        try:
            set_id, literal, candidates = _candidate_inputs(record, where)
            rows.extend(
                score_candidate_set(
                    set_id,
                    literal,
                    candidates,
                    index,
                    gateway,
                    mode=mode,
                    weights=weights,
                    apply_log=apply_log,
                )
            )
        except GatewayError:
            raise
        except ValueError as exc:
            print(f"{where}: {exc}", file=sys.stderr)
            failed.append(where)
    if not rows:
        raise CliError("no set could be scored", EXIT_PARTIAL)
    rows.sort(key=lambda r: (r.set_id, r.candidate_id))
    write_report(rows, args.out)
    print(f"scored {total - len(failed)}/{total} sets -> {args.out}")
    return EXIT_PARTIAL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# rank


def cmd_rank(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if args.ratio is not None:
        try:
            ratio = _parse_ratio(args.ratio)
        except ValueError as exc:
            raise CliError(str(exc)) from exc
    else:
        ratio = config.get("ratio", (2.0, 2.0, 1.0))
    try:
        rows = read_report(args.report)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read report {args.report}: {exc}") from exc
    groups: dict[str, list[CandidateScore]] = {}
    for row in rows:
        groups.setdefault(row.set_id, []).append(row)
    skipped = []
    out_rows = []
    for set_id, group in groups.items():
        try:
            ranked = combined_rerank(group, ratio)
        except ValueError as exc:
            print(f"set {set_id}: {exc}", file=sys.stderr)
            skipped.append(set_id)
            continue
        for position, (row, key) in enumerate(ranked, 1):
            out_rows.append((set_id, position, row.candidate_id, key))
    if not out_rows:
        raise CliError("no set could be ranked", EXIT_PARTIAL)
    _write_csv(Path(args.out), ("set_id", "rank", "candidate_id", "key"), out_rows)
    print(f"ranked {len(groups) - len(skipped)}/{len(groups)} sets -> {args.out}")
    return EXIT_PARTIAL if skipped else EXIT_OK


# ---------------------------------------------------------------------------
# evaluate


def _column_report_row(report: ColumnReport, ks: Sequence[int]) -> list:
    row = [
        report.perspective,
        report.metric_name,
        report.n_candidates,
        report.pearson.coefficient,
        report.pearson.p_value,
        "yes" if report.pearson.p_value <= SIGNIFICANCE_LEVEL else "no",
        report.spearman.coefficient,
        report.spearman.p_value,
        "yes" if report.spearman.p_value <= SIGNIFICANCE_LEVEL else "no",
    ]
    for k in ks:
        row.append(report.hr.get(k))
    for k in ks:
        row.append(report.ndcg.get(k))
    row.extend([report.mrr, report.n_ranking_sets, report.degenerate_sets])
    return row


def _column_report_json(report: ColumnReport) -> dict:
    return {
        "perspective": report.perspective,
        "metric": report.metric_name,
        "n_candidates": report.n_candidates,
        "pearson": {"r": report.pearson.coefficient, "p": report.pearson.p_value},
        "spearman": {"rho": report.spearman.coefficient, "p": report.spearman.p_value},
        "hr": {str(k): v for k, v in report.hr.items()},
        "ndcg": {str(k): v for k, v in report.ndcg.items()},
        "mrr": report.mrr,
        "n_ranking_sets": report.n_ranking_sets,
        "degenerate_sets": report.degenerate_sets,
    }


def _agreement_rows(dataset: RatingsDataset, perspective: str, phase: str) -> list:
    matrix = dataset.rater_matrix(perspective)
    result = inter_rater_agreement(matrix)
    n_items = len(next(iter(matrix.values())))
    return [
        phase,
        perspective,
        len(matrix),
        n_items,
        result.mean_pearson,
        result.max_pearson,
        result.mean_spearman,
        result.max_spearman,
        ";".join(result.excluded),
    ]


def _intermetric_rows(rows: Sequence[CandidateScore]) -> list[list]:
    columns = {
        name: report_column(rows, perspective)
        for perspective, name in METRIC_FOR_PERSPECTIVE.items()
    }
    out = []
    pairs = (("Q", "C"), ("Q", "I"), ("C", "I"))
    for a, b in pairs:
        shared = sorted(set(columns[a]) & set(columns[b]))
        if len(shared) < 3:
            continue
        xs = [columns[a][key] for key in shared]
        ys = [columns[b][key] for key in shared]
        try:
            p_res = pearson(xs, ys)
            s_res = spearman(xs, ys)
        except ValueError:
            continue
        out.append(
            [a, b, len(shared), p_res.coefficient, p_res.p_value, s_res.coefficient, s_res.p_value]
        )
    return out


def _sweep_rows(
    index_paths: Sequence[str],
    sets_path: str,
    ratings: RatingsDataset,
) -> list[dict]:
    """Spearman between relevance and mean human quality per index file."""
    human = ratings.mean_scores("quality")
    probes: list[tuple[tuple[str, str], SimileSentence]] = []
    for lineno, record in _iter_jsonl(sets_path):
        if not isinstance(record, dict):
            continue
        set_id = record.get("set_id")
        for entry in record.get("candidates", ()):
            key = (set_id, entry.get("id"))
            if key not in human:
                continue
            if entry.get("instances"):
                simile = simile_from_record(
                    {"text": entry["text"], "instances": entry["instances"]}
                )
            else:
                simile = extract_components(entry.get("text", ""))
            if simile is not None and simile.instances:
                probes.append((key, simile))
    if len(probes) < 3:
        raise CliError("size sweep needs at least 3 rated, extractable candidates")
    rows = []
    for path in index_paths:
        index = _load_index(path)
        mode = RELEVANCE_KB if index.mode == MODE_KB else RELEVANCE_APPROX
        scores = [relevance(simile, index, mode=mode)[0] for _, simile in probes]
        truth = [human[key] for key, _ in probes]
        records = int(index.meta.get("records", 0))
        try:
            rho = spearman(scores, truth)
            rows.append(
                {
                    "index": path,
                    "records": records,
                    "entries": len(index),
                    "n_candidates": len(probes),
                    "rho": rho.coefficient,
                    "p_value": rho.p_value,
                    "degenerate": False,
                }
            )
        except ValueError:
            rows.append(
                {
                    "index": path,
                    "records": records,
                    "entries": len(index),
                    "n_candidates": len(probes),
                    "rho": 0.0,
                    "p_value": 1.0,
                    "degenerate": True,
                }
            )
    rows.sort(key=lambda r: (r["records"], r["entries"], r["index"]))
    return rows


def cmd_evaluate(args: argparse.Namespace) -> int:
    load_config(args.config)  # validated for early failure; evaluate has no knobs there
    ks = tuple(args.ks)
    if args.sweep_index and not args.sets:
        raise CliError("--sweep-index needs --sets to rescore relevance")
    try:
        rows = read_report(args.report)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read report {args.report}: {exc}") from exc
    raw_ratings = read_ratings_csv(args.ratings)
    removed = []
    ratings = raw_ratings
    if args.filter:
        ratings, removed = filter_ratings(raw_ratings)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    partial = False
    summary_json: dict = {"filtered": bool(args.filter), "ks": list(ks)}

    # correlation + recommendation tables, one row per perspective
    reports: list[ColumnReport] = []
    for perspective in PERSPECTIVES:
        try:
            reports.append(
                evaluate_column(
                    report_column(rows, perspective),
                    ratings,
                    perspective,
                    METRIC_FOR_PERSPECTIVE[perspective],
                    ks=ks,
                    min_candidates=args.min_candidates,
                )
            )
        except ValueError as exc:
            print(f"{perspective}: {exc}", file=sys.stderr)
            partial = True
    if not reports:
        raise CliError("no perspective could be evaluated", EXIT_PARTIAL)
    header = [
        "perspective",
        "metric",
        "n_candidates",
        "pearson_r",
        "pearson_p",
        "pearson_significant",
        "spearman_rho",
        "spearman_p",
        "spearman_significant",
        *[f"hr@{k}" for k in ks],
        *[f"ndcg@{k}" for k in ks],
        "mrr",
        "n_ranking_sets",
        "degenerate_sets",
    ]
    _write_csv(
        out_dir / "summary.csv", header, [_column_report_row(r, ks) for r in reports]
    )
    summary_json["perspectives"] = [_column_report_json(r) for r in reports]

    # pairwise correlations between the metric columns themselves
    intermetric = _intermetric_rows(rows)
    _write_csv(
        out_dir / "intermetric.csv",
        ("metric_a", "metric_b", "n", "pearson_r", "pearson_p", "spearman_rho", "spearman_p"),
        intermetric,
    )
    summary_json["intermetric"] = [
        {
            "metric_a": a,
            "metric_b": b,
            "n": n,
            "pearson_r": pr,
            "pearson_p": pp,
            "spearman_rho": sr,
            "spearman_p": sp,
        }
        for a, b, n, pr, pp, sr, sp in intermetric
    ]

    # inter-rater agreement, before filtering and (when asked) after
    agreement_rows = []
    for perspective in PERSPECTIVES:
        try:
            agreement_rows.append(_agreement_rows(raw_ratings, perspective, "before"))
        except ValueError as exc:
            print(f"agreement {perspective}: {exc}", file=sys.stderr)
            partial = True
        if args.filter:
            try:
                agreement_rows.append(_agreement_rows(ratings, perspective, "after"))
            except ValueError as exc:
                print(f"agreement {perspective} (after): {exc}", file=sys.stderr)
                partial = True
    _write_csv(
        out_dir / "agreement.csv",
        (
            "phase",
            "perspective",
            "n_raters",
            "n_candidates",
            "mean_pearson",
            "max_pearson",
            "mean_spearman",
            "max_spearman",
            "excluded",
        ),
        agreement_rows,
    )
    summary_json["agreement"] = [
        {
            "phase": row[0],
            "perspective": row[1],
            "n_raters": row[2],
            "n_candidates": row[3],
            "mean_pearson": row[4],
            "max_pearson": row[5],
            "mean_spearman": row[6],
            "max_spearman": row[7],
            "excluded": row[8].split(";") if row[8] else [],
        }
        for row in agreement_rows
    ]

    if removed:
        _write_csv(
            out_dir / "removed.csv",
            ("set_id", "candidate_id", "reason"),
            [(r.set_id, r.candidate_id, r.reason) for r in removed],
        )
    summary_json["removed"] = [
        {"set_id": r.set_id, "candidate_id": r.candidate_id, "reason": r.reason}
        for r in removed
    ]

    # scatter point files feed the charts and stand alone for external tools
    figures = not args.no_figures
    scatter_files = figures or args.emit_scatter
    if figures:
        (out_dir / "figures").mkdir(exist_ok=True)
    for perspective in PERSPECTIVES:
        column = report_column(rows, perspective)
        means = ratings.mean_scores(perspective)
        points = [
            (key[0], key[1], column[key], means[key])
            for key in ratings.candidates()
            if key in column and key in means
        ]
        if not points:
            continue
        if scatter_files:
            _write_csv(
                out_dir / f"scatter_{perspective}.csv",
                ("set_id", "candidate_id", "metric", "human"),
                points,
            )
        if figures:
            render_scatter(
                [p[2] for p in points],
                [p[3] for p in points],
                out_dir / "figures" / f"scatter_{perspective}.png",
                metric_label=METRIC_FOR_PERSPECTIVE[perspective],
                title=f"{perspective} vs mean human rating",
            )

    # reference-data size sweep over prebuilt indexes
    if args.sweep_index:
        sweep = _sweep_rows(args.sweep_index, args.sets, ratings)
        _write_csv(
            out_dir / "sweep.csv",
            ("index", "records", "entries", "n_candidates", "spearman_rho", "p_value", "degenerate"),
            [
                (
                    r["index"],
                    r["records"],
                    r["entries"],
                    r["n_candidates"],
                    r["rho"],
                    r["p_value"],
                    r["degenerate"],
                )
                for r in sweep
            ],
        )
        summary_json["sweep"] = sweep
        if figures and sweep:
            top = max(max(r["records"], 1) for r in sweep)
            points = [
                SweepPoint(
                    fraction=max(r["records"], 1) / top,
                    n_records=r["records"],
                    rho=r["rho"],
                    p_value=r["p_value"],
                    degenerate=r["degenerate"],
                )
                for r in sweep
            ]
            render_sweep(points, out_dir / "figures" / "sweep.png", title="reference data size")

    with open(out_dir / "summary.json", "w", encoding="utf-8") as handle:
        json.dump(summary_json, handle, indent=2, sort_keys=True)
        handle.write("\n")
    print(f"evaluation written to {out_dir}")
    return EXIT_PARTIAL if partial else EXIT_OK


# ---------------------------------------------------------------------------
# agreement


def cmd_agreement(args: argparse.Namespace) -> int:
    load_config(args.config)
    dataset = read_ratings_csv(args.ratings)
    rows = [_agreement_rows(dataset, args.perspective, "before")]
    if args.filter:
        filtered, _ = filter_ratings(dataset)
        rows.append(_agreement_rows(filtered, args.perspective, "after"))
    header = (
        "phase",
        "perspective",
        "n_raters",
        "n_candidates",
        "mean_pearson",
        "max_pearson",
        "mean_spearman",
        "max_spearman",
        "excluded",
    )
    print("\t".join(header))
    for row in rows:
        print("\t".join(_format(v) for v in row))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_config(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value configuration file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hauser",
        description="Score generated similes and evaluate the metrics against human ratings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    index_p = sub.add_parser("index", help="reference index maintenance")
    index_sub = index_p.add_subparsers(dest="index_command", required=True)
    build_p = index_sub.add_parser("build", help="build an index file")
    source = build_p.add_mutually_exclusive_group(required=True)
    source.add_argument("--corpus", help="simile corpus, one JSON record per line")
    source.add_argument("--kb", help="triple KB, tab-separated")
    build_p.add_argument("--out", required=True, help="index file to write")
    build_p.add_argument(
        "--sample-frac",
        type=float,
        help="keep each record with this probability (reproducible via --seed)",
    )
    build_p.add_argument("--seed", type=int, help="sampling seed (default 0)")
    _add_config(build_p)
    build_p.set_defaults(func=cmd_index_build)

    prep_p = sub.add_parser("prep", help="derive literal/simile rewrite pairs")
    prep_p.add_argument("--similes", required=True, help="JSONL of similes")
    prep_p.add_argument("--out", required=True, help="JSONL of rewrite pairs")
    _add_config(prep_p)
    prep_p.set_defaults(func=cmd_prep)

    score_p = sub.add_parser("score", help="score candidate sets")
    score_p.add_argument("--sets", required=True, help="JSONL of candidate sets")
    score_p.add_argument("--index", help="reference index file")
    score_p.add_argument(
        "--mode", choices=(RELEVANCE_KB, RELEVANCE_APPROX), help="relevance mode"
    )
    score_p.add_argument("--backend", choices=("stub", "remote"), help="classifier backend")
    score_p.add_argument("--backend-url", help="remote backend base URL")
    score_p.add_argument("--out", required=True, help="report JSONL to write")
    _add_config(score_p)
    score_p.set_defaults(func=cmd_score)

    rank_p = sub.add_parser("rank", help="rerank report rows")
    rank_p.add_argument("--report", required=True, help="report JSONL")
    rank_p.add_argument("--ratio", help="quality:creativity:informativeness, e.g. 2:2:1")
    rank_p.add_argument("--out", required=True, help="ranking CSV to write")
    _add_config(rank_p)
    rank_p.set_defaults(func=cmd_rank)

    eval_p = sub.add_parser("evaluate", help="compare a report against human ratings")
    eval_p.add_argument("--report", required=True, help="report JSONL")
    eval_p.add_argument("--ratings", required=True, help="ratings CSV")
    eval_p.add_argument(
        "--filter", action="store_true", help="drop flagged and divided candidates first"
    )
    eval_p.add_argument("--out", required=True, help="output directory")
    eval_p.add_argument(
        "--no-figures", action="store_true", help="skip PNG charts (tables only)"
    )
    eval_p.add_argument(
        "--emit-scatter",
        action="store_true",
        help="write scatter point files even when charts are off",
    )
    eval_p.add_argument(
        "--ks",
        type=int,
        nargs="+",
        default=[1, 3],
        help="cutoffs for HR@k and NDCG@k (default: 1 3)",
    )
    eval_p.add_argument(
        "--min-candidates",
        type=int,
        default=3,
        help="smallest set size that enters the ranking metrics",
    )
    eval_p.add_argument(
        "--sweep-index",
        nargs="+",
        help="prebuilt index files for a reference-data size sweep",
    )
    eval_p.add_argument("--sets", help="candidate sets JSONL (needed for --sweep-index)")
    _add_config(eval_p)
    eval_p.set_defaults(func=cmd_evaluate)

    agree_p = sub.add_parser("agreement", help="inter-rater agreement table")
    agree_p.add_argument("--ratings", required=True, help="ratings CSV")
    agree_p.add_argument(
        "--perspective", choices=PERSPECTIVES, default="quality", help="rating perspective"
    )
    agree_p.add_argument(
        "--filter", action="store_true", help="also report agreement after filtering"
    )
    _add_config(agree_p)
    agree_p.set_defaults(func=cmd_agreement)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except GatewayError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
