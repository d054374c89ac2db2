"""Command-line interface.

Exit status: 0 on success (and lint without warnings), 1 when lint
reports a warning, 2 on any operational error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .agreement import cohens_kappa
from .analytics import (
    RULE_NAMES,
    CorpusReport,
    EmptyCorpusError,
    Finding,
    LintConfig,
    has_warnings,
    lint,
    matrix_to_csv,
)
from .dictionary import ApiDictionary, DictionaryError, load_dictionary, seed_dictionary
from .dot import pipeline_to_dot
from .frontend import SourceError, ast_metrics, extract_calls, load_source, parse_cells
from .pipeline import NO_MATCH, Pipeline, build_high_level, build_low_level, classify_events
from .project import ProjectError, analyze_project
from .taxonomy import Stage, UnknownStageError, stage_from_code

logger = logging.getLogger("dspipe")

EXIT_OK, EXIT_WARN, EXIT_ERROR = 0, 1, 2
DICT_ENV = "DSPIPE_DICT"
DEFAULT_GLOBS = ("*.py", "*.ipynb")
FORMATS = ("json", "dot", "text")


class CliError(Exception):
    pass


@dataclass
class Config:
    dict_path: str | None = None
    format: str = "json"
    jobs: int = 1
    lint: LintConfig = field(default_factory=LintConfig)

    def __post_init__(self) -> None:
        if self.format not in FORMATS:
            raise CliError(f"unknown format {self.format!r}")
        if self.jobs < 1:
            raise CliError("--jobs must be positive")

    def dictionary(self) -> ApiDictionary:
        path = self.dict_path or os.environ.get(DICT_ENV)
        if path:
            return load_dictionary(path)
        return seed_dictionary()


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# file analysis, possibly in worker processes
# ---------------------------------------------------------------------------

_worker_dict: ApiDictionary | None = None


def _init_worker(dictionary: ApiDictionary) -> None:
    global _worker_dict
    _worker_dict = dictionary


def _analyze(task: tuple[str, str, bool]) -> tuple[Pipeline | None, list[str]]:
    path, label, high = task
    try:
        unit = load_source(path)
    except (OSError, SourceError, UnicodeDecodeError) as exc:
        return None, [f"{label}: skipped: {exc}"]
    if high:
        p = build_high_level(unit)
        return Pipeline(label, p.level, p.sequence, p.dropped), []
    diags = []
    try:
        events = extract_calls(unit, diags)
    except SourceError as exc:
        return None, [f"{label}: skipped: {exc}"]
    return build_low_level(events, _worker_dict, label), [str(d) for d in diags]


def analyze_many(
    paths: list[Path], root: Path, dictionary: ApiDictionary, jobs: int = 1, high: bool = False
) -> list[Pipeline]:
    """Pipelines for ``paths`` sorted by relative path, regardless of ``jobs``."""
    tasks = [(str(p), p.relative_to(root).as_posix(), high) for p in paths]
    if jobs == 1 or len(tasks) < 2:
        _init_worker(dictionary)
        results = list(map(_analyze, tasks))
    else:
        chunk = max(1, len(tasks) // (jobs * 4))
        with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(dictionary,)) as pool:
            results = list(pool.map(_analyze, tasks, chunksize=chunk))
    pipelines = []
    for pipeline, diags in results:
        for d in diags:
            logger.warning("%s", d)
        if pipeline is not None:
            pipelines.append(pipeline)
    return sorted(pipelines, key=lambda p: p.source)


def collect_files(root: Path, globs: tuple[str, ...] = DEFAULT_GLOBS) -> list[Path]:
    found = set()
    for pattern in globs:
        for p in root.rglob(pattern):
            rel = p.relative_to(root).parts
            if p.is_file() and not any(part.startswith(".") or part == "__pycache__" for part in rel):
                found.add(p)
    return sorted(found)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _require_file(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise CliError(f"no such file: {path}")
    return p


def cmd_extract(args, config: Config) -> int:
    path = _require_file(args.path)
    unit = load_source(path)
    diags = []
    if args.high_level:
        pipeline = build_high_level(unit)
        events = None
    else:
        parsed = parse_cells(unit, diags)
        events = extract_calls(unit, parsed=parsed)
        pipeline = build_low_level(events, config.dictionary(), str(args.path))
    for d in diags:
        logger.warning("%s", d)

    if config.format == "dot":
        sys.stdout.write(pipeline_to_dot(pipeline, merged=args.merged))
    elif config.format == "text":
        sys.stdout.write(" -> ".join(o.stage.code for o in pipeline.sequence) + "\n")
    else:
        out = pipeline.to_json()
        if args.raw and events is not None:
            calls = []
            for event, entry in classify_events(events, config.dictionary()):
                item = event.to_json()
                item["stage"] = entry.stage.code if entry is not None else NO_MATCH
                calls.append(item)
            out["calls"] = calls
            out["ast"] = ast_metrics(unit, parsed=parsed).to_json()
        sys.stdout.write(dump_json(out))
    return EXIT_OK


def _corpus_report(root: Path, config: Config, globs, high: bool) -> CorpusReport:
    if not root.is_dir():
        raise CliError(f"not a directory: {root}")
    files = collect_files(root, tuple(globs or DEFAULT_GLOBS))
    pipelines = analyze_many(files, root, config.dictionary(), config.jobs, high)
    if not pipelines:
        raise EmptyCorpusError(f"no analyzable files under {root}")
    report = CorpusReport()
    for p in pipelines:
        report = report.merge(CorpusReport.of(p, config.lint))
    return report


def cmd_corpus(args, config: Config) -> int:
    report = _corpus_report(Path(args.dir), config, args.glob, args.high_level)
    if args.csv:
        Path(args.csv).write_text(matrix_to_csv(report.transition), encoding="utf-8")
    if config.format == "text":
        freq = report.stage_frequency
        lines = [f"pipelines: {report.n_pipelines}"]
        lines += [f"{s.code}\t{float(freq[s]):.4f}" for s in freq if freq[s]]
        sys.stdout.write("\n".join(lines) + "\n")
    elif config.format == "dot":
        raise CliError("corpus supports json and text output")
    else:
        sys.stdout.write(dump_json(report.to_json()))
    return EXIT_OK


def cmd_lint(args, config: Config) -> int:
    target = Path(args.path)
    dictionary = config.dictionary()
    if target.is_dir():
        pipelines = analyze_many(collect_files(target), target, dictionary, config.jobs)
    elif target.is_file():
        pipelines = analyze_many([target], target.parent, dictionary)
    else:
        raise CliError(f"no such file or directory: {args.path}")
    findings: list[Finding] = []
    for p in pipelines:
        findings += lint(p, config.lint)
    findings.sort(key=lambda f: f.sort_key)
    if config.format == "json":
        sys.stdout.write(dump_json([f.to_json() for f in findings]))
    else:
        sys.stdout.write("".join(f"{f}\n" for f in findings))
    return EXIT_WARN if has_warnings(findings) else EXIT_OK


def cmd_project(args, config: Config) -> int:
    model = analyze_project(args.dir, args.contributors, config.dictionary())
    for d in model.diagnostics:
        logger.warning("%s", d)
    if config.format == "dot":
        sys.stdout.write(pipeline_to_dot(model.high_level, merged=False, name=model.root))
    elif config.format == "text":
        lines = [
            f"project: {model.root}",
            "high-level (heuristic): " + " -> ".join(s.code for s in model.high_level.stages),
            "entry points: " + ", ".join(model.entry_points),
            "artifacts: " + ", ".join(f"{p} ({k.value})" for p, k in model.artifacts),
            f"coupling: {model.coupling.value}",
        ]
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        sys.stdout.write(dump_json(model.to_json()))
    return EXIT_OK


def _read_labels(path: str) -> list:
    try:
        labels = json.loads(_require_file(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise CliError(f"{path}: expected a JSON array of strings")
    return labels


def cmd_kappa(args, config: Config) -> int:
    report = cohens_kappa(_read_labels(args.file_a), _read_labels(args.file_b))
    if config.format == "text":
        sys.stdout.write(f"kappa={report.kappa:.4f} ({report.interpretation}), n={report.n}\n")
    else:
        sys.stdout.write(dump_json(report.to_json()))
    return EXIT_OK


def cmd_dict_validate(args, config: Config) -> int:
    d = load_dictionary(_require_file(args.path))
    by_stage = {s.code: 0 for s in Stage}
    for e in d.entries:
        by_stage[e.stage.code] += 1
    if config.format == "text":
        sys.stdout.write(f"ok: {len(d)} entries (version {d.version})\n")
    else:
        sys.stdout.write(dump_json({"valid": True, "version": d.version, "entries": len(d), "by_stage": by_stage}))
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _parse_rules(text: str) -> frozenset:
    rules = set()
    for name in text.split(","):
        name = name.strip().lower()
        if name not in RULE_NAMES:
            raise argparse.ArgumentTypeError(
                f"unknown rule {name!r} (choose from {', '.join(RULE_NAMES)})"
            )
        rules.add(RULE_NAMES[name])
    return frozenset(rules)


def _parse_stages(text: str) -> tuple[Stage, ...]:
    if not text.strip():
        return ()
    try:
        return tuple(stage_from_code(c) for c in text.split(","))
    except UnknownStageError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _common_flags(suppress: bool) -> argparse.ArgumentParser:
    # Flags are accepted before or after the subcommand; the subcommand copy
    # must not reset a value given before it.
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--dict", dest="dict_path", metavar="PATH", default=default(None),
                        help=f"API dictionary JSON (default: ${DICT_ENV} or the built-in seed)")
    parent.add_argument("--format", choices=FORMATS, default=default("json"))
    parent.add_argument("--jobs", type=_positive, default=default(os.cpu_count() or 1),
                        help="worker processes for multi-file commands")
    parent.add_argument("-v", "--verbose", action="store_true", default=default(False))
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dspipe",
        description="Reconstruct data-science pipelines from code and lint them.",
        parents=[_common_flags(suppress=False)],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = [_common_flags(suppress=True)]

    p = sub.add_parser("extract", parents=common, help="pipeline of one script or notebook")
    p.add_argument("path")
    p.add_argument("--high-level", action="store_true", help="use notebook headings instead of API calls")
    p.add_argument("--raw", action="store_true", help="include the call log")
    p.add_argument("--merged", action="store_true", help="DOT: one node per distinct stage")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("corpus", parents=common, help="frequency and transition statistics")
    p.add_argument("dir")
    p.add_argument("--glob", action="append", metavar="PATTERN",
                   help="file pattern to include (repeatable; default *.py and *.ipynb)")
    p.add_argument("--csv", metavar="OUT", help="write the transition matrix as CSV")
    p.add_argument("--high-level", action="store_true")
    _lint_flags(p)
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("lint", parents=common, help="anti-pattern findings")
    p.add_argument("path")
    _lint_flags(p)
    p.set_defaults(func=cmd_lint)

    p = sub.add_parser("project", parents=common, help="repository-level analysis")
    p.add_argument("dir")
    p.add_argument("--contributors", type=int, default=None)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("kappa", parents=common, help="Cohen's kappa of two label files")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.set_defaults(func=cmd_kappa)

    p = sub.add_parser("dict-validate", parents=common, help="check a dictionary file")
    p.add_argument("path")
    p.set_defaults(func=cmd_dict_validate)
    return parser


def _lint_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rules", type=_parse_rules, default=frozenset(RULE_NAMES.values()),
                   help="comma-separated subset of: " + ",".join(RULE_NAMES))
    p.add_argument("--require", type=_parse_stages, default=(Stage.EVL,),
                   help="stages whose absence is reported (default EVL)")
    p.add_argument("--jungle-min-runs", type=_positive, default=3)
    p.add_argument("--tangle-threshold", type=_positive, default=3)


def _setup_logging(verbose: bool) -> None:
    # A package handler bound to the current stderr; replaced on every call
    # so repeated in-process invocations do not stack handlers.
    log = logging.getLogger("dspipe")
    for handler in list(log.handlers):
        log.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("dspipe: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.DEBUG if verbose else logging.WARNING)
    log.propagate = False


def main(argv: list[str] | None = None) -> int:
    for stream in (sys.stdout, sys.stderr):
        if hasattr(stream, "reconfigure"):
            stream.reconfigure(encoding="utf-8")
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.verbose)
    try:
        lint_config = LintConfig()
        if hasattr(args, "rules"):
            lint_config = LintConfig(args.rules, args.require, args.jungle_min_runs, args.tangle_threshold)
        config = Config(args.dict_path, args.format, args.jobs, lint_config)
        return args.func(args, config)
    except (CliError, OSError, SourceError, DictionaryError, UnknownStageError,
            EmptyCorpusError, ProjectError, ValueError) as exc:
        print(f"dspipe: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
