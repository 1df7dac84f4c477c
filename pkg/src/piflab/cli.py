"""Command-line interface.

Subcommands: metrics, extract, bounds, verify, complexity, prompts, pif, rps.
Data goes to stdout or to files under --out; diagnostics go to stderr.
Exit codes: 0 success, 1 domain error (including a failed verification),
2 usage error.

Only ``pif run`` (with an HTTP backend) and ``rps --agent llm`` ever touch
the network; every other subcommand is pure computation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .arena import make_agent, make_bot, play_match, series_summary
from .bounds import sum_mod_bound, sum_mod_bound_general, sv_hash_bound
from .client import HttpBackend, MockBackend, RateLimiter, RetryPolicy
from .complexity import analyze
from .config import Config, ConfigError, load_config, merge_config
from .distributions import (
    CategoricalDist,
    EmpiricalDist,
    effect_size_w,
    empirical_from_actions,
    js_divergence,
    kl_divergence,
    tv_distance,
)
from .extractors import (
    AffineHash,
    CdfThreshold,
    ModBucket,
    RollingHash,
    SumMod,
    extract_value,
    extractor_from_dict,
    map_uniform_to_target,
    mapper_from_dict,
)
from .figures import (
    save_complexity_figure,
    save_pif_report_figure,
    save_rps_scores_figure,
)
from .prompts import get_template, list_templates, render
from .runner import (
    PifExperimentSpec,
    load_trials,
    persist_trials,
    render_report,
    run_pif,
    score_trials,
)
from .sources import IndepSourceSpec, source_from_dict
from .verify import verify_sum_mod_bound, verify_sv_hash_bound


class CliError(ValueError):
    """Domain-level CLI failure (exit code 1)."""


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + ("\n" if not text.endswith("\n") else ""))
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_json(data: dict | list, out: str | None) -> None:
    _emit(json.dumps(data, indent=2), out)


def _load_target(spec: str) -> CategoricalDist:
    text = spec.strip()
    if not text.startswith("{"):
        try:
            text = Path(spec).read_text(encoding="utf-8")
        except OSError as exc:
            raise CliError(f"cannot read target {spec!r}: {exc}") from exc
    return CategoricalDist.from_json(text)


def _parse_etas(args) -> IndepSourceSpec:
    if getattr(args, "source_spec", None):
        try:
            data = json.loads(Path(args.source_spec).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read source spec: {exc}") from exc
        spec = source_from_dict(data)
        if not isinstance(spec, IndepSourceSpec):
            raise CliError("verify/bounds thm2 needs an independent source spec")
        return spec
    if args.eta is None or args.n is None:
        raise CliError("provide --eta and --n, or --source-spec")
    eta = tuple(float(x) for x in args.eta.split(","))
    return IndepSourceSpec.iid(eta, args.n)


def _parse_extractor(spec: str):
    text = spec.strip()
    if text.startswith("{"):
        return extractor_from_dict(json.loads(text))
    parts = text.split(":")
    kind = parts[0]
    try:
        if kind in ("sum-mod", "sum_mod"):
            return SumMod(modulus=int(parts[1]))
        if kind in ("rolling", "rolling_hash"):
            return RollingHash(base=int(parts[1]), modulus=int(parts[2]))
        if kind in ("affine", "affine_hash"):
            return AffineHash(
                prime=int(parts[1]), a=int(parts[2]), b=int(parts[3]),
                buckets=int(parts[4]),
            )
    except (IndexError, ValueError) as exc:
        raise CliError(f"bad extractor spec {spec!r}: {exc}") from exc
    raise CliError(f"unknown extractor kind {kind!r}")


def _parse_mapper(spec: str):
    text = spec.strip()
    if text.startswith("{"):
        return mapper_from_dict(json.loads(text))
    parts = text.split(":")
    if parts[0] in ("mod", "mod_bucket"):
        return ModBucket()
    if parts[0] in ("cdf", "cdf_threshold"):
        try:
            return CdfThreshold(resolution=int(parts[1]))
        except (IndexError, ValueError) as exc:
            raise CliError(f"bad mapper spec {spec!r}: {exc}") from exc
    raise CliError(f"unknown mapper kind {parts[0]!r}")


def _load_cfg(args) -> Config:
    if getattr(args, "config", None):
        return load_config(args.config)
    return Config()


def _build_backend(backend_cfg: dict | None, cfg: Config, target: CategoricalDist | None):
    retry = RetryPolicy(max_attempts=cfg.max_retries)
    limiter = RateLimiter(cfg.rate_limit_per_s) if cfg.rate_limit_per_s > 0 else None
    if backend_cfg is None or backend_cfg.get("kind", "http") == "http":
        backend_cfg = backend_cfg or {}
        endpoint = backend_cfg.get("endpoint", cfg.endpoint)
        model = backend_cfg.get("model", cfg.model)
        api_key_env = backend_cfg.get("api_key_env", cfg.api_key_env)
        if not endpoint:
            raise CliError("no endpoint configured for the HTTP backend")
        return HttpBackend(
            endpoint=endpoint,
            model=model,
            api_key_env=api_key_env,
            timeout_s=cfg.timeout_s,
            retry=retry,
            rate_limiter=limiter,
        )
    mode = backend_cfg.get("mode", "sampling")
    if mode == "sampling":
        if target is None:
            raise CliError("sampling mock needs a target")
        return MockBackend.sampling(target, seed=int(backend_cfg.get("seed", 0)))
    if mode == "always":
        return MockBackend.always(backend_cfg["text"])
    if mode == "cycling":
        return MockBackend.cycling(backend_cfg["texts"])
    raise CliError(f"unknown mock mode {mode!r}")


def _cmd_metrics(args) -> int:
    target = _load_target(args.target)
    if args.empirical:
        empirical = EmpiricalDist.from_json(Path(args.empirical).read_text())
    elif args.actions:
        actions = [
            line.strip()
            for line in Path(args.actions).read_text().splitlines()
            if line.strip()
        ]
        empirical = empirical_from_actions(target.labels, actions)
    else:
        raise CliError("provide --empirical or --actions")
    _emit_json(
        {
            "js": js_divergence(empirical, target),
            "kl": kl_divergence(empirical, target),
            "tv": tv_distance(empirical, target),
            "effect_size_w": effect_size_w(empirical, target),
            "total": empirical.total,
        },
        args.out,
    )
    return 0


def _cmd_extract(args) -> int:
    if args.string is not None:
        seed_string = args.string
    elif args.stdin:
        seed_string = sys.stdin.read().rstrip("\n")
    else:
        raise CliError("provide --string or --stdin")
    extractor = _parse_extractor(args.extractor)
    value, range_size = extract_value(seed_string, extractor)
    result = {"value": value, "range": range_size}
    if args.target:
        target = _load_target(args.target)
        mapper = _parse_mapper(args.mapper)
        result["label"] = map_uniform_to_target(value, range_size, target, mapper)
    _emit_json(result, args.out)
    return 0


def _cmd_bounds(args) -> int:
    if args.family == "thm1":
        report = sv_hash_bound(
            args.A, args.delta, args.n, args.M,
            args.K, args.delta_prime, args.delta_dblprime,
        )
    else:
        spec = _parse_etas(args)
        if args.K is None:
            report = sum_mod_bound_general(spec.etas, args.M)
        else:
            report = sum_mod_bound(spec.etas, args.M, args.K, args.delta_prime)
    _emit_json(report.to_dict(), args.out)
    return 0


def _cmd_verify(args) -> int:
    if args.family == "thm1":
        report = verify_sv_hash_bound(
            args.A, args.delta, args.n, args.M,
            args.K, args.delta_prime, args.delta_dblprime,
            reps=args.reps, seed=args.seed, policy=args.policy,
        )
    else:
        spec = _parse_etas(args)
        report = verify_sum_mod_bound(
            spec.etas, args.M, args.K, args.delta_prime,
            reps=args.reps, seed=args.seed,
        )
    _emit_json(report.to_dict(), args.out)
    if not report.passed:
        print("verification FAILED", file=sys.stderr)
        return 1
    return 0


def _cmd_complexity(args) -> int:
    if args.file:
        text = Path(args.file).read_text(encoding="utf-8")
    elif args.stdin:
        text = sys.stdin.read()
    else:
        raise CliError("provide a file or --stdin")
    if args.per_line:
        items = [line for line in text.splitlines() if line]
    else:
        items = [text.rstrip("\n")]
    if args.prefix_chars is not None:
        items = [s[: args.prefix_chars] for s in items]
    reports = [analyze(s, args.alphabet_size).to_dict() for s in items]
    result: dict = {"items": reports}
    if len(reports) > 1:
        n = len(reports)
        result["aggregate"] = {
            key: sum(r[key] for r in reports) / n
            for key in ("phrase_count", "normalized_lz", "compression_ratio")
        }
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "complexity.json").write_text(json.dumps(result, indent=2) + "\n")
        rows = ["item,phrase_count,normalized_lz,original_bytes,compressed_bytes,compression_ratio"]
        for i, r in enumerate(reports):
            rows.append(
                f"{i},{r['phrase_count']},{r['normalized_lz']!r},"
                f"{r['original_bytes']},{r['compressed_bytes']},"
                f"{r['compression_ratio']!r}"
            )
        (out / "complexity.csv").write_text("\n".join(rows) + "\n")
        save_complexity_figure(reports, out / "complexity.png")
        print(f"wrote {out}/complexity.{{json,csv,png}}", file=sys.stderr)
    else:
        _emit_json(result, None)
    return 0


def _cmd_prompts(args) -> int:
    if args.action == "list":
        _emit_json(
            [
                {
                    "id": t.id,
                    "role": "system" if t.system_text else "user",
                    "placeholders": list(t.placeholders),
                    "note": t.note,
                }
                for t in list_templates()
            ],
            args.out,
        )
        return 0
    params = {}
    for item in args.param or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise CliError(f"--param needs key=value, got {item!r}")
        params[key] = value
    template = get_template(args.id)
    system_text, user_text = render(args.id, params)
    _emit(system_text if template.system_text else user_text, args.out)
    return 0


def _cmd_pif(args) -> int:
    if args.action == "score":
        records = load_trials(args.trials)
        target = _load_target(args.target)
        report = score_trials(records, target)
        _emit(render_report(report, args.format), args.out)
        return 0
    try:
        spec_data = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read experiment spec: {exc}") from exc
    spec = PifExperimentSpec.from_dict(spec_data)
    cfg = _load_cfg(args)
    backend = _build_backend(spec.backend, cfg, spec.target)
    report, records = run_pif(spec, backend)
    out_dir = args.out or cfg.out_dir
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        persist_trials(records, out / "trials.jsonl")
        (out / "report.json").write_text(render_report(report, "json") + "\n")
        (out / "report.csv").write_text(render_report(report, "csv"))
        save_pif_report_figure(report, spec.target, out / "report.png")
        print(
            f"wrote {out}/trials.jsonl and {out}/report.{{json,csv,png}}",
            file=sys.stderr,
        )
    else:
        _emit(render_report(report, "json"), None)
    return 0


def _cmd_rps(args) -> int:
    cfg = _load_cfg(args)
    backend = None
    if args.agent == "llm":
        backend = _build_backend(None, cfg, None)
    bot = make_bot(args.bot)
    results = []
    for i in range(args.seeds):
        agent = make_agent(args.agent, backend)
        results.append(play_match(agent, bot, args.games, seed=args.seed + i))
    summary = series_summary(results)
    summary.update({"agent": args.agent, "bot": args.bot, "games": args.games})
    rows = ["seed,score,wins,losses,ties,forfeits"]
    for i, r in enumerate(results):
        rows.append(
            f"{args.seed + i},{r.score},{r.wins},{r.losses},{r.ties},{r.forfeits}"
        )
    csv_text = "\n".join(rows) + "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "scores.csv").write_text(csv_text)
        (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
        save_rps_scores_figure(
            [r.score for r in results],
            f"{args.agent} vs {args.bot} ({args.games} games/match)",
            out / "scores.png",
        )
        print(f"wrote {out}/scores.{{csv,png}} and {out}/summary.json", file=sys.stderr)
    else:
        sys.stdout.write(csv_text)
        print(json.dumps(summary, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="piflab",
        description="Seeded randomness extraction and probabilistic "
        "instruction-following experiments",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metrics", help="score an empirical distribution against a target")
    p.add_argument("--target", required=True, help="target JSON (file or inline)")
    p.add_argument("--empirical", help="empirical counts JSON file")
    p.add_argument("--actions", help="file with one action label per line")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("extract", help="map a seed string to a value and label")
    p.add_argument("--string", help="seed string")
    p.add_argument("--stdin", action="store_true", help="read the seed string from stdin")
    p.add_argument("--extractor", required=True,
                   help="sum-mod:M | rolling:B:M | affine:p:a:b:M | JSON")
    p.add_argument("--mapper", default="mod", help="mod | cdf:N | JSON")
    p.add_argument("--target", help="target JSON (file or inline)")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("bounds", help="closed-form deviation bounds")
    fam = p.add_subparsers(dest="family", required=True)
    f1 = fam.add_parser("thm1", help="hash-extraction bound for band-bounded sources")
    f1.add_argument("--A", type=int, required=True, help="alphabet size")
    f1.add_argument("--delta", type=float, required=True, help="conditional band floor")
    f1.add_argument("--n", type=int, required=True, help="string length")
    f1.add_argument("--M", type=int, required=True, help="bucket count")
    f1.add_argument("--K", type=int, required=True, help="trials per estimate")
    f1.add_argument("--delta-prime", type=float, default=0.05)
    f1.add_argument("--delta-dblprime", type=float, default=0.05)
    f1.add_argument("--out")
    f2 = fam.add_parser("thm2", help="sum-mod bound for independent symbols")
    f2.add_argument("--M", type=int, required=True, help="modulus")
    f2.add_argument("--eta", help="comma-separated symbol law, used i.i.d.")
    f2.add_argument("--n", type=int, help="number of positions for --eta")
    f2.add_argument("--source-spec", help="independent source spec JSON file")
    f2.add_argument("--K", type=int, help="trials per estimate (omit for the "
                    "distribution term alone)")
    f2.add_argument("--delta-prime", type=float, default=0.05)
    f2.add_argument("--out")
    for f in (f1, f2):
        f.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("verify", help="Monte-Carlo verification of the bounds")
    fam = p.add_subparsers(dest="family", required=True)
    v1 = fam.add_parser("thm1")
    v1.add_argument("--A", type=int, required=True)
    v1.add_argument("--delta", type=float, required=True)
    v1.add_argument("--n", type=int, required=True)
    v1.add_argument("--M", type=int, required=True)
    v1.add_argument("--K", type=int, required=True)
    v1.add_argument("--delta-prime", type=float, default=0.05)
    v1.add_argument("--delta-dblprime", type=float, default=0.05)
    v1.add_argument("--reps", type=int, default=200)
    v1.add_argument("--seed", type=int, default=0)
    v1.add_argument("--policy", default="seeded-random",
                    choices=("uniform", "extreme", "seeded-random"))
    v1.add_argument("--out")
    v2 = fam.add_parser("thm2")
    v2.add_argument("--M", type=int, required=True)
    v2.add_argument("--eta")
    v2.add_argument("--n", type=int)
    v2.add_argument("--source-spec")
    v2.add_argument("--K", type=int, required=True)
    v2.add_argument("--delta-prime", type=float, default=0.05)
    v2.add_argument("--reps", type=int, default=200)
    v2.add_argument("--seed", type=int, default=0)
    v2.add_argument("--out")
    for v in (v1, v2):
        v.set_defaults(func=_cmd_verify)

    p = sub.add_parser("complexity", help="LZ76 and compression measures")
    p.add_argument("file", nargs="?", help="input file (default: use --stdin)")
    p.add_argument("--stdin", action="store_true")
    p.add_argument("--prefix-chars", type=int, help="analyze only the first N characters")
    p.add_argument("--per-line", action="store_true", help="treat each line as one item")
    p.add_argument("--alphabet-size", type=int)
    p.add_argument("--out-dir", help="write complexity.{json,csv,png} here")
    p.set_defaults(func=_cmd_complexity)

    p = sub.add_parser("prompts", help="inspect and render the prompt catalog")
    act = p.add_subparsers(dest="action", required=True)
    pl = act.add_parser("list")
    pl.add_argument("--out")
    pl.set_defaults(func=_cmd_prompts)
    pr = act.add_parser("render")
    pr.add_argument("--id", required=True)
    pr.add_argument("--param", action="append", help="key=value (repeatable)")
    pr.add_argument("--out")
    pr.set_defaults(func=_cmd_prompts)

    p = sub.add_parser("pif", help="probabilistic instruction-following runs")
    act = p.add_subparsers(dest="action", required=True)
    run = act.add_parser("run")
    run.add_argument("--spec", required=True, help="experiment spec JSON file")
    run.add_argument("--config", help="flat key=value config file")
    run.add_argument("--out", help="directory for trials.jsonl and report files")
    run.set_defaults(func=_cmd_pif)
    score = act.add_parser("score")
    score.add_argument("--trials", required=True, help="trials JSONL file")
    score.add_argument("--target", required=True)
    score.add_argument("--format", default="json", choices=("json", "csv"))
    score.add_argument("--out")
    score.set_defaults(func=_cmd_pif)

    p = sub.add_parser("rps", help="rock-paper-scissors exploitation arena")
    p.add_argument("--agent", required=True,
                   help="llm | extractor | uniform | always-<move>")
    p.add_argument("--bot", required=True, choices=("random", "frequency", "markov"))
    p.add_argument("--games", type=int, default=100)
    p.add_argument("--seeds", type=int, default=50, help="number of seeded matches")
    p.add_argument("--seed", type=int, default=0, help="first match seed")
    p.add_argument("--config")
    p.add_argument("--out", help="directory for scores.csv, summary.json, scores.png")
    p.set_defaults(func=_cmd_rps)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
