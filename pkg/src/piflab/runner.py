"""Experiment harness for probabilistic instruction following runs.

A run is R sequential repetitions of K trials.  Each trial renders a prompt
pair for the chosen method, sends it through a backend, and parses the
answer into a target label.  Trials inside a repetition may run concurrently
(the trial's stream position, not scheduling order, determines any derived
randomness, so reports are reproducible).

Methods:

* "ssot":                     seeded system prompt; the response's
                              <random_string> block is captured per trial.
* "baseline":                 plain chain-of-thought system prompt.
* "external_seed_fixed":      baseline prompt with one locally generated
                              32-character seed string prepended to every
                              trial's user prompt.
* "external_seed_randomized": same, with a fresh string per trial.

Per repetition the ok-trial actions are tallied into an empirical
distribution and scored against the target (JS, KL, TV); the report carries
per-repetition results plus mean and sample standard deviation per metric.
"""

from __future__ import annotations

import json
import string as _string
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .client import Backend, BackendError, ChatRequest, complete
from .distributions import (
    CategoricalDist,
    EmpiricalDist,
    empirical_from_actions,
    js_divergence,
    kl_divergence,
    summarize,
    tv_distance,
)
from .parsing import ParseError, parse_pif_answer, parse_tagged
from .prng import CounterRng, hash64, word_at
from .prompts import format_choices, format_prob_distribution, render

_METHODS = ("ssot", "baseline", "external_seed_fixed", "external_seed_randomized")
_STATUSES = ("ok", "parse_failed", "request_failed")
_SEED_ALPHABET = _string.ascii_letters + _string.digits
_SEED_CHARS = 32

METRIC_SCALES = {"js": 1000.0, "kl": 1000.0, "tv": 100.0}


class RunnerError(ValueError):
    """Invalid run specification or trial data."""


class ExcessiveFailureError(RunnerError):
    """A repetition failed more trials than the configured fraction."""

    def __init__(self, repetition: int, failed: int, total: int, limit: float) -> None:
        super().__init__(
            f"repetition {repetition}: {failed}/{total} trials failed "
            f"(limit {limit:.0%})"
        )
        self.repetition = repetition
        self.failed = failed
        self.total = total


@dataclass(frozen=True)
class PifExperimentSpec:
    target: CategoricalDist
    method: str
    trials_per_repetition: int
    repetitions: int
    temperature: float | None = None
    max_output_tokens: int | None = None
    shuffle_labels: bool = False
    seed: int = 0
    parallelism: int = 1
    failure_abort_fraction: float = 0.2
    backend: dict | None = None

    def __post_init__(self) -> None:
        if self.method not in _METHODS:
            raise RunnerError(f"method must be one of {_METHODS}")
        if self.trials_per_repetition < 1:
            raise RunnerError("trials_per_repetition must be >= 1")
        if self.repetitions < 1:
            raise RunnerError("repetitions must be >= 1")
        if self.parallelism < 1:
            raise RunnerError("parallelism must be >= 1")
        if not 0.0 <= self.failure_abort_fraction <= 1.0:
            raise RunnerError("failure_abort_fraction must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "target": self.target.to_dict(),
            "method": self.method,
            "trials_per_repetition": self.trials_per_repetition,
            "repetitions": self.repetitions,
            "temperature": self.temperature,
            "max_output_tokens": self.max_output_tokens,
            "shuffle_labels": self.shuffle_labels,
            "seed": self.seed,
            "parallelism": self.parallelism,
            "failure_abort_fraction": self.failure_abort_fraction,
            "backend": self.backend,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PifExperimentSpec":
        try:
            target = CategoricalDist.from_dict(data["target"])
            method = data["method"]
        except KeyError as exc:
            raise RunnerError(f"spec missing key {exc.args[0]!r}") from exc
        return cls(
            target=target,
            method=method,
            trials_per_repetition=int(data.get("trials_per_repetition", 100)),
            repetitions=int(data.get("repetitions", 10)),
            temperature=data.get("temperature"),
            max_output_tokens=data.get("max_output_tokens"),
            shuffle_labels=bool(data.get("shuffle_labels", False)),
            seed=int(data.get("seed", 0)),
            parallelism=int(data.get("parallelism", 1)),
            failure_abort_fraction=float(data.get("failure_abort_fraction", 0.2)),
            backend=data.get("backend"),
        )


_TRIAL_FIELDS = (
    "repetition",
    "trial_index",
    "status",
    "parsed_label",
    "random_string",
    "latency_ms",
    "prompt_tokens",
    "completion_tokens",
    "raw_text",
)


@dataclass(frozen=True)
class TrialRecord:
    repetition: int
    trial_index: int
    status: str
    parsed_label: str | None
    random_string: str | None
    latency_ms: int
    prompt_tokens: int
    completion_tokens: int
    raw_text: str

    def __post_init__(self) -> None:
        if self.status not in _STATUSES:
            raise RunnerError(f"status must be one of {_STATUSES}")
        if (self.status == "ok") != (self.parsed_label is not None):
            raise RunnerError("status 'ok' must coincide with a parsed label")
        if self.latency_ms < 0:
            raise RunnerError("latency_ms must be >= 0")

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in _TRIAL_FIELDS}

    @classmethod
    def from_dict(cls, data: dict) -> "TrialRecord":
        missing = [name for name in _TRIAL_FIELDS if name not in data]
        if missing:
            raise RunnerError(f"trial record missing fields {missing}")
        return cls(**{name: data[name] for name in _TRIAL_FIELDS})


@dataclass(frozen=True)
class RepetitionResult:
    repetition: int
    empirical: EmpiricalDist
    js: float
    kl: float
    tv: float
    parse_failed: int
    request_failed: int

    def to_dict(self) -> dict:
        return {
            "repetition": self.repetition,
            "empirical": self.empirical.to_dict(),
            "js": self.js,
            "kl": self.kl,
            "tv": self.tv,
            "parse_failed": self.parse_failed,
            "request_failed": self.request_failed,
        }


@dataclass(frozen=True)
class RunReport:
    spec: dict
    repetitions: tuple[RepetitionResult, ...]
    metrics: dict
    parse_failed: int
    request_failed: int

    def to_dict(self) -> dict:
        return {
            "spec": dict(self.spec),
            "metrics": {k: dict(v) for k, v in self.metrics.items()},
            "failures": {
                "parse_failed": self.parse_failed,
                "request_failed": self.request_failed,
            },
            "repetitions": [r.to_dict() for r in self.repetitions],
        }


def _external_seed(spec: PifExperimentSpec, repetition: int, trial: int) -> str:
    if spec.method == "external_seed_fixed":
        rng = CounterRng(spec.seed, 0xE5)
    else:
        rng = CounterRng(spec.seed, 0xE5, repetition, trial)
    return rng.token(_SEED_CHARS, _SEED_ALPHABET)


def _trial_target_view(
    spec: PifExperimentSpec, repetition: int, trial: int
) -> CategoricalDist:
    """The target as presented in this trial's prompt (possibly reordered)."""
    if not spec.shuffle_labels:
        return spec.target
    m = spec.target.m
    base = hash64(spec.seed, 0x5F, repetition, trial)
    order = sorted(range(m), key=lambda j: word_at(base, j))
    return CategoricalDist(
        tuple(spec.target.labels[j] for j in order),
        tuple(spec.target.probs[j] for j in order),
    )


def build_request(
    spec: PifExperimentSpec, repetition: int, trial: int
) -> ChatRequest:
    view = _trial_target_view(spec, repetition, trial)
    _, user_text = render(
        "pif_user",
        {
            "choices": format_choices(view),
            "num_choices": str(view.m),
            "prob_distribution": format_prob_distribution(view),
        },
    )
    if spec.method == "ssot":
        system_text, _ = render("ssot_pif")
    else:
        system_text, _ = render("baseline_pif")
    if spec.method in ("external_seed_fixed", "external_seed_randomized"):
        _, prefix = render(
            "external_seed_user",
            {"random_string": _external_seed(spec, repetition, trial)},
        )
        user_text = f"{prefix}\n\n{user_text}"
    return ChatRequest(
        system_text=system_text,
        user_text=user_text,
        temperature=spec.temperature,
        max_output_tokens=spec.max_output_tokens,
        request_tag=f"{repetition}:{trial}",
    )


def _run_trial(
    spec: PifExperimentSpec, backend: Backend, repetition: int, trial: int
) -> TrialRecord:
    request = build_request(spec, repetition, trial)
    try:
        response = complete(backend, request)
    except BackendError:
        return TrialRecord(
            repetition=repetition,
            trial_index=trial,
            status="request_failed",
            parsed_label=None,
            random_string=None,
            latency_ms=0,
            prompt_tokens=0,
            completion_tokens=0,
            raw_text="",
        )
    random_string = parse_tagged(response.text, "random_string") or None
    try:
        label = parse_pif_answer(response.text, spec.target.labels)
        status = "ok"
    except ParseError:
        label = None
        status = "parse_failed"
    return TrialRecord(
        repetition=repetition,
        trial_index=trial,
        status=status,
        parsed_label=label,
        random_string=random_string,
        latency_ms=response.latency_ms,
        prompt_tokens=response.prompt_tokens,
        completion_tokens=response.completion_tokens,
        raw_text=response.text,
    )


def run_pif(
    spec: PifExperimentSpec, backend: Backend
) -> tuple[RunReport, list[TrialRecord]]:
    """Execute the full run; returns the report and every trial record."""
    records: list[TrialRecord] = []
    k = spec.trials_per_repetition
    for rep in range(spec.repetitions):
        indices = range(k)
        if spec.parallelism > 1:
            with ThreadPoolExecutor(max_workers=spec.parallelism) as pool:
                rep_records = list(
                    pool.map(lambda i: _run_trial(spec, backend, rep, i), indices)
                )
        else:
            rep_records = [_run_trial(spec, backend, rep, i) for i in indices]
        failed = sum(1 for r in rep_records if r.status != "ok")
        if failed / k > spec.failure_abort_fraction:
            raise ExcessiveFailureError(rep, failed, k, spec.failure_abort_fraction)
        records.extend(rep_records)
    return score_trials(records, spec.target, spec_echo=spec.to_dict()), records


def score_trials(
    records: Sequence[TrialRecord],
    target: CategoricalDist,
    spec_echo: dict | None = None,
) -> RunReport:
    """Aggregate trial records into a report; insensitive to record order."""
    if not records:
        raise RunnerError("no trial records to score")
    by_rep: dict[int, list[TrialRecord]] = {}
    for record in records:
        by_rep.setdefault(record.repetition, []).append(record)
    results = []
    for rep in sorted(by_rep):
        rep_records = sorted(by_rep[rep], key=lambda r: r.trial_index)
        actions = [r.parsed_label for r in rep_records if r.status == "ok"]
        if not actions:
            raise RunnerError(f"repetition {rep} has no ok trials to score")
        empirical = empirical_from_actions(target.labels, actions)
        results.append(
            RepetitionResult(
                repetition=rep,
                empirical=empirical,
                js=js_divergence(empirical, target),
                kl=kl_divergence(empirical, target),
                tv=tv_distance(empirical, target),
                parse_failed=sum(1 for r in rep_records if r.status == "parse_failed"),
                request_failed=sum(
                    1 for r in rep_records if r.status == "request_failed"
                ),
            )
        )
    metrics = {}
    for name in ("js", "kl", "tv"):
        mean, std = summarize([getattr(r, name) for r in results])
        scale = METRIC_SCALES[name]
        metrics[name] = {
            "mean": mean,
            "std": std,
            "scale": scale,
            "scaled_mean": round(mean * scale, 2),
            "scaled_std": round(std * scale, 2),
        }
    return RunReport(
        spec=spec_echo or {"target": target.to_dict()},
        repetitions=tuple(results),
        metrics=metrics,
        parse_failed=sum(r.parse_failed for r in results),
        request_failed=sum(r.request_failed for r in results),
    )


def trial_to_json_line(record: TrialRecord) -> str:
    return json.dumps(record.to_dict(), ensure_ascii=False, separators=(",", ":"))


def persist_trials(records: Iterable[TrialRecord], path: str | Path) -> None:
    """Write records as JSON Lines (one record per line, fixed key order)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(trial_to_json_line(record))
            fh.write("\n")


def load_trials(path: str | Path) -> list[TrialRecord]:
    """Exact inverse of ``persist_trials``; names the first corrupt line."""
    path = Path(path)
    records = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                data = json.loads(line)
                records.append(TrialRecord.from_dict(data))
            except (json.JSONDecodeError, RunnerError, TypeError) as exc:
                raise RunnerError(f"line {lineno}: corrupt trial record ({exc})") from exc
    return records


def render_report(report: RunReport, fmt: str) -> str:
    """Serialize a report as pretty JSON or as a delimited metric table."""
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2)
    if fmt == "csv":
        lines = ["metric,scale,scaled_mean,scaled_std,raw_mean,raw_std"]
        for name in ("js", "kl", "tv"):
            m = report.metrics[name]
            lines.append(
                f"{name},{m['scale']:g},{m['mean'] * m['scale']:.2f},"
                f"{m['std'] * m['scale']:.2f},{m['mean']!r},{m['std']!r}"
            )
        return "\n".join(lines) + "\n"
    raise RunnerError(f"unknown report format {fmt!r}")
