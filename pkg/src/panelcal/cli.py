"""Batch command-line interface.

Subcommands:

* ``calibrate``      fit thresholds against a human-labeled record pool
* ``review``         score panels and report corpus metrics
* ``bayes``          credible accept/reject calls per panel
* ``detector-eval``  flag-vs-label detection metrics
* ``simulate``       Monte-Carlo experiments (margins, threshold-error, variance)
* ``bound``          print one bound value (tail, margin, scalar, dkw, tau05)

Every data-producing run writes into a fresh directory under ``--out``:
a ``manifest.json`` (command, seed, input digests, UTC timestamps) is
written before any output and finalized afterwards; nothing is ever
overwritten.  Exit codes: 0 success, 2 input or config error,
3 calibration infeasible, 4 simulation property-check failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

from . import __version__, aggregate, bayes, bounds, calibrate, metrics, records, simulate
from .calibrate import ThresholdUnreachableError
from .core import (
    DecisionThresholds,
    GaussianPosterior,
    ReviewerWeights,
    ReviewPanel,
    RubricSchema,
    ScoringFunctional,
)
from .records import PanelRecord, RecordError

__all__ = ["RunManifest", "build_parser", "main", "run"]

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------- manifest


@dataclass(frozen=True)
class RunManifest:
    """Provenance for one run directory."""

    command: str
    tool_version: str
    started_at: str
    finished_at: str | None
    seed: int | None
    config_digest: str | None
    input_digests: dict[str, str]
    output_digests: dict[str, str]

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "tool_version": self.tool_version,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "seed": self.seed,
            "config_digest": self.config_digest,
            "input_digests": dict(self.input_digests),
            "output_digests": dict(self.output_digests),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunManifest":
        return cls(
            command=str(data["command"]),
            tool_version=str(data["tool_version"]),
            started_at=str(data["started_at"]),
            finished_at=None if data.get("finished_at") is None else str(data["finished_at"]),
            seed=None if data.get("seed") is None else int(data["seed"]),
            config_digest=None if data.get("config_digest") is None else str(data["config_digest"]),
            input_digests={str(k): str(v) for k, v in data.get("input_digests", {}).items()},
            output_digests={str(k): str(v) for k, v in data.get("output_digests", {}).items()},
        )


def _utc_now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(run_dir: Path, manifest: RunManifest) -> None:
    text = json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n"
    (run_dir / "manifest.json").write_text(text, encoding="utf-8")


class _Run:
    """A run directory plus its manifest lifecycle."""

    def __init__(
        self,
        out_base: str,
        command: str,
        seed: int | None,
        config_path: str | None,
        input_paths: Sequence[str],
    ) -> None:
        input_digests = {}
        for p in input_paths:
            input_digests[str(p)] = _sha256_file(Path(p))
        config_digest = None if config_path is None else _sha256_file(Path(config_path))
        ident = hashlib.sha256(
            json.dumps(
                [command, seed, config_digest, sorted(input_digests.items())],
                sort_keys=True,
            ).encode()
        ).hexdigest()[:8]
        stamp = time.strftime("%Y%m%dT%H%M%SZ", time.gmtime())
        base = Path(out_base)
        base.mkdir(parents=True, exist_ok=True)
        name = f"{command}-{stamp}-{ident}"
        run_dir = base / name
        suffix = 1
        while run_dir.exists():
            suffix += 1
            run_dir = base / f"{name}-{suffix}"
        run_dir.mkdir()
        self.dir = run_dir
        self.manifest = RunManifest(
            command=command,
            tool_version=__version__,
            started_at=_utc_now(),
            finished_at=None,
            seed=seed,
            config_digest=config_digest,
            input_digests=input_digests,
            output_digests={},
        )
        _write_manifest(run_dir, self.manifest)

    def write(self, name: str, text: str) -> Path:
        path = self.dir / name
        if path.exists():
            raise RuntimeError(f"refusing to overwrite {path}")
        path.write_text(text, encoding="utf-8")
        return path

    def finish(self) -> None:
        outputs = {
            p.name: _sha256_file(p)
            for p in sorted(self.dir.iterdir())
            if p.name != "manifest.json" and p.is_file()
        }
        self.manifest = RunManifest(
            **{
                **self.manifest.to_dict(),
                "finished_at": _utc_now(),
                "output_digests": outputs,
            }
        )
        _write_manifest(self.dir, self.manifest)
        print(f"run directory: {self.dir}")


# ---------------------------------------------------------------- config


def _config_error(message: str) -> RecordError:
    return RecordError(f"config: {message}")


def _load_config(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    return records.load_config(path)


def _schema_from_config(config: Mapping[str, Any]) -> RubricSchema | None:
    raw = config.get("schema")
    if raw is None:
        return None
    try:
        return RubricSchema.from_dict(raw)
    except (ValueError, KeyError, TypeError) as exc:
        raise _config_error(f"schema: {exc}") from exc


def _functional_from_config(
    config: Mapping[str, Any], schema: RubricSchema | None
) -> ScoringFunctional:
    raw = config.get("functional")
    if raw is None:
        if schema is not None:
            return ScoringFunctional.mean(schema.criteria_count)
        raise _config_error("functional: required when no schema is given")
    try:
        return ScoringFunctional.from_dict(raw)
    except (ValueError, KeyError, TypeError) as exc:
        raise _config_error(f"functional: {exc}") from exc


def _weights_for_panel(config: Mapping[str, Any], panel: ReviewPanel) -> ReviewerWeights:
    raw = config.get("weights", "uniform")
    if raw == "uniform":
        return ReviewerWeights.uniform(len(panel.reviews))
    if raw == "gls":
        variances = config.get("gls_variances")
        if not isinstance(variances, dict):
            raise _config_error(
                "gls_variances: required reviewer-to-variance object when weights is 'gls'"
            )
        values = []
        for reviewer in panel.reviewer_ids:
            if reviewer not in variances:
                raise _config_error(
                    f"gls_variances: no variance for reviewer {reviewer!r} "
                    f"(panel {panel.submission_id!r})"
                )
            values.append(float(variances[reviewer]))
        return aggregate.gls_weights(values)
    if not isinstance(raw, dict):
        raise _config_error("weights: must be 'uniform', 'gls', or a reviewer-to-weight object")
    values = []
    for reviewer in panel.reviewer_ids:
        if reviewer not in raw:
            raise _config_error(
                f"weights: no weight for reviewer {reviewer!r} (panel {panel.submission_id!r})"
            )
        values.append(float(raw[reviewer]))
    total = sum(values)
    if total <= 0:
        raise _config_error(
            f"weights: weights for panel {panel.submission_id!r} sum to {total}; must be > 0"
        )
    return ReviewerWeights(tuple(v / total for v in values))


def _panel_score(
    panel: ReviewPanel,
    config: Mapping[str, Any],
    schema: RubricSchema | None,
    functional: ScoringFunctional,
) -> float:
    weights = _weights_for_panel(config, panel)
    consensus = aggregate.consensus_rubric(panel, weights)
    return aggregate.score(consensus, functional, schema)


def _load_thresholds(path: str) -> DecisionThresholds:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise RecordError(f"{path}: invalid JSON: {exc.msg}") from exc
    try:
        return DecisionThresholds.from_dict(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise RecordError(f"{path}: {exc}") from exc


def _panels_from_file(path: str) -> list[ReviewPanel]:
    panels = []
    for record in records.load_panel_records(path):
        if not record.reviews:
            raise RecordError(
                f"{path}: panel {record.submission_id!r} has no reviews"
            )
        panels.append(record.to_panel())
    return panels


def _validate_panels(panels: Sequence[ReviewPanel], schema: RubricSchema | None) -> None:
    if schema is None:
        return
    for panel in panels:
        panel.validate_schema(schema)


# ---------------------------------------------------------------- calibrate


def cmd_calibrate(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    if "target_rate" not in config:
        raise _config_error("target_rate: required for calibration")
    target_rate = float(config["target_rate"])
    delta = float(config.get("delta", 0.05))
    pool = records.load_calibration_records(args.records)

    run = _Run(
        args.out,
        "calibrate",
        args.seed,
        args.config,
        [args.records],
    )

    used = pool
    plan = None
    if "stratify" in config:
        raw = config["stratify"]
        if not isinstance(raw, dict):
            raise _config_error("stratify: must be an object")
        try:
            n_cal = int(raw["n_cal"])
            edges = [float(e) for e in raw["bin_edges"]]
            vocab = [str(s) for s in raw["status_vocabulary"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise _config_error(f"stratify: {exc}") from exc
        populations = calibrate.cell_populations(pool, edges, vocab)
        plan = calibrate.allocate_quotas(populations, n_cal, edges, vocab)
        used = calibrate.stratified_sample(pool, plan, 0 if args.seed is None else args.seed)

    scores = [r.agent_score for r in used]
    tau_rate = calibrate.rate_matching_threshold(scores, target_rate)
    achieved = calibrate.empirical_acceptance(scores, tau_rate)
    tau05, curve = calibrate.fit_tau05(used)
    thresholds = DecisionThresholds(
        tau_rate=tau_rate,
        tau_05=tau05,
        target_rate=target_rate,
        calibration_size=len(used),
    )

    payload = dict(thresholds.to_dict())
    payload["stratified"] = plan is not None
    payload["seed"] = args.seed
    run.write(
        "thresholds.json", json.dumps(payload, indent=2, sort_keys=True) + "\n"
    )
    if plan is not None:
        run.write("plan.json", json.dumps(plan.to_dict(), indent=2, sort_keys=True) + "\n")

    candidates = sorted({r.agent_score for r in used})
    points = calibrate.tail_probability_points(used, candidates)
    run.write(
        "curve.csv",
        metrics.csv_text(
            ["threshold", "raw_estimate", "fitted", "weight"],
            [
                (t, raw_value, fit, weight)
                for (t, raw_value, _), (fit, weight) in zip(
                    points, zip(curve.fitted, curve.weights)
                )
            ],
        ),
    )

    eps = bounds.dkw_bound(len(used), delta)
    lines = [
        "calibration report",
        "",
        f"pool records:        {len(pool)}",
        f"calibration records: {len(used)}"
        + ("" if plan is None else "  (stratified)"),
        f"target rate:         {target_rate:.6g}",
        f"tau_rate:            {tau_rate:.6g}",
        f"achieved rate:       {achieved:.6g}  ({round(achieved * len(used))}/{len(used)})",
        f"tau_05:              {tau05:.6g}",
        f"curve max fitted:    {curve.fitted[-1]:.6g}",
        f"rate error bound:    {eps:.6g}  (delta={delta:.6g})",
        "",
    ]
    run.write("calibration_report.txt", "\n".join(lines))
    run.finish()
    return 0


# ---------------------------------------------------------------- review


def cmd_review(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    schema = _schema_from_config(config)
    functional = _functional_from_config(config, schema)
    panels = _panels_from_file(args.panels)
    _validate_panels(panels, schema)
    thresholds = _load_thresholds(args.thresholds)

    run = _Run(args.out, "review", None, args.config, [args.panels, args.thresholds])

    scores = {p.submission_id: _panel_score(p, config, schema, functional) for p in panels}
    dec_rate = {pid: aggregate.decide(s, thresholds.tau_rate) for pid, s in scores.items()}
    dec_05 = {pid: aggregate.decide(s, thresholds.tau_05) for pid, s in scores.items()}

    run.write(
        "decisions.csv",
        metrics.csv_text(
            [
                "id",
                "score",
                "accept_tau_rate",
                "margin_tau_rate",
                "accept_tau_05",
                "margin_tau_05",
                "any_flag",
            ],
            [
                (
                    p.submission_id,
                    scores[p.submission_id],
                    dec_rate[p.submission_id].accept,
                    dec_rate[p.submission_id].margin,
                    dec_05[p.submission_id].accept,
                    dec_05[p.submission_id].margin,
                    p.any_flag,
                )
                for p in panels
            ],
        ),
    )

    n = len(panels)
    acpt_rate = metrics.acpt(list(dec_rate.values()))
    acpt_05 = metrics.acpt(list(dec_05.values()))
    roster = sorted({r.reviewer_id for p in panels for r in p.reviews})

    metric_rows: list[tuple[object, ...]] = [
        ("acpt", "tau_rate", acpt_rate, round(acpt_rate * n), n),
        ("acpt", "tau_05", acpt_05, round(acpt_05 * n), n),
    ]
    icr_table_rows = []
    for reviewer in roster:
        subset = [p for p in panels if reviewer in p.reviewer_ids]
        value = metrics.icr_per_model(subset, reviewer)
        flagged = round(value * len(subset))
        metric_rows.append(("icr", reviewer, value, flagged, len(subset)))
        icr_table_rows.append((reviewer, metrics.rate_with_counts(flagged, len(subset))))
    any_icr = metrics.icr_any(panels)
    any_flagged = round(any_icr * n)
    metric_rows.append(("icr", "any", any_icr, any_flagged, n))
    icr_table_rows.append(("any", metrics.rate_with_counts(any_flagged, n)))

    conflict_table_rows = []
    for label, tau in (("tau_rate", thresholds.tau_rate), ("tau_05", thresholds.tau_05)):
        for reviewer in [*roster, None]:
            name = "any" if reviewer is None else reviewer
            subset = panels if reviewer is None else [
                p for p in panels if reviewer in p.reviewer_ids
            ]
            value = metrics.conflict_rate(subset, scores, tau, reviewer)
            if reviewer is None:
                flagged = sum(1 for p in subset if p.any_flag)
            else:
                flagged = sum(
                    1 for p in subset if p.review_by(reviewer).integrity_flag
                )
            num = 0 if value is None else round(value * flagged)
            metric_rows.append(
                (f"conflict_{label}", name, value, num if flagged else None, flagged)
            )
            conflict_table_rows.append(
                (
                    name,
                    label,
                    metrics.rate_with_counts(num, flagged)
                    if flagged
                    else "- (no flags)",
                )
            )

    run.write(
        "metrics.csv",
        metrics.csv_text(["metric", "scope", "value", "numerator", "denominator"], metric_rows),
    )

    tau_rate_text = f"{thresholds.tau_rate:.6g}"
    report = [
        "review report",
        "",
        f"panels: {n}",
        "",
        "acceptance",
        metrics.aligned_table(
            ["threshold", "value", "acpt"],
            [
                ("tau_rate", tau_rate_text, metrics.rate_with_counts(round(acpt_rate * n), n)),
                ("tau_05", f"{thresholds.tau_05:.6g}", metrics.rate_with_counts(round(acpt_05 * n), n)),
            ],
        ),
        "integrity flags",
        metrics.aligned_table(["reviewer", "icr"], icr_table_rows),
        "conflicts (flagged but scored at acceptance level)",
        metrics.aligned_table(["reviewer", "threshold", "conflict"], conflict_table_rows),
    ]
    run.write("review_report.txt", "\n".join(report))
    run.finish()
    return 0


# ---------------------------------------------------------------- bayes


def _review_variance(config_bayes: Mapping[str, Any], reviewer: str) -> float:
    raw = config_bayes.get("review_variances", {})
    if not isinstance(raw, dict):
        raise _config_error("bayes.review_variances: must be an object")
    if reviewer in raw:
        return float(raw[reviewer])
    if "default" in raw:
        return float(raw["default"])
    raise _config_error(
        f"bayes.review_variances: no variance for reviewer {reviewer!r} and no default"
    )


def cmd_bayes(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    raw_bayes = config.get("bayes")
    if not isinstance(raw_bayes, dict):
        raise _config_error("bayes: required object with prior_mean and prior_variance")
    try:
        prior = GaussianPosterior(
            float(raw_bayes["prior_mean"]), float(raw_bayes["prior_variance"])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise _config_error(f"bayes prior: {exc}") from exc
    alpha = float(raw_bayes.get("alpha", 0.05))
    schema = _schema_from_config(config)
    functional = _functional_from_config(config, schema)

    selector = raw_bayes.get("threshold", "tau_05")
    if isinstance(selector, (int, float)) and not isinstance(selector, bool):
        threshold = float(selector)
        inputs = [args.panels]
    elif selector in ("tau_rate", "tau_05"):
        if args.thresholds is None:
            raise _config_error(
                f"bayes.threshold: {selector!r} needs --thresholds"
            )
        loaded = _load_thresholds(args.thresholds)
        threshold = getattr(loaded, selector)
        inputs = [args.panels, args.thresholds]
    else:
        raise _config_error(
            "bayes.threshold: must be 'tau_rate', 'tau_05', or a number"
        )
    if not math.isfinite(threshold):
        raise _config_error(
            f"bayes.threshold: resolved threshold {threshold} is not finite"
        )

    panel_records = records.load_panel_records(args.panels)
    for record in panel_records:
        if record.reviews and schema is not None:
            record.to_panel().validate_schema(schema)

    run = _Run(args.out, "bayes", None, args.config, inputs)

    solicit_variance = float(
        raw_bayes.get(
            "solicit_variance",
            raw_bayes.get("review_variances", {}).get("default", 1.0)
        )
    )

    rows = []
    for record in panel_records:
        observations = []
        for review in record.reviews:
            consensus = aggregate.ConsensusRubric(review.rubric.values)
            s = aggregate.score(consensus, functional, schema)
            observations.append((s, _review_variance(raw_bayes, review.reviewer_id)))
        posterior = bayes.posterior_update(prior, observations)
        p_accept = bayes.acceptance_probability(posterior, threshold)
        robust = bayes.credible_robust(posterior, threshold, alpha)
        solicit = bayes.solicit_worthwhile(posterior, threshold, alpha, solicit_variance)
        rows.append(
            (
                record.submission_id,
                len(record.reviews),
                posterior.mean,
                posterior.variance,
                p_accept,
                p_accept >= 0.5,
                robust,
                solicit,
                "" if record.reviews else "prior-only",
            )
        )

    run.write(
        "bayes.csv",
        metrics.csv_text(
            [
                "id",
                "n_reviews",
                "posterior_mean",
                "posterior_variance",
                "p_accept",
                "accept",
                "robust",
                "solicit",
                "note",
            ],
            rows,
        ),
    )
    table_rows = [
        (
            r[0],
            str(r[1]),
            f"{r[2]:.4f}",
            f"{r[3]:.4f}",
            f"{r[4]:.4f}",
            "yes" if r[6] else "no",
            "yes" if r[7] else "no",
            r[8],
        )
        for r in rows
    ]
    report = [
        "credible decision report",
        "",
        f"panels:     {len(rows)}",
        f"prior:      mean {prior.mean:.6g}, variance {prior.variance:.6g}",
        f"threshold:  {threshold:.6g}",
        f"alpha:      {alpha:.6g}",
        "",
        metrics.aligned_table(
            ["id", "reviews", "post_mean", "post_var", "p_accept", "robust", "solicit", "note"],
            table_rows,
        ),
    ]
    run.write("bayes_report.txt", "\n".join(report))
    run.finish()
    return 0


# ---------------------------------------------------------------- detector


def cmd_detector_eval(args: argparse.Namespace) -> int:
    panels = _panels_from_file(args.panels)
    run = _Run(args.out, "detector-eval", None, None, [args.panels])

    roster = sorted({r.reviewer_id for p in panels for r in p.reviews})
    table_rows = []
    csv_rows = []
    for name in [*roster, "any"]:
        if name == "any":
            subset = panels
            counts = metrics.detector_counts(panels, None)
        else:
            subset = [p for p in panels if name in p.reviewer_ids]
            counts = metrics.detector_counts(subset, name)
        m = metrics.detector_metrics(counts)
        csv_rows.append(
            (name, counts.tp, counts.fp, counts.tn, counts.fn, m.tpr, m.fpr, m.accuracy, m.f1)
        )
        table_rows.append(
            (
                name,
                f"{metrics.format_percent(m.tpr)} ({counts.tp}/{counts.tp + counts.fn})",
                f"{metrics.format_percent(m.fpr)} ({counts.fp}/{counts.fp + counts.tn})",
                f"{metrics.format_percent(m.accuracy)} ({counts.tp + counts.tn}/{counts.total})",
                metrics.format_percent(m.f1),
            )
        )

    # fair-coin reference: TPR/FPR/Acc 50% in expectation, F1 from prevalence
    positives = sum(1 for p in panels if p.fabrication_label)
    negatives = len(panels) - positives
    baseline_f1 = 2 * positives / (3 * positives + negatives) if positives else 0.0
    csv_rows.append(("random-baseline", None, None, None, None, 0.5, 0.5, 0.5, baseline_f1))
    table_rows.append(
        ("random-baseline", "50.0%", "50.0%", "50.0%", metrics.format_percent(baseline_f1))
    )

    run.write(
        "detector.csv",
        metrics.csv_text(
            ["reviewer", "tp", "fp", "tn", "fn", "tpr", "fpr", "accuracy", "f1"],
            csv_rows,
        ),
    )
    report = [
        "detector evaluation",
        "",
        f"labeled panels: {len(panels)}",
        "",
        metrics.aligned_table(["reviewer", "tpr", "fpr", "accuracy", "f1"], table_rows),
    ]
    run.write("detector_report.txt", "\n".join(report))
    run.finish()
    return 0


# ---------------------------------------------------------------- simulate


def _checks_text(named: Sequence[tuple[str, list[str]]]) -> tuple[str, bool]:
    lines = []
    ok = True
    for name, failures in named:
        if failures:
            ok = False
            lines.append(f"FAIL: {name}")
            lines.extend(f"  {f}" for f in failures)
        else:
            lines.append(f"PASS: {name}")
    return "\n".join(lines) + "\n", ok


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise RecordError(f"{flag}: expected comma-separated integers, got {text!r}") from exc
    if not values:
        raise RecordError(f"{flag}: expected at least one integer")
    return values


def _margin_settings(config: Mapping[str, Any], args: argparse.Namespace):
    spec, m_grid, threshold, edges = simulate.default_margin_settings()
    raw = config.get("simulate", {}).get("margins")
    if raw is not None:
        if "spec" in raw:
            spec = simulate.CohortSpec.from_dict(raw["spec"])
        if "m_grid" in raw:
            m_grid = tuple(int(m) for m in raw["m_grid"])
        if "threshold" in raw:
            threshold = float(raw["threshold"])
        if "bin_edges" in raw:
            edges = tuple(float(e) for e in raw["bin_edges"])
    if args.m is not None:
        m_grid = _parse_int_list(args.m, "--m")
    if max(m_grid) != spec.m_reviewers:
        sigma = spec.noise.per_reviewer_variance[0]
        spec = simulate.CohortSpec(
            n_papers=spec.n_papers,
            m_reviewers=max(m_grid),
            latent=spec.latent,
            noise=simulate.NoiseProfile(
                (sigma,) * max(m_grid), spec.noise.scalar_bounds
            ),
            clip_mode=spec.clip_mode,
            seed=spec.seed,
        )
    if args.seed is not None:
        spec = simulate.CohortSpec(
            n_papers=spec.n_papers,
            m_reviewers=spec.m_reviewers,
            latent=spec.latent,
            noise=spec.noise,
            clip_mode=spec.clip_mode,
            seed=args.seed,
        )
    return spec, m_grid, threshold, edges


def cmd_simulate_margins(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    spec, m_grid, threshold, edges = _margin_settings(config, args)
    run = _Run(args.out, "simulate-margins", spec.seed, args.config, [])
    rows = simulate.margin_suite(spec, m_grid, threshold, edges)
    run.write(
        "margin_bins.csv",
        metrics.csv_text(
            ["gamma_lo", "gamma_hi", "gamma_mid", "empirical", "stderr", "bound", "count", "m"],
            [
                (
                    r.gamma_lo,
                    r.gamma_hi,
                    r.gamma_mid,
                    r.empirical,
                    r.stderr,
                    r.bound,
                    r.count,
                    r.m,
                )
                for r in rows
            ],
        ),
    )
    text, ok = _checks_text(
        [
            ("empirical misclassification within bound (3 SE slack)", simulate.check_margin_dominance(rows)),
            ("larger panels no worse per bin (count >= 50)", simulate.check_margin_ordering(rows)),
        ]
    )
    run.write("checks.txt", text)
    run.finish()
    print(text, end="")
    return 0 if ok else 4


def cmd_simulate_threshold_error(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    settings = simulate.default_population_settings()
    grid, replicates, seed = simulate.default_bootstrap_settings()
    raw = config.get("simulate", {}).get("threshold_error")
    if raw is not None:
        if "population" in raw:
            settings = simulate.PopulationSettings.from_dict(raw["population"])
        if "n_cal_grid" in raw:
            grid = tuple(int(n) for n in raw["n_cal_grid"])
        if "replicates" in raw:
            replicates = int(raw["replicates"])
        if "seed" in raw:
            seed = int(raw["seed"])
    if args.grid is not None:
        grid = _parse_int_list(args.grid, "--grid")
    if args.replicates is not None:
        replicates = args.replicates
    if args.seed is not None:
        seed = args.seed

    run = _Run(args.out, "simulate-threshold-error", seed, args.config, [])
    population = simulate.synthetic_calibration_population(settings)
    rows = simulate.threshold_bootstrap(population, grid, replicates, seed)
    run.write(
        "threshold_error.csv",
        metrics.csv_text(
            ["n_cal", "mean_abs_err", "stderr", "failures"],
            [(r.n_cal, r.mean_abs_err, r.stderr, r.failures) for r in rows],
        ),
    )
    slope = simulate.error_curve_slope(rows)
    reference = [r for r in rows if r.n_cal == 200]
    lines = [f"log-log slope: {slope:.4f}"]
    if reference:
        lines.append(f"mean abs error at n_cal=200: {reference[0].mean_abs_err:.4f}")
    text, ok = _checks_text(
        [("error decays like 1/sqrt(n_cal), near-monotone", simulate.check_threshold_rows(rows))]
    )
    body = "\n".join(lines) + "\n" + text
    run.write("checks.txt", body)
    run.finish()
    print(body, end="")
    return 0 if ok else 4


def cmd_simulate_variance(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    spec, m_grid = simulate.default_variance_settings()
    raw = config.get("simulate", {}).get("variance")
    if raw is not None:
        if "spec" in raw:
            spec = simulate.CohortSpec.from_dict(raw["spec"])
        if "m_grid" in raw:
            m_grid = tuple(int(m) for m in raw["m_grid"])
    if args.m is not None:
        m_grid = _parse_int_list(args.m, "--m")
    if max(m_grid) != spec.m_reviewers:
        sigma = spec.noise.per_reviewer_variance[0]
        spec = simulate.CohortSpec(
            n_papers=spec.n_papers,
            m_reviewers=max(m_grid),
            latent=spec.latent,
            noise=simulate.NoiseProfile((sigma,) * max(m_grid), spec.noise.scalar_bounds),
            clip_mode=spec.clip_mode,
            seed=spec.seed,
        )
    if args.seed is not None:
        spec = simulate.CohortSpec(
            n_papers=spec.n_papers,
            m_reviewers=spec.m_reviewers,
            latent=spec.latent,
            noise=spec.noise,
            clip_mode=spec.clip_mode,
            seed=args.seed,
        )

    run = _Run(args.out, "simulate-variance", spec.seed, args.config, [])
    rows = simulate.variance_experiment(spec, m_grid)
    run.write(
        "variance.csv",
        metrics.csv_text(
            ["m", "var_empirical", "proxy"],
            [(r.m, r.var_empirical, r.proxy) for r in rows],
        ),
    )
    low, high = min(m_grid), max(m_grid)
    text, ok = _checks_text(
        [
            (
                "consensus variance scales like 1/M",
                simulate.check_variance_rows(rows, m_low=low, m_high=high),
            )
        ]
    )
    run.write("checks.txt", text)
    run.finish()
    print(text, end="")
    return 0 if ok else 4


# ---------------------------------------------------------------- bound


def cmd_bound(args: argparse.Namespace) -> int:
    from .core import BoundInputs

    if args.bound_kind == "tail":
        value = bounds.tail_bound(
            args.t, BoundInputs(sigma_w_sq=args.sigma_w_sq, c_max=args.c_max)
        )
    elif args.bound_kind == "margin":
        value = bounds.margin_misclassification_bound(
            args.gamma, BoundInputs(sigma_w_sq=args.sigma_w_sq, c_max=args.c_max)
        )
    elif args.bound_kind == "scalar":
        value = bounds.scalar_uniform_bound(args.m, args.gamma, args.sigma_sq, args.range_width)
    elif args.bound_kind == "dkw":
        value = bounds.dkw_bound(args.n_cal, args.delta)
    else:
        value = bounds.tau05_error_bound(args.eps_pi, args.c_min, args.flat_width)
    print(f"{value:.6g}")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="panelcal",
        description="Calibrated multi-reviewer decisions: aggregation, bounds, "
        "calibration, credible calls, and Monte-Carlo validation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="fit thresholds against a labeled record pool")
    p.add_argument("--records", required=True, help="calibration JSONL pool")
    p.add_argument("--config", required=True, help="JSON config with target_rate")
    p.add_argument("--out", default="runs", help="parent directory for run outputs")
    p.add_argument("--seed", type=int, default=None, help="stratified sampling seed")
    p.set_defaults(handler=cmd_calibrate)

    p = sub.add_parser("review", help="score panels and report corpus metrics")
    p.add_argument("--panels", required=True, help="panel JSONL file")
    p.add_argument("--thresholds", required=True, help="thresholds JSON from calibrate")
    p.add_argument("--config", required=True, help="JSON config with schema/functional")
    p.add_argument("--out", default="runs")
    p.set_defaults(handler=cmd_review)

    p = sub.add_parser("bayes", help="credible accept/reject calls per panel")
    p.add_argument("--panels", required=True, help="panel JSONL file")
    p.add_argument("--thresholds", default=None, help="thresholds JSON from calibrate")
    p.add_argument("--config", required=True, help="JSON config with bayes prior")
    p.add_argument("--out", default="runs")
    p.set_defaults(handler=cmd_bayes)

    p = sub.add_parser("detector-eval", help="flag-vs-label detection metrics")
    p.add_argument("--panels", required=True, help="labeled panel JSONL file")
    p.add_argument("--out", default="runs")
    p.set_defaults(handler=cmd_detector_eval)

    p = sub.add_parser("simulate", help="Monte-Carlo validation experiments")
    sim_sub = p.add_subparsers(dest="experiment", required=True)

    q = sim_sub.add_parser("margins", help="misclassification vs margin bins")
    q.add_argument("--config", default=None)
    q.add_argument("--out", default="runs")
    q.add_argument("--seed", type=int, default=None)
    q.add_argument("--m", default=None, help="comma-separated panel sizes, e.g. 1,2,3")
    q.set_defaults(handler=cmd_simulate_margins)

    q = sim_sub.add_parser("threshold-error", help="tau_05 bootstrap error vs n_cal")
    q.add_argument("--config", default=None)
    q.add_argument("--out", default="runs")
    q.add_argument("--seed", type=int, default=None)
    q.add_argument("--grid", default=None, help="comma-separated n_cal grid")
    q.add_argument("--replicates", type=int, default=None)
    q.set_defaults(handler=cmd_simulate_threshold_error)

    q = sim_sub.add_parser("variance", help="consensus variance vs panel size")
    q.add_argument("--config", default=None)
    q.add_argument("--out", default="runs")
    q.add_argument("--seed", type=int, default=None)
    q.add_argument("--m", default=None, help="comma-separated panel sizes, e.g. 1,2,3")
    q.set_defaults(handler=cmd_simulate_variance)

    p = sub.add_parser("bound", help="print one bound value (6 significant digits)")
    bound_sub = p.add_subparsers(dest="bound_kind", required=True)

    q = bound_sub.add_parser("tail", help="deviation tail bound")
    q.add_argument("--t", type=float, required=True)
    q.add_argument("--sigma-w-sq", type=float, required=True)
    q.add_argument("--c-max", type=float, required=True)
    q.set_defaults(handler=cmd_bound)

    q = bound_sub.add_parser("margin", help="misclassification bound at a margin")
    q.add_argument("--gamma", type=float, required=True)
    q.add_argument("--sigma-w-sq", type=float, required=True)
    q.add_argument("--c-max", type=float, required=True)
    q.set_defaults(handler=cmd_bound)

    q = bound_sub.add_parser("scalar", help="uniform-weight scalar bound")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--gamma", type=float, required=True)
    q.add_argument("--sigma-sq", type=float, required=True)
    q.add_argument("--range", type=float, required=True, dest="range_width")
    q.set_defaults(handler=cmd_bound)

    q = bound_sub.add_parser("dkw", help="uniform rate-error bound")
    q.add_argument("--n", type=int, required=True, dest="n_cal")
    q.add_argument("--delta", type=float, required=True)
    q.set_defaults(handler=cmd_bound)

    q = bound_sub.add_parser("tau05", help="half-probability threshold error bound")
    q.add_argument("--eps-pi", type=float, required=True)
    q.add_argument("--c-min", type=float, required=True)
    q.add_argument("--flat-width", type=float, required=True)
    q.set_defaults(handler=cmd_bound)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )
    try:
        return args.handler(args)
    except ThresholdUnreachableError as exc:
        print(f"error: calibration infeasible: {exc}", file=sys.stderr)
        return 3
    except RecordError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
