"""Command-line front end: simulate scenes, track them, evaluate runs.

Every command is reproducible from its flags and seeds alone; outputs
embed the resolved configuration and contain no timestamps, so re-running
a command produces byte-identical files. Flags can also be set through
environment variables prefixed with RETRACK_ (e.g. RETRACK_TRACK_TAU).
"""
from __future__ import annotations

import dataclasses
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path as FsPath

import click

from .engine import EngineConfig, run_baseline, run_sequence
from .evalkit import EvalReport
from .geometry import BBox
from .simworld import (SCENARIOS, MockConfig, MockTracker, MotFormatError, Scene,
                       ScenarioConfig, generate_scene, load_mot, save_scene)

TRACK_FORMAT = "retrack-track-v1"


class ConfigError(click.ClickException):
    exit_code = 1


def _parse_seeds(text: str) -> list[int]:
    """'0:200' (half-open range) or '3,7,19' or a single integer."""
    text = text.strip()
    try:
        if ":" in text:
            lo, hi = text.split(":")
            seeds = list(range(int(lo), int(hi)))
        else:
            seeds = [int(p) for p in text.split(",")]
    except ValueError:
        raise ConfigError(f"cannot parse seed list {text!r}") from None
    if not seeds:
        raise ConfigError(f"seed list {text!r} is empty")
    return seeds


def _scenario_config(scenario: str | None, config_path: str | None) -> ScenarioConfig:
    if config_path is not None:
        try:
            cfg = ScenarioConfig.from_file(config_path)
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(f"bad scenario config {config_path}: {exc}") from None
        if scenario is not None:
            cfg = dataclasses.replace(cfg, kind=scenario)
        return cfg
    if scenario is None:
        raise ConfigError("one of --scenario or --mot is required")
    return ScenarioConfig(kind=scenario)


@dataclasses.dataclass(frozen=True)
class RunSpec:
    """One tracking run, fully determined and picklable."""

    name: str
    scenario_cfg: ScenarioConfig | None
    mot_path: str | None
    seed: int
    target_id: int | None
    engine_cfg: EngineConfig
    baseline_only: bool
    with_engine: bool = True

    def build_scene(self) -> Scene:
        if self.mot_path is not None:
            return load_mot(self.mot_path, seed=self.seed)
        return generate_scene(self.scenario_cfg, self.seed)


def _resolve_target(scene: Scene, target_id: int | None) -> int:
    if target_id is None:
        return min(scene.ids())
    if target_id not in scene.ids():
        raise ConfigError(f"target id {target_id} not present in scene "
                          f"(have {scene.ids()})")
    return target_id


def _execute_run(spec: RunSpec) -> dict:
    """Run baseline and/or engine over one scene; returns results keyed by
    system name, plus the scene-independent metadata."""
    scene = spec.build_scene()
    target = _resolve_target(scene, spec.target_id)
    port = MockTracker(scene, MockConfig())
    frames = range(scene.length)
    b0 = scene.true_box(target, 0)
    out: dict = {"name": spec.name, "seed": spec.seed, "target": target,
                 "length": scene.length}
    start = time.perf_counter()
    out["baseline"] = run_baseline(port, frames, b0)
    out["baseline_seconds"] = time.perf_counter() - start
    if spec.with_engine and not spec.baseline_only:
        start = time.perf_counter()
        boxes, records = run_sequence(port, frames, b0, spec.engine_cfg)
        out["engine_seconds"] = time.perf_counter() - start
        out["engine"] = boxes
        out["records"] = records
    out["scene"] = scene
    return out


def _boxes_csv(boxes: list[BBox], config: dict) -> str:
    lines = [f"# {TRACK_FORMAT} config={json.dumps(config, sort_keys=True)}",
             "frame,x,y,w,h"]
    for f, b in enumerate(boxes):
        lines.append(f"{f},{b.x!r},{b.y!r},{b.w!r},{b.h!r}")
    return "\n".join(lines) + "\n"


def _records_jsonl(records: list[dict], config: dict) -> str:
    lines = [json.dumps({"config": config}, sort_keys=True)]
    for rec in records:
        lines.append(json.dumps(rec, sort_keys=True))
    return "\n".join(lines) + "\n"


def _track_one(args: tuple[RunSpec, str]) -> str:
    spec, out_dir = args
    result = _execute_run(spec)
    out = FsPath(out_dir)
    config = {"engine": spec.engine_cfg.as_dict(), "seed": spec.seed,
              "target": result["target"],
              "source": spec.mot_path or spec.scenario_cfg.kind}
    (out / f"{spec.name}_baseline.csv").write_text(
        _boxes_csv(result["baseline"], config))
    if "engine" in result:
        (out / f"{spec.name}_engine.csv").write_text(
            _boxes_csv(result["engine"], config))
        (out / f"{spec.name}_engine_log.jsonl").write_text(
            _records_jsonl(result["records"], config))
    return spec.name


def _eval_one(args: tuple[RunSpec, float]) -> dict:
    spec, fail_iou = args
    result = _execute_run(spec)
    scene, target = result["scene"], result["target"]
    row: dict = {"name": result["name"], "seed": spec.seed}
    base = EvalReport.compute(result["baseline"], scene, target, fail_iou)
    row["baseline"] = base.as_dict()
    row["baseline_spf"] = result["baseline_seconds"] / scene.length
    if "engine" in result:
        eng = EvalReport.compute(result["engine"], scene, target, fail_iou)
        row["engine"] = eng.as_dict()
        row["engine_spf"] = result["engine_seconds"] / scene.length
    return row


def _map_jobs(fn, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

@click.group()
def cli():
    """Synthetic tracking benchmark and correction-engine runner."""


input_options = [
    click.option("--scenario", type=click.Choice(SCENARIOS), default=None,
                 help="Scripted scenario to generate per seed."),
    click.option("--mot", "mot_path", type=click.Path(exists=True, dir_okay=False),
                 default=None, help="MOT ground-truth file to ingest instead."),
    click.option("--config", "config_path",
                 type=click.Path(exists=True, dir_okay=False), default=None,
                 help="JSON scenario config overriding the defaults."),
    click.option("--seeds", default="0:10", show_default=True,
                 help="Seed list: 'a:b' half-open range or comma-separated."),
    click.option("--target-id", type=int, default=None,
                 help="Object id to track (default: lowest id)."),
]

engine_options = [
    click.option("--tau", type=int, default=9, show_default=True,
                 help="Backtrack depth in frames."),
    click.option("--alpha", type=float, default=0.7, show_default=True,
                 help="Confidence-ratio filter threshold."),
    click.option("--nms-iou", type=float, default=0.25, show_default=True),
    click.option("--nms-sigma", type=float, default=0.01, show_default=True),
    click.option("--gate-iou", type=float, default=0.6, show_default=True,
                 help="Stability-gate history-overlap threshold."),
    click.option("--no-kalman", is_flag=True, default=False,
                 help="Do not inject the motion-predicted candidate."),
]


def _add_options(options):
    def wrap(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return wrap


def _engine_cfg(tau: int, alpha: float, nms_iou: float, nms_sigma: float,
                gate_iou: float, no_kalman: bool) -> EngineConfig:
    try:
        cfg = EngineConfig(alpha=alpha, nms_iou=nms_iou, nms_sigma=nms_sigma,
                           tau=tau, stability_iou=gate_iou,
                           use_kalman=not no_kalman)
        if tau < 1:
            raise ValueError(f"tau must be at least 1, got {tau}")
        if not (0.0 <= alpha <= 1.0):
            raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
        if nms_sigma <= 0:
            raise ValueError(f"nms sigma must be positive, got {nms_sigma}")
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def _make_specs(scenario, mot_path, config_path, seeds, target_id,
                engine_cfg, baseline_only=False) -> list[RunSpec]:
    if (scenario is None) == (mot_path is None):
        raise ConfigError("exactly one of --scenario or --mot is required")
    seed_list = _parse_seeds(seeds)
    scenario_cfg = None if mot_path else _scenario_config(scenario, config_path)
    stem = FsPath(mot_path).stem if mot_path else scenario
    return [RunSpec(name=f"{stem}_{seed:04d}", scenario_cfg=scenario_cfg,
                    mot_path=mot_path, seed=seed, target_id=target_id,
                    engine_cfg=engine_cfg, baseline_only=baseline_only)
            for seed in seed_list]


@cli.command("simulate")
@click.option("--scenario", type=click.Choice(SCENARIOS), required=True)
@click.option("--config", "config_path",
              type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--seeds", default="0:10", show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def cmd_simulate(scenario, config_path, seeds, out_dir):
    """Generate scripted scenes and write them as JSON files."""
    cfg = _scenario_config(scenario, config_path)
    seed_list = _parse_seeds(seeds)
    out = FsPath(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for seed in seed_list:
        scene = generate_scene(cfg, seed)
        save_scene(scene, out / f"scene_{scenario}_{seed:04d}.json")
    click.echo(f"wrote {len(seed_list)} scene(s) to {out}")


@cli.command("track")
@_add_options(input_options)
@_add_options(engine_options)
@click.option("--baseline-only", is_flag=True, default=False,
              help="Run only the argmax baseline, no correction.")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def cmd_track(scenario, mot_path, config_path, seeds, target_id, tau, alpha,
              nms_iou, nms_sigma, gate_iou, no_kalman, baseline_only, jobs,
              out_dir):
    """Track scenes with the baseline and the correction engine; write one
    CSV per system per seed plus a decision log for the engine."""
    engine_cfg = _engine_cfg(tau, alpha, nms_iou, nms_sigma, gate_iou, no_kalman)
    specs = _make_specs(scenario, mot_path, config_path, seeds, target_id,
                        engine_cfg, baseline_only)
    out = FsPath(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = _map_jobs(_track_one, [(s, str(out)) for s in specs], jobs)
    click.echo(f"tracked {len(names)} run(s) into {out}")


@cli.command("evaluate")
@_add_options(input_options)
@_add_options(engine_options)
@click.option("--fail-iou", type=float, default=0.0, show_default=True,
              help="Overlap at or below which a frame counts as a failure.")
@click.option("--ablate", default=None,
              help="'tau=1,3,9,27' sweeps backtrack depth; 'kalman' compares "
                   "the motion candidate on and off.")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def cmd_evaluate(scenario, mot_path, config_path, seeds, target_id, tau, alpha,
                 nms_iou, nms_sigma, gate_iou, no_kalman, fail_iou, ablate,
                 jobs, out_dir):
    """Run baseline and engine, compute metrics, and write a side-by-side
    report; optionally sweep an ablation axis."""
    engine_cfg = _engine_cfg(tau, alpha, nms_iou, nms_sigma, gate_iou, no_kalman)
    specs = _make_specs(scenario, mot_path, config_path, seeds, target_id,
                        engine_cfg)
    out = FsPath(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    rows = _map_jobs(_eval_one, [(s, fail_iou) for s in specs], jobs)
    aggregate = _aggregate(rows)
    report = {
        "config": {"engine": engine_cfg.as_dict(), "fail_iou": fail_iou,
                   "source": mot_path or scenario, "seeds": seeds},
        "aggregate": aggregate,
        "per_seed": rows,
    }
    (out / "report.json").write_text(json.dumps(report, sort_keys=True, indent=1))
    (out / "comparison.csv").write_text(_comparison_csv(rows))
    click.echo(f"baseline robustness {aggregate['baseline']['robustness']:.3f} | "
               f"engine robustness {aggregate['engine']['robustness']:.3f} | "
               f"delta {aggregate['delta']['robustness']:+.3f}")

    if ablate:
        _run_ablation(ablate, specs, fail_iou, jobs, out)
    click.echo(f"report written to {out}")


def _aggregate(rows: list[dict]) -> dict:
    keys = rows[0]["baseline"].keys()
    agg: dict = {"baseline": {}, "engine": {}, "delta": {}}
    for key in keys:
        base = sum(r["baseline"][key] for r in rows) / len(rows)
        agg["baseline"][key] = base
        if "engine" in rows[0]:
            eng = sum(r["engine"][key] for r in rows) / len(rows)
            agg["engine"][key] = eng
            agg["delta"][key] = eng - base
    return agg


def _comparison_csv(rows: list[dict]) -> str:
    metrics = list(rows[0]["baseline"].keys())
    header = ["name", "seed"]
    for m in metrics:
        header += [f"baseline_{m}", f"engine_{m}", f"delta_{m}"]
    lines = [",".join(header)]
    for r in rows:
        cells = [r["name"], str(r["seed"])]
        for m in metrics:
            b = r["baseline"][m]
            e = r.get("engine", {}).get(m)
            cells.append(f"{b!r}")
            cells.append("" if e is None else f"{e!r}")
            cells.append("" if e is None else f"{e - b!r}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _run_ablation(ablate: str, specs: list[RunSpec], fail_iou: float,
                  jobs: int, out: FsPath) -> None:
    if ablate.startswith("tau="):
        try:
            taus = [int(v) for v in ablate[4:].split(",") if v]
        except ValueError:
            raise ConfigError(f"cannot parse ablation spec {ablate!r}") from None
        if not taus or any(t < 1 for t in taus):
            raise ConfigError(f"tau sweep needs positive depths, got {ablate!r}")
        lines = ["tau,auc,robustness,seconds_per_frame"]
        for tau in taus:
            variants = [dataclasses.replace(
                s, engine_cfg=dataclasses.replace(s.engine_cfg, tau=tau))
                for s in specs]
            rows = _map_jobs(_eval_one, [(s, fail_iou) for s in variants], jobs)
            auc = sum(r["engine"]["auc"] for r in rows) / len(rows)
            rob = sum(r["engine"]["robustness"] for r in rows) / len(rows)
            spf = sum(r["engine_spf"] for r in rows) / len(rows)
            lines.append(f"{tau},{auc!r},{rob!r},{spf!r}")
        (out / "ablation_tau.csv").write_text("\n".join(lines) + "\n")
    elif ablate == "kalman":
        lines = ["kalman,auc,robustness,seconds_per_frame"]
        for enabled in (True, False):
            variants = [dataclasses.replace(
                s, engine_cfg=dataclasses.replace(s.engine_cfg, use_kalman=enabled))
                for s in specs]
            rows = _map_jobs(_eval_one, [(s, fail_iou) for s in variants], jobs)
            auc = sum(r["engine"]["auc"] for r in rows) / len(rows)
            rob = sum(r["engine"]["robustness"] for r in rows) / len(rows)
            spf = sum(r["engine_spf"] for r in rows) / len(rows)
            lines.append(f"{int(enabled)},{auc!r},{rob!r},{spf!r}")
        (out / "ablation_kalman.csv").write_text("\n".join(lines) + "\n")
    else:
        raise ConfigError(f"unknown ablation axis {ablate!r}; "
                          f"expected 'tau=...' or 'kalman'")


def main(argv=None) -> int:
    """Entry point with stable exit codes: 0 ok, 1 config error, 2 runtime."""
    try:
        cli.main(args=argv, standalone_mode=False, auto_envvar_prefix="RETRACK")
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except ConfigError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        return 1
    except (MotFormatError, ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
