"""Main controller - validates experiment configs and dispatches commands."""
from __future__ import annotations

import json
import logging
import threading
from collections.abc import Callable
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Optional

import pandas as pd

from clusterbell.core import config
from clusterbell.core.errors import ConfigError
from clusterbell.core.noise import NoiseParams, TrajectoryRng, single_qubit_infidelity, two_qubit_infidelity
from clusterbell.core.readout import ConfusionModel, confusion_from_rates

logger = logging.getLogger(__name__)

COMMANDS = ("play", "bounds", "tomo", "fit", "report", "plot-data")
GAMES = ("cbf", "ss")
INPUT_SETS = ("full", "mermin55", "hlf8", "hlf5", "hlfn5")
SEEDED_COMMANDS = ("play", "tomo", "fit")


def load_noise(source: Any) -> Optional[NoiseParams]:
    """'none', 'fitted', a JSON file path, a dict, or NoiseParams."""
    if source is None or isinstance(source, NoiseParams):
        return source
    if isinstance(source, dict):
        return NoiseParams.from_dict(source)
    text = str(source)
    if text.lower() == "none":
        return None
    if text.lower() == "fitted":
        return NoiseParams.device()
    return NoiseParams.from_json(Path(text).read_text())


@dataclass
class ExperimentConfig:
    """everything a command needs; flags override file values"""

    game: str = "cbf"
    inputs: str = "full"
    n: int = config.DEFAULT_QUBITS
    depth: Optional[int] = None
    shots: int = config.DEFAULT_SHOTS
    seed: Optional[int] = None
    noise: Optional[NoiseParams] = None
    out: Path = Path("results")
    format: str = "json"
    workers: int = field(default_factory=config.default_workers)
    readout: Optional[tuple[float, ...]] = None
    form: str = "RXX"
    plan: str = "greedy"
    reference: Optional[str] = None
    grid: Optional[Path] = None
    artifact: Optional[Path] = None
    obstruction: bool = False
    timing: bool = True

    @classmethod
    def from_file(cls, path: Path | str) -> "ExperimentConfig":
        data = json.loads(Path(path).read_text())
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "noise" in kwargs:
            kwargs["noise"] = load_noise(kwargs["noise"])
        for key in ("out", "grid", "artifact"):
            if kwargs.get(key) is not None:
                kwargs[key] = Path(kwargs[key])
        if kwargs.get("readout") is not None:
            kwargs["readout"] = tuple(float(v) for v in kwargs["readout"])
        return cls(**kwargs)

    def confusion(self) -> Optional[ConfusionModel]:
        return confusion_from_rates(self.n, self.readout)

    def validate(self, command: str) -> None:
        if command not in COMMANDS:
            raise ConfigError(f"unknown command {command!r}")
        if self.game not in GAMES:
            raise ConfigError(f"game must be one of {GAMES}, got {self.game!r}")
        if self.inputs not in INPUT_SETS:
            raise ConfigError(f"inputs must be one of {INPUT_SETS}, got {self.inputs!r}")
        if self.n < 3:
            raise ConfigError(f"n must be at least 3, got {self.n}")
        if self.shots < 1:
            raise ConfigError(f"shots must be positive, got {self.shots}")
        if self.depth is not None and self.depth < 0:
            raise ConfigError(f"depth must be non-negative, got {self.depth}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.format!r}")
        if self.workers < 1:
            raise ConfigError(f"workers must be positive, got {self.workers}")
        if self.form not in ("RXX", "CZ"):
            raise ConfigError(f"form must be RXX or CZ, got {self.form!r}")
        if self.plan not in ("greedy", "reference"):
            raise ConfigError(f"plan must be greedy or reference, got {self.plan!r}")
        if self.readout is not None:
            if not 1 <= len(self.readout) <= 2 or any(not 0 <= r < 0.5 for r in self.readout):
                raise ConfigError("readout takes one or two flip rates in [0, 0.5)")
        if command in SEEDED_COMMANDS and self.seed is None:
            raise ConfigError(f"{command} needs --seed")
        if command == "plot-data" and self.artifact is None:
            raise ConfigError("plot-data needs --artifact")
        if self.plan == "reference" and self.n != 6:
            raise ConfigError("the reference plan covers the six-qubit cycle only")


def write_json(path: Path, data: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, frame: pd.DataFrame) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.6f")


class ExperimentController:
    """Runs one command per call; handlers import their mode package on first use."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self._handler_factories: dict[str, Callable[[], Callable[[], int]]] = {
            "play": lambda: self._play,
            "bounds": lambda: self._bounds,
            "tomo": lambda: self._tomo,
            "fit": lambda: self._fit,
            "report": lambda: self._report,
            "plot-data": lambda: self._plot_data,
        }
        self._handlers: dict[str, Callable[[], int]] = {}
        self._lock = threading.Lock()

    def _get_handler(self, command: str) -> Callable[[], int]:
        with self._lock:
            factory = self._handler_factories.get(command)
            if factory is None:
                raise ConfigError(f"unknown command {command!r}")
            if command not in self._handlers:
                logger.debug("Loading %s handler", command)
                self._handlers[command] = factory()
            return self._handlers[command]

    def run(self, command: str) -> int:
        self.cfg.validate(command)
        logger.info("Running %s (game=%s, inputs=%s, n=%d)", command, self.cfg.game, self.cfg.inputs, self.cfg.n)
        status = self._get_handler(command)()
        logger.info("%s finished", command)
        return status

    # -- commands -------------------------------------------------------

    def _game(self):
        from clusterbell.modes.games import GameInstance

        return GameInstance.build(self.cfg.game, self.cfg.inputs, self.cfg.n)

    def _play(self) -> int:
        from clusterbell.modes.games import play_quantum

        cfg = self.cfg
        game = self._game()
        confusion = cfg.confusion()
        result = play_quantum(game, cfg.noise, cfg.shots, TrajectoryRng(cfg.seed), cfg.form, confusion, cfg.workers)
        raw = result.estimate()
        summary = {"game": cfg.game, "inputs": cfg.inputs, "n": cfg.n, "shots": cfg.shots,
                   "seed": cfg.seed, "raw": raw.to_dict()}
        if confusion is not None:
            summary["corrected"] = result.estimate(confusion).to_dict()
        out = cfg.out
        out.mkdir(parents=True, exist_ok=True)
        with (out / "rounds.jsonl").open("w") as handle:
            for record in result.rounds():
                handle.write(record.to_json() + "\n")
        write_json(out / "success.json", summary)
        if cfg.format == "csv":
            write_csv(out / "success.csv", raw.to_frame())
        print(f"{game.label}: Pr[win] = {raw.p_hat:.4f} +- {raw.stderr:.4f}")
        return config.EXIT_OK

    def _bounds(self) -> int:
        from clusterbell.modes.bounds import depth0_bound, depth1_bound, exhaustive_bound, parity_obstruction_check

        cfg = self.cfg
        game = self._game()
        if cfg.depth is None:
            results = [depth0_bound(game, cfg.workers), depth1_bound(game, cfg.workers)]
        elif cfg.depth == 0:
            results = [depth0_bound(game, cfg.workers)]
        elif cfg.depth == 1:
            results = [depth1_bound(game, cfg.workers)]
        else:
            results = [exhaustive_bound(game, cfg.depth, cfg.workers)]
        data: dict[str, Any] = {"bounds": [r.to_dict(timing=cfg.timing) for r in results]}
        if cfg.obstruction:
            check = parity_obstruction_check(cfg.n, cfg.depth if cfg.depth else cfg.n // 6)
            data["obstruction"] = check.to_dict()
            print(f"parity obstruction n={check.n} D={check.depth}: "
                  f"{'inconsistent' if check.inconsistent else 'consistent'}")
        write_json(cfg.out / "bounds.json", data)
        if cfg.format == "csv":
            rows = [{"game": r.game, "depth": r.depth, "beta": str(r.beta), "value": float(r.beta),
                     "search_size": r.search_size} for r in results]
            write_csv(cfg.out / "bounds.csv", pd.DataFrame(rows))
        for r in results:
            print(f"{r.game}  depth {r.depth}  beta = {r.beta}  ({float(r.beta):.2%})")
        return config.EXIT_OK

    def _tomo(self) -> int:
        from clusterbell.modes.games.player import cbf_success_from_fidelity
        from clusterbell.modes.tomography import greedy_clique_cover, reference_plan, run_tomography
        from clusterbell.modes.tomography.estimation import table_frame

        cfg = self.cfg
        plan = reference_plan() if cfg.plan == "reference" else greedy_clique_cover(n=cfg.n)
        run = run_tomography(cfg.noise, cfg.shots, TrajectoryRng(cfg.seed), plan, cfg.form,
                             cfg.confusion(), cfg.workers, cfg.n)
        out = cfg.out
        out.mkdir(parents=True, exist_ok=True)
        run.dataset.write(out / "dataset.json")
        write_csv(out / "stabilizers.csv", table_frame(run.raw, run.corrected))
        best = run.corrected_fidelity or run.raw_fidelity
        summary = {
            "n": cfg.n,
            "shots": cfg.shots,
            "seed": cfg.seed,
            "settings": len(plan),
            "stabilizers": len(plan.labels()),
            "plan_hash": plan.plan_hash(),
            "noise": None if cfg.noise is None else cfg.noise.to_dict(),
            "raw": run.raw_fidelity.to_dict(),
            "corrected": None if run.corrected_fidelity is None else run.corrected_fidelity.to_dict(),
            "witness": best.witness,
            "witness_stderr": best.witness_stderr,
            "entangled": best.entangled,
            "cbf_success": cbf_success_from_fidelity(best.fidelity),
        }
        if cfg.noise is not None:
            summary["two_qubit_infidelity"] = two_qubit_infidelity(cfg.noise)
            summary["single_qubit_infidelity"] = single_qubit_infidelity(cfg.noise)
        write_json(out / "summary.json", summary)
        print(f"F = {best.fidelity:.4f} +- {best.fidelity_stderr:.4f}, "
              f"W = {best.witness:.4f}{' (genuine multipartite entanglement)' if best.entangled else ''}")
        return config.EXIT_OK

    def _reference_report(self):
        from clusterbell.modes.tomography import load_reference_report
        from clusterbell.modes.tomography.estimation import report_from_table

        ref = self.cfg.reference or "published"
        if ref in ("published", "published:spam"):
            return load_reference_report("spam")
        if ref == "published:raw":
            return load_reference_report("raw")
        frame = pd.read_csv(ref, dtype={"input": str})
        column = "spam" if "spam" in frame.columns else "raw"
        return report_from_table(frame, column)

    def _fit(self) -> int:
        from clusterbell.modes.fit import FitGrid, grid_fit

        cfg = self.cfg
        reference = self._reference_report()
        grid = FitGrid.from_dict(json.loads(cfg.grid.read_text())) if cfg.grid else FitGrid.default()
        result = grid_fit(reference, grid, cfg.seed, form=cfg.form, workers=cfg.workers)
        cfg.out.mkdir(parents=True, exist_ok=True)
        result.write(cfg.out / "fit.json")
        write_csv(cfg.out / "fit.csv", result.to_frame())
        best = result.best
        print(f"best fit p1d={best.p1d:.2%} p2XX={best.p2XX:.2%} p2d={best.p2d:.2%} "
              f"dF={best.delta_f:.4f} dS={best.delta_s:.4f}{' (fallback)' if result.used_fallback else ''}")
        return config.EXIT_OK

    def _report(self) -> int:
        out = self.cfg.out
        sources = {name: out / name for name in ("bounds.json", "success.json", "summary.json")}
        present = {k: json.loads(p.read_text()) for k, p in sources.items() if p.exists()}
        if not present:
            raise FileNotFoundError(f"no bounds.json, success.json or summary.json under {out}")
        row: dict[str, Any] = {"game": self.cfg.game, "inputs": self.cfg.inputs}
        if "bounds.json" in present:
            for entry in present["bounds.json"]["bounds"]:
                beta = entry["beta"]
                row["game"] = entry["game"]
                row[f"beta{entry['depth']}"] = f"{beta['num']}/{beta['den']}"
        if "success.json" in present:
            success = present["success.json"]
            row["pr_win_raw"] = success["raw"]["p_hat"]
            row["pr_win_raw_err"] = success["raw"]["stderr"]
            if "corrected" in success:
                row["pr_win_corrected"] = success["corrected"]["p_hat"]
                row["pr_win_corrected_err"] = success["corrected"]["stderr"]
        if "summary.json" in present:
            summary = present["summary.json"]
            row["stabilizers"] = summary["stabilizers"]
            row["settings"] = summary["settings"]
            row["fidelity_raw"] = summary["raw"]["fidelity"]
            row["witness_raw"] = summary["raw"]["witness"]
            row["entangled_raw"] = summary["raw"]["entangled"]
            if summary.get("corrected"):
                row["fidelity_corrected"] = summary["corrected"]["fidelity"]
                row["witness_corrected"] = summary["corrected"]["witness"]
                row["entangled_corrected"] = summary["corrected"]["entangled"]
        stabilizers = out / "stabilizers.csv"
        if stabilizers.exists():
            write_csv(out / "report_stabilizers.csv", stabilizer_report(pd.read_csv(stabilizers, dtype={"input": str})))
        write_json(out / "report.json", row)
        write_csv(out / "report.csv", pd.DataFrame([row]))
        for key, value in row.items():
            print(f"{key:>22}: {value}")
        return config.EXIT_OK

    def _plot_data(self) -> int:
        written = emit_plot_data(self.cfg.artifact, self.cfg.out)
        print(f"wrote {written}")
        return config.EXIT_OK


def stabilizer_report(table: pd.DataFrame) -> pd.DataFrame:
    """One row per stabilizer with values rendered as 0.8304(8)."""
    from clusterbell.modes.tomography import format_uncertainty

    frame = table[["input", "stabilizer"]].copy()
    for column in ("raw", "spam"):
        if column in table.columns:
            frame[column] = [format_uncertainty(v, e) for v, e in zip(table[column], table[f"{column}_err"])]
    return frame


STABILIZER_PLOT_COLUMNS = ["x", "value", "stderr"]
FIT_PLOT_COLUMNS = ["p1d", "p2XX", "p2d", "delta_f", "delta_s"]


def emit_plot_data(artifact: Path, out: Path) -> Path:
    """CSV behind the stabilizer bar chart (from a stabilizer table) or the fit contours (from fit.json)."""
    artifact = Path(artifact)
    if not artifact.exists():
        raise FileNotFoundError(f"artifact {artifact} does not exist")
    if artifact.suffix == ".json":
        data = json.loads(artifact.read_text())
        frame = pd.DataFrame(data.get("points", []), columns=FIT_PLOT_COLUMNS + ["fidelity"])[FIT_PLOT_COLUMNS]
        target = out / "fit_plot.csv"
    else:
        table = pd.read_csv(artifact, dtype={"input": str})
        column = "spam" if "spam" in table.columns else "raw"
        if table.empty or column not in table.columns:
            frame = pd.DataFrame(columns=STABILIZER_PLOT_COLUMNS)
        else:
            frame = pd.DataFrame({"x": table["input"], "value": table[column], "stderr": table[f"{column}_err"]})
        target = out / "stabilizer_plot.csv"
    write_csv(target, frame)
    logger.info("Wrote %d plot rows to %s", len(frame), target)
    return target
