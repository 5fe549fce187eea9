"""Command line entry point: ``adtm {train,benchmark,simulate-la,energy-report,prepare-data}``.

Settings come from an optional ``key = value`` config file, then from
command-line flags, which win. Outputs go to ``--out`` or, when omitted,
to a per-command directory under ``$ADTM_OUTPUT_DIR`` (default ``runs``).

Exit status is 0 on success, 1 when the configuration is invalid and 2
when the run itself fails (missing data file, malformed input).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

from . import energy
from .automata import Kind, check_period, simulate_two_armed
from .datasets import DATASETS, DatasetError, load_dataset, split, write_bits
from .binarizer import ThermometerBinarizer
from .experiment import BASELINE, DATASET_DEFAULTS, d_label, format_sweep, run_once, sweep
from .machine import TmConfig

log = logging.getLogger("adtm")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    dataset: str = "balance-scale"
    data_path: Optional[str] = None
    m: Optional[int] = None
    T: Optional[int] = None
    s: Optional[float] = None
    d: list = field(default_factory=lambda: [1])
    N: Optional[int] = None
    regime: str = "adtm"
    epochs: Optional[int] = None
    ratio: float = 0.8
    seeds: list = field(default_factory=lambda: list(range(10)))
    out: Optional[str] = None
    max_thresholds: Optional[int] = None

    def machine_kwargs(self) -> dict:
        defaults = DATASET_DEFAULTS.get(self.dataset, {})
        kw = {
            "n_clauses": self.m if self.m is not None else defaults.get("n_clauses", 100),
            "T": self.T if self.T is not None else defaults.get("T", 10),
            "s": self.s if self.s is not None else defaults.get("s", 3),
            "n_states": self.N if self.N is not None else defaults.get("n_states", 100),
        }
        return kw

    @property
    def n_epochs(self) -> int:
        return self.epochs if self.epochs is not None else DATASET_DEFAULTS.get(self.dataset, {}).get("epochs", 100)

    def validate(self) -> "ExperimentConfig":
        if self.dataset not in DATASETS:
            raise ConfigError(f"unknown dataset {self.dataset!r}; choose from {', '.join(DATASETS)}")
        kw = self.machine_kwargs()
        if kw["n_clauses"] < 2 or kw["n_clauses"] % 2:
            raise ConfigError(f"m must be a positive even number of clauses, got {kw['n_clauses']}")
        if kw["T"] < 1:
            raise ConfigError(f"T must be >= 1, got {kw['T']}")
        if kw["s"] < 1:
            raise ConfigError(f"s must be >= 1, got {kw['s']}")
        if kw["n_states"] < 1:
            raise ConfigError(f"N must be >= 1, got {kw['n_states']}")
        if self.regime not in ("adtm", "tm"):
            raise ConfigError(f"regime must be 'adtm' or 'tm', got {self.regime!r}")
        if self.n_epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.n_epochs}")
        if not 0.0 < self.ratio < 1.0:
            raise ConfigError(f"ratio must lie strictly between 0 and 1, got {self.ratio}")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if not self.d:
            raise ConfigError("at least one d value is required")
        if self.max_thresholds is not None and self.max_thresholds < 1:
            raise ConfigError("max_thresholds must be >= 1")
        try:
            for d in self.d:
                if d != BASELINE:
                    TmConfig(n_features=1, d=d, regime=self.regime, **kw)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return self


def _parse_d(value: str) -> list:
    out = []
    for token in str(value).split(","):
        token = token.strip().lower()
        if token in ("tm", "baseline"):
            out.append(BASELINE)
            continue
        try:
            out.append(check_period(token))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return out


def _parse_int_list(value: str) -> list[int]:
    try:
        return [int(t) for t in str(value).split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"expected a comma separated list of integers, got {value!r}") from None


_CONVERTERS = {
    "dataset": str, "data_path": str, "m": int, "T": int, "s": float, "d": _parse_d, "N": int,
    "regime": str, "epochs": int, "ratio": float, "seeds": _parse_int_list, "out": str,
    "max_thresholds": int,
}


def _convert(key: str, value):
    if key not in _CONVERTERS:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        return _CONVERTERS[key](value)
    except ConfigError:
        raise
    except ValueError:
        raise ConfigError(f"bad value for {key}: {value!r}") from None


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = _convert(key, value)
    return values


def build_config(args) -> ExperimentConfig:
    values = read_config(args.config) if getattr(args, "config", None) else {}
    for f in fields(ExperimentConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = _convert(f.name, flag)
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        values[key.strip()] = _convert(key.strip(), value.strip())
    cfg = ExperimentConfig(**values)
    return cfg.validate()


def output_dir(cfg_out: Optional[str], default_name: str) -> Path:
    path = Path(cfg_out) if cfg_out else Path(os.environ.get("ADTM_OUTPUT_DIR", "runs")) / default_name
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        writer.writerows(rows)


def _profile_for(name: str):
    try:
        return energy.get_profile(name)
    except KeyError:
        return None


# commands -----------------------------------------------------------------

def cmd_train(args) -> int:
    cfg = build_config(args)
    dataset = load_dataset(cfg.dataset, cfg.data_path)
    out = output_dir(cfg.out, f"train-{cfg.dataset}")
    seed = cfg.seeds[0]
    profile = _profile_for(cfg.dataset)
    summary = []
    for d in cfg.d:
        params = cfg.machine_kwargs()
        run_d = d
        if cfg.regime == "tm" and d != BASELINE:
            run_d = BASELINE
        result = run_once(dataset, run_d, seed, cfg.ratio, cfg.n_epochs, cfg.max_thresholds, **params)
        tag = d_label(run_d)
        result.model.save(out / f"model_d{tag}.adtm")
        if result.binarizer is not None:
            result.binarizer.save(out / "codebook.json")
        _write_csv(out / f"curve_d{tag}.csv", ["epoch", "train_acc", "test_acc"],
                   [[h["epoch"], f"{h['train_acc']:.6f}", f"{h['test_acc']:.6f}"] for h in result.history])
        rep = energy.report(result.model.accounting_, result.model.tm_.config, profile)
        _write_json(out / f"energy_d{tag}.json", rep)
        summary.append({"d": tag, "seed": seed, **result.scores})
        print(f"{cfg.dataset} d={tag} seed={seed}: F1={result.scores['f1']:.3f} acc={result.scores['accuracy']:.3f}")
    _write_json(out / "metrics.json", {"config": _config_dict(cfg), "runs": summary,
                                       "dataset_notes": dataset.notes})
    return 0


def cmd_benchmark(args) -> int:
    cfg = build_config(args)
    dataset = load_dataset(cfg.dataset, cfg.data_path)
    out = output_dir(cfg.out, f"benchmark-{cfg.dataset}")
    rows = sweep(dataset, cfg.d, cfg.seeds, ratio=cfg.ratio, epochs=cfg.n_epochs,
                 max_thresholds=cfg.max_thresholds, **cfg.machine_kwargs())
    _write_csv(out / "results.csv", ["d", "f1_mean", "f1_std", "acc_mean", "acc_std", "seeds"],
               [[r["d"], f"{r['f1_mean']:.6f}", f"{r['f1_std']:.6f}", f"{r['acc_mean']:.6f}",
                 f"{r['acc_std']:.6f}", r["seeds"]] for r in rows])
    per_seed = []
    for r in rows:
        for seed, f1, acc in zip(cfg.seeds, r["f1_per_seed"], r["acc_per_seed"]):
            per_seed.append([r["d"], seed, f"{f1:.6f}", f"{acc:.6f}"])
    _write_csv(out / "results_per_seed.csv", ["d", "seed", "f1", "accuracy"], per_seed)
    table = format_sweep(f"{cfg.dataset} (mean ± std over {len(cfg.seeds)} seeds)", rows)
    (out / "results.txt").write_text(table + "\n")
    print(table)
    return 0


def cmd_simulate_la(args) -> int:
    try:
        probs = tuple(float(p) for p in args.probs.split(","))
        kind = Kind(args.kind)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if len(probs) != 2 or any(not 0.0 <= p <= 1.0 for p in probs):
        raise ConfigError(f"--probs needs two probabilities in [0, 1], got {args.probs!r}")
    if args.steps < 1 or args.trials < 1 or args.N < 1:
        raise ConfigError("--steps, --trials and --N must be >= 1")
    result = simulate_two_armed(kind, probs, args.steps, args.trials, args.N, args.seed)
    text = json.dumps(result, indent=2, sort_keys=True)
    if args.out:
        out = output_dir(args.out, "simulate-la")
        (out / "simulate_la.json").write_text(text + "\n")
    print(text)
    return 0


def cmd_energy_report(args) -> int:
    try:
        profiles = energy.load_profiles(args.calibration)
    except FileNotFoundError:
        raise ConfigError(f"calibration file not found: {args.calibration}") from None
    if args.dataset not in profiles:
        raise ConfigError(f"no power profile for {args.dataset!r}; known: {', '.join(sorted(profiles))}")
    d_values = [d for d in _parse_d(args.d) if d != BASELINE]
    profile = profiles[args.dataset]
    rows = energy.power_table(profile, d_values)
    if args.json:
        print(json.dumps({"profile": profile.name, "label": energy.MODEL_LABEL, "rows": rows},
                         indent=2, sort_keys=True))
    else:
        print(energy.format_power_table(profile, rows))
    if args.out:
        out = output_dir(args.out, "energy-report")
        _write_json(out / f"energy_{profile.name}.json",
                    {"profile": profile.name, "label": energy.MODEL_LABEL, "rows": rows})
    return 0


def cmd_prepare_data(args) -> int:
    cfg = build_config(args)
    dataset = load_dataset(cfg.dataset, cfg.data_path)
    out = output_dir(cfg.out, f"data-{cfg.dataset}")
    seed = cfg.seeds[0]
    train, test = split(dataset, cfg.ratio, seed)
    if dataset.name == "xor":
        X_train, X_test, names = train.X, test.X, dataset.feature_names
    else:
        binarizer = ThermometerBinarizer(categorical=dataset.categorical, max_thresholds=cfg.max_thresholds,
                                         feature_names=dataset.feature_names).fit(train.X)
        binarizer.save(out / "codebook.json")
        X_train, X_test = binarizer.transform(train.X), binarizer.transform(test.X)
        names = list(binarizer.get_feature_names_out())
    write_bits(out / "train.bits", X_train, train.y, names)
    write_bits(out / "test.bits", X_test, test.y, names)
    _write_json(out / "provenance.json", {"dataset": dataset.name, "rows": len(dataset),
                                          "label_counts": dataset.label_counts, "o": int(X_train.shape[1]),
                                          "split_seed": seed, "ratio": cfg.ratio, "notes": dataset.notes})
    print(f"{dataset.name}: {len(train)} train / {len(test)} test rows, o={X_train.shape[1]} -> {out}")
    return 0


def _config_dict(cfg: ExperimentConfig) -> dict:
    raw = asdict(cfg)
    raw.pop("out")
    raw["d"] = [d_label(d) for d in cfg.d]
    raw.update(cfg.machine_kwargs(), epochs=cfg.n_epochs)
    return raw


def _add_experiment_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value settings file")
    p.add_argument("--dataset", help=", ".join(DATASETS))
    p.add_argument("--data-path", dest="data_path")
    p.add_argument("--m", help="number of clauses (even)")
    p.add_argument("--T", help="vote target")
    p.add_argument("--s", help="strong step size")
    p.add_argument("--d", help="determinism period(s), comma separated; 'inf' and 'tm' allowed")
    p.add_argument("--N", help="states per action")
    p.add_argument("--regime", help="adtm or tm")
    p.add_argument("--epochs")
    p.add_argument("--ratio", help="training fraction of the stratified split")
    p.add_argument("--seeds", help="comma separated seeds")
    p.add_argument("--max-thresholds", dest="max_thresholds")
    p.add_argument("--out")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adtm", description="Arbitrarily deterministic Tsetlin machine")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one model per d value and write model, curve and energy files")
    _add_experiment_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("benchmark", help="F1/accuracy per d value averaged over seeds")
    _add_experiment_args(p)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("prepare-data", help="split, binarize and cache a dataset as bit-matrix files")
    _add_experiment_args(p)
    p.set_defaults(func=cmd_prepare_data)

    p = sub.add_parser("simulate-la", help="two-armed environment convergence of TA/Krinsky/Krylov")
    p.add_argument("--kind", default="ta", help="ta, krinsky or krylov")
    p.add_argument("--probs", default="0.9,0.1", help="reward probabilities of the two arms")
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--N", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate_la)

    p = sub.add_parser("energy-report", help="modelled PRNG power per d for a calibrated dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--d", default="1,10,100,500,1000,5000,inf")
    p.add_argument("--calibration", help="power profile JSON (defaults to the bundled one)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_energy_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"adtm: invalid configuration: {exc}", file=sys.stderr)
        return 1
    except (FileNotFoundError, DatasetError, OSError) as exc:
        print(f"adtm: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("run failed", exc_info=True)
        print(f"adtm: run failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
