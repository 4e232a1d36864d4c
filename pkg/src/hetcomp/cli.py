"""Command line entry point.

    hetcomp --scenario B --seed 7 --out results/b7

Values come from built-in defaults, then ``--config FILE`` (flat TOML whose
keys mirror the flag names), then explicit flags.
"""

from __future__ import annotations

import argparse
import logging
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .propagation import INTERFERENCE_MODELS
from .runner import run
from .sim import MODES, ConfigError, RunConfig

# flag / config key -> RunConfig field
FLAG_FIELDS = {
    "scenario": "scenario",
    "mode": "mode",
    "seed": "seed",
    "ttis": "n_ttis",
    "t-comp": "t_comp",
    "epsilon": "epsilon",
    "sinr-min": "sinr_min",
    "out": "output_dir",
    "interference": "interference",
}
# accepted only in the config file
FILE_ONLY = {
    "r-train": "r_train",
    "cv-k": "cv_k",
    "ues": "n_ues",
    "baseline-aggregate": "baseline_aggregate",
    "stream2-prbs": "stream2_prbs",
    "grid-c": "grid_c",
    "grid-scales": "grid_scales",
    "grid-kernels": "grid_kernels",
    "grid-degrees": "grid_degrees",
    "grid-normalize": "grid_normalize",
    "fading-rho": "fading_rho",
    "fading-sigma": "fading_sigma",
    "figures": "figures",
}
TUPLE_FIELDS = {"grid_c", "grid_scales", "grid_kernels", "grid_degrees", "grid_normalize"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hetcomp", description="Simulate baseline vs SVM-gated downlink CoMP.")
    S = argparse.SUPPRESS
    p.add_argument("--scenario", choices=["A", "B"], default=S, help="A: one macro site, B: seven (default A)")
    p.add_argument("--mode", choices=MODES, default=S, help="controller(s) to run (default both)")
    p.add_argument("--seed", type=int, default=S, help="root seed (default 0)")
    p.add_argument("--ttis", type=int, default=S, help="simulated TTIs (default 60)")
    p.add_argument("--t-comp", type=int, default=S, help="collection window in TTIs (default 3)")
    p.add_argument("--epsilon", type=float, default=S, help="misclassification threshold (default 0.12)")
    p.add_argument("--sinr-min", type=float, default=S, help="baseline trigger in dB (default 3)")
    p.add_argument("--out", default=S, help="output directory (default: no files written)")
    p.add_argument("--interference", choices=INTERFERENCE_MODELS, default=S, help="link SINR model (default none)")
    p.add_argument("--config", help="flat TOML file with the same keys as the flags")
    p.add_argument("--no-figures", action="store_true", help="skip the PNG figures")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def load_config_file(path: str) -> dict:
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    known = {**FLAG_FIELDS, **FILE_ONLY}
    out = {}
    for key, value in raw.items():
        name = key.replace("_", "-")
        if name not in known:
            raise ConfigError(key, "unknown configuration key")
        if isinstance(value, dict):
            raise ConfigError(key, "nested tables are not supported")
        field = known[name]
        out[field] = tuple(value) if field in TUPLE_FIELDS else value
    return out


def parse_cli(argv=None) -> RunConfig:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    values: dict = {}
    try:
        if args.get("config"):
            values.update(load_config_file(args["config"]))
        for flag, field in FLAG_FIELDS.items():
            dest = flag.replace("-", "_")
            if dest in args:
                values[field] = args[dest]
        if args.get("no_figures"):
            values["figures"] = False
        return RunConfig(**values)
    except (ConfigError, OSError, tomllib.TOMLDecodeError, TypeError) as exc:
        parser.error(str(exc))


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    verbose = "-v" in argv or "--verbose" in argv
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")
    cfg = parse_cli(argv)
    summaries = run(cfg)
    for mode, s in summaries.items():
        pico = s.groups["pico"]
        print(
            f"{cfg.scenario} {mode:8s} pico avg {pico.average:.3f} edge {pico.edge:.3f} Mbps | "
            f"overall avg {s.groups['overall'].average:.3f} Mbps | BLER {s.bler_percent} | "
            f"CQI {s.mean_cqi_rounded} | RSRP {s.mean_rsrp:.2f} dBm | CoMP on {100 * s.extra['comp_on_fraction']:.0f}%"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
