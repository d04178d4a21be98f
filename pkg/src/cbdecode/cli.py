"""Command-line front end: build codes and noise models, run experiments.

All commands are non-interactive.  Exit codes: 0 success, 1 partial failure
(a sweep completed some points), 2 usage or parse errors.  Config files are
YAML; command-line flags override file values.  The default seed comes from
the CBDECODE_SEED environment variable when neither flag nor file sets one.
"""

from __future__ import annotations

import argparse
import os
import sys

import yaml

from .bbcodes import BBCodeSpec, STANDARD_CODES, build_bb_code, load_code_spec, spec_from_dict
from .cb import CBParams
from .gf2 import save_matrix
from .harness import (
    CIRCUIT_FILE,
    DATA_QUBIT,
    PHENOMENOLOGICAL,
    ExperimentConfig,
    append_csv,
    crossing_estimate,
    result_row,
    run_experiment,
)
from .noise import (
    data_qubit_model,
    load_detector_model,
    phenomenological_model,
    save_detector_model,
)


def _env_seed() -> int:
    try:
        return int(os.environ.get("CBDECODE_SEED", "0"))
    except ValueError:
        return 0


def _resolve_code(value) -> BBCodeSpec:
    """A registry name (bb72/bb108/bb144), a spec-file path, or a mapping."""
    if isinstance(value, dict):
        return spec_from_dict(value)
    if isinstance(value, str):
        if value in STANDARD_CODES:
            return STANDARD_CODES[value]
        return load_code_spec(value)
    raise ValueError(f"cannot interpret code spec {value!r}")


def _weight_summary(weights: list[int]) -> str:
    return f"min={min(weights)} max={max(weights)} mean={sum(weights) / len(weights):.2f}"


def cmd_build_code(args) -> int:
    try:
        spec = _resolve_code(args.spec)
        code = build_bb_code(spec)
    except (OSError, ValueError, yaml.YAMLError) as exc:
        print(f"build-code: {exc}", file=sys.stderr)
        return 2
    save_matrix(code.hx, args.out + ".hx.txt")
    save_matrix(code.hz, args.out + ".hz.txt")
    print(f"n={code.n} k={code.k}")
    print(f"hx rows: {_weight_summary(code.hx.row_weights())}  cols: {_weight_summary(code.hx.col_weights())}")
    print(f"hz rows: {_weight_summary(code.hz.row_weights())}  cols: {_weight_summary(code.hz.col_weights())}")
    print(f"wrote {args.out}.hx.txt and {args.out}.hz.txt")
    return 0


def cmd_build_noise(args) -> int:
    try:
        spec = _resolve_code(args.code)
        code = build_bb_code(spec)
        if args.model == DATA_QUBIT:
            mx, mz = data_qubit_model(code, args.p)
            model = mx if args.sector == "x" else mz
        else:
            q = args.q if args.q is not None else args.p
            rounds = args.rounds if args.rounds else (spec.distance or 1)
            model = phenomenological_model(code, args.p, q, rounds)
        save_detector_model(model, args.out)
    except (OSError, ValueError, yaml.YAMLError) as exc:
        print(f"build-noise: {exc}", file=sys.stderr)
        return 2
    print(
        f"wrote {args.out}: detectors={model.noise_matrix.rows} "
        f"mechanisms={model.noise_matrix.cols} observables={model.observables.rows}"
    )
    return 0


def _config_from_file(path: str, args) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: experiment config must be a mapping")
    noise = data.get("noise", DATA_QUBIT)
    code_spec = None
    dem_path = None
    if noise == CIRCUIT_FILE:
        dem_path = data.get("dem")
        if dem_path is None:
            raise ValueError("circuit-file noise needs a 'dem' path")
    else:
        if "code" not in data:
            raise ValueError("config needs a 'code' entry")
        code_spec = _resolve_code(data["code"])
    p = float(args.p if args.p is not None else data.get("p", 0.0))
    rounds = int(data.get("rounds", 1))
    if noise == PHENOMENOLOGICAL and "rounds" not in data and code_spec and code_spec.distance:
        rounds = code_spec.distance
    seed = args.seed if args.seed is not None else data.get("seed", _env_seed())
    max_shots = int(args.shots if args.shots is not None else data.get("max_shots", 10_000))
    max_failures = data.get("max_failures", 100)
    if args.failures is not None:
        max_failures = args.failures
    if max_failures is not None:
        max_failures = int(max_failures)
    return ExperimentConfig(
        noise=noise,
        p=p,
        q=float(data["q"]) if "q" in data else None,
        rounds=rounds,
        code_spec=code_spec,
        dem_path=dem_path,
        params=CBParams(
            max_gr=int(data.get("max_gr", 6)),
            max_br=int(data.get("max_br", 10)),
            max_tcts=int(data.get("max_tcts", 3)),
        ),
        decoder=args.decoder or data.get("decoder", "bp+cb"),
        sector=data.get("sector", "x"),
        max_shots=max_shots,
        max_failures=max_failures,
        seed=int(seed),
        bp_iters=int(data.get("bp_iters", 30)),
        name=str(data.get("name", "")),
    )


def cmd_run(args) -> int:
    try:
        config = _config_from_file(args.config, args)
        result = run_experiment(config, threads=args.threads)
    except (OSError, ValueError, yaml.YAMLError) as exc:
        print(f"run: {exc}", file=sys.stderr)
        return 2
    if args.csv:
        append_csv(args.csv, [result_row(config, result)])
    print(
        f"{config.label()} noise={config.noise} p={config.p} rounds={config.rounds} "
        f"decoder={config.decoder} shots={result.shots_run} failures={result.logical_failures} "
        f"PL_total={result.p_l_total:.6g} PL_per_cycle={result.p_l_per_cycle:.6g} "
        f"mean_decode_us={result.decode_mean_us:.1f}"
    )
    return 0


def cmd_sweep(args) -> int:
    try:
        with open(args.sweep, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, dict):
            raise ValueError("sweep spec must be a mapping")
        probabilities = [float(p) for p in data.get("probabilities", [])]
        if not probabilities:
            raise ValueError("sweep needs a non-empty 'probabilities' list")
        if any(not 0.0 < p < 1.0 for p in probabilities):
            raise ValueError("probabilities must lie in (0, 1)")
        if any(b <= a for a, b in zip(probabilities, probabilities[1:])):
            raise ValueError("probabilities must be strictly increasing")
        entries = data.get("codes", [])
        if not entries:
            raise ValueError("sweep needs a non-empty 'codes' list")
        out_csv = data.get("output", "sweep.csv")
    except (OSError, ValueError, yaml.YAMLError) as exc:
        print(f"sweep: {exc}", file=sys.stderr)
        return 2

    partial = False
    for entry in entries:
        label = entry.get("name", "")
        points: list[tuple[float, float]] = []
        series_rows: list[str] = []
        for p in probabilities:
            try:
                noise = entry.get("noise", DATA_QUBIT)
                code_spec = _resolve_code(entry["code"]) if noise != CIRCUIT_FILE else None
                rounds = int(entry.get("rounds", 1))
                if noise == PHENOMENOLOGICAL and "rounds" not in entry and code_spec and code_spec.distance:
                    rounds = code_spec.distance
                config = ExperimentConfig(
                    noise=noise,
                    p=p,
                    q=float(entry["q"]) if "q" in entry else None,
                    rounds=rounds,
                    code_spec=code_spec,
                    dem_path=entry.get("dem"),
                    params=CBParams(
                        max_gr=int(entry.get("max_gr", 6)),
                        max_br=int(entry.get("max_br", 10)),
                        max_tcts=int(entry.get("max_tcts", 3)),
                    ),
                    decoder=entry.get("decoder", "bp+cb"),
                    sector=entry.get("sector", "x"),
                    max_shots=int(entry.get("max_shots", 100_000)),
                    max_failures=entry.get("max_failures", 100),
                    seed=int(entry.get("seed", args.seed if args.seed is not None else _env_seed())),
                    name=label,
                )
                result = run_experiment(config, threads=args.threads)
            except (OSError, ValueError, yaml.YAMLError) as exc:
                print(f"sweep point {label} p={p}: {exc}", file=sys.stderr)
                partial = True
                continue
            append_csv(out_csv, [result_row(config, result)])
            points.append((p, result.p_l_per_cycle))
            series_rows.append(f"{p!r} {result.p_l_per_cycle!r}")
            print(
                f"{config.label()} p={p} shots={result.shots_run} "
                f"failures={result.logical_failures} PL_per_cycle={result.p_l_per_cycle:.6g}"
            )
        series_path = f"{os.path.splitext(out_csv)[0]}_{config_label_for(entry)}.dat"
        with open(series_path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(series_rows) + ("\n" if series_rows else ""))
        crossing = crossing_estimate(points)
        if crossing is None:
            print(f"{config_label_for(entry)}: no p = P_L crossing bracketed")
        else:
            print(f"{config_label_for(entry)}: p = P_L crossing at {crossing:.4g}")
    return 1 if partial else 0


def config_label_for(entry: dict) -> str:
    if entry.get("name"):
        return str(entry["name"])
    code = entry.get("code")
    if isinstance(code, str):
        return os.path.splitext(os.path.basename(code))[0]
    if isinstance(code, dict):
        return f"bb_l{code.get('l')}_m{code.get('m')}"
    return "dem"


def cmd_dem_info(args) -> int:
    try:
        model = load_detector_model(args.path)
    except (OSError, ValueError) as exc:
        print(f"dem-info: {exc}", file=sys.stderr)
        return 2
    nm = model.noise_matrix
    rw = nm.row_weights() or [0]
    cw = nm.col_weights() or [0]
    print(f"detectors={nm.rows} mechanisms={nm.cols} observables={model.observables.rows}")
    print(f"row weights: {_weight_summary(rw)}")
    print(f"col weights: {_weight_summary(cw)}")
    if nm.cols:
        print(f"priors: min={float(model.priors.min())!r} max={float(model.priors.max())!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cbdecode",
        description="Closed-branch decoding toolkit for quantum LDPC codes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_code = sub.add_parser("build-code", help="construct a code and export its check matrices")
    p_code.add_argument("spec", help="code spec file or registry name (bb72/bb108/bb144)")
    p_code.add_argument("--out", default="code", help="output path prefix")
    p_code.set_defaults(func=cmd_build_code)

    p_noise = sub.add_parser("build-noise", help="build a noise model and export it")
    p_noise.add_argument("--code", required=True, help="code spec file or registry name")
    p_noise.add_argument("--model", choices=[DATA_QUBIT, PHENOMENOLOGICAL], default=DATA_QUBIT)
    p_noise.add_argument("--p", type=float, required=True)
    p_noise.add_argument("--q", type=float, default=None)
    p_noise.add_argument("--rounds", type=int, default=0)
    p_noise.add_argument("--sector", choices=["x", "z"], default="x")
    p_noise.add_argument("--out", required=True)
    p_noise.set_defaults(func=cmd_build_noise)

    p_run = sub.add_parser("run", help="run one experiment from a config file")
    p_run.add_argument("config")
    p_run.add_argument("--csv", default=None, help="append a result row to this CSV")
    p_run.add_argument("--p", type=float, default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--shots", type=int, default=None)
    p_run.add_argument("--failures", type=int, default=None)
    p_run.add_argument("--decoder", choices=["cb", "bp+cb"], default=None)
    p_run.add_argument("--threads", type=int, default=1)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a probability sweep from a sweep spec")
    p_sweep.add_argument("sweep")
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--threads", type=int, default=1)
    p_sweep.set_defaults(func=cmd_sweep)

    p_info = sub.add_parser("dem-info", help="inspect a detector-model file")
    p_info.add_argument("path")
    p_info.set_defaults(func=cmd_dem_info)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
