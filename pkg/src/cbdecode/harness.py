"""Monte Carlo estimation of logical error rates.

Shots are sampled, decoded and scored independently; per-shot RNG streams
derive from (seed, shot_index) so results are reproducible and independent
of execution order.  Experiments stop at a shot budget or once a target
number of logical failures has accumulated, and report the total logical
error rate together with its per-cycle normalization.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bbcodes import BBCodeSpec, CSSCode, build_bb_code
from .bp import BPDecoder, bp_cb_decode
from .cb import CBParams, DecodeStats, cb_decode
from .gf2 import mat_vec_mod2
from .noise import (
    DetectorModel,
    data_qubit_model,
    load_detector_model,
    phenomenological_model,
    sample_depolarizing,
    sample_shot,
    shot_rng,
)

DATA_QUBIT = "data-qubit"
PHENOMENOLOGICAL = "phenomenological"
CIRCUIT_FILE = "circuit-file"

CSV_COLUMNS = [
    "code",
    "noise",
    "p",
    "rounds",
    "max_gr",
    "max_br",
    "max_tcts",
    "decoder",
    "shots",
    "failures",
    "PL_total",
    "PL_per_cycle",
    "mean_decode_us",
]


@dataclass
class ExperimentConfig:
    """One Monte Carlo experiment: a noise source, a decoder, budgets."""

    noise: str
    p: float = 0.0
    q: float | None = None
    rounds: int = 1
    code_spec: BBCodeSpec | None = None
    dem_path: str | None = None
    params: CBParams = field(default_factory=lambda: CBParams(6, 10, 3))
    decoder: str = "bp+cb"
    sector: str = "x"
    max_shots: int = 10_000
    max_failures: int | None = 100
    seed: int = 0
    bp_iters: int = 30
    name: str = ""

    def __post_init__(self):
        if self.noise not in (DATA_QUBIT, PHENOMENOLOGICAL, CIRCUIT_FILE):
            raise ValueError(f"unknown noise model {self.noise!r}")
        has_code = self.code_spec is not None
        has_dem = self.dem_path is not None
        if self.noise == CIRCUIT_FILE:
            if not has_dem or has_code:
                raise ValueError("circuit-file noise takes a dem_path and no code spec")
        else:
            if not has_code or has_dem:
                raise ValueError(f"{self.noise} noise takes a code spec and no dem_path")
        if self.decoder not in ("cb", "bp+cb"):
            raise ValueError(f"unknown decoder {self.decoder!r}")
        if self.sector not in ("x", "z", "both"):
            raise ValueError("sector must be x, z or both")
        if self.max_shots < 1:
            raise ValueError("max_shots must be >= 1")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")

    def label(self) -> str:
        if self.name:
            return self.name
        if self.code_spec is not None:
            return self.code_spec.name or f"bb_l{self.code_spec.l}_m{self.code_spec.m}"
        return os.path.basename(self.dem_path or "dem")


@dataclass
class ExperimentResult:
    shots_run: int
    logical_failures: int
    p_l_total: float
    p_l_per_cycle: float
    rounds: int
    wall_time_s: float
    decode_mean_us: float
    decode_p50_us: float
    decode_p90_us: float
    decode_p99_us: float


def required_shots(target_pl_d: float) -> int:
    """Shot budget rule of thumb: 100 observed failures at the target rate."""
    if not 0.0 < target_pl_d <= 1.0:
        raise ValueError("target logical error rate must lie in (0, 1]")
    return math.ceil(100.0 / target_pl_d)


def logical_failure(
    model: DetectorModel,
    actual: np.ndarray,
    recovered: np.ndarray,
    *,
    verify_residual: bool = False,
) -> bool:
    """True iff the residual actual + recovered flips any logical observable.

    With verify_residual (data-qubit mode) a residual outside the check
    kernel raises, since the decoder should never emit such an estimate.
    """
    residual = (np.asarray(actual, dtype=np.uint8) ^ np.asarray(recovered, dtype=np.uint8))
    if verify_residual and mat_vec_mod2(model.noise_matrix, residual).any():
        raise ValueError("residual error has a nonzero syndrome")
    return bool(mat_vec_mod2(model.observables, residual).any())


class _ShotRunner:
    """Per-process experiment state: models, decoders, scoring."""

    def __init__(self, config: ExperimentConfig, decode_fn=None, stats: DecodeStats | None = None):
        self.config = config
        self.stats = stats
        self.decode_fn = decode_fn
        self.code: CSSCode | None = None
        self.sectors: list[tuple[DetectorModel, BPDecoder | None, str]] = []
        if config.noise == DATA_QUBIT:
            self.code = build_bb_code(config.code_spec)
            mx, mz = data_qubit_model(self.code, config.p)
            wanted = {"x": [("x", mx)], "z": [("z", mz)], "both": [("x", mx), ("z", mz)]}
            for sector, model in wanted[config.sector]:
                self.sectors.append(self._prepare(model) + (sector,))
        elif config.noise == PHENOMENOLOGICAL:
            self.code = build_bb_code(config.code_spec)
            q = config.q if config.q is not None else config.p
            model = phenomenological_model(self.code, config.p, q, config.rounds)
            self.sectors.append(self._prepare(model) + ("x",))
        else:
            model = load_detector_model(config.dem_path)
            self.sectors.append(self._prepare(model) + ("x",))

    def _prepare(self, model: DetectorModel) -> tuple[DetectorModel, BPDecoder | None]:
        bp = None
        if self.config.decoder == "bp+cb" and self.decode_fn is None and model.priors.any():
            # zero priors (q = 0 measurement columns, say) get a tiny floor so
            # belief propagation stays defined; their llrs clamp to the maximum
            priors = np.clip(model.priors, 1e-12, 0.5)
            bp = BPDecoder(model.noise_matrix, priors)
        return (model, bp)

    def _decode(self, model: DetectorModel, bp: BPDecoder | None, syndrome: np.ndarray) -> np.ndarray:
        if self.decode_fn is not None:
            return self.decode_fn(model, syndrome)
        if not syndrome.any():
            return np.zeros(model.noise_matrix.cols, dtype=np.uint8)
        if self.config.decoder == "cb":
            return cb_decode(syndrome, self.config.params, model.noise_matrix, stats=self.stats)
        return bp_cb_decode(
            syndrome,
            self.config.params,
            model,
            self.config.bp_iters,
            decoder=bp,
            stats=self.stats,
        )

    def run_shot(self, index: int) -> tuple[bool, float]:
        """Returns (logical failure?, decode seconds)."""
        rng = shot_rng(self.config.seed, index)
        cfg = self.config
        if cfg.noise == DATA_QUBIT:
            err = sample_depolarizing(self.code.n, cfg.p, rng)
            parts = {"x": err.x_part, "z": err.z_part}
            failed = False
            spent = 0.0
            for model, bp, sector in self.sectors:
                actual = parts[sector]
                syndrome = mat_vec_mod2(model.noise_matrix, actual)
                t0 = time.perf_counter()
                recovered = self._decode(model, bp, syndrome)
                spent += time.perf_counter() - t0
                if not recovered.any() and syndrome.any():
                    failed = True  # declared failure
                elif logical_failure(model, actual, recovered, verify_residual=True):
                    failed = True
            return failed, spent
        model, bp, _ = self.sectors[0]
        shot = sample_shot(model, rng)
        t0 = time.perf_counter()
        recovered = self._decode(model, bp, shot.syndrome)
        spent = time.perf_counter() - t0
        if not recovered.any() and shot.syndrome.any():
            return True, spent
        flips = mat_vec_mod2(model.observables, recovered)
        return bool((flips != shot.observable_flips).any()), spent


def _run_range(config: ExperimentConfig, lo: int, hi: int) -> tuple[int, list[float]]:
    runner = _ShotRunner(config)
    failures = 0
    times: list[float] = []
    for i in range(lo, hi):
        failed, spent = runner.run_shot(i)
        failures += failed
        times.append(spent)
    return failures, times


def run_experiment(
    config: ExperimentConfig,
    *,
    threads: int = 1,
    stats: DecodeStats | None = None,
    decode_fn=None,
) -> ExperimentResult:
    """Sample, decode and score shots until the shot or failure target."""
    t_start = time.perf_counter()
    failures = 0
    times: list[float] = []
    shots_run = 0
    if threads <= 1 or decode_fn is not None or stats is not None:
        runner = _ShotRunner(config, decode_fn=decode_fn, stats=stats)
        for i in range(config.max_shots):
            failed, spent = runner.run_shot(i)
            failures += failed
            times.append(spent)
            shots_run += 1
            if config.max_failures is not None and failures >= config.max_failures:
                break
    else:
        wave = threads * 250
        with ProcessPoolExecutor(max_workers=threads) as pool:
            while shots_run < config.max_shots:
                hi = min(shots_run + wave, config.max_shots)
                bounds = np.linspace(shots_run, hi, threads + 1, dtype=int)
                jobs = [
                    pool.submit(_run_range, config, int(a), int(b))
                    for a, b in zip(bounds[:-1], bounds[1:])
                    if b > a
                ]
                for job in jobs:
                    f, ts = job.result()
                    failures += f
                    times.extend(ts)
                shots_run = hi
                if config.max_failures is not None and failures >= config.max_failures:
                    break
    wall = time.perf_counter() - t_start
    arr = np.array(times) * 1e6
    pl_total = failures / shots_run if shots_run else 0.0
    return ExperimentResult(
        shots_run=shots_run,
        logical_failures=failures,
        p_l_total=pl_total,
        p_l_per_cycle=pl_total / config.rounds,
        rounds=config.rounds,
        wall_time_s=wall,
        decode_mean_us=float(arr.mean()) if len(arr) else 0.0,
        decode_p50_us=float(np.percentile(arr, 50)) if len(arr) else 0.0,
        decode_p90_us=float(np.percentile(arr, 90)) if len(arr) else 0.0,
        decode_p99_us=float(np.percentile(arr, 99)) if len(arr) else 0.0,
    )


def result_row(config: ExperimentConfig, result: ExperimentResult) -> list[str]:
    return [
        config.label(),
        config.noise,
        repr(float(config.p)),
        str(config.rounds),
        str(config.params.max_gr),
        str(config.params.max_br),
        str(config.params.max_tcts),
        config.decoder,
        str(result.shots_run),
        str(result.logical_failures),
        repr(result.p_l_total),
        repr(result.p_l_per_cycle),
        f"{result.decode_mean_us:.1f}",
    ]


def append_csv(path: str, rows: list[list[str]]) -> None:
    """Append result rows, writing the header when the file is new."""
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", encoding="utf-8") as fh:
        if new:
            fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def crossing_estimate(points: list[tuple[float, float]]) -> float | None:
    """Log-log interpolated p where the logical rate crosses p itself.

    Points are (p, P_L) pairs with strictly increasing p; zero rates are
    skipped.  Returns None when no sign change brackets a crossing.
    """
    clean = [(p, pl) for p, pl in points if pl > 0.0]
    for (p1, y1), (p2, y2) in zip(clean, clean[1:]):
        s1 = math.log(y1) - math.log(p1)
        s2 = math.log(y2) - math.log(p2)
        if s1 == 0.0:
            return p1
        if s1 * s2 < 0.0 or s2 == 0.0:
            x1, x2 = math.log(p1), math.log(p2)
            ly1, ly2 = math.log(y1), math.log(y2)
            x = (ly1 * (x2 - x1) - x1 * (ly2 - ly1)) / ((x2 - x1) - (ly2 - ly1))
            return math.exp(x)
    return None
