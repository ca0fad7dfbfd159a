"""Parameter sweeps, time-varying-loss Monte Carlo and delimited-text tables."""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import ndtri

from .channels import LossConfig, db_to_reflectivity
from .fock import InvariantViolation
from .measures import log_negativity
from .protocol import (
    SIGNAL_SPLIT,
    ConditionalResult,
    PipelineConfig,
    closed_form_conditional,
    idler_loss_state,
    simulate_pipeline,
)

SWEEP_COLUMNS = ("g", "sigma", "k", "r_a2", "r_b2", "r_s", "r_d", "probability", "e_n", "source")
EN_SLACK = 1e-9


def worker_count() -> int:
    """Worker cap from ``FOCKLINE_THREADS`` (unset or 0 means one per CPU)."""
    raw = os.environ.get("FOCKLINE_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"FOCKLINE_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"FOCKLINE_THREADS must be >= 0, got {n}")
    return n or (os.cpu_count() or 1)


def ordered_map(fn: Callable, items: Sequence) -> list:
    """``[fn(x) for x in items]`` spread over worker threads; output order follows input order."""
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class LossPoint:
    """One sweep grid point: idler, signal (both arms) and detector (both ports) reflectivities."""

    r_a2: float
    r_b2: float
    r_s: float = 0.0
    r_d: float = 0.0

    @classmethod
    def from_db(cls, idler_db: float, r_s: float = 0.0, r_d: float = 0.0) -> "LossPoint":
        r = db_to_reflectivity(idler_db)
        return cls(r, r, r_s, r_d)

    def loss_config(self) -> LossConfig:
        return LossConfig(self.r_a2, self.r_b2, self.r_s, self.r_s, self.r_d, self.r_d)


@dataclass(frozen=True)
class SweepSpec:
    g: float
    sigma: int
    k_set: tuple[int, ...]
    grid: tuple[LossPoint, ...]
    mode: str = "full_sim"
    output_path: str | None = None

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError(f"gain must be positive, got {self.g}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")
        if self.mode not in ("full_sim", "closed_form"):
            raise ValueError(f"mode must be 'full_sim' or 'closed_form', got {self.mode!r}")
        if not self.grid:
            raise ValueError("loss grid is empty")
        for k in self.k_set:
            if not 0 <= k <= self.sigma:
                raise ValueError(f"readout k={k} outside 0..sigma={self.sigma}")
        for i, point in enumerate(self.grid):
            try:
                point.loss_config()
            except ValueError as exc:
                raise ValueError(f"grid entry {i}: {exc}") from None


def _row(g, sigma, point: LossPoint, result: ConditionalResult) -> dict:
    if result.e_n is not None and not (-EN_SLACK <= result.e_n <= math.log2(sigma + 1) + EN_SLACK):
        raise InvariantViolation(f"E_N={result.e_n!r} outside [0, log2(sigma+1)] at k={result.k}")
    return {
        "g": g,
        "sigma": sigma,
        "k": result.k,
        "r_a2": point.r_a2,
        "r_b2": point.r_b2,
        "r_s": point.r_s,
        "r_d": point.r_d,
        "probability": result.probability,
        "e_n": result.e_n,
        "source": result.source.value,
    }


def run_sweep(spec: SweepSpec) -> list[dict]:
    """One row per (grid point, k), grid-major then k in ``k_set`` order."""
    if not spec.k_set:
        return []

    def evaluate(point: LossPoint) -> list[dict]:
        if spec.mode == "full_sim":
            config = PipelineConfig(
                g=spec.g, losses=point.loss_config(), readouts=tuple((k, spec.sigma) for k in spec.k_set)
            )
            results = simulate_pipeline(config)
        else:
            results = [closed_form_conditional(spec.g, point.loss_config(), spec.sigma, k) for k in spec.k_set]
        return [_row(spec.g, spec.sigma, point, r) for r in results]

    return [row for rows in ordered_map(evaluate, list(spec.grid)) for row in rows]


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def format_table(rows: Iterable[dict], columns: Sequence[str] = SWEEP_COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format(row.get(c)) for c in columns])
    return buf.getvalue()


def emit_table(rows: Iterable[dict], path: str | os.PathLike, columns: Sequence[str] = SWEEP_COLUMNS) -> Path:
    """Write rows as comma-separated UTF-8 text with a header and 12 significant digits."""
    path = Path(path)
    text = format_table(rows, columns)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write table to {path}: {exc.strerror or exc}") from exc
    return path


def read_table(path: str | os.PathLike) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------------------
# time-varying losses


def normal_deviate(seed: int, index: int, channel: int = 0) -> float:
    """Standard normal draw for sample ``index`` by inverse CDF of a Philox uniform.

    Philox is counter-based: the draw depends only on ``(seed, index, channel)``, so
    samples can be evaluated in any order or in parallel.
    """
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be nonnegative")
    raw = int(np.random.Philox(key=seed, counter=[index, channel, 0, 0]).random_raw())
    u = ((raw >> 11) + 0.5) * 2.0**-53
    return float(ndtri(u))


@dataclass(frozen=True)
class FluctuationSpec:
    """Alice's idler attenuation is drawn from a normal law in dB; Bob's stays fixed.

    ``spread_db`` is the standard deviation in dB.  ``t_b2_db`` defaults to the mean.
    With ``both`` set, Bob's attenuation is drawn independently around ``t_b2_db`` too.
    """

    mean_attenuation_db: float = 80.0
    spread_db: float = 1.0
    samples: int = 500
    t_b2_db: float | None = None
    seed: int = 0
    g: float = 0.1
    sigma: int = 4
    k_set: tuple[int, ...] = (0, 1, 2)
    both: bool = False

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if self.spread_db < 0:
            raise ValueError(f"spread must be >= 0, got {self.spread_db}")
        if self.mean_attenuation_db < 0:
            raise ValueError(f"mean attenuation must be >= 0, got {self.mean_attenuation_db}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        for k in self.k_set:
            if not 0 <= k <= self.sigma:
                raise ValueError(f"readout k={k} outside 0..sigma={self.sigma}")

    @property
    def bob_db(self) -> float:
        return self.mean_attenuation_db if self.t_b2_db is None else self.t_b2_db


@dataclass(frozen=True)
class FluctuationSummary:
    k: int
    reference: float
    values: np.ndarray = field(repr=False)

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    @property
    def min(self) -> float:
        return float(self.values.min())

    @property
    def max(self) -> float:
        return float(self.values.max())

    @property
    def gap(self) -> float:
        """``reference - mean``: loss of averaged E_N caused by the fluctuations."""
        return self.reference - self.mean


def attenuation_samples(spec: FluctuationSpec) -> np.ndarray:
    """``(samples, 2)`` array of (Alice, Bob) idler attenuations in dB, clipped at 0 dB."""
    out = np.empty((spec.samples, 2))
    for i in range(spec.samples):
        out[i, 0] = spec.mean_attenuation_db + spec.spread_db * normal_deviate(spec.seed, i, 0)
        out[i, 1] = spec.bob_db + (spec.spread_db * normal_deviate(spec.seed, i, 1) if spec.both else 0.0)
    return np.maximum(out, 0.0)


def _en(g: float, r_a: float, r_b: float, sigma: int, k: int) -> float:
    state, probability = idler_loss_state(g, r_a, r_b, sigma, k)
    if probability <= 0:
        return 0.0
    return log_negativity(state, SIGNAL_SPLIT)


def fluctuation_mc(spec: FluctuationSpec) -> list[FluctuationSummary]:
    """E_N under fluctuating idler attenuation, one summary per ``k``.

    The reference is E_N at the fixed attenuations (Alice at the mean, Bob at ``t_b2_db``).
    """
    draws = attenuation_samples(spec)
    reflect = np.vectorize(db_to_reflectivity)(draws)
    r_a_ref = db_to_reflectivity(spec.mean_attenuation_db)
    r_b_ref = db_to_reflectivity(spec.bob_db)
    summaries = []
    for k in spec.k_set:
        values = ordered_map(lambda rr, k=k: _en(spec.g, rr[0], rr[1], spec.sigma, k), [tuple(r) for r in reflect])
        summaries.append(
            FluctuationSummary(k=k, reference=_en(spec.g, r_a_ref, r_b_ref, spec.sigma, k), values=np.array(values))
        )
    return summaries
