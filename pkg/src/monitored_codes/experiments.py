"""Seeded, reproducible experiment drivers behind the command-line tool.

Every random draw is keyed by ``(seed, point, sample, ...)`` so that results
do not depend on thread scheduling, and every reduction runs in a fixed
order.  Tables are ``(columns, rows)`` pairs written by :func:`emit`.
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from . import concat as cc
from . import gf2
from .codes import CodeSpec, InvalidParameterError, code_by_name
from .haar import haar_code_purity, haar_measure_code
from .monitor import (
    ContractError,
    MeasurementPattern,
    ProbabilityVector,
    class_bucket,
    erasure_correctable,
    measured_image,
    rng_for,
    sample_codes,
)
from .pauli import GeneratorSet
from .toric_y import (
    classify_measured,
    renyi_bucket,
    y_classify_measured,
    y_commutant_basis,
    y_commutant_full,
    y_destroy_upper_bound,
    y_support_rows,
)

KINDS = ("sweep", "concat", "threshold", "ycommutant", "haar")
CONCAT_CODES = ("five_qubit", "steane", "reed_muller_15")


class ConfigError(ValueError):
    """The experiment configuration is malformed."""


# ------------------------------------------------------------------ config

@dataclass
class ExperimentConfig:
    kind: str
    code: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    rounds: int = 1
    samples: int = 100
    seed: int = 0
    method: str | None = None
    ray: list | None = None
    tolerance: float = 0.01
    threshold_kind: str = "measurement"
    sizes: list = field(default_factory=list)
    pY: list = field(default_factory=lambda: [0.5])
    haar: dict = field(default_factory=dict)
    out: str | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "kind" not in d:
            raise ConfigError("config needs a 'kind'")
        try:
            cfg = cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None

    def to_dict(self) -> dict:
        """Config echo for output files; the output path is not part of it."""
        d = asdict(self)
        d.pop("out")
        return d

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not isinstance(self.samples, int) or self.samples < 1:
            raise ConfigError("samples must be a positive integer")
        if not isinstance(self.rounds, int) or self.rounds < 1:
            raise ConfigError("rounds must be a positive integer")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if self.kind in ("sweep", "concat", "threshold"):
            self.build_code()
        if self.kind in ("sweep", "concat"):
            self.grid_points()
        if self.kind == "concat" and self.code.get("name") not in CONCAT_CODES:
            raise ConfigError(f"concat needs one of {CONCAT_CODES}")
        if self.kind == "threshold":
            if self.ray is None or len(self.ray) != 3:
                raise ConfigError("threshold needs a 3-component 'ray'")
            try:
                ProbabilityVector.along_ray(self.ray, 1.0)
            except ContractError as exc:
                raise ConfigError(str(exc)) from None
            if self.threshold_kind not in ("measurement", "erasure"):
                raise ConfigError("threshold_kind must be 'measurement' or 'erasure'")
            if not 0 < self.tolerance < 1:
                raise ConfigError("tolerance must lie in (0, 1)")
        if self.method not in (None, "exhaustive", "montecarlo"):
            raise ConfigError("method must be 'exhaustive' or 'montecarlo'")
        if self.kind == "ycommutant":
            if not self.sizes or any(not isinstance(L, int) or L < 2 for L in self.sizes):
                raise ConfigError("ycommutant needs 'sizes', integers >= 2")
        if self.kind == "haar":
            mode = self.haar.get("mode")
            if mode not in ("random_code", "code"):
                raise ConfigError("haar.mode must be 'random_code' or 'code'")

    def build_code(self) -> CodeSpec:
        name = self.code.get("name")
        if name is None:
            raise ConfigError("config needs code.name")
        try:
            return code_by_name(name, self.code.get("size"))
        except InvalidParameterError as exc:
            raise ConfigError(str(exc)) from None

    def grid_points(self) -> list[tuple[float, float, float]]:
        return grid_points(self.grid)


def grid_points(grid: dict) -> list[tuple[float, float, float]]:
    """Expand a grid spec into absolute (pX, pY, pZ) points.

    ``{"points": [[pX, pY, pZ], ...]}`` lists points directly.
    ``{"p_m": 0.95, "step": 0.05}`` or ``{"p_m": 1, "resolution": 20}`` walks
    the simplex pX + pY + pZ = p_m.  ``"margin": m`` drops points whose
    largest component lies strictly between 0.5 - m and 0.5 + m.
    """
    if not isinstance(grid, dict) or not grid:
        raise ConfigError("missing grid")
    if "points" in grid:
        pts = [tuple(float(v) for v in p) for p in grid["points"]]
    else:
        p_m = float(grid.get("p_m", 1.0))
        if "step" in grid:
            res = p_m / float(grid["step"])
            if abs(res - round(res)) > 1e-9:
                raise ConfigError("p_m must be a multiple of step")
            res = int(round(res))
        else:
            res = int(grid.get("resolution", 20))
        if res < 1:
            raise ConfigError("resolution must be >= 1")
        pts = []
        for i in range(res + 1):
            for j in range(res + 1 - i):
                k = res - i - j
                pts.append(tuple(round(p_m * v / res, 12) for v in (i, j, k)))
    margin = float(grid.get("margin", 0.0))
    if margin > 0:
        pts = [p for p in pts if not (0.5 - margin + 1e-12 < max(p) < 0.5 + margin - 1e-12)]
    for p in pts:
        try:
            ProbabilityVector(*p)
        except ContractError as exc:
            raise ConfigError(f"invalid grid point {p}: {exc}") from None
    return pts


# ------------------------------------------------------------------ tables

@dataclass
class Table:
    columns: list[str]
    rows: list[list[Any]]
    config: dict | None = None


def _fmt(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return cc.format_float(float(v))
    return str(v)


def _jsonable(v: Any) -> Any:
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return None if math.isnan(v) else float(f"{v:.9g}")
    return v


def render(table: Table, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "config": table.config,
            "columns": table.columns,
            "rows": [[_jsonable(v) for v in row] for row in table.rows],
        }
        return json.dumps(doc, indent=1) + "\n"
    raise ConfigError(f"unknown format {fmt!r}")


def emit(table: Table, path: str | None, fmt: str = "csv") -> str:
    """Write ``table`` to ``path`` (stdout when ``None``); returns the text."""
    text = render(table, fmt)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


# ------------------------------------------------------------------ helpers

def _pmap(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _binomial_se(freq: float, n: int) -> float:
    return math.sqrt(max(freq * (1 - freq), 0.0) / n)


def _outcome_label(code: CodeSpec, codes: np.ndarray) -> str:
    """'none', 'X'/'Y'/'Z' for k = 1, a taxonomy label for the torus."""
    if code.k == 1:
        return ("none", "X", "Y", "Z", "all")[class_bucket(code, codes)]
    img = measured_image(code, codes)
    if img.shape[0] == 0:
        return "none"
    if code.k == 2:
        return classify_measured(GeneratorSet.from_matrix(img, 2, "logical-basis"))
    return "other"


def sample_outcomes(code: CodeSpec, p: ProbabilityVector, samples: int, seed: int, key: tuple, threads: int = 1) -> list[str]:
    def one(i: int) -> str:
        codes = sample_codes(code.n, p, rng_for(seed, key + (i,)))
        return _outcome_label(code, codes)

    return _pmap(one, list(range(samples)), threads)


SWEEP_COLUMNS = [
    "code", "size", "pX", "pY", "pZ", "samples", "seed", "preserved", "stderr", "phase",
    "bucket_X", "bucket_Y", "bucket_Z", "bucket_XX", "other", "renyi2",
]


def _summarise(code: CodeSpec, labels: list[str]) -> dict:
    n = len(labels)
    pres = labels.count("none") / n
    buckets = {"X": 0, "Y": 0, "Z": 0, "XX": 0}
    other = 0
    for lab in labels:
        if lab == "none":
            continue
        if code.k == 1 and lab in buckets:
            buckets[lab] += 1
            continue
        b = renyi_bucket(lab) if code.k == 2 else None
        if b is None:
            other += 1
        else:
            buckets["XX" if b == "X1X2" else b[0]] += 1
    freqs = {k: v / n for k, v in buckets.items()}
    arity = 3 if code.k == 1 else 4
    qs = [freqs["X"], freqs["Y"], freqs["Z"]] + ([freqs["XX"]] if arity == 4 else [])
    r2 = cc.renyi2_uncertainty(qs, arity) if sum(qs) > 0 else math.nan
    return {"preserved": pres, "stderr": _binomial_se(pres, n), "buckets": freqs, "other": other / n, "renyi2": r2}


# ------------------------------------------------------------------ sweep

def run_sweep(cfg: ExperimentConfig, threads: int = 1) -> Table:
    code = cfg.build_code()
    size = cfg.code.get("size", "")
    rows = []
    for idx, pt in enumerate(cfg.grid_points()):
        p = ProbabilityVector(*pt)
        labels = sample_outcomes(code, p, cfg.samples, cfg.seed, (idx,), threads)
        s = _summarise(code, labels)
        b = s["buckets"]
        rows.append([
            code.name, size, p.pX, p.pY, p.pZ, cfg.samples, cfg.seed, s["preserved"], s["stderr"],
            "preserved" if s["preserved"] >= 0.5 else "destroyed",
            b["X"], b["Y"], b["Z"], b["XX"], s["other"], s["renyi2"],
        ])
    return Table(SWEEP_COLUMNS, rows, cfg.to_dict())


# ------------------------------------------------------------------ concat

CONCAT_COLUMNS = ["code", "method", "pX0", "pY0", "pZ0", "round", "p_none", "pX", "pY", "pZ", "renyi2", "seed", "samples"]


def _concat_method(code: CodeSpec, cfg: ExperimentConfig) -> str:
    if cfg.method:
        return cfg.method
    return "exhaustive" if code.n <= cc.EXHAUSTIVE_MAX_N else "montecarlo"


def run_concat(cfg: ExperimentConfig, threads: int = 1) -> Table:
    code = cfg.build_code()
    method = _concat_method(code, cfg)
    points = cfg.grid_points()
    if method == "exhaustive":
        cc.verdict_table(code)  # build once before fanning out

    def one(item):
        idx, pt = item
        d0 = cc.OutcomeDistribution.from_measured(*pt)
        return cc.flow(code, d0, cfg.rounds, method, cfg.samples, cfg.seed, (idx,))

    traces = _pmap(one, list(enumerate(points)), threads)
    rows = []
    for pt, tr in zip(points, traces):
        for r, d, in enumerate(tr.rounds):
            r2 = cc.renyi2_uncertainty(d) if d.p_m > 0 else math.nan
            rows.append([code.name, tr.method, pt[0], pt[1], pt[2], r, d.p_none, d.pX, d.pY, d.pZ, r2, cfg.seed, cfg.samples])
    return Table(CONCAT_COLUMNS, rows, cfg.to_dict())


# ------------------------------------------------------------------ threshold

THRESHOLD_COLUMNS = [
    "code", "size", "kind", "ray_X", "ray_Y", "ray_Z", "estimate", "lo", "hi", "freq_lo", "freq_hi",
    "evaluations", "warning",
]


def preservation_frequency(code: CodeSpec, cfg: ExperimentConfig, p_m: float, key: tuple, threads: int = 1) -> float:
    """Preservation frequency at ``p_m`` along ``cfg.ray`` (final round for concat codes)."""
    is_concat = code.name in CONCAT_CODES
    if cfg.threshold_kind == "erasure":
        if is_concat:
            return 1.0 - cc.erasure_flow(code, p_m, cfg.rounds)[-1]

        def one_e(i: int) -> bool:
            rng = rng_for(cfg.seed, key + (i,))
            erased = np.flatnonzero(rng.random(code.n) < p_m)
            return erasure_correctable(code, erased)

        return sum(_pmap(one_e, list(range(cfg.samples)), threads)) / cfg.samples
    p = ProbabilityVector.along_ray(cfg.ray, p_m)
    if is_concat:
        method = _concat_method(code, cfg)
        d0 = cc.OutcomeDistribution.from_measured(*p.as_tuple())
        return cc.flow(code, d0, cfg.rounds, method, cfg.samples, cfg.seed, key).final.p_none
    labels = sample_outcomes(code, p, cfg.samples, cfg.seed, key, threads)
    return labels.count("none") / cfg.samples


def bisect_threshold(freq: Callable[[float, tuple], float], tol: float) -> dict:
    """Bisect p in [0, 1] on the rule freq(p) >= 1/2 (preserved below threshold).

    Each evaluation gets its own key so that no two share random draws.  After
    convergence both bracket ends are re-evaluated with fresh keys; if either
    contradicts its label the bracket is widened once and re-bisected.
    """
    evals = 0

    def f(p: float) -> float:
        nonlocal evals
        evals += 1
        return freq(p, (evals,))

    lo, hi = 0.0, 1.0
    f_lo, f_hi = 1.0, f(1.0)
    warning = ""
    if f_hi >= 0.5:
        return {"estimate": 1.0, "lo": 1.0, "hi": 1.0, "freq_lo": f_hi, "freq_hi": f_hi, "evaluations": evals, "warning": ""}
    for attempt in range(2):
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            fm = f(mid)
            if fm >= 0.5:
                lo, f_lo = mid, fm
            else:
                hi, f_hi = mid, fm
        check_lo = f(lo) if lo > 0 else 1.0
        check_hi = f(hi)
        if check_lo >= 0.5 and check_hi < 0.5:
            break
        warning = "non-monotone bracket"
        if attempt == 0:
            lo, hi = max(0.0, lo - 2 * tol), min(1.0, hi + 2 * tol)
            f_lo = f(lo) if lo > 0 else 1.0
            f_hi = f(hi)
            if f_lo < 0.5:
                lo, f_lo = 0.0, 1.0
    return {"estimate": 0.5 * (lo + hi), "lo": lo, "hi": hi, "freq_lo": f_lo, "freq_hi": f_hi,
            "evaluations": evals, "warning": warning}


def run_threshold(cfg: ExperimentConfig, threads: int = 1) -> Table:
    code = cfg.build_code()
    ray = ProbabilityVector.along_ray(cfg.ray, 1.0).as_tuple()
    res = bisect_threshold(lambda p, key: preservation_frequency(code, cfg, p, key, threads), cfg.tolerance)
    row = [code.name, cfg.code.get("size", ""), cfg.threshold_kind, *ray, res["estimate"], res["lo"], res["hi"],
           res["freq_lo"], res["freq_hi"], res["evaluations"], res["warning"]]
    return Table(THRESHOLD_COLUMNS, [row], cfg.to_dict())


# ------------------------------------------------------------------ ycommutant

YCOMM_COLUMNS = ["L", "lines", "line_rank", "full_dim", "lines_in_full", "all_y_class", "pY", "bound", "bound_logical"]


def run_ycommutant(cfg: ExperimentConfig, threads: int = 1) -> Table:
    def one(L: int) -> list[list]:
        basis = y_commutant_basis(L)
        full = y_commutant_full(L)
        lines = y_support_rows(basis)
        inside = gf2.rank(np.vstack([full, lines])) == full.shape[0]
        label = y_classify_measured(L, MeasurementPattern.uniform(2 * L * L, "Y"))
        return [[L, len(basis.lines), len(basis.generators), full.shape[0], inside, label, float(p),
                 y_destroy_upper_bound(L, float(p)), y_destroy_upper_bound(L, float(p), logical_only=True)]
                for p in cfg.pY]

    blocks = _pmap(one, list(cfg.sizes), threads)
    return Table(YCOMM_COLUMNS, [row for b in blocks for row in b], cfg.to_dict())


# ------------------------------------------------------------------ haar

HAAR_COLUMNS = ["mode", "code", "k", "n", "m", "dA", "dB", "dR", "samples", "mean", "std", "predicted", "bound",
                "distance_mean", "distance_std"]


def run_haar(cfg: ExperimentConfig, threads: int = 1) -> Table:
    h = cfg.haar
    rows = []
    if h["mode"] == "random_code":
        k, n = int(h.get("k", 1)), int(h.get("n", 10))
        for m in h.get("m", [6]):
            s = haar_code_purity(k, n, int(m), cfg.samples, cfg.seed, threads)
            rows.append(["random_code", "", k, n, int(m), s.dA, s.dB, s.dR, s.samples, s.mean, s.std, s.predicted,
                         math.nan, s.distance_mean, s.distance_std])
    else:
        code = code_by_name(h["code"], h.get("size"))
        for measured in h.get("measured", [[]]):
            s = haar_measure_code(code, measured, cfg.samples, cfg.seed, threads)
            rows.append(["code", code.name, code.k, code.n, len(measured), s.dA, s.dB, s.dR, s.samples, s.mean, s.std,
                         s.predicted, s.bound, s.distance_mean, s.distance_std])
    return Table(HAAR_COLUMNS, rows, cfg.to_dict())


RUNNERS = {
    "sweep": run_sweep,
    "concat": run_concat,
    "threshold": run_threshold,
    "ycommutant": run_ycommutant,
    "haar": run_haar,
}


def run(cfg: ExperimentConfig, threads: int = 1) -> Table:
    try:
        return RUNNERS[cfg.kind](cfg, threads)
    except (ContractError, InvalidParameterError) as exc:
        raise ConfigError(str(exc)) from exc
