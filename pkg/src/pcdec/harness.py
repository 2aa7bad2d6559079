"""Monte Carlo BER/FER estimation and analysis.

Frames are simulated in fixed-size batches of per-frame RNG streams keyed
by (master_seed, frame_index), so results are bit-identical for any
worker count. The stop rule (minimum frame errors or a frame cap) is
evaluated at batch boundaries.

Also here: coordinate-ascent optimization of the scaling schedules over
monotone non-decreasing vectors, horizontal coding-gain measurement
between BER curves, and HD/SD capacity thresholds for gap-to-capacity
reporting.
"""

from __future__ import annotations

import dataclasses
import multiprocessing
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize, special

from .bch import construct_ebch
from .channel import ChannelParams, frame_rng, hard_decide, llr, modulate, transmit
from .gf import DEFAULT_PRIMITIVE_POLYS, build_field
from .product import (
    ProductCodeSpec,
    ScalingSchedule,
    anchor_decode,
    ibdd,
    ibdd_sr,
    ideal_ibdd,
    igmdd_sr,
    pc_encode,
)
from .tpd import ChaseConfig, tpd_decode

ALGORITHMS = ("none", "ibdd", "ad", "ibdd-sr", "ideal-ibdd", "igmdd-sr", "tpd")

# algorithms whose decisions use channel reliabilities are benchmarked
# against the soft-decision capacity, the rest against hard-decision
CAPACITY_MODE = {
    "none": "HD", "ibdd": "HD", "ad": "HD", "ideal-ibdd": "HD",
    "ibdd-sr": "SD", "igmdd-sr": "SD", "tpd": "SD",
}

# scaling schedules produced by optimize_scaling (see README for the
# anchor points and how to regenerate with `pcdec optimize-w`); keyed by
# (algorithm, field degree m). Used when SimConfig.w is left unset.
DEFAULT_SCHEDULES: dict[tuple[str, int], tuple[float, ...]] = {
    ("ibdd-sr", 6): (2.4373, 7.3118, 7.3118, 7.3118, 7.3118, 7.3118,
                     7.3118, 7.3118, 7.3118, 10.9676),
    ("igmdd-sr", 6): (11.9089,) * 10,
    ("ibdd-sr", 8): (4.0219, 6.0329, 6.0329, 8.0439, 8.0439, 8.0439,
                     8.0439, 8.0439, 8.0439, 8.0439),
    ("igmdd-sr", 8): (7.507, 7.507, 7.507, 7.507, 7.507, 7.507, 7.507,
                      7.507, 7.507, 13.1372),
}


class NotBracketedError(ValueError):
    """A BER curve never crosses the requested target."""


@dataclass(frozen=True)
class SimConfig:
    """One algorithm's simulation setup; see README for the CLI mapping."""

    algorithm: str
    code_m: int = 8
    code_t: int = 2
    extended: bool = True
    iterations: int = 10
    w: tuple[float, ...] | None = None
    anchor_threshold: int = 1
    chase_p: int = 4
    ebno_grid: tuple[float, ...] = ()
    min_frame_errors: int = 100
    max_frames: int = 1_000_000
    master_seed: int = 1
    workers: int = 1
    transmission: str = "all-zero"
    batch_frames: int = 64
    ber_floor: float | None = None
    opt_grid: tuple[float, ...] = tuple(round(0.4 + 0.2 * i, 1) for i in range(14))
    opt_frames: int = 400

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.min_frame_errors < 1:
            raise ValueError("min_frame_errors must be >= 1")
        if self.transmission not in ("all-zero", "random"):
            raise ValueError("transmission must be 'all-zero' or 'random'")
        if any(b <= a for a, b in zip(self.ebno_grid, self.ebno_grid[1:])):
            raise ValueError("ebno grid must be strictly increasing")
        if self.batch_frames < 1 or self.iterations < 1:
            raise ValueError("batch_frames and iterations must be >= 1")

    def product_spec(self) -> ProductCodeSpec:
        field = build_field(self.code_m, DEFAULT_PRIMITIVE_POLYS[self.code_m])
        return ProductCodeSpec(construct_ebch(field, self.code_t, self.extended))

    def resolve_w(self) -> tuple[float, ...] | None:
        if self.algorithm not in ("ibdd-sr", "igmdd-sr"):
            return None
        if self.w is not None:
            return tuple(self.w)
        key = (self.algorithm, self.code_m)
        if key in DEFAULT_SCHEDULES:
            sched = DEFAULT_SCHEDULES[key]
            if len(sched) >= self.iterations:
                return sched[: self.iterations]
            return sched + (sched[-1],) * (self.iterations - len(sched))
        raise ValueError(
            f"no scaling schedule for {self.algorithm} (m={self.code_m}); "
            "set w or run the optimizer")


@dataclass(frozen=True)
class BerRecord:
    """One Monte Carlo measurement point."""

    algorithm: str
    ebno_db: float
    iterations: int
    frames: int
    bit_errors: int
    frame_errors: int
    ber: float
    fer: float
    seed: int
    w: tuple[float, ...] | None
    wall_time: float
    budget_exhausted: bool


class _FrameSimulator:
    """Callable simulating one frame end to end; built once per process."""

    def __init__(self, cfg: SimConfig, ebno_db: float):
        self.cfg = cfg
        self.spec = cfg.product_spec()
        self.params = ChannelParams.make(ebno_db, self.spec.rate)
        self.w = cfg.resolve_w()
        if cfg.algorithm == "tpd":
            self.chase = ChaseConfig.default(cfg.iterations, cfg.chase_p)
        else:
            self.chase = None

    def __call__(self, frame_index: int) -> int:
        """Bit errors after decoding one frame."""
        cfg = self.cfg
        spec = self.spec
        rng = frame_rng(cfg.master_seed, frame_index)
        if cfg.transmission == "random":
            info = rng.integers(0, 2, (spec.k, spec.k)).astype(np.uint8)
            sent = pc_encode(spec, info)
        else:
            sent = np.zeros((spec.n, spec.n), dtype=np.uint8)
        soft = llr(transmit(modulate(sent), self.params, rng), self.params)
        alg = cfg.algorithm
        if alg == "none":
            out = hard_decide(soft)
        elif alg == "ibdd":
            out = ibdd(spec, hard_decide(soft), cfg.iterations).array
        elif alg == "ad":
            out = anchor_decode(spec, hard_decide(soft), cfg.iterations,
                                cfg.anchor_threshold).array
        elif alg == "ideal-ibdd":
            out = ideal_ibdd(spec, hard_decide(soft), sent, cfg.iterations).array
        elif alg == "ibdd-sr":
            out = ibdd_sr(spec, soft, self.w, cfg.iterations).array
        elif alg == "igmdd-sr":
            out = igmdd_sr(spec, soft, self.w, cfg.iterations).array
        else:  # tpd
            out = tpd_decode(spec, soft, self.chase, cfg.iterations).array
        return int((out != sent).sum())


_POOL_SIM: _FrameSimulator | None = None


def _pool_init(cfg: SimConfig, ebno_db: float) -> None:
    global _POOL_SIM
    _POOL_SIM = _FrameSimulator(cfg, ebno_db)


def _pool_frame(frame_index: int) -> int:
    return _POOL_SIM(frame_index)


def run_ber_point(cfg: SimConfig, ebno_db: float, progress=None) -> BerRecord:
    """Simulate frames until the stop rule fires and return the record.

    The stop rule is checked at batch boundaries: at least
    cfg.min_frame_errors frame errors, or cfg.max_frames frames total
    (the latter marks the record budget_exhausted).
    """
    start = time.perf_counter()
    frames = bit_errors = frame_errors = 0
    pool = None
    try:
        if cfg.workers > 1:
            ctx = multiprocessing.get_context("fork")
            pool = ctx.Pool(cfg.workers, initializer=_pool_init,
                            initargs=(cfg, ebno_db))
        else:
            sim = _FrameSimulator(cfg, ebno_db)
        while frames < cfg.max_frames and frame_errors < cfg.min_frame_errors:
            hi = min(frames + cfg.batch_frames, cfg.max_frames)
            batch = range(frames, hi)
            if pool is not None:
                chunk = max(1, len(batch) // (2 * cfg.workers))
                errs = pool.map(_pool_frame, batch, chunksize=chunk)
            else:
                errs = [sim(i) for i in batch]
            frames = hi
            bit_errors += sum(errs)
            frame_errors += sum(1 for e in errs if e)
            if progress is not None:
                progress({"algorithm": cfg.algorithm, "ebno_db": ebno_db,
                          "frames": frames, "frame_errors": frame_errors,
                          "bit_errors": bit_errors})
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    n2 = cfg.product_spec().n ** 2
    return BerRecord(
        algorithm=cfg.algorithm,
        ebno_db=ebno_db,
        iterations=cfg.iterations,
        frames=frames,
        bit_errors=bit_errors,
        frame_errors=frame_errors,
        ber=bit_errors / (frames * n2),
        fer=frame_errors / frames,
        seed=cfg.master_seed,
        w=cfg.resolve_w(),
        wall_time=time.perf_counter() - start,
        budget_exhausted=frame_errors < cfg.min_frame_errors,
    )


def run_sweep(cfg: SimConfig, progress=None) -> list[BerRecord]:
    """run_ber_point per grid entry, low Eb/N0 first; optionally aborts
    once the measured BER drops below cfg.ber_floor."""
    records = []
    for ebno_db in cfg.ebno_grid:
        rec = run_ber_point(cfg, ebno_db, progress=progress)
        records.append(rec)
        if cfg.ber_floor is not None and rec.ber < cfg.ber_floor:
            break
    return records


def optimize_scaling(cfg: SimConfig, ebno_db: float, grid=None) -> "ScalingSchedule":
    """Coordinate ascent over monotone non-decreasing scaling vectors.

    Grid values are relative to the channel LLR magnitude scale 2/sigma^2
    at the optimization point, so the same grid serves every code and
    operating point; the returned schedule holds absolute weights. Starts
    from the best constant vector, then repeatedly sweeps the positions,
    re-evaluating the Monte Carlo BER with a fixed seed and a fixed frame
    budget (cfg.opt_frames) so comparisons are paired.
    """
    grid = tuple(float(g) for g in (cfg.opt_grid if grid is None else grid))
    if not grid or any(g <= 0 for g in grid):
        raise ValueError("grid must be positive")
    scale = 2.0 / ChannelParams.make(ebno_db, cfg.product_spec().rate).sigma2
    grid = tuple(sorted(round(g * scale, 4) for g in grid))
    l_max = cfg.iterations
    eval_cfg = dataclasses.replace(
        cfg, min_frame_errors=10 ** 9, max_frames=cfg.opt_frames)

    cache: dict[tuple[float, ...], float] = {}

    def evaluate(w: tuple[float, ...]) -> float:
        if w not in cache:
            cache[w] = run_ber_point(
                dataclasses.replace(eval_cfg, w=w), ebno_db).ber
        return cache[w]

    best = tuple([grid[0]] * l_max)
    best_ber = evaluate(best)
    for g in grid[1:]:
        w = tuple([g] * l_max)
        ber = evaluate(w)
        if ber < best_ber:
            best, best_ber = w, ber

    for _ in range(8):  # sweeps until stable
        changed = False
        for pos in range(l_max):
            lo = best[pos - 1] if pos > 0 else grid[0]
            hi = best[pos + 1] if pos < l_max - 1 else grid[-1]
            for g in grid:
                if g < lo or g > hi or g == best[pos]:
                    continue
                cand = best[:pos] + (g,) + best[pos + 1:]
                ber = evaluate(cand)
                if ber < best_ber:
                    best, best_ber = cand, ber
                    changed = True
        if not changed:
            break
    return ScalingSchedule(best)


def required_ebno(records: list[BerRecord], target_ber: float) -> float:
    """Eb/N0 where the curve crosses target_ber, interpolated linearly in
    log10(BER); raises NotBracketedError when the curve never crosses."""
    pts = sorted((r.ebno_db, r.ber) for r in records)
    pts = [(x, b) for x, b in pts if b > 0]
    log_t = np.log10(target_ber)
    for (x1, b1), (x2, b2) in zip(pts, pts[1:]):
        l1, l2 = np.log10(b1), np.log10(b2)
        if l1 >= log_t >= l2:
            if l1 == l2:
                return x1
            return x1 + (x2 - x1) * (l1 - log_t) / (l1 - l2)
    raise NotBracketedError(f"curve never crosses BER {target_ber:g}")


def coding_gain(records_a: list[BerRecord], records_b: list[BerRecord],
                target_ber: float) -> float:
    """Horizontal Eb/N0 gap of curve a over curve b at the target BER
    (positive when a needs less Eb/N0)."""
    return required_ebno(records_b, target_ber) - required_ebno(records_a, target_ber)


def _h2(p: float) -> float:
    if p <= 0 or p >= 1:
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def hd_capacity(sigma2: float) -> float:
    """Capacity of the BSC induced by hard-decided BPSK: 1 - h2(Q(1/sigma))."""
    p = float(special.ndtr(-1.0 / np.sqrt(sigma2)))
    return 1.0 - _h2(p)


def biawgn_capacity(sigma2: float) -> float:
    """Binary-input AWGN capacity via numerical integration."""
    sigma = float(np.sqrt(sigma2))
    ln2 = np.log(2.0)

    def integrand(y):
        pdf = np.exp(-((y - 1.0) ** 2) / (2.0 * sigma2)) / np.sqrt(2 * np.pi * sigma2)
        return pdf * np.logaddexp(0.0, -2.0 * y / sigma2) / ln2

    # the integrand lives within a few sigma of y = 1; beyond 14 sigma the
    # Gaussian factor is ~1e-43 and the other factor only grows linearly
    val, _ = integrate.quad(integrand, 1.0 - 14.0 * sigma, 1.0 + 14.0 * sigma,
                            epsabs=1e-13, epsrel=1e-11, limit=300)
    return 1.0 - val


@lru_cache(maxsize=None)
def capacity_threshold_ebno_db(rate: float, mode: str) -> float:
    """Smallest Eb/N0 (dB) whose capacity reaches the rate."""
    if not 0 < rate < 1:
        raise ValueError("rate must be in (0, 1)")
    cap = {"HD": hd_capacity, "SD": biawgn_capacity}[mode]

    def deficit(ebno_db: float) -> float:
        sigma2 = ChannelParams.make(ebno_db, rate).sigma2
        return cap(sigma2) - rate

    return float(optimize.brentq(deficit, -10.0, 25.0, xtol=1e-9, rtol=1e-12))


def capacity_gap(rate: float, ebno_db_at_target: float, mode: str) -> float:
    """Distance in dB from the HD or SD capacity threshold at this rate."""
    return ebno_db_at_target - capacity_threshold_ebno_db(rate, mode)
