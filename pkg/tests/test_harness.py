import dataclasses

import numpy as np
import pytest
from scipy.stats import norm

from pcdec.channel import ChannelParams
from pcdec.harness import (
    BerRecord,
    NotBracketedError,
    SimConfig,
    biawgn_capacity,
    capacity_gap,
    capacity_threshold_ebno_db,
    coding_gain,
    hd_capacity,
    optimize_scaling,
    required_ebno,
    run_ber_point,
    run_sweep,
)
from pcdec.product import ScalingSchedule


def small_cfg(algorithm, **kw):
    base = dict(algorithm=algorithm, code_m=4, code_t=2, extended=False,
                iterations=3, min_frame_errors=20, max_frames=400,
                master_seed=9, batch_frames=16)
    base.update(kw)
    return SimConfig(**base)


def strip_time(rec: BerRecord):
    return dataclasses.replace(rec, wall_time=0.0)


def make_rec(algorithm, ebno_db, ber, frames=10 ** 6):
    bits = int(round(ber * frames * 225))
    return BerRecord(algorithm=algorithm, ebno_db=ebno_db, iterations=10,
                     frames=frames, bit_errors=bits, frame_errors=min(frames, bits),
                     ber=ber, fer=min(1.0, ber * 225), seed=0, w=None,
                     wall_time=0.0, budget_exhausted=False)


def test_config_validation():
    with pytest.raises(ValueError):
        small_cfg("nope")
    with pytest.raises(ValueError):
        small_cfg("ibdd", min_frame_errors=0)
    with pytest.raises(ValueError):
        small_cfg("ibdd", ebno_grid=(3.0, 2.0))
    with pytest.raises(ValueError):
        small_cfg("ibdd", transmission="sometimes")


def test_noiseless_point_is_error_free():
    rec = run_ber_point(small_cfg("ibdd", max_frames=64), ebno_db=15.0)
    assert rec.bit_errors == 0 and rec.frame_errors == 0
    assert rec.ber == 0.0 and rec.fer == 0.0
    assert rec.budget_exhausted  # stop rule hit the frame cap, not errors


def test_prefec_matches_q_function():
    cfg = small_cfg("none", min_frame_errors=10 ** 9, max_frames=300)
    rec = run_ber_point(cfg, ebno_db=4.0)
    rate = (7 / 15) ** 2
    sigma2 = ChannelParams.make(4.0, rate).sigma2
    q = norm.sf(1 / np.sqrt(sigma2))
    nbits = rec.frames * 225
    assert abs(rec.ber - q) < 3 * np.sqrt(q * (1 - q) / nbits)
    assert rec.bit_errors == int(rec.ber * nbits)


def test_record_formulas_and_determinism():
    cfg = small_cfg("ibdd")
    a = run_ber_point(cfg, 3.0)
    b = run_ber_point(cfg, 3.0)
    assert strip_time(a) == strip_time(b)
    assert a.ber == a.bit_errors / (a.frames * 225)
    assert a.fer == a.frame_errors / a.frames
    assert a.iterations == cfg.iterations and a.seed == cfg.master_seed


def test_worker_count_invariance():
    for alg in ("ibdd", "ibdd-sr"):
        cfg1 = small_cfg(alg, workers=1, w=(1.0, 1.2, 1.4))
        cfg2 = small_cfg(alg, workers=2, w=(1.0, 1.2, 1.4))
        a = run_ber_point(cfg1, 3.0)
        b = run_ber_point(cfg2, 3.0)
        assert strip_time(a) == strip_time(dataclasses.replace(b, seed=a.seed))


def test_random_codeword_transmission():
    cfg = small_cfg("ibdd", transmission="random", max_frames=32)
    rec = run_ber_point(cfg, 15.0)
    assert rec.bit_errors == 0


def test_all_algorithms_error_free_at_high_snr():
    for alg in ("ibdd", "ad", "ibdd-sr", "igmdd-sr", "ideal-ibdd", "tpd", "none"):
        cfg = small_cfg(alg, max_frames=48, min_frame_errors=5,
                        w=(0.8, 1.0, 1.2) if alg in ("ibdd-sr", "igmdd-sr") else None)
        rec = run_ber_point(cfg, 18.0)
        assert rec.algorithm == alg
        assert rec.frames == 48
        assert rec.bit_errors == 0


def test_run_sweep_single_point_matches_run_ber_point():
    cfg = small_cfg("ibdd", ebno_grid=(3.0,))
    sweep = run_sweep(cfg)
    assert len(sweep) == 1
    assert strip_time(sweep[0]) == strip_time(run_ber_point(cfg, 3.0))


def test_run_sweep_order_and_monotonicity():
    cfg = small_cfg("ibdd", ebno_grid=(2.0, 5.0, 8.0), min_frame_errors=25,
                    max_frames=600)
    recs = run_sweep(cfg)
    assert [r.ebno_db for r in recs] == [2.0, 5.0, 8.0]
    assert recs[0].ber >= recs[1].ber >= recs[2].ber


def test_run_sweep_floor_abort():
    cfg = small_cfg("ibdd", ebno_grid=(12.0, 14.0, 16.0), max_frames=64,
                    ber_floor=1e-3)
    recs = run_sweep(cfg)
    assert len(recs) == 1


def test_optimizer_single_iteration_is_grid_argmin():
    grid = (0.5, 1.0, 2.0)
    cfg = small_cfg("ibdd-sr", iterations=1, opt_frames=60, opt_grid=grid)
    sched = optimize_scaling(cfg, 3.5)
    assert isinstance(sched, ScalingSchedule)
    assert len(sched.w) == 1
    # independent argmin over the materialized grid (relative values times
    # the LLR magnitude scale) with the same paired evaluation
    scale = 2.0 / ChannelParams.make(3.5, cfg.product_spec().rate).sigma2
    cand = [round(g * scale, 4) for g in grid]
    bers = {}
    for g in cand:
        c = dataclasses.replace(cfg, w=(g,), min_frame_errors=10 ** 9,
                                max_frames=cfg.opt_frames)
        bers[g] = run_ber_point(c, 3.5).ber
    best = min(cand, key=lambda g: (bers[g], cand.index(g)))
    assert sched.w[0] == best


def test_optimizer_output_monotone_and_deterministic():
    cfg = small_cfg("ibdd-sr", iterations=3, opt_frames=40,
                    opt_grid=(0.6, 1.2, 2.4))
    a = optimize_scaling(cfg, 3.0)
    b = optimize_scaling(cfg, 3.0)
    assert a == b
    assert a.is_monotone()


# ------------------------------------------------------------ gain math


def test_required_ebno_interpolates_in_log_domain():
    recs = [make_rec("x", 4.0, 1e-3), make_rec("x", 4.2, 1e-5)]
    assert required_ebno(recs, 1e-4) == pytest.approx(4.1)
    assert required_ebno(recs, 1e-3) == pytest.approx(4.0)
    assert required_ebno(recs, 1e-5) == pytest.approx(4.2)


def test_coding_gain_identities():
    a = [make_rec("a", 3.0, 1e-3), make_rec("a", 3.5, 1e-6)]
    b = [make_rec("b", x + 0.4, r) for x, r in [(3.0, 1e-3), (3.5, 1e-6)]]
    assert coding_gain(a, a, 1e-4) == 0.0
    assert coding_gain(a, b, 1e-4) == pytest.approx(0.4)
    assert coding_gain(b, a, 1e-4) == pytest.approx(-0.4)


def test_coding_gain_not_bracketed():
    a = [make_rec("a", 3.0, 1e-3), make_rec("a", 3.5, 5e-4)]
    with pytest.raises(NotBracketedError):
        required_ebno(a, 1e-6)
    zero = [make_rec("a", 3.0, 0.0), make_rec("a", 3.5, 0.0)]
    with pytest.raises(NotBracketedError):
        required_ebno(zero, 1e-4)


# ------------------------------------------------------------ capacity


def ref_hd_capacity(sigma2):
    from scipy.special import erfc
    p = 0.5 * erfc(1 / np.sqrt(2 * sigma2))
    if p in (0.0, 1.0):
        return 1.0
    return 1 + p * np.log2(p) + (1 - p) * np.log2(1 - p)


def test_hd_capacity_against_reference_formula():
    for s2 in (0.1, 0.3, 0.7, 1.5):
        assert hd_capacity(s2) == pytest.approx(ref_hd_capacity(s2), abs=1e-12)


def test_sd_threshold_at_rate_half_is_standard_value():
    # the binary-input AWGN threshold at rate 1/2 is a textbook constant
    assert capacity_threshold_ebno_db(0.5, "SD") == pytest.approx(0.187, abs=2e-3)


def test_sd_capacity_bounds():
    # soft capacity exceeds hard capacity, both below 1
    for s2 in (0.2, 0.5, 1.0):
        sd, hd = biawgn_capacity(s2), hd_capacity(s2)
        assert 0 < hd < sd < 1


def test_capacity_gap_zero_at_threshold():
    for mode in ("HD", "SD"):
        thr = capacity_threshold_ebno_db(0.8622, mode)
        assert capacity_gap(0.8622, thr, mode) == pytest.approx(0.0, abs=1e-9)
        assert capacity_gap(0.8622, thr + 1.0, mode) == pytest.approx(1.0, abs=1e-9)


def test_capacity_threshold_monotone_in_rate():
    for mode in ("HD", "SD"):
        t1 = capacity_threshold_ebno_db(0.5, mode)
        t2 = capacity_threshold_ebno_db(0.8, mode)
        t3 = capacity_threshold_ebno_db(0.95, mode)
        assert t1 < t2 < t3
