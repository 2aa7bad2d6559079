import numpy as np
import pytest

from helpers import all_codewords
from pcdec import bch
from pcdec.channel import ChannelParams, frame_rng, llr, modulate, transmit
from pcdec.gf import build_field
from pcdec.product import ProductCodeSpec, is_pc_codeword
from pcdec.tpd import ChaseConfig, chase_pyndiah_component, tpd_decode


@pytest.fixture(scope="module")
def comp15():
    return bch.construct_ebch(build_field(4), 2, extend=False)


@pytest.fixture(scope="module")
def cw15(comp15):
    return all_codewords(comp15)


@pytest.fixture(scope="module")
def cfg():
    return ChaseConfig.default(l_max=10)


def ref_chase(spec, soft_in, cfg, half_iter):
    """Plain-loop reference for the Chase component decoding; also returns
    the decision codeword (None when every pattern fails)."""
    n = spec.n
    hard = (soft_in < 0).astype(np.uint8)
    mag = np.abs(soft_in)
    least = np.argsort(mag, kind="stable")[: cfg.p]
    cands, metrics = [], []
    for s in range(1 << cfg.p):
        trial = hard.copy()
        for j in range(cfg.p):
            if (s >> j) & 1:
                trial[least[j]] ^= 1
        out = bch.bdd(spec, trial)
        if out.corrected:
            cands.append(out.word)
            metrics.append(float(mag[out.word != hard].sum()))
    if not cands:
        return np.zeros(n), None
    best = int(np.argmin(metrics))
    decision, m_best = cands[best], metrics[best]
    dsign = 1.0 - 2.0 * decision
    w = np.empty(n)
    for i in range(n):
        comp = [m for c, m in zip(cands, metrics) if c[i] != decision[i]]
        if comp:
            w[i] = (min(comp) - m_best) * dsign[i] - soft_in[i]
        else:
            w[i] = cfg.beta(half_iter) * dsign[i]
    return cfg.alpha(half_iter) * w, decision


def test_chase_config_defaults():
    c = ChaseConfig.default(l_max=10)
    assert c.p == 4
    assert len(c.alpha_schedule) >= 20 and len(c.beta_schedule) >= 20
    assert c.alpha_schedule[:6] == (0.2, 0.3, 0.5, 0.7, 0.9, 1.0)
    assert c.beta_schedule[:5] == (0.2, 0.4, 0.6, 0.8, 1.0)
    assert c.alpha(100) == 1.0
    with pytest.raises(ValueError):
        ChaseConfig(p=0, alpha_schedule=(1.0,), beta_schedule=(1.0,))


def test_chase_noiseless_decision_and_extrinsic_signs(comp15, cw15, cfg):
    c = cw15[90]
    soft = 5.0 * (1.0 - 2.0 * c)
    ext = chase_pyndiah_component(comp15, soft, cfg, half_iter=0)
    # extrinsics all point toward the decided codeword
    assert ((1.0 - 2.0 * c) * ext >= 0).all()
    _, decision = ref_chase(comp15, soft, cfg, 0)
    assert np.array_equal(decision, c)
    assert np.array_equal(((soft + ext) < 0).astype(np.uint8), c)


def test_chase_matches_reference(comp15, cfg):
    rng = np.random.default_rng(61)
    for trial in range(100):
        soft = rng.normal(0, 2, 15)
        for half in (0, 3, 7):
            got = chase_pyndiah_component(comp15, soft, cfg, half)
            want, _ = ref_chase(comp15, soft, cfg, half)
            assert np.allclose(got, want, atol=1e-12)


def test_chase_pattern_list_recovers_beyond_t(comp15, cw15, cfg):
    # three errors (> t) parked on the least reliable positions: only test
    # patterns flipping them leave a decodable word, and the decision is
    # the transmitted codeword
    c = cw15[5]
    soft = 4.0 * (1.0 - 2.0 * c)
    soft[[2, 6, 11]] *= -0.03  # errors, and the three least reliable bits
    assert not bch.bdd(comp15, (soft < 0).astype(np.uint8)).corrected \
        or not np.array_equal(bch.bdd(comp15, (soft < 0).astype(np.uint8)).word, c)
    ext, decision = ref_chase(comp15, soft, cfg, 0)
    assert np.array_equal(decision, c)
    got = chase_pyndiah_component(comp15, soft, cfg, half_iter=0)
    assert np.allclose(got, ext, atol=1e-12)
    # the error bits that found competitors are pulled toward the decision
    assert ((soft + got) < 0).astype(np.uint8)[2] == c[2]
    assert ((soft + got) < 0).astype(np.uint8)[11] == c[11]


def test_chase_single_weak_error(comp15, cw15, cfg):
    # corrected by the unmodified test pattern's BDD already
    c = cw15[42]
    soft = 3.0 * (1.0 - 2.0 * c)
    soft[7] *= -0.1
    _, decision = ref_chase(comp15, soft, cfg, 1)
    assert np.array_equal(decision, c)
    got = chase_pyndiah_component(comp15, soft, cfg, half_iter=1)
    want, _ = ref_chase(comp15, soft, cfg, 1)
    assert np.allclose(got, want, atol=1e-12)


def test_chase_all_fail_gives_zero_extrinsic(cfg):
    spec = bch.construct_ebch(build_field(4), 2, extend=True)  # (16,7,6)
    rng = np.random.default_rng(62)
    for _ in range(500):
        soft = rng.normal(0, 1, 16)
        _, decision = ref_chase(spec, soft, cfg, 0)
        if decision is None:
            ext = chase_pyndiah_component(spec, soft, cfg, half_iter=0)
            assert np.array_equal(ext, np.zeros(16))
            return
    pytest.fail("no all-fail instance found")


def test_tpd_first_input_is_llr_matrix(comp15, cfg):
    # one iteration on strong LLRs: rows see exactly L (zero extrinsics)
    pc = ProductCodeSpec(comp15)
    L = np.full((15, 15), 6.0)
    res = tpd_decode(pc, L, cfg, l_max=1)
    assert res.converged
    assert not res.array.any()


def test_tpd_corrects_noisy_frame(comp15, cfg):
    pc = ProductCodeSpec(comp15)
    params = ChannelParams.make(3.0, pc.rate)
    rng = frame_rng(63, 0)
    c = np.zeros((15, 15), dtype=np.uint8)
    L = llr(transmit(modulate(c), params, rng), params)
    res = tpd_decode(pc, L, cfg, l_max=6)
    assert res.converged
    assert not res.array.any()
    assert res.op_counters["bdd_calls"] == 2 * 15 * 16 * res.iterations_used


def test_tpd_fixed_point_persists(comp15, cfg):
    pc = ProductCodeSpec(comp15)
    params = ChannelParams.make(3.5, pc.rate)
    checked = 0
    for seed in range(20):
        rng = frame_rng(64 + seed, 0)
        c = np.zeros((15, 15), dtype=np.uint8)
        L = llr(transmit(modulate(c), params, rng), params)
        short = tpd_decode(pc, L, cfg, l_max=4)
        if not short.converged:
            continue
        longer = tpd_decode(pc, L, cfg, l_max=8)
        assert np.array_equal(short.array, longer.array)
        assert is_pc_codeword(pc, longer.array)
        checked += 1
    assert checked >= 5


def test_tpd_rejects_short_schedules(comp15):
    pc = ProductCodeSpec(comp15)
    cfg = ChaseConfig(p=4, alpha_schedule=(0.2, 0.3), beta_schedule=(0.2, 0.4))
    with pytest.raises(ValueError):
        tpd_decode(pc, np.ones((15, 15)), cfg, l_max=4)


def test_chase_extrinsic_independent_of_own_input_at_fallback_bits(comp15, cw15, cfg):
    # where no competitor exists the extrinsic is beta * decision sign: it
    # must not move when that bit's own input magnitude changes (as long
    # as the hard decision and the least-reliable set stay put)
    c = cw15[17]
    soft = 4.0 * (1.0 - 2.0 * c)
    ext, decision = ref_chase(comp15, soft, cfg, 2)
    got = chase_pyndiah_component(comp15, soft, cfg, 2)
    fallback = np.flatnonzero(np.abs(np.abs(got) -
                                     cfg.alpha(2) * cfg.beta(2)) < 1e-12)
    assert fallback.size > 0
    j = int(fallback[0])
    bumped = soft.copy()
    bumped[j] *= 1.7
    got2 = chase_pyndiah_component(comp15, bumped, cfg, 2)
    assert got2[j] == got[j]
