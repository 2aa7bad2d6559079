"""The n-by-n product code and its iterative decoders.

All decoders share the schedule "rows then columns" within one iteration
and terminate early once the working array is a product codeword. The
five variants:

* ``ibdd``        -- plain iterative bounded distance decoding, hard
                     messages, corrections applied in place.
* ``anchor_decode`` -- iBDD plus per-component status: successfully
                     decoded components become anchors, corrections that
                     would overturn an anchor are blocked (and the
                     proposer frozen for the iteration) until too many
                     components conflict with the anchor, which is then
                     backtracked.
* ``ibdd_sr``     -- BDD decisions combined with the channel LLRs through
                     psi = B(w * mu + L); the exchanged messages stay
                     binary.
* ``igmdd_sr``    -- GMD component decoding with soft messages
                     mu = w * mubar + L exchanged between rows and
                     columns.
* ``ideal_ibdd``  -- iBDD with a genie that suppresses every
                     miscorrection (reference curve).

Sign convention (see channel): bit b <-> (-1)^b, positive LLR supports
bit 0, and B(0) inside the decoders resolves to the channel hard
decision of that position.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bch import ComponentCodeSpec
from .channel import hard_decide
from .gmd import batch_gmd
from .kernels import kernel_for


@dataclass(frozen=True)
class ProductCodeSpec:
    """Product of a component code with itself: every row and column of an
    n-by-n array is a component codeword."""

    component: ComponentCodeSpec

    @property
    def n(self) -> int:
        return self.component.n

    @property
    def k(self) -> int:
        return self.component.k

    @property
    def rate(self) -> float:
        return (self.component.k / self.component.n) ** 2


@dataclass(frozen=True)
class ScalingSchedule:
    """Per-iteration weights trading decoder decisions against channel
    evidence in the scaled-reliability updates."""

    w: tuple[float, ...]

    def __post_init__(self):
        if not self.w or any(x <= 0 for x in self.w):
            raise ValueError("scaling weights must be positive")

    @classmethod
    def constant(cls, value: float, iterations: int) -> "ScalingSchedule":
        return cls(tuple(float(value) for _ in range(iterations)))

    def is_monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.w, self.w[1:]))


@dataclass
class DecoderResult:
    """Final hard decisions plus bookkeeping from one decoding run."""

    array: np.ndarray
    iterations_used: int
    converged: bool
    op_counters: dict[str, int] = field(default_factory=dict)


def _as_schedule(w, iterations: int) -> tuple[float, ...]:
    if isinstance(w, ScalingSchedule):
        w = w.w
    w = tuple(float(x) for x in w)
    if len(w) != iterations:
        raise ValueError(f"need {iterations} scaling weights, got {len(w)}")
    if any(x <= 0 for x in w):
        raise ValueError("scaling weights must be positive")
    return w


def pc_encode(spec: ProductCodeSpec, info: np.ndarray) -> np.ndarray:
    """Systematic product encoding: encode the k info rows, then every
    column. Linearity makes the row/column order irrelevant."""
    from .bch import encode

    comp = spec.component
    info = np.asarray(info, dtype=np.uint8)
    if info.shape != (comp.k, comp.k):
        raise ValueError(f"info must be {comp.k}x{comp.k}")
    rows = np.stack([encode(comp, info[a]) for a in range(comp.k)])
    return np.stack([encode(comp, rows[:, j]) for j in range(comp.n)], axis=1)


def is_pc_codeword(spec: ProductCodeSpec, array: np.ndarray) -> bool:
    """True iff all 2n component syndrome sets vanish."""
    kern = kernel_for(spec.component)
    arr = np.ascontiguousarray(array, dtype=np.uint8)
    return bool(kern.codeword_mask(arr).all()
                and kern.codeword_mask(arr.T).all())


def _new_counters() -> dict[str, int]:
    return {"bdd_calls": 0, "erasure_calls": 0, "gd_evals": 0, "msg_updates": 0}


def ibdd(spec: ProductCodeSpec, received: np.ndarray, l_max: int) -> DecoderResult:
    """Iterative BDD: decode all rows, apply in place, then all columns."""
    kern = kernel_for(spec.component)
    arr = np.array(received, dtype=np.uint8, copy=True)
    ops = _new_counters()
    converged = False
    used = 0
    for it in range(1, l_max + 1):
        arr, _ = kern.batch_bdd(arr)
        out_t, _ = kern.batch_bdd(arr.T)
        arr = np.ascontiguousarray(out_t.T)
        ops["bdd_calls"] += 2 * spec.n
        used = it
        if is_pc_codeword(spec, arr):
            converged = True
            break
    return DecoderResult(arr, used, converged, ops)


def ideal_ibdd(spec: ProductCodeSpec, received: np.ndarray,
               c_true: np.ndarray, l_max: int) -> DecoderResult:
    """iBDD with a genie suppressing all miscorrections."""
    kern = kernel_for(spec.component)
    arr = np.array(received, dtype=np.uint8, copy=True)
    true = np.ascontiguousarray(c_true, dtype=np.uint8)
    true_t = np.ascontiguousarray(true.T)
    ops = _new_counters()
    converged = False
    used = 0
    for it in range(1, l_max + 1):
        arr, _ = kern.batch_genie(arr, true)
        out_t, _ = kern.batch_genie(np.ascontiguousarray(arr.T), true_t)
        arr = np.ascontiguousarray(out_t.T)
        ops["bdd_calls"] += 2 * spec.n
        used = it
        if is_pc_codeword(spec, arr):
            converged = True
            break
    return DecoderResult(arr, used, converged, ops)


def _binary_message(val: np.ndarray, channel_hard: np.ndarray) -> np.ndarray:
    """B(val) with B(0) resolved to the channel hard decision."""
    return np.where(val > 0, 0, np.where(val < 0, 1, channel_hard)).astype(np.uint8)


def scaled_reliability_message(mubar: np.ndarray, llrs: np.ndarray,
                               weight: float,
                               channel_hard: np.ndarray) -> np.ndarray:
    """The binary message B(w * mubar + L).

    mubar is +1/-1 for a decoded bit 0/1 and 0 on component failure, so a
    failure falls back to the channel hard decision, a weight above |L|
    passes the decoder bit through, and a reliable channel (|L| > w)
    overturns a disagreeing decoder bit.
    """
    return _binary_message(weight * np.asarray(mubar, dtype=np.float64) + llrs,
                           channel_hard)


def ibdd_sr(spec: ProductCodeSpec, llrs: np.ndarray, w, l_max: int) -> DecoderResult:
    """iBDD with scaled reliability: binary messages B(w*mu + L)."""
    sched = _as_schedule(w, l_max)
    kern = kernel_for(spec.component)
    llrs = np.asarray(llrs, dtype=np.float64)
    ch_hard = hard_decide(llrs)
    msg = ch_hard.copy()
    ops = _new_counters()
    converged = False
    used = 0
    for it in range(1, l_max + 1):
        wl = sched[it - 1]
        out, ok = kern.batch_bdd(msg)
        mubar = (1.0 - 2.0 * out) * ok[:, None]
        msg = scaled_reliability_message(mubar, llrs, wl, ch_hard)
        out_t, ok_t = kern.batch_bdd(msg.T)
        mubar = ((1.0 - 2.0 * out_t) * ok_t[:, None]).T
        msg = scaled_reliability_message(mubar, llrs, wl, ch_hard)
        ops["bdd_calls"] += 2 * spec.n
        ops["msg_updates"] += 2 * spec.n * spec.n
        used = it
        if is_pc_codeword(spec, msg):
            converged = True
            break
    return DecoderResult(msg, used, converged, ops)


def igmdd_sr(spec: ProductCodeSpec, llrs: np.ndarray, w, l_max: int) -> DecoderResult:
    """Iterative GMD with scaled reliability: soft messages w*mu + L."""
    sched = _as_schedule(w, l_max)
    comp = spec.component
    llrs = np.asarray(llrs, dtype=np.float64)
    ch_hard = hard_decide(llrs)
    soft = llrs.copy()  # row inputs of iteration 1 are the channel LLRs
    ops = _new_counters()
    converged = False
    used = 0
    hard = ch_hard
    for it in range(1, l_max + 1):
        wl = sched[it - 1]
        rows_in = _binary_message(soft, ch_hard)
        out, ok, stats = batch_gmd(comp, rows_in, np.abs(soft))
        mubar = (1.0 - 2.0 * out) * ok[:, None]
        soft = wl * mubar + llrs
        ops["erasure_calls"] += stats["attempts"]
        ops["gd_evals"] += stats["gd_evals"]

        soft_t = np.ascontiguousarray(soft.T)
        cols_in = _binary_message(soft_t, np.ascontiguousarray(ch_hard.T))
        out_t, ok_t, stats = batch_gmd(comp, cols_in, np.abs(soft_t))
        mubar = ((1.0 - 2.0 * out_t) * ok_t[:, None]).T
        soft = wl * mubar + llrs
        ops["erasure_calls"] += stats["attempts"]
        ops["gd_evals"] += stats["gd_evals"]
        ops["msg_updates"] += 2 * spec.n * spec.n

        used = it
        hard = _binary_message(soft, ch_hard)
        if is_pc_codeword(spec, hard):
            converged = True
            break
    return DecoderResult(hard, used, converged, ops)


_NORMAL, _ANCHOR, _FROZEN = 0, 1, 2


class AnchorState:
    """Per-component bookkeeping for anchor decoding: status, conflict
    lists, applied-correction logs, and freeze attribution."""

    def __init__(self, n: int):
        self.n = n
        self.status = np.zeros(2 * n, dtype=np.int8)
        self.conflicts: dict[int, set[int]] = {}
        self.applied: dict[int, list[tuple[int, int]]] = {}
        self.freeze_blockers: dict[int, set[int]] = {}

    def release(self, anchor: int) -> None:
        """Unfreeze components blocked solely by this anchor."""
        for comp in [c for c, blk in self.freeze_blockers.items() if anchor in blk]:
            blk = self.freeze_blockers[comp]
            blk.discard(anchor)
            if not blk:
                del self.freeze_blockers[comp]
                if self.status[comp] == _FROZEN:
                    self.status[comp] = _NORMAL

    def demote(self, comp: int) -> None:
        self.status[comp] = _NORMAL
        self.conflicts.pop(comp, None)
        self.applied.pop(comp, None)
        self.release(comp)

    def new_iteration(self) -> None:
        self.status[self.status == _FROZEN] = _NORMAL
        self.freeze_blockers.clear()


def anchor_decode(spec: ProductCodeSpec, received: np.ndarray, l_max: int,
                  threshold: int = 1) -> DecoderResult:
    """iBDD with anchor bookkeeping.

    Successful components become anchors. A correction that would flip a
    bit of a crossing anchor is a conflict: while the anchor has at most
    ``threshold`` recorded conflicts the correction is blocked and the
    proposer frozen for the rest of the iteration; once more components
    conflict, the anchor is backtracked (its corrections undone, its
    status dropped, components frozen solely because of it released).
    Components are visited in index order; the schedule is otherwise the
    iBDD one.
    """
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    kern = kernel_for(spec.component)
    n = spec.n
    arr = np.array(received, dtype=np.uint8, copy=True)
    st = AnchorState(n)
    ops = _new_counters()
    converged = False
    used = 0

    def backtrack(anchor: int, dirty: set[int], row_pass: bool) -> None:
        for (i, j) in st.applied.get(anchor, []):
            arr[i, j] ^= 1
            dirty.add(i if row_pass else j)
        st.status[anchor] = _NORMAL
        st.conflicts.pop(anchor, None)
        st.applied.pop(anchor, None)
        st.release(anchor)

    def decode_one(idx: int, row_pass: bool):
        word = arr[idx] if row_pass else arr[:, idx]
        out, ok = kern.batch_bdd(word[None, :])
        ops["bdd_calls"] += 1
        return bool(ok[0]), np.flatnonzero(out[0] != word)

    for it in range(1, l_max + 1):
        st.new_iteration()
        for row_pass in (True, False):
            words = arr if row_pass else np.ascontiguousarray(arr.T)
            out, ok = kern.batch_bdd(words)
            ops["bdd_calls"] += n
            diff = out != words
            dirty: set[int] = set()
            for idx in range(n):
                comp = idx if row_pass else n + idx
                if st.status[comp] == _FROZEN:
                    continue
                if idx in dirty:
                    dirty.discard(idx)
                    comp_ok, flip_pos = decode_one(idx, row_pass)
                else:
                    comp_ok, flip_pos = bool(ok[idx]), np.flatnonzero(diff[idx])
                if not comp_ok:
                    if st.status[comp] == _ANCHOR:
                        st.demote(comp)
                    continue
                while True:
                    if row_pass:
                        flips = [(idx, int(j)) for j in flip_pos]
                        blockers = {n + j for _, j in flips
                                    if st.status[n + j] == _ANCHOR}
                    else:
                        flips = [(int(i), idx) for i in flip_pos]
                        blockers = {i for i, _ in flips if st.status[i] == _ANCHOR}
                    if not blockers:
                        for (i, j) in flips:
                            arr[i, j] ^= 1
                        if st.status[comp] != _ANCHOR:
                            st.status[comp] = _ANCHOR
                            st.applied[comp] = []
                        st.applied[comp].extend(flips)
                        break
                    backtracked = False
                    for a in sorted(blockers):
                        st.conflicts.setdefault(a, set()).add(comp)
                        if len(st.conflicts[a]) > threshold:
                            backtrack(a, dirty, row_pass)
                            backtracked = True
                    survivors = {a for a in blockers if st.status[a] == _ANCHOR}
                    if survivors:
                        # blocked: freeze the proposer for this iteration
                        if st.status[comp] == _ANCHOR:
                            st.demote(comp)
                        st.status[comp] = _FROZEN
                        st.freeze_blockers[comp] = survivors
                        break
                    assert backtracked
                    # every blocker was backtracked; the undo may have
                    # changed this component's word, so re-propose
                    dirty.discard(idx)
                    comp_ok, flip_pos = decode_one(idx, row_pass)
                    if not comp_ok:
                        if st.status[comp] == _ANCHOR:
                            st.demote(comp)
                        break
        used = it
        if is_pc_codeword(spec, arr):
            converged = True
            break
    return DecoderResult(arr, used, converged, ops)
