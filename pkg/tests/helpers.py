"""Shared test utilities: brute-force oracles kept independent of the
library's decoding paths."""

import numpy as np

from pcdec.bch import ComponentCodeSpec, encode


def all_codewords(spec: ComponentCodeSpec) -> np.ndarray:
    """Every codeword of a small code, via exhaustive message enumeration."""
    k = spec.k
    msgs = ((np.arange(1 << k)[:, None] >> np.arange(k)[None, :]) & 1).astype(np.uint8)
    return np.stack([encode(spec, m) for m in msgs])


def oracle_bdd(codewords: np.ndarray, r: np.ndarray, t: int):
    """Textbook bounded-distance rule: the unique codeword within distance
    t of r when one exists, else (False, r)."""
    dists = (codewords != r[None, :]).sum(axis=1)
    idx = int(np.argmin(dists))
    if dists[idx] <= t:
        assert (dists <= t).sum() == 1, "sphere radius t must be unique"
        return True, codewords[idx]
    return False, np.asarray(r, dtype=np.uint8)


def oracle_nearest(codewords: np.ndarray, r: np.ndarray):
    """Nearest codeword and its distance (ties: lowest index)."""
    dists = (codewords != r[None, :]).sum(axis=1)
    idx = int(np.argmin(dists))
    return codewords[idx], int(dists[idx])
