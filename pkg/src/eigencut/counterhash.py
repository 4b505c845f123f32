"""Counter-based random numbers.

Stateless uniforms computed by hashing integer coordinates (seed, word, word)
with the splitmix64 finalizer. Every consumer that needs reproducible,
order-independent randomness (cascade coin flips, graph generation, seed
derivation) addresses its draws by coordinates instead of consuming a shared
stream, so results do not depend on evaluation order or batching.
"""

from __future__ import annotations

import numpy as np

_U = np.uint64
_GOLDEN = _U(0x9E3779B97F4A7C15)
_MIX1 = _U(0xBF58476D1CE4E5B9)
_MIX2 = _U(0x94D049BB133111EB)
_W1 = _U(0xD1342543DE82EF95)
_W2 = _U(0xAF251AF3B0F025B5)
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def _finalize(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _U(30))) * _MIX1
    z = (z ^ (z >> _U(27))) * _MIX2
    return z ^ (z >> _U(31))


def hash_words(seed: int, a, b=0) -> np.ndarray:
    """64-bit hash of (seed, a, b); a and b broadcast like numpy arrays."""
    with np.errstate(over="ignore"):
        z = _U(seed & 0xFFFFFFFFFFFFFFFF) * _GOLDEN + _U(1)
        z = _finalize(z + np.asarray(a, dtype=np.uint64) * _W1)
        z = _finalize(z + np.asarray(b, dtype=np.uint64) * _W2)
    return z


def uniform(seed: int, a, b=0) -> np.ndarray:
    """Uniforms in [0, 1) addressed by (seed, a, b), 53-bit resolution."""
    return (hash_words(seed, a, b) >> _U(11)).astype(np.float64) * _INV_2_53


def derive_seed(seed: int, *words: int) -> int:
    """Child seed for a namespaced sub-stream (e.g. per baseline trial)."""
    out = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    for w in words:
        out = hash_words(int(out), w, 0)
    return int(out)
