"""Deterministic seed derivation shared across the pipeline.

A single root seed fans out to per-case, per-fold and per-tree substreams
through a splitmix64 finalizer, so every unit of work owns a seed that
depends only on (root seed, index).  Units can therefore run in any order,
or in parallel, and still reproduce the sequential result bit for bit.
"""

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """splitmix64 finalizer: a fixed 64-bit bijective scramble."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Seed for substream `index` of root `seed` (64-bit, order independent)."""
    if index < 0:
        raise ValueError(f"substream index must be >= 0, got {index}")
    return mix64((int(seed) + (index + 1) * _GOLDEN) & _MASK)
