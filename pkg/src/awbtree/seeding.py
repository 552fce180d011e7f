"""Deterministic derivation of per-task seeds from a master seed.

Every ensemble tree, cross-validation run, and synthetic draw gets its
own 64-bit seed mixed from (master_seed, index), so results do not
depend on execution order or worker count.
"""

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """Finalizer of the splitmix64 generator; a 64-bit bijective mix."""
    z = x & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def mix_seed(master_seed: int, index: int) -> int:
    """Derive the seed for sub-task `index` from `master_seed`."""
    return splitmix64((master_seed + (index + 1) * _GAMMA) & _MASK)
