"""Order-independent per-replication seeds."""

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One step of the SplitMix64 finalizer (a bijection on 64-bit integers)."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Seed for replication ``index`` of a run seeded with ``seed``.

    For fixed ``seed`` the map is injective in ``index``.
    """
    return splitmix64((splitmix64(int(seed) & MASK64) + int(index)) & MASK64)
