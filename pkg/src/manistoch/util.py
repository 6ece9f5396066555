"""Deterministic RNG streams and small shared helpers."""
import numpy as np

_MASK64 = (1 << 64) - 1


def rng_stream(seed, *stream) -> np.random.Generator:
    """An isolated Generator keyed by (seed, *stream); never shares state.

    Stream tags may be ints or short strings; identical keys give identical
    streams on every platform.
    """
    entropy = [int(seed) & _MASK64]
    for s in stream:
        if isinstance(s, str):
            entropy.append(int.from_bytes(s.encode(), "little") & _MASK64)
        else:
            entropy.append(int(s) & _MASK64)
    return np.random.default_rng(np.random.SeedSequence(entropy))


def geometric_radii(R, levels):
    """Radius grid R * 2^(-j/2), j = 0..levels-1, descending."""
    j = np.arange(levels)
    return R * 2.0 ** (-0.5 * j)


def batch_mean_se(values, axis=0):
    """Mean and standard error along an axis of independent batches."""
    values = np.asarray(values)
    n = values.shape[axis]
    mean = values.mean(axis=axis)
    if n < 2:
        return mean, np.full_like(np.asarray(mean, dtype=float), np.nan)
    se = values.std(axis=axis, ddof=1) / np.sqrt(n)
    return mean, se
