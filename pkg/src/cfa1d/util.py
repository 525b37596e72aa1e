"""Shared plumbing: error types, seed derivation, small numeric helpers."""

from __future__ import annotations

import numpy as np

# Mask to keep Python ints inside unsigned 64-bit arithmetic.
_U64 = 0xFFFFFFFFFFFFFFFF


class ValidationError(ValueError):
    """Bad inputs: malformed files, inconsistent shapes, out-of-range knobs.

    CLI maps this to exit code 2.
    """


class NumericalError(RuntimeError):
    """Numerical failure that survived the built-in fallbacks.

    CLI maps this to exit code 3.
    """


def derive_seed(master: int, stream: str, index: int = 0) -> int:
    """Derive an independent child seed from a master seed.

    Uses the splitmix64 finalizer (Steele et al. constants) over the master
    seed, a stream tag hashed bytewise, and an index.  The same
    (master, stream, index) triple always yields the same child seed, and
    distinct streams are decorrelated, so repetition r of the split
    machinery never shares a seed with, say, the noise draws of rep r.
    """
    z = (master & _U64) ^ 0x9E3779B97F4A7C15
    for b in stream.encode("utf-8"):
        z = ((z ^ b) * 0xBF58476D1CE4E5B9) & _U64
    z = (z + ((index & _U64) * 0x94D049BB133111EB)) & _U64
    # splitmix64 finalization rounds
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64
    return (z ^ (z >> 31)) & _U64


def rng_for(master: int, stream: str, index: int = 0) -> np.random.Generator:
    """PCG64 generator seeded via :func:`derive_seed`."""
    return np.random.default_rng(derive_seed(master, stream, index))


def write_kv_file(path, pairs: dict) -> None:
    """Write a flat key=value text file (one pair per line, keys as given)."""
    lines = [f"{k}={v}" for k, v in pairs.items()]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_kv_file(path) -> dict[str, str]:
    """Read a flat key=value text file; blank lines and '#' comments skipped."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{ln}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def complex_cosine(a: np.ndarray, b: np.ndarray) -> float:
    """|<a, b>| / (||a|| ||b||), the alignment of two complex vectors."""
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(abs(np.vdot(a, b)) / (na * nb))
