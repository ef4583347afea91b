"""Shared plumbing: error types and deterministic seed derivation.

All randomness in the package flows from a single master seed through
named derivation, so that any run (library call or CLI command) is
reproducible bit-for-bit.
"""

from __future__ import annotations

import zlib

import numpy as np

__all__ = [
    "InvalidInputError",
    "ConvergenceError",
    "SamplerError",
    "CalibrationError",
    "DegenerateScaleError",
    "NumericalError",
    "derive_seed",
    "derive_rng",
]


class InvalidInputError(ValueError):
    """Arguments violate a documented precondition."""


class ConvergenceError(RuntimeError):
    """Optimizer failed to converge; carries the best point seen so far."""

    def __init__(self, message, best_x=None, best_value=None):
        super().__init__(message)
        self.best_x = best_x
        self.best_value = best_value


class SamplerError(RuntimeError):
    """MCMC chain failed (e.g. zero accepted moves); carries diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class CalibrationError(RuntimeError):
    """Scale-factor calibration produced an unusable value."""


class DegenerateScaleError(ValueError):
    """A scale normalizer is exactly zero (e.g. constant series)."""


class NumericalError(RuntimeError):
    """A numerical routine failed (bracket failure, empty tail sample, ...)."""


def _key_to_int(key) -> int:
    if isinstance(key, (int, np.integer)):
        return int(key) & 0xFFFFFFFF
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    raise TypeError(f"seed derivation keys must be int or str, got {type(key)!r}")


def derive_seed(master_seed, *keys) -> np.random.SeedSequence:
    """Derive a named child seed from the master seed.

    Keys may be ints or strings (hashed with crc32, stable across runs
    and platforms). Identical (master_seed, keys) always yield the same
    stream; distinct key tuples yield independent streams. Passing an
    already-derived SeedSequence extends its spawn key.
    """
    spawn_key = tuple(_key_to_int(k) for k in keys)
    if isinstance(master_seed, np.random.SeedSequence):
        return np.random.SeedSequence(
            master_seed.entropy, spawn_key=tuple(master_seed.spawn_key) + spawn_key
        )
    return np.random.SeedSequence(int(master_seed), spawn_key=spawn_key)


def derive_rng(master_seed: int, *keys) -> np.random.Generator:
    """Generator seeded by :func:`derive_seed`."""
    return np.random.default_rng(derive_seed(master_seed, *keys))
