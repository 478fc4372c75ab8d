"""Deterministic seed derivation and the 64-bit keyed mixer.

Every random stream in the package flows from one master seed.  Component
streams are derived by hashing the master seed with a component tag, so
runs are reproducible and components can be reseeded independently.
"""
from __future__ import annotations

import hashlib

MASK64 = (1 << 64) - 1


def derive_seed(master: int, tag: str) -> int:
    """Derive a 64-bit child seed from (master seed, component tag)."""
    digest = hashlib.sha256(f"{tag}:{master}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def splitmix64(x: int) -> int:
    """One step of the splitmix64 mixer (bit-exact, 64-bit wrapping)."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)
