"""Deterministic seed derivation.

Every random stream in the pipeline is derived from a single global seed and
a string label, so no stage ever touches wall-clock time or OS entropy.
"""
import hashlib


def derive_seed(seed: int, label: str) -> int:
    """Stable 64-bit sub-seed for ``label`` under ``seed``."""
    digest = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
