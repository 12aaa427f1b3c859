"""Deterministic seed derivation.

Work cells of a sweep each get their own seed derived from the master
seed and the cell coordinates, so the execution schedule (sequential or
parallel, any chunking) cannot change any result.
"""

import hashlib

__all__ = ["stable_seed"]


def stable_seed(*parts) -> int:
    """A 64-bit seed that depends only on the reprs of the parts."""
    text = "\x1f".join(repr(p) for p in parts)
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")
