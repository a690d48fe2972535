"""Seeded random streams.

Every stream is a :class:`random.Random` (MT19937) seeded with the first
8 bytes of ``sha256(f"{seed}/{label}")``, read big-endian.  Distinct labels
give independent, reproducible substreams from one 64-bit run seed.
"""

from __future__ import annotations

import hashlib
import random


def substream(seed: int, label: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}/{label}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))
