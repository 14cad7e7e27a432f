# app/utils/seeding.py
"""
Counter-based seed derivation.

Every random stream in an experiment is identified by
(master_seed, replication index, role); its seed is a pure function of that
triple so replications can run in any order or process.
"""
import hashlib

import numpy as np

SEED_MASK = (1 << 64) - 1


def derive_seed(master_seed: int, index: int = 0, role: str = "") -> int:
    """BLAKE2b of "master:index:role", first 8 bytes read little-endian."""
    key = f"{int(master_seed) & SEED_MASK}:{int(index)}:{role}".encode("utf-8")
    digest = hashlib.blake2b(key, digest_size=8).digest()
    return int.from_bytes(digest, "little")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed) & SEED_MASK))


def derive_rng(master_seed: int, index: int = 0, role: str = "") -> np.random.Generator:
    return make_rng(derive_seed(master_seed, index, role))
