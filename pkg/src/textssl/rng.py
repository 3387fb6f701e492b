"""Seeded, labeled random streams.

Every stochastic choice in the pipeline (rendering, augmentation, permutation
groups, masks, data order, probe batching) draws from its own named stream so
that runs are reproducible and streams can be checkpointed independently.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np


def _label_entropy(label: str) -> int:
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def derive_seed(seed: int, label: str) -> int:
    """Stable 63-bit seed for (seed, label), independent of process state."""
    digest = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def seeded_rng(seed: int, stream_label: str) -> np.random.Generator:
    """Independent generator for (seed, stream_label).

    Identical pairs yield identical draw sequences; distinct labels (or
    distinct seeds) yield statistically independent streams.
    """
    ss = np.random.SeedSequence([int(seed), _label_entropy(stream_label)])
    return np.random.Generator(np.random.PCG64(ss))


def rng_state_to_text(gen: np.random.Generator) -> str:
    """Serialize generator state as text (128-bit ints as decimal strings)."""
    state = gen.bit_generator.state
    return json.dumps(
        {
            "bit_generator": state["bit_generator"],
            "state": {k: str(v) for k, v in state["state"].items()},
            "has_uint32": state["has_uint32"],
            "uinteger": state["uinteger"],
        }
    )


def rng_state_from_text(text: str) -> np.random.Generator:
    raw = json.loads(text)
    gen = np.random.Generator(np.random.PCG64())
    gen.bit_generator.state = {
        "bit_generator": raw["bit_generator"],
        "state": {k: int(v) for k, v in raw["state"].items()},
        "has_uint32": raw["has_uint32"],
        "uinteger": raw["uinteger"],
    }
    return gen
