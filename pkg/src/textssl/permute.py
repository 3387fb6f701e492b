"""Relational enrichment by horizontal patch permutation.

Images are cut into N horizontal patches; groups of M images pool their N*M
patches and shuffle them into new images. Features computed from the shuffled
batch are later unshuffled (the inverse index mapping, at F/N frame-block
granularity) so every feature block returns to its source (image, slot)
position before any loss sees it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from .errors import ValidationError


@dataclass(frozen=True)
class PermutationRecord:
    """One bijection over the N*M patch slots of each group.

    perms[g][s] is the source patch index (within group g's flattened
    image-major slot list) whose pixels land in output slot s.
    """

    n_division: int
    m_group: int
    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        slots = self.n_division * self.m_group
        for g, perm in enumerate(self.perms):
            if sorted(perm) != list(range(slots)):
                raise ValidationError(f"group {g}: perm {perm} is not a bijection over {slots} slots")

    @property
    def batch_size(self) -> int:
        return len(self.perms) * self.m_group


def identity_record(batch_size: int, n_division: int, m_group: int) -> PermutationRecord:
    _check_divisibility(batch_size, m_group)
    slots = tuple(range(n_division * m_group))
    return PermutationRecord(n_division, m_group, tuple(slots for _ in range(batch_size // m_group)))


def sample_record(
    batch_size: int, n_division: int, m_group: int, rng: np.random.Generator
) -> PermutationRecord:
    _check_divisibility(batch_size, m_group)
    slots = n_division * m_group
    perms = tuple(
        tuple(int(i) for i in rng.permutation(slots)) for _ in range(batch_size // m_group)
    )
    return PermutationRecord(n_division, m_group, perms)


def _check_divisibility(batch_size: int, m_group: int) -> None:
    if batch_size % m_group != 0:
        raise ValidationError(f"batch size {batch_size} not divisible by group size {m_group}")


def apply_record(batch: np.ndarray, record: PermutationRecord) -> np.ndarray:
    """Rebuild each group's images from permuted patch slots (direct cutting)."""
    b, _, _, width = batch.shape
    n, m = record.n_division, record.m_group
    if b != record.batch_size:
        raise ValidationError(f"batch size {b} does not match record ({record.batch_size})")
    if width % n != 0:
        raise ValidationError(f"width {width} not divisible by N={n}")
    pw = width // n
    out = np.empty_like(batch)
    for g, perm in enumerate(record.perms):
        base = g * m
        for slot, src in enumerate(perm):
            img, patch = divmod(slot, n)
            src_img, src_patch = divmod(src, n)
            out[base + img, :, :, patch * pw : (patch + 1) * pw] = batch[
                base + src_img, :, :, src_patch * pw : (src_patch + 1) * pw
            ]
    return out


def divide_and_shuffle(
    batch: np.ndarray, n_division: int, m_group: int, rng: np.random.Generator
) -> tuple[np.ndarray, PermutationRecord]:
    """Divide each image into N patches and shuffle them within groups of M."""
    record = sample_record(batch.shape[0], n_division, m_group, rng)
    return apply_record(batch, record), record


def unshuffle_features(features, record: PermutationRecord):
    """Move frame-feature blocks back to their source (image, slot) positions.

    ``features`` is [B, F, D] (numpy or torch), produced from the permuted
    batch in the same image order; blocks of F/N contiguous frames map one-
    to-one onto pixel patches.
    """
    b, f = features.shape[0], features.shape[1]
    n, m = record.n_division, record.m_group
    if b != record.batch_size:
        raise ValidationError(f"feature batch {b} does not match record ({record.batch_size})")
    if f % n != 0:
        raise ValidationError(f"feature width {f} not divisible by N={n}")
    fb = f // n
    gather = np.empty(b * f, dtype=np.int64)
    for g, perm in enumerate(record.perms):
        base = g * m
        for slot, src in enumerate(perm):
            img, patch = divmod(slot, n)
            src_img, src_patch = divmod(src, n)
            dst0 = (base + src_img) * f + src_patch * fb
            src0 = (base + img) * f + patch * fb
            gather[dst0 : dst0 + fb] = np.arange(src0, src0 + fb)
    flat = features.reshape(b * f, -1)
    return flat[gather].reshape(features.shape)
