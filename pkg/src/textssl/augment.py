"""Stochastic view augmentation.

Produces the three views one training step consumes: one that will be masked
for reconstruction and two unmasked ones for the contrastive branches. Ops
are applied per image, each independently with probability 0.5, and every
output is clipped back to [0, 1] at the input shape (crops are resized back,
so feature width never changes downstream).
"""

from __future__ import annotations

from dataclasses import dataclass

import cv2
import numpy as np

# Magnitudes are mild enough to keep glyphs legible at 32px height.
CONTRAST_GAIN = (0.7, 1.3)
CONTRAST_OFFSET = (-0.1, 0.1)
BLUR_SIGMA_MAX = 1.5
SHARPEN_AMOUNT_MAX = 1.0
CROP_MIN_FRACTION = 0.9
PERSPECTIVE_JITTER_FRACTION = 0.08  # of width
WARP_DISPLACEMENT_FRACTION = 0.04  # of height

OP_NAMES = ("linear_contrast", "blur", "sharpen", "crop", "perspective", "piecewise_affine")


@dataclass(frozen=True)
class ViewTriple:
    view_mim: np.ndarray  # [B, 3, H, W]
    view_online: np.ndarray
    view_momentum: np.ndarray
    provenance: tuple[tuple[tuple[str, ...], ...], ...]  # per view, per image


def _hwc(image: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(image.transpose(1, 2, 0))


def _chw(image: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(image.transpose(2, 0, 1))


def _linear_contrast(img: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    gain = rng.uniform(*CONTRAST_GAIN)
    offset = rng.uniform(*CONTRAST_OFFSET)
    return (img - 0.5) * gain + 0.5 + offset


def _blur(img: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    sigma = rng.uniform(0.3, BLUR_SIGMA_MAX)
    return cv2.GaussianBlur(img, ksize=(0, 0), sigmaX=sigma, sigmaY=sigma)


def _sharpen(img: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    amount = rng.uniform(0.2, SHARPEN_AMOUNT_MAX)
    blurred = cv2.GaussianBlur(img, ksize=(0, 0), sigmaX=1.0, sigmaY=1.0)
    return img + amount * (img - blurred)


def _crop(img: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    h, w = img.shape[:2]
    ch = int(round(h * rng.uniform(CROP_MIN_FRACTION, 1.0)))
    cw = int(round(w * rng.uniform(CROP_MIN_FRACTION, 1.0)))
    y0 = int(rng.integers(0, h - ch + 1))
    x0 = int(rng.integers(0, w - cw + 1))
    window = img[y0 : y0 + ch, x0 : x0 + cw]
    return cv2.resize(window, (w, h), interpolation=cv2.INTER_LINEAR)


def _perspective(img: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    h, w = img.shape[:2]
    jitter = PERSPECTIVE_JITTER_FRACTION * w
    src = np.array([[0, 0], [w, 0], [w, h], [0, h]], dtype=np.float32)
    dst = src + rng.uniform(-jitter, jitter, size=(4, 2)).astype(np.float32)
    matrix = cv2.getPerspectiveTransform(src, dst)
    return cv2.warpPerspective(img, matrix, (w, h), flags=cv2.INTER_LINEAR, borderMode=cv2.BORDER_REPLICATE)


def _piecewise_affine(img: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    # Control-grid displacement field, bilinearly upsampled: a piecewise
    # smooth warp that costs one remap per image.
    h, w = img.shape[:2]
    amp = WARP_DISPLACEMENT_FRACTION * h
    grid = rng.uniform(-amp, amp, size=(2, 3, 5)).astype(np.float32)
    dx = cv2.resize(grid[0], (w, h), interpolation=cv2.INTER_LINEAR)
    dy = cv2.resize(grid[1], (w, h), interpolation=cv2.INTER_LINEAR)
    xs, ys = np.meshgrid(np.arange(w, dtype=np.float32), np.arange(h, dtype=np.float32))
    return cv2.remap(img, xs + dx, ys + dy, interpolation=cv2.INTER_LINEAR, borderMode=cv2.BORDER_REPLICATE)

_OPS = {
    "linear_contrast": _linear_contrast,
    "blur": _blur,
    "sharpen": _sharpen,
    "crop": _crop,
    "perspective": _perspective,
    "piecewise_affine": _piecewise_affine,
}


def augment_image(image: np.ndarray, rng: np.random.Generator, op_prob: float = 0.5) -> tuple[np.ndarray, tuple[str, ...]]:
    """Augment one [3, H, W] image; returns (image, applied op names)."""
    img = _hwc(image.astype(np.float32, copy=True))
    applied = []
    for name in OP_NAMES:
        if rng.uniform() < op_prob:
            img = _OPS[name](img, rng)
            applied.append(name)
    img = np.clip(img, 0.0, 1.0).astype(np.float32, copy=False)
    return _chw(img), tuple(applied)


def augment_view(batch: np.ndarray, rng: np.random.Generator, op_prob: float = 0.5) -> tuple[np.ndarray, tuple[tuple[str, ...], ...]]:
    """Augment a [B, 3, H, W] batch image-by-image."""
    out = np.empty_like(batch, dtype=np.float32)
    provenance = []
    for i in range(batch.shape[0]):
        out[i], applied = augment_image(batch[i], rng, op_prob)
        provenance.append(applied)
    return out, tuple(provenance)


def make_views(batch: np.ndarray, rng: np.random.Generator, op_prob: float = 0.5) -> ViewTriple:
    """Three independent augmentation draws of the same source batch."""
    view_mim, prov_mim = augment_view(batch, rng, op_prob)
    view_online, prov_online = augment_view(batch, rng, op_prob)
    view_momentum, prov_momentum = augment_view(batch, rng, op_prob)
    return ViewTriple(
        view_mim=view_mim,
        view_online=view_online,
        view_momentum=view_momentum,
        provenance=(prov_mim, prov_online, prov_momentum),
    )
