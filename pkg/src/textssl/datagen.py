"""Synthetic word-image corpus with character-aligned boxes.

Images are rendered from a built-in 5x7 bitmap font (no system font
dependence), one lowercase word per image, with per-character horizontal
pixel intervals recorded so downstream evaluation can classify frames
without alignment-free decoding.
"""

from __future__ import annotations

import hashlib
import math
import string
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import IntegrityError, LayoutError, ValidationError
from .rng import seeded_rng

GLYPH_W = 5
GLYPH_H = 7

# Classic 5x7 dot-matrix glyphs, keyed by the lowercase letter they label.
_FONT_ROWS = {
    "a": (".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "b": ("####.", "#...#", "####.", "#...#", "#...#", "#...#", "####."),
    "c": (".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."),
    "d": ("####.", "#...#", "#...#", "#...#", "#...#", "#...#", "####."),
    "e": ("#####", "#....", "####.", "#....", "#....", "#....", "#####"),
    "f": ("#####", "#....", "####.", "#....", "#....", "#....", "#...."),
    "g": (".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".####"),
    "h": ("#...#", "#...#", "#####", "#...#", "#...#", "#...#", "#...#"),
    "i": (".###.", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "j": ("..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."),
    "k": ("#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"),
    "l": ("#....", "#....", "#....", "#....", "#....", "#....", "#####"),
    "m": ("#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"),
    "n": ("#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#", "#...#"),
    "o": (".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "p": ("####.", "#...#", "#...#", "####.", "#....", "#....", "#...."),
    "q": (".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"),
    "r": ("####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"),
    "s": (".####", "#....", "#....", ".###.", "....#", "....#", "####."),
    "t": ("#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."),
    "u": ("#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "v": ("#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."),
    "w": ("#...#", "#...#", "#...#", "#.#.#", "#.#.#", "##.##", "#...#"),
    "x": ("#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"),
    "y": ("#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."),
    "z": ("#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"),
}

GLYPHS = {
    ch: np.array([[cell == "#" for cell in row] for row in rows], dtype=bool)
    for ch, rows in _FONT_ROWS.items()
}

INDEX_NAME = "index.tsv"


@dataclass(frozen=True)
class Lexicon:
    words: tuple[str, ...]

    def __post_init__(self):
        if not self.words:
            raise ValidationError("lexicon is empty")
        if len(set(self.words)) != len(self.words):
            raise ValidationError("lexicon contains duplicate words")
        for word in self.words:
            if not (3 <= len(word) <= 10) or any(c not in GLYPHS for c in word):
                raise ValidationError(f"lexicon word {word!r}: must be 3-10 lowercase a-z letters")


@dataclass(frozen=True)
class Style:
    """Rendering knobs for one word image."""

    scale: int
    spacing: int
    fg: tuple[float, float, float]
    bg: tuple[float, float, float]
    x_offset: int
    y_offset: int
    char_jitter: tuple[int, ...]  # per-character vertical nudge


@dataclass(frozen=True)
class WordImageSample:
    image: np.ndarray  # [3, H, W] float32 in [0, 1]
    word: str
    char_boxes: tuple[tuple[int, int], ...]  # [start, end) pixel columns
    sample_id: int = -1


def _luminance(rgb) -> float:
    r, g, b = rgb
    return 0.299 * r + 0.587 * g + 0.114 * b


def make_lexicon(n_words: int, rng: np.random.Generator) -> Lexicon:
    """Pseudo-word lexicon: 3-10 letters, no adjacent repeats.

    Adjacent repeats are avoided because the probe's collapse rule (merge
    repeated frame labels) cannot represent double letters.
    """
    letters = string.ascii_lowercase
    words: list[str] = []
    seen: set[str] = set()
    while len(words) < n_words:
        length = int(rng.integers(3, 11))
        chars = [letters[rng.integers(26)]]
        while len(chars) < length:
            c = letters[rng.integers(26)]
            if c != chars[-1]:
                chars.append(c)
        word = "".join(chars)
        if word not in seen:
            seen.add(word)
            words.append(word)
    return Lexicon(tuple(words))


def sample_style(word: str, height: int, width: int, rng: np.random.Generator) -> Style:
    """Draw a random style that is guaranteed to fit the given word."""
    scales = [s for s in (2, 3) if _word_width(word, s, 1) <= width]
    if not scales:
        scales = [1] if _word_width(word, 1, 1) <= width else []
    if not scales:
        raise LayoutError(f"word {word!r} cannot fit width {width} at any scale")
    scale = int(rng.choice(scales))
    max_spacing = 1
    for spacing in (3, 2, 1):
        if _word_width(word, scale, spacing) <= width:
            max_spacing = spacing
            break
    spacing = int(rng.integers(1, max_spacing + 1))
    while True:
        fg = tuple(float(v) for v in rng.uniform(0.0, 1.0, size=3))
        bg = tuple(float(v) for v in rng.uniform(0.0, 1.0, size=3))
        if abs(_luminance(fg) - _luminance(bg)) >= 0.2:
            break
    glyph_h = GLYPH_H * scale
    text_w = _word_width(word, scale, spacing)
    x_offset = int(rng.integers(0, width - text_w + 1))
    y_offset = int(rng.integers(1, max(2, height - glyph_h - 1)))
    jitter = tuple(int(rng.integers(-1, 2)) for _ in word)
    return Style(scale, spacing, fg, bg, x_offset, y_offset, jitter)


def _word_width(word: str, scale: int, spacing: int) -> int:
    return len(word) * GLYPH_W * scale + (len(word) - 1) * spacing


def render_word(
    word: str,
    style: Style,
    height: int = 32,
    width: int = 128,
) -> WordImageSample:
    """Deterministically rasterize one word with exact character boxes."""
    if any(c not in GLYPHS for c in word):
        raise ValidationError(f"word {word!r} contains characters outside a-z")
    text_w = _word_width(word, style.scale, style.spacing)
    glyph_h = GLYPH_H * style.scale
    if text_w + style.x_offset > width or glyph_h + style.y_offset > height:
        raise LayoutError(
            f"word {word!r} at scale {style.scale} needs {text_w}x{glyph_h}px "
            f"at offset ({style.x_offset},{style.y_offset}), image is {width}x{height}"
        )
    image = np.empty((3, height, width), dtype=np.float32)
    for c in range(3):
        image[c].fill(style.bg[c])
    boxes = []
    x = style.x_offset
    for i, ch in enumerate(word):
        glyph = GLYPHS[ch]
        mask = np.kron(glyph, np.ones((style.scale, style.scale), dtype=bool))
        y = style.y_offset + (style.char_jitter[i] if i < len(style.char_jitter) else 0)
        y = min(max(y, 0), height - glyph_h)
        w = GLYPH_W * style.scale
        region = image[:, y : y + glyph_h, x : x + w]
        for c in range(3):
            region[c][mask] = style.fg[c]
        boxes.append((x, x + w))
        x += w + style.spacing
    return WordImageSample(image=image, word=word, char_boxes=tuple(boxes))


def _save_png(image: np.ndarray, path: Path) -> None:
    arr = np.clip(np.rint(image * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(arr.transpose(1, 2, 0), mode="RGB").save(path)


def _load_png(path: Path) -> np.ndarray:
    with Image.open(path) as img:
        arr = np.asarray(img.convert("RGB"), dtype=np.float32) / 255.0
    return arr.transpose(2, 0, 1)


def build_dataset(
    lexicon: Lexicon,
    n_samples: int,
    rng: np.random.Generator,
    out_dir: str | Path,
    height: int = 32,
    width: int = 128,
) -> Path:
    """Render n_samples word images plus an index file into out_dir.

    Word sampling is balanced: words are drawn in reshuffled round-robin
    cycles, so per-word counts differ by at most one.
    """
    if n_samples < 1:
        raise ValidationError("n_samples must be >= 1")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IOError(f"cannot create dataset directory {out}: {exc}") from exc

    lines = []
    order = np.arange(len(lexicon.words))
    for sample_id in range(n_samples):
        if sample_id % len(lexicon.words) == 0:
            order = rng.permutation(len(lexicon.words))
        word = lexicon.words[order[sample_id % len(lexicon.words)]]
        style = sample_style(word, height, width, rng)
        sample = render_word(word, style, height, width)
        _save_png(sample.image, out / f"{sample_id:06d}.png")
        boxes = ";".join(f"{s},{e}" for s, e in sample.char_boxes)
        lines.append(f"{sample_id}\t{word}\t{boxes}")
    (out / INDEX_NAME).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return out


def _is_heldout(sample_id: int) -> bool:
    digest = hashlib.sha256(f"sample:{sample_id}".encode()).digest()
    return digest[0] % 10 == 0  # 10% held out, stable in the id alone


class Dataset:
    """Random-access view over one split of a rendered corpus."""

    def __init__(self, directory: Path, ids: list[int], index: dict[int, tuple[str, tuple]]):
        self.directory = directory
        self.ids = ids
        self._index = index

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self):
        for sample_id in self.ids:
            yield self.get(sample_id)

    def get(self, sample_id: int) -> WordImageSample:
        word, boxes = self._index[sample_id]
        image = _load_png(self.directory / f"{sample_id:06d}.png")
        return WordImageSample(image=image, word=word, char_boxes=boxes, sample_id=sample_id)


def load_dataset(directory: str | Path, split: str = "train", fraction: float = 1.0) -> Dataset:
    """Open one split; fraction < 1 keeps a fixed prefix of the shuffled train ids."""
    directory = Path(directory)
    index_path = directory / INDEX_NAME
    if not index_path.exists():
        raise IntegrityError(f"missing index file {index_path}")
    if split not in ("train", "heldout"):
        raise ValidationError(f"split must be 'train' or 'heldout', got {split!r}")
    if not (0.0 < fraction <= 1.0):
        raise ValidationError(f"fraction must be in (0, 1], got {fraction}")

    index: dict[int, tuple[str, tuple]] = {}
    for line_no, line in enumerate(index_path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            id_str, word, boxes_str = line.split("\t")
            boxes = tuple(
                (int(pair.split(",")[0]), int(pair.split(",")[1]))
                for pair in boxes_str.split(";")
            )
            index[int(id_str)] = (word, boxes)
        except ValueError as exc:
            raise IntegrityError(f"{index_path}:{line_no}: malformed index line") from exc

    for sample_id in index:
        if not (directory / f"{sample_id:06d}.png").exists():
            raise IntegrityError(f"index references missing image {sample_id:06d}.png")

    all_ids = sorted(index)
    if split == "heldout":
        ids = [i for i in all_ids if _is_heldout(i)]
    else:
        train_ids = [i for i in all_ids if not _is_heldout(i)]
        # Stable shuffle (constant seed) so a fraction is a fixed prefix
        # regardless of when or how often the dataset is opened.
        order = seeded_rng(0, "train-order").permutation(len(train_ids))
        shuffled = [train_ids[j] for j in order]
        keep = int(math.floor(fraction * len(train_ids) + 0.5))
        ids = shuffled[: max(keep, 1)]
    return Dataset(directory, ids, index)
