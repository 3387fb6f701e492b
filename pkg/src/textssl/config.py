"""Run configuration: defaults, file parsing, and invariant validation.

Config files are line-oriented ``key = value`` text. Blank lines, ``#``
comments and ``[section]`` headers are allowed; section headers are purely
cosmetic (keys are global). Unspecified keys take the documented defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigError, ValidationError

# Horizontal stride of both encoders: the CNN stack and the 4px ViT patching
# each turn a W-wide image into W/4 frames.
FRAME_STRIDE = 4

LEVELS = ("frame", "subword", "word")
INTER_PARTS = ("f2s", "s2w")
INTER_LOSS_KINDS = ("kl", "infonce", "re")
ENCODER_KINDS = ("cnn", "vit")
MASK_MODES = ("patch", "block", "both")


@dataclass(frozen=True)
class Config:
    """All run-level knobs, with the pre-training defaults baked in."""

    # geometry
    image_height: int = 32
    image_width: int = 128

    # loss weights and temperatures
    alpha: float = 0.3
    beta: float = 0.1
    tau_info: float = 0.07
    tau_kl: float = 0.1

    # hierarchy / permutation enrichment
    T_subwords: int = 4
    N_division: int = 2
    M_group: int = 2

    # masking
    mask_ratio: float = 0.7
    block_count: int = 1
    block_width_px: int = 16
    mask_mode: str = "both"

    # momentum queue machinery
    queue_capacity: int = 4096
    momentum: float = 0.999

    # encoder
    encoder_kind: str = "cnn"
    vit_patch: int = 4
    vit_depth: int = 4
    vit_width: int = 192
    vit_heads: int = 4
    feature_dim: int = 128

    # optimization
    batch_size: int = 32
    epochs: int = 5
    lr: float = 1e-3
    seed: int = 0

    # ablation switches
    levels: tuple[str, ...] = LEVELS
    inter: tuple[str, ...] = INTER_PARTS
    inter_loss: str = "kl"
    coupled: bool = False

    # probe
    probe_epochs: int = 20
    probe_lr: float = 1e-2

    def frames(self) -> int:
        return self.image_width // FRAME_STRIDE

    def patch_grid(self) -> tuple[int, int]:
        return (self.image_height // self.vit_patch, self.image_width // self.vit_patch)

    def validate(self) -> "Config":
        def require(ok: bool, field_name: str, why: str) -> None:
            if not ok:
                raise ValidationError(f"config field '{field_name}': {why}")

        require(self.image_height > 0, "image_height", "must be positive")
        require(self.image_width > 0, "image_width", "must be positive")
        require(
            self.image_width % self.N_division == 0,
            "N_division",
            f"image_width {self.image_width} not divisible by {self.N_division}",
        )
        require(
            self.image_width % self.vit_patch == 0 and self.image_height % self.vit_patch == 0,
            "vit_patch",
            f"image {self.image_height}x{self.image_width} not divisible by patch {self.vit_patch}",
        )
        require(0.0 <= self.mask_ratio <= 1.0, "mask_ratio", f"{self.mask_ratio} outside [0, 1]")
        require(self.T_subwords >= 1, "T_subwords", "must be >= 1")
        require(self.M_group >= 1, "M_group", "must be >= 1")
        require(self.N_division >= 1, "N_division", "must be >= 1")
        require(
            self.queue_capacity >= self.batch_size,
            "queue_capacity",
            f"must be >= batch_size ({self.batch_size})",
        )
        require(0.0 <= self.momentum < 1.0 or self.momentum == 1.0, "momentum", "must be in [0, 1]")
        require(self.block_count >= 0, "block_count", "must be >= 0")
        require(
            0 < self.block_width_px <= self.image_width,
            "block_width_px",
            f"must be in (0, {self.image_width}]",
        )
        require(self.encoder_kind in ENCODER_KINDS, "encoder_kind", f"must be one of {ENCODER_KINDS}")
        require(self.mask_mode in MASK_MODES, "mask_mode", f"must be one of {MASK_MODES}")
        require(self.inter_loss in INTER_LOSS_KINDS, "inter_loss", f"must be one of {INTER_LOSS_KINDS}")
        require(
            bool(self.levels) and all(l in LEVELS for l in self.levels),
            "levels",
            f"must be a non-empty subset of {LEVELS}",
        )
        require(all(p in INTER_PARTS for p in self.inter), "inter", f"must be a subset of {INTER_PARTS}")
        require(self.alpha >= 0.0, "alpha", "must be >= 0")
        require(self.beta >= 0.0, "beta", "must be >= 0")
        require(self.tau_info > 0.0, "tau_info", "must be > 0")
        require(self.tau_kl > 0.0, "tau_kl", "must be > 0")
        require(self.vit_width % self.vit_heads == 0, "vit_heads", "vit_width must divide into heads")

        # Both encoders emit W / FRAME_STRIDE frames; hierarchy pooling and
        # permutation blocks need that count divisible by T and N.
        F = self.frames()
        require(
            self.image_width % FRAME_STRIDE == 0,
            "image_width",
            f"must be divisible by the encoder stride {FRAME_STRIDE}",
        )
        require(F % self.T_subwords == 0, "T_subwords", f"frame count {F} not divisible by T")
        require(F % self.N_division == 0, "N_division", f"frame count {F} not divisible by N")
        return self


def _coerce(name: str, raw: str, target_type: type, line_no: int):
    raw = raw.strip()
    try:
        if target_type is bool:
            low = raw.lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if target_type is int:
            return int(raw)
        if target_type is float:
            return float(raw)
        if target_type is tuple:
            return tuple(part.strip() for part in raw.split(",") if part.strip())
        return raw
    except ValueError as exc:
        raise ConfigError(f"line {line_no}: cannot parse {name} = {raw!r}: {exc}") from exc


def parse_config_text(text: str) -> Config:
    """Parse key=value text into a validated Config."""
    field_types = {f.name: f.type for f in fields(Config)}
    type_map = {
        "int": int,
        "float": float,
        "str": str,
        "bool": bool,
        "tuple[str, ...]": tuple,
    }
    values: dict = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped or (stripped.startswith("[") and stripped.endswith("]")):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {line.rstrip()!r}")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if key not in field_types:
            raise ValidationError(f"config field '{key}': unknown key (line {line_no})")
        values[key] = _coerce(key, raw, type_map[str(field_types[key])], line_no)
    return Config(**values).validate()


def load_config(path: str | Path) -> Config:
    """Load a config file; unspecified keys take the documented defaults."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text)


def apply_overrides(cfg: Config, overrides: dict[str, str]) -> Config:
    """Apply CLI ``key=value`` overrides on top of an existing Config."""
    field_types = {f.name: f.type for f in fields(Config)}
    type_map = {"int": int, "float": float, "str": str, "bool": bool, "tuple[str, ...]": tuple}
    parsed = {}
    for key, raw in overrides.items():
        if key not in field_types:
            raise ValidationError(f"config field '{key}': unknown key")
        parsed[key] = _coerce(key, raw, type_map[str(field_types[key])], 0)
    return replace(cfg, **parsed).validate()


def config_to_text(cfg: Config) -> str:
    """Render a Config as a file that parse_config_text reads back verbatim."""
    lines = []
    for f in fields(Config):
        value = getattr(cfg, f.name)
        if isinstance(value, tuple):
            value = ",".join(value)
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"
