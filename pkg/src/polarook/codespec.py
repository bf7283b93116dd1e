"""Complete description of one shaped polar code.

Every input index is classified as information (carries payload+CRC bits),
frozen (fixed value known to both ends), or dynamic (set during encoding from
the running prefix to impose the codeword distribution; unknown to the
decoder a priori). The JSON form is the interchange format between the
construction CLI and the simulator.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import binary_entropy
from .crc import CrcConfig
from .transform import is_power_of_two

INFO, FROZEN, DYNAMIC = 0, 1, 2
_CLASS_CHARS = np.array(["I", "F", "D"])

FORMAT_VERSION = 1


@dataclass
class CodeSpec:
    N: int
    rate: float
    p_on: float
    classes: np.ndarray  # uint8 per index: 0=I, 1=F, 2=D
    frozen_values: np.ndarray  # one bit per frozen index, ascending order
    crc: CrcConfig = field(default_factory=lambda: CrcConfig(width=0, poly=0x1, init=0))
    design_snr_db: float | None = None
    seed: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.classes = np.asarray(self.classes, dtype=np.uint8)
        self.frozen_values = np.asarray(self.frozen_values, dtype=np.uint8)
        if not is_power_of_two(self.N) or self.N < 2:
            raise ValueError(f"N must be a power of two >= 2, got {self.N}")
        if self.classes.shape != (self.N,):
            raise ValueError("classes must have one entry per index")
        if not 0.0 < self.p_on < 1.0:
            raise ValueError(f"p_on must lie in (0,1), got {self.p_on}")
        if self.frozen_values.shape[0] != self.frozen_count:
            raise ValueError("frozen_values length must match the frozen set size")
        if self.crc.width > self.info_count:
            raise ValueError("CRC wider than the information set")

    # ---- derived views ----
    @property
    def n(self) -> int:
        return self.N.bit_length() - 1

    @property
    def info_positions(self) -> np.ndarray:
        return np.flatnonzero(self.classes == INFO)

    @property
    def frozen_positions(self) -> np.ndarray:
        return np.flatnonzero(self.classes == FROZEN)

    @property
    def dynamic_positions(self) -> np.ndarray:
        return np.flatnonzero(self.classes == DYNAMIC)

    @property
    def info_count(self) -> int:
        return int(np.count_nonzero(self.classes == INFO))

    @property
    def frozen_count(self) -> int:
        return int(np.count_nonzero(self.classes == FROZEN))

    @property
    def dynamic_count(self) -> int:
        return int(np.count_nonzero(self.classes == DYNAMIC))

    @property
    def payload_size(self) -> int:
        return self.info_count - self.crc.width

    def dynamic_budget_floor(self) -> int:
        """Smallest shaping-set size with non-negative matching rate loss."""
        return int(np.ceil(self.N * (1.0 - binary_entropy(self.p_on))))

    # ---- serialisation ----
    def to_json(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "N": self.N,
            "n": self.n,
            "rate": self.rate,
            "p_on": self.p_on,
            "D": self.dynamic_count,
            "classes": [str(c) for c in _CLASS_CHARS[self.classes]],
            "frozen_values": [int(b) for b in self.frozen_values],
            "crc": self.crc.to_json(),
            "design_snr_db": self.design_snr_db,
            "seed": self.seed,
            "meta": self.meta,
        }

    @staticmethod
    def from_json(obj: dict) -> "CodeSpec":
        version = obj.get("format_version")
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported code file format version {version}")
        lut = {"I": INFO, "F": FROZEN, "D": DYNAMIC}
        classes = np.array([lut[c] for c in obj["classes"]], dtype=np.uint8)
        return CodeSpec(
            N=int(obj["N"]),
            rate=float(obj["rate"]),
            p_on=float(obj["p_on"]),
            classes=classes,
            frozen_values=np.array(obj["frozen_values"], dtype=np.uint8),
            crc=CrcConfig.from_json(obj["crc"]),
            design_snr_db=obj.get("design_snr_db"),
            seed=int(obj.get("seed", 0)),
            meta=obj.get("meta", {}),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1) + "\n")

    @staticmethod
    def load(path) -> "CodeSpec":
        return CodeSpec.from_json(json.loads(Path(path).read_text()))

    def content_hash(self) -> str:
        """Stable 12-hex-digit identity of the code (meta excluded)."""
        obj = self.to_json()
        obj.pop("meta")
        blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()[:12]

    def validate(self) -> None:
        """Check the partition and budget invariants, warn on a shaping set
        smaller than the asymptotic matching limit."""
        k = round(self.N * self.rate)
        if self.info_count != k:
            raise ValueError(f"information set size {self.info_count} != round(N*R) = {k}")
        if self.dynamic_count + self.frozen_count != self.N - k:
            raise ValueError("|D| + |F| must exhaust the non-information budget")
        if self.dynamic_count and self.dynamic_count < self.dynamic_budget_floor():
            warnings.warn(
                f"shaping set size {self.dynamic_count} below the asymptotic "
                f"matching limit {self.dynamic_budget_floor()}; expect a "
                "distribution mismatch",
                stacklevel=2,
            )

    def describe(self) -> str:
        lines = [
            f"N={self.N} (n={self.n})  rate={self.rate}  target p(on)={self.p_on}",
            f"information positions: {self.info_count} "
            f"(payload {self.payload_size} + CRC {self.crc.width})",
            f"frozen positions: {self.frozen_count}",
            f"shaping positions: {self.dynamic_count} "
            f"(asymptotic floor {self.dynamic_budget_floor()})",
            f"design SNR: {self.design_snr_db} dB  construction seed: {self.seed}",
            f"code id: {self.content_hash()}",
        ]
        return "\n".join(lines)
