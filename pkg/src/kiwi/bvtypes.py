"""Fixed-width integer types shared by the front end and the solver layer."""

from __future__ import annotations

from dataclasses import dataclass

ALLOWED_WIDTHS = (1, 8, 16, 32, 64)


@dataclass(frozen=True)
class BvType:
    """A bit-vector type: signedness plus width in bits.

    Width 1 is reserved for booleans, which are always unsigned.  Wider
    internal types (e.g. the promoted template types) are built with
    :meth:`internal` and skip the width check.
    """

    signed: bool
    width: int

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ValueError(f"bad width {self.width}")
        if self.width == 1 and self.signed:
            raise ValueError("booleans are unsigned")

    @staticmethod
    def internal(signed: bool, width: int) -> "BvType":
        return BvType(signed and width > 1, width)

    @property
    def is_bool(self) -> bool:
        return self.width == 1

    @property
    def min_value(self) -> int:
        return -(1 << (self.width - 1)) if self.signed else 0

    @property
    def max_value(self) -> int:
        return (1 << (self.width - 1)) - 1 if self.signed else (1 << self.width) - 1

    @property
    def mask(self) -> int:
        return (1 << self.width) - 1

    def wrap(self, value: int) -> int:
        """Reduce an integer to this type's value range (two's complement)."""
        v = value & self.mask
        if self.signed and v >> (self.width - 1):
            v -= 1 << self.width
        return v

    def contains(self, value: int) -> bool:
        return self.min_value <= value <= self.max_value

    def __str__(self) -> str:
        if self.width == 1:
            return "bool"
        return f"{'i' if self.signed else 'u'}{self.width}"


BOOL = BvType(False, 1)
I8, I16, I32, I64 = (BvType(True, w) for w in (8, 16, 32, 64))
U8, U16, U32, U64 = (BvType(False, w) for w in (8, 16, 32, 64))


def is_program_type(t: BvType) -> bool:
    return t.width in ALLOWED_WIDTHS
