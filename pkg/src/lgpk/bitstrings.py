"""Fixed-length bit strings with a canonical byte layout.

A string of `nbits` bits occupies ceil(nbits/8) bytes. Bit i of the string
lives in byte i//8 at bit position i%8 (LSB first), so when nbits is not a
multiple of 8 the unused high bits of the final byte are zero. Equivalently,
the whole string read little-endian is an integer below 2**nbits; "the first
k bits" of a string are the k low bits of that integer.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EncodingError


def mask_tail(data: bytes, nbits: int) -> bytes:
    """Zero the unused high bits of the final byte of an nbits-long string."""
    if len(data) != (nbits + 7) // 8:
        raise EncodingError(f"need {(nbits + 7) // 8} bytes for {nbits} bits, got {len(data)}")
    r = nbits % 8
    if r == 0 or not data:
        return data
    return data[:-1] + bytes([data[-1] & ((1 << r) - 1)])


@dataclass(frozen=True)
class BitStr:
    """An immutable bit string of exact length `nbits`."""

    nbits: int
    data: bytes

    def __post_init__(self):
        if self.nbits < 0:
            raise EncodingError("negative bit length")
        if len(self.data) != (self.nbits + 7) // 8:
            raise EncodingError(
                f"bit string of {self.nbits} bits needs {(self.nbits + 7) // 8} bytes, "
                f"got {len(self.data)}"
            )
        if self.data != mask_tail(self.data, self.nbits):
            raise EncodingError("unused high bits of final byte must be zero")

    @classmethod
    def from_bytes(cls, raw: bytes) -> "BitStr":
        return cls(8 * len(raw), bytes(raw))

    @classmethod
    def from_int(cls, value: int, nbits: int) -> "BitStr":
        if value < 0 or value >> nbits:
            raise EncodingError(f"value does not fit in {nbits} bits")
        return cls(nbits, value.to_bytes((nbits + 7) // 8, "little"))

    def to_int(self) -> int:
        return int.from_bytes(self.data, "little")

    def __xor__(self, other: "BitStr") -> "BitStr":
        if self.nbits != other.nbits:
            raise EncodingError(f"xor of {self.nbits}-bit and {other.nbits}-bit strings")
        return BitStr(self.nbits, bytes(a ^ b for a, b in zip(self.data, other.data)))

    def hex(self) -> str:
        return self.data.hex()

    @classmethod
    def from_hex(cls, s: str, nbits: int) -> "BitStr":
        return cls(nbits, bytes.fromhex(s))
