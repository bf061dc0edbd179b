"""Length-prefixed byte-string framing shared by every serialized object."""
from __future__ import annotations

from collections.abc import Iterable


def frame(parts: Iterable[bytes]) -> bytes:
    out = bytearray()
    for part in parts:
        out += len(part).to_bytes(4, "little")
        out += part
    return bytes(out)


def unframe(data: bytes) -> list[bytes]:
    parts, pos = [], 0
    while pos < len(data):
        if pos + 4 > len(data):
            raise ValueError("truncated length prefix")
        size = int.from_bytes(data[pos:pos + 4], "little")
        pos += 4
        if pos + size > len(data):
            raise ValueError("truncated frame body")
        parts.append(data[pos:pos + size])
        pos += size
    return parts


def encode_ints(values: Iterable[int], width: int = 4) -> bytes:
    return b"".join(int(v).to_bytes(width, "little") for v in values)


def decode_ints(data: bytes, width: int = 4) -> list[int]:
    if len(data) % width:
        raise ValueError("integer list length is not a multiple of the width")
    return [int.from_bytes(data[i:i + width], "little") for i in range(0, len(data), width)]
