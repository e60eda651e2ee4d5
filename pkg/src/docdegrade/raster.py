"""Bi-level page rasters and their file formats.

Pixels are 1 = black, 0 = white.  Rows are packed MSB-first, eight
pixels per byte, each row padded with zero bits to a byte boundary.
This matches the PBM P4 raster layout exactly, so writing P4 is a
straight dump of the in-memory representation.

PBM (P1 and P4) is the canonical interchange format; TIFF support is a
read-only reader for single-page uncompressed bi-level baseline files,
either byte order, photometric 0 or 1.
"""

import struct

import numpy as np

from .errors import FormatError, UnsupportedTiffFeature

BLACK = 1
WHITE = 0

DEFAULT_DPI = 300

# Guard against absurd dimensions before allocating.
_MAX_PIXELS = 1 << 31


class BiLevelImage:
    """A width x height bitmap plus dpi metadata.

    ``packed`` is a (height, row_bytes) uint8 array holding the raster.
    dpi is metadata only: no operation scales by it and it is excluded
    from equality.
    """

    __slots__ = ("width", "height", "dpi", "packed")

    def __init__(self, width: int, height: int, packed: np.ndarray, dpi: int = DEFAULT_DPI):
        if width < 1 or height < 1:
            raise ValueError(f"image dimensions must be positive, got {width}x{height}")
        if width * height > _MAX_PIXELS:
            raise ValueError(f"image dimensions too large: {width}x{height}")
        if dpi < 1:
            raise ValueError(f"dpi must be positive, got {dpi}")
        row_bytes = (width + 7) // 8
        if packed.dtype != np.uint8 or packed.shape != (height, row_bytes):
            raise ValueError(
                f"packed array must be uint8 of shape {(height, row_bytes)}, "
                f"got {packed.dtype} {packed.shape}"
            )
        if width % 8:
            pad_mask = (1 << (8 - width % 8)) - 1
            if (packed[:, -1] & pad_mask).any():
                raise ValueError("row padding bits must be zero")
        self.width = width
        self.height = height
        self.dpi = dpi
        self.packed = packed

    @classmethod
    def blank(cls, width: int, height: int, dpi: int = DEFAULT_DPI, color: int = WHITE) -> "BiLevelImage":
        """A uniform page of the given color."""
        if color not in (BLACK, WHITE):
            raise ValueError(f"color must be BLACK (1) or WHITE (0), got {color!r}")
        if width < 1 or height < 1:
            raise ValueError(f"image dimensions must be positive, got {width}x{height}")
        row_bytes = (width + 7) // 8
        packed = np.zeros((height, row_bytes), dtype=np.uint8)
        if color == BLACK:
            packed[:] = 0xFF
            _zero_padding(packed, width)
        return cls(width, height, packed, dpi)

    @classmethod
    def from_bool(cls, black: np.ndarray, dpi: int = DEFAULT_DPI) -> "BiLevelImage":
        """Build from a (height, width) boolean array, True = black."""
        if black.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {black.shape}")
        height, width = black.shape
        packed = np.packbits(black.astype(np.uint8, copy=False), axis=1)
        return cls(width, height, packed, dpi)

    def to_bool(self) -> np.ndarray:
        """The raster as a fresh (height, width) boolean array, True = black."""
        bits = np.unpackbits(self.packed, axis=1)[:, : self.width]
        return bits.astype(bool)

    def copy(self) -> "BiLevelImage":
        return BiLevelImage(self.width, self.height, self.packed.copy(), self.dpi)

    def get(self, x: int, y: int) -> int:
        """Pixel color at (x, y): BLACK or WHITE."""
        self._check_coords(x, y)
        return (self.packed[y, x >> 3] >> (7 - (x & 7))) & 1

    def set(self, x: int, y: int, color: int) -> None:
        """Set pixel (x, y) in place."""
        self._check_coords(x, y)
        if color not in (BLACK, WHITE):
            raise ValueError(f"color must be BLACK (1) or WHITE (0), got {color!r}")
        mask = 1 << (7 - (x & 7))
        if color == BLACK:
            self.packed[y, x >> 3] |= mask
        else:
            self.packed[y, x >> 3] &= ~mask & 0xFF

    def count_black(self) -> int:
        """Number of black pixels (padding bits excluded)."""
        return int(np.unpackbits(self.packed, axis=1)[:, : self.width].sum())

    def count_white(self) -> int:
        return self.width * self.height - self.count_black()

    def _check_coords(self, x: int, y: int) -> None:
        if not (0 <= x < self.width and 0 <= y < self.height):
            raise IndexError(
                f"pixel ({x}, {y}) outside {self.width}x{self.height} image"
            )

    def __eq__(self, other) -> bool:
        if not isinstance(other, BiLevelImage):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and np.array_equal(self.packed, other.packed)
        )

    def __hash__(self):
        return hash((self.width, self.height, self.packed.tobytes()))

    def __repr__(self):
        return f"BiLevelImage({self.width}x{self.height} @ {self.dpi} dpi)"


def new_blank(width: int, height: int, dpi: int = DEFAULT_DPI, color: int = WHITE) -> BiLevelImage:
    return BiLevelImage.blank(width, height, dpi, color)


def _zero_padding(packed: np.ndarray, width: int) -> None:
    if width % 8:
        packed[:, -1] &= (0xFF << (8 - width % 8)) & 0xFF


# ---------------------------------------------------------------------------
# PBM


def write_pbm(img: BiLevelImage) -> bytes:
    """Serialize as binary PBM (P4): magic line, one "width height" line,
    rows packed MSB-first."""
    header = f"P4\n{img.width} {img.height}\n".encode("ascii")
    return header + img.packed.tobytes()


def read_pbm(data: bytes, dpi: int = DEFAULT_DPI) -> BiLevelImage:
    """Parse a binary (P4) or ASCII (P1) PBM.

    ``#`` comments are allowed in the header.  PBM has no resolution
    field, so dpi defaults to 300.  Padding bits in P4 rows are masked
    to zero on read.
    """
    if data[:2] == b"P4":
        return _read_p4(data, dpi)
    if data[:2] == b"P1":
        return _read_p1(data, dpi)
    raise FormatError(f"bad magic: expected PBM P1 or P4, got {data[:2]!r}")


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        c = data[pos]
        if c == 0x23:  # '#'
            while pos < n and data[pos] not in (0x0A, 0x0D):
                pos += 1
        elif c in (0x20, 0x09, 0x0A, 0x0D, 0x0B, 0x0C):
            pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos] not in (0x20, 0x09, 0x0A, 0x0D, 0x0B, 0x0C, 0x23):
        pos += 1
    if start == pos:
        raise FormatError("truncated PBM header")
    return data[start:pos], pos


def _parse_dims(data: bytes, pos: int) -> tuple[int, int, int]:
    tok_w, pos = _next_token(data, pos)
    tok_h, pos = _next_token(data, pos)
    try:
        width, height = int(tok_w), int(tok_h)
    except ValueError:
        raise FormatError(f"malformed PBM dimensions: {tok_w!r} {tok_h!r}") from None
    if width < 1 or height < 1:
        raise FormatError(f"non-positive PBM dimensions: {width}x{height}")
    return width, height, pos


def _read_p4(data: bytes, dpi: int) -> BiLevelImage:
    width, height, pos = _parse_dims(data, 2)
    # Exactly one whitespace byte separates the header from the raster.
    if pos >= len(data) or data[pos] not in (0x20, 0x09, 0x0A, 0x0D, 0x0B, 0x0C):
        raise FormatError("malformed PBM header: missing raster separator")
    pos += 1
    row_bytes = (width + 7) // 8
    need = height * row_bytes
    raster = data[pos : pos + need]
    if len(raster) < need:
        raise FormatError(
            f"truncated PBM raster: need {need} bytes, have {len(raster)}"
        )
    packed = np.frombuffer(raster, dtype=np.uint8).reshape(height, row_bytes).copy()
    _zero_padding(packed, width)
    return BiLevelImage(width, height, packed, dpi)


def _read_p1(data: bytes, dpi: int) -> BiLevelImage:
    width, height, pos = _parse_dims(data, 2)
    bits = np.zeros(width * height, dtype=np.uint8)
    count = 0
    n = len(data)
    need = width * height
    while pos < n and count < need:
        c = data[pos]
        if c == 0x23:  # '#'
            while pos < n and data[pos] not in (0x0A, 0x0D):
                pos += 1
        elif c in (0x20, 0x09, 0x0A, 0x0D, 0x0B, 0x0C):
            pos += 1
        elif c in (0x30, 0x31):  # '0' / '1'
            bits[count] = c - 0x30
            count += 1
            pos += 1
        else:
            raise FormatError(f"unexpected byte {bytes([c])!r} in PBM P1 raster")
    if count < need:
        raise FormatError(f"truncated PBM raster: need {need} pixels, have {count}")
    return BiLevelImage.from_bool(bits.reshape(height, width).astype(bool), dpi)


# ---------------------------------------------------------------------------
# TIFF (read-only, uncompressed bi-level baseline)

_TAG_WIDTH = 256
_TAG_HEIGHT = 257
_TAG_BITS_PER_SAMPLE = 258
_TAG_COMPRESSION = 259
_TAG_PHOTOMETRIC = 262
_TAG_FILL_ORDER = 266
_TAG_STRIP_OFFSETS = 273
_TAG_SAMPLES_PER_PIXEL = 277
_TAG_ROWS_PER_STRIP = 278
_TAG_STRIP_BYTE_COUNTS = 279
_TAG_X_RESOLUTION = 282
_TAG_RESOLUTION_UNIT = 296
_TILE_TAGS = (322, 323, 324, 325)

_FIELD_SIZES = {1: 1, 2: 1, 3: 2, 4: 4, 5: 8, 6: 1, 7: 1, 8: 2, 9: 4, 10: 8, 11: 4, 12: 8}


def read_tiff_bilevel(data: bytes) -> BiLevelImage:
    """Parse a single-image baseline TIFF: 1 bit per sample, no
    compression, strip-organized, photometric 0 (white-is-zero, so the
    stored bit already means black) or 1 (black-is-zero, inverted on
    read).  Either byte order.  dpi comes from the resolution tags when
    present, else 300.

    Anything outside that subset raises UnsupportedTiffFeature naming
    the offending tag.
    """
    if len(data) < 8:
        raise FormatError("truncated TIFF: missing header")
    order = data[:2]
    if order == b"II":
        bo = "<"
    elif order == b"MM":
        bo = ">"
    else:
        raise FormatError(f"bad TIFF byte-order mark: {order!r}")
    (magic,) = struct.unpack_from(bo + "H", data, 2)
    if magic != 42:
        raise FormatError(f"bad TIFF magic number: {magic}")
    (ifd_offset,) = struct.unpack_from(bo + "I", data, 4)

    ifd = _Ifd(data, bo, ifd_offset)
    if ifd.next_offset != 0:
        raise UnsupportedTiffFeature("unsupported TIFF feature: multi-page file (chained IFD)")

    for tag in _TILE_TAGS:
        if tag in ifd.entries:
            raise UnsupportedTiffFeature(f"unsupported TIFF feature: tiling (tag {tag})")

    compression = ifd.scalar(_TAG_COMPRESSION, default=1)
    if compression != 1:
        raise UnsupportedTiffFeature(
            f"unsupported TIFF feature: compression (tag {_TAG_COMPRESSION}) = {compression}"
        )
    bits_per_sample = ifd.scalar(_TAG_BITS_PER_SAMPLE, default=1)
    if bits_per_sample != 1:
        raise UnsupportedTiffFeature(
            f"unsupported TIFF feature: bits per sample (tag {_TAG_BITS_PER_SAMPLE}) = {bits_per_sample}"
        )
    samples = ifd.scalar(_TAG_SAMPLES_PER_PIXEL, default=1)
    if samples != 1:
        raise UnsupportedTiffFeature(
            f"unsupported TIFF feature: samples per pixel (tag {_TAG_SAMPLES_PER_PIXEL}) = {samples}"
        )
    fill_order = ifd.scalar(_TAG_FILL_ORDER, default=1)
    if fill_order != 1:
        raise UnsupportedTiffFeature(
            f"unsupported TIFF feature: fill order (tag {_TAG_FILL_ORDER}) = {fill_order}"
        )

    width = ifd.scalar(_TAG_WIDTH)
    height = ifd.scalar(_TAG_HEIGHT)
    photometric = ifd.scalar(_TAG_PHOTOMETRIC)
    if photometric not in (0, 1):
        raise UnsupportedTiffFeature(
            f"unsupported TIFF feature: photometric interpretation (tag {_TAG_PHOTOMETRIC}) = {photometric}"
        )
    if width < 1 or height < 1:
        raise FormatError(f"non-positive TIFF dimensions: {width}x{height}")

    strip_offsets = ifd.values(_TAG_STRIP_OFFSETS)
    if _TAG_STRIP_BYTE_COUNTS in ifd.entries:
        strip_counts = ifd.values(_TAG_STRIP_BYTE_COUNTS)
        if len(strip_counts) != len(strip_offsets):
            raise FormatError("TIFF strip offsets and byte counts disagree")
    elif len(strip_offsets) == 1:
        # Some writers omit tag 279 for single-strip files.
        strip_counts = [len(data) - strip_offsets[0]]
    else:
        raise FormatError(f"missing required TIFF tag {_TAG_STRIP_BYTE_COUNTS}")

    chunks = []
    for off, cnt in zip(strip_offsets, strip_counts):
        if off < 0 or cnt < 0 or off + cnt > len(data):
            raise FormatError("truncated TIFF: strip data out of range")
        chunks.append(data[off : off + cnt])
    raster = b"".join(chunks)

    row_bytes = (width + 7) // 8
    need = height * row_bytes
    if len(raster) < need:
        raise FormatError(f"truncated TIFF raster: need {need} bytes, have {len(raster)}")
    packed = np.frombuffer(raster[:need], dtype=np.uint8).reshape(height, row_bytes)
    bits = np.unpackbits(packed, axis=1)[:, :width].astype(bool)
    if photometric == 1:  # black-is-zero: stored 1 means white
        bits = ~bits
    return BiLevelImage.from_bool(bits, dpi=_read_dpi(ifd))


class _Ifd:
    """One image file directory: tag -> (field type, count, value position)."""

    def __init__(self, data: bytes, bo: str, offset: int):
        if offset < 8 or offset + 2 > len(data):
            raise FormatError(f"truncated TIFF: bad IFD offset {offset}")
        (count,) = struct.unpack_from(bo + "H", data, offset)
        end = offset + 2 + 12 * count
        if end + 4 > len(data):
            raise FormatError("truncated TIFF: IFD extends past end of file")
        self.data = data
        self.bo = bo
        self.entries = {}
        for i in range(count):
            base = offset + 2 + 12 * i
            tag, ftype, n = struct.unpack_from(bo + "HHI", data, base)
            self.entries[tag] = (ftype, n, base + 8)
        (self.next_offset,) = struct.unpack_from(bo + "I", data, end)

    def values(self, tag: int) -> list[int]:
        if tag not in self.entries:
            raise FormatError(f"missing required TIFF tag {tag}")
        ftype, n, value_pos = self.entries[tag]
        size = _FIELD_SIZES.get(ftype)
        if size is None:
            raise FormatError(f"TIFF tag {tag} has unknown field type {ftype}")
        total = size * n
        if total > 4:
            (pos,) = struct.unpack_from(self.bo + "I", self.data, value_pos)
        else:
            pos = value_pos
        if pos + total > len(self.data):
            raise FormatError(f"truncated TIFF: values of tag {tag} out of range")
        if ftype == 5:  # RATIONAL: numerator, denominator pairs, flattened
            out = []
            for i in range(n):
                out.extend(struct.unpack_from(self.bo + "II", self.data, pos + 8 * i))
            return out
        fmt = {1: "B", 3: "H", 4: "I"}.get(ftype)
        if fmt is None:
            raise FormatError(f"TIFF tag {tag} has unsupported field type {ftype}")
        return [
            struct.unpack_from(self.bo + fmt, self.data, pos + size * i)[0]
            for i in range(n)
        ]

    def scalar(self, tag: int, default: int | None = None) -> int:
        if tag not in self.entries:
            if default is None:
                raise FormatError(f"missing required TIFF tag {tag}")
            return default
        values = self.values(tag)
        if not values:
            raise FormatError(f"TIFF tag {tag} has no values")
        return values[0]


def _read_dpi(ifd: _Ifd) -> int:
    if _TAG_X_RESOLUTION not in ifd.entries:
        return DEFAULT_DPI
    num, den, *_ = ifd.values(_TAG_X_RESOLUTION)
    if den == 0:
        return DEFAULT_DPI
    unit = ifd.scalar(_TAG_RESOLUTION_UNIT, default=2)
    per_unit = num / den
    if unit == 2:  # inch
        dpi = per_unit
    elif unit == 3:  # centimeter
        dpi = per_unit * 2.54
    else:
        return DEFAULT_DPI
    return max(1, round(dpi))
