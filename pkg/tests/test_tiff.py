"""TIFF reader checks against hand-assembled files."""

import pytest

from docdegrade.errors import FormatError, UnsupportedTiffFeature
from docdegrade.raster import read_tiff_bilevel

from tiffbytes import make_tiff


class TestPixelSemantics:
    def test_single_black_pixel_white_is_zero(self):
        # Photometric 0: a stored 1 bit is ink.
        img = read_tiff_bilevel(make_tiff(1, 1, b"\x80", photometric=0))
        assert (img.width, img.height) == (1, 1)
        assert img.count_black() == 1

    def test_same_bit_inverts_under_black_is_zero(self):
        img = read_tiff_bilevel(make_tiff(1, 1, b"\x80", photometric=1))
        assert img.count_black() == 0

    def test_black_is_zero_full_row(self):
        # 8 stored zero bits under photometric 1 are all ink.
        img = read_tiff_bilevel(make_tiff(8, 1, b"\x00", photometric=1))
        assert img.count_black() == 8

    def test_inversion_keeps_padding_clean(self):
        # Width 3: the 5 padding bits must stay zero after inversion.
        img = read_tiff_bilevel(make_tiff(3, 1, b"\x00", photometric=1))
        assert img.count_black() == 3
        assert img.packed[0, 0] == 0b11100000

    def test_pixel_layout(self):
        # 4x2 checkerboard, photometric 0, rows 1010 / 0101.
        img = read_tiff_bilevel(make_tiff(4, 2, bytes([0b10100000, 0b01010000])))
        got = [[img.get(x, y) for x in range(4)] for y in range(2)]
        assert got == [[1, 0, 1, 0], [0, 1, 0, 1]]


class TestByteOrderAndStrips:
    def test_big_endian(self):
        img = read_tiff_bilevel(make_tiff(1, 1, b"\x80", byteorder=">"))
        assert img.count_black() == 1

    def test_byte_orders_agree(self):
        raster = bytes([0b11001010, 0b00110101, 0b11110000])
        little = read_tiff_bilevel(make_tiff(8, 3, raster, byteorder="<"))
        big = read_tiff_bilevel(make_tiff(8, 3, raster, byteorder=">"))
        assert little == big

    def test_multiple_strips(self):
        raster = bytes([0b10000000, 0b01000000, 0b00100000, 0b00010000])
        one = read_tiff_bilevel(make_tiff(4, 4, raster))
        split = read_tiff_bilevel(make_tiff(4, 4, raster, rows_per_strip=1))
        assert one == split
        assert split.count_black() == 4

    def test_missing_byte_counts_single_strip(self):
        data = make_tiff(8, 1, b"\xff", drop_tags=(279,))
        assert read_tiff_bilevel(data).count_black() == 8


class TestResolution:
    def test_default_dpi(self):
        assert read_tiff_bilevel(make_tiff(1, 1, b"\x80")).dpi == 300

    def test_dpi_from_inch_resolution(self):
        data = make_tiff(1, 1, b"\x80", resolution=(200, 1), resolution_unit=2)
        assert read_tiff_bilevel(data).dpi == 200

    def test_dpi_from_cm_resolution(self):
        data = make_tiff(1, 1, b"\x80", resolution=(100, 1), resolution_unit=3)
        assert read_tiff_bilevel(data).dpi == 254

    def test_unit_defaults_to_inch(self):
        data = make_tiff(1, 1, b"\x80", resolution=(300, 1))
        assert read_tiff_bilevel(data).dpi == 300

    def test_zero_denominator_falls_back(self):
        data = make_tiff(1, 1, b"\x80", resolution=(300, 0))
        assert read_tiff_bilevel(data).dpi == 300


class TestUnsupportedFeatures:
    def test_lzw_rejected_naming_the_tag(self):
        data = make_tiff(1, 1, b"\x80", compression=5)
        with pytest.raises(UnsupportedTiffFeature, match="compression"):
            read_tiff_bilevel(data)
        with pytest.raises(UnsupportedTiffFeature, match="259"):
            read_tiff_bilevel(data)

    def test_grayscale_rejected(self):
        with pytest.raises(UnsupportedTiffFeature, match="bits per sample"):
            read_tiff_bilevel(make_tiff(1, 1, b"\x80", bits_per_sample=8))

    def test_multiband_rejected(self):
        with pytest.raises(UnsupportedTiffFeature, match="samples per pixel"):
            read_tiff_bilevel(make_tiff(1, 1, b"\x80", samples_per_pixel=3))

    def test_tiled_rejected(self):
        with pytest.raises(UnsupportedTiffFeature, match="tiling"):
            read_tiff_bilevel(make_tiff(1, 1, b"\x80", tile_width=16))

    def test_reversed_fill_order_rejected(self):
        with pytest.raises(UnsupportedTiffFeature, match="fill order"):
            read_tiff_bilevel(make_tiff(1, 1, b"\x80", fill_order=2))

    def test_palette_photometric_rejected(self):
        with pytest.raises(UnsupportedTiffFeature, match="photometric"):
            read_tiff_bilevel(make_tiff(1, 1, b"\x80", photometric=3))

    def test_multi_page_rejected(self):
        with pytest.raises(UnsupportedTiffFeature, match="multi-page"):
            read_tiff_bilevel(make_tiff(1, 1, b"\x80", next_ifd=8))


class TestMalformedFiles:
    def test_bad_byte_order_mark(self):
        with pytest.raises(FormatError, match="byte-order"):
            read_tiff_bilevel(b"XX\x2a\x00\x08\x00\x00\x00")

    def test_bad_magic_number(self):
        data = bytearray(make_tiff(1, 1, b"\x80"))
        data[2] = 43
        with pytest.raises(FormatError, match="magic"):
            read_tiff_bilevel(bytes(data))

    def test_truncated_header(self):
        with pytest.raises(FormatError, match="truncated"):
            read_tiff_bilevel(b"II\x2a\x00")

    def test_truncated_ifd(self):
        data = make_tiff(1, 1, b"\x80")
        with pytest.raises(FormatError, match="truncated"):
            read_tiff_bilevel(data[:12])

    def test_missing_required_tag(self):
        with pytest.raises(FormatError, match="missing required TIFF tag 262"):
            read_tiff_bilevel(make_tiff(1, 1, b"\x80", drop_tags=(262,)))
        with pytest.raises(FormatError, match="missing required TIFF tag 256"):
            read_tiff_bilevel(make_tiff(1, 1, b"\x80", drop_tags=(256,)))

    def test_raster_shorter_than_image(self):
        # Strip byte counts say one byte, but the image needs two rows.
        data = make_tiff(8, 2, b"\xff\xff")
        broken = make_tiff(8, 2, b"\xff")  # one row of payload for a 2-row image
        with pytest.raises(FormatError, match="truncated"):
            read_tiff_bilevel(broken)
        assert read_tiff_bilevel(data).count_black() == 16
