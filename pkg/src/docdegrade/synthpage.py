"""Deterministic generator of clean synthetic pages.

Glyph-like black shapes on a regular grid stand in for rendered text, so
the whole pipeline can run at desk scale with exactly predictable
cluster statistics: a solid-glyph page has lines x glyphs_per_line
components of glyph_width x glyph_height pixels each, and nothing else.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, LayoutError
from .raster import DEFAULT_DPI, BiLevelImage
from .rng import Rng

STYLES = ("solid", "ring", "blocky")

# Minimum white space between neighboring glyphs, so every glyph stays
# its own component on the clean page.
MIN_GAP = 2


@dataclass(frozen=True)
class PageSpec:
    width: int
    height: int
    margin: int
    glyph_width: int
    glyph_height: int
    glyphs_per_line: int
    lines: int
    style: str = "solid"
    dpi: int = DEFAULT_DPI

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"page dimensions must be positive, got {self.width}x{self.height}")
        if self.margin < 0:
            raise ValueError(f"margin must be >= 0, got {self.margin}")
        if self.glyph_width < 1 or self.glyph_height < 1:
            raise ValueError(
                f"glyph dimensions must be positive, got {self.glyph_width}x{self.glyph_height}"
            )
        if self.glyphs_per_line < 1 or self.lines < 1:
            raise ValueError("glyphs_per_line and lines must be >= 1")
        if self.style not in STYLES:
            raise ValueError(f"style must be one of {STYLES}, got {self.style!r}")


def generate(spec: PageSpec, rng: Rng | None = None) -> BiLevelImage:
    """Lay the glyph grid out on a white page.

    Grid pitch is the usable span divided by the glyph count per axis;
    the spec is rejected if that leaves less than MIN_GAP white pixels
    between neighbors.  ``rng`` is only consumed by the "blocky" style,
    which draws one random walk per glyph.
    """
    pitch_x = (spec.width - 2 * spec.margin) // spec.glyphs_per_line
    pitch_y = (spec.height - 2 * spec.margin) // spec.lines
    if pitch_x < spec.glyph_width + MIN_GAP:
        raise LayoutError(
            f"{spec.glyphs_per_line} glyphs of width {spec.glyph_width} do not fit "
            f"{spec.width}-wide page with margin {spec.margin}"
        )
    if pitch_y < spec.glyph_height + MIN_GAP:
        raise LayoutError(
            f"{spec.lines} lines of height {spec.glyph_height} do not fit "
            f"{spec.height}-tall page with margin {spec.margin}"
        )
    if spec.style == "blocky" and rng is None:
        raise ValueError("blocky style needs an rng")

    page = np.zeros((spec.height, spec.width), dtype=bool)
    for row in range(spec.lines):
        for col in range(spec.glyphs_per_line):
            glyph = _make_glyph(spec, rng)
            y0 = spec.margin + row * pitch_y
            x0 = spec.margin + col * pitch_x
            page[y0 : y0 + spec.glyph_height, x0 : x0 + spec.glyph_width] |= glyph
    return BiLevelImage.from_bool(page, dpi=spec.dpi)


def _make_glyph(spec: PageSpec, rng: Rng | None) -> np.ndarray:
    gw, gh = spec.glyph_width, spec.glyph_height
    if spec.style == "solid":
        return np.ones((gh, gw), dtype=bool)
    if spec.style == "ring":
        glyph = np.ones((gh, gw), dtype=bool)
        if gw > 2 and gh > 2:
            glyph[1:-1, 1:-1] = False
        return glyph
    return _blocky_glyph(gw, gh, rng)


def _blocky_glyph(gw: int, gh: int, rng: Rng) -> np.ndarray:
    """A random 8-connected splat: an 8-neighbor walk from the center,
    marking every visited cell, until about half the box is ink."""
    glyph = np.zeros((gh, gw), dtype=bool)
    x, y = gw // 2, gh // 2
    glyph[y, x] = True
    target = max(1, (gw * gh) // 2)
    filled = 1
    moves = ((-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1))
    for _ in range(8 * gw * gh):
        if filled >= target:
            break
        dx, dy = moves[rng.uniform_below(8)]
        nx, ny = x + dx, y + dy
        if 0 <= nx < gw and 0 <= ny < gh:
            x, y = nx, ny
            if not glyph[y, x]:
                glyph[y, x] = True
                filled += 1
    return glyph


# ---------------------------------------------------------------------------
# Spec serialization (gen command config)


def page_spec_to_json(spec: PageSpec, seed: int = 0) -> str:
    doc = {
        "width": spec.width,
        "height": spec.height,
        "margin": spec.margin,
        "glyph_width": spec.glyph_width,
        "glyph_height": spec.glyph_height,
        "glyphs_per_line": spec.glyphs_per_line,
        "lines": spec.lines,
        "style": spec.style,
        "dpi": spec.dpi,
        "seed": seed,
    }
    return json.dumps(doc, indent=2) + "\n"


def page_spec_from_json(text: str | bytes) -> tuple[PageSpec, int]:
    """Parse a page-spec document; returns (spec, seed)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"page spec is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FormatError("page spec must be a JSON object")
    seed = doc.pop("seed", 0)
    if not isinstance(seed, int):
        raise FormatError(f"page spec seed must be an integer, got {seed!r}")
    try:
        spec = PageSpec(**doc)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad page spec: {exc}") from None
    return spec, seed
