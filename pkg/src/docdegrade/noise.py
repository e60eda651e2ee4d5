"""The three controlled degradation models and their composition.

* pixel noise: isolated black pixels at uniformly random coordinates.
* blobs: clouds of black or white pixels scattered normally around a
  uniformly random center; white blobs break glyphs apart, black blobs
  weld neighbors together.
* copy noise: every black cluster grows outward along its boundary by a
  normally drawn depth, imitating photocopier / scanner blur.

All three are pure transformations: they take an image, parameters, and
an Rng, and return a new image, consuming draws in a documented order so
tests can replay the randomness independently.  A DegradationRecipe
chains steps against a single stream seeded once.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import FormatError
from .raster import BLACK, WHITE, BiLevelImage
from .rng import Rng, round_half_away


@dataclass(frozen=True)
class PixelNoiseParams:
    """Scatter ``count`` black pixels uniformly over the page."""

    count: int

    def __post_init__(self):
        if self.count < 0:
            raise ValueError(f"pixel-noise count must be >= 0, got {self.count}")


@dataclass(frozen=True)
class BlobParams:
    """Place ``blob_count`` blobs of one color.

    Each blob draws its pixel budget around a uniform center with
    per-axis normal offsets of standard deviation ``spread``.  The
    budget is either ``pixels_per_blob`` (absolute) or
    ``pixel_fraction`` (share of the page's total pixels); exactly one
    must be given.
    """

    blob_count: int
    spread: float
    color: int = WHITE
    pixels_per_blob: int | None = None
    pixel_fraction: float | None = None

    def __post_init__(self):
        if self.blob_count < 0:
            raise ValueError(f"blob count must be >= 0, got {self.blob_count}")
        if self.spread < 0:
            raise ValueError(f"blob spread must be >= 0, got {self.spread}")
        if self.color not in (BLACK, WHITE):
            raise ValueError(f"blob color must be BLACK (1) or WHITE (0), got {self.color!r}")
        if (self.pixels_per_blob is None) == (self.pixel_fraction is None):
            raise ValueError("exactly one of pixels_per_blob / pixel_fraction must be set")
        if self.pixels_per_blob is not None and self.pixels_per_blob < 1:
            raise ValueError(f"pixels per blob must be >= 1, got {self.pixels_per_blob}")
        if self.pixel_fraction is not None and not 0.0 < self.pixel_fraction <= 1.0:
            raise ValueError(f"pixel fraction must be in (0, 1], got {self.pixel_fraction}")

    def resolve_pixels(self, total_pixels: int) -> int:
        """Pixel budget per blob for a page of ``total_pixels``."""
        if self.pixels_per_blob is not None:
            return self.pixels_per_blob
        return max(1, int(round_half_away(self.pixel_fraction * total_pixels)))


def _default_max_depth(growth: int) -> int:
    return 3 * max(growth, 1)


@dataclass(frozen=True)
class CopyNoiseParams:
    """Grow black clusters along their boundaries.

    Each boundary pixel draws a depth from normal(growth, sd), rounded
    and clamped to [0, max_depth], and blackens everything within that
    Chebyshev distance.
    """

    growth: int = 1
    sd: float = 4.0
    max_depth: int | None = None

    def __post_init__(self):
        if self.growth < 0:
            raise ValueError(f"growth must be >= 0, got {self.growth}")
        if self.sd < 0:
            raise ValueError(f"sd must be >= 0, got {self.sd}")
        if self.max_depth is None:
            object.__setattr__(self, "max_depth", _default_max_depth(self.growth))
        if self.max_depth < 1 or self.max_depth < self.growth:
            raise ValueError(
                f"max_depth must be a positive integer >= growth, got {self.max_depth}"
            )


NoiseStep = PixelNoiseParams | BlobParams | CopyNoiseParams


@dataclass(frozen=True)
class DegradationRecipe:
    """An ordered list of noise steps plus the seed that drives them."""

    steps: tuple[NoiseStep, ...]
    seed: int

    def __post_init__(self):
        for step in self.steps:
            if not isinstance(step, (PixelNoiseParams, BlobParams, CopyNoiseParams)):
                raise ValueError(f"unknown recipe step: {step!r}")


def default_recipe(seed: int) -> DegradationRecipe:
    """The stock photocopy-degradation recipe: unit blur with a wide
    depth spread first, then 150 white blobs of 0.1% of the page each
    with a 6-pixel scatter."""
    return DegradationRecipe(
        steps=(
            CopyNoiseParams(growth=1, sd=4.0),
            BlobParams(blob_count=150, spread=6.0, color=WHITE, pixel_fraction=0.001),
        ),
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Application


def apply_pixel_noise(img: BiLevelImage, params: PixelNoiseParams, rng: Rng) -> BiLevelImage:
    """Draw ``count`` coordinate pairs (x then y per pair) and blacken
    each target.  Never whitens anything."""
    arr = img.to_bool()
    if params.count:
        draws = rng.u64_block(2 * params.count)
        xs = (draws[0::2] % np.uint64(img.width)).astype(np.int64)
        ys = (draws[1::2] % np.uint64(img.height)).astype(np.int64)
        arr[ys, xs] = True
    return BiLevelImage.from_bool(arr, dpi=img.dpi)


def apply_blobs(img: BiLevelImage, params: BlobParams, rng: Rng) -> BiLevelImage:
    """For each blob: draw a center (x then y, uniform over the page),
    then the pixel budget of offset pairs (dx then dy, each
    round-half-away of normal(0, spread)).  In-bounds targets take the
    blob color; out-of-bounds draws are discarded.  Centers may land
    anywhere, including areas already that color."""
    arr = img.to_bool()
    w, h = img.width, img.height
    budget = params.resolve_pixels(w * h)
    value = params.color == BLACK
    for _ in range(params.blob_count):
        cx = rng.uniform_below(w)
        cy = rng.uniform_below(h)
        offsets = round_half_away(rng.normal_block(2 * budget, 0.0, params.spread)).astype(np.int64)
        xs = cx + offsets[0::2]
        ys = cy + offsets[1::2]
        ok = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h)
        arr[ys[ok], xs[ok]] = value
    return BiLevelImage.from_bool(arr, dpi=img.dpi)


def apply_copy_noise(img: BiLevelImage, params: CopyNoiseParams, rng: Rng) -> BiLevelImage:
    """Grow black clusters along their boundaries.

    Boundary pixels are the black pixels with at least one white
    8-neighbor in the ORIGINAL image (anything beyond the image edge
    counts as white), enumerated in row-major order.  Each draws one
    depth; the output blackens every pixel within that Chebyshev
    distance.  The input's black set is always preserved."""
    black = img.to_bool()
    out = black.copy()
    ys, xs = np.nonzero(_boundary_mask(black))
    if len(xs):
        depths = round_half_away(rng.normal_block(len(xs), float(params.growth), params.sd))
        depths = np.clip(depths, 0, params.max_depth).astype(np.int64)
        grow = np.zeros_like(black)
        for d in range(params.max_depth, 0, -1):
            sel = depths == d
            if sel.any():
                grow[ys[sel], xs[sel]] = True
            if grow.any():
                grow = _dilate8(grow)
        out |= grow
    return BiLevelImage.from_bool(out, dpi=img.dpi)


def apply_recipe(img: BiLevelImage, recipe: DegradationRecipe, seed: int | None = None) -> BiLevelImage:
    """Apply the steps in order against a single stream seeded from the
    recipe (or the override).  An empty recipe is the identity."""
    rng = Rng(recipe.seed if seed is None else seed)
    out = img.copy()
    for step in recipe.steps:
        out = apply_step(out, step, rng)
    return out


def apply_step(img: BiLevelImage, step: NoiseStep, rng: Rng) -> BiLevelImage:
    if isinstance(step, PixelNoiseParams):
        return apply_pixel_noise(img, step, rng)
    if isinstance(step, BlobParams):
        return apply_blobs(img, step, rng)
    if isinstance(step, CopyNoiseParams):
        return apply_copy_noise(img, step, rng)
    raise ValueError(f"unknown recipe step: {step!r}")


def _boundary_mask(black: np.ndarray) -> np.ndarray:
    h, w = black.shape
    white = np.ones((h + 2, w + 2), dtype=bool)
    white[1:-1, 1:-1] = ~black
    near_white = np.zeros_like(black)
    for dy in (0, 1, 2):
        for dx in (0, 1, 2):
            if dy == 1 and dx == 1:
                continue
            near_white |= white[dy : dy + h, dx : dx + w]
    return black & near_white


def _dilate8(mask: np.ndarray) -> np.ndarray:
    out = mask.copy()
    out[:-1, :] |= mask[1:, :]
    out[1:, :] |= mask[:-1, :]
    out[:, :-1] |= mask[:, 1:]
    out[:, 1:] |= mask[:, :-1]
    out[:-1, :-1] |= mask[1:, 1:]
    out[:-1, 1:] |= mask[1:, :-1]
    out[1:, :-1] |= mask[:-1, 1:]
    out[1:, 1:] |= mask[:-1, :-1]
    return out


# ---------------------------------------------------------------------------
# Recipe serialization

_COLOR_NAMES = {BLACK: "black", WHITE: "white"}
_COLOR_VALUES = {v: k for k, v in _COLOR_NAMES.items()}


def recipe_to_json(recipe: DegradationRecipe) -> str:
    steps = []
    for step in recipe.steps:
        if isinstance(step, PixelNoiseParams):
            steps.append({"type": "pixel", "count": step.count})
        elif isinstance(step, BlobParams):
            if step.pixel_fraction is not None:
                pixels = {"fraction": step.pixel_fraction}
            else:
                pixels = {"count": step.pixels_per_blob}
            steps.append(
                {
                    "type": "blob",
                    "blob_count": step.blob_count,
                    "pixels_per_blob": pixels,
                    "spread": step.spread,
                    "color": _COLOR_NAMES[step.color],
                }
            )
        elif isinstance(step, CopyNoiseParams):
            steps.append(
                {
                    "type": "copy",
                    "growth": step.growth,
                    "sd": step.sd,
                    "max_depth": step.max_depth,
                }
            )
    return json.dumps({"seed": recipe.seed, "steps": steps}, indent=2) + "\n"


def recipe_from_json(text: str | bytes) -> DegradationRecipe:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"recipe is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FormatError("recipe must be a JSON object")
    try:
        seed = doc["seed"]
        raw_steps = doc["steps"]
    except KeyError as exc:
        raise FormatError(f"recipe missing field {exc}") from None
    if not isinstance(seed, int):
        raise FormatError(f"recipe seed must be an integer, got {seed!r}")
    if not isinstance(raw_steps, list):
        raise FormatError("recipe steps must be a list")
    steps = []
    for i, raw in enumerate(raw_steps):
        try:
            steps.append(_step_from_dict(raw))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"recipe step {i}: {exc}") from None
    return DegradationRecipe(steps=tuple(steps), seed=seed)


def _step_from_dict(raw: dict) -> NoiseStep:
    kind = raw["type"]
    if kind == "pixel":
        return PixelNoiseParams(count=raw["count"])
    if kind == "blob":
        pixels = raw["pixels_per_blob"]
        if not isinstance(pixels, dict) or len(pixels) != 1:
            raise ValueError(
                'pixels_per_blob must be {"count": n} or {"fraction": f}'
            )
        absolute = pixels.get("count")
        fraction = pixels.get("fraction")
        if absolute is None and fraction is None:
            raise ValueError(
                'pixels_per_blob must be {"count": n} or {"fraction": f}'
            )
        return BlobParams(
            blob_count=raw["blob_count"],
            spread=float(raw["spread"]),
            color=_COLOR_VALUES[raw["color"]],
            pixels_per_blob=absolute,
            pixel_fraction=fraction,
        )
    if kind == "copy":
        return CopyNoiseParams(
            growth=raw["growth"],
            sd=float(raw["sd"]),
            max_depth=raw.get("max_depth"),
        )
    raise ValueError(f"unknown step type {kind!r}")
