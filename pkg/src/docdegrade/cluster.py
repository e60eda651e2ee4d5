"""Connected-component ("cluster") statistics for bi-level pages.

Black clusters are labeled under the chosen connectivity (default 8);
white clusters always use the complementary connectivity (8 <-> 4) so
the two tilings stay topologically dual.  The speckle features counted
here are the package's page-quality signal: broken characters show up
as many small black clusters, touching characters as oversized ones.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import FormatError
from .raster import BiLevelImage

# Cluster-size thresholds for the speckle features: "low" counts clusters
# of at most SMALL_SIZE_MAX pixels, "high" counts clusters of at least
# LARGE_SIZE_MIN pixels (i.e. strictly larger than 300).
SMALL_SIZE_MAX = 10
LARGE_SIZE_MIN = 301

DEFAULT_BIN_WIDTH = 10

_STRUCT = {
    4: np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool),
    8: np.ones((3, 3), dtype=bool),
}
_DUAL = {4: 8, 8: 4}


@dataclass(frozen=True)
class ClusterAnalysis:
    """Black and white component sizes of one page.

    Sizes are stored sorted ascending; only the multiset matters.
    ``connectivity`` is the one used for black pixels.
    """

    black_sizes: tuple[int, ...]
    white_sizes: tuple[int, ...]
    connectivity: int


@dataclass(frozen=True)
class PageFeatures:
    bsfl: int  # black clusters with size <= SMALL_SIZE_MAX
    bsfh: int  # black clusters with size >= LARGE_SIZE_MIN
    total_black_clusters: int
    total_black_pixels: int


@dataclass(frozen=True)
class Histogram:
    """Cluster-size histogram: bin b covers sizes in
    [b*bin_width + 1, (b+1)*bin_width].  Bins are contiguous from size 1
    through the largest observed size; intermediate empty bins included."""

    bin_width: int
    bins: tuple[tuple[int, int], ...]  # (lower bound, count)


@dataclass(frozen=True)
class AnalysisDelta:
    """Differences between two analyses, second minus first."""

    d_bsfl: int
    d_bsfh: int
    d_total_black_clusters: int
    d_black_pixels: int
    bin_width: int
    black_bins: tuple[tuple[int, int], ...]  # (lower bound, count delta)
    white_bins: tuple[tuple[int, int], ...]


def analyze(img: BiLevelImage, connectivity: int = 8) -> ClusterAnalysis:
    """Label black clusters under ``connectivity`` and white clusters
    (background included) under the complementary connectivity."""
    if connectivity not in _STRUCT:
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    black = img.to_bool()
    return ClusterAnalysis(
        black_sizes=_component_sizes(black, connectivity),
        white_sizes=_component_sizes(~black, _DUAL[connectivity]),
        connectivity=connectivity,
    )


def _component_sizes(mask: np.ndarray, connectivity: int) -> tuple[int, ...]:
    labels, n = ndimage.label(mask, structure=_STRUCT[connectivity])
    if n == 0:
        return ()
    sizes = np.bincount(labels.ravel())[1:]  # label 0 is the non-mask area
    return tuple(int(s) for s in np.sort(sizes))


def features(analysis: ClusterAnalysis) -> PageFeatures:
    sizes = analysis.black_sizes
    return PageFeatures(
        bsfl=sum(1 for s in sizes if s <= SMALL_SIZE_MAX),
        bsfh=sum(1 for s in sizes if s >= LARGE_SIZE_MIN),
        total_black_clusters=len(sizes),
        total_black_pixels=sum(sizes),
    )


def histogram(sizes, bin_width: int = DEFAULT_BIN_WIDTH) -> Histogram:
    """Histogram of a cluster-size multiset; size s lands in bin
    floor((s - 1) / bin_width)."""
    if bin_width < 1:
        raise ValueError(f"bin width must be >= 1, got {bin_width}")
    sizes = list(sizes)
    if not sizes:
        return Histogram(bin_width, ())
    counts = [0] * ((max(sizes) - 1) // bin_width + 1)
    for s in sizes:
        if s < 1:
            raise ValueError(f"cluster sizes must be >= 1, got {s}")
        counts[(s - 1) // bin_width] += 1
    bins = tuple((b * bin_width + 1, c) for b, c in enumerate(counts))
    return Histogram(bin_width, bins)


def compare(a: ClusterAnalysis, b: ClusterAnalysis, bin_width: int = DEFAULT_BIN_WIDTH) -> AnalysisDelta:
    """Delta report between two analyses of the same connectivity,
    reading all differences as b minus a."""
    if a.connectivity != b.connectivity:
        raise ValueError(
            f"connectivity mismatch: {a.connectivity} vs {b.connectivity}"
        )
    fa, fb = features(a), features(b)
    return AnalysisDelta(
        d_bsfl=fb.bsfl - fa.bsfl,
        d_bsfh=fb.bsfh - fa.bsfh,
        d_total_black_clusters=fb.total_black_clusters - fa.total_black_clusters,
        d_black_pixels=fb.total_black_pixels - fa.total_black_pixels,
        bin_width=bin_width,
        black_bins=_bin_delta(a.black_sizes, b.black_sizes, bin_width),
        white_bins=_bin_delta(a.white_sizes, b.white_sizes, bin_width),
    )


def _bin_delta(sizes_a, sizes_b, bin_width: int) -> tuple[tuple[int, int], ...]:
    ca = dict(histogram(sizes_a, bin_width).bins)
    cb = dict(histogram(sizes_b, bin_width).bins)
    lowers = sorted(set(ca) | set(cb))
    return tuple((lo, cb.get(lo, 0) - ca.get(lo, 0)) for lo in lowers)


# ---------------------------------------------------------------------------
# CSV exports


def histogram_csv(analysis: ClusterAnalysis, bin_width: int = DEFAULT_BIN_WIDTH) -> bytes:
    """Black and white size histograms side by side, one row per bin."""
    black = dict(histogram(analysis.black_sizes, bin_width).bins)
    white = dict(histogram(analysis.white_sizes, bin_width).bins)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["bin_lower", "bin_upper", "black_count", "white_count"])
    for lo in sorted(set(black) | set(white)):
        writer.writerow([lo, lo + bin_width - 1, black.get(lo, 0), white.get(lo, 0)])
    return out.getvalue().encode("ascii")


def features_csv(page_id: str, feats: PageFeatures) -> bytes:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(FEATURES_CSV_HEADER)
    writer.writerow(
        [page_id, feats.bsfl, feats.bsfh, feats.total_black_clusters, feats.total_black_pixels]
    )
    return out.getvalue().encode("utf-8")


FEATURES_CSV_HEADER = [
    "page_id",
    "bsfl",
    "bsfh",
    "total_black_clusters",
    "total_black_pixels",
]


def read_features_csv(data: bytes) -> list[tuple[str, PageFeatures]]:
    """Parse one or more rows in the features CSV layout."""
    reader = csv.reader(io.StringIO(data.decode("utf-8")))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("empty features CSV") from None
    if header != FEATURES_CSV_HEADER:
        raise FormatError(f"bad features CSV header: {header!r}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 5:
            raise FormatError(f"features CSV line {lineno}: expected 5 fields, got {len(row)}")
        try:
            feats = PageFeatures(int(row[1]), int(row[2]), int(row[3]), int(row[4]))
        except ValueError:
            raise FormatError(f"features CSV line {lineno}: non-integer feature value") from None
        rows.append((row[0], feats))
    return rows
