"""Command-line front end: generate or ingest pages, degrade them,
analyze cluster statistics, compare runs, and fit/apply the suspect
model.

Exit codes: 0 success, 2 bad arguments, 3 unparseable input, 4
unsupported TIFF feature, 5 degenerate/insufficient regression data,
1 anything else (I/O and so on).  All randomness comes from the
recipe/spec seed (or --seed), never from the environment.
"""

import argparse
import json
import os
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, cluster, noise, predict, synthpage
from .errors import (
    DegenerateDesignError,
    FormatError,
    InsufficientDataError,
    LayoutError,
    UnsupportedTiffFeature,
)
from .raster import BiLevelImage, read_pbm, read_tiff_bilevel, write_pbm
from .rng import Rng

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_UNSUPPORTED = 4
EXIT_DEGENERATE = 5


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UnsupportedTiffFeature as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (FormatError, LayoutError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (DegenerateDesignError, InsufficientDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="docdegrade",
        description="Degrade bi-level page images in controlled amounts, "
        "measure black/white cluster statistics, and predict OCR suspect counts.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="synthesize a clean page from a spec file")
    p.add_argument("--spec", required=True, help="page spec JSON")
    p.add_argument("-o", "--out", required=True, help="output PBM path")
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("analyze", help="cluster statistics and speckle features of a page")
    p.add_argument("image", help="input image (PBM, or read-only TIFF by .tif/.tiff suffix)")
    p.add_argument("--features-out", help="write the features CSV here")
    p.add_argument("--histogram-out", help="write the size-histogram CSV here")
    p.add_argument("--page-id", help="page id for the CSV (default: image file stem)")
    _analysis_flags(p)
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("degrade", help="apply a degradation recipe to a page")
    p.add_argument("image", help="input image")
    p.add_argument("--recipe", required=True, help="recipe JSON")
    p.add_argument("-o", "--out", required=True, help="output PBM path")
    p.add_argument("--seed", type=int, help="override the recipe seed")
    p.set_defaults(handler=cmd_degrade)

    p = sub.add_parser("compare", help="feature/histogram delta between two pages")
    p.add_argument("image_a", help="baseline image")
    p.add_argument("image_b", help="comparison image")
    p.add_argument("-o", "--out", help="report JSON path (default: stdout)")
    p.add_argument("--model", help="model JSON; adds predicted suspects per page")
    p.add_argument(
        "--counts",
        nargs=3,
        type=_nonneg_int,
        metavar=("E", "F_PLUS", "F_MINUS"),
        help="observed error counts; adds a work estimate",
    )
    p.add_argument("--recipe", help="recipe JSON to embed in the report metadata")
    p.add_argument(
        "--deterministic",
        action="store_true",
        help="omit timestamps so identical inputs give identical reports",
    )
    _analysis_flags(p)
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("fit", help="fit the suspect model from a records CSV")
    p.add_argument("records", help="records CSV (features plus observed counts)")
    p.add_argument("-o", "--out", required=True, help="model JSON path")
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("predict", help="predict suspect counts for pages")
    p.add_argument("input", help="an image, or a features CSV with --from-features")
    p.add_argument("--model", required=True, help="model JSON from `fit`")
    p.add_argument("-o", "--out", help="write predictions CSV here")
    p.add_argument(
        "--from-features",
        action="store_true",
        help="treat INPUT as a features CSV instead of an image",
    )
    p.add_argument("--page-id", help="page id when INPUT is an image")
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=8)
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("cost", help="correction-work estimate from error counts")
    p.add_argument("e", type=_nonneg_int, help="true OCR errors")
    p.add_argument("f_plus", type=_nonneg_int, help="false positives")
    p.add_argument("f_minus", type=_nonneg_int, help="false negatives")
    p.set_defaults(handler=cmd_cost)

    return parser


def _analysis_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bin-width", type=int, default=cluster.DEFAULT_BIN_WIDTH)
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=8)


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return value


def _read_image(path: str) -> BiLevelImage:
    data = Path(path).read_bytes()
    if path.lower().endswith((".tif", ".tiff")):
        return read_tiff_bilevel(data)
    return read_pbm(data)


def _write_atomic(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# Command handlers


def cmd_gen(args) -> int:
    spec, seed = synthpage.page_spec_from_json(Path(args.spec).read_bytes())
    img = synthpage.generate(spec, Rng(seed))
    _write_atomic(args.out, write_pbm(img))
    print(f"wrote {args.out} ({img.width}x{img.height}, {img.count_black()} black px)")
    return EXIT_OK


def cmd_analyze(args) -> int:
    img = _read_image(args.image)
    analysis = cluster.analyze(img, args.connectivity)
    feats = cluster.features(analysis)
    page_id = args.page_id or Path(args.image).stem
    if args.features_out:
        _write_atomic(args.features_out, cluster.features_csv(page_id, feats))
    if args.histogram_out:
        _write_atomic(args.histogram_out, cluster.histogram_csv(analysis, args.bin_width))
    print(
        f"{page_id}: bsfl={feats.bsfl} bsfh={feats.bsfh} "
        f"clusters={feats.total_black_clusters} black={feats.total_black_pixels}"
    )
    return EXIT_OK


def cmd_degrade(args) -> int:
    img = _read_image(args.image)
    recipe = noise.recipe_from_json(Path(args.recipe).read_bytes())
    out = noise.apply_recipe(img, recipe, seed=args.seed)
    _write_atomic(args.out, write_pbm(out))
    seed = recipe.seed if args.seed is None else args.seed
    print(f"wrote {args.out} ({len(recipe.steps)} steps, seed {seed})")
    return EXIT_OK


def cmd_compare(args) -> int:
    img_a = _read_image(args.image_a)
    img_b = _read_image(args.image_b)
    analysis_a = cluster.analyze(img_a, args.connectivity)
    analysis_b = cluster.analyze(img_b, args.connectivity)
    feats_a = cluster.features(analysis_a)
    feats_b = cluster.features(analysis_b)
    delta = cluster.compare(analysis_a, analysis_b, args.bin_width)

    report = {
        "images": {"a": args.image_a, "b": args.image_b},
        "connectivity": args.connectivity,
        "bin_width": args.bin_width,
        "features": {"a": _features_dict(feats_a), "b": _features_dict(feats_b)},
        "delta": {
            "bsfl": delta.d_bsfl,
            "bsfh": delta.d_bsfh,
            "total_black_clusters": delta.d_total_black_clusters,
            "black_pixels": delta.d_black_pixels,
            "black_bins": [list(b) for b in delta.black_bins],
            "white_bins": [list(b) for b in delta.white_bins],
        },
        "metadata": {"tool": "docdegrade", "version": __version__},
    }
    if args.model:
        model = predict.model_from_json(Path(args.model).read_bytes())
        report["predicted_suspects"] = {
            "a": predict.predict_suspects(model, feats_a),
            "b": predict.predict_suspects(model, feats_b),
        }
    if args.counts:
        estimate = predict.work_cost(*args.counts)
        report["work_estimate"] = {
            "e": estimate.e,
            "f_plus": estimate.f_plus,
            "f_minus": estimate.f_minus,
            "cost": estimate.cost,
        }
    if args.recipe:
        recipe = noise.recipe_from_json(Path(args.recipe).read_bytes())
        report["metadata"]["recipe"] = json.loads(noise.recipe_to_json(recipe))
        report["metadata"]["seed"] = recipe.seed
    if not args.deterministic:
        report["metadata"]["created"] = datetime.now(timezone.utc).isoformat()

    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        _write_atomic(args.out, text.encode("utf-8"))
        print(f"wrote {args.out} (d_bsfl={delta.d_bsfl} d_bsfh={delta.d_bsfh})")
    else:
        print(text, end="")
    return EXIT_OK


def _features_dict(feats: cluster.PageFeatures) -> dict:
    return {
        "bsfl": feats.bsfl,
        "bsfh": feats.bsfh,
        "total_black_clusters": feats.total_black_clusters,
        "total_black_pixels": feats.total_black_pixels,
    }


def cmd_fit(args) -> int:
    records = predict.read_records(Path(args.records).read_bytes())
    model = predict.fit(records)
    _write_atomic(args.out, predict.model_to_json(model).encode("utf-8"))
    print(
        f"wrote {args.out} (n={model.n} r2={model.r_squared:.4f} "
        f"beta=({model.beta0:.4g}, {model.beta_bsfl:.4g}, {model.beta_bsfh:.4g}))"
    )
    return EXIT_OK


def cmd_predict(args) -> int:
    model = predict.model_from_json(Path(args.model).read_bytes())
    if args.from_features:
        pages = cluster.read_features_csv(Path(args.input).read_bytes())
    else:
        img = _read_image(args.input)
        feats = cluster.features(cluster.analyze(img, args.connectivity))
        pages = [(args.page_id or Path(args.input).stem, feats)]

    lines = ["page_id,bsfl,bsfh,predicted_suspects"]
    for page_id, feats in pages:
        value = predict.predict_suspects(model, feats)
        lines.append(f"{page_id},{feats.bsfl},{feats.bsfh},{value!r}")
        print(f"{page_id}: predicted_suspects={value}")
    if args.out:
        _write_atomic(args.out, ("\n".join(lines) + "\n").encode("utf-8"))
    return EXIT_OK


def cmd_cost(args) -> int:
    estimate = predict.work_cost(args.e, args.f_plus, args.f_minus)
    print(estimate.cost)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
