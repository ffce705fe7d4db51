"""Command-line interface.

Subcommands: compose-mask, inpaint, metrics, attention-delta,
classify-canyon, insert-objects, serve, report. Machine-readable output
is JSON (one object per line for batch records). Exit codes: 0 success,
2 dimension mismatch, 3 missing weights with fallback disabled,
4 malformed raster, 64 usage errors, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .canyon import classify_canyon, estimate_aspect_ratio
from .errors import (
    DimensionMismatchError,
    RasterDecodeError,
    StudyError,
    WayclearError,
    WeightsError,
)
from .masks import binarize_saliency, classify_levels, compose_inpaint_mask, dilate_mask
from .metrics import attention_delta, compute_quality, insert_objects
from .pipeline import (
    PipelineConfig,
    dump_record,
    inpaint_with_mask,
    resolve_data_path,
    run_pipeline,
    write_atomic,
)
from .rasters import decode_raster, encode_raster

EX_OK = 0
EX_DIMENSIONS = 2
EX_WEIGHTS = 3
EX_RASTER = 4
EX_SOFTWARE = 1
EX_USAGE = 64


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    """argparse with exit code 64 on usage problems."""

    def error(self, message: str):  # noqa: D102 - argparse hook
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def gamma_flag(text: str) -> float:
    value = float(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"gamma must lie in (0, 1], got {value}")
    return value


def read_raster(path: str | Path, kind: str):
    return decode_raster(Path(resolve_data_path(path)).read_bytes(), kind)


def build_parser() -> Parser:
    parser = Parser(prog="wayclear", description=__doc__)
    parser.add_argument("--config", type=Path, help="JSON config file; flags override it")
    parser.add_argument("--seed", type=int, default=0, help="seed for anything randomized")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("compose-mask", help="saliency + labels -> inpainting mask")
    p.add_argument("--labels", required=True)
    p.add_argument("--saliency", required=True)
    p.add_argument("--gamma", type=gamma_flag, default=None)
    p.add_argument("--dilate", type=int, default=None, metavar="RADIUS")
    p.add_argument("--levels", default=None, help="semantic level spec JSON")
    p.add_argument("--out", required=True, help="output mask PNG")

    p = sub.add_parser("inpaint", help="full pipeline or direct mask inpainting")
    p.add_argument("--image", required=True)
    p.add_argument("--mask", help="use this mask instead of composing one")
    p.add_argument("--labels")
    p.add_argument("--saliency")
    p.add_argument("--gamma", type=gamma_flag, default=None)
    p.add_argument("--dilate", type=int, default=None)
    p.add_argument("--levels", default=None)
    p.add_argument("--weights", default=None, help="weight container (manifest or dir), "
                                                   "or 'fallback' for diffusion")
    p.add_argument("--no-fallback", action="store_true", help="fail instead of diffusing")
    p.add_argument("--attn-before")
    p.add_argument("--attn-after")
    p.add_argument("--out", required=True, help="output image PNG")
    p.add_argument("--mask-out", help="also write the composed mask here")
    p.add_argument("--record-out", help="append the JSON metrics record to this file")
    p.add_argument("--image-id", default=None)

    p = sub.add_parser("metrics", help="compare a candidate image against a reference")
    p.add_argument("--ref", required=True)
    p.add_argument("--cand", required=True)
    p.add_argument("--image-id", default=None)

    p = sub.add_parser("attention-delta", help="attention change between two maps")
    p.add_argument("--before", required=True)
    p.add_argument("--after", required=True)
    p.add_argument("--labels", required=True, help="label map providing the interest region")
    p.add_argument("--mask", required=True, help="edited-region mask (distracting region)")
    p.add_argument("--levels", default=None)

    p = sub.add_parser("classify-canyon", help="street aspect ratio bucket")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--alpha", type=float)
    source.add_argument("--labels")
    p.add_argument("--levels", default=None)

    p = sub.add_parser("insert-objects", help="paste cutouts for ground-truth evaluation")
    p.add_argument("--base", required=True)
    p.add_argument(
        "--cutout",
        action="append",
        default=[],
        metavar="IMG:MASK:ROW:COL",
        help="cutout image, its mask, and the top-left placement (repeatable)",
    )
    p.add_argument("--out-image", required=True)
    p.add_argument("--out-mask", required=True)

    p = sub.add_parser("serve", help="run the wayfinding study HTTP service")
    p.add_argument("--store", required=True, help="study log directory")
    p.add_argument("--images", required=True, help="trial image directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)

    p = sub.add_parser("report", help="aggregate metrics JSONL or summarize a study")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--metrics", help="metrics JSONL file")
    source.add_argument("--study", help="study id in --store")
    p.add_argument("--store", help="study log directory (with --study)")
    p.add_argument("--hits-only", action="store_true")

    return parser


def load_config(args: argparse.Namespace) -> PipelineConfig:
    doc = {}
    if args.config is not None:
        doc = json.loads(Path(resolve_data_path(args.config)).read_text("utf-8"))

    def pick(flag, key, default):
        if flag is not None:
            return flag
        return doc.get(key, default)

    weights = pick(getattr(args, "weights", None), "weights", None)
    if weights in ("fallback", ""):
        weights = None
    return PipelineConfig(
        gamma=float(pick(getattr(args, "gamma", None), "gamma", 0.8)),
        dilation_radius=int(pick(getattr(args, "dilate", None), "dilation_radius", 0)),
        level_spec_path=pick(getattr(args, "levels", None), "levels", None),
        weights_path=Path(weights) if weights else None,
        allow_fallback=not getattr(args, "no_fallback", False)
        and bool(doc.get("allow_fallback", True)),
        diffusion_tol=float(doc.get("diffusion_tol", 1e-6)),
        diffusion_max_iters=int(doc.get("diffusion_max_iters", 20000)),
        seed=args.seed,
    )


def cmd_compose_mask(args) -> int:
    config = load_config(args)
    labels = read_raster(args.labels, "label")
    saliency = read_raster(args.saliency, "scalar")
    salient = binarize_saliency(saliency, config.gamma)
    partition = classify_levels(labels, config.level_spec())
    mask = compose_inpaint_mask(salient, partition)
    if config.dilation_radius > 0:
        mask = dilate_mask(mask, config.dilation_radius)
    write_atomic(resolve_data_path(args.out), encode_raster(mask))
    print(dump_record({"mask_pixels": mask.count(), "out": str(args.out)}))
    return EX_OK


def cmd_inpaint(args) -> int:
    config = load_config(args)
    image = read_raster(args.image, "rgb")
    image_id = args.image_id or Path(args.image).stem

    if args.mask:
        mask = read_raster(args.mask, "mask")
        result = inpaint_with_mask(config, image, mask, image_id=image_id)
        output, record = result.output, result.record
    else:
        if not args.labels or not args.saliency:
            raise UsageError("inpaint needs either --mask or both --labels and --saliency")
        labels = read_raster(args.labels, "label")
        saliency = read_raster(args.saliency, "scalar")
        attn_before = read_raster(args.attn_before, "scalar") if args.attn_before else None
        attn_after = read_raster(args.attn_after, "scalar") if args.attn_after else None
        result = run_pipeline(
            config, image, labels, saliency, attn_before, attn_after, image_id=image_id
        )
        output, mask, record = result.output, result.mask, result.record
        if args.mask_out:
            write_atomic(resolve_data_path(args.mask_out), encode_raster(mask))

    write_atomic(resolve_data_path(args.out), encode_raster(output))
    line = dump_record(record)
    if args.record_out:
        path = Path(resolve_data_path(args.record_out))
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
    print(line)
    return EX_OK


def cmd_metrics(args) -> int:
    ref = read_raster(args.ref, "rgb")
    cand = read_raster(args.cand, "rgb")
    q = compute_quality(ref, cand)
    record = {
        "image_id": args.image_id or Path(args.cand).stem,
        "l1": q.l1,
        "psnr_db": q.psnr_db,
        "ssim": q.ssim,
        "v_o": None,
        "v_d": None,
    }
    print(dump_record(record))
    return EX_OK


def cmd_attention_delta(args) -> int:
    config = load_config(args)
    before = read_raster(args.before, "scalar")
    after = read_raster(args.after, "scalar")
    labels = read_raster(args.labels, "label")
    mask = read_raster(args.mask, "mask")
    partition = classify_levels(labels, config.level_spec())
    delta = attention_delta(before, after, partition.building, mask.bits)
    print(dump_record({"v_o": delta.v_o, "v_d": delta.v_d}))
    return EX_OK


def cmd_classify_canyon(args) -> int:
    config = load_config(args)
    if args.alpha is not None:
        alpha = args.alpha
        if alpha < 0:
            raise UsageError("alpha must be >= 0")
    else:
        alpha = estimate_aspect_ratio(read_raster(args.labels, "label"), config.level_spec())
    result = classify_canyon(alpha)
    print(dump_record({"alpha": result.alpha, "bucket": result.bucket,
                       "interval": result.interval}))
    return EX_OK


def cmd_insert_objects(args) -> int:
    base = read_raster(args.base, "rgb")
    placements = []
    for spec in args.cutout:
        parts = spec.rsplit(":", 3)
        if len(parts) != 4:
            raise UsageError(f"--cutout expects IMG:MASK:ROW:COL, got {spec!r}")
        img_path, mask_path, row, col = parts
        placements.append(
            (
                read_raster(img_path, "rgb"),
                read_raster(mask_path, "mask"),
                (int(row), int(col)),
            )
        )
    composite, footprint = insert_objects(base, placements)
    write_atomic(resolve_data_path(args.out_image), encode_raster(composite))
    write_atomic(resolve_data_path(args.out_mask), encode_raster(footprint))
    print(dump_record({"cutouts": len(placements), "mask_pixels": footprint.count()}))
    return EX_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .study.service import create_app
    from .study.store import StudyStore

    store = StudyStore(resolve_data_path(args.store))
    app = create_app(store, resolve_data_path(args.images))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EX_OK


def cmd_report(args) -> int:
    if args.metrics:
        records = []
        with open(resolve_data_path(args.metrics), encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
        if not records:
            raise WayclearError(f"no records in {args.metrics}")
        numeric = ("l1", "psnr_db", "ssim", "v_o", "v_d")
        means = {}
        for key in numeric:
            values = [r[key] for r in records if isinstance(r.get(key), (int, float))]
            means[key] = sum(values) / len(values) if values else None
        print(dump_record({"count": len(records), "mean": means,
                           "aggregation": "arithmetic mean of per-image values"}))
        return EX_OK
    if not args.store:
        raise UsageError("--study requires --store")
    from .study.store import StudyStore

    store = StudyStore(resolve_data_path(args.store))
    report = store.summarize(args.study, hits_only=args.hits_only)
    print(json.dumps(report.to_dict(), sort_keys=True, indent=1))
    return EX_OK


_COMMANDS = {
    "compose-mask": cmd_compose_mask,
    "inpaint": cmd_inpaint,
    "metrics": cmd_metrics,
    "attention-delta": cmd_attention_delta,
    "classify-canyon": cmd_classify_canyon,
    "insert-objects": cmd_insert_objects,
    "serve": cmd_serve,
    "report": cmd_report,
}


def run_command(argv: list[str]) -> int:
    parser = build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help and argparse's own exits
            return int(exc.code or 0)
        if args.command is None:
            raise UsageError(parser.format_usage())
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EX_USAGE
    except DimensionMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_DIMENSIONS
    except WeightsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_WEIGHTS
    except RasterDecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_RASTER
    except (WayclearError, StudyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_SOFTWARE


def main() -> None:
    raise SystemExit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
