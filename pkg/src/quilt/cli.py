"""Command line front end: synth, transfer, sweep, compare.

Exit codes: 0 success, 2 usage errors and invalid configuration, 1
anything that failed at runtime (I/O, undecodable images, failed rows).
Diagnostics go to stderr; stdout carries only results (run directories).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import InvalidConfigError, QuiltError
from .experiment import (
    DEFAULT_PATCH_SIZES,
    SweepSpec,
    load_manifest,
    run_comparison,
    run_sweep,
)
from .metrics import GRADIENT_THRESHOLD
from .quilting import TransferConfig, synthesize
from .raster import load_image, save_image
from .transfer import TransferJob, transfer

THREADS_ENV = "QUILT_THREADS"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quilt",
        description="Patch-splicing texture synthesis and style transfer.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="grow a texture from a style image")
    synth.add_argument("--style", required=True, help="source texture (PNG or PPM)")
    synth.add_argument("--out", required=True, help="output image path (.png or .ppm)")
    synth.add_argument("--width", type=int, required=True, help="output width in pixels")
    synth.add_argument("--height", type=int, required=True, help="output height in pixels")
    _add_block_args(synth)
    synth.add_argument("--debug-seams", action="store_true",
                       help="save per-block seam visualizations next to the output")

    tr = sub.add_parser("transfer", help="restyle a content image with a style image")
    tr.add_argument("--content", required=True, help="content image (PNG or PPM)")
    tr.add_argument("--style", required=True, help="style image (PNG or PPM)")
    tr.add_argument("--out", required=True, help="output image path (.png or .ppm)")
    tr.add_argument("--width", type=int, default=None,
                    help="output width (default: content width)")
    tr.add_argument("--height", type=int, default=None,
                    help="output height (default: content height)")
    _add_block_args(tr)
    _add_alpha_arg(tr)
    tr.add_argument("--debug-seams", action="store_true",
                    help="save per-block seam visualizations next to the output")

    sweep = sub.add_parser("sweep", help="run one transfer per patch size")
    sweep.add_argument("--content", required=True)
    sweep.add_argument("--style", required=True)
    sweep.add_argument("--out-dir", required=True, help="root for run directories")
    sweep.add_argument("--sizes", default=",".join(str(s) for s in DEFAULT_PATCH_SIZES),
                       help="comma-separated strictly increasing patch sizes "
                            f"(default: {','.join(str(s) for s in DEFAULT_PATCH_SIZES)})")
    sweep.add_argument("--overlap", type=int, default=None,
                       help="overlap width in pixels (default: round(patch_size/6), at least 1)")
    sweep.add_argument("--tolerance", type=float, default=0.1,
                       help="candidate error tolerance (default: 0.1)")
    _add_alpha_arg(sweep)
    sweep.add_argument("--seed", type=int, default=42, help="RNG seed (default: 42)")
    sweep.add_argument("--grad-threshold", type=float, default=GRADIENT_THRESHOLD,
                       help=f"structure metric gradient threshold (default: {GRADIENT_THRESHOLD})")
    sweep.add_argument("--threads", type=int, default=None,
                       help=f"worker threads (default: ${THREADS_ENV} or machine parallelism)")

    cmp_ = sub.add_parser("compare", help="run a manifest of pairs and score the results")
    cmp_.add_argument("--manifest", required=True,
                      help="CSV manifest with header content,style,external")
    cmp_.add_argument("--out-dir", required=True, help="root for run directories")
    _add_block_args(cmp_)
    _add_alpha_arg(cmp_)
    cmp_.add_argument("--grad-threshold", type=float, default=GRADIENT_THRESHOLD,
                      help=f"structure metric gradient threshold (default: {GRADIENT_THRESHOLD})")
    return parser


def _add_block_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--patch-size", type=int, required=True, help="block edge length in pixels")
    p.add_argument("--overlap", type=int, default=None,
                   help="overlap width in pixels (default: round(patch_size/6), at least 1)")
    p.add_argument("--tolerance", type=float, default=0.1,
                   help="candidate error tolerance (default: 0.1)")
    p.add_argument("--seed", type=int, default=42, help="RNG seed (default: 42)")
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker threads (default: ${THREADS_ENV} or machine parallelism)")


def _add_alpha_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.8,
                   help="overlap weight versus content guidance, in [0, 1] (default: 0.8)")


def _resolve_threads(value) -> int:
    if value is None:
        env = os.environ.get(THREADS_ENV)
        if env is not None:
            try:
                value = int(env)
            except ValueError:
                raise InvalidConfigError(
                    f"{THREADS_ENV} must be an integer, got {env!r}"
                ) from None
        else:
            value = os.cpu_count() or 1
    if value < 1:
        raise InvalidConfigError(f"thread count must be >= 1, got {value}")
    return value


def _save_format(path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".png":
        return "png"
    if suffix == ".ppm":
        return "ppm"
    raise InvalidConfigError(f"cannot infer image format from {path!r}; use .png or .ppm")


def _parse_sizes(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise InvalidConfigError(f"--sizes must be comma-separated integers, got {text!r}") from None
    return sizes


def _debug_dir(out_path) -> Path:
    out = Path(out_path)
    return out.with_name(out.stem + "_seams")


def run(argv) -> int:
    """Parse argv (without the program name) and execute. Returns the exit code."""
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage / help
        code = exc.code
        return code if isinstance(code, int) else (0 if code is None else 2)
    try:
        return _dispatch(ns)
    except InvalidConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QuiltError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(ns: argparse.Namespace) -> int:
    threads = _resolve_threads(ns.threads) if hasattr(ns, "threads") else 1

    if ns.command == "synth":
        fmt = _save_format(ns.out)
        cfg = TransferConfig(
            patch_size=ns.patch_size, out_width=ns.width, out_height=ns.height,
            overlap=ns.overlap, tolerance=ns.tolerance, seed=ns.seed,
        )
        style = load_image(ns.style)
        debug = _debug_dir(ns.out) if ns.debug_seams else None
        out = synthesize(style, cfg, threads=threads, debug_dir=debug)
        save_image(out, ns.out, fmt)
        return 0

    if ns.command == "transfer":
        fmt = _save_format(ns.out)
        cfg = TransferConfig(
            patch_size=ns.patch_size, out_width=ns.width, out_height=ns.height,
            overlap=ns.overlap, tolerance=ns.tolerance, alpha=ns.alpha, seed=ns.seed,
        )
        content = load_image(ns.content)
        style = load_image(ns.style)
        job = TransferJob.create(content, style, cfg)
        debug = _debug_dir(ns.out) if ns.debug_seams else None
        out = transfer(job, threads=threads, debug_dir=debug)
        save_image(out, ns.out, fmt)
        return 0

    if ns.command == "sweep":
        sizes = _parse_sizes(ns.sizes)
        base = TransferConfig(
            patch_size=sizes[0] if sizes else 2, overlap=ns.overlap,
            tolerance=ns.tolerance, alpha=ns.alpha, seed=ns.seed,
        )
        spec = SweepSpec(content=Path(ns.content), style=Path(ns.style),
                         patch_sizes=sizes, base_cfg=base)
        _, run_dir = run_sweep(spec, ns.out_dir, threads=threads,
                               grad_threshold=ns.grad_threshold)
        print(run_dir)
        return 0

    if ns.command == "compare":
        manifest = load_manifest(ns.manifest)
        cfg = TransferConfig(
            patch_size=ns.patch_size, overlap=ns.overlap, tolerance=ns.tolerance,
            alpha=ns.alpha, seed=ns.seed,
        )
        _, failures, run_dir = run_comparison(manifest, cfg, ns.out_dir,
                                              threads=threads,
                                              grad_threshold=ns.grad_threshold)
        for failure in failures:
            print(f"row {failure.index} failed: {failure.reason}", file=sys.stderr)
        print(run_dir)
        return 1 if failures else 0

    raise AssertionError(f"unhandled command {ns.command!r}")


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
