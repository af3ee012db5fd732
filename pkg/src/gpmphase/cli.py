"""Command-line front end.

Subcommands: ``retrieve``, ``simulate``, ``filters``, ``analyze`` (with
actions ``kernel``, ``signature``, ``validity``, ``profile``, ``diff``) and
``replay``.  Every run that writes files also writes
``<first output>.manifest.json``.

Exit codes: 0 ok, 2 usage, 3 I/O, 4 physics-domain, 5 numerical.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    difference_map,
    gpm_distance_band,
    laplacian_5pt,
    laplacian_signature_residual,
    line_profile,
    pearson,
    validity_report,
)
from .core import (
    ClampOverflowError,
    ParameterError,
    PhysicalConfig,
    SingularFilterError,
    wavelength_from_energy,
)
from .deconv import estimate_kernel_rl, radial_profile
from .filters import FilterSpec, build_filter_grid, filter_ratio, gpm_filter, pm_filter
from .fresnel import simulate_pbi
from .io import read_image, write_csv, write_tiff
from .phantom import RNG_ALGORITHM, parse_phantom
from .retrieval import RetrievalOptions, retrieve_thickness, unsharp_combination

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_PHYSICS, EXIT_NUMERIC = 0, 2, 3, 4, 5

_SI = {
    "": 1.0, "m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "µm": 1e-6,
    "nm": 1e-9, "pm": 1e-12, "a": 1e-10,
}
_LENGTH_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([a-zA-Zµ]*)\s*$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # report bad usage on the same single error line as every other failure
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_length(text) -> float:
    """Length in metres from ``"10um"``, ``"0.1m"``, ``"0.5A"`` or a bare number."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _LENGTH_RE.match(str(text))
    unit = m.group(2).lower() if m else None
    if not m or unit not in _SI:
        raise argparse.ArgumentTypeError(f"cannot parse length {text!r}")
    return float(m.group(1)) * _SI[unit]


def _float_list(text):
    return [float(v) for v in str(text).split(",") if v.strip()]


def _shape(text):
    parts = [int(v) for v in re.split(r"[x,]", str(text)) if v.strip()]
    if len(parts) not in (2, 3):
        raise argparse.ArgumentTypeError("shape must be N1xN2 or PxN1xN2")
    return tuple(parts)


def read_config(path) -> dict:
    """Plain-text ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition("=")
            if not eq:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


# ---------------------------------------------------------------- physics flags


def _add_physics(p):
    g = p.add_argument_group("physics")
    g.add_argument("--energy-kev", type=float)
    g.add_argument("--wavelength-m", type=parse_length)
    g.add_argument("--delta", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--delta-beta-ratio", type=float)
    g.add_argument("--mu", type=float, help="linear attenuation coefficient (1/m)")
    g.add_argument("--distance-m", type=parse_length)
    g.add_argument("--pixel-m", type=parse_length)
    g.add_argument("--incident-intensity", type=float, default=1.0)


def physical_config(args) -> PhysicalConfig:
    if (args.energy_kev is None) == (args.wavelength_m is None):
        raise UsageError("give exactly one of --energy-kev and --wavelength-m")
    wavelength = (
        wavelength_from_energy(args.energy_kev * 1e3) if args.energy_kev is not None else args.wavelength_m
    )
    direct = args.delta is not None or args.beta is not None
    ratio = args.delta_beta_ratio is not None or args.mu is not None
    if direct == ratio:
        raise UsageError("give exactly one of (--delta, --beta) or (--delta-beta-ratio, --mu)")
    if direct:
        if args.delta is None or args.beta is None:
            raise UsageError("--delta and --beta must be given together")
        delta, beta = args.delta, args.beta
    else:
        if args.delta_beta_ratio is None or args.mu is None:
            raise UsageError("--delta-beta-ratio and --mu must be given together")
        beta = args.mu * wavelength / (4 * np.pi)
        delta = args.delta_beta_ratio * beta
    if args.distance_m is None or args.pixel_m is None:
        raise UsageError("--distance-m and --pixel-m are required")
    return PhysicalConfig(wavelength, delta, beta, args.distance_m, args.pixel_m, args.incident_intensity)


def filter_spec(args, method=None) -> FilterSpec:
    method = (method or args.method).replace("-", "_")
    return FilterSpec(
        method,
        tau=args.tau,
        c=args.anka_c,
        sigma_m=args.anka_sigma_m,
        source_blur_m=args.source_blur_m,
    )


# ---------------------------------------------------------------- subcommands


def run_retrieve(args, manifest):
    cfg = physical_config(args)
    shape = tuple(args.shape) if args.shape else None
    stack = read_image(args.input, shape)
    flat = None
    if args.flat is not None:
        try:
            flat = float(args.flat)
        except ValueError:
            flat = read_image(args.flat, shape[-2:] if shape else None)
    opts = RetrievalOptions(flat_field=flat, pad=args.pad)
    single = stack.ndim == 2
    frames = stack[None] if single else stack

    def one(frame):
        if args.unsharp_s is not None:
            t_pm = retrieve_thickness(frame, cfg, _with_spec(opts, filter_spec(args, "pm")))
            t_gpm = retrieve_thickness(frame, cfg, _with_spec(opts, filter_spec(args, "gpm")))
            return unsharp_combination(t_pm, t_gpm, args.unsharp_s), 0
        t, info = retrieve_thickness(frame, cfg, _with_spec(opts, filter_spec(args)), full_output=True)
        return t, info["n_clamped"]

    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        results = list(pool.map(one, frames))
    out = np.stack([r[0] for r in results])
    if args.normalize_t0:
        out = out / args.normalize_t0
    write_tiff(args.output, out[0] if single else out)
    manifest["outputs"] = [str(args.output)]
    manifest["physics"] = _cfg_dict(cfg)
    manifest["clamped_pixels"] = [r[1] for r in results]


def _with_spec(opts, spec):
    return dataclasses.replace(opts, spec=spec)


def _cfg_dict(cfg):
    d = dict(cfg.__dict__)
    d.update(k=cfg.k, mu=cfg.mu, alpha=cfg.alpha, upsilon=cfg.upsilon)
    return d


def run_simulate(args, manifest):
    cfg = physical_config(args)
    src = args.phantom
    if Path(src).exists():
        phantom, meta = read_image(src), {"kind": "file", "path": src}
    else:
        phantom, meta = parse_phantom(src, (args.size, args.size), args.thickness_m)
    intensity = simulate_pbi(phantom, cfg, args.oversample)
    write_tiff(args.output_intensity, intensity)
    outputs = [str(args.output_intensity)]
    if args.output_ground_truth:
        write_tiff(args.output_ground_truth, phantom)
        outputs.append(str(args.output_ground_truth))
    manifest.update(outputs=outputs, phantom=meta, physics=_cfg_dict(cfg))
    if "seed" in meta:
        manifest["rng"] = {"algorithm": RNG_ALGORITHM, "seed": meta["seed"]}


def run_filters(args, manifest):
    outputs = []
    if args.curve_1d:
        wk = np.linspace(0.0, np.pi, args.points)
        rows = []
        for u in args.upsilon:
            pm = pm_filter(wk, 0.0, u)
            gpm = gpm_filter(wk, 0.0, u, 1.0)
            ratio = filter_ratio(wk, 0.0, u, 1.0)
            rows += [(u, a, b, c, d) for a, b, c, d in zip(wk, pm, gpm, ratio)]
        write_csv(args.curve_1d, ["upsilon", "Wk", "P_PM", "P_GPM", "ratio"], rows)
        outputs.append(str(args.curve_1d))
    if args.grid_2d:
        n = args.size
        for u in args.upsilon:
            cfg = _unit_config(u)
            for kind in ("pm", "gpm"):
                path = f"{args.grid_2d}_{kind}_U{u:g}.tif"
                write_tiff(path, np.fft.fftshift(build_filter_grid(FilterSpec(kind), cfg, n, n)))
                outputs.append(path)
    if not outputs:
        raise UsageError("nothing to do: give --curve-1d and/or --grid-2d")
    manifest["outputs"] = outputs


def _unit_config(upsilon):
    """Config with W = 1 and alpha = upsilon (only alpha and W matter for filters)."""
    if upsilon == 0:
        return PhysicalConfig(1.0, 0.0, 1.0, 1.0, 1.0)
    mu = 2 * (2 * np.pi) * 1.0
    return PhysicalConfig(1.0, upsilon * mu, 1.0, 1.0, 1.0)


def run_analyze(args, manifest):
    action = args.action
    report = {}
    outputs = []
    if action == "kernel":
        original = read_image(args.original)
        recon = read_image(args.reconstructed)
        est = estimate_kernel_rl(original, recon, args.size, args.iters, args.pixel_m)
        report = {
            "sigma_est": est.sigma_est,
            "fwhm": est.fwhm,
            "iterations_run": est.iterations_run,
            "diverged": est.diverged,
            "peak": float(est.kernel.max()),
        }
        if args.output:
            write_tiff(args.output, est.kernel)
            outputs.append(str(args.output))
        if args.profile_csv:
            r, v = radial_profile(est.kernel)
            write_csv(args.profile_csv, ["radius_px", "value"], zip(r, v))
            outputs.append(str(args.profile_csv))
    elif action == "signature":
        f = read_image(args.input)
        report = {"residual": laplacian_signature_residual(f, args.sigma1, args.sigma2)}
    elif action == "validity":
        rep = validity_report(
            args.delta_beta, _fresnel(args), args.aleph, args.tie_threshold, args.round_factor
        )
        report = dict(rep.__dict__)
        if args.wavelength_m and args.length_m:
            lo, hi = gpm_distance_band(
                args.delta_beta, args.wavelength_m, args.length_m, args.aleph, args.round_factor
            )
            report["distance_band_m"] = [lo, hi]
    elif action == "profile":
        img = read_image(args.input)
        if args.row is not None:
            pos, val = line_profile(img, args.row)
        else:
            if not (args.start and args.end):
                raise UsageError("profile needs --row or both --start and --end")
            pos, val = line_profile(img, start=_float_list(args.start), end=_float_list(args.end))
        write_csv(args.output, ["position", "value"], zip(pos, val))
        outputs.append(str(args.output))
    elif action == "diff":
        a, b = read_image(args.a), read_image(args.b)
        d = difference_map(a, b)
        write_tiff(args.output, d)
        outputs.append(str(args.output))
        report = {"pearson_vs_laplacian_of_b": pearson(d, laplacian_5pt(b))}
    manifest["outputs"] = outputs
    # strict JSON has no NaN
    report = {k: (None if isinstance(v, float) and not np.isfinite(v) else v) for k, v in report.items()}
    manifest["report"] = report
    print(json.dumps(report, sort_keys=True))


def _fresnel(args):
    if args.fresnel_number is not None:
        return args.fresnel_number
    if args.wavelength_m and args.length_m and args.distance_m:
        return args.length_m**2 / (args.wavelength_m * args.distance_m)
    raise UsageError("validity needs --fresnel-number or --wavelength-m, --length-m and --distance-m")


def run_replay(args, manifest):
    with open(args.manifest, encoding="utf-8") as fh:
        previous = json.load(fh)
    here = os.getcwd()
    os.chdir(previous.get("cwd", here))
    try:
        return main(previous["argv"])
    finally:
        os.chdir(here)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gpmphase", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key=value file; command-line flags take precedence")
        sp.add_argument("--no-manifest", action="store_true")

    r = sub.add_parser("retrieve", help="projected thickness from a phase-contrast image")
    common(r)
    r.add_argument("--input", required=True)
    r.add_argument("--shape", type=_shape, help="dimensions for raw float32 input, e.g. 256x256")
    r.add_argument("--flat", help="flat-field image path or scalar I0")
    _add_physics(r)
    r.add_argument("--method", choices=["pm", "gpm", "tunable", "anka", "anka-revised"], default="gpm")
    r.add_argument("--tau", type=float, default=1.0)
    r.add_argument("--anka-c", type=float, default=1.0)
    r.add_argument("--anka-sigma-m", type=parse_length, default=0.0)
    r.add_argument("--source-blur-m", type=parse_length, default=0.0)
    r.add_argument("--unsharp-s", type=float, help="output T_PM + s (T_GPM - T_PM)")
    r.add_argument("--pad", type=int, default=0)
    r.add_argument("--normalize-t0", type=parse_length, help="divide the output by this thickness")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--output", required=True)

    s = sub.add_parser("simulate", help="simulated propagation-based phase-contrast image")
    common(s)
    s.add_argument("--phantom", default="binary:seed=0,fill=0.5", help="file or inline spec")
    s.add_argument("--size", type=int, default=256)
    s.add_argument("--thickness-m", type=parse_length, default=40e-6)
    _add_physics(s)
    s.add_argument("--oversample", type=int, default=2)
    s.add_argument("--output-intensity", required=True)
    s.add_argument("--output-ground-truth")

    f = sub.add_parser("filters", help="tabulate PM/GPM filters")
    common(f)
    f.add_argument("--upsilon", type=_float_list, default=[0.01, 0.1, 1.0, 10.0])
    f.add_argument("--curve-1d", help="CSV of cross-sections along W kx with ky = 0")
    f.add_argument("--points", type=int, default=257)
    f.add_argument("--grid-2d", help="prefix for centred 2-D filter TIFFs")
    f.add_argument("--size", type=int, default=256)

    a = sub.add_parser("analyze", help="kernel, signature, validity, profile and diff tools")
    a_sub = a.add_subparsers(dest="action", required=True)
    k = a_sub.add_parser("kernel")
    common(k)
    k.add_argument("--original", required=True)
    k.add_argument("--reconstructed", required=True)
    k.add_argument("--size", type=int, default=15)
    k.add_argument("--iters", type=int, default=100)
    k.add_argument("--pixel-m", type=parse_length, default=1.0)
    k.add_argument("--output", help="kernel TIFF")
    k.add_argument("--profile-csv")
    sg = a_sub.add_parser("signature")
    common(sg)
    sg.add_argument("--input", required=True)
    sg.add_argument("--sigma1", type=float, default=0.5, help="pixels")
    sg.add_argument("--sigma2", type=float, default=1.0, help="pixels")
    v = a_sub.add_parser("validity")
    common(v)
    v.add_argument("--delta-beta", type=float, required=True)
    v.add_argument("--fresnel-number", type=float)
    v.add_argument("--wavelength-m", type=parse_length)
    v.add_argument("--length-m", type=parse_length, help="characteristic length, e.g. pixel width")
    v.add_argument("--distance-m", type=parse_length)
    v.add_argument("--aleph", type=float, default=0.1)
    v.add_argument("--tie-threshold", type=float, default=10.0)
    v.add_argument("--round-factor", action="store_true")
    pr = a_sub.add_parser("profile")
    common(pr)
    pr.add_argument("--input", required=True)
    pr.add_argument("--row", type=int)
    pr.add_argument("--start", help="m,n")
    pr.add_argument("--end", help="m,n")
    pr.add_argument("--output", required=True)
    d = a_sub.add_parser("diff")
    common(d)
    d.add_argument("--a", required=True)
    d.add_argument("--b", required=True)
    d.add_argument("--output", required=True)

    rp = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    rp.add_argument("manifest")
    rp.add_argument("--config")
    rp.add_argument("--no-manifest", action="store_true")
    return p


_RUNNERS = {
    "retrieve": run_retrieve,
    "simulate": run_simulate,
    "filters": run_filters,
    "analyze": run_analyze,
    "replay": run_replay,
}


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        values = read_config(args.config)
        # re-parse so flags override the file and argparse converts the strings
        _set_defaults_recursive(parser, values)
        args = parser.parse_args(argv)
    return args


def _set_defaults_recursive(parser, values):
    known = {a.dest for a in parser._actions}
    parser.set_defaults(**{k: v for k, v in values.items() if k in known})
    for a in parser._actions:
        if isinstance(a, argparse._SubParsersAction):
            for child in a.choices.values():
                _set_defaults_recursive(child, values)


def _fail(code, exc):
    msg = str(exc).replace("\n", " ")
    print(f"gpmphase: error code={code} kind={type(exc).__name__} msg={msg}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    except UsageError as exc:
        return _fail(EXIT_USAGE, exc)
    except OSError as exc:
        return _fail(EXIT_IO, exc)

    manifest = {
        "tool": "gpmphase",
        "version": __version__,
        "argv": argv,
        "cwd": os.getcwd(),
        "command": args.command,
        "config": {k: v for k, v in vars(args).items() if _jsonable(v)},
    }
    start = time.perf_counter()
    try:
        rc = _RUNNERS[args.command](args, manifest)
    except UsageError as exc:
        return _fail(EXIT_USAGE, exc)
    except argparse.ArgumentTypeError as exc:
        return _fail(EXIT_USAGE, exc)
    except OSError as exc:
        return _fail(EXIT_IO, exc)
    except ParameterError as exc:
        return _fail(EXIT_PHYSICS, exc)
    except (SingularFilterError, ClampOverflowError) as exc:
        return _fail(EXIT_NUMERIC, exc)
    if args.command == "replay":
        return rc
    manifest["wall_time_s"] = time.perf_counter() - start
    outputs = manifest.get("outputs") or []
    if outputs and not args.no_manifest:
        with open(f"{outputs[0]}.manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True, default=_to_json)
    return EXIT_OK


def _jsonable(v):
    return v is None or isinstance(v, (str, int, float, bool, list, tuple))


def _to_json(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


if __name__ == "__main__":
    sys.exit(main())
