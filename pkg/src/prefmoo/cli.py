"""Command-line front door: reference-point files, batch runs, metrics, serving.

Subcommands: gen-refs, map-refs, run, rmetric, serve. Exit codes: 0 success,
2 validation failure, 3 runtime failure. The PREFMOO_THREADS environment
variable caps the per-seed worker pool of `run`.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import glob as globmod
import hashlib
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import PrefmooError, ValidationError
from .lattice import (
    ReferenceSet,
    generate_das_dennis,
    generate_multilayer,
    lattice_point_count,
    read_dat,
    write_dat,
)
from .mapping import RoiSpec, map_multi_roi, map_multilayer, map_reference_set
from .metrics import RMetricConfig, r_hv, r_igd
from .optimizer import NeighborhoodParams, OperatorParams, population_to_csv
from .optimizer import run as run_optimizer
from .problems import make_problem, sample_pf

RUN_CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["problem", "m", "generations", "seeds", "reference", "output_dir"],
    "properties": {
        "problem": {"enum": ["ZDT1", "DTLZ1", "DTLZ2", "DTLZ3", "DTLZ4"]},
        "m": {"type": "integer", "minimum": 2},
        "n": {"type": "integer", "minimum": 2},
        "generations": {"type": "integer", "minimum": 0},
        "seeds": {
            "type": "array",
            "items": {"type": "integer", "minimum": 0},
            "minItems": 1,
        },
        "reference": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "source": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["h"],
                    "properties": {
                        "h": {"type": "integer", "minimum": 1},
                        "layers": {"type": "integer", "minimum": 1},
                    },
                },
                "file": {"type": "string"},
                "roi": {"$ref": "#/$defs/roi"},
                "rois": {
                    "type": "array",
                    "items": {"$ref": "#/$defs/roi"},
                    "minItems": 1,
                },
                "tau_per_layer": {
                    "type": "array",
                    "items": {
                        "oneOf": [
                            {"type": "number"},
                            {"const": "unshifted"},
                            {"type": "null"},
                        ]
                    },
                },
            },
        },
        "operators": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "pc": {"type": "number", "minimum": 0, "maximum": 1},
                "eta_c": {"type": "number", "exclusiveMinimum": 0},
                "pm": {"type": ["number", "null"], "minimum": 0, "maximum": 1},
                "eta_m": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "neighborhood": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "size": {"type": "integer", "minimum": 1},
                "delta": {"type": "number", "minimum": 0, "maximum": 1},
            },
        },
        "output_dir": {"type": "string"},
    },
    "$defs": {
        "roi": {
            "type": "object",
            "additionalProperties": False,
            "required": ["z_r", "tau"],
            "properties": {
                "z_r": {"type": "array", "items": {"type": "number"}, "minItems": 2},
                "tau": {"type": "number"},
                "keep_boundary": {"type": "boolean"},
            },
        }
    },
}


def validate_run_config(config: dict) -> None:
    import jsonschema

    validator = jsonschema.Draft202012Validator(RUN_CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(config), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        pointer = "/" + "/".join(str(p) for p in e.absolute_path)
        raise ValidationError(f"config error at {pointer}: {e.message}", pointer=pointer)


def _load_roi(text: str) -> RoiSpec:
    """Accept an inline JSON object or a path to a JSON file."""
    text = text.strip()
    if not text.startswith("{"):
        text = Path(text).read_text(encoding="utf-8")
    return RoiSpec.from_json(text)


def build_reference(
    m: int,
    h: int | None,
    layers: int,
    in_path: str | None,
    rois: list[RoiSpec],
    tau_per_layer: list | None,
) -> ReferenceSet:
    """Shared reference-set construction for map-refs and run."""
    if in_path is not None:
        pts = read_dat(in_path)
        if pts.size == 0:
            raise ValidationError(f"{in_path} contains no points")
        m = pts.shape[1]
        if h is not None and rois:
            expected = lattice_point_count(m, h)
            if pts.shape[0] != expected:
                raise ValidationError(
                    f"{in_path} has {pts.shape[0]} points but the full lattice "
                    f"for m={m}, H={h} has {expected}; check --h"
                )
        base = ReferenceSet(points=pts, m=m, H=h)
    else:
        if h is None:
            raise ValidationError("either an input file or --m/--h is required")
        base = None

    if layers > 1:
        if len(rois) != 1:
            raise ValidationError("multi-layer mapping takes exactly one ROI")
        layer_sets = generate_multilayer(m, h, layers)
        taus = tau_per_layer
        if taus is None:
            raise ValidationError("--tau-per-layer is required when layers > 1")
        return map_multilayer(layer_sets, rois[0], taus)

    if base is None:
        base = generate_das_dennis(m, h)
    if not rois:
        return base
    if len(rois) == 1:
        return map_reference_set(base, rois[0])
    return map_multi_roi(base, rois)


def cmd_gen_refs(args) -> int:
    if args.layers > 1:
        layers = generate_multilayer(args.m, args.h, args.layers)
        pts = np.vstack([layer.points for layer in layers])
    else:
        pts = generate_das_dennis(args.m, args.h).points
    write_dat(pts, args.out)
    print(f"{pts.shape[0]} points -> {args.out}")
    return 0


def cmd_map_refs(args) -> int:
    rois = [_load_roi(r) for r in args.roi or []]
    if not rois:
        raise ValidationError("at least one --roi is required")
    taus = None
    if args.tau_per_layer:
        taus = [
            None if t.strip() in ("unshifted", "null", "") else float(t)
            for t in args.tau_per_layer.split(",")
        ]
    refset = build_reference(args.m, args.h, args.layers, getattr(args, "in"), rois, taus)
    write_dat(refset.points, args.out)
    print(f"{len(refset)} points -> {args.out}")
    return 0


def _run_one_seed(config: dict, seed: int, out_dir: Path) -> None:
    problem = make_problem(config["problem"], config["m"], config.get("n"))
    ref_cfg = config["reference"]
    rois = []
    if ref_cfg.get("roi"):
        rois = [RoiSpec.from_json(ref_cfg["roi"])]
    elif ref_cfg.get("rois"):
        rois = [RoiSpec.from_json(r) for r in ref_cfg["rois"]]
    source = ref_cfg.get("source", {})
    refset = build_reference(
        config["m"],
        source.get("h"),
        source.get("layers", 1),
        ref_cfg.get("file"),
        rois,
        ref_cfg.get("tau_per_layer"),
    )
    ops_cfg = config.get("operators", {})
    ops = OperatorParams(
        pc=ops_cfg.get("pc", 1.0),
        eta_c=ops_cfg.get("eta_c", 10.0),
        pm=ops_cfg.get("pm"),
        eta_m=ops_cfg.get("eta_m", 20.0),
    )
    nb_cfg = config.get("neighborhood", {})
    nb = NeighborhoodParams(size=nb_cfg.get("size", 20), delta=nb_cfg.get("delta", 0.9))

    result = run_optimizer(
        problem, refset, config["generations"], seed, operators=ops, neighborhood=nb
    )

    seed_dir = out_dir / f"seed_{seed}"
    seed_dir.mkdir(parents=True, exist_ok=True)
    population_to_csv(result.population, seed_dir / "population.csv")
    F = np.vstack([ind.f for ind in result.population])
    write_dat(F, seed_dir / "objectives.dat")
    m = problem.m
    with open(seed_dir / "history.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = ["generation"]
        for tag in ("ideal", "f_min", "f_mean", "f_max"):
            header += [f"{tag}_{i + 1}" for i in range(m)]
        writer.writerow(header)
        for row in result.history:
            writer.writerow(
                [row["generation"]]
                + [format(v, ".17g") for v in row["ideal"]]
                + [format(v, ".17g") for v in row["f_min"]]
                + [format(v, ".17g") for v in row["f_mean"]]
                + [format(v, ".17g") for v in row["f_max"]]
            )


def cmd_run(args) -> int:
    config = json.loads(Path(args.config).read_text(encoding="utf-8"))
    validate_run_config(config)
    out_dir = Path(config["output_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)

    seeds = config["seeds"]
    max_workers = int(os.environ.get("PREFMOO_THREADS", 0)) or (os.cpu_count() or 1)
    max_workers = max(1, min(max_workers, len(seeds)))
    if max_workers == 1:
        for seed in seeds:
            _run_one_seed(config, seed, out_dir)
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as pool:
            futures = [pool.submit(_run_one_seed, config, s, out_dir) for s in seeds]
            for fut in futures:
                fut.result()

    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    manifest = {
        "config": config,
        "config_sha256": hashlib.sha256(canonical.encode()).hexdigest(),
        "versions": {
            "prefmoo": __version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
        },
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"{len(seeds)} seed(s) -> {out_dir}")
    return 0


def sci_pair(mean: float, var: float) -> str:
    """Table-style aggregate cell like 1.234E-1(5.61E-3)."""

    def sci(x: float, decimals: int) -> str:
        if not math.isfinite(x):
            return "--"
        mantissa, exp = f"{x:.{decimals}E}".split("E")
        return f"{mantissa}E{int(exp)}"

    return f"{sci(mean, 3)}({sci(var, 2)})"


def _collect_objective_files(pattern: str) -> list[tuple[str, str, Path]]:
    hits = sorted(globmod.glob(pattern))
    found: list[tuple[str, str, Path]] = []
    for hit in hits:
        path = Path(hit)
        if path.is_dir():
            for obj in sorted(path.glob("seed_*/objectives.dat")):
                found.append((path.name, obj.parent.name.removeprefix("seed_"), obj))
        elif path.suffix == ".dat":
            found.append((path.parent.name, path.stem, path))
    return found


def cmd_rmetric(args) -> int:
    cfg_raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    pf = None
    pf_cfg = cfg_raw.pop("pf", None)
    if pf_cfg:
        if "file" in pf_cfg:
            pf = read_dat(pf_cfg["file"])
        else:
            problem = make_problem(pf_cfg["problem"], pf_cfg["m"])
            pf = sample_pf(problem, pf_cfg.get("count", 10_000), pf_cfg.get("seed", 0))
    cfg = RMetricConfig(
        z_r=np.asarray(cfg_raw["z_r"], dtype=float),
        z_w=np.asarray(cfg_raw["z_w"], dtype=float) if "z_w" in cfg_raw else None,
        extent=cfg_raw.get("extent", 0.2),
        pf_reference=pf,
        hv_reference=(
            np.asarray(cfg_raw["hv_reference"], dtype=float)
            if "hv_reference" in cfg_raw
            else None
        ),
    )
    files = _collect_objective_files(args.glob)
    if not files:
        raise ValidationError(f"no objective files match {args.glob!r}")

    rows = []
    for run_name, seed, path in files:
        F = read_dat(path)
        igd_v = r_igd(F, cfg) if pf is not None else math.nan
        hv_v = r_hv(F, cfg)
        rows.append((run_name, seed, igd_v, hv_v))

    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["run", "seed", "r_igd", "r_hv"])
        for run_name, seed, igd_v, hv_v in rows:
            writer.writerow(
                [
                    run_name,
                    seed,
                    format(igd_v, ".10g") if math.isfinite(igd_v) else "--",
                    format(hv_v, ".10g") if math.isfinite(hv_v) else "--",
                ]
            )
        igds = [v for _, _, v, _ in rows if math.isfinite(v)]
        hvs = [v for _, _, _, v in rows if math.isfinite(v)]
        writer.writerow(
            [
                "aggregate",
                "",
                sci_pair(np.mean(igds), np.var(igds)) if igds else "--",
                sci_pair(np.mean(hvs), np.var(hvs)) if hvs else "--",
            ]
        )
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(static_dir=args.static)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except OSError as exc:
        raise PrefmooError(f"cannot bind {args.host}:{args.port}: {exc}") from exc
    except SystemExit as exc:  # uvicorn reports startup failure via sys.exit
        raise PrefmooError(
            f"service failed to start on {args.host}:{args.port} (port in use?)"
        ) from exc
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prefmoo",
        description="Preference-steered decomposition multi-objective optimization",
    )
    parser.add_argument("--version", action="version", version=f"prefmoo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-refs", help="generate a structured reference point file")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--h", type=int, required=True)
    g.add_argument("--layers", type=int, default=1)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_refs)

    mp = sub.add_parser("map-refs", help="bias reference points toward one or more ROIs")
    mp.add_argument("--m", type=int)
    mp.add_argument("--h", type=int)
    mp.add_argument("--layers", type=int, default=1)
    mp.add_argument("--in", dest="in", help=".dat file with the base lattice")
    mp.add_argument(
        "--roi",
        action="append",
        help="ROI JSON object or path to one; repeat for multiple ROIs",
    )
    mp.add_argument(
        "--tau-per-layer",
        help="comma list for multi-layer mapping, e.g. 'unshifted,0.4,0.2'",
    )
    mp.add_argument("--out", required=True)
    mp.set_defaults(func=cmd_map_refs)

    r = sub.add_parser("run", help="execute a batch optimization config")
    r.add_argument("config")
    r.set_defaults(func=cmd_run)

    rm = sub.add_parser("rmetric", help="score result sets with R-IGD / R-HV")
    rm.add_argument("--glob", required=True, help="run directories or .dat files")
    rm.add_argument("--config", required=True, help="R-metric JSON config")
    rm.add_argument("--out", help="output CSV (stdout when omitted)")
    rm.set_defaults(func=cmd_rmetric)

    s = sub.add_parser("serve", help="start the interactive steering service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8080)
    s.add_argument("--static", help="directory with the console bundle")
    s.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PrefmooError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
