"""Command-line surface for the hull toolkit.

Subcommands: hull-minimal, check-psh, disc (generate/validate), green,
certify (discs/jensen/hessian), bochner, envelope-null.  Every command
reads JSON inputs, writes versioned JSON reports plus plot-ready CSV
tables into --out-dir, and isolates wall-clock metadata in a separate
meta file so the reports themselves are byte reproducible.

Exit codes: 0 success, 2 validation failure, 3 numerical target missed
(results still written), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import fixtures, serialize
from .bochner import TubeSpec, bochner_stage
from .certificates import certify_jensen, hessian_certificate, search_disc
from .cloud import MAX_CLOUD_SAMPLES, bs_step_null, sample_ball_c3
from .currents import GreenQuadrature, ddc_identity_check, green_scalar, mass
from .discs import (
    ConformalMinimalDisc,
    RealSurface,
    catalog,
    check_immersed,
    conformality_residual,
    nullity_residual,
    spinor_disc,
)
from .envelope import EnvelopeConfig, extremal_hull_field
from .geometry import sample_null_directions
from .psh import ScalarFunction, is_null_psh_at, minimal_psh_defect
from .serialize import ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


class NumericMiss(RuntimeError):
    """A numerical target was missed; outputs were already written."""


@dataclass
class RunConfig:
    """Validated run parameters shared by all commands."""

    command: str
    mode: Optional[str] = None
    input: Optional[Path] = None
    out_dir: Path = Path("out")
    resolution: int = 64
    sweeps: int = 200
    tol: float = 1e-3
    seed: int = 0
    budget: int = 25600
    workers: int = 1
    quadrature: tuple = (64, 256)
    format: str = serialize.FORMAT_TAG

    def __post_init__(self):
        if self.resolution < 4:
            raise ValidationError("resolution must be at least 4")
        if self.sweeps < 1:
            raise ValidationError("sweeps must be positive")
        if not self.tol > 0:
            raise ValidationError("tol must be positive")
        if self.budget < 1:
            raise ValidationError("budget must be positive")
        if self.workers < 1:
            raise ValidationError("workers must be positive")
        nr, nt = self.quadrature
        if nr < 2 or nt < 8:
            raise ValidationError("quadrature needs at least 2 radial and 8 angular nodes")

    def asdict(self):
        d = dict(vars(self))
        d["input"] = None if self.input is None else str(self.input)
        d["out_dir"] = str(self.out_dir)
        d["quadrature"] = list(self.quadrature)
        return d


def _parse_quadrature(text):
    try:
        nr, nt = (int(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected R,T integer pair") from exc
    return (nr, nt)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hullkit",
        description="minimal hulls, disc envelopes, and hull certificates",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, mode_choices=None, **kw):
        p = sub.add_parser(name, **kw)
        if mode_choices:
            p.add_argument("mode", choices=mode_choices)
        p.add_argument("--input", type=Path, default=None)
        p.add_argument("--out-dir", type=Path, default=Path("out"))
        p.add_argument("--resolution", type=int, default=64)
        p.add_argument("--sweeps", type=int, default=200)
        p.add_argument("--tol", type=float, default=1e-3)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget", type=int, default=25600)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--quadrature", type=_parse_quadrature, default=(64, 256))
        return p

    add("hull-minimal", help="grid envelope and hull members for a compact set")
    add("check-psh", help="minimal-psh or null-psh verdict table for a function file")
    add("disc", mode_choices=("generate", "validate"), help="disc generation and validation")
    add("green", help="Green normalization, mass pair, and residual table for a disc")
    add(
        "certify",
        mode_choices=("discs", "jensen", "hessian"),
        help="hull membership certificates at the origin",
    )
    add("bochner", help="finite tube stages for a compact connected base")
    add("envelope-null", help="one monotone null-disc sweep on a C3 sample cloud")
    return parser


def _config_from_args(args):
    return RunConfig(
        command=args.command,
        mode=getattr(args, "mode", None),
        input=args.input,
        out_dir=args.out_dir,
        resolution=args.resolution,
        sweeps=args.sweeps,
        tol=args.tol,
        seed=args.seed,
        budget=args.budget,
        workers=args.workers,
        quadrature=args.quadrature,
    )


def _load_cloud(cfg: RunConfig, space="R3", default=None):
    if cfg.input is None:
        if default is not None:
            return default, "builtin"
        raise ValidationError(f"{cfg.command} requires --input")
    pts, file_space, name = serialize.load_point_cloud(cfg.input)
    if file_space != space:
        raise ValidationError(f"expected a {space} point cloud, got {file_space}")
    return pts, name or str(cfg.input)


def _write_meta(cfg: RunConfig, started, status):
    meta = {
        "command": cfg.command,
        "mode": cfg.mode,
        "config": cfg.asdict(),
        "started_unix": started,
        "runtime_s": time.time() - started,
        "exit_status": status,
    }
    serialize.dump_json(meta, cfg.out_dir / "meta.json")


def cmd_hull_minimal(cfg: RunConfig):
    k_points, name = _load_cloud(cfg, "R3")
    domain = fixtures.standard_ball()
    if not np.asarray(domain.contains(k_points)).all():
        raise ValidationError("generating set must lie inside the domain ball")
    env_cfg = EnvelopeConfig(max_sweeps=cfg.sweeps, tol=cfg.tol, seed=cfg.seed)
    result = extremal_hull_field(
        k_points, domain, resolution=cfg.resolution, cfg=env_cfg
    )
    serialize.save_field(
        result.grid,
        cfg.out_dir / "field.json",
        extra={"threshold": result.threshold, "delta": result.delta},
    )
    serialize.save_report(
        {
            "set_name": name,
            "n_members": int(result.member_mask.sum()),
            "members": result.member_points,
            "threshold": result.threshold,
            "delta": result.delta,
        },
        cfg.out_dir / "members.json",
        kind="hull_members",
    )
    mid = result.grid.shape[2] // 2
    pts = result.grid.points()[:, :, mid, :]
    vals = result.grid.values[:, :, mid]
    rows = [
        (pts[i, j, 0], pts[i, j, 1], vals[i, j])
        for i in range(pts.shape[0])
        for j in range(pts.shape[1])
    ]
    serialize.write_csv(cfg.out_dir / "slice_z0.csv", ["x1", "x2", "value"], rows)
    diagnostics = {
        "sweeps": result.info.sweeps,
        "converged": result.info.converged,
        "final_change": result.info.residuals[-1] if result.info.residuals else 0.0,
        **result.diagnostics,
    }
    serialize.save_report(diagnostics, cfg.out_dir / "diagnostics.json", kind="diagnostics")
    if not result.info.converged:
        raise NumericMiss("sweep change did not reach tol within the sweep budget")
    return EXIT_OK


def _levi_table(u: ScalarFunction, cfg: RunConfig):
    pts = sample_ball_c3(10, seed=cfg.seed, radius=0.9)
    dirs = sample_null_directions(1024, seed=cfg.seed)
    rows = []
    worst = np.inf
    witness = None
    for x in pts:
        zc = x[:3] + 1j * x[3:]
        rep = is_null_psh_at(u, zc, dirs)
        rows.append((*(float(v) for v in x), rep.minimum))
        if rep.minimum < worst:
            worst = rep.minimum
            witness = np.concatenate([rep.argmin.real, rep.argmin.imag])
    return rows, worst, witness


def _defect_table(u: ScalarFunction, cfg: RunConfig):
    axis = np.linspace(-1.0, 1.0, 5)
    rows = []
    worst = np.inf
    witness = None
    for x1 in axis:
        for x2 in axis:
            for x3 in axis:
                x = np.array([x1, x2, x3])
                d = minimal_psh_defect(u, x)
                rows.append((x1, x2, x3, d))
                if d < worst:
                    worst = d
                    witness = x
    return rows, worst, witness


def cmd_check_psh(cfg: RunConfig):
    if cfg.input is None:
        raise ValidationError("check-psh requires --input with a function file")
    u = serialize.load_function(cfg.input)
    if u.space == "C3":
        rows, worst, witness = _levi_table(u, cfg)
        header = ["x1", "x2", "x3", "y1", "y2", "y3", "levi_min"]
        quantity = "sampled_levi_minimum"
    else:
        rows, worst, witness = _defect_table(u, cfg)
        header = ["x1", "x2", "x3", "defect"]
        quantity = "minimal_psh_defect"
    verdict = "PASS" if worst >= -1e-8 else "FAIL"
    serialize.write_csv(cfg.out_dir / "verdicts.csv", header, rows)
    serialize.save_report(
        {
            "function": u.name,
            "space": u.space,
            "quantity": quantity,
            "worst": worst,
            "witness": None if witness is None else np.asarray(witness),
            "verdict": verdict,
            "n_points": len(rows),
        },
        cfg.out_dir / "check_psh.json",
        kind="psh_verdict",
    )
    return EXIT_OK


def _disc_from_spec(doc):
    serialize._require_keys(
        doc, ["family"], ["params", "a", "b", "base"], "disc input"
    )
    family = doc["family"]
    if family == "spinor":
        a = serialize._complex_array(doc.get("a", [[1.0, 0.0]]), "disc input")
        b = serialize._complex_array(doc.get("b", [[0.0, 0.0], [1.0, 0.0]]), "disc input")
        base = np.asarray(doc.get("base", (0.0, 0.0, 0.0)), dtype=float)
        return ConformalMinimalDisc(spinor_disc(a, b, base=base))
    params = doc.get("params", {})
    try:
        return catalog(family, **params)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad disc input: {exc}") from exc


def _disc_metrics(disc):
    if isinstance(disc, ConformalMinimalDisc):
        lift, surface = disc.lift, disc
    else:
        lift, surface = disc, RealSurface(disc)
    return {
        "nullity_residual": nullity_residual(lift),
        "conformality_residual": conformality_residual(surface),
        "center": np.asarray(surface.center()),
        "degree": lift.degree,
    }


def cmd_disc(cfg: RunConfig):
    if cfg.mode == "generate":
        doc = {"family": "enneper", "params": {}} if cfg.input is None else serialize.load_json(cfg.input)
        disc = _disc_from_spec(doc)
        serialize.save_disc(disc, cfg.out_dir / "disc.json")
        metrics = _disc_metrics(disc)
        serialize.save_report(metrics, cfg.out_dir / "disc_metrics.json", kind="disc_metrics")
        return EXIT_OK
    if cfg.input is None:
        raise ValidationError("disc validate requires --input")
    disc = serialize.load_disc(cfg.input)
    metrics = _disc_metrics(disc)
    ok = metrics["nullity_residual"] <= 1e-8 and metrics["conformality_residual"] <= 1e-8
    try:
        check_immersed(disc)
        metrics["immersed"] = True
    except ValueError:
        metrics["immersed"] = False
    metrics["valid"] = bool(ok and metrics["immersed"])
    serialize.save_report(metrics, cfg.out_dir / "disc_metrics.json", kind="disc_metrics")
    if not metrics["valid"]:
        raise ValidationError("disc failed nullity, conformality, or immersion checks")
    return EXIT_OK


def cmd_green(cfg: RunConfig):
    disc = catalog("flat") if cfg.input is None else serialize.load_disc(cfg.input)
    if not isinstance(disc, ConformalMinimalDisc):
        raise ValidationError("green expects a minimal disc file (real_part view)")
    quad = GreenQuadrature.build(*cfg.quadrature)
    unit = green_scalar(lambda z: np.ones(z.shape, dtype=float), quad)
    interior, boundary = mass(disc, quad)
    rows = []
    worst = 0.0
    for name, poly in fixtures.polynomial_probes():
        rep = ddc_identity_check(disc, ScalarFunction.from_poly(poly), quad)
        rows.append((name, poly.degree, rep.method, rep.lhs, rep.rhs, rep.residual))
        worst = max(worst, rep.residual)
    serialize.write_csv(
        cfg.out_dir / "ddc_table.csv",
        ["probe", "degree", "method", "lhs", "rhs", "residual"],
        rows,
    )
    serialize.save_report(
        {
            "green_of_one": unit,
            "mass_interior": interior,
            "mass_boundary": boundary,
            "mass_gap": boundary - interior,
            "max_ddc_residual": worst,
            "quadrature": list(cfg.quadrature),
        },
        cfg.out_dir / "green.json",
        kind="green_report",
    )
    if abs(unit - 0.25) > 1e-10 or worst > 1e-6:
        raise NumericMiss("Green normalization or residual target missed")
    return EXIT_OK


def _searched_disc(cfg: RunConfig, k_points):
    omega = fixtures.standard_ball()
    return search_disc(
        np.zeros(3),
        k_points,
        omega,
        degree=1,
        restarts=64,
        seed=cfg.seed,
        budget=cfg.budget,
    )


def cmd_certify(cfg: RunConfig):
    k_points, name = _load_cloud(cfg, "R3", default=fixtures.circle_points())
    if cfg.mode == "discs":
        entry = _searched_disc(cfg, k_points)
        serialize.save_disc(entry.disc, cfg.out_dir / "best_disc.json")
        serialize.save_report(
            {
                "set_name": name,
                "point": [0.0, 0.0, 0.0],
                "poisson": entry.poisson,
                "near_fraction": entry.near_fraction,
                "near_tol": entry.near_tol,
                "sup_norm": entry.sup_norm,
                "boundary_margin": entry.boundary_margin,
                "restarts": entry.restarts,
                "evals_used": entry.evals_used,
                "seed": entry.seed,
                "found": entry.found(),
            },
            cfg.out_dir / "disc_certificate.json",
            kind="disc_certificate",
        )
        if not entry.found():
            raise NumericMiss("no certificate found within budget")
        return EXIT_OK
    if cfg.mode == "jensen":
        entry = _searched_disc(cfg, k_points)
        cert = certify_jensen(
            np.zeros(3),
            [entry.disc],
            k_points,
            delta=0.1,
            eps=cfg.tol,
        )
        serialize.save_report(
            {
                "set_name": name,
                "point": [0.0, 0.0, 0.0],
                "passed": cert.all_ok,
                "eps": cert.eps,
                "delta": cert.delta,
                "max_snap_distance": cert.max_snap_distance,
                "dropped_fraction": cert.dropped_fraction,
                "rows": cert.results,
            },
            cfg.out_dir / "jensen.json",
            kind="jensen_certificate",
        )
        if not cert.all_ok:
            raise NumericMiss("Jensen inequalities failed at the given tolerance")
        return EXIT_OK
    quad = GreenQuadrature.build(*cfg.quadrature)
    rows = []
    worst = 0.0
    all_ok = True
    for disc_name, disc in fixtures.disc_suite():
        cert = hessian_certificate(
            np.asarray(disc.center()), disc, k_points, quadrature=quad
        )
        for r in cert.rows:
            rows.append(
                (disc_name, r["name"], r["functional"], r["measure_side"], r["residual"])
            )
        worst = max(worst, cert.max_residual)
        all_ok = all_ok and cert.all_ok
    serialize.write_csv(
        cfg.out_dir / "hessian_table.csv",
        ["disc", "probe", "functional", "measure_side", "residual"],
        rows,
    )
    serialize.save_report(
        {"max_residual": worst, "all_ok": all_ok},
        cfg.out_dir / "hessian.json",
        kind="hessian_certificate",
    )
    if worst > 1e-6 or not all_ok:
        raise NumericMiss("Hessian functional identity or positivity missed")
    return EXIT_OK


def cmd_bochner(cfg: RunConfig):
    k_points, name = _load_cloud(cfg, "R3", default=fixtures.circle_points())
    tube = TubeSpec(k_points)
    report = bochner_stage(np.zeros(3), k_points, tube, j_max=8)
    rows = [
        (s.j, s.mass, s.containment, s.thickening, s.mean_error, s.max_residual)
        for s in report.stages
    ]
    serialize.write_csv(
        cfg.out_dir / "stage_table.csv",
        ["j", "mass", "containment", "thickening", "mean_error", "max_ddc_residual"],
        rows,
    )
    serialize.save_report(
        {
            "set_name": name,
            "point": [0.0, 0.0, 0.0],
            "anchors": report.plan.anchors,
            "weights": report.plan.weights,
            "mass_ratio": report.mass_ratio,
            "all_contained": report.all_contained,
            "max_ddc_residual": max(s.max_residual for s in report.stages),
        },
        cfg.out_dir / "bochner.json",
        kind="bochner_report",
    )
    if not report.all_contained or report.mass_ratio > 2.0:
        raise NumericMiss("containment or mass bound missed across stages")
    return EXIT_OK


def cmd_envelope_null(cfg: RunConfig):
    if cfg.input is None:
        # the evaluation budget doubles as the builtin sample count
        n = int(min(max(cfg.budget, 64), MAX_CLOUD_SAMPLES))
        points = sample_ball_c3(n, seed=cfg.seed)
        name = "builtin_ball"
    else:
        points, name = _load_cloud(cfg, "C3")
    u_inv = fixtures.null_psh_example()
    u_dec = fixtures.negative_height_example()
    inv_values = u_inv(points)
    dec_values = u_dec(points)
    sweeps = min(cfg.sweeps, 8)
    inv_dev = 0.0
    dec = dec_values.copy()
    dec_info = None
    for s in range(sweeps):
        # The invariance probe is re-swept from its exact values each
        # time so interpolation error cannot accumulate.
        new_inv, info = bs_step_null(points, inv_values, seed=cfg.seed + s)
        inv_dev = max(inv_dev, float(np.abs(new_inv - inv_values)[info["interior"]].max()))
        dec, dec_info = bs_step_null(points, dec, seed=cfg.seed + s)
    interior = dec_info["interior"]
    strict = float((dec[interior] < dec_values[interior] - 1e-12).mean())
    serialize.save_report(
        {
            "set_name": name,
            "n_points": int(len(points)),
            "sweeps": sweeps,
            "invariance_dev": inv_dev,
            "monotone": bool((dec <= dec_values + 1e-15).all()),
            "strict_decrease_fraction": strict,
            "n_interior": int(interior.sum()),
        },
        cfg.out_dir / "envelope_null.json",
        kind="null_sweep_report",
    )
    if inv_dev > 1e-2:
        raise NumericMiss("null-psh invariance deviation exceeded 1e-2")
    return EXIT_OK


COMMANDS = {
    "hull-minimal": cmd_hull_minimal,
    "check-psh": cmd_check_psh,
    "disc": cmd_disc,
    "green": cmd_green,
    "certify": cmd_certify,
    "bochner": cmd_bochner,
    "envelope-null": cmd_envelope_null,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.time()
    try:
        cfg = _config_from_args(args)
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION if isinstance(exc, ValidationError) else EXIT_IO
    try:
        status = COMMANDS[cfg.command](cfg)
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        status = EXIT_VALIDATION
    except NumericMiss as exc:
        print(f"numerical target missed: {exc}", file=sys.stderr)
        status = EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        status = EXIT_IO
    try:
        _write_meta(cfg, started, status)
    except OSError:
        status = EXIT_IO
    return status


if __name__ == "__main__":
    sys.exit(main())
