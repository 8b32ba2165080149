"""Command-line front end: ``brst-lab <command> --system <path>``.

Each command runs the pipeline up to the requested stage and emits a report with
``results``, ``residuals``, ``verdicts`` and ``tolerances`` sections, keyed by stage.
Exit codes: 0 all verdicts pass, 1 configuration error, 2 a verdict failed,
3 internal error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from functools import cached_property
from pathlib import Path

import numpy as np

from .brst import QuantumBRST, quantum_brst
from .cohomology import (
    brst_complex,
    branch_cocycles,
    cohomology,
    duality_check,
    extended_complex,
    format_ghost_number,
    null_space,
    sphere_complex,
)
from .errors import BRSTError, ConfigurationError
from .koszul import BRSTCharge, build_brst
from .observables import conjugate, poisson
from .quantize import adjoint, generator_ops, ghost_number_op, ghost_spectrum, max_abs, scaled_tol
from .states import FockSpace
from .system import ConstraintSystem, load_system

SCHEMA_VERSION = "brst-lab.report/1"
COMMANDS = ("check", "brst", "quantize", "cohomology", "extended")
EXIT_OK, EXIT_CONFIG, EXIT_FINDING, EXIT_INTERNAL = 0, 1, 2, 3


def _r(x: float) -> float:
    """Residuals are reported to three significant digits."""
    return float(f"{float(x):.3e}")


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


class Pipeline:
    """Lazily computed stages for one system; each stage is built at most once."""

    def __init__(self, system: ConstraintSystem, tol: float | None = None, rank_tol: float | None = None):
        self.system = system
        self.tol = system.operator_tol if tol is None else tol
        self.rank_tol = system.rank_tol if rank_tol is None else rank_tol

    @cached_property
    def space(self) -> FockSpace:
        return FockSpace(self.system.m, self.system.dim_V, self.system.inner_product)

    @cached_property
    def gens(self):
        return generator_ops(self.space, self.system.G_matrices, self.system.structure_constants, self.tol)

    @cached_property
    def charge(self) -> BRSTCharge:
        return build_brst(self.system.structure_constants)

    @cached_property
    def quantum(self) -> QuantumBRST:
        return quantum_brst(self.charge, self.gens, self.tol, strict=False)

    def tolerances(self) -> dict:
        return {
            "operator": self.tol,
            "operator_scaled": _r(scaled_tol(self.tol, self.space.dim)),
            "rank": self.rank_tol,
        }

    # -- stages --------------------------------------------------------------
    def check(self) -> dict:
        sysm = self.system
        gens = self.gens
        return {
            "results": {
                "m": sysm.m,
                "dim_V": sysm.dim_V,
                "total_dim": self.space.dim,
                "abelian": sysm.structure_constants.is_abelian(),
                "nonzero_structure_constants": len(sysm.structure_constants.table),
            },
            "residuals": {
                "hermiticity": _r(gens.hermiticity_residual),
                "consistency": _r(gens.consistency_residual),
            },
            "verdicts": {"input_invariants": "PASS", "consistency": "PASS"},
        }

    def brst(self) -> dict:
        C = self.system.structure_constants
        charge = self.charge
        omega = charge.total
        square = poisson(omega, omega, C)
        return {
            "results": {
                "rank": charge.rank,
                "pieces": [str(p) for p in charge.pieces],
                "omega": str(omega),
            },
            "residuals": {},
            "verdicts": {
                "classical_nilpotency": _verdict(not square),
                "reality": _verdict(conjugate(omega) == omega),
            },
        }

    def quantize(self) -> dict:
        q = self.quantum
        cert = q.certificate
        sp = self.space
        G = ghost_number_op(sp)
        eig = np.linalg.eigvals(G.matrix)
        expected = ghost_spectrum(sp)
        observed = {}
        for value in eig.real:
            key = round(2 * value) / 2
            observed[key] = observed.get(key, 0) + 1
        spec_res = max(
            max_abs(eig.imag),
            max(min(abs(v - k) for k in expected) for v in eig.real),
        )
        limit = scaled_tol(self.tol, sp.dim)
        try:
            skew = max_abs(adjoint(G, sp, self.tol).matrix + G.matrix)
        except BRSTError:
            skew = float("inf")
        spectrum = [
            {"ghost_number": _ghost_label(k), "multiplicity": expected[k]} for k in sorted(expected)
        ]
        return {
            "results": {"dimension": sp.dim, "ghost_spectrum": spectrum},
            "residuals": {
                "omega_square": _r(cert.square_residual),
                "omega_square_sector": cert.square_sector,
                "omega_adjoint": _r(cert.adjoint_residual),
                "block_structure": _r(cert.block_residual),
                "ghost_commutator": _r(cert.ghost_commutator_residual),
                "ghost_spectrum": _r(spec_res),
                "ghost_skew_adjoint": _r(skew),
            },
            "verdicts": {
                "nilpotent": _verdict(cert.nilpotent),
                "self_adjoint": _verdict(cert.self_adjoint),
                "ghost_spectrum": _verdict(observed == expected and spec_res <= limit),
                "ghost_skew_adjoint": _verdict(skew <= limit),
            },
        }

    def cohomology(self) -> dict:
        q = self.quantum
        cx = brst_complex(q)
        rep = cohomology(cx, self.rank_tol)
        dual = duality_check(q, self.rank_tol)
        joint = null_space(np.vstack(self.gens.G), self.rank_tol).shape[1]
        bottom = rep.degrees[0].h
        return {
            "results": {
                "dims": {d.label: d.h for d in rep.degrees},
                "kernel_dims": {d.label: d.kernel_dim for d in rep.degrees},
                "image_dims": {d.label: d.image_dim for d in rep.degrees},
                "joint_kernel_dim": joint,
                "duality": {
                    "kernel_dim": dual.kernel_dim,
                    "cokernel_dim": dual.cokernel_dim,
                    "lambda_rank": dual.lambda_rank,
                },
            },
            "residuals": {"complex_square": _r(rep.square_residual)},
            "verdicts": {
                "duality": _verdict(dual.passed),
                "bottom_equals_joint_kernel": _verdict(bottom == joint),
            },
        }

    def extended(self) -> dict:
        q = self.quantum
        m = self.system.m
        left = brst_complex(q)
        right = sphere_complex(m)
        sphere = cohomology(right, self.rank_tol)
        ext = extended_complex(left, right, m)
        ext_rep = cohomology(ext.complex, self.rank_tol)
        h0 = ext_rep.degrees[m].h
        base = cohomology(left, self.rank_tol)
        h_bottom, h_top = base.degrees[0].h, base.degrees[-1].h
        sp = self.space
        etas = [self.gens.eta(b).matrix[:, sp.sector(m)] for b in range(1, m + 1)]
        top = branch_cocycles(ext, m, 0, etas, self.rank_tol)
        bottom = branch_cocycles(ext, 0, m, None, self.rank_tol)
        sphere_ok = sphere.dims == tuple([1] + [0] * (m - 1) + [1])
        limit = scaled_tol(self.tol, ext.complex.dims[m])
        return {
            "results": {
                "sphere_dims": list(right.dims),
                "sphere_cohomology": list(sphere.dims),
                "extended_dims": {d.label: d.dim for d in ext_rep.degrees},
                "extended_cohomology": {d.label: d.h for d in ext_rep.degrees},
                "h0_extended": h0,
                "h_bottom": h_bottom,
                "h_top": h_top,
                "branches": {
                    "top_ghost_times_sphere_bottom": top.class_dim,
                    "bottom_ghost_times_sphere_top": bottom.class_dim,
                },
            },
            "residuals": {
                "extended_square": _r(ext_rep.square_residual),
                "branch_sphere": _r(max(top.sphere_residual, bottom.sphere_residual)),
                "branch_ghost": _r(top.ghost_residual),
            },
            "verdicts": {
                "sphere_model": _verdict(sphere_ok),
                "ghost_zero_two_copies": _verdict(h0 == h_bottom + h_top),
                "branches_span": _verdict(top.class_dim + bottom.class_dim == h0),
                "branch_constraints": _verdict(max(top.sphere_residual, top.ghost_residual) <= limit),
            },
        }


def _ghost_label(x: float) -> str:
    return format_ghost_number(Fraction(int(round(2 * x)), 2))


def run(command: str, system: ConstraintSystem, tol: float | None = None, rank_tol: float | None = None) -> dict:
    """Run one command (or ``all``) and return the report dictionary.

    Construction errors from the pipeline propagate; configuration problems raise
    :class:`ConfigurationError`.
    """
    if command not in COMMANDS + ("all",):
        raise ValueError(f"unknown command {command!r}")
    pipe = Pipeline(system, tol, rank_tol)
    stages = COMMANDS if command == "all" else (command,)
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "system": system.name,
        "system_digest": system.digest,
        "results": {},
        "residuals": {},
        "verdicts": {},
        "tolerances": {},
    }
    pipe.gens  # consistency is checked for every command
    for stage in stages:
        out = getattr(pipe, stage)()
        for key in ("results", "residuals", "verdicts"):
            report[key][stage] = out[key]
    report["tolerances"] = pipe.tolerances()
    return report


def report_passed(report: dict) -> bool:
    return all(v == "PASS" for stage in report["verdicts"].values() for v in stage.values())


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def to_text(report: dict) -> str:
    lines = [f"system {report['system']} ({report['system_digest'][:12]}), command {report['command']}"]
    res, resid, verd = report["results"], report["residuals"], report["verdicts"]
    if "check" in res:
        r = res["check"]
        lines.append(f"[check] m={r['m']} dim V={r['dim_V']} total dim={r['total_dim']}")
        lines.append(f"  hermiticity residual {resid['check']['hermiticity']:.3e}")
        lines.append(f"  consistency residual {resid['check']['consistency']:.3e}: {verd['check']['consistency']}")
    if "brst" in res:
        r = res["brst"]
        lines.append(f"[brst] rank {r['rank']}, {len(r['pieces'])} piece(s)")
        for k, piece in enumerate(r["pieces"]):
            lines.append(f"  Omega^({k}) = {piece}")
        lines.append(f"  classical nilpotency: {verd['brst']['classical_nilpotency']}")
        lines.append(f"  reality: {verd['brst']['reality']}")
    if "quantize" in res:
        r, z, v = res["quantize"], resid["quantize"], verd["quantize"]
        lines.append(f"[quantize] dimension {r['dimension']}")
        lines.append(f"  ||Omega^2|| = {z['omega_square']:.3e}: {v['nilpotent']}")
        lines.append(f"  ||Omega - Omega^+|| = {z['omega_adjoint']:.3e}: {v['self_adjoint']}")
        spectrum = ", ".join(f"{s['ghost_number']} (x{s['multiplicity']})" for s in r["ghost_spectrum"])
        lines.append(f"  ghost spectrum {spectrum}: {v['ghost_spectrum']}")
        lines.append(f"  ghost operator skew-adjoint: {v['ghost_skew_adjoint']}")
    if "cohomology" in res:
        r, v = res["cohomology"], verd["cohomology"]
        dims = ", ".join(f"H^{{{k}}}: {h}" for k, h in r["dims"].items())
        lines.append(f"[cohomology] {dims}, duality: {v['duality']}")
        d = r["duality"]
        lines.append(f"  kernel {d['kernel_dim']}, cokernel {d['cokernel_dim']}, Lambda rank {d['lambda_rank']}")
        lines.append(f"  bottom cohomology equals joint kernel ({r['joint_kernel_dim']}): {v['bottom_equals_joint_kernel']}")
    if "extended" in res:
        r, v = res["extended"], verd["extended"]
        lines.append(f"[extended] sphere cochains {r['sphere_dims']}, cohomology {r['sphere_cohomology']}: {v['sphere_model']}")
        lines.append(
            f"  dim H^0(Omega_ext) = {r['h0_extended']}, equals H^bottom + H^top "
            f"({r['h_bottom']} + {r['h_top']}): {v['ghost_zero_two_copies']}"
        )
        lines.append(f"  pure branch classes span: {v['branches_span']}, branch constraints: {v['branch_constraints']}")
    lines.append("overall: " + _verdict(report_passed(report)))
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="brst-lab", description="Certify BRST constructions for finite constraint systems.")
    parser.add_argument("command", choices=COMMANDS + ("all",))
    parser.add_argument("--system", required=True, help="path to a constraint-system JSON file")
    parser.add_argument("--tol", type=float, default=None, help="operator tolerance (scaled by dimension)")
    parser.add_argument("--rank-tol", type=float, default=None, help="relative singular value cutoff")
    fmt = parser.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text")
    parser.add_argument("--out", default=None, help="write the report here instead of stdout")
    parser.set_defaults(fmt="text")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        system = load_system(args.system)
        report = run(args.command, system, args.tol, args.rank_tol)
    except ConfigurationError as exc:
        print("configuration error:", file=sys.stderr)
        for v in exc.violations:
            print(f"  - {v}", file=sys.stderr)
        return EXIT_CONFIG
    except BRSTError as exc:
        print(f"finding: {exc}", file=sys.stderr)
        return EXIT_FINDING
    except Exception as exc:  # noqa: BLE001 - any other failure is a bug
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    text = to_json(report) if args.fmt == "json" else to_text(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK if report_passed(report) else EXIT_FINDING


if __name__ == "__main__":
    sys.exit(main())
