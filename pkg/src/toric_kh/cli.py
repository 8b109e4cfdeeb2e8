"""Command-line entry point: ``toric-kh <command> ...``."""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .fan import (Fan, FanError, is_complete, lattice_fan_isomorphism, make_projective_space_fan,
                  make_wps_fan, singular_locus, star_fan_of_ray, star_subdivision, validate_fan,
                  cone_index, is_well_formed)
from .forms import (GeneratorMode, graded_cech_complex, log_subsets, top_cokernel_witness)
from .kh import compare_kh, kh_multiplicities
from .lattice import LatticeError
from .nerve import NerveMode, build_nerve, verify_simplicial_identities
from .regularity import CHAR_ZERO, FormsWitness, Verdict, regularity_report
from .reports import FanParseError, Report, emit_report, parse_fan

EXIT_OK, EXIT_VERDICT, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _int_vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def _rational_vector(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(x) for x in text.replace(" ", "").split(",") if x != "")
    except (ValueError, ZeroDivisionError):
        raise InputError(f"expected comma-separated rationals, got {text!r}") from None


def load_fan(path: str) -> Fan:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_fan(text)


def _cone_rows(fan: Fan, cones) -> list[dict]:
    return [{"cone": list(c.ray_indices), "dim": c.dim, "index": cone_index(fan, c),
             "rays": [list(v) for v in fan.vectors(c)]} for c in cones]


def _singularity(fan: Fan) -> dict:
    sl = singular_locus(fan)
    return {"smooth": sl.smooth, "singular_locus_dim": sl.singular_locus_dim,
            "singular_cones": _cone_rows(fan, sl.singular_cones)}


# -- commands ----------------------------------------------------------------

def cmd_fan_check(args) -> tuple[Report, int]:
    fan = load_fan(args.file)
    res = {"valid": validate_fan(fan) is None, "complete": is_complete(fan),
           "n_rays": len(fan.rays), "n_max_cones": len(fan.max_cones)}
    res.update(_singularity(fan))
    return Report("fan check", {"file": args.file, "fan": fan.to_dict()}, res, list(fan.warnings)), EXIT_OK


def cmd_wps(args) -> tuple[Report, int]:
    fan = make_wps_fan(args.weights)
    res = {"fan": fan.to_dict(), "well_formed": is_well_formed(args.weights)}
    res.update(_singularity(fan))
    return Report("wps", {"weights": list(args.weights)}, res, list(fan.warnings)), EXIT_OK


def _kh_single(path: str, full_table: bool) -> tuple[Report, int]:
    fan = load_fan(path)
    mv = kh_multiplicities(fan)
    res = {"multiplicities": mv.as_dict()}
    if full_table:
        res["table"] = [{"s": s, "p": p, "rank": r} for s, p, r in mv.table]
    return Report("kh", {"file": path}, res, list(fan.warnings), list(mv.assumptions)), EXIT_OK


def _kh_compare(px: str, py: str) -> tuple[Report, int]:
    fx, fy = load_fan(px), load_fan(py)
    inputs = {"file_x": px, "file_y": py}
    cmp = compare_kh(fx, fy)
    if cmp is None:
        return Report("kh compare", inputs, {"isomorphism": "NONE"}), EXIT_VERDICT
    iso = cmp.isomorphism
    res = {
        "isomorphism": {"matrix": iso.matrix.matrix.to_lists(), "ray_map": list(iso.ray_map),
                        "scalings": list(iso.scalings)},
        "isogenies": [{"cell": list(src), "image": list(tgt), "rank": r, "degree": deg}
                      for src, tgt, r, deg in cmp.degree_table()],
        "commutation_checks": cmp.morphism.commutation_checked,
        "multiplicities_x": cmp.vector.as_dict(),
        "multiplicities_y": cmp.vector_y.as_dict(),
        "equal": cmp.equal,
    }
    code = EXIT_OK if cmp.equal else EXIT_VERDICT
    return Report("kh compare", inputs, res, list(fx.warnings) + list(fy.warnings),
                  list(cmp.vector.assumptions)), code


def cmd_kh(args) -> tuple[Report, int]:
    if args.args[0] == "compare":
        if len(args.args) != 3:
            raise InputError("usage: kh compare <fileX> <fileY>")
        return _kh_compare(args.args[1], args.args[2])
    if len(args.args) != 1:
        raise InputError("usage: kh <file> [--full-table]")
    return _kh_single(args.args[0], args.full_table)


def cmd_resolve(args) -> tuple[Report, int]:
    fan = load_fan(args.file)
    new = star_subdivision(fan, _int_vector(args.ray))
    res = {"fan": new.to_dict(), "complete": is_complete(new)}
    res.update(_singularity(new))
    return Report("resolve", {"file": args.file, "ray": list(_int_vector(args.ray))}, res,
                  list(new.warnings)), EXIT_OK


def cmd_star(args) -> tuple[Report, int]:
    fan = load_fan(args.file)
    st = star_fan_of_ray(fan, _int_vector(args.ray))
    res = {"fan": st.to_dict(), "complete": is_complete(st)}
    if st.dim >= 1:
        iso = lattice_fan_isomorphism(st, make_projective_space_fan(st.dim))
        res["projective_space"] = iso is not None
        if iso is not None:
            res["lattice_isomorphism"] = iso[0].to_lists()
    return Report("star", {"file": args.file, "ray": list(_int_vector(args.ray))}, res), EXIT_OK


def _forms_witness(fan: Fan, j: int, mu, mode: str, class_vector):
    cx = graded_cech_complex(fan, j, mu, mode)
    verdict = top_cokernel_witness(cx, class_vector)
    return cx, verdict


def cmd_regularity(args) -> tuple[Report, int]:
    fan = load_fan(args.file)
    fw = None
    if args.witness_j is not None:
        if args.witness_mu is None or args.witness_class is None:
            raise InputError("--witness-j needs --witness-mu and --witness-class")
        cx, verdict = _forms_witness(fan, args.witness_j, _int_vector(args.witness_mu),
                                     args.witness_mode, _rational_vector(args.witness_class))
        fw = FormsWitness.from_complex(cx, _rational_vector(args.witness_class), verdict)
    rep = regularity_report(fan, fw)
    res = {
        "dim": rep.dim, "complete": rep.complete,
        "singular_locus_dim": rep.singular.singular_locus_dim,
        "singular_cones": _cone_rows(fan, rep.singular.singular_cones),
        "decomposition_applies": rep.decomposition_applies,
        "decomposition_reason": rep.decomposition_reason,
        "k0_verdict": rep.k0_verdict,
        "k0_witness": (list(rep.k0_witness.ray_indices) if hasattr(rep.k0_witness, "ray_indices")
                       else rep.k0_witness),
        "k1_verdict": rep.k1_verdict,
        "k1_witnesses": _cone_rows(fan, rep.k1_witnesses),
        "k_negative": rep.k_negative_note,
        "notes": rep.notes,
    }
    code = EXIT_VERDICT if Verdict.NOT_REGULAR in (rep.k0_verdict, rep.k1_verdict) else EXIT_OK
    return Report("regularity", {"file": args.file}, res, list(fan.warnings), list(rep.assumptions)), code


def cmd_forms(args) -> tuple[Report, int]:
    fan = load_fan(args.file)
    mu = _int_vector(args.mu)
    cx = graded_cech_complex(fan, args.j, mu, args.mode)
    res = {"dims": cx.dims(), "cohomology": cx.cohomology_ranks(),
           "cochain_complex": cx.is_cochain_complex(),
           "log_basis": [list(S) for S in log_subsets(fan.dim, args.j)]}
    code = EXIT_OK
    if args.witness is not None:
        verdict = top_cokernel_witness(cx, _rational_vector(args.witness))
        res["witness"] = list(_rational_vector(args.witness))
        res["verdict"] = verdict
    inputs = {"file": args.file, "j": args.j, "mu": list(mu), "mode": GeneratorMode(args.mode)}
    return Report("forms", inputs, res, list(cx.warnings), [CHAR_ZERO]), code


def cmd_nerve(args) -> tuple[Report, int]:
    fan = load_fan(args.file)
    mode = {"alt": NerveMode.ALTERNATING}.get(args.mode, NerveMode(args.mode))
    p_max = args.p_max
    if p_max is None and mode is NerveMode.FULL:
        p_max = min(fan.dim, 2)
    nerve = build_nerve(fan, mode, p_max)
    levels = [{"level": p, "cells": len(lvl),
               "torus_ranks": sorted({c.torus_rank for c in lvl})} for p, lvl in enumerate(nerve.levels)]
    res = {"mode": mode, "p_max": nerve.p_max, "levels": levels}
    code = EXIT_OK
    if args.verify:
        chk = verify_simplicial_identities(nerve)
        res["identities_checked"] = chk.checked
        res["identity_failures"] = chk.failures
        if not chk.ok:
            code = EXIT_VERDICT
    return Report("nerve", {"file": args.file, "mode": mode}, res), code


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "machine"), default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="toric-kh", description="Homotopy K-theory of simplicial toric varieties.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--format", choices=("human", "machine"), default="human")
    p.add_argument("--out", default=None)
    sub = p.add_subparsers(dest="command", required=True)

    fan_p = sub.add_parser("fan", help="fan utilities")
    fan_sub = fan_p.add_subparsers(dest="fan_command", required=True)
    chk = fan_sub.add_parser("check", parents=[common], help="validate a fan file")
    chk.add_argument("file")
    chk.set_defaults(func=cmd_fan_check)

    w = sub.add_parser("wps", parents=[common], help="weighted projective space fan")
    w.add_argument("weights", type=int, nargs="+")
    w.set_defaults(func=cmd_wps)

    k = sub.add_parser("kh", parents=[common], help="KH multiplicities, or `kh compare X Y`")
    k.add_argument("args", nargs="+", metavar="file")
    k.add_argument("--full-table", action="store_true")
    k.set_defaults(func=cmd_kh)

    for name, func, hlp in (("resolve", cmd_resolve, "star subdivision at a ray"),
                            ("star", cmd_star, "star fan of a ray")):
        sp = sub.add_parser(name, parents=[common], help=hlp)
        sp.add_argument("file")
        sp.add_argument("--ray", required=True)
        sp.set_defaults(func=func)

    r = sub.add_parser("regularity", parents=[common], help="K-regularity verdicts")
    r.add_argument("file")
    r.add_argument("--witness-j", type=int)
    r.add_argument("--witness-mu")
    r.add_argument("--witness-class")
    r.add_argument("--witness-mode", choices=("paper", "hilbert"), default="paper")
    r.set_defaults(func=cmd_regularity)

    f = sub.add_parser("forms", parents=[common], help="graded Čech complex of log forms")
    f.add_argument("file")
    f.add_argument("--j", type=int, required=True)
    f.add_argument("--mu", required=True)
    f.add_argument("--mode", choices=("paper", "hilbert"), default="paper")
    f.add_argument("--witness", help="log-basis coefficients of a top-degree class")
    f.set_defaults(func=cmd_forms)

    n = sub.add_parser("nerve", parents=[common], help="Čech nerve summary")
    n.add_argument("file")
    n.add_argument("--mode", choices=("full", "alt", "alternating"), default="alt")
    n.add_argument("--p-max", type=int)
    n.add_argument("--verify", action="store_true")
    n.set_defaults(func=cmd_nerve)
    return p


_VECTOR_OPTS = ("--ray", "--mu", "--witness", "--witness-mu", "--witness-class")


def _glue_negative_values(argv: list[str]) -> list[str]:
    # "--ray -1,0" would otherwise read as an unknown flag
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VECTOR_OPTS and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1][1:2].isdigit():
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_negative_values(argv))
    t0 = time.perf_counter()
    try:
        report, code = args.func(args)
    except (InputError, FanParseError, FanError, LatticeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = emit_report(report, args.format) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.format == "human":
        print(f"({time.perf_counter() - t0:.2f}s)", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
