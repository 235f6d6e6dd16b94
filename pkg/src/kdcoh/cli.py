"""Command-line interface: ``kdcoh <command> [options]``."""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import io as kio
from .bounds import verify_bounds
from .coherence import OptimizerConfig, optimize_coherence
from .errors import DomainError, UsageError
from .estimator import SamplingModel, SPSAConfig, variational_estimate
from .kdq import functionals, kd_distribution
from .qstate import OrthonormalBasis, qubit_basis, tensor_basis
from .reproduce import FIG1_COLUMNS, FIG2_COLUMNS, qubit_sweep, run_examples
from .susceptibility import (kd_decomposition_check, normalized_bound_check, qfi, sld,
                             static_susceptibility)

COMMANDS = ("kd", "coherence", "bounds", "figure1", "figure2", "examples", "susceptibility", "estimate")


@dataclass
class RunConfig:
    command: str
    input_path: str = ""
    output_path: str = ""
    seed: int = 0
    starts: int = 32
    tol: float = 1e-8
    fmt: str = "json"
    theta_points: int = 41
    r_list: list[float] = field(default_factory=lambda: [1.0, 0.8, 0.5, 0.0])

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.command in ("kd", "coherence", "bounds", "susceptibility", "estimate") and not self.input_path:
            raise UsageError(f"{self.command} needs an input file")
        if self.theta_points < 2:
            raise UsageError("theta grid needs at least 2 points")
        if any(not 0 <= r <= 1 for r in self.r_list):
            raise UsageError("Bloch radii must lie in [0, 1]")


def threads() -> int:
    try:
        return max(1, int(os.environ.get("KDCOH_THREADS", "1")))
    except ValueError:
        return 1


def parse_basis(spec: str, dim: int, subsystem_dims=None) -> OrthonormalBasis:
    """``computational``, ``fourier``, ``qubit:ALPHA,BETA``, ``product-qubit:A1,B1,A2,B2,...`` or a JSON path."""
    if spec == "computational":
        return OrthonormalBasis.computational(dim, subsystem_dims)
    if spec == "fourier":
        return OrthonormalBasis.fourier(dim)
    kind, _, args = spec.partition(":")
    if kind in ("qubit", "product-qubit") and args:
        vals = [float(x) for x in args.split(",")]
        if len(vals) % 2:
            raise UsageError(f"basis {spec!r} needs (alpha, beta) pairs")
        blocks = [qubit_basis(a, b) for a, b in zip(vals[::2], vals[1::2])]
        basis = blocks[0] if len(blocks) == 1 else tensor_basis(*blocks)
        if basis.dim != dim:
            raise UsageError(f"basis {spec!r} has dim {basis.dim}, state has {dim}")
        return basis
    if Path(spec).exists():
        return kio.load_basis(spec)
    raise UsageError(f"unrecognized basis spec {spec!r}")


def _fmt(x) -> str:
    return f"{x:.9g}" if isinstance(x, float) else str(x)


def write_csv(rows: list[dict], columns, out: str | None) -> None:
    buf = _io.StringIO()
    buf.write(f"# generated {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(float(row[c])) for c in columns])
    _emit(buf.getvalue(), out)


def write_json(obj, out: str | None) -> None:
    _emit(json.dumps(obj, indent=2, default=_json_default) + "\n", out)


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _opt_cfg(args, **kw) -> OptimizerConfig:
    return OptimizerConfig(starts=args.starts, function_tolerance=args.tol, seed=args.seed, **kw)


def _state_and_basis(args):
    rho = kio.load_state(args.input)
    a = parse_basis(args.basis, rho.dim, rho.subsystem_dims)
    return rho, a


def cmd_kd(args) -> int:
    rho, a = _state_and_basis(args)
    b = parse_basis(args.second, rho.dim)
    kd = kd_distribution(rho, a, b)
    write_json(kio.kd_to_dict(kd) | {"functionals": asdict(functionals(kd))}, args.out)
    return 0


def cmd_coherence(args) -> int:
    rho, a = _state_and_basis(args)
    cfg = _opt_cfg(args, mode=args.mode, unconstrained=args.unconstrained)
    rep = optimize_coherence(rho, a, args.quantity, cfg)
    write_json(rep.to_dict(), args.out)
    print(f"{args.quantity} = {rep.value:.6g}  converged = {rep.converged}", file=sys.stderr)
    for row in rep.best_basis.columns:
        print("  " + "  ".join(f"{z.real:+.6g}{z.imag:+.6g}j" for z in row), file=sys.stderr)
    return 0


def cmd_bounds(args) -> int:
    rho, a = _state_and_basis(args)
    cfg = _opt_cfg(args, mode=args.mode, unconstrained=args.unconstrained)
    rep = verify_bounds(rho, a, optimize_coherence(rho, a, "ncl", cfg))
    write_json(rep.to_dict(), args.out)
    return 0 if rep.all_satisfied else 1


def cmd_figure1(args) -> int:
    rows = qubit_sweep(args.r, args.theta_points, args.grid_n, threads())
    write_csv(rows, FIG1_COLUMNS, args.out)
    ok = all(r["C_KD_NCl"] <= min(r["C_l1"], r["purity_bound"]) + 1e-6 for r in rows)
    return 0 if ok else 1


def cmd_figure2(args) -> int:
    rows = qubit_sweep(args.r, args.theta_points, args.grid_n, threads())
    write_csv(rows, FIG2_COLUMNS, args.out)
    return 0 if all(r["C_KD_NCl"] <= r["MU"] + 1e-6 for r in rows) else 1


def cmd_examples(args) -> int:
    items = run_examples(_opt_cfg(args))
    ok = all(i.passed for i in items)
    write_json({"all_passed": ok, "items": [asdict(i) for i in items]}, args.out)
    return 0 if ok else 1


def cmd_susceptibility(args) -> int:
    pair = kio.load_pair(args.input)
    obs = kio.decode_matrix(json.loads(Path(args.observable).read_text())["matrix"]) if args.observable \
        else np.diag(np.arange(pair.dim, dtype=float)).astype(complex)
    res = sld(pair)
    a_basis = OrthonormalBasis.eigenbasis(obs)[1]
    c = optimize_coherence(pair.rho0, a_basis, "ncl", _opt_cfg(args)).value
    chk = normalized_bound_check(obs, pair, c)
    out = {
        "chi": static_susceptibility(obs, pair),
        "qfi": qfi(pair),
        "sld_residual": res.residual,
        "support_cutoff_used": res.support_cutoff_used,
        "decomposition_discrepancy": kd_decomposition_check(obs, pair),
        "coherence_ncl": c,
        "normalized_bound": asdict(chk),
    }
    write_json(out, args.out)
    return 0 if chk.holds else 1


def cmd_estimate(args) -> int:
    rho, a = _state_and_basis(args)
    model = SamplingModel(args.shots, seed=args.seed)
    spsa = SPSAConfig(iterations=args.iterations, a=args.gain)
    trace = variational_estimate(rho, a, _opt_cfg(args), model, spsa)
    if args.format == "csv":
        rows = [{"iteration": k, "value": v} for k, (_, v) in enumerate(trace.iterations)]
        write_csv(rows, ("iteration", "value"), args.out)
        if args.out:
            write_json(trace.to_dict() | {"values": None}, str(Path(args.out).with_suffix(".json")))
    else:
        write_json(trace.to_dict(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output path (stdout when omitted)")
    common.add_argument("--starts", type=int, default=32, help="optimizer restarts")
    common.add_argument("--tol", type=float, default=1e-8, help="optimizer function tolerance")
    common.add_argument("--format", choices=("csv", "json"), default=None)

    p = argparse.ArgumentParser(prog="kdcoh", description="Kirkwood-Dirac quasiprobability coherence tools")
    sub = p.add_subparsers(dest="command", required=True)

    def state_cmd(name, help_):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("input", help="state JSON file")
        s.add_argument("--basis", default="computational", help="incoherent basis spec")
        return s

    s = state_cmd("kd", "KD table of a state over two bases")
    s.add_argument("--second", default="fourier", help="second basis spec")
    for name, help_ in (("coherence", "optimized KD coherence"), ("bounds", "coherence and its upper bounds")):
        s = state_cmd(name, help_)
        s.add_argument("--mode", choices=("full", "product"), default="full")
        s.add_argument("--unconstrained", action="store_true")
        if name == "coherence":
            s.add_argument("--quantity", choices=("ncl", "nre"), default="ncl")
    for name in ("figure1", "figure2"):
        s = sub.add_parser(name, parents=[common], help=f"qubit sweep CSV ({name})")
        s.add_argument("--r", type=float, nargs="+", default=[1.0, 0.8, 0.5, 0.0])
        s.add_argument("--theta-points", type=int, default=41)
        s.add_argument("--grid-n", type=int, default=500)
    sub.add_parser("examples", parents=[common], help="recompute the worked examples, JSON verdicts")
    s = sub.add_parser("susceptibility", parents=[common], help="SLD, susceptibility and QFI of a state family")
    s.add_argument("input", help="JSON with rho0 and either drho or generator H")
    s.add_argument("--observable", default=None, help="JSON file with a Hermitian 'matrix'")
    s = state_cmd("estimate", "SPSA estimate under simulated shot noise")
    s.add_argument("--shots", type=int, default=100_000)
    s.add_argument("--iterations", type=int, default=300)
    s.add_argument("--gain", type=float, default=SPSAConfig.a, help="SPSA step gain a")
    return p


HANDLERS = {
    "kd": cmd_kd, "coherence": cmd_coherence, "bounds": cmd_bounds, "figure1": cmd_figure1,
    "figure2": cmd_figure2, "examples": cmd_examples, "susceptibility": cmd_susceptibility,
    "estimate": cmd_estimate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command in ("figure1", "figure2") else "json"
    if args.command in ("figure1", "figure2") and args.format != "csv":
        print("error: figure commands emit CSV only", file=sys.stderr)
        return 2
    try:
        RunConfig(args.command, getattr(args, "input", "") or "", args.out or "", args.seed, args.starts,
                  args.tol, args.format, getattr(args, "theta_points", 41), getattr(args, "r", [1.0]))
        return HANDLERS[args.command](args)
    except (DomainError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
