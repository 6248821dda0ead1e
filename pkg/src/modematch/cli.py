"""Command-line interface.

Subcommands: check, synth, williamson, euler, entropy, prepare, verify.
Machine-readable output is one JSON object per line on stdout; a short
human-readable table goes to stderr.  Exit codes: 0 success or feasible,
1 infeasible or violations found, 2 input error, 3 internal verification
failure.  MODEMATCH_TOL_INEQ overrides the inequality tolerance.
"""

import argparse
import hashlib
import json
import sys
import time

import numpy as np

from . import config
from .circuits import (
    circuit_from_mixed,
    circuit_from_pure,
    parse_circuit,
    replay_circuit,
    serialize_circuit,
)
from .core import (
    CovarianceMatrix,
    SymplecticTransform,
    euler_decompose,
    interleaved_diagonal,
    symplectic_eigenvalues,
    williamson,
)
from .entropy import entropy_report, entropy_s
from .errors import InfeasibleInput, ModeMatchError
from .marginals import check_matrix_consistency, check_mixed, check_pure, local_diagonal
from .matrixio import MatrixParseError, read_matrix, write_matrix
from .synthesis import replay_trace, synthesize
from .verify import run_verification

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


class _InputError(Exception):
    pass


def _parse_vector(raw: str) -> np.ndarray:
    try:
        values = np.array([float(tok) for tok in raw.split(",") if tok.strip() != ""])
    except ValueError as exc:
        raise _InputError(f"could not parse vector {raw!r}: {exc}") from None
    if values.size == 0:
        raise _InputError(f"empty vector {raw!r}")
    return values


def _digest(*parts) -> str:
    h = hashlib.sha256()
    for part in parts:
        if isinstance(part, np.ndarray):
            h.update(np.ascontiguousarray(part, dtype=float).tobytes())
        else:
            h.update(str(part).encode())
        h.update(b"|")
    return h.hexdigest()[:16]


def _emit(record: dict, table_lines=None):
    print(json.dumps(record))
    if table_lines:
        print("\n".join(table_lines), file=sys.stderr)


def _tol_dict(tol: config.Tolerances) -> dict:
    return {
        "tol_ineq": tol.tol_ineq,
        "tol_recon": tol.tol_recon,
        "tol_psd": tol.tol_psd,
    }


def _verdict_record(command: str, verdict, digest: str, tol, elapsed: float,
                    extra=None) -> dict:
    record = {
        "command": command,
        "digest": digest,
        "feasible": verdict.feasible,
        "slacks": [{"constraint": s.label(), "slack": s.slack} for s in verdict.slacks],
        "tolerances": _tol_dict(tol),
        "elapsed_s": round(elapsed, 6),
    }
    if extra:
        record.update(extra)
    return record


def _verdict_table(verdict) -> list[str]:
    lines = [f"{'constraint':<20} {'slack':>24} status"]
    for s in verdict.slacks:
        status = "ok" if s.slack >= -verdict.tol_ineq else "VIOLATED"
        lines.append(f"{s.label():<20} {s.slack:>24.17g} {status}")
    lines.append("feasible" if verdict.feasible else "infeasible")
    return lines


def _load_covariance(path, tol) -> CovarianceMatrix:
    mf = read_matrix(path)
    if mf.kind != "covariance":
        raise _InputError(f"{path}: expected kind covariance, found {mf.kind}")
    try:
        return CovarianceMatrix(mf.values, tol=tol)
    except (ModeMatchError, ValueError) as exc:
        raise _InputError(f"{path}: {exc}") from None


def cmd_check(args, tol) -> int:
    start = time.perf_counter()
    if args.matrix:
        cov = _load_covariance(args.matrix, tol)
        verdict = check_matrix_consistency(cov, tol)
        digest = _digest("check", cov.entries)
    elif args.pure:
        if args.b is None:
            raise _InputError("--pure requires --b")
        b = np.sort(_parse_vector(args.b))
        verdict = check_pure(b, tol)
        digest = _digest("check-pure", b)
    else:
        if args.c is None or args.d is None:
            raise _InputError("provide --c and --d, or --b with --pure, or --matrix")
        c = np.sort(_parse_vector(args.c))
        d = np.sort(_parse_vector(args.d))
        verdict = check_mixed(c, d, tol)
        digest = _digest("check-mixed", c, d)
    record = _verdict_record("check", verdict, digest, tol, time.perf_counter() - start)
    _emit(record, _verdict_table(verdict))
    return EXIT_OK if verdict.feasible else EXIT_INFEASIBLE


def cmd_synth(args, tol) -> int:
    start = time.perf_counter()
    c = np.sort(_parse_vector(args.c))
    d = np.sort(_parse_vector(args.d))
    try:
        trace = synthesize(c, d, tol)
    except InfeasibleInput as exc:
        _emit({"command": "synth", "feasible": False, "error": str(exc),
               "tolerances": _tol_dict(tol)})
        return EXIT_INFEASIBLE
    final = trace.final_matrix.entries
    scale = max(1.0, float(np.max(np.abs(final))))

    # self-verification before anything is written
    _, d_out = williamson(trace.final_matrix, tol)
    c_out = local_diagonal(trace.final_matrix, tol).values.values
    replay_defect = float(np.max(np.abs(replay_trace(trace) - final)))
    defect = max(float(np.max(np.abs(d_out.values - d))),
                 float(np.max(np.abs(c_out - c))), replay_defect / scale)
    if defect > tol.tol_recon:
        _emit({"command": "synth", "error": f"self-verification failed: defect {defect:.3g}"})
        return EXIT_INTERNAL

    write_matrix(args.out, final, "covariance")
    if args.emit_trace:
        with open(args.emit_trace, "w") as fh:
            for step in trace.steps:
                fh.write(json.dumps(_step_record(step)) + "\n")
    record = {
        "command": "synth",
        "digest": _digest("synth", c, d),
        "feasible": True,
        "out": args.out,
        "n": int(c.size),
        "verification_defect": defect,
        "tolerances": _tol_dict(tol),
        "elapsed_s": round(time.perf_counter() - start, 6),
    }
    _emit(record, [f"wrote {args.out} (n={c.size}, defect {defect:.3g})"])
    return EXIT_OK


def _step_record(step) -> dict:
    from .synthesis import CongruenceStep, DirectSumStep, TwoModeStep

    if isinstance(step, DirectSumStep):
        return {"step": "direct_sum", "modes": list(step.modes),
                "values": [f"{v:.17g}" for v in step.values]}
    if isinstance(step, TwoModeStep):
        return {"step": "two_mode", "modes": list(step.modes),
                "locals": [f"{v:.17g}" for v in step.locals_],
                "couplings": [f"{v:.17g}" for v in step.couplings]}
    if isinstance(step, CongruenceStep):
        return {"step": "congruence", "modes": list(step.modes),
                "transform": [[f"{v:.17g}" for v in row] for row in step.transform]}
    raise TypeError(f"unknown step {step!r}")


def cmd_williamson(args, tol) -> int:
    start = time.perf_counter()
    cov = _load_covariance(args.matrix, tol)
    S, d = williamson(cov, tol)
    D = interleaved_diagonal(d.values)
    defect = float(np.max(np.abs(S.entries @ cov.entries @ S.entries.T - D)))
    write_matrix(f"{args.out_prefix}.S.mat", S.entries, "symplectic")
    write_matrix(f"{args.out_prefix}.D.mat", D, "covariance")
    record = {
        "command": "williamson",
        "digest": _digest("williamson", cov.entries),
        "d": list(d.values),
        "reconstruction_defect": defect,
        "files": [f"{args.out_prefix}.S.mat", f"{args.out_prefix}.D.mat"],
        "tolerances": _tol_dict(tol),
        "elapsed_s": round(time.perf_counter() - start, 6),
    }
    _emit(record, [f"d = {d.values}", f"defect {defect:.3g}"])
    return EXIT_OK


def cmd_euler(args, tol) -> int:
    start = time.perf_counter()
    mf = read_matrix(args.matrix)
    if mf.kind != "symplectic":
        raise _InputError(f"{args.matrix}: expected kind symplectic, found {mf.kind}")
    try:
        S = SymplecticTransform(mf.values, tol=tol)
    except ModeMatchError as exc:
        raise _InputError(f"{args.matrix}: {exc}") from None
    factors = euler_decompose(S, tol)
    defect = float(np.max(np.abs(factors.reconstruct() - S.entries)))
    write_matrix(f"{args.out_prefix}.O.mat", factors.O.entries, "symplectic")
    write_matrix(f"{args.out_prefix}.Q.mat", factors.q_matrix(), "symplectic")
    write_matrix(f"{args.out_prefix}.V.mat", factors.V.entries, "symplectic")
    record = {
        "command": "euler",
        "digest": _digest("euler", S.entries),
        "z": list(factors.z),
        "reconstruction_defect": defect,
        "files": [f"{args.out_prefix}.{part}.mat" for part in ("O", "Q", "V")],
        "tolerances": _tol_dict(tol),
        "elapsed_s": round(time.perf_counter() - start, 6),
    }
    _emit(record, [f"z = {factors.z}", f"defect {defect:.3g}"])
    return EXIT_OK


def cmd_entropy(args, tol) -> int:
    start = time.perf_counter()
    gaussian_entropy = None
    if args.matrix:
        cov = _load_covariance(args.matrix, tol)
        report = entropy_report(gamma=cov, tol=tol)
        d = symplectic_eigenvalues(cov, tol).values
        gaussian_entropy = float(sum(entropy_s(v, tol) for v in d))
        digest = _digest("entropy", cov.entries)
    else:
        if args.c is None:
            raise _InputError("provide --c or --matrix")
        c = np.sort(_parse_vector(args.c))
        if np.any(c < 1.0 - tol.tol_psd):
            raise _InputError("entropy requires local values c >= 1")
        report = entropy_report(c=c, tol=tol)
        digest = _digest("entropy", c)
    record = {
        "command": "entropy",
        "digest": digest,
        "per_mode_bits": list(report.per_mode_entropies),
        "total_local_sum_bits": report.total_local_sum,
        "global_upper_bound_bits": report.global_upper_bound,
        "purity_consistent": report.purity_consistent,
        "tolerances": _tol_dict(tol),
        "elapsed_s": round(time.perf_counter() - start, 6),
    }
    table = [f"per-mode entropies (bits): {report.per_mode_entropies}",
             f"global entropy bound (bits): {report.global_upper_bound:.12g}"]
    if gaussian_entropy is not None:
        record["gaussian_global_entropy_bits"] = gaussian_entropy
        table.append(f"Gaussian global entropy (bits): {gaussian_entropy:.12g}")
    _emit(record, table)
    return EXIT_OK


def cmd_prepare(args, tol) -> int:
    start = time.perf_counter()
    if args.matrix:
        cov = _load_covariance(args.matrix, tol)
        d = symplectic_eigenvalues(cov, tol).values
        if np.max(np.abs(d - 1.0)) <= tol.tol_psd:
            circuit = circuit_from_pure(cov, tol)
        else:
            c_local = local_diagonal(cov, tol).values
            trace = synthesize(c_local, d, tol)
            # preparation targets the matrix's own normal form witness
            circuit = circuit_from_mixed(trace, tol)
            cov = trace.final_matrix
        target = cov.entries
        digest = _digest("prepare", target)
    else:
        if args.c is None or args.d is None:
            raise _InputError("provide --matrix, or --c and --d")
        c = np.sort(_parse_vector(args.c))
        d = np.sort(_parse_vector(args.d))
        try:
            trace = synthesize(c, d, tol)
        except InfeasibleInput as exc:
            _emit({"command": "prepare", "feasible": False, "error": str(exc)})
            return EXIT_INFEASIBLE
        target = trace.final_matrix.entries
        if np.max(np.abs(d - 1.0)) <= tol.tol_psd:
            circuit = circuit_from_pure(trace.final_matrix, tol)
        else:
            circuit = circuit_from_mixed(trace, tol)
        digest = _digest("prepare", c, d)

    scale = max(1.0, float(np.max(np.abs(target))))
    defect = float(np.max(np.abs(replay_circuit(circuit) - target))) / scale
    if defect > tol.tol_recon:
        _emit({"command": "prepare", "error": f"replay verification failed: defect {defect:.3g}"})
        return EXIT_INTERNAL
    with open(args.out, "w") as fh:
        fh.write(serialize_circuit(circuit))
    record = {
        "command": "prepare",
        "digest": digest,
        "out": args.out,
        "source": circuit.source,
        "squeezers": [sq.z for sq in circuit.squeezers],
        "passive_elements": len(circuit.passive_ops),
        "replay_defect": defect,
        "tolerances": _tol_dict(tol),
        "elapsed_s": round(time.perf_counter() - start, 6),
    }
    _emit(record, [f"wrote {args.out} ({len(circuit.passive_ops)} passive elements, "
                   f"replay defect {defect:.3g})"])
    return EXIT_OK


def cmd_replay(args, tol) -> int:
    start = time.perf_counter()
    with open(args.circuit) as fh:
        circuit = parse_circuit(fh.read())
    result = replay_circuit(circuit)
    write_matrix(args.out, result, "covariance")
    record = {
        "command": "replay",
        "out": args.out,
        "n": circuit.n,
        "elapsed_s": round(time.perf_counter() - start, 6),
    }
    _emit(record, [f"wrote {args.out}"])
    return EXIT_OK


def _flip_sign_corruption(matrix: np.ndarray) -> np.ndarray:
    out = matrix.copy()
    off = np.abs(np.triu(out, k=1))
    i, j = np.unravel_index(np.argmax(off), off.shape)
    if off[i, j] > 0:
        out[i, j] = -out[i, j]
        out[j, i] = -out[j, i]
    else:
        out[0, 0] *= 2.0
    return out


def cmd_verify(args, tol) -> int:
    corrupt = _flip_sign_corruption if args.self_check_corrupt else None
    summary = run_verification(args.trials, args.n_max, seed=args.seed,
                               squeeze_bound=args.squeeze_bound, tol=tol,
                               corrupt=corrupt)
    record = {
        "command": "verify",
        "trials": args.trials,
        "n_max": args.n_max,
        "seed": args.seed,
        "squeeze_bound": args.squeeze_bound,
        "violations": summary.total_violations,
        "suites": [
            {"suite": s.name, "trials": s.trials, "violations": s.violations,
             "worst_margin": None if s.trials == 0 else s.worst}
            for s in summary.suites
        ],
        "tolerances": _tol_dict(tol),
        "elapsed_s": round(summary.elapsed_s, 6),
    }
    table = [f"{'suite':<34} {'trials':>7} {'violations':>11} {'worst margin':>14}"]
    for s in summary.suites:
        worst = "-" if s.trials == 0 else f"{s.worst:.3g}"
        table.append(f"{s.name:<34} {s.trials:>7} {s.violations:>11} {worst:>14}")
    table.append(f"total violations: {summary.total_violations}")
    _emit(record, table)
    return EXIT_OK if summary.total_violations == 0 else EXIT_INFEASIBLE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modematch",
        description="Feasibility, synthesis, and preparation of Gaussian "
                    "covariance matrices with prescribed symplectic spectra "
                    "and local mode data.",
    )
    parser.add_argument("--tol-ineq", type=float, default=None,
                        help="override the inequality slack tolerance")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="feasibility of (c, d), a pure b vector, or a matrix file")
    p.add_argument("--c", help="comma-separated local values")
    p.add_argument("--d", help="comma-separated symplectic spectrum")
    p.add_argument("--b", help="comma-separated local excitations (with --pure)")
    p.add_argument("--pure", action="store_true", help="check b against a pure global state")
    p.add_argument("--matrix", help="covariance matrix file to self-check")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("synth", help="construct a matrix realising (c, d)")
    p.add_argument("--c", required=True)
    p.add_argument("--d", required=True)
    p.add_argument("--out", required=True, help="output matrix file")
    p.add_argument("--emit-trace", help="write the build step log to this path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("williamson", help="normal-mode decomposition of a covariance file")
    p.add_argument("--matrix", required=True)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_williamson)

    p = sub.add_parser("euler", help="passive-squeeze-passive factorisation of a symplectic file")
    p.add_argument("--matrix", required=True)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_euler)

    p = sub.add_parser("entropy", help="per-mode entropies and the global bound")
    p.add_argument("--c")
    p.add_argument("--matrix")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("prepare", help="emit a preparation circuit for a target")
    p.add_argument("--matrix")
    p.add_argument("--c")
    p.add_argument("--d")
    p.add_argument("--out", required=True, help="output circuit file")
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("replay", help="replay a circuit file to a covariance matrix")
    p.add_argument("--circuit", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("verify", help="run the sampled property suites")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--squeeze-bound", type=float, default=5.0)
    p.add_argument("--self-check-corrupt", action="store_true",
                   help="inject a known corruption; the run must then exit 1")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = config.from_environment()
        if args.tol_ineq is not None:
            if args.tol_ineq <= 0:
                raise _InputError("--tol-ineq must be positive")
            tol = tol.with_tol_ineq(args.tol_ineq)
        return args.func(args, tol)
    except (_InputError, MatrixParseError, ModeMatchError, ValueError, OSError) as exc:
        print(json.dumps({"error": str(exc)}))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
