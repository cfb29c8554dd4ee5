"""Command-line front end: sample, density, verify, constants.

Exit codes: 0 success, 1 runtime failure, 2 usage or parameter-domain error.

Matrix payload layout (documented in every output header): row-major entries,
each entry expanded to its real components in the fixed basis order
(1, i, j, k); Hermitian samples are written as full square matrices.  With
``--eigenvalues`` a row holds the m descending eigenvalues (angles for the
fourier family).  CSV rows follow RFC 4180; the file starts with one ``#``
metadata line carrying the spec, seed and library version as JSON.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .algebra import Algebra, DMatrix, HermitianMatrix
from .densities import (
    EnsembleSpec,
    SS_FAMILIES,
    SS_LAGUERRE_FAMILIES,
    VS_FAMILIES,
    VS_LAGUERRE_FAMILIES,
    canonical_family,
    log_density_element,
    log_density_eigenvalues,
    log_density_fourier_angles,
    log_density_laguerre,
)
from .samplers import (
    RngStream,
    batch_eigvalsh,
    fourier_batch,
    hermite_ensemble_batch,
    laguerre_batch,
    quotient_batch,
    radial_batch,
)
from .special import (
    fourier_constant_log,
    mv_beta_log,
    mv_gamma_log,
    stiefel_log_volume,
    symmetric_space_log_volume,
    tau,
)
from .verify import SUITE_NAMES, build_suite, reports_to_jsonl, run_suite, summary_table

NEG_INF_TOKEN = "-inf"


class UsageError(Exception):
    pass


def _spec_from_args(args) -> EnsembleSpec:
    try:
        return EnsembleSpec(args.family, args.beta, args.m, n=args.n,
                            nu=args.nu, q=args.q)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _needs_hermitian(spec: EnsembleSpec) -> bool:
    if spec.family in VS_LAGUERRE_FAMILIES + SS_LAGUERRE_FAMILIES:
        return True
    return spec.family in VS_FAMILIES and spec.n is None


def _sample_rows(spec: EnsembleSpec, n_samples: int, rng, eigenvalues: bool):
    """Sample batch -> (rows array, layout description)."""
    f, m, beta = spec.family, spec.m, spec.beta
    if f == "fourier":
        ang = fourier_batch(m, beta, rng, n_samples)
        return ang, f"{m} eigenangles in (-pi, pi], ascending"
    if f in VS_FAMILIES:
        data = radial_batch(spec, rng, n_samples)
    elif f in VS_LAGUERRE_FAMILIES:
        data = laguerre_batch(spec, rng, n_samples)
    elif f in SS_FAMILIES + SS_LAGUERRE_FAMILIES:
        nu_int = int(spec.nu)
        if nu_int != spec.nu or nu_int < m:
            raise UsageError(f"sampling family {f} needs integer nu >= m, got nu={spec.nu}")
        data = quotient_batch(f, m, spec.require_n(), nu_int, beta, rng, n_samples)
    else:
        raise UsageError(f"no sampler for family {f}")
    if eigenvalues:
        if data.shape[1] != data.shape[2]:
            from .algebra import embed
            e = embed(data, beta)
            w = np.linalg.eigvalsh(np.conj(e.transpose(0, 2, 1)) @ e)[:, ::-1]
            if beta == 4:
                w = w[:, ::2]
            return np.ascontiguousarray(w), f"{m} descending eigenvalues of A*A"
        return batch_eigvalsh(data, beta), f"{m} descending eigenvalues"
    n_rows, n_cols = data.shape[1], data.shape[2]
    layout = (f"{n_rows}x{n_cols} matrix, row-major entries, {beta} components "
              f"per entry (basis 1,i,j,k)")
    return data.reshape(n_samples, -1), layout


def cmd_sample(args) -> int:
    spec = _spec_from_args(args)
    if args.seed is None:
        seed = int.from_bytes(np.random.SeedSequence().entropy.to_bytes(16, "little")[:4],
                              "little")
    else:
        seed = args.seed
    rng = RngStream(seed).generator("sample")
    try:
        rows, layout = _sample_rows(spec, args.n_samples, rng, args.eigenvalues)
    except ValueError as e:
        raise UsageError(str(e)) from None
    meta = {
        "command": "sample", "family": spec.family, "beta": spec.beta, "m": spec.m,
        "n": spec.n, "nu": spec.nu, "q": spec.q, "seed": seed,
        "n_samples": args.n_samples, "layout": layout, "version": __version__,
    }
    _write_rows(args.out, rows, meta, args.format)
    return 0


def _write_rows(path: str | None, rows: np.ndarray, meta: dict, fmt: str) -> None:
    if fmt == "json":
        payload = {"meta": meta, "rows": [list(map(float, r)) for r in rows]}
        text = json.dumps(payload, indent=None, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"c{i}" for i in range(rows.shape[1])])
        for r in rows:
            writer.writerow([repr(float(x)) for x in r])
        text = buf.getvalue()
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _read_rows(path: str) -> np.ndarray:
    if path == "-":
        text = sys.stdin.read()
    else:
        with open(path) as fh:
            text = fh.read()
    text = text.strip()
    if text.startswith("{"):
        return np.asarray(json.loads(text)["rows"], float)
    rows = []
    for rec in csv.reader(io.StringIO(text)):
        if not rec or rec[0].startswith("#"):
            continue
        try:
            rows.append([float(x) for x in rec])
        except ValueError:
            continue  # header row
    if not rows:
        raise UsageError("input file holds no numeric rows")
    return np.asarray(rows, float)


def _row_to_matrix(spec: EnsembleSpec, row: np.ndarray):
    alg = Algebra.from_beta(spec.beta)
    m, beta = spec.m, spec.beta
    if _needs_hermitian(spec):
        expected = beta * m * m
        if row.size != expected:
            raise ValueError(f"expected {expected} coordinates, got {row.size}")
        return HermitianMatrix(alg, row.reshape(m, m, beta), tol=1e-8)
    n = spec.require_n()
    expected = beta * n * m
    if row.size != expected:
        raise ValueError(f"expected {expected} coordinates, got {row.size}")
    return DMatrix.from_coords(alg, n, m, row)


def cmd_density(args) -> int:
    spec = _spec_from_args(args)
    rows = _read_rows(args.input)
    out_lines = []
    for idx, row in enumerate(rows):
        try:
            if spec.family == "fourier":
                v = log_density_fourier_angles(spec.m, spec.beta, row)
            elif args.eigenvalues:
                v = log_density_eigenvalues(spec, np.sort(row)[::-1]
                                            if args.sort else row)
            else:
                X = _row_to_matrix(spec, row)
                if spec.family in VS_LAGUERRE_FAMILIES + SS_LAGUERRE_FAMILIES:
                    v = log_density_laguerre(spec, X)
                else:
                    v = log_density_element(spec, X)
        except ValueError as e:
            print(f"error: row {idx}: {e}", file=sys.stderr)
            return 1
        out_lines.append(NEG_INF_TOKEN if not v.finite else repr(float(v)))
    text = "\n".join(out_lines) + "\n"
    if args.out is None or args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0


def cmd_verify(args) -> int:
    suites = tuple(args.suite.split(",")) if args.suite else SUITE_NAMES
    for s in suites:
        if s not in SUITE_NAMES:
            raise UsageError(f"unknown suite {s!r}; choose from {SUITE_NAMES}")
    betas = tuple(int(b) for b in args.beta.split(",")) if args.beta else (1, 2, 4)
    ms = tuple(int(v) for v in args.m.split(",")) if args.m else (2, 3)
    families = None
    if args.family:
        families = tuple(canonical_family(f) for f in args.family.split(","))
    entries = build_suite(suites=suites, betas=betas, ms=ms, quick=args.quick,
                          families=families)
    if args.glob:
        import fnmatch
        entries = [(n, f) for n, f in entries if fnmatch.fnmatch(n, args.glob)]
    if not entries:
        raise UsageError("suite selection matched no checks")
    reports = run_suite(entries, seed=args.seed, threads=args.threads)
    jsonl = reports_to_jsonl(reports)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(jsonl)
    else:
        sys.stdout.write(jsonl)
    print(summary_table(reports), file=sys.stderr)
    breaking = [r for r in reports if r.status == "fail"
                and not r.name.startswith("conjecture/")]
    return 1 if breaking else 0


def cmd_constants(args) -> int:
    rows = []
    try:
        if args.gamma:
            rows.append(("log_mv_gamma", float(mv_gamma_log(args.m, args.beta, args.a))))
        if args.beta_fn:
            rows.append(("log_mv_beta", float(mv_beta_log(args.m, args.beta, args.a,
                                                          args.b))))
        if args.stiefel:
            rows.append(("log_stiefel_volume",
                         float(stiefel_log_volume(args.m, args.n, args.beta))))
        if args.fourier:
            rows.append(("log_fourier_constant",
                         float(fourier_constant_log(args.m, args.beta))))
        if args.symmetric_space:
            rows.append(("log_symmetric_space_volume",
                         float(symmetric_space_log_volume(args.m, args.beta))))
        if args.tau:
            rows.append(("tau", tau(args.beta, args.m)))
    except ValueError as e:
        raise UsageError(str(e)) from None
    if not rows:
        raise UsageError("select at least one constant "
                         "(--gamma/--beta-fn/--stiefel/--fourier/--symmetric-space/--tau)")
    for name, val in rows:
        print(f"{name}\t{val!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rmx",
                                description="random matrix ensembles over the real "
                                            "normed division algebras")
    sub = p.add_subparsers(dest="command", required=True)

    def add_spec_args(sp, need_family=True):
        sp.add_argument("--family", required=need_family,
                        help="hermite, t1, gegenbauer1, t2, gegenbauer2, laguerre, "
                             "t_laguerre1, gegenbauer_laguerre1, modified_jacobi, "
                             "jacobi, fourier")
        sp.add_argument("--beta", type=int, default=1, help="1, 2, 4 (8 scalar-only)")
        sp.add_argument("--m", type=int, required=True)
        sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--nu", type=float, default=None)
        sp.add_argument("--q", type=float, default=None)

    ps = sub.add_parser("sample", help="draw ensemble samples")
    add_spec_args(ps)
    ps.add_argument("--n-samples", type=int, default=100)
    ps.add_argument("--seed", type=int, default=None,
                    help="omit for OS entropy (recorded in the output header)")
    ps.add_argument("--eigenvalues", action="store_true",
                    help="emit descending eigenvalues instead of coordinates")
    ps.add_argument("--out", default=None, help="output path (default stdout)")
    ps.add_argument("--format", choices=("csv", "json"), default="csv")
    ps.set_defaults(func=cmd_sample)

    pd = sub.add_parser("density", help="evaluate log-densities row by row")
    add_spec_args(pd)
    pd.add_argument("--input", required=True, help="CSV/JSON rows ('-' for stdin)")
    pd.add_argument("--eigenvalues", action="store_true",
                    help="rows hold eigenvalues, not matrix coordinates")
    pd.add_argument("--sort", action="store_true",
                    help="sort eigenvalue rows descending before evaluation")
    pd.add_argument("--out", default=None)
    pd.set_defaults(func=cmd_density)

    pv = sub.add_parser("verify", help="run the verification suites")
    pv.add_argument("--suite", default=None,
                    help=f"comma list from {','.join(SUITE_NAMES)} (default all)")
    pv.add_argument("--family", default=None, help="restrict to these families")
    pv.add_argument("--beta", default=None, help="comma list, default 1,2,4")
    pv.add_argument("--m", default=None, help="comma list for jacobian sizes, default 2,3")
    pv.add_argument("--glob", default=None, help="filter checks by name glob")
    pv.add_argument("--seed", type=int, required=True,
                    help="suite seed (required: verification must be reproducible)")
    pv.add_argument("--threads", type=int, default=None,
                    help="worker threads (default RMX_THREADS or 1)")
    pv.add_argument("--quick", action="store_true", help="reduced budgets")
    pv.add_argument("--report", default=None, help="write JSONL report here")
    pv.set_defaults(func=cmd_verify)

    pc = sub.add_parser("constants", help="print normalization constants")
    pc.add_argument("--m", type=int, default=1)
    pc.add_argument("--n", type=int, default=None)
    pc.add_argument("--beta", type=int, default=1)
    pc.add_argument("--a", type=float, default=None)
    pc.add_argument("--b", type=float, default=None)
    pc.add_argument("--gamma", action="store_true")
    pc.add_argument("--beta-fn", action="store_true")
    pc.add_argument("--stiefel", action="store_true")
    pc.add_argument("--fourier", action="store_true")
    pc.add_argument("--symmetric-space", action="store_true")
    pc.add_argument("--tau", action="store_true")
    pc.set_defaults(func=cmd_constants)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
