"""Command line entry point.

Exit codes: 0 success, 1 usage error, 2 bad input data, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .bootstrap import BootstrapConfig
from .classical import run_classical_test
from .conventions import Series
from .errors import CorrBreakError, DataError
from .harness import EXPERIMENTS, reproduce
from .io import TRANSFORMS, dumps, file_digest, ingest, make_manifest, read_values
from .relevant import RelevantConfig, run_relevant_test
from .segmentation import pairwise_relevant, segment
from .simulation import INNOVATIONS, MODEL_NAMES, get_model, simulate
from .smoothing import KERNELS, fit_mean
from .tuning import Tuning
from .varbreak import VarBreakConfig, estimate_variance_break

SEGMENT_CAVEAT = ("p-values are not adjusted for the number of segments tested; "
                  "treat them as per-segment evidence")
EXAMPLE_URL = "https://www.federalreserve.gov/releases/h10/hist/"
EXAMPLE_ROWS = 1154


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _auto_float(text):
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or a number, got {text!r}")


def _auto_int(text):
    if text == "auto":
        return "auto"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or an integer, got {text!r}")


def _add_input(p):
    p.add_argument("--input", required=True, help="CSV file with one value column")
    p.add_argument("--column", help="value column name when the file has several")
    p.add_argument("--transform", choices=TRANSFORMS, default="none")


def _add_smoothing(p):
    p.add_argument("--bandwidth-mean", type=_auto_float, default="auto")
    p.add_argument("--bandwidth-var", type=_auto_float, default="auto")
    p.add_argument("--variance", choices=("piecewise", "smooth"), default="piecewise")
    p.add_argument("--kernel", choices=sorted(KERNELS), default="epanechnikov")
    p.add_argument("--L", type=int, default=None, help="variance-break window")
    p.add_argument("--zeta", type=float, default=0.2, help="variance-break trimming")
    p.add_argument("--standardization", choices=("single", "product"), default="single")


def _add_test(p):
    p.add_argument("--lags", type=_int_list, default=[1])
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--boot", type=int, default=2000, help="bootstrap replications B")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window", type=_auto_int, default="auto")


def _add_output(p):
    p.add_argument("--out", choices=("json", "csv"), default="json")
    p.add_argument("--output", help="write here instead of stdout")


def build_parser():
    parser = _Parser(prog="corrbreak", description="Change point tests for correlations "
                     "of non-stationary time series.")
    parser.add_argument("--version", action="version", version=f"corrbreak {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="simulate a benchmark model, CSV with header t,y")
    p.add_argument("--model", choices=MODEL_NAMES, default="I")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--innovations", choices=INNOVATIONS, default=None)
    p.add_argument("--output")

    p = sub.add_parser("detect", help="test for constant (or zero) lag correlations")
    _add_input(p), _add_smoothing(p), _add_test(p), _add_output(p)
    p.add_argument("--zero-test", action="store_true", help="test for zero correlations")

    p = sub.add_parser("relevant", help="test for a relevant change in lag correlations")
    _add_input(p), _add_smoothing(p), _add_test(p), _add_output(p)
    p.add_argument("--delta", type=_float_list, required=True)
    p.add_argument("--bias-correct", choices=("auto", "on", "off"), default="auto")
    p.add_argument("--unsigned", action="store_true", help="drop the sign factor")

    p = sub.add_parser("variance-break", help="locate the abrupt variance change")
    _add_input(p), _add_output(p)
    p.add_argument("--bandwidth-mean", type=_auto_float, default="auto")
    p.add_argument("--kernel", choices=sorted(KERNELS), default="epanechnikov")
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--zeta", type=float, default=0.2)

    p = sub.add_parser("segment", help="binary segmentation for several breaks")
    _add_input(p), _add_smoothing(p), _add_test(p), _add_output(p)
    p.add_argument("--min-len", type=int, default=100)
    p.add_argument("--delta", type=_float_list, default=None,
                   help="also run relevant tests on consecutive segment pairs")
    p.add_argument("--bias-correct", choices=("auto", "on", "off"), default="auto")

    p = sub.add_parser("reproduce", help="Monte Carlo rejection rates of a benchmark experiment")
    p.add_argument("experiment", choices=sorted(EXPERIMENTS))
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--boot", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--models", type=lambda s: s.split(","), default=None)
    p.add_argument("--bandwidths", type=lambda s: s.split(","), default=None,
                   help="e.g. 0.1,gcv")
    p.add_argument("--output")

    p = sub.add_parser("rerun", help="re-execute the run recorded in a report's manifest")
    p.add_argument("report", help="JSON report or bare manifest")
    p.add_argument("--input", help="override the recorded input path (digest is checked)")
    p.add_argument("--output")

    p = sub.add_parser("fetch-example", help="where to get the exchange-rate example and how to check it")
    p.add_argument("--verify", help="downloaded CSV to check")
    p.add_argument("--sha256", help="expected digest of the file")
    return parser


# Parameters that define a run, per subcommand; everything else is I/O plumbing.
_SMOOTHING = ("bandwidth_mean", "bandwidth_var", "variance", "kernel", "L", "zeta",
              "standardization")
_TEST = ("lags", "alpha", "boot", "seed", "window")
PARAMS = {
    "detect": _SMOOTHING + _TEST + ("zero_test",),
    "relevant": _SMOOTHING + _TEST + ("delta", "bias_correct", "unsigned"),
    "variance-break": ("bandwidth_mean", "kernel", "L", "zeta"),
    "segment": _SMOOTHING + _TEST + ("min_len", "delta", "bias_correct"),
}


def _tuning(p) -> Tuning:
    return Tuning(mean_bandwidth=p["bandwidth_mean"], variance_bandwidth=p["bandwidth_var"],
                  variance=p["variance"], kernel=p["kernel"], L=p["L"], zeta=p["zeta"],
                  standardization=p["standardization"])


def _boot(p) -> BootstrapConfig:
    return BootstrapConfig(B=p["boot"], window=p["window"], seed=p["seed"], alpha=p["alpha"])


def _bias(flag):
    return {"auto": None, "on": True, "off": False}[flag]


def _deltas(p):
    d = tuple(p["delta"])
    if len(d) == 1 and len(p["lags"]) > 1:
        d = d * len(p["lags"])
    return d


def execute(command: str, params: dict, series: Series) -> dict:
    """Run one analysis and return its report body (without manifest)."""
    if command == "detect":
        mode = "zero" if params["zero_test"] else "constant"
        rep = run_classical_test(series, params["lags"], _tuning(params), _boot(params), mode)
        return rep.to_dict()
    if command == "relevant":
        cfg = RelevantConfig(tuple(params["lags"]), _deltas(params), _bias(params["bias_correct"]),
                             _boot(params), signed=not params["unsigned"])
        return run_relevant_test(series, cfg, _tuning(params)).to_dict()
    if command == "variance-break":
        fit = fit_mean(series, params["bandwidth_mean"], params["kernel"])
        e = fit.residuals
        vb = estimate_variance_break(e * e, VarBreakConfig(params["L"], params["zeta"]))
        body = {"kind": "variance-break", "n": series.n, "mean_bandwidth": fit.bandwidth}
        body.update(vars(vb))
        return body
    if command == "segment":
        seg = segment(series, params["lags"], _tuning(params), _boot(params), params["min_len"])
        body = seg.to_dict()
        body["alpha"] = params["alpha"]
        body["caveat"] = SEGMENT_CAVEAT
        body["pairs"] = []
        if params["delta"]:
            cfg = RelevantConfig(tuple(params["lags"]), _deltas(params),
                                 _bias(params["bias_correct"]), _boot(params))
            for pair in pairwise_relevant(series, seg.breaks, cfg, _tuning(params)):
                entry = {"start": pair.start, "stop": pair.stop, "error": pair.error}
                if pair.report is not None:
                    r = pair.report
                    entry.update(statistic=r.statistic, critical_value=r.critical_value,
                                 p_value=r.p_value, reject=r.reject, t_hat=list(r.t_hat),
                                 delta_hat=list(r.delta_hat))
                body["pairs"].append(entry)
        return body
    raise UsageError(f"cannot execute {command!r}")


def _to_csv(body: dict) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    kind = body["kind"]
    if kind in ("classical", "relevant"):
        w.writerow(["kind", "lag", "statistic", "critical_value", "p_value", "reject",
                    "t_hat", "delta_hat"])
        for lag in body["per_lag"]:
            w.writerow([kind, lag["lag"], body["statistic"], body["critical_value"],
                        body["p_value"], body["reject"], lag.get("t_hat", ""),
                        lag.get("delta_hat", "")])
    elif kind == "segmentation":
        w.writerow(["break", "index"])
        for t, k in zip(body["breaks"], body["break_indices"]):
            w.writerow([t, k])
    else:
        w.writerow(["t_star", "index", "max_abs_contrast", "robust_scale", "low_confidence"])
        w.writerow([body["t_star"], body["index"], body["max_abs_contrast"],
                    body["robust_scale"], body["low_confidence"]])
    return buf.getvalue()


def _emit(text: str, output):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _analysis(command, params, input_path, transform, column):
    series = ingest(input_path, transform, column)
    body = execute(command, params, series)
    body["manifest"] = make_manifest(command, params, input_path, transform, column)
    return body


def _cmd_simulate(args):
    model = get_model(args.model, lam=args.lam, innovations=args.innovations)
    s = simulate(model, args.n, args.seed)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "y"])
    for t, y in zip(s.t, s.values):
        w.writerow([repr(float(t)), repr(float(y))])
    _emit(buf.getvalue(), args.output)


def _cmd_rerun(args):
    try:
        doc = json.loads(Path(args.report).read_text())
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read {args.report}: {exc}") from None
    manifest = doc.get("manifest", doc)
    if manifest.get("tool") != "corrbreak" or manifest.get("subcommand") not in PARAMS:
        raise DataError(f"{args.report} holds no corrbreak analysis manifest")
    if manifest.get("version") != __version__:
        warnings.warn(f"manifest written by version {manifest.get('version')}, running {__version__}")
    src = manifest["input"]
    path = args.input or src["path"]
    digest = file_digest(path)
    if digest != src["sha256"]:
        raise DataError(f"input digest mismatch for {path}: {digest} != {src['sha256']}")
    params = manifest["parameters"]
    body = _analysis(manifest["subcommand"], params, path, src["transform"], src.get("column"))
    body["manifest"]["input"]["path"] = src["path"]
    _emit(dumps(body), args.output)


def _cmd_fetch_example(args):
    if not args.verify:
        print(f"Daily USD/CAD noon rates, 2011-11-18 to 2016-06-24, from {EXAMPLE_URL}")
        print(f"Save one value per row (header optional); expect {EXAMPLE_ROWS} rows.")
        print("Then run e.g.: corrbreak detect --input FILE --transform pct-change")
        return
    n = read_values(args.verify).size
    digest = file_digest(args.verify)
    print(f"rows: {n} (expected {EXAMPLE_ROWS})")
    print(f"sha256: {digest}")
    if n != EXAMPLE_ROWS:
        raise DataError(f"expected {EXAMPLE_ROWS} rows, found {n}")
    if args.sha256 and digest != args.sha256.lower():
        raise DataError("digest does not match --sha256")


def _check_args(args):
    if hasattr(args, "alpha") and not 0 < args.alpha < 1:
        raise UsageError("--alpha must lie in (0, 1)")
    if hasattr(args, "boot") and args.boot < 1:
        raise UsageError("--boot must be positive")
    if getattr(args, "delta", None) and len(args.delta) not in (1, len(args.lags)):
        raise UsageError("--delta needs one value or one per lag")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _check_args(args)
        if args.command == "simulate":
            _cmd_simulate(args)
        elif args.command == "reproduce":
            table = reproduce(args.experiment, args.reps, args.boot, args.seed, args.workers,
                              args.n, args.models, args.bandwidths)
            _emit(table.to_csv(), args.output)
        elif args.command == "rerun":
            _cmd_rerun(args)
        elif args.command == "fetch-example":
            _cmd_fetch_example(args)
        else:
            params = {k: getattr(args, k) for k in PARAMS[args.command]}
            body = _analysis(args.command, params, args.input, args.transform, args.column)
            if args.command == "segment":
                print(f"note: {SEGMENT_CAVEAT}", file=sys.stderr)
            _emit(dumps(body) if args.out == "json" else _to_csv(body), args.output)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"corrbreak: error: {exc}", file=sys.stderr)
        return 1
    except CorrBreakError as exc:
        print(f"corrbreak: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (np.linalg.LinAlgError, FloatingPointError, ZeroDivisionError) as exc:
        print(f"corrbreak: numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
