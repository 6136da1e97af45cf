"""Command-line client for the faultlab handlers.

The CLI is a thin client: it parses flags into the same request models the
HTTP service accepts, executes them in process by default or against a
running server via --server, and persists the responses as report files.

Report files are line oriented: the first line is a metadata header (the
only place a timestamp appears), every following line is deterministic for
a fixed config and seed.

Exit codes: 0 success, 2 config parse failure, 3 model validation failure,
4 resource guard exceeded, 5 bound violation detected.
"""

from __future__ import annotations

import argparse
import datetime
import json
import logging
import os
import sys

import httpx

from . import __version__
from .errors import DivergentSumError, ModelValidationError, ResourceLimitError
from .service import handlers
from .service.schemas import (
    DecayRequest,
    DecayResponse,
    FaultLocationIn,
    GadgetParamsIn,
    GridOptions,
    LatticeOptions,
    PhaseRequest,
    PhaseResponse,
    SweepRequest,
    SweepResponse,
    ThresholdRequest,
    ThresholdResponse,
    VerifyBoundsRequest,
    VerifyBoundsResponse,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MODEL = 3
EXIT_RESOURCE = 4
EXIT_VIOLATION = 5

log = logging.getLogger("faultlab")


class ConfigError(Exception):
    pass


def _setup_logging() -> None:
    level = os.environ.get("FAULTPATH_LOG", "info").lower()
    mapping = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    if level not in mapping:
        level = "info"
    logging.basicConfig(stream=sys.stderr, level=mapping[level], format="%(levelname)s %(message)s")


# ---------------------------------------------------------------------------
# Flag parsing helpers


def parse_fault_spec(spec: str) -> list[FaultLocationIn]:
    """One fault set: semicolon-separated 'step:qubit' or 'step:q1,q2' entries."""
    locations = []
    for chunk in spec.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            step_text, qubit_text = chunk.split(":")
            step = int(step_text)
            support = [int(q) for q in qubit_text.split(",")]
        except ValueError:
            raise ConfigError(f"bad fault entry {chunk!r}; expected 'step:qubit' or 'step:q1,q2'")
        if not 1 <= len(support) <= 2:
            raise ConfigError(f"fault entry {chunk!r} must name 1 or 2 qubits")
        locations.append(FaultLocationIn(step=step, support=support))
    if not locations:
        raise ConfigError(f"fault spec {spec!r} names no locations")
    return locations


def parse_delta_grid(text: str | None) -> GridOptions:
    if text is None:
        return GridOptions()
    try:
        m0_text, m_max_text = text.split(",")
        m0, m_max = int(m0_text), int(m_max_text)
    except ValueError:
        raise ConfigError(f"bad --delta-grid {text!r}; expected 'm0,mmax'")
    if m0 < 1 or m_max < 2 * m0:
        raise ConfigError(f"--delta-grid needs m0 >= 1 and mmax >= 2*m0, got {text!r}")
    return GridOptions(m0=m0, m_max=m_max)


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad {flag} {text!r}; expected comma-separated numbers")


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad {flag} {text!r}; expected comma-separated integers")


def _parse_range(text: str, flag: str) -> list[float]:
    """'start:stop:step' inclusive grid, or a comma list."""
    if ":" not in text:
        return _parse_float_list(text, flag)
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"bad {flag} {text!r}; expected 'start:stop:step'")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"bad {flag} {text!r}; expected numeric 'start:stop:step'")
    if step <= 0 or stop < start:
        raise ConfigError(f"bad {flag} {text!r}; needs step > 0 and stop >= start")
    out, value, idx = [], start, 0
    while value <= stop + 1e-9:
        out.append(round(value, 12))
        idx += 1
        value = start + idx * step
    return out


def _load_document(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ModelValidationError(path, f"cannot read model file: {exc}")
    except json.JSONDecodeError as exc:
        raise ModelValidationError(path, f"invalid JSON: {exc}")


# ---------------------------------------------------------------------------
# Report writers


def _meta_line(command: str, seed: int) -> str:
    meta = {
        "meta": {
            "tool": "faultlab",
            "version": __version__,
            "command": command,
            "seed": seed,
            "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        }
    }
    return json.dumps(meta)


def write_jsonl(path: str, command: str, seed: int, records: list[dict]) -> None:
    log.debug("writing %d records to %s", len(records), path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_meta_line(command, seed) + "\n")
        for record in records:
            fh.write(json.dumps(record) + "\n")


def write_csv(path: str, command: str, seed: int, rows: list[dict], columns: list[str]) -> None:
    log.debug("writing %d rows to %s", len(rows), path)
    created = datetime.datetime.now(datetime.timezone.utc).isoformat()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# tool=faultlab version={__version__} command={command} seed={seed} created={created}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_csv_cell(row.get(c)) for c in columns) + "\n")


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


# ---------------------------------------------------------------------------
# Remote execution

_ROUTES = {
    "verify-bounds": ("/verify-bounds", VerifyBoundsResponse),
    "threshold": ("/threshold", ThresholdResponse),
    "decay-sum": ("/decay-sum", DecayResponse),
    "sweep": ("/sweep", SweepResponse),
    "phase-experiment": ("/phase-experiment", PhaseResponse),
}


class RemoteError(Exception):
    def __init__(self, status: int, payload: dict):
        self.status = status
        self.payload = payload
        super().__init__(f"server returned {status}: {payload}")


def call_remote(client: httpx.Client, command: str, request) -> object:
    route, response_cls = _ROUTES[command]
    response = client.post(route, json=request.model_dump())
    if response.status_code != 200:
        try:
            payload = response.json()
        except ValueError:
            payload = {"message": response.text}
        raise RemoteError(response.status_code, payload)
    return response_cls.model_validate(response.json())


def _execute(command: str, request, server: str | None):
    if server:
        log.info("dispatching %s to %s", command, server)
        with httpx.Client(base_url=server, timeout=600.0) as client:
            return call_remote(client, command, request)
    log.info("running %s in process", command)
    runner = {
        "verify-bounds": handlers.run_verify_bounds,
        "threshold": handlers.run_threshold,
        "decay-sum": handlers.run_decay,
        "sweep": handlers.run_sweep,
        "phase-experiment": handlers.run_phase,
    }[command]
    return runner(request)


# ---------------------------------------------------------------------------
# Commands


def _cmd_verify_bounds(args) -> int:
    if not args.faults:
        raise ConfigError("verify-bounds needs at least one --faults SPEC")
    request = VerifyBoundsRequest(
        document=_load_document(args.model),
        fault_sets=[parse_fault_spec(spec) for spec in args.faults],
        grid=parse_delta_grid(args.delta_grid),
        workers=args.workers,
    )
    response = _execute("verify-bounds", request, args.server)
    records = [r.model_dump() for r in response.reports]
    records.append({"summary": response.summary.model_dump()})
    write_jsonl(args.out, "verify-bounds", args.seed, records)
    s = response.summary
    print(f"verify-bounds: {s.n_reports} fault sets, max margin {s.max_margin:.6g}, "
          f"{s.violations} violations -> {args.out}")
    return EXIT_VIOLATION if s.violations else EXIT_OK


def _cmd_threshold(args) -> int:
    gadget = None
    if args.gadget is not None:
        parts = args.gadget.split(",")
        if len(parts) != 3:
            raise ConfigError(f"bad --gadget {args.gadget!r}; expected 'A,t,C'")
        try:
            gadget = GadgetParamsIn(
                max_locations=int(parts[0]), correctable=int(parts[1]), constant=float(parts[2])
            )
        except ValueError:
            raise ConfigError(f"bad --gadget {args.gadget!r}; expected 'A,t,C' numbers")
    if (args.preset is None) == (gadget is None):
        raise ConfigError("threshold needs exactly one of --preset or --gadget")
    lattice = None
    if args.lattice is not None:
        parts = args.lattice.split(",")
        if len(parts) not in (2, 3):
            raise ConfigError(f"bad --lattice {args.lattice!r}; expected 'D,z[,metric]'")
        try:
            lattice = LatticeOptions(
                dimension=int(parts[0]),
                exponent=float(parts[1]),
                metric=parts[2] if len(parts) == 3 else "euclidean",
            )
        except ValueError:
            raise ConfigError(f"bad --lattice {args.lattice!r}")
    request = ThresholdRequest(
        preset=args.preset,
        gadget=gadget,
        epsilon=args.epsilon,
        levels=args.levels,
        lattice=lattice,
        t0=args.t0,
    )
    try:
        response = _execute("threshold", request, args.server)
    except (DivergentSumError, ValueError) as exc:
        raise ConfigError(str(exc))
    write_jsonl(args.out, "threshold", args.seed, [response.model_dump()])
    print(f"threshold: epsilon0 {response.epsilon0:.6g}, coupling budget "
          f"{response.coupling_budget:.6g} -> {args.out}")
    return EXIT_OK


_CSV_COLUMNS = ["D", "z", "delta", "R", "metric", "value", "tail_halfwidth", "verdict",
                "growth_law", "growth_coefficient"]


def _cmd_decay_sum(args) -> int:
    specs = []
    scan_dims = scan_exps = None
    if args.dim_grid or args.exponent_grid:
        if not (args.dim_grid and args.exponent_grid):
            raise ConfigError("grid mode needs both --dim-grid and --exponent-grid")
        scan_dims = _parse_int_list(args.dim_grid, "--dim-grid")
        scan_exps = _parse_range(args.exponent_grid, "--exponent-grid")
    elif args.dim is not None and args.exponent is not None:
        specs.append(
            LatticeOptions(
                dimension=args.dim,
                exponent=args.exponent,
                amplitude=args.amplitude,
                radius=args.radius,
                metric=args.metric,
            )
        )
    else:
        raise ConfigError("decay-sum needs --dim and --exponent, or the grid flags")
    request = DecayRequest(
        specs=specs,
        scan_dimensions=scan_dims,
        scan_exponents=scan_exps,
        metric=args.metric,
        amplitude=args.amplitude,
    )
    try:
        response = _execute("decay-sum", request, args.server)
    except ValueError as exc:
        raise ConfigError(str(exc))
    rows = [r.model_dump() for r in response.rows]
    write_csv(args.out, "decay-sum", args.seed, rows, _CSV_COLUMNS)
    n_div = sum(1 for r in response.rows if r.verdict == "divergent")
    print(f"decay-sum: {len(rows)} rows ({n_div} divergent) -> {args.out}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    if not args.faults:
        raise ConfigError("sweep needs at least one --faults SPEC")
    if args.scale_grid is None:
        raise ConfigError("sweep needs --scale-grid")
    request = SweepRequest(
        document=_load_document(args.model),
        scale_grid=_parse_float_list(args.scale_grid, "--scale-grid"),
        fault_sets=[parse_fault_spec(spec) for spec in args.faults],
        grid=parse_delta_grid(args.delta_grid),
        workers=args.workers,
    )
    try:
        response = _execute("sweep", request, args.server)
    except ValueError as exc:
        raise ConfigError(str(exc))
    records = [
        {"scale": r.scale, **r.report.model_dump()} for r in response.reports
    ]
    records.append({"summary": response.summary.model_dump()})
    write_jsonl(args.out, "sweep", args.seed, records)
    s = response.summary
    print(f"sweep: {s.n_reports} cells, max margin {s.max_margin:.6g}, "
          f"{s.violations} violations -> {args.out}")
    return EXIT_VIOLATION if s.violations else EXIT_OK


def _cmd_phase_experiment(args) -> int:
    if not args.faults:
        raise ConfigError("phase-experiment needs --faults")
    if len(args.faults) != 1:
        raise ConfigError("phase-experiment takes exactly one --faults SPEC")
    try:
        request = PhaseRequest(
            document=_load_document(args.model),
            faults=parse_fault_spec(args.faults[0]),
            n_samples=args.samples,
            seed=args.seed,
            m=args.micro,
            workers=args.workers,
        )
        response = _execute("phase-experiment", request, args.server)
    except ValueError as exc:
        raise ConfigError(str(exc))
    write_jsonl(args.out, "phase-experiment", args.seed, [response.model_dump()])
    print(f"phase-experiment: {response.n_samples} samples, mean {response.mean:.6g}, "
          f"coherent {response.coherent_norm:.6g} -> {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="faultlab",
        description="Fault-path bound laboratory: verify measured fault sums against closed forms.",
    )
    parser.add_argument("--version", action="version", version=f"faultlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model=False):
        p.add_argument("--out", required=True, help="report file to write")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--server", default=None, help="execute against a running service URL")
        p.add_argument("--workers", type=int, default=1)
        if model:
            p.add_argument("--model", required=True, help="model document path")
            p.add_argument("--faults", action="append", default=[],
                           help="fault set spec 'step:qubit[;step:q1,q2...]' (repeatable)")
            p.add_argument("--delta-grid", default=None, help="micro grid 'm0,mmax'")

    p = sub.add_parser("verify-bounds", help="measure fault sums and compare with bounds")
    common(p, model=True)
    p.set_defaults(func=_cmd_verify_bounds)

    p = sub.add_parser("threshold", help="recursion trace and noise budgets")
    common(p)
    p.add_argument("--preset", default=None)
    p.add_argument("--gadget", default=None, help="explicit 'A,t,C'")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--levels", type=int, default=10)
    p.add_argument("--lattice", default=None, help="'D,z[,metric]' for the amplitude budget")
    p.add_argument("--t0", type=float, default=1.0)
    p.set_defaults(func=_cmd_threshold)

    p = sub.add_parser("decay-sum", help="lattice interaction sums and divergence scans")
    common(p)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--exponent", type=float, default=None)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--metric", default="euclidean", choices=["euclidean", "chebyshev"])
    p.add_argument("--dim-grid", default=None, help="comma list, e.g. '1,2,3'")
    p.add_argument("--exponent-grid", default=None, help="'start:stop:step' or comma list")
    p.set_defaults(func=_cmd_decay_sum)

    p = sub.add_parser("sweep", help="verify bounds over a coupling scale grid")
    common(p, model=True)
    p.add_argument("--scale-grid", default=None, help="comma-separated scale factors")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("phase-experiment", help="fault-sum norms under random branch phases")
    common(p, model=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--micro", type=int, default=64, help="micro intervals per step")
    p.set_defaults(func=_cmd_phase_experiment)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ModelValidationError as exc:
        print(f"model validation error at {exc.path}: {exc.message}", file=sys.stderr)
        return EXIT_MODEL
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except RemoteError as exc:
        payload = exc.payload
        kind = payload.get("error", "")
        message = payload.get("message", str(payload))
        if kind == "model_validation":
            print(f"model validation error at {payload.get('path')}: {message}", file=sys.stderr)
            return EXIT_MODEL
        if kind == "resource_limit":
            print(f"resource limit: {message}", file=sys.stderr)
            return EXIT_RESOURCE
        print(f"server error {exc.status}: {message}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
