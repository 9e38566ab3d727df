"""Command-line front end: ``vnfca solve | compare | validate``.

Exit codes: 0 success, 2 parse/validation error, 3 infeasible problem,
4 solver did not converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ca import check_ca_structure
from .errors import (DimensionError, InfeasibleObjectiveError,
                     InfeasibleRequirementsError, KnowledgebaseError,
                     NonlinearModelError, OracleBudgetError,
                     UnsupportedShapeError, VnfcaError)
from .knowledgebase import (build_model, builtin_path, document_from_model,
                            load_path)
from .model import CapacityModel, CobbDouglas, Linear, validate_allocation
from .report import SolveReport
from .solver import STRATEGIES, OracleConfig, compare_strategies, solve

log = logging.getLogger("vnfca")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_NOT_CONVERGED = 4


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    kb_path: str
    machines: list[str] | None
    vnfs: list[str] | None
    utility: str
    alpha: list[float] | None
    weights: list[float] | None
    requirements: list[float] | None
    strategy: str
    oracle_step: float
    output: str
    out_file: str | None
    seed: int


def fmt(v) -> str:
    if v is None:
        return "-"
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.12g}"


def _num(v):
    v = float(v)
    if not math.isfinite(v):
        return fmt(v)
    return float(fmt(v))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)) or obj is None or isinstance(obj, str):
        return bool(obj) if isinstance(obj, np.bool_) else obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return str(obj)


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def _floats(text: str | None, flag: str) -> list[float] | None:
    if text is None:
        return None
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected a comma-separated list of numbers, got {text!r}") from None


def _names(text: str | None) -> list[str] | None:
    if text is None:
        return None
    return [t.strip() for t in text.split(",") if t.strip()]


# ---------------------------------------------------------------------------
# inputs


def load_model(config: RunConfig) -> CapacityModel:
    kb = config.kb_path
    if kb.startswith("random:"):
        try:
            n, m = (int(t) for t in kb[len("random:"):].lower().split("x"))
        except ValueError:
            raise UsageError(f"--kb {kb}: expected random:NxM") from None
        rng = np.random.default_rng(config.seed)
        model = CapacityModel.from_matrix(rng.integers(1, 11, size=(n, m)).astype(float))
        doc = document_from_model(model)
    else:
        path = builtin_path(kb[len("builtin:"):]) if kb.startswith("builtin:") else kb
        doc = load_path(path)
    return build_model(doc, config.machines, config.vnfs)


def make_spec(config: RunConfig, m: int):
    if config.utility == "cobb-douglas":
        if config.requirements is not None:
            raise UsageError("--requirements needs --utility linear")
        alpha = config.alpha if config.alpha is not None else [1.0 / m] * m
        if len(alpha) != m:
            raise UsageError(f"--alpha has {len(alpha)} entries for {m} VNFs")
        if any(a <= 0 for a in alpha):
            raise UsageError("--alpha entries must be positive")
        total = sum(alpha)
        if abs(total - 1.0) > 1e-9:
            log.warning("alpha sums to %s; normalizing", fmt(total))
        return CobbDouglas.normalized(alpha)
    weights = config.weights if config.weights is not None else [1.0] * m
    if len(weights) != m:
        raise UsageError(f"--weights has {len(weights)} entries for {m} VNFs")
    if config.requirements is not None and len(config.requirements) != m:
        raise UsageError(f"--requirements has {len(config.requirements)} entries for {m} VNFs")
    return Linear(tuple(weights), None if config.requirements is None else tuple(config.requirements))


# ---------------------------------------------------------------------------
# rendering


def _structure_text(report: SolveReport) -> str:
    s = report.diagnostics.structure
    if s is None:
        return "n/a"
    if s.holds:
        return f"holds (threshold {s.inferred_threshold})"
    return f"violated ({len(s.violations)} entries)"


def solve_table(report: SolveReport, model: CapacityModel, spec) -> str:
    label = [*model.machines, f"x ({model.units})"]
    cells = [[fmt(v) for v in row] for row in report.allocation]
    cells.append([fmt(v) for v in report.x])
    head = max(len(t) for t in label) + 2
    widths = [max(len(model.vnfs[j]), *(len(row[j]) for row in cells)) + 2
              for j in range(model.m_vnfs)]
    lines = [f"strategy: {report.strategy}",
             f"utility ({spec.kind}): {fmt(report.utility)}",
             "".ljust(head) + "".join(v.rjust(w) for v, w in zip(model.vnfs, widths))]
    for name, row in zip(label, cells):
        lines.append(name.ljust(head) + "".join(c.rjust(w) for c, w in zip(row, widths)))
    lines.append(f"total: {fmt(report.total)} {model.units}")
    d = report.diagnostics
    extras = [f"converged={d.converged}", f"iterations={d.iterations}"]
    if d.threshold is not None:
        extras.append(f"threshold={d.threshold}")
    if d.theta is not None:
        extras.append(f"theta={fmt(d.theta)}")
    if d.foc_residual is not None:
        extras.append(f"foc_residual={fmt(d.foc_residual)}")
    if d.shadow_prices is not None:
        extras.append("shadow_prices=(" + ", ".join(fmt(p) for p in d.shadow_prices) + ")")
    if d.binding is not None:
        extras.append(f"binding={d.binding}")
    extras.append(f"structure={_structure_text(report)}")
    lines.append("diagnostics: " + " ".join(extras))
    return "\n".join(lines) + "\n"


def solve_csv(report: SolveReport, model: CapacityModel) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "machine", "vnf", "value"])
    for i, mc in enumerate(model.machines):
        for j, v in enumerate(model.vnfs):
            w.writerow(["u", mc, v, fmt(report.allocation[i, j])])
    for j, v in enumerate(model.vnfs):
        w.writerow(["x", "", v, fmt(report.x[j])])
    w.writerow(["total", "", "", fmt(report.total)])
    w.writerow(["utility", "", "", fmt(report.utility)])
    return buf.getvalue()


def compare_rows(reports, model: CapacityModel) -> list[dict]:
    rows = []
    for r in reports:
        row = {"strategy": r.strategy, "ok": r.ok}
        if r.ok:
            row.update(utility=r.utility, x=r.x.tolist(), total=r.total,
                       structure=None if r.diagnostics.structure is None
                       else r.diagnostics.structure.holds)
        else:
            row["error"] = r.error
        rows.append(row)
    return rows


def compare_table(reports, model: CapacityModel, spec) -> str:
    cols = ["strategy", "utility", *model.vnfs, "total", "structure"]
    body = []
    for r in reports:
        if r.ok:
            body.append([r.strategy, fmt(r.utility), *(fmt(v) for v in r.x),
                         fmt(r.total), _structure_text(r)])
        else:
            body.append([r.strategy, "error", *([""] * model.m_vnfs), "", r.error])
    widths = [max(len(c), *(len(row[k]) for row in body)) for k, c in enumerate(cols)]
    out = [f"utility: {spec.kind}   units: {model.units}",
           "  ".join(c.ljust(widths[k]) for k, c in enumerate(cols)).rstrip()]
    out += ["  ".join(v.ljust(widths[k]) for k, v in enumerate(row)).rstrip() for row in body]
    return "\n".join(out) + "\n"


def compare_csv(reports, model: CapacityModel) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["strategy", "vnf", "throughput", "utility"])
    for r in reports:
        if not r.ok:
            continue
        for j, v in enumerate(model.vnfs):
            w.writerow([r.strategy, v, fmt(r.x[j]), fmt(r.utility)])
        w.writerow([r.strategy, "total", fmt(r.total), fmt(r.utility)])
    return buf.getvalue()


def _emit(text: str, out_file: str | None):
    if out_file:
        Path(out_file).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_solve(config: RunConfig) -> int:
    model = load_model(config)
    spec = make_spec(config, model.m_vnfs)
    report = solve(model, spec, config.strategy, oracle=OracleConfig(config.oracle_step))
    if config.output == "json":
        out = report.to_dict(model)
        out["utility_kind"] = spec.kind
        _emit(dump_json(out), config.out_file)
    elif config.output == "csv":
        _emit(solve_csv(report, model), config.out_file)
    else:
        _emit(solve_table(report, model, spec), config.out_file)
    if not report.diagnostics.converged:
        print(f"error: solver did not converge after {report.diagnostics.iterations} iterations",
              file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_compare(config: RunConfig) -> int:
    model = load_model(config)
    spec = make_spec(config, model.m_vnfs)
    reports = compare_strategies(model, spec, oracle=OracleConfig(config.oracle_step))
    if config.output == "json":
        _emit(dump_json({"utility_kind": spec.kind, "machines": list(model.machines),
                         "vnfs": list(model.vnfs), "units": model.units,
                         "strategies": compare_rows(reports, model)}), config.out_file)
    elif config.output == "csv":
        _emit(compare_csv(reports, model), config.out_file)
    else:
        _emit(compare_table(reports, model, spec), config.out_file)
    return EXIT_OK if any(r.ok for r in reports) else EXIT_INFEASIBLE


def load_allocation(path) -> tuple[list[str], list[str], np.ndarray]:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise KnowledgebaseError(str(path), f"cannot read file: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise KnowledgebaseError(str(path), f"malformed JSON: {exc}") from None
    for key in ("machines", "vnfs", "u"):
        if key not in raw:
            raise KnowledgebaseError(f"{path}:{key}", "missing field")
    try:
        u = np.array(raw["u"], dtype=float)
    except (TypeError, ValueError):
        raise KnowledgebaseError(f"{path}:u", "expected a numeric matrix") from None
    if u.shape != (len(raw["machines"]), len(raw["vnfs"])):
        raise KnowledgebaseError(f"{path}:u", f"shape {u.shape} does not match "
                                 f"{len(raw['machines'])} machines x {len(raw['vnfs'])} vnfs")
    return list(raw["machines"]), list(raw["vnfs"]), u


def cmd_validate(kb_path: str, allocation_path: str | None = None, out=None) -> int:
    out = out or sys.stdout
    path = builtin_path(kb_path[len("builtin:"):]) if kb_path.startswith("builtin:") else kb_path
    doc = load_path(path)
    model = build_model(doc)
    n, m = model.shape
    kind = "linear" if model.linear_only else "curves"
    print(f"{kb_path}: valid, {n} machines, {m} vnfs, {kind}", file=out)
    if allocation_path is None:
        return EXIT_OK
    machines, vnfs, u = load_allocation(allocation_path)
    sub = build_model(doc, machines, vnfs)
    result = validate_allocation(u, sub)
    if not result.valid:
        for msg in result.messages():
            print(f"{allocation_path}: {msg}", file=sys.stderr)
        return EXIT_INVALID
    print(f"{allocation_path}: feasible", file=out)
    if sub.m_vnfs == 2 or sub.n_machines == 2:
        s = check_ca_structure(u, sub.b)
        if s.holds:
            print(f"{allocation_path}: CA structure holds (threshold {s.inferred_threshold})", file=out)
        else:
            cells = ", ".join(f"({i}, {j})={fmt(v)}" for i, j, v in s.violations)
            print(f"{allocation_path}: CA structure violated at {cells}", file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vnfca", description="Comparative-advantage VNF resource allocation")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def problem_args(p, strategy: bool):
        p.add_argument("--kb", required=True,
                       help="knowledgebase JSON path, builtin:NAME, or random:NxM")
        p.add_argument("--machines", help="comma-separated machine subset")
        p.add_argument("--vnfs", help="comma-separated VNF subset")
        p.add_argument("--utility", choices=["cobb-douglas", "linear"], default="cobb-douglas")
        p.add_argument("--alpha", help="Cobb-Douglas weights, comma-separated")
        p.add_argument("--weights", help="linear weights, comma-separated")
        p.add_argument("--requirements", help="per-VNF minimum throughput (linear utility)")
        if strategy:
            p.add_argument("--strategy", choices=[*STRATEGIES, "all"], default="ca")
        p.add_argument("--oracle-step", type=float, default=0.05)
        p.add_argument("--output", choices=["table", "json", "csv"], default="table")
        p.add_argument("--out-file")
        p.add_argument("--seed", type=int, default=0, help="seed for random:NxM knowledgebases")

    problem_args(sub.add_parser("solve", help="solve with one strategy"), strategy=True)
    problem_args(sub.add_parser("compare", help="compare all strategies"), strategy=False)
    v = sub.add_parser("validate", help="check a knowledgebase and optionally an allocation")
    v.add_argument("--kb", required=True)
    v.add_argument("--allocation", help='allocation JSON {"machines", "vnfs", "u"}')
    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        kb_path=args.kb,
        machines=_names(args.machines),
        vnfs=_names(args.vnfs),
        utility=args.utility,
        alpha=_floats(args.alpha, "--alpha"),
        weights=_floats(args.weights, "--weights"),
        requirements=_floats(args.requirements, "--requirements"),
        strategy=getattr(args, "strategy", "all"),
        oracle_step=args.oracle_step,
        output=args.output,
        out_file=args.out_file,
        seed=args.seed,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if args.command == "validate":
            return cmd_validate(args.kb, args.allocation)
        config = _config(args)
        if args.command == "compare" or config.strategy == "all":
            return cmd_compare(config)
        return cmd_solve(config)
    except (InfeasibleRequirementsError, InfeasibleObjectiveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UsageError, KnowledgebaseError, DimensionError, UnsupportedShapeError,
            NonlinearModelError, OracleBudgetError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except VnfcaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
