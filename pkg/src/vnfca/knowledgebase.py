"""VNF performance knowledgebase: JSON documents holding per-(machine, VNF)
capacity curves, and construction of :class:`CapacityModel` instances.

Wire format (version "1")::

    {"version": "1", "units": "kpps",
     "vnfs": [{"name": "snort"}],
     "machines": [{"name": "m1", "description": "..."}],
     "capacity": [{"machine": "m1", "vnf": "snort",
                   "curve": [[0.0, 0.0], [1.0, 21.0]]}]}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import KnowledgebaseError
from .model import CapacityCurve, CapacityModel, curve_problem

FORMAT_VERSION = "1"
DATA_DIR = Path(__file__).parent / "data"


@dataclass(frozen=True)
class MachineEntry:
    name: str
    description: str | None = None


@dataclass(frozen=True)
class VnfEntry:
    name: str


@dataclass(frozen=True)
class CapacityEntry:
    machine: str
    vnf: str
    curve: CapacityCurve


@dataclass(frozen=True)
class KnowledgebaseDocument:
    units: str
    vnfs: tuple[VnfEntry, ...]
    machines: tuple[MachineEntry, ...]
    capacity: tuple[CapacityEntry, ...]
    version: str = FORMAT_VERSION
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {(c.machine, c.vnf): c.curve for c in self.capacity})

    @property
    def machine_names(self) -> list[str]:
        return [m.name for m in self.machines]

    @property
    def vnf_names(self) -> list[str]:
        return [v.name for v in self.vnfs]

    def curve(self, machine: str, vnf: str) -> CapacityCurve | None:
        return self._index.get((machine, vnf))

    def missing_pairs(self, machines=None, vnfs=None) -> list[tuple[str, str]]:
        machines = machines or self.machine_names
        vnfs = vnfs or self.vnf_names
        return [(mc, v) for mc in machines for v in vnfs if (mc, v) not in self._index]

    def to_json(self) -> dict:
        machines = []
        for mc in self.machines:
            entry = {"name": mc.name}
            if mc.description is not None:
                entry["description"] = mc.description
            machines.append(entry)
        return {
            "version": self.version,
            "units": self.units,
            "vnfs": [{"name": v.name} for v in self.vnfs],
            "machines": machines,
            "capacity": [
                {"machine": c.machine, "vnf": c.vnf,
                 "curve": [[f, cap] for f, cap in c.curve.samples]}
                for c in self.capacity
            ],
        }


def serialize(doc: KnowledgebaseDocument) -> bytes:
    return (json.dumps(doc.to_json(), indent=2) + "\n").encode("utf-8")


def _expect(cond, path, message):
    if not cond:
        raise KnowledgebaseError(path, message)


def _number(value, path) -> float:
    _expect(isinstance(value, (int, float)) and not isinstance(value, bool), path,
            f"expected a number, got {value!r}")
    _expect(math.isfinite(value), path, f"non-finite number {value!r}")
    return float(value)


def _name(obj, path) -> str:
    _expect(isinstance(obj, dict), path, "expected an object")
    name = obj.get("name")
    _expect(isinstance(name, str) and name != "", f"{path}.name", "expected a non-empty string")
    return name


def _unique(names, path, kind):
    seen = {}
    for k, name in enumerate(names):
        _expect(name not in seen, f"{path}[{k}].name",
                f"duplicate {kind} name {name!r} (first at {path}[{seen.get(name)}])")
        seen[name] = k


def load_document(data: bytes | str) -> KnowledgebaseDocument:
    """Parse and validate a knowledgebase document."""
    try:
        raw = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise KnowledgebaseError("$", f"malformed JSON: {exc}") from None
    _expect(isinstance(raw, dict), "$", "top level must be an object")
    version = raw.get("version")
    _expect(version == FORMAT_VERSION, "version",
            f"unknown version {version!r} (supported: {FORMAT_VERSION!r})")
    units = raw.get("units")
    _expect(isinstance(units, str) and units != "", "units", "expected a non-empty string")

    for key in ("vnfs", "machines", "capacity"):
        _expect(isinstance(raw.get(key), list), key, "expected a list")
    vnfs = tuple(VnfEntry(_name(v, f"vnfs[{k}]")) for k, v in enumerate(raw["vnfs"]))
    machines = []
    for k, mc in enumerate(raw["machines"]):
        name = _name(mc, f"machines[{k}]")
        desc = mc.get("description")
        _expect(desc is None or isinstance(desc, str), f"machines[{k}].description",
                "expected a string")
        machines.append(MachineEntry(name, desc))
    _unique([v.name for v in vnfs], "vnfs", "vnf")
    _unique([mc.name for mc in machines], "machines", "machine")
    vnf_names = {v.name for v in vnfs}
    machine_names = {mc.name for mc in machines}

    entries = []
    seen = {}
    for k, entry in enumerate(raw["capacity"]):
        path = f"capacity[{k}]"
        _expect(isinstance(entry, dict), path, "expected an object")
        mc, v = entry.get("machine"), entry.get("vnf")
        _expect(isinstance(mc, str), f"{path}.machine", "expected a string")
        _expect(isinstance(v, str), f"{path}.vnf", "expected a string")
        _expect(mc in machine_names, f"{path}.machine", f"unknown machine {mc!r}")
        _expect(v in vnf_names, f"{path}.vnf", f"unknown vnf {v!r}")
        _expect((mc, v) not in seen, path,
                f"duplicate pair ({mc}, {v}), first defined at capacity[{seen.get((mc, v))}]")
        seen[(mc, v)] = k
        samples = entry.get("curve")
        _expect(isinstance(samples, list), f"{path}.curve", "expected a list of [fraction, capacity]")
        fractions, caps = [], []
        for s, pair in enumerate(samples):
            spath = f"{path}.curve[{s}]"
            _expect(isinstance(pair, list) and len(pair) == 2, spath,
                    "expected a [fraction, capacity] pair")
            fractions.append(_number(pair[0], f"{spath}[0]"))
            caps.append(_number(pair[1], f"{spath}[1]"))
        problem = curve_problem(fractions, caps)
        if problem is not None:
            s, message = problem
            where = f"{path}.curve" if s is None else f"{path}.curve[{s}]"
            raise KnowledgebaseError(where, f"({mc}, {v}) {message}")
        entries.append(CapacityEntry(mc, v, CapacityCurve(tuple(fractions), tuple(caps))))
    return KnowledgebaseDocument(units, vnfs, tuple(machines), tuple(entries), version)


def load_path(path) -> KnowledgebaseDocument:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise KnowledgebaseError(str(path), f"cannot read file: {exc.strerror}") from None
    try:
        return load_document(data)
    except KnowledgebaseError as exc:
        raise KnowledgebaseError(f"{path}:{exc.path}", exc.detail) from None


def builtin_path(name: str) -> Path:
    path = DATA_DIR / f"{name}.json"
    if not path.exists():
        available = sorted(p.stem for p in DATA_DIR.glob("*.json"))
        raise KnowledgebaseError(name, f"no bundled knowledgebase; available: {available}")
    return path


def _resolve_subset(names: Sequence[str] | None, known: list[str], kind: str) -> list[str]:
    if names is None:
        return list(known)
    names = list(names)
    if not names:
        raise KnowledgebaseError(kind, f"empty {kind} subset")
    unknown = [x for x in names if x not in known]
    if unknown:
        raise KnowledgebaseError(kind, f"unknown {kind} name(s) {unknown}")
    if len(set(names)) != len(names):
        raise KnowledgebaseError(kind, f"duplicate {kind} name(s) in subset")
    return names


def build_model(doc: KnowledgebaseDocument, machines: Sequence[str] | None = None,
                vnfs: Sequence[str] | None = None) -> CapacityModel:
    """Capacity model over the given subsets (all names when omitted), in subset order."""
    machines = _resolve_subset(machines, doc.machine_names, "machines")
    vnfs = _resolve_subset(vnfs, doc.vnf_names, "vnfs")
    missing = doc.missing_pairs(machines, vnfs)
    if missing:
        pairs = ", ".join(f"({mc}, {v})" for mc, v in missing)
        raise KnowledgebaseError("capacity", f"incomplete grid: missing {pairs}")
    curves = [[doc.curve(mc, v) for v in vnfs] for mc in machines]
    return CapacityModel(tuple(machines), tuple(vnfs), curves, doc.units)


def query_capacity(doc: KnowledgebaseDocument, machine: str, vnf: str, fraction: float) -> float:
    curve = doc.curve(machine, vnf)
    if curve is None:
        raise KnowledgebaseError("capacity", f"no curve for ({machine}, {vnf})")
    if not (0.0 <= fraction <= 1.0):
        raise ValueError(f"fraction {fraction} outside [0, 1]")
    return float(curve(fraction))


def document_from_model(model: CapacityModel, descriptions=None) -> KnowledgebaseDocument:
    descriptions = descriptions or {}
    return KnowledgebaseDocument(
        model.units,
        tuple(VnfEntry(v) for v in model.vnfs),
        tuple(MachineEntry(mc, descriptions.get(mc)) for mc in model.machines),
        tuple(CapacityEntry(mc, v, model.curves[i][j])
              for i, mc in enumerate(model.machines) for j, v in enumerate(model.vnfs)),
    )
