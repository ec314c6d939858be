"""JSON job documents: declarative matrices, sequences, ideals, and tasks.

The document schema uses rational strings ("p/q") for exactness.  Parsing
resolves every label, validates dimensions and tail declarations, and
produces ready-to-run objects; serialization round-trips to a structurally
equal document.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import SchemaError, UnknownLabel
from .ideals import HorizonParams, IdealSpec
from .model import (
    MatrixFamily,
    OperatorEntry,
    OperatorMatrix,
    alternating_cesaro_matrix,
    banded_matrix,
    cesaro_matrix,
    delayed_cesaro_matrix,
    dense_prefix_matrix,
    euler_matrix,
    eventually_constant_sequence,
    geometric_rows_matrix,
    identity_matrix,
    indicator_sequence,
    ones_lower_matrix,
    ones_matrix,
    oscillating_rows_matrix,
    periodic_sequence,
    constant_sequence,
    unit_shift_matrix,
    zero_matrix,
    FiniteSupportTail,
    GeometricTail,
    NoCertificateTail,
    VectorSequence,
    formula_sequence,
)
from .regularity import TargetOperator
from .scalars import as_fraction, parse_scalar
from .selection import SelectionSeq, select_matrix
from .sets import SetDescriptor
from .sigma import SigmaMap

__all__ = ["Document", "Task", "parse_spec_document", "serialize_document"]

SCHEMA_VERSION = 1

TASK_KINDS = (
    "check-regular",
    "check-maps-zero",
    "check-core-inclusion",
    "check-uniform-core",
    "uniform-limit",
    "theorem-equivalence",
    "uniform-limsup",
    "sigma-limit",
    "check-almost-regular",
)


@dataclass(frozen=True)
class Task:
    task_id: str
    kind: str
    spec: dict  # raw task object with labels resolved lazily by the runner
    horizon: Optional[HorizonParams]


@dataclass
class Document:
    matrices: dict
    sequences: dict
    ideals: dict
    sigmas: dict
    tasks: list
    raw: dict

    def matrix(self, label: str) -> OperatorMatrix:
        if label not in self.matrices:
            raise UnknownLabel(f"unknown matrix label {label!r}")
        return self.matrices[label]

    def family(self, labels) -> MatrixFamily:
        return MatrixFamily.of(*(self.matrix(l) for l in labels))

    def sequence(self, label: str) -> VectorSequence:
        if label not in self.sequences:
            raise UnknownLabel(f"unknown sequence label {label!r}")
        return self.sequences[label]

    def ideal(self, label: str) -> IdealSpec:
        if label not in self.ideals:
            raise UnknownLabel(f"unknown ideal label {label!r}")
        return self.ideals[label]

    def sigma(self, label: str) -> SigmaMap:
        if label not in self.sigmas:
            raise UnknownLabel(f"unknown sigma label {label!r}")
        return self.sigmas[label]


def _require(obj: dict, key: str, context: str):
    if key not in obj:
        raise SchemaError(f"{context}: missing field {key!r}")
    return obj[key]


def _label_of(obj: dict, context: str) -> str:
    label = _require(obj, "label", context)
    if not isinstance(label, str) or not label:
        raise SchemaError(f"{context}: label must be a nonempty string")
    return label


def _parse_horizon(obj) -> Optional[HorizonParams]:
    if obj is None:
        return None
    return HorizonParams(
        N=int(obj.get("N", 64)),
        eps=as_fraction(obj.get("eps", "1/16")),
        tmax=None if obj.get("tmax") is None else int(obj["tmax"]),
    )


def _parse_matrix(obj: dict, doc: Document, mode: str) -> OperatorMatrix:
    label = _label_of(obj, "matrix")
    kind = _require(obj, "kind", f"matrix {label!r}")
    scalar = lambda v: parse_scalar(v, mode)
    if kind == "cesaro":
        return cesaro_matrix(
            as_fraction(obj.get("scale", 1)), int(obj.get("dim", obj.get("d", 1))), label=label
        )
    if kind == "identity":
        return identity_matrix(label=label)
    if kind == "euler":
        return euler_matrix(label=label)
    if kind == "zero":
        return zero_matrix(int(obj.get("d", 1)), int(obj.get("m", 1)), label=label)
    if kind == "unit-shift":
        return unit_shift_matrix(int(obj.get("stride", 1)), int(obj.get("offset", 0)), label=label)
    if kind == "ones-lower":
        return ones_lower_matrix(label=label)
    if kind == "alternating-cesaro":
        return alternating_cesaro_matrix(label=label)
    if kind == "delayed-cesaro":
        return delayed_cesaro_matrix(int(obj.get("delay", 0)), label=label)
    if kind == "geometric":
        return geometric_rows_matrix(
            as_fraction(obj.get("coef", "1/2")), as_fraction(obj.get("ratio", "1/2")), label=label
        )
    if kind == "ones":
        return ones_matrix(label=label)
    if kind == "oscillating":
        return oscillating_rows_matrix(label=label)
    if kind == "banded":
        band = _require(obj, "band", f"matrix {label!r}")
        if not isinstance(band, (list, tuple)) or len(band) != 2:
            raise SchemaError(f"matrix {label!r}: band must be [below, above]")
        period = int(obj.get("period", 1))
        entries = {}
        for key, value in _require(obj, "entries", f"matrix {label!r}").items():
            parts = key.split(",")
            if len(parts) != 2:
                raise SchemaError(
                    f"matrix {label!r}: entry key {key!r} must be 'residue,offset'"
                )
            entries[(int(parts[0]), int(parts[1]))] = scalar(value)
        return banded_matrix(int(band[0]), int(band[1]), period, entries, label=label)
    if kind == "dense-prefix":
        rows = [
            [scalar(v) for v in row]
            for row in _require(obj, "block", f"matrix {label!r}")
        ]
        tail = _parse_tail(obj.get("tail"), label)
        return dense_prefix_matrix(rows, tail, label=label)
    if kind == "rowselect":
        family = doc.family(_require(obj, "family", f"matrix {label!r}"))
        sel_obj = _require(obj, "selection", f"matrix {label!r}")
        sel = SelectionSeq(
            prefix=tuple(int(v) for v in sel_obj.get("prefix", [])),
            period=tuple(int(v) for v in _require(sel_obj, "period", f"matrix {label!r}")),
            arity=family.kappa,
        )
        out = select_matrix(family, sel)
        out.label = label
        return out
    if kind == "sigma-mean":
        from .sigma import sigma_matrix

        sig = doc.sigma(_require(obj, "sigma", f"matrix {label!r}"))
        out = sigma_matrix(sig, int(obj.get("nu", 0)), int(obj.get("dim", 1)))
        out.label = label
        return out
    raise SchemaError(f"matrix {label!r}: unknown kind {kind!r}")


def _parse_tail(obj, label: str):
    if obj is None:
        return NoCertificateTail()
    kind = _require(obj, "kind", f"tail of {label!r}")
    if kind == "finite-support":
        return FiniteSupportTail(int(_require(obj, "maxIndex", f"tail of {label!r}")) + 1)
    if kind == "geometric":
        return GeometricTail(as_fraction(obj.get("c", 1)), as_fraction(_require(obj, "ratio", f"tail of {label!r}")))
    if kind == "none":
        return NoCertificateTail()
    raise SchemaError(f"tail of {label!r}: unknown kind {kind!r}")


def _parse_sequence(obj: dict, mode: str) -> VectorSequence:
    label = _label_of(obj, "sequence")
    kind = _require(obj, "kind", f"sequence {label!r}")
    dim = int(obj.get("d", 1))
    scalar = lambda v: parse_scalar(v, mode)

    def vec(v):
        if isinstance(v, (list, tuple)):
            return [scalar(c) for c in v]
        return scalar(v)

    if kind == "periodic":
        block = [vec(v) for v in _require(obj, "block", f"sequence {label!r}")]
        return periodic_sequence(block, dim=dim, label=label)
    if kind == "constant":
        return constant_sequence(vec(_require(obj, "value", f"sequence {label!r}")), dim=dim, label=label)
    if kind == "eventually-constant":
        prefix = [vec(v) for v in obj.get("prefix", [])]
        return eventually_constant_sequence(
            prefix, vec(_require(obj, "value", f"sequence {label!r}")), dim=dim, label=label
        )
    if kind == "indicator":
        return indicator_sequence(
            SetDescriptor.from_json(_require(obj, "set", f"sequence {label!r}")), label=label
        )
    if kind == "harmonic":
        return formula_sequence(
            lambda k: (Fraction(1, k + 1),), 1, label=label, kind="harmonic"
        )
    if kind == "alt-decay":
        return formula_sequence(
            lambda k: (Fraction((-1) ** k, k + 1),), 1, label=label, kind="alt-decay"
        )
    raise SchemaError(f"sequence {label!r}: unknown kind {kind!r}")


def _parse_ideal(obj: dict) -> IdealSpec:
    label = _label_of(obj, "ideal")
    kind = _require(obj, "kind", f"ideal {label!r}")
    if kind == "fin":
        return IdealSpec.fin(label=label)
    if kind == "density-zero":
        return IdealSpec.density_zero(label=label)
    if kind == "countably-generated":
        base = _require(obj, "dualBase", f"ideal {label!r}")
        if base == "tails":
            return IdealSpec.fin(label=label)
        if not isinstance(base, list):
            raise SchemaError(
                f"ideal {label!r}: dualBase must be a list of set descriptors or 'tails'"
            )
        return IdealSpec.countably_generated(
            [SetDescriptor.from_json(b) for b in base], label=label
        )
    raise SchemaError(f"ideal {label!r}: unknown kind {kind!r}")


def _parse_sigma(obj: dict) -> SigmaMap:
    label = _label_of(obj, "sigma")
    kind = _require(obj, "kind", f"sigma {label!r}")
    if kind == "shift":
        return SigmaMap.shift(label=label)
    if kind == "affine":
        return SigmaMap.affine(int(obj.get("a", 1)), int(obj.get("b", 1)), label=label)
    if kind == "blocks":
        return SigmaMap.blocks(_require(obj, "perm", f"sigma {label!r}"), label=label)
    raise SchemaError(f"sigma {label!r}: unknown kind {kind!r}")


def _validate_task(obj: dict, doc: Document, index: int) -> Task:
    kind = _require(obj, "task", f"task #{index}")
    if kind not in TASK_KINDS:
        raise SchemaError(f"task #{index}: unknown task kind {kind!r}")
    task_id = obj.get("id", f"t{index + 1}")

    def check_labels(key, resolver, required):
        if key in obj:
            value = obj[key]
            labels = value if isinstance(value, list) else [value]
            for l in labels:
                resolver(l)
        elif required:
            raise SchemaError(f"task {task_id!r}: missing field {key!r}")

    family_tasks = {
        "check-regular",
        "check-maps-zero",
        "check-uniform-core",
        "uniform-limit",
        "theorem-equivalence",
        "uniform-limsup",
    }
    if kind in family_tasks:
        check_labels("family", doc.matrix, required=True)
    if kind in ("check-core-inclusion", "check-almost-regular"):
        check_labels("matrix", doc.matrix, required=True)
    if kind in ("uniform-limit", "theorem-equivalence", "uniform-limsup", "sigma-limit"):
        check_labels("sequence", doc.sequence, required=True)
        check_labels("ideal", doc.ideal, required=True)
    if kind in ("check-regular", "check-core-inclusion", "check-uniform-core", "check-almost-regular"):
        check_labels("idealI", doc.ideal, required=True)
    if kind in ("check-regular", "check-maps-zero", "check-almost-regular"):
        check_labels("idealJ", doc.ideal, required=True)
    if kind in ("sigma-limit", "check-almost-regular"):
        check_labels("sigma", doc.sigma, required=True)
    for descriptor in obj.get("testSets", []):
        SetDescriptor.from_json(descriptor)
    if "target" in obj:
        [[as_fraction(v) for v in row] for row in obj["target"]]
    return Task(
        task_id=task_id,
        kind=kind,
        spec=obj,
        horizon=_parse_horizon(obj.get("horizon")),
    )


def parse_spec_document(text, mode: str = "exact") -> Document:
    """Parse a job document from JSON text (or an already-decoded dict)."""
    if isinstance(text, (bytes, str)):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
    else:
        raw = text
    if not isinstance(raw, dict):
        raise SchemaError("document root must be an object")
    unknown = set(raw) - {
        "schemaVersion",
        "matrices",
        "sequences",
        "ideals",
        "sigmas",
        "tasks",
    }
    if unknown:
        raise SchemaError(f"unknown top-level fields: {sorted(unknown)}")

    doc = Document(matrices={}, sequences={}, ideals={}, sigmas={}, tasks=[], raw=raw)
    for obj in raw.get("sigmas", []):
        sig = _parse_sigma(obj)
        if sig.label in doc.sigmas:
            raise SchemaError(f"duplicate sigma label {sig.label!r}")
        sig.validate()
        doc.sigmas[sig.label] = sig
    for obj in raw.get("ideals", []):
        ideal = _parse_ideal(obj)
        if ideal.label in doc.ideals:
            raise SchemaError(f"duplicate ideal label {ideal.label!r}")
        doc.ideals[ideal.label] = ideal
    for obj in raw.get("sequences", []):
        seq = _parse_sequence(obj, mode)
        if seq.label in doc.sequences:
            raise SchemaError(f"duplicate sequence label {seq.label!r}")
        doc.sequences[seq.label] = seq
    for obj in raw.get("matrices", []):
        matrix = _parse_matrix(obj, doc, mode)
        if matrix.label in doc.matrices:
            raise SchemaError(f"duplicate matrix label {matrix.label!r}")
        matrix.validate()
        doc.matrices[matrix.label] = matrix
    for index, obj in enumerate(raw.get("tasks", [])):
        doc.tasks.append(_validate_task(obj, doc, index))
    return doc


def serialize_document(doc: Document) -> dict:
    """Canonical JSON form; parse(serialize(parse(text))) is structurally
    equal to parse(text)."""
    out = {"schemaVersion": SCHEMA_VERSION}
    if doc.sigmas:
        out["sigmas"] = []
        for sig in doc.sigmas.values():
            entry = {"label": sig.label, "kind": sig.kind}
            if sig.kind == "affine":
                entry.update(a=sig.a, b=sig.b)
            if sig.kind == "blocks":
                entry["perm"] = list(sig.perm)
            out["sigmas"].append(entry)
    if doc.ideals:
        out["ideals"] = []
        for ideal in doc.ideals.values():
            entry = {"label": ideal.label, "kind": ideal.kind}
            if ideal.kind == "countably-generated":
                entry["dualBase"] = [s.to_json() for s in ideal.base]
            out["ideals"].append(entry)
    if doc.sequences:
        out["sequences"] = [_serialize_sequence(s) for s in doc.sequences.values()]
    if doc.matrices:
        out["matrices"] = [_serialize_matrix(m) for m in doc.matrices.values()]
    if doc.tasks:
        out["tasks"] = [dict(t.spec) for t in doc.tasks]
    return out


def _serialize_matrix(m: OperatorMatrix) -> dict:
    entry = {"label": m.label, "kind": m.kind}
    if m.kind == "cesaro":
        entry["scale"] = str(m.params["scale"])
        entry["dim"] = m.params["dim"]
    elif m.kind == "delayed-cesaro":
        entry["delay"] = m.params["delay"]
    elif m.kind == "zero":
        entry.update(d=m.params["d"], m=m.params["m"])
    elif m.kind == "unit-shift":
        entry.update(stride=m.params["stride"], offset=m.params["offset"])
    elif m.kind == "geometric":
        entry["coef"] = str(m.params["coef"])
        entry["ratio"] = str(m.params["ratio"])
    elif m.kind == "banded":
        entry["band"] = [m.params["below"], m.params["above"]]
        entry["period"] = m.params["period"]
        entry["entries"] = {
            f"{res},{off}": str(v) for (res, off), v in sorted(m.params["entries"].items())
        }
    elif m.kind == "rowselect":
        sel = m.params["selection"]
        entry["family"] = [a.label for a in m.family]
        entry["selection"] = {"prefix": list(sel.prefix), "period": list(sel.period)}
    elif m.kind == "sigma-mean":
        entry["sigma"] = m.params["sigma"].label
        entry["nu"] = m.params["nu"]
        entry["dim"] = m.d
    return entry


def _serialize_sequence(s: VectorSequence) -> dict:
    entry = {"label": s.label, "kind": s.kind, "d": s.dim}

    def fmt_vec(vec):
        return [str(c) for c in vec] if s.dim > 1 else str(vec[0])

    if s.kind == "periodic":
        entry["block"] = [fmt_vec(v) for v in s.params["block"]]
    elif s.kind == "constant":
        entry["value"] = fmt_vec(s.params["value"])
    elif s.kind == "eventually-constant":
        entry["prefix"] = [fmt_vec(v) for v in s.params["prefix"]]
        entry["value"] = fmt_vec(s.params["value"])
    elif s.kind == "indicator":
        entry["set"] = s.params["set"].to_json()
    return entry
