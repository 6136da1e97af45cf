"""System-bath noise models: gate schedules, bath, couplings, strengths.

A model is either in "short_range" mode (one noise term per circuit
location) or "long_range" mode (one coupling term per qubit pair, always
on). The scalar strengths are

    long_range_strength  = max over qubits i and steps of
                           sum_j |scaling| * sup_norm(H_ij) * t0
    short_range_strength = max over locations of sup_norm(H_a) * t0

Models are immutable after construction; loading validates the JSON
document schema exhaustively and reports the path of the offending field.

Document schema (complex numbers are [re, im] pairs, matrices are flat
row-major lists of such pairs):

    {
      "mode": "long_range" | "short_range",
      "n_qubits": int,
      "bath_dim": int,
      "t0": float,
      "steps": [[{"kind", "support", "params"?}, ...], ...],
      "bath_hamiltonian": null | {"seed", "strength"?} | [[re, im], ...],
      "pair_terms": [{"i", "j", "matrix" | "preset", "scaling"?}, ...],
      "short_range_terms": [{"step", "support", "matrix" | "preset"}, ...]
    }

Gate kinds: "identity", "x", "y", "z" (single qubit), "xx", "yy", "zz"
(two qubit), "matrix" (explicit hermitian generator). The generator g of a
gate is applied as exp(-1j * t0 * g) over the working period. Qubits not
covered by a gate in some step are padded with identity gates at load time
so every qubit occupies exactly one location per step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .errors import ModelValidationError, ModeMismatchError
from .operators import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    TensorFactorSpec,
    embed,
    random_hermitian,
    require_hermitian,
    sup_norm,
)

SHORT_RANGE = "short_range"
LONG_RANGE = "long_range"

_PAULI = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}
GATE_KINDS = ("identity", "x", "y", "z", "xx", "yy", "zz", "matrix")
TERM_PRESETS = ("xx", "zz", "random")


@dataclass(frozen=True)
class Gate:
    kind: str
    support: tuple[int, ...]
    generator: np.ndarray  # hermitian, on the system factors of support only


@dataclass(frozen=True)
class PairTerm:
    """Coupling on qubit pair (i, j) and the bath; op acts on qubit_i x qubit_j x bath."""

    i: int
    j: int
    op: np.ndarray
    scaling: tuple[float, ...] | None = None  # optional per-step factors


@dataclass(frozen=True)
class ShortRangeTerm:
    """Per-location coupling; op acts on the location's qubit(s) x bath."""

    step: int
    support: tuple[int, ...]
    op: np.ndarray


@dataclass(frozen=True)
class MacroLocation:
    """One gate's working period: (time step, qubit or qubit pair)."""

    step: int
    support: tuple[int, ...]

    def to_record(self) -> dict:
        return {"step": self.step, "support": list(self.support)}


@dataclass(frozen=True)
class SystemBathModel:
    spec: TensorFactorSpec
    t0: float
    steps: tuple[tuple[Gate, ...], ...]
    h_bath: np.ndarray  # bath factor only, d_B x d_B
    mode: str
    pair_terms: tuple[PairTerm, ...] = ()
    short_range_terms: tuple[ShortRangeTerm, ...] = ()

    @property
    def n_qubits(self) -> int:
        return self.spec.n_qubits

    @property
    def n_steps(self) -> int:
        return len(self.steps)

    @property
    def dim(self) -> int:
        return self.spec.total_dim

    def gate_at(self, step: int, support: tuple[int, ...]) -> Gate | None:
        for gate in self.steps[step]:
            if gate.support == support:
                return gate
        return None

    def locations(self) -> tuple[MacroLocation, ...]:
        return tuple(
            MacroLocation(s, gate.support)
            for s in range(self.n_steps)
            for gate in self.steps[s]
        )

    def pair_scale(self, term: PairTerm, step: int) -> float:
        return 1.0 if term.scaling is None else term.scaling[step]


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# Full-space operators


def h_system_full(model: SystemBathModel, step: int) -> np.ndarray:
    """The system Hamiltonian of one step, embedded in the joint space."""
    h = np.zeros((model.dim, model.dim), dtype=complex)
    for gate in model.steps[step]:
        if gate.kind == "identity":
            continue
        h += embed(gate.generator, gate.support, model.spec)
    return h


def h_bath_full(model: SystemBathModel) -> np.ndarray:
    if not np.any(model.h_bath):
        return np.zeros((model.dim, model.dim), dtype=complex)
    return embed(model.h_bath, [model.spec.bath_index], model.spec)


def pair_term_full(model: SystemBathModel, term: PairTerm) -> np.ndarray:
    return embed(term.op, (term.i, term.j, model.spec.bath_index), model.spec)


def short_term_full(model: SystemBathModel, term: ShortRangeTerm) -> np.ndarray:
    return embed(term.op, term.support + (model.spec.bath_index,), model.spec)


# ---------------------------------------------------------------------------
# Scalar noise strengths


def long_range_strength(model: SystemBathModel) -> float:
    """Max over qubits and steps of the summed coupling norms, times t0."""
    if model.mode != LONG_RANGE:
        raise ModeMismatchError("long_range_strength requires a long_range model")
    if not model.pair_terms:
        return 0.0
    norms = [sup_norm(term.op) for term in model.pair_terms]
    worst = 0.0
    for step in range(model.n_steps):
        row = np.zeros(model.n_qubits)
        for term, norm in zip(model.pair_terms, norms):
            w = norm * abs(model.pair_scale(term, step))
            row[term.i] += w
            row[term.j] += w
        worst = max(worst, float(row.max()))
    return worst * model.t0


def short_range_strength(model: SystemBathModel) -> float:
    """Max over locations of the location coupling norm, times t0."""
    if model.mode != SHORT_RANGE:
        raise ModeMismatchError("short_range_strength requires a short_range model")
    if not model.short_range_terms:
        return 0.0
    return max(sup_norm(term.op) for term in model.short_range_terms) * model.t0


def coupling_strength(model: SystemBathModel) -> float:
    """The mode-appropriate scalar strength (eta or epsilon)."""
    if model.mode == LONG_RANGE:
        return long_range_strength(model)
    return short_range_strength(model)


def scaled_model(model: SystemBathModel, factor: float) -> SystemBathModel:
    """Copy of the model with every coupling multiplied by `factor`."""
    if factor < 0:
        raise ValueError(f"coupling scale must be nonnegative, got {factor}")
    pairs = tuple(replace(t, op=_freeze(t.op * factor)) for t in model.pair_terms)
    shorts = tuple(replace(t, op=_freeze(t.op * factor)) for t in model.short_range_terms)
    return replace(model, pair_terms=pairs, short_range_terms=shorts)


def validate_location(model: SystemBathModel, loc: MacroLocation) -> None:
    """A location must name a gate in the schedule at that step."""
    if not 0 <= loc.step < model.n_steps:
        raise ModelValidationError(
            f"location {loc.step}:{','.join(map(str, loc.support))}",
            f"step {loc.step} out of range for {model.n_steps} steps",
        )
    if model.gate_at(loc.step, loc.support) is None:
        raise ModelValidationError(
            f"location {loc.step}:{','.join(map(str, loc.support))}",
            f"no gate with support {loc.support} at step {loc.step}",
        )


# ---------------------------------------------------------------------------
# Document codec


def encode_matrix(a: np.ndarray) -> list:
    return [[float(x.real), float(x.imag)] for x in np.asarray(a, dtype=complex).ravel()]


def _decode_matrix(pairs, dim: int, path: str) -> np.ndarray:
    if not isinstance(pairs, list):
        raise ModelValidationError(path, "matrix must be a list of [re, im] pairs")
    if len(pairs) != dim * dim:
        raise ModelValidationError(
            path, f"matrix has {len(pairs)} entries, expected {dim * dim} for dim {dim}"
        )
    flat = np.empty(dim * dim, dtype=complex)
    for idx, entry in enumerate(pairs):
        if not (isinstance(entry, list) and len(entry) == 2):
            raise ModelValidationError(f"{path}[{idx}]", "entry must be a [re, im] pair")
        try:
            flat[idx] = complex(float(entry[0]), float(entry[1]))
        except (TypeError, ValueError):
            raise ModelValidationError(f"{path}[{idx}]", "entry values must be numbers")
    a = flat.reshape(dim, dim)
    if not np.all(np.isfinite(a)):
        raise ModelValidationError(path, "matrix entries must be finite")
    return a


def _require(doc: dict, key: str, kind, path: str):
    if key not in doc:
        raise ModelValidationError(f"{path}{key}", "missing required field")
    value = doc[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ModelValidationError(f"{path}{key}", "must be a number")
        return float(value)
    if kind is int:
        if not isinstance(value, int) or isinstance(value, bool):
            raise ModelValidationError(f"{path}{key}", "must be an integer")
        return value
    if not isinstance(value, kind):
        raise ModelValidationError(f"{path}{key}", f"must be of type {kind.__name__}")
    return value


def _decode_support(raw, n_qubits: int, path: str) -> tuple[int, ...]:
    if not isinstance(raw, list) or not 1 <= len(raw) <= 2:
        raise ModelValidationError(path, "support must be a list of 1 or 2 qubit indices")
    out = []
    for q in raw:
        if not isinstance(q, int) or isinstance(q, bool) or not 0 <= q < n_qubits:
            raise ModelValidationError(path, f"qubit index {q!r} out of range 0..{n_qubits - 1}")
        out.append(q)
    if len(set(out)) != len(out):
        raise ModelValidationError(path, "support qubits must be distinct")
    return tuple(out)


def _decode_gate(raw, n_qubits: int, path: str) -> Gate:
    if not isinstance(raw, dict):
        raise ModelValidationError(path, "gate must be an object")
    kind = _require(raw, "kind", str, f"{path}.")
    if kind not in GATE_KINDS:
        raise ModelValidationError(f"{path}.kind", f"unknown gate kind {kind!r}")
    support = _decode_support(raw.get("support"), n_qubits, f"{path}.support")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ModelValidationError(f"{path}.params", "params must be an object")
    arity = len(support)
    local_dim = 2**arity
    if kind == "identity":
        gen = np.zeros((local_dim, local_dim), dtype=complex)
    elif kind in ("x", "y", "z"):
        if arity != 1:
            raise ModelValidationError(f"{path}.support", f"gate {kind!r} needs 1 qubit")
        gen = float(params.get("strength", 1.0)) * _PAULI[kind]
    elif kind in ("xx", "yy", "zz"):
        if arity != 2:
            raise ModelValidationError(f"{path}.support", f"gate {kind!r} needs 2 qubits")
        p = _PAULI[kind[0]]
        gen = float(params.get("strength", 1.0)) * np.kron(p, p)
    else:  # matrix
        gen = _decode_matrix(params.get("matrix"), local_dim, f"{path}.params.matrix")
        try:
            gen = require_hermitian(gen, what="gate generator")
        except ValueError as exc:
            raise ModelValidationError(f"{path}.params.matrix", str(exc))
    return Gate(kind=kind, support=support, generator=_freeze(gen))


def _decode_term_op(raw: dict, dim: int, path: str) -> np.ndarray:
    has_matrix = "matrix" in raw
    has_preset = "preset" in raw
    if has_matrix == has_preset:
        raise ModelValidationError(path, "exactly one of 'matrix' or 'preset' is required")
    if has_matrix:
        op = _decode_matrix(raw["matrix"], dim, f"{path}.matrix")
    else:
        preset = raw["preset"]
        if not isinstance(preset, dict):
            raise ModelValidationError(f"{path}.preset", "preset must be an object")
        name = _require(preset, "name", str, f"{path}.preset.")
        strength = _require(preset, "strength", float, f"{path}.preset.")
        if name not in TERM_PRESETS:
            raise ModelValidationError(
                f"{path}.preset.name", f"unknown preset {name!r}, expected one of {TERM_PRESETS}"
            )
        bath_dim = dim // 4 if dim % 4 == 0 else None
        if name in ("xx", "zz"):
            if dim % 4 != 0:
                raise ModelValidationError(f"{path}.preset.name", f"preset {name!r} needs a two-qubit term")
            p = _PAULI[name[0]]
            op = strength * np.kron(np.kron(p, p), np.eye(bath_dim, dtype=complex))
        else:  # random
            seed = _require(preset, "seed", int, f"{path}.preset.")
            op = random_hermitian(dim, seed=seed, norm=strength)
    try:
        op = require_hermitian(op, what="coupling term")
    except ValueError as exc:
        raise ModelValidationError(path, str(exc))
    return op


def load_model(document: dict) -> SystemBathModel:
    """Validate a model document and build the immutable model."""
    if not isinstance(document, dict):
        raise ModelValidationError("$", "document must be a JSON object")
    mode = _require(document, "mode", str, "")
    if mode not in (SHORT_RANGE, LONG_RANGE):
        raise ModelValidationError("mode", f"must be '{SHORT_RANGE}' or '{LONG_RANGE}'")
    n_qubits = _require(document, "n_qubits", int, "")
    if n_qubits < 1:
        raise ModelValidationError("n_qubits", "must be at least 1")
    bath_dim = _require(document, "bath_dim", int, "")
    if bath_dim < 1:
        raise ModelValidationError("bath_dim", "must be at least 1")
    t0 = _require(document, "t0", float, "")
    if not t0 > 0:
        raise ModelValidationError("t0", "must be positive")
    spec = TensorFactorSpec(n_qubits=n_qubits, bath_dim=bath_dim)

    raw_steps = _require(document, "steps", list, "")
    if not raw_steps:
        raise ModelValidationError("steps", "schedule needs at least one step")
    steps = []
    for s, raw_step in enumerate(raw_steps):
        if not isinstance(raw_step, list):
            raise ModelValidationError(f"steps[{s}]", "step must be a list of gates")
        gates = [
            _decode_gate(raw_gate, n_qubits, f"steps[{s}][{g}]")
            for g, raw_gate in enumerate(raw_step)
        ]
        seen: set[int] = set()
        for g, gate in enumerate(gates):
            overlap = seen.intersection(gate.support)
            if overlap:
                raise ModelValidationError(
                    f"steps[{s}][{g}].support",
                    f"qubits {sorted(overlap)} already occupied in step {s}",
                )
            seen.update(gate.support)
        # pad resting qubits with identity locations so the location set is total
        for q in range(n_qubits):
            if q not in seen:
                gates.append(
                    Gate(kind="identity", support=(q,), generator=_freeze(np.zeros((2, 2), complex)))
                )
        gates.sort(key=lambda g: g.support)
        steps.append(tuple(gates))

    raw_bath = document.get("bath_hamiltonian")
    if raw_bath is None:
        h_bath = np.zeros((bath_dim, bath_dim), dtype=complex)
    elif isinstance(raw_bath, dict):
        seed = _require(raw_bath, "seed", int, "bath_hamiltonian.")
        strength = float(raw_bath.get("strength", 1.0))
        h_bath = random_hermitian(bath_dim, seed=seed, norm=strength)
    else:
        h_bath = _decode_matrix(raw_bath, bath_dim, "bath_hamiltonian")
        try:
            h_bath = require_hermitian(h_bath, what="bath hamiltonian")
        except ValueError as exc:
            raise ModelValidationError("bath_hamiltonian", str(exc))

    raw_pairs = document.get("pair_terms", [])
    if not isinstance(raw_pairs, list):
        raise ModelValidationError("pair_terms", "must be a list")
    if mode == SHORT_RANGE and raw_pairs:
        raise ModelValidationError("pair_terms", "short_range models cannot carry pair terms")
    pair_terms = []
    seen_pairs: set[tuple[int, int]] = set()
    for idx, raw in enumerate(raw_pairs):
        path = f"pair_terms[{idx}]"
        if not isinstance(raw, dict):
            raise ModelValidationError(path, "pair term must be an object")
        i = _require(raw, "i", int, f"{path}.")
        j = _require(raw, "j", int, f"{path}.")
        if not (0 <= i < n_qubits and 0 <= j < n_qubits):
            raise ModelValidationError(path, f"qubit indices ({i}, {j}) out of range")
        if i == j:
            raise ModelValidationError(path, "pair term needs two distinct qubits")
        if i > j:
            raise ModelValidationError(
                f"{path}.i", f"register pairs with i < j; ({i}, {j}) duplicates ({j}, {i})"
            )
        if (i, j) in seen_pairs:
            raise ModelValidationError(path, f"pair ({i}, {j}) registered twice")
        seen_pairs.add((i, j))
        op = _decode_term_op(raw, 4 * bath_dim, path)
        scaling = None
        if "scaling" in raw:
            raw_scaling = raw["scaling"]
            if not isinstance(raw_scaling, list) or len(raw_scaling) != len(steps):
                raise ModelValidationError(
                    f"{path}.scaling", f"needs one factor per step ({len(steps)})"
                )
            scaling = tuple(float(x) for x in raw_scaling)
        pair_terms.append(PairTerm(i=i, j=j, op=_freeze(op), scaling=scaling))

    raw_shorts = document.get("short_range_terms", [])
    if not isinstance(raw_shorts, list):
        raise ModelValidationError("short_range_terms", "must be a list")
    if mode == LONG_RANGE and raw_shorts:
        raise ModelValidationError(
            "short_range_terms", "long_range models cannot carry per-location terms"
        )
    short_terms = []
    for idx, raw in enumerate(raw_shorts):
        path = f"short_range_terms[{idx}]"
        if not isinstance(raw, dict):
            raise ModelValidationError(path, "term must be an object")
        step = _require(raw, "step", int, f"{path}.")
        if not 0 <= step < len(steps):
            raise ModelValidationError(f"{path}.step", f"step {step} out of range")
        support = _decode_support(raw.get("support"), n_qubits, f"{path}.support")
        if not any(g.support == support for g in steps[step]):
            raise ModelValidationError(
                f"{path}.support", f"no gate with support {list(support)} at step {step}"
            )
        dim = 2 ** len(support) * bath_dim
        op = _decode_term_op(raw, dim, path)
        short_terms.append(ShortRangeTerm(step=step, support=support, op=_freeze(op)))

    return SystemBathModel(
        spec=spec,
        t0=t0,
        steps=tuple(steps),
        h_bath=_freeze(h_bath),
        mode=mode,
        pair_terms=tuple(pair_terms),
        short_range_terms=tuple(short_terms),
    )


def save_model(model: SystemBathModel) -> dict:
    """Serialize a model back to the document schema (matrices resolved)."""
    steps = []
    for step in model.steps:
        gates = []
        for gate in step:
            record: dict = {"kind": gate.kind, "support": list(gate.support)}
            if gate.kind == "matrix":
                record["params"] = {"matrix": encode_matrix(gate.generator)}
            elif gate.kind != "identity":
                # single strength parameter reconstructed from the generator
                base = _PAULI[gate.kind[0]]
                if len(gate.support) == 2:
                    base = np.kron(base, base)
                nz = np.flatnonzero(base)
                record["params"] = {
                    "strength": float((gate.generator.ravel()[nz[0]] / base.ravel()[nz[0]]).real)
                }
            gates.append(record)
        steps.append(gates)
    document = {
        "mode": model.mode,
        "n_qubits": model.n_qubits,
        "bath_dim": model.spec.bath_dim,
        "t0": model.t0,
        "steps": steps,
        "bath_hamiltonian": encode_matrix(model.h_bath) if np.any(model.h_bath) else None,
        "pair_terms": [
            {
                "i": t.i,
                "j": t.j,
                "matrix": encode_matrix(t.op),
                **({"scaling": list(t.scaling)} if t.scaling is not None else {}),
            }
            for t in model.pair_terms
        ],
    }
    if model.mode == SHORT_RANGE:
        document["short_range_terms"] = [
            {"step": t.step, "support": list(t.support), "matrix": encode_matrix(t.op)}
            for t in model.short_range_terms
        ]
    return document


def load_model_file(path) -> SystemBathModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            document = json.load(fh)
    except OSError as exc:
        raise ModelValidationError(str(path), f"cannot read model file: {exc}")
    except json.JSONDecodeError as exc:
        raise ModelValidationError(str(path), f"invalid JSON: {exc}")
    return load_model(document)


def save_model_file(model: SystemBathModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(save_model(model), fh)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Document builders used by the sweep runner and the test corpus


def random_long_range_document(
    seed: int,
    n_qubits: int = 3,
    bath_dim: int = 2,
    n_steps: int = 2,
    eta_target: float = 0.05,
    include_two_qubit_gate: bool = False,
    t0: float = 1.0,
) -> dict:
    """Seeded random long-range model rescaled to an exact target strength."""
    rng = np.random.default_rng(seed)
    steps = []
    for s in range(n_steps):
        gates = []
        qubits = list(range(n_qubits))
        if include_two_qubit_gate and s == 0 and n_qubits >= 2:
            gates.append({"kind": "zz", "support": [0, 1], "params": {"strength": 0.5}})
            qubits = qubits[2:]
        for q in qubits:
            kind = ("identity", "x", "z")[rng.integers(0, 3)]
            gate: dict = {"kind": kind, "support": [q]}
            if kind != "identity":
                gate["params"] = {"strength": round(float(rng.uniform(0.1, 1.0)), 6)}
            gates.append(gate)
        steps.append(gates)
    pair_terms = [
        {
            "i": i,
            "j": j,
            "preset": {
                "name": "random",
                "strength": round(float(rng.uniform(0.2, 1.0)), 6),
                "seed": int(rng.integers(0, 2**31)),
            },
        }
        for i in range(n_qubits)
        for j in range(i + 1, n_qubits)
    ]
    document = {
        "mode": LONG_RANGE,
        "n_qubits": n_qubits,
        "bath_dim": bath_dim,
        "t0": t0,
        "steps": steps,
        "bath_hamiltonian": {"seed": int(rng.integers(0, 2**31)), "strength": 0.5},
        "pair_terms": pair_terms,
    }
    current = long_range_strength(load_model(document))
    if current > 0 and eta_target > 0:
        factor = eta_target / current
        for term in document["pair_terms"]:
            term["preset"]["strength"] = float(term["preset"]["strength"]) * factor
    return document


def chain_document(
    n_qubits: int,
    exponent: float,
    amplitude: float,
    bath_dim: int = 1,
    t0: float = 1.0,
    n_steps: int = 1,
) -> dict:
    """1-D chain with algebraically decaying xx couplings amplitude/|i-j|^z."""
    pair_terms = [
        {
            "i": i,
            "j": j,
            "preset": {"name": "xx", "strength": amplitude / (j - i) ** exponent, "seed": 0},
        }
        for i in range(n_qubits)
        for j in range(i + 1, n_qubits)
    ]
    return {
        "mode": LONG_RANGE,
        "n_qubits": n_qubits,
        "bath_dim": bath_dim,
        "t0": t0,
        "steps": [[{"kind": "identity", "support": [q]} for q in range(n_qubits)]] * n_steps,
        "bath_hamiltonian": None,
        "pair_terms": pair_terms,
    }
