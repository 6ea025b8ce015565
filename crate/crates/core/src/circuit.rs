//! Layered circuit IR shared by every builder, simulator and cost counter.
//!
//! Gates address qubits by a flat index into the concatenation of the
//! declared registers (register-major, little-endian inside a register).
//! Each layer holds gates with pairwise disjoint operands, so the number of
//! layers is the depth under unit-depth gates.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Flat qubit index inside a [`Circuit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Qubit(pub u32);

impl Qubit {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("register `{0}` declared twice")]
    DuplicateRegister(String),
    #[error("register `{0}` must have size >= 1")]
    EmptyRegister(String),
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("qubit {index} out of range for register `{register}` of size {size}")]
    IndexOutOfRange {
        register: String,
        index: usize,
        size: usize,
    },
    #[error("qubit {0} outside circuit of width {1}")]
    QubitOutOfRange(u32, usize),
    #[error("gate {0} repeats operand {1}")]
    RepeatedOperand(GateKind, u32),
    #[error("gate {kind} has invalid arity: {controls} controls, {targets} targets")]
    Arity {
        kind: GateKind,
        controls: usize,
        targets: usize,
    },
    #[error("layer {0} has overlapping gates")]
    LayerOverlap(usize),
    #[error("unsupported circuit schema version `{0}`")]
    Schema(String),
    #[error("malformed circuit json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GateKind {
    X,
    Cnot,
    Toffoli,
    Cswap,
    FanoutCnot,
    MultiCnot,
    H,
    AndCompute,
    AndUncompute,
    ClassicalPhaseFixup,
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateKind::X => "X",
            GateKind::Cnot => "CNOT",
            GateKind::Toffoli => "TOFFOLI",
            GateKind::Cswap => "CSWAP",
            GateKind::FanoutCnot => "FANOUT_CNOT",
            GateKind::MultiCnot => "MULTI_CNOT",
            GateKind::H => "H",
            GateKind::AndCompute => "AND_COMPUTE",
            GateKind::AndUncompute => "AND_UNCOMPUTE",
            GateKind::ClassicalPhaseFixup => "CLASSICAL_PHASE_FIXUP",
        };
        f.write_str(s)
    }
}

impl GateKind {
    /// True when the gate maps computational basis states to basis states
    /// without phases (everything but H and the fixup marker).
    pub fn is_permutation(self) -> bool {
        !matches!(self, GateKind::H | GateKind::ClassicalPhaseFixup)
    }

    fn arity_ok(self, controls: usize, targets: usize) -> bool {
        match self {
            GateKind::X | GateKind::H => controls == 0 && targets == 1,
            GateKind::Cnot => controls == 1 && targets == 1,
            GateKind::Toffoli | GateKind::AndCompute | GateKind::AndUncompute => {
                controls == 2 && targets == 1
            }
            GateKind::Cswap => controls == 1 && targets == 2,
            GateKind::FanoutCnot => controls == 1 && targets >= 1,
            GateKind::MultiCnot => controls >= 1 && targets == 1,
            GateKind::ClassicalPhaseFixup => controls == 0 && targets >= 1,
        }
    }
}

/// A gate record. The first `negated.len()` operands are controls (with
/// their negation flags), the remaining operands are targets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<Qubit>,
    pub negated: Vec<bool>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<Qubit>, negated: Vec<bool>) -> Result<Self, CircuitError> {
        let gate = Gate { kind, qubits, negated };
        gate.check_shape()?;
        Ok(gate)
    }

    pub fn x(t: Qubit) -> Self {
        Gate { kind: GateKind::X, qubits: vec![t], negated: vec![] }
    }

    pub fn h(t: Qubit) -> Self {
        Gate { kind: GateKind::H, qubits: vec![t], negated: vec![] }
    }

    pub fn cnot(c: Qubit, t: Qubit) -> Self {
        Gate { kind: GateKind::Cnot, qubits: vec![c, t], negated: vec![false] }
    }

    pub fn toffoli(c0: Qubit, c1: Qubit, negated: [bool; 2], t: Qubit) -> Self {
        Gate { kind: GateKind::Toffoli, qubits: vec![c0, c1, t], negated: negated.to_vec() }
    }

    pub fn and_compute(c0: Qubit, c1: Qubit, negated: [bool; 2], t: Qubit) -> Self {
        Gate { kind: GateKind::AndCompute, qubits: vec![c0, c1, t], negated: negated.to_vec() }
    }

    pub fn and_uncompute(c0: Qubit, c1: Qubit, negated: [bool; 2], t: Qubit) -> Self {
        Gate { kind: GateKind::AndUncompute, qubits: vec![c0, c1, t], negated: negated.to_vec() }
    }

    pub fn cswap(c: Qubit, negated: bool, a: Qubit, b: Qubit) -> Self {
        Gate { kind: GateKind::Cswap, qubits: vec![c, a, b], negated: vec![negated] }
    }

    pub fn fanout(c: Qubit, targets: impl IntoIterator<Item = Qubit>) -> Self {
        let mut qubits = vec![c];
        qubits.extend(targets);
        Gate { kind: GateKind::FanoutCnot, qubits, negated: vec![false] }
    }

    pub fn multi_cnot(controls: &[(Qubit, bool)], t: Qubit) -> Self {
        let mut qubits: Vec<Qubit> = controls.iter().map(|c| c.0).collect();
        qubits.push(t);
        Gate {
            kind: GateKind::MultiCnot,
            qubits,
            negated: controls.iter().map(|c| c.1).collect(),
        }
    }

    pub fn phase_fixup(targets: impl IntoIterator<Item = Qubit>) -> Self {
        Gate {
            kind: GateKind::ClassicalPhaseFixup,
            qubits: targets.into_iter().collect(),
            negated: vec![],
        }
    }

    #[inline]
    pub fn controls(&self) -> &[Qubit] {
        &self.qubits[..self.negated.len()]
    }

    #[inline]
    pub fn targets(&self) -> &[Qubit] {
        &self.qubits[self.negated.len()..]
    }

    /// The gate undoing this one.
    pub fn inverse(&self) -> Gate {
        let kind = match self.kind {
            GateKind::AndCompute => GateKind::AndUncompute,
            GateKind::AndUncompute => GateKind::AndCompute,
            k => k,
        };
        Gate { kind, ..self.clone() }
    }

    fn check_shape(&self) -> Result<(), CircuitError> {
        let controls = self.negated.len();
        if controls > self.qubits.len() || !self.kind.arity_ok(controls, self.qubits.len() - controls) {
            return Err(CircuitError::Arity {
                kind: self.kind,
                controls,
                targets: self.qubits.len().saturating_sub(controls),
            });
        }
        let mut seen = HashSet::with_capacity(self.qubits.len());
        for q in &self.qubits {
            if !seen.insert(*q) {
                return Err(CircuitError::RepeatedOperand(self.kind, q.0));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub size: usize,
    #[serde(skip)]
    pub offset: usize,
}

/// Where `append` places a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Packing {
    /// Earliest layer after every layer that already touches an operand.
    #[default]
    Greedy,
    /// Always open a fresh layer at the end.
    NewLayer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    registers: Vec<Register>,
    width: usize,
    layers: Vec<Vec<Gate>>,
    /// One past the last layer touching each qubit.
    frontier: Vec<usize>,
}

impl Circuit {
    pub fn new<S: AsRef<str>>(registers: &[(S, usize)]) -> Result<Self, CircuitError> {
        let mut regs = Vec::with_capacity(registers.len());
        let mut names = HashSet::new();
        let mut offset = 0;
        for (name, size) in registers {
            let name = name.as_ref();
            if !names.insert(name.to_string()) {
                return Err(CircuitError::DuplicateRegister(name.to_string()));
            }
            if *size == 0 {
                return Err(CircuitError::EmptyRegister(name.to_string()));
            }
            regs.push(Register { name: name.to_string(), size: *size, offset });
            offset += size;
        }
        Ok(Circuit { registers: regs, width: offset, layers: Vec::new(), frontier: vec![0; offset] })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flatten()
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    /// Resolves `(register, index)` to a flat qubit.
    pub fn qubit(&self, register: &str, index: usize) -> Result<Qubit, CircuitError> {
        let reg = self
            .register(register)
            .ok_or_else(|| CircuitError::UnknownRegister(register.to_string()))?;
        if index >= reg.size {
            return Err(CircuitError::IndexOutOfRange {
                register: register.to_string(),
                index,
                size: reg.size,
            });
        }
        Ok(Qubit((reg.offset + index) as u32))
    }

    /// All qubits of a register, little-endian.
    pub fn reg(&self, name: &str) -> Result<Vec<Qubit>, CircuitError> {
        let reg = self
            .register(name)
            .ok_or_else(|| CircuitError::UnknownRegister(name.to_string()))?;
        Ok((reg.offset..reg.offset + reg.size).map(|i| Qubit(i as u32)).collect())
    }

    /// Maps a flat qubit back to `(register, index)`.
    pub fn locate(&self, q: Qubit) -> Option<(&str, usize)> {
        let i = q.index();
        self.registers
            .iter()
            .find(|r| i >= r.offset && i < r.offset + r.size)
            .map(|r| (r.name.as_str(), i - r.offset))
    }

    fn check_gate(&self, gate: &Gate) -> Result<(), CircuitError> {
        gate.check_shape()?;
        for q in &gate.qubits {
            if q.index() >= self.width {
                return Err(CircuitError::QubitOutOfRange(q.0, self.width));
            }
        }
        Ok(())
    }

    pub fn append(&mut self, gate: Gate, packing: Packing) -> Result<(), CircuitError> {
        self.check_gate(&gate)?;
        let layer = match packing {
            Packing::Greedy => gate.qubits.iter().map(|q| self.frontier[q.index()]).max().unwrap_or(0),
            Packing::NewLayer => self.layers.len(),
        };
        if layer == self.layers.len() {
            self.layers.push(Vec::new());
        }
        for q in &gate.qubits {
            self.frontier[q.index()] = layer + 1;
        }
        self.layers[layer].push(gate);
        Ok(())
    }

    /// Greedy append for builders, which only emit well-formed gates.
    pub(crate) fn push(&mut self, gate: Gate) {
        self.append(gate, Packing::Greedy).expect("builder emitted a malformed gate");
    }

    /// Appends every gate of `other` (same register layout) after this circuit.
    pub fn extend_from(&mut self, other: &Circuit, packing: Packing) -> Result<(), CircuitError> {
        for gate in other.gates() {
            self.append(gate.clone(), packing)?;
        }
        Ok(())
    }

    /// Concatenation keeping both layer structures intact.
    pub fn concat(&self, other: &Circuit) -> Result<Circuit, CircuitError> {
        let mut out = self.clone();
        for layer in &other.layers {
            out.push_layer(layer.clone())?;
        }
        Ok(out)
    }

    /// Appends a whole layer as-is.
    pub fn push_layer(&mut self, layer: Vec<Gate>) -> Result<(), CircuitError> {
        let mut used = HashSet::new();
        for gate in &layer {
            self.check_gate(gate)?;
            for q in &gate.qubits {
                if !used.insert(*q) {
                    return Err(CircuitError::LayerOverlap(self.layers.len()));
                }
            }
        }
        let idx = self.layers.len();
        for q in used {
            self.frontier[q.index()] = idx + 1;
        }
        self.layers.push(layer);
        Ok(())
    }

    /// Circuit undoing this one.
    pub fn inverse(&self) -> Circuit {
        let mut out = Circuit {
            registers: self.registers.clone(),
            width: self.width,
            layers: Vec::with_capacity(self.layers.len()),
            frontier: vec![0; self.width],
        };
        for layer in self.layers.iter().rev() {
            out.push_layer(layer.iter().rev().map(Gate::inverse).collect())
                .expect("inverse of a valid layer is valid");
        }
        out
    }

    /// Empty circuit with the same registers.
    pub fn empty_like(&self) -> Circuit {
        Circuit {
            registers: self.registers.clone(),
            width: self.width,
            layers: Vec::new(),
            frontier: vec![0; self.width],
        }
    }

    /// Same gates, with one gate removed (`layer`, `position`). Used to
    /// produce mutants in verification tests.
    pub fn without_gate(&self, layer: usize, position: usize) -> Option<Circuit> {
        let mut out = self.clone();
        let l = out.layers.get_mut(layer)?;
        if position >= l.len() {
            return None;
        }
        l.remove(position);
        Some(out)
    }

    /// Checks every structural invariant and reports each violation.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        for (k, layer) in self.layers.iter().enumerate() {
            let mut used = HashSet::new();
            let mut overlap = false;
            for gate in layer {
                let controls = gate.negated.len();
                if controls > gate.qubits.len()
                    || !gate.kind.arity_ok(controls, gate.qubits.len() - controls)
                {
                    violations.push(format!("bad arity for {} at layer {k}", gate.kind));
                }
                let mut seen = HashSet::new();
                for q in &gate.qubits {
                    if q.index() >= self.width {
                        violations.push(format!("qubit {} out of range at layer {k}", q.0));
                    }
                    if !seen.insert(*q) {
                        violations.push(format!("operand clash at layer {k}"));
                    } else if !used.insert(*q) {
                        overlap = true;
                    }
                }
            }
            if overlap {
                violations.push(format!("layer overlap at layer {k}"));
            }
        }
        violations
    }
}

// ---------------------------------------------------------------------------
// JSON serialization

pub const CIRCUIT_SCHEMA: &str = "1";

#[derive(Serialize, Deserialize)]
struct RegisterJson {
    name: String,
    size: usize,
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    kind: GateKind,
    operands: Vec<(String, usize)>,
    flags: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    schema: String,
    registers: Vec<RegisterJson>,
    layers: Vec<Vec<GateJson>>,
}

impl Circuit {
    pub fn to_json(&self) -> String {
        let doc = CircuitJson {
            schema: CIRCUIT_SCHEMA.to_string(),
            registers: self
                .registers
                .iter()
                .map(|r| RegisterJson { name: r.name.clone(), size: r.size })
                .collect(),
            layers: self
                .layers
                .iter()
                .map(|layer| {
                    layer
                        .iter()
                        .map(|g| GateJson {
                            kind: g.kind,
                            operands: g
                                .qubits
                                .iter()
                                .map(|q| {
                                    let (r, i) = self.locate(*q).expect("gate operand inside circuit");
                                    (r.to_string(), i)
                                })
                                .collect(),
                            flags: g.negated.clone(),
                        })
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("circuit serializes")
    }

    /// Parses a circuit document. Layers are kept exactly as written; call
    /// [`Circuit::validate`] to inspect structural problems.
    pub fn from_json(text: &str) -> Result<Circuit, CircuitError> {
        let doc: CircuitJson = serde_json::from_str(text).map_err(|e| CircuitError::Json(e.to_string()))?;
        if doc.schema != CIRCUIT_SCHEMA {
            return Err(CircuitError::Schema(doc.schema));
        }
        let regs: Vec<(String, usize)> = doc.registers.into_iter().map(|r| (r.name, r.size)).collect();
        let mut circuit = Circuit::new(&regs)?;
        for layer in doc.layers {
            let mut gates = Vec::with_capacity(layer.len());
            for g in layer {
                let qubits = g
                    .operands
                    .iter()
                    .map(|(r, i)| circuit.qubit(r, *i))
                    .collect::<Result<Vec<_>, _>>()?;
                gates.push(Gate { kind: g.kind, qubits, negated: g.flags });
            }
            for gate in &gates {
                for q in &gate.qubits {
                    circuit.frontier[q.index()] = circuit.layers.len() + 1;
                }
            }
            circuit.layers.push(gates);
        }
        Ok(circuit)
    }
}
