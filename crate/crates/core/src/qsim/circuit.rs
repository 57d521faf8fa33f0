use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::gate::{Gate, GateKind};
use crate::{Error, Result, MAX_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayerKind {
    Single,
    Two,
}

impl LayerKind {
    fn of(gate: &Gate) -> Self {
        if gate.arity() == 2 {
            LayerKind::Two
        } else {
            LayerKind::Single
        }
    }
}

/// Contiguous run of gates on disjoint qubits sharing one arity class.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub kind: LayerKind,
    /// Range into `Circuit::gates`.
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
    layers: Vec<Layer>,
}

impl Circuit {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n,
                limit: MAX_QUBITS,
            });
        }
        Ok(Circuit {
            n,
            gates: Vec::new(),
            layers: Vec::new(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer_gates(&self, layer: &Layer) -> &[Gate] {
        &self.gates[layer.start..layer.end]
    }

    /// Appends a gate; it joins the last layer when it matches that layer's
    /// arity class and touches none of its qubits, otherwise opens a new layer.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n)?;
        let kind = LayerKind::of(&gate);
        let joins = self.layers.last().is_some_and(|l| {
            l.kind == kind
                && self.gates[l.start..l.end]
                    .iter()
                    .all(|g| g.qubits.iter().all(|q| !gate.qubits.contains(q)))
        });
        self.gates.push(gate);
        let idx = self.gates.len();
        if joins {
            self.layers.last_mut().unwrap().end = idx;
        } else {
            self.layers.push(Layer {
                kind,
                start: idx - 1,
                end: idx,
            });
        }
        Ok(())
    }

    /// Appends a full layer as given, without merging into the previous one.
    pub fn push_layer(&mut self, gates: Vec<Gate>) -> Result<()> {
        if gates.is_empty() {
            return Ok(());
        }
        let kind = LayerKind::of(&gates[0]);
        let mut used = Vec::new();
        for g in &gates {
            g.validate(self.n)?;
            if LayerKind::of(g) != kind {
                return Err(Error::Gate("layer mixes single- and two-qubit gates".into()));
            }
            for &q in &g.qubits {
                if used.contains(&q) {
                    return Err(Error::Gate(format!("layer touches qubit {q} twice")));
                }
                used.push(q);
            }
        }
        let start = self.gates.len();
        self.gates.extend(gates);
        self.layers.push(Layer {
            kind,
            start,
            end: self.gates.len(),
        });
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// Returns a copy with gate `index` replaced; the layer structure is kept,
    /// so the replacement must have the same arity and qubits.
    pub fn with_gate_replaced(&self, index: usize, gate: Gate) -> Result<Circuit> {
        let old = self.gates.get(index).ok_or(Error::IndexOutOfRange {
            index,
            bound: self.gates.len(),
            what: "gates",
        })?;
        if old.qubits != gate.qubits {
            return Err(Error::Gate("replacement acts on different qubits".into()));
        }
        gate.validate(self.n)?;
        let mut c = self.clone();
        c.gates[index] = gate;
        Ok(c)
    }

    pub(crate) fn gates_mut(&mut self) -> &mut [Gate] {
        &mut self.gates
    }

    /// Appends another circuit on the same register, keeping its layers.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
                context: "appended circuit qubits",
            });
        }
        for l in &other.layers {
            self.push_layer(other.layer_gates(l).to_vec())?;
        }
        Ok(())
    }

    /// One more than the largest bound parameter index (0 if none).
    pub fn num_params(&self) -> usize {
        self.gates.iter().filter_map(|g| g.param.map(|p| p.index + 1)).max().unwrap_or(0)
    }

    /// Rewrites every parameterized angle as `scale * params[index]`.
    pub fn bind(&mut self, params: &[f64]) -> Result<()> {
        for g in &mut self.gates {
            if let Some(p) = g.param {
                let v = params.get(p.index).ok_or(Error::IndexOutOfRange {
                    index: p.index,
                    bound: params.len(),
                    what: "parameters",
                })?;
                g.angle = Some(p.scale * v);
            }
        }
        Ok(())
    }

    pub fn single_qubit_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| g.arity() == 1).count()
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| g.arity() == 2).count()
    }

    /// `(d1, d2)`: number of single- and two-qubit layers.
    pub fn layer_depths(&self) -> (usize, usize) {
        self.layers.iter().fold((0, 0), |(a, b), l| match l.kind {
            LayerKind::Single => (a + 1, b),
            LayerKind::Two => (a, b + 1),
        })
    }

    /// Line format: one `GATE q0 [q1] [angle]` per line, `---` between layers.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# qubits {}", self.n).unwrap();
        for (i, layer) in self.layers.iter().enumerate() {
            if i > 0 {
                out.push_str("---\n");
            }
            for g in self.layer_gates(layer) {
                writeln!(out, "{g}").unwrap();
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut n: Option<usize> = None;
        let mut layers: Vec<Vec<Gate>> = vec![Vec::new()];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut it = rest.split_whitespace();
                if it.next() == Some("qubits") {
                    let v = it.next().ok_or_else(|| Error::parse(lineno + 1, "missing qubit count"))?;
                    n = Some(v.parse().map_err(|_| Error::parse(lineno + 1, "bad qubit count"))?);
                }
                continue;
            }
            if line == "---" {
                layers.push(Vec::new());
                continue;
            }
            let mut tok = line.split_whitespace();
            let kind: GateKind = tok.next().unwrap().parse()?;
            let mut qubits = Vec::new();
            for _ in 0..kind.arity() {
                let q = tok
                    .next()
                    .ok_or_else(|| Error::parse(lineno + 1, "missing qubit index"))?
                    .parse::<usize>()
                    .map_err(|_| Error::parse(lineno + 1, "bad qubit index"))?;
                qubits.push(q);
            }
            let angle = match tok.next() {
                Some(a) => Some(a.parse::<f64>().map_err(|_| Error::parse(lineno + 1, "bad angle"))?),
                None => None,
            };
            if tok.next().is_some() {
                return Err(Error::parse(lineno + 1, "trailing tokens"));
            }
            layers.last_mut().unwrap().push(Gate {
                kind,
                qubits,
                angle,
                param: None,
            });
        }
        let n = match n {
            Some(n) => n,
            None => {
                layers
                    .iter()
                    .flatten()
                    .flat_map(|g| g.qubits.iter().copied())
                    .max()
                    .ok_or_else(|| Error::parse(0, "empty circuit without qubit count"))?
                    + 1
            }
        };
        let mut c = Circuit::new(n)?;
        for l in layers {
            c.push_layer(l)?;
        }
        Ok(c)
    }
}
