use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::{Error, Result};

pub type Mat2 = [[Complex64; 2]; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    RX,
    RY,
    RZ,
    CX,
    CZ,
    RZZ,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::CX | GateKind::CZ | GateKind::RZZ => 2,
            _ => 1,
        }
    }

    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::RZZ)
    }

    pub fn is_clifford(self) -> bool {
        !self.is_rotation()
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::CX => "CX",
            GateKind::CZ => "CZ",
            GateKind::RZZ => "RZZ",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "H" => GateKind::H,
            "X" => GateKind::X,
            "Y" => GateKind::Y,
            "Z" => GateKind::Z,
            "S" => GateKind::S,
            "SDG" | "SDAG" => GateKind::Sdg,
            "RX" => GateKind::RX,
            "RY" => GateKind::RY,
            "RZ" => GateKind::RZ,
            "CX" | "CNOT" => GateKind::CX,
            "CZ" => GateKind::CZ,
            "RZZ" => GateKind::RZZ,
            other => return Err(Error::Gate(format!("unknown gate `{other}`"))),
        })
    }
}

/// Ties a rotation angle to an ansatz parameter: `angle = scale * params[index]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamRef {
    pub index: usize,
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    /// One entry for single-qubit kinds; `[control, target]` for CX.
    pub qubits: Vec<usize>,
    pub angle: Option<f64>,
    pub param: Option<ParamRef>,
}

impl Gate {
    pub fn single(kind: GateKind, q: usize) -> Self {
        Gate {
            kind,
            qubits: vec![q],
            angle: None,
            param: None,
        }
    }

    pub fn rotation(kind: GateKind, q: usize, angle: f64) -> Self {
        Gate {
            kind,
            qubits: vec![q],
            angle: Some(angle),
            param: None,
        }
    }

    pub fn two(kind: GateKind, a: usize, b: usize) -> Self {
        Gate {
            kind,
            qubits: vec![a, b],
            angle: None,
            param: None,
        }
    }

    pub fn rzz(a: usize, b: usize, angle: f64) -> Self {
        Gate {
            kind: GateKind::RZZ,
            qubits: vec![a, b],
            angle: Some(angle),
            param: None,
        }
    }

    pub fn h(q: usize) -> Self {
        Gate::single(GateKind::H, q)
    }
    pub fn x(q: usize) -> Self {
        Gate::single(GateKind::X, q)
    }
    pub fn s(q: usize) -> Self {
        Gate::single(GateKind::S, q)
    }
    pub fn sdg(q: usize) -> Self {
        Gate::single(GateKind::Sdg, q)
    }
    pub fn rx(q: usize, angle: f64) -> Self {
        Gate::rotation(GateKind::RX, q, angle)
    }
    pub fn ry(q: usize, angle: f64) -> Self {
        Gate::rotation(GateKind::RY, q, angle)
    }
    pub fn rz(q: usize, angle: f64) -> Self {
        Gate::rotation(GateKind::RZ, q, angle)
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Gate::two(GateKind::CX, control, target)
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Gate::two(GateKind::CZ, a, b)
    }

    pub fn with_param(mut self, index: usize, scale: f64) -> Self {
        self.param = Some(ParamRef { index, scale });
        self
    }

    pub fn arity(&self) -> usize {
        self.kind.arity()
    }

    /// Checks qubit count, index range, distinctness and angle presence.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.qubits.len() != self.kind.arity() {
            return Err(Error::Gate(format!(
                "{} expects {} qubit(s), got {}",
                self.kind,
                self.kind.arity(),
                self.qubits.len()
            )));
        }
        for &q in &self.qubits {
            if q >= n {
                return Err(Error::IndexOutOfRange {
                    index: q,
                    bound: n,
                    what: "qubits",
                });
            }
        }
        if self.qubits.len() == 2 && self.qubits[0] == self.qubits[1] {
            return Err(Error::Gate(format!("{} on repeated qubit {}", self.kind, self.qubits[0])));
        }
        match (self.kind.is_rotation(), self.angle) {
            (true, None) => Err(Error::Gate(format!("{} requires an angle", self.kind))),
            (false, Some(_)) => Err(Error::Gate(format!("{} takes no angle", self.kind))),
            _ => Ok(()),
        }
    }

    /// 2x2 unitary of a single-qubit gate.
    pub fn matrix1(&self) -> Result<Mat2> {
        single_qubit_matrix(self.kind, self.angle.unwrap_or(0.0))
    }
}

pub fn single_qubit_matrix(kind: GateKind, angle: f64) -> Result<Mat2> {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    Ok(match kind {
        GateKind::H => [[h, h], [h, -h]],
        GateKind::X => [[z, o], [o, z]],
        GateKind::Y => [[z, -i], [i, z]],
        GateKind::Z => [[o, z], [z, -o]],
        GateKind::S => [[o, z], [z, i]],
        GateKind::Sdg => [[o, z], [z, -i]],
        GateKind::RX => [
            [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
            [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        ],
        GateKind::RY => [
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ],
        GateKind::RZ => [[Complex64::new(c, -s), z], [z, Complex64::new(c, s)]],
        k => return Err(Error::Gate(format!("{k} is not a single-qubit gate"))),
    })
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for q in &self.qubits {
            write!(f, " {q}")?;
        }
        if let Some(a) = self.angle {
            write!(f, " {a:.17e}")?;
        }
        Ok(())
    }
}
