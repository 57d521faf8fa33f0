//! Variational minimization of `<psi(theta)|H|psi(theta)>`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::fermion::{pauli_expectation, PauliSum};
use crate::hamiltonian::{build_qubit_hamiltonian, MolecularSystem};
use crate::qsim::ansatz::{build_hea, build_uccsd, hartree_fock_circuit, hea_initial_params, hea_param_count, uccsd_excitations};
use crate::qsim::{simulate, Circuit, NoiseModel, QuantumState};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Ansatz {
    Uccsd,
    /// Hardware-efficient ansatz on top of the Hartree-Fock determinant.
    Hea { layers: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimizer {
    /// Gradient descent when noiseless, Nelder-Mead when noisy.
    #[default]
    Auto,
    GradientDescent,
    NelderMead,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeConfig {
    pub ansatz: Ansatz,
    #[serde(default)]
    pub optimizer: Optimizer,
    pub max_iters: usize,
    pub energy_tol: f64,
    pub seed: u64,
    #[serde(default)]
    pub noise: Option<NoiseModel>,
    /// Overrides the ansatz's default starting point.
    #[serde(default)]
    pub initial_params: Option<Vec<f64>>,
    /// Initial simplex edge for Nelder-Mead.
    #[serde(default = "default_simplex_step")]
    pub simplex_step: f64,
}

fn default_simplex_step() -> f64 {
    0.05
}

impl Default for VqeConfig {
    fn default() -> Self {
        VqeConfig {
            ansatz: Ansatz::Uccsd,
            optimizer: Optimizer::Auto,
            max_iters: 500,
            energy_tol: 1e-9,
            seed: 0,
            noise: None,
            initial_params: None,
            simplex_step: default_simplex_step(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub params: Vec<f64>,
    pub energy: f64,
    /// Energy after each accepted step, starting with the initial energy.
    pub trace: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
}

pub fn num_params(sys: &MolecularSystem, ansatz: Ansatz) -> usize {
    match ansatz {
        Ansatz::Uccsd => uccsd_excitations(sys.r, sys.n_electrons).len(),
        Ansatz::Hea { layers } => hea_param_count(sys.r, layers),
    }
}

pub fn build_ansatz(sys: &MolecularSystem, ansatz: Ansatz, params: &[f64]) -> Result<Circuit> {
    match ansatz {
        Ansatz::Uccsd => build_uccsd(sys, params),
        Ansatz::Hea { layers } => {
            let mut c = hartree_fock_circuit(sys.r, sys.n_electrons)?;
            c.append(&build_hea(sys.r, layers, params)?)?;
            Ok(c)
        }
    }
}

pub fn initial_params(sys: &MolecularSystem, ansatz: Ansatz, seed: u64) -> Vec<f64> {
    match ansatz {
        Ansatz::Uccsd => vec![0.0; num_params(sys, ansatz)],
        Ansatz::Hea { layers } => hea_initial_params(sys.r, layers, seed),
    }
}

/// Energy of an ansatz circuit under an optional noise model.
#[derive(Clone, Debug)]
pub struct EnergyModel {
    pub hamiltonian: PauliSum,
    pub template: Circuit,
    pub noise: Option<NoiseModel>,
}

impl EnergyModel {
    pub fn new(sys: &MolecularSystem, ansatz: Ansatz, noise: Option<NoiseModel>) -> Result<Self> {
        let zeros = vec![0.0; num_params(sys, ansatz)];
        Ok(EnergyModel {
            hamiltonian: build_qubit_hamiltonian(sys)?,
            template: build_ansatz(sys, ansatz, &zeros)?,
            noise,
        })
    }

    pub fn num_params(&self) -> usize {
        self.template.num_params()
    }

    pub fn circuit(&self, params: &[f64]) -> Result<Circuit> {
        if params.len() != self.num_params() {
            return Err(Error::DimensionMismatch {
                expected: self.num_params(),
                found: params.len(),
                context: "ansatz parameters",
            });
        }
        let mut c = self.template.clone();
        c.bind(params)?;
        Ok(c)
    }

    pub fn state_of(&self, circuit: &Circuit) -> Result<QuantumState> {
        simulate(circuit, self.noise.as_ref(), &QuantumState::zero(circuit.num_qubits()))
    }

    pub fn state(&self, params: &[f64]) -> Result<QuantumState> {
        self.state_of(&self.circuit(params)?)
    }

    pub fn energy_of(&self, circuit: &Circuit) -> Result<f64> {
        Ok(pauli_expectation(&self.state_of(circuit)?, &self.hamiltonian)?.re)
    }

    pub fn energy(&self, params: &[f64]) -> Result<f64> {
        self.energy_of(&self.circuit(params)?)
    }

    /// Gate-level parameter shift: every rotation bound to `index` is shifted
    /// by `+-pi/2` in turn and the results are combined by the chain rule.
    /// When the parameter drives a single gate with unit scale this is exactly
    /// `[E(theta + pi/2 e_i) - E(theta - pi/2 e_i)] / 2`.
    pub fn parameter_shift(&self, params: &[f64], index: usize) -> Result<f64> {
        if index >= self.num_params() {
            return Err(Error::IndexOutOfRange {
                index,
                bound: self.num_params(),
                what: "parameters",
            });
        }
        let base = self.circuit(params)?;
        let mut grad = 0.0;
        for (g_idx, g) in base.gates().iter().enumerate() {
            let Some(p) = g.param.filter(|p| p.index == index) else {
                continue;
            };
            let angle = g.angle.unwrap_or(0.0);
            let shifted = |delta: f64| -> Result<f64> {
                let mut ng = g.clone();
                ng.angle = Some(angle + delta);
                self.energy_of(&base.with_gate_replaced(g_idx, ng)?)
            };
            let plus = shifted(FRAC_PI_2)?;
            let minus = shifted(-FRAC_PI_2)?;
            grad += p.scale * (plus - minus) / 2.0;
        }
        Ok(grad)
    }

    pub fn gradient(&self, params: &[f64]) -> Result<Vec<f64>> {
        (0..self.num_params()).map(|i| self.parameter_shift(params, i)).collect()
    }
}

pub fn parameter_shift_gradient(sys: &MolecularSystem, ansatz: Ansatz, params: &[f64], index: usize) -> Result<f64> {
    EnergyModel::new(sys, ansatz, None)?.parameter_shift(params, index)
}

/// Tracks the "3 consecutive small changes" stopping rule.
struct Convergence {
    tol: f64,
    streak: usize,
}

impl Convergence {
    fn update(&mut self, delta: f64) -> bool {
        if delta.abs() < self.tol {
            self.streak += 1;
        } else {
            self.streak = 0;
        }
        self.streak >= 3
    }
}

pub fn run_vqe(sys: &MolecularSystem, cfg: &VqeConfig) -> Result<VqeResult> {
    if cfg.energy_tol.is_nan() || cfg.energy_tol <= 0.0 {
        return Err(Error::InvalidArgument("energy_tol must be positive".into()));
    }
    let model = EnergyModel::new(sys, cfg.ansatz, cfg.noise)?;
    let x0 = match &cfg.initial_params {
        Some(p) => p.clone(),
        None => initial_params(sys, cfg.ansatz, cfg.seed),
    };
    if x0.len() != model.num_params() {
        return Err(Error::DimensionMismatch {
            expected: model.num_params(),
            found: x0.len(),
            context: "initial parameters",
        });
    }
    let noisy = cfg.noise.is_some();
    let use_nm = match cfg.optimizer {
        Optimizer::Auto => noisy,
        Optimizer::GradientDescent => false,
        Optimizer::NelderMead => true,
    };
    if use_nm {
        nelder_mead(&model, x0, cfg)
    } else {
        gradient_descent(&model, x0, cfg)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Barzilai-Borwein steps safeguarded by Armijo backtracking.
fn gradient_descent(model: &EnergyModel, mut x: Vec<f64>, cfg: &VqeConfig) -> Result<VqeResult> {
    let mut e = model.energy(&x)?;
    let mut evaluations = 1;
    let mut trace = vec![e];
    let mut conv = Convergence {
        tol: cfg.energy_tol,
        streak: 0,
    };
    let mut converged = false;
    let mut iterations = 0;
    if cfg.max_iters == 0 || x.is_empty() {
        return Ok(VqeResult {
            params: x,
            energy: e,
            trace,
            converged: false,
            iterations,
            evaluations,
        });
    }
    let mut g = model.gradient(&x)?;
    let mut step = 0.5;
    while iterations < cfg.max_iters {
        iterations += 1;
        let gg = dot(&g, &g);
        if gg.sqrt() < 1e-10 {
            converged = true;
            break;
        }
        let mut accepted = None;
        let mut t = step;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - t * gi).collect();
            let et = model.energy(&trial)?;
            evaluations += 1;
            if et <= e - 1e-4 * t * gg {
                accepted = Some((trial, et));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, en)) = accepted else {
            // No descent possible at machine precision: stationary point.
            converged = true;
            break;
        };
        let gn = model.gradient(&xn)?;
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        step = if sy > 1e-16 { (dot(&s, &s) / sy).clamp(1e-4, 10.0) } else { (t * 2.0).min(10.0) };
        let de = en - e;
        x = xn;
        e = en;
        g = gn;
        trace.push(e);
        if conv.update(de) {
            converged = true;
            break;
        }
    }
    Ok(VqeResult {
        params: x,
        energy: e,
        trace,
        converged,
        iterations,
        evaluations,
    })
}

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
/// Converged when the simplex energy spread stays below `energy_tol` for three
/// consecutive iterations.
fn nelder_mead(model: &EnergyModel, x0: Vec<f64>, cfg: &VqeConfig) -> Result<VqeResult> {
    let n = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| -> Result<f64> {
        evaluations += 1;
        model.energy(x)
    };
    let e0 = eval(&x0)?;
    let mut trace = vec![e0];
    if cfg.max_iters == 0 || n == 0 {
        return Ok(VqeResult {
            params: x0,
            energy: e0,
            trace,
            converged: false,
            iterations: 0,
            evaluations,
        });
    }
    let mut simplex = vec![(x0.clone(), e0)];
    for i in 0..n {
        let mut v = x0.clone();
        v[i] += cfg.simplex_step;
        let e = eval(&v)?;
        simplex.push((v, e));
    }
    let mut conv = Convergence {
        tol: cfg.energy_tol,
        streak: 0,
    };
    let mut converged = false;
    let mut iterations = 0;
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    order(&mut simplex);
    while iterations < cfg.max_iters {
        iterations += 1;
        let worst = simplex[n].clone();
        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect() };
        let xr = along(1.0);
        let er = eval(&xr)?;
        if er < simplex[0].1 {
            let xe = along(2.0);
            let ee = eval(&xe)?;
            simplex[n] = if ee < er { (xe, ee) } else { (xr, er) };
        } else if er < simplex[n - 1].1 {
            simplex[n] = (xr, er);
        } else {
            let (xc, ec) = if er < worst.1 {
                let xc = along(0.5);
                let ec = eval(&xc)?;
                (xc, ec)
            } else {
                let xc = along(-0.5);
                let ec = eval(&xc)?;
                (xc, ec)
            };
            if ec < worst.1.min(er) {
                simplex[n] = (xc, ec);
            } else {
                let best = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    let v: Vec<f64> = best.iter().zip(&item.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                    let e = eval(&v)?;
                    *item = (v, e);
                }
            }
        }
        order(&mut simplex);
        trace.push(simplex[0].1);
        if conv.update(simplex[n].1 - simplex[0].1) {
            converged = true;
            break;
        }
    }
    let (params, energy) = simplex.swap_remove(0);
    Ok(VqeResult {
        params,
        energy,
        trace,
        converged,
        iterations,
        evaluations,
    })
}

/// JSON run record (configuration echo plus result).
#[derive(Clone, Debug, Serialize)]
pub struct VqeRecord<'a> {
    pub system: &'a str,
    pub config: &'a VqeConfig,
    pub result: &'a VqeResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}
