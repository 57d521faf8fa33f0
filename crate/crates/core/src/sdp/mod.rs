//! Trust-region purification: minimize `Tr(K D)` over DQG-feasible 2-RDMs
//! within Frobenius distance `delta` of a noisy 2-RDM.

mod admm;
mod basis;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::hamiltonian::ReducedHamiltonian;
use crate::rdm::{check_nrep, contract_to_rdm1, frobenius_distance, ConstraintReport, Rdm1, Rdm2};
use crate::{Error, Result};

use admm::{cone_blocks, psd_distance, Ball, Solver};
use basis::PairBasis;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SdpOptions {
    pub max_iters: usize,
    pub residual_tol: f64,
    /// Initial ADMM penalty.
    pub penalty: f64,
    pub over_relaxation: f64,
    /// Residual-balancing period for the penalty; 0 disables adaptation.
    pub adapt_every: usize,
    pub plateau_window: usize,
    pub plateau_rel_tol: f64,
    pub history_every: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            max_iters: 50_000,
            residual_tol: 1e-6,
            penalty: 1.0,
            over_relaxation: 1.6,
            adapt_every: 100,
            plateau_window: 500,
            plateau_rel_tol: 1e-10,
            history_every: 10,
        }
    }
}

impl SdpOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("sdp options: {m}")));
        if !(self.residual_tol > 0.0 && self.residual_tol.is_finite()) {
            return bad("residual_tol must be positive");
        }
        if !(self.penalty > 0.0 && self.penalty.is_finite()) {
            return bad("penalty must be positive");
        }
        if !(self.over_relaxation > 0.0 && self.over_relaxation < 2.0) {
            return bad("over_relaxation must lie in (0, 2)");
        }
        if self.plateau_window == 0 || self.history_every == 0 {
            return bad("plateau_window and history_every must be positive");
        }
        if !(self.plateau_rel_tol >= 0.0) {
            return bad("plateau_rel_tol must be non-negative");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpStatus {
    Optimal,
    MaxIters,
    Infeasible,
}

impl std::fmt::Display for SdpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SdpStatus::Optimal => "optimal",
            SdpStatus::MaxIters => "max_iters",
            SdpStatus::Infeasible => "infeasible",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualSample {
    pub iteration: usize,
    pub primal: f64,
    pub dual: f64,
    pub penalty: f64,
}

#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub k: ReducedHamiltonian,
    /// Ignored when `delta` is infinite.
    pub d_noisy: Option<Rdm2>,
    pub n_electrons: usize,
    /// Trust radius; `f64::INFINITY` drops the ball.
    pub delta: f64,
    pub options: SdpOptions,
}

#[derive(Clone, Debug)]
pub struct SdpResult {
    pub d_corrected: Rdm2,
    pub d1_corrected: Rdm1,
    /// `Tr(K D) + H_n`
    pub energy: f64,
    pub status: SdpStatus,
    pub iterations: usize,
    pub history: Vec<ResidualSample>,
    pub distance_to_noisy: Option<f64>,
    pub delta: f64,
    /// Largest imaginary element dropped from the noisy input.
    pub dropped_imaginary: f64,
    /// How infeasibility was decided, if it was.
    pub infeasibility: Option<String>,
    pub certificate: ConstraintReport,
}

/// JSON view of a result: everything but the RDMs themselves.
#[derive(Clone, Debug, Serialize)]
pub struct SdpReport {
    pub r: usize,
    pub n_electrons: usize,
    /// `None` encodes an infinite trust radius.
    pub delta: Option<f64>,
    pub status: SdpStatus,
    pub energy: f64,
    pub iterations: usize,
    pub distance_to_noisy: Option<f64>,
    pub dropped_imaginary: f64,
    pub infeasibility: Option<String>,
    pub constraints: ConstraintReport,
    pub options: SdpOptions,
    pub residual_history: Vec<ResidualSample>,
}

impl SdpResult {
    pub fn report(&self, options: &SdpOptions) -> SdpReport {
        SdpReport {
            r: self.d_corrected.r(),
            n_electrons: self.n_electrons(),
            delta: self.delta.is_finite().then_some(self.delta),
            status: self.status,
            energy: self.energy,
            iterations: self.iterations,
            distance_to_noisy: self.distance_to_noisy,
            dropped_imaginary: self.dropped_imaginary,
            infeasibility: self.infeasibility.clone(),
            constraints: self.certificate.clone(),
            options: options.clone(),
            residual_history: self.history.clone(),
        }
    }

    fn n_electrons(&self) -> usize {
        self.d1_corrected.trace().re.round().max(0.0) as usize
    }
}

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped).
pub fn project_psd(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if !m.is_square() {
        return Err(Error::InvalidArgument("project_psd needs a square matrix".into()));
    }
    let skew = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if skew > 1e-8 {
        return Err(Error::InvalidArgument(format!("project_psd input is not Hermitian (defect {skew:.3e})")));
    }
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.clone().symmetric_eigen();
    if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
        return Ok(h);
    }
    let clipped = eig.eigenvalues.map(|l| Complex64::new(l.max(0.0), 0.0));
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.adjoint())
}

/// `d` if within `delta` of `center`, else its radial projection onto the sphere.
pub fn project_ball(d: &Rdm2, center: &Rdm2, delta: f64) -> Result<Rdm2> {
    if !(delta >= 0.0) {
        return Err(Error::InvalidArgument(format!("ball radius must be non-negative, got {delta}")));
    }
    let dist = frobenius_distance(d, center)?;
    if dist <= delta {
        return Ok(d.clone());
    }
    let f = Complex64::new(delta / dist, 0.0);
    let c = center.matrix();
    Rdm2::from_matrix(d.r(), c + (d.matrix() - c) * f)
}

/// Orthogonal projection onto Hermitian, pair-antisymmetric matrices with
/// trace `N(N-1)`.
pub fn project_affine(d: &Rdm2, n: usize) -> Rdm2 {
    let r = d.r();
    let dm = d.matrix();
    let swap = |i: usize| (i % r) * r + i / r;
    let mut a = DMatrix::from_fn(r * r, r * r, |i, j| {
        (dm[(i, j)] - dm[(swap(i), j)] - dm[(i, swap(j))] + dm[(swap(i), swap(j))]) * 0.25
    });
    a = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let slots = r * (r - 1);
    if slots > 0 {
        let nf = n as f64;
        let shift = (nf * (nf - 1.0) - a.trace().re) / slots as f64;
        for p in 0..r {
            for q in 0..r {
                if p != q {
                    a[(p * r + q, p * r + q)] += shift;
                    a[(p * r + q, q * r + p)] -= shift;
                }
            }
        }
    }
    Rdm2::from_matrix(r, a).expect("same size")
}

/// Plain v2RDM ground state: the infinite trust radius limit.
pub fn v2rdm_ground(k: &ReducedHamiltonian, n: usize, options: &SdpOptions) -> Result<SdpResult> {
    purify(&SdpProblem {
        k: k.clone(),
        d_noisy: None,
        n_electrons: n,
        delta: f64::INFINITY,
        options: options.clone(),
    })
}

fn finish(
    basis: &PairBasis,
    p: &SdpProblem,
    x: &[f64],
    status: SdpStatus,
    iterations: usize,
    history: Vec<ResidualSample>,
    dropped_imaginary: f64,
    infeasibility: Option<String>,
) -> Result<SdpResult> {
    let d = Rdm2::from_real(basis.r, &basis.to_full(x))?;
    finish_rdm(d, p, status, iterations, history, dropped_imaginary, infeasibility)
}

fn finish_rdm(
    d: Rdm2,
    p: &SdpProblem,
    mut status: SdpStatus,
    iterations: usize,
    history: Vec<ResidualSample>,
    dropped_imaginary: f64,
    infeasibility: Option<String>,
) -> Result<SdpResult> {
    let d1 = contract_to_rdm1(&d, p.n_electrons)?;
    let tol = 10.0 * p.options.residual_tol;
    let certificate = check_nrep(&d1, &d, p.n_electrons, tol)?;
    let distance_to_noisy = match &p.d_noisy {
        Some(noisy) => Some(frobenius_distance(&d, noisy)?),
        None => None,
    };
    if status == SdpStatus::Optimal {
        let inside = distance_to_noisy.is_none_or(|dist| !p.delta.is_finite() || dist <= p.delta * (1.0 + 1e-6));
        if !certificate.pass || !inside {
            status = SdpStatus::MaxIters;
        }
    }
    Ok(SdpResult {
        energy: p.k.energy(&d)?,
        d_corrected: d,
        d1_corrected: d1,
        status,
        iterations,
        history,
        distance_to_noisy,
        delta: p.delta,
        dropped_imaginary,
        infeasibility,
        certificate,
    })
}

fn validate(p: &SdpProblem) -> Result<()> {
    p.options.validate()?;
    let r = p.k.r;
    if p.n_electrons < 2 || p.n_electrons > r {
        return Err(Error::InvalidArgument(format!(
            "electron count {} must lie in [2, {r}]",
            p.n_electrons
        )));
    }
    if p.k.k.nrows() != r * r || p.k.k.ncols() != r * r {
        return Err(Error::DimensionMismatch {
            expected: r * r,
            found: p.k.k.nrows(),
            context: "reduced Hamiltonian size",
        });
    }
    if !(p.delta >= 0.0) {
        return Err(Error::InvalidArgument(format!("trust radius must be >= 0 or infinite, got {}", p.delta)));
    }
    match &p.d_noisy {
        Some(d) if d.r() != r => Err(Error::DimensionMismatch {
            expected: r,
            found: d.r(),
            context: "noisy 2-RDM vs Hamiltonian",
        }),
        None if p.delta.is_finite() => Err(Error::InvalidArgument("a finite trust radius needs a noisy 2-RDM".into())),
        _ => Ok(()),
    }
}

/// Solves the trust-region SDP. Infeasibility is reported through the status.
pub fn purify(p: &SdpProblem) -> Result<SdpResult> {
    validate(p)?;
    let r = p.k.r;
    let n = p.n_electrons;
    let nf = n as f64;
    let opts = &p.options;
    let tol = opts.residual_tol;
    let basis = PairBasis::new(r);
    let trace_target = nf * (nf - 1.0);
    let c = basis.from_full(&p.k.k);

    // Noisy input in pair coordinates plus the part no feasible D can reach.
    let mut dropped_imaginary = 0.0;
    let mut noisy = None;
    if let Some(d) = p.d_noisy.as_ref().filter(|_| p.delta.is_finite()) {
        let herm = d.hermitian_part();
        dropped_imaginary = herm.matrix().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if dropped_imaginary > 1e-8 {
            log::warn!("dropping imaginary part of noisy 2-RDM, max |Im| = {dropped_imaginary:.3e}");
        } else if dropped_imaginary > 0.0 {
            log::info!("dropping imaginary part of noisy 2-RDM, max |Im| = {dropped_imaginary:.3e}");
        }
        let x = basis.from_full(&herm.matrix().map(|z| z.re));
        let total_sq = d.matrix().iter().map(|z| z.norm_sqr()).sum::<f64>();
        let perp = (total_sq - x.iter().map(|v| v * v).sum::<f64>()).max(0.0).sqrt();
        noisy = Some((herm, x, perp));
    }

    if let Some((herm, xn, perp)) = &noisy {
        if p.delta == 0.0 {
            // The ball is a point: feasible only if the input already is.
            let d1 = contract_to_rdm1(herm, n)?;
            let rep = check_nrep(&d1, herm, n, 10.0 * tol)?;
            let raw = p.d_noisy.as_ref().expect("present");
            let (status, why) = if rep.pass && frobenius_distance(herm, raw)? <= 10.0 * tol {
                (SdpStatus::Optimal, None)
            } else {
                (SdpStatus::Infeasible, Some(format!("zero radius and noisy input violates constraints by {:.3e}", rep.worst())))
            };
            return finish_rdm(raw.clone(), p, status, 0, Vec::new(), dropped_imaginary, why);
        }
        // Exact certificates: the ball misses the trace hyperplane or the D cone.
        let m = basis.m() as f64;
        let trace_gap: f64 = basis.diagonal_coords().iter().map(|&i| xn[i]).sum::<f64>() - trace_target;
        let plane_sq = trace_gap * trace_gap / m + perp * perp;
        let cone_sq = psd_distance(basis.compact(xn).as_slice(), basis.m()).powi(2) + perp * perp;
        let reach = p.delta * p.delta;
        let why = if plane_sq > reach {
            Some(format!("trust region misses the trace hyperplane by {:.3e}", plane_sq.sqrt() - p.delta))
        } else if cone_sq > reach {
            Some(format!("trust region misses the positive cone of D by {:.3e}", cone_sq.sqrt() - p.delta))
        } else {
            None
        };
        if why.is_some() {
            return finish(&basis, p, xn, SdpStatus::Infeasible, 0, Vec::new(), dropped_imaginary, why);
        }
    }

    let ball = noisy.as_ref().map(|(_, xn, perp)| Ball {
        center: xn.clone(),
        radius: (p.delta * p.delta - perp * perp).sqrt(),
    });
    let x0 = match &noisy {
        Some((_, xn, _)) => xn.clone(),
        None => {
            // Uniform ensemble over pair occupations.
            let mut x = vec![0.0; basis.nx];
            for i in basis.diagonal_coords() {
                x[i] = trace_target / basis.m() as f64;
            }
            x
        }
    };
    let blocks = cone_blocks(&basis, n);
    let solver = Solver::new(&basis, &blocks, ball.clone(), c, trace_target, opts.clone());

    let mut x = x0;
    let mut inner_tol = tol;
    let mut used = 0;
    let mut history = Vec::new();
    loop {
        let out = solver.run(&x, inner_tol, opts.max_iters - used);
        used += out.iterations;
        history.extend(out.history.into_iter().map(|mut s| {
            s.iteration += used - out.iterations;
            s
        }));
        x = out.x;
        match out.status {
            SdpStatus::Infeasible => {
                let why = Some("residuals plateaued above tolerance".to_string());
                return finish(&basis, p, &x, SdpStatus::Infeasible, used, history, dropped_imaginary, why);
            }
            SdpStatus::MaxIters => {
                return finish(&basis, p, &x, SdpStatus::MaxIters, used, history, dropped_imaginary, None);
            }
            SdpStatus::Optimal => {}
        }
        if let Some(b) = &ball {
            polish_into_ball(&basis, &mut x, b, trace_target);
        }
        let res = finish(&basis, p, &x, SdpStatus::Optimal, used, history.clone(), dropped_imaginary, None)?;
        if res.status == SdpStatus::Optimal || used >= opts.max_iters || inner_tol < tol * 1e-4 {
            return Ok(res);
        }
        // Residuals met but the certificate did not: tighten and continue.
        inner_tol *= 0.25;
    }
}

/// Pulls `x` radially into the ball while keeping the trace fixed.
fn polish_into_ball(basis: &PairBasis, x: &mut [f64], ball: &Ball, trace_target: f64) {
    let diag = basis.diagonal_coords();
    let m = diag.len() as f64;
    let gap: f64 = diag.iter().map(|&i| ball.center[i]).sum::<f64>() - trace_target;
    let mut center = ball.center.clone();
    for &i in &diag {
        center[i] -= gap / m;
    }
    let radius = (ball.radius * ball.radius - gap * gap / m).max(0.0).sqrt();
    let dist = x.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    if dist > radius {
        let f = radius / dist;
        for (xi, ci) in x.iter_mut().zip(&center) {
            *xi = ci + (*xi - ci) * f;
        }
    }
}
