//! Consensus ADMM over the D, Q and G cones plus the trust-region ball.
//!
//! Each cone block is an affine image `M_b x + m_b` of the pair coordinates;
//! the x-update solves the normal equations with the trace constraint as an
//! explicit equality, so every iterate satisfies the affine conditions
//! exactly and only the cone and ball memberships carry residuals.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use super::basis::{Affine, AffineBuilder, PairBasis};
use super::{ResidualSample, SdpOptions, SdpStatus};

/// Sparse affine map to a flattened symmetric `side x side` matrix.
#[derive(Clone, Debug)]
pub(crate) struct Block {
    pub side: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    constants: Vec<f64>,
}

impl Block {
    fn from_rows(side: usize, rows: Vec<Affine>) -> Self {
        assert_eq!(rows.len(), side * side);
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut constants = Vec::with_capacity(rows.len());
        for row in rows {
            constants.push(row.constant);
            for (i, c) in row.terms {
                cols.push(i);
                vals.push(c);
            }
            row_ptr.push(cols.len());
        }
        Block {
            side,
            row_ptr,
            cols,
            vals,
            constants,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.constants.len())
            .map(|k| {
                let mut v = self.constants[k];
                for t in self.row_ptr[k]..self.row_ptr[k + 1] {
                    v += self.vals[t] * x[self.cols[t]];
                }
                v
            })
            .collect()
    }

    /// `out += M^T v`
    fn apply_transpose_add(&self, v: &[f64], out: &mut [f64]) {
        for (k, vk) in v.iter().enumerate() {
            for t in self.row_ptr[k]..self.row_ptr[k + 1] {
                out[self.cols[t]] += self.vals[t] * vk;
            }
        }
    }

    fn add_gram(&self, h: &mut DMatrix<f64>) {
        for k in 0..self.constants.len() {
            let range = self.row_ptr[k]..self.row_ptr[k + 1];
            for a in range.clone() {
                for b in range.clone() {
                    h[(self.cols[a], self.cols[b])] += self.vals[a] * self.vals[b];
                }
            }
        }
    }

    pub fn constants(&self) -> &[f64] {
        &self.constants
    }
}

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// `D1(x)` through the contraction identity.
pub(crate) fn d1_forms(basis: &PairBasis, n: usize) -> Vec<Vec<Affine>> {
    let r = basis.r;
    let f = 1.0 / (n as f64 - 1.0);
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let mut b = AffineBuilder::default();
                    for k in 0..r {
                        b.add_form(&basis.d_form(i, k, j, k), f);
                    }
                    b.build()
                })
                .collect()
        })
        .collect()
}

/// The three cone blocks `[D, Q, G]` as sparse affine maps.
pub(crate) fn cone_blocks(basis: &PairBasis, n: usize) -> Vec<Block> {
    let r = basis.r;
    let m = basis.m();
    let d1 = d1_forms(basis, n);

    let mut d_rows = Vec::with_capacity(m * m);
    let mut q_rows = Vec::with_capacity(m * m);
    for &(p, q) in &basis.pairs {
        for &(a, b) in &basis.pairs {
            let mut bd = AffineBuilder::default();
            bd.add_form(&basis.d_form(p, q, a, b), 2.0);
            d_rows.push(bd.build());

            let mut bq = AffineBuilder::default();
            bq.add_const(2.0 * (delta(p, a) * delta(q, b) - delta(p, b) * delta(q, a)));
            bq.add_form(&d1[a][p], -2.0 * delta(q, b));
            bq.add_form(&d1[b][p], 2.0 * delta(q, a));
            bq.add_form(&d1[a][q], 2.0 * delta(p, b));
            bq.add_form(&d1[b][q], -2.0 * delta(p, a));
            bq.add_form(&basis.d_form(a, b, p, q), 2.0);
            q_rows.push(bq.build());
        }
    }

    let mut g_rows = Vec::with_capacity(r * r * r * r);
    for row in 0..r * r {
        let (p, q) = (row / r, row % r);
        for col in 0..r * r {
            let (a, b) = (col / r, col % r);
            let mut bg = AffineBuilder::default();
            bg.add_form(&d1[p][a], delta(q, b));
            bg.add_form(&basis.d_form(p, b, a, q), -1.0);
            g_rows.push(bg.build());
        }
    }

    vec![
        Block::from_rows(m, d_rows),
        Block::from_rows(m, q_rows),
        Block::from_rows(r * r, g_rows),
    ]
}

/// Nearest PSD matrix to a flattened symmetric matrix.
pub(crate) fn project_psd_flat(v: &[f64], side: usize) -> Vec<f64> {
    let mut a = DMatrix::from_row_slice(side, side, v);
    a = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(a.clone());
    if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
        return a.as_slice().to_vec();
    }
    let clipped = eig.eigenvalues.map(|l| l.max(0.0));
    let out = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    // Column-major storage of a symmetric matrix is also its row-major flattening.
    out.as_slice().to_vec()
}

/// Most negative eigenvalue mass: Frobenius distance to the PSD cone.
pub(crate) fn psd_distance(v: &[f64], side: usize) -> f64 {
    let mut a = DMatrix::from_row_slice(side, side, v);
    a = (&a + a.transpose()) * 0.5;
    a.symmetric_eigenvalues().iter().filter(|l| **l < 0.0).map(|l| l * l).sum::<f64>().sqrt()
}

#[derive(Clone, Debug)]
pub(crate) struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    fn project(&self, y: &[f64]) -> Vec<f64> {
        let dist = norm_diff(y, &self.center);
        if dist <= self.radius {
            return y.to_vec();
        }
        let f = self.radius / dist;
        y.iter().zip(&self.center).map(|(yi, ci)| ci + (yi - ci) * f).collect()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub(crate) struct Solver<'a> {
    blocks: &'a [Block],
    ball: Option<Ball>,
    c: Vec<f64>,
    trace_coords: Vec<usize>,
    trace_target: f64,
    chol: Cholesky<f64, Dyn>,
    /// `H^{-1} a` for the trace normal `a`, and `a . H^{-1} a`.
    w: DVector<f64>,
    aw: f64,
    opts: SdpOptions,
}

pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub status: SdpStatus,
    pub iterations: usize,
    pub history: Vec<ResidualSample>,
}

impl<'a> Solver<'a> {
    pub fn new(
        basis: &PairBasis,
        blocks: &'a [Block],
        ball: Option<Ball>,
        c: Vec<f64>,
        trace_target: f64,
        opts: SdpOptions,
    ) -> Self {
        let nx = basis.nx;
        let mut h = DMatrix::zeros(nx, nx);
        for b in blocks {
            b.add_gram(&mut h);
        }
        if ball.is_some() {
            for i in 0..nx {
                h[(i, i)] += 1.0;
            }
        }
        let chol = Cholesky::new(h).expect("the D block is an isometry, so the normal matrix is positive definite");
        let trace_coords = basis.diagonal_coords();
        let mut a = DVector::zeros(nx);
        for &i in &trace_coords {
            a[i] = 1.0;
        }
        let w = chol.solve(&a);
        let aw = a.dot(&w);
        Solver {
            blocks,
            ball,
            c,
            trace_coords,
            trace_target,
            chol,
            w,
            aw,
            opts,
        }
    }

    /// Minimizes the quadratic model subject to the trace equality.
    fn x_update(&self, rhs: Vec<f64>) -> Vec<f64> {
        let mut x = self.chol.solve(&DVector::from_vec(rhs));
        let t: f64 = self.trace_coords.iter().map(|&i| x[i]).sum();
        x.axpy((self.trace_target - t) / self.aw, &self.w, 1.0);
        x.data.into()
    }

    /// Runs from `x0` until residuals drop below `tol` or a stop condition.
    pub fn run(&self, x0: &[f64], tol: f64, max_iters: usize) -> Outcome {
        let o = &self.opts;
        let alpha = o.over_relaxation;
        let mut rho = o.penalty;
        let mut x = x0.to_vec();
        let mut z: Vec<Vec<f64>> = self
            .blocks
            .iter()
            .map(|b| project_psd_flat(&b.apply(&x), b.side))
            .collect();
        let mut u: Vec<Vec<f64>> = z.iter().map(|zi| vec![0.0; zi.len()]).collect();
        let mut zb = self.ball.as_ref().map(|b| b.project(&x));
        let mut ub = zb.as_ref().map(|v| vec![0.0; v.len()]);
        let mut combined = Vec::new();
        let mut history = Vec::new();
        let nx = x.len();

        for it in 1..=max_iters {
            let mut rhs: Vec<f64> = self.c.iter().map(|ci| -ci / rho).collect();
            for (k, b) in self.blocks.iter().enumerate() {
                let v: Vec<f64> = z[k]
                    .iter()
                    .zip(&u[k])
                    .zip(b.constants())
                    .map(|((zi, ui), mi)| zi - ui - mi)
                    .collect();
                b.apply_transpose_add(&v, &mut rhs);
            }
            if let (Some(zb), Some(ub)) = (&zb, &ub) {
                for i in 0..nx {
                    rhs[i] += zb[i] - ub[i];
                }
            }
            x = self.x_update(rhs);

            let mut primal_sq = 0.0;
            let mut dual = vec![0.0; nx];
            for (k, b) in self.blocks.iter().enumerate() {
                let mx = b.apply(&x);
                let y: Vec<f64> = mx.iter().zip(&z[k]).map(|(m, zi)| alpha * m + (1.0 - alpha) * zi).collect();
                let arg: Vec<f64> = y.iter().zip(&u[k]).map(|(a, b)| a + b).collect();
                let znew = project_psd_flat(&arg, b.side);
                for i in 0..y.len() {
                    u[k][i] += y[i] - znew[i];
                }
                primal_sq += mx.iter().zip(&znew).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
                let dz: Vec<f64> = znew.iter().zip(&z[k]).map(|(a, b)| a - b).collect();
                b.apply_transpose_add(&dz, &mut dual);
                z[k] = znew;
            }
            if let (Some(ball), Some(zb), Some(ub)) = (&self.ball, &mut zb, &mut ub) {
                let y: Vec<f64> = x.iter().zip(zb.iter()).map(|(m, zi)| alpha * m + (1.0 - alpha) * zi).collect();
                let arg: Vec<f64> = y.iter().zip(ub.iter()).map(|(a, b)| a + b).collect();
                let znew = ball.project(&arg);
                for i in 0..nx {
                    ub[i] += y[i] - znew[i];
                    primal_sq += (x[i] - znew[i]).powi(2);
                    dual[i] += znew[i] - zb[i];
                }
                *zb = znew;
            }
            let primal = primal_sq.sqrt();
            let dual = rho * norm(&dual);
            combined.push(primal.max(dual));
            if it % o.history_every == 0 {
                history.push(ResidualSample {
                    iteration: it,
                    primal,
                    dual,
                    penalty: rho,
                });
            }

            if primal <= tol && dual <= tol {
                history.push(ResidualSample {
                    iteration: it,
                    primal,
                    dual,
                    penalty: rho,
                });
                return Outcome {
                    x,
                    status: SdpStatus::Optimal,
                    iterations: it,
                    history,
                };
            }

            let w = o.plateau_window;
            if it >= 2 * w {
                let before = combined[it - 2 * w..it - w].iter().copied().fold(f64::INFINITY, f64::min);
                let recent = combined[it - w..].iter().copied().fold(f64::INFINITY, f64::min);
                // Infeasibility leaves a persistent primal gap while the dual residual vanishes.
                let gap_dominates = dual < 0.1 * primal;
                if gap_dominates && recent > 100.0 * tol && before - recent < o.plateau_rel_tol * before {
                    history.push(ResidualSample {
                        iteration: it,
                        primal,
                        dual,
                        penalty: rho,
                    });
                    return Outcome {
                        x,
                        status: SdpStatus::Infeasible,
                        iterations: it,
                        history,
                    };
                }
            }

            if o.adapt_every > 0 && it % o.adapt_every == 0 {
                let scale = if primal > 5.0 * dual {
                    2.0
                } else if dual > 5.0 * primal {
                    0.5
                } else {
                    1.0
                };
                if scale != 1.0 {
                    rho *= scale;
                    for uk in u.iter_mut() {
                        uk.iter_mut().for_each(|v| *v /= scale);
                    }
                    if let Some(ub) = &mut ub {
                        ub.iter_mut().for_each(|v| *v /= scale);
                    }
                }
            }
        }
        Outcome {
            x,
            status: SdpStatus::MaxIters,
            iterations: max_iters,
            history,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::exact_rdms;
    use crate::qsim::QuantumState;
    use crate::rdm::{build_g, build_q};
    use num_complex::Complex64;

    fn n2_state(r: usize, seed: u64) -> QuantumState {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1usize << r)
            .map(|i| {
                if i.count_ones() == 2 {
                    Complex64::new(rng.random_range(-1.0..1.0), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        QuantumState::from_amplitudes(amps).unwrap()
    }

    /// The sparse Q and G maps agree with the dense constructors.
    #[test]
    fn blocks_match_dense_q_and_g() {
        let r = 5;
        let basis = PairBasis::new(r);
        let blocks = cone_blocks(&basis, 2);
        let (d1, d2) = exact_rdms(&n2_state(r, 4), r).unwrap();
        let x = basis.from_full(&d2.matrix().map(|z| z.re));
        let q = build_q(&d2, &d1, r, 2).unwrap();
        let g = build_g(&d2, &d1, r).unwrap();

        let zq = blocks[1].apply(&x);
        let m = basis.m();
        for (a, &(p, pq)) in basis.pairs.iter().enumerate() {
            for (b, &(s, sq)) in basis.pairs.iter().enumerate() {
                let want = 2.0 * q[(p * r + pq, s * r + sq)].re;
                assert!((zq[a * m + b] - want).abs() < 1e-12);
            }
        }
        let zg = blocks[2].apply(&x);
        for i in 0..r * r {
            for j in 0..r * r {
                assert!((zg[i * r * r + j] - g[(i, j)].re).abs() < 1e-12);
            }
        }
        let zd = blocks[0].apply(&x);
        let compact = basis.compact(&x);
        for a in 0..m {
            for b in 0..m {
                assert!((zd[a * m + b] - compact[(a, b)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn psd_flat_projection() {
        let v = [1.0, 0.0, 0.0, -1.0];
        assert_eq!(project_psd_flat(&v, 2), vec![1.0, 0.0, 0.0, 0.0]);
        assert!((psd_distance(&v, 2) - 1.0).abs() < 1e-15);
        let w = [2.0, 1.0, 1.0, 2.0];
        assert_eq!(project_psd_flat(&w, 2), w.to_vec());
    }
}
