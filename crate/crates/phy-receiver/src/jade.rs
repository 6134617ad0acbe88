//! Blind source separation by joint approximate diagonalization of
//! fourth-order cumulant matrices (JADE).
//!
//! Pipeline: center, whiten via the Hermitian eigendecomposition of the
//! sample covariance, estimate the whitened fourth-order cumulant tensor,
//! then jointly diagonalize its matrix slices with iterated complex Jacobi
//! rotations. Sources come back up to one permutation and a per-source
//! unit-modulus phase, the inherent blind ambiguities.

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use thiserror::Error;

use crate::polyphase::{MixingEstimate, PolyphaseObservation};

#[derive(Debug, Error)]
pub enum JadeError {
    #[error("need at least {min} observation vectors, got {got}")]
    TooFewVectors { min: usize, got: usize },
    #[error("joint diagonalization did not converge in {0} sweeps")]
    NoConvergence(usize),
}

/// Minimum number of observation vectors for usable cumulant estimates.
pub const MIN_VECTORS: usize = 200;
const MAX_SWEEPS: usize = 100;
const OFF_DIAG_STOP: f64 = 1e-8;
/// Covariance eigenvalues below this fraction of the largest are treated as
/// an empty dimension rather than whitened up into junk.
const RANK_EPS: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct JadeResult {
    /// Estimated P x n mixing matrix (columns match `sources` order).
    pub mixing: MixingEstimate,
    /// Separated unit-power source sequences.
    pub sources: Vec<Vec<Complex64>>,
    /// Jacobi sweeps used.
    pub sweeps: usize,
}

/// Separate up to `n_sources` components from the stacked observation.
pub fn jade_separate(
    obs: &PolyphaseObservation,
    n_sources: usize,
) -> Result<JadeResult, JadeError> {
    let t = obs.n_vectors();
    if t < MIN_VECTORS {
        return Err(JadeError::TooFewVectors {
            min: MIN_VECTORS,
            got: t,
        });
    }
    let p = obs.n_phases();
    let n_req = n_sources.min(p);

    let mut x = obs.as_matrix();
    // center rows
    for r in 0..p {
        let mean = x.row(r).sum() / Complex64::new(t as f64, 0.0);
        for c in 0..t {
            x[(r, c)] -= mean;
        }
    }

    // whiten: R = X X^H / T, Z = D^{-1/2} U^H X on the significant subspace
    let r = &x * x.adjoint() / Complex64::new(t as f64, 0.0);
    let eig = r.symmetric_eigen();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let lead = eig.eigenvalues[order[0]].max(0.0);
    let n = order
        .iter()
        .take(n_req)
        .filter(|&&i| eig.eigenvalues[i] > RANK_EPS * lead && eig.eigenvalues[i] > 0.0)
        .count();
    let n = n.max(1);

    let mut whitener = DMatrix::from_element(n, p, Complex64::new(0.0, 0.0));
    let mut colorer = DMatrix::from_element(p, n, Complex64::new(0.0, 0.0));
    for (row, &idx) in order.iter().take(n).enumerate() {
        let lambda = eig.eigenvalues[idx];
        let scale = 1.0 / lambda.sqrt();
        for c in 0..p {
            let u = eig.eigenvectors[(c, idx)];
            whitener[(row, c)] = u.conj() * scale;
            colorer[(c, row)] = u * lambda.sqrt();
        }
    }
    let z = &whitener * &x;

    // fourth-order cumulants of the whitened data
    let mut m4 = vec![Complex64::new(0.0, 0.0); n * n * n * n];
    let mut pseudo = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..t {
        let col = z.column(i);
        for a in 0..n {
            for b in 0..n {
                pseudo[(a, b)] += col[a] * col[b];
            }
        }
        for pp in 0..n {
            for q in 0..n {
                let zpq = col[pp] * col[q].conj();
                for rr in 0..n {
                    for s in 0..n {
                        m4[((pp * n + q) * n + rr) * n + s] += zpq * col[rr] * col[s].conj();
                    }
                }
            }
        }
    }
    let tf = Complex64::new(t as f64, 0.0);
    for v in m4.iter_mut() {
        *v /= tf;
    }
    pseudo /= tf;

    // cumulant matrix slices Q_rs[p][q] = cum(z_p, z_q*, z_r, z_s*)
    let mut slices: Vec<DMatrix<Complex64>> = Vec::with_capacity(n * n);
    for rr in 0..n {
        for s in 0..n {
            let mut q_m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
            for pp in 0..n {
                for q in 0..n {
                    let mut v = m4[((pp * n + q) * n + rr) * n + s];
                    // E[z_p z_q*] = I after whitening
                    if pp == q && rr == s {
                        v -= Complex64::new(1.0, 0.0);
                    }
                    if pp == s && rr == q {
                        v -= Complex64::new(1.0, 0.0);
                    }
                    v -= pseudo[(pp, rr)] * pseudo[(q, s)].conj();
                    q_m[(pp, q)] = v;
                }
            }
            slices.push(q_m);
        }
    }

    // joint diagonalization by complex Jacobi rotations
    let mut v = DMatrix::from_diagonal_element(n, n, Complex64::new(1.0, 0.0));
    let mut sweeps = 0;
    let mut converged = n < 2;
    let threshold = 1e-9;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut rotated = false;
        for pp in 0..n - 1 {
            for q in pp + 1..n {
                // accumulate the 3x3 real matrix of the pairwise criterion
                let mut g: Matrix3<f64> = Matrix3::zeros();
                for m in &slices {
                    let h = [
                        m[(pp, pp)] - m[(q, q)],
                        m[(pp, q)] + m[(q, pp)],
                        Complex64::i() * (m[(q, pp)] - m[(pp, q)]),
                    ];
                    for a in 0..3 {
                        for b in 0..3 {
                            g[(a, b)] += (h[a].conj() * h[b]).re;
                        }
                    }
                }
                let eig3 = g.symmetric_eigen();
                let (mut best, mut best_val) = (0, f64::MIN);
                for i in 0..3 {
                    if eig3.eigenvalues[i] > best_val {
                        best_val = eig3.eigenvalues[i];
                        best = i;
                    }
                }
                let mut angles = eig3.eigenvectors.column(best).into_owned();
                if angles[0] < 0.0 {
                    angles = -angles;
                }
                let c: f64 = (0.5 + angles[0] / 2.0).sqrt();
                let s = Complex64::new(angles[1], -angles[2]) * (0.5 / c);
                if s.norm() < threshold {
                    continue;
                }
                rotated = true;
                // apply the Givens rotation to every slice and accumulate in V
                for m in slices.iter_mut() {
                    for row in 0..n {
                        let a = m[(row, pp)];
                        let b = m[(row, q)];
                        m[(row, pp)] = c * a + s * b;
                        m[(row, q)] = c * b - s.conj() * a;
                    }
                    for col in 0..n {
                        let a = m[(pp, col)];
                        let b = m[(q, col)];
                        m[(pp, col)] = c * a + s.conj() * b;
                        m[(q, col)] = c * b - s * a;
                    }
                }
                for row in 0..n {
                    let a = v[(row, pp)];
                    let b = v[(row, q)];
                    v[(row, pp)] = c * a + s * b;
                    v[(row, q)] = c * b - s.conj() * a;
                }
            }
        }
        if !rotated {
            converged = true;
        }
        // secondary stop: off-diagonal mass stops improving
        if sweeps >= 2 {
            let off: f64 = slices
                .iter()
                .map(|m| {
                    let mut acc = 0.0;
                    for a in 0..n {
                        for b in 0..n {
                            if a != b {
                                acc += m[(a, b)].norm_sqr();
                            }
                        }
                    }
                    acc
                })
                .sum();
            if off < OFF_DIAG_STOP {
                converged = true;
            }
        }
    }
    if !converged {
        return Err(JadeError::NoConvergence(MAX_SWEEPS));
    }

    // sources and mixing estimate back in observation space
    let separated = v.adjoint() * &z;
    let mut mixing = &colorer * &v;

    // normalize each source to unit mean power, folding the scale into A
    let mut sources = Vec::with_capacity(n);
    for row in 0..n {
        let power: f64 =
            separated.row(row).iter().map(|c| c.norm_sqr()).sum::<f64>() / t as f64;
        let scale = power.sqrt().max(1e-30);
        sources.push(separated.row(row).iter().map(|c| c / scale).collect());
        for r_i in 0..p {
            mixing[(r_i, row)] *= scale;
        }
    }

    Ok(JadeResult {
        mixing: MixingEstimate::from_matrix(mixing),
        sources,
        sweeps,
    })
}
