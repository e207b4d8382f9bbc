//! Gram assembly and rank-revealing Cholesky factorization.

use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::BasisElement;
use super::{quad2d, spectral, Backend, CMatrix, Region, BACKEND_AGREEMENT_TOL};
use crate::error::{BergmanError, Result};

/// Pivots below this fraction of the largest diagonal entry are dropped.
pub const PIVOT_DROP_TOL: f64 = 1e-12;
/// Residual diagonals below `-INDEFINITE_TOL·max` abort the factorization.
const INDEFINITE_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct GramBuild {
    pub basis: Vec<BasisElement>,
    /// Hermitian Gram matrix of the prescaled basis.
    pub gram: CMatrix,
    /// Retained basis indices in pivot order.
    pub retained: Vec<usize>,
    /// Lower-triangular factor of the retained block in pivot order.
    pub chol: CMatrix,
    pub dropped: Vec<usize>,
}

fn quad2d_gram(region: &Region, basis: &[BasisElement]) -> Result<CMatrix> {
    let n = basis.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let vals: Vec<Complex64> = pairs
        .par_iter()
        .map(|&(i, j)| quad2d::inner_product(region, &basis[i], &basis[j]))
        .collect::<Result<_>>()?;
    let mut m = CMatrix::zeros(n);
    for (&(i, j), v) in pairs.iter().zip(vals) {
        m.set(i, j, v);
        m.set(j, i, v.conj());
    }
    Ok(m)
}

/// Gram matrix of the prescaled basis over `region`, then factored.
pub fn gram_matrix(basis: &[BasisElement], region: &Region, backend: Backend) -> Result<GramBuild> {
    if basis.is_empty() {
        return Err(BergmanError::InvalidArgument("basis is empty".into()));
    }
    let gram = match backend {
        Backend::Spectral => spectral::gram_raw(region, basis)?.hermitian_part(),
        Backend::Quad2d => quad2d_gram(region, basis)?,
        Backend::Both => {
            let s = spectral::gram_raw(region, basis)?.hermitian_part();
            let q = quad2d_gram(region, basis)?;
            for i in 0..basis.len() {
                for j in 0..basis.len() {
                    let scale = (s.get(i, i).re * s.get(j, j).re).sqrt().max(f64::MIN_POSITIVE);
                    let relative = (s.get(i, j) - q.get(i, j)).norm() / scale;
                    if relative > BACKEND_AGREEMENT_TOL {
                        return Err(BergmanError::BackendDisagreement {
                            spectral: format!("G[{i}][{j}] = {}", s.get(i, j)),
                            quad2d: format!("{}", q.get(i, j)),
                            relative,
                        });
                    }
                }
            }
            s
        }
    };
    factor(basis.to_vec(), gram)
}

/// Builds a `GramBuild` from a precomputed Hermitian Gram matrix.
pub fn factor(basis: Vec<BasisElement>, gram: CMatrix) -> Result<GramBuild> {
    let n = gram.n;
    let mut diag: Vec<f64> = (0..n).map(|i| gram.get(i, i).re).collect();
    let scale = diag.iter().copied().fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(BergmanError::Indefinite {
            pivot: scale,
            scale: 1.0,
        });
    }
    let mut rows: Vec<Vec<Complex64>> = vec![Vec::new(); n];
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut retained = Vec::new();
    while !remaining.is_empty() {
        let (pos, &p) = remaining
            .iter()
            .enumerate()
            .max_by(|a, b| diag[*a.1].partial_cmp(&diag[*b.1]).unwrap())
            .unwrap();
        let worst = remaining.iter().map(|&i| diag[i]).fold(f64::INFINITY, f64::min);
        if worst < -INDEFINITE_TOL * scale {
            return Err(BergmanError::Indefinite {
                pivot: worst,
                scale,
            });
        }
        if diag[p] <= PIVOT_DROP_TOL * scale {
            break;
        }
        remaining.swap_remove(pos);
        let k = retained.len();
        let lkk = diag[p].sqrt();
        let prow = rows[p].clone();
        rows[p].push(Complex64::new(lkk, 0.0));
        for &i in &remaining {
            let mut v = gram.get(i, p);
            for j in 0..k {
                v -= rows[i][j] * prow[j].conj();
            }
            let lik = v / lkk;
            diag[i] -= lik.norm_sqr();
            rows[i].push(lik);
        }
        retained.push(p);
    }
    let rank = retained.len();
    let mut chol = CMatrix::zeros(rank);
    for (a, &orig) in retained.iter().enumerate() {
        for b in 0..=a {
            chol.set(a, b, rows[orig][b]);
        }
    }
    let mut dropped = remaining;
    dropped.sort_unstable();
    Ok(GramBuild {
        basis,
        gram,
        retained,
        chol,
        dropped,
    })
}

impl GramBuild {
    pub fn rank(&self) -> usize {
        self.retained.len()
    }

    /// Max relative deviation of `L·Lᴴ` from the retained Gram block.
    pub fn reconstruction_error(&self) -> f64 {
        let r = self.rank();
        let mut worst: f64 = 0.0;
        for a in 0..r {
            for b in 0..r {
                let mut v = Complex64::new(0.0, 0.0);
                for k in 0..=a.min(b) {
                    v += self.chol.get(a, k) * self.chol.get(b, k).conj();
                }
                let g = self.gram.get(self.retained[a], self.retained[b]);
                let scale = (self.gram.get(self.retained[a], self.retained[a]).re
                    * self.gram.get(self.retained[b], self.retained[b]).re)
                    .sqrt();
                worst = worst.max((v - g).norm() / scale);
            }
        }
        worst
    }

    /// `L⁻¹` (lower triangular), mapping retained basis values to values of
    /// an orthonormal system.
    pub fn inverse_factor(&self) -> CMatrix {
        let r = self.rank();
        let mut inv = CMatrix::zeros(r);
        for col in 0..r {
            // solve L x = e_col
            for i in col..r {
                let mut v = if i == col {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                for k in col..i {
                    v -= self.chol.get(i, k) * inv.get(k, col);
                }
                inv.set(i, col, v / self.chol.get(i, i));
            }
        }
        inv
    }
}
