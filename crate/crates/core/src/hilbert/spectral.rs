//! Boundary-integral inner products.
//!
//! For holomorphic `f, g` on a neighbourhood of `closure(Ω)` and any smooth
//! `L` with `∂L/∂z̄ = conj(g)`,
//!
//! ```text
//! ∫_Ω f·conj(g) dA = (1/2i) ∮_{∂Ω} f·L dz
//! ```
//!
//! Every boundary circle integrand is smooth and periodic, so the trapezoid
//! rule converges geometrically. Order-1 tails use `L = log|z − z_j|²`, which
//! is single valued, so no branch cut is needed.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::{BasisElement, EvalPoint, LogComplex};
use super::{CMatrix, Region};
use crate::domain::OrientedCircle;
use crate::error::{BergmanError, Result};

pub const START_NODES: usize = 64;
pub const MAX_NODES: usize = 1 << 16;
pub const CONVERGENCE_TOL: f64 = 1e-11;

fn circle_point(c: &OrientedCircle, theta: f64) -> EvalPoint {
    let u = Complex64::from_polar(1.0, theta);
    match c.hole {
        Some(j) => EvalPoint::near_hole(c.center, j, c.log_radius, u),
        None => EvalPoint::plain(c.center + u * c.log_radius.exp()),
    }
}

/// Raw node sums `Σ f_a·L_b·(dz/dθ)` and `Σ |…|` over the given node indices.
fn accumulate(
    elements: &[BasisElement],
    c: &OrientedCircle,
    n_total: usize,
    nodes: impl Iterator<Item = usize>,
    sums: &mut [Complex64],
    abs_sums: &mut [f64],
) {
    let n = elements.len();
    let mut fv = vec![LogComplex::ZERO; n];
    let mut lv = vec![LogComplex::ZERO; n];
    for i in nodes {
        let theta = 2.0 * PI * i as f64 / n_total as f64;
        let p = circle_point(c, theta);
        // dz/dθ = i ρ e^{iθ}
        let dz = LogComplex {
            log_abs: c.log_radius,
            unit: Complex64::i() * Complex64::from_polar(1.0, theta),
        };
        for (a, e) in elements.iter().enumerate() {
            fv[a] = e.value(&p).mul(dz);
            lv[a] = e.conj_antiderivative(&p);
        }
        for a in 0..n {
            if fv[a].log_abs == f64::NEG_INFINITY {
                continue;
            }
            for b in 0..n {
                let prod = fv[a].mul(lv[b]);
                let mag = prod.log_abs.exp();
                if mag == 0.0 {
                    continue;
                }
                sums[a * n + b] += prod.unit * mag;
                abs_sums[a * n + b] += mag;
            }
        }
    }
}

/// Contribution `(orientation/2i)∮ f_a L_b dz` of one circle, doubling the
/// node count until every entry is stable.
fn circle_contribution(elements: &[BasisElement], c: &OrientedCircle) -> Result<Vec<Complex64>> {
    let n = elements.len();
    let mut n_nodes = START_NODES;
    let mut sums = vec![Complex64::new(0.0, 0.0); n * n];
    let mut abs_sums = vec![0.0; n * n];
    accumulate(elements, c, n_nodes, 0..n_nodes, &mut sums, &mut abs_sums);
    let mut prev: Vec<Complex64> = sums.iter().map(|s| s * (2.0 * PI / n_nodes as f64)).collect();
    loop {
        let next_nodes = 2 * n_nodes;
        if next_nodes > MAX_NODES {
            return Err(BergmanError::NoConvergence(format!(
                "boundary circle {:?} needs more than {MAX_NODES} nodes",
                c.hole
            )));
        }
        accumulate(
            elements,
            c,
            next_nodes,
            (1..next_nodes).step_by(2),
            &mut sums,
            &mut abs_sums,
        );
        let h = 2.0 * PI / next_nodes as f64;
        let cur: Vec<Complex64> = sums.iter().map(|s| s * h).collect();
        let converged = cur.iter().zip(&prev).zip(&abs_sums).all(|((x, y), s)| {
            (x - y).norm() <= CONVERGENCE_TOL * (s * h).max(f64::MIN_POSITIVE)
        });
        n_nodes = next_nodes;
        prev = cur;
        if converged {
            break;
        }
    }
    let factor = Complex64::new(0.0, -0.5) * c.orientation as f64; // 1/(2i)
    Ok(prev.into_iter().map(|v| v * factor).collect())
}

/// Unsymmetrized Gram matrix `G[a][b] = ⟨e_a, e_b⟩_Ω`.
pub fn gram_raw(region: &Region, elements: &[BasisElement]) -> Result<CMatrix> {
    region.check_elements(elements)?;
    let circles = region.boundary_circles();
    let parts: Vec<Vec<Complex64>> = circles
        .par_iter()
        .map(|c| circle_contribution(elements, c))
        .collect::<Result<_>>()?;
    let n = elements.len();
    let mut m = CMatrix::zeros(n);
    for p in parts {
        for (dst, v) in m.data.iter_mut().zip(p) {
            *dst += v;
        }
    }
    Ok(m)
}
