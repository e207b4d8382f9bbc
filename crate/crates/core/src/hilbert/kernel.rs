//! Truncated Bergman kernel `K(z) = Σ |ψ_i(z)|²` over an orthonormalized
//! finite system, its log-Laplacian, and the single-tail lower bound.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::{BasisElement, BasisKind};
use super::gram::GramBuild;
use super::{CMatrix, Region};
use crate::domain::{CircularDomain, ComplexPoint, DomainFile};
use crate::error::{BergmanError, Result};

/// Immutable evaluator built from a factored Gram matrix.
///
/// Its values are the reproducing kernel of the span of the basis, hence
/// lower bounds for the Bergman kernel of the domain.
#[derive(Clone, Debug)]
pub struct KernelEvaluator {
    domain: CircularDomain,
    active: Vec<bool>,
    elements: Vec<BasisElement>,
    transform: CMatrix,
}

impl KernelEvaluator {
    pub fn new(build: &GramBuild, region: &Region) -> Self {
        KernelEvaluator {
            domain: region.domain.clone(),
            active: (0..region.domain.holes.len())
                .map(|j| region.is_active(j))
                .collect(),
            elements: build.retained.iter().map(|&i| build.basis[i]).collect(),
            transform: build.inverse_factor(),
        }
    }

    pub fn domain(&self) -> &CircularDomain {
        &self.domain
    }

    pub fn dimension(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, z: ComplexPoint) -> bool {
        Region::with_holes(&self.domain, self.active.clone()).contains(z)
    }

    fn check(&self, z: ComplexPoint) -> Result<()> {
        if !self.contains(z) {
            return Err(BergmanError::OutsideDomain {
                re: z.re,
                im: z.im,
                reason: "kernel evaluation point".into(),
            });
        }
        Ok(())
    }

    /// Orthonormal-system values and derivatives at `z`.
    fn orthonormal_values(&self, z: ComplexPoint) -> (Vec<Complex64>, Vec<Complex64>) {
        let r = self.elements.len();
        let (phi, dphi): (Vec<Complex64>, Vec<Complex64>) = self
            .elements
            .iter()
            .map(|e| e.value_and_derivative(z))
            .unzip();
        let mut v = vec![Complex64::new(0.0, 0.0); r];
        let mut dv = vec![Complex64::new(0.0, 0.0); r];
        for i in 0..r {
            for k in 0..=i {
                let t = self.transform.get(i, k);
                v[i] += t * phi[k];
                dv[i] += t * dphi[k];
            }
        }
        (v, dv)
    }

    pub fn kernel_eval(&self, z: ComplexPoint) -> Result<f64> {
        self.check(z)?;
        let (v, _) = self.orthonormal_values(z);
        Ok(v.iter().map(|x| x.norm_sqr()).sum())
    }

    /// `∂²log K/∂z∂z̄ = (K·Σ|ψ'|² − |Σ ψ'·conj(ψ)|²)/K²`.
    pub fn kernel_log_hessian(&self, z: ComplexPoint) -> Result<f64> {
        self.check(z)?;
        let (v, dv) = self.orthonormal_values(z);
        let k: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        if !(k > 0.0) {
            return Err(BergmanError::Degenerate(k));
        }
        let kd: f64 = dv.iter().map(|x| x.norm_sqr()).sum();
        let cross: Complex64 = dv.iter().zip(&v).map(|(d, x)| d * x.conj()).sum();
        Ok((k * kd - cross.norm_sqr()) / (k * k))
    }

    /// Kernel and log-hessian together.
    pub fn kernel_and_hessian(&self, z: ComplexPoint) -> Result<(f64, f64)> {
        self.check(z)?;
        let (v, dv) = self.orthonormal_values(z);
        let k: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        let kd: f64 = dv.iter().map(|x| x.norm_sqr()).sum();
        let cross: Complex64 = dv.iter().zip(&v).map(|(d, x)| d * x.conj()).sum();
        Ok((k, (k * kd - cross.norm_sqr()) / (k * k)))
    }

    pub fn to_json(&self) -> Result<String> {
        let r = self.transform.n;
        let mut transform = Vec::with_capacity(2 * r * r);
        for x in &self.transform.data {
            transform.push(format!("{:?}", x.re));
            transform.push(format!("{:?}", x.im));
        }
        let bundle = EvaluatorBundle {
            domain: DomainFile::from_domain(&self.domain),
            active_holes: self.active.clone(),
            basis: self.elements.clone(),
            dimension: r,
            transform,
        };
        Ok(serde_json::to_string(&bundle)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let b: EvaluatorBundle = serde_json::from_str(s)?;
        let parse = |t: &String| {
            t.parse::<f64>()
                .map_err(|e| BergmanError::InvalidConfig(format!("bad number {t}: {e}")))
        };
        let vals: Vec<f64> = b.transform.iter().map(parse).collect::<Result<_>>()?;
        if vals.len() != 2 * b.dimension * b.dimension || b.basis.len() != b.dimension {
            return Err(BergmanError::InvalidConfig("evaluator bundle size mismatch".into()));
        }
        let data = vals.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        Ok(KernelEvaluator {
            domain: b.domain.into_domain()?,
            active: b.active_holes,
            elements: b.basis,
            transform: CMatrix {
                n: b.dimension,
                data,
            },
        })
    }
}

/// Serialized evaluator: basis descriptors plus the row-major transform,
/// each binary64 written as a lossless decimal string (re, im interleaved).
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvaluatorBundle {
    domain: DomainFile,
    active_holes: Vec<bool>,
    basis: Vec<BasisElement>,
    dimension: usize,
    transform: Vec<String>,
}

/// Certified lower bound for `K_D(z)` from the single function
/// `(z − z_j)^{−1}`: its `D`-norm is bounded by the norm over `P(z_j, r_j, 2)`,
/// giving `1/(|z − z_j|²·2π(log 2 − log r_j))`.
pub fn kernel_lower_bound_single(
    h: &BasisElement,
    d: &CircularDomain,
    z: ComplexPoint,
) -> Result<f64> {
    let BasisKind::Tail { hole, order: 1 } = h.kind else {
        return Err(BergmanError::InvalidArgument(
            "single-function bound needs an order-1 tail".into(),
        ));
    };
    let hs = d
        .holes
        .get(hole)
        .ok_or_else(|| BergmanError::InvalidArgument(format!("no hole {hole}")))?;
    Ok(single_tail_bound(hs.center, hs.r.ln(), z))
}

/// `1/(|z − c|²·2π(log 2 − log r))` evaluated through logarithms.
pub fn single_tail_bound(center: ComplexPoint, log_r: f64, z: ComplexPoint) -> f64 {
    let d = (z - center).norm();
    (-2.0 * d.ln() - (2.0 * PI * (2f64.ln() - log_r)).ln()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::HoleSpec;
    use crate::hilbert::{gram_matrix, Backend};

    #[test]
    fn disc_kernel_at_origin_any_degree() {
        let d = CircularDomain::unit_disc();
        let reg = Region::whole(&d);
        for deg in [0u32, 1, 5, 20] {
            let basis: Vec<BasisElement> = (0..=deg).map(BasisElement::monomial).collect();
            let g = gram_matrix(&basis, &reg, Backend::Spectral).unwrap();
            let ke = KernelEvaluator::new(&g, &reg);
            let k = ke.kernel_eval(Complex64::new(0.0, 0.0)).unwrap();
            assert!((k - 1.0 / PI).abs() < 1e-13);
        }
    }

    #[test]
    fn bundle_round_trip_is_lossless() {
        let h = HoleSpec::from_logs(Complex64::new(0.5, 0.0), -4.0, -3.5, -3.0).unwrap();
        let d = CircularDomain::new(vec![h], true);
        let reg = Region::whole(&d);
        let basis = crate::hilbert::standard_basis(&d, 4, 2).unwrap();
        let ke = KernelEvaluator::new(&gram_matrix(&basis, &reg, Backend::Spectral).unwrap(), &reg);
        let back = KernelEvaluator::from_json(&ke.to_json().unwrap()).unwrap();
        let z = Complex64::new(-0.3, 0.2);
        assert_eq!(ke.kernel_eval(z).unwrap(), back.kernel_eval(z).unwrap());
        assert!(ke.kernel_eval(h.center).is_err());
    }

    #[test]
    fn single_bound_values() {
        let h = HoleSpec::from_logs(Complex64::new(0.5, 0.0), -524288.0, -2.0, -1.5).unwrap();
        let d = CircularDomain::new(vec![h], true);
        let e = BasisElement::tail(&d, 0, 1).unwrap();
        let v = kernel_lower_bound_single(&e, &d, Complex64::new(-0.5, 0.0)).unwrap();
        let expect = 1.0 / (2.0 * PI * (2f64.ln() + 524288.0));
        assert!(((v - expect) / expect).abs() < 1e-13);
        let delta = 0.01;
        let v2 = kernel_lower_bound_single(&e, &d, Complex64::new(0.5 + delta, 0.0)).unwrap();
        let expect2 = 1.0 / (delta * delta * 2.0 * PI * (2f64.ln() + 524288.0));
        assert!(((v2 - expect2) / expect2).abs() < 1e-12);
        assert!(kernel_lower_bound_single(&BasisElement::monomial(0), &d, Complex64::new(0.1, 0.0)).is_err());
    }
}
