//! The `L²_h` engine: inner products of rational basis functions over a
//! circular domain, Gram assembly, orthonormalization and the truncated
//! Bergman kernel.

pub mod basis;
pub mod gram;
pub mod kernel;
pub mod quad2d;
pub mod spectral;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use basis::{standard_basis, BasisElement, BasisKind, EvalPoint, LogComplex};
pub use gram::{gram_matrix, GramBuild, PIVOT_DROP_TOL};
pub use kernel::{kernel_lower_bound_single, KernelEvaluator};

use crate::domain::{CircularDomain, HoleSpec, OrientedCircle};
use crate::error::{BergmanError, Result};

/// Relative backend disagreement that raises a diagnostic error.
pub const BACKEND_AGREEMENT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Spectral,
    Quad2d,
    /// Spectral, checked against quad2d.
    Both,
}

impl std::str::FromStr for Backend {
    type Err = BergmanError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Backend::Spectral),
            "quad2d" => Ok(Backend::Quad2d),
            "both" => Ok(Backend::Both),
            other => Err(BergmanError::InvalidArgument(format!("unknown backend {other}"))),
        }
    }
}

/// The domain with a subset of its holes present. Filled-in holes keep their
/// indices so basis elements stay meaningful; the puncture is removable and
/// ignored.
#[derive(Clone, Debug)]
pub struct Region<'a> {
    pub domain: &'a CircularDomain,
    active: Vec<bool>,
}

impl<'a> Region<'a> {
    pub fn whole(domain: &'a CircularDomain) -> Self {
        Region {
            domain,
            active: vec![true; domain.holes.len()],
        }
    }

    /// Holes with zero-based index `>= first` present.
    pub fn holes_from(domain: &'a CircularDomain, first: usize) -> Self {
        Region {
            domain,
            active: (0..domain.holes.len()).map(|j| j >= first).collect(),
        }
    }

    pub fn with_holes(domain: &'a CircularDomain, active: Vec<bool>) -> Self {
        assert_eq!(active.len(), domain.holes.len());
        Region { domain, active }
    }

    pub fn is_active(&self, j: usize) -> bool {
        self.active[j]
    }

    pub fn active_holes(&self) -> impl Iterator<Item = (usize, &HoleSpec)> {
        self.domain
            .holes
            .iter()
            .enumerate()
            .filter(|(j, _)| self.active[*j])
    }

    pub fn boundary_circles(&self) -> Vec<OrientedCircle> {
        self.domain
            .boundary_circles()
            .into_iter()
            .filter(|c| c.hole.map_or(true, |j| self.active[j]))
            .collect()
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.norm() < self.domain.outer_radius
            && self
                .active_holes()
                .all(|(_, h)| crate::domain::outside_disc(z, h.center, h.r))
    }

    pub(crate) fn check_elements(&self, elements: &[BasisElement]) -> Result<()> {
        for e in elements {
            if let Some(j) = e.hole() {
                if j >= self.active.len() || !self.active[j] {
                    return Err(BergmanError::PoleInRegion { hole: j });
                }
            }
        }
        Ok(())
    }
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    /// `(A + Aᴴ)/2`.
    pub fn hermitian_part(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, (self.get(i, j) + self.get(j, i).conj()) * 0.5);
            }
        }
        out
    }

    /// `cᴴ A c`-style quadratic form `Σ c_i conj(c_j) A_ij`.
    pub fn quadratic_form(&self, c: &[Complex64]) -> Complex64 {
        self.bilinear_form(c, c)
    }

    /// `Σ a_i conj(b_j) A_ij`, i.e. `⟨Σ a_i e_i, Σ b_j e_j⟩`.
    pub fn bilinear_form(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..self.n {
            if a[i] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..self.n {
                s += a[i] * b[j].conj() * self.get(i, j);
            }
        }
        s
    }
}

/// `⟨f, g⟩` over the region. `Both` runs the two backends and fails when
/// they differ by more than [`BACKEND_AGREEMENT_TOL`] relative to `‖f‖‖g‖`.
pub fn inner_product(
    f: &BasisElement,
    g: &BasisElement,
    region: &Region,
    backend: Backend,
) -> Result<Complex64> {
    match backend {
        Backend::Spectral => Ok(spectral::gram_raw(region, &[*f, *g])?.get(0, 1)),
        Backend::Quad2d => quad2d::inner_product(region, f, g),
        Backend::Both => {
            let m = spectral::gram_raw(region, &[*f, *g])?;
            let s = m.get(0, 1);
            let q = quad2d::inner_product(region, f, g)?;
            let scale = (m.get(0, 0).re * m.get(1, 1).re).sqrt().max(f64::MIN_POSITIVE);
            let relative = (s - q).norm() / scale;
            if relative > BACKEND_AGREEMENT_TOL {
                return Err(BergmanError::BackendDisagreement {
                    spectral: format!("{s}"),
                    quad2d: format!("{q}"),
                    relative,
                });
            }
            Ok(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::log_scalar::LogScalar;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn concentric(r: f64) -> CircularDomain {
        let h = HoleSpec::new(
            c(0.0, 0.0),
            LogScalar::from_f64(r),
            LogScalar::from_f64(r * 1.1),
            LogScalar::from_f64(r * 1.2),
        )
        .unwrap();
        CircularDomain::new(vec![h], false)
    }

    #[test]
    fn disc_orthogonality() {
        let d = CircularDomain::unit_disc();
        let reg = Region::whole(&d);
        for backend in [Backend::Spectral, Backend::Quad2d] {
            let v = inner_product(&BasisElement::monomial(0), &BasisElement::monomial(1), &reg, backend)
                .unwrap();
            assert!(v.norm() < 1e-14, "{backend:?}: {v}");
        }
    }

    #[test]
    fn order_one_tail_on_concentric_annulus() {
        let d = concentric((-1f64).exp());
        let reg = Region::whole(&d);
        let t = BasisElement::tail(&d, 0, 1).unwrap();
        let unscale = (-2.0 * t.log_prescale).exp();
        for backend in [Backend::Spectral, Backend::Quad2d] {
            let v = inner_product(&t, &t, &reg, backend).unwrap() * unscale;
            assert!((v.re - 2.0 * PI).abs() < 1e-10 * 2.0 * PI, "{backend:?}: {v}");
            assert!(v.im.abs() < 1e-10);
        }
    }

    #[test]
    fn monomials_stay_orthogonal_with_concentric_hole() {
        let d = concentric(0.3);
        let reg = Region::whole(&d);
        for (k, l) in [(0, 2), (1, 3), (4, 1)] {
            let v = inner_product(&BasisElement::monomial(k), &BasisElement::monomial(l), &reg, Backend::Both)
                .unwrap();
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn constant_norm_subtracts_hole_area() {
        let rho: f64 = 0.07;
        let h = HoleSpec::new(
            c(0.3, 0.4),
            LogScalar::from_f64(rho),
            LogScalar::from_f64(0.08),
            LogScalar::from_f64(0.09),
        )
        .unwrap();
        let d = CircularDomain::new(vec![h], true);
        let reg = Region::whole(&d);
        let one = BasisElement::monomial(0);
        let unscale = (-2.0 * one.log_prescale).exp();
        for backend in [Backend::Spectral, Backend::Quad2d] {
            let v = inner_product(&one, &one, &reg, backend).unwrap() * unscale;
            assert!((v.re - PI * (1.0 - rho * rho)).abs() < 1e-11, "{backend:?}: {v}");
        }
    }

    #[test]
    fn filled_hole_rejects_its_tails() {
        let d = concentric(0.2);
        let t = BasisElement::tail(&d, 0, 1).unwrap();
        let reg = Region::holes_from(&d, 1);
        assert!(matches!(
            inner_product(&t, &t, &reg, Backend::Spectral),
            Err(BergmanError::PoleInRegion { hole: 0 })
        ));
    }
}
