//! Rational basis functions: monomials `z^k` and Laurent tails
//! `(z − z_j)^{−m}`, each stored pre-divided by a closed-form norm.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{CircularDomain, ComplexPoint};
use crate::error::{BergmanError, Result};

/// A complex number as `exp(log_abs)·unit`, `|unit| = 1`. Used wherever a
/// factor may overflow while the product it enters does not.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogComplex {
    pub log_abs: f64,
    pub unit: Complex64,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        log_abs: f64::NEG_INFINITY,
        unit: Complex64 { re: 1.0, im: 0.0 },
    };

    pub fn from_complex(z: Complex64) -> Self {
        let a = z.norm();
        if a == 0.0 {
            return LogComplex::ZERO;
        }
        LogComplex {
            log_abs: a.ln(),
            unit: z / a,
        }
    }

    pub fn from_real(x: f64) -> Self {
        if x == 0.0 {
            return LogComplex::ZERO;
        }
        LogComplex {
            log_abs: x.abs().ln(),
            unit: Complex64::new(x.signum(), 0.0),
        }
    }

    #[inline]
    pub fn mul(self, o: LogComplex) -> LogComplex {
        if self.log_abs == f64::NEG_INFINITY || o.log_abs == f64::NEG_INFINITY {
            return LogComplex::ZERO;
        }
        LogComplex {
            log_abs: self.log_abs + o.log_abs,
            unit: self.unit * o.unit,
        }
    }

    #[inline]
    pub fn conj(self) -> LogComplex {
        LogComplex {
            log_abs: self.log_abs,
            unit: self.unit.conj(),
        }
    }

    #[inline]
    pub fn scale_log(self, l: f64) -> LogComplex {
        if self.log_abs == f64::NEG_INFINITY {
            return self;
        }
        LogComplex {
            log_abs: self.log_abs + l,
            unit: self.unit,
        }
    }

    #[inline]
    pub fn to_complex(self) -> Complex64 {
        self.unit * self.log_abs.exp()
    }
}

/// Where a basis function is evaluated. Points on (or near) a hole's own
/// boundary circle carry their offset from the center in polar log form so
/// that microscopic radii keep full relative precision.
#[derive(Clone, Copy, Debug)]
pub struct EvalPoint {
    pub z: ComplexPoint,
    pub local: Option<LocalOffset>,
}

#[derive(Clone, Copy, Debug)]
pub struct LocalOffset {
    pub hole: usize,
    pub log_rho: f64,
    pub unit: Complex64,
}

impl EvalPoint {
    pub fn plain(z: ComplexPoint) -> Self {
        EvalPoint { z, local: None }
    }

    pub fn near_hole(center: ComplexPoint, hole: usize, log_rho: f64, unit: Complex64) -> Self {
        EvalPoint {
            z: center + unit * log_rho.exp(),
            local: Some(LocalOffset {
                hole,
                log_rho,
                unit,
            }),
        }
    }

    /// `(log|z − c|, (z − c)/|z − c|)` for the tail centered at hole `j`.
    fn offset_from(&self, hole: usize, center: ComplexPoint) -> (f64, Complex64) {
        if let Some(loc) = self.local {
            if loc.hole == hole {
                return (loc.log_rho, loc.unit);
            }
        }
        let w = self.z - center;
        let a = w.norm();
        (a.ln(), w / a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisKind {
    Monomial { k: u32 },
    Tail { hole: usize, order: u32 },
}

/// A basis function together with its center (tails) and log prescale:
/// the stored function is `exp(log_prescale)·raw`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisElement {
    pub kind: BasisKind,
    pub center: [f64; 2],
    pub log_prescale: f64,
}

impl BasisElement {
    /// `z^k / sqrt(π/(k+1))`, unit norm on the unit disc.
    pub fn monomial(k: u32) -> Self {
        BasisElement {
            kind: BasisKind::Monomial { k },
            center: [0.0, 0.0],
            log_prescale: -0.5 * (PI / (k as f64 + 1.0)).ln(),
        }
    }

    /// `(z − z_j)^{−m}` divided by its norm on `P(z_j, r_j, 2)` for `m = 1`
    /// and on `P(z_j, r_j, ∞)` for `m ≥ 2`.
    pub fn tail(d: &CircularDomain, hole: usize, order: u32) -> Result<Self> {
        let h = d.holes.get(hole).ok_or_else(|| {
            BergmanError::InvalidArgument(format!("tail references missing hole {hole}"))
        })?;
        if order == 0 {
            return Err(BergmanError::InvalidArgument("tail order must be >= 1".into()));
        }
        let lr = h.r.ln();
        let log_norm2 = if order == 1 {
            (2.0 * PI * (2f64.ln() - lr)).ln()
        } else {
            let km1 = (order - 1) as f64;
            PI.ln() - 2.0 * km1 * lr - km1.ln()
        };
        Ok(BasisElement {
            kind: BasisKind::Tail { hole, order },
            center: [h.center.re, h.center.im],
            log_prescale: -0.5 * log_norm2,
        })
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(self.center[0], self.center[1])
    }

    pub fn hole(&self) -> Option<usize> {
        match self.kind {
            BasisKind::Tail { hole, .. } => Some(hole),
            BasisKind::Monomial { .. } => None,
        }
    }

    /// Value of the (prescaled) element.
    pub fn value(&self, p: &EvalPoint) -> LogComplex {
        match self.kind {
            BasisKind::Monomial { k } => {
                if k == 0 {
                    return LogComplex {
                        log_abs: self.log_prescale,
                        unit: Complex64::new(1.0, 0.0),
                    };
                }
                LogComplex::from_complex(p.z.powu(k)).scale_log(self.log_prescale)
            }
            BasisKind::Tail { hole, order } => {
                let (lrho, u) = p.offset_from(hole, self.center());
                LogComplex {
                    log_abs: self.log_prescale - order as f64 * lrho,
                    unit: u.conj().powu(order),
                }
            }
        }
    }

    /// A function `L` with `∂L/∂z̄ = conj(element)` that is single-valued and
    /// smooth on the closure of any domain avoiding the element's pole:
    /// `conj(G)` for a holomorphic antiderivative `G`, or `log|z − z_j|²` for
    /// order-1 tails.
    pub fn conj_antiderivative(&self, p: &EvalPoint) -> LogComplex {
        match self.kind {
            BasisKind::Monomial { k } => {
                let g = p.z.powu(k + 1) / (k as f64 + 1.0);
                LogComplex::from_complex(g)
                    .scale_log(self.log_prescale)
                    .conj()
            }
            BasisKind::Tail { hole, order } => {
                let (lrho, u) = p.offset_from(hole, self.center());
                if order == 1 {
                    // rounding noise on circles concentric with the hole at
                    // radius one would otherwise never settle
                    let l = if lrho.abs() < 1e-14 { 0.0 } else { 2.0 * lrho };
                    LogComplex::from_real(l).scale_log(self.log_prescale)
                } else {
                    let m1 = (order - 1) as f64;
                    // G = w^{1−m}/(1−m)
                    LogComplex {
                        log_abs: self.log_prescale - m1 * lrho - m1.ln(),
                        unit: -u.conj().powu(order - 1),
                    }
                    .conj()
                }
            }
        }
    }

    /// Value and complex derivative at an ordinary point.
    pub fn value_and_derivative(&self, z: ComplexPoint) -> (Complex64, Complex64) {
        let s = self.log_prescale.exp();
        match self.kind {
            BasisKind::Monomial { k } => {
                if k == 0 {
                    return (Complex64::new(s, 0.0), Complex64::new(0.0, 0.0));
                }
                let zk1 = z.powu(k - 1);
                (zk1 * z * s, zk1 * (k as f64 * s))
            }
            BasisKind::Tail { order, .. } => {
                let w = z - self.center();
                let lw = w.norm().ln();
                let u = (w / w.norm()).conj();
                let v = u.powu(order) * (self.log_prescale - order as f64 * lw).exp();
                let dv = -(order as f64) * u.powu(order + 1)
                    * (self.log_prescale - (order + 1) as f64 * lw).exp();
                (v, dv)
            }
        }
    }
}

/// Monomials `0..=max_degree` followed by tails of orders `1..=max_order`
/// at every hole (ring-major hole order).
pub fn standard_basis(d: &CircularDomain, max_degree: u32, max_order: u32) -> Result<Vec<BasisElement>> {
    let mut b: Vec<BasisElement> = (0..=max_degree).map(BasisElement::monomial).collect();
    for j in 0..d.holes.len() {
        for m in 1..=max_order {
            b.push(BasisElement::tail(d, j, m)?);
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::HoleSpec;

    #[test]
    fn local_and_plain_evaluation_agree() {
        let h = HoleSpec::from_logs(Complex64::new(0.4, 0.2), -3.0, -2.5, -2.0).unwrap();
        let d = CircularDomain::new(vec![h], false);
        let e = BasisElement::tail(&d, 0, 3).unwrap();
        let u = Complex64::from_polar(1.0, 0.7);
        let local = EvalPoint::near_hole(h.center, 0, -2.9, u);
        let plain = EvalPoint::plain(local.z);
        let a = e.value(&local).to_complex();
        let b = e.value(&plain).to_complex();
        assert!((a - b).norm() < 1e-12 * a.norm());
        let (v, _) = e.value_and_derivative(local.z);
        assert!((v - a).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn antiderivative_derivatives_by_finite_differences() {
        let h = HoleSpec::from_logs(Complex64::new(0.4, 0.2), -3.0, -2.5, -2.0).unwrap();
        let d = CircularDomain::new(vec![h], false);
        let z = Complex64::new(-0.1, 0.3);
        let eps = 1e-6;
        for e in [
            BasisElement::monomial(3),
            BasisElement::tail(&d, 0, 1).unwrap(),
            BasisElement::tail(&d, 0, 2).unwrap(),
        ] {
            let l = |z: Complex64| e.conj_antiderivative(&EvalPoint::plain(z)).to_complex();
            // ∂/∂z̄ = ½(∂x + i∂y)
            let dx = (l(z + eps) - l(z - eps)) / (2.0 * eps);
            let dy = (l(z + Complex64::new(0.0, eps)) - l(z - Complex64::new(0.0, eps))) / (2.0 * eps);
            let dbar = (dx + Complex64::i() * dy) * 0.5;
            let target = e.value(&EvalPoint::plain(z)).to_complex().conj();
            assert!((dbar - target).norm() < 1e-7 * target.norm().max(1.0), "{:?}", e.kind);
        }
    }

    #[test]
    fn microscopic_hole_values_stay_in_range() {
        let h = HoleSpec::from_logs(Complex64::new(0.5, 0.0), -5000.0, -50.0, -5.0).unwrap();
        let d = CircularDomain::new(vec![h], true);
        let e = BasisElement::tail(&d, 0, 4).unwrap();
        let p = EvalPoint::near_hole(h.center, 0, -5000.0, Complex64::new(1.0, 0.0));
        let v = e.value(&p);
        // prescaled value at the hole circle is O(r^{-1})
        assert!((v.log_abs - (5000.0 + 0.5 * (3.0f64 / PI).ln())).abs() < 1e-9);
        let far = e.value(&EvalPoint::plain(Complex64::new(0.0, 0.5)));
        assert_eq!(far.to_complex(), Complex64::new(0.0, 0.0));
    }
}
