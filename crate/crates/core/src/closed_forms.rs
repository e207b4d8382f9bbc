//! Closed-form kernels, norms, moments and comparison factors.
//!
//! Formulas come in a float flavour and, where radii may be microscopic, a
//! [`LogScalar`] flavour. When any input is log-valued the log flavour is the
//! authoritative one.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::ComplexPoint;
use crate::error::{BergmanError, Result};
use crate::log_scalar::LogScalar;

/// `P(center, inner, outer)`; `outer = None` means the exterior annulus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusSpec {
    pub center: ComplexPoint,
    pub inner: LogScalar,
    pub outer: Option<LogScalar>,
}

impl AnnulusSpec {
    pub fn new(center: ComplexPoint, inner: LogScalar, outer: Option<LogScalar>) -> Result<Self> {
        if let Some(o) = outer {
            if !(inner < o) {
                return Err(BergmanError::InvalidArgument(
                    "annulus requires inner < outer".into(),
                ));
            }
        }
        Ok(AnnulusSpec {
            center,
            inner,
            outer,
        })
    }
}

fn outside(what: &str, z: ComplexPoint) -> BergmanError {
    BergmanError::OutsideDomain {
        re: z.re,
        im: z.im,
        reason: what.to_string(),
    }
}

/// Bergman kernel of `△(0, R)` on the diagonal: `R²/(π(R²−|z|²)²)`.
pub fn disc_kernel(radius: f64, z: ComplexPoint) -> Result<f64> {
    let a2 = z.norm_sqr();
    let r2 = radius * radius;
    if a2 >= r2 {
        return Err(outside("|z| >= R for disc kernel", z));
    }
    Ok(r2 / (PI * (r2 - a2) * (r2 - a2)))
}

/// Bergman kernel of `P(z0, r, ∞)`: `r²/(π(|z−z0|²−r²)²)`.
pub fn exterior_annulus_kernel(z0: ComplexPoint, r: LogScalar, z: ComplexPoint) -> Result<f64> {
    Ok(exterior_annulus_kernel_log(z0, r, z)?.to_f64())
}

pub fn exterior_annulus_kernel_log(
    z0: ComplexPoint,
    r: LogScalar,
    z: ComplexPoint,
) -> Result<LogScalar> {
    let d = (z - z0).norm();
    if d == 0.0 || d.ln() <= r.ln() {
        return Err(outside("|z - z0| <= r for exterior annulus kernel", z));
    }
    let log_d2 = 2.0 * d.ln();
    // |z−z0|²−r² = |z−z0|²·(1 − r²/|z−z0|²)
    let gap = log_d2 + (-(2.0 * r.ln() - log_d2).exp_m1()).ln();
    Ok(LogScalar::from_log(2.0 * r.ln() - PI.ln() - 2.0 * gap))
}

/// `‖z^k‖²` over `△(0, R)`: `πR^{2k+2}/(k+1)`.
pub fn monomial_norm_disc(k: u32, radius: f64) -> f64 {
    PI * radius.powi(2 * k as i32 + 2) / (k as f64 + 1.0)
}

/// `‖(z−c)^{−k}‖²` over the annulus `P(c, r, R)` for `k ≥ 1`.
pub fn tail_norm_annulus(k: u32, a: &AnnulusSpec) -> Result<LogScalar> {
    if k == 0 {
        return Err(BergmanError::InvalidArgument("tail order must be >= 1".into()));
    }
    let lr = a.inner.ln();
    if k == 1 {
        let Some(outer) = a.outer else {
            return Err(BergmanError::Divergent(
                "order-1 tail is not square integrable near infinity".into(),
            ));
        };
        return Ok(LogScalar::from_f64(2.0 * PI * (outer.ln() - lr)));
    }
    let km1 = (k - 1) as f64;
    let mut log_val = PI.ln() - 2.0 * km1 * lr - km1.ln();
    if let Some(outer) = a.outer {
        // π r^{2-2k}(1 − (r/R)^{2k−2})/(k−1)
        log_val += (-(2.0 * km1 * (lr - outer.ln())).exp_m1()).ln();
    }
    Ok(LogScalar::from_log(log_val))
}

/// `ln C(n, m)` via log-gamma-free summation of logs.
fn ln_binomial(n: u32, m: u32) -> f64 {
    let m = m.min(n - m);
    (0..m).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

fn binomial(n: u32, m: u32) -> f64 {
    let m = m.min(n - m);
    let mut b = 1.0;
    for i in 0..m {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

/// `∫_{△(a,ρ)} z^k conj(z)^l dA`.
pub fn disc_moment(a: ComplexPoint, rho: f64, k: u32, l: u32) -> ComplexPoint {
    let use_logs = k + l > 60;
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..=k.min(l) {
        let a_part = a.powu(k - m) * a.conj().powu(l - m);
        let coeff = if use_logs {
            (ln_binomial(k, m) + ln_binomial(l, m) + (2 * m + 2) as f64 * rho.ln()
                - ((m + 1) as f64).ln())
            .exp()
        } else {
            binomial(k, m) * binomial(l, m) * rho.powi(2 * m as i32 + 2) / (m as f64 + 1.0)
        };
        acc += a_part * coeff;
    }
    acc * PI
}

/// `r²/R²`, the disc comparison factor.
pub fn lemma1_disc_factor(r: f64, big_r: f64) -> Result<f64> {
    if !(0.0 <= r && r <= big_r && big_r > 0.0) {
        return Err(BergmanError::InvalidArgument("need 0 <= r <= R".into()));
    }
    Ok((r / big_r) * (r / big_r))
}

/// `(log t − log s)/(log t − log r)`, the annulus comparison factor.
pub fn lemma1_annulus_factor(r: LogScalar, s: LogScalar, t: LogScalar) -> Result<f64> {
    if !(r <= s && s <= t) || r >= t {
        return Err(BergmanError::InvalidArgument(
            "need r <= s <= t and r < t".into(),
        ));
    }
    Ok((t.ln() - s.ln()) / (t.ln() - r.ln()))
}

/// `u(x) = (log x − log b)/(log x − log a)`.
pub fn u_ratio(x: f64, a: f64, b: f64) -> f64 {
    (x.ln() - b.ln()) / (x.ln() - a.ln())
}

/// `k̃_{j,−1}(z) = 1/(2π|z−z_j|²(log(1+|z_j|) − log r_j))`.
pub fn ktilde_m1(zj: ComplexPoint, rj: LogScalar, z: ComplexPoint) -> Result<f64> {
    Ok(ktilde_m1_log(zj, rj, z)?.to_f64())
}

pub fn ktilde_m1_log(zj: ComplexPoint, rj: LogScalar, z: ComplexPoint) -> Result<LogScalar> {
    let d = (z - zj).norm();
    if d == 0.0 || d.ln() <= rj.ln() {
        return Err(outside("|z - z_j| <= r_j", z));
    }
    let span = zj.norm().ln_1p() - rj.ln();
    Ok(LogScalar::from_log(
        -(2.0 * PI).ln() - 2.0 * d.ln() - span.ln(),
    ))
}

/// `c·r_j²/(π(|z−z_j|²−r_j²)²)`; `c` is the unspecified comparison constant.
pub fn ktilde_m2_bound(zj: ComplexPoint, rj: LogScalar, z: ComplexPoint, c: f64) -> Result<f64> {
    Ok(c * exterior_annulus_kernel(zj, rj, z)?)
}
