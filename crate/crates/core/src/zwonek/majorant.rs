//! The kernel majorant `c(K_E(z) + Σ_j 1/(|z−z_j|²(−log r_j)) + r_j²/(|z−z_j|²−r_j²)²)`
//! summed ring by ring, and the scan comparing it with the kernel lower
//! bounds on the hole circles.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::conditions::{power_tail, superexp_tail};
use super::{Ring, ZwonekParams, EXACT_RING_LIMIT};
use crate::error::{BergmanError, Result};
use crate::log_scalar::{log_sum_exp, LogScalar};

/// Angles `u = Mφ/2π` above this are not resolved in binary64.
const MAX_RESOLVED_TURNS: f64 = 1e9;

/// `ln(d² − r²)` given `ln d²` and `ln r`.
fn log_gap(log_d2: f64, log_r: f64) -> f64 {
    log_d2 + (-(2.0 * log_r - log_d2).exp()).ln_1p()
}

fn outside(z: Complex64, n: u32) -> BergmanError {
    BergmanError::OutsideDomain {
        re: z.re,
        im: z.im,
        reason: format!("inside an excluded disc of ring {n}"),
    }
}

/// Logs of `(Σ_j 1/|z − z_j|², Σ_j r²/(|z − z_j|² − r²)²)` over one ring.
/// Large rings use the closed form
/// `Σ_j 1/|z − xω^j|² = M(1 − q^{2M})/(|ρ² − x²|(1 − 2q^M cos Mφ + q^{2M}))`
/// and bound the second sum through the nearest hole.
pub fn ring_sums(ring: &Ring, z: Complex64) -> Result<(f64, f64)> {
    let m = ring.points();
    let rho = z.norm();
    let x = ring.x;
    let phi = z.im.atan2(z.re).rem_euclid(2.0 * PI);
    if m <= EXACT_RING_LIMIT {
        let mut t1 = Vec::with_capacity(m as usize);
        let mut t2 = Vec::with_capacity(m as usize);
        for j in 0..m as u64 {
            let dphi = phi - 2.0 * PI * j as f64 / m;
            let d2 = (rho - x).powi(2) + 4.0 * rho * x * (0.5 * dphi).sin().powi(2);
            let ld2 = d2.ln();
            if ld2 <= 2.0 * ring.log_r {
                return Err(outside(z, ring.n));
            }
            t1.push(-ld2);
            t2.push(2.0 * ring.log_r - 2.0 * log_gap(ld2, ring.log_r));
        }
        return Ok((log_sum_exp(&t1), log_sum_exp(&t2)));
    }
    let turns = m * phi / (2.0 * PI);
    let (sin2, dmin2) = if turns < MAX_RESOLVED_TURNS {
        let frac = turns - turns.round();
        let dphi = 2.0 * PI * frac.abs() / m;
        (
            (PI * frac).sin().powi(2),
            (rho - x).powi(2) + 4.0 * rho * x * (0.5 * dphi).sin().powi(2),
        )
    } else {
        // unresolved angle: take the circle-wise worst case
        (0.0, (rho - x).powi(2))
    };
    let ldmin2 = dmin2.ln();
    if ldmin2 <= 2.0 * ring.log_r {
        return Err(outside(z, ring.n));
    }
    let big = rho.max(x);
    let lnq = (rho.min(x) / big).ln();
    let ratio = if lnq == 0.0 {
        m
    } else {
        (2.0 * m * lnq).exp_m1() / (2.0 * lnq).exp_m1()
    };
    let den = (m * lnq).exp_m1().powi(2) + 4.0 * (m * lnq).exp() * sin2;
    let s1 = m.ln() + ratio.ln() - 2.0 * big.ln() - den.ln();
    // Σ r²/(d²−r²)² ≤ r²·Σ d^{-4}/(1 − r²/dmin²)² ≤ r² S/(dmin²(1 − r²/dmin²)²)
    let s2 = 2.0 * ring.log_r + s1 - ldmin2 - 2.0 * (-(2.0 * ring.log_r - ldmin2).exp()).ln_1p();
    Ok((s1, s2))
}

/// Kernel majorant at `z`, times the comparison constant `c`. Rings past
/// `n_max` are bounded with `|z − z_j| ≥ |z| − x_{n_max+1}` and the rule
/// radii.
pub fn majorant(params: &ZwonekParams, z: Complex64, c: f64) -> Result<LogScalar> {
    params.validate()?;
    let rho = z.norm();
    if !(rho < 1.0) {
        return Err(BergmanError::OutsideDomain {
            re: z.re,
            im: z.im,
            reason: "not in the unit disc".into(),
        });
    }
    let n_max = params.n_max;
    let x_next = params.x(n_max + 1);
    if rho <= x_next {
        return Err(BergmanError::InvalidArgument(format!(
            "|z| = {rho:e} is inside the truncation radius {x_next:e}; increase n_max"
        )));
    }
    let mut logs = vec![-PI.ln() - 2.0 * (-rho * rho).ln_1p()];
    for n in params.n0..=n_max {
        let ring = params.ring(n);
        let (s1, s2) = ring_sums(&ring, z)?;
        logs.push(s1 - (-ring.log_r).ln());
        logs.push(s2);
    }
    let a = params.ring_exponent as f64;
    let b = params.r_exponent;
    let ld = (rho - x_next).ln();
    let mut total = LogScalar::from_log(log_sum_exp(&logs)) + power_tail(-2.0 * ld, a - b, n_max);
    // r_n² ≤ δ²/2 past n_max gives r²/(δ²−r²)² ≤ 4r²/δ⁴
    let next = (n_max + 1) as f64;
    total += if -next.powf(b) < ld - 0.5 * LN_2 {
        superexp_tail(4f64.ln() - 4.0 * ld, a, b, n_max)
    } else {
        LogScalar::INFINITY
    };
    Ok(total * c)
}

/// `Σ_n n^a/(|y_m−x_n|²(−log r_n)) + n^a r_n²/((y_m−x_n)² − r_n²)²`, maximized
/// over `m` in the range (ring data up to `n_max`, rule tails after).
pub fn ym_sup_computed(params: &ZwonekParams, ms: std::ops::RangeInclusive<u32>) -> LogScalar {
    let rings = params.rings();
    let n_max = params.n_max;
    let a = params.ring_exponent as f64;
    let b = params.r_exponent;
    let next = (n_max + 1) as f64;
    let x_next = params.x(n_max + 1);
    let ms: Vec<u32> = ms.collect();
    ms.par_iter()
        .map(|&m| {
            let y = params.y(m);
            let mut logs = Vec::with_capacity(2 * rings.len());
            for r in &rings {
                let ld2 = 2.0 * (y - r.x).abs().ln();
                if ld2 <= 2.0 * r.log_r {
                    return LogScalar::INFINITY;
                }
                logs.push(r.log_points - ld2 - (-r.log_r).ln());
                logs.push(r.log_points + 2.0 * r.log_r - 2.0 * log_gap(ld2, r.log_r));
            }
            let mut v = LogScalar::from_log(log_sum_exp(&logs));
            if y > x_next {
                let ld = (y - x_next).ln();
                v += power_tail(-2.0 * ld, a - b, n_max);
                v += if -next.powf(b) < ld - 0.5 * LN_2 {
                    superexp_tail(4f64.ln() - 4.0 * ld, a, b, n_max)
                } else {
                    LogScalar::INFINITY
                };
            } else {
                v = LogScalar::INFINITY;
            }
            v
        })
        .reduce(|| LogScalar::ZERO, LogScalar::max)
}

/// Bound on the same sums valid for every `m ≥ 2`, from
/// `|y_m − x_n| ≥ δ_n = min((1 − (3/4)^p)x_n, p/(2(4n+1)^{p+1}))`.
pub fn ym_uniform_bound(params: &ZwonekParams) -> LogScalar {
    let p = params.x_exponent;
    let a = params.ring_exponent as f64;
    let b = params.r_exponent;
    let n_max = params.n_max;
    let c1 = 1.0 - 0.75f64.powf(p);
    let log_delta = |n: f64| (c1.ln() - p * n.ln()).min(p.ln() - LN_2 - (p + 1.0) * (4.0 * n + 1.0).ln());
    let mut logs = Vec::new();
    for r in params.rings() {
        let ld2 = 2.0 * log_delta(r.n as f64);
        if ld2 <= 2.0 * r.log_r {
            return LogScalar::INFINITY;
        }
        logs.push(r.log_points - ld2 - (-r.log_r).ln());
        logs.push(r.log_points + 2.0 * r.log_r - 2.0 * log_gap(ld2, r.log_r));
    }
    // 1/δ_n² ≤ n^{2p}/c1² + 4(5n)^{2p+2}/p²
    let mut total = LogScalar::from_log(log_sum_exp(&logs))
        + power_tail(-2.0 * c1.ln(), a - b + 2.0 * p, n_max)
        + power_tail(4f64.ln() + (2.0 * p + 2.0) * 5f64.ln() - 2.0 * p.ln(), a - b + 2.0 * p + 2.0, n_max);
    // 1/δ_n⁴ ≤ K n^{4p+4}
    let next = (n_max + 1) as f64;
    let log_k = log_sum_exp(&[-4.0 * c1.ln(), 16f64.ln() + (4.0 * p + 4.0) * 5f64.ln() - 4.0 * p.ln()]);
    total += if -next.powf(b) < log_delta(next) - 0.5 * LN_2 {
        superexp_tail(4f64.ln() + log_k, a + 4.0 * p + 4.0, b, n_max)
    } else {
        LogScalar::INFINITY
    };
    total
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichRow {
    /// `"y"` for majorant values on `∂△(0, y_m)`, `"x"` for kernel lower
    /// bounds on `∂△(0, x_n)`.
    pub kind: String,
    pub index: u32,
    pub value_log: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichTable {
    pub c: f64,
    pub rows: Vec<SandwichRow>,
    /// Single-function bounds at the point of `∂△(0, x_n)` halfway between
    /// two adjacent holes.
    pub refined_lower: Vec<SandwichRow>,
    /// `max_m` of the `y` rows.
    pub m1_candidate_log: f64,
    /// `c·(K_E(y_{n0}) + uniform sum bound)`, valid on every `y` circle.
    pub m1_bound_log: f64,
    pub lower_monotone: bool,
    /// First `n` from which every lower bound exceeds the `y` majorant.
    pub n_star: Option<u32>,
}

/// `n^{2(a+p)}/(2πC²(log 2 − log r_n))`, the lower bound on `∂△(0, x_n)`.
pub fn lower_log(params: &ZwonekParams, n: u32) -> f64 {
    let ring = params.ring(n);
    2.0 * params.spacing_exponent() * (n as f64).ln()
        - 2.0 * params.spacing_c.ln()
        - (2.0 * PI * (LN_2 - ring.log_r)).ln()
}

/// `y` rows for `m ∈ [n0, n_max]` (the supremum over each circle sits at
/// `z = y_m`, where every ring has a hole on the ray), `x` rows for
/// `n ∈ [n0, n_hi]`.
pub fn sandwich_scan(params: &ZwonekParams, c: f64, n_hi: u32) -> Result<SandwichTable> {
    params.validate()?;
    let ms: Vec<u32> = (params.n0..=params.n_max).collect();
    let ys: Vec<f64> = ms
        .par_iter()
        .map(|&m| majorant(params, Complex64::new(params.y(m), 0.0), c).map(|v| v.ln()))
        .collect::<Result<_>>()?;
    let mut rows: Vec<SandwichRow> = ms
        .iter()
        .zip(&ys)
        .map(|(&m, &v)| SandwichRow {
            kind: "y".into(),
            index: m,
            value_log: v,
        })
        .collect();
    let m1 = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let k_e_max = -PI.ln() - 2.0 * (-params.y(params.n0).powi(2)).ln_1p();
    let m1_bound = log_sum_exp(&[k_e_max, ym_uniform_bound(params).ln()]) + c.ln();

    let ns: Vec<u32> = (params.n0..=n_hi).collect();
    let lows: Vec<f64> = ns.iter().map(|&n| lower_log(params, n)).collect();
    let refined_lower = ns
        .iter()
        .map(|&n| {
            let ring = params.ring(n);
            let d = LN_2 + ring.x.ln() + (PI / (2.0 * ring.points())).sin().ln();
            SandwichRow {
                kind: "x".into(),
                index: n,
                value_log: -2.0 * d - (2.0 * PI * (LN_2 - ring.log_r)).ln(),
            }
        })
        .collect();
    let lower_monotone = lows.windows(2).all(|w| w[1] > w[0]);
    let n_star = (0..ns.len())
        .find(|&i| lows[i..].iter().all(|&l| l > m1))
        .map(|i| ns[i]);
    rows.extend(ns.iter().zip(&lows).map(|(&n, &v)| SandwichRow {
        kind: "x".into(),
        index: n,
        value_log: v,
    }));
    Ok(SandwichTable {
        c,
        rows,
        refined_lower,
        m1_candidate_log: m1,
        m1_bound_log: m1_bound,
        lower_monotone,
        n_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_ring(ring: &Ring, z: Complex64) -> (f64, f64) {
        let r2 = (2.0 * ring.log_r).exp();
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for j in 0..ring.points() as u64 {
            let d2 = (z - ring.center(j)).norm_sqr();
            s1 += 1.0 / d2;
            s2 += r2 / (d2 - r2).powi(2);
        }
        (s1, s2)
    }

    #[test]
    fn closed_form_ring_sum_matches_brute_force() {
        let mut p = ZwonekParams::paper(3);
        p.ring_exponent = 3;
        p.x_exponent = 1.0;
        p.tame_overrides.push(super::super::TameOverride {
            ring: 20,
            log_r: -12.0,
            log_s: Some(-11.0),
            log_t: Some(-10.5),
        });
        let ring = p.ring(20); // 8000 points on radius 1/20
        assert!(ring.points() > EXACT_RING_LIMIT);
        for z in [
            Complex64::new(0.3, 0.1),
            Complex64::new(0.01, 0.02),
            Complex64::from_polar(0.0501, 0.3),
            Complex64::from_polar(0.0499, 1.7),
        ] {
            let (s1, s2) = ring_sums(&ring, z).unwrap();
            let (b1, b2) = brute_ring(&ring, z);
            assert!((s1.exp() - b1).abs() < 1e-9 * b1, "{z}: {} vs {b1}", s1.exp());
            assert!(s2.exp() >= b2 * (1.0 - 1e-9));
        }
    }

    #[test]
    fn exact_single_hole_reduces_to_two_terms() {
        let mut p = ZwonekParams::paper(2);
        p.ring_exponent = 0;
        p.x_exponent = 1.0;
        p.tame_overrides.push(super::super::TameOverride {
            ring: 2,
            log_r: -6.0,
            log_s: Some(-5.5),
            log_t: Some(-5.0),
        });
        p.r_exponent = 19.0;
        let z = Complex64::new(-0.4, 0.3);
        let ring = p.ring(2);
        let (s1, s2) = ring_sums(&ring, z).unwrap();
        let d2 = (z - Complex64::new(0.5, 0.0)).norm_sqr();
        let r2 = (-12f64).exp();
        assert!((s1.exp() - 1.0 / d2).abs() < 1e-15);
        assert!((s2.exp() - r2 / (d2 - r2).powi(2)).abs() < 1e-18);
        assert!(ring_sums(&ring, Complex64::new(0.5 + 1e-3, 0.0)).is_err());
    }

    #[test]
    fn ring_two_first_term_on_y_circle() {
        let p = ZwonekParams::paper(2);
        let ring = p.ring(2);
        let y = p.y(2);
        let z = Complex64::new(y, 0.0);
        let (s1, _) = ring_sums(&ring, z).unwrap();
        let first = s1 - 524288f64.ln();
        let bound = 32.0 / ((y - 1.0 / 32.0).powi(2) * 524288.0);
        assert!(first.exp() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn phi_zero_is_the_circle_supremum() {
        let p = ZwonekParams::paper(6);
        for m in [2, 4] {
            let y = p.y(m);
            let top = majorant(&p, Complex64::new(y, 0.0), 1.0).unwrap();
            for k in 1..40 {
                let z = Complex64::from_polar(y, 0.137 * k as f64);
                let v = majorant(&p, z, 1.0).unwrap();
                assert!(v.ln() <= top.ln() + 1e-12, "{m} {k}: {} > {}", v.ln(), top.ln());
            }
            assert!(top.to_f64() <= ym_sup_computed(&p, m..=m).to_f64() + 1.0 / PI / (1.0 - y * y).powi(2));
        }
        assert!(ym_sup_computed(&p, 2..=6) <= ym_uniform_bound(&p));
    }

    #[test]
    fn lower_spot_value_and_monotone() {
        let p = ZwonekParams::paper(1000);
        let v = lower_log(&p, 3).exp();
        let f = 3f64.powi(20) / (2.0 * PI * 4.0 * PI * PI * (3f64.powi(19) + LN_2));
        assert!((v - f).abs() < 1e-12 * f);
        assert!((v - 0.0121).abs() < 1e-4);
        let t = sandwich_scan(&ZwonekParams::paper(40), 1.0, 1000).unwrap();
        assert!(t.lower_monotone);
        let n_star = t.n_star.unwrap();
        assert!(lower_log(&p, n_star) > t.m1_candidate_log);
        for (l, r) in t.rows.iter().filter(|r| r.kind == "x").zip(&t.refined_lower) {
            assert!(r.value_log >= l.value_log);
        }
    }
}
