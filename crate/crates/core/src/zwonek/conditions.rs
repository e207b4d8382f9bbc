//! Ring-grouped certification of the summability, product and infimum
//! conditions, with integral-test tail bounds.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use super::{majorant, Ring, ZwonekParams};
use crate::domain::{technical_margins, HoleSpec};
use crate::error::Result;
use crate::log_scalar::{log_sum_exp, LogScalar};

/// A partial sum up to `n_max` plus a rigorous bound on the rest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesCheck {
    pub partial: LogScalar,
    pub tail: LogScalar,
    pub converges: bool,
}

impl SeriesCheck {
    pub fn total(&self) -> LogScalar {
        self.partial + self.tail
    }
}

/// `Σ_{n>N} e^{c} n^e ≤ e^{c} N^{e+1}/(−e−1)` for `e < −1`.
pub fn power_tail(log_coef: f64, exponent: f64, n: u32) -> LogScalar {
    if exponent >= -1.0 {
        return LogScalar::INFINITY;
    }
    let big_n = n.max(1) as f64;
    LogScalar::from_log(log_coef + (exponent + 1.0) * big_n.ln() - (-exponent - 1.0).ln())
}

/// `Σ_{n>N} e^{c} n^k e^{−λn}`: explicit terms until `x^K e^{−λx}` (with
/// `K = ⌈k⌉`) is decreasing, then the closed-form incomplete gamma integral.
pub fn powexp_tail(log_coef: f64, k: f64, lambda: f64, n: u32) -> LogScalar {
    let kk = k.max(0.0).ceil();
    let start = (n as f64).max((kk / lambda).ceil()) as u32;
    let mut logs: Vec<f64> = (n + 1..=start)
        .map(|m| log_coef + k * (m as f64).ln() - lambda * m as f64)
        .collect();
    // ∫_{x0}^∞ x^K e^{−λx} dx = K!/λ^{K+1} e^{−λ x0} Σ_{i≤K} (λ x0)^i/i!
    let x0 = (start as f64).max(1.0);
    let kint = kk as u32;
    let mut ln_fact = 0.0;
    let mut inner = Vec::with_capacity(kint as usize + 1);
    for i in 0..=kint {
        if i > 0 {
            ln_fact += (i as f64).ln();
        }
        inner.push(i as f64 * (lambda * x0).ln() - ln_fact);
    }
    let ln_k_fact = ln_fact;
    logs.push(
        log_coef + ln_k_fact - (kk + 1.0) * lambda.ln() - lambda * x0 + log_sum_exp(&inner),
    );
    LogScalar::from_log(log_sum_exp(&logs))
}

/// `Σ_{n>N} e^{c} n^k e^{−2 n^b}` for `b ≥ 1`, bounded by a geometric
/// series once consecutive ratios stay below `1/2`.
pub fn superexp_tail(log_coef: f64, k: f64, b: f64, n: u32) -> LogScalar {
    let m = (n + 1) as f64;
    if b < 1.0 {
        return LogScalar::INFINITY;
    }
    // ln(term(n+1)/term(n)) ≤ k/n − 2b n^{b−1}, nonincreasing in n
    let log_ratio = k.max(0.0) / m - 2.0 * b * m.powf(b - 1.0);
    if log_ratio > -std::f64::consts::LN_2 {
        return LogScalar::INFINITY;
    }
    let first = log_coef + k * m.ln() - 2.0 * m.powf(b);
    LogScalar::from_log(first - (-log_ratio.exp()).ln_1p())
}

/// `1 − r²/t² − s/t − sqrt(2 log s/log r)`, the factor in the product.
pub fn product_factor(log_r: f64, log_s: f64, log_t: f64) -> f64 {
    let m = technical_margins(1.0, log_r, log_s, log_t);
    m.sum3
}

/// `1 − 2 log t/log r − sqrt(2 log s/log r) − s/t`, the infimum term.
pub fn infimum_term(log_r: f64, log_s: f64, log_t: f64) -> f64 {
    technical_margins(1.0, log_r, log_s, log_t).sum4
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EpsilonParts {
    pub product: LogScalar,
    pub infimum: f64,
    pub epsilon: LogScalar,
}

/// `ε = inf_k(infimum term) · Π_j(product factor)` for a finite hole list;
/// every coefficient produced by the recursive estimate dominates it.
pub fn comparison_epsilon(holes: &[HoleSpec]) -> EpsilonParts {
    let mut log_p = 0.0;
    let mut inf: f64 = 1.0;
    for h in holes {
        let f = product_factor(h.r.ln(), h.s.ln(), h.t.ln());
        log_p += if f > 0.0 { f.ln() } else { f64::NEG_INFINITY };
        inf = inf.min(infimum_term(h.r.ln(), h.s.ln(), h.t.ln()));
    }
    let product = LogScalar::from_log(log_p);
    let epsilon = if inf > 0.0 {
        product * LogScalar::from_f64(inf)
    } else {
        LogScalar::ZERO
    };
    EpsilonParts {
        product,
        infimum: inf,
        epsilon,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub n0: u32,
    pub n_max: u32,
    /// First ring from which every checked ring satisfies the technical
    /// conditions.
    pub condition1_from_index: Option<u32>,
    /// `Σ n^a s_n/t_n`.
    pub series3_ratio: SeriesCheck,
    /// `Σ n^a sqrt(log s_n/log r_n)`.
    pub series3_root: SeriesCheck,
    /// `Σ n^a (−1/log r_n)`.
    pub series4: SeriesCheck,
    /// Ring from which the product and infimum are taken.
    pub product_start: Option<u32>,
    pub product_lower_bound: LogScalar,
    pub infimum_lower_bound: f64,
    pub epsilon: LogScalar,
    /// Real-axis variant `z_N = x_N`, one hole per ring.
    pub corollary3_sum: SeriesCheck,
    /// Direct sums over the `y_m` circles, exact for `m ≤ n_max`.
    pub ym_sup_computed: LogScalar,
    /// Bound valid uniformly for every `m ≥ 2`.
    pub ym_sup_bound: LogScalar,
    pub ok: bool,
}

fn series(rings: &[Ring], term: impl Fn(&Ring) -> f64, tail: LogScalar, converges: bool) -> SeriesCheck {
    let logs: Vec<f64> = rings.iter().map(term).collect();
    SeriesCheck {
        partial: LogScalar::from_log(log_sum_exp(&logs)),
        tail: if converges { tail } else { LogScalar::INFINITY },
        converges: converges && tail.is_finite(),
    }
}

pub fn verify_conditions(params: &ZwonekParams) -> Result<ConditionReport> {
    params.validate()?;
    let rings = params.rings();
    let n_max = params.n_max;
    let a = params.ring_exponent as f64;
    let p = params.x_exponent;
    let b = params.r_exponent;
    let lambda = params.s_rate;
    let q = params.spacing_exponent();
    let ln_tc = (params.t_factor * params.spacing_c).ln();

    let holds: Vec<bool> = rings
        .iter()
        .map(|r| technical_margins(r.x, r.log_r, r.log_s, r.log_t).all_hold())
        .collect();
    let condition1_from_index = match holds.iter().rposition(|h| !h) {
        None => Some(params.n0),
        Some(i) if i + 1 < rings.len() => Some(rings[i + 1].n),
        Some(_) => None,
    };

    let series3_ratio = series(
        &rings,
        |r| r.log_points + r.log_s - r.log_t,
        powexp_tail(ln_tc, 2.0 * a + p, lambda, n_max),
        true,
    );
    let root_exp = a + (1.0 - b) / 2.0;
    let series3_root = series(
        &rings,
        |r| r.log_points + 0.5 * (r.log_s / r.log_r).ln(),
        power_tail(0.5 * lambda.ln(), root_exp, n_max),
        root_exp < -1.0,
    );
    let series4 = series(
        &rings,
        |r| r.log_points - (-r.log_r).ln(),
        power_tail(0.0, a - b, n_max),
        a - b < -1.0,
    );

    // product and infimum over rings from the (1)-index on
    let next = (n_max + 1) as f64;
    let ratio_next = (ln_tc + q * next.ln() - lambda * next).exp();
    let root_next = (2.0 * lambda).sqrt() * next.powf((1.0 - b) / 2.0);
    let q_bound = 2.0 * ratio_next + root_next;
    let tail_ok = b > 1.0
        && next >= q / lambda
        && q_bound < 1.0
        && series3_ratio.converges
        && series3_root.converges;
    let (mut product, mut infimum) = (LogScalar::ZERO, 0.0);
    let product_start = condition1_from_index;
    if let (Some(start), true) = (product_start, tail_ok) {
        let mut log_p = 0.0;
        let mut inf = f64::INFINITY;
        for r in rings.iter().filter(|r| r.n >= start) {
            let f = product_factor(r.log_r, r.log_s, r.log_t);
            log_p += r.points() * (-(1.0 - f)).ln_1p();
            inf = inf.min(infimum_term(r.log_r, r.log_s, r.log_t));
        }
        // Σ_{n>N} n^a q_n ≤ 2·tail(ratio) + √2·tail(root); log(1−x) ≥ −x/(1−x)
        let tail_sum = series3_ratio.tail.to_f64() * 2.0 + SQRT_2 * series3_root.tail.to_f64();
        log_p -= tail_sum / (1.0 - q_bound);
        // 2 log t/log r = 2(ln(t_factor C) + q ln n)/n^b decreases once q < b(ln(t_factor C) + q ln n)
        if q < b * (ln_tc + q * next.ln()) {
            let w_next = 1.0 - 2.0 * (ln_tc + q * next.ln()) / next.powf(b) - root_next - ratio_next;
            inf = inf.min(w_next);
            if inf > 0.0 && log_p.is_finite() {
                product = LogScalar::from_log(log_p);
                infimum = inf;
            }
        }
    }
    let epsilon = if infimum > 0.0 {
        product * LogScalar::from_f64(infimum)
    } else {
        LogScalar::ZERO
    };

    // real-axis variant: Σ 1/(x_n²(−log r_n)) + r_n²/(x_n² − r_n²)²
    let cor_exp = 2.0 * p - b;
    let next_r_ok = -next.powf(b) < next.ln() * -p - 0.5 * std::f64::consts::LN_2;
    let cor_tail = power_tail(0.0, cor_exp, n_max)
        + if next_r_ok {
            superexp_tail(4f64.ln(), 4.0 * p, b, n_max)
        } else {
            LogScalar::INFINITY
        };
    let corollary3_sum = series(
        &rings,
        |r| {
            let lx2 = 2.0 * r.x.ln();
            let t1 = -lx2 - (-r.log_r).ln();
            let gap = lx2 + (-(2.0 * r.log_r - lx2).exp()).ln_1p();
            let t2 = 2.0 * r.log_r - 2.0 * gap;
            log_sum_exp(&[t1, t2])
        },
        cor_tail,
        cor_exp < -1.0,
    );

    let ym_sup_computed = majorant::ym_sup_computed(params, params.n0..=n_max);
    let ym_sup_bound = majorant::ym_uniform_bound(params);

    let ok = series3_ratio.converges
        && series3_root.converges
        && series4.converges
        && condition1_from_index.is_some()
        && !epsilon.is_zero()
        && ym_sup_bound.is_finite();
    Ok(ConditionReport {
        n0: params.n0,
        n_max,
        condition1_from_index,
        series3_ratio,
        series3_root,
        series4,
        product_start,
        product_lower_bound: product,
        infimum_lower_bound: infimum,
        epsilon,
        corollary3_sum,
        ym_sup_computed,
        ym_sup_bound,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn power_tail_bounds_zeta() {
        // Σ_{n>10} n^{-4} vs ζ(4) − partial
        let partial: f64 = (1..=10).map(|n| (n as f64).powi(-4)).sum();
        let rest = PI.powi(4) / 90.0 - partial;
        let bound = power_tail(0.0, -4.0, 10).to_f64();
        assert!(bound >= rest && bound < 1.5 * rest);
    }

    #[test]
    fn powexp_tail_is_upper_bound() {
        let brute = |k: f64, lam: f64, n: u32| -> f64 {
            (n + 1..n + 4000).map(|m| (m as f64).powf(k) * (-lam * m as f64).exp()).sum()
        };
        for (k, lam, n) in [(15.0, 1.0, 20), (15.0, 1.0, 60), (3.5, 0.5, 2), (0.0, 2.0, 1)] {
            let b = powexp_tail(0.0, k, lam, n).to_f64();
            let e = brute(k, lam, n);
            assert!(b >= e && b < 4.0 * e, "{k} {lam} {n}: {b} vs {e}");
        }
    }

    #[test]
    fn superexp_tail_is_upper_bound() {
        let b = superexp_tail(0.0, 5.0, 1.5, 3);
        let e: f64 = (4..50).map(|m| (m as f64).powi(5) * (-2.0 * (m as f64).powf(1.5)).exp()).sum();
        assert!(b.to_f64() >= e && b.to_f64() < 2.5 * e);
    }

    #[test]
    fn paper_series_and_zeta_cross_check() {
        let rep = verify_conditions(&ZwonekParams::paper(200)).unwrap();
        // Σ_{n≥2} n^{-4} = π⁴/90 − 1
        let exact = PI.powi(4) / 90.0 - 1.0;
        let partial = rep.series3_root.partial.to_f64();
        let total = rep.series3_root.total().to_f64();
        assert!(partial <= exact && exact <= total);
        assert!((partial - exact).abs() < 1e-6);
        assert!(rep.series3_ratio.converges && rep.series4.converges);
        let idx = rep.condition1_from_index.unwrap();
        assert!((35..=45).contains(&idx), "{idx}");
        assert!(!rep.epsilon.is_zero() && rep.epsilon.ln().is_finite());
        assert!(rep.ok);
    }

    #[test]
    fn tame_exponents_diverge() {
        let mut p = ZwonekParams::paper(50);
        p.r_exponent = 5.0;
        let rep = verify_conditions(&p).unwrap();
        assert!(!rep.series3_root.converges);
        assert!(!rep.ok);
    }

    #[test]
    fn doubling_n_max_respects_tail_bounds() {
        let small = verify_conditions(&ZwonekParams::paper(60)).unwrap();
        let big = verify_conditions(&ZwonekParams::paper(120)).unwrap();
        for (s, b) in [
            (small.series3_ratio, big.series3_ratio),
            (small.series3_root, big.series3_root),
            (small.series4, big.series4),
        ] {
            assert!(b.total().to_f64() <= s.total().to_f64() * (1.0 + 1e-12));
            assert!(b.partial.to_f64() <= s.total().to_f64() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn epsilon_of_handcrafted_holes() {
        let h = HoleSpec::from_logs(num_complex::Complex64::new(0.5, 0.0), -5000.0, -50.0, -5.0).unwrap();
        let e = comparison_epsilon(&[h, h]);
        let root = (100.0f64 / 5000.0).sqrt();
        let f = 1.0 - (-45f64).exp() - root - (-9990f64).exp();
        assert!((e.product.to_f64() - f * f).abs() < 1e-14);
        assert!((e.infimum - (1.0 - 0.002 - root - (-45f64).exp())).abs() < 1e-14);
        assert!((e.epsilon.to_f64() - f * f * e.infimum).abs() < 1e-14);
    }
}
