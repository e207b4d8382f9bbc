//! The ring-of-holes construction: `n^a` holes equally spaced on the circle
//! of radius `x_n = n^{-p}`, with radii `t_n = 1/(3C n^{a+p})`,
//! `r_n = exp(-n^b)`, `s_n = exp(-λn)`, plus the certified checks on it.

pub mod conditions;
pub mod majorant;

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{CircularDomain, HoleSpec};
use crate::error::{BergmanError, Result};
use crate::log_scalar::LogScalar;

pub use conditions::{comparison_epsilon, verify_conditions, ConditionReport, EpsilonParts, SeriesCheck};
pub use majorant::{majorant, sandwich_scan, SandwichRow, SandwichTable};

/// Log-margin slack absorbing rounding in the chord evaluation.
pub const SPACING_ROUNDING: f64 = 1e-12;

/// Largest ring size iterated hole by hole; larger rings use closed forms.
pub const EXACT_RING_LIMIT: f64 = 4096.0;

/// Replacement radii for one ring (desk-scale runs).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TameOverride {
    pub ring: u32,
    pub log_r: f64,
    #[serde(default)]
    pub log_s: Option<f64>,
    #[serde(default)]
    pub log_t: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZwonekParams {
    pub n0: u32,
    pub n_max: u32,
    /// Ring `n` carries `n^a` holes.
    pub ring_exponent: u32,
    /// `x_n = n^{-p}`.
    pub x_exponent: f64,
    /// Spacing constant `C`.
    pub spacing_c: f64,
    /// `t_n = 1/(t_factor·C·n^{a+p})`.
    pub t_factor: f64,
    /// `log r_n = -n^b`.
    pub r_exponent: f64,
    /// `log s_n = -λ n`.
    pub s_rate: f64,
    #[serde(default)]
    pub tame_overrides: Vec<TameOverride>,
}

impl ZwonekParams {
    /// The exact published parameters, truncated at `n_max`.
    pub fn paper(n_max: u32) -> Self {
        ZwonekParams {
            n0: 2,
            n_max,
            ring_exponent: 5,
            x_exponent: 5.0,
            spacing_c: 2.0 * PI,
            t_factor: 3.0,
            r_exponent: 19.0,
            s_rate: 1.0,
            tame_overrides: Vec::new(),
        }
    }

    /// Desk-scale family with rings 2, 3, 4 of 2, 3, 4 holes on `|z| = 1/n`
    /// and radii that stay representable in floating point.
    pub fn tame_three_rings() -> Self {
        let overrides = [(2, -7.0, -5.5), (3, -9.5, -7.5), (4, -12.0, -9.0)];
        ZwonekParams {
            n0: 2,
            n_max: 4,
            ring_exponent: 1,
            x_exponent: 1.0,
            spacing_c: 2.0 * PI,
            t_factor: 3.0,
            r_exponent: 19.0,
            s_rate: 1.0,
            tame_overrides: overrides
                .iter()
                .map(|&(ring, log_r, log_s)| TameOverride {
                    ring,
                    log_r,
                    log_s: Some(log_s),
                    log_t: None,
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(BergmanError::InvalidConfig(m.to_string()));
        if self.n0 < 2 {
            return bad("n0 must be at least 2");
        }
        if self.n_max < self.n0 {
            return bad("n_max must be at least n0");
        }
        for (name, v) in [
            ("x_exponent", self.x_exponent),
            ("spacing_c", self.spacing_c),
            ("t_factor", self.t_factor),
            ("r_exponent", self.r_exponent),
            ("s_rate", self.s_rate),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(&format!("{name} must be positive and finite"));
            }
        }
        for o in &self.tame_overrides {
            let ring = self.rule_ring(o.ring);
            let s = o.log_s.unwrap_or(ring.log_s);
            let t = o.log_t.unwrap_or(ring.log_t);
            if !(o.log_r < s && s < t && t < 0.0) {
                return Err(BergmanError::InvalidConfig(format!(
                    "override for ring {} violates r < s < t < 1",
                    o.ring
                )));
            }
        }
        Ok(())
    }

    /// Whether the points-per-ring rule matches `1/x_n`.
    pub fn is_paper_shape(&self) -> bool {
        self.ring_exponent as f64 == self.x_exponent
    }

    /// `a + p`, the exponent of the spacing scale `n^{-(a+p)}`.
    pub fn spacing_exponent(&self) -> f64 {
        self.ring_exponent as f64 + self.x_exponent
    }

    pub fn x(&self, n: u32) -> f64 {
        (n as f64).powf(-self.x_exponent)
    }

    /// `y_n = (x_n + x_{n+1})/2`.
    pub fn y(&self, n: u32) -> f64 {
        0.5 * (self.x(n) + self.x(n + 1))
    }

    fn rule_ring(&self, n: u32) -> Ring {
        let ln_n = (n as f64).ln();
        let a = self.ring_exponent as f64;
        Ring {
            n,
            count: (n as f64).powi(self.ring_exponent as i32),
            log_points: a * ln_n,
            x: self.x(n),
            log_r: -(n as f64).powf(self.r_exponent),
            log_s: -self.s_rate * n as f64,
            log_t: -(self.t_factor * self.spacing_c).ln() - self.spacing_exponent() * ln_n,
            overridden: false,
        }
    }

    /// Ring data with overrides applied.
    pub fn ring(&self, n: u32) -> Ring {
        let mut ring = self.rule_ring(n);
        if let Some(o) = self.tame_overrides.iter().find(|o| o.ring == n) {
            ring.log_r = o.log_r;
            if let Some(s) = o.log_s {
                ring.log_s = s;
            }
            if let Some(t) = o.log_t {
                ring.log_t = t;
            }
            ring.overridden = true;
        }
        ring
    }

    pub fn rings(&self) -> Vec<Ring> {
        (self.n0..=self.n_max).map(|n| self.ring(n)).collect()
    }

    pub fn total_holes(&self) -> f64 {
        self.rings().iter().map(|r| r.points()).sum()
    }
}

/// All holes of one ring share `x`, `r`, `s` and `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ring {
    pub n: u32,
    /// `n^a`, exact while below `2^53`.
    pub count: f64,
    pub log_points: f64,
    pub x: f64,
    pub log_r: f64,
    pub log_s: f64,
    pub log_t: f64,
    pub overridden: bool,
}

impl Ring {
    pub fn points(&self) -> f64 {
        self.count
    }

    pub fn r(&self) -> LogScalar {
        LogScalar::from_log(self.log_r)
    }

    pub fn center(&self, j: u64) -> Complex64 {
        Complex64::from_polar(self.x, 2.0 * PI * j as f64 / self.points())
    }

    /// Same-ring adjacent chord `2x sin(π/M)`, as a log.
    pub fn log_adjacent_chord(&self) -> f64 {
        LN_2 + self.x.ln() + (PI / self.points()).sin().ln()
    }
}

/// A materialized truncation of the construction.
#[derive(Clone, Debug)]
pub struct Generated {
    pub domain: CircularDomain,
    pub rings: Vec<Ring>,
    /// `(m, y_m)` for the ring gaps inside the truncation.
    pub y_radii: Vec<(u32, f64)>,
    /// Rings whose rule value `s_n ≥ t_n` was capped at `sqrt(r_n t_n)`.
    pub capped_s: Vec<u32>,
}

/// Holes in ring-major, then angular, order. Rings whose rule gives
/// `s_n ≥ t_n` get `s = sqrt(r t)` so that `r < s < t` holds.
pub fn generate(params: &ZwonekParams, max_holes: usize) -> Result<Generated> {
    params.validate()?;
    let total = params.total_holes();
    if total > max_holes as f64 {
        return Err(BergmanError::InvalidArgument(format!(
            "truncation has {total:.3e} holes, more than the cap {max_holes}"
        )));
    }
    let rings = params.rings();
    let mut holes = Vec::with_capacity(total as usize);
    let mut capped_s = Vec::new();
    for ring in &rings {
        let mut log_s = ring.log_s;
        if log_s >= ring.log_t {
            log_s = 0.5 * (ring.log_r + ring.log_t);
            capped_s.push(ring.n);
        }
        for j in 0..ring.points() as u64 {
            holes.push(HoleSpec::from_logs(ring.center(j), ring.log_r, log_s, ring.log_t)?);
        }
    }
    let y_radii = (params.n0..params.n_max).map(|m| (m, params.y(m))).collect();
    Ok(Generated {
        domain: CircularDomain::new(holes, true),
        rings,
        y_radii,
        capped_s,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RingMargin {
    pub n: u32,
    /// `log chord − log(1/(C n^{a+p}))`.
    pub lower_log_margin: f64,
    /// `log(C/n^{a+p}) − log chord`.
    pub upper_log_margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpacingConstant {
    pub value: f64,
    /// Both sides hold for every checked ring with at least two points.
    pub certified: bool,
    /// The bounds `4 ≤ n^{a+p}·chord ≤ 2π` imply certification for all rings.
    pub analytic: bool,
    /// Rings with a single point (only the upper side is meaningful).
    pub single_point_rings: Vec<u32>,
    pub min_lower_log_margin: f64,
    pub min_upper_log_margin: f64,
    pub same_ring_t_disjoint: bool,
    pub cross_ring_t_disjoint: bool,
    pub y_circles_clear: bool,
    pub margins: Vec<RingMargin>,
}

/// Certifies `1/(C n^{a+p}) ≤ |z_{n,k} − z_{n,j}|` and
/// `|z_{n,0} − z_{n,1}| ≤ C/n^{a+p}` on `rings`, plus the disjointness facts
/// the construction relies on.
pub fn spacing_constant(params: &ZwonekParams, rings: std::ops::RangeInclusive<u32>) -> SpacingConstant {
    let c = params.spacing_c;
    let q = params.spacing_exponent();
    let mut margins = Vec::new();
    let mut single = Vec::new();
    let (mut same_ok, mut cross_ok, mut y_ok) = (true, true, true);
    let lo = *rings.start();
    for n in rings {
        let ring = params.ring(n);
        let ln_n = (n as f64).ln();
        if ring.points() < 2.0 {
            single.push(n);
            continue;
        }
        let chord = ring.log_adjacent_chord();
        margins.push(RingMargin {
            n,
            lower_log_margin: chord + c.ln() + q * ln_n,
            upper_log_margin: c.ln() - q * ln_n - chord,
        });
        if LN_2 + ring.log_t >= chord {
            same_ok = false;
        }
        let next = params.ring(n + 1);
        if ring.x - next.x <= ring.log_t.exp() + next.log_t.exp() {
            cross_ok = false;
        }
        if n == lo && ring.x + ring.log_t.exp() >= 1.0 {
            cross_ok = false;
        }
        // the circle of radius y_n sits in the gap between rings n and n+1
        let half_gap = 0.5 * (ring.x - next.x);
        if half_gap.ln() <= ring.log_r.max(next.log_r) {
            y_ok = false;
        }
    }
    let min_lower = margins.iter().map(|m| m.lower_log_margin).fold(f64::INFINITY, f64::min);
    let min_upper = margins.iter().map(|m| m.upper_log_margin).fold(f64::INFINITY, f64::min);
    SpacingConstant {
        value: c,
        certified: min_lower >= -SPACING_ROUNDING && min_upper >= -SPACING_ROUNDING,
        analytic: c >= 2.0 * PI && c >= 0.25,
        single_point_rings: single,
        min_lower_log_margin: min_lower,
        min_upper_log_margin: min_upper,
        same_ring_t_disjoint: same_ok,
        cross_ring_t_disjoint: cross_ok,
        y_circles_clear: y_ok,
        margins,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_ring_two() {
        let p = ZwonekParams::paper(3);
        let ring = p.ring(2);
        assert_eq!(ring.points(), 32.0);
        assert_eq!(ring.log_r, -524288.0);
        assert!((ring.center(0) - Complex64::new(1.0 / 32.0, 0.0)).norm() < 1e-18);
        assert!((p.y(2) - (1.0 / 32.0 + 1.0 / 243.0) / 2.0).abs() < 1e-17);
        assert!((p.y(2) - 0.01768261).abs() < 1e-8);
    }

    #[test]
    fn generate_ring_major_with_capped_s() {
        let p = ZwonekParams::paper(3);
        let g = generate(&p, 1000).unwrap();
        assert_eq!(g.domain.holes.len(), 32 + 243);
        assert_eq!(g.capped_s, vec![2, 3]);
        assert!(g.domain.holes[0].center.re > 0.0 && g.domain.holes[0].center.im == 0.0);
        assert!((g.domain.holes[32].center - Complex64::new(1.0 / 243.0, 0.0)).norm() < 1e-18);
        assert!(generate(&ZwonekParams::paper(5), 1000).is_err());
        let geo = g.domain.validate();
        assert_eq!(geo.geometric_violations().count(), 0);
    }

    #[test]
    fn overrides_are_checked() {
        let mut p = ZwonekParams::paper(3);
        p.tame_overrides.push(TameOverride {
            ring: 2,
            log_r: -3.0,
            log_s: Some(-4.0),
            log_t: None,
        });
        assert!(p.validate().is_err());
        p.tame_overrides[0].log_s = Some(-2.0);
        p.tame_overrides[0].log_t = Some(-1.0);
        assert!(p.validate().is_ok());
        assert_eq!(p.ring(2).log_r, -3.0);
    }

    #[test]
    fn ring_two_chord() {
        let p = ZwonekParams::paper(2);
        let chord = p.ring(2).log_adjacent_chord().exp();
        assert!((chord - 2.0 / 32.0 * (PI / 32.0).sin()).abs() < 1e-16);
        assert!((chord - 0.0061261).abs() < 1e-7);
        assert!(chord <= 2.0 * PI / 1024.0);
    }

    #[test]
    fn spacing_certified_for_paper_rings() {
        let p = ZwonekParams::paper(10_000);
        let sc = spacing_constant(&p, 2..=10_000);
        assert!(sc.certified && sc.analytic);
        assert!(sc.same_ring_t_disjoint && sc.cross_ring_t_disjoint && sc.y_circles_clear);
        for m in &sc.margins {
            let n = m.n as f64;
            // 4/n^10 ≤ chord and 4 ≥ 1/(2π)
            assert!(m.lower_log_margin >= (4.0 * 2.0 * PI).ln() - 1e-9, "{n}");
        }
    }

    #[test]
    fn single_point_rings_reported() {
        let mut p = ZwonekParams::paper(4);
        p.ring_exponent = 0;
        let sc = spacing_constant(&p, 2..=4);
        assert_eq!(sc.single_point_rings, vec![2, 3, 4]);
        assert!(sc.margins.is_empty());
    }
}
