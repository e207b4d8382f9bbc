//! Circular multiply-connected domains: the unit disc minus closed discs,
//! optionally punctured at the origin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BergmanError, Result};
use crate::log_scalar::LogScalar;

pub type ComplexPoint = Complex64;

/// Relative slack used for float-valued tangency comparisons.
pub const GEOMETRY_MARGIN: f64 = 1e-12;

/// One excluded disc `closed(△(center, r))` together with the auxiliary
/// radii `s` and `t` used by the decomposition estimates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HoleSpec {
    pub center: ComplexPoint,
    pub r: LogScalar,
    pub s: LogScalar,
    pub t: LogScalar,
}

impl HoleSpec {
    pub fn new(center: ComplexPoint, r: LogScalar, s: LogScalar, t: LogScalar) -> Result<Self> {
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(BergmanError::InvalidConfig("hole center not finite".into()));
        }
        if !(r.ln().is_finite() && r < s && s < t && t < LogScalar::ONE) {
            return Err(BergmanError::InvalidConfig(format!(
                "hole radii must satisfy 0 < r < s < t < 1 (log r = {}, log s = {}, log t = {})",
                r.ln(),
                s.ln(),
                t.ln()
            )));
        }
        Ok(HoleSpec { center, r, s, t })
    }

    /// Convenience constructor from natural logs of the radii.
    pub fn from_logs(center: ComplexPoint, log_r: f64, log_s: f64, log_t: f64) -> Result<Self> {
        HoleSpec::new(
            center,
            LogScalar::from_log(log_r),
            LogScalar::from_log(log_s),
            LogScalar::from_log(log_t),
        )
    }

    pub fn log_r(&self) -> f64 {
        self.r.ln()
    }
}

/// `E \ (⋃ closed discs ∪ {0})`, with `E` the unit disc.
#[derive(Clone, Debug, PartialEq)]
pub struct CircularDomain {
    pub outer_radius: f64,
    pub holes: Vec<HoleSpec>,
    pub punctured_at_origin: bool,
}

impl CircularDomain {
    pub fn new(holes: Vec<HoleSpec>, punctured_at_origin: bool) -> Self {
        CircularDomain {
            outer_radius: 1.0,
            holes,
            punctured_at_origin,
        }
    }

    pub fn unit_disc() -> Self {
        CircularDomain::new(Vec::new(), false)
    }

    /// The domain obtained by keeping only holes with index `>= first`
    /// (zero-based), i.e. the domain `D_N` with `N = first + 1`.
    pub fn tail_from(&self, first: usize) -> CircularDomain {
        CircularDomain {
            outer_radius: self.outer_radius,
            holes: self.holes.iter().skip(first).copied().collect(),
            punctured_at_origin: self.punctured_at_origin,
        }
    }

    pub fn contains(&self, z: ComplexPoint) -> bool {
        if z.norm() >= self.outer_radius {
            return false;
        }
        if self.punctured_at_origin && z == Complex64::new(0.0, 0.0) {
            return false;
        }
        self.holes.iter().all(|h| outside_disc(z, h.center, h.r))
    }

    /// Outer circle counter-clockwise, then each hole's r-circle clockwise.
    pub fn boundary_circles(&self) -> Vec<OrientedCircle> {
        let mut out = Vec::with_capacity(self.holes.len() + 1);
        out.push(OrientedCircle {
            center: Complex64::new(0.0, 0.0),
            log_radius: self.outer_radius.ln(),
            hole: None,
            orientation: 1,
        });
        for (j, h) in self.holes.iter().enumerate() {
            out.push(OrientedCircle {
                center: h.center,
                log_radius: h.r.ln(),
                hole: Some(j),
                orientation: -1,
            });
        }
        out
    }

    pub fn validate(&self) -> ValidationReport {
        validate_configuration(self)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: DomainFile = serde_json::from_str(s)?;
        file.into_domain()
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&DomainFile::from_domain(self))?)
    }
}

/// `|z - c| > r` evaluated without forming `r` when it underflows.
pub fn outside_disc(z: ComplexPoint, c: ComplexPoint, r: LogScalar) -> bool {
    let d = (z - c).norm();
    if d == 0.0 {
        return false;
    }
    d.ln() > r.ln()
}

/// A boundary circle with orientation `+1` (CCW) or `-1` (CW).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrientedCircle {
    pub center: ComplexPoint,
    pub log_radius: f64,
    pub hole: Option<usize>,
    pub orientation: i8,
}

impl OrientedCircle {
    /// Winding number of the oriented circle around `z` (z not on it).
    pub fn winding(&self, z: ComplexPoint) -> i32 {
        let inside = (z - self.center).norm().ln() < self.log_radius;
        if inside {
            self.orientation as i32
        } else {
            0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    TDiscOverlap,
    TDiscOutsideUnitDisc,
    OriginInRDisc,
    TechnicalTBound,
    TechnicalRadiusVsCenter,
    TechnicalSum3,
    TechnicalSum4,
}

impl ViolationKind {
    pub fn is_technical(self) -> bool {
        matches!(
            self,
            ViolationKind::TechnicalTBound
                | ViolationKind::TechnicalRadiusVsCenter
                | ViolationKind::TechnicalSum3
                | ViolationKind::TechnicalSum4
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            ViolationKind::TDiscOverlap => "t-disc overlap",
            ViolationKind::TDiscOutsideUnitDisc => "t-disc outside unit disc",
            ViolationKind::OriginInRDisc => "origin in r-disc",
            ViolationKind::TechnicalTBound => "t >= exp(-4)",
            ViolationKind::TechnicalRadiusVsCenter => "r^2 >= |z|^2/2",
            ViolationKind::TechnicalSum3 => "r^2/t^2 + s/t + sqrt(2 log s/log r) >= 1",
            ViolationKind::TechnicalSum4 => "2 log t/log r + sqrt(2 log s/log r) + s/t >= 1",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub holes: Vec<usize>,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    /// Smallest hole index from which all four technical conditions hold
    /// for every later hole; `None` if the last hole already fails.
    pub min_condition1_index: Option<usize>,
}

impl ValidationReport {
    pub fn geometric_violations(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| !v.kind.is_technical())
    }
}

/// Margins `1 - lhs` (or the corresponding log gap) for the four technical
/// conditions on one hole; positive means satisfied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TechnicalMargins {
    pub t_bound: f64,
    pub radius_vs_center: f64,
    pub sum3: f64,
    pub sum4: f64,
}

impl TechnicalMargins {
    pub fn all_hold(&self) -> bool {
        self.t_bound > 0.0 && self.radius_vs_center > 0.0 && self.sum3 > 0.0 && self.sum4 > 0.0
    }
}

/// `sqrt(2 log s / log r)`.
pub fn sqrt_log_ratio(log_s: f64, log_r: f64) -> f64 {
    (2.0 * log_s / log_r).sqrt()
}

pub fn technical_margins(center_abs: f64, log_r: f64, log_s: f64, log_t: f64) -> TechnicalMargins {
    let root = sqrt_log_ratio(log_s, log_r);
    let s_over_t = (log_s - log_t).exp();
    let r2_over_t2 = (2.0 * (log_r - log_t)).exp();
    TechnicalMargins {
        t_bound: -4.0 - log_t,
        // 2 log r < 2 log|z| - log 2
        radius_vs_center: 2.0 * center_abs.ln() - std::f64::consts::LN_2 - 2.0 * log_r,
        sum3: 1.0 - (r2_over_t2 + s_over_t + root),
        sum4: 1.0 - (2.0 * log_t / log_r + root + s_over_t),
    }
}

pub fn validate_configuration(d: &CircularDomain) -> ValidationReport {
    let mut violations = Vec::new();
    let holes = &d.holes;

    // sweep over x-extents for pairwise t-disc overlap
    let mut order: Vec<usize> = (0..holes.len()).collect();
    let t_of = |j: usize| holes[j].t.to_f64();
    order.sort_by(|&a, &b| {
        (holes[a].center.re - t_of(a))
            .partial_cmp(&(holes[b].center.re - t_of(b)))
            .unwrap()
    });
    let max_t = holes.iter().map(|h| h.t.to_f64()).fold(0.0, f64::max);
    for (pos, &a) in order.iter().enumerate() {
        let ra = holes[a].center.re + t_of(a);
        for &b in &order[pos + 1..] {
            if holes[b].center.re - t_of(b) > ra + 2.0 * max_t * GEOMETRY_MARGIN {
                break;
            }
            let dist = (holes[a].center - holes[b].center).norm();
            let reach = t_of(a) + t_of(b);
            let margin = dist - reach;
            if margin <= GEOMETRY_MARGIN * reach {
                let (i, k) = if a < b { (a, b) } else { (b, a) };
                violations.push(Violation {
                    kind: ViolationKind::TDiscOverlap,
                    holes: vec![i, k],
                    margin,
                });
            }
        }
    }

    for (j, h) in holes.iter().enumerate() {
        let t = h.t.to_f64();
        let margin = d.outer_radius - (h.center.norm() + t);
        if margin <= GEOMETRY_MARGIN * d.outer_radius {
            violations.push(Violation {
                kind: ViolationKind::TDiscOutsideUnitDisc,
                holes: vec![j],
                margin,
            });
        }
        if d.punctured_at_origin {
            let cabs = h.center.norm();
            let margin = if cabs == 0.0 {
                f64::NEG_INFINITY
            } else {
                cabs.ln() - h.r.ln()
            };
            if margin <= GEOMETRY_MARGIN {
                violations.push(Violation {
                    kind: ViolationKind::OriginInRDisc,
                    holes: vec![j],
                    margin,
                });
            }
        }
    }

    let mut min_condition1_index = Some(holes.len());
    let mut still_suffix = true;
    for j in (0..holes.len()).rev() {
        let h = &holes[j];
        let m = technical_margins(h.center.norm(), h.r.ln(), h.s.ln(), h.t.ln());
        let checks = [
            (ViolationKind::TechnicalTBound, m.t_bound),
            (ViolationKind::TechnicalRadiusVsCenter, m.radius_vs_center),
            (ViolationKind::TechnicalSum3, m.sum3),
            (ViolationKind::TechnicalSum4, m.sum4),
        ];
        let mut holds = true;
        for (kind, margin) in checks {
            if !(margin > 0.0) {
                holds = false;
                violations.push(Violation {
                    kind,
                    holes: vec![j],
                    margin,
                });
            }
        }
        if still_suffix {
            if holds {
                min_condition1_index = Some(j);
            } else {
                still_suffix = false;
            }
        }
    }
    if holes.is_empty() {
        min_condition1_index = Some(0);
    } else if min_condition1_index == Some(holes.len()) {
        min_condition1_index = None;
    }

    let ok = violations.is_empty();
    ValidationReport {
        ok,
        violations,
        min_condition1_index,
    }
}

/// On-disk domain description. Radii are natural logarithms.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainFile {
    pub holes: Vec<HoleFile>,
    #[serde(default)]
    pub punctured: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleFile {
    pub center: [f64; 2],
    pub log_r: f64,
    pub log_s: f64,
    pub log_t: f64,
}

impl DomainFile {
    pub fn into_domain(self) -> Result<CircularDomain> {
        let holes = self
            .holes
            .iter()
            .map(|h| {
                HoleSpec::from_logs(
                    Complex64::new(h.center[0], h.center[1]),
                    h.log_r,
                    h.log_s,
                    h.log_t,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CircularDomain::new(holes, self.punctured))
    }

    pub fn from_domain(d: &CircularDomain) -> Self {
        DomainFile {
            holes: d
                .holes
                .iter()
                .map(|h| HoleFile {
                    center: [h.center.re, h.center.im],
                    log_r: h.r.ln(),
                    log_s: h.s.ln(),
                    log_t: h.t.ln(),
                })
                .collect(),
            punctured: d.punctured_at_origin,
        }
    }
}
