//! Basis metric `sqrt(∂∂̄ log K)` from a kernel evaluator, path lengths,
//! graph upper bounds for the Bergman distance, and the probe that follows a
//! path through the rings of a truncated construction toward the origin.
//!
//! All metric values here come from a truncated basis, so they are labelled
//! "basis metric" in reports.

use std::cell::Cell;
use std::collections::{HashMap, HashSet};
use std::f64::consts::{PI, TAU};
use std::io::Write;

use num_complex::Complex64;
use petgraph::graph::{NodeIndex, UnGraph};
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{CircularDomain, ComplexPoint};
use crate::error::{BergmanError, Result};
use crate::hilbert::kernel::single_tail_bound;
use crate::hilbert::KernelEvaluator;
use crate::quadrature::integrate_real;
use crate::zwonek::{majorant, ZwonekParams};

/// Kernel values at or below this are treated as degenerate.
pub const DEGENERATE_KERNEL: f64 = 1e-300;
/// Interior samples per segment when checking that a path stays in `D`.
pub const SEGMENT_SAMPLES: usize = 32;
const LENGTH_REL_TOL: f64 = 1e-9;
const LENGTH_MAX_PANELS: usize = 400;
pub const NEIGHBORS: usize = 16;

pub type Path = Vec<ComplexPoint>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceResult {
    /// Upper bound for the Bergman distance (basis metric).
    pub value: f64,
    pub path: Path,
    pub refinement_level: u32,
}

/// `sqrt(∂²log K/∂z∂z̄)` at `z`.
pub fn metric(ke: &KernelEvaluator, z: ComplexPoint) -> Result<f64> {
    let (k, h) = ke.kernel_and_hessian(z)?;
    if !(k > DEGENERATE_KERNEL) {
        return Err(BergmanError::Degenerate(k));
    }
    Ok(h.max(0.0).sqrt())
}

fn check_segment(ke: &KernelEvaluator, a: ComplexPoint, b: ComplexPoint, index: usize) -> Result<()> {
    let inside = (0..=SEGMENT_SAMPLES + 1).all(|i| {
        let s = i as f64 / (SEGMENT_SAMPLES + 1) as f64;
        ke.contains(a + (b - a) * s)
    });
    if inside {
        Ok(())
    } else {
        Err(BergmanError::PathExitsDomain { segment: index })
    }
}

fn segment_length(ke: &KernelEvaluator, a: ComplexPoint, b: ComplexPoint) -> Result<f64> {
    let len = (b - a).norm();
    if len == 0.0 {
        return Ok(0.0);
    }
    let failure: Cell<Option<BergmanError>> = Cell::new(None);
    let (v, _) = integrate_real(
        |s| match metric(ke, a + (b - a) * s) {
            Ok(m) => m,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        },
        0.0,
        1.0,
        LENGTH_REL_TOL,
        0.0,
        LENGTH_MAX_PANELS,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(v * len),
    }
}

/// Basis-metric length of a polyline.
pub fn path_length(ke: &KernelEvaluator, p: &[ComplexPoint]) -> Result<f64> {
    let mut total = 0.0;
    for (i, w) in p.windows(2).enumerate() {
        check_segment(ke, w[0], w[1], i)?;
        total += segment_length(ke, w[0], w[1])?;
    }
    Ok(total)
}

fn key(z: ComplexPoint) -> (u64, u64) {
    (z.re.to_bits(), z.im.to_bits())
}

/// Mesh nodes of one refinement level: a polar grid about the origin,
/// graded toward `0`, and a small polar grid about each hole. Level `k`
/// nodes are contained in level `k + 1`.
pub fn mesh_nodes(domain: &CircularDomain, level: u32) -> Vec<ComplexPoint> {
    let scale = 1u32 << level;
    let angles = 8 * scale as usize;
    let mut radii: Vec<f64> = (1..4 * scale).map(|i| i as f64 / (4 * scale) as f64).collect();
    radii.extend((1..=3 + level).map(|j| 0.5f64.powi(j as i32 + 2)));
    let mut pts = vec![Complex64::new(0.0, 0.0)];
    for &rho in &radii {
        for m in 0..angles {
            pts.push(Complex64::from_polar(rho, TAU * m as f64 / angles as f64));
        }
    }
    for h in &domain.holes {
        let t = h.t.to_f64();
        for i in -(1 + level as i32)..=1 {
            let rho = t * 2f64.powi(i);
            for m in 0..angles {
                pts.push(h.center + Complex64::from_polar(rho, TAU * m as f64 / angles as f64));
            }
        }
    }
    pts
}

/// Nested polar meshes joined by `NEIGHBORS`-nearest-neighbor edges, each
/// weighted by the basis-metric length of the straight segment.
pub struct BergmanGraph {
    pub level: u32,
    nodes: Vec<ComplexPoint>,
    graph: UnGraph<ComplexPoint, f64>,
}

impl BergmanGraph {
    /// Graph for refinement `level` with the extra points `extra` as nodes.
    /// The edge set at level `k` is contained in the one at level `k + 1`.
    pub fn build(ke: &KernelEvaluator, level: u32, extra: &[ComplexPoint]) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut index: HashMap<(u64, u64), usize> = HashMap::new();
        let mut add = |z: ComplexPoint, nodes: &mut Vec<ComplexPoint>| -> Option<usize> {
            if !ke.contains(z) {
                return None;
            }
            Some(*index.entry(key(z)).or_insert_with(|| {
                nodes.push(z);
                nodes.len() - 1
            }))
        };
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        for l in 0..=level {
            let mut ids: Vec<usize> = mesh_nodes(ke.domain(), l)
                .into_iter()
                .filter_map(|z| add(z, &mut nodes))
                .collect();
            ids.extend(extra.iter().filter_map(|&z| add(z, &mut nodes)));
            ids.sort_unstable();
            ids.dedup();
            let near: Vec<Vec<usize>> = ids
                .par_iter()
                .map(|&i| {
                    let mut d: Vec<(f64, usize)> = ids
                        .iter()
                        .filter(|&&j| j != i)
                        .map(|&j| ((nodes[j] - nodes[i]).norm_sqr(), j))
                        .collect();
                    let k = NEIGHBORS.min(d.len());
                    if k > 0 && k < d.len() {
                        d.select_nth_unstable_by(k - 1, |a, b| a.partial_cmp(b).unwrap());
                    }
                    d.truncate(k);
                    d.into_iter().map(|(_, j)| j).collect()
                })
                .collect();
            for (&i, js) in ids.iter().zip(near) {
                for j in js {
                    edges.insert((i.min(j), i.max(j)));
                }
            }
        }
        let mut edges: Vec<(usize, usize)> = edges.into_iter().collect();
        edges.sort_unstable();
        let weights: Vec<Option<f64>> = edges
            .par_iter()
            .map(|&(i, j)| {
                let (a, b) = (nodes[i], nodes[j]);
                check_segment(ke, a, b, 0).ok()?;
                segment_length(ke, a, b).ok()
            })
            .collect();
        let mut graph = UnGraph::with_capacity(nodes.len(), edges.len());
        for &z in &nodes {
            graph.add_node(z);
        }
        for (&(i, j), w) in edges.iter().zip(weights) {
            if let Some(w) = w {
                graph.add_edge(NodeIndex::new(i), NodeIndex::new(j), w);
            }
        }
        Ok(BergmanGraph { level, nodes, graph })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    fn node_of(&self, z: ComplexPoint) -> Option<NodeIndex> {
        self.nodes.iter().position(|&p| key(p) == key(z)).map(NodeIndex::new)
    }

    /// Shortest path between two nodes of the graph.
    pub fn shortest(&self, w: ComplexPoint, z: ComplexPoint) -> Result<DistanceResult> {
        let (Some(a), Some(b)) = (self.node_of(w), self.node_of(z)) else {
            return Err(BergmanError::OutsideDomain {
                re: if self.node_of(w).is_none() { w.re } else { z.re },
                im: if self.node_of(w).is_none() { w.im } else { z.im },
                reason: "endpoint is not a mesh node".into(),
            });
        };
        let (value, route) = petgraph::algo::astar(&self.graph, a, |n| n == b, |e| *e.weight(), |_| 0.0)
            .ok_or(BergmanError::Disconnected { level: self.level })?;
        Ok(DistanceResult {
            value,
            path: route.into_iter().map(|n| self.graph[n]).collect(),
            refinement_level: self.level,
        })
    }
}

/// Upper bound for the Bergman distance from `w` to `z`.
pub fn distance_upper(ke: &KernelEvaluator, w: ComplexPoint, z: ComplexPoint, mesh_level: u32) -> Result<DistanceResult> {
    for p in [w, z] {
        if !ke.contains(p) {
            return Err(BergmanError::OutsideDomain {
                re: p.re,
                im: p.im,
                reason: "distance endpoint".into(),
            });
        }
    }
    if w == z {
        return Ok(DistanceResult {
            value: 0.0,
            path: vec![w],
            refinement_level: mesh_level,
        });
    }
    BergmanGraph::build(ke, mesh_level, &[w, z])?.shortest(w, z)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbeRow {
    pub t: f64,
    pub re: f64,
    pub im: f64,
    /// Best single-function lower bound for the kernel of the domain.
    pub k_lower: f64,
    pub beta: f64,
    pub cumulative_length: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    /// Ring index `n` (for `|z| = x_n`) or gap index `m` (for `|z| = y_m`).
    pub index: u32,
    pub t: f64,
    pub re: f64,
    pub im: f64,
    pub k_lower: f64,
    pub k_basis: f64,
    /// Log of the majorant times `c`; only set on gap circles.
    pub log_majorant: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub c: f64,
    pub rows: Vec<ProbeRow>,
    pub ring_crossings: Vec<Crossing>,
    pub gap_crossings: Vec<Crossing>,
    pub every_ring_crossed: bool,
    /// Best crossing lower bound per ring, strictly increasing in `n`.
    pub lower_increasing: bool,
    pub below_majorant: bool,
    pub length_nondecreasing: bool,
}

impl ProbeReport {
    pub fn ok(&self) -> bool {
        self.every_ring_crossed && self.lower_increasing && self.below_majorant && self.length_nondecreasing
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,re,im,K_lower,beta,cumulative_length")?;
        for r in &self.rows {
            writeln!(
                out,
                "{:?},{:?},{:?},{:?},{:?},{:?}",
                r.t, r.re, r.im, r.k_lower, r.beta, r.cumulative_length
            )?;
        }
        Ok(())
    }
}

/// Largest single-hole lower bound for `K_D(z)`.
pub fn best_single_bound(domain: &CircularDomain, z: ComplexPoint) -> f64 {
    domain
        .holes
        .iter()
        .map(|h| single_tail_bound(h.center, h.r.ln(), z))
        .fold(0.0, f64::max)
}

/// Straight path from `start` to the origin.
pub fn radial_path(angle: f64, start_radius: f64) -> Path {
    vec![Complex64::from_polar(start_radius, angle), Complex64::new(0.0, 0.0)]
}

/// Parameters in `[0, 1]` where `|a + s(b − a)| = radius`.
fn circle_hits(a: ComplexPoint, b: ComplexPoint, radius: f64) -> Vec<f64> {
    // |a + s d|² = radius² is quadratic in s
    let d = b - a;
    let qa = d.norm_sqr();
    if qa == 0.0 {
        return Vec::new();
    }
    let qb = 2.0 * (a.re * d.re + a.im * d.im);
    let qc = a.norm_sqr() - radius * radius;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let q = -0.5 * (qb + qb.signum() * sq);
    let mut roots = vec![q / qa];
    if q != 0.0 {
        roots.push(qc / q);
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots.dedup();
    roots.into_iter().filter(|s| (0.0..=1.0).contains(s)).collect()
}

/// Follows `path` through a truncated construction: kernel lower bounds on
/// the ring circles `|z| = x_n`, basis kernel against the majorant on the gap
/// circles `|z| = y_m`, and cumulative basis-metric length at
/// `samples_per_segment` points per segment.
pub fn completeness_probe(
    params: &ZwonekParams,
    ke: &KernelEvaluator,
    path: &[ComplexPoint],
    samples_per_segment: usize,
    c: f64,
) -> Result<ProbeReport> {
    if path.len() < 2 || samples_per_segment == 0 {
        return Err(BergmanError::InvalidArgument("probe needs a path and samples".into()));
    }
    for (i, w) in path.windows(2).enumerate() {
        check_segment(ke, w[0], w[1], i)?;
    }
    let segs = path.len() - 1;
    let domain = ke.domain();
    let mut rows = Vec::new();
    let mut cumulative = 0.0;
    let mut prev = path[0];
    for (i, w) in path.windows(2).enumerate() {
        for k in 0..samples_per_segment {
            let s = k as f64 / samples_per_segment as f64;
            let z = w[0] + (w[1] - w[0]) * s;
            if i + k > 0 {
                cumulative += segment_length(ke, prev, z)?;
            }
            prev = z;
            rows.push(probe_row(ke, domain, (i as f64 + s) / segs as f64, z, cumulative)?);
        }
    }
    let last = path[segs];
    cumulative += segment_length(ke, prev, last)?;
    rows.push(probe_row(ke, domain, 1.0, last, cumulative)?);

    let hits = |radius: f64| -> Vec<(f64, ComplexPoint)> {
        path.windows(2)
            .enumerate()
            .flat_map(|(i, w)| {
                circle_hits(w[0], w[1], radius)
                    .into_iter()
                    .map(move |s| ((i as f64 + s) / segs as f64, w[0] + (w[1] - w[0]) * s))
            })
            .collect()
    };
    let mut ring_crossings = Vec::new();
    let mut gap_crossings = Vec::new();
    let mut every_ring_crossed = true;
    let mut best = Vec::new();
    for n in params.n0..=params.n_max {
        let hs = hits(params.x(n));
        every_ring_crossed &= !hs.is_empty();
        let mut top: f64 = 0.0;
        for (t, z) in hs {
            let k_lower = best_single_bound(domain, z);
            top = top.max(k_lower);
            ring_crossings.push(Crossing {
                index: n,
                t,
                re: z.re,
                im: z.im,
                k_lower,
                k_basis: ke.kernel_eval(z)?,
                log_majorant: None,
            });
        }
        best.push(top);
    }
    let mut below_majorant = true;
    for m in params.n0..=params.n_max {
        for (t, z) in hits(params.y(m)) {
            let k_basis = ke.kernel_eval(z)?;
            let lm = majorant(params, z, c)?.ln();
            below_majorant &= k_basis.ln() <= lm;
            gap_crossings.push(Crossing {
                index: m,
                t,
                re: z.re,
                im: z.im,
                k_lower: best_single_bound(domain, z),
                k_basis,
                log_majorant: Some(lm),
            });
        }
    }
    Ok(ProbeReport {
        c,
        every_ring_crossed,
        lower_increasing: best.windows(2).all(|w| w[1] > w[0]),
        below_majorant,
        length_nondecreasing: rows.windows(2).all(|w| w[1].cumulative_length >= w[0].cumulative_length),
        rows,
        ring_crossings,
        gap_crossings,
    })
}

fn probe_row(ke: &KernelEvaluator, domain: &CircularDomain, t: f64, z: ComplexPoint, cumulative: f64) -> Result<ProbeRow> {
    Ok(ProbeRow {
        t,
        re: z.re,
        im: z.im,
        k_lower: best_single_bound(domain, z),
        beta: metric(ke, z)?,
        cumulative_length: cumulative,
    })
}

/// `√2·artanh(x)`, the disc distance from `0` to `x`.
pub fn disc_distance_from_origin(x: f64) -> f64 {
    2f64.sqrt() * x.atanh()
}

/// Direction of a radial probe that keeps the farthest from the holes of
/// every ring, measured in units of `t_n` on the circle `|z| = x_n`.
pub fn gap_angle(params: &ZwonekParams) -> f64 {
    let rings = params.rings();
    let score = |theta: f64| {
        rings
            .iter()
            .map(|r| {
                // nearest hole in angle
                let step = TAU / r.points();
                let off = theta.rem_euclid(step).min(step - theta.rem_euclid(step));
                2.0 * r.x * (0.5 * off).sin() / r.log_t.exp()
            })
            .fold(f64::INFINITY, f64::min)
    };
    (0..4096)
        .map(|k| (k as f64 + 0.5) * TAU / 4096.0)
        .max_by(|a, b| score(*a).partial_cmp(&score(*b)).unwrap())
        .unwrap_or(PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{gram_matrix, Backend, BasisElement, Region};

    fn disc(deg: u32) -> KernelEvaluator {
        let d = CircularDomain::unit_disc();
        let reg = Region::whole(&d);
        let basis: Vec<BasisElement> = (0..=deg).map(BasisElement::monomial).collect();
        KernelEvaluator::new(&gram_matrix(&basis, &reg, Backend::Spectral).unwrap(), &reg)
    }

    #[test]
    fn disc_metric_at_origin() {
        let ke = disc(10);
        assert!((metric(&ke, Complex64::new(0.0, 0.0)).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn straight_path_length() {
        let ke = disc(60);
        let p = vec![Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)];
        let l = path_length(&ke, &p).unwrap();
        assert!((l - disc_distance_from_origin(0.5)).abs() < 1e-4 * l, "{l}");
        let q = vec![Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.5)];
        let joined = vec![p[0], p[1], q[1]];
        let sum = l + path_length(&ke, &q).unwrap();
        assert!((path_length(&ke, &joined).unwrap() - sum).abs() < 1e-9);
        assert_eq!(path_length(&ke, &[p[1], p[1]]).unwrap(), 0.0);
        assert!(matches!(
            path_length(&ke, &[p[0], Complex64::new(1.5, 0.0)]),
            Err(BergmanError::PathExitsDomain { segment: 0 })
        ));
    }

    #[test]
    fn circle_hits_radial() {
        let h = circle_hits(Complex64::new(0.9, 0.0), Complex64::new(0.0, 0.0), 0.3);
        assert_eq!(h.len(), 1);
        assert!((h[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!(circle_hits(Complex64::new(0.1, 0.0), Complex64::new(0.2, 0.0), 0.5).is_empty());
    }

    #[test]
    fn mesh_nodes_nested() {
        let d = CircularDomain::unit_disc();
        let a: HashSet<_> = mesh_nodes(&d, 1).into_iter().map(key).collect();
        let b: HashSet<_> = mesh_nodes(&d, 2).into_iter().map(key).collect();
        assert!(a.is_subset(&b));
    }
}
