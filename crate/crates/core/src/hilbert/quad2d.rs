//! Area quadrature oracle: direct integration of `f·conj(g)` over the region
//! on a polar cell decomposition.
//!
//! Each hole away from the origin gets an annular cell `P(z_j, r_j, R_j)`
//! integrated in `(log ρ, φ)` around its own center. The rest of the disc is
//! swept by rays from the origin; along each ray the excluded discs are cut
//! out exactly, and the angular integral is split at every tangent angle and
//! smoothed there so the square-root behaviour of chord lengths does not
//! stall the adaptive rule.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::basis::{BasisElement, EvalPoint};
use super::Region;
use crate::error::{BergmanError, Result};
use crate::quadrature::{integrate_adaptive, smoothstep};

const REL_TOL: f64 = 1e-12;
const MAX_PANELS: usize = 4000;

#[derive(Clone, Copy, Debug)]
struct Excluded {
    center: Complex64,
    radius: f64,
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    hole: usize,
    center: Complex64,
    log_inner: f64,
    log_outer: f64,
}

struct Layout {
    outer: f64,
    cells: Vec<Cell>,
    excluded: Vec<Excluded>,
}

fn layout(region: &Region) -> Result<Layout> {
    let outer = region.domain.outer_radius;
    let holes: Vec<(usize, Complex64, f64)> = region
        .active_holes()
        .map(|(j, h)| (j, h.center, h.r.to_f64()))
        .collect();
    for &(j, _, r) in &holes {
        if r < 1e-150 {
            return Err(BergmanError::InvalidArgument(format!(
                "quad2d cannot resolve hole {j}: radius underflows"
            )));
        }
    }
    let mut cells = Vec::new();
    let mut excluded = Vec::new();
    for &(j, c, r) in &holes {
        let cabs = c.norm();
        let mut big = 0.9 * (outer - cabs);
        if cabs > 0.0 {
            big = big.min(0.9 * cabs);
        }
        for &(k, ck, rk) in &holes {
            if k != j {
                let d = (c - ck).norm();
                big = big.min(0.45 * d).min(0.9 * (d - rk));
            }
        }
        if cabs > 0.0 && big > 1.05 * r {
            cells.push(Cell {
                hole: j,
                center: c,
                log_inner: r.ln(),
                log_outer: big.ln(),
            });
            excluded.push(Excluded { center: c, radius: big });
        } else {
            excluded.push(Excluded { center: c, radius: r });
        }
    }
    Ok(Layout {
        outer,
        cells,
        excluded,
    })
}

fn integrand(f: &BasisElement, g: &BasisElement, p: &EvalPoint) -> Complex64 {
    f.value(p).mul(g.value(p).conj()).to_complex()
}

fn cell_integral(f: &BasisElement, g: &BasisElement, cell: &Cell, abs_tol: f64) -> Result<Complex64> {
    let angular = |u: f64| -> Complex64 {
        // trapezoid in φ with doubling
        let mut n = 32usize;
        let eval = |i: usize, n: usize| {
            let phi = 2.0 * PI * i as f64 / n as f64;
            let p = EvalPoint::near_hole(cell.center, cell.hole, u, Complex64::from_polar(1.0, phi));
            integrand(f, g, &p)
        };
        let mut sum: Complex64 = (0..n).map(|i| eval(i, n)).sum();
        let mut abs: f64 = 0.0;
        let mut prev = sum * (2.0 * PI / n as f64);
        loop {
            let odd: Vec<Complex64> = (1..2 * n).step_by(2).map(|i| eval(i, 2 * n)).collect();
            abs += odd.iter().map(|v| v.norm()).sum::<f64>();
            sum += odd.iter().sum::<Complex64>();
            n *= 2;
            let cur = sum * (2.0 * PI / n as f64);
            if (cur - prev).norm() <= 1e-14 * (abs * 2.0 * PI / n as f64).max(cur.norm())
                || n >= 8192
            {
                return cur * (2.0 * u).exp();
            }
            prev = cur;
        }
    };
    let r = integrate_adaptive(angular, cell.log_inner, cell.log_outer, REL_TOL, abs_tol, MAX_PANELS);
    if !r.converged {
        return Err(BergmanError::NoConvergence(format!(
            "quad2d annular cell around hole {}",
            cell.hole
        )));
    }
    Ok(r.value)
}

/// Allowed radial intervals `[0, outer] \ ⋃ discs` along the ray at angle θ.
fn ray_intervals(layout: &Layout, theta: f64) -> Vec<(f64, f64)> {
    let dir = Complex64::from_polar(1.0, theta);
    let mut cuts: Vec<(f64, f64)> = Vec::new();
    for e in &layout.excluded {
        let p = (e.center.conj() * dir).re;
        let q = e.center.norm_sqr() - e.radius * e.radius;
        let disc = p * p - q;
        if disc <= 0.0 {
            continue;
        }
        let sq = disc.sqrt();
        let hi = p + sq;
        if hi <= 0.0 {
            continue;
        }
        // stable smaller root
        let lo = if q <= 0.0 { 0.0 } else { q / hi };
        cuts.push((lo.max(0.0), hi.min(layout.outer)));
    }
    cuts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out = Vec::new();
    let mut start = 0.0;
    for (lo, hi) in cuts {
        if lo > start {
            out.push((start, lo));
        }
        start = start.max(hi);
    }
    if start < layout.outer {
        out.push((start, layout.outer));
    }
    out
}

fn remainder_integral(f: &BasisElement, g: &BasisElement, layout: &Layout, abs_tol: f64) -> Result<Complex64> {
    let mut breaks = vec![0.0, 2.0 * PI];
    for e in &layout.excluded {
        let cabs = e.center.norm();
        if cabs > e.radius {
            let half = (e.radius / cabs).asin();
            let base = e.center.arg();
            for t in [base - half, base + half] {
                breaks.push(t.rem_euclid(2.0 * PI));
            }
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let radial = |theta: f64| -> Complex64 {
        let dir = Complex64::from_polar(1.0, theta);
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in ray_intervals(layout, theta) {
            let r = integrate_adaptive(
                |rho| integrand(f, g, &EvalPoint::plain(dir * rho)) * rho,
                a,
                b,
                1e-13,
                1e-300,
                MAX_PANELS,
            );
            acc += r.value;
        }
        acc
    };

    let mut total = Complex64::new(0.0, 0.0);
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= 0.0 {
            continue;
        }
        let r = integrate_adaptive(
            |x| {
                let (s, ds) = smoothstep(x);
                radial(a + (b - a) * s) * ((b - a) * ds)
            },
            0.0,
            1.0,
            REL_TOL,
            abs_tol.max(1e-300),
            MAX_PANELS,
        );
        if !r.converged {
            return Err(BergmanError::NoConvergence(
                "quad2d angular sweep did not converge".into(),
            ));
        }
        total += r.value;
    }
    Ok(total)
}

/// `⟨f, g⟩_Ω` by direct area quadrature. Off-diagonal pieces are accepted
/// once their error is below `1e-13·‖f‖‖g‖` on that piece, since cancellation
/// can make a relative target unreachable.
pub fn inner_product(region: &Region, f: &BasisElement, g: &BasisElement) -> Result<Complex64> {
    region.check_elements(&[*f, *g])?;
    let layout = layout(region)?;
    let tol = |nf: Complex64, ng: Complex64| 1e-13 * (nf.re.abs() * ng.re.abs()).sqrt();
    let same = f == g;
    let mut total = if same {
        remainder_integral(f, g, &layout, 0.0)?
    } else {
        let t = tol(remainder_integral(f, f, &layout, 0.0)?, remainder_integral(g, g, &layout, 0.0)?);
        remainder_integral(f, g, &layout, t)?
    };
    for cell in &layout.cells {
        total += if same {
            cell_integral(f, g, cell, 0.0)?
        } else {
            let t = tol(cell_integral(f, f, cell, 0.0)?, cell_integral(g, g, cell, 0.0)?);
            cell_integral(f, g, cell, t)?
        };
    }
    Ok(total)
}
