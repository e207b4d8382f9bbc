//! One-dimensional quadrature used by the 2-D oracle backend and by path
//! lengths.

use num_complex::Complex64;

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One G7/K15 panel: (Kronrod estimate, |Kronrod − Gauss|, Σ|w f|).
fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for i in 0..7 {
        let dx = h * XGK[i];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        k += (f1 + f2) * WGK[i];
        abs += (f1.norm() + f2.norm()) * WGK[i];
        if i % 2 == 1 {
            g += (f1 + f2) * WG[i / 2];
        }
    }
    (k * h, ((k - g) * h).norm(), abs * h.abs())
}

/// Outcome of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
}

/// Globally adaptive G7/K15 quadrature; stops when the summed error estimate
/// drops below `max(abs_tol, rel_tol·|∫|f||)`.
pub fn integrate_adaptive<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Integral {
    if a == b {
        return Integral {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            converged: true,
        };
    }
    let mut panels: Vec<(f64, f64, Complex64, f64, f64)> = Vec::new();
    let (v, e, s) = gk15(&mut f, a, b);
    panels.push((a, b, v, e, s));
    loop {
        let total: Complex64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        let scale: f64 = panels.iter().map(|p| p.4).sum();
        if err <= abs_tol.max(rel_tol * scale) || panels.len() >= max_panels {
            return Integral {
                value: total,
                error: err,
                converged: err <= abs_tol.max(rel_tol * scale),
            };
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (pa, pb, _, _, _) = panels.swap_remove(idx);
        let mid = 0.5 * (pa + pb);
        if mid <= pa.min(pb) || mid >= pa.max(pb) {
            // interval exhausted in floating point
            let total: Complex64 = panels.iter().map(|p| p.2).sum();
            return Integral {
                value: total,
                error: err,
                converged: false,
            };
        }
        let (v1, e1, s1) = gk15(&mut f, pa, mid);
        let (v2, e2, s2) = gk15(&mut f, mid, pb);
        panels.push((pa, mid, v1, e1, s1));
        panels.push((mid, pb, v2, e2, s2));
    }
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> (f64, bool) {
    let r = integrate_adaptive(
        |x| Complex64::new(f(x), 0.0),
        a,
        b,
        rel_tol,
        abs_tol,
        max_panels,
    );
    (r.value.re, r.converged)
}

/// Cubic smoothstep `3x² − 2x³` on [0, 1] and its derivative; maps an
/// interval onto itself with vanishing derivative at both ends, which turns
/// square-root endpoint behaviour into something smooth.
#[inline]
pub fn smoothstep(x: f64) -> (f64, f64) {
    (x * x * (3.0 - 2.0 * x), 6.0 * x * (1.0 - x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate_real(|x| x.powi(10), 0.0, 1.0, 1e-14, 0.0, 10);
        assert!((r.0 - 1.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn sqrt_endpoint_with_and_without_smoothing() {
        let plain = integrate_real(|x| x.sqrt(), 0.0, 1.0, 1e-12, 0.0, 2000);
        assert!((plain.0 - 2.0 / 3.0).abs() < 1e-11);
        let smooth = integrate_real(
            |u| {
                let (x, dx) = smoothstep(u);
                x.sqrt() * dx
            },
            0.0,
            1.0,
            1e-14,
            0.0,
            200,
        );
        assert!((smooth.0 - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn complex_oscillatory() {
        let r = integrate_adaptive(
            |t| Complex64::new(0.0, 3.0 * t).exp(),
            0.0,
            std::f64::consts::PI,
            1e-13,
            0.0,
            200,
        );
        let exact = (Complex64::new(0.0, 3.0 * std::f64::consts::PI).exp() - 1.0)
            / Complex64::new(0.0, 3.0);
        assert!((r.value - exact).norm() < 1e-13);
        assert!(r.converged);
    }
}
