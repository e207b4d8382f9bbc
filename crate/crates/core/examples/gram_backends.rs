//! Gram matrix of a two-hole domain computed by boundary integrals and by
//! direct area quadrature.
use bergman::hilbert::{gram_matrix, standard_basis, Backend, Region};
use bergman::{CircularDomain, HoleSpec};
use num_complex::Complex64;
use std::time::Instant;

fn main() -> bergman::Result<()> {
    let d = CircularDomain::new(
        vec![
            HoleSpec::from_logs(Complex64::new(0.4, 0.1), -4.0, -3.5, -3.0)?,
            HoleSpec::from_logs(Complex64::new(-0.3, -0.3), -5.0, -4.0, -3.2)?,
        ],
        false,
    );
    let region = Region::whole(&d);
    let basis = standard_basis(&d, 4, 2)?;
    let mut builds = Vec::new();
    for backend in [Backend::Spectral, Backend::Quad2d] {
        let t = Instant::now();
        let b = gram_matrix(&basis, &region, backend)?;
        println!("{backend:?}: dim {} retained {} in {:.2?}", basis.len(), b.retained.len(), t.elapsed());
        builds.push(b);
    }
    let n = basis.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (builds[0].gram.get(i, j), builds[1].gram.get(i, j));
            let scale = (builds[0].gram.get(i, i).re * builds[0].gram.get(j, j).re).sqrt();
            worst = worst.max((a - b).norm() / scale);
        }
    }
    println!("max normalized entry difference {worst:.3e}");
    Ok(())
}
