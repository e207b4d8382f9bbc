//! Upper bounds for the Bergman distance from graph shortest paths on nested
//! meshes, for the disc and for a disc with a hole.
use bergman::distance::{disc_distance_from_origin, distance_upper};
use bergman::hilbert::{gram_matrix, standard_basis, Backend, KernelEvaluator, Region};
use bergman::{CircularDomain, HoleSpec};
use num_complex::Complex64;

fn evaluator(d: &CircularDomain, degree: u32, order: u32) -> bergman::Result<KernelEvaluator> {
    let region = Region::whole(d);
    let build = gram_matrix(&standard_basis(d, degree, order)?, &region, Backend::Spectral)?;
    Ok(KernelEvaluator::new(&build, &region))
}

fn main() -> bergman::Result<()> {
    let (w, z) = (Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0));
    let disc = evaluator(&CircularDomain::unit_disc(), 40, 0)?;
    println!("disc, exact {:.6}", disc_distance_from_origin(0.5));
    for level in 0..=3 {
        let r = distance_upper(&disc, w, z, level)?;
        println!("  level {level}: {:.6} ({} path points)", r.value, r.path.len());
    }
    let holed = CircularDomain::new(
        vec![HoleSpec::from_logs(Complex64::new(0.25, 0.0), -6.0, -5.0, -3.0)?],
        false,
    );
    let ke = evaluator(&holed, 12, 4)?;
    println!("disc minus a small disc on the segment");
    for level in 0..=2 {
        let r = distance_upper(&ke, w, z, level)?;
        println!("  level {level}: {:.6}", r.value);
    }
    Ok(())
}
