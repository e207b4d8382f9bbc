//! Kernel of the unit disc from a truncated monomial basis, compared with
//! the closed form `1/(π(1−|z|²)²)`.
use bergman::closed_forms::disc_kernel;
use bergman::hilbert::{gram_matrix, Backend, BasisElement, KernelEvaluator, Region};
use bergman::CircularDomain;
use num_complex::Complex64;

fn main() -> bergman::Result<()> {
    let d = CircularDomain::unit_disc();
    let region = Region::whole(&d);
    for degree in [5u32, 20, 80] {
        let basis: Vec<BasisElement> = (0..=degree).map(BasisElement::monomial).collect();
        let ke = KernelEvaluator::new(&gram_matrix(&basis, &region, Backend::Spectral)?, &region);
        println!("degree {degree}");
        for x in [0.0, 0.3, 0.6, 0.9] {
            let z = Complex64::new(x, 0.0);
            let approx = ke.kernel_eval(z)?;
            let exact = disc_kernel(1.0, z)?;
            println!("  |z| = {x:.1}  K = {approx:.10e}  exact {exact:.10e}  ratio {:.6}", approx / exact);
        }
    }
    Ok(())
}
