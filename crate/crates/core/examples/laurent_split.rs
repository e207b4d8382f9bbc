//! Splits a holomorphic sample into per-hole principal parts and runs the
//! comparison estimates on a domain with very small holes.
use bergman::laurent_split::{handcrafted_domain, inequality_suite, partial_sum_approximation, split, SampleSpace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bergman::Result<()> {
    let space = SampleSpace::new(handcrafted_domain(3), 6, 3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = space.random_sample(&mut rng, 12);
    let s = split(&space, &f, space.holes())?;
    println!("split residual {:.3e}", s.residual);
    for (j, part) in s.parts.iter().enumerate() {
        println!("  part {j}: max coefficient {:.4e}", part.max_abs());
    }
    let rep = inequality_suite(&space, &f)?;
    for e in &rep.entries {
        println!("  {:?} step {}: lhs {:.6e} rhs {:.6e}", e.kind, e.step, e.lhs, e.rhs);
    }
    println!("minimum slack {:.3e}", rep.min_slack());
    for n in 0..=space.holes() {
        let a = partial_sum_approximation(&space, &f, n)?;
        println!("  n = {n}: error² {:.4e} bound {:.4e}", a.error_sq, a.tail_bound);
    }
    Ok(())
}
