//! Walks a ray from near the outer boundary to the origin through a small
//! three-ring construction and records kernel lower bounds and path length.
use bergman::distance::{completeness_probe, gap_angle, radial_path};
use bergman::hilbert::{gram_matrix, standard_basis, Backend, KernelEvaluator, Region};
use bergman::zwonek::{generate, ZwonekParams};

fn main() -> bergman::Result<()> {
    let params = ZwonekParams::tame_three_rings();
    let g = generate(&params, 100)?;
    println!("{} holes on {} rings", g.domain.holes.len(), g.rings.len());
    let region = Region::whole(&g.domain);
    let ke = KernelEvaluator::new(
        &gram_matrix(&standard_basis(&g.domain, 12, 2)?, &region, Backend::Spectral)?,
        &region,
    );
    let angle = gap_angle(&params);
    let rep = completeness_probe(&params, &ke, &radial_path(angle, 0.9), 20, 1.0)?;
    println!("ray angle {angle:.4}");
    for x in &rep.ring_crossings {
        println!("  ring crossing at |z| = {:.5}: lower {:.4e} basis {:.4e}", x.re.hypot(x.im), x.k_lower, x.k_basis);
    }
    let last = rep.rows.last().map(|r| r.cumulative_length).unwrap_or(0.0);
    println!("basis metric length to the origin {last:.5}");
    println!("all checks {}", rep.ok());
    rep.write_csv(std::io::stdout().lock())?;
    Ok(())
}
