//! Certifies the summability conditions of the standard parameter family and
//! prints the resulting lower bound on the comparison constant.
use bergman::zwonek::{spacing_constant, verify_conditions, ZwonekParams};

fn main() -> bergman::Result<()> {
    for n_max in [100, 1000, 10_000] {
        let p = ZwonekParams::paper(n_max);
        let rep = verify_conditions(&p)?;
        println!(
            "n_max {n_max:>6}: ok {} from ring {:?}  log ε = {:.4}  Σ n^a/log(1/r) ≤ {:.6e}",
            rep.ok,
            rep.condition1_from_index,
            rep.epsilon.ln(),
            rep.series4.total().to_f64(),
        );
    }
    let p = ZwonekParams::paper(10_000);
    let sc = spacing_constant(&p, p.n0..=p.n_max);
    println!(
        "spacing C = {:.4} certified {} analytic {} min margins ({:.3e}, {:.3e})",
        sc.value, sc.certified, sc.analytic, sc.min_lower_log_margin, sc.min_upper_log_margin
    );
    Ok(())
}
