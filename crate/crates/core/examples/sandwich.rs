//! Kernel lower bounds on the ring circles against the upper majorant on the
//! circles between rings.
use bergman::zwonek::{sandwich_scan, ZwonekParams};

fn main() -> bergman::Result<()> {
    let p = ZwonekParams::paper(1000);
    let table = sandwich_scan(&p, 1.0, 200)?;
    println!("sup of majorant (log): {:.4}  bound {:.4}", table.m1_candidate_log, table.m1_bound_log);
    for row in table.rows.iter().filter(|r| r.kind == "x" && (r.index % 20 == 0 || r.index < 5)) {
        println!("  n = {:>4}  log lower bound {:.6}", row.index, row.value_log);
    }
    println!("lower bounds monotone: {}", table.lower_monotone);
    match table.n_star {
        Some(n) => println!("lower bounds exceed the majorant from ring {n}"),
        None => println!("no crossover within the scanned rings"),
    }
    Ok(())
}
