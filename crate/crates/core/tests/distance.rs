use std::f64::consts::PI;

use bergman::distance::{
    completeness_probe, disc_distance_from_origin, distance_upper, gap_angle, mesh_nodes, metric, path_length,
    radial_path, BergmanGraph,
};
use bergman::hilbert::{gram_matrix, standard_basis, Backend, BasisElement, KernelEvaluator, Region};
use bergman::zwonek::{generate, ZwonekParams};
use bergman::{BergmanError, CircularDomain, HoleSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn disc(deg: u32) -> KernelEvaluator {
    let d = CircularDomain::unit_disc();
    let reg = Region::whole(&d);
    let basis: Vec<BasisElement> = (0..=deg).map(BasisElement::monomial).collect();
    KernelEvaluator::new(&gram_matrix(&basis, &reg, Backend::Spectral).unwrap(), &reg)
}

fn tame() -> (ZwonekParams, KernelEvaluator) {
    let params = ZwonekParams::tame_three_rings();
    let g = generate(&params, 100).unwrap();
    let reg = Region::whole(&g.domain);
    let basis = standard_basis(&g.domain, 12, 2).unwrap();
    let ke = KernelEvaluator::new(&gram_matrix(&basis, &reg, Backend::Spectral).unwrap(), &reg);
    (params, ke)
}

#[test]
fn disc_distance_refines_monotonically() {
    let ke = disc(40);
    let (w, z) = (Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0));
    let mut prev = f64::INFINITY;
    for level in 0..=3 {
        let r = distance_upper(&ke, w, z, level).unwrap();
        assert!(r.value <= prev + 1e-9);
        assert_eq!(r.refinement_level, level);
        assert_eq!(r.path.first(), Some(&w));
        assert_eq!(r.path.last(), Some(&z));
        prev = r.value;
    }
    assert!((prev - disc_distance_from_origin(0.5)).abs() < 1e-3);
    let back = distance_upper(&ke, z, w, 3).unwrap();
    assert!((back.value - prev).abs() < 1e-9);
    assert_eq!(distance_upper(&ke, z, z, 2).unwrap().value, 0.0);
}

#[test]
fn graph_triangle_inequality() {
    let ke = disc(20);
    let g = BergmanGraph::build(&ke, 1, &[]).unwrap();
    let nodes: Vec<Complex64> = mesh_nodes(ke.domain(), 1).into_iter().filter(|z| ke.contains(*z)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let [a, b, c] = [0; 3].map(|_| nodes[rng.gen_range(0..nodes.len())]);
        let ab = g.shortest(a, b).unwrap().value;
        let bc = g.shortest(b, c).unwrap().value;
        let ac = g.shortest(a, c).unwrap().value;
        assert!(ab + bc - ac >= -1e-6, "{a} {b} {c}");
    }
}

#[test]
fn annulus_metric_is_radial() {
    let h = HoleSpec::from_logs(Complex64::new(0.0, 0.0), -3.0, -2.5, -2.0).unwrap();
    let d = CircularDomain::new(vec![h], false);
    let reg = Region::whole(&d);
    let ke = KernelEvaluator::new(
        &gram_matrix(&standard_basis(&d, 12, 6).unwrap(), &reg, Backend::Spectral).unwrap(),
        &reg,
    );
    for rho in [0.2, 0.45, 0.7] {
        let base = metric(&ke, Complex64::new(rho, 0.0)).unwrap();
        assert!(base > 0.0);
        for k in 1..8 {
            let v = metric(&ke, Complex64::from_polar(rho, 0.7 * k as f64)).unwrap();
            assert!((v - base).abs() <= 1e-8 * base, "{rho} {k}: {v} vs {base}");
        }
    }
}

#[test]
fn outside_points_and_exits_are_errors() {
    let ke = disc(5);
    assert!(matches!(
        distance_upper(&ke, Complex64::new(0.0, 0.0), Complex64::new(1.2, 0.0), 0),
        Err(BergmanError::OutsideDomain { .. })
    ));
    let p = [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0), Complex64::new(0.5, 1.0)];
    assert!(matches!(path_length(&ke, &p), Err(BergmanError::PathExitsDomain { segment: 1 })));
}

#[test]
fn tame_probe_along_the_gap_ray() {
    let (params, ke) = tame();
    let rep = completeness_probe(&params, &ke, &radial_path(gap_angle(&params), 0.9), 20, 1.0).unwrap();
    assert!(rep.ok(), "{rep:?}");
    assert_eq!(rep.ring_crossings.len(), 3);
    assert_eq!(rep.gap_crossings.len(), 3);
    assert!(rep.ring_crossings.iter().all(|x| x.k_lower > 0.0 && x.log_majorant.is_none()));
    let mut csv = Vec::new();
    rep.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("t,re,im,K_lower,beta,cumulative_length\n"));
    assert_eq!(text.lines().count(), rep.rows.len() + 1);
}

#[test]
fn every_ray_to_the_origin_crosses_every_ring() {
    let (params, ke) = tame();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut tried = 0;
    while tried < 10 {
        let angle = rng.gen_range(0.0..2.0 * PI);
        match completeness_probe(&params, &ke, &radial_path(angle, 0.95), 3, 1.0) {
            Ok(rep) => {
                assert!(rep.every_ring_crossed);
                assert!(rep.length_nondecreasing);
                tried += 1;
            }
            // rays through a hole are not paths in the domain
            Err(BergmanError::PathExitsDomain { .. }) | Err(BergmanError::OutsideDomain { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
}
