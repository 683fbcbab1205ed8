//! Properties of exact and approximate central regions.

use std::time::Instant;

use flagdepth::depth::closed_form::disk_level_at_atom;
use flagdepth::depth::{self, AtomicOracle, Engine};
use flagdepth::geometry::{self, BBox, Point2, QPoint};
use flagdepth::measure::{Atom, Measure};
use flagdepth::rational::{int, ratio, to_f64, Rational};
use flagdepth::regions::{
    achieved_levels, central_region_atomic, central_region_mixture, check_nesting, extreme_points, RadialOptions,
    RegionShape,
};
use flagdepth::scenarios::{self, DiskWithAtomDepth};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_atomic(rng: &mut ChaCha8Rng, max_atoms: usize, span: i64) -> Measure {
    let n = rng.gen_range(1..=max_atoms);
    let mut atoms: Vec<Atom> = Vec::new();
    while atoms.len() < n {
        let p = QPoint::from_ints(rng.gen_range(-span..=span), rng.gen_range(-span..=span));
        if atoms.iter().all(|a| a.location != p) {
            atoms.push(Atom::exact(p, int(rng.gen_range(1..=5))));
        }
    }
    Measure::atomic(atoms).unwrap()
}

fn grid_levels(m: &Measure, bbox: &BBox) -> Vec<Rational> {
    let mut levels: Vec<Rational> = bbox
        .grid(61, 61)
        .iter()
        .map(|p| depth::depth_atomic_exact(m, &QPoint::from_f64(*p).unwrap()).unwrap())
        .collect();
    levels.sort();
    levels.dedup();
    levels
}

#[test]
fn achieved_levels_cover_brute_force_grid_levels() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for _ in 0..30 {
        let m = random_atomic(&mut rng, 7, 4);
        let levels = achieved_levels(&m).unwrap();
        for l in grid_levels(&m, &BBox::square(5.0).unwrap()) {
            assert!(levels.contains(&l), "grid level {l} missing from {levels:?}");
        }
    }
}

#[test]
fn membership_matches_depth_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..40 {
        let m = random_atomic(&mut rng, 8, 5);
        let levels = achieved_levels(&m).unwrap();
        for alpha in levels.iter().skip(1) {
            let r = central_region_atomic(&m, alpha).unwrap();
            if let RegionShape::Polygon { vertices } = &r.shape {
                assert!(geometry::is_strictly_convex(vertices));
            }
            for _ in 0..100 {
                let p = QPoint::new(ratio(rng.gen_range(-70..=70), 13), ratio(rng.gen_range(-70..=70), 11));
                let inside = r.contains_exact(&p).unwrap();
                let deep = depth::depth_atomic_exact(&m, &p).unwrap() >= *alpha;
                assert_eq!(inside, deep, "alpha {alpha} at {p:?}");
            }
        }
    }
}

#[test]
fn every_atom_lies_on_the_boundary_of_its_own_level() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..40 {
        let m = random_atomic(&mut rng, 8, 5);
        for a in m.atoms() {
            let alpha = depth::depth_atomic_exact(&m, &a.location).unwrap();
            let r = central_region_atomic(&m, &alpha).unwrap();
            let RegionShape::Polygon { vertices } = &r.shape else {
                panic!("atom region cannot be empty");
            };
            let on_boundary = match vertices.len() {
                1 | 2 => vertices.contains(&a.location) || vertices.len() == 2,
                n => (0..n).any(|i| {
                    geometry::orient(&vertices[i], &vertices[(i + 1) % n], &a.location) == std::cmp::Ordering::Equal
                }),
            };
            assert!(on_boundary, "atom {:?} not on bd D_{alpha}", a.location);
        }
    }
}

#[test]
fn nesting_holds_for_exact_regions() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..20 {
        let m = random_atomic(&mut rng, 8, 5);
        let levels = achieved_levels(&m).unwrap();
        let mut regions: Vec<_> = levels
            .iter()
            .skip(1)
            .map(|a| central_region_atomic(&m, a).unwrap())
            .collect();
        regions.push(central_region_atomic(&m, &(levels.last().unwrap() + int(1))).unwrap());
        assert!(check_nesting(&regions).is_none());
        assert!(regions.last().unwrap().is_empty());
    }
}

#[test]
fn approximate_path_agrees_with_exact_regions() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let opts = RadialOptions {
        directions: 128,
        ..RadialOptions::default()
    };
    let mut checked = 0;
    while checked < 8 {
        let m = random_atomic(&mut rng, 6, 4);
        let levels = achieved_levels(&m).unwrap();
        let oracle = AtomicOracle::new(&m).unwrap();
        for alpha in levels.iter().skip(1) {
            let exact = central_region_atomic(&m, alpha).unwrap();
            let poly = exact.polygon();
            if poly.len() < 3 {
                continue;
            }
            let deep = poly.iter().fold(Point2::ORIGIN, |s, p| s + *p) * (1.0 / poly.len() as f64);
            let approx =
                central_region_mixture(&oracle, to_f64(alpha), BBox::square(6.0).unwrap(), Some(deep), &opts).unwrap();
            let d = geometry::hausdorff_convex(&poly, &approx.polygon());
            assert!(d <= approx.tolerance() + 1e-9, "alpha {alpha}: {d}");
            checked += 1;
        }
    }
}

/// Polygonal hull of the analytic region at `beta`, against the traced one.
fn region_error(beta: f64, delta: f64) -> f64 {
    let m = scenarios::disk_with_atom(ratio(1, 10)).unwrap();
    let engine = Engine::new(&m);
    let r = central_region_mixture(
        &engine,
        beta,
        BBox::square(2.5).unwrap(),
        Some(Point2::ORIGIN),
        &RadialOptions::default(),
    )
    .unwrap();
    let analytic = scenarios::disk_with_atom_region(beta, delta, 20000);
    geometry::hausdorff_convex(&analytic, &r.polygon())
}

#[test]
fn disk_with_atom_regions_follow_the_three_cases() {
    let alpha = disk_level_at_atom();
    let start = Instant::now();
    for beta in [0.05, alpha + 0.05, alpha + 0.1 + 0.1] {
        let e = region_error(beta, 0.1);
        println!("beta {beta:.4}: Hausdorff {e:e}");
        assert!(e < 1e-4, "beta {beta}: {e}");
    }
    println!("three regions in {:?}", start.elapsed());
}

#[test]
fn closed_form_regions_show_the_atom_as_a_corner() {
    let alpha = disk_level_at_atom();
    let source = DiskWithAtomDepth { delta: 0.1 };
    let r = central_region_mixture(
        &source,
        alpha + 0.05,
        BBox::square(2.5).unwrap(),
        Some(Point2::ORIGIN),
        &RadialOptions::default(),
    )
    .unwrap();
    let corners = extreme_points(&r);
    assert_eq!(corners.len(), 1, "{corners:?}");
    assert!(
        corners[0].location.distance(Point2::new(1.0, 1.0)) < 1e-4,
        "{corners:?}"
    );
    let disk = central_region_mixture(
        &source,
        0.05,
        BBox::square(2.5).unwrap(),
        Some(Point2::ORIGIN),
        &RadialOptions::default(),
    )
    .unwrap();
    assert!(extreme_points(&disk).is_empty());
}
