use flagdepth::depth::{AtomicOracle, DepthSource};
use flagdepth::geometry::{orient, BBox, Point2, QPoint};
use flagdepth::measure::{Atom, Measure};
use flagdepth::rational::int;
use flagdepth::reconstruct::{
    detect_atoms, jump_along_line, reconstruct_finite_atomic, CandidateStatus, DetectOptions, ExactOptions, Verdict,
};
use flagdepth::scenarios::DiskWithAtomDepth;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;

/// Integer atoms in [-20, 20]^2, no three collinear, weights 1..=5.
fn general_position(rng: &mut ChaCha8Rng, n: usize) -> Measure {
    let mut pts: Vec<QPoint> = Vec::new();
    while pts.len() < n {
        let p = QPoint::from_ints(rng.gen_range(-20..=20), rng.gen_range(-20..=20));
        let collinear = pts
            .iter()
            .enumerate()
            .any(|(i, a)| *a == p || pts[i + 1..].iter().any(|b| orient(a, b, &p) == Ordering::Equal));
        if !collinear {
            pts.push(p);
        }
    }
    Measure::atomic(
        pts.into_iter()
            .map(|p| Atom::exact(p, int(rng.gen_range(1..=5))))
            .collect(),
    )
    .unwrap()
}

#[test]
fn random_measures_round_trip_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bbox = BBox::new(-25.0, -25.0, 25.0, 25.0).unwrap();
    for case in 0..12 {
        let n = rng.gen_range(3..=8);
        let m = general_position(&mut rng, n);
        let oracle = AtomicOracle::new(&m).unwrap();
        let (r, report) = reconstruct_finite_atomic(&oracle, bbox, &ExactOptions::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "case {case}: {report:#?}");
        assert_eq!(r.atoms(), m.atoms(), "case {case}");
    }
}

#[test]
fn a_wrong_oracle_fails_verification() {
    // Depth of a triangle, except one extra unit near a point no vertex sees.
    struct Tampered<'a>(AtomicOracle<'a>);
    impl flagdepth::depth::ExactDepth for Tampered<'_> {
        fn depth_exact(&self, x: &QPoint) -> flagdepth::rational::Rational {
            let d = self.0.depth_exact(x);
            let p = x.approx();
            if (p.x - 3.3).abs() < 0.5 && (p.y - 2.1).abs() < 0.5 {
                d + int(1)
            } else {
                d
            }
        }
    }
    let m = Measure::atomic(vec![
        Atom::exact(QPoint::from_ints(0, 0), int(1)),
        Atom::exact(QPoint::from_ints(10, 0), int(1)),
        Atom::exact(QPoint::from_ints(0, 10), int(1)),
    ])
    .unwrap();
    let oracle = Tampered(AtomicOracle::new(&m).unwrap());
    let bbox = BBox::new(-25.0, -25.0, 25.0, 25.0).unwrap();
    if let Ok((_, report)) = reconstruct_finite_atomic(&oracle, bbox, &ExactOptions::default()) {
        assert_eq!(report.verdict, Verdict::Fail);
    }
}

#[test]
fn detection_finds_the_disk_atom() {
    let src = DiskWithAtomDepth { delta: 0.1 };
    let bbox = BBox::new(-2.5, -2.5, 2.5, 2.5).unwrap();
    let report = detect_atoms(&src, bbox, &DetectOptions::default()).unwrap();
    let found: Vec<_> = report.confident().collect();
    assert_eq!(found.len(), 1, "{report:#?}");
    assert!(found[0].location.distance(Point2::new(1.0, 1.0)) <= 1e-3);
    assert!((found[0].mass_estimate.unwrap() - 0.1).abs() <= 1e-3);
}

#[test]
fn jump_is_zero_away_from_atoms() {
    let src = DiskWithAtomDepth { delta: 0.1 };
    let j = jump_along_line(&src, Point2::new(-0.7, 0.4), Point2::ORIGIN, 1e-3, 1e-9).unwrap();
    assert!(j.stabilized && j.jump.abs() < 1e-6, "{j:?}");
    let _ = src.depth_value(Point2::ORIGIN);
    let _ = CandidateStatus::Confident;
}

#[test]
fn an_atom_seen_only_on_a_segment_is_missed() {
    // The level-2 region is the segment from (1, 15) to (4, 18), so dropping
    // the atom at (1, 15) changes the depth only on that segment.
    let full = Measure::atomic(vec![
        Atom::exact(QPoint::from_ints(-12, 13), int(1)),
        Atom::exact(QPoint::from_ints(1, 15), int(1)),
        Atom::exact(QPoint::from_ints(4, 18), int(2)),
        Atom::exact(QPoint::from_ints(5, 4), int(1)),
    ])
    .unwrap();
    let region = flagdepth::regions::central_region_atomic(&full, &int(2)).unwrap();
    match region.shape {
        flagdepth::regions::RegionShape::Polygon { vertices } => assert_eq!(vertices.len(), 2),
        other => panic!("unexpected shape {other:?}"),
    }
    let oracle = AtomicOracle::new(&full).unwrap();
    let bbox = BBox::square(25.0).unwrap();
    let (r, _) = reconstruct_finite_atomic(&oracle, bbox, &ExactOptions::default()).unwrap();
    assert!(r.atoms().iter().all(|a| a.location != QPoint::from_ints(1, 15)));
}
