use fracgeo::geometry::Lattice;
use fracgeo::solver::{
    branch_residual, half_period_defect, lattice_correction, resume_continuation, unduloid_continuation, BranchPoint, SOLVER_TOL,
};
use fracgeo::{FracOrder, QuadSpec};

fn branch(a: f64, steps: usize, q: &QuadSpec) -> Vec<BranchPoint> {
    let fo = FracOrder::new(2, 0.5).unwrap();
    let r = fracgeo::solver::bifurcation_radius(&fo, q).unwrap();
    resume_continuation(r, &[], a, steps, &fo, q, 8, &mut |_| Ok(())).unwrap()
}

#[test]
fn branch_invariants() {
    let q = QuadSpec::default();
    let fo = FracOrder::new(2, 0.5).unwrap();
    let plus = branch(0.03, 2, &q);
    let minus = branch(-0.03, 2, &q);
    for (p, m) in plus.iter().zip(&minus) {
        assert!(half_period_defect(p, m) < 1e-6, "a = {}", p.amplitude);
        assert!((p.lambda - m.lambda).abs() < 1e-8);
    }
    // not an artifact of the quadrature
    let fine = QuadSpec {
        rel_tol: 1e-9,
        abs_tol: 1e-12,
        ..QuadSpec::default()
    };
    for p in &plus[1..] {
        assert!(branch_residual(p, &fo, &fine).unwrap() < 2.0 * SOLVER_TOL);
    }
    // halving the step lands on the same branch
    let halved = branch(0.03, 4, &q);
    let (a, b) = (&plus[2], &halved[4]);
    assert!((a.lambda - b.lambda).abs() < 1e-5);
    for (x, y) in a.profile.coefficients().iter().zip(b.profile.coefficients()) {
        assert!((x - y).abs() < 1e-5);
    }
    // v_a = O(a) and lambda(a) -> 1
    let ratio = |p: &BranchPoint| p.v_norm() / p.amplitude.abs();
    assert!((ratio(&plus[1]) / ratio(&plus[2]) - 1.0).abs() < 0.05);
    assert!(plus[1].lambda - 1.0 < plus[2].lambda - 1.0);
    assert!(plus[1].lambda - 1.0 < 1e-3);
}

#[test]
fn continuation_rejects_large_targets() {
    let fo = FracOrder::new(2, 0.5).unwrap();
    let q = QuadSpec::default();
    assert!(unduloid_continuation(1.0, 4, &fo, &q, 16).is_err());
}

#[test]
fn lattice_corrections_decay() {
    let fo = FracOrder::new(2, 0.5).unwrap();
    let q = QuadSpec::precise();
    let l = Lattice::axis(2, 1.0).unwrap();
    let c8 = lattice_correction(&l, 8.0, &fo, &q, 4).unwrap();
    let c16 = lattice_correction(&l, 16.0, &fo, &q, 4).unwrap();
    let (m8, m16) = (c8.phi.mean(), c16.phi.mean());
    assert!(m8 < 0.0 && m16 < 0.0);
    let slope = (m16 / m8).ln() / 2f64.ln();
    assert!((slope + 2.5).abs() < 0.05 * 2.5, "{slope}");
    // (theta . p)^2 = (1 + cos 2t) / 2 in the direction of the axis
    let co = c16.phi.coefficients();
    assert!(co[1] != 0.0 && co[1].abs() > 10.0 * co[2].abs(), "{co:?}");
}
