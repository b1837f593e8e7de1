use nctheta::linalg::{self, c, identity, CMat};
use nctheta::random;
use nctheta::sdp::{solve, Constraint, LmiBuilder, SdpOptions, SdpProblem, SdpStatus};

fn scalar(x: f64) -> CMat {
    identity(1).scale(x)
}

#[test]
fn largest_eigenvalue_matches_eigensolver() {
    let mut rng = random::rng(11);
    for n in [2, 4, 6] {
        let h = random::hermitian(n, &mut rng);
        // min t s.t. t I - H ⪰ 0.
        let mut lmi = LmiBuilder::new();
        let t = lmi.add_var();
        let b = lmi.add_block(-h.clone());
        lmi.add_term(b, t, identity(n));
        lmi.set_objective(t, -1.0);
        let sol = lmi.solve(&SdpOptions::default()).unwrap();
        let top = nalgebra::SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::MIN, f64::max);
        assert!((sol.y[t.0] - top).abs() < 1e-7, "n = {n}");
        assert!(sol.diagnostics.is_clean(1e-8));
    }
}

#[test]
fn small_linear_program() {
    // max x + y s.t. x + 2y ≤ 4, 3x + y ≤ 6, x, y ≥ 0: optimum (8/5, 6/5).
    let mut lmi = LmiBuilder::new();
    let x = lmi.add_var();
    let y = lmi.add_var();
    for (cx, cy, rhs) in [(1.0, 2.0, 4.0), (3.0, 1.0, 6.0), (-1.0, 0.0, 0.0), (0.0, -1.0, 0.0)] {
        let b = lmi.add_block(scalar(rhs));
        lmi.add_term(b, x, scalar(-cx));
        lmi.add_term(b, y, scalar(-cy));
    }
    lmi.set_objective(x, 1.0);
    lmi.add_objective(y, 1.0);
    let sol = lmi.solve(&SdpOptions::default()).unwrap();
    assert!((sol.value - 2.8).abs() < 1e-7);
    assert!((sol.y[x.0] - 1.6).abs() < 1e-6 && (sol.y[y.0] - 1.2).abs() < 1e-6);
}

#[test]
fn infeasible_primal_is_reported() {
    // X ⪰ 0 with Tr X = -1.
    let mut p = SdpProblem::new(vec![2]);
    p.constraints.push(Constraint { terms: vec![(0, identity(2))], rhs: -1.0 });
    let s = solve(&p, &SdpOptions::default()).unwrap();
    assert_eq!(s.status(), SdpStatus::Infeasible);
}

#[test]
fn unbounded_primal_is_reported() {
    // min -X_11 s.t. X_22 = 1: X_11 can grow without bound.
    let mut p = SdpProblem::new(vec![2]);
    p.objective[0] = -linalg::unit(2, 0, 0);
    p.constraints.push(Constraint { terms: vec![(0, linalg::unit(2, 1, 1))], rhs: 1.0 });
    let s = solve(&p, &SdpOptions::default()).unwrap();
    assert_eq!(s.status(), SdpStatus::Unbounded);
}

#[test]
fn complex_data_is_respected() {
    // min Tr(C X), Tr X = 1 with a complex C has value λ_min(C).
    let cm = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 2.0), c(0.0, -2.0), c(1.0, 0.0)]);
    let mut p = SdpProblem::new(vec![2]);
    p.objective[0] = cm;
    p.constraints.push(Constraint { terms: vec![(0, identity(2))], rhs: 1.0 });
    let s = solve(&p, &SdpOptions::default()).unwrap();
    assert!((s.diagnostics.primal_objective + 1.0).abs() < 1e-7);
    let x = &s.x[0];
    assert!((linalg::trace(x).re - 1.0).abs() < 1e-7);
    assert!(linalg::min_eig(x) > -1e-8);
}

#[test]
fn malformed_problems_are_rejected() {
    let mut p = SdpProblem::new(vec![2]);
    p.constraints.push(Constraint { terms: vec![(0, identity(3))], rhs: 1.0 });
    assert!(solve(&p, &SdpOptions::default()).is_err());
    let mut q = SdpProblem::new(vec![2]);
    q.constraints.push(Constraint { terms: vec![(1, identity(2))], rhs: 1.0 });
    assert!(solve(&q, &SdpOptions::default()).is_err());
}

#[test]
fn dump_is_stable() {
    let mut p = SdpProblem::new(vec![1]);
    p.constraints.push(Constraint { terms: vec![(0, scalar(1.0 / 3.0))], rhs: 0.1 });
    let a = p.dump();
    assert_eq!(a, p.clone().dump());
    assert!(a.contains("3.3333333333333331e-1"));
}
