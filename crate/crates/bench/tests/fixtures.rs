use nctheta::{theta, Form, SdpOptions};
use nctheta_bench::{cycle_instance, random_instance};

#[test]
fn fixtures_are_deterministic() {
    let (g1, w1) = random_instance(3, 7).unwrap();
    let (g2, w2) = random_instance(3, 7).unwrap();
    assert_eq!(w1.matrix(), w2.matrix());
    assert_eq!(g1.space().dim(), g2.space().dim());
}

#[test]
fn pentagon_fixture_solves() {
    let (g, w) = cycle_instance(5).unwrap();
    let v = theta(&g, &w, Form::MinY, &SdpOptions::default()).unwrap().value;
    assert!((v - 5f64.sqrt()).abs() < 1e-6);
}
