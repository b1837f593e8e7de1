use approx::assert_abs_diff_eq;
use nctheta::linalg::{self, c, identity, CMat};
use nctheta::theta::{self, classical_theta, theta_all_forms, Form};
use nctheta::verify::{cycle, two_by_two_graph};
use nctheta::{random, NcGraph, SdpOptions, WeightMatrix};

fn opts() -> SdpOptions {
    SdpOptions::default()
}

fn value(g: &NcGraph, w: &CMat, form: Form) -> f64 {
    theta::theta(g, &WeightMatrix::new(w.clone()).unwrap(), form, &opts()).unwrap().value
}

fn diag(d: &[f64]) -> CMat {
    CMat::from_fn(d.len(), d.len(), |i, j| if i == j { c(d[i], 0.0) } else { c(0.0, 0.0) })
}

#[test]
fn empty_graph_is_n_times_trace() {
    let mut rng = random::rng(1);
    for n in 2..=4 {
        let w = random::psd(n, &mut rng).scale(3.0);
        let expect = n as f64 * linalg::trace(&w).re;
        assert_abs_diff_eq!(value(&NcGraph::scalars(n), &w, Form::MinY), expect, epsilon = 1e-6 * expect);
    }
}

#[test]
fn full_graph_is_operator_norm() {
    let mut rng = random::rng(2);
    for n in 2..=4 {
        let w = random::psd(n, &mut rng);
        let eigs = nalgebra::SymmetricEigen::new(w.clone()).eigenvalues;
        let top = eigs.iter().copied().fold(f64::MIN, f64::max);
        assert_abs_diff_eq!(value(&NcGraph::full(n), &w, Form::MinY), top, epsilon = 1e-6);
    }
}

#[test]
fn identity_on_scalars_via_max_y() {
    assert_abs_diff_eq!(value(&NcGraph::scalars(2), &identity(2), Form::MaxY), 4.0, epsilon = 1e-6);
}

#[test]
fn zero_weight_is_zero_in_every_form() {
    let g = random::nc_graph(3, 2, &mut random::rng(3)).unwrap();
    let all = theta_all_forms(&g, &WeightMatrix::new(linalg::zeros(3)).unwrap(), &opts()).unwrap();
    assert_eq!(all.len(), Form::ALL.len() - 1, "min_YWinvT needs an invertible weight");
    for r in all {
        assert!(r.value.abs() < 1e-7, "{}: {}", r.form, r.value);
    }
}

#[test]
fn pentagon_is_sqrt_five() {
    let g = NcGraph::from_classical_graph(&cycle(5)).unwrap();
    assert_abs_diff_eq!(value(&g, &identity(5), Form::MinY), 5f64.sqrt(), epsilon = 1e-6);
    assert_abs_diff_eq!(value(&g, &identity(5), Form::MaxT), 5f64.sqrt(), epsilon = 1e-6);
}

#[test]
fn odd_cycles_match_closed_form() {
    for n in [5usize, 7, 9] {
        let cos = (std::f64::consts::PI / n as f64).cos();
        let expect = n as f64 * cos / (1.0 + cos);
        let ct = classical_theta(&cycle(n), &vec![1.0; n], &opts()).unwrap();
        assert_abs_diff_eq!(ct.value, expect, epsilon = 1e-6);
    }
    let g = NcGraph::from_classical_graph(&cycle(7)).unwrap();
    let cos = (std::f64::consts::PI / 7.0).cos();
    assert_abs_diff_eq!(value(&g, &identity(7), Form::MinY), 7.0 * cos / (1.0 + cos), epsilon = 1e-6);
}

#[test]
fn complete_and_edgeless_classical_graphs() {
    let n = 4;
    let complete: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i != j).collect()).collect();
    assert_abs_diff_eq!(classical_theta(&complete, &[1.0; 4], &opts()).unwrap().value, 1.0, epsilon = 1e-7);
    let w = [0.3, 1.2, 0.5, 2.0];
    let edgeless = vec![vec![false; n]; n];
    assert_abs_diff_eq!(classical_theta(&edgeless, &w, &opts()).unwrap().value, 4.0, epsilon = 1e-6);
}

#[test]
fn weighted_classical_agrees_with_embedding() {
    let adj = cycle(5);
    let w = [0.5, 1.0, 2.0, 0.25, 1.5];
    let ct = classical_theta(&adj, &w, &opts()).unwrap().value;
    let g = NcGraph::from_classical_graph(&adj).unwrap();
    assert_abs_diff_eq!(value(&g, &diag(&w), Form::MinY), ct, epsilon = 1e-6);
}

#[test]
fn two_by_two_example_is_twice_the_largest_diagonal() {
    let g = two_by_two_graph().unwrap();
    assert_abs_diff_eq!(value(&g, &identity(2), Form::MinY), 2.0, epsilon = 1e-6);
    let b = c(0.1, -0.2);
    let w = CMat::from_row_slice(2, 2, &[c(0.7, 0.0), b, b.conj(), c(0.3, 0.0)]);
    assert_abs_diff_eq!(value(&g, &w, Form::MinY), 1.4, epsilon = 1e-6);
}

#[test]
fn two_by_two_body_boundary() {
    let g = two_by_two_graph().unwrap();
    let on = theta::theta_body_membership(&g, &diag(&[0.5, 0.5]), &opts()).unwrap();
    assert!(on.member && on.margin.abs() < 1e-6);
    let out = theta::theta_body_membership(&g, &diag(&[0.6, 0.1]), &opts()).unwrap();
    assert!(!out.member);
    let zero = theta::theta_body_membership(&g, &linalg::zeros(2), &opts()).unwrap();
    assert!(zero.member && (zero.margin - 1.0).abs() < 1e-9);
}

#[test]
fn supports_on_the_pentagon() {
    let g = NcGraph::from_classical_graph(&cycle(5)).unwrap();
    let s = theta::antiblocker_support(&g, &identity(5), &opts()).unwrap();
    assert_abs_diff_eq!(s.value, 5f64.sqrt(), epsilon = 1e-5);
    let p = theta::theta_psi_support(&g, &identity(5), &opts()).unwrap();
    assert_abs_diff_eq!(p.value, 5f64.sqrt(), epsilon = 1e-5);
}

#[test]
fn support_over_full_graph_is_trace() {
    let x = random::psd(3, &mut random::rng(4));
    let s = theta::antiblocker_support(&NcGraph::full(3), &x, &opts()).unwrap();
    assert_abs_diff_eq!(s.value, linalg::trace(&x).re, epsilon = 1e-6);
    let zero = theta::antiblocker_support(&NcGraph::full(3), &linalg::zeros(3), &opts()).unwrap();
    assert!(zero.value.abs() < 1e-7);
}

#[test]
fn commutant_minimum_on_full_graph() {
    let w = random::psd(3, &mut random::rng(5));
    let r = theta::theta_commutant_min(&NcGraph::full(3), &w, &opts()).unwrap();
    let top = nalgebra::SymmetricEigen::new(w).eigenvalues.iter().copied().fold(f64::MIN, f64::max);
    assert_abs_diff_eq!(r.value, top, epsilon = 1e-5);
}

#[test]
fn phase_projectors_are_s_full() {
    let g = two_by_two_graph().unwrap();
    let ph = c(0.6, 0.8);
    let p = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), ph.conj() * 0.5, ph * 0.5, c(0.5, 0.0)]);
    assert!(theta::is_s_full_projector(&g, &p, 1e-9).unwrap());
    assert!(theta::is_s_full_projector(&NcGraph::full(2), &identity(2), 1e-9).unwrap());
    let pent = NcGraph::from_classical_graph(&cycle(5)).unwrap();
    assert!(!theta::is_s_full_projector(&pent, &diag(&[1.0, 0.0, 1.0, 0.0, 0.0]), 1e-9).unwrap());
    assert!(theta::is_s_full_projector(&pent, &diag(&[1.0, 1.0, 0.0, 0.0, 0.0]), 1e-9).unwrap());
}

#[test]
fn clique_cover_membership() {
    let c4 = cycle(4);
    let half = theta::fp_membership_classical(&c4, &[0.5; 4], &opts()).unwrap();
    assert!(half.member);
    assert!(theta::fp_membership_classical(&c4, &[0.0; 4], &opts()).unwrap().member);
    let eps = 0.05;
    let over = theta::fp_membership_classical(&c4, &[1.0 + eps, 0.0, 1.0 + eps, 0.0], &opts()).unwrap();
    assert!(!over.member);
}
