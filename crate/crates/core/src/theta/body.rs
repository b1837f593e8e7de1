//! The body `Θ♯(S) = {W ⪰ 0 : θ̃(S, W) ≤ 1}` and linear optimization over it.

use crate::cstar::complement;
use crate::error::{Error, Result};
use crate::linalg::{self, identity, kron, CMat, CVec};
use crate::sdp::{LmiBuilder, SdpOptions, SolveDiagnostics};
use crate::subspace::NcGraph;

use super::forms::corner;
use super::{tensor_basis, theta, Bases, Form, WeightMatrix};

/// Slack allowed on `θ̃ ≤ 1` when deciding membership.
pub const MEMBERSHIP_TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct Membership {
    pub member: bool,
    /// `1 - θ̃(S, W)`, or the smallest eigenvalue of `W` when that is negative.
    pub margin: f64,
    pub theta: Option<f64>,
    pub diagnostics: Vec<SolveDiagnostics>,
}

/// Whether `W ∈ Θ♯(S)`.
pub fn theta_body_membership(g: &NcGraph, w: &CMat, opts: &SdpOptions) -> Result<Membership> {
    linalg::ensure_dim(w, g.n())?;
    linalg::ensure_hermitian(w)?;
    let e = linalg::min_eig(w);
    if e < -linalg::tol::EIG * (1.0 + linalg::frob(w)) {
        return Ok(Membership { member: false, margin: e, theta: None, diagnostics: Vec::new() });
    }
    let r = theta(g, &WeightMatrix::new(w.clone())?, Form::MinY, opts)?;
    Ok(Membership {
        member: r.value <= 1.0 + MEMBERSHIP_TOL,
        margin: 1.0 - r.value,
        theta: Some(r.value),
        diagnostics: r.diagnostics,
    })
}

/// Optimal value of a linear program over a body, with its maximizer.
#[derive(Debug, Clone)]
pub struct Support {
    pub value: f64,
    pub maximizer: CMat,
    pub diagnostics: Vec<SolveDiagnostics>,
}

/// `max { Re Tr(X W) : W ∈ Θ♯(S) }`.
///
/// The body is written in corner form: `[[1, <v_W|], [|v_W>, Z]] ⪰ 0` with
/// `Z ∈ S ⊗ L(B)` and `Wᵀ = Tr_A Z`, so `Z` is the only variable.
pub fn antiblocker_support(g: &NcGraph, x: &CMat, opts: &SdpOptions) -> Result<Support> {
    let n = g.n();
    linalg::ensure_dim(x, n)?;
    linalg::ensure_hermitian(x)?;
    let bases = Bases::new(g.space())?;
    let mut lmi = LmiBuilder::new();
    let zv = lmi.add_matrix_var(tensor_basis(&bases.s, &bases.full), linalg::zeros(n * n));
    let blk = lmi.add_block(corner(1.0, &CVec::zeros(n * n), &linalg::zeros(n * n)));
    let w_of = |z: &CMat| linalg::trace_a(z, n).expect("bipartite").transpose();
    for (v, m) in zv.vars.iter().zip(&zv.basis) {
        let wm = w_of(m);
        lmi.add_term(blk, *v, corner(0.0, &linalg::vectorize(&wm)?, m));
        lmi.set_objective(*v, linalg::re_trace_product(x, &wm));
    }
    let sol = lmi.solve(opts)?;
    Ok(Support { value: sol.value, maximizer: w_of(&zv.eval(&sol.y)), diagnostics: vec![sol.diagnostics] })
}

/// `θ̃(S^⊥ + CI, X)` as `max { n Tr(W X) : θ̃(S, W) ≤ 1 }`.
pub fn holder_dual_value(g: &NcGraph, x: &CMat, opts: &SdpOptions) -> Result<Support> {
    let mut s = antiblocker_support(g, x, opts)?;
    s.value *= g.n() as f64;
    Ok(s)
}

/// `max { Re Tr(X Z) : Z ⪰ 0, θ̃(S^c, Ψ(Z)) ≤ 1 }`, which equals `θ̃(S, X)`
/// for an `S0`-graph.
pub fn theta_psi_support(g: &NcGraph, x: &CMat, opts: &SdpOptions) -> Result<Support> {
    let n = g.n();
    linalg::ensure_dim(x, n)?;
    linalg::ensure_hermitian(x)?;
    let s0 = g
        .s0()
        .ok_or_else(|| Error::PreconditionViolated("ψ-support needs an S0 algebra".into()))?
        .clone();
    let comp = complement(g)?;
    let cb = Bases::new(comp.space())?;
    let id = identity(n);
    let scale = 1.0 / n as f64;

    let mut lmi = LmiBuilder::new();
    let z = lmi.add_matrix_var(cb.full.clone(), linalg::zeros(n));
    let bz = lmi.add_block(linalg::zeros(n));
    lmi.add_mapped(bz, &z, |m| m.clone());
    let corner_blk = lmi.add_block(corner(1.0, &CVec::zeros(n * n), &linalg::zeros(n * n)));
    for (v, m) in z.vars.iter().zip(&z.basis) {
        let psi = s0.blockscale(m)?;
        let inner = kron(&id, &psi.transpose()).scale(scale);
        lmi.add_term(corner_blk, *v, corner(0.0, &linalg::vectorize(&psi)?, &inner));
    }
    let z2 = lmi.add_matrix_var(tensor_basis(&cb.s_quot, &cb.full), linalg::zeros(n * n));
    let zero = CVec::zeros(n * n);
    for (v, m) in z2.vars.iter().zip(&z2.basis) {
        lmi.add_term(corner_blk, *v, corner(0.0, &zero, m));
    }
    lmi.add_trace_objective(&z, x);
    let sol = lmi.solve(opts)?;
    Ok(Support { value: sol.value, maximizer: z.eval(&sol.y), diagnostics: vec![sol.diagnostics] })
}

/// `max(||P² - P||_F, max_k dist(P E_k P, S))` over the matrix units `E_k`.
pub fn s_full_residual(g: &NcGraph, p: &CMat) -> Result<f64> {
    let n = g.n();
    linalg::ensure_dim(p, n)?;
    linalg::ensure_hermitian(p)?;
    let mut worst = linalg::frob(&(p * p - p));
    for i in 0..n {
        for j in 0..n {
            let m = p * linalg::unit(n, i, j) * p;
            worst = worst.max(g.space().residual(&m));
        }
    }
    Ok(worst)
}

/// Whether `P` is a projector with `P L(H_A) P ⊆ S`.
pub fn is_s_full_projector(g: &NcGraph, p: &CMat, tol: f64) -> Result<bool> {
    Ok(s_full_residual(g, p)? <= tol)
}

#[derive(Debug, Clone)]
pub struct CommutantMin {
    pub value: f64,
    /// Minimizer `X* ∈ S0'` with `X* ⪰ W`.
    pub x: CMat,
    pub diagnostics: Vec<SolveDiagnostics>,
}

/// `min { θ̃(S, X) : X ⪰ W, X ∈ S0' }`, through the Schur form, where `X`
/// enters linearly.
pub fn theta_commutant_min(g: &NcGraph, w: &CMat, opts: &SdpOptions) -> Result<CommutantMin> {
    let n = g.n();
    linalg::ensure_psd(w)?;
    linalg::ensure_dim(w, n)?;
    let s0 = g
        .s0()
        .ok_or_else(|| Error::PreconditionViolated("commutant minimization needs an S0 algebra".into()))?;
    let bases = Bases::new(g.space())?;
    let com = s0.commutant().hermitian_basis()?;
    let id = identity(n);
    let scale = 1.0 / n as f64;

    let mut lmi = LmiBuilder::new();
    let lam = lmi.add_var();
    let xv = lmi.add_matrix_var(com, linalg::zeros(n));
    let bx = lmi.add_block(-w.clone());
    lmi.add_mapped(bx, &xv, |m| m.clone());
    let blk = lmi.add_block(linalg::zeros(n * n + 1));
    lmi.add_term(blk, lam, corner(1.0, &CVec::zeros(n * n), &linalg::zeros(n * n)));
    for (v, m) in xv.vars.iter().zip(&xv.basis) {
        let inner = kron(&id, &m.transpose()).scale(scale);
        lmi.add_term(blk, *v, corner(0.0, &linalg::vectorize(m)?, &inner));
    }
    let zv = lmi.add_matrix_var(tensor_basis(&bases.s_quot, &bases.full), linalg::zeros(n * n));
    let zero = CVec::zeros(n * n);
    for (v, m) in zv.vars.iter().zip(&zv.basis) {
        lmi.add_term(blk, *v, corner(0.0, &zero, m));
    }
    lmi.set_objective(lam, -1.0);
    let sol = lmi.solve(opts)?;
    Ok(CommutantMin { value: sol.y[lam.0], x: xv.eval(&sol.y), diagnostics: vec![sol.diagnostics] })
}
