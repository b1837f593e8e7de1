use crate::error::{Error, Result};
use crate::linalg::{self, c, identity, kron, CMat, CVec};
use crate::sdp::{LmiBuilder, LmiSolution, MatrixVar, SdpOptions};

use super::{tensor_basis, Bases, Form, ThetaResult, WeightMatrix};

pub(crate) fn solve_form(b: &Bases, w: &WeightMatrix, form: Form, opts: &SdpOptions) -> Result<ThetaResult> {
    // θ̃(S, 0) = 0; the `Wᵀ`-scaled forms lose their objective there.
    if w.matrix().iter().all(|z| *z == c(0.0, 0.0)) {
        return Ok(ThetaResult {
            value: 0.0,
            form,
            primal: None,
            dual_t: None,
            dual_rho: None,
            gap: 0.0,
            reconstruction_residual: 0.0,
            diagnostics: Vec::new(),
        });
    }
    match form {
        Form::MinY => min_y(b, w, opts),
        Form::MinYEq => min_y_eq(b, w, opts),
        Form::MinYWtEq => min_ywt_eq(b, w, opts),
        Form::MinYWt => min_ywt(b, w, opts),
        Form::MinYWinvT => min_ywinvt(b, w, opts),
        Form::Schur => schur(b, w, opts),
        Form::MaxT => max_t(b, w, opts),
        Form::MaxYV2 => max_y_v2(b, w, opts),
        Form::MaxOpnorm | Form::MaxOpnorm2 | Form::MaxY => opnorm(b, w, form, opts),
    }
}

fn outer(v: &CVec) -> CMat {
    v * v.adjoint()
}

fn tr_a(m: &CMat, n: usize) -> CMat {
    linalg::trace_a(m, n).expect("bipartite")
}

/// `[[s, <v|], [|v>, Z]]`.
pub(crate) fn corner(s: f64, v: &CVec, z: &CMat) -> CMat {
    let d = z.nrows();
    let mut m = CMat::zeros(d + 1, d + 1);
    m[(0, 0)] = c(s, 0.0);
    for i in 0..d {
        m[(i + 1, 0)] = v[i];
        m[(0, i + 1)] = v[i].conj();
    }
    m.view_mut((1, 1), (d, d)).copy_from(z);
    m
}

fn result(form: Form, value: f64, sol: &LmiSolution) -> ThetaResult {
    ThetaResult {
        value,
        form,
        primal: None,
        dual_t: None,
        dual_rho: None,
        gap: sol.diagnostics.rel_gap,
        reconstruction_residual: 0.0,
        diagnostics: vec![sol.diagnostics],
    }
}

fn y_var(lmi: &mut LmiBuilder, left: &[CMat], right: &[CMat], n: usize) -> MatrixVar {
    lmi.add_matrix_var(tensor_basis(left, right), linalg::zeros(n * n))
}

fn min_y(b: &Bases, w: &WeightMatrix, opts: &SdpOptions) -> Result<ThetaResult> {
    let n = b.n;
    let mut lmi = LmiBuilder::new();
    let lam = lmi.add_var();
    let y = y_var(&mut lmi, &b.s, &b.full, n);
    let b1 = lmi.add_block(-outer(&w.r()));
    lmi.add_mapped(b1, &y, |m| m.clone());
    let b2 = lmi.add_block(linalg::zeros(n));
    lmi.add_term(b2, lam, identity(n));
    lmi.add_mapped(b2, &y, |m| -tr_a(m, n));
    lmi.set_objective(lam, -1.0);
    let sol = lmi.solve(opts)?;
    let rho = sol.multipliers[1].clone();
    let t = &sol.multipliers[0] - kron(&identity(n), &rho);
    let mut res = result(Form::MinY, sol.y[lam.0], &sol);
    res.primal = Some(y.eval(&sol.y));
    res.dual_t = Some(t);
    res.dual_rho = Some(rho);
    Ok(res)
}

/// `Y = (λ/n) I ⊗ M + Σ c (S/CI ⊗ L(B))`, so that `Tr_A Y = λ M`.
fn equality_y(lmi: &mut LmiBuilder, b: &Bases, block: usize, m: &CMat) -> (crate::sdp::Var, MatrixVar) {
    let n = b.n;
    let lam = lmi.add_var();
    lmi.add_term(block, lam, kron(&identity(n), m).scale(1.0 / n as f64));
    let y = y_var(lmi, &b.s_quot, &b.full, n);
    lmi.add_mapped(block, &y, |x| x.clone());
    (lam, y)
}

fn eval_equality_y(lam: f64, m: &CMat, y: &MatrixVar, sol: &LmiSolution, n: usize) -> CMat {
    kron(&identity(n), m).scale(lam / n as f64) + y.eval(&sol.y)
}

fn min_y_eq(b: &Bases, w: &WeightMatrix, opts: &SdpOptions) -> Result<ThetaResult> {
    let n = b.n;
    let mut lmi = LmiBuilder::new();
    let b1 = lmi.add_block(-outer(&w.r()));
    let (lam, y) = equality_y(&mut lmi, b, b1, &identity(n));
    lmi.set_objective(lam, -1.0);
    let sol = lmi.solve(opts)?;
    let mut res = result(Form::MinYEq, sol.y[lam.0], &sol);
    res.primal = Some(eval_equality_y(sol.y[lam.0], &identity(n), &y, &sol, n));
    Ok(res)
}

fn min_ywt_eq(b: &Bases, w: &WeightMatrix, opts: &SdpOptions) -> Result<ThetaResult> {
    let n = b.n;
    let wt = w.matrix().transpose();
    let mut lmi = LmiBuilder::new();
    let b1 = lmi.add_block(-outer(&w.v()));
    let (lam, y) = equality_y(&mut lmi, b, b1, &wt);
    lmi.set_objective(lam, -1.0);
    let sol = lmi.solve(opts)?;
    let mut res = result(Form::MinYWtEq, sol.y[lam.0], &sol);
    res.primal = Some(eval_equality_y(sol.y[lam.0], &wt, &y, &sol, n));
    Ok(res)
}

/// `Y ⪰ |x><x|`, `λ M - Tr_A Y ⪰ 0`.
fn min_with_bound(b: &Bases, x: &CVec, m: &CMat, form: Form, opts: &SdpOptions) -> Result<ThetaResult> {
    let n = b.n;
    let mut lmi = LmiBuilder::new();
    let lam = lmi.add_var();
    let y = y_var(&mut lmi, &b.s, &b.full, n);
    let b1 = lmi.add_block(-outer(x));
    lmi.add_mapped(b1, &y, |v| v.clone());
    let b2 = lmi.add_block(linalg::zeros(n));
    lmi.add_term(b2, lam, m.clone());
    lmi.add_mapped(b2, &y, |v| -tr_a(v, n));
    lmi.set_objective(lam, -1.0);
    let sol = lmi.solve(opts)?;
    let mut res = result(form, sol.y[lam.0], &sol);
    res.primal = Some(y.eval(&sol.y));
    Ok(res)
}

fn min_ywt(b: &Bases, w: &WeightMatrix, opts: &SdpOptions) -> Result<ThetaResult> {
    min_with_bound(b, &w.v(), &w.matrix().transpose(), Form::MinYWt, opts)
}

fn min_ywinvt(b: &Bases, w: &WeightMatrix, opts: &SdpOptions) -> Result<ThetaResult> {
    let inv = linalg::inv_pd(w.matrix())
        .map_err(|_| Error::PreconditionViolated("min_YWinvT needs an invertible W".into()))?;
    let phi = linalg::max_ent_vector(b.n)?;
    min_with_bound(b, &phi, &inv.transpose(), Form::MinYWinvT, opts)
}

fn schur(b: &Bases, w: &WeightMatrix, opts: &SdpOptions) -> Result<ThetaResult> {
    let n = b.n;
    let wt = w.matrix().transpose();
    let z0 = kron(&identity(n), &wt).scale(1.0 / n as f64);
    let mut lmi = LmiBuilder::new();
    let lam = lmi.add_var();
    let blk = lmi.add_block(corner(0.0, &w.v(), &z0));
    lmi.add_term(blk, lam, corner(1.0, &CVec::zeros(n * n), &linalg::zeros(n * n)));
    let z = lmi.add_matrix_var(tensor_basis(&b.s_quot, &b.full), z0);
    let zero = CVec::zeros(n * n);
    for (v, m) in z.vars.iter().zip(&z.basis) {
        lmi.add_term(blk, *v, corner(0.0, &zero, m));
    }
    lmi.set_objective(lam, -1.0);
    let sol = lmi.solve(opts)?;
    let mut res = result(Form::Schur, sol.y[lam.0], &sol);
    res.primal = Some(z.eval(&sol.y));
    Ok(res)
}

fn max_t(b: &Bases, w: &WeightMatrix, opts: &SdpOptions) -> Result<ThetaResult> {
    let n = b.n;
    let id = identity(n);
    let r = w.r();
    let rr = outer(&r);
    let mut lmi = LmiBuilder::new();
    let t = lmi.add_matrix_var(tensor_basis(&b.perp, &b.full), linalg::zeros(n * n));
    let rho = lmi.add_matrix_var(b.traceless.clone(), id.scale(1.0 / n as f64));
    let b1 = lmi.add_block(linalg::zeros(n * n));
    lmi.add_mapped(b1, &t, |m| m.clone());
    lmi.add_mapped(b1, &rho, |m| kron(&id, m));
    let b2 = lmi.add_block(linalg::zeros(n));
    lmi.add_mapped(b2, &rho, |m| m.clone());
    lmi.add_trace_objective(&t, &rr);
    // <r|I⊗ρ|r> = Tr(Wᵀ ρ)
    lmi.add_trace_objective(&rho, &w.matrix().transpose());
    let sol = lmi.solve(opts)?;
    let mut res = result(Form::MaxT, sol.value, &sol);
    res.dual_t = Some(t.eval(&sol.y));
    res.dual_rho = Some(rho.eval(&sol.y));
    res.primal = Some(&sol.multipliers[0] + rr);
    Ok(res)
}

/// Solve `max n<r_W|Y|r_W>` over `Y ∈ (S^⊥ + CI) ⊗ L(B)`, `Y ⪰ 0`, `Tr Y = 1`.
fn max_y_v2_solve(b: &Bases, w: &WeightMatrix, opts: &SdpOptions) -> Result<(LmiSolution, CMat)> {
    let n = b.n;
    let mut basis = tensor_basis(&b.perp, &b.full);
    let scaled_id = identity(n).scale(1.0 / (n as f64).sqrt());
    basis.extend(tensor_basis(&[scaled_id], &b.traceless));
    let offset = identity(n * n).scale(1.0 / (n * n) as f64);
    let mut lmi = LmiBuilder::new();
    let y = lmi.add_matrix_var(basis, offset);
    let blk = lmi.add_block(linalg::zeros(n * n));
    lmi.add_mapped(blk, &y, |m| m.clone());
    lmi.add_trace_objective(&y, &outer(&w.r()).scale(n as f64));
    let sol = lmi.solve(opts)?;
    let ym = y.eval(&sol.y);
    Ok((sol, ym))
}

fn max_y_v2(b: &Bases, w: &WeightMatrix, opts: &SdpOptions) -> Result<ThetaResult> {
    let (sol, ym) = max_y_v2_solve(b, w, opts)?;
    let n = b.n;
    let rho = tr_a(&ym, n);
    let t = ym.scale(n as f64) - kron(&identity(n), &rho);
    let mut res = result(Form::MaxYV2, sol.value, &sol);
    res.primal = Some(ym);
    res.dual_t = Some(t);
    res.dual_rho = Some(rho);
    Ok(res)
}

/// Operator-norm forms. The norm maximization is lifted through
/// `ψ = (I ⊗ √ρ)|Φ>` to the `max_Y_v2` program; from its optimum
/// `T' = nY - I⊗ρ` we rebuild `T = (I ⊗ ρ^{-1/2}) T' (I ⊗ ρ^{-1/2})`,
/// a feasible point of the original program, and evaluate the stated
/// objective there.
fn opnorm(b: &Bases, w: &WeightMatrix, form: Form, opts: &SdpOptions) -> Result<ThetaResult> {
    let n = b.n;
    let id = identity(n);
    let (sol, ym) = max_y_v2_solve(b, w, opts)?;
    let rho = tr_a(&ym, n);
    let tprime = ym.scale(n as f64) - kron(&id, &rho);
    // Tr ρ = 1, so the pseudo-inverse cutoff is absolute.
    let inv_sqrt = linalg::spectral_map(&rho, |x| if x > linalg::tol::PINV { 1.0 / x.sqrt() } else { 0.0 });
    let lift = kron(&id, &inv_sqrt);
    let t = linalg::hermitian_part(&(&lift * &tprime * &lift));
    let tpi = &t + identity(n * n);

    // feasibility of the rebuilt T
    let mut leak = 0.0;
    for m in tensor_basis(&b.s, &b.full) {
        leak += linalg::hs_inner(&m, &t).norm_sqr();
    }
    let psd_violation = (-linalg::min_eig(&tpi)).max(0.0);
    let residual = leak.sqrt().max(psd_violation);

    let sw = kron(&w.sqrt(), &id);
    let value = match form {
        Form::MaxOpnorm => linalg::max_eig(&(&sw * &tpi * &sw)),
        Form::MaxOpnorm2 => {
            let root = linalg::spectral_map(&tpi, |x| x.max(0.0).sqrt());
            let wide = kron(w.matrix(), &id);
            linalg::max_eig(&(&root * wide * &root))
        }
        Form::MaxY => {
            let y = tpi.scale(1.0 / n as f64);
            (n as f64) * linalg::max_eig(&(&sw * &y * &sw))
        }
        _ => unreachable!(),
    };
    let mut res = result(form, value, &sol);
    res.primal = Some(if form == Form::MaxY { tpi.scale(1.0 / n as f64) } else { tpi });
    res.dual_t = Some(t);
    res.dual_rho = Some(rho);
    res.reconstruction_residual = residual;
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_layout() {
        let v = CVec::from_vec(vec![c(1.0, 2.0)]);
        let m = corner(3.0, &v, &identity(1));
        assert_eq!(m[(0, 0)], c(3.0, 0.0));
        assert_eq!(m[(1, 0)], c(1.0, 2.0));
        assert_eq!(m[(0, 1)], c(1.0, -2.0));
        assert!(linalg::is_hermitian(&m, 1e-15));
    }
}
