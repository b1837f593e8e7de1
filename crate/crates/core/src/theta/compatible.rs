//! Optimal Schur-form certificates of a saturating pair `(V, W)`, i.e. one with
//! `θ̃(S, V) θ̃(S^⊥ + CI, W) = n Tr(V W)`, are tied together by
//! `λ|v_W> = n Z'|v_V>`, `λ'|v_V> = n Z|v_W>` and `|v_V><v_W| = n Z Z'`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::sdp::{SdpOptions, SolveDiagnostics};
use crate::subspace::NcGraph;

use super::{antiblocker_support, theta, Form, WeightMatrix};

/// A pair with its Schur-form optima: `Z` for `θ̃(S, V) = λ` and `Z'` for
/// `θ̃(S^⊥ + CI, W) = λ'`.
#[derive(Debug, Clone)]
pub struct CompatibleInput {
    pub v: CMat,
    pub w: CMat,
    pub lambda: f64,
    pub lambda_prime: f64,
    pub z: CMat,
    pub z_prime: CMat,
    pub diagnostics: Vec<SolveDiagnostics>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CompatibleReport {
    /// `|λλ' - n Tr(VW)| / (1 + λλ')`.
    pub saturation: f64,
    /// `||λ|v_W> - n Z'|v_V>||`.
    pub first: f64,
    /// `||λ'|v_V> - n Z|v_W>||`.
    pub second: f64,
    /// `||  |v_V><v_W| - n Z Z' ||_F`.
    pub product: f64,
    /// `1 + λ||v_W|| + λ'||v_V|| + ||v_V|| ||v_W||`, the natural size of the terms.
    pub scale: f64,
}

impl CompatibleReport {
    pub fn max_residual(&self) -> f64 {
        self.first.max(self.second).max(self.product)
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.max_residual() / self.scale
    }
}

/// Saturation tolerance for [`check_compatible`].
pub const SATURATION_TOL: f64 = 1e-6;

pub fn check_compatible(input: &CompatibleInput) -> Result<CompatibleReport> {
    let n = input.v.nrows();
    linalg::ensure_dim(&input.w, n)?;
    for m in [&input.z, &input.z_prime] {
        linalg::ensure_dim(m, n * n)?;
    }
    let nf = n as f64;
    let prod = input.lambda * input.lambda_prime;
    let saturation = (prod - nf * linalg::re_trace_product(&input.v, &input.w)).abs() / (1.0 + prod.abs());
    if saturation > SATURATION_TOL {
        return Err(Error::PreconditionViolated(format!("pair is not saturating (slack {saturation:.3e})")));
    }
    let vv = linalg::vectorize(&input.v)?;
    let vw = linalg::vectorize(&input.w)?;
    let first = (vw.scale(input.lambda) - (&input.z_prime * &vv).scale(nf)).norm();
    let second = (vv.scale(input.lambda_prime) - (&input.z * &vw).scale(nf)).norm();
    let product = linalg::frob(&(&vv * vw.adjoint() - (&input.z * &input.z_prime).scale(nf)));
    let scale = 1.0
        + input.lambda.abs() * vw.norm()
        + input.lambda_prime.abs() * vv.norm()
        + vv.norm() * vw.norm();
    Ok(CompatibleReport { saturation, first, second, product, scale })
}

/// Relative cutoff below which eigenvalues of an extracted maximizer are
/// treated as zero.
pub const MAXIMIZER_RANK_TOL: f64 = 1e-7;

/// Tolerance for the programs behind a pair: the certificates converge like
/// the square root of the gap, so they are solved tighter than the values.
pub const CERTIFICATE_TOL: f64 = 1e-10;

/// Build a saturating pair from `X`: `W = X` and `V` the maximizer of
/// `n Tr(V X)` over `θ̃(S, V) ≤ 1`; then solve both Schur programs.
///
/// Interior-point maximizers carry eigenvalues of the order of the gap where
/// the exact maximizer is singular; those are rounded to zero.
pub fn saturating_pair(g: &NcGraph, x: &CMat, opts: &SdpOptions) -> Result<CompatibleInput> {
    let tight = SdpOptions { tol: opts.tol.min(CERTIFICATE_TOL), ..*opts };
    let support = antiblocker_support(g, x, &tight)?;
    let v = linalg::hermitian_part(&support.maximizer);
    let top = linalg::max_eig(&v).max(0.0);
    let v = linalg::spectral_map(&v, |e| if e > MAXIMIZER_RANK_TOL * top { e } else { 0.0 });
    let vw = WeightMatrix::new(v.clone())?;
    let s = theta(g, &vw, Form::Schur, &tight)?;
    let comp = g.perp_plus_identity()?;
    let ww = WeightMatrix::new(x.clone())?;
    let sp = theta(&comp, &ww, Form::Schur, &tight)?;
    let mut diagnostics = support.diagnostics;
    diagnostics.extend(s.diagnostics.iter().copied());
    diagnostics.extend(sp.diagnostics.iter().copied());
    Ok(CompatibleInput {
        v,
        w: ww.into_matrix(),
        lambda: s.value,
        lambda_prime: sp.value,
        z: s.primal.expect("Schur form returns Z"),
        z_prime: sp.primal.expect("Schur form returns Z"),
        diagnostics,
    })
}
