//! The weighted theta number `θ̃(S, W)` and the programs built around it.
//!
//! Main program: `min λ` s.t. `Y ∈ S ⊗ L(H_B)`, `Tr_A Y ⪯ λ I`,
//! `Y ⪰ |r_W><r_W|`, with `|r_W> = (√W ⊗ I)|Φ>`.

pub mod body;
pub mod classical;
pub mod compatible;
mod forms;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::sdp::{SdpOptions, SolveDiagnostics};
use crate::subspace::{NcGraph, OperatorSubspace};

pub use body::{
    antiblocker_support, holder_dual_value, is_s_full_projector, s_full_residual, theta_body_membership, theta_commutant_min, theta_psi_support,
    CommutantMin, Membership, Support,
};
pub use classical::{classical_theta, fp_membership_classical, maximal_cliques, stable_set_support, FpMembership};
pub use compatible::{check_compatible, saturating_pair, CompatibleInput, CompatibleReport};

/// A Hermitian PSD weight operator.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix(CMat);

impl WeightMatrix {
    /// Validate Hermitian and PSD (smallest eigenvalue `≥ -1e-9 (1 + ||W||)`).
    pub fn new(w: CMat) -> Result<Self> {
        linalg::ensure_psd(&w)?;
        Ok(Self(linalg::hermitian_part(&w)))
    }

    pub fn identity(n: usize) -> Self {
        Self(linalg::identity(n))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn sqrt(&self) -> CMat {
        linalg::spectral_map(&self.0, |x| x.max(0.0).sqrt())
    }

    /// `|v_W> = (W ⊗ I)|Φ>`.
    pub fn v(&self) -> CVec {
        linalg::vectorize(&self.0).expect("square")
    }

    /// `|r_W> = (√W ⊗ I)|Φ>`.
    pub fn r(&self) -> CVec {
        linalg::vectorize(&self.sqrt()).expect("square")
    }
}

/// The equivalent programs for `θ̃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Form {
    /// `Tr_A Y ⪯ λ I`, `Y ⪰ |r_W><r_W|`.
    MinY,
    /// `Tr_A Y = λ I`.
    MinYEq,
    /// `Tr_A Y = λ Wᵀ`, `Y ⪰ |v_W><v_W|`.
    MinYWtEq,
    /// `Tr_A Y ⪯ λ Wᵀ`, `Y ⪰ |v_W><v_W|`.
    MinYWt,
    /// `Tr_A Y ⪯ λ W^{-T}`, `Y ⪰ |Φ><Φ|`; needs `W` nonsingular.
    MinYWinvT,
    /// `[[λ, <v_W|], [|v_W>, Z]] ⪰ 0`, `Z ∈ S ⊗ L(B)`, `Tr_A Z = Wᵀ`.
    Schur,
    /// `max <r_W|T + I⊗ρ|r_W>` over `T ∈ S^⊥ ⊗ L(B)`, `T + I⊗ρ ⪰ 0`, `ρ` a state.
    MaxT,
    /// `max ||(√W⊗I)(T + I⊗I)(√W⊗I)||` over `T ∈ S^⊥ ⊗ L(B)`, `T + I⊗I ⪰ 0`.
    MaxOpnorm,
    /// `max ||√(T + I⊗I)(W⊗I)√(T + I⊗I)||` over the same set.
    MaxOpnorm2,
    /// `max n||(√W⊗I) Y (√W⊗I)||` over `Y ∈ (S^⊥ + CI) ⊗ L(B)`, `Y ⪰ 0`, `Tr_A Y = I`.
    MaxY,
    /// `max n<r_W|Y|r_W>` over `Y ∈ (S^⊥ + CI) ⊗ L(B)`, `Y ⪰ 0`, `Tr Y = 1`.
    MaxYV2,
}

impl Form {
    pub const ALL: [Form; 11] = [
        Form::MinY,
        Form::MinYEq,
        Form::MinYWtEq,
        Form::MinYWt,
        Form::MinYWinvT,
        Form::Schur,
        Form::MaxT,
        Form::MaxOpnorm,
        Form::MaxOpnorm2,
        Form::MaxY,
        Form::MaxYV2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Form::MinY => "min_Y",
            Form::MinYEq => "min_Y_eq",
            Form::MinYWtEq => "min_YWT_eq",
            Form::MinYWt => "min_YWT",
            Form::MinYWinvT => "min_YWinvT",
            Form::Schur => "schur",
            Form::MaxT => "max_T",
            Form::MaxOpnorm => "max_opnorm",
            Form::MaxOpnorm2 => "max_opnorm2",
            Form::MaxY => "max_Y",
            Form::MaxYV2 => "max_Y_v2",
        }
    }

    /// Whether the form needs `W` to be invertible.
    pub fn needs_invertible(self) -> bool {
        matches!(self, Form::MinYWinvT)
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Form {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Form::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown form '{s}'")))
    }
}

/// Value of one program together with its certificates.
#[derive(Debug, Clone)]
pub struct ThetaResult {
    pub value: f64,
    pub form: Form,
    /// The program's main matrix variable: `Y` for the min forms and the
    /// `Y`-type forms, `Z` for the Schur form.
    pub primal: Option<CMat>,
    /// `T` of the dual pair `(T, ρ)`, when the form yields one.
    pub dual_t: Option<CMat>,
    pub dual_rho: Option<CMat>,
    /// Relative duality gap reported by the solver.
    pub gap: f64,
    /// For the operator-norm forms: feasibility violation of the
    /// reconstructed point. Zero otherwise.
    pub reconstruction_residual: f64,
    pub diagnostics: Vec<SolveDiagnostics>,
}

/// Hermitian bases shared by the programs.
pub(crate) struct Bases {
    pub n: usize,
    /// `S`.
    pub s: Vec<CMat>,
    /// `S / CI`.
    pub s_quot: Vec<CMat>,
    /// `S^⊥`.
    pub perp: Vec<CMat>,
    /// `L(C^n)`.
    pub full: Vec<CMat>,
    /// Trace-free part of `L(C^n)`.
    pub traceless: Vec<CMat>,
}

impl Bases {
    pub fn new(space: &OperatorSubspace) -> Result<Self> {
        let n = space.ambient_dim();
        let ci = OperatorSubspace::scalars(n);
        let quot = space.quotient(&ci)?;
        let s_quot = quot.hermitian_basis()?;
        let mut s = vec![linalg::identity(n).scale(1.0 / (n as f64).sqrt())];
        s.extend(s_quot.iter().cloned());
        let perp = space.perp().hermitian_basis()?;
        Ok(Self {
            n,
            s,
            s_quot,
            perp,
            full: linalg::hermitian_matrix_basis(n),
            traceless: linalg::traceless_hermitian_basis(n),
        })
    }
}

/// `{a ⊗ b}` for all pairs.
pub(crate) fn tensor_basis(a: &[CMat], b: &[CMat]) -> Vec<CMat> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(linalg::kron(x, y));
        }
    }
    out
}

fn check_inputs(g: &NcGraph, w: &WeightMatrix) -> Result<()> {
    if g.n() != w.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), found: w.n() });
    }
    Ok(())
}

/// `θ̃(S, W)` through the chosen program.
pub fn theta(g: &NcGraph, w: &WeightMatrix, form: Form, opts: &SdpOptions) -> Result<ThetaResult> {
    check_inputs(g, w)?;
    let bases = Bases::new(g.space())?;
    forms::solve_form(&bases, w, form, opts)
}

/// `θ̃(S, W)` through the dual `max_T` program.
pub fn theta_dual(g: &NcGraph, w: &WeightMatrix, opts: &SdpOptions) -> Result<ThetaResult> {
    theta(g, w, Form::MaxT, opts)
}

/// `θ̃(S, W)` through one of the maximization forms.
pub fn theta_max_form(g: &NcGraph, w: &WeightMatrix, form: Form, opts: &SdpOptions) -> Result<ThetaResult> {
    if !matches!(form, Form::MaxOpnorm | Form::MaxOpnorm2 | Form::MaxY | Form::MaxYV2 | Form::MaxT) {
        return Err(Error::PreconditionViolated(format!("{form} is not a maximization form")));
    }
    theta(g, w, form, opts)
}

/// Every form at once; forms needing an invertible `W` are skipped when it is singular.
pub fn theta_all_forms(g: &NcGraph, w: &WeightMatrix, opts: &SdpOptions) -> Result<Vec<ThetaResult>> {
    check_inputs(g, w)?;
    let bases = Bases::new(g.space())?;
    let invertible = linalg::min_eig(w.matrix()) > 1e-9 * (1.0 + linalg::frob(w.matrix()));
    let mut out = Vec::new();
    for form in Form::ALL {
        if form.needs_invertible() && !invertible {
            continue;
        }
        out.push(forms::solve_form(&bases, w, form, opts)?);
    }
    Ok(out)
}

/// `θ̃` with the default program and options.
pub fn theta_value(g: &NcGraph, w: &WeightMatrix) -> Result<f64> {
    Ok(theta(g, w, Form::MinY, &SdpOptions::default())?.value)
}
