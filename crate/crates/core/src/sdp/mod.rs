//! Semidefinite programs over products of Hermitian PSD cones.
//!
//! Standard form: `min Σ_j Tr(C_j X_j)` s.t. `Σ_j Tr(A_kj X_j) = b_k`,
//! `X_j ⪰ 0`. Every Hermitian block is realified before solving and the
//! solution mapped back.

mod ipm;
mod lmi;

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat};

pub use lmi::{LmiBuilder, LmiSolution, MatrixVar, Var};

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpOptions {
    /// Stopping tolerance on relative gap and relative infeasibilities.
    pub tol: f64,
    pub max_iter: usize,
    /// Diagonal regularization of the Schur complement, relative to its largest diagonal.
    pub regularization: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 200, regularization: 1e-12 }
    }
}

impl SdpOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpStatus {
    Optimal,
    /// Primal infeasible.
    Infeasible,
    /// Primal unbounded below (dual infeasible).
    Unbounded,
    MaxIterations,
}

/// One equality constraint `Σ_j Tr(A_j X_j) = rhs`; absent blocks are zero.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub terms: Vec<(usize, CMat)>,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub block_dims: Vec<usize>,
    pub objective: Vec<CMat>,
    pub constraints: Vec<Constraint>,
}

/// Scalar quality measures of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveDiagnostics {
    pub status: SdpStatus,
    pub iterations: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `max(|pobj - dobj|, <X,Z>) / (1 + |pobj| + |dobj|)`.
    pub rel_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    /// Smallest eigenvalue over all primal blocks.
    pub min_eig_x: f64,
    /// Smallest eigenvalue over all dual slack blocks.
    pub min_eig_z: f64,
}

impl SolveDiagnostics {
    /// Optimal, with gap, infeasibilities and PSD violations all within `tol`.
    pub fn is_clean(&self, tol: f64) -> bool {
        self.status == SdpStatus::Optimal
            && self.rel_gap <= tol
            && self.primal_infeasibility <= tol
            && self.dual_infeasibility <= tol
            && self.min_eig_x >= -tol
            && self.min_eig_z >= -tol
    }

    /// Largest of the gap, infeasibilities and PSD violations; infinite
    /// unless the status is optimal.
    pub fn health_residual(&self) -> f64 {
        if self.status != SdpStatus::Optimal {
            return f64::INFINITY;
        }
        self.rel_gap
            .max(self.primal_infeasibility)
            .max(self.dual_infeasibility)
            .max(-self.min_eig_x)
            .max(-self.min_eig_z)
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: Vec<CMat>,
    pub y: Vec<f64>,
    pub z: Vec<CMat>,
    pub diagnostics: SolveDiagnostics,
}

impl SdpSolution {
    pub fn status(&self) -> SdpStatus {
        self.diagnostics.status
    }
}

impl SdpProblem {
    pub fn new(block_dims: Vec<usize>) -> Self {
        let objective = block_dims.iter().map(|&d| linalg::zeros(d)).collect();
        Self { block_dims, objective, constraints: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        let nb = self.block_dims.len();
        if nb == 0 {
            return Err(Error::MalformedProblem("no cone blocks".into()));
        }
        if self.block_dims.contains(&0) {
            return Err(Error::MalformedProblem("empty cone block".into()));
        }
        if self.objective.len() != nb {
            return Err(Error::MalformedProblem("objective block count".into()));
        }
        let check = |m: &CMat, j: usize| -> Result<()> {
            if m.nrows() != self.block_dims[j] || m.ncols() != self.block_dims[j] {
                return Err(Error::MalformedProblem(format!("block {j} has the wrong size")));
            }
            if !linalg::is_hermitian(m, linalg::tol::HERM) {
                return Err(Error::MalformedProblem(format!("non-Hermitian data in block {j}")));
            }
            Ok(())
        };
        for (j, c) in self.objective.iter().enumerate() {
            check(c, j)?;
        }
        for (k, con) in self.constraints.iter().enumerate() {
            if !con.rhs.is_finite() {
                return Err(Error::MalformedProblem(format!("constraint {k} has a non-finite rhs")));
            }
            for (j, a) in &con.terms {
                if *j >= nb {
                    return Err(Error::MalformedProblem(format!("constraint {k} names block {j}")));
                }
                check(a, *j)?;
            }
        }
        let cap: usize = self.block_dims.iter().map(|d| d * d).sum();
        if self.constraints.len() > cap {
            return Err(Error::MalformedProblem(format!(
                "{} constraints exceed the cone dimension {cap}",
                self.constraints.len()
            )));
        }
        Ok(())
    }

    fn realify(&self) -> ipm::RealProblem {
        let to_sparse = |m: &CMat| {
            let r = linalg::realify_any(m);
            let mut entries = Vec::new();
            for i in 0..r.nrows() {
                for j in 0..r.ncols() {
                    let v = r[(i, j)];
                    if v != 0.0 {
                        entries.push((i, j, 0.5 * v));
                    }
                }
            }
            ipm::Sparse { entries }
        };
        ipm::RealProblem {
            dims: self.block_dims.iter().map(|d| 2 * d).collect(),
            c: self.objective.iter().map(|m| linalg::realify_any(&linalg::hermitian_part(m)) * 0.5).collect(),
            a: self
                .constraints
                .iter()
                .map(|con| con.terms.iter().map(|(j, a)| (*j, to_sparse(&linalg::hermitian_part(a)))).collect())
                .collect(),
            b: nalgebra::DVector::from_iterator(self.constraints.len(), self.constraints.iter().map(|c| c.rhs)),
        }
    }

    /// Text dump in a stable order with 17 significant digits.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let dims: Vec<String> = self.block_dims.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(s, "sdp v1");
        let _ = writeln!(s, "blocks {}", dims.join(" "));
        let _ = writeln!(s, "constraints {}", self.constraints.len());
        let entries = |s: &mut String, tag: &str, j: usize, m: &CMat| {
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    let z = m[(r, c)];
                    if z.re != 0.0 || z.im != 0.0 {
                        let _ = writeln!(s, "{tag} {j} {r} {c} {:.16e} {:.16e}", z.re, z.im);
                    }
                }
            }
        };
        for (j, m) in self.objective.iter().enumerate() {
            entries(&mut s, "C", j, m);
        }
        for (k, con) in self.constraints.iter().enumerate() {
            let _ = writeln!(s, "b {k} {:.16e}", con.rhs);
            for (j, a) in &con.terms {
                entries(&mut s, &format!("A {k}"), *j, a);
            }
        }
        s
    }
}

fn min_eig_real(m: &RMat) -> f64 {
    nalgebra::SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Solve a problem in standard form.
pub fn solve(p: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    p.validate()?;
    let real = p.realify();
    let sol = ipm::solve(&real, opts);
    // Realified blocks carry the complex data twice, so eigenvalues repeat.
    let min_eig_x = sol.x.iter().map(min_eig_real).fold(f64::INFINITY, f64::min);
    let min_eig_z = sol.z.iter().map(min_eig_real).fold(f64::INFINITY, f64::min);
    let diagnostics = SolveDiagnostics {
        status: sol.status,
        iterations: sol.iterations,
        primal_objective: sol.primal_objective,
        dual_objective: sol.dual_objective,
        rel_gap: sol.rel_gap,
        primal_infeasibility: sol.primal_infeasibility,
        dual_infeasibility: sol.dual_infeasibility,
        min_eig_x,
        min_eig_z,
    };
    Ok(SdpSolution {
        x: sol.x.iter().map(linalg::derealify).collect(),
        y: sol.y.iter().copied().collect(),
        // Z~ = realify(Z) / 2.
        z: sol.z.iter().map(|m| linalg::derealify(m).scale(2.0)).collect(),
        diagnostics,
    })
}

/// Minimize `Σ Tr((C_j + E_j) X_j)` over the feasible set of `p`, where
/// `extra` holds one Hermitian `E_j` per block.
pub fn solve_with_linear_objective_over_feasible_set(
    p: &SdpProblem,
    extra: &[CMat],
    opts: &SdpOptions,
) -> Result<SdpSolution> {
    if extra.len() != p.block_dims.len() {
        return Err(Error::MalformedProblem("extra objective block count".into()));
    }
    let mut q = p.clone();
    for (c, e) in q.objective.iter_mut().zip(extra) {
        if e.nrows() != c.nrows() {
            return Err(Error::MalformedProblem("extra objective block size".into()));
        }
        *c += e;
    }
    solve(&q, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, identity, unit};

    fn real_diag(v: &[f64]) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0))))
    }

    #[test]
    fn min_eigenvalue_program() {
        // min Tr(C X) s.t. Tr X = 1 gives λ_min(C).
        let cm = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let mut p = SdpProblem::new(vec![2]);
        p.objective[0] = cm;
        p.constraints.push(Constraint { terms: vec![(0, identity(2))], rhs: 1.0 });
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(s.status(), SdpStatus::Optimal);
        assert!((s.diagnostics.primal_objective - 1.0).abs() < 1e-7);
        assert!((s.y[0] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn lp_as_diagonal_blocks() {
        // min x1 + 2 x2 s.t. x1 + x2 = 1 -> 1
        let mut p = SdpProblem::new(vec![1, 1]);
        p.objective = vec![real_diag(&[1.0]), real_diag(&[2.0])];
        p.constraints.push(Constraint { terms: vec![(0, identity(1)), (1, identity(1))], rhs: 1.0 });
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert!(s.diagnostics.is_clean(1e-8), "{:?}", s.diagnostics);
        assert!((s.diagnostics.dual_objective - 1.0).abs() < 1e-7);
    }

    #[test]
    fn detects_infeasible() {
        let mut p = SdpProblem::new(vec![2]);
        p.constraints.push(Constraint { terms: vec![(0, identity(2))], rhs: -1.0 });
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(s.status(), SdpStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let mut p = SdpProblem::new(vec![2]);
        p.objective[0] = -unit(2, 1, 1);
        p.constraints.push(Constraint { terms: vec![(0, unit(2, 0, 0))], rhs: 1.0 });
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(s.status(), SdpStatus::Unbounded);
    }

    #[test]
    fn rejects_malformed() {
        let mut p = SdpProblem::new(vec![2]);
        p.constraints.push(Constraint { terms: vec![(0, unit(2, 0, 1))], rhs: 0.0 });
        assert!(matches!(solve(&p, &SdpOptions::default()), Err(Error::MalformedProblem(_))));
        let q = SdpProblem::new(vec![]);
        assert!(q.validate().is_err());
    }

    #[test]
    fn dump_is_stable() {
        let mut p = SdpProblem::new(vec![1]);
        p.objective[0] = real_diag(&[0.1]);
        p.constraints.push(Constraint { terms: vec![(0, identity(1))], rhs: 1.0 / 3.0 });
        let d = p.dump();
        assert_eq!(d, p.dump());
        assert!(d.contains("b 0 3.3333333333333331e-1"));
        assert!(d.contains("C 0 0 0 1.0000000000000001e-1 0.0000000000000000e0"));
    }
}
