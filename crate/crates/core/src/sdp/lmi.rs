//! Linear matrix inequalities in free real variables.
//!
//! `max c·y + c0` s.t. `F_j(y) = F_j0 + Σ_k y_k F_jk ⪰ 0`. This is the dual of
//! the standard form with `C_j = F_j0`, `A_kj = -F_jk`, `b = c`, so the
//! standard-form `X_j` are the multipliers of the blocks.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

use super::{solve, Constraint, SdpOptions, SdpProblem, SdpStatus, SolveDiagnostics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(pub usize);

/// A Hermitian matrix `offset + Σ_k y_k basis_k` in fresh variables.
#[derive(Debug, Clone)]
pub struct MatrixVar {
    pub vars: Vec<Var>,
    pub basis: Vec<CMat>,
    pub offset: CMat,
}

impl MatrixVar {
    pub fn eval(&self, y: &[f64]) -> CMat {
        let mut m = self.offset.clone();
        for (v, b) in self.vars.iter().zip(&self.basis) {
            if y[v.0] != 0.0 {
                m += b.scale(y[v.0]);
            }
        }
        m
    }
}

#[derive(Debug, Clone)]
struct Block {
    constant: CMat,
    terms: Vec<(usize, CMat)>,
}

#[derive(Debug, Clone, Default)]
pub struct LmiBuilder {
    nvars: usize,
    blocks: Vec<Block>,
    objective: Vec<f64>,
    offset: f64,
}

#[derive(Debug, Clone)]
pub struct LmiSolution {
    pub y: Vec<f64>,
    /// Objective value `c·y + c0` at the returned `y`.
    pub value: f64,
    /// `F_j(y)`.
    pub slacks: Vec<CMat>,
    /// Standard-form primal blocks, the multipliers of `F_j(y) ⪰ 0`.
    pub multipliers: Vec<CMat>,
    pub diagnostics: SolveDiagnostics,
}

impl LmiBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self) -> Var {
        self.nvars += 1;
        self.objective.push(0.0);
        Var(self.nvars - 1)
    }

    pub fn add_matrix_var(&mut self, basis: Vec<CMat>, offset: CMat) -> MatrixVar {
        let vars = (0..basis.len()).map(|_| self.add_var()).collect();
        MatrixVar { vars, basis, offset }
    }

    /// New block `F_j0 = constant`; returns its index.
    pub fn add_block(&mut self, constant: CMat) -> usize {
        self.blocks.push(Block { constant, terms: Vec::new() });
        self.blocks.len() - 1
    }

    pub fn add_term(&mut self, block: usize, var: Var, coeff: CMat) {
        self.blocks[block].terms.push((var.0, coeff));
    }

    pub fn add_constant(&mut self, block: usize, m: &CMat) {
        self.blocks[block].constant += m;
    }

    /// Add `map(M)` to a block, for a linear map applied to a matrix variable.
    pub fn add_mapped(&mut self, block: usize, mv: &MatrixVar, map: impl Fn(&CMat) -> CMat) {
        let c0 = map(&mv.offset);
        self.blocks[block].constant += c0;
        for (v, b) in mv.vars.iter().zip(&mv.basis) {
            let img = map(b);
            if linalg::frob(&img) > 0.0 {
                self.blocks[block].terms.push((v.0, img));
            }
        }
    }

    pub fn set_objective(&mut self, var: Var, coeff: f64) {
        self.objective[var.0] = coeff;
    }

    pub fn add_objective(&mut self, var: Var, coeff: f64) {
        self.objective[var.0] += coeff;
    }

    pub fn add_objective_offset(&mut self, c0: f64) {
        self.offset += c0;
    }

    /// Objective `Re Tr(W M)` for a matrix variable `M`.
    pub fn add_trace_objective(&mut self, mv: &MatrixVar, w: &CMat) {
        self.offset += linalg::re_trace_product(w, &mv.offset);
        for (v, b) in mv.vars.iter().zip(&mv.basis) {
            self.objective[v.0] += linalg::re_trace_product(w, b);
        }
    }

    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    pub fn to_problem(&self) -> Result<SdpProblem> {
        if self.blocks.is_empty() {
            return Err(Error::MalformedProblem("LMI without blocks".into()));
        }
        let dims: Vec<usize> = self.blocks.iter().map(|b| b.constant.nrows()).collect();
        let mut per_var: Vec<Vec<(usize, CMat)>> = vec![Vec::new(); self.nvars];
        for (j, blk) in self.blocks.iter().enumerate() {
            for (k, f) in &blk.terms {
                let slot = &mut per_var[*k];
                match slot.iter_mut().find(|(jj, _)| *jj == j) {
                    Some((_, acc)) => *acc -= f,
                    None => slot.push((j, -f)),
                }
            }
        }
        if let Some(k) = per_var.iter().position(|t| t.is_empty()) {
            return Err(Error::MalformedProblem(format!("variable {k} appears in no block")));
        }
        let mut p = SdpProblem::new(dims);
        p.objective = self.blocks.iter().map(|b| b.constant.clone()).collect();
        p.constraints = per_var
            .into_iter()
            .zip(&self.objective)
            .map(|(terms, &rhs)| Constraint { terms, rhs })
            .collect();
        Ok(p)
    }

    pub fn eval_block(&self, j: usize, y: &[f64]) -> CMat {
        let blk = &self.blocks[j];
        let mut m = blk.constant.clone();
        for (k, f) in &blk.terms {
            if y[*k] != 0.0 {
                m += f.scale(y[*k]);
            }
        }
        m
    }

    /// Solve; anything but an optimal status is an error.
    pub fn solve(&self, opts: &SdpOptions) -> Result<LmiSolution> {
        let sol = self.solve_raw(opts)?;
        if sol.diagnostics.status != SdpStatus::Optimal {
            return Err(Error::Numerical(format!(
                "solver stopped with status {:?} (gap {:.2e}, pinf {:.2e}, dinf {:.2e})",
                sol.diagnostics.status,
                sol.diagnostics.rel_gap,
                sol.diagnostics.primal_infeasibility,
                sol.diagnostics.dual_infeasibility
            )));
        }
        Ok(sol)
    }

    /// Solve and return whatever the solver produced.
    pub fn solve_raw(&self, opts: &SdpOptions) -> Result<LmiSolution> {
        let p = self.to_problem()?;
        let sol = solve(&p, opts)?;
        let y = sol.y.clone();
        let value = self.objective.iter().zip(&y).map(|(c, v)| c * v).sum::<f64>() + self.offset;
        let slacks = (0..self.blocks.len()).map(|j| self.eval_block(j, &y)).collect();
        Ok(LmiSolution { y, value, slacks, multipliers: sol.x, diagnostics: sol.diagnostics })
    }
}
