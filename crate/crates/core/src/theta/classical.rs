//! Classical graphs: weighted Lovász theta, clique polytopes.

use crate::error::{Error, Result};
use crate::linalg::{self, c, identity, CMat};
use crate::sdp::{LmiBuilder, SdpOptions, SolveDiagnostics};

/// Largest graph handled by exact clique enumeration.
pub const MAX_CLIQUE_VERTICES: usize = 16;

fn check_adjacency(adj: &[Vec<bool>]) -> Result<usize> {
    let n = adj.len();
    if n == 0 {
        return Err(Error::InvalidDimension("graph must have a vertex".into()));
    }
    for (i, row) in adj.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
        if row[i] {
            return Err(Error::InvalidGraph("adjacency has a self-loop".into()));
        }
        if (0..n).any(|j| row[j] != adj[j][i]) {
            return Err(Error::InvalidGraph("adjacency is not symmetric".into()));
        }
    }
    Ok(n)
}

fn check_weights(w: &[f64], n: usize) -> Result<()> {
    if w.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: w.len() });
    }
    if let Some(&x) = w.iter().find(|x| !(**x >= 0.0)) {
        return Err(Error::PreconditionViolated(format!("negative weight {x}")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ClassicalTheta {
    pub value: f64,
    pub diagnostics: SolveDiagnostics,
}

/// `θ(G, w) = min λ` s.t. `Y ⪰ |r><r|`, `Y_ii = λ`, `Y_ij = 0` for distinct
/// non-adjacent `i, j`, with `r = √w`.
pub fn classical_theta(adj: &[Vec<bool>], w: &[f64], opts: &SdpOptions) -> Result<ClassicalTheta> {
    let n = check_adjacency(adj)?;
    check_weights(w, n)?;
    let r: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let rr = CMat::from_fn(n, n, |i, j| c(r[i] * r[j], 0.0));
    let mut lmi = LmiBuilder::new();
    let lam = lmi.add_var();
    let blk = lmi.add_block(-rr);
    lmi.add_term(blk, lam, identity(n));
    for i in 0..n {
        for j in (i + 1)..n {
            if adj[i][j] {
                let e = lmi.add_var();
                let mut m = linalg::zeros(n);
                m[(i, j)] = c(1.0, 0.0);
                m[(j, i)] = c(1.0, 0.0);
                lmi.add_term(blk, e, m);
            }
        }
    }
    lmi.set_objective(lam, -1.0);
    let sol = lmi.solve(opts)?;
    Ok(ClassicalTheta { value: sol.y[lam.0], diagnostics: sol.diagnostics })
}

/// Maximal cliques as vertex bitmasks, in a deterministic order.
pub fn maximal_cliques(adj: &[Vec<bool>]) -> Result<Vec<u32>> {
    let n = check_adjacency(adj)?;
    if n > MAX_CLIQUE_VERTICES {
        return Err(Error::Unsupported(format!(
            "clique enumeration is limited to {MAX_CLIQUE_VERTICES} vertices"
        )));
    }
    let nbr: Vec<u32> = (0..n)
        .map(|i| (0..n).filter(|&j| adj[i][j]).fold(0u32, |m, j| m | (1 << j)))
        .collect();
    let mut out = Vec::new();
    bron_kerbosch(0, (1u32 << n) - 1, 0, &nbr, &mut out);
    out.sort_unstable();
    Ok(out)
}

fn bron_kerbosch(r: u32, mut p: u32, mut x: u32, nbr: &[u32], out: &mut Vec<u32>) {
    if p == 0 && x == 0 {
        out.push(r);
        return;
    }
    let pivot = (p | x).trailing_zeros() as usize;
    let mut cand = p & !nbr[pivot];
    while cand != 0 {
        let v = cand.trailing_zeros() as usize;
        let bit = 1u32 << v;
        bron_kerbosch(r | bit, p & nbr[v], x & nbr[v], nbr, out);
        p &= !bit;
        x |= bit;
        cand &= !bit;
    }
}

#[derive(Debug, Clone)]
pub struct FpMembership {
    pub member: bool,
    /// `min Σ λ_K` over fractional clique covers `Σ λ_K χ_K ≥ w`.
    pub cover: f64,
    pub diagnostics: SolveDiagnostics,
}

/// Whether `w` lies in the hereditary convex hull of clique indicators of `G`.
pub fn fp_membership_classical(adj: &[Vec<bool>], w: &[f64], opts: &SdpOptions) -> Result<FpMembership> {
    let n = check_adjacency(adj)?;
    check_weights(w, n)?;
    let cliques = maximal_cliques(adj)?;
    let mut lmi = LmiBuilder::new();
    let one = identity(1);
    let vars: Vec<_> = cliques.iter().map(|_| lmi.add_var()).collect();
    for v in &vars {
        let b = lmi.add_block(linalg::zeros(1));
        lmi.add_term(b, *v, one.clone());
        lmi.set_objective(*v, -1.0);
    }
    for i in 0..n {
        let b = lmi.add_block(one.scale(-w[i]));
        for (k, mask) in cliques.iter().enumerate() {
            if mask & (1 << i) != 0 {
                lmi.add_term(b, vars[k], one.clone());
            }
        }
    }
    let sol = lmi.solve(opts)?;
    let cover = -sol.value;
    Ok(FpMembership { member: cover <= 1.0 + super::body::MEMBERSHIP_TOL, cover, diagnostics: sol.diagnostics })
}

/// `max { Re Tr(W W') : W' ⪰ 0, diag(W') ∈ her conv{χ_K} }`, with `K`
/// ranging over the stable sets of `G` (the cliques of its complement).
pub fn stable_set_support(adj: &[Vec<bool>], w: &CMat, opts: &SdpOptions) -> Result<(f64, SolveDiagnostics)> {
    let n = check_adjacency(adj)?;
    linalg::ensure_dim(w, n)?;
    linalg::ensure_hermitian(w)?;
    let co: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i != j && !adj[i][j]).collect()).collect();
    let sets = maximal_cliques(&co)?;
    let one = identity(1);
    let mut lmi = LmiBuilder::new();
    let wp = lmi.add_matrix_var(linalg::hermitian_matrix_basis(n), linalg::zeros(n));
    let bw = lmi.add_block(linalg::zeros(n));
    lmi.add_mapped(bw, &wp, |m| m.clone());
    lmi.add_trace_objective(&wp, w);
    let mu: Vec<_> = sets.iter().map(|_| lmi.add_var()).collect();
    let total = lmi.add_block(one.clone());
    for v in &mu {
        let b = lmi.add_block(linalg::zeros(1));
        lmi.add_term(b, *v, one.clone());
        lmi.add_term(total, *v, -one.clone());
    }
    for i in 0..n {
        let b = lmi.add_block(linalg::zeros(1));
        for (k, mask) in sets.iter().enumerate() {
            if mask & (1 << i) != 0 {
                lmi.add_term(b, mu[k], one.clone());
            }
        }
        lmi.add_mapped(b, &wp, |m| one.scale(-m[(i, i)].re));
    }
    let sol = lmi.solve(opts)?;
    Ok((sol.value, sol.diagnostics))
}
