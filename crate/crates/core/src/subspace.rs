//! Operator subspaces of `L(C^n)` and non-commutative graphs.

use crate::cstar::S0Algebra;
use crate::error::{Error, Result};
use crate::linalg::{self, c, hs_inner, frob, identity, tol, CMat, C64};

/// Column-pivoted Gram–Schmidt with re-orthogonalization.
///
/// Picks the candidate with the largest residual at every step, so an
/// already-orthogonal sparse input keeps its order and sparsity.
fn pivoted_gram_schmidt(
    start: &[Vec<C64>],
    candidates: Vec<Vec<C64>>,
    cutoff: f64,
    limit: usize,
) -> Vec<Vec<C64>> {
    let dot = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    let norm = |a: &[C64]| -> f64 { a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() };
    let mut residual = candidates;
    let project_out = |v: &mut Vec<C64>, q: &[C64]| {
        let p = dot(q, v);
        for (x, y) in v.iter_mut().zip(q) {
            *x -= p * y;
        }
    };
    for q in start {
        for v in residual.iter_mut() {
            project_out(v, q);
            project_out(v, q);
        }
    }
    let mut out: Vec<Vec<C64>> = Vec::new();
    let mut alive: Vec<bool> = vec![true; residual.len()];
    while out.len() < limit {
        let mut best = None;
        let mut best_norm = cutoff;
        for (i, v) in residual.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            let nv = norm(v);
            if nv > best_norm * (1.0 + 1e-12) {
                best_norm = nv;
                best = Some(i);
            }
        }
        let Some(i) = best else { break };
        alive[i] = false;
        let mut q = std::mem::take(&mut residual[i]);
        // second pass against everything accepted so far
        for p in start.iter().chain(out.iter()) {
            project_out(&mut q, p);
        }
        let nq = norm(&q);
        if nq <= cutoff {
            continue;
        }
        for x in q.iter_mut() {
            *x /= nq;
        }
        for (j, v) in residual.iter_mut().enumerate() {
            if alive[j] {
                project_out(v, &q);
            }
        }
        out.push(q);
    }
    out
}

fn flat(m: &CMat) -> Vec<C64> {
    let n = m.nrows();
    let mut v = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            v.push(m[(i, j)]);
        }
    }
    v
}

fn unflat(v: &[C64], n: usize) -> CMat {
    CMat::from_fn(n, n, |i, j| v[i * n + j])
}

/// Complex subspace of `L(C^n)` with an orthonormal (Hilbert–Schmidt) basis.
#[derive(Debug, Clone)]
pub struct OperatorSubspace {
    n: usize,
    basis: Vec<CMat>,
}

impl OperatorSubspace {
    /// Span of the given matrices, orthonormalized with rank truncation.
    pub fn span(mats: &[CMat], n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("ambient dimension must be positive".into()));
        }
        for m in mats {
            linalg::ensure_dim(m, n)?;
        }
        let scale = mats.iter().map(frob).fold(0.0, f64::max);
        if scale == 0.0 {
            return Ok(Self::zero(n));
        }
        let basis = pivoted_gram_schmidt(&[], mats.iter().map(flat).collect(), tol::RANK * scale, n * n);
        Ok(Self { n, basis: basis.iter().map(|v| unflat(v, n)).collect() })
    }

    /// Wrap a basis that is already orthonormal. Not checked.
    pub fn from_orthonormal_unchecked(n: usize, basis: Vec<CMat>) -> Self {
        Self { n, basis }
    }

    pub fn zero(n: usize) -> Self {
        Self { n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        let mut basis = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                basis.push(linalg::unit(n, i, j));
            }
        }
        Self { n, basis }
    }

    /// `C I`.
    pub fn scalars(n: usize) -> Self {
        Self { n, basis: vec![identity(n).scale(1.0 / (n as f64).sqrt())] }
    }

    /// Diagonal matrices.
    pub fn diagonal(n: usize) -> Self {
        Self { n, basis: (0..n).map(|i| linalg::unit(n, i, i)).collect() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, m: &CMat) -> CMat {
        let mut out = linalg::zeros(self.n);
        for b in &self.basis {
            out += b * hs_inner(b, m);
        }
        out
    }

    /// Frobenius distance from `m` to the subspace.
    pub fn residual(&self, m: &CMat) -> f64 {
        frob(&(m - self.project(m)))
    }

    pub fn contains(&self, m: &CMat) -> bool {
        m.nrows() == self.n && self.residual(m) <= tol::MEMBER * (1.0 + frob(m))
    }

    pub fn contains_subspace(&self, other: &Self) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    /// Orthogonal complement in the Hilbert–Schmidt inner product.
    pub fn perp(&self) -> Self {
        let n = self.n;
        let start: Vec<Vec<C64>> = self.basis.iter().map(flat).collect();
        let cands = Self::full(n).basis.iter().map(flat).collect();
        let b = pivoted_gram_schmidt(&start, cands, 1e-6, n * n - self.dim());
        Self { n, basis: b.iter().map(|v| unflat(v, n)).collect() }
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.same_ambient(other)?;
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Self::span(&all, self.n)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.same_ambient(other)?;
        Ok(self.perp().sum(&other.perp())?.perp())
    }

    /// `self ∩ sub^⊥`; `sub` must be contained in `self`.
    pub fn quotient(&self, sub: &Self) -> Result<Self> {
        self.same_ambient(sub)?;
        if !self.contains_subspace(sub) {
            return Err(Error::PreconditionViolated("quotient by a non-subspace".into()));
        }
        let start: Vec<Vec<C64>> = sub.basis.iter().map(flat).collect();
        let cands = self.basis.iter().map(flat).collect();
        let b = pivoted_gram_schmidt(&start, cands, 1e-6, self.dim() - sub.dim());
        Ok(Self { n: self.n, basis: b.iter().map(|v| unflat(v, self.n)).collect() })
    }

    pub fn adjoint(&self) -> Self {
        Self { n: self.n, basis: self.basis.iter().map(|b| b.adjoint()).collect() }
    }

    pub fn is_adjoint_closed(&self) -> bool {
        self.basis.iter().all(|b| self.contains(&b.adjoint()))
    }

    /// `self ⊗ other` on `C^n ⊗ C^m`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut basis = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.basis {
            for b in &other.basis {
                basis.push(linalg::kron(a, b));
            }
        }
        Self { n: self.n * other.n, basis }
    }

    /// Projector onto the subspace as an operator on vectorized matrices.
    pub fn projector(&self) -> CMat {
        let n2 = self.n * self.n;
        let mut p = CMat::zeros(n2, n2);
        for b in &self.basis {
            let v = nalgebra::DVector::from_vec(flat(b));
            p += &v * v.adjoint();
        }
        p
    }

    /// Frobenius distance between the two projectors.
    pub fn distance(&self, other: &Self) -> f64 {
        frob(&(self.projector() - other.projector()))
    }

    /// Orthonormal basis of the Hermitian elements; its real span is the
    /// Hermitian part, its complex span the whole space.
    pub fn hermitian_basis(&self) -> Result<Vec<CMat>> {
        if !self.is_adjoint_closed() {
            return Err(Error::PreconditionViolated("subspace is not closed under adjoint".into()));
        }
        let half = c(0.5, 0.0);
        let mut cands = Vec::with_capacity(2 * self.dim());
        for b in &self.basis {
            let re = (b + b.adjoint()) * half;
            let im = (b - b.adjoint()) * c(0.0, -0.5);
            cands.push(real_flat(&re));
            cands.push(real_flat(&im));
        }
        let out = pivoted_gram_schmidt(&[], cands, 1e-7, self.dim());
        if out.len() != self.dim() {
            return Err(Error::Numerical("Hermitian basis has the wrong size".into()));
        }
        Ok(out.iter().map(|v| real_unflat(v, self.n)).collect())
    }

    fn same_ambient(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }
}

// A Hermitian matrix as a real vector: the real inner product of these
// equals Tr(AB).
fn real_flat(m: &CMat) -> Vec<C64> {
    let mut v = flat(m).iter().map(|z| c(z.re, 0.0)).collect::<Vec<_>>();
    v.extend(flat(m).iter().map(|z| c(z.im, 0.0)));
    v
}

fn real_unflat(v: &[C64], n: usize) -> CMat {
    let k = n * n;
    let m = CMat::from_fn(n, n, |i, j| c(v[i * n + j].re, v[k + i * n + j].re));
    linalg::hermitian_part(&m)
}

/// A non-commutative graph `S ⊆ L(C^n)`: `S = S†` and `I ∈ S`, optionally
/// an `S0`-graph when an algebra with `S0 ⊆ S` and `S0 S S0 ⊆ S` is attached.
#[derive(Debug, Clone)]
pub struct NcGraph {
    space: OperatorSubspace,
    s0: Option<S0Algebra>,
}

impl NcGraph {
    pub fn new(space: OperatorSubspace, s0: Option<S0Algebra>) -> Result<Self> {
        let g = Self { space, s0 };
        g.validate()?;
        Ok(g)
    }

    pub fn new_unchecked(space: OperatorSubspace, s0: Option<S0Algebra>) -> Self {
        Self { space, s0 }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if !self.space.contains(&identity(n)) {
            return Err(Error::InvalidGraph("identity not in span".into()));
        }
        if !self.space.is_adjoint_closed() {
            return Err(Error::InvalidGraph("not closed under adjoint".into()));
        }
        if let Some(s0) = &self.s0 {
            if s0.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: s0.n() });
            }
            let alg = s0.algebra_subspace();
            if !self.space.contains_subspace(&alg) {
                return Err(Error::InvalidGraph("S0 is not contained in S".into()));
            }
            for k in alg.basis() {
                for l in alg.basis() {
                    for m in self.space.basis() {
                        if !self.space.contains(&(k * m * l)) {
                            return Err(Error::InvalidGraph("S is not an S0-bimodule".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `S_G = span{|i><j| : i = j or i ~ j}` with the diagonal algebra as `S0`.
    pub fn from_classical_graph(adj: &[Vec<bool>]) -> Result<Self> {
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
            for j in 0..n {
                if row[j] != adj[j][i] {
                    return Err(Error::InvalidGraph("adjacency is not symmetric".into()));
                }
            }
        }
        let mut basis = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || adj[i][j] {
                    basis.push(linalg::unit(n, i, j));
                }
            }
        }
        Ok(Self {
            space: OperatorSubspace::from_orthonormal_unchecked(n, basis),
            s0: Some(S0Algebra::diagonal(n)),
        })
    }

    /// `C I`, the empty graph.
    pub fn scalars(n: usize) -> Self {
        Self { space: OperatorSubspace::scalars(n), s0: Some(S0Algebra::scalars(n)) }
    }

    /// `L(C^n)`, the complete graph.
    pub fn full(n: usize) -> Self {
        Self { space: OperatorSubspace::full(n), s0: Some(S0Algebra::scalars(n)) }
    }

    pub fn n(&self) -> usize {
        self.space.ambient_dim()
    }

    pub fn space(&self) -> &OperatorSubspace {
        &self.space
    }

    pub fn s0(&self) -> Option<&S0Algebra> {
        self.s0.as_ref()
    }

    pub fn with_s0(self, s0: Option<S0Algebra>) -> Result<Self> {
        Self::new(self.space, s0)
    }

    /// `S^⊥ + C I`; its algebra is `C I`.
    pub fn perp_plus_identity(&self) -> Result<Self> {
        let space = self.space.perp().sum(&OperatorSubspace::scalars(self.n()))?;
        Ok(Self { space, s0: Some(S0Algebra::scalars(self.n())) })
    }

    /// `S ⊗ S'` on `C^n ⊗ C^m`. The product carries `S0 = C I`.
    pub fn strong_product(&self, other: &Self) -> Self {
        let space = self.space.kron(&other.space);
        let n = space.ambient_dim();
        Self { space, s0: Some(S0Algebra::scalars(n)) }
    }

    /// `S * S' = (S/CI) ⊗ L + L ⊗ (S'/CI) + C I ⊗ I`.
    pub fn disjunctive_product(&self, other: &Self) -> Result<Self> {
        let (n, m) = (self.n(), other.n());
        let q1 = self.space.quotient(&OperatorSubspace::scalars(n))?;
        let q2 = other.space.quotient(&OperatorSubspace::scalars(m))?;
        let a = q1.kron(&OperatorSubspace::full(m));
        let b = OperatorSubspace::full(n).kron(&q2);
        let id = OperatorSubspace::scalars(n * m);
        let space = a.sum(&b)?.sum(&id)?;
        Ok(Self { space, s0: Some(S0Algebra::scalars(n * m)) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> CMat {
        CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    #[test]
    fn span_truncates_rank() {
        let x = pauli_x();
        let s = OperatorSubspace::span(&[x.clone(), x.scale(2.0), identity(2)], 2).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&(x + identity(2))));
        assert!(!s.contains(&linalg::unit(2, 0, 1)));
    }

    #[test]
    fn perp_dimensions_and_orthogonality() {
        let s = OperatorSubspace::span(&[identity(3), linalg::unit(3, 0, 1)], 3).unwrap();
        let p = s.perp();
        assert_eq!(p.dim(), 7);
        for a in s.basis() {
            for b in p.basis() {
                assert!(hs_inner(a, b).norm() < 1e-12);
            }
        }
        assert!(p.perp().distance(&s) < 1e-10);
    }

    #[test]
    fn classical_graph_basis_is_sparse() {
        let adj = vec![vec![false, true, false], vec![true, false, true], vec![false, true, false]];
        let g = NcGraph::from_classical_graph(&adj).unwrap();
        assert_eq!(g.space().dim(), 3 + 4);
        let perp = g.space().perp();
        assert_eq!(perp.dim(), 2);
        for b in perp.basis() {
            assert_eq!(b.iter().filter(|z| z.norm() > 0.0).count(), 1);
        }
        g.validate().unwrap();
    }

    #[test]
    fn graph_rejects_missing_identity() {
        let s = OperatorSubspace::span(&[pauli_x()], 2).unwrap();
        assert!(matches!(NcGraph::new(s, None), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn hermitian_basis_spans_space() {
        let s = OperatorSubspace::span(&[identity(2), linalg::unit(2, 0, 1), linalg::unit(2, 1, 0)], 2).unwrap();
        let h = s.hermitian_basis().unwrap();
        assert_eq!(h.len(), 3);
        let back = OperatorSubspace::span(&h, 2).unwrap();
        assert!(back.distance(&s) < 1e-10);
        let bad = OperatorSubspace::span(&[linalg::unit(2, 0, 1)], 2).unwrap();
        assert!(bad.hermitian_basis().is_err());
    }

    #[test]
    fn disjunctive_product_contains_identity() {
        let g = NcGraph::scalars(2);
        let d = g.disjunctive_product(&NcGraph::full(2)).unwrap();
        d.validate().unwrap();
        // (CI/CI) = 0, so S*S' = L ⊗ (L/CI) + C I
        assert_eq!(d.space().dim(), 4 * 3 + 1);
    }
}
