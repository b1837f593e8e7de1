//! Finite-dimensional C*-algebras `S0 = ⊕_i L(A_i) ⊗ I_{Y_i}` in canonical
//! block-diagonal position, together with the maps built from them.
//!
//! Block `i` occupies a contiguous range of `dA_i * dY_i` indices; inside it,
//! `(a, y)` sits at `offset_i + a * dY_i + y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, identity, kron, BipartiteIndex, CMat, Side};
use crate::subspace::{NcGraph, OperatorSubspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Block {
    #[serde(rename = "dA")]
    pub dim_a: usize,
    #[serde(rename = "dY")]
    pub dim_y: usize,
}

impl Block {
    pub fn size(&self) -> usize {
        self.dim_a * self.dim_y
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct S0Algebra {
    blocks: Vec<Block>,
}

impl S0Algebra {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidAlgebra("no blocks".into()));
        }
        if blocks.iter().any(|b| b.dim_a == 0 || b.dim_y == 0) {
            return Err(Error::InvalidAlgebra("block dimensions must be positive".into()));
        }
        Ok(Self { blocks })
    }

    /// Parse `"1x2,2x1"` as blocks `(dA, dY)`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (a, y) = part
                .split_once(['x', 'X'])
                .ok_or_else(|| Error::Parse(format!("block '{part}' is not of the form AxY")))?;
            let dim_a = a.trim().parse().map_err(|_| Error::Parse(format!("bad block '{part}'")))?;
            let dim_y = y.trim().parse().map_err(|_| Error::Parse(format!("bad block '{part}'")))?;
            blocks.push(Block { dim_a, dim_y });
        }
        Self::new(blocks)
    }

    /// `C I` on `C^n`.
    pub fn scalars(n: usize) -> Self {
        Self { blocks: vec![Block { dim_a: 1, dim_y: n }] }
    }

    /// Diagonal matrices on `C^n`.
    pub fn diagonal(n: usize) -> Self {
        Self { blocks: vec![Block { dim_a: 1, dim_y: 1 }; n] }
    }

    /// All of `L(C^n)`.
    pub fn full(n: usize) -> Self {
        Self { blocks: vec![Block { dim_a: n, dim_y: 1 }] }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(Block::size).sum()
    }

    pub fn offsets(&self) -> Vec<usize> {
        let mut o = Vec::with_capacity(self.blocks.len());
        let mut acc = 0;
        for b in &self.blocks {
            o.push(acc);
            acc += b.size();
        }
        o
    }

    /// Embed `a ⊗ y` into block `i`.
    fn embed(&self, i: usize, m: &CMat) -> CMat {
        let n = self.n();
        let off = self.offsets()[i];
        let mut out = linalg::zeros(n);
        out.view_mut((off, off), (m.nrows(), m.ncols())).copy_from(m);
        out
    }

    fn block_of(&self, w: &CMat, i: usize) -> CMat {
        let off = self.offsets()[i];
        let s = self.blocks[i].size();
        w.view((off, off), (s, s)).into_owned()
    }

    /// `S0` itself as a subspace.
    pub fn algebra_subspace(&self) -> OperatorSubspace {
        let mut basis = Vec::new();
        for (i, b) in self.blocks.iter().enumerate() {
            let iy = identity(b.dim_y).scale(1.0 / (b.dim_y as f64).sqrt());
            for p in 0..b.dim_a {
                for q in 0..b.dim_a {
                    basis.push(self.embed(i, &kron(&linalg::unit(b.dim_a, p, q), &iy)));
                }
            }
        }
        OperatorSubspace::from_orthonormal_unchecked(self.n(), basis)
    }

    /// The commutant `S0' = ⊕_i I_{A_i} ⊗ L(Y_i)`.
    pub fn commutant(&self) -> OperatorSubspace {
        let mut basis = Vec::new();
        for (i, b) in self.blocks.iter().enumerate() {
            let ia = identity(b.dim_a).scale(1.0 / (b.dim_a as f64).sqrt());
            for p in 0..b.dim_y {
                for q in 0..b.dim_y {
                    basis.push(self.embed(i, &kron(&ia, &linalg::unit(b.dim_y, p, q))));
                }
            }
        }
        OperatorSubspace::from_orthonormal_unchecked(self.n(), basis)
    }

    /// The commutant algebra, as an `S0Algebra` after swapping `A` and `Y`.
    /// Only canonical when every block has `dA = 1` or `dY = 1`.
    pub fn commutant_algebra(&self) -> Option<Self> {
        if self.blocks.iter().all(|b| b.dim_a == 1 || b.dim_y == 1) {
            Some(Self {
                blocks: self.blocks.iter().map(|b| Block { dim_a: b.dim_y, dim_y: b.dim_a }).collect(),
            })
        } else {
            None
        }
    }

    fn block_partial_trace(&self, w: &CMat, scale: impl Fn(&Block) -> f64) -> Result<CMat> {
        linalg::ensure_dim(w, self.n())?;
        let mut out = linalg::zeros(self.n());
        for (i, b) in self.blocks.iter().enumerate() {
            let wi = self.block_of(w, i);
            let t = linalg::partial_trace(&wi, Side::A, BipartiteIndex::new(b.dim_a, b.dim_y)?)?;
            let emb = kron(&identity(b.dim_a), &t).scale(scale(b));
            out += self.embed(i, &emb);
        }
        Ok(out)
    }

    /// `Δ(W) = Σ dA_i^{-1} I_{A_i} ⊗ Tr_{A_i}(P_i W P_i)`, the trace-preserving
    /// projection onto the commutant.
    pub fn commproj(&self, w: &CMat) -> Result<CMat> {
        self.block_partial_trace(w, |b| 1.0 / b.dim_a as f64)
    }

    /// `Ψ(W) = Σ dY_i^{-1} I_{A_i} ⊗ Tr_{A_i}(P_i W P_i)`.
    pub fn blockscale(&self, w: &CMat) -> Result<CMat> {
        self.block_partial_trace(w, |b| 1.0 / b.dim_y as f64)
    }

    /// `D = Σ dA_i^{-1} dY_i P_i`.
    pub fn scaling_matrix(&self) -> CMat {
        let mut d = linalg::zeros(self.n());
        let mut k = 0;
        for b in &self.blocks {
            for _ in 0..b.size() {
                d[(k, k)] = c(b.dim_y as f64 / b.dim_a as f64, 0.0);
                k += 1;
            }
        }
        d
    }

    /// `T = Σ_i dA_i^{-1} |Φ_{A_i B_i}><Φ_{A_i B_i}| ⊗ I_{Y_i Z_i}` on
    /// `C^n ⊗ C^n`, where the second factor mirrors the block structure.
    pub fn twirl_projector(&self) -> CMat {
        let n = self.n();
        let mut t = CMat::zeros(n * n, n * n);
        for (i, b) in self.blocks.iter().enumerate() {
            let off = self.offsets()[i];
            let inv = 1.0 / b.dim_a as f64;
            let at = |a: usize, y: usize| off + a * b.dim_y + y;
            for y in 0..b.dim_y {
                for z in 0..b.dim_y {
                    for a in 0..b.dim_a {
                        for a2 in 0..b.dim_a {
                            let row = at(a, y) * n + at(a, z);
                            let col = at(a2, y) * n + at(a2, z);
                            t[(row, col)] = c(inv, 0.0);
                        }
                    }
                }
            }
        }
        t
    }
}

/// `S^c = S^⊥ + S0`, again an `S0`-graph.
pub fn complement(g: &NcGraph) -> Result<NcGraph> {
    let s0 = g
        .s0()
        .ok_or_else(|| Error::PreconditionViolated("complement needs an S0 algebra".into()))?
        .clone();
    let space = g.space().perp().sum(&s0.algebra_subspace())?;
    Ok(NcGraph::new_unchecked(space, Some(s0)))
}

/// Generalized Pauli operators `U_{αβ} = Σ_j ω^{βj} |j+α><j|`, `ω = e^{2πi/d}`,
/// indexed `α * d + β`.
pub fn pauli_basis(d: usize) -> Result<Vec<CMat>> {
    if d == 0 {
        return Err(Error::InvalidDimension("Pauli dimension must be positive".into()));
    }
    let mut out = Vec::with_capacity(d * d);
    for alpha in 0..d {
        for beta in 0..d {
            let mut u = linalg::zeros(d);
            for j in 0..d {
                let ang = 2.0 * std::f64::consts::PI * ((beta * j) % d) as f64 / d as f64;
                u[((j + alpha) % d, j)] = c(ang.cos(), ang.sin());
            }
            out.push(u);
        }
    }
    Ok(out)
}

/// `Σ_{αβ} (U_{αβ} ⊗ I) M (U_{αβ}† ⊗ I)` on `C^d ⊗ C^m`.
pub fn pauli_partial_twirl(m: &CMat, d: usize) -> Result<CMat> {
    let total = linalg::ensure_square(m)?;
    if d == 0 || total % d != 0 {
        return Err(Error::DimensionMismatch { expected: d, found: total });
    }
    let idm = identity(total / d);
    let mut out = CMat::zeros(total, total);
    for u in pauli_basis(d)? {
        let big = kron(&u, &idm);
        out += &big * m * big.adjoint();
    }
    Ok(out)
}

/// Outcome of checking `I_A ⊗ W^{-1} ⪰ |Φ><Φ|_{AB} ⊗ (Tr_B W)^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiInequalityReport {
    /// Smallest eigenvalue of the difference.
    pub min_eig: f64,
    /// `||P^2 - P||_F` for `P = (I ⊗ √W)(|Φ><Φ| ⊗ (Tr_B W)^{-1})(I ⊗ √W)`.
    pub projector_residual: f64,
}

impl PhiInequalityReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.min_eig >= -tol && self.projector_residual <= tol
    }
}

/// Check the entangled-vector inequality for `W > 0` on `H_B ⊗ H_Z`, with
/// `H_A ≅ H_B` and ordering `A ⊗ B ⊗ Z`.
pub fn check_phi_inequality(w: &CMat, dim_b: usize, dim_z: usize) -> Result<PhiInequalityReport> {
    linalg::ensure_dim(w, dim_b * dim_z)?;
    linalg::ensure_hermitian(w)?;
    let winv = linalg::inv_pd(w)?;
    let trb = linalg::partial_trace(w, Side::A, BipartiteIndex::new(dim_b, dim_z)?)?;
    let trb_inv = linalg::inv_pd(&trb)?;
    let phi = linalg::max_ent_vector(dim_b)?;
    let phiphi = &phi * phi.adjoint();
    let lhs = kron(&identity(dim_b), &winv);
    let rhs = kron(&phiphi, &trb_inv);
    let min_eig = linalg::min_eig(&(&lhs - &rhs));
    let sw = kron(&identity(dim_b), &linalg::psd_sqrt(w)?);
    let p = &sw * &rhs * &sw;
    let projector_residual = linalg::frob(&(&p * &p - &p));
    Ok(PhiInequalityReport { min_eig, projector_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blocks(spec: &str) -> S0Algebra {
        S0Algebra::parse(spec).unwrap()
    }

    #[test]
    fn parse_and_dims() {
        let s = blocks("1x2, 2x1");
        assert_eq!(s.n(), 4);
        assert_eq!(s.offsets(), vec![0, 2]);
        assert!(S0Algebra::parse("1x").is_err());
        assert!(S0Algebra::parse("0x2").is_err());
    }

    #[test]
    fn algebra_and_commutant_commute() {
        let s = blocks("2x2,1x1");
        let alg = s.algebra_subspace();
        let com = s.commutant();
        assert_eq!(alg.dim(), 5);
        assert_eq!(com.dim(), 5);
        for a in alg.basis() {
            for b in com.basis() {
                assert!(linalg::frob(&(a * b - b * a)) < 1e-12);
            }
        }
    }

    #[test]
    fn scalars_give_trace_maps() {
        let s = S0Algebra::scalars(3);
        let w = CMat::from_fn(3, 3, |i, j| c((i + 2 * j) as f64, i as f64 - j as f64));
        // the commutant of C I is everything
        assert!((s.commproj(&w).unwrap() - &w).norm() < 1e-12);
        assert!((s.blockscale(&w).unwrap() - w.scale(1.0 / 3.0)).norm() < 1e-12);
        assert!((s.scaling_matrix() - identity(3).scale(3.0)).norm() < 1e-12);
    }

    #[test]
    fn full_algebra_maps() {
        let s = S0Algebra::full(3);
        let w = CMat::from_fn(3, 3, |i, j| c((i * j) as f64 + 1.0, 0.0));
        assert!((s.commproj(&w).unwrap() - identity(3) * linalg::trace(&w).scale(1.0 / 3.0)).norm() < 1e-12);
        assert!((s.scaling_matrix() - identity(3).scale(1.0 / 3.0)).norm() < 1e-12);
    }

    #[test]
    fn twirl_projector_fixes_phi() {
        for spec in ["1x2,2x1", "2x2", "1x1,1x1,1x1", "3x1"] {
            let s = blocks(spec);
            let t = s.twirl_projector();
            let phi = linalg::max_ent_vector(s.n()).unwrap();
            assert!((&t * &t - &t).norm() < 1e-12, "{spec}");
            assert!((&t * &phi - &phi).norm() < 1e-12, "{spec}");
        }
    }

    #[test]
    fn pauli_full_twirl_is_trace() {
        for d in 2..5 {
            let m = CMat::from_fn(d, d, |i, j| c(i as f64 + 0.5, j as f64 * 0.25));
            let mut acc = linalg::zeros(d);
            for u in pauli_basis(d).unwrap() {
                acc += &u * &m * u.adjoint();
            }
            assert!((acc - identity(d) * linalg::trace(&m).scale(d as f64)).norm() < 1e-10);
        }
    }

    #[test]
    fn phi_inequality_at_identity() {
        let r = check_phi_inequality(&identity(4), 2, 2).unwrap();
        assert!(r.holds(1e-10), "{r:?}");
    }
}
