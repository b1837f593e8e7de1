//! Seeded random instances. All generators draw from a caller-owned RNG, so
//! a fixed seed reproduces the same instances on every platform.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cstar::S0Algebra;
use crate::error::Result;
use crate::linalg::{self, c, identity, CMat};
use crate::subspace::{NcGraph, OperatorSubspace};

pub type InstanceRng = ChaCha8Rng;

pub fn rng(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

pub fn hermitian(n: usize, rng: &mut impl Rng) -> CMat {
    linalg::hermitian_part(&gaussian_matrix(n, n, rng))
}

/// `G G†` for an `n x rank` Gaussian `G`, scaled to unit trace.
pub fn psd_of_rank(n: usize, rank: usize, rng: &mut impl Rng) -> CMat {
    let g = gaussian_matrix(n, rank, rng);
    let w = &g * g.adjoint();
    let t = linalg::trace(&w).re;
    linalg::hermitian_part(&w.scale(1.0 / t))
}

/// Full-rank PSD matrix with unit trace.
pub fn psd(n: usize, rng: &mut impl Rng) -> CMat {
    psd_of_rank(n, n, rng)
}

/// Haar-distributed unitary from the QR decomposition of a Gaussian matrix.
pub fn unitary(n: usize, rng: &mut impl Rng) -> CMat {
    let qr = gaussian_matrix(n, n, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            u[(i, j)] *= ph;
        }
    }
    u
}

/// `S = span{I, H_1, ..., H_k}` for random Hermitian `H_i`, with `S0 = C I`.
pub fn nc_graph(n: usize, k: usize, rng: &mut impl Rng) -> Result<NcGraph> {
    let mut mats = vec![identity(n)];
    for _ in 0..k {
        mats.push(hermitian(n, rng));
    }
    NcGraph::new(OperatorSubspace::span(&mats, n)?, Some(S0Algebra::scalars(n)))
}

/// Random `S0`-graph: `k` random block-supported matrices `M = X_A ⊗ R`,
/// closed under adjoint and under two-sided multiplication by `S0`, plus `S0`.
pub fn s0_graph(s0: &S0Algebra, k: usize, rng: &mut impl Rng) -> Result<NcGraph> {
    let n = s0.n();
    let blocks = s0.blocks();
    let offsets = s0.offsets();
    let alg = s0.algebra_subspace();
    let mut gens: Vec<CMat> = Vec::new();
    for _ in 0..k {
        let i = rng.random_range(0..blocks.len());
        let j = rng.random_range(0..blocks.len());
        let (bi, bj) = (blocks[i], blocks[j]);
        let xa = gaussian_matrix(bi.dim_a, bj.dim_a, rng);
        let ry = gaussian_matrix(bi.dim_y, bj.dim_y, rng);
        let local = linalg::kron(&xa, &ry);
        let mut m = linalg::zeros(n);
        m.view_mut((offsets[i], offsets[j]), (local.nrows(), local.ncols())).copy_from(&local);
        gens.push(m.adjoint());
        gens.push(m);
    }
    let mut mats: Vec<CMat> = alg.basis().to_vec();
    for g in &gens {
        for a in alg.basis() {
            for b in alg.basis() {
                mats.push(a * g * b);
            }
        }
    }
    NcGraph::new(OperatorSubspace::span(&mats, n)?, Some(s0.clone()))
}

/// Erdős–Rényi adjacency matrix.
pub fn classical_graph(n: usize, p: f64, rng: &mut impl Rng) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let e = rng.random::<f64>() < p;
            adj[i][j] = e;
            adj[j][i] = e;
        }
    }
    adj
}

/// Positive definite element of the commutant `S0'`, unit trace.
pub fn commutant_pd(s0: &S0Algebra, rng: &mut impl Rng) -> CMat {
    let w = s0.commproj(&psd(s0.n(), rng)).expect("dimension matches");
    linalg::hermitian_part(&w)
}

pub fn positive_weights(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| 0.1 + rng.random::<f64>()).collect()
}
