//! Dense complex linear algebra on bipartite spaces.
//!
//! Bipartite index convention: `(a, b) -> a * dim_b + b`, row-major and 0-based.
//! The unnormalized maximally entangled vector is `|Phi> = sum_i |i>|i>`, and
//! `vectorize(M) = (M ⊗ I)|Phi>` has entry `(a, b)` equal to `M[a][b]`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;

/// Library-wide numerical tolerances.
pub mod tol {
    /// Hermiticity check, relative to `1 + ||M||_F`.
    pub const HERM: f64 = 1e-9;
    /// PSD check on the smallest eigenvalue, relative to `1 + ||M||_F`.
    pub const EIG: f64 = 1e-9;
    /// Pseudo-inverse cutoff, relative to the largest singular value.
    pub const PINV: f64 = 1e-10;
    /// Rank cutoff used when orthonormalizing spanning sets.
    pub const RANK: f64 = 1e-9;
    /// Membership residual for subspaces.
    pub const MEMBER: f64 = 1e-8;
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Which factor of `H_A ⊗ H_B` to trace out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Index map for `H_A ⊗ H_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipartiteIndex {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl BipartiteIndex {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::InvalidDimension("bipartite factors must be nonzero".into()));
        }
        Ok(Self { dim_a, dim_b })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn encode(&self, a: usize, b: usize) -> usize {
        a * self.dim_b + b
    }

    pub fn decode(&self, idx: usize) -> (usize, usize) {
        (idx / self.dim_b, idx % self.dim_b)
    }
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

/// Matrix unit `|i><j|` in dimension `n`.
pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = zeros(n);
    m[(i, j)] = c(1.0, 0.0);
    m
}

pub fn ensure_square(m: &CMat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

pub fn ensure_dim(m: &CMat, n: usize) -> Result<()> {
    let d = ensure_square(m)?;
    if d != n {
        return Err(Error::DimensionMismatch { expected: n, found: d });
    }
    Ok(())
}

/// `|Phi> = sum_i |i> ⊗ |i>`, unnormalized.
pub fn max_ent_vector(n: usize) -> Result<CVec> {
    if n == 0 {
        return Err(Error::InvalidDimension("dimension must be positive".into()));
    }
    let mut v = CVec::zeros(n * n);
    for i in 0..n {
        v[i * n + i] = c(1.0, 0.0);
    }
    Ok(v)
}

/// `(M ⊗ I)|Phi>`; entry `(a, b)` is `M[a][b]`.
pub fn vectorize(m: &CMat) -> Result<CVec> {
    let n = ensure_square(m)?;
    let mut v = CVec::zeros(n * n);
    for a in 0..n {
        for b in 0..n {
            v[a * n + b] = m[(a, b)];
        }
    }
    Ok(v)
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &CVec, n: usize) -> Result<CMat> {
    if v.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, found: v.len() });
    }
    Ok(CMat::from_fn(n, n, |a, b| v[a * n + b]))
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Partial trace over one factor of `H_A ⊗ H_B`.
pub fn partial_trace(m: &CMat, side: Side, idx: BipartiteIndex) -> Result<CMat> {
    let d = ensure_square(m)?;
    if d != idx.total() {
        return Err(Error::DimensionMismatch { expected: idx.total(), found: d });
    }
    let (da, db) = (idx.dim_a, idx.dim_b);
    Ok(match side {
        Side::B => CMat::from_fn(da, da, |a, a2| {
            (0..db).map(|b| m[(a * db + b, a2 * db + b)]).sum()
        }),
        Side::A => CMat::from_fn(db, db, |b, b2| {
            (0..da).map(|a| m[(a * db + b, a * db + b2)]).sum()
        }),
    })
}

/// `Tr_A` on the square bipartite space of dimension `n * n`.
pub fn trace_a(m: &CMat, n: usize) -> Result<CMat> {
    partial_trace(m, Side::A, BipartiteIndex::square(n)?)
}

/// `Tr_B` on the square bipartite space of dimension `n * n`.
pub fn trace_b(m: &CMat, n: usize) -> Result<CMat> {
    partial_trace(m, Side::B, BipartiteIndex::square(n)?)
}

/// Hilbert–Schmidt inner product `Tr(A† B)`.
pub fn hs_inner(a: &CMat, b: &CMat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `Re Tr(A B)`, the real pairing used for Hermitian data.
pub fn re_trace_product(a: &CMat, b: &CMat) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for k in 0..a.ncols() {
            s += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    s
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}

pub fn frob(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hermitian_residual(m: &CMat) -> f64 {
    frob(&(m - m.adjoint()))
}

pub fn is_hermitian(m: &CMat, herm_tol: f64) -> bool {
    m.nrows() == m.ncols() && hermitian_residual(m) <= herm_tol * (1.0 + frob(m))
}

pub fn ensure_hermitian(m: &CMat) -> Result<()> {
    ensure_square(m)?;
    let r = hermitian_residual(m);
    if r > tol::HERM * (1.0 + frob(m)) {
        return Err(Error::NotHermitian { residual: r });
    }
    Ok(())
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = zeros(n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(hermitian_part(m)).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_eig(m: &CMat) -> f64 {
    eigvalsh(m).first().copied().unwrap_or(0.0)
}

pub fn max_eig(m: &CMat) -> f64 {
    eigvalsh(m).last().copied().unwrap_or(0.0)
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    m.clone().singular_values().iter().copied().collect()
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// Sum of singular values.
pub fn trace_norm(m: &CMat) -> f64 {
    singular_values(m).into_iter().sum()
}

/// Apply `f` to the spectrum of a Hermitian matrix.
pub fn spectral_map(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh(m);
    let d = CMat::from_diagonal(&CVec::from_iterator(vals.len(), vals.iter().map(|&x| c(f(x), 0.0))));
    &vecs * d * vecs.adjoint()
}

fn psd_floor(m: &CMat) -> f64 {
    -tol::EIG * (1.0 + frob(m))
}

/// Fail unless `m` is Hermitian PSD up to the library tolerances.
pub fn ensure_psd(m: &CMat) -> Result<()> {
    ensure_hermitian(m)?;
    let e = min_eig(m);
    if e < psd_floor(m) {
        return Err(Error::NotPsd { min_eig: e });
    }
    Ok(())
}

/// Principal square root of a PSD matrix.
pub fn psd_sqrt(m: &CMat) -> Result<CMat> {
    ensure_hermitian(m)?;
    let (vals, _) = eigh(m);
    if let Some(&e) = vals.first() {
        if e < psd_floor(m) {
            return Err(Error::NotPsd { min_eig: e });
        }
    }
    Ok(spectral_map(m, |x| x.max(0.0).sqrt()))
}

/// Moore–Penrose pseudo-inverse with cutoff `PINV * sigma_max`.
pub fn pinv(m: &CMat) -> CMat {
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = tol::PINV * smax;
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let k = svd.singular_values.len();
    let mut out = CMat::zeros(m.ncols(), m.nrows());
    for i in 0..k {
        let s = svd.singular_values[i];
        if s > cut && s > 0.0 {
            let ui = u.column(i);
            let vi = vt.row(i).adjoint();
            out += (vi * ui.adjoint()).scale(1.0 / s);
        }
    }
    out
}

/// Inverse of a Hermitian positive definite matrix.
pub fn inv_pd(m: &CMat) -> Result<CMat> {
    let (vals, _) = eigh(m);
    let top = vals.last().copied().unwrap_or(0.0);
    if vals.first().copied().unwrap_or(0.0) <= tol::PINV * top.max(f64::MIN_POSITIVE) {
        return Err(Error::Singular);
    }
    Ok(spectral_map(m, |x| 1.0 / x))
}

/// Handle vector `h = pinv(sqrt(M)) x`; requires `M ⪰ |x><x|`, giving `<h|h> <= 1`.
pub fn handle_vector(m: &CMat, x: &CVec) -> Result<CVec> {
    let n = ensure_square(m)?;
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    let gap = m - x * x.adjoint();
    let e = min_eig(&gap);
    if e < psd_floor(m) {
        return Err(Error::PreconditionViolated(format!(
            "M - |x><x| has eigenvalue {e:.3e}"
        )));
    }
    let root = psd_sqrt(m)?;
    Ok(pinv(&root) * x)
}

/// Real symmetric image `[[Re M, -Im M], [Im M, Re M]]` of a Hermitian matrix.
pub fn realify(m: &CMat) -> Result<RMat> {
    ensure_hermitian(m)?;
    Ok(realify_any(m))
}

/// Real image of an arbitrary complex matrix; an algebra homomorphism.
pub fn realify_any(m: &CMat) -> RMat {
    let (r, k) = (m.nrows(), m.ncols());
    let mut out = RMat::zeros(2 * r, 2 * k);
    for i in 0..r {
        for j in 0..k {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i + r, j + k)] = z.re;
            out[(i, j + k)] = -z.im;
            out[(i + r, j)] = z.im;
        }
    }
    out
}

/// Map a realified matrix back, averaging the two real copies.
pub fn derealify(r: &RMat) -> CMat {
    let n = r.nrows() / 2;
    CMat::from_fn(n, n, |i, j| {
        let re = 0.5 * (r[(i, j)] + r[(i + n, j + n)]);
        let im = 0.5 * (r[(i + n, j)] - r[(i, j + n)]);
        c(re, im)
    })
}

pub fn transpose(m: &CMat) -> CMat {
    m.transpose()
}

/// Random-free helpers for building Hermitian bases of `L(C^n)`.
///
/// Orthonormal in the Hilbert–Schmidt inner product: `E_ii`, then for `i < j`
/// the pair `(E_ij + E_ji)/sqrt 2`, `i(E_ij - E_ji)/sqrt 2`.
pub fn hermitian_matrix_basis(n: usize) -> Vec<CMat> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(unit(n, i, i));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut re = zeros(n);
            re[(i, j)] = c(s, 0.0);
            re[(j, i)] = c(s, 0.0);
            out.push(re);
            let mut im = zeros(n);
            im[(i, j)] = c(0.0, s);
            im[(j, i)] = c(0.0, -s);
            out.push(im);
        }
    }
    out
}

/// Orthonormal Hermitian basis of the trace-free matrices; `n^2 - 1` elements.
pub fn traceless_hermitian_basis(n: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(n * n - 1);
    // Diagonal part: generalized Gell-Mann diagonals.
    for k in 1..n {
        let norm = 1.0 / ((k * (k + 1)) as f64).sqrt();
        let mut d = zeros(n);
        for i in 0..k {
            d[(i, i)] = c(norm, 0.0);
        }
        d[(k, k)] = c(-(k as f64) * norm, 0.0);
        out.push(d);
    }
    out.extend(hermitian_matrix_basis(n).into_iter().skip(n));
    out
}

/// Coordinates of a Hermitian matrix in an orthonormal Hermitian basis.
pub fn hermitian_coords(m: &CMat, basis: &[CMat]) -> Vec<f64> {
    basis.iter().map(|b| re_trace_product(b, m)).collect()
}

pub fn combine(coeffs: &[f64], basis: &[CMat], n: usize) -> CMat {
    let mut out = zeros(n);
    for (x, b) in coeffs.iter().zip(basis) {
        if *x != 0.0 {
            out += b.scale(*x);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CMat {
        CMat::from_fn(3, 3, |i, j| c((i * 3 + j) as f64 * 0.1 + 0.2, (i as f64) - (j as f64) * 0.5))
    }

    #[test]
    fn vectorize_round_trip() {
        let m = sample();
        let v = vectorize(&m).unwrap();
        assert_eq!(v[1 * 3 + 2], m[(1, 2)]);
        assert_eq!(unvectorize(&v, 3).unwrap(), m);
    }

    #[test]
    fn vectorize_matches_tensor_with_phi() {
        let m = sample();
        let phi = max_ent_vector(3).unwrap();
        let lhs = kron(&m, &identity(3)) * &phi;
        let rhs = kron(&identity(3), &m.transpose()) * &phi;
        assert!((vectorize(&m).unwrap() - &lhs).norm() < 1e-14);
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = sample();
        let b = CMat::from_fn(2, 2, |i, j| c(1.0 + i as f64, j as f64));
        let idx = BipartiteIndex::new(3, 2).unwrap();
        let ab = kron(&a, &b);
        let tb = partial_trace(&ab, Side::B, idx).unwrap();
        let ta = partial_trace(&ab, Side::A, idx).unwrap();
        assert!((tb - a.scale(1.0).map(|z| z * trace(&b))).norm() < 1e-13);
        assert!((ta - b.map(|z| z * trace(&a))).norm() < 1e-13);
    }

    #[test]
    fn partial_trace_dimension_error() {
        let m = zeros(5);
        assert!(partial_trace(&m, Side::A, BipartiteIndex::square(2).unwrap()).is_err());
    }

    #[test]
    fn realify_spectrum_doubles() {
        let h = hermitian_part(&sample());
        let r = realify(&h).unwrap();
        let mut rv: Vec<f64> = nalgebra::SymmetricEigen::new(r).eigenvalues.iter().copied().collect();
        rv.sort_by(f64::total_cmp);
        let hv = eigvalsh(&h);
        for (k, x) in hv.iter().enumerate() {
            assert!((rv[2 * k] - x).abs() < 1e-12);
            assert!((rv[2 * k + 1] - x).abs() < 1e-12);
        }
    }

    #[test]
    fn realify_rejects_non_hermitian() {
        assert!(matches!(realify(&sample()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn realify_trace_pairing() {
        let a = hermitian_part(&sample());
        let b = hermitian_part(&(sample() * sample().adjoint()));
        let lhs = (realify(&a).unwrap() * realify(&b).unwrap()).trace();
        assert!((lhs - 2.0 * re_trace_product(&a, &b)).abs() < 1e-12);
        assert!((derealify(&realify(&a).unwrap()) - a).norm() < 1e-15);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let m = sample() * sample().adjoint();
        let r = psd_sqrt(&m).unwrap();
        assert!((&r * &r - &m).norm() < 1e-10);
        let neg = -identity(2);
        assert!(matches!(psd_sqrt(&neg), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn handle_vector_norm_bound() {
        let x = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let m = &x * x.adjoint() + identity(2).scale(0.5);
        let h = handle_vector(&m, &x).unwrap();
        assert!(h.norm_squared() <= 1.0 + 1e-12);
        // rank-deficient M = xx† gives <h|h> = 1 exactly
        let h1 = handle_vector(&(&x * x.adjoint()), &x).unwrap();
        assert!((h1.norm_squared() - 1.0).abs() < 1e-9);
        assert!(handle_vector(&identity(2).scale(0.1), &x).is_err());
    }

    #[test]
    fn hermitian_bases_are_orthonormal() {
        for n in 1..5 {
            for basis in [hermitian_matrix_basis(n), traceless_hermitian_basis(n)] {
                for (i, a) in basis.iter().enumerate() {
                    assert!(is_hermitian(a, 1e-14));
                    for (j, b) in basis.iter().enumerate() {
                        let g = hs_inner(a, b);
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((g - c(want, 0.0)).norm() < 1e-13);
                    }
                }
            }
            assert_eq!(traceless_hermitian_basis(n).len(), n * n - 1);
        }
    }

    #[test]
    fn norms_of_diagonal() {
        let d = CMat::from_diagonal(&CVec::from_vec(vec![c(3.0, 0.0), c(-1.0, 0.0)]));
        assert!((op_norm(&d) - 3.0).abs() < 1e-12);
        assert!((trace_norm(&d) - 4.0).abs() < 1e-12);
        assert!((min_eig(&d) + 1.0).abs() < 1e-12);
    }
}
