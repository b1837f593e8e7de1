//! Primal-dual path-following on real symmetric block cones.
//!
//! Solves `min <C, X>` s.t. `<A_k, X> = b_k`, `X ⪰ 0` together with its dual
//! `max b·y` s.t. `Z = C - Σ y_k A_k ⪰ 0`, using Nesterov–Todd scaling and a
//! Mehrotra predictor-corrector step. Constraint matrices are sparse.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use super::{SdpOptions, SdpStatus};

pub(crate) type Mat = DMatrix<f64>;

/// Symmetric sparse matrix, all nonzeros stored (both triangles).
#[derive(Debug, Clone, Default)]
pub(crate) struct Sparse {
    pub entries: Vec<(usize, usize, f64)>,
}

impl Sparse {
    fn dot(&self, m: &Mat) -> f64 {
        self.entries.iter().map(|&(i, j, v)| v * m[(i, j)]).sum()
    }

    fn add_to(&self, m: &mut Mat, scale: f64) {
        for &(i, j, v) in &self.entries {
            m[(i, j)] += scale * v;
        }
    }

    fn frob_sq(&self) -> f64 {
        self.entries.iter().map(|e| e.2 * e.2).sum()
    }
}

pub(crate) struct RealProblem {
    pub dims: Vec<usize>,
    pub c: Vec<Mat>,
    /// `a[k]` lists `(block, matrix)` for constraint `k`.
    pub a: Vec<Vec<(usize, Sparse)>>,
    pub b: DVector<f64>,
}

pub(crate) struct RealSolution {
    pub status: SdpStatus,
    pub x: Vec<Mat>,
    pub y: DVector<f64>,
    pub z: Vec<Mat>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub rel_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
}

struct Residuals {
    rp: DVector<f64>,
    rd: Vec<Mat>,
    pobj: f64,
    dobj: f64,
    rel_gap: f64,
    pinf: f64,
    dinf: f64,
    mu: f64,
}

fn inner(a: &Mat, b: &Mat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn sym(m: Mat) -> Mat {
    (&m + m.transpose()) * 0.5
}

impl RealProblem {
    fn m(&self) -> usize {
        self.b.len()
    }

    fn apply(&self, x: &[Mat]) -> DVector<f64> {
        DVector::from_iterator(
            self.m(),
            self.a.iter().map(|row| row.iter().map(|(j, s)| s.dot(&x[*j])).sum()),
        )
    }

    fn adjoint(&self, y: &DVector<f64>) -> Vec<Mat> {
        let mut out: Vec<Mat> = self.dims.iter().map(|&d| Mat::zeros(d, d)).collect();
        for (k, row) in self.a.iter().enumerate() {
            if y[k] != 0.0 {
                for (j, s) in row {
                    s.add_to(&mut out[*j], y[k]);
                }
            }
        }
        out
    }

    fn residuals(&self, x: &[Mat], y: &DVector<f64>, z: &[Mat], norm_b: f64, norm_c: f64) -> Residuals {
        let rp = &self.b - self.apply(x);
        let aty = self.adjoint(y);
        let rd: Vec<Mat> = (0..self.dims.len()).map(|j| &self.c[j] - &z[j] - &aty[j]).collect();
        let pobj: f64 = (0..self.dims.len()).map(|j| inner(&self.c[j], &x[j])).sum();
        let dobj = self.b.dot(y);
        let xz: f64 = (0..self.dims.len()).map(|j| inner(&x[j], &z[j])).sum();
        let nu: usize = self.dims.iter().sum();
        let denom = 1.0 + pobj.abs() + dobj.abs();
        let rel_gap = (pobj - dobj).abs().max(xz.abs()) / denom;
        let pinf = rp.norm() / (1.0 + norm_b);
        let dinf = rd.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt() / (1.0 + norm_c);
        Residuals { rp, rd, pobj, dobj, rel_gap, pinf, dinf, mu: xz / nu as f64 }
    }
}

/// Per-block Nesterov–Todd scaling `W = G Gᵀ` with `Gᵀ Z G = G⁻¹ X G⁻ᵀ = diag(d)`.
struct Scaling {
    g: Mat,
    g_inv: Mat,
    w: Mat,
    d: DVector<f64>,
}

fn nt_scaling(x: &Mat, z: &Mat) -> Option<Scaling> {
    let lx = Cholesky::new(x.clone())?.unpack();
    let lz = Cholesky::new(z.clone())?.unpack();
    let svd = (lz.transpose() * &lx).svd(true, true);
    let u_t = svd.v_t?;
    let d = svd.singular_values;
    if d.iter().any(|&s| !(s > 0.0)) {
        return None;
    }
    let v = u_t.transpose();
    let n = x.nrows();
    let mut g = &lx * &v;
    for j in 0..n {
        let s = 1.0 / d[j].sqrt();
        g.column_mut(j).scale_mut(s);
    }
    // G⁻¹ = Σ^{1/2} Vᵀ Lx⁻¹
    let lx_inv = lx.clone().solve_lower_triangular(&Mat::identity(n, n))?;
    let mut g_inv = u_t * lx_inv;
    for i in 0..n {
        let s = d[i].sqrt();
        g_inv.row_mut(i).scale_mut(s);
    }
    let w = sym(&g * g.transpose());
    Some(Scaling { g, g_inv, w, d })
}

/// Largest step `α` with `diag(d) + α ΔS ⪰ 0`, given a scaled direction.
fn max_step(d: &DVector<f64>, ds: &Mat) -> f64 {
    let n = d.len();
    let inv: Vec<f64> = d.iter().map(|x| 1.0 / x.sqrt()).collect();
    let q = Mat::from_fn(n, n, |i, j| ds[(i, j)] * inv[i] * inv[j]);
    let lmin = SymmetricEigen::new(sym(q)).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

struct Schur {
    m: Mat,
    chol: Cholesky<f64, nalgebra::Dyn>,
}

impl Schur {
    /// Solve with the regularized factor, then refine against the exact matrix.
    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mut x = self.chol.solve(rhs);
        for _ in 0..3 {
            let r = rhs - &self.m * &x;
            if r.norm() <= 1e-15 * rhs.norm() {
                break;
            }
            x += self.chol.solve(&r);
        }
        x
    }
}

fn schur_matrix(p: &RealProblem, scal: &[Scaling], reg: f64) -> Option<Schur> {
    let m = p.m();
    let mut mm = Mat::zeros(m, m);
    // Group constraints by block for the W A_k W products.
    for (blk, s) in scal.iter().enumerate() {
        let n = p.dims[blk];
        let w = &s.w;
        let touching: Vec<(usize, &Sparse)> = p
            .a
            .iter()
            .enumerate()
            .filter_map(|(k, row)| row.iter().find(|(j, _)| *j == blk).map(|(_, sp)| (k, sp)))
            .collect();
        let mut t = Mat::zeros(n, n);
        for (idx, &(k, ak)) in touching.iter().enumerate() {
            t.fill(0.0);
            if ak.entries.len() < n {
                for &(pi, qi, v) in &ak.entries {
                    // v * W[:, p] W[q, :]
                    for c in 0..n {
                        let wq = w[(qi, c)] * v;
                        if wq != 0.0 {
                            for r in 0..n {
                                t[(r, c)] += w[(r, pi)] * wq;
                            }
                        }
                    }
                }
            } else {
                let mut aw = Mat::zeros(n, n);
                for &(pi, qi, v) in &ak.entries {
                    for c in 0..n {
                        aw[(pi, c)] += v * w[(qi, c)];
                    }
                }
                t = w * aw;
            }
            for &(l, al) in &touching[idx..] {
                let val = al.dot(&t);
                mm[(k, l)] += val;
                if l != k {
                    mm[(l, k)] += val;
                }
            }
        }
    }
    if let Some(chol) = Cholesky::new(mm.clone()) {
        return Some(Schur { m: mm, chol });
    }
    // Regularize only when the plain factorization breaks down.
    let scale = (0..m).map(|i| mm[(i, i)].abs()).fold(0.0, f64::max).max(1.0);
    let mut shift = reg * scale;
    for _ in 0..8 {
        let mut reg_m = mm.clone();
        for i in 0..m {
            reg_m[(i, i)] += shift;
        }
        if let Some(chol) = Cholesky::new(reg_m) {
            return Some(Schur { m: mm, chol });
        }
        shift *= 100.0;
    }
    None
}

struct Direction {
    dx: Vec<Mat>,
    dy: DVector<f64>,
    dz: Vec<Mat>,
}

/// Scaled constraint matrix `B = [svec(Gᵀ A_k G)]` with its thin QR factors.
/// Used when the normal equations lose too much accuracy: the primal part of
/// the direction is then `h + Q u`, whose error scales with the direction
/// rather than with `||M|| ||dy||`.
struct ScaledQr {
    q: Mat,
    r: Mat,
    offsets: Vec<usize>,
}

fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

fn svec_into(m: &Mat, out: &mut [f64]) {
    let n = m.nrows();
    let mut idx = 0;
    for c in 0..n {
        for r in 0..=c {
            out[idx] = if r == c { m[(r, c)] } else { std::f64::consts::SQRT_2 * 0.5 * (m[(r, c)] + m[(c, r)]) };
            idx += 1;
        }
    }
}

fn smat(v: &[f64], n: usize) -> Mat {
    let mut m = Mat::zeros(n, n);
    let mut idx = 0;
    for c in 0..n {
        for r in 0..=c {
            if r == c {
                m[(r, c)] = v[idx];
            } else {
                let x = v[idx] * std::f64::consts::FRAC_1_SQRT_2;
                m[(r, c)] = x;
                m[(c, r)] = x;
            }
            idx += 1;
        }
    }
    m
}

impl ScaledQr {
    fn new(p: &RealProblem, scal: &[Scaling]) -> Option<Self> {
        let mut offsets = Vec::with_capacity(p.dims.len() + 1);
        let mut total = 0;
        for &d in &p.dims {
            offsets.push(total);
            total += svec_len(d);
        }
        offsets.push(total);
        let m = p.m();
        if total < m {
            return None;
        }
        let mut b = Mat::zeros(total, m);
        let mut buf = Vec::new();
        for (k, row) in p.a.iter().enumerate() {
            for (j, sp) in row {
                let n = p.dims[*j];
                let g = &scal[*j].g;
                let mut t = Mat::zeros(n, n);
                for &(pi, qi, v) in &sp.entries {
                    for c in 0..n {
                        t[(pi, c)] += v * g[(qi, c)];
                    }
                }
                let at = g.transpose() * t;
                buf.resize(svec_len(n), 0.0);
                svec_into(&at, &mut buf);
                for (i, x) in buf.iter().enumerate() {
                    b[(offsets[*j] + i, k)] += x;
                }
            }
        }
        let qr = b.qr();
        let r = qr.r();
        let rmax = r.diagonal().iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if r.diagonal().iter().any(|x| !(x.abs() > 1e-14 * rmax)) {
            return None;
        }
        Some(ScaledQr { q: qr.q(), r, offsets })
    }
}

/// Solve for a direction given the scaled complementarity right-hand side `rc_t`.
fn direction(
    p: &RealProblem,
    scal: &[Scaling],
    schur: &Schur,
    qr: &mut Option<Option<ScaledQr>>,
    res: &Residuals,
    rc_t: &[Mat],
    ptol: f64,
) -> Direction {
    let nb = p.dims.len();
    // Rc = G Rc~ Gᵀ ; rhs = rp - A(Rc - W Rd W)
    let rc: Vec<Mat> = (0..nb).map(|j| sym(&scal[j].g * &rc_t[j] * scal[j].g.transpose())).collect();
    let tmp: Vec<Mat> = (0..nb)
        .map(|j| &rc[j] - &scal[j].w * &res.rd[j] * &scal[j].w)
        .collect();
    let rhs = &res.rp - p.apply(&tmp);
    let mut dy = schur.solve(&rhs);
    // Refine against the operator itself: the assembled M carries rounding
    // that would otherwise show up as primal infeasibility.
    let mut err = f64::INFINITY;
    for _ in 0..8 {
        let aty = p.adjoint(&dy);
        let wdw: Vec<Mat> = (0..nb).map(|j| &scal[j].w * &aty[j] * &scal[j].w).collect();
        let r = &rhs - p.apply(&wdw);
        err = r.norm();
        if err <= 1e-15 * (1.0 + rhs.norm()) {
            break;
        }
        dy += schur.solve(&r);
    }
    if err > ptol {
        let f = qr.get_or_insert_with(|| ScaledQr::new(p, scal));
        if let Some(f) = f {
            return qr_direction(p, scal, f, res, rc_t, &rhs);
        }
    }
    let aty = p.adjoint(&dy);
    let dz: Vec<Mat> = (0..nb).map(|j| sym(&res.rd[j] - &aty[j])).collect();
    let dx: Vec<Mat> = (0..nb).map(|j| sym(&rc[j] - &scal[j].w * &dz[j] * &scal[j].w)).collect();
    Direction { dx, dy, dz }
}

fn qr_direction(
    p: &RealProblem,
    scal: &[Scaling],
    f: &ScaledQr,
    res: &Residuals,
    rc_t: &[Mat],
    rhs: &DVector<f64>,
) -> Direction {
    let nb = p.dims.len();
    let u = f.r.transpose().solve_lower_triangular(rhs).expect("R has a nonzero diagonal");
    let qu = &f.q * &u;
    let dy = f.r.solve_upper_triangular(&u).expect("R has a nonzero diagonal");
    let aty = p.adjoint(&dy);
    let dz: Vec<Mat> = (0..nb).map(|j| sym(&res.rd[j] - &aty[j])).collect();
    let dx: Vec<Mat> = (0..nb)
        .map(|j| {
            let n = p.dims[j];
            let g = &scal[j].g;
            let h = &rc_t[j] - g.transpose() * &res.rd[j] * g;
            let dxt = sym(h + smat(&qu.as_slice()[f.offsets[j]..f.offsets[j + 1]], n));
            sym(g * dxt * g.transpose())
        })
        .collect();
    Direction { dx, dy, dz }
}

fn scaled(scal: &Scaling, dx: &Mat, dz: &Mat) -> (Mat, Mat) {
    let sx = sym(&scal.g_inv * dx * scal.g_inv.transpose());
    let sz = sym(scal.g.transpose() * dz * &scal.g);
    (sx, sz)
}

fn step_lengths(scal: &[Scaling], dir: &Direction) -> (f64, f64, Vec<(Mat, Mat)>) {
    let mut ap = f64::INFINITY;
    let mut ad = f64::INFINITY;
    let mut sc = Vec::with_capacity(scal.len());
    for (j, s) in scal.iter().enumerate() {
        let (sx, sz) = scaled(s, &dir.dx[j], &dir.dz[j]);
        ap = ap.min(max_step(&s.d, &sx));
        ad = ad.min(max_step(&s.d, &sz));
        sc.push((sx, sz));
    }
    (ap, ad, sc)
}

fn initial_point(p: &RealProblem) -> (Vec<Mat>, Vec<Mat>) {
    let nb = p.dims.len();
    let mut x = Vec::with_capacity(nb);
    let mut z = Vec::with_capacity(nb);
    for j in 0..nb {
        let n = p.dims[j] as f64;
        let mut xi: f64 = 10.0f64.max(n.sqrt());
        let mut eta: f64 = 10.0f64.max(n.sqrt()).max(p.c[j].norm());
        for (k, row) in p.a.iter().enumerate() {
            for (blk, s) in row {
                if *blk == j {
                    let na = s.frob_sq().sqrt();
                    xi = xi.max(n.sqrt() * (1.0 + p.b[k].abs()) / (1.0 + na));
                    eta = eta.max(na);
                }
            }
        }
        eta = eta.max((1.0 + p.c[j].norm()) / n.sqrt());
        x.push(Mat::identity(p.dims[j], p.dims[j]) * xi);
        z.push(Mat::identity(p.dims[j], p.dims[j]) * eta);
    }
    (x, z)
}

pub(crate) fn solve(p: &RealProblem, opts: &SdpOptions) -> RealSolution {
    let nb = p.dims.len();
    let (mut x, mut z) = initial_point(p);
    let mut y = DVector::zeros(p.m());
    let norm_b = p.b.norm();
    let norm_c = p.c.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt();

    let mut status = SdpStatus::MaxIterations;
    let mut iterations = 0;
    let mut res = p.residuals(&x, &y, &z, norm_b, norm_c);
    let mut best: Option<(f64, Vec<Mat>, DVector<f64>, Vec<Mat>)> = None;

    for it in 0..opts.max_iter {
        iterations = it;
        let merit = res.rel_gap.max(res.pinf).max(res.dinf);
        if best.as_ref().is_none_or(|b| merit < b.0) {
            best = Some((merit, x.clone(), y.clone(), z.clone()));
        }
        if merit <= opts.tol {
            status = SdpStatus::Optimal;
            break;
        }
        // Infeasibility certificates along a diverging iterate.
        let aty_z: f64 = {
            let aty = p.adjoint(&y);
            (0..nb).map(|j| (&aty[j] + &z[j]).norm_squared()).sum::<f64>().sqrt()
        };
        if res.dobj > 1e8 && aty_z / res.dobj < opts.tol.max(1e-9) {
            status = SdpStatus::Infeasible;
            break;
        }
        let ax = p.apply(&x).norm();
        if res.pobj < -1e8 && ax / (-res.pobj) < opts.tol.max(1e-9) {
            status = SdpStatus::Unbounded;
            break;
        }

        let Some(scal) = (0..nb).map(|j| nt_scaling(&x[j], &z[j])).collect::<Option<Vec<_>>>() else {
            break;
        };
        let Some(schur) = schur_matrix(p, &scal, opts.regularization) else {
            break;
        };
        let mut qr = None;
        let ptol = 0.1 * opts.tol * (1.0 + norm_b);

        // Predictor.
        let rc_aff: Vec<Mat> = scal.iter().map(|s| Mat::from_diagonal(&(-&s.d))).collect();
        let aff = direction(p, &scal, &schur, &mut qr, &res, &rc_aff, ptol);
        let (ap, ad, sc_aff) = step_lengths(&scal, &aff);
        let ap1 = ap.min(1.0);
        let ad1 = ad.min(1.0);
        let mut xz_aff = 0.0;
        for j in 0..nb {
            let xa = &x[j] + &aff.dx[j] * ap1;
            let za = &z[j] + &aff.dz[j] * ad1;
            xz_aff += inner(&xa, &za);
        }
        let nu: usize = p.dims.iter().sum();
        let mu_aff = xz_aff / nu as f64;
        let ratio = (mu_aff / res.mu).clamp(0.0, 1.0);
        let expon = if res.mu > 1e-6 { 2.0f64.max(3.0 * ap1.min(ad1).powi(2)) } else { 3.0 };
        let sigma = ratio.powf(expon).clamp(0.0, 1.0);

        // Corrector.
        let rc_cor: Vec<Mat> = scal
            .iter()
            .zip(&sc_aff)
            .map(|(s, (sx, sz))| {
                let n = s.d.len();
                let prod = sym(sx * sz);
                Mat::from_fn(n, n, |i, k| {
                    let mut r = -prod[(i, k)];
                    if i == k {
                        r += sigma * res.mu - s.d[i] * s.d[i];
                    }
                    2.0 * r / (s.d[i] + s.d[k])
                })
            })
            .collect();
        let dir = direction(p, &scal, &schur, &mut qr, &res, &rc_cor, ptol);
        let (ap, ad, _) = step_lengths(&scal, &dir);
        let gamma = 0.9 + 0.09 * ap1.min(ad1);
        let alpha_p = (gamma * ap).min(1.0);
        let alpha_d = (gamma * ad).min(1.0);

        for j in 0..nb {
            x[j] = sym(&x[j] + &dir.dx[j] * alpha_p);
            z[j] = sym(&z[j] + &dir.dz[j] * alpha_d);
        }
        y += &dir.dy * alpha_d;
        res = p.residuals(&x, &y, &z, norm_b, norm_c);
        iterations = it + 1;
    }

    if status == SdpStatus::MaxIterations {
        let merit = res.rel_gap.max(res.pinf).max(res.dinf);
        if merit <= opts.tol {
            status = SdpStatus::Optimal;
        } else if let Some((bm, bx, by, bz)) = best {
            if bm < merit {
                x = bx;
                y = by;
                z = bz;
                res = p.residuals(&x, &y, &z, norm_b, norm_c);
            }
        }
    }

    RealSolution {
        status,
        x,
        y,
        z,
        primal_objective: res.pobj,
        dual_objective: res.dobj,
        rel_gap: res.rel_gap,
        primal_infeasibility: res.pinf,
        dual_infeasibility: res.dinf,
        iterations,
    }
}
