//! Verification suites over seeded random instances.
//!
//! Each suite evaluates one family of identities or inequalities and emits a
//! [`CheckRecord`] per check. Reports are deterministic for a fixed seed:
//! instances are drawn in a fixed order and wall-clock time never reaches
//! the serialized lines.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::cstar::{self, complement, S0Algebra};
use crate::error::{Error, Result};
use crate::linalg::{self, c, identity, kron, CMat};
use crate::random::{self, InstanceRng};
use crate::sdp::{LmiBuilder, SdpOptions, SolveDiagnostics};
use crate::subspace::{NcGraph, OperatorSubspace};
use crate::theta::{self, Form, WeightMatrix};

/// Largest instance size accepted by the suites.
pub const MAX_N: usize = 5;

/// Tolerance ladder.
pub mod tol {
    /// Equalities between different programs.
    pub const EQUALITY: f64 = 1e-5;
    /// Inequalities, as absolute slack.
    pub const INEQUALITY: f64 = 1e-7;
    /// Agreement of the alternate forms, relative to `1 + λ`.
    pub const FORMS: f64 = 1e-6;
    /// Closed forms and identities that involve a single program.
    pub const CLOSED_FORM: f64 = 1e-6;
    /// Exact algebraic identities.
    pub const ALGEBRAIC: f64 = 1e-10;
    /// Reported gap and PSD residuals of every solve.
    pub const SOLVER: f64 = 1e-8;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Forms,
    BasicProps,
    Continuity,
    Holder,
    ThinDiag,
    Dwd,
    Product,
    Abpsi,
    Gamma2,
    Sandwich,
    Compatible,
    Twirl,
    Classical,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::Forms,
        Suite::BasicProps,
        Suite::Continuity,
        Suite::Holder,
        Suite::ThinDiag,
        Suite::Dwd,
        Suite::Product,
        Suite::Abpsi,
        Suite::Gamma2,
        Suite::Sandwich,
        Suite::Compatible,
        Suite::Twirl,
        Suite::Classical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Forms => "forms",
            Suite::BasicProps => "basic-props",
            Suite::Continuity => "continuity",
            Suite::Holder => "holder",
            Suite::ThinDiag => "thin-diag",
            Suite::Dwd => "dwd",
            Suite::Product => "product",
            Suite::Abpsi => "abpsi",
            Suite::Gamma2 => "gamma2",
            Suite::Sandwich => "sandwich",
            Suite::Compatible => "compatible",
            Suite::Twirl => "twirl",
            Suite::Classical => "classical",
        }
    }

    fn default_trials(self) -> usize {
        match self {
            Suite::Forms | Suite::Holder | Suite::Twirl => 10,
            Suite::Product | Suite::Compatible => 3,
            _ => 5,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.iter().copied().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
            Error::Parse(format!("unknown suite '{s}' (known: {})", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub n: usize,
    pub seed: u64,
    /// `None` picks the suite's default.
    pub trials: Option<usize>,
    /// Block structure for the `S0` suites; `None` cycles through a fixed list.
    pub blocks: Option<S0Algebra>,
    pub solver: SdpOptions,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { n: 3, seed: 42, trials: None, blocks: None, solver: SdpOptions::default() }
    }
}

/// One check inside a suite.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub suite: &'static str,
    pub name: String,
    pub anchor: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub n: usize,
    pub trials: usize,
    pub records: Vec<CheckRecord>,
    /// Every solve performed by the suite, in order.
    pub diagnostics: Vec<SolveDiagnostics>,
}

#[derive(Serialize)]
struct Aggregate<'a> {
    suite: &'a str,
    seed: u64,
    n: usize,
    trials: usize,
    checks: usize,
    failed: usize,
    solves: usize,
    pass: bool,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    /// One JSON object per check, then one aggregate line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        let agg = Aggregate {
            suite: self.suite.name(),
            seed: self.seed,
            n: self.n,
            trials: self.trials,
            checks: self.records.len(),
            failed: self.failed().count(),
            solves: self.diagnostics.len(),
            pass: self.pass(),
        };
        out.push_str(&serde_json::to_string(&agg).expect("aggregate serializes"));
        out.push('\n');
        out
    }

    /// Human-readable table, including wall-clock time per check.
    pub fn summary_table(&self) -> String {
        let width = self.records.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
        let mut out = format!(
            "suite {} (seed {}, n {}, trials {})\n{:<width$}  {:>10}  {:>9}  {:>9}  result\n",
            self.suite, self.seed, self.n, self.trials, "check", "residual", "tolerance", "time"
        );
        for r in &self.records {
            out.push_str(&format!(
                "{:<width$}  {:>10.3e}  {:>9.1e}  {:>8.3}s  {}\n",
                r.name,
                r.residual,
                r.tolerance,
                r.elapsed.as_secs_f64(),
                if r.pass { "ok" } else { "FAIL" }
            ));
        }
        let failed = self.failed().count();
        out.push_str(&format!(
            "{} checks, {} failed, {} solves: {}\n",
            self.records.len(),
            failed,
            self.diagnostics.len(),
            if failed == 0 { "PASS" } else { "FAIL" }
        ));
        out
    }
}

/// Run one suite.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    if cfg.n < 2 || cfg.n > MAX_N {
        return Err(Error::InvalidDimension(format!("suite size n must lie in 2..={MAX_N}, got {}", cfg.n)));
    }
    let trials = cfg.trials.unwrap_or_else(|| suite.default_trials());
    let mut ctx = Ctx::new(suite, cfg);
    match suite {
        Suite::Forms => forms(&mut ctx, trials)?,
        Suite::BasicProps => basic_props(&mut ctx, trials)?,
        Suite::Continuity => continuity(&mut ctx, trials)?,
        Suite::Holder => holder(&mut ctx, trials)?,
        Suite::ThinDiag => thin_diag(&mut ctx, trials)?,
        Suite::Dwd => dwd(&mut ctx, trials)?,
        Suite::Product => product(&mut ctx, trials)?,
        Suite::Abpsi => abpsi(&mut ctx, trials)?,
        Suite::Gamma2 => gamma2(&mut ctx, trials)?,
        Suite::Sandwich => sandwich(&mut ctx, trials)?,
        Suite::Compatible => compatible(&mut ctx, trials)?,
        Suite::Twirl => twirl(&mut ctx, trials)?,
        Suite::Classical => classical(&mut ctx, trials)?,
    }
    ctx.solver_health();
    Ok(SuiteReport {
        suite,
        seed: cfg.seed,
        n: cfg.n,
        trials,
        records: ctx.records,
        diagnostics: ctx.diags,
    })
}

struct Ctx<'a> {
    suite: Suite,
    cfg: &'a VerifyConfig,
    rng: InstanceRng,
    records: Vec<CheckRecord>,
    diags: Vec<SolveDiagnostics>,
    clock: Instant,
}

impl<'a> Ctx<'a> {
    fn new(suite: Suite, cfg: &'a VerifyConfig) -> Self {
        Self {
            suite,
            cfg,
            rng: random::rng(cfg.seed),
            records: Vec::new(),
            diags: Vec::new(),
            clock: Instant::now(),
        }
    }

    fn opts(&self) -> &SdpOptions {
        &self.cfg.solver
    }

    fn record(&mut self, name: String, anchor: &'static str, residual: f64, tolerance: f64) {
        let now = Instant::now();
        let elapsed = now - self.clock;
        self.clock = now;
        self.records.push(CheckRecord {
            suite: self.suite.name(),
            name,
            anchor,
            residual,
            tolerance,
            pass: residual <= tolerance,
            elapsed,
        });
    }

    /// `|a - b| / (1 + |b|)` against `tolerance`.
    fn equal(&mut self, name: String, anchor: &'static str, a: f64, b: f64, tolerance: f64) {
        self.record(name, anchor, (a - b).abs() / (1.0 + b.abs()), tolerance);
    }

    /// Violation of `slack ≥ 0`.
    fn nonneg(&mut self, name: String, anchor: &'static str, slack: f64) {
        self.record(name, anchor, (-slack).max(0.0), tol::INEQUALITY);
    }

    fn flag(&mut self, name: String, anchor: &'static str, ok: bool) {
        self.record(name, anchor, if ok { 0.0 } else { 1.0 }, 0.0);
    }

    fn theta_form(&mut self, g: &NcGraph, w: &CMat, form: Form) -> Result<f64> {
        let r = theta::theta(g, &WeightMatrix::new(w.clone())?, form, self.opts())?;
        self.diags.extend(r.diagnostics.iter().copied());
        Ok(r.value)
    }

    fn theta(&mut self, g: &NcGraph, w: &CMat) -> Result<f64> {
        self.theta_form(g, w, Form::MinY)
    }

    fn psd(&mut self, n: usize) -> CMat {
        random::psd(n, &mut self.rng)
    }

    fn graph(&mut self, n: usize, trial: usize) -> Result<NcGraph> {
        random::nc_graph(n, 1 + trial % 3, &mut self.rng)
    }

    fn s0_for(&self, trial: usize) -> Result<S0Algebra> {
        match &self.cfg.blocks {
            Some(b) => Ok(b.clone()),
            None => S0Algebra::parse(DEFAULT_BLOCKS[trial % DEFAULT_BLOCKS.len()]),
        }
    }

    fn s0_graph(&mut self, trial: usize) -> Result<NcGraph> {
        let s0 = self.s0_for(trial)?;
        random::s0_graph(&s0, 2, &mut self.rng)
    }

    fn solver_health(&mut self) {
        let worst = self.diags.iter().map(|d| d.health_residual()).fold(0.0, f64::max);
        let name = format!("all {} solves", self.diags.len());
        self.record(name, "solver-health", worst, tol::SOLVER);
    }
}

/// Block specs cycled through when none is given.
pub const DEFAULT_BLOCKS: [&str; 3] = ["1x2,2x1", "2x2", "1x1,1x1,1x1"];

fn forms(ctx: &mut Ctx, trials: usize) -> Result<()> {
    let n = ctx.cfg.n;
    for t in 0..trials {
        let g = ctx.graph(n, t)?;
        let w = ctx.psd(n);
        let reference = ctx.theta(&g, &w)?;
        for form in Form::ALL.into_iter().skip(1) {
            let v = ctx.theta_form(&g, &w, form)?;
            let anchor = match form {
                Form::MaxT => "dual-program",
                Form::Schur => "schur-complement-form",
                _ => "alternate-forms-equivalence",
            };
            ctx.equal(format!("trial {t}: {form} vs min_Y"), anchor, v, reference, tol::FORMS);
        }
        let unweighted = ctx.theta(&g, &identity(n))?;
        let direct = unweighted_theta(ctx, &g)?;
        ctx.equal(format!("trial {t}: W = I reduction"), "unweighted-reduction", unweighted, direct, tol::FORMS);
    }
    Ok(())
}

/// The unweighted program `min λ` s.t. `Y ⪰ |Φ><Φ|`, `Y ∈ S ⊗ L(H_B)`,
/// `Tr_A Y ⪯ λ I`, assembled without going through [`WeightMatrix`].
fn unweighted_theta(ctx: &mut Ctx, g: &NcGraph) -> Result<f64> {
    let n = g.n();
    let s = g.space().hermitian_basis()?;
    let full = linalg::hermitian_matrix_basis(n);
    let phi = linalg::max_ent_vector(n)?;
    let mut lmi = LmiBuilder::new();
    let lam = lmi.add_var();
    let mut basis = Vec::with_capacity(s.len() * full.len());
    for a in &s {
        for b in &full {
            basis.push(kron(a, b));
        }
    }
    let y = lmi.add_matrix_var(basis, linalg::zeros(n * n));
    let b1 = lmi.add_block(-(&phi * phi.adjoint()));
    lmi.add_mapped(b1, &y, |m| m.clone());
    let b2 = lmi.add_block(linalg::zeros(n));
    lmi.add_term(b2, lam, identity(n));
    lmi.add_mapped(b2, &y, |m| -linalg::trace_a(m, n).expect("bipartite"));
    lmi.set_objective(lam, -1.0);
    let sol = lmi.solve(ctx.opts())?;
    ctx.diags.push(sol.diagnostics);
    Ok(sol.y[lam.0])
}

fn basic_props(ctx: &mut Ctx, trials: usize) -> Result<()> {
    let n = ctx.cfg.n;
    for t in 0..trials {
        let g = ctx.graph(n, t)?;
        let w = ctx.psd(n);
        let x = ctx.psd(n);
        let tw = ctx.theta(&g, &w)?;

        let mut gens = g.space().basis().to_vec();
        gens.push(random::hermitian(n, &mut ctx.rng));
        let bigger = NcGraph::new(OperatorSubspace::span(&gens, n)?, None)?;
        let tb = ctx.theta(&bigger, &w)?;
        ctx.nonneg(format!("trial {t}: S ⊆ S' lowers theta"), "subgraph-monotonicity", tw - tb);

        let wx = &w + &x;
        let twx = ctx.theta(&g, &wx)?;
        ctx.nonneg(format!("trial {t}: W ⪯ W + X raises theta"), "weight-monotonicity", twx - tw);

        let alpha = 0.5 + 2.0 * t as f64;
        let ta = ctx.theta(&g, &w.scale(alpha))?;
        ctx.equal(format!("trial {t}: scaling by {alpha}"), "homogeneity", ta / alpha, tw, tol::EQUALITY);

        let tx = ctx.theta(&g, &x)?;
        ctx.nonneg(format!("trial {t}: subadditivity"), "subadditivity", tw + tx - twx);

        let norm = linalg::op_norm(&w);
        let upper = n as f64 * linalg::trace(&w).re;
        ctx.nonneg(format!("trial {t}: lower norm bound"), "norm-bounds", tw - norm);
        ctx.nonneg(format!("trial {t}: upper trace bound"), "norm-bounds", upper - tw);

        let empty = ctx.theta(&NcGraph::scalars(n), &w)?;
        ctx.equal(format!("trial {t}: CI gives n Tr W"), "empty-graph-closed-form", empty, upper, tol::CLOSED_FORM);
        let full = ctx.theta(&NcGraph::full(n), &w)?;
        ctx.equal(format!("trial {t}: L gives ||W||"), "full-graph-closed-form", full, norm, tol::CLOSED_FORM);
    }
    Ok(())
}

fn continuity(ctx: &mut Ctx, trials: usize) -> Result<()> {
    let n = ctx.cfg.n;
    for t in 0..trials {
        let g = ctx.graph(n, t)?;
        let w = ctx.psd(n);
        let other = ctx.psd(n);
        let eps = 0.3f64.powi(t as i32 + 1);
        let x = w.scale(1.0 - eps) + other.scale(eps);
        let tw = ctx.theta(&g, &w)?;
        let tx = ctx.theta(&g, &x)?;
        let bound = n as f64 * linalg::trace_norm(&(&w - &x));
        ctx.nonneg(format!("trial {t}: eps {eps:.1e}"), "uniform-continuity", bound - (tw - tx).abs());
    }
    Ok(())
}

fn holder(ctx: &mut Ctx, trials: usize) -> Result<()> {
    let n = ctx.cfg.n;
    for t in 0..trials {
        let g = ctx.graph(n, t)?;
        let comp = g.perp_plus_identity()?;
        let w = ctx.psd(n);
        let x = ctx.psd(n);
        let tw = ctx.theta(&g, &w)?;
        let tx = ctx.theta(&comp, &x)?;
        let rhs = n as f64 * linalg::re_trace_product(&w, &x);
        ctx.nonneg(format!("trial {t}: product bound"), "holder-duality", tw * tx - rhs);

        let sup = theta::holder_dual_value(&g, &x, ctx.opts())?;
        ctx.diags.extend(sup.diagnostics.iter().copied());
        ctx.equal(format!("trial {t}: composite maximum"), "holder-composite-maximum", sup.value, tx, tol::EQUALITY);

        let wstar = linalg::hermitian_part(&sup.maximizer);
        let ts = ctx.theta(&g, &wstar)?;
        let sat = n as f64 * linalg::re_trace_product(&wstar, &x);
        ctx.equal(format!("trial {t}: maximizer saturates"), "holder-saturation", ts * tx, sat, tol::EQUALITY);
    }
    Ok(())
}

/// `S / S0 + CI`, with vertex algebra `CI`.
pub fn thin_graph(g: &NcGraph) -> Result<NcGraph> {
    let n = g.n();
    let s0 = g
        .s0()
        .ok_or_else(|| Error::PreconditionViolated("thin graph needs an S0 algebra".into()))?;
    let space = g.space().quotient(&s0.algebra_subspace())?.sum(&OperatorSubspace::scalars(n))?;
    NcGraph::new(space, Some(S0Algebra::scalars(n)))
}

fn thin_diag(ctx: &mut Ctx, trials: usize) -> Result<()> {
    for t in 0..trials {
        let g = ctx.s0_graph(t)?;
        let s0 = g.s0().expect("S0 graph").clone();
        let n = g.n();
        let thin = thin_graph(&g)?;
        let w = ctx.psd(n);
        let left = ctx.theta(&thin, &w)?;
        let right = ctx.theta(&g, &s0.blockscale(&w)?.scale(n as f64))?;
        let label = blocks_label(&s0);
        ctx.equal(format!("trial {t} [{label}]: thin equals n Ψ(W)"), "thin-diagonal-equality", left, right, tol::EQUALITY);

        // Move W along a Hermitian direction orthogonal to S0'.
        let h = random::hermitian(n, &mut ctx.rng);
        let perp = &h - s0.commproj(&h)?;
        let size = linalg::op_norm(&perp);
        if size > 1e-12 {
            let step = 0.5 * linalg::min_eig(&w) / size;
            let moved = &w + perp.scale(step);
            let shifted = ctx.theta(&thin, &moved)?;
            ctx.equal(format!("trial {t} [{label}]: S0'-orthogonal shift"), "thin-diagonal-invariance", shifted, left, tol::CLOSED_FORM);
        }
    }
    Ok(())
}

fn blocks_label(s0: &S0Algebra) -> String {
    s0.blocks().iter().map(|b| format!("{}x{}", b.dim_a, b.dim_y)).collect::<Vec<_>>().join(",")
}

fn sqrt_d(s0: &S0Algebra) -> CMat {
    let d = s0.scaling_matrix();
    CMat::from_fn(d.nrows(), d.ncols(), |i, j| if i == j { c(d[(i, i)].re.sqrt(), 0.0) } else { c(0.0, 0.0) })
}

fn dwd(ctx: &mut Ctx, trials: usize) -> Result<()> {
    for t in 0..trials {
        let g = ctx.s0_graph(t)?;
        let s0 = g.s0().expect("S0 graph").clone();
        let label = blocks_label(&s0);
        let comp = complement(&g)?;
        let n = g.n();
        let sd = sqrt_d(&s0);
        let v = ctx.psd(n);
        let w = ctx.psd(n);
        let tv = ctx.theta(&g, &v)?;
        let tw = ctx.theta(&comp, &w)?;
        let rhs = linalg::re_trace_product(&v, &(&sd * &w * &sd));
        ctx.nonneg(format!("trial {t} [{label}]: DWD bound"), "dwd-inequality", tv * tw - rhs);

        let vc = random::commutant_pd(&s0, &mut ctx.rng);
        let sup = theta::theta_psi_support(&g, &vc, ctx.opts())?;
        ctx.diags.extend(sup.diagnostics.iter().copied());
        let wstar = linalg::hermitian_part(&s0.blockscale(&sup.maximizer)?);
        let tvc = ctx.theta(&g, &vc)?;
        let tws = ctx.theta(&comp, &wstar)?;
        let rhs = linalg::re_trace_product(&vc, &(&sd * &wstar * &sd));
        ctx.equal(format!("trial {t} [{label}]: equality for V in S0'"), "dwd-equality", tvc * tws, rhs, 1e-4);
    }

    let n = ctx.cfg.n;
    let d_scalars = S0Algebra::scalars(n).scaling_matrix();
    let r = linalg::frob(&(d_scalars - identity(n).scale(n as f64)));
    ctx.record(format!("CI in dimension {n}: D = n I"), "dwd-worked-examples", r, 1e-8);
    let d_full = S0Algebra::full(n).scaling_matrix();
    let r = linalg::frob(&(d_full - identity(n).scale(1.0 / n as f64)));
    ctx.record(format!("L(C^{n}): D = I / n"), "dwd-worked-examples", r, 1e-8);
    for t in 0..DEFAULT_BLOCKS.len() {
        let s0 = ctx.s0_for(t)?;
        let g = NcGraph::new(s0.algebra_subspace(), Some(s0.clone()))?;
        let v = random::commutant_pd(&s0, &mut ctx.rng);
        let exact = linalg::re_trace_product(&v, &s0.scaling_matrix());
        let tight = SdpOptions { tol: 1e-10, ..*ctx.opts() };
        let r = theta::theta(&g, &WeightMatrix::new(v)?, Form::MinY, &tight)?;
        ctx.diags.extend(r.diagnostics.iter().copied());
        let label = blocks_label(&s0);
        ctx.equal(format!("S = S0 [{label}]: theta equals Tr(V D)"), "dwd-worked-examples", r.value, exact, 1e-8);
    }
    Ok(())
}

fn product(ctx: &mut Ctx, trials: usize) -> Result<()> {
    for t in 0..trials {
        let g1 = ctx.graph(2, t)?;
        let g2 = ctx.graph(2, t + 1)?;
        let w1 = ctx.psd(2);
        let w2 = ctx.psd(2);
        let a = ctx.theta(&g1, &w1)?;
        let b = ctx.theta(&g2, &w2)?;
        let ww = kron(&w1, &w2);
        let strong = ctx.theta(&g1.strong_product(&g2), &ww)?;
        ctx.equal(format!("trial {t}: S ⊗ S'"), "strong-product-multiplicativity", strong, a * b, 1e-4);
        let disj = ctx.theta(&g1.disjunctive_product(&g2)?, &ww)?;
        ctx.equal(format!("trial {t}: S * S'"), "disjunctive-product-multiplicativity", disj, a * b, 1e-4);
    }
    Ok(())
}

fn abpsi(ctx: &mut Ctx, trials: usize) -> Result<()> {
    for t in 0..trials {
        let g = ctx.s0_graph(t)?;
        let label = blocks_label(g.s0().expect("S0 graph"));
        let comp = complement(&g)?;
        let n = g.n();
        let x = ctx.psd(n);
        for (side, graph) in [("S", &g), ("S^c", &comp)] {
            let sup = theta::theta_psi_support(graph, &x, ctx.opts())?;
            ctx.diags.extend(sup.diagnostics.iter().copied());
            let direct = ctx.theta(graph, &x)?;
            ctx.equal(
                format!("trial {t} [{label}]: psi-support on {side}"),
                "psi-antiblocker-duality",
                sup.value,
                direct,
                tol::EQUALITY,
            );
        }
    }
    Ok(())
}

/// `max { Tr(W Z) : Z ⪰ 0, Ψ(Z) ⪯ I }`.
pub fn blockscale_norm_dual(s0: &S0Algebra, w: &CMat, opts: &SdpOptions) -> Result<(f64, SolveDiagnostics)> {
    let n = s0.n();
    let mut lmi = LmiBuilder::new();
    let z = lmi.add_matrix_var(linalg::hermitian_matrix_basis(n), linalg::zeros(n));
    let bz = lmi.add_block(linalg::zeros(n));
    lmi.add_mapped(bz, &z, |m| m.clone());
    let bound = lmi.add_block(identity(n));
    lmi.add_mapped(bound, &z, |m| -s0.blockscale(m).expect("dimension matches"));
    lmi.add_trace_objective(&z, w);
    let sol = lmi.solve(opts)?;
    Ok((sol.value, sol.diagnostics))
}

/// `γ₂*(W) = max { Tr(W Z) : Z ⪰ 0, Z_ii ≤ 1 }`.
pub fn gamma2_dual(w: &CMat, opts: &SdpOptions) -> Result<(f64, SolveDiagnostics)> {
    let n = w.nrows();
    let one = identity(1);
    let mut lmi = LmiBuilder::new();
    let z = lmi.add_matrix_var(linalg::hermitian_matrix_basis(n), linalg::zeros(n));
    let bz = lmi.add_block(linalg::zeros(n));
    lmi.add_mapped(bz, &z, |m| m.clone());
    for i in 0..n {
        let b = lmi.add_block(one.clone());
        lmi.add_mapped(b, &z, |m| one.scale(-m[(i, i)].re));
    }
    lmi.add_trace_objective(&z, w);
    let sol = lmi.solve(opts)?;
    Ok((sol.value, sol.diagnostics))
}

fn gamma2(ctx: &mut Ctx, trials: usize) -> Result<()> {
    let n = ctx.cfg.n;
    let diag = S0Algebra::diagonal(n);
    let g = NcGraph::new(diag.algebra_subspace(), Some(diag.clone()))?;
    for t in 0..trials {
        let w = ctx.psd(n);
        let direct = ctx.theta(&g, &w)?;
        let (dual, d) = gamma2_dual(&w, ctx.opts())?;
        ctx.diags.push(d);
        ctx.equal(format!("trial {t}: diagonal algebra vs γ₂*"), "gamma2-dual-equality", direct, dual, tol::CLOSED_FORM);
    }
    for t in 0..DEFAULT_BLOCKS.len().min(trials.max(1)) {
        let s0 = ctx.s0_for(t)?;
        let g = NcGraph::new(s0.algebra_subspace(), Some(s0.clone()))?;
        let w = ctx.psd(s0.n());
        let direct = ctx.theta(&g, &w)?;
        let (dual, d) = blockscale_norm_dual(&s0, &w, ctx.opts())?;
        ctx.diags.push(d);
        let label = blocks_label(&s0);
        ctx.equal(format!("S0 [{label}]: blockscale norm dual"), "blockscale-norm-dual", direct, dual, tol::CLOSED_FORM);
    }
    Ok(())
}

/// The example graph `{[[a, b], [c, a]]}` with `S0 = CI`.
pub fn two_by_two_graph() -> Result<NcGraph> {
    let mats = vec![identity(2), linalg::unit(2, 0, 1), linalg::unit(2, 1, 0)];
    NcGraph::new(OperatorSubspace::span(&mats, 2)?, Some(S0Algebra::scalars(2)))
}

fn sandwich(ctx: &mut Ctx, trials: usize) -> Result<()> {
    let n = ctx.cfg.n;
    for t in 0..trials {
        let adj = random::classical_graph(n, 0.5, &mut ctx.rng);
        let g = NcGraph::from_classical_graph(&adj)?;
        for mask in theta::maximal_cliques(&adj)? {
            let p = indicator(n, mask);
            let full = theta::s_full_residual(&g, &p)?;
            ctx.record(format!("trial {t}: clique {mask:#b} is S-full"), "s-full-projector", full, linalg::tol::MEMBER);
            let tp = ctx.theta(&g, &p)?;
            ctx.nonneg(format!("trial {t}: clique {mask:#b} in theta body"), "sandwich-lower", 1.0 - tp);
        }
        if let Some((i, j)) = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !adj[i][j]) {
            let p = indicator(n, (1 << i) | (1 << j));
            let full = theta::is_s_full_projector(&g, &p, linalg::tol::MEMBER)?;
            ctx.flag(format!("trial {t}: non-edge {{{i},{j}}} is not S-full"), "s-full-projector", !full);
        }
        let w = ctx.psd(n);
        let tw = ctx.theta(&g, &w)?;
        let boundary = w.scale(1.0 / tw);
        let (sup, d) = theta::stable_set_support(&adj, &boundary, ctx.opts())?;
        ctx.diags.push(d);
        ctx.nonneg(format!("trial {t}: boundary point against stable sets"), "sandwich-upper", 1.0 - sup);
    }

    let g = two_by_two_graph()?;
    for k in 0..4 {
        let ang = std::f64::consts::FRAC_PI_2 * k as f64 + 0.3;
        let ph = c(ang.cos(), ang.sin());
        let p = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), ph.conj() * 0.5, ph * 0.5, c(0.5, 0.0)]);
        let full = theta::s_full_residual(&g, &p)?;
        ctx.record(format!("2x2 example: phase {ang:.2} projector is S-full"), "s-full-projector", full, linalg::tol::MEMBER);
        let tp = ctx.theta(&g, &p)?;
        ctx.nonneg(format!("2x2 example: phase {ang:.2} projector in theta body"), "sandwich-lower", 1.0 - tp);
    }
    Ok(())
}

fn indicator(n: usize, mask: u32) -> CMat {
    CMat::from_fn(n, n, |i, j| if i == j && mask & (1 << i) != 0 { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

fn compatible(ctx: &mut Ctx, trials: usize) -> Result<()> {
    let n = ctx.cfg.n;
    for t in 0..trials {
        let g = ctx.graph(n, t)?;
        let x = ctx.psd(n);
        let input = theta::saturating_pair(&g, &x, ctx.opts())?;
        ctx.diags.extend(input.diagnostics.iter().copied());
        let rep = theta::check_compatible(&input)?;
        ctx.record(format!("trial {t}: saturation"), "compatible-certificates", rep.saturation, theta::compatible::SATURATION_TOL);
        ctx.record(format!("trial {t}: λ v_W = n Z' v_V"), "compatible-certificates", rep.first / rep.scale, tol::EQUALITY);
        ctx.record(format!("trial {t}: λ' v_V = n Z v_W"), "compatible-certificates", rep.second / rep.scale, tol::EQUALITY);
        ctx.record(format!("trial {t}: v_V v_W† = n Z Z'"), "compatible-certificates", rep.product / rep.scale, tol::EQUALITY);
    }
    Ok(())
}

fn twirl(ctx: &mut Ctx, trials: usize) -> Result<()> {
    for d in 2..=4usize {
        let m = random::gaussian_matrix(d, d, &mut ctx.rng);
        let paulis = cstar::pauli_basis(d)?;
        let mut sum = linalg::zeros(d);
        for u in &paulis {
            sum += u * &m * u.adjoint();
        }
        let expect = identity(d) * (linalg::trace(&m) * d as f64);
        let r = linalg::frob(&(sum - expect)) / (1.0 + linalg::frob(&m));
        ctx.record(format!("d = {d}: Pauli sum"), "pauli-trace-identity", r, tol::ALGEBRAIC);

        let other = 2;
        let big = random::gaussian_matrix(d * other, d * other, &mut ctx.rng);
        let tw = cstar::pauli_partial_twirl(&big, d)?;
        let idx = linalg::BipartiteIndex::new(d, other)?;
        let reduced = linalg::partial_trace(&big, linalg::Side::A, idx)?;
        let expect = kron(&identity(d), &reduced).scale(d as f64);
        let r = linalg::frob(&(tw - expect)) / (1.0 + linalg::frob(&big));
        ctx.record(format!("d = {d}: partial Pauli twirl"), "pauli-partial-trace", r, tol::ALGEBRAIC);
    }

    let mut algebras: Vec<S0Algebra> = DEFAULT_BLOCKS.iter().map(|s| S0Algebra::parse(s)).collect::<Result<_>>()?;
    algebras.push(S0Algebra::scalars(ctx.cfg.n));
    algebras.push(S0Algebra::full(ctx.cfg.n));
    if let Some(b) = &ctx.cfg.blocks {
        algebras.push(b.clone());
    }
    for s0 in &algebras {
        let label = blocks_label(s0);
        let t = s0.twirl_projector();
        ctx.record(format!("[{label}]: T² = T"), "twirl-projector", linalg::frob(&(&t * &t - &t)), tol::ALGEBRAIC);
        let phi = linalg::max_ent_vector(s0.n())?;
        ctx.record(format!("[{label}]: T Φ = Φ"), "twirl-projector", (&t * &phi - &phi).norm(), tol::ALGEBRAIC);
    }

    for t in 0..trials {
        let (db, dz) = (2, 1 + t % 3);
        let w = ctx.psd(db * dz);
        let rep = cstar::check_phi_inequality(&w, db, dz)?;
        let scale = 1.0 + 1.0 / linalg::min_eig(&w);
        ctx.record(format!("trial {t}: eigenvalue bound (B {db}, Z {dz})"), "phi-inequality", (-rep.min_eig).max(0.0) / scale, tol::ALGEBRAIC);
        ctx.record(format!("trial {t}: projector"), "phi-inequality", rep.projector_residual, tol::ALGEBRAIC);
    }
    Ok(())
}

/// Adjacency of the cycle `C_n`.
pub fn cycle(n: usize) -> Vec<Vec<bool>> {
    (0..n).map(|i| (0..n).map(|j| i != j && ((i + 1) % n == j || (j + 1) % n == i)).collect()).collect()
}

fn classical(ctx: &mut Ctx, trials: usize) -> Result<()> {
    let c5 = NcGraph::from_classical_graph(&cycle(5))?;
    let v = ctx.theta(&c5, &identity(5))?;
    ctx.record("C5 with W = I".into(), "classical-match", (v - 5f64.sqrt()).abs(), tol::EQUALITY);
    let cos = (std::f64::consts::PI / 5.0).cos();
    let odd = 5.0 * cos / (1.0 + cos);
    let ct = theta::classical_theta(&cycle(5), &[1.0; 5], ctx.opts())?;
    ctx.diags.push(ct.diagnostics);
    ctx.record("C5 classical program".into(), "odd-cycle-closed-form", (ct.value - odd).abs(), tol::EQUALITY);

    let n = ctx.cfg.n;
    for t in 0..trials {
        let adj = random::classical_graph(n, 0.5, &mut ctx.rng);
        let w = random::positive_weights(n, &mut ctx.rng);
        let g = NcGraph::from_classical_graph(&adj)?;
        let wm = CMat::from_fn(n, n, |i, j| if i == j { c(w[i], 0.0) } else { c(0.0, 0.0) });
        let nc = ctx.theta(&g, &wm)?;
        let ct = theta::classical_theta(&adj, &w, ctx.opts())?;
        ctx.diags.push(ct.diagnostics);
        ctx.equal(format!("trial {t}: weighted graph"), "classical-match", nc, ct.value, tol::EQUALITY);
    }

    let c4 = cycle(4);
    let half = theta::fp_membership_classical(&c4, &[0.5; 4], ctx.opts())?;
    ctx.diags.push(half.diagnostics);
    ctx.flag("C4 half weights lie in the clique polytope".into(), "clique-polytope-membership", half.member);
    let eps = 0.05;
    let out = theta::fp_membership_classical(&c4, &[1.0 + eps, 0.0, 1.0 + eps, 0.0], ctx.opts())?;
    ctx.diags.push(out.diagnostics);
    ctx.flag("C4 non-edge pattern lies outside".into(), "clique-polytope-membership", !out.member);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        let err = "bogus".parse::<Suite>().unwrap_err().to_string();
        assert!(err.contains("thin-diag"));
    }

    #[test]
    fn rejects_large_n() {
        let cfg = VerifyConfig { n: 9, ..VerifyConfig::default() };
        assert!(run_suite(Suite::Twirl, &cfg).is_err());
    }
}
