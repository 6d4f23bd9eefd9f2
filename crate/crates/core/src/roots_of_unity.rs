//! Anisotropy at a root of unity: the nilpotent cycle of B-operators, the limit
//! creation operator built over jets, the P/Q/F/G functions, x-schedules,
//! degenerate family vectors, and the closed-form solution of the schedule
//! equations.
//!
//! With `gamma0 = pi K / M` the square `q0^2` is a primitive M-th root of unity
//! and `B(u) B(u q0^2) .. B(u q0^{2M-2}) = 0` identically. The creation operator
//! divides that product by `q - q0` before taking the limit `q -> q0`; here the
//! limit is exact first-order jet arithmetic in `eps = q - q0`, with the
//! spectral arguments carrying the schedule `X` through `eta^x = 1 + x eps/q0`.

use crate::bethe::{bethe_vector_with, classify, scaled_residual_norm, tau_sep};
use crate::chain::{ChainSpec, DEFAULT_DIM_CAP};
use crate::error::{Error, Result};
use crate::mat::{vec_norm, vec_scale, vec_sub, Mat};
use crate::poly::CPoly;
use crate::qalgebra::{build_monodromy, script_a, script_d};
use crate::scalar::{GammaCtx, Jet1, JetGammaCtx, QContext, C64};

/// Root-of-unity data: `gamma0 = pi K / M`, `q0 = e^{i gamma0}`.
#[derive(Debug, Clone, Copy)]
pub struct RootCtx {
    /// M > 1; `q0^2` is a primitive M-th root of unity.
    pub m: i64,
    /// K coprime with M.
    pub k: i64,
    pub gamma0: f64,
    pub q0: C64,
}

impl RootCtx {
    pub fn new(m: i64, k: i64) -> Result<Self> {
        if m < 2 {
            return Err(Error::Precondition(format!(
                "root-of-unity order M must exceed 1 (got {m})"
            )));
        }
        if k == 0 || gcd(k.unsigned_abs(), m.unsigned_abs()) != 1 {
            return Err(Error::Precondition(format!(
                "K = {k} must be nonzero and coprime with M = {m}"
            )));
        }
        let gamma0 = std::f64::consts::PI * k as f64 / m as f64;
        let q0 = C64::new(0.0, gamma0).exp();
        let ctx = RootCtx { m, k, gamma0, q0 };
        for r in 1..m {
            if (ctx.q0pow(2 * r) - C64::new(1.0, 0.0)).norm() <= 1e-6 {
                return Err(Error::Precondition(format!(
                    "q0^{} = 1 for 0 < r < M",
                    2 * r
                )));
            }
        }
        Ok(ctx)
    }

    pub fn gamma_ctx(&self) -> GammaCtx {
        GammaCtx {
            gamma: C64::new(self.gamma0, 0.0),
        }
    }

    /// Jet context for `q = q0 + eps`.
    pub fn jet_ctx(&self) -> JetGammaCtx {
        JetGammaCtx {
            gamma: Jet1::new(C64::new(self.gamma0, 0.0), -crate::scalar::I / self.q0),
        }
    }

    pub fn q0pow(&self, x: i64) -> C64 {
        self.gamma_ctx().qpow(C64::new(x as f64, 0.0))
    }

    /// Twist value `q0^{2(p - l_1 - .. - l_N)}` that pairs an integer p with
    /// the chain for the degenerate construction.
    pub fn kappa_for_p(&self, spec: &ChainSpec, p: i64) -> C64 {
        self.gamma_ctx()
            .qpow(C64::new(2.0 * p as f64 - spec.ell_tot_x2() as f64, 0.0))
    }

    /// Whether the chain's anisotropy sits at this root of unity.
    pub fn matches(&self, spec: &ChainSpec) -> bool {
        (spec.gamma - C64::new(self.gamma0, 0.0)).norm() <= 1e-12 * (1.0 + self.gamma0.abs())
    }

    fn require_match(&self, spec: &ChainSpec) -> Result<()> {
        if !self.matches(spec) {
            return Err(Error::Precondition(format!(
                "chain anisotropy {} is not the root-of-unity value pi*{}/{} = {}",
                spec.gamma, self.k, self.m, self.gamma0
            )));
        }
        Ok(())
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The M-fold product `B(u) B(u q^2) .. B(u q^{2M-2})` at the chain's own
/// anisotropy, together with the product of factor norms as a scale.
pub fn b_cycle_product(spec: &ChainSpec, m_order: i64, u: C64) -> Result<(Mat<C64>, f64)> {
    let ctx = spec.gamma_ctx();
    let mono = build_monodromy(spec, &ctx, DEFAULT_DIM_CAP)?;
    let mut product = Mat::<C64>::identity(spec.dim());
    let mut scale = 1.0f64;
    for r in 0..m_order {
        let arg = u * ctx.qpow(C64::new(2.0 * r as f64, 0.0));
        let factor = mono.b.eval(arg);
        scale *= factor.fro_norm();
        product = &product * &factor;
    }
    Ok((product, scale))
}

/// The nilpotent product at a root of unity; expected to vanish.
pub fn nilpotent_product(spec: &ChainSpec, ctx: &RootCtx, u: C64) -> Result<(Mat<C64>, f64)> {
    ctx.require_match(spec)?;
    b_cycle_product(spec, ctx.m, u)
}

/// The limit creation operator: eps-coefficient of
/// `B(u eta^{x_1}; q) B(u q^2 eta^{x_2}; q) .. B(u q^{2M-2} eta^{x_M}; q)`
/// over jets in `eps = q - q0`. The value part of the product must vanish by
/// nilpotency; a value part beyond `1e-9 * scale` means the precondition broke.
pub fn bb_operator(spec: &ChainSpec, ctx: &RootCtx, u: C64, x: &[C64]) -> Result<Mat<C64>> {
    ctx.require_match(spec)?;
    if x.len() != ctx.m as usize {
        return Err(Error::Precondition(format!(
            "schedule must carry M = {} entries (got {})",
            ctx.m,
            x.len()
        )));
    }
    let jctx = ctx.jet_ctx();
    let mono = build_monodromy(spec, &jctx, DEFAULT_DIM_CAP)?;
    let mut product = Mat::<Jet1>::identity(spec.dim());
    let mut scale = 1.0f64;
    for r in 0..ctx.m {
        // argument u q^{2r} eta^{x_{r+1}} with eta^x = 1 + x eps / q0
        let eta_x = Jet1::new(C64::new(1.0, 0.0), x[r as usize] / ctx.q0);
        let arg = Jet1::constant(u) * jctx.qpow(C64::new(2.0 * r as f64, 0.0)) * eta_x;
        let factor = mono.b.eval(arg);
        let (fval, _) = factor.split();
        scale *= fval.fro_norm();
        product = &product * &factor;
    }
    let (val, der) = product.split();
    if val.fro_norm() > 1e-9 * scale.max(1.0) {
        return Err(Error::Precondition(format!(
            "nilpotency failed: value part {:.3e} exceeds 1e-9 * scale (scale {:.3e})",
            val.fro_norm(),
            scale
        )));
    }
    Ok(der)
}

/// `P(u) = prod_i prod_{r=0}^{2l_i - 1} (u - z_i q0^{2(l_i - r)})`.
pub fn poly_p(spec: &ChainSpec, ctx: &RootCtx) -> Result<CPoly> {
    ctx.require_match(spec)?;
    let mut p = CPoly::one();
    for site in &spec.sites {
        for r in 0..site.two_ell {
            p.mul_linear(
                C64::new(1.0, 0.0),
                -site.z * ctx.q0pow(site.two_ell - 2 * r),
            );
        }
    }
    Ok(p)
}

/// Prepared data for the schedule functions Q_n, F_n, G_n at fixed roots t.
pub struct SchedFns<'a> {
    spec: &'a ChainSpec,
    ctx: &'a RootCtx,
    p_poly: CPoly,
    n: i64,
    t: Vec<C64>,
}

impl<'a> SchedFns<'a> {
    pub fn new(spec: &'a ChainSpec, ctx: &'a RootCtx, n: i64, t: &[C64]) -> Result<Self> {
        Ok(SchedFns {
            spec,
            ctx,
            p_poly: poly_p(spec, ctx)?,
            n,
            t: t.to_vec(),
        })
    }

    /// `Q_n(u) = u^{k-n} P(u) / prod_a (u - t_a)(u - t_a q0^2)`.
    pub fn q(&self, u: C64) -> Result<C64> {
        let tau = tau_sep(self.spec);
        let q02 = self.ctx.q0pow(2);
        let expo = self.t.len() as i64 - self.n;
        if expo < 0 && u.norm() <= tau {
            return Err(Error::Precondition(
                "Q_n has a pole at u = 0 for n > k".into(),
            ));
        }
        let mut den = C64::new(1.0, 0.0);
        for &ta in &self.t {
            if (u - ta).norm() <= tau || (u - ta * q02).norm() <= tau {
                return Err(Error::Precondition(format!("u = {u} hits a pole of Q_n")));
            }
            den *= (u - ta) * (u - ta * q02);
        }
        Ok(u.powi(expo as i32) * self.p_poly.eval(u) / den)
    }

    /// `F_n(u) = (1/M) sum_{r=0}^{M-1} Q_n(u q0^{2r})`.
    pub fn f(&self, u: C64) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..self.ctx.m {
            acc += self.q(u * self.ctx.q0pow(2 * r))?;
        }
        Ok(acc / C64::new(self.ctx.m as f64, 0.0))
    }

    /// `G_n(u) = (1/M) sum_{r=1}^{M-1} r Q_n(u q0^{2r})`.
    pub fn g(&self, u: C64) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for r in 1..self.ctx.m {
            acc += self.q(u * self.ctx.q0pow(2 * r))? * C64::new(r as f64, 0.0);
        }
        Ok(acc / C64::new(self.ctx.m as f64, 0.0))
    }
}

pub fn q_fn(spec: &ChainSpec, ctx: &RootCtx, n: i64, u: C64, t: &[C64]) -> Result<C64> {
    SchedFns::new(spec, ctx, n, t)?.q(u)
}

pub fn f_fn(spec: &ChainSpec, ctx: &RootCtx, n: i64, u: C64, t: &[C64]) -> Result<C64> {
    SchedFns::new(spec, ctx, n, t)?.f(u)
}

pub fn g_fn(spec: &ChainSpec, ctx: &RootCtx, n: i64, u: C64, t: &[C64]) -> Result<C64> {
    SchedFns::new(spec, ctx, n, t)?.g(u)
}

/// The data of one degenerate family vector: the integer p and the pairs
/// `(u_i, X_i)` with `X_i` of length M.
#[derive(Debug, Clone)]
pub struct XSchedule {
    pub p: i64,
    /// Root-of-unity order M.
    pub m_order: i64,
    pub pairs: Vec<(C64, Vec<C64>)>,
}

impl XSchedule {
    /// Number of creation operators m.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Schedule entry `x_{i,r}` with the boundary conventions
    /// `x_{i,0} = x_{i,M} + 2M` and `x_{i,M+1} = x_{i,1} - 2M`.
    pub fn x(&self, i: usize, r: i64) -> C64 {
        let m = self.m_order;
        let xs = &self.pairs[i].1;
        if r == 0 {
            xs[(m - 1) as usize] + C64::new(2.0 * m as f64, 0.0)
        } else if r == m + 1 {
            xs[0] - C64::new(2.0 * m as f64, 0.0)
        } else {
            xs[(r - 1) as usize]
        }
    }
}

/// The schedule of the degenerate construction:
/// `x_r = 2 (1 - r - G_p(u_i q0^{2r}) / F_p(u_i))` for r = 1..M.
///
/// With this shift convention the consecutive differences telescope to
/// `x_{r+1} - x_r = -2 Q_p(u q0^{2r}) / F_p(u)`, which is exactly what the
/// schedule system requires row by row; the closed-form solution of
/// [`solve_xeq`] differs from it by a constant, and the operators built from
/// either agree.
pub fn x_schedule(
    spec: &ChainSpec,
    ctx: &RootCtx,
    p: i64,
    t: &[C64],
    u_list: &[C64],
) -> Result<XSchedule> {
    ctx.require_match(spec)?;
    let want_kappa = ctx.kappa_for_p(spec, p);
    if (spec.kappa - want_kappa).norm() > 1e-10 * (1.0 + want_kappa.norm()) {
        return Err(Error::Precondition(format!(
            "twist {} does not equal q0^(2(p - l_tot)) = {want_kappa} for p = {p}",
            spec.kappa
        )));
    }
    let fns = SchedFns::new(spec, ctx, p, t)?;
    let tau = tau_sep(spec);
    let mut pairs = Vec::with_capacity(u_list.len());
    for (i, &u) in u_list.iter().enumerate() {
        for (a, &ta) in t.iter().enumerate() {
            let du = u.powi(ctx.m as i32) - ta.powi(ctx.m as i32);
            if du.norm() <= tau * (1.0 + u.norm().powi(ctx.m as i32)) {
                return Err(Error::Precondition(format!(
                    "u_{i} collides with rapidity {a}: u^M = t_a^M"
                )));
            }
        }
        let fval = fns.f(u)?;
        // magnitude reference for the F != 0 test
        let mut qscale = 0.0f64;
        for r in 0..ctx.m {
            qscale = qscale.max(fns.q(u * ctx.q0pow(2 * r))?.norm());
        }
        if fval.norm() <= 1e-10 * qscale.max(1e-300) {
            return Err(Error::Precondition(format!(
                "F_p(u_{i}) vanishes (|F| = {:.3e})",
                fval.norm()
            )));
        }
        let mut xs = Vec::with_capacity(ctx.m as usize);
        for r in 1..=ctx.m {
            let g = fns.g(u * ctx.q0pow(2 * r))?;
            xs.push(C64::new(2.0 * (1 - r) as f64, 0.0) - 2.0 * g / fval);
        }
        pairs.push((u, xs));
    }
    Ok(XSchedule {
        p,
        m_order: ctx.m,
        pairs,
    })
}

/// Apply the creation operators of a schedule to the Bethe vector of `t`.
/// The zero vector is a reportable outcome, not an error.
pub fn degenerate_vector(
    spec: &ChainSpec,
    ctx: &RootCtx,
    t: &[C64],
    sched: &XSchedule,
) -> Result<Vec<C64>> {
    degenerate_vector_with_scale(spec, ctx, t, sched).map(|(v, _)| v)
}

/// Like [`degenerate_vector`], also returning the product of the operator
/// norms that went into the vector; a result much smaller than this scale is
/// numerically the zero vector.
pub fn degenerate_vector_with_scale(
    spec: &ChainSpec,
    ctx: &RootCtx,
    t: &[C64],
    sched: &XSchedule,
) -> Result<(Vec<C64>, f64)> {
    ctx.require_match(spec)?;
    let mono = build_monodromy(spec, &spec.gamma_ctx(), DEFAULT_DIM_CAP)?;
    let mut scale = 1.0f64;
    for &ta in t {
        scale *= mono.b.eval(ta).fro_norm().max(1e-300);
    }
    let mut v = bethe_vector_with(&mono, spec, t);
    for (u, xs) in sched.pairs.iter().rev() {
        let op = bb_operator(spec, ctx, *u, xs)?;
        scale *= op.fro_norm().max(1e-300);
        v = op.apply(&v);
    }
    Ok((v, scale))
}

/// Result of the end-to-end degenerate eigenvector check.
#[derive(Debug, Clone)]
pub struct BamCheck {
    /// Max over samples of `|T(u) Psi - q0^{mM} Lambda_t(u) Psi| / |Psi|`.
    pub residual: Option<f64>,
    pub psi_norm: f64,
    pub zero_vector: bool,
    /// `q0^{mM} Lambda_t(u)` at each sample.
    pub eigenvalues: Vec<C64>,
    /// Excitation sector k + mM the vector lives in.
    pub sector: usize,
    pub schedule: XSchedule,
}

/// Verify that the schedule-built vector is a transfer-matrix eigenvector with
/// eigenvalue `q0^{mM}` times the eigenvalue function of `t` alone.
pub fn verify_bam(
    spec: &ChainSpec,
    ctx: &RootCtx,
    p: i64,
    t: &[C64],
    u_list: &[C64],
    u_samples: &[C64],
) -> Result<BamCheck> {
    ctx.require_match(spec)?;
    if !classify(spec, t).offdiagonal {
        return Err(Error::Precondition("roots are not offdiagonal".into()));
    }
    if !t.is_empty() && scaled_residual_norm(spec, t) > 1e-8 {
        return Err(Error::Precondition(
            "roots do not solve the Bethe equations at the root of unity".into(),
        ));
    }
    let sched = x_schedule(spec, ctx, p, t, u_list)?;
    let (psi, psi_scale) = degenerate_vector_with_scale(spec, ctx, t, &sched)?;
    let psi_norm = vec_norm(&psi);
    let sector = t.len() + sched.len() * ctx.m as usize;
    if psi_norm <= 1e-10 * psi_scale.max(1.0) {
        return Ok(BamCheck {
            residual: None,
            psi_norm,
            zero_vector: true,
            eigenvalues: vec![],
            sector,
            schedule: sched,
        });
    }
    let mono = build_monodromy(spec, &spec.gamma_ctx(), DEFAULT_DIM_CAP)?;
    let prefactor = ctx.q0pow(sched.len() as i64 * ctx.m);
    let mut worst = 0.0f64;
    let mut eigenvalues = Vec::with_capacity(u_samples.len());
    for &u in u_samples {
        let lam = prefactor * crate::bethe::eigenvalue_tbv(spec, t, u)?;
        eigenvalues.push(lam);
        let tv = mono.transfer_apply(spec.kappa, u, &psi);
        worst = worst.max(vec_norm(&vec_sub(&tv, &vec_scale(&psi, lam))) / psi_norm);
    }
    Ok(BamCheck {
        residual: Some(worst),
        psi_norm,
        zero_vector: false,
        eigenvalues,
        sector,
        schedule: sched,
    })
}

/// Outcome of solving the schedule equations for one u_i in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum XeqOutcome {
    Solved(Vec<C64>),
    /// The cumulative y-product sum vanishes.
    NotSolvable,
    /// The necessary condition `kappa^M = q0^{2M l_tot}` fails.
    IncompatibleTwist,
}

/// Closed-form general solution of the schedule system for a single u_i:
/// `x_r = x_start - 2M (sum_{s=1}^{r-1} y_1..y_s) / (sum_{s=0}^{M-1} y_1..y_s)`
/// with `y_r = [scriptA / (kappa scriptD)](u q0^{2r-2}) prod_a (u q0^{2r-2} - t_a q0^2)/(u q0^{2r} - t_a)`.
pub fn solve_xeq(
    spec: &ChainSpec,
    ctx: &RootCtx,
    t: &[C64],
    u: C64,
    x_start: C64,
) -> Result<XeqOutcome> {
    ctx.require_match(spec)?;
    let tau = tau_sep(spec);
    let m = ctx.m;
    if (u.powi(m as i32) - C64::new(1.0, 0.0)).norm() <= tau {
        return Err(Error::Precondition("u^M = 1 degeneracy".into()));
    }
    for (a, &ta) in t.iter().enumerate() {
        if (u.powi(m as i32) - ta.powi(m as i32)).norm() <= tau * (1.0 + u.norm().powi(m as i32)) {
            return Err(Error::Precondition(format!("u^M = t_a^M for rapidity {a}")));
        }
    }
    // necessary condition kappa^M = q0^{2 M l_tot}
    let kappa_m = spec.kappa.powi(m as i32);
    let want = ctx
        .gamma_ctx()
        .qpow(C64::new((m * spec.ell_tot_x2()) as f64, 0.0));
    if (kappa_m - want).norm() > 1e-8 * (1.0 + want.norm()) {
        return Ok(XeqOutcome::IncompatibleTwist);
    }
    let gctx = ctx.gamma_ctx();
    let q02 = ctx.q0pow(2);
    let mut y = Vec::with_capacity(m as usize);
    for r in 1..=m {
        let v = u * ctx.q0pow(2 * r - 2);
        let d = spec.kappa * script_d(spec, &gctx, v);
        if d.norm() <= 1e-300 {
            return Err(Error::Precondition(format!(
                "scriptD vanishes at u q0^{}",
                2 * r - 2
            )));
        }
        let mut val = script_a(spec, &gctx, v) / d;
        for &ta in t {
            val *= (v - ta * q02) / (u * ctx.q0pow(2 * r) - ta);
        }
        y.push(val);
    }
    // cumulative products y_1..y_s for s = 0..M-1 and the solvability sum
    let mut cum = Vec::with_capacity(m as usize);
    let mut prod = C64::new(1.0, 0.0);
    cum.push(prod);
    for &ys in y.iter().take((m - 1) as usize) {
        prod *= ys;
        cum.push(prod);
    }
    let sum: C64 = cum.iter().sum();
    let sum_scale: f64 = cum.iter().map(|c| c.norm()).sum();
    if sum.norm() <= 1e-10 * sum_scale.max(1.0) {
        return Ok(XeqOutcome::NotSolvable);
    }
    let two_m = C64::new(2.0 * m as f64, 0.0);
    let mut xs = Vec::with_capacity(m as usize);
    let mut partial = C64::new(0.0, 0.0);
    for &c in cum.iter().skip(1) {
        xs.push(x_start - two_m * partial / sum);
        partial += c;
    }
    xs.push(x_start - two_m * partial / sum);
    Ok(XeqOutcome::Solved(xs))
}

/// Residual of the schedule system at row r, cleared of the common denominator
/// and relative to the larger side:
/// `(x_{r+1} - x_r) scriptA(u q0^{2r}) prod_a (u q0^{2r} - t_a q0^2)` minus
/// `kappa (x_{r+2} - x_{r+1}) scriptD(u q0^{2r}) prod_a (u q0^{2r+2} - t_a)`.
pub fn xeq_row_residual(
    spec: &ChainSpec,
    ctx: &RootCtx,
    t: &[C64],
    sched: &XSchedule,
    i: usize,
    r: i64,
) -> f64 {
    let gctx = ctx.gamma_ctx();
    let q02 = ctx.q0pow(2);
    let u = sched.pairs[i].0;
    let v = u * ctx.q0pow(2 * r);
    let mut lhs = (sched.x(i, r + 1) - sched.x(i, r)) * script_a(spec, &gctx, v);
    let mut rhs = spec.kappa * (sched.x(i, r + 2) - sched.x(i, r + 1)) * script_d(spec, &gctx, v);
    for &ta in t {
        lhs *= v - ta * q02;
        rhs *= v * q02 - ta;
    }
    (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1.0)
}

/// Residuals of the A(u) and D(u) action formulas on a degenerate family
/// vector, for arbitrary rapidities and schedules: the straight terms, the
/// rapidity exchange terms, and the double-sum exchange terms where one
/// creation operator is unfolded into M-1 plain B factors.
pub fn verify_action_formulas_degenerate(
    spec: &ChainSpec,
    ctx: &RootCtx,
    t: &[C64],
    sched: &XSchedule,
    u: C64,
) -> Result<(f64, f64)> {
    ctx.require_match(spec)?;
    let gctx = ctx.gamma_ctx();
    let mono = build_monodromy(spec, &gctx, DEFAULT_DIM_CAP)?;
    let qp = ctx.q0pow(1);
    let qm = ctx.q0pow(-1);
    let _q02 = ctx.q0pow(2);
    let qd = qp - qm;
    let m_count = sched.len();
    let prefactor = ctx.q0pow(m_count as i64 * ctx.m);

    // all creation operators as matrices, and their partial applications
    let mut bb_ops = Vec::with_capacity(m_count);
    for (ui, xi) in &sched.pairs {
        bb_ops.push(bb_operator(spec, ctx, *ui, xi)?);
    }
    let apply_bb_except = |v: &[C64], skip: Option<usize>| -> Vec<C64> {
        let mut out = v.to_vec();
        for (j, op) in bb_ops.iter().enumerate().rev() {
            if Some(j) != skip {
                out = op.apply(&out);
            }
        }
        out
    };

    let psi_t = bethe_vector_with(&mono, spec, t);
    let psi = apply_bb_except(&psi_t, None);

    let hatted_vec = |a: usize| -> Vec<C64> {
        let mut roots: Vec<C64> = vec![u];
        roots.extend(
            t.iter()
                .enumerate()
                .filter(|&(b, _)| b != a)
                .map(|(_, &x)| x),
        );
        apply_bb_except(&bethe_vector_with(&mono, spec, &roots), None)
    };

    // double-sum vectors: prod_{s != r} B(u_i q0^{2s}) applied to the family
    // vector with rapidities (u, t) and the i-th creation operator removed
    let double_vec = |i: usize, r: i64| -> Vec<C64> {
        let mut roots: Vec<C64> = vec![u];
        roots.extend_from_slice(t);
        let mut v = apply_bb_except(&bethe_vector_with(&mono, spec, &roots), Some(i));
        let ui = sched.pairs[i].0;
        for s in 0..ctx.m {
            if s != r {
                v = mono.b.apply(ui * ctx.q0pow(2 * s), &v);
            }
        }
        v
    };

    let residual_for = |lhs: Vec<C64>, terms: Vec<Vec<C64>>| -> f64 {
        let mut rhs = vec![C64::new(0.0, 0.0); lhs.len()];
        let mut scale = vec_norm(&lhs).max(1.0);
        for term in &terms {
            scale = scale.max(vec_norm(term));
            rhs = rhs.iter().zip(term).map(|(x, y)| x + y).collect();
        }
        vec_norm(&vec_sub(&lhs, &rhs)) / scale
    };

    // A(u) action
    let lhs_a = mono.a.apply(u, &psi);
    let mut terms_a: Vec<Vec<C64>> = Vec::new();
    let mut coeff = script_a(spec, &gctx, u);
    for &ta in t {
        coeff *= (u * qm - ta * qp) / (u - ta);
    }
    terms_a.push(vec_scale(&psi, prefactor * coeff));
    for a in 0..t.len() {
        let mut w = qd * t[a] / (u - t[a]) * script_a(spec, &gctx, t[a]);
        for (b, &tb) in t.iter().enumerate() {
            if b != a {
                w *= (t[a] * qm - tb * qp) / (t[a] - tb);
            }
        }
        terms_a.push(vec_scale(&hatted_vec(a), prefactor * w));
    }
    for i in 0..m_count {
        let ui = sched.pairs[i].0;
        for r in 0..ctx.m {
            let v = ui * ctx.q0pow(2 * r);
            let mut w =
                -v / (u - v) * (sched.x(i, r + 1) - sched.x(i, r)) * script_a(spec, &gctx, v);
            for &ta in t {
                w *= (ui * ctx.q0pow(2 * r - 1) - ta * qp) / (v - ta);
            }
            terms_a.push(vec_scale(&double_vec(i, r), prefactor * w));
        }
    }
    let res_a = residual_for(lhs_a, terms_a);

    // D(u) action
    let lhs_d = mono.d.apply(u, &psi);
    let mut terms_d: Vec<Vec<C64>> = Vec::new();
    let mut coeff = script_d(spec, &gctx, u);
    for &ta in t {
        coeff *= (u * qp - ta * qm) / (u - ta);
    }
    terms_d.push(vec_scale(&psi, prefactor * coeff));
    for a in 0..t.len() {
        let mut w = -qd * t[a] / (u - t[a]) * script_d(spec, &gctx, t[a]);
        for (b, &tb) in t.iter().enumerate() {
            if b != a {
                w *= (t[a] * qp - tb * qm) / (t[a] - tb);
            }
        }
        terms_d.push(vec_scale(&hatted_vec(a), prefactor * w));
    }
    for i in 0..m_count {
        let ui = sched.pairs[i].0;
        for r in 0..ctx.m {
            let v = ui * ctx.q0pow(2 * r);
            let mut w =
                v / (u - v) * (sched.x(i, r + 2) - sched.x(i, r + 1)) * script_d(spec, &gctx, v);
            for &ta in t {
                w *= (ui * ctx.q0pow(2 * r + 1) - ta * qm) / (v - ta);
            }
            terms_d.push(vec_scale(&double_vec(i, r), prefactor * w));
        }
    }
    let res_d = residual_for(lhs_d, terms_d);

    Ok((res_a, res_d))
}

/// Convenience: the commutator norms `[BB(u;X), B(v)]` and `[BB(u;X), BB(v;Y)]`
/// relative to the operand norms.
pub fn bb_commutators(
    spec: &ChainSpec,
    ctx: &RootCtx,
    u: C64,
    x: &[C64],
    v: C64,
    y: &[C64],
) -> Result<(f64, f64)> {
    let bb_u = bb_operator(spec, ctx, u, x)?;
    let bb_v = bb_operator(spec, ctx, v, y)?;
    let mono = build_monodromy(spec, &spec.gamma_ctx(), DEFAULT_DIM_CAP)?;
    let b_v = mono.b.eval(v);
    let c1 = bb_u.commutator(&b_v).fro_norm() / (bb_u.fro_norm() * b_v.fro_norm()).max(1.0);
    let c2 = bb_u.commutator(&bb_v).fro_norm() / (bb_u.fro_norm() * bb_v.fro_norm()).max(1.0);
    Ok((c1, c2))
}
