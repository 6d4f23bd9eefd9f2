//! Site representations, operator-valued polynomials in the spectral parameter,
//! and the monodromy matrix entries A(u), B(u), C(u), D(u).
//!
//! The monodromy is the ordered product `z_1..z_N L_N(u/z_N) .. L_1(u/z_1)`,
//! contracted over the auxiliary 2x2 space left to right, with the overall
//! scalar `z_1..z_N` folded into each factor. Site i acts on tensor factor i.

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::poly::CPoly;
use crate::scalar::{GammaCtx, JetGammaCtx, QContext, Scalar, C64};

/// Matrices of the spin-l representation in the basis v_0..v_{2l}:
/// `E v_r = [r] v_{r-1}`, `F v_r = [2l-r] v_{r+1}`, `q^H v_r = q^{l-r} v_r`.
#[derive(Debug, Clone)]
pub struct SiteRep<S> {
    pub dim: usize,
    pub e: Mat<S>,
    pub f: Mat<S>,
    pub qh: Mat<S>,
    pub qh_inv: Mat<S>,
}

/// Complex value part of a context's anisotropy, for preconditions that only
/// depend on the base point.
pub trait GammaValue {
    fn gamma_c(&self) -> C64;
}

impl GammaValue for GammaCtx {
    fn gamma_c(&self) -> C64 {
        self.gamma
    }
}

impl GammaValue for JetGammaCtx {
    fn gamma_c(&self) -> C64 {
        self.gamma.val
    }
}

pub fn build_site_rep<C>(two_ell: i64, ctx: &C) -> Result<SiteRep<C::S>>
where
    C: QContext + GammaValue,
{
    if two_ell < 1 {
        return Err(Error::InvalidChain(format!(
            "spin must be a positive half-integer (got 2l = {two_ell})"
        )));
    }
    let base = GammaCtx {
        gamma: ctx.gamma_c(),
    };
    for k in 1..=two_ell {
        let p = base.qpow(C64::new(2.0 * k as f64, 0.0));
        if (p - C64::new(1.0, 0.0)).norm() <= 1e-9 {
            return Err(Error::ReducibleRepresentation { k, two_ell });
        }
    }
    let dim = two_ell as usize + 1;
    let mut e = Mat::zeros(dim, dim);
    let mut f = Mat::zeros(dim, dim);
    let mut qh = Mat::zeros(dim, dim);
    let mut qh_inv = Mat::zeros(dim, dim);
    for r in 0..dim {
        let ri = r as i64;
        if r > 0 {
            e[(r - 1, r)] = ctx.qnum(C64::new(ri as f64, 0.0));
        }
        if r + 1 < dim {
            f[(r + 1, r)] = ctx.qnum(C64::new((two_ell - ri) as f64, 0.0));
        }
        let half = C64::new((two_ell - 2 * ri) as f64 / 2.0, 0.0);
        qh[(r, r)] = ctx.qpow(half);
        qh_inv[(r, r)] = ctx.qpow(-half);
    }
    Ok(SiteRep {
        dim,
        e,
        f,
        qh,
        qh_inv,
    })
}

/// Polynomial in the spectral parameter with dense matrix coefficients;
/// `coeffs[d]` multiplies `u^d`.
#[derive(Debug, Clone)]
pub struct OperatorPoly<S> {
    pub coeffs: Vec<Mat<S>>,
}

impl<S: Scalar> OperatorPoly<S> {
    pub fn zero(dim: usize) -> Self {
        OperatorPoly {
            coeffs: vec![Mat::zeros(dim, dim)],
        }
    }

    pub fn constant(m: Mat<S>) -> Self {
        OperatorPoly { coeffs: vec![m] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].rows()
    }

    /// Horner evaluation; works for complex and jet arguments alike.
    pub fn eval(&self, u: S) -> Mat<S> {
        let mut acc = self.coeffs.last().expect("nonempty").clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = &acc.scale(u) + c;
        }
        acc
    }

    /// Apply the evaluated operator to a vector without forming the matrix sum.
    pub fn apply(&self, u: S, v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.coeffs[0].rows()];
        let mut upow = S::one();
        for c in &self.coeffs {
            let cv = c.apply(v);
            for (o, x) in out.iter_mut().zip(cv) {
                *o = *o + upow * x;
            }
            upow = upow * u;
        }
        out
    }

    fn add(&self, other: &OperatorPoly<S>) -> OperatorPoly<S> {
        let dim = self.dim();
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for d in 0..n {
            let mut m = Mat::zeros(dim, dim);
            if let Some(a) = self.coeffs.get(d) {
                m = &m + a;
            }
            if let Some(b) = other.coeffs.get(d) {
                m = &m + b;
            }
            coeffs.push(m);
        }
        OperatorPoly { coeffs }
    }

    /// Product `sum_{d1,d2} kron(site[d1], rest[d2]) u^{d1+d2}` where `site`
    /// acts on the more significant tensor factor.
    fn kron_mul(site: &OperatorPoly<S>, rest: &OperatorPoly<S>) -> OperatorPoly<S> {
        let dim = site.coeffs[0].rows() * rest.coeffs[0].rows();
        let deg = site.degree() + rest.degree();
        let mut coeffs = vec![Mat::zeros(dim, dim); deg + 1];
        for (d1, a) in site.coeffs.iter().enumerate() {
            for (d2, b) in rest.coeffs.iter().enumerate() {
                coeffs[d1 + d2] = &coeffs[d1 + d2] + &a.kron(b);
            }
        }
        OperatorPoly { coeffs }
    }
}

/// The four monodromy entries on the full chain.
#[derive(Debug, Clone)]
pub struct Monodromy<S> {
    pub a: OperatorPoly<S>,
    pub b: OperatorPoly<S>,
    pub c: OperatorPoly<S>,
    pub d: OperatorPoly<S>,
}

impl<S: Scalar> Monodromy<S> {
    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Transfer matrix `T(u) = A(u) + kappa D(u)`.
    pub fn transfer(&self, kappa: S, u: S) -> Mat<S> {
        &self.a.eval(u) + &self.d.eval(u).scale(kappa)
    }

    pub fn transfer_apply(&self, kappa: S, u: S, v: &[S]) -> Vec<S> {
        let av = self.a.apply(u, v);
        let dv = self.d.apply(u, v);
        av.into_iter().zip(dv).map(|(x, y)| x + kappa * y).collect()
    }
}

/// Build the monodromy matrix over the context's scalar ring.
pub fn build_monodromy<C>(spec: &ChainSpec, ctx: &C, cap: usize) -> Result<Monodromy<C::S>>
where
    C: QContext + GammaValue,
{
    spec.check_cap(cap)?;
    let qdiff = ctx.qdiff();

    // 2x2 block of operator polynomials, starting from the identity on a
    // one-dimensional space and absorbing sites N, N-1, .., 1 in this order.
    let mut pa = OperatorPoly::constant(Mat::<C::S>::identity(1));
    let mut pb = OperatorPoly::zero(1);
    let mut pc = OperatorPoly::zero(1);
    let mut pd = OperatorPoly::constant(Mat::<C::S>::identity(1));

    for site in spec.sites.iter().rev() {
        let rep = build_site_rep(site.two_ell, ctx)?;
        let z = ctx.embed(site.z);
        let dim = rep.dim;

        // z_i L_i(u/z_i) entries as degree-<=1 polynomials on V_i.
        let la = OperatorPoly {
            coeffs: vec![rep.qh_inv.scale(-z), rep.qh.clone()],
        };
        let lb = OperatorPoly {
            coeffs: vec![Mat::zeros(dim, dim), rep.f.scale(qdiff)],
        };
        let lc = OperatorPoly {
            coeffs: vec![rep.e.scale(z * qdiff)],
        };
        let ld = OperatorPoly {
            coeffs: vec![rep.qh.scale(-z), rep.qh_inv.clone()],
        };

        let a_new = OperatorPoly::kron_mul(&la, &pa).add(&OperatorPoly::kron_mul(&lc, &pb));
        let b_new = OperatorPoly::kron_mul(&lb, &pa).add(&OperatorPoly::kron_mul(&ld, &pb));
        let c_new = OperatorPoly::kron_mul(&la, &pc).add(&OperatorPoly::kron_mul(&lc, &pd));
        let d_new = OperatorPoly::kron_mul(&lb, &pc).add(&OperatorPoly::kron_mul(&ld, &pd));
        pa = a_new;
        pb = b_new;
        pc = c_new;
        pd = d_new;
    }

    Ok(Monodromy {
        a: pa,
        b: pb,
        c: pc,
        d: pd,
    })
}

/// Vacuum eigenvalue of A(u): `prod_i (u q^{l_i} - z_i q^{-l_i})`.
pub fn script_a<C: QContext>(spec: &ChainSpec, ctx: &C, u: C::S) -> C::S {
    let mut acc = C::S::one();
    for site in &spec.sites {
        let half = C64::new(site.two_ell as f64 / 2.0, 0.0);
        acc = acc * (u * ctx.qpow(half) - ctx.embed(site.z) * ctx.qpow(-half));
    }
    acc
}

/// Vacuum eigenvalue of D(u): `prod_i (u q^{-l_i} - z_i q^{l_i})`.
pub fn script_d<C: QContext>(spec: &ChainSpec, ctx: &C, u: C::S) -> C::S {
    let mut acc = C::S::one();
    for site in &spec.sites {
        let half = C64::new(site.two_ell as f64 / 2.0, 0.0);
        acc = acc * (u * ctx.qpow(-half) - ctx.embed(site.z) * ctx.qpow(half));
    }
    acc
}

/// Coefficients of the scalar polynomial `script_a(u)`.
pub fn script_a_poly(spec: &ChainSpec) -> CPoly {
    let ctx = spec.gamma_ctx();
    let mut p = CPoly::one();
    for site in &spec.sites {
        let half = C64::new(site.two_ell as f64 / 2.0, 0.0);
        p.mul_linear(ctx.qpow(half), -site.z * ctx.qpow(-half));
    }
    p
}

/// Coefficients of the scalar polynomial `script_d(u)`.
pub fn script_d_poly(spec: &ChainSpec) -> CPoly {
    let ctx = spec.gamma_ctx();
    let mut p = CPoly::one();
    for site in &spec.sites {
        let half = C64::new(site.two_ell as f64 / 2.0, 0.0);
        p.mul_linear(ctx.qpow(-half), -site.z * ctx.qpow(half));
    }
    p
}
