//! Scalar rings for the chain algebra: complex numbers with the `q^x = e^{i*gamma*x}`
//! power convention, q-numbers, and first-order jets in `eps = q - q0`.
//!
//! Everything downstream (representations, monodromy, creation operators) is generic
//! over [`QContext`], so the same construction code runs over plain complex scalars
//! and over jets. Jets make the `q -> q0` limits exact to first order instead of
//! relying on numerical differencing.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

/// Relative closeness of two complex numbers: `|a - b| <= tol * (1 + max(|a|, |b|))`.
pub fn rel_close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

/// Ring of scalars the operator algebra is generic over.
pub trait Scalar:
    Copy
    + std::fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Embed a complex constant.
    fn from_c(c: C64) -> Self;
    /// Largest component magnitude; used for tolerance scaling.
    fn mag(&self) -> f64;
}

impl Scalar for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn from_c(c: C64) -> Self {
        c
    }
    fn mag(&self) -> f64 {
        self.norm()
    }
}

/// First-order jet `val + der*eps` with `eps^2 = 0`.
///
/// Division requires the divisor's `val` part to be nonzero; with a zero `val`
/// the result is non-finite, which the finiteness checks downstream reject.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet1 {
    pub val: C64,
    pub der: C64,
}

impl Jet1 {
    pub fn new(val: C64, der: C64) -> Self {
        Jet1 { val, der }
    }

    pub fn constant(c: C64) -> Self {
        Jet1 {
            val: c,
            der: C64::new(0.0, 0.0),
        }
    }

    /// The jet of the expansion variable itself: `c + eps`.
    pub fn variable(c: C64) -> Self {
        Jet1 {
            val: c,
            der: C64::new(1.0, 0.0),
        }
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(self, rhs: Jet1) -> Jet1 {
        Jet1 {
            val: self.val + rhs.val,
            der: self.der + rhs.der,
        }
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    fn sub(self, rhs: Jet1) -> Jet1 {
        Jet1 {
            val: self.val - rhs.val,
            der: self.der - rhs.der,
        }
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, rhs: Jet1) -> Jet1 {
        Jet1 {
            val: self.val * rhs.val,
            der: self.val * rhs.der + self.der * rhs.val,
        }
    }
}

impl Div for Jet1 {
    type Output = Jet1;
    fn div(self, rhs: Jet1) -> Jet1 {
        let q = self.val / rhs.val;
        Jet1 {
            val: q,
            der: (self.der - q * rhs.der) / rhs.val,
        }
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    fn neg(self) -> Jet1 {
        Jet1 {
            val: -self.val,
            der: -self.der,
        }
    }
}

impl Scalar for Jet1 {
    fn zero() -> Self {
        Jet1::constant(C64::new(0.0, 0.0))
    }
    fn one() -> Self {
        Jet1::constant(C64::new(1.0, 0.0))
    }
    fn from_c(c: C64) -> Self {
        Jet1::constant(c)
    }
    fn mag(&self) -> f64 {
        self.val.norm().max(self.der.norm())
    }
}

/// Provider of q-powers and q-numbers over a scalar ring.
///
/// The fractional-power convention is `q^x = e^{i*gamma*x}`: the branch is fixed
/// by `gamma`, never by a complex logarithm of `q`.
pub trait QContext {
    type S: Scalar;
    fn qpow(&self, x: C64) -> Self::S;
    fn qnum(&self, x: C64) -> Self::S;
    fn embed(&self, c: C64) -> Self::S {
        Self::S::from_c(c)
    }
    /// `q - q^{-1}`, the denominator of q-numbers.
    fn qdiff(&self) -> Self::S {
        self.qpow(C64::new(1.0, 0.0)) - self.qpow(C64::new(-1.0, 0.0))
    }
}

/// Anisotropy context over plain complex scalars. `gamma` may be complex,
/// which allows probing `|q| != 1`.
#[derive(Debug, Clone, Copy)]
pub struct GammaCtx {
    pub gamma: C64,
}

impl GammaCtx {
    /// Fails when `sin(gamma) = 0`, i.e. `q^2 = 1`.
    pub fn new(gamma: C64) -> Result<Self> {
        if gamma.sin().norm() <= 1e-12 {
            return Err(Error::DegenerateAnisotropy);
        }
        Ok(GammaCtx { gamma })
    }

    pub fn q(&self) -> C64 {
        (I * self.gamma).exp()
    }
}

impl QContext for GammaCtx {
    type S = C64;

    fn qpow(&self, x: C64) -> C64 {
        (I * self.gamma * x).exp()
    }

    fn qnum(&self, x: C64) -> C64 {
        (self.gamma * x).sin() / self.gamma.sin()
    }
}

/// Anisotropy context over jets: `gamma` itself is a jet, so every q-power
/// carries its first derivative along.
#[derive(Debug, Clone, Copy)]
pub struct JetGammaCtx {
    pub gamma: Jet1,
}

impl JetGammaCtx {
    pub fn new(gamma: Jet1) -> Result<Self> {
        if gamma.val.sin().norm() <= 1e-12 {
            return Err(Error::DegenerateAnisotropy);
        }
        Ok(JetGammaCtx { gamma })
    }

    /// Context for the expansion `q = q0 + eps` around `q0 = e^{i*gamma0}`:
    /// `gamma(eps) = gamma0 - i*eps/q0`, so that `eta^x = (q/q0)^x = 1 + x*eps/q0`.
    pub fn at_q(q0: C64, gamma0: C64) -> Result<Self> {
        JetGammaCtx::new(Jet1::new(gamma0, -I / q0))
    }
}

impl QContext for JetGammaCtx {
    type S = Jet1;

    fn qpow(&self, x: C64) -> Jet1 {
        // q^x = e^{i*gamma*x} with gamma = a + b*eps expands to
        // e^{i*a*x} * (1 + i*b*x*eps).
        let val = (I * self.gamma.val * x).exp();
        Jet1 {
            val,
            der: I * self.gamma.der * x * val,
        }
    }

    fn qnum(&self, x: C64) -> Jet1 {
        (self.qpow(x) - self.qpow(-x)) / self.qdiff()
    }
}

/// First-order expansion of `q^x` at `q = q0 + eps`, i.e. `q0^x * (1 + x*eps/q0)`.
///
/// `q0` must equal `e^{i*gamma0}`; the branch of the fractional power comes from
/// `gamma0`.
pub fn jet_qpow(q0: C64, gamma0: C64, x: C64) -> Jet1 {
    JetGammaCtx {
        gamma: Jet1::new(gamma0, -I / q0),
    }
    .qpow(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn qpow_at_zero_exponent_is_one() {
        let ctx = GammaCtx::new(c(0.7, 0.0)).unwrap();
        assert!(rel_close(ctx.qpow(c(0.0, 0.0)), c(1.0, 0.0), 1e-14));
    }

    #[test]
    fn qpow_quarter_turn() {
        let ctx = GammaCtx::new(c(PI / 2.0, 0.0)).unwrap();
        assert!(rel_close(ctx.qpow(c(1.0, 0.0)), c(0.0, 1.0), 1e-14));
    }

    #[test]
    fn qpow_half_turn() {
        let ctx = GammaCtx::new(c(PI / 3.0, 0.0)).unwrap();
        assert!(rel_close(ctx.qpow(c(3.0, 0.0)), c(-1.0, 0.0), 1e-14));
    }

    #[test]
    fn qnum_basics() {
        let ctx = GammaCtx::new(c(0.7, 0.0)).unwrap();
        assert!(rel_close(ctx.qnum(c(1.0, 0.0)), c(1.0, 0.0), 1e-14));
        assert!(rel_close(ctx.qnum(c(0.0, 0.0)), c(0.0, 0.0), 1e-14));
        // sin(2*pi/3)/sin(pi/3) = 2*cos(pi/3) = 1
        let ctx3 = GammaCtx::new(c(PI / 3.0, 0.0)).unwrap();
        assert!(rel_close(ctx3.qnum(c(2.0, 0.0)), c(1.0, 0.0), 1e-14));
    }

    #[test]
    fn qnum_matches_qpow_quotient() {
        let ctx = GammaCtx::new(c(0.7, 0.1)).unwrap();
        for x in [c(0.5, 0.0), c(2.0, -0.3), c(-1.5, 0.7)] {
            let via_pow = (ctx.qpow(x) - ctx.qpow(-x)) / ctx.qdiff();
            assert!(rel_close(ctx.qnum(x), via_pow, 1e-12));
        }
    }

    #[test]
    fn degenerate_anisotropy_rejected() {
        assert!(GammaCtx::new(c(0.0, 0.0)).is_err());
        assert!(GammaCtx::new(c(PI, 0.0)).is_err());
        assert!(GammaCtx::new(c(0.7, 0.0)).is_ok());
    }

    #[test]
    fn jet_qpow_trivial_exponents() {
        let q0 = (I * c(0.7, 0.0)).exp();
        let j0 = jet_qpow(q0, c(0.7, 0.0), c(0.0, 0.0));
        assert!(rel_close(j0.val, c(1.0, 0.0), 1e-14));
        assert!(rel_close(j0.der, c(0.0, 0.0), 1e-14));
        // x = 1 gives q itself: q0 + 1*eps.
        let j1 = jet_qpow(q0, c(0.7, 0.0), c(1.0, 0.0));
        assert!(rel_close(j1.val, q0, 1e-14));
        assert!(rel_close(j1.der, c(1.0, 0.0), 1e-14));
    }

    #[test]
    fn jet_qpow_square_at_quarter_turn() {
        // q0 = i, x = 2: q0^2 * (1 + 2*eps/q0) = -1 + 2i*eps.
        let q0 = c(0.0, 1.0);
        let j = jet_qpow(q0, c(PI / 2.0, 0.0), c(2.0, 0.0));
        assert!(rel_close(j.val, c(-1.0, 0.0), 1e-14));
        assert!(rel_close(j.der, c(0.0, 2.0), 1e-14));
    }

    #[test]
    fn jet_qpow_matches_central_difference() {
        // Finite-difference oracle in eps = q - q0 along the gamma parametrization.
        let gamma0 = c(PI / 2.0, 0.0);
        let q0 = (I * gamma0).exp();
        let delta = 1e-6;
        for x in [c(2.0, 0.0), c(0.5, 0.0), c(-1.5, 0.3)] {
            let f = |eps: f64| {
                let gamma = gamma0 - I * c(eps, 0.0) / q0;
                (I * gamma * x).exp()
            };
            let fd = (f(delta) - f(-delta)) / c(2.0 * delta, 0.0);
            let j = jet_qpow(q0, gamma0, x);
            assert!(
                rel_close(j.der, fd, 1e-8),
                "x = {x}: jet {} vs fd {}",
                j.der,
                fd
            );
            assert!(rel_close(j.val, f(0.0), 1e-14));
        }
    }

    fn arb_c() -> impl Strategy<Value = C64> {
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C64::new(re, im))
    }

    fn arb_jet() -> impl Strategy<Value = Jet1> {
        (arb_c(), arb_c()).prop_map(|(val, der)| Jet1::new(val, der))
    }

    fn jet_close(a: Jet1, b: Jet1, tol: f64) -> bool {
        rel_close(a.val, b.val, tol) && rel_close(a.der, b.der, tol)
    }

    proptest! {
        #[test]
        fn qpow_is_multiplicative(x in arb_c(), y in arb_c()) {
            let ctx = GammaCtx::new(c(0.7, 0.05)).unwrap();
            prop_assert!(rel_close(ctx.qpow(x + y), ctx.qpow(x) * ctx.qpow(y), 1e-12));
        }

        #[test]
        fn qnum_is_odd(x in arb_c()) {
            let ctx = GammaCtx::new(c(0.7, 0.0)).unwrap();
            prop_assert!(rel_close(ctx.qnum(-x), -ctx.qnum(x), 1e-12));
        }

        #[test]
        fn jet_mul_associates(a in arb_jet(), b in arb_jet(), d in arb_jet()) {
            prop_assert!(jet_close((a * b) * d, a * (b * d), 1e-12));
        }

        #[test]
        fn jet_mul_distributes(a in arb_jet(), b in arb_jet(), d in arb_jet()) {
            prop_assert!(jet_close(a * (b + d), a * b + a * d, 1e-12));
        }

        #[test]
        fn jet_div_inverts_mul(a in arb_jet(), b in arb_jet()) {
            prop_assume!(b.val.norm() > 1e-3);
            prop_assert!(jet_close((a * b) / b, a, 1e-10));
        }

        #[test]
        fn jet_qpow_is_multiplicative(x in arb_c(), y in arb_c()) {
            let gamma0 = c(PI / 3.0, 0.0);
            let q0 = (I * gamma0).exp();
            let lhs = jet_qpow(q0, gamma0, x + y);
            let rhs = jet_qpow(q0, gamma0, x) * jet_qpow(q0, gamma0, y);
            prop_assert!(jet_close(lhs, rhs, 1e-12));
        }
    }
}
