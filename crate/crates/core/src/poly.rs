//! Scalar polynomials with complex coefficients and companion-matrix root finding.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::C64;

/// Polynomial `sum coeffs[d] * u^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoly {
    pub coeffs: Vec<C64>,
}

impl CPoly {
    pub fn constant(c: C64) -> Self {
        CPoly { coeffs: vec![c] }
    }

    pub fn one() -> Self {
        CPoly::constant(C64::new(1.0, 0.0))
    }

    pub fn eval(&self, u: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * u + c;
        }
        acc
    }

    pub fn eval_deriv(&self, u: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (d, &c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * u + c * C64::new(d as f64, 0.0);
        }
        acc
    }

    /// Multiply by the linear factor `slope*u + intercept`.
    pub fn mul_linear(&mut self, slope: C64, intercept: C64) {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + 1];
        for (d, &c) in self.coeffs.iter().enumerate() {
            out[d] += c * intercept;
            out[d + 1] += c * slope;
        }
        self.coeffs = out;
    }

    pub fn sub_scaled(&self, other: &CPoly, s: C64) -> CPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (d, &c) in self.coeffs.iter().enumerate() {
            out[d] += c;
        }
        for (d, &c) in other.coeffs.iter().enumerate() {
            out[d] -= s * c;
        }
        CPoly { coeffs: out }
    }

    /// Degree after dropping numerically-zero leading coefficients
    /// (relative threshold `1e-14` of the largest coefficient).
    pub fn trimmed(&self) -> CPoly {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() > 1 {
            if coeffs.last().unwrap().norm() <= 1e-14 * scale.max(1e-300) {
                coeffs.pop();
            } else {
                break;
            }
        }
        CPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.trimmed().coeffs.len().saturating_sub(1)
    }

    /// All roots via the companion matrix of the trimmed, monic-normalized
    /// polynomial. Degree zero yields no roots.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let p = self.trimmed();
        let n = p.coeffs.len() - 1;
        if n == 0 {
            return Ok(Vec::new());
        }
        let lead = p.coeffs[n];
        let mut comp = DMatrix::<C64>::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = C64::new(1.0, 0.0);
        }
        for i in 0..n {
            comp[(i, n - 1)] = -p.coeffs[i] / lead;
        }
        let schur = comp
            .try_schur(1e-14, 100_000)
            .ok_or_else(|| Error::Eigen("companion matrix Schur iteration stalled".into()))?;
        let evals = schur
            .eigenvalues()
            .ok_or_else(|| Error::Eigen("companion matrix eigenvalues unavailable".into()))?;
        let mut roots: Vec<C64> = evals.iter().cloned().collect();
        roots.sort_by(|a, b| {
            (a.re, a.im)
                .partial_cmp(&(b.re, b.im))
                .expect("finite roots")
        });
        Ok(roots)
    }
}
