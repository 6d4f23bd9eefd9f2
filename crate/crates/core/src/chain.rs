//! Chain data: site spins, inhomogeneities, anisotropy, twist, and the
//! weight-sector bookkeeping of the tensor-product space.
//!
//! Half-integer spins are stored as the integers `2l` to keep them exact. The
//! tensor basis is mixed-radix with site 1 as the most significant digit, so
//! serialized vectors are reproducible.

use crate::error::{Error, Result};
use crate::scalar::{rel_close, GammaCtx, QContext, C64};

pub const DEFAULT_DIM_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    /// Twice the spin; a positive integer.
    pub two_ell: i64,
    /// Inhomogeneity parameter; nonzero.
    pub z: C64,
}

impl Site {
    pub fn dim(&self) -> usize {
        self.two_ell as usize + 1
    }
}

#[derive(Debug, Clone)]
pub struct ChainSpec {
    pub sites: Vec<Site>,
    pub gamma: C64,
    pub kappa: C64,
    /// Set when `q^{2l_i} z_i = q^{-2l_j} z_j` for some pair, i.e. the vacuum
    /// eigenvalue polynomials share a root. Early identities still hold, so
    /// this is a warning rather than an error.
    pub coprime_warning: bool,
}

impl ChainSpec {
    pub fn new(sites: Vec<Site>, gamma: C64, kappa: C64) -> Result<Self> {
        let ctx = GammaCtx::new(gamma)?;
        if kappa == C64::new(0.0, 0.0) {
            return Err(Error::InvalidChain("twist kappa must be nonzero".into()));
        }
        let mut max_two_ell = 0;
        for (i, s) in sites.iter().enumerate() {
            if s.two_ell < 1 {
                return Err(Error::InvalidChain(format!(
                    "site {i}: spin must be a positive half-integer (got 2l = {})",
                    s.two_ell
                )));
            }
            if s.z == C64::new(0.0, 0.0) {
                return Err(Error::InvalidChain(format!("site {i}: z must be nonzero")));
            }
            max_two_ell = max_two_ell.max(s.two_ell);
        }
        // Irreducibility of every site representation: q^{2k} != 1 for k = 1..max(2l).
        for k in 1..=max_two_ell {
            let p = ctx.qpow(C64::new(2.0 * k as f64, 0.0));
            if (p - C64::new(1.0, 0.0)).norm() <= 1e-9 {
                return Err(Error::ReducibleRepresentation {
                    k,
                    two_ell: max_two_ell,
                });
            }
        }
        let mut coprime_warning = false;
        for i in &sites {
            for j in &sites {
                let lhs = ctx.qpow(C64::new(i.two_ell as f64, 0.0)) * i.z;
                let rhs = ctx.qpow(C64::new(-j.two_ell as f64, 0.0)) * j.z;
                if rel_close(lhs, rhs, 1e-9) {
                    coprime_warning = true;
                }
            }
        }
        Ok(ChainSpec {
            sites,
            gamma,
            kappa,
            coprime_warning,
        })
    }

    pub fn gamma_ctx(&self) -> GammaCtx {
        GammaCtx { gamma: self.gamma }
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    /// Total Hilbert-space dimension, prod (2l_i + 1).
    pub fn dim(&self) -> usize {
        self.sites.iter().map(Site::dim).product()
    }

    pub fn check_cap(&self, cap: usize) -> Result<()> {
        let dim = self.dim();
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }
        Ok(())
    }

    /// Twice the total spin, sum 2l_i.
    pub fn ell_tot_x2(&self) -> i64 {
        self.sites.iter().map(|s| s.two_ell).sum()
    }

    pub fn ell_tot(&self) -> f64 {
        self.ell_tot_x2() as f64 / 2.0
    }

    pub fn max_abs_z(&self) -> f64 {
        self.sites.iter().map(|s| s.z.norm()).fold(0.0, f64::max)
    }

    /// Mixed-radix decode of a basis index into site occupations r_i.
    pub fn occupations(&self, mut idx: usize) -> Vec<usize> {
        let mut rs = vec![0usize; self.sites.len()];
        for (i, s) in self.sites.iter().enumerate().rev() {
            rs[i] = idx % s.dim();
            idx /= s.dim();
        }
        rs
    }

    pub fn index_of(&self, rs: &[usize]) -> usize {
        let mut idx = 0usize;
        for (s, &r) in self.sites.iter().zip(rs) {
            idx = idx * s.dim() + r;
        }
        idx
    }

    /// Excitation number sum r_i for a basis index.
    pub fn excitation(&self, idx: usize) -> usize {
        self.occupations(idx).iter().sum()
    }

    /// Diagonal of H_Sigma: entry ell_tot - sum r_i.
    pub fn hsigma_diag(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.ell_tot() - self.excitation(i) as f64)
            .collect()
    }

    /// Basis indices of the weight sector with sum r_i = k, in increasing order.
    pub fn sector_indices(&self, k: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.excitation(i) == k)
            .collect()
    }

    /// Dimension of the weight sector sum r_i = k, by coefficient convolution.
    pub fn weight_sector_dim(&self, k: usize) -> usize {
        let mut counts = vec![1u64];
        for s in &self.sites {
            let mut next = vec![0u64; counts.len() + s.two_ell as usize];
            for (d, &c) in counts.iter().enumerate() {
                for r in 0..s.dim() {
                    next[d + r] += c;
                }
            }
            counts = next;
        }
        counts.get(k).copied().unwrap_or(0) as usize
    }

    /// Unit vector with all r_i = 0.
    pub fn vacuum(&self) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        v[0] = C64::new(1.0, 0.0);
        v
    }

    /// Whether the inhomogeneities are well separated:
    /// `q^{2(r-l_i)} z_i != q^{2(s-l_j)} z_j` for all distinct translate points.
    pub fn well_separated(&self) -> bool {
        let ctx = self.gamma_ctx();
        let mut points: Vec<C64> = Vec::new();
        for s in &self.sites {
            for r in 0..=s.two_ell {
                let x = C64::new((2 * r - s.two_ell) as f64, 0.0);
                points.push(ctx.qpow(x) * s.z);
            }
        }
        for a in 0..points.len() {
            for b in (a + 1)..points.len() {
                if rel_close(points[a], points[b], 1e-9) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn spec(spins: &[i64], zs: &[(f64, f64)], gamma: f64, kappa: (f64, f64)) -> ChainSpec {
        let sites = spins
            .iter()
            .zip(zs)
            .map(|(&two_ell, &(re, im))| Site {
                two_ell,
                z: c(re, im),
            })
            .collect();
        ChainSpec::new(sites, c(gamma, 0.0), c(kappa.0, kappa.1)).unwrap()
    }

    #[test]
    fn weight_sector_dims() {
        let s2 = spec(&[1, 1], &[(1.0, 0.0), (2.3, 0.0)], 0.7, (1.0, 0.0));
        assert_eq!(s2.weight_sector_dim(0), 1);
        assert_eq!(s2.weight_sector_dim(1), 2);
        assert_eq!(s2.weight_sector_dim(2), 1);
        assert_eq!(s2.weight_sector_dim(3), 0);
        let s1 = spec(&[2], &[(1.0, 0.0)], 0.7, (1.0, 0.0));
        assert_eq!(s1.weight_sector_dim(2), 1);
        // sector dims sum to the full dimension
        let mixed = spec(
            &[1, 2, 1],
            &[(1.0, 0.0), (2.0, 0.5), (-0.7, 0.1)],
            0.7,
            (1.3, 0.0),
        );
        let total: usize = (0..=mixed.ell_tot_x2() as usize)
            .map(|k| mixed.weight_sector_dim(k))
            .sum();
        assert_eq!(total, mixed.dim());
        for k in 0..=mixed.ell_tot_x2() as usize {
            assert_eq!(mixed.sector_indices(k).len(), mixed.weight_sector_dim(k));
        }
    }

    #[test]
    fn vacuum_is_first_basis_vector_with_top_weight() {
        let s = spec(&[1], &[(1.0, 0.0)], 0.7, (1.0, 0.0));
        let v = s.vacuum();
        assert_eq!(v[0], c(1.0, 0.0));
        assert!(v[1..].iter().all(|&x| x == c(0.0, 0.0)));
        assert_eq!(s.hsigma_diag()[0], s.ell_tot());
    }

    #[test]
    fn index_roundtrip_site_one_most_significant() {
        let s = spec(&[1, 2], &[(1.0, 0.0), (2.0, 0.0)], 0.7, (1.0, 0.0));
        // dims (2, 3); index = r1*3 + r2
        assert_eq!(s.index_of(&[1, 2]), 5);
        assert_eq!(s.occupations(5), vec![1, 2]);
        for idx in 0..s.dim() {
            assert_eq!(s.index_of(&s.occupations(idx)), idx);
        }
    }

    #[test]
    fn invalid_chains_rejected() {
        assert!(ChainSpec::new(
            vec![Site {
                two_ell: 1,
                z: c(0.0, 0.0)
            }],
            c(0.7, 0.0),
            c(1.0, 0.0)
        )
        .is_err());
        assert!(ChainSpec::new(
            vec![Site {
                two_ell: 1,
                z: c(1.0, 0.0)
            }],
            c(0.7, 0.0),
            c(0.0, 0.0)
        )
        .is_err());
        // spin 1 at gamma = pi/2 has q^4 = 1 within range: reducible
        assert!(matches!(
            ChainSpec::new(
                vec![Site {
                    two_ell: 2,
                    z: c(1.0, 0.0)
                }],
                c(PI / 2.0, 0.0),
                c(1.0, 0.0)
            ),
            Err(Error::ReducibleRepresentation { .. })
        ));
        // spin 1/2 at pi/2 is fine
        assert!(ChainSpec::new(
            vec![Site {
                two_ell: 1,
                z: c(1.0, 0.0)
            }],
            c(PI / 2.0, 0.0),
            c(1.0, 0.0)
        )
        .is_ok());
    }

    #[test]
    fn coprime_collision_sets_warning_only() {
        let gamma = c(0.7, 0.0);
        let q2 = (crate::scalar::I * gamma * 2.0).exp();
        let s = ChainSpec::new(
            vec![
                Site {
                    two_ell: 1,
                    z: c(1.0, 0.0),
                },
                Site { two_ell: 1, z: q2 },
            ],
            gamma,
            c(1.0, 0.0),
        )
        .unwrap();
        assert!(s.coprime_warning);
        let t = spec(&[1, 1], &[(1.0, 0.0), (2.3, 0.0)], 0.7, (1.0, 0.0));
        assert!(!t.coprime_warning);
    }

    #[test]
    fn well_separated_detects_translate_collisions() {
        let ok = spec(&[1, 1], &[(1.0, 0.0), (2.3, 0.0)], 0.7, (1.0, 0.0));
        assert!(ok.well_separated());
        let gamma = c(0.7, 0.0);
        let q2 = (crate::scalar::I * gamma * 2.0).exp();
        // z2 = q^2 z1 makes the r=1 translate of z1 collide with the s=0 translate of z2
        let bad = ChainSpec::new(
            vec![
                Site {
                    two_ell: 1,
                    z: c(1.0, 0.0),
                },
                Site { two_ell: 1, z: q2 },
            ],
            gamma,
            c(1.0, 0.0),
        )
        .unwrap();
        assert!(!bad.well_separated());
    }
}
