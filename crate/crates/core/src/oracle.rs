//! Brute-force independent checks: exact diagonalization of the transfer matrix
//! per weight sector, commutation-identity sweeps, and the completeness census
//! of admissible offdiagonal solutions against weight-sector dimensions.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bethe::{solve_bethe, SolveOpts, SolveReport};
use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::qalgebra::build_monodromy;
use crate::scalar::{QContext, C64};

#[derive(Debug, Clone)]
pub struct SectorSpectrum {
    /// Excitation number sum r_i of the sector.
    pub k: usize,
    pub dimension: usize,
    /// Eigenvalues sorted by (re, im).
    pub eigenvalues: Vec<C64>,
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub u0: C64,
    pub sectors: Vec<SectorSpectrum>,
}

impl SpectrumReport {
    pub fn sector(&self, k: usize) -> Option<&SectorSpectrum> {
        self.sectors.iter().find(|s| s.k == k)
    }
}

/// Distance from `lam` to the nearest eigenvalue in the list, relative to
/// `1 + |lam|`. Ties are irrelevant for the distance; `None` for empty lists.
pub fn nearest_relative_distance(eigenvalues: &[C64], lam: C64) -> Option<f64> {
    eigenvalues
        .iter()
        .map(|&e| (e - lam).norm())
        .min_by(|a, b| a.partial_cmp(b).expect("finite distances"))
        .map(|d| d / (1.0 + lam.norm()))
}

/// Exact diagonalization of T(u0), block by H_Sigma weight sector.
pub fn exact_spectrum(spec: &ChainSpec, u0: C64, cap: usize) -> Result<SpectrumReport> {
    spec.check_cap(cap)?;
    let m = build_monodromy(spec, &spec.gamma_ctx(), cap)?;
    let t = m.transfer(spec.kappa, u0);
    let mut sectors = Vec::new();
    for k in 0..=spec.ell_tot_x2() as usize {
        let idx = spec.sector_indices(k);
        let n = idx.len();
        if n == 0 {
            continue;
        }
        let block = DMatrix::<C64>::from_fn(n, n, |i, j| t[(idx[i], idx[j])]);
        let schur = block
            .try_schur(1e-13, 200_000)
            .ok_or_else(|| Error::Eigen(format!("sector k = {k}: Schur iteration stalled")))?;
        let evals = schur
            .eigenvalues()
            .ok_or_else(|| Error::Eigen(format!("sector k = {k}: eigenvalues unavailable")))?;
        let mut eigenvalues: Vec<C64> = evals.iter().cloned().collect();
        eigenvalues.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).expect("finite"));
        sectors.push(SectorSpectrum {
            k,
            dimension: n,
            eigenvalues,
        });
    }
    Ok(SpectrumReport { u0, sectors })
}

/// Max scaled residuals of the three monodromy commutation identities and of
/// the transfer-matrix commutator, over seeded random (u, v) pairs.
#[derive(Debug, Clone, Copy)]
pub struct CommutationReport {
    /// `[B(u), B(v)] = 0`
    pub bb: f64,
    /// `(u-v) A(u) B(v) = (u q^{-1} - v q) B(v) A(u) + v (q - q^{-1}) B(u) A(v)`
    pub ab: f64,
    /// `(u-v) D(u) B(v) = (u q - v q^{-1}) B(v) D(u) - v (q - q^{-1}) B(u) D(v)`
    pub db: f64,
    /// `[T(u), T(v)] = 0`
    pub tt: f64,
}

impl CommutationReport {
    pub fn max(&self) -> f64 {
        self.bb.max(self.ab).max(self.db).max(self.tt)
    }
}

fn random_point(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    let r = radius * (0.2 + 1.6 * rng.random::<f64>());
    C64::new(r * theta.cos(), r * theta.sin())
}

pub fn check_commutation(
    spec: &ChainSpec,
    trials: usize,
    seed: u64,
    cap: usize,
) -> Result<CommutationReport> {
    let ctx = spec.gamma_ctx();
    let m = build_monodromy(spec, &ctx, cap)?;
    let qp = ctx.qpow(C64::new(1.0, 0.0));
    let qm = ctx.qpow(C64::new(-1.0, 0.0));
    let qd = ctx.qdiff();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = 1.0 + spec.max_abs_z();
    let mut rep = CommutationReport {
        bb: 0.0,
        ab: 0.0,
        db: 0.0,
        tt: 0.0,
    };
    for _ in 0..trials {
        let u = random_point(&mut rng, radius);
        let v = random_point(&mut rng, radius);
        let au = m.a.eval(u);
        let av = m.a.eval(v);
        let bu = m.b.eval(u);
        let bv = m.b.eval(v);
        let du = m.d.eval(u);
        let dv = m.d.eval(v);

        let comm = &(&bu * &bv) - &(&bv * &bu);
        let scale = (bu.fro_norm() * bv.fro_norm()).max(1.0);
        rep.bb = rep.bb.max(comm.fro_norm() / scale);

        let lhs = (&au * &bv).scale(u - v);
        let r1 = (&bv * &au).scale(u * qm - v * qp);
        let r2 = (&bu * &av).scale(v * qd);
        let resid = &lhs - &(&r1 + &r2);
        let scale = lhs
            .fro_norm()
            .max(r1.fro_norm())
            .max(r2.fro_norm())
            .max(1.0);
        rep.ab = rep.ab.max(resid.fro_norm() / scale);

        let lhs = (&du * &bv).scale(u - v);
        let r1 = (&bv * &du).scale(u * qp - v * qm);
        let r2 = (&bu * &dv).scale(v * qd);
        let resid = &lhs - &(&r1 - &r2);
        let scale = lhs
            .fro_norm()
            .max(r1.fro_norm())
            .max(r2.fro_norm())
            .max(1.0);
        rep.db = rep.db.max(resid.fro_norm() / scale);

        let tu = &au + &du.scale(spec.kappa);
        let tv = &av + &dv.scale(spec.kappa);
        let comm = tu.commutator(&tv);
        let scale = (tu.fro_norm() * tv.fro_norm()).max(1.0);
        rep.tt = rep.tt.max(comm.fro_norm() / scale);
    }
    Ok(rep)
}

/// One census row: the twist sample and the counts that must agree.
#[derive(Debug, Clone)]
pub struct CensusEntry {
    pub kappa: C64,
    pub solutions: usize,
    pub admissible_offdiagonal: usize,
    pub weight_dim: usize,
    pub gram_rank: usize,
    pub nonconverged: usize,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct CensusReport {
    pub k: usize,
    /// Hypothesis check; when false the census still runs as a conjecture probe.
    pub well_separated: bool,
    pub entries: Vec<CensusEntry>,
}

impl CensusReport {
    pub fn all_ok(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
    }
}

/// Run the completeness census at `n_kappa` seeded twist samples drawn from the
/// annulus `0.5 <= |kappa| <= 2`.
pub fn completeness_census(
    spec: &ChainSpec,
    k: usize,
    n_kappa: usize,
    opts: &SolveOpts,
) -> Result<CensusReport> {
    let well_separated = spec.well_separated();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut entries = Vec::with_capacity(n_kappa);
    for _ in 0..n_kappa {
        let theta = std::f64::consts::TAU * rng.random::<f64>();
        let r = 0.5 + 1.5 * rng.random::<f64>();
        let kappa = C64::new(r * theta.cos(), r * theta.sin());
        let sample = ChainSpec::new(spec.sites.clone(), spec.gamma, kappa)?;
        let rep: SolveReport = solve_bethe(&sample, k, opts)?;
        entries.push(CensusEntry {
            kappa,
            solutions: rep.solutions.len(),
            admissible_offdiagonal: rep.admissible_offdiagonal,
            weight_dim: rep.weight_dim,
            gram_rank: rep.gram_rank,
            nonconverged: rep.nonconverged,
            ok: rep.census_ok,
        });
    }
    Ok(CensusReport {
        k,
        well_separated,
        entries,
    })
}

/// Frobenius norm of a complex matrix block restricted to a sector, test helper
/// for block structure assertions.
pub fn offsector_norm(spec: &ChainSpec, t: &Mat<C64>) -> f64 {
    let dim = spec.dim();
    let mut acc = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            if spec.excitation(i) != spec.excitation(j) {
                acc += t[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bethe::eigenvalue_tbv;
    use crate::chain::{Site, DEFAULT_DIM_CAP};
    use crate::qalgebra::{script_a, script_d};
    use crate::scalar::rel_close;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn chain_one_site() -> ChainSpec {
        ChainSpec::new(
            vec![Site {
                two_ell: 1,
                z: c(1.0, 0.0),
            }],
            c(0.7, 0.0),
            c(1.0, 0.0),
        )
        .unwrap()
    }

    fn chain_two_sites() -> ChainSpec {
        ChainSpec::new(
            vec![
                Site {
                    two_ell: 1,
                    z: c(1.0, 0.0),
                },
                Site {
                    two_ell: 1,
                    z: c(2.3, 0.0),
                },
            ],
            c(0.7, 0.0),
            c(1.3, 0.0),
        )
        .unwrap()
    }

    fn chain_mixed() -> ChainSpec {
        ChainSpec::new(
            vec![
                Site {
                    two_ell: 1,
                    z: c(1.0, 0.0),
                },
                Site {
                    two_ell: 2,
                    z: c(2.3, 0.0),
                },
            ],
            c(0.7, 0.0),
            c(1.3, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn vacuum_sector_eigenvalue_is_script_sum() {
        let spec = chain_two_sites();
        let ctx = spec.gamma_ctx();
        let u0 = c(0.8, 0.3);
        let rep = exact_spectrum(&spec, u0, DEFAULT_DIM_CAP).unwrap();
        let s0 = rep.sector(0).unwrap();
        assert_eq!(s0.dimension, 1);
        let want = script_a(&spec, &ctx, u0) + spec.kappa * script_d(&spec, &ctx, u0);
        assert!(rel_close(s0.eigenvalues[0], want, 1e-10));
    }

    #[test]
    fn sector_dimensions_match_weight_dims() {
        let spec = chain_mixed();
        let rep = exact_spectrum(&spec, c(0.4, -0.2), DEFAULT_DIM_CAP).unwrap();
        let mut total = 0;
        for s in &rep.sectors {
            assert_eq!(s.dimension, spec.weight_sector_dim(s.k));
            total += s.dimension;
        }
        assert_eq!(total, spec.dim());
    }

    #[test]
    fn bethe_eigenvalues_appear_in_sector_spectrum() {
        let spec = chain_two_sites();
        let u0 = c(0.8, 0.3);
        let rep = exact_spectrum(&spec, u0, DEFAULT_DIM_CAP).unwrap();
        let solve = solve_bethe(&spec, 1, &SolveOpts::default()).unwrap();
        assert_eq!(solve.solutions.len(), 2);
        let sector = rep.sector(1).unwrap();
        for s in &solve.solutions {
            let lam = eigenvalue_tbv(&spec, &s.roots, u0).unwrap();
            let d = nearest_relative_distance(&sector.eigenvalues, lam).unwrap();
            assert!(d <= 1e-8, "distance {d:.3e}");
        }
    }

    #[test]
    fn commutation_identities_hold_on_desk_specs() {
        for spec in [chain_one_site(), chain_two_sites(), chain_mixed()] {
            let rep = check_commutation(&spec, 10, 7, DEFAULT_DIM_CAP).unwrap();
            assert!(rep.max() <= 1e-10, "max residual {:.3e}", rep.max());
        }
    }

    #[test]
    fn commutation_identities_hold_at_complex_anisotropy() {
        // |q| != 1 probing: gamma off the real axis
        let spec = ChainSpec::new(
            vec![
                Site {
                    two_ell: 1,
                    z: c(1.0, 0.0),
                },
                Site {
                    two_ell: 2,
                    z: c(2.3, 0.0),
                },
            ],
            c(0.7, 0.15),
            c(1.3, -0.2),
        )
        .unwrap();
        let rep = check_commutation(&spec, 10, 11, DEFAULT_DIM_CAP).unwrap();
        assert!(rep.max() <= 1e-10, "max residual {:.3e}", rep.max());
    }

    #[test]
    fn transfer_matrix_is_sector_block_diagonal() {
        let spec = chain_mixed();
        let m = build_monodromy(&spec, &spec.gamma_ctx(), DEFAULT_DIM_CAP).unwrap();
        let t = m.transfer(spec.kappa, c(0.8, 0.3));
        assert!(offsector_norm(&spec, &t) <= 1e-12 * (1.0 + t.fro_norm()));
    }

    #[test]
    fn census_on_companion_solved_sector() {
        let spec = chain_two_sites();
        let rep = completeness_census(&spec, 1, 3, &SolveOpts::default()).unwrap();
        assert!(rep.well_separated);
        assert_eq!(rep.entries.len(), 3);
        for e in &rep.entries {
            assert_eq!(e.weight_dim, 2);
            assert_eq!(e.admissible_offdiagonal, 2, "kappa = {}", e.kappa);
            assert_eq!(e.gram_rank, 2);
            assert!(e.ok);
        }
    }

    #[test]
    fn census_trivial_vacuum_sector() {
        let spec = chain_mixed();
        let rep = completeness_census(&spec, 0, 2, &SolveOpts::default()).unwrap();
        for e in &rep.entries {
            assert_eq!(
                (e.admissible_offdiagonal, e.weight_dim, e.gram_rank),
                (1, 1, 1)
            );
            assert!(e.ok);
        }
    }

    #[test]
    fn dimension_cap_guard() {
        let spec = chain_mixed();
        assert!(matches!(
            exact_spectrum(&spec, c(0.4, 0.1), 2),
            Err(crate::error::Error::DimensionCap { dim: 6, cap: 2 })
        ));
    }

    #[test]
    fn census_runs_as_conjecture_probe_without_separation() {
        // z2 on a q-translate of z1: not well separated, census still runs
        let gamma = c(0.7, 0.0);
        let q2 = (crate::scalar::I * gamma * 2.0).exp();
        let spec = ChainSpec::new(
            vec![
                Site {
                    two_ell: 1,
                    z: c(1.0, 0.0),
                },
                Site { two_ell: 1, z: q2 },
            ],
            gamma,
            c(1.3, 0.0),
        )
        .unwrap();
        let rep = completeness_census(&spec, 1, 2, &SolveOpts::default()).unwrap();
        assert!(!rep.well_separated);
        assert_eq!(rep.entries.len(), 2);
    }

    #[test]
    fn census_newton_sector_mixed_spins() {
        let spec = chain_mixed();
        let opts = SolveOpts {
            max_starts: 160,
            ..SolveOpts::default()
        };
        let rep = completeness_census(&spec, 2, 3, &opts).unwrap();
        for e in &rep.entries {
            assert_eq!(
                e.admissible_offdiagonal, e.weight_dim,
                "kappa = {}",
                e.kappa
            );
            assert_eq!(e.gram_rank, e.weight_dim);
            assert!(e.ok);
        }
    }
}
