//! Subcommand dispatch shared by the CLI binary and the C ABI.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::bethe::{
    solve_bethe, verify_action_formulas, verify_eigen_with, SolveOpts, SolveReport,
};
use crate::chain::{ChainSpec, DEFAULT_DIM_CAP};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::mat::{vec_norm, vec_sub};
use crate::oracle::{
    check_commutation, completeness_census, exact_spectrum, nearest_relative_distance,
};
use crate::qalgebra::build_monodromy;
use crate::report::{cx, cx_list, Check, Report};
use crate::roots_of_unity::{
    degenerate_vector, nilpotent_product, solve_xeq, verify_bam, x_schedule, RootCtx, XeqOutcome,
};
use crate::scalar::C64;

pub const SUBCOMMANDS: &[&str] = &[
    "identities",
    "solve",
    "verify",
    "census",
    "nilpotency",
    "degenerate",
    "xeq",
    "spectrum",
];

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub cap: Option<usize>,
}

struct Ctx {
    spec: ChainSpec,
    root: Option<RootCtx>,
    seed: u64,
    cap: usize,
    tol_override: Option<f64>,
}

impl Ctx {
    fn tol(&self, default: f64) -> f64 {
        self.tol_override.unwrap_or(default)
    }

    fn root(&self) -> Result<RootCtx> {
        self.root.ok_or_else(|| {
            Error::Precondition("this subcommand needs a root_of_unity block in the config".into())
        })
    }

    fn solve_opts(&self, cfg: &RunConfig) -> SolveOpts {
        let d = SolveOpts::default();
        SolveOpts {
            seed: self.seed,
            max_starts: cfg.max_starts.unwrap_or(d.max_starts),
            newton_tol: cfg.newton_tol.unwrap_or(d.newton_tol),
            newton_iters: cfg.newton_iters.unwrap_or(d.newton_iters),
        }
    }
}

fn seeded_points(seed: u64, salt: u64, n: usize, radius: f64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
    (0..n)
        .map(|_| {
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            let r = radius * (0.2 + 1.6 * rng.random::<f64>());
            C64::new(r * theta.cos(), r * theta.sin())
        })
        .collect()
}

fn u_samples(ctx: &Ctx, cfg: &RunConfig) -> Vec<C64> {
    match &cfg.u_samples {
        Some(us) => us.iter().map(|u| u.to_c64()).collect(),
        None => seeded_points(ctx.seed, 0x5eed_u64, 5, 1.0 + ctx.spec.max_abs_z()),
    }
}

fn solution_value(spec: &ChainSpec, s: &crate::bethe::BetheState) -> Value {
    json!({
        "roots": cx_list(&s.roots),
        "residual": s.residual_norm,
        "offdiagonal": s.flags.offdiagonal,
        "admissible": s.flags.admissible,
        "hits_plus_points": s.flags.hits_plus_points,
        "hits_minus_points": s.flags.hits_minus_points,
        "vector_norm": s.vector.as_ref().map(|v| vec_norm(v)),
        "weight": spec.ell_tot() - s.roots.len() as f64,
    })
}

fn rapidities_for(ctx: &Ctx, cfg: &RunConfig) -> Result<(Vec<C64>, Option<SolveReport>)> {
    if let Some(t) = &cfg.t {
        return Ok((t.iter().map(|x| x.to_c64()).collect(), None));
    }
    let k = cfg.k.unwrap_or(0);
    if k == 0 {
        return Ok((Vec::new(), None));
    }
    let rep = solve_bethe(&ctx.spec, k, &ctx.solve_opts(cfg))?;
    let sol = rep
        .solutions
        .iter()
        .find(|s| s.flags.offdiagonal && s.flags.admissible)
        .ok_or_else(|| {
            Error::Precondition(format!(
                "no admissible offdiagonal solution found at k = {k}"
            ))
        })?;
    Ok((sol.roots.clone(), Some(rep)))
}

fn cmd_identities(ctx: &Ctx, cfg: &RunConfig) -> Result<(Value, Vec<Check>, f64)> {
    let tol = ctx.tol(1e-10);
    let tol_action = ctx.tol(1e-9);
    let trials = cfg.trials.unwrap_or(10);
    let rep = check_commutation(&ctx.spec, trials, ctx.seed, ctx.cap)?;
    let mut checks = vec![
        Check::residual("commutation.b_b", rep.bb, tol),
        Check::residual("commutation.a_b", rep.ab, tol),
        Check::residual("commutation.d_b", rep.db, tol),
        Check::residual("commutation.t_t", rep.tt, tol),
    ];
    // action formulas at arbitrary (non-solution) rapidities
    let k = cfg.k.unwrap_or(2).min(ctx.spec.ell_tot_x2() as usize);
    let radius = 1.0 + ctx.spec.max_abs_z();
    let t = seeded_points(ctx.seed, 0xac710_u64, k, radius);
    let u = seeded_points(ctx.seed, 0xac711_u64, 1, radius)[0];
    let (ra, rd) = verify_action_formulas(&ctx.spec, &t, u)?;
    checks.push(Check::residual("action.a", ra, tol_action));
    checks.push(Check::residual("action.d", rd, tol_action));
    let results = json!({
        "trials": trials,
        "commutation": { "b_b": rep.bb, "a_b": rep.ab, "d_b": rep.db, "t_t": rep.tt },
        "action": { "t": cx_list(&t), "u": cx(u), "a": ra, "d": rd },
    });
    Ok((results, checks, tol))
}

fn cmd_solve(ctx: &Ctx, cfg: &RunConfig) -> Result<(Value, Vec<Check>, f64)> {
    let tol = ctx.tol(1e-8);
    let k = cfg.k.unwrap_or(1);
    let rep = solve_bethe(&ctx.spec, k, &ctx.solve_opts(cfg))?;
    let mut checks = Vec::new();
    for (i, s) in rep.solutions.iter().enumerate() {
        checks.push(Check::residual(
            format!("solution[{i}].residual"),
            s.residual_norm,
            tol,
        ));
    }
    let results = json!({
        "k": k,
        "attempts": rep.attempts,
        "nonconverged": rep.nonconverged,
        "solutions": rep.solutions.iter().map(|s| solution_value(&ctx.spec, s)).collect::<Vec<_>>(),
        "weight_dim": rep.weight_dim,
        "admissible_offdiagonal": rep.admissible_offdiagonal,
        "gram_rank": rep.gram_rank,
        "census_ok": rep.census_ok,
    });
    Ok((results, checks, tol))
}

fn cmd_verify(ctx: &Ctx, cfg: &RunConfig) -> Result<(Value, Vec<Check>, f64)> {
    let tol = ctx.tol(1e-8);
    let k = cfg.k.unwrap_or(1);
    let rep = solve_bethe(&ctx.spec, k, &ctx.solve_opts(cfg))?;
    let samples = u_samples(ctx, cfg);
    let mono = build_monodromy(&ctx.spec, &ctx.spec.gamma_ctx(), ctx.cap)?;
    let spectrum = exact_spectrum(&ctx.spec, samples[0], ctx.cap)?;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (i, s) in rep.solutions.iter().enumerate() {
        if !s.flags.offdiagonal {
            rows.push(json!({
                "solution": solution_value(&ctx.spec, s),
                "skipped": "not offdiagonal",
            }));
            continue;
        }
        let chk = verify_eigen_with(&mono, &ctx.spec, &s.roots, &samples)?;
        if chk.zero_vector {
            rows.push(json!({
                "solution": solution_value(&ctx.spec, s),
                "zero_vector": true,
            }));
            continue;
        }
        let lam = chk.eigenvalues[0];
        let sector = spectrum.sector(k);
        let dist = sector.and_then(|sec| nearest_relative_distance(&sec.eigenvalues, lam));
        checks.push(Check::residual(
            format!("solution[{i}].eigen_residual"),
            chk.residual.unwrap(),
            tol,
        ));
        checks.push(Check {
            name: format!("solution[{i}].spectrum_distance"),
            value: dist,
            threshold: tol,
            pass: dist.map(|d| d <= tol).unwrap_or(false),
        });
        rows.push(json!({
            "solution": solution_value(&ctx.spec, s),
            "eigen_residual": chk.residual,
            "eigenvalues": cx_list(&chk.eigenvalues),
            "spectrum_distance": dist,
        }));
    }
    let results = json!({
        "k": k,
        "u_samples": cx_list(&samples),
        "verified": rows,
    });
    Ok((results, checks, tol))
}

fn cmd_census(ctx: &Ctx, cfg: &RunConfig) -> Result<(Value, Vec<Check>, f64)> {
    let tol = ctx.tol(1e-8);
    let k = cfg.k.unwrap_or(1);
    let n_kappa = cfg.kappa_samples.unwrap_or(3);
    let rep = completeness_census(&ctx.spec, k, n_kappa, &ctx.solve_opts(cfg))?;
    let mut checks = Vec::new();
    for (i, e) in rep.entries.iter().enumerate() {
        checks.push(Check::equality(
            format!("census[{i}].count_vs_dim"),
            e.admissible_offdiagonal,
            e.weight_dim,
        ));
        checks.push(Check::equality(
            format!("census[{i}].rank_vs_dim"),
            e.gram_rank,
            e.weight_dim,
        ));
    }
    let results = json!({
        "k": k,
        "well_separated": rep.well_separated,
        "entries": rep.entries.iter().map(|e| json!({
            "kappa": cx(e.kappa),
            "solutions": e.solutions,
            "admissible_offdiagonal": e.admissible_offdiagonal,
            "weight_dim": e.weight_dim,
            "gram_rank": e.gram_rank,
            "nonconverged": e.nonconverged,
            "ok": e.ok,
        })).collect::<Vec<_>>(),
    });
    Ok((results, checks, tol))
}

fn cmd_nilpotency(ctx: &Ctx, cfg: &RunConfig) -> Result<(Value, Vec<Check>, f64)> {
    let tol = ctx.tol(1e-10);
    let root = ctx.root()?;
    let trials = cfg.trials.unwrap_or(10);
    let us = match &cfg.u_list {
        Some(us) => us.iter().map(|u| u.to_c64()).collect(),
        None => seeded_points(ctx.seed, 0x0b1_u64, trials, 1.0 + ctx.spec.max_abs_z()),
    };
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (i, &u) in us.iter().enumerate() {
        let (prod, scale) = nilpotent_product(&ctx.spec, &root, u)?;
        let res = prod.fro_norm() / scale.max(1.0);
        checks.push(Check::residual(format!("nilpotency[{i}]"), res, tol));
        rows.push(json!({ "u": cx(u), "residual": res, "scale": scale }));
    }
    let results = json!({ "M": root.m, "K": root.k, "products": rows });
    Ok((results, checks, tol))
}

fn cmd_degenerate(ctx: &Ctx, cfg: &RunConfig) -> Result<(Value, Vec<Check>, f64)> {
    let tol = ctx.tol(1e-8);
    let root = ctx.root()?;
    let p = cfg.p.unwrap_or(0);
    let m = cfg.m.unwrap_or(1);
    let (t, solve_rep) = rapidities_for(ctx, cfg)?;
    let us = match &cfg.u_list {
        Some(us) => us.iter().map(|u| u.to_c64()).collect(),
        None => seeded_points(ctx.seed, 0xde9e_u64, m, 1.0 + ctx.spec.max_abs_z()),
    };
    let samples = u_samples(ctx, cfg);
    let chk = verify_bam(&ctx.spec, &root, p, &t, &us, &samples)?;
    let mut checks = Vec::new();
    let mut results = json!({
        "p": p,
        "t": cx_list(&t),
        "solved_sector": solve_rep.map(|r| r.k),
        "u_list": cx_list(&us),
        "u_samples": cx_list(&samples),
        "schedule": chk.schedule.pairs.iter().map(|(u, xs)| json!({
            "u": cx(*u),
            "x": cx_list(xs),
        })).collect::<Vec<_>>(),
        "sector": chk.sector,
        "psi_norm": chk.psi_norm,
        "zero_vector": chk.zero_vector,
    });
    if chk.zero_vector {
        results["note"] = json!("the constructed vector vanishes; nothing to verify");
    } else {
        checks.push(Check::residual(
            "eigen_residual",
            chk.residual.unwrap(),
            tol,
        ));
        let spectrum = exact_spectrum(&ctx.spec, samples[0], ctx.cap)?;
        let dist = spectrum
            .sector(chk.sector)
            .and_then(|sec| nearest_relative_distance(&sec.eigenvalues, chk.eigenvalues[0]));
        checks.push(Check {
            name: "spectrum_distance".into(),
            value: dist,
            threshold: tol,
            pass: dist.map(|d| d <= tol).unwrap_or(false),
        });
        results["eigenvalues"] = cx_list(&chk.eigenvalues);
        results["spectrum_distance"] = json!(dist);
    }
    Ok((results, checks, tol))
}

fn cmd_xeq(ctx: &Ctx, cfg: &RunConfig) -> Result<(Value, Vec<Check>, f64)> {
    let tol = ctx.tol(1e-10);
    let tol_vec = ctx.tol(1e-9);
    let root = ctx.root()?;
    let p = cfg.p.unwrap_or(0);
    let (t, _) = rapidities_for(ctx, cfg)?;
    let us: Vec<C64> = match &cfg.u_list {
        Some(us) => us.iter().map(|u| u.to_c64()).collect(),
        None => seeded_points(ctx.seed, 0xcef_u64, 1, 1.0 + ctx.spec.max_abs_z()),
    };
    let x_start = cfg
        .x_start
        .map(|x| x.to_c64())
        .unwrap_or(C64::new(0.0, 0.0));
    let sched = x_schedule(&ctx.spec, &root, p, &t, &us)?;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (i, &u) in us.iter().enumerate() {
        let xs = match solve_xeq(&ctx.spec, &root, &t, u, x_start)? {
            XeqOutcome::Solved(xs) => xs,
            XeqOutcome::NotSolvable => {
                return Err(Error::Precondition(format!(
                    "schedule system not solvable at u_{i} (cumulative y-product sum vanishes)"
                )))
            }
            XeqOutcome::IncompatibleTwist => {
                return Err(Error::Precondition(
                    "incompatible twist: kappa^M != q0^(2 M l_tot)".into(),
                ))
            }
        };
        let sched_xs = &sched.pairs[i].1;
        let shifts: Vec<C64> = xs.iter().zip(sched_xs).map(|(a, b)| a - b).collect();
        let spread = shifts
            .iter()
            .map(|s| (s - shifts[0]).norm())
            .fold(0.0, f64::max)
            / (1.0 + shifts[0].norm());
        checks.push(Check::residual(
            format!("xeq[{i}].shift_spread"),
            spread,
            tol,
        ));
        let alt = crate::roots_of_unity::XSchedule {
            p,
            m_order: root.m,
            pairs: vec![(u, xs.clone())],
        };
        let single = crate::roots_of_unity::XSchedule {
            p,
            m_order: root.m,
            pairs: vec![(u, sched_xs.clone())],
        };
        let v1 = degenerate_vector(&ctx.spec, &root, &t, &single)?;
        let v2 = degenerate_vector(&ctx.spec, &root, &t, &alt)?;
        let scale = vec_norm(&v1).max(vec_norm(&v2)).max(1.0);
        let diff = vec_norm(&vec_sub(&v1, &v2)) / scale;
        checks.push(Check::residual(
            format!("xeq[{i}].vector_agreement"),
            diff,
            tol_vec,
        ));
        rows.push(json!({
            "u": cx(u),
            "schedule_x": cx_list(sched_xs),
            "closed_form_x": cx_list(&xs),
            "shift": cx(shifts[0]),
            "shift_spread": spread,
            "vector_agreement": diff,
        }));
    }
    let results = json!({ "p": p, "t": cx_list(&t), "x_start": cx(x_start), "rows": rows });
    Ok((results, checks, tol))
}

fn cmd_spectrum(ctx: &Ctx, cfg: &RunConfig) -> Result<(Value, Vec<Check>, f64)> {
    let tol = ctx.tol(1e-10);
    let u0 = match &cfg.u_samples {
        Some(us) if !us.is_empty() => us[0].to_c64(),
        _ => seeded_points(ctx.seed, 0x5eed_u64, 1, 1.0 + ctx.spec.max_abs_z())[0],
    };
    let rep = exact_spectrum(&ctx.spec, u0, ctx.cap)?;
    let mut checks = Vec::new();
    let mut total = 0usize;
    for s in &rep.sectors {
        checks.push(Check::equality(
            format!("sector[{}].dim_vs_weight_dim", s.k),
            s.dimension,
            ctx.spec.weight_sector_dim(s.k),
        ));
        total += s.dimension;
    }
    checks.push(Check::equality("sector_dims_sum", total, ctx.spec.dim()));
    let results = json!({
        "u0": cx(u0),
        "sectors": rep.sectors.iter().map(|s| json!({
            "k": s.k,
            "dimension": s.dimension,
            "eigenvalues": cx_list(&s.eigenvalues),
        })).collect::<Vec<_>>(),
    });
    Ok((results, checks, tol))
}

/// Run one subcommand; always returns a complete report plus the exit code
/// (0 all checks pass, 1 check failure or internal error, 2 precondition or
/// config failure).
pub fn execute(subcommand: &str, cfg: &RunConfig, ov: &Overrides) -> (Report, i32) {
    let start = Instant::now();
    let config_echo = serde_json::to_value(cfg).unwrap_or(Value::Null);
    let seed = ov.seed.or(cfg.seed).unwrap_or(42);
    let mut report = Report {
        format_version: 1,
        subcommand: subcommand.to_string(),
        config: config_echo,
        seed,
        tolerance: 0.0,
        dimension: 0,
        notices: Vec::new(),
        error: None,
        results: Value::Null,
        checks: Vec::new(),
        pass: false,
        wall_time_ms: 0.0,
    };

    let outcome = (|| -> Result<(Value, Vec<Check>, f64)> {
        let (spec, root, notices) = cfg.resolve()?;
        let cap = ov.cap.or(cfg.cap).unwrap_or(DEFAULT_DIM_CAP);
        spec.check_cap(cap)?;
        report.dimension = spec.dim();
        report.notices = notices;
        let ctx = Ctx {
            spec,
            root,
            seed,
            cap,
            tol_override: ov.tol.or(cfg.tol),
        };
        match subcommand {
            "identities" => cmd_identities(&ctx, cfg),
            "solve" => cmd_solve(&ctx, cfg),
            "verify" => cmd_verify(&ctx, cfg),
            "census" => cmd_census(&ctx, cfg),
            "nilpotency" => cmd_nilpotency(&ctx, cfg),
            "degenerate" => cmd_degenerate(&ctx, cfg),
            "xeq" => cmd_xeq(&ctx, cfg),
            "spectrum" => cmd_spectrum(&ctx, cfg),
            other => Err(Error::Config {
                path: "subcommand".into(),
                msg: format!("unknown subcommand `{other}`; expected one of {SUBCOMMANDS:?}"),
            }),
        }
    })();

    let exit = match outcome {
        Ok((results, checks, tol)) => {
            report.tolerance = tol;
            report.results = results;
            report.pass = checks.iter().all(|c| c.pass);
            report.checks = checks;
            if report.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            report.error = Some(e.to_string());
            report.pass = false;
            e.exit_code()
        }
    };
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    (report, exit)
}
