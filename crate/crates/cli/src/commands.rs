use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use momentum_lab::geomcone::run_duality_suite;
use momentum_lab::iwasawa::iwasawa_factor;
use momentum_lab::kostant::{verify_kostant, verify_leaf_equality, write_points_csv, y_coordinates, KostantTolerances};
use momentum_lab::leaf::{check_leaf, example_so14, example_so14_with, perturbed_example_n, ExampleReport, Leaf};
use momentum_lab::liecore::{make_family_by_name, FamilyId, GroupFamily};
use momentum_lab::localmodel::run_localmodel_suite;
use momentum_lab::sampling::{group_element, stream_rng};
use momentum_lab::symplin::run_equivalence_suite;
use momentum_lab::Error;

use crate::config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or configuration; exit code 2.
    Usage(String),
    /// A computation could not be carried out; exit code 1.
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_)
            | Error::DimensionMismatch(_)
            | Error::UnsupportedFamily(_)
            | Error::RankTooLarge(_)
            | Error::DimensionTooLarge(..)
            | Error::EmptyInput => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

pub struct Outcome {
    pub results: Value,
    pub pass: bool,
    /// Human-readable summary.
    pub lines: Vec<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn family(cfg: &RunConfig) -> Result<GroupFamily, CliError> {
    let name = cfg.family.as_deref().ok_or_else(|| CliError::Usage("--family is required".into()))?;
    Ok(make_family_by_name(name)?)
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} must be positive, got {v}")))
    }
}

pub fn lemma212(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let trials = cfg.trials.unwrap_or(200);
    let dim_max = cfg.dim_max.unwrap_or(10);
    let rep = run_equivalence_suite(trials, dim_max, cfg.seed)?;
    let lines = vec![format!(
        "lemma212 {}: {} trials, dims 2..={}, inconsistencies {}, unexpected {}, (4) witnessed {} / inconclusive {}",
        verdict(rep.pass),
        rep.trials,
        rep.dim_max,
        rep.inconsistencies,
        rep.unexpected,
        rep.s4_witnessed,
        rep.s4_inconclusive
    )];
    Ok(Outcome { pass: rep.pass, results: to_value(&rep), lines })
}

pub fn cone_suite(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let per_dim = cfg.trials.unwrap_or(100) as usize;
    let rep = run_duality_suite(per_dim, cfg.seed)?;
    let lines = vec![format!(
        "cone-suite {}: {} cones, bidual failures {}, fullness failures {}",
        verdict(rep.pass),
        rep.cones_checked,
        rep.bidual_failures,
        rep.fullness_failures
    )];
    Ok(Outcome { pass: rep.pass, results: to_value(&rep), lines })
}

pub fn localmodel_suite(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let models = cfg.trials.unwrap_or(50) as usize;
    let planted = cfg.planted.unwrap_or(20);
    let rep = run_localmodel_suite(models, planted, cfg.seed, cfg.s0.unwrap_or(0.01))?;
    let lines = vec![format!(
        "localmodel-suite {}: agreement {}/{} ({} local max), probes {}/{}, max residual {:.3e}",
        verdict(rep.pass),
        rep.agreements,
        rep.models,
        rep.local_max,
        rep.probe_successes,
        rep.planted,
        rep.probe_max_residual
    )];
    Ok(Outcome { pass: rep.pass, results: to_value(&rep), lines })
}

fn write_csv(path: &Path, points: &[Vec<f64>]) -> Result<(), CliError> {
    let f = File::create(path).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    Ok(write_points_csv(BufWriter::new(f), points)?)
}

pub fn kostant(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let fam = family(cfg)?;
    let raw = cfg.y.as_deref().ok_or_else(|| CliError::Usage("--Y is required".into()))?;
    let y = y_coordinates(&fam, raw)?;
    let mut tol = KostantTolerances::for_rank(fam.rank());
    if let Some(v) = cfg.tol_in {
        tol.tol_in = positive("tol-in", v)?;
    }
    if let Some(v) = cfg.tol_v {
        tol.tol_v = positive("tol-v", v)?;
    }
    if let Some(v) = cfg.gap_max {
        tol.gap_max = positive("gap-max", v)?;
    }
    let samples = cfg.samples.unwrap_or(if fam.rank() == 1 { 10_000 } else { 200_000 });
    let (rep, points) = verify_kostant(&fam, &y, samples, cfg.seed, tol)?;
    if let Some(p) = &cfg.points_csv {
        write_csv(p, &points)?;
    }
    let mut lines = vec![format!(
        "kostant {}: {} Y = {:?}, {} samples, seed {}",
        verdict(rep.pass),
        rep.family,
        rep.y,
        rep.n_samples,
        rep.seed
    )];
    lines.push(format!(
        "  containment max violation {:.3e} (tol {:.1e}, worst sample {})",
        rep.containment_max_violation, rep.tolerances.tol_in, rep.worst_sample
    ));
    let vmax = rep.vertex_errors.values().copied().fold(0.0, f64::max);
    lines.push(format!("  {} Weyl vertices, max error {:.3e} (tol {:.1e})", rep.vertex_errors.len(), vmax, rep.tolerances.tol_v));
    lines.push(format!(
        "  coverage gap {:.4} over {} nodes (max {})",
        rep.coverage_max_gap, rep.coverage_nodes, rep.tolerances.gap_max
    ));
    Ok(Outcome { pass: rep.pass, results: to_value(&rep), lines })
}

fn leaf_from(cfg: &RunConfig) -> Result<Leaf, CliError> {
    let fam = family(cfg)?;
    if !fam.id.is_complexified() {
        return Err(CliError::Usage(format!("{} is not a complexified family; use sl2c, sl3c or so5c", fam.id)));
    }
    let raw = cfg.a.as_deref().ok_or_else(|| CliError::Usage("--a is required".into()))?;
    let log_a = y_coordinates(&fam, raw)?;
    Ok(Leaf::new(fam.id, &log_a)?)
}

pub fn leaf_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let leaf = leaf_from(cfg)?;
    let samples = cfg.samples.unwrap_or(100);
    let rep = check_leaf(&leaf, samples, cfg.seed)?;
    let lines = vec![
        format!("leaf-check {}: {} log a = {:?}, {} samples", verdict(rep.pass), rep.family, rep.log_a, rep.n_samples),
        format!("  lagrangian residual        {:.3e}", rep.lagrangian_residual),
        format!("  equivariance residual      {:.3e}", rep.equivariance_residual),
        format!("  momentum invariance        {:.3e}", rep.momentum_invariance_residual),
        format!("  anti-symplecticity probe   {:.6}", rep.antisymplectic_probe),
    ];
    Ok(Outcome { pass: rep.pass, results: to_value(&rep), lines })
}

fn example_lines(r: &ExampleReport) -> Vec<String> {
    let diag: Vec<String> = r.product_diagonal.iter().map(|[re, im]| format!("{re:.4}{im:+.4}i")).collect();
    vec![
        "Ad(n)^-1 X =".into(),
        r.ad_x.clone(),
        "Ad(n)^-1 Y =".into(),
        r.ad_y.clone(),
        "pr_u(Ad(n)^-1 X) =".into(),
        r.pr_u_ad_x.clone(),
        format!("diag(pr_u(Ad(n)^-1 X) Ad(n)^-1 Y) = [{}]", diag.join(", ")),
        format!("stage errors = [{}]", r.stage_errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(", ")),
        format!("omega = {:.9}", r.omega),
        format!("example-so14 {}", verdict(r.pass)),
    ]
}

pub fn example(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let r = match cfg.perturb_n {
        Some(eps) => example_so14_with(&perturbed_example_n(eps)?)?,
        None => example_so14()?,
    };
    Ok(Outcome { pass: r.pass, lines: example_lines(&r), results: to_value(&r) })
}

fn iwasawa_round_trip(seed: u64, per_family: u64) -> Result<Value, CliError> {
    let mut recon = 0.0f64;
    let mut stab = 0.0f64;
    for id in FamilyId::ALL {
        let fam = momentum_lab::liecore::make_family(id)?;
        for i in 0..per_family {
            let g = group_element(&fam, 2.0, &mut stream_rng(seed, i));
            let f = iwasawa_factor(&fam, &g)?;
            recon = recon.max(f.product().max_abs_diff(&g) / g.norm_fro());
            let f2 = iwasawa_factor(&fam, &f.product())?;
            stab = stab.max(f.n.max_abs_diff(&f2.n)).max(f.a.max_abs_diff(&f2.a)).max(f.k.max_abs_diff(&f2.k));
        }
    }
    let pass = recon <= 1e-10 && stab <= 1e-8;
    Ok(json!({"per_family": per_family, "reconstruction": recon, "refactorization": stab, "pass": pass}))
}

/// The acceptance battery with its fixed parameters; only the seed is taken
/// from the configuration.
pub fn all(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let seed = cfg.seed;
    let mut results = serde_json::Map::new();
    let mut lines = Vec::new();
    let mut pass = true;
    let mut record = |name: &str, ok: bool, value: Value, line: String| {
        pass &= ok;
        lines.push(format!("{} {name}: {line}", verdict(ok)));
        results.insert(name.to_string(), value);
    };

    let ex = example_so14()?;
    let ok = ex.pass && ex.stage_errors[..3].iter().all(|&e| e <= 1e-12);
    record("example-so14", ok, to_value(&ex), format!("omega = {:.9}", ex.omega));

    for (name, fam, y, n) in [("kostant-sl2r", "sl2r", vec![1.0], 10_000), ("kostant-sl3r", "sl3r", vec![1.0, 0.0, -1.0], 200_000)] {
        let fam = make_family_by_name(fam)?;
        let y = y_coordinates(&fam, &y)?;
        let (rep, _) = verify_kostant(&fam, &y, n, seed, KostantTolerances::for_rank(fam.rank()))?;
        let line = format!(
            "containment {:.2e}, {} vertices, gap {:.4}",
            rep.containment_max_violation,
            rep.vertex_errors.len(),
            rep.coverage_max_gap
        );
        record(name, rep.pass, to_value(&rep), line);
    }

    let rep = run_equivalence_suite(200, 10, seed)?;
    record("lemma212", rep.pass, to_value(&rep), format!("inconsistencies {}", rep.inconsistencies));

    let rep = run_duality_suite(100, seed)?;
    record("cone-suite", rep.pass, to_value(&rep), format!("{} cones, failures {}", rep.cones_checked, rep.failures.len()));

    let rep = run_localmodel_suite(50, 20, seed, 0.01)?;
    record(
        "localmodel-suite",
        rep.pass,
        to_value(&rep),
        format!("agreement {}/{}, probes {}/{}", rep.agreements, rep.models, rep.probe_successes, rep.planted),
    );

    let sl = check_leaf(&Leaf::new(FamilyId::SlC(2), &[0.7])?, 100, seed)?;
    record("leaf-sl2c", sl.pass, to_value(&sl), format!("lagrangian {:.2e}", sl.lagrangian_residual));
    let so = check_leaf(&Leaf::new(FamilyId::So5C, &[0.5])?, 50, seed)?;
    let ok = so.pass && so.antisymplectic_probe > 0.1;
    record("leaf-so5c", ok, to_value(&so), format!("anti-symplecticity probe {:.4}", so.antisymplectic_probe));

    let rep = verify_leaf_equality(&Leaf::new(FamilyId::SlC(2), &[1.0])?, 10_000, seed, 0.05, 1e-9)?;
    record("leaf-equality-sl2c", rep.pass, to_value(&rep), format!("hausdorff {:.4}", rep.hausdorff));

    let rt = iwasawa_round_trip(seed, 1000)?;
    let ok = rt["pass"].as_bool().unwrap_or(false);
    let num = |k: &str| rt[k].as_f64().unwrap_or(f64::NAN);
    let line = format!("reconstruction {:.2e}, refactorization {:.2e}", num("reconstruction"), num("refactorization"));
    record("iwasawa-round-trip", ok, rt, line);

    Ok(Outcome { pass, results: Value::Object(results), lines })
}
