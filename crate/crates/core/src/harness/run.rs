//! Executes a scenario and writes `report.json` plus CSV artifacts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::{self, Artifact, CheckReport, Tally, Witness};
use super::random::check_rng;
use super::scenario::{CheckSpec, Resolved, Scenario};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::measure::TopologicalMeasure;
use crate::quasi::{DistributionOptions, QuasiIntegrator};
use crate::reconstruct::default_rt_tol;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub resolution: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_s: f64,
    pub checks_s: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub seed: u64,
    pub frame: Frame,
    pub versions: BTreeMap<String, String>,
    pub pass: bool,
    /// Sorted by check name.
    pub checks: Vec<CheckReport>,
    /// The only field that varies between identical runs.
    pub timing: Timing,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub out_dir: PathBuf,
    pub exit_code: i32,
}

/// Exit code for a finished or aborted run; a run that could not start or
/// could not write its output counts as a configuration error.
pub fn exit_code(result: &Result<RunOutcome>) -> i32 {
    result.as_ref().map_or(EXIT_CONFIG, |o| o.exit_code)
}

/// Loads, validates and runs a scenario file. Errors are configuration or
/// I/O problems; failing checks are reported through the exit code.
pub fn run_scenario(path: &Path, opts: &RunOptions) -> Result<RunOutcome> {
    let scenario = Scenario::from_path(path)?;
    let out_dir = opts
        .out_dir
        .clone()
        .or_else(|| scenario.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(&scenario.name));
    let (report, artifacts) = execute(&scenario, opts)?;
    std::fs::create_dir_all(&out_dir)?;
    for a in &artifacts {
        std::fs::write(out_dir.join(&a.file), &a.contents)?;
    }
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(out_dir.join("report.json"), json + "\n")?;
    let exit_code = if report.pass { EXIT_PASS } else { EXIT_FAIL };
    Ok(RunOutcome { report, out_dir, exit_code })
}

/// Runs every check without touching the file system.
pub fn execute(scenario: &Scenario, opts: &RunOptions) -> Result<(RunReport, Vec<Artifact>)> {
    let start = Instant::now();
    let seed = opts.seed.unwrap_or(scenario.seed);
    let frame = match opts.resolution {
        Some(n) => scenario.frame.with_resolution(n, n).map_err(|e| Error::Config(format!("--resolution: {e}")))?,
        None => scenario.frame,
    };
    let resolved = scenario.resolve(frame)?;
    let results: Vec<(CheckReport, Vec<Artifact>)> = scenario
        .checks
        .par_iter()
        .map(|spec| {
            let t0 = Instant::now();
            let (mut rep, arts) = run_check(scenario, &resolved, spec, seed).unwrap_or_else(|e| {
                let mut t = Tally::default();
                t.record_result(0, spec.name(), Err(e));
                (t.finish(spec.name(), kind_of(spec), 0.0, BTreeMap::new()), Vec::new())
            });
            rep.wall_time = t0.elapsed();
            (rep, arts)
        })
        .collect();
    let mut checks = Vec::new();
    let mut artifacts = Vec::new();
    for (rep, arts) in results {
        checks.push(rep);
        artifacts.extend(arts);
    }
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    artifacts.sort_by(|a, b| a.file.cmp(&b.file));
    let checks_s = checks.iter().map(|c| (c.name.clone(), c.wall_time.as_secs_f64())).collect();
    let report = RunReport {
        scenario: scenario.name.clone(),
        seed,
        frame,
        versions: BTreeMap::from([("topmeasure".to_string(), env!("CARGO_PKG_VERSION").to_string())]),
        pass: checks.iter().all(|c| c.pass),
        checks,
        timing: Timing { total_s: start.elapsed().as_secs_f64(), checks_s },
    };
    Ok((report, artifacts))
}

fn kind_of(spec: &CheckSpec) -> &'static str {
    match spec {
        CheckSpec::NonlinearityExample { .. } => "nonlinearity_example",
        CheckSpec::QuasiIntegral { .. } => "quasi_integral",
        CheckSpec::LinearOracle { .. } => "linear_oracle",
        CheckSpec::SgaAdditivity { .. } => "sga_additivity",
        CheckSpec::DisjointSupport { .. } => "disjoint_support_additivity",
        CheckSpec::MonotoneLipschitz { .. } => "monotone_lipschitz",
        CheckSpec::TmAxioms { .. } => "tm_axioms",
        CheckSpec::Roundtrip { .. } => "roundtrip",
        CheckSpec::Extension { .. } => "extension",
        CheckSpec::Distribution { .. } => "distribution",
        CheckSpec::Property { .. } => "property",
    }
}

fn run_check(scenario: &Scenario, r: &Resolved, spec: &CheckSpec, seed: u64) -> Result<(CheckReport, Vec<Artifact>)> {
    let tols = scenario.tolerances;
    let default_tol = |mu: &TopologicalMeasure| if mu.is_linear() { tols.quadrature } else { tols.exact };
    let name = spec.name();
    let rho = |m: &str| QuasiIntegrator::new(r.measures[m].clone());
    let plain = |rep: CheckReport| (rep, Vec::new());
    Ok(match spec {
        CheckSpec::NonlinearityExample { heights, .. } => {
            let mut t = Tally::default();
            let mut values = BTreeMap::new();
            for (i, &b) in heights.iter().enumerate() {
                let rep = checks::check_nonlinearity_example(name, r.frame, b);
                let w = rep.map(|rep| {
                    for (k, v) in &rep.values {
                        let key = if heights.len() == 1 { k.clone() } else { format!("b{i}.{k}") };
                        values.insert(key, *v);
                    }
                    rep.worst.unwrap_or_else(|| Witness::new("no trial"))
                });
                t.record_result(i, &format!("b = {b}"), w);
            }
            plain(t.finish(name, "nonlinearity_example", tols.exact, values))
        }
        CheckSpec::QuasiIntegral { measure, field, expect, tol, variant, .. } => {
            let mu = &r.measures[measure];
            let q = QuasiIntegrator::with_options(mu.clone(), DistributionOptions::with_variant(*variant));
            plain(checks::check_quasi_integral(name, &q, &r.fields[field], *expect, tol.unwrap_or(default_tol(mu)))?)
        }
        CheckSpec::LinearOracle { measure, field, tol, quadrature, .. } => {
            let mu = &r.measures[measure];
            let opts = DistributionOptions { quadrature: quadrature.unwrap_or(crate::quasi::Quadrature::Steps), ..Default::default() };
            plain(checks::check_linear_oracle(name, mu, &r.fields[field], &opts, tol.unwrap_or(tols.quadrature))?)
        }
        CheckSpec::SgaAdditivity { measure, field, phi1, phi2, tol, .. } => {
            let f = &r.fields[field];
            let (lo, hi) = (f.min_value(), f.max_value());
            let (p1, p2) = (phi1.build(lo, hi)?, phi2.build(lo, hi)?);
            let q = rho(measure);
            let t = tol.unwrap_or(default_tol(&q.measure));
            plain(checks::check_sga_additivity(name, &q, f, &p1, &p2, t)?)
        }
        CheckSpec::DisjointSupport { measure, f, g, tol, .. } => {
            let q = rho(measure);
            let t = tol.unwrap_or(default_tol(&q.measure));
            plain(checks::check_disjoint_support_additivity(name, &q, &r.fields[f], &r.fields[g], t)?)
        }
        CheckSpec::MonotoneLipschitz { measure, f, g, tol, .. } => {
            let q = rho(measure);
            let t = tol.unwrap_or(default_tol(&q.measure));
            plain(checks::check_monotone_lipschitz(name, &q, &r.fields[f], &r.fields[g], t)?)
        }
        CheckSpec::TmAxioms { measure, regions, trials, tol, .. } => {
            let mu = &r.measures[measure];
            let catalog: Vec<_> = regions.iter().map(|n| (n.clone(), r.regions[n].clone())).collect();
            let mut rng = check_rng(seed, name);
            plain(checks::check_tm_axioms(name, mu, &catalog, *trials, &mut rng, tol.unwrap_or(default_tol(mu)))?)
        }
        CheckSpec::Roundtrip { measure, regions, schedule, tol, .. } => {
            let q = rho(measure);
            let catalog: Vec<_> = regions.iter().map(|n| (n.clone(), r.regions[n].clone())).collect();
            checks::check_roundtrip(name, &q, &catalog, schedule, tol.unwrap_or(default_rt_tol(&q.measure)))
        }
        CheckSpec::Extension { measure, field, schedule, tol, .. } => {
            let q = rho(measure);
            let t = tol.unwrap_or(default_tol(&q.measure));
            plain(checks::check_extension(name, &q, &r.fields[field], schedule, t)?)
        }
        CheckSpec::Distribution { measure, field, variant, .. } => {
            let q = QuasiIntegrator::with_options(r.measures[measure].clone(), DistributionOptions::with_variant(*variant));
            let (rep, art) = checks::check_distribution(name, &q, &r.fields[field], &format!("{name}_F_{field}.csv"))?;
            (rep, vec![art])
        }
        CheckSpec::Property { measure, suite, trials, tol, .. } => {
            let q = rho(measure);
            let t = tol.unwrap_or(if q.measure.is_linear() { tols.quadrature } else { suite.default_tolerance() });
            let mut rng = check_rng(seed, name);
            plain(checks::run_property(name, *suite, &q, r.frame, *trials, &mut rng, t))
        }
    })
}
