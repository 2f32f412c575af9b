//! Checks and seeded property runs. Every check produces a [`CheckReport`]
//! whose witness is the trial with the largest excess over its bound, so a
//! passing report still shows how close the worst case came.

use std::collections::BTreeMap;
use std::time::Duration;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::example::Example;
use super::random::{self, Rect, Sampler, Sign, LATTICE};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::frame::Frame;
use crate::measure::TopologicalMeasure;
use crate::pwl::PiecewiseLinearMap;
use crate::quasi::{
    linear_oracle, quasi_integral, DistributionFn, DistributionOptions, QuasiIntegrator, Quadrature, Variant,
};
use crate::reconstruct::{roundtrip, BumpSchedule};
use crate::region::{Region, Role};

pub const HOMOGENEITY_FACTORS: [f64; 4] = [-2.0, -1.0, 0.5, 3.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub trial: Option<usize>,
    pub inputs: String,
    pub values: BTreeMap<String, f64>,
    /// Amount by which the assertion missed; `<= 0` means it held.
    pub excess: f64,
    pub error: Option<String>,
}

impl Witness {
    pub fn new(inputs: impl Into<String>) -> Self {
        Witness { trial: None, inputs: inputs.into(), values: BTreeMap::new(), excess: f64::NEG_INFINITY, error: None }
    }

    pub fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }

    /// Folds in one assertion `excess <= 0`.
    pub fn excess(mut self, e: f64) -> Self {
        self.excess = if e.is_nan() { f64::INFINITY } else { self.excess.max(e) };
        self
    }

    fn failed(inputs: impl Into<String>, err: &Error) -> Self {
        Witness { error: Some(err.to_string()), excess: f64::INFINITY, ..Witness::new(inputs) }
    }

    fn is_failure(&self) -> bool {
        self.error.is_some() || self.excess > 0.0
    }
}

/// A file produced by a check, written under the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub kind: String,
    pub trials: usize,
    pub failures: usize,
    pub pass: bool,
    pub tolerance: f64,
    pub values: BTreeMap<String, f64>,
    pub worst: Option<Witness>,
    pub artifacts: Vec<String>,
    /// Kept out of the serialized report; timings are collected separately.
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Debug, Default)]
pub struct Tally {
    trials: usize,
    failures: usize,
    worst: Option<Witness>,
}

impl Tally {
    pub fn record(&mut self, w: Witness) {
        self.trials += 1;
        self.failures += w.is_failure() as usize;
        if self.worst.as_ref().is_none_or(|cur| w.excess > cur.excess) {
            self.worst = Some(w);
        }
    }

    pub fn record_result(&mut self, trial: usize, inputs: &str, r: Result<Witness>) {
        let mut w = r.unwrap_or_else(|e| Witness::failed(inputs, &e));
        w.trial = Some(trial);
        self.record(w);
    }

    pub fn finish(self, name: &str, kind: &str, tolerance: f64, values: BTreeMap<String, f64>) -> CheckReport {
        CheckReport {
            name: name.to_string(),
            kind: kind.to_string(),
            trials: self.trials,
            failures: self.failures,
            pass: self.failures == 0 && self.trials > 0,
            tolerance,
            values,
            worst: self.worst,
            artifacts: Vec::new(),
            wall_time: Duration::ZERO,
        }
    }
}

fn single(name: &str, kind: &str, tol: f64, w: Witness) -> CheckReport {
    let values = w.values.clone();
    let mut t = Tally::default();
    t.record(w);
    t.finish(name, kind, tol, values)
}

fn describe(specs: &[random::PlateauSpec]) -> String {
    serde_json::to_string(specs).unwrap_or_default()
}

// ---------------------------------------------------------------- golden

/// `rho(f) = rho(g) = b`, `rho(f + g) = 3b/2` and the additivity defect
/// `b/2`, each within `1e-9 b`.
pub fn check_nonlinearity_example(name: &str, frame: Frame, b: f64) -> Result<CheckReport> {
    let ex = Example::new(frame, b)?;
    let rho = QuasiIntegrator::new(super::example::measure());
    let rf = rho.rho(&ex.f)?;
    let rg = rho.rho(&ex.g)?;
    let rh = rho.rho(&ex.f.add(&ex.g)?)?;
    let defect = rf + rg - rh;
    let tol = 1e-9 * b;
    let w = Witness::new(format!("b = {b}, grid {}x{}", frame.nx, frame.ny))
        .value("b", b)
        .value("rho_f", rf)
        .value("rho_g", rg)
        .value("rho_f_plus_g", rh)
        .value("defect", defect)
        .value("defect_over_b", defect / b)
        .excess((rf - b).abs() - tol)
        .excess((rg - b).abs() - tol)
        .excess((rh - 1.5 * b).abs() - tol)
        .excess((defect - 0.5 * b).abs() - tol);
    Ok(single(name, "nonlinearity_example", tol, w))
}

/// `rho(f)` against an expected value.
pub fn check_quasi_integral(name: &str, rho: &QuasiIntegrator, f: &ScalarField, expect: f64, tol: f64) -> Result<CheckReport> {
    let r = rho.integrate(f)?;
    let w = Witness::new("golden value")
        .value("rho", r.value)
        .value("expected", expect)
        .value("breakpoints", r.diagnostics.breakpoints as f64)
        .excess((r.value - expect).abs() - tol);
    Ok(single(name, "quasi_integral", tol, w))
}

/// Quasi-integral of a genuine measure against the direct weighted sum.
pub fn check_linear_oracle(
    name: &str,
    mu: &TopologicalMeasure,
    f: &ScalarField,
    opts: &DistributionOptions,
    tol: f64,
) -> Result<CheckReport> {
    let r = quasi_integral(mu, f, opts)?;
    let oracle = linear_oracle(mu, f)?;
    let w = Witness::new("linear baseline")
        .value("quasi_integral", r.value)
        .value("oracle", oracle)
        .value("gap", (r.value - oracle).abs())
        .value("estimated_error", r.diagnostics.estimated_error)
        .excess((r.value - oracle).abs() - tol);
    Ok(single(name, "linear_oracle", tol, w))
}

// ------------------------------------------------------ single-case checks

fn sga_witness(rho: &QuasiIntegrator, f: &ScalarField, phi1: &PiecewiseLinearMap, phi2: &PiecewiseLinearMap, tol: f64) -> Result<Witness> {
    let a = f.compose(phi1)?;
    let b = f.compose(phi2)?;
    let ra = rho.rho(&a)?;
    let rb = rho.rho(&b)?;
    let rs = rho.rho(&a.add(&b)?)?;
    let mut w = Witness::new(format!("phi1 = {:?}, phi2 = {:?}", phi1.breakpoints(), phi2.breakpoints()))
        .value("rho_phi1_f", ra)
        .value("rho_phi2_f", rb)
        .value("rho_sum", rs)
        .excess((rs - ra - rb).abs() - tol);
    let sum = phi1.add(phi2)?;
    let scale = sum.breakpoints().iter().fold(1.0f64, |m, p| m.max(p.0.abs()));
    if sum.breakpoints().iter().all(|&(x, y)| (x - y).abs() <= 1e-12 * scale) {
        let rf = rho.rho(f)?;
        w = w.value("rho_f", rf).excess((rs - rf).abs() - tol);
    }
    Ok(w)
}

/// Additivity of `rho` on the algebra generated by `f`.
pub fn check_sga_additivity(
    name: &str,
    rho: &QuasiIntegrator,
    f: &ScalarField,
    phi1: &PiecewiseLinearMap,
    phi2: &PiecewiseLinearMap,
    tol: f64,
) -> Result<CheckReport> {
    Ok(single(name, "sga_additivity", tol, sga_witness(rho, f, phi1, phi2, tol)?))
}

fn disjoint_witness(rho: &QuasiIntegrator, f: &ScalarField, g: &ScalarField, tol: f64) -> Result<Witness> {
    let sf = f.support_region(0.0)?;
    let sg = g.support_region(0.0)?;
    if !sf.is_disjoint(&sg) {
        return Err(Error::SupportOverlap("supports of f and g intersect".into()));
    }
    let rf = rho.rho(f)?;
    let rg = rho.rho(g)?;
    let rs = rho.rho(&f.add(g)?)?;
    let parts = |h: &ScalarField| -> Result<f64> { Ok(rho.rho(&h.pos_part())? - rho.rho(&h.neg_part())?) };
    let pf = parts(f)?;
    let pg = parts(g)?;
    Ok(Witness::new("disjoint supports")
        .value("rho_f", rf)
        .value("rho_g", rg)
        .value("rho_f_plus_g", rs)
        .value("rho_f_pos_minus_neg", pf)
        .value("rho_g_pos_minus_neg", pg)
        .excess((rs - rf - rg).abs() - tol)
        .excess((rf - pf).abs() - tol)
        .excess((rg - pg).abs() - tol))
}

/// `rho(f + g) = rho(f) + rho(g)` for disjoint supports, and
/// `rho(f) = rho(f+) - rho(f-)`.
pub fn check_disjoint_support_additivity(
    name: &str,
    rho: &QuasiIntegrator,
    f: &ScalarField,
    g: &ScalarField,
    tol: f64,
) -> Result<CheckReport> {
    Ok(single(name, "disjoint_support_additivity", tol, disjoint_witness(rho, f, g, tol)?))
}

fn monotone_lipschitz_witness(rho: &QuasiIntegrator, f: &ScalarField, g: &ScalarField, tol: f64) -> Result<Witness> {
    let k = f.support_region(0.0)?.union(&g.support_region(0.0)?)?;
    let mu_k = rho.measure.eval(&k)?;
    let rf = rho.rho(f)?;
    let rg = rho.rho(g)?;
    let dist = f.sup_distance(g)?;
    let constant = if f.min_value() >= 0.0 && g.min_value() >= 0.0 { 1.0 } else { 2.0 };
    let bound = constant * dist * mu_k;
    let mut w = Witness::new("pair")
        .value("rho_f", rf)
        .value("rho_g", rg)
        .value("sup_distance", dist)
        .value("mu_k", mu_k)
        .value("lipschitz_bound", bound)
        .excess((rf - rg).abs() - bound - tol);
    if f.dominates(g)? {
        w = w.value("monotone_gap", rf - rg).excess(rg - rf - tol);
    }
    if g.dominates(f)? {
        w = w.excess(rf - rg - tol);
    }
    Ok(w)
}

/// Monotonicity when one field dominates the other, and the Lipschitz
/// bound `|rho f - rho g| <= c ||f - g|| mu(K)` with `c = 1` for
/// non-negative pairs and `c = 2` otherwise.
pub fn check_monotone_lipschitz(
    name: &str,
    rho: &QuasiIntegrator,
    f: &ScalarField,
    g: &ScalarField,
    tol: f64,
) -> Result<CheckReport> {
    Ok(single(name, "monotone_lipschitz", tol, monotone_lipschitz_witness(rho, f, g, tol)?))
}

/// Truncation limits `f_n = f - min(f, 1/n)`.
pub fn check_extension(name: &str, rho: &QuasiIntegrator, f: &ScalarField, schedule: &[usize], tol: f64) -> Result<CheckReport> {
    let rep = crate::quasi::extension_consistency(rho, f, schedule, tol)?;
    let mut t = Tally::default();
    for s in &rep.steps {
        t.record(
            Witness::new(format!("n = {}", s.n))
                .value("rho_fn", s.rho_fn)
                .value("gap", s.gap)
                .value("bound", s.bound)
                .excess(s.gap - s.bound - tol),
        );
    }
    let mut mono = Witness::new("monotone schedule").value("rho_f", rep.rho_f);
    if !rep.monotone {
        mono = mono.excess(f64::INFINITY);
    }
    t.record(mono);
    let values = BTreeMap::from([("rho_f".to_string(), rep.rho_f), ("total_mass".to_string(), rep.total_mass)]);
    Ok(t.finish(name, "extension", tol, values))
}

/// Invariants of one distribution function plus its CSV dump.
pub fn check_distribution(
    name: &str,
    rho: &QuasiIntegrator,
    f: &ScalarField,
    file: &str,
) -> Result<(CheckReport, Artifact)> {
    let d = rho.distribution(f)?;
    let w = distribution_witness(rho, f, &d, None, 0.0)?;
    let mut buf = Vec::new();
    d.write_csv(&mut buf)?;
    let mut rep = single(name, "distribution", 0.0, w);
    rep.values.insert("rho".into(), d.integral());
    rep.values.insert("breakpoints".into(), d.steps().len() as f64);
    rep.artifacts.push(file.to_string());
    Ok((rep, Artifact { file: file.to_string(), contents: String::from_utf8(buf).expect("csv is utf-8") }))
}

fn distribution_witness(
    rho: &QuasiIntegrator,
    f: &ScalarField,
    d: &DistributionFn,
    rng: Option<&mut ChaCha8Rng>,
    tol: f64,
) -> Result<Witness> {
    let support_mass = rho.support_mass(f)?;
    let violations = d.invariant_violations(f.sup_norm(), Some(support_mass));
    let mut w = Witness::new("distribution function")
        .value("support_mass", support_mass)
        .value("breakpoints", d.steps().len() as f64);
    if !violations.is_empty() {
        w.error = Some(violations.join("; "));
        w = w.excess(f64::INFINITY);
    }
    // Step interiors: F(b-) = F(b), so the plain split holds.
    let steps = d.steps();
    let mids: Vec<f64> = steps.windows(2).map(|s| 0.5 * (s[0].t + s[1].t)).collect();
    let pick = |rng: &mut Option<&mut ChaCha8Rng>, n: usize| -> Vec<usize> {
        match rng {
            Some(r) if n > 3 => {
                let mut v: Vec<usize> = (0..3).map(|_| r.gen_range(0..n)).collect();
                v.sort_unstable();
                v
            }
            _ => (0..n.min(3)).collect(),
        }
    };
    let mut rng = rng;
    let ix = pick(&mut rng, mids.len());
    if ix.len() == 3 && ix[0] < ix[1] && ix[1] < ix[2] {
        let (a, b, c) = (mids[ix[0]], mids[ix[1]], mids[ix[2]]);
        let whole = d.interval_mass(a, c)?;
        let split = d.interval_mass(a, b)? + (d.eval(b) - d.eval_left(c));
        w = w.value("split_gap", (whole - split).abs()).excess((whole - split).abs() - tol);
    }
    // Breakpoints: the atom at b closes the gap.
    let bx = pick(&mut rng, steps.len());
    if bx.len() == 3 && bx[0] < bx[1] && bx[1] < bx[2] {
        let (a, b, c) = (steps[bx[0]].t, steps[bx[1]].t, steps[bx[2]].t);
        let whole = d.interval_mass(a, c)?;
        let split = d.interval_mass(a, b)? + d.atom(b) + (d.eval(b) - d.eval_left(c));
        w = w.value("atom_split_gap", (whole - split).abs()).excess((whole - split).abs() - tol);
    }
    Ok(w)
}

// -------------------------------------------------------------- round trip

/// `tm_eval` against `mu_rho` over a catalog; writes one trace per entry.
pub fn check_roundtrip(
    name: &str,
    rho: &QuasiIntegrator,
    catalog: &[(String, Region)],
    schedule: &BumpSchedule,
    rt_tol: f64,
) -> (CheckReport, Vec<Artifact>) {
    let entries = roundtrip(rho, catalog, schedule, rt_tol);
    let mut t = Tally::default();
    let mut artifacts = Vec::new();
    let mut values = BTreeMap::new();
    let mut files = Vec::new();
    for e in &entries {
        let mut w = Witness::new(format!("{} ({:?})", e.name, e.role)).value("steps", e.steps as f64);
        match (&e.error, e.tm_value, e.reconstructed, e.gap) {
            (None, Some(tm), Some(rec), Some(gap)) => {
                w = w.value("tm_eval", tm).value("reconstructed", rec).value("gap", gap).excess(gap - rt_tol);
                if !(e.converged && e.monotone && e.steps <= schedule.max_steps()) {
                    w = w.excess(f64::INFINITY);
                    w.error = Some(format!("converged = {}, monotone = {}", e.converged, e.monotone));
                }
                values.insert(format!("{}.tm_eval", e.name), tm);
                values.insert(format!("{}.reconstructed", e.name), rec);
            }
            _ => {
                w.error = e.error.clone();
                w = w.excess(f64::INFINITY);
            }
        }
        t.record(w);
        if let Some(rep) = &e.report {
            let mut buf = Vec::new();
            if rep.write_csv(&mut buf).is_ok() {
                let file = format!("{name}_{}_trace.csv", e.name);
                files.push(file.clone());
                artifacts.push(Artifact { file, contents: String::from_utf8(buf).expect("csv is utf-8") });
            }
        }
    }
    let mut rep = t.finish(name, "roundtrip", rt_tol, values);
    rep.artifacts = files;
    (rep, artifacts)
}

// ------------------------------------------------------------ TM axioms

/// Sampled axiom checks for `mu`: non-negativity and monotonicity on the
/// catalog, then seeded trials of additivity on separated compacts, the
/// partition `mu(U) = mu(K) + mu(U \ K)`, superadditivity, five-step
/// increasing chains and erosion/dilation regularity schedules.
pub fn check_tm_axioms(
    name: &str,
    mu: &TopologicalMeasure,
    catalog: &[(String, Region)],
    trials: usize,
    rng: &mut ChaCha8Rng,
    tol: f64,
) -> Result<CheckReport> {
    let mut t = Tally::default();
    let frame = match catalog.first() {
        Some((_, r)) => *r.frame(),
        None => return Err(Error::Config("axiom suite needs at least one region".into())),
    };
    t.record_result(0, "empty", mu.eval(&Region::empty(frame, Role::Open)).map(|v| Witness::new("empty").value("mu", v).excess(v.abs() - tol)));
    for (i, (n, r)) in catalog.iter().enumerate() {
        t.record_result(i, n, mu.eval(r).map(|v| Witness::new(format!("non-negative {n}")).value("mu", v).excess(-v - tol)));
        for (m, s) in catalog {
            if r.is_subset_of(s) && n != m {
                let w = (|| -> Result<Witness> {
                    let (a, b) = (mu.eval(r)?, mu.eval(s)?);
                    Ok(Witness::new(format!("{n} ⊆ {m}")).value("inner", a).value("outer", b).excess(a - b - tol))
                })();
                t.record_result(i, n, w);
            }
        }
    }
    let mut s = Sampler::new(frame, rng);
    for trial in 0..trials {
        let w = axiom_trial(mu, &mut s, trial % 5, tol);
        t.record_result(trial, "axiom trial", w);
    }
    Ok(t.finish(name, "tm_axioms", tol, BTreeMap::new()))
}

fn axiom_trial(mu: &TopologicalMeasure, s: &mut Sampler<'_>, which: usize, tol: f64) -> Result<Witness> {
    let frame = s.frame;
    match which {
        0 => {
            let a = s.rect(LATTICE, 8);
            let b = (0..64)
                .map(|_| s.rect(LATTICE, 8))
                .find(|b| !a.grow(LATTICE).overlaps(b))
                .ok_or_else(|| Error::Geometry("no room for a second compact".into()))?;
            let (ra, rb) = (a.region(frame, Role::Compact)?, b.region(frame, Role::Compact)?);
            let (ma, mb, mab) = (mu.eval(&ra)?, mu.eval(&rb)?, mu.eval(&ra.union(&rb)?)?);
            Ok(Witness::new(format!("additivity {a:?} {b:?}"))
                .value("mu_a", ma)
                .value("mu_b", mb)
                .value("mu_union", mab)
                .excess((mab - ma - mb).abs() - tol))
        }
        1 => {
            // K keeps a lattice step from the edge of U: on the raster a
            // compact touching the boundary of U is not inside U.
            let u = (0..64)
                .map(|_| s.rect(LATTICE, 10))
                .find(|u| u.x1 - u.x0 >= 3.0 * LATTICE && u.y1 - u.y0 >= 3.0 * LATTICE)
                .ok_or_else(|| Error::Geometry("no room for a partition".into()))?;
            let k = sub_rect(s, &u.grow(-LATTICE));
            let (ru, rk) = (u.region(frame, Role::Open)?, k.region(frame, Role::Compact)?);
            let rest = ru.difference(&rk)?;
            let (mu_u, mu_k, mu_r) = (mu.eval(&ru)?, mu.eval(&rk)?, mu.eval(&rest)?);
            Ok(Witness::new(format!("partition U = {u:?}, K = {k:?}"))
                .value("mu_u", mu_u)
                .value("mu_k", mu_k)
                .value("mu_u_minus_k", mu_r)
                .excess((mu_u - mu_k - mu_r).abs() - tol))
        }
        2 => {
            let a = s.rect(LATTICE, 12);
            let mut parts: Vec<Rect> = Vec::new();
            for _ in 0..8 {
                let p = sub_rect(s, &a);
                if parts.iter().all(|q| !q.grow(LATTICE).overlaps(&p)) {
                    parts.push(p);
                }
            }
            let ra = a.region(frame, Role::Open)?;
            let mut total = 0.0;
            for p in &parts {
                let role = if s.rng.gen_bool(0.5) { Role::Open } else { Role::Compact };
                total += mu.eval(&p.region(frame, role)?)?;
            }
            let whole = mu.eval(&ra)?;
            Ok(Witness::new(format!("superadditivity A = {a:?}, {} parts", parts.len()))
                .value("sum_parts", total)
                .value("mu_a", whole)
                .excess(total - whole - tol))
        }
        3 => {
            let u = s.rect(LATTICE, 12).region(frame, Role::Open)?;
            let chain: Vec<f64> = (0..5).rev().map(|k| mu.eval(&u.erode(k))).collect::<Result<_>>()?;
            let mut w = Witness::new("increasing chain erode(U, 4..0)");
            for (i, v) in chain.iter().enumerate() {
                w = w.value(&format!("mu_{i}"), *v);
            }
            let drops = chain.windows(2).map(|p| p[0] - p[1]).fold(f64::NEG_INFINITY, f64::max);
            let mu_u = mu.eval(&u)?;
            Ok(w.value("mu_u", mu_u).excess(drops - tol).excess((chain[4] - mu_u).abs() - tol))
        }
        _ => {
            let r = s.rect(2.0, 10);
            let u = r.region(frame, Role::Open)?;
            let k = r.region(frame, Role::Compact)?;
            let mu_u = mu.eval(&u)?;
            let mu_k = mu.eval(&k)?;
            let mut w = Witness::new(format!("regularity {r:?}")).value("mu_u", mu_u).value("mu_k", mu_k);
            for j in 1..=3 {
                let inner = mu.eval(&u.erode(j).with_role(Role::Compact)?)?;
                w = w.excess(inner - mu_u - tol);
                let outer = mu.eval(&k.dilate(j)?.with_role(Role::Open)?)?;
                w = w.excess(mu_k - outer - tol);
            }
            Ok(w)
        }
    }
}

/// Lattice box inside `outer`.
fn sub_rect(s: &mut Sampler<'_>, outer: &Rect) -> Rect {
    let steps = |a: f64, b: f64| ((b - a) / LATTICE).round() as i64;
    let nx = steps(outer.x0, outer.x1);
    let ny = steps(outer.y0, outer.y1);
    let mut side = |lo: f64, n: i64| {
        let len = s.rng.gen_range(1..=n.max(1));
        let start = s.rng.gen_range(0..=(n - len).max(0));
        (lo + start as f64 * LATTICE, lo + (start + len) as f64 * LATTICE)
    };
    let (x0, x1) = side(outer.x0, nx);
    let (y0, y1) = side(outer.y0, ny);
    Rect { x0, x1, y0, y1 }
}

// ------------------------------------------------------- property suites

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertySuite {
    Homogeneity,
    SgaAdditivity,
    Positivity,
    DisjointSupport,
    Monotonicity,
    Lipschitz,
    DistributionInvariants,
}

impl PropertySuite {
    pub const ALL: [PropertySuite; 7] = [
        PropertySuite::Homogeneity,
        PropertySuite::SgaAdditivity,
        PropertySuite::Positivity,
        PropertySuite::DisjointSupport,
        PropertySuite::Monotonicity,
        PropertySuite::Lipschitz,
        PropertySuite::DistributionInvariants,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertySuite::Homogeneity => "homogeneity",
            PropertySuite::SgaAdditivity => "sga_additivity",
            PropertySuite::Positivity => "positivity",
            PropertySuite::DisjointSupport => "disjoint_support",
            PropertySuite::Monotonicity => "monotonicity",
            PropertySuite::Lipschitz => "lipschitz",
            PropertySuite::DistributionInvariants => "distribution_invariants",
        }
    }

    /// Default absolute tolerance.
    pub fn default_tolerance(self) -> f64 {
        match self {
            PropertySuite::SgaAdditivity | PropertySuite::Lipschitz => 1e-6,
            PropertySuite::DistributionInvariants => 0.0,
            _ => 1e-9,
        }
    }
}

/// `trials` seeded trials of one suite on random plateau sums.
pub fn run_property(
    name: &str,
    suite: PropertySuite,
    rho: &QuasiIntegrator,
    frame: Frame,
    trials: usize,
    rng: &mut ChaCha8Rng,
    tol: f64,
) -> CheckReport {
    let mut t = Tally::default();
    let mut s = Sampler::new(frame, rng);
    for trial in 0..trials {
        let w = property_trial(suite, rho, &mut s, trial, tol);
        t.record_result(trial, suite.name(), w);
    }
    let values = BTreeMap::from([("trials".to_string(), trials as f64)]);
    t.finish(name, &format!("property:{}", suite.name()), tol, values)
}

fn property_trial(suite: PropertySuite, rho: &QuasiIntegrator, s: &mut Sampler<'_>, trial: usize, tol: f64) -> Result<Witness> {
    let frame = s.frame;
    match suite {
        PropertySuite::Homogeneity => {
            let (f, specs) = s.structured(3, Sign::Any)?;
            let rf = rho.rho(&f)?;
            let mut w = Witness::new(describe(&specs)).value("rho_f", rf);
            for a in HOMOGENEITY_FACTORS {
                let ra = rho.rho(&f.scale(a))?;
                w = w.value(&format!("rho_{a}_f"), ra).excess((ra - a * rf).abs() - tol);
            }
            Ok(w)
        }
        PropertySuite::SgaAdditivity => {
            let (f, specs) = s.structured(3, Sign::Any)?;
            let (lo, hi) = (f.min_value(), f.max_value());
            let phi1 = s.phi(lo, hi, 3)?;
            let phi2 = if trial.is_multiple_of(2) {
                PiecewiseLinearMap::identity(lo, hi)?.sub(&phi1)?
            } else {
                s.phi(lo, hi, 3)?
            };
            let mut w = sga_witness(rho, &f, &phi1, &phi2, tol)?;
            w.inputs = format!("{} with {}", describe(&specs), w.inputs);
            Ok(w)
        }
        PropertySuite::Positivity => {
            let (f, specs) = s.overlapping(4)?;
            let rf = rho.rho(&f)?;
            Ok(Witness::new(describe(&specs)).value("rho_f", rf).excess(-rf - tol))
        }
        PropertySuite::DisjointSupport => {
            let specs = s.separated(4, Sign::Any, &[]);
            if specs.len() < 2 {
                return Err(Error::Geometry("could not place two separated plateaus".into()));
            }
            let cut = 1 + trial % (specs.len() - 1);
            let f = random::sum(frame, &specs[..cut])?;
            let g = random::sum(frame, &specs[cut..])?;
            let mut w = disjoint_witness(rho, &f, &g, tol)?;
            w.inputs = describe(&specs);
            Ok(w)
        }
        PropertySuite::Monotonicity => {
            let (f, mut specs) = if trial.is_multiple_of(2) { s.overlapping(3)? } else { s.structured(3, Sign::Any)? };
            let g = if trial.is_multiple_of(4) && f.min_value() >= 0.0 {
                let delta = s.rng.gen_range(0.1..1.0) * f.sup_norm();
                f.truncate(delta)?
            } else {
                let q = s.plateau(Sign::Positive);
                specs.push(q);
                f.sub(&q.build(frame)?)?
            };
            let rf = rho.rho(&f)?;
            let rg = rho.rho(&g)?;
            Ok(Witness::new(describe(&specs)).value("rho_f", rf).value("rho_g", rg).excess(rg - rf - tol))
        }
        PropertySuite::Lipschitz => {
            let sign = if trial.is_multiple_of(2) { Sign::Positive } else { Sign::Any };
            let (f, mut specs) = s.structured(3, sign)?;
            let (g, more) = s.structured(3, sign)?;
            specs.extend(more);
            let mut w = monotone_lipschitz_witness(rho, &f, &g, tol)?;
            w.inputs = describe(&specs);
            Ok(w)
        }
        PropertySuite::DistributionInvariants => {
            let (f, specs) = s.structured(3, Sign::Any)?;
            let d = rho.distribution(&f)?;
            let mut w = distribution_witness(rho, &f, &d, Some(s.rng), tol)?;
            w.inputs = describe(&specs);
            if rho.measure.total_mass(&frame)?.finite().is_ok() {
                let opts = DistributionOptions { variant: Variant::A, ..rho.options };
                let ra = quasi_integral(&rho.measure, &f, &opts)?.value;
                let rb = d.integral();
                w = w.value("rho_variant_a", ra).value("rho_variant_b", rb).excess((ra - rb).abs() - tol.max(1e-9));
            }
            Ok(w)
        }
    }
}

/// Quadrature options for Density integrals on the trapezoid schedule.
pub fn trapezoid(thresholds: usize) -> DistributionOptions {
    DistributionOptions { quadrature: Quadrature::Trapezoid { thresholds }, ..DistributionOptions::default() }
}
