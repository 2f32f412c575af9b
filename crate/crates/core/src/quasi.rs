//! Distribution functions and quasi-integrals.
//!
//! For a sampled field the distribution function `F` is a step function with
//! jumps only at sample values, so it is computed exactly: `F` is evaluated
//! at a coarse schedule of sample values and every interval whose endpoints
//! disagree is bisected over the sample values between them. Because `F` is
//! non-increasing, equal endpoints pin `F` on the whole interval.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::measure::{self, Mass, TopologicalMeasure};
use crate::region::{Region, Role};
use crate::topology::Connectivity;

/// Relative slack, in units of the field's value range, for thresholds
/// passed to [`superlevel_region`].
pub const THRESHOLD_TIE_FACTOR: f64 = 1e-6;

/// Which level sets define `F`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// `F(t) = mu({f > t})`; needs finite total mass.
    A,
    /// `F(t) = mu({f > t} \ {f = 0})`.
    #[default]
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Quadrature {
    /// Integrate the exact step representation.
    Steps,
    /// Trapezoid rule on a uniform threshold schedule over the range of `f`.
    Trapezoid { thresholds: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistributionOptions {
    pub variant: Variant,
    /// Sample values at which `F` is evaluated before bisection.
    pub coarse_knots: usize,
    pub quadrature: Quadrature,
    /// Evaluate `F` at every sample value instead of bisecting.
    pub exhaustive: bool,
}

impl Default for DistributionOptions {
    fn default() -> Self {
        DistributionOptions { variant: Variant::B, coarse_knots: 256, quadrature: Quadrature::Steps, exhaustive: false }
    }
}

impl DistributionOptions {
    pub fn with_variant(variant: Variant) -> Self {
        DistributionOptions { variant, ..Self::default() }
    }
}

/// `F(t) = value` on `[t, next.t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub t: f64,
    pub value: f64,
}

/// Right-continuous, non-increasing step function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionFn {
    steps: Vec<Step>,
    left_limit: f64,
    total_mass: Mass,
    variant: Variant,
}

impl DistributionFn {
    /// Breakpoints in increasing order; the first sits at `min f`, the last
    /// at `max f` with value 0.
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// `[min f, max f]`.
    pub fn domain(&self) -> (f64, f64) {
        (self.steps[0].t, self.steps[self.steps.len() - 1].t)
    }

    /// `F(a-)` at the left end of the domain.
    pub fn left_limit(&self) -> f64 {
        self.left_limit
    }

    pub fn total_mass(&self) -> Mass {
        self.total_mass
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// `F(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        let k = self.steps.partition_point(|s| s.t <= t);
        if k == 0 {
            self.left_limit
        } else {
            self.steps[k - 1].value
        }
    }

    /// `F(t-)`.
    pub fn eval_left(&self, t: f64) -> f64 {
        let k = self.steps.partition_point(|s| s.t < t);
        if k == 0 {
            self.left_limit
        } else {
            self.steps[k - 1].value
        }
    }

    /// `m_f({t}) = F(t-) - F(t)`.
    pub fn atom(&self, t: f64) -> f64 {
        self.eval_left(t) - self.eval(t)
    }

    /// `m_f((a, b)) = F(a) - F(b-)`. Infinite endpoints are allowed.
    pub fn interval_mass(&self, a: f64, b: f64) -> Result<f64> {
        if a.is_nan() || b.is_nan() || a > b {
            return Err(Error::Domain(format!("({a}, {b}) is not an interval")));
        }
        if a == b {
            return Ok(0.0);
        }
        Ok(self.eval(a) - self.eval_left(b))
    }

    /// `int_[a,b] F dt + a F(a-)` over the domain `[a, b]`.
    pub fn integral(&self) -> f64 {
        let a = self.steps[0].t;
        let area: f64 = self.steps.windows(2).map(|w| w[0].value * (w[1].t - w[0].t)).sum();
        area + a * self.left_limit
    }

    /// Violated invariants, empty when all hold exactly. `support_mass` is
    /// `mu(supp f)`.
    pub fn invariant_violations(&self, sup_norm: f64, support_mass: Option<f64>) -> Vec<String> {
        let mut out = Vec::new();
        let values = std::iter::once(self.left_limit).chain(self.steps.iter().map(|s| s.value));
        let mut prev = f64::INFINITY;
        for v in values {
            if v > prev {
                out.push(format!("F increases from {prev} to {v}"));
            }
            if v < 0.0 {
                out.push(format!("F takes negative value {v}"));
            }
            if let Some(m) = support_mass {
                if self.variant == Variant::B && v > m {
                    out.push(format!("F = {v} exceeds mu(supp f) = {m}"));
                }
            }
            prev = v;
        }
        if self.steps.windows(2).any(|w| w[0].t >= w[1].t) {
            out.push("breakpoints are not strictly increasing".into());
        }
        for s in &self.steps {
            if s.t >= sup_norm && s.value != 0.0 {
                out.push(format!("F({}) = {} beyond the sup norm {sup_norm}", s.t, s.value));
            }
        }
        if self.eval(sup_norm) != 0.0 {
            out.push(format!("F(||f||) = {}", self.eval(sup_norm)));
        }
        out
    }

    /// CSV with a comment line describing the convention, a `t,F` header
    /// and one row per breakpoint.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(
            out,
            "# right-continuous: F(t) = F_i for t_i <= t < t_(i+1); F(t) = {} for t < t_0",
            self.left_limit
        )?;
        writeln!(out, "t,F")?;
        for s in &self.steps {
            writeln!(out, "{},{}", s.t, s.value)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub breakpoints: usize,
    /// Distinct sample values.
    pub knots: usize,
    /// Measure evaluations on the coarse schedule.
    pub coarse_evaluations: usize,
    /// Extra evaluations spent bisecting jumps.
    pub refinement_iterations: usize,
    pub quadrature: Quadrature,
    /// Bound on the quadrature error; rounding only for exact steps.
    pub estimated_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiIntegralResult {
    pub value: f64,
    pub distribution: DistributionFn,
    pub diagnostics: Diagnostics,
}

/// Cells with `f > t`, open role. With `exclude_zero` the zero set is
/// removed, which is what makes `t < 0` meaningful on a bounded frame.
pub fn superlevel_region(f: &ScalarField, t: f64, exclude_zero: bool) -> Result<Region> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("threshold {t} is not finite")));
    }
    if t < 0.0 && !exclude_zero {
        return Err(Error::Domain(format!("{{f > {t}}} contains the unbounded zero set")));
    }
    let eps = THRESHOLD_TIE_FACTOR * (f.max_value() - f.min_value());
    if let Some(v) = f.values().iter().find(|&&v| (v - t).abs() <= eps) {
        return Err(Error::TieBreak(format!("threshold {t} collides with sample value {v}")));
    }
    let mask = f.values().iter().map(|&v| v > t && !(exclude_zero && v == 0.0)).collect();
    Region::new(*f.frame(), mask, Role::Open)
}

/// Sample values and the cells above each of them.
struct Levels {
    knots: Vec<f64>,
    /// Cells sorted by value.
    order: Vec<usize>,
    /// `ends[k]`: first position in `order` with value above `knots[k]`.
    ends: Vec<usize>,
}

impl Levels {
    fn new(f: &ScalarField) -> Self {
        let values = f.values();
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let mut knots = Vec::new();
        let mut ends = Vec::new();
        for (pos, &c) in order.iter().enumerate() {
            let v = values[c];
            if knots.last() != Some(&v) {
                if !knots.is_empty() {
                    ends.push(pos);
                }
                knots.push(v);
            }
        }
        ends.push(order.len());
        Levels { knots, order, ends }
    }

    fn above(&self, k: usize) -> &[usize] {
        &self.order[self.ends[k]..]
    }

    fn at_or_below(&self, k: usize) -> &[usize] {
        &self.order[..self.ends[k]]
    }
}

fn sorted(cells: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = cells.collect();
    v.sort_unstable();
    v
}

/// Fails when a marked point sits on an edge between cells with different
/// samples, since some level set would then be ambiguous at that point.
fn check_points_against_field(mu: &TopologicalMeasure, f: &ScalarField) -> Result<()> {
    let frame = f.frame();
    let values = f.values();
    for p in mu.marked_points() {
        let (i, j) = frame
            .cell_of(p[0], p[1])
            .ok_or_else(|| Error::Geometry(format!("point ({}, {}) lies outside the frame", p[0], p[1])))?;
        let here = values[frame.index(i, j)];
        measure::check_point_against(frame, |idx| values[idx] == here, p)?;
    }
    Ok(())
}

struct Computed {
    dist: DistributionFn,
    knots: usize,
    coarse: usize,
    refine: usize,
}

fn compute(mu: &TopologicalMeasure, f: &ScalarField, opts: &DistributionOptions) -> Result<Computed> {
    mu.validate()?;
    let frame = *f.frame();
    let total_mass = mu.total_mass(&frame)?;
    let mass_x = match opts.variant {
        Variant::A => Some(total_mass.finite()?),
        Variant::B => None,
    };
    check_points_against_field(mu, f)?;
    let levels = Levels::new(f);
    let values = f.values();
    let m = levels.knots.len();

    let left_limit = match mass_x {
        Some(mx) => mx,
        None => mu.eval_cells(&frame, &sorted((0..values.len()).filter(|&c| values[c] != 0.0)), Connectivity::Four)?,
    };

    let (known, coarse, refine) = if mu.is_linear() {
        let w = mu.cell_weights(&frame)?;
        let group: Vec<f64> = (0..m)
            .map(|k| {
                let lo = if k == 0 { 0 } else { levels.ends[k - 1] };
                levels.order[lo..levels.ends[k]].iter().map(|&c| w[c]).sum()
            })
            .collect();
        let zero = levels.knots.iter().position(|&v| v == 0.0);
        let mut above = vec![0.0; m];
        let mut acc = 0.0;
        for k in (0..m).rev() {
            above[k] = acc;
            if opts.variant == Variant::A || Some(k) != zero {
                acc += group[k];
            }
        }
        if let Some(mx) = mass_x {
            let mut below = 0.0;
            for k in 0..m {
                below += group[k];
                if levels.knots[k] < 0.0 {
                    above[k] = mx - below;
                }
            }
        }
        (above.into_iter().enumerate().collect::<BTreeMap<_, _>>(), m, 0)
    } else {
        let eval = |k: usize| -> Result<f64> {
            let t = levels.knots[k];
            match (opts.variant, mass_x) {
                (Variant::A, Some(mx)) if t < 0.0 => {
                    let below = sorted(levels.at_or_below(k).iter().copied());
                    Ok(mx - mu.eval_cells(&frame, &below, Connectivity::Eight)?)
                }
                _ => {
                    let cells = sorted(levels.above(k).iter().copied().filter(|&c| values[c] != 0.0 || t >= 0.0));
                    mu.eval_cells(&frame, &cells, Connectivity::Four)
                }
            }
        };
        locate_steps(m, if opts.exhaustive { m } else { opts.coarse_knots }, eval)?
    };

    let mut steps: Vec<Step> = Vec::new();
    for (&k, &v) in &known {
        if steps.last().map(|s| s.value) != Some(v) {
            steps.push(Step { t: levels.knots[k], value: v });
        }
    }
    let top = levels.knots[m - 1];
    if steps.last().map(|s| s.t) != Some(top) {
        // F(max f) = 0; keep the right end of the domain explicit.
        steps.push(Step { t: top, value: known[&(m - 1)] });
    }
    Ok(Computed { dist: DistributionFn { steps, left_limit, total_mass, variant: opts.variant }, knots: m, coarse, refine })
}

/// Evaluates a non-increasing function of the knot index on a coarse
/// schedule, then bisects every interval whose endpoint values differ.
fn locate_steps(
    m: usize,
    coarse: usize,
    eval: impl Fn(usize) -> Result<f64> + Sync,
) -> Result<(BTreeMap<usize, f64>, usize, usize)> {
    let coarse = coarse.max(2);
    let mut idx: Vec<usize> = if m <= coarse {
        (0..m).collect()
    } else {
        (0..coarse).map(|s| s * (m - 1) / (coarse - 1)).collect()
    };
    idx.dedup();
    let vals = idx.par_iter().map(|&k| eval(k)).collect::<Result<Vec<_>>>()?;
    let coarse_evals = idx.len();
    let mut known: BTreeMap<usize, f64> = idx.into_iter().zip(vals).collect();
    let mut pending: Vec<(usize, usize)> = known
        .iter()
        .zip(known.iter().skip(1))
        .filter(|((&i, &a), (&j, &b))| j > i + 1 && a != b)
        .map(|((&i, _), (&j, _))| (i, j))
        .collect();
    let mut refine = 0;
    while let Some((i, j)) = pending.pop() {
        let mid = i + (j - i) / 2;
        let v = eval(mid)?;
        refine += 1;
        known.insert(mid, v);
        if mid > i + 1 && known[&i] != v {
            pending.push((i, mid));
        }
        if j > mid + 1 && v != known[&j] {
            pending.push((mid, j));
        }
    }
    Ok((known, coarse_evals, refine))
}

/// Exact distribution function of `f` under `mu`.
pub fn distribution_function(
    mu: &TopologicalMeasure,
    f: &ScalarField,
    opts: &DistributionOptions,
) -> Result<DistributionFn> {
    Ok(compute(mu, f, opts)?.dist)
}

/// `rho_mu(f) = int_[a,b] F dt + a F(a-)`.
pub fn quasi_integral(mu: &TopologicalMeasure, f: &ScalarField, opts: &DistributionOptions) -> Result<QuasiIntegralResult> {
    let c = compute(mu, f, opts)?;
    let dist = c.dist;
    let (value, estimated_error) = match opts.quadrature {
        Quadrature::Steps => {
            let v = dist.integral();
            let scale: f64 = dist.steps.windows(2).map(|w| (w[0].value * (w[1].t - w[0].t)).abs()).sum::<f64>()
                + (dist.steps[0].t * dist.left_limit).abs();
            (v, scale * f64::EPSILON * dist.steps.len() as f64)
        }
        Quadrature::Trapezoid { thresholds } => {
            if thresholds < 1 {
                return Err(Error::Domain("trapezoid rule needs at least one interval".into()));
            }
            let (a, b) = dist.domain();
            let h = (b - a) / thresholds as f64;
            let samples: Vec<f64> = (0..=thresholds).map(|j| dist.eval(a + h * j as f64)).collect();
            let area: f64 = samples.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum();
            // For non-increasing F the exact area lies between the left and
            // right Riemann sums, whose mean is the trapezoid value.
            let bound = 0.5 * h * (samples[0] - samples[thresholds]).abs();
            (area + a * dist.left_limit, bound)
        }
    };
    let diagnostics = Diagnostics {
        breakpoints: dist.steps.len(),
        knots: c.knots,
        coarse_evaluations: c.coarse,
        refinement_iterations: c.refine,
        quadrature: opts.quadrature,
        estimated_error,
    };
    Ok(QuasiIntegralResult { value, distribution: dist, diagnostics })
}

/// `int f dmu` for the genuine measures: cell-weighted sum of samples.
pub fn linear_oracle(mu: &TopologicalMeasure, f: &ScalarField) -> Result<f64> {
    match mu {
        TopologicalMeasure::PointCount { .. } => {
            Err(Error::Variant("point-count measures have no linear integral".into()))
        }
        TopologicalMeasure::Density { .. } => {
            let w = mu.cell_weights(f.frame())?;
            Ok(w.iter().zip(f.values()).map(|(w, v)| w * v).sum())
        }
        TopologicalMeasure::Atomic { atoms } => {
            let frame = f.frame();
            atoms
                .iter()
                .map(|a| {
                    let (i, j) = frame
                        .cell_of(a.x, a.y)
                        .ok_or_else(|| Error::Geometry(format!("atom ({}, {}) lies outside the frame", a.x, a.y)))?;
                    Ok(a.weight * f.at(i, j))
                })
                .sum()
        }
    }
}

/// A measure bundled with integration options; this is `rho_mu`.
#[derive(Debug, Clone)]
pub struct QuasiIntegrator {
    pub measure: TopologicalMeasure,
    pub options: DistributionOptions,
}

impl QuasiIntegrator {
    pub fn new(measure: TopologicalMeasure) -> Self {
        QuasiIntegrator { measure, options: DistributionOptions::default() }
    }

    pub fn with_options(measure: TopologicalMeasure, options: DistributionOptions) -> Self {
        QuasiIntegrator { measure, options }
    }

    pub fn rho(&self, f: &ScalarField) -> Result<f64> {
        Ok(self.integrate(f)?.value)
    }

    pub fn integrate(&self, f: &ScalarField) -> Result<QuasiIntegralResult> {
        quasi_integral(&self.measure, f, &self.options)
    }

    pub fn distribution(&self, f: &ScalarField) -> Result<DistributionFn> {
        distribution_function(&self.measure, f, &self.options)
    }

    /// `mu(supp f)`, using the one-cell padded support.
    pub fn support_mass(&self, f: &ScalarField) -> Result<f64> {
        self.measure.eval(&f.support_region(0.0)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationStep {
    pub n: usize,
    pub rho_fn: f64,
    pub gap: f64,
    pub bound: f64,
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub rho_f: f64,
    pub total_mass: f64,
    pub steps: Vec<TruncationStep>,
    /// `rho(f_n)` non-decreasing and gaps non-increasing along the schedule.
    pub monotone: bool,
    pub all_within_bound: bool,
}

/// Compares `rho(f)` with `rho(f_n)`, `f_n = f - min(f, 1/n)`, for `n` in
/// `schedule` (ascending). When `1/n >= ||f||`, `f_n = 0`.
pub fn extension_consistency(
    rho: &QuasiIntegrator,
    f: &ScalarField,
    schedule: &[usize],
    tol: f64,
) -> Result<ExtensionReport> {
    let total_mass = rho.measure.total_mass(f.frame())?.finite()?;
    if f.min_value() < 0.0 {
        return Err(Error::Domain("extension check needs a non-negative field".into()));
    }
    if schedule.is_empty() || schedule.contains(&0) || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("schedule must be strictly increasing positive integers".into()));
    }
    let rho_f = rho.rho(f)?;
    let mut steps = Vec::new();
    for &n in schedule {
        let delta = 1.0 / n as f64;
        let fn_ = if delta >= f.sup_norm() { ScalarField::zeros(*f.frame()) } else { f.sub(&f.truncate(delta)?)? };
        let rho_fn = rho.rho(&fn_)?;
        let gap = (rho_f - rho_fn).abs();
        let bound = f.sup_distance(&fn_)? * total_mass;
        steps.push(TruncationStep { n, rho_fn, gap, bound, within_bound: gap <= bound + tol });
    }
    let monotone = steps.windows(2).all(|w| w[1].rho_fn >= w[0].rho_fn - tol && w[1].gap <= w[0].gap + tol);
    let all_within_bound = steps.iter().all(|s| s.within_bound);
    Ok(ExtensionReport { rho_f, total_mass, steps, monotone, all_within_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Frame;
    use crate::measure::Atom;

    fn frame() -> Frame {
        Frame::square(0.0, 10.0, 64).unwrap()
    }

    fn rect(x0: f64, x1: f64, y0: f64, y1: f64, role: Role) -> Region {
        Region::rect(frame(), x0, x1, y0, y1, role).unwrap()
    }

    fn example_mu() -> TopologicalMeasure {
        TopologicalMeasure::point_count(
            vec![[5.6, 6.4], [6.2, 5.7], [6.6, 6.6], [3.0, 6.0], [6.0, 3.0]],
            vec![0.0, 0.0, 0.5, 0.5, 1.0, 1.0],
        )
        .unwrap()
    }

    fn example_fields() -> (ScalarField, ScalarField) {
        let k = rect(1.0, 7.0, 5.0, 7.0, Role::Compact);
        let u = rect(0.5, 7.5, 4.5, 7.5, Role::Open);
        let c = rect(5.0, 7.0, 1.0, 7.0, Role::Compact);
        let v = rect(4.5, 7.5, 0.5, 7.5, Role::Open);
        (ScalarField::plateau(&k, &u, 1.0, 0.25).unwrap(), ScalarField::plateau(&c, &v, 1.0, 0.25).unwrap())
    }

    #[test]
    fn example_distribution_functions() {
        let (f, g) = example_fields();
        let mu = example_mu();
        let opts = DistributionOptions::default();
        let ff = distribution_function(&mu, &f, &opts).unwrap();
        assert_eq!(ff.steps(), &[Step { t: 0.0, value: 1.0 }, Step { t: 1.0, value: 0.0 }]);
        let h = f.add(&g).unwrap();
        let fh = distribution_function(&mu, &h, &opts).unwrap();
        assert_eq!(fh.eval(0.5), 1.0);
        assert_eq!(fh.eval(1.0), 0.5);
        assert_eq!(fh.eval(1.99), 0.5);
        assert_eq!(fh.eval(2.0), 0.0);
        assert_eq!(fh.interval_mass(0.5, 1.5).unwrap(), 0.5);
        assert_eq!(fh.interval_mass(2.0, f64::INFINITY).unwrap(), 0.0);
        assert_eq!(quasi_integral(&mu, &h, &opts).unwrap().value, 1.5);
        assert_eq!(quasi_integral(&mu, &f, &opts).unwrap().value, 1.0);
        assert_eq!(quasi_integral(&mu, &g, &opts).unwrap().value, 1.0);
    }

    #[test]
    fn bisection_matches_exhaustive() {
        let (f, g) = example_fields();
        let h = f.add(&g.scale(0.37)).unwrap();
        let mu = example_mu();
        let coarse = DistributionOptions { coarse_knots: 2, ..DistributionOptions::default() };
        let full = DistributionOptions { exhaustive: true, ..DistributionOptions::default() };
        assert_eq!(
            distribution_function(&mu, &h, &coarse).unwrap(),
            distribution_function(&mu, &h, &full).unwrap()
        );
    }

    #[test]
    fn zero_field() {
        let mu = example_mu();
        let z = ScalarField::zeros(frame());
        let r = quasi_integral(&mu, &z, &DistributionOptions::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.distribution.eval(-1.0), 0.0);
        assert_eq!(r.distribution.eval(0.0), 0.0);
    }

    #[test]
    fn variant_a_full_range_mass_and_agreement() {
        let (f, g) = example_fields();
        let mu = example_mu();
        let h = f.sub(&g.scale(0.5)).unwrap();
        let a = quasi_integral(&mu, &h, &DistributionOptions::with_variant(Variant::A)).unwrap();
        let b = quasi_integral(&mu, &h, &DistributionOptions::default()).unwrap();
        assert_eq!(a.distribution.interval_mass(f64::NEG_INFINITY, f64::INFINITY).unwrap(), 1.0);
        assert!((a.value - b.value).abs() < 1e-12, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn variant_a_rejects_infinite_mass() {
        let mu = TopologicalMeasure::Density {
            density: crate::measure::DensityProfile::Uniform { value: 1.0, whole_plane: true },
        };
        let (f, _) = example_fields();
        assert_eq!(
            quasi_integral(&mu, &f, &DistributionOptions::with_variant(Variant::A)).unwrap_err(),
            Error::InfiniteMeasure
        );
        assert!(quasi_integral(&mu, &f, &DistributionOptions::default()).is_ok());
    }

    #[test]
    fn superlevel_regions() {
        let (f, _) = example_fields();
        let k = rect(1.0, 7.0, 5.0, 7.0, Role::Compact);
        let u = rect(0.5, 7.5, 4.5, 7.5, Role::Open);
        let r = superlevel_region(&f, 0.55, false).unwrap();
        assert!(k.is_subset_of(&r) && r.is_subset_of(&u));
        assert!(superlevel_region(&f, 1.0 + 1e-3, false).unwrap().is_empty());
        assert!(matches!(superlevel_region(&f, 0.625, false), Err(Error::TieBreak(_))));
        assert!(superlevel_region(&f, -0.5, false).is_err());
        let neg = superlevel_region(&f, -0.5, true).unwrap();
        assert!(neg.is_subset_of(&f.support_region(0.0).unwrap()));
    }

    #[test]
    fn linear_oracle_cases() {
        let (f, _) = example_fields();
        let mu = TopologicalMeasure::atomic(vec![Atom { x: 0.6, y: 6.0, weight: 1.0 }]).unwrap();
        let (i, j) = frame().cell_of(0.6, 6.0).unwrap();
        assert_eq!(linear_oracle(&mu, &f).unwrap(), f.at(i, j));
        assert!(f.at(i, j) > 0.0 && f.at(i, j) < 1.0);
        assert!(matches!(linear_oracle(&example_mu(), &f), Err(Error::Variant(_))));
        let dens = TopologicalMeasure::uniform_density(1.0).unwrap();
        let oracle = linear_oracle(&dens, &f).unwrap();
        assert!(rect(1.0, 7.0, 5.0, 7.0, Role::Compact).area() <= oracle);
        assert!(oracle <= rect(0.5, 7.5, 4.5, 7.5, Role::Open).area());
        let qi = quasi_integral(&dens, &f, &DistributionOptions::default()).unwrap().value;
        assert!((qi - oracle).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_error_bound_holds() {
        let f = ScalarField::tent(frame(), 4.0, 4.0, 2.0, 1.0).unwrap();
        let mu = TopologicalMeasure::uniform_density(1.0).unwrap();
        let exact = quasi_integral(&mu, &f, &DistributionOptions::default()).unwrap();
        let trap = quasi_integral(
            &mu,
            &f,
            &DistributionOptions { quadrature: Quadrature::Trapezoid { thresholds: 256 }, ..Default::default() },
        )
        .unwrap();
        assert!((exact.value - trap.value).abs() <= trap.diagnostics.estimated_error);
        assert!((exact.value - f.riemann_sum()).abs() < 1e-9);
    }

    #[test]
    fn csv_layout() {
        let (f, _) = example_fields();
        let d = distribution_function(&example_mu(), &f, &DistributionOptions::default()).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# right-continuous"));
        assert_eq!(&lines[1..], &["t,F", "0,1", "1,0"]);
    }

    #[test]
    fn extension_schedule() {
        let (f, _) = example_fields();
        let rho = QuasiIntegrator::new(example_mu());
        let rep = extension_consistency(&rho, &f, &[2, 4, 8], 1e-12).unwrap();
        assert_eq!(rep.rho_f, 1.0);
        assert!(rep.monotone && rep.all_within_bound);
        assert!((rep.steps[2].rho_fn - 0.875).abs() < 1e-12);
        // delta >= ||f||: f_n = 0.
        let rep = extension_consistency(&rho, &f, &[1], 0.0).unwrap();
        assert_eq!(rep.steps[0].rho_fn, 0.0);
        assert_eq!(rep.steps[0].gap, 1.0);
        let zero = QuasiIntegrator::new(TopologicalMeasure::zero());
        let rep = extension_consistency(&zero, &f, &[2, 4], 0.0).unwrap();
        assert!(rep.steps.iter().all(|s| s.rho_fn == 0.0) && rep.rho_f == 0.0);
    }
}
