//! Recovering a set function from a quasi-integral.
//!
//! `mu_rho(U)` is approached from below by plateaus that equal 1 on an
//! erosion of `U` and vanish off `U`; `mu_rho(K)` from above by plateaus
//! that equal 1 on `K` and vanish off a dilation of `K`. Radii shrink along
//! the schedule, so the open trace rises and the compact trace falls.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::measure::TopologicalMeasure;
use crate::quasi::QuasiIntegrator;
use crate::region::{Region, RegionRle, Role};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BumpSchedule {
    /// Erosion or dilation radius in cells, one per step, strictly decreasing.
    pub radii: Vec<usize>,
    /// Fixed ramp width; by default `(k + 1)` cells at radius `k`.
    pub ramp_width: Option<f64>,
}

impl Default for BumpSchedule {
    fn default() -> Self {
        BumpSchedule { radii: (1..=8).rev().collect(), ramp_width: None }
    }
}

impl BumpSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.radii.is_empty() {
            return Err(Error::Config("bump schedule needs at least one step".into()));
        }
        if self.radii.contains(&0) {
            return Err(Error::Config("bump radii must be at least one cell".into()));
        }
        if self.radii.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Config("bump radii must be strictly decreasing".into()));
        }
        if let Some(r) = self.ramp_width {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Config(format!("ramp width {r} must be positive")));
            }
        }
        Ok(())
    }

    pub fn max_steps(&self) -> usize {
        self.radii.len()
    }

    fn ramp(&self, k: usize, cell: f64) -> f64 {
        self.ramp_width.unwrap_or((k + 1) as f64 * cell)
    }
}

/// Convergence tolerance for the two families: exact steps for point-count
/// measures, quadrature-level for the rest.
pub fn default_rt_tol(mu: &TopologicalMeasure) -> f64 {
    if mu.is_linear() {
        1e-3
    } else {
        1e-9
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub radius: usize,
    pub ramp: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub target: RegionRle,
    pub trace: Vec<TraceStep>,
    pub estimate: f64,
    pub monotone: bool,
    pub converged: bool,
}

impl ReconstructionReport {
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "step,radius,ramp,rho")?;
        for s in &self.trace {
            writeln!(out, "{},{},{},{}", s.step, s.radius, s.ramp, s.rho)?;
        }
        Ok(())
    }
}

fn finish(target: &Region, trace: Vec<TraceStep>, open: bool, tol: f64) -> ReconstructionReport {
    let rhos: Vec<f64> = trace.iter().map(|s| s.rho).collect();
    let (estimate, monotone) = if open {
        (rhos.iter().copied().fold(0.0, f64::max), rhos.windows(2).all(|w| w[1] >= w[0] - tol))
    } else {
        (rhos.iter().copied().fold(f64::INFINITY, f64::min), rhos.windows(2).all(|w| w[1] <= w[0] + tol))
    };
    let converged = match rhos.len() {
        0 => true,
        1 => false,
        n => (rhos[n - 1] - rhos[n - 2]).abs() <= tol,
    };
    ReconstructionReport { target: target.to_rle(), trace, estimate, monotone, converged }
}

fn empty_report(target: &Region) -> ReconstructionReport {
    ReconstructionReport { target: target.to_rle(), trace: Vec::new(), estimate: 0.0, monotone: true, converged: true }
}

/// Inner estimate `sup rho(f)` over plateaus `1` on `erode(U, k)`,
/// supported in `U`.
pub fn mu_rho_open(rho: &QuasiIntegrator, u: &Region, s: &BumpSchedule, rt_tol: f64) -> Result<ReconstructionReport> {
    s.validate()?;
    if u.role() != Role::Open {
        return Err(Error::Geometry("inner reconstruction needs an open region".into()));
    }
    if u.is_empty() {
        return Ok(empty_report(u));
    }
    let cell = u.frame().min_cell();
    let mut trace = Vec::new();
    for (step, &k) in s.radii.iter().enumerate() {
        let inner = u.erode(k);
        if inner.is_empty() {
            continue;
        }
        let ramp = s.ramp(k, cell);
        let f = ScalarField::plateau(&inner.with_role(Role::Compact)?, u, 1.0, ramp)?;
        trace.push(TraceStep { step, radius: k, ramp, rho: rho.rho(&f)? });
    }
    if trace.is_empty() {
        return Err(Error::Geometry("every erosion in the schedule empties the region".into()));
    }
    Ok(finish(u, trace, true, rt_tol))
}

/// Outer estimate `inf rho(g)` over plateaus `1` on `K`, supported in
/// `dilate(K, k)`.
pub fn mu_rho_compact(rho: &QuasiIntegrator, k: &Region, s: &BumpSchedule, rt_tol: f64) -> Result<ReconstructionReport> {
    s.validate()?;
    if k.role() != Role::Compact {
        return Err(Error::Geometry("outer reconstruction needs a compact region".into()));
    }
    if k.is_empty() {
        return Ok(empty_report(k));
    }
    let cell = k.frame().min_cell();
    let mut trace = Vec::new();
    for (step, &r) in s.radii.iter().enumerate() {
        let outer = k.dilate(r)?.with_role(Role::Open)?;
        let ramp = s.ramp(r, cell);
        let g = ScalarField::plateau(k, &outer, 1.0, ramp)?;
        trace.push(TraceStep { step, radius: r, ramp, rho: rho.rho(&g)? });
    }
    Ok(finish(k, trace, false, rt_tol))
}

/// `mu_rho` of a region of either role.
pub fn mu_rho(rho: &QuasiIntegrator, r: &Region, s: &BumpSchedule, rt_tol: f64) -> Result<ReconstructionReport> {
    match r.role() {
        Role::Open => mu_rho_open(rho, r, s, rt_tol),
        Role::Compact => mu_rho_compact(rho, r, s, rt_tol),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTripEntry {
    pub name: String,
    pub role: Role,
    pub tm_value: Option<f64>,
    pub reconstructed: Option<f64>,
    pub gap: Option<f64>,
    pub steps: usize,
    pub converged: bool,
    pub monotone: bool,
    pub pass: bool,
    pub error: Option<String>,
    #[serde(skip)]
    pub report: Option<ReconstructionReport>,
}

/// Compares `tm_eval` with the reconstruction for every catalog entry.
/// Failures are recorded per entry rather than aborting the sweep.
pub fn roundtrip(
    rho: &QuasiIntegrator,
    catalog: &[(String, Region)],
    s: &BumpSchedule,
    rt_tol: f64,
) -> Vec<RoundTripEntry> {
    catalog
        .iter()
        .map(|(name, region)| {
            let outcome = rho.measure.eval(region).and_then(|tm| Ok((tm, mu_rho(rho, region, s, rt_tol)?)));
            match outcome {
                Ok((tm, rep)) => {
                    let gap = (tm - rep.estimate).abs();
                    RoundTripEntry {
                        name: name.clone(),
                        role: region.role(),
                        tm_value: Some(tm),
                        reconstructed: Some(rep.estimate),
                        gap: Some(gap),
                        steps: rep.trace.len(),
                        converged: rep.converged,
                        monotone: rep.monotone,
                        pass: gap <= rt_tol && rep.converged && rep.monotone,
                        error: None,
                        report: Some(rep),
                    }
                }
                Err(e) => RoundTripEntry {
                    name: name.clone(),
                    role: region.role(),
                    tm_value: None,
                    reconstructed: None,
                    gap: None,
                    steps: 0,
                    converged: false,
                    monotone: false,
                    pass: false,
                    error: Some(e.to_string()),
                    report: None,
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Frame;
    use crate::measure::Atom;

    fn frame() -> Frame {
        Frame::square(0.0, 10.0, 128).unwrap()
    }

    fn rect(x0: f64, x1: f64, y0: f64, y1: f64, role: Role) -> Region {
        Region::rect(frame(), x0, x1, y0, y1, role).unwrap()
    }

    fn example_rho() -> QuasiIntegrator {
        QuasiIntegrator::new(
            TopologicalMeasure::point_count(
                vec![[5.6, 6.4], [6.2, 5.7], [6.6, 6.6], [3.0, 6.0], [6.0, 3.0]],
                vec![0.0, 0.0, 0.5, 0.5, 1.0, 1.0],
            )
            .unwrap(),
        )
    }

    #[test]
    fn schedule_validation() {
        assert!(BumpSchedule::default().validate().is_ok());
        assert_eq!(BumpSchedule::default().max_steps(), 8);
        assert!(BumpSchedule { radii: vec![], ramp_width: None }.validate().is_err());
        assert!(BumpSchedule { radii: vec![2, 2], ramp_width: None }.validate().is_err());
        assert!(BumpSchedule { radii: vec![3, 1, 0], ramp_width: None }.validate().is_err());
    }

    #[test]
    fn open_targets() {
        let rho = example_rho();
        let s = BumpSchedule::default();
        let near_kc = rect(4.8, 7.2, 4.8, 7.2, Role::Open);
        let rep = mu_rho_open(&rho, &near_kc, &s, 1e-9).unwrap();
        assert_eq!(rep.estimate, 0.5);
        assert!(rep.monotone && rep.converged);
        let all = Region::frame_interior(frame());
        assert_eq!(mu_rho_open(&rho, &all, &s, 1e-9).unwrap().estimate, 1.0);
        let none = Region::empty(frame(), Role::Open);
        assert_eq!(mu_rho_open(&rho, &none, &s, 1e-9).unwrap().estimate, 0.0);
    }

    #[test]
    fn compact_targets() {
        let rho = example_rho();
        let s = BumpSchedule::default();
        let kc = rect(5.0, 7.0, 5.0, 7.0, Role::Compact);
        let rep = mu_rho_compact(&rho, &kc, &s, 1e-9).unwrap();
        assert_eq!(rep.estimate, 0.5);
        assert!(rep.trace.iter().all(|t| t.rho >= 0.5));
        let k = rect(1.0, 7.0, 5.0, 7.0, Role::Compact);
        assert_eq!(mu_rho_compact(&rho, &k, &s, 1e-9).unwrap().estimate, 1.0);
        let lonely = rect(8.0, 8.05, 8.0, 8.05, Role::Compact);
        assert_eq!(lonely.cell_count(), 1);
        assert_eq!(mu_rho_compact(&rho, &lonely, &s, 1e-9).unwrap().estimate, 0.0);
    }

    #[test]
    fn dilation_out_of_frame_fails() {
        let rho = example_rho();
        let edge = rect(0.2, 2.0, 2.0, 3.0, Role::Compact);
        assert!(matches!(mu_rho_compact(&rho, &edge, &BumpSchedule::default(), 1e-9), Err(Error::Frame(_))));
    }

    #[test]
    fn zero_measure_reconstructs_zero() {
        let rho = QuasiIntegrator::new(TopologicalMeasure::zero());
        let cat = vec![
            ("u".to_string(), rect(1.0, 4.0, 1.0, 4.0, Role::Open)),
            ("k".to_string(), rect(5.0, 7.0, 5.0, 7.0, Role::Compact)),
        ];
        for e in roundtrip(&rho, &cat, &BumpSchedule::default(), 1e-9) {
            assert_eq!(e.reconstructed, Some(0.0));
            assert!(e.pass);
        }
    }

    #[test]
    fn atomic_roundtrip() {
        let mu = TopologicalMeasure::atomic(vec![
            Atom { x: 2.01, y: 2.02, weight: 0.3 },
            Atom { x: 6.01, y: 3.03, weight: 0.7 },
        ])
        .unwrap();
        let rho = QuasiIntegrator::new(mu);
        let cat = vec![
            ("a".to_string(), rect(1.0, 3.0, 1.0, 3.0, Role::Open)),
            ("b".to_string(), rect(1.0, 7.0, 1.0, 4.0, Role::Compact)),
        ];
        for e in roundtrip(&rho, &cat, &BumpSchedule::default(), 1e-9) {
            assert!(e.pass, "{e:?}");
        }
    }
}
