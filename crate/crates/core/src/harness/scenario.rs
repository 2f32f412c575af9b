//! Scenario files: a frame, named measures, regions and fields, and an
//! ordered list of checks. TOML and JSON share one schema; unknown keys are
//! rejected.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::checks::PropertySuite;
use super::example;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::frame::Frame;
use crate::measure::{Atom, DensityProfile, TopologicalMeasure};
use crate::pwl::PiecewiseLinearMap;
use crate::quasi::{Quadrature, Variant};
use crate::reconstruct::BumpSchedule;
use crate::region::{Region, Role};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub frame: Frame,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub measures: BTreeMap<String, MeasureSpec>,
    #[serde(default)]
    pub regions: BTreeMap<String, RegionSpec>,
    #[serde(default)]
    pub fields: BTreeMap<String, FieldSpec>,
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// For checks whose both sides are exact step sums.
    pub exact: f64,
    /// For checks backed by Density or Atomic measures.
    pub quadrature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { exact: 1e-9, quadrature: 1e-3 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    /// The five-point configuration of the non-linear example.
    Example,
    Zero,
    PointCount { points: Vec<[f64; 2]>, value_by_count: Vec<f64> },
    Density {
        value: f64,
        #[serde(default)]
        whole_plane: bool,
    },
    Atomic { atoms: Vec<Atom> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    Rect { x: [f64; 2], y: [f64; 2], role: Role },
    FrameInterior,
    Empty {
        #[serde(default = "open_role")]
        role: Role,
    },
    Union { of: Vec<String> },
    Intersection { of: Vec<String> },
    Difference { of: [String; 2] },
    Erode { of: String, cells: usize },
    Dilate { of: String, cells: usize },
    WithRole { of: String, role: Role },
}

fn open_role() -> Role {
    Role::Open
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Zero,
    Plateau { inner: String, outer: String, height: f64, ramp: f64 },
    Tent { center: [f64; 2], half_width: f64, height: f64 },
    Sum { terms: Vec<String> },
    Difference { of: [String; 2] },
    Scale { of: String, factor: f64 },
    Truncate { of: String, delta: f64 },
    PosPart { of: String },
    NegPart { of: String },
    Compose { of: String, phi: PhiSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiSpec {
    Identity,
    Zero,
    /// `min(x, delta)`.
    MinWith { delta: f64 },
    /// `x - min(x, delta)`.
    IdentityMinusMinWith { delta: f64 },
    Breakpoints { points: Vec<(f64, f64)> },
}

impl PhiSpec {
    /// The map on an interval covering `[lo, hi]` and 0.
    pub fn build(&self, lo: f64, hi: f64) -> Result<PiecewiseLinearMap> {
        let (mut lo, mut hi) = (lo.min(0.0), hi.max(0.0));
        if lo == hi {
            (lo, hi) = (-1.0, 1.0);
        }
        match self {
            PhiSpec::Identity => PiecewiseLinearMap::identity(lo, hi),
            PhiSpec::Zero => PiecewiseLinearMap::zero(lo, hi),
            PhiSpec::MinWith { delta } => PiecewiseLinearMap::min_with(*delta, lo, hi),
            PhiSpec::IdentityMinusMinWith { delta } => {
                PiecewiseLinearMap::identity(lo, hi)?.sub(&PiecewiseLinearMap::min_with(*delta, lo, hi)?)
            }
            PhiSpec::Breakpoints { points } => PiecewiseLinearMap::new(points.clone()),
        }
    }
}

fn default_heights() -> Vec<f64> {
    vec![1.0]
}

fn default_axiom_trials() -> usize {
    50
}

fn default_property_trials() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    NonlinearityExample {
        name: String,
        #[serde(default = "default_heights")]
        heights: Vec<f64>,
    },
    QuasiIntegral {
        name: String,
        measure: String,
        field: String,
        expect: f64,
        tol: Option<f64>,
        #[serde(default)]
        variant: Variant,
    },
    LinearOracle {
        name: String,
        measure: String,
        field: String,
        tol: Option<f64>,
        quadrature: Option<Quadrature>,
    },
    SgaAdditivity {
        name: String,
        measure: String,
        field: String,
        phi1: PhiSpec,
        phi2: PhiSpec,
        tol: Option<f64>,
    },
    DisjointSupport {
        name: String,
        measure: String,
        f: String,
        g: String,
        tol: Option<f64>,
    },
    MonotoneLipschitz {
        name: String,
        measure: String,
        f: String,
        g: String,
        tol: Option<f64>,
    },
    TmAxioms {
        name: String,
        measure: String,
        regions: Vec<String>,
        #[serde(default = "default_axiom_trials")]
        trials: usize,
        tol: Option<f64>,
    },
    Roundtrip {
        name: String,
        measure: String,
        regions: Vec<String>,
        #[serde(default)]
        schedule: BumpSchedule,
        tol: Option<f64>,
    },
    Extension {
        name: String,
        measure: String,
        field: String,
        schedule: Vec<usize>,
        tol: Option<f64>,
    },
    Distribution {
        name: String,
        measure: String,
        field: String,
        #[serde(default)]
        variant: Variant,
    },
    Property {
        name: String,
        measure: String,
        suite: PropertySuite,
        #[serde(default = "default_property_trials")]
        trials: usize,
        tol: Option<f64>,
    },
}

impl CheckSpec {
    pub fn name(&self) -> &str {
        match self {
            CheckSpec::NonlinearityExample { name, .. }
            | CheckSpec::QuasiIntegral { name, .. }
            | CheckSpec::LinearOracle { name, .. }
            | CheckSpec::SgaAdditivity { name, .. }
            | CheckSpec::DisjointSupport { name, .. }
            | CheckSpec::MonotoneLipschitz { name, .. }
            | CheckSpec::TmAxioms { name, .. }
            | CheckSpec::Roundtrip { name, .. }
            | CheckSpec::Extension { name, .. }
            | CheckSpec::Distribution { name, .. }
            | CheckSpec::Property { name, .. } => name,
        }
    }

    fn references(&self) -> (Option<&str>, Vec<&str>, Vec<&str>) {
        match self {
            CheckSpec::NonlinearityExample { .. } => (None, vec![], vec![]),
            CheckSpec::QuasiIntegral { measure, field, .. }
            | CheckSpec::LinearOracle { measure, field, .. }
            | CheckSpec::SgaAdditivity { measure, field, .. }
            | CheckSpec::Extension { measure, field, .. }
            | CheckSpec::Distribution { measure, field, .. } => (Some(measure), vec![field], vec![]),
            CheckSpec::DisjointSupport { measure, f, g, .. } | CheckSpec::MonotoneLipschitz { measure, f, g, .. } => {
                (Some(measure), vec![f, g], vec![])
            }
            CheckSpec::TmAxioms { measure, regions, .. } | CheckSpec::Roundtrip { measure, regions, .. } => {
                (Some(measure), vec![], regions.iter().map(String::as_str).collect())
            }
            CheckSpec::Property { measure, .. } => (Some(measure), vec![], vec![]),
        }
    }
}

impl Scenario {
    /// Parses JSON for `.json` files and TOML otherwise.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: cannot read scenario: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let parsed = if is_json { Self::from_json(&text) } else { Self::from_toml(&text) };
        parsed.map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks that every name resolves and check names are unique.
    pub fn validate(&self) -> Result<()> {
        self.frame.validate().map_err(|e| Error::Config(format!("frame: {e}")))?;
        let mut seen = BTreeSet::new();
        for (i, c) in self.checks.iter().enumerate() {
            let at = format!("checks[{i}] ({})", c.name());
            if !seen.insert(c.name()) {
                return Err(Error::Config(format!("{at}: duplicate check name")));
            }
            let (m, fs, rs) = c.references();
            if let Some(m) = m {
                if !self.measures.contains_key(m) {
                    return Err(Error::Config(format!("{at}.measure: unknown measure '{m}'")));
                }
            }
            for f in fs {
                if !self.fields.contains_key(f) {
                    return Err(Error::Config(format!("{at}: unknown field '{f}'")));
                }
            }
            for r in rs {
                if !self.regions.contains_key(r) {
                    return Err(Error::Config(format!("{at}.regions: unknown region '{r}'")));
                }
            }
        }
        Ok(())
    }

    /// Builds every named object on `frame`.
    pub fn resolve(&self, frame: Frame) -> Result<Resolved> {
        self.validate()?;
        let mut measures = BTreeMap::new();
        for (name, spec) in &self.measures {
            let m = build_measure(spec).map_err(|e| Error::Config(format!("measures.{name}: {e}")))?;
            measures.insert(name.clone(), m);
        }
        let mut r = Resolver { scenario: self, frame, regions: BTreeMap::new(), fields: BTreeMap::new(), stack: vec![] };
        for name in self.regions.keys() {
            r.region(name)?;
        }
        for name in self.fields.keys() {
            r.field(name)?;
        }
        Ok(Resolved { frame, measures, regions: r.regions, fields: r.fields })
    }
}

pub struct Resolved {
    pub frame: Frame,
    pub measures: BTreeMap<String, TopologicalMeasure>,
    pub regions: BTreeMap<String, Region>,
    pub fields: BTreeMap<String, ScalarField>,
}

fn build_measure(spec: &MeasureSpec) -> Result<TopologicalMeasure> {
    match spec {
        MeasureSpec::Example => Ok(example::measure()),
        MeasureSpec::Zero => Ok(TopologicalMeasure::zero()),
        MeasureSpec::PointCount { points, value_by_count } => {
            TopologicalMeasure::point_count(points.clone(), value_by_count.clone())
        }
        MeasureSpec::Density { value, whole_plane } => {
            let m = TopologicalMeasure::Density {
                density: DensityProfile::Uniform { value: *value, whole_plane: *whole_plane },
            };
            m.validate()?;
            Ok(m)
        }
        MeasureSpec::Atomic { atoms } => TopologicalMeasure::atomic(atoms.clone()),
    }
}

struct Resolver<'a> {
    scenario: &'a Scenario,
    frame: Frame,
    regions: BTreeMap<String, Region>,
    fields: BTreeMap<String, ScalarField>,
    stack: Vec<String>,
}

impl Resolver<'_> {
    fn enter(&mut self, path: String) -> Result<()> {
        if self.stack.contains(&path) {
            return Err(Error::Config(format!("{path}: circular definition via {}", self.stack.join(" -> "))));
        }
        self.stack.push(path);
        Ok(())
    }

    fn region(&mut self, name: &str) -> Result<Region> {
        if let Some(r) = self.regions.get(name) {
            return Ok(r.clone());
        }
        let path = format!("regions.{name}");
        let spec = self
            .scenario
            .regions
            .get(name)
            .ok_or_else(|| Error::Config(format!("{}: unknown region '{name}'", self.stack.last().map_or("", |s| s))))?;
        self.enter(path.clone())?;
        let frame = self.frame;
        let built = match spec {
            RegionSpec::Rect { x, y, role } => Region::rect(frame, x[0], x[1], y[0], y[1], *role),
            RegionSpec::FrameInterior => Ok(Region::frame_interior(frame)),
            RegionSpec::Empty { role } => Ok(Region::empty(frame, *role)),
            RegionSpec::Union { of } | RegionSpec::Intersection { of } => {
                let parts = of.iter().map(|n| self.region(n)).collect::<Result<Vec<_>>>()?;
                let (first, rest) = parts
                    .split_first()
                    .ok_or_else(|| Error::Config(format!("{path}.of: needs at least one region")))?;
                rest.iter().try_fold(first.clone(), |acc, r| match spec {
                    RegionSpec::Union { .. } => acc.union(r),
                    _ => acc.intersection(r),
                })
            }
            RegionSpec::Difference { of } => {
                let a = self.region(&of[0])?;
                let b = self.region(&of[1])?;
                a.difference(&b)
            }
            RegionSpec::Erode { of, cells } => Ok(self.region(of)?.erode(*cells)),
            RegionSpec::Dilate { of, cells } => self.region(of)?.dilate(*cells),
            RegionSpec::WithRole { of, role } => self.region(of)?.with_role(*role),
        };
        self.stack.pop();
        let r = built.map_err(|e| wrap(&path, e))?;
        self.regions.insert(name.to_string(), r.clone());
        Ok(r)
    }

    fn field(&mut self, name: &str) -> Result<ScalarField> {
        if let Some(f) = self.fields.get(name) {
            return Ok(f.clone());
        }
        let path = format!("fields.{name}");
        let spec = self
            .scenario
            .fields
            .get(name)
            .ok_or_else(|| Error::Config(format!("{}: unknown field '{name}'", self.stack.last().map_or("", |s| s))))?;
        self.enter(path.clone())?;
        let frame = self.frame;
        let built = match spec {
            FieldSpec::Zero => Ok(ScalarField::zeros(frame)),
            FieldSpec::Plateau { inner, outer, height, ramp } => {
                let i = self.region(inner)?;
                let o = self.region(outer)?;
                ScalarField::plateau(&i, &o, *height, *ramp)
            }
            FieldSpec::Tent { center, half_width, height } => {
                ScalarField::tent(frame, center[0], center[1], *half_width, *height)
            }
            FieldSpec::Sum { terms } => {
                let parts = terms.iter().map(|n| self.field(n)).collect::<Result<Vec<_>>>()?;
                parts.iter().try_fold(ScalarField::zeros(frame), |acc, f| acc.add(f))
            }
            FieldSpec::Difference { of } => {
                let a = self.field(&of[0])?;
                let b = self.field(&of[1])?;
                a.sub(&b)
            }
            FieldSpec::Scale { of, factor } => Ok(self.field(of)?.scale(*factor)),
            FieldSpec::Truncate { of, delta } => self.field(of)?.truncate(*delta),
            FieldSpec::PosPart { of } => Ok(self.field(of)?.pos_part()),
            FieldSpec::NegPart { of } => Ok(self.field(of)?.neg_part()),
            FieldSpec::Compose { of, phi } => {
                let f = self.field(of)?;
                phi.build(f.min_value(), f.max_value()).and_then(|p| f.compose(&p))
            }
        };
        self.stack.pop();
        let f = built.map_err(|e| wrap(&path, e))?;
        self.fields.insert(name.to_string(), f.clone());
        Ok(f)
    }
}

fn wrap(path: &str, e: Error) -> Error {
    match e {
        Error::Config(msg) => Error::Config(msg),
        other => Error::Config(format!("{path}: {other}")),
    }
}
