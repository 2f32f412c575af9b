//! Topological measures and their evaluation on regions.
//!
//! Three families are supported. `PointCount` is a solid-set function: on a
//! solid set it reads a non-decreasing, superadditive table at the number of
//! marked points inside, and it extends to every other region through
//! component sums and hole subtraction. `Density` and `Atomic` are ordinary
//! measures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::region::Region;
use crate::topology::{self, Connectivity};

/// Relative slack used when a point sits on a cell edge.
pub const POINT_TIE_FACTOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TopologicalMeasure {
    PointCount { points: Vec<[f64; 2]>, value_by_count: Vec<f64> },
    Density { density: DensityProfile },
    Atomic { atoms: Vec<Atom> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DensityProfile {
    /// Constant density. With `whole_plane` the density extends past the
    /// frame and the total mass is infinite; otherwise it stops at the frame.
    Uniform {
        value: f64,
        #[serde(default)]
        whole_plane: bool,
    },
    /// One non-negative density per cell, zero beyond the frame.
    PerCell(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub x: f64,
    pub y: f64,
    pub weight: f64,
}

/// Total mass `mu(X)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mass {
    Finite(f64),
    Infinite,
}

impl Mass {
    pub fn finite(self) -> Result<f64> {
        match self {
            Mass::Finite(m) => Ok(m),
            Mass::Infinite => Err(Error::InfiniteMeasure),
        }
    }
}

impl TopologicalMeasure {
    pub fn point_count(points: Vec<[f64; 2]>, value_by_count: Vec<f64>) -> Result<Self> {
        let m = TopologicalMeasure::PointCount { points, value_by_count };
        m.validate()?;
        Ok(m)
    }

    pub fn uniform_density(value: f64) -> Result<Self> {
        let m = TopologicalMeasure::Density { density: DensityProfile::Uniform { value, whole_plane: false } };
        m.validate()?;
        Ok(m)
    }

    pub fn atomic(atoms: Vec<Atom>) -> Result<Self> {
        let m = TopologicalMeasure::Atomic { atoms };
        m.validate()?;
        Ok(m)
    }

    /// The zero measure.
    pub fn zero() -> Self {
        TopologicalMeasure::Atomic { atoms: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TopologicalMeasure::PointCount { points, value_by_count: table } => {
                if table.len() != points.len() + 1 {
                    return Err(Error::Measure(format!(
                        "value table has {} entries for {} points",
                        table.len(),
                        points.len()
                    )));
                }
                if points.iter().flatten().any(|c| !c.is_finite()) {
                    return Err(Error::Measure("non-finite point coordinate".into()));
                }
                if table.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Measure("non-finite table entry".into()));
                }
                if table[0] != 0.0 {
                    return Err(Error::Measure(format!("value_by_count[0] = {}, expected 0", table[0])));
                }
                if let Some(k) = (1..table.len()).find(|&k| table[k] < table[k - 1]) {
                    return Err(Error::Measure(format!("value table decreases at count {k}")));
                }
                let n = points.len();
                for i in 1..=n {
                    for j in i..=n - i {
                        if table[i + j] < table[i] + table[j] {
                            return Err(Error::Measure(format!(
                                "value table is not superadditive: t[{}] < t[{i}] + t[{j}]",
                                i + j
                            )));
                        }
                    }
                }
            }
            TopologicalMeasure::Density { density } => match density {
                DensityProfile::Uniform { value, .. } => {
                    if !(value.is_finite() && *value >= 0.0) {
                        return Err(Error::Measure(format!("density {value} must be finite and >= 0")));
                    }
                }
                DensityProfile::PerCell(values) => {
                    if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                        return Err(Error::Measure("per-cell densities must be finite and >= 0".into()));
                    }
                }
            },
            TopologicalMeasure::Atomic { atoms } => {
                if atoms.iter().any(|a| !(a.x.is_finite() && a.y.is_finite())) {
                    return Err(Error::Measure("non-finite atom position".into()));
                }
                if atoms.iter().any(|a| !(a.weight.is_finite() && a.weight >= 0.0)) {
                    return Err(Error::Measure("atom weights must be finite and >= 0".into()));
                }
            }
        }
        Ok(())
    }

    /// Density and atomic measures are linear; point-count measures are not.
    pub fn is_linear(&self) -> bool {
        !matches!(self, TopologicalMeasure::PointCount { .. })
    }

    pub fn total_mass(&self, frame: &Frame) -> Result<Mass> {
        Ok(match self {
            TopologicalMeasure::PointCount { value_by_count, .. } => {
                Mass::Finite(*value_by_count.last().expect("table is never empty"))
            }
            TopologicalMeasure::Density { density: DensityProfile::Uniform { value, whole_plane } } => {
                if *whole_plane && *value > 0.0 {
                    Mass::Infinite
                } else {
                    Mass::Finite(value * (frame.x_max - frame.x_min) * (frame.y_max - frame.y_min))
                }
            }
            TopologicalMeasure::Density { .. } => Mass::Finite(self.cell_weights(frame)?.iter().sum()),
            TopologicalMeasure::Atomic { atoms } => Mass::Finite(atoms.iter().map(|a| a.weight).sum()),
        })
    }

    /// Marked locations: points for `PointCount`, atoms for `Atomic`.
    pub fn marked_points(&self) -> Vec<[f64; 2]> {
        match self {
            TopologicalMeasure::PointCount { points, .. } => points.clone(),
            TopologicalMeasure::Atomic { atoms } => atoms.iter().map(|a| [a.x, a.y]).collect(),
            TopologicalMeasure::Density { .. } => Vec::new(),
        }
    }

    /// Mass carried by each cell, for the linear families.
    pub(crate) fn cell_weights(&self, frame: &Frame) -> Result<Vec<f64>> {
        match self {
            TopologicalMeasure::Density { density } => match density {
                DensityProfile::Uniform { value, .. } => Ok(vec![value * frame.cell_area(); frame.len()]),
                DensityProfile::PerCell(values) => {
                    if values.len() != frame.len() {
                        return Err(Error::Measure(format!(
                            "{} densities for a frame of {} cells",
                            values.len(),
                            frame.len()
                        )));
                    }
                    Ok(values.iter().map(|d| d * frame.cell_area()).collect())
                }
            },
            TopologicalMeasure::Atomic { atoms } => {
                let mut w = vec![0.0; frame.len()];
                for a in atoms {
                    let (i, j) = locate(frame, a.x, a.y)?;
                    w[frame.index(i, j)] += a.weight;
                }
                Ok(w)
            }
            TopologicalMeasure::PointCount { .. } => {
                Err(Error::Variant("point-count measures carry no per-cell mass".into()))
            }
        }
    }

    /// `mu(r)`.
    pub fn eval(&self, r: &Region) -> Result<f64> {
        let frame = r.frame();
        for p in self.marked_points() {
            check_point_against(frame, |idx| r.contains_index(idx), p)?;
        }
        self.eval_cells(frame, &r.cell_list(), r.connectivity())
    }

    /// `mu` on a sorted cell set with the given connectivity, skipping the
    /// point tie checks.
    pub(crate) fn eval_cells(&self, frame: &Frame, cells: &[usize], conn: Connectivity) -> Result<f64> {
        match self {
            TopologicalMeasure::PointCount { points, value_by_count } => {
                let index = PointIndex::new(frame, points)?;
                let mut eval = SolidSetEval { frame, table: value_by_count, index: &index, limit: frame.len() };
                eval.eval(cells, conn, 0)
            }
            TopologicalMeasure::Density { .. } | TopologicalMeasure::Atomic { .. } => {
                let w = self.cell_weights(frame)?;
                Ok(cells.iter().map(|&c| w[c]).sum())
            }
        }
    }
}

/// `mu(r)`; free-function form of [`TopologicalMeasure::eval`].
pub fn tm_eval(mu: &TopologicalMeasure, r: &Region) -> Result<f64> {
    mu.eval(r)
}

/// Number of `points` inside `r`.
pub fn count_points(r: &Region, points: &[[f64; 2]]) -> Result<usize> {
    let frame = r.frame();
    let mut n = 0;
    for &p in points {
        check_point_against(frame, |idx| r.contains_index(idx), p)?;
        let (i, j) = locate(frame, p[0], p[1])?;
        n += r.contains(i, j) as usize;
    }
    Ok(n)
}

fn locate(frame: &Frame, x: f64, y: f64) -> Result<(usize, usize)> {
    if !frame.contains_point(x, y) {
        return Err(Error::Geometry(format!("point ({x}, {y}) lies outside the frame")));
    }
    Ok(frame.cell_of(x, y).expect("point inside frame"))
}

pub(crate) fn point_tie_epsilon(frame: &Frame) -> f64 {
    0.5 * frame.cell_diagonal() * POINT_TIE_FACTOR
}

/// Fails when `p` sits within the tie epsilon of an edge or corner that
/// separates its cell from a neighbor with different membership.
pub(crate) fn check_point_against(frame: &Frame, member: impl Fn(usize) -> bool, p: [f64; 2]) -> Result<()> {
    let (i, j) = locate(frame, p[0], p[1])?;
    let eps = point_tie_epsilon(frame);
    let left = frame.x_min + i as f64 * frame.cell_width();
    let bottom = frame.y_min + j as f64 * frame.cell_height();
    let dl = p[0] - left;
    let dr = left + frame.cell_width() - p[0];
    let db = p[1] - bottom;
    let dt = bottom + frame.cell_height() - p[1];
    let here = member(frame.index(i, j));
    for (di, dj) in [(-1isize, 0isize), (1, 0), (0, -1), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1)] {
        let ni = i as isize + di;
        let nj = j as isize + dj;
        let there = if ni < 0 || nj < 0 || ni as usize >= frame.nx || nj as usize >= frame.ny {
            false
        } else {
            member(frame.index(ni as usize, nj as usize))
        };
        if there == here {
            continue;
        }
        let dx = match di {
            -1 => dl,
            1 => dr,
            _ => 0.0,
        };
        let dy = match dj {
            -1 => db,
            1 => dt,
            _ => 0.0,
        };
        let d = if di != 0 && dj != 0 { dx.hypot(dy) } else { dx + dy };
        if d <= eps {
            return Err(Error::TieBreak(format!(
                "point ({}, {}) is {d:e} from a region boundary",
                p[0], p[1]
            )));
        }
    }
    Ok(())
}

/// Cells holding marked points, with multiplicities, sorted by cell.
pub(crate) struct PointIndex {
    cells: Vec<(usize, usize)>,
}

impl PointIndex {
    pub(crate) fn new(frame: &Frame, points: &[[f64; 2]]) -> Result<Self> {
        let mut cells: Vec<(usize, usize)> = Vec::new();
        for p in points {
            let (i, j) = locate(frame, p[0], p[1])?;
            let idx = frame.index(i, j);
            match cells.binary_search_by_key(&idx, |c| c.0) {
                Ok(k) => cells[k].1 += 1,
                Err(k) => cells.insert(k, (idx, 1)),
            }
        }
        Ok(PointIndex { cells })
    }

    fn count(&self, sorted: &[usize]) -> usize {
        self.cells.iter().filter(|(c, _)| sorted.binary_search(c).is_ok()).map(|(_, n)| n).sum()
    }
}

struct SolidSetEval<'a> {
    frame: &'a Frame,
    table: &'a [f64],
    index: &'a PointIndex,
    limit: usize,
}

impl SolidSetEval<'_> {
    /// Sum over components of `table[#points in solid hull] - mu(holes)`.
    /// Holes are evaluated with the dual connectivity.
    fn eval(&mut self, cells: &[usize], conn: Connectivity, depth: usize) -> Result<f64> {
        if depth > self.limit {
            return Err(Error::Recursion(depth));
        }
        let mut total = 0.0;
        for comp in topology::components(self.frame, cells, conn) {
            let holes = topology::holes_of_component(self.frame, &comp, conn);
            let count = self.index.count(&comp) + holes.iter().map(|h| self.index.count(h)).sum::<usize>();
            let mut value = self.table[count];
            for h in &holes {
                value -= self.eval(h, conn.dual(), depth + 1)?;
            }
            total += value;
        }
        Ok(total)
    }
}
