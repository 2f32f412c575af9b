//! Piecewise-linear maps `phi` with `phi(0) = 0`, used to move inside the
//! subalgebra generated by a single field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct PiecewiseLinearMap {
    points: Vec<(f64, f64)>,
}

impl PiecewiseLinearMap {
    /// Builds the map through `points`, which must have strictly increasing
    /// abscissae spanning an interval that contains 0. A value at 0 that is
    /// zero up to rounding is snapped to an exact breakpoint `(0, 0)`.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain("a piecewise-linear map needs at least two breakpoints".into()));
        }
        if points.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::Domain("non-finite breakpoint".into()));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Domain("breakpoint abscissae must be strictly increasing".into()));
        }
        let (lo, hi) = (points[0].0, points[points.len() - 1].0);
        if !(lo <= 0.0 && 0.0 <= hi) {
            return Err(Error::Domain(format!("domain [{lo}, {hi}] does not contain 0")));
        }
        let mut map = PiecewiseLinearMap { points };
        let at_zero = map.eval_raw(0.0);
        let scale = map.points.iter().fold(1.0f64, |m, &(_, y)| m.max(y.abs()));
        if at_zero.abs() > 1e-12 * scale {
            return Err(Error::Domain(format!("phi(0) = {at_zero}, expected 0")));
        }
        match map.points.binary_search_by(|p| p.0.total_cmp(&0.0)) {
            Ok(k) => map.points[k].1 = 0.0,
            Err(k) => map.points.insert(k, (0.0, 0.0)),
        }
        Ok(map)
    }

    pub fn identity(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, lo), (hi, hi)])
    }

    /// `min(x, delta)` on `[lo, hi]`.
    pub fn min_with(delta: f64, lo: f64, hi: f64) -> Result<Self> {
        if delta >= hi {
            return Self::identity(lo, hi);
        }
        if delta <= lo {
            return Err(Error::Domain(format!("cap {delta} lies below the domain start {lo}")));
        }
        Self::new(vec![(lo, lo), (delta, delta), (hi, delta)])
    }

    /// `max(x, floor)` on `[lo, hi]`; used with `floor = 0` for the positive part.
    pub fn max_with(floor: f64, lo: f64, hi: f64) -> Result<Self> {
        if floor <= lo {
            return Self::identity(lo, hi);
        }
        if floor >= hi {
            return Err(Error::Domain(format!("floor {floor} lies above the domain end {hi}")));
        }
        Self::new(vec![(lo, floor), (floor, floor), (hi, hi)])
    }

    pub fn zero(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, 0.0), (hi, 0.0)])
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        let (a, b) = self.domain();
        a <= lo && hi <= b
    }

    fn eval_raw(&self, x: f64) -> f64 {
        let pts = &self.points;
        match pts.binary_search_by(|p| p.0.total_cmp(&x)) {
            Ok(k) => pts[k].1,
            Err(0) => pts[0].1,
            Err(k) if k == pts.len() => pts[k - 1].1,
            Err(k) => {
                let (x0, y0) = pts[k - 1];
                let (x1, y1) = pts[k];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }

    /// Value at `x`, or a domain error outside the breakpoint interval.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let (a, b) = self.domain();
        if x < a || x > b {
            return Err(Error::Domain(format!("{x} outside [{a}, {b}]")));
        }
        Ok(self.eval_raw(x))
    }

    /// Pointwise combination `alpha * self + beta * other` on the common domain.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        let (a0, b0) = self.domain();
        let (a1, b1) = other.domain();
        let (lo, hi) = (a0.max(a1), b0.min(b1));
        let mut xs: Vec<f64> = self
            .points
            .iter()
            .chain(&other.points)
            .map(|p| p.0)
            .filter(|&x| x >= lo && x <= hi)
            .collect();
        xs.push(lo);
        xs.push(hi);
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let points = xs
            .into_iter()
            .map(|x| (x, alpha * self.eval_raw(x) + beta * other.eval_raw(x)))
            .collect();
        Self::new(points)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }
}

impl TryFrom<Vec<(f64, f64)>> for PiecewiseLinearMap {
    type Error = Error;

    fn try_from(points: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<PiecewiseLinearMap> for Vec<(f64, f64)> {
    fn from(map: PiecewiseLinearMap) -> Self {
        map.points
    }
}
