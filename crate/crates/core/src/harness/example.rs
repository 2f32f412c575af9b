//! The two-plateau configuration on which the quasi-integral fails to be
//! linear.
//!
//! `K = [1,7]x[5,7]` and `C = [5,7]x[1,7]` overlap in `[5,7]x[5,7]`, which
//! holds three marked points. One more point sits in `K \ C` and one in
//! `C \ K`. The measure reads `[0, 0, 1/2, 1/2, 1, 1]` by point count on
//! solid sets, so `rho(f) = rho(g) = b` while `rho(f + g) = 3b/2`.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::frame::Frame;
use crate::measure::TopologicalMeasure;
use crate::region::{Region, Role};

pub const POINTS: [[f64; 2]; 5] = [[5.6, 6.4], [6.2, 5.7], [6.6, 6.6], [3.0, 6.0], [6.0, 3.0]];
pub const VALUE_BY_COUNT: [f64; 6] = [0.0, 0.0, 0.5, 0.5, 1.0, 1.0];
pub const RAMP: f64 = 0.25;
pub const MIN_RESOLUTION: usize = 64;

pub fn measure() -> TopologicalMeasure {
    TopologicalMeasure::point_count(POINTS.to_vec(), VALUE_BY_COUNT.to_vec()).expect("table is valid")
}

pub fn frame(n: usize) -> Result<Frame> {
    Frame::square(0.0, 10.0, n)
}

#[derive(Debug, Clone)]
pub struct Example {
    pub k: Region,
    pub c: Region,
    pub u: Region,
    pub v: Region,
    pub f: ScalarField,
    pub g: ScalarField,
}

impl Example {
    pub fn new(frame: Frame, b: f64) -> Result<Self> {
        if frame.nx < MIN_RESOLUTION || frame.ny < MIN_RESOLUTION {
            return Err(Error::Geometry(format!(
                "{}x{} grid is too coarse; need at least {MIN_RESOLUTION}x{MIN_RESOLUTION}",
                frame.nx, frame.ny
            )));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::Domain(format!("height {b} must be positive")));
        }
        let k = Region::rect(frame, 1.0, 7.0, 5.0, 7.0, Role::Compact)?;
        let c = Region::rect(frame, 5.0, 7.0, 1.0, 7.0, Role::Compact)?;
        let u = Region::rect(frame, 0.5, 7.5, 4.5, 7.5, Role::Open)?;
        let v = Region::rect(frame, 4.5, 7.5, 0.5, 7.5, Role::Open)?;
        let f = ScalarField::plateau(&k, &u, b, RAMP)?;
        let g = ScalarField::plateau(&c, &v, b, RAMP)?;
        Ok(Example { k, c, u, v, f, g })
    }

    /// Six regions: `K`, `C`, `K∩C`, an open neighborhood of `K \ C`, the
    /// open frame interior and the empty set.
    pub fn catalog(&self) -> Result<Vec<(String, Region)>> {
        let frame = *self.k.frame();
        Ok(vec![
            ("K".to_string(), self.k.clone()),
            ("C".to_string(), self.c.clone()),
            ("K_cap_C".to_string(), self.k.intersection(&self.c)?),
            ("K_minus_C_nbhd".to_string(), Region::rect(frame, 0.5, 4.8, 4.5, 7.5, Role::Open)?),
            ("frame".to_string(), Region::frame_interior(frame)),
            ("empty".to_string(), Region::empty(frame, Role::Open)),
        ])
    }
}
