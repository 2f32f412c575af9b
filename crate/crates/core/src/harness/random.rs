//! Seeded random fields, maps and regions for the property runs.
//!
//! Rectangles have corners on a 0.5 lattice. Cell centers of the usual
//! power-of-two grids over `[0, 10]` never land on that lattice, so level
//! sets and region boundaries stay clear of the tie guards.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::ScalarField;
use crate::frame::Frame;
use crate::pwl::PiecewiseLinearMap;
use crate::region::{Region, Role};

pub const LATTICE: f64 = 0.5;

/// Generator for one named check; the stream is derived from the name so
/// adding or reordering checks leaves the others untouched.
pub fn check_rng(seed: u64, name: &str) -> ChaCha8Rng {
    let stream = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Axis-aligned box `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn grow(&self, m: f64) -> Rect {
        Rect { x0: self.x0 - m, x1: self.x1 + m, y0: self.y0 - m, y1: self.y1 + m }
    }

    pub fn overlaps(&self, o: &Rect) -> bool {
        self.x0 < o.x1 && o.x0 < self.x1 && self.y0 < o.y1 && o.y0 < self.y1
    }

    pub fn contains(&self, o: &Rect) -> bool {
        self.x0 <= o.x0 && o.x1 <= self.x1 && self.y0 <= o.y0 && o.y1 <= self.y1
    }

    pub fn region(&self, frame: Frame, role: Role) -> Result<Region> {
        Region::rect(frame, self.x0, self.x1, self.y0, self.y1, role)
    }
}

/// Inner box, margin to the outer box, ramp width and height of one plateau.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateauSpec {
    pub inner: Rect,
    pub margin: f64,
    pub ramp: f64,
    pub height: f64,
}

impl PlateauSpec {
    pub fn outer(&self) -> Rect {
        self.inner.grow(self.margin)
    }

    pub fn build(&self, frame: Frame) -> Result<ScalarField> {
        let inner = self.inner.region(frame, Role::Compact)?;
        let outer = self.outer().region(frame, Role::Open)?;
        ScalarField::plateau(&inner, &outer, self.height, self.ramp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Any,
}

pub struct Sampler<'a> {
    pub frame: Frame,
    pub rng: &'a mut ChaCha8Rng,
}

impl<'a> Sampler<'a> {
    pub fn new(frame: Frame, rng: &'a mut ChaCha8Rng) -> Self {
        Sampler { frame, rng }
    }

    fn lattice_range(&self, lo: f64, hi: f64) -> (i64, i64) {
        ((lo / LATTICE).ceil() as i64, (hi / LATTICE).floor() as i64)
    }

    /// Box on the lattice, at least `pad` inside the frame.
    pub fn rect(&mut self, pad: f64, max_side: usize) -> Rect {
        let f = self.frame;
        let (ax, bx) = self.lattice_range(f.x_min + pad, f.x_max - pad);
        let (ay, by) = self.lattice_range(f.y_min + pad, f.y_max - pad);
        let side = |a: i64, b: i64, rng: &mut ChaCha8Rng| {
            let len = rng.gen_range(1..=(max_side as i64).min(b - a).max(1));
            let start = rng.gen_range(a..=(b - len).max(a));
            (start as f64 * LATTICE, (start + len) as f64 * LATTICE)
        };
        let (x0, x1) = side(ax, bx, self.rng);
        let (y0, y1) = side(ay, by, self.rng);
        Rect { x0, x1, y0, y1 }
    }

    pub fn height(&mut self, sign: Sign) -> f64 {
        let h = self.rng.gen_range(0.25..2.0);
        match sign {
            Sign::Positive => h,
            Sign::Any => {
                if self.rng.gen_bool(0.5) {
                    h
                } else {
                    -h
                }
            }
        }
    }

    pub fn plateau(&mut self, sign: Sign) -> PlateauSpec {
        let margin = *[0.5, 1.0].choose(self.rng).unwrap();
        let inner = self.rect(margin + LATTICE, 6);
        let ramp = margin * *[0.5, 0.75, 1.0].choose(self.rng).unwrap();
        PlateauSpec { inner, margin, ramp, height: self.height(sign) }
    }

    /// Up to `n` plateaus whose outer boxes stay a lattice step apart, plus
    /// any boxes in `avoid`.
    pub fn separated(&mut self, n: usize, sign: Sign, avoid: &[Rect]) -> Vec<PlateauSpec> {
        let mut out: Vec<PlateauSpec> = Vec::new();
        let mut taken: Vec<Rect> = avoid.to_vec();
        let mut attempts = 0;
        while out.len() < n && attempts < 64 {
            attempts += 1;
            let p = self.plateau(sign);
            let zone = p.outer().grow(LATTICE);
            if taken.iter().all(|t| !t.overlaps(&zone)) {
                taken.push(p.outer());
                out.push(p);
            }
        }
        out
    }

    /// Sum of separated plateaus with between 1 and `max` terms.
    pub fn structured(&mut self, max: usize, sign: Sign) -> Result<(ScalarField, Vec<PlateauSpec>)> {
        let n = self.rng.gen_range(1..=max);
        let specs = self.separated(n, sign, &[]);
        Ok((sum(self.frame, &specs)?, specs))
    }

    /// Sum of non-negative plateaus that may overlap.
    pub fn overlapping(&mut self, max: usize) -> Result<(ScalarField, Vec<PlateauSpec>)> {
        let n = self.rng.gen_range(1..=max);
        let specs: Vec<PlateauSpec> = (0..n).map(|_| self.plateau(Sign::Positive)).collect();
        Ok((sum(self.frame, &specs)?, specs))
    }

    /// Piecewise-linear map on `[lo, hi]` through 0 with `interior` random
    /// breakpoints and values in `[-2, 2]`.
    pub fn phi(&mut self, lo: f64, hi: f64, interior: usize) -> Result<PiecewiseLinearMap> {
        let mut xs = vec![lo, hi, 0.0];
        for _ in 0..interior {
            if hi > lo {
                xs.push(self.rng.gen_range(lo..hi));
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        if xs.len() == 1 {
            xs.push(1.0);
        }
        let pts = xs.into_iter().map(|x| (x, if x == 0.0 { 0.0 } else { self.rng.gen_range(-2.0..2.0) })).collect();
        PiecewiseLinearMap::new(pts)
    }
}

pub fn sum(frame: Frame, specs: &[PlateauSpec]) -> Result<ScalarField> {
    specs.iter().try_fold(ScalarField::zeros(frame), |acc, p| acc.add(&p.build(frame)?))
}
