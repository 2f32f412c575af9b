//! Rasterized subsets of the frame.
//!
//! A region carries a role: open regions stand for open sets and are
//! 4-connected, compact regions stand for compact sets and are 8-connected.
//! Complements always use the dual connectivity, so an open set and the
//! compact set it surrounds see the same boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::topology::{self, Connectivity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Open,
    Compact,
}

impl Role {
    pub fn connectivity(self) -> Connectivity {
        match self {
            Role::Open => Connectivity::Four,
            Role::Compact => Connectivity::Eight,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    frame: Frame,
    mask: Vec<bool>,
    role: Role,
}

impl Region {
    pub fn new(frame: Frame, mask: Vec<bool>, role: Role) -> Result<Self> {
        if mask.len() != frame.len() {
            return Err(Error::Frame(format!(
                "mask has {} cells, frame has {}",
                mask.len(),
                frame.len()
            )));
        }
        let region = Region { frame, mask, role };
        region.check_role()?;
        Ok(region)
    }

    pub fn empty(frame: Frame, role: Role) -> Self {
        Region { mask: vec![false; frame.len()], frame, role }
    }

    /// Every non-border cell, as an open region.
    pub fn frame_interior(frame: Frame) -> Self {
        let mask = (0..frame.len())
            .map(|idx| {
                let (i, j) = frame.coords(idx);
                !frame.is_border(i, j)
            })
            .collect();
        Region { frame, mask, role: Role::Open }
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
    ///
    /// Open rectangles take the cells whose centers are strictly inside,
    /// compact rectangles the cells whose centers lie in the closed box.
    pub fn rect(frame: Frame, x0: f64, x1: f64, y0: f64, y1: f64, role: Role) -> Result<Self> {
        if !(x0 <= x1 && y0 <= y1) {
            return Err(Error::Geometry(format!("inverted rectangle [{x0}, {x1}] x [{y0}, {y1}]")));
        }
        let inside = |v: f64, lo: f64, hi: f64| match role {
            Role::Open => v > lo && v < hi,
            Role::Compact => v >= lo && v <= hi,
        };
        let mask = (0..frame.len())
            .map(|idx| {
                let (i, j) = frame.coords(idx);
                let (x, y) = frame.center(i, j);
                inside(x, x0, x1) && inside(y, y0, y1)
            })
            .collect();
        Region::new(frame, mask, role)
    }

    pub(crate) fn from_cells(frame: Frame, cells: &[usize], role: Role) -> Self {
        let mut mask = vec![false; frame.len()];
        for &c in cells {
            mask[c] = true;
        }
        Region { frame, mask, role }
    }

    fn check_role(&self) -> Result<()> {
        if self.role == Role::Open && self.touches_border() {
            return Err(Error::Frame("open region reaches the frame border".into()));
        }
        Ok(())
    }

    pub fn touches_border(&self) -> bool {
        self.cells().any(|idx| {
            let (i, j) = self.frame.coords(idx);
            self.frame.is_border(i, j)
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn connectivity(&self) -> Connectivity {
        self.role.connectivity()
    }

    pub fn with_role(&self, role: Role) -> Result<Self> {
        Region::new(self.frame, self.mask.clone(), role)
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.mask[self.frame.index(i, j)]
    }

    #[inline]
    pub fn contains_index(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    /// Flat indices of member cells, ascending.
    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter_map(|(i, &m)| m.then_some(i))
    }

    pub fn cell_list(&self) -> Vec<usize> {
        self.cells().collect()
    }

    pub fn cell_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }

    pub fn area(&self) -> f64 {
        self.cell_count() as f64 * self.frame.cell_area()
    }

    fn same_frame(&self, other: &Region) -> Result<()> {
        if self.frame != other.frame {
            return Err(Error::FrameMismatch);
        }
        Ok(())
    }

    fn zip_with(&self, other: &Region, op: impl Fn(bool, bool) -> bool) -> Result<Region> {
        self.same_frame(other)?;
        let mask = self.mask.iter().zip(&other.mask).map(|(&a, &b)| op(a, b)).collect();
        Region::new(self.frame, mask, self.role)
    }

    /// Union; the result keeps `self`'s role.
    pub fn union(&self, other: &Region) -> Result<Region> {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Region) -> Result<Region> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Region) -> Result<Region> {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn is_subset_of(&self, other: &Region) -> bool {
        self.frame == other.frame && self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.frame == other.frame && self.mask.iter().zip(&other.mask).all(|(&a, &b)| !(a && b))
    }

    /// Chebyshev (square window) erosion by `k` cells. Cells outside the frame
    /// count as outside the region.
    pub fn erode(&self, k: usize) -> Region {
        if k == 0 {
            return self.clone();
        }
        let f = &self.frame;
        let rows = self.window_pass(k, true, Axis::X);
        let mask = window_pass_mask(f, &rows, k, true, Axis::Y);
        Region { frame: self.frame, mask, role: self.role }
    }

    /// Chebyshev dilation by `k` cells.
    ///
    /// Fails when the result would need cells beyond the frame, and for open
    /// regions when it would reach the border ring.
    pub fn dilate(&self, k: usize) -> Result<Region> {
        if k == 0 {
            return Ok(self.clone());
        }
        let f = &self.frame;
        for idx in self.cells() {
            let (i, j) = f.coords(idx);
            if i < k || j < k || i + k >= f.nx || j + k >= f.ny {
                return Err(Error::Frame(format!("dilation by {k} cells exits the frame")));
            }
        }
        let rows = self.window_pass(k, false, Axis::X);
        let mask = window_pass_mask(f, &rows, k, false, Axis::Y);
        Region::new(self.frame, mask, self.role)
    }

    fn window_pass(&self, k: usize, erode: bool, axis: Axis) -> Vec<bool> {
        window_pass_mask(&self.frame, &self.mask, k, erode, axis)
    }

    /// Components under the region's own connectivity.
    pub fn connected_components(&self) -> Vec<Region> {
        topology::components(&self.frame, &self.cell_list(), self.connectivity())
            .into_iter()
            .map(|c| Region::from_cells(self.frame, &c, self.role))
            .collect()
    }

    /// Bounded complement components. Holes of an open region are compact and
    /// vice versa.
    pub fn holes(&self) -> Vec<Region> {
        let dual_role = match self.role {
            Role::Open => Role::Compact,
            Role::Compact => Role::Open,
        };
        topology::holes_of_set(&self.frame, &self.mask, self.connectivity())
            .into_iter()
            .map(|h| Region::from_cells(self.frame, &h, dual_role))
            .collect()
    }

    pub fn is_solid(&self) -> bool {
        self.connected_components().len() == 1 && self.holes().is_empty()
    }

    /// Region plus all its holes.
    pub fn solid_hull(&self) -> Region {
        let mut out = self.clone();
        for h in topology::holes_of_set(&self.frame, &self.mask, self.connectivity()) {
            for c in h {
                out.mask[c] = true;
            }
        }
        out
    }

    pub fn to_rle(&self) -> RegionRle {
        let mut runs = Vec::new();
        let mut idx = 0;
        while idx < self.mask.len() {
            if self.mask[idx] {
                let start = idx;
                while idx < self.mask.len() && self.mask[idx] {
                    idx += 1;
                }
                runs.push([start, idx - start]);
            } else {
                idx += 1;
            }
        }
        RegionRle { frame: self.frame, role: self.role, runs }
    }

    pub fn from_rle(rle: &RegionRle) -> Result<Region> {
        rle.frame.validate()?;
        let mut mask = vec![false; rle.frame.len()];
        for &[start, len] in &rle.runs {
            let end = start
                .checked_add(len)
                .filter(|&e| e <= mask.len())
                .ok_or_else(|| Error::Frame(format!("run {start}+{len} exceeds the frame")))?;
            mask[start..end].iter_mut().for_each(|m| *m = true);
        }
        Region::new(rle.frame, mask, rle.role)
    }
}

#[derive(Clone, Copy)]
enum Axis {
    X,
    Y,
}

/// One separable pass of a square window min/max filter.
fn window_pass_mask(f: &Frame, mask: &[bool], k: usize, erode: bool, axis: Axis) -> Vec<bool> {
    let (outer, inner) = match axis {
        Axis::X => (f.ny, f.nx),
        Axis::Y => (f.nx, f.ny),
    };
    let at = |o: usize, p: usize| match axis {
        Axis::X => f.index(p, o),
        Axis::Y => f.index(o, p),
    };
    let mut out = vec![false; mask.len()];
    let mut prefix = vec![0usize; inner + 1];
    for o in 0..outer {
        for p in 0..inner {
            prefix[p + 1] = prefix[p] + mask[at(o, p)] as usize;
        }
        for p in 0..inner {
            let lo = p.saturating_sub(k);
            let hi = (p + k).min(inner - 1);
            let count = prefix[hi + 1] - prefix[lo];
            out[at(o, p)] = if erode {
                // Any part of the window beyond the frame counts as outside.
                p >= k && p + k < inner && count == 2 * k + 1
            } else {
                count > 0
            };
        }
    }
    out
}

/// Run-length encoded region, row-major over flat cell indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRle {
    pub frame: Frame,
    pub role: Role,
    /// `[start, length]` pairs.
    pub runs: Vec<[usize; 2]>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame() -> Frame {
        Frame::square(0.0, 10.0, 64).unwrap()
    }

    fn rect(x0: f64, x1: f64, y0: f64, y1: f64, role: Role) -> Region {
        Region::rect(frame(), x0, x1, y0, y1, role).unwrap()
    }

    #[test]
    fn filled_rectangle_is_solid() {
        let r = rect(1.0, 3.0, 1.0, 3.0, Role::Compact);
        assert!(r.is_solid());
        assert!(r.holes().is_empty());
    }

    #[test]
    fn annulus_has_one_hole() {
        let outer = rect(1.0, 5.0, 1.0, 5.0, Role::Open);
        let inner = rect(2.0, 4.0, 2.0, 4.0, Role::Open);
        let ring = outer.difference(&inner).unwrap();
        assert_eq!(ring.connected_components().len(), 1);
        assert_eq!(ring.holes().len(), 1);
        assert!(!ring.is_solid());
        assert_eq!(ring.solid_hull(), outer);
    }

    #[test]
    fn two_rectangles_are_two_components() {
        let a = rect(1.0, 2.0, 1.0, 2.0, Role::Compact);
        let b = rect(6.0, 8.0, 6.0, 8.0, Role::Compact);
        let both = a.union(&b).unwrap();
        assert_eq!(both.connected_components().len(), 2);
        assert!(!both.is_solid());
    }

    #[test]
    fn open_regions_may_not_touch_border() {
        assert!(Region::rect(frame(), -1.0, 3.0, 1.0, 3.0, Role::Open).is_err());
        assert!(Region::rect(frame(), -1.0, 3.0, 1.0, 3.0, Role::Compact).is_ok());
        assert!(!Region::frame_interior(frame()).touches_border());
    }

    #[test]
    fn erode_dilate_nest() {
        let r = rect(2.0, 6.0, 2.0, 5.0, Role::Open);
        assert_eq!(r.erode(0), r);
        let e = r.erode(1);
        assert!(e.is_subset_of(&r));
        assert!(e.dilate(1).unwrap().is_subset_of(&r));
        let e2 = r.erode(2);
        assert!(e2.cell_count() < e.cell_count());
        let d = r.dilate(3).unwrap();
        assert!(r.is_subset_of(&d));
        // Rectangle erosion removes exactly k cells from each side.
        let (w, h) = bbox_dims(&r);
        let (we, he) = bbox_dims(&e2);
        assert_eq!((w - 4, h - 4), (we, he));
    }

    #[test]
    fn erosion_near_frame_edge_counts_exterior_as_outside() {
        let all = Region::new(frame(), vec![true; frame().len()], Role::Compact).unwrap();
        let e = all.erode(1);
        assert!(!e.touches_border());
        assert_eq!(e.cell_count(), 62 * 62);
    }

    #[test]
    fn dilation_exiting_frame_fails() {
        let r = rect(0.2, 1.0, 4.0, 5.0, Role::Compact);
        assert!(matches!(r.dilate(3), Err(Error::Frame(_))));
    }

    #[test]
    fn rle_roundtrip() {
        let ring = rect(1.0, 5.0, 1.0, 5.0, Role::Open)
            .difference(&rect(2.0, 4.0, 2.0, 4.0, Role::Open))
            .unwrap();
        let rle = ring.to_rle();
        let json = serde_json::to_string(&rle).unwrap();
        let back: RegionRle = serde_json::from_str(&json).unwrap();
        assert_eq!(Region::from_rle(&back).unwrap(), ring);
    }

    fn bbox_dims(r: &Region) -> (usize, usize) {
        let f = r.frame();
        let (mut i0, mut j0, mut i1, mut j1) = (usize::MAX, usize::MAX, 0, 0);
        for c in r.cells() {
            let (i, j) = f.coords(c);
            i0 = i0.min(i);
            j0 = j0.min(j);
            i1 = i1.max(i);
            j1 = j1.max(j);
        }
        (i1 - i0 + 1, j1 - j0 + 1)
    }
}
