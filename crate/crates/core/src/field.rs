//! Grid-sampled compactly supported fields and the surgery performed on them.
//!
//! A [`ScalarField`] holds one finite sample per cell center and is exactly
//! zero on the border ring, so its support sits strictly inside the frame.

use std::io::Write;

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::pwl::PiecewiseLinearMap;
use crate::region::{Region, Role};

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    frame: Frame,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(frame: Frame) -> Self {
        ScalarField { values: vec![0.0; frame.len()], frame }
    }

    pub fn from_values(frame: Frame, values: Vec<f64>) -> Result<Self> {
        if values.len() != frame.len() {
            return Err(Error::Frame(format!(
                "{} samples for a frame of {} cells",
                values.len(),
                frame.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite sample {v}")));
        }
        for (idx, &v) in values.iter().enumerate() {
            let (i, j) = frame.coords(idx);
            if frame.is_border(i, j) && v != 0.0 {
                return Err(Error::Frame(format!("sample {v} on border cell ({i}, {j})")));
            }
        }
        Ok(ScalarField { frame, values })
    }

    /// Samples `func` at every cell center.
    pub fn from_fn(frame: Frame, func: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = (0..frame.len())
            .map(|idx| {
                let (i, j) = frame.coords(idx);
                let (x, y) = frame.center(i, j);
                func(x, y)
            })
            .collect();
        Self::from_values(frame, values)
    }

    /// Square pyramid `height * max(0, 1 - |p - c|_inf / half_width)`.
    pub fn tent(frame: Frame, cx: f64, cy: f64, half_width: f64, height: f64) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::Geometry(format!("tent half width {half_width} must be positive")));
        }
        Self::from_fn(frame, |x, y| {
            let r = (x - cx).abs().max((y - cy).abs());
            height * (1.0 - r / half_width).max(0.0)
        })
    }

    /// Urysohn-type plateau: `height` wherever the sup-norm distance to the
    /// complement of `outer` is at least `ramp`, zero off `outer`, and
    /// `height * dist / ramp` in between.
    ///
    /// Distances are measured between cell centers, treating every cell
    /// outside `outer` (and everything beyond the frame) as complement. The
    /// sup norm makes level sets of a rectangular plateau nested one-cell rings.
    pub fn plateau(inner: &Region, outer: &Region, height: f64, ramp: f64) -> Result<Self> {
        let frame = *outer.frame();
        if inner.frame() != outer.frame() {
            return Err(Error::FrameMismatch);
        }
        if !(height.is_finite() && height != 0.0) {
            return Err(Error::Geometry(format!("plateau height {height} must be finite and non-zero")));
        }
        if !(ramp.is_finite() && ramp > 0.0) {
            return Err(Error::Geometry(format!("ramp width {ramp} must be positive")));
        }
        if inner.is_empty() {
            return Err(Error::Geometry("plateau core is empty".into()));
        }
        if !inner.is_subset_of(outer) {
            return Err(Error::Geometry("plateau core is not contained in its support".into()));
        }
        if outer.touches_border() {
            return Err(Error::Frame("plateau support reaches the frame border".into()));
        }
        let dist = capped_sup_distance(outer, ramp);
        let slack = 1e-12 * ramp;
        if let Some(idx) = inner.cells().find(|&idx| dist[idx] + slack < ramp) {
            let (i, j) = frame.coords(idx);
            return Err(Error::Geometry(format!(
                "core cell ({i}, {j}) is {} from the support edge, ramp is {ramp}",
                dist[idx]
            )));
        }
        let values = dist
            .iter()
            .map(|&d| if d + slack >= ramp { height } else { height * (d / ramp) })
            .collect();
        Ok(ScalarField { frame, values })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.frame.index(i, j)]
    }

    /// Value of the cell containing `(x, y)`.
    pub fn sample(&self, x: f64, y: f64) -> Option<f64> {
        self.frame.cell_of(x, y).map(|(i, j)| self.at(i, j))
    }

    fn same_frame(&self, other: &ScalarField) -> Result<()> {
        if self.frame != other.frame {
            return Err(Error::FrameMismatch);
        }
        Ok(())
    }

    fn map(&self, op: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField { frame: self.frame, values: self.values.iter().map(|&v| op(v)).collect() }
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.same_frame(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(ScalarField { frame: self.frame, values })
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.same_frame(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(ScalarField { frame: self.frame, values })
    }

    pub fn scale(&self, a: f64) -> ScalarField {
        // `0.0 * -x` would leave negative zeros on the border.
        self.map(|v| if v == 0.0 { 0.0 } else { a * v })
    }

    /// `min(f, delta)` for a non-negative field.
    pub fn truncate(&self, delta: f64) -> Result<ScalarField> {
        if !(delta > 0.0) {
            return Err(Error::Domain(format!("truncation level {delta} must be positive")));
        }
        if self.min_value() < 0.0 {
            return Err(Error::Domain("truncation needs a non-negative field".into()));
        }
        Ok(self.map(|v| v.min(delta)))
    }

    pub fn pos_part(&self) -> ScalarField {
        self.map(|v| v.max(0.0))
    }

    pub fn neg_part(&self) -> ScalarField {
        self.map(|v| (-v).max(0.0))
    }

    /// `phi o f`, nodewise.
    pub fn compose(&self, phi: &PiecewiseLinearMap) -> Result<ScalarField> {
        let (lo, hi) = (self.min_value(), self.max_value());
        if !phi.covers(lo, hi) {
            let (a, b) = phi.domain();
            return Err(Error::Domain(format!("field range [{lo}, {hi}] leaves map domain [{a}, {b}]")));
        }
        let values = self.values.iter().map(|&v| phi.eval(v)).collect::<Result<Vec<_>>>()?;
        Ok(ScalarField { frame: self.frame, values })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sup_distance(&self, other: &ScalarField) -> Result<f64> {
        self.same_frame(other)?;
        Ok(self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Cells where `|f| > eps`, without padding.
    pub fn nonzero_region(&self, eps: f64) -> Region {
        let mask = self.values.iter().map(|v| v.abs() > eps).collect();
        Region::new(self.frame, mask, Role::Compact).expect("mask matches frame")
    }

    /// Compact superset of the support: cells with `|f| > eps`, dilated by one cell.
    pub fn support_region(&self, eps: f64) -> Result<Region> {
        if eps < 0.0 {
            return Err(Error::Domain(format!("support threshold {eps} must be non-negative")));
        }
        // Non-zero cells never sit on the border, so one cell of growth fits.
        self.nonzero_region(eps).dilate(1)
    }

    /// Nodewise `self >= other`.
    pub fn dominates(&self, other: &ScalarField) -> Result<bool> {
        self.same_frame(other)?;
        Ok(self.values.iter().zip(&other.values).all(|(a, b)| a >= b))
    }

    /// Cell-area weighted sum of the samples.
    pub fn riemann_sum(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.frame.cell_area()
    }

    /// `x,y,value` rows at cell centers.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "x,y,value")?;
        for (idx, v) in self.values.iter().enumerate() {
            let (i, j) = self.frame.coords(idx);
            let (x, y) = self.frame.center(i, j);
            writeln!(out, "{x},{y},{v}")?;
        }
        Ok(())
    }
}

/// Sup-norm distance from each cell center to the nearest center outside
/// `outer`, capped just above `cap`.
fn capped_sup_distance(outer: &Region, cap: f64) -> Vec<f64> {
    let f = outer.frame();
    let (cw, ch) = (f.cell_width(), f.cell_height());
    let (nx, ny) = (f.nx, f.ny);

    // Row pass: distance along x to the nearest outside cell in the same row.
    let mut row = vec![f64::INFINITY; f.len()];
    for j in 0..ny {
        let mut last: isize = -1;
        for i in 0..nx {
            if !outer.contains(i, j) {
                last = i as isize;
            }
            row[f.index(i, j)] = (i as isize - last) as f64 * cw;
        }
        let mut next = nx as isize;
        for i in (0..nx).rev() {
            if !outer.contains(i, j) {
                next = i as isize;
            }
            let idx = f.index(i, j);
            row[idx] = row[idx].min((next - i as isize) as f64 * cw);
        }
    }

    // Column pass: combine rows within reach of the cap with the max norm.
    let reach = (cap / ch).ceil() as isize + 1;
    let mut dist = vec![0.0; f.len()];
    for j in 0..ny as isize {
        for i in 0..nx {
            if !outer.contains(i, j as usize) {
                continue;
            }
            // Rows beyond the frame are entirely outside.
            let mut best = ((j + 1) as f64 * ch).min((ny as isize - j) as f64 * ch);
            for dj in -reach..=reach {
                let jj = j + dj;
                if jj < 0 || jj >= ny as isize {
                    continue;
                }
                let dy = dj.unsigned_abs() as f64 * ch;
                if dy >= best {
                    continue;
                }
                best = best.min(row[f.index(i, jj as usize)].max(dy));
            }
            dist[f.index(i, j as usize)] = best.min(cap + ch.max(cw));
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame() -> Frame {
        Frame::square(0.0, 10.0, 64).unwrap()
    }

    fn k_and_u() -> (Region, Region) {
        let f = frame();
        (
            Region::rect(f, 1.0, 7.0, 5.0, 7.0, Role::Compact).unwrap(),
            Region::rect(f, 0.5, 7.5, 4.5, 7.5, Role::Open).unwrap(),
        )
    }

    #[test]
    fn plateau_is_height_on_core_and_zero_off_support() {
        let (k, u) = k_and_u();
        let p = ScalarField::plateau(&k, &u, 1.0, 0.25).unwrap();
        for idx in k.cells() {
            assert_eq!(p.values()[idx], 1.0);
        }
        for idx in 0..frame().len() {
            if !u.contains_index(idx) {
                assert_eq!(p.values()[idx], 0.0);
            } else {
                assert!(p.values()[idx] > 0.0 && p.values()[idx] <= 1.0);
            }
        }
        assert_eq!(p.sup_norm(), 1.0);
        assert_eq!(p.nonzero_region(0.0).mask(), u.mask());
    }

    #[test]
    fn plateau_rejects_bad_geometry() {
        let (k, u) = k_and_u();
        let empty = Region::empty(frame(), Role::Compact);
        assert!(matches!(ScalarField::plateau(&empty, &empty, 1.0, 0.25), Err(Error::Geometry(_))));
        assert!(matches!(ScalarField::plateau(&k, &u, 1.0, 0.75), Err(Error::Geometry(_))));
        let wide = Region::rect(frame(), -1.0, 11.0, 4.0, 8.0, Role::Compact).unwrap();
        assert!(matches!(ScalarField::plateau(&k, &wide, 1.0, 0.25), Err(Error::Frame(_))));
        assert!(ScalarField::plateau(&k, &u, 0.0, 0.25).is_err());
    }

    #[test]
    fn plateau_is_linear_in_height() {
        let (k, u) = k_and_u();
        let one = ScalarField::plateau(&k, &u, 1.0, 0.25).unwrap();
        let two = ScalarField::plateau(&k, &u, 2.0, 0.25).unwrap();
        assert_eq!(two, one.scale(2.0));
    }

    #[test]
    fn plateau_levels_are_sup_norm_rings() {
        // 0.5 ramp on a 0.15625 grid: levels at 1/3.2, 2/3.2, 3/3.2 then 1.
        let (k, u) = k_and_u();
        let p = ScalarField::plateau(&k, &u, 1.0, 0.5).unwrap();
        let mut levels: Vec<f64> = p.values().to_vec();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let c = frame().cell_width();
        let expected = [0.0, c / 0.5, 2.0 * c / 0.5, 3.0 * c / 0.5, 1.0];
        assert_eq!(levels.len(), expected.len());
        for (a, b) in levels.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn adding_zero_is_identity_and_scaling_preserves_norm() {
        let (k, u) = k_and_u();
        let p = ScalarField::plateau(&k, &u, 1.5, 0.25).unwrap();
        assert_eq!(p.add(&ScalarField::zeros(frame())).unwrap(), p);
        assert_eq!(p.scale(-1.0).sup_norm(), p.sup_norm());
        assert_eq!(p.scale(-3.0).sup_norm(), 3.0 * p.sup_norm());
    }

    #[test]
    fn frame_mismatch_is_reported() {
        let other = ScalarField::zeros(Frame::square(0.0, 10.0, 32).unwrap());
        assert_eq!(ScalarField::zeros(frame()).add(&other), Err(Error::FrameMismatch));
        assert!(ScalarField::zeros(frame()).sup_distance(&other).is_err());
    }

    #[test]
    fn border_samples_are_rejected() {
        assert!(ScalarField::from_fn(frame(), |_, _| 1.0).is_err());
    }

    #[test]
    fn truncation_edge_cases() {
        let (k, u) = k_and_u();
        let p = ScalarField::plateau(&k, &u, 2.0, 0.5).unwrap();
        assert_eq!(p.truncate(2.0).unwrap(), p);
        assert_eq!(ScalarField::zeros(frame()).truncate(1.0).unwrap(), ScalarField::zeros(frame()));
        assert!(p.truncate(0.0).is_err());
        assert!(p.scale(-1.0).truncate(1.0).is_err());
        let half = p.truncate(0.5).unwrap();
        assert_eq!(half.max_value(), 0.5);
        for (a, b) in half.values().iter().zip(p.values()) {
            assert_eq!(*a, b.min(0.5));
        }
    }

    #[test]
    fn parts_recover_disjoint_plateaus() {
        let f = frame();
        let ka = Region::rect(f, 1.0, 2.0, 1.0, 2.0, Role::Compact).unwrap();
        let ua = Region::rect(f, 0.5, 2.5, 0.5, 2.5, Role::Open).unwrap();
        let kb = Region::rect(f, 6.0, 8.0, 6.0, 8.0, Role::Compact).unwrap();
        let ub = Region::rect(f, 5.5, 8.5, 5.5, 8.5, Role::Open).unwrap();
        let p = ScalarField::plateau(&ka, &ua, 1.0, 0.25).unwrap();
        let q = ScalarField::plateau(&kb, &ub, 1.0, 0.25).unwrap();
        let d = p.sub(&q).unwrap();
        assert_eq!(d.pos_part(), p);
        assert_eq!(d.neg_part(), q);
        assert_eq!(p.pos_part(), p);
        assert_eq!(p.neg_part(), ScalarField::zeros(f));
        assert_eq!(d.scale(-1.0).neg_part(), d.pos_part());
    }

    #[test]
    fn compose_identity_and_truncation() {
        let (k, u) = k_and_u();
        let p = ScalarField::plateau(&k, &u, 1.0, 0.5).unwrap();
        let id = PiecewiseLinearMap::identity(0.0, 1.0).unwrap();
        assert_eq!(p.compose(&id).unwrap(), p);
        let cap = PiecewiseLinearMap::min_with(0.5, 0.0, 1.0).unwrap();
        assert_eq!(p.compose(&cap).unwrap(), p.truncate(0.5).unwrap());
        let narrow = PiecewiseLinearMap::identity(0.0, 0.5).unwrap();
        assert!(p.compose(&narrow).is_err());
    }

    #[test]
    fn support_region_pads_by_one_cell() {
        let (k, u) = k_and_u();
        let p = ScalarField::plateau(&k, &u, 1.0, 0.25).unwrap();
        let s = p.support_region(0.0).unwrap();
        assert!(u.is_subset_of(&s));
        assert_eq!(s, u.with_role(Role::Compact).unwrap().dilate(1).unwrap());
        assert!(ScalarField::zeros(frame()).support_region(0.0).unwrap().is_empty());
    }

    #[test]
    fn tent_has_expected_riemann_sum() {
        let t = ScalarField::tent(Frame::square(0.0, 10.0, 256).unwrap(), 4.0, 4.0, 2.0, 1.0).unwrap();
        assert!((t.riemann_sum() - 16.0 / 3.0).abs() < 1e-3);
        assert!((t.sup_norm() - 1.0).abs() < 0.03);
    }
}
