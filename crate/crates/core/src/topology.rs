//! Digital topology on cell sets.
//!
//! Cell sets are sorted lists of flat cell indices. Work is done on a local
//! patch covering the set's bounding box, so evaluating many small sets on a
//! large frame stays cheap.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::frame::Frame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Connectivity {
    /// N, S, E and W neighbors.
    Four,
    /// All eight neighbors.
    Eight,
}

impl Connectivity {
    /// The connectivity used for complements.
    pub fn dual(self) -> Self {
        match self {
            Connectivity::Four => Connectivity::Eight,
            Connectivity::Eight => Connectivity::Four,
        }
    }

    fn offsets(self) -> &'static [(isize, isize)] {
        const FOUR: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
        const EIGHT: [(isize, isize); 8] =
            [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

/// Rectangular window onto the frame, possibly reaching one cell past the edge.
struct Patch {
    i0: isize,
    j0: isize,
    w: usize,
    h: usize,
    bits: Vec<bool>,
}

impl Patch {
    fn around(frame: &Frame, cells: &[usize], margin: isize) -> Self {
        let (mut i_lo, mut j_lo) = (usize::MAX, usize::MAX);
        let (mut i_hi, mut j_hi) = (0usize, 0usize);
        for &c in cells {
            let (i, j) = frame.coords(c);
            i_lo = i_lo.min(i);
            j_lo = j_lo.min(j);
            i_hi = i_hi.max(i);
            j_hi = j_hi.max(j);
        }
        let i0 = i_lo as isize - margin;
        let j0 = j_lo as isize - margin;
        let w = (i_hi - i_lo) + 1 + 2 * margin as usize;
        let h = (j_hi - j_lo) + 1 + 2 * margin as usize;
        let mut patch = Patch { i0, j0, w, h, bits: vec![false; w * h] };
        for &c in cells {
            let (i, j) = frame.coords(c);
            let li = (i as isize - i0) as usize;
            let lj = (j as isize - j0) as usize;
            patch.bits[lj * w + li] = true;
        }
        patch
    }

    #[inline]
    fn to_frame(&self, frame: &Frame, local: usize) -> Option<usize> {
        let i = self.i0 + (local % self.w) as isize;
        let j = self.j0 + (local / self.w) as isize;
        if i < 0 || j < 0 || i as usize >= frame.nx || j as usize >= frame.ny {
            None
        } else {
            Some(frame.index(i as usize, j as usize))
        }
    }

    /// Flood from `seeds` through cells whose bit equals `value`.
    fn flood(&self, seeds: &[usize], value: bool, conn: Connectivity, seen: &mut [bool]) -> Vec<usize> {
        let mut out = Vec::new();
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &s in seeds {
            if self.bits[s] == value && !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(cur) = queue.pop_front() {
            out.push(cur);
            let ci = (cur % self.w) as isize;
            let cj = (cur / self.w) as isize;
            for &(di, dj) in conn.offsets() {
                let ni = ci + di;
                let nj = cj + dj;
                if ni < 0 || nj < 0 || ni as usize >= self.w || nj as usize >= self.h {
                    continue;
                }
                let n = nj as usize * self.w + ni as usize;
                if !seen[n] && self.bits[n] == value {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        out
    }

    fn ring(&self) -> Vec<usize> {
        let mut ring = Vec::with_capacity(2 * (self.w + self.h));
        for li in 0..self.w {
            ring.push(li);
            ring.push((self.h - 1) * self.w + li);
        }
        for lj in 1..self.h.saturating_sub(1) {
            ring.push(lj * self.w);
            ring.push(lj * self.w + self.w - 1);
        }
        ring
    }

    fn collect(&self, frame: &Frame, locals: Vec<usize>) -> Vec<usize> {
        let mut cells: Vec<usize> = locals.into_iter().filter_map(|l| self.to_frame(frame, l)).collect();
        cells.sort_unstable();
        cells
    }
}

/// Connected components of a sorted cell set.
pub(crate) fn components(frame: &Frame, cells: &[usize], conn: Connectivity) -> Vec<Vec<usize>> {
    if cells.is_empty() {
        return Vec::new();
    }
    let patch = Patch::around(frame, cells, 0);
    let mut seen = vec![false; patch.bits.len()];
    let mut out = Vec::new();
    for start in 0..patch.bits.len() {
        if patch.bits[start] && !seen[start] {
            let comp = patch.flood(&[start], true, conn, &mut seen);
            out.push(patch.collect(frame, comp));
        }
    }
    out
}

/// Bounded components of the complement of a single component.
///
/// `conn` is the connectivity of the component itself; the complement is
/// traversed with the dual. Anything reachable from outside the bounding box
/// is unbounded.
pub(crate) fn holes_of_component(frame: &Frame, comp: &[usize], conn: Connectivity) -> Vec<Vec<usize>> {
    if comp.is_empty() {
        return Vec::new();
    }
    let patch = Patch::around(frame, comp, 1);
    let dual = conn.dual();
    let mut seen = vec![false; patch.bits.len()];
    patch.flood(&patch.ring(), false, dual, &mut seen);
    let mut out = Vec::new();
    for start in 0..patch.bits.len() {
        if !patch.bits[start] && !seen[start] {
            let hole = patch.flood(&[start], false, dual, &mut seen);
            out.push(patch.collect(frame, hole));
        }
    }
    out
}

/// Bounded complement components of an arbitrary set, relative to the frame
/// border.
pub(crate) fn holes_of_set(frame: &Frame, mask: &[bool], conn: Connectivity) -> Vec<Vec<usize>> {
    let dual = conn.dual();
    let mut seen = vec![false; mask.len()];
    let mut queue = VecDeque::new();
    for idx in 0..mask.len() {
        let (i, j) = frame.coords(idx);
        if frame.is_border(i, j) && !mask[idx] {
            seen[idx] = true;
            queue.push_back(idx);
        }
    }
    flood_frame(frame, mask, false, dual, &mut seen, &mut queue);
    let mut out = Vec::new();
    for idx in 0..mask.len() {
        if !mask[idx] && !seen[idx] {
            seen[idx] = true;
            queue.push_back(idx);
            let mut hole = flood_frame(frame, mask, false, dual, &mut seen, &mut queue);
            hole.sort_unstable();
            out.push(hole);
        }
    }
    out
}

fn flood_frame(
    frame: &Frame,
    mask: &[bool],
    value: bool,
    conn: Connectivity,
    seen: &mut [bool],
    queue: &mut VecDeque<usize>,
) -> Vec<usize> {
    let mut out = Vec::new();
    while let Some(cur) = queue.pop_front() {
        out.push(cur);
        let (ci, cj) = frame.coords(cur);
        for &(di, dj) in conn.offsets() {
            let ni = ci as isize + di;
            let nj = cj as isize + dj;
            if ni < 0 || nj < 0 || ni as usize >= frame.nx || nj as usize >= frame.ny {
                continue;
            }
            let n = frame.index(ni as usize, nj as usize);
            if !seen[n] && mask[n] == value {
                seen[n] = true;
                queue.push_back(n);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame() -> Frame {
        Frame::square(0.0, 1.0, 10).unwrap()
    }

    fn cells(f: &Frame, pts: &[(usize, usize)]) -> Vec<usize> {
        let mut v: Vec<usize> = pts.iter().map(|&(i, j)| f.index(i, j)).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn diagonal_pair_splits_under_four_only() {
        let f = frame();
        let set = cells(&f, &[(2, 2), (3, 3)]);
        assert_eq!(components(&f, &set, Connectivity::Four).len(), 2);
        assert_eq!(components(&f, &set, Connectivity::Eight).len(), 1);
    }

    #[test]
    fn ring_has_one_hole() {
        let f = frame();
        let mut pts = Vec::new();
        for i in 2..=6 {
            for j in 2..=6 {
                if i == 2 || i == 6 || j == 2 || j == 6 {
                    pts.push((i, j));
                }
            }
        }
        let set = cells(&f, &pts);
        let holes = holes_of_component(&f, &set, Connectivity::Four);
        assert_eq!(holes.len(), 1);
        assert_eq!(holes[0].len(), 9);
    }

    #[test]
    fn diagonal_gap_leaks_under_eight_connected_complement() {
        // A 4-connected ring with a notch at a corner: the complement slips out
        // through the corner only under 8-connectivity.
        let f = frame();
        let mut pts = Vec::new();
        for i in 2..=6 {
            for j in 2..=6 {
                if (i == 2 || i == 6 || j == 2 || j == 6) && (i, j) != (6, 6) {
                    pts.push((i, j));
                }
            }
        }
        let set = cells(&f, &pts);
        assert!(holes_of_component(&f, &set, Connectivity::Four).is_empty());
    }
}
