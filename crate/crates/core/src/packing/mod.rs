//! 3D strip packing of task boxes on the array–time volume.
//!
//! Each task occupies an `n_h × n_v` block of elements for a fraction `g` of
//! the radar time. Boxes are packed into a container with a fixed `N_hT × N_vT`
//! cross-section and unbounded depth; the packed height is the radar time the
//! task set needs.
//!
//! Placement follows deepest-bottom-left-fill (smallest `z`, then `y`, then
//! `x`) over extreme points in the sense of Crainic, Perboli & Tadei (2008):
//! every placed box contributes the projections of three of its corners onto
//! the boxes already placed (or the container walls). `x` and `y` are integer
//! element offsets; `z` is a continuous time fraction.

mod extreme_points;
mod shake;

use serde::{Deserialize, Serialize};

pub use extreme_points::{get_all_gaps, Gap};
pub use shake::{initial_order, sapa_resource, shake, sort_by_criterion, SortCriterion, DEFAULT_CRITERIA};

use crate::{Error, Result};

/// Absolute tolerance on depth coordinates.
pub const Z_EPS: f64 = 1e-12;

/// A task block: `w` horizontal elements, `h` vertical elements, depth `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskBox {
    pub id: usize,
    pub w: u32,
    pub h: u32,
    pub d: f64,
}

impl TaskBox {
    pub fn new(id: usize, w: u32, h: u32, d: f64) -> Self {
        Self { id, w, h, d }
    }

    pub fn volume(&self) -> f64 {
        self.w as f64 * self.h as f64 * self.d
    }
}

/// Cross-section of the array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Container {
    pub width: u32,
    pub height: u32,
}

impl Container {
    pub fn new(width: u32, height: u32) -> Self {
        Self { width, height }
    }

    pub fn area(&self) -> f64 {
        self.width as f64 * self.height as f64
    }

    fn admits(&self, b: &TaskBox) -> Result<()> {
        if b.w == 0 || b.h == 0 || b.w > self.width || b.h > self.height {
            return Err(Error::BoxTooLarge {
                id: b.id,
                w: b.w,
                h: b.h,
                width: self.width,
                height: self.height,
            });
        }
        Ok(())
    }
}

/// A box at offset `(x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    #[serde(flatten)]
    pub item: TaskBox,
    pub x: u32,
    pub y: u32,
    pub z: f64,
}

impl Placement {
    pub fn x_end(&self) -> u32 {
        self.x + self.item.w
    }

    pub fn y_end(&self) -> u32 {
        self.y + self.item.h
    }

    pub fn z_end(&self) -> f64 {
        self.z + self.item.d
    }

    /// True when the two boxes share a region of positive volume.
    pub fn overlaps(&self, other: &Placement) -> bool {
        self.x < other.x_end()
            && other.x < self.x_end()
            && self.y < other.y_end()
            && other.y < self.y_end()
            && self.z < other.z_end() - Z_EPS
            && other.z < self.z_end() - Z_EPS
    }

    fn contains_point(&self, x: u32, y: u32, z: f64) -> bool {
        self.x <= x
            && x < self.x_end()
            && self.y <= y
            && y < self.y_end()
            && self.z - Z_EPS <= z
            && z < self.z_end() - Z_EPS
    }
}

/// Placements in insertion order together with the achieved height.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PackingSolution {
    pub placements: Vec<Placement>,
    pub height: f64,
}

impl PackingSolution {
    pub fn push(&mut self, p: Placement) {
        self.height = self.height.max(p.z_end());
        self.placements.push(p);
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    /// Sum of box volumes divided by the cross-section: no packing can be
    /// lower than this.
    pub fn volume_bound(boxes: &[TaskBox], container: Container) -> f64 {
        boxes.iter().map(TaskBox::volume).sum::<f64>() / container.area()
    }

    /// Checks that every box lies in the cross-section and no two overlap.
    pub fn is_valid(&self, container: Container) -> bool {
        let inside = self
            .placements
            .iter()
            .all(|p| p.x_end() <= container.width && p.y_end() <= container.height && p.z >= 0.0);
        let disjoint = self
            .placements
            .iter()
            .enumerate()
            .all(|(i, a)| self.placements[i + 1..].iter().all(|b| !a.overlaps(b)));
        inside && disjoint
    }

    /// Height of the packing restricted to the boxes `keep` accepts, with
    /// every box left where it is.
    pub fn height_of<F: Fn(usize) -> bool>(&self, keep: F) -> f64 {
        self.placements
            .iter()
            .filter(|p| keep(p.item.id))
            .map(Placement::z_end)
            .fold(0.0, f64::max)
    }

    /// JSON dump for external visualization: `[{id, x, y, z, w, h, d}, …]`.
    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(&self.placements)
    }
}

/// True iff `item` placed at `gap` stays inside the cross-section and
/// intersects no placed box with positive volume.
pub fn fits(item: &TaskBox, gap: Gap, solution: &PackingSolution, container: Container) -> bool {
    if gap.x + item.w > container.width || gap.y + item.h > container.height || gap.z < 0.0 {
        return false;
    }
    let candidate = Placement {
        item: *item,
        x: gap.x,
        y: gap.y,
        z: gap.z,
    };
    !solution.placements.iter().any(|p| p.overlaps(&candidate))
}

/// Deepest-bottom-left-fill: places each box, in the given order, at the
/// first extreme point where it fits.
pub fn dblf(ordered: &[TaskBox], container: Container) -> Result<PackingSolution> {
    for b in ordered {
        container.admits(b)?;
    }
    let mut solution = PackingSolution::default();
    let mut gaps = extreme_points::GapSet::new(container);
    for item in ordered {
        let gap = gaps
            .iter()
            .find(|&g| fits(item, g, &solution, container))
            .unwrap_or(Gap {
                x: 0,
                y: 0,
                z: solution.height,
            });
        let placement = Placement {
            item: *item,
            x: gap.x,
            y: gap.y,
            z: gap.z,
        };
        solution.push(placement);
        gaps.insert_box(&placement, &solution);
    }
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const C48: Container = Container { width: 48, height: 48 };

    #[test]
    fn fits_examples() {
        let empty = PackingSolution::default();
        let full = TaskBox::new(0, 48, 48, 0.1);
        assert!(fits(&full, Gap::ORIGIN, &empty, C48));

        let b = TaskBox::new(1, 25, 25, 0.1);
        assert!(!fits(&b, Gap { x: 24, y: 0, z: 0.0 }, &empty, C48));

        let placed = dblf(&[b], C48).unwrap();
        let twin = TaskBox::new(2, 25, 25, 0.1);
        assert!(!fits(&twin, Gap::ORIGIN, &placed, C48));
        // touching faces are fine
        assert!(fits(&twin, Gap { x: 0, y: 0, z: 0.1 }, &placed, C48));
    }

    #[test]
    fn single_box_goes_to_origin() {
        let s = dblf(&[TaskBox::new(0, 12, 30, 0.3)], C48).unwrap();
        assert_eq!(s.placements[0].x, 0);
        assert_eq!(s.placements[0].y, 0);
        assert_eq!(s.placements[0].z, 0.0);
        assert_eq!(s.height, 0.3);
    }

    #[test]
    fn full_cross_section_boxes_stack() {
        let s = dblf(&[TaskBox::new(0, 48, 48, 0.1), TaskBox::new(1, 48, 48, 0.25)], C48).unwrap();
        assert_eq!(s.placements[1].z, 0.1);
        assert!((s.height - 0.35).abs() < 1e-15);
    }

    #[test]
    fn four_quarters_share_a_layer() {
        let boxes: Vec<_> = (0..4).map(|i| TaskBox::new(i, 24, 24, 0.05)).collect();
        let s = dblf(&boxes, C48).unwrap();
        assert!(s.placements.iter().all(|p| p.z == 0.0));
        assert_eq!(s.height, 0.05);
    }

    #[test]
    fn oversized_box_is_rejected() {
        let err = dblf(&[TaskBox::new(3, 49, 10, 0.1)], C48).unwrap_err();
        assert!(matches!(err, Error::BoxTooLarge { id: 3, .. }));
    }

    #[test]
    fn reduced_height_keeps_positions() {
        let boxes = [TaskBox::new(0, 48, 48, 0.1), TaskBox::new(1, 48, 48, 0.2)];
        let s = dblf(&boxes, C48).unwrap();
        assert_eq!(s.height_of(|id| id == 0), 0.1);
        assert!((s.height_of(|id| id == 1) - 0.3).abs() < 1e-15);
        assert_eq!(s.height_of(|_| false), 0.0);
    }

    #[test]
    fn json_dump_has_flat_fields() {
        let s = dblf(&[TaskBox::new(7, 12, 6, 0.01)], C48).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s.to_json().unwrap()).unwrap();
        let first = &v[0];
        for key in ["id", "x", "y", "z", "w", "h", "d"] {
            assert!(first.get(key).is_some(), "missing {key}");
        }
        assert_eq!(first["id"], 7);
    }

    fn arb_boxes() -> impl Strategy<Value = Vec<TaskBox>> {
        prop::collection::vec((1u32..=48, 1u32..=48, 0.001..0.2f64), 1..25).prop_map(|v| {
            v.into_iter()
                .enumerate()
                .map(|(i, (w, h, d))| TaskBox::new(i, w, h, d))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn dblf_is_valid_and_above_volume_bound(boxes in arb_boxes()) {
            let s = dblf(&boxes, C48).unwrap();
            prop_assert_eq!(s.len(), boxes.len());
            prop_assert!(s.is_valid(C48));
            prop_assert!(s.height >= PackingSolution::volume_bound(&boxes, C48) - 1e-12);
            let top = s.placements.iter().map(Placement::z_end).fold(0.0, f64::max);
            prop_assert_eq!(s.height, top);
        }

        #[test]
        fn dblf_is_deterministic(boxes in arb_boxes()) {
            prop_assert_eq!(dblf(&boxes, C48).unwrap(), dblf(&boxes, C48).unwrap());
        }
    }
}
