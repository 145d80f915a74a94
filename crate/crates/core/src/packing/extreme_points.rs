use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{Container, PackingSolution, Placement, Z_EPS};

/// Candidate position for the minimum corner of a box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub x: u32,
    pub y: u32,
    pub z: f64,
}

impl Gap {
    pub const ORIGIN: Gap = Gap { x: 0, y: 0, z: 0.0 };

    /// Deepest-bottom-left order: `z`, then `y`, then `x`.
    fn dblf_cmp(&self, other: &Gap) -> Ordering {
        self.z
            .total_cmp(&other.z)
            .then(self.y.cmp(&other.y))
            .then(self.x.cmp(&other.x))
    }

    fn same_as(&self, other: &Gap) -> bool {
        self.x == other.x && self.y == other.y && (self.z - other.z).abs() <= Z_EPS
    }
}

/// Extreme points of a growing packing, kept in DBLF order.
#[derive(Debug, Clone)]
pub(crate) struct GapSet {
    container: Container,
    gaps: Vec<Gap>,
}

impl GapSet {
    pub(crate) fn new(container: Container) -> Self {
        Self {
            container,
            gaps: vec![Gap::ORIGIN],
        }
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = Gap> + '_ {
        self.gaps.iter().copied()
    }

    fn add(&mut self, g: Gap, solution: &PackingSolution) {
        if g.x >= self.container.width || g.y >= self.container.height {
            return;
        }
        if solution.placements.iter().any(|p| p.contains_point(g.x, g.y, g.z)) {
            return;
        }
        if self.gaps.iter().any(|e| e.same_as(&g)) {
            return;
        }
        let at = self.gaps.partition_point(|e| e.dblf_cmp(&g) == Ordering::Less);
        self.gaps.insert(at, g);
    }

    /// Updates the set after `placed` (already the last entry of `solution`)
    /// was added: drops points it now covers and adds the projections of its
    /// three outer corners along the two axes orthogonal to each offset.
    pub(crate) fn insert_box(&mut self, placed: &Placement, solution: &PackingSolution) {
        self.gaps.retain(|g| !placed.contains_point(g.x, g.y, g.z));

        let others = &solution.placements[..solution.placements.len() - 1];
        let (x, y, z) = (placed.x, placed.y, placed.z);
        let (xe, ye, ze) = (placed.x_end(), placed.y_end(), placed.z_end());

        let candidates = [
            Gap { x: xe, y: project_y(others, xe, y, z), z },
            Gap { x: xe, y, z: project_z(others, xe, y, z) },
            Gap { x: project_x(others, ye, z, x), y: ye, z },
            Gap { x, y: ye, z: project_z(others, x, ye, z) },
            Gap { x: project_x(others, y, ze, x), y, z: ze },
            Gap { x, y: project_y(others, x, y, ze), z: ze },
            Gap { x: 0, y: 0, z: solution.height },
        ];
        for g in candidates {
            self.add(g, solution);
        }
    }
}

fn spans_z(p: &Placement, z: f64) -> bool {
    p.z - Z_EPS <= z && z < p.z_end() - Z_EPS
}

/// Slides `(x_from, y, z)` towards `x = 0` until it meets a box face.
fn project_x(placed: &[Placement], y: u32, z: f64, x_from: u32) -> u32 {
    placed
        .iter()
        .filter(|p| p.y <= y && y < p.y_end() && spans_z(p, z) && p.x_end() <= x_from)
        .map(Placement::x_end)
        .max()
        .unwrap_or(0)
}

/// Slides `(x, y_from, z)` towards `y = 0`.
fn project_y(placed: &[Placement], x: u32, y_from: u32, z: f64) -> u32 {
    placed
        .iter()
        .filter(|p| p.x <= x && x < p.x_end() && spans_z(p, z) && p.y_end() <= y_from)
        .map(Placement::y_end)
        .max()
        .unwrap_or(0)
}

/// Slides `(x, y, z_from)` towards `z = 0`.
fn project_z(placed: &[Placement], x: u32, y: u32, z_from: f64) -> f64 {
    placed
        .iter()
        .filter(|p| p.x <= x && x < p.x_end() && p.y <= y && y < p.y_end() && p.z_end() <= z_from + Z_EPS)
        .map(Placement::z_end)
        .fold(0.0, f64::max)
}

/// Candidate positions of the packing in DBLF order.
///
/// The set is rebuilt by replaying the placements in insertion order, so it
/// matches what [`dblf`](super::dblf) would consider for the next box. An empty
/// packing yields only the origin.
pub fn get_all_gaps(solution: &PackingSolution, container: Container) -> Vec<Gap> {
    let mut gaps = GapSet::new(container);
    let mut prefix = PackingSolution::default();
    for p in &solution.placements {
        prefix.push(*p);
        gaps.insert_box(p, &prefix);
    }
    gaps.gaps
}

#[cfg(test)]
mod tests {
    use super::super::{dblf, fits, TaskBox};
    use super::*;

    const C48: Container = Container { width: 48, height: 48 };

    #[test]
    fn empty_packing_has_origin_only() {
        assert_eq!(get_all_gaps(&PackingSolution::default(), C48), vec![Gap::ORIGIN]);
    }

    #[test]
    fn single_box_corners() {
        let s = dblf(&[TaskBox::new(0, 10, 20, 0.3)], C48).unwrap();
        let gaps = get_all_gaps(&s, C48);
        for want in [
            Gap { x: 10, y: 0, z: 0.0 },
            Gap { x: 0, y: 20, z: 0.0 },
            Gap { x: 0, y: 0, z: 0.3 },
        ] {
            assert!(gaps.iter().any(|g| g.same_as(&want)), "{want:?} missing from {gaps:?}");
        }
        assert!(!gaps.iter().any(|g| g.same_as(&Gap::ORIGIN)));
    }

    /// For this two-box layout the extreme points admit every probe box that an
    /// exhaustive scan of integer positions at `z = 0` admits.
    #[test]
    fn gaps_admit_every_box_the_grid_admits_at_layer_zero() {
        let boxes = [TaskBox::new(0, 12, 36, 0.2), TaskBox::new(1, 20, 10, 0.1)];
        let s = dblf(&boxes, C48).unwrap();
        let gaps = get_all_gaps(&s, C48);
        for w in [1, 6, 12, 16, 28] {
            for h in [1, 6, 12, 38] {
                let probe = TaskBox::new(9, w, h, 0.05);
                let grid_fit = (0..48).any(|y| (0..48).any(|x| fits(&probe, Gap { x, y, z: 0.0 }, &s, C48)));
                let ep_fit = gaps.iter().any(|&g| g.z == 0.0 && fits(&probe, g, &s, C48));
                assert_eq!(grid_fit, ep_fit, "probe {w}x{h}: grid {grid_fit} vs ep {ep_fit}");
            }
        }
    }

    #[test]
    fn stacked_boxes_list_deepest_first() {
        let s = dblf(&[TaskBox::new(0, 48, 48, 0.1), TaskBox::new(1, 48, 48, 0.2)], C48).unwrap();
        let gaps = get_all_gaps(&s, C48);
        assert!(gaps.windows(2).all(|w| w[0].dblf_cmp(&w[1]) != Ordering::Greater));
        assert!((gaps[0].z - 0.3).abs() < 1e-15);
    }
}
