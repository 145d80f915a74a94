//! Shaking improvement on top of DBLF (Wauters et al., 2013), without
//! rotation.

use std::cmp::Ordering;

use super::{dblf, Container, PackingSolution, Placement, TaskBox};
use crate::Result;

/// Re-ordering criterion used by the shaker. Both sort descending on the top
/// face `z + d` first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SortCriterion {
    /// `z + d`, then `y + h`, then `x + w`.
    TopThenVerticalThenHorizontal,
    /// `z + d`, then `x + w`, then `y + h`.
    TopThenHorizontalThenVertical,
}

pub const DEFAULT_CRITERIA: [SortCriterion; 2] = [
    SortCriterion::TopThenVerticalThenHorizontal,
    SortCriterion::TopThenHorizontalThenVertical,
];

impl SortCriterion {
    fn cmp(self, a: &Placement, b: &Placement) -> Ordering {
        let top = b.z_end().total_cmp(&a.z_end());
        let vertical = b.y_end().cmp(&a.y_end());
        let horizontal = b.x_end().cmp(&a.x_end());
        let ord = match self {
            Self::TopThenVerticalThenHorizontal => top.then(vertical).then(horizontal),
            Self::TopThenHorizontalThenVertical => top.then(horizontal).then(vertical),
        };
        ord.then(a.item.id.cmp(&b.item.id))
    }
}

/// Boxes of `solution` ordered by `criterion`.
pub fn sort_by_criterion(solution: &PackingSolution, criterion: SortCriterion) -> Vec<TaskBox> {
    let mut placements = solution.placements.clone();
    placements.sort_by(|a, b| criterion.cmp(a, b));
    placements.into_iter().map(|p| p.item).collect()
}

/// Starting order for the shaker: descending array area, then descending
/// depth, then ascending id.
pub fn initial_order(boxes: &[TaskBox]) -> Vec<TaskBox> {
    let mut order = boxes.to_vec();
    order.sort_by(|a, b| {
        (b.w * b.h)
            .cmp(&(a.w * a.h))
            .then(b.d.total_cmp(&a.d))
            .then(a.id.cmp(&b.id))
    });
    order
}

/// Alternates forward and backward shakes for `iterations` rounds and keeps
/// the lowest packing seen. The incumbent only changes on strict improvement,
/// so the result is never higher than plain DBLF on `boxes`.
pub fn shake(
    boxes: &[TaskBox],
    criteria: &[SortCriterion],
    iterations: usize,
    container: Container,
) -> Result<PackingSolution> {
    let mut best = dblf(boxes, container)?;
    for _ in 0..iterations {
        for &c in criteria {
            let forward = dblf(&sort_by_criterion(&best, c), container)?;
            if forward.height < best.height {
                best = forward.clone();
            }
            let backward = dblf(&sort_by_criterion(&forward, c), container)?;
            if backward.height < best.height {
                best = backward;
            }
        }
    }
    Ok(best)
}

/// Coupled split-aperture resource of a task set: the height of the shaken
/// packing (criteria c1 and c2, one round) from the area-descending order.
pub fn sapa_resource(boxes: &[TaskBox], container: Container) -> Result<(f64, PackingSolution)> {
    let solution = shake(&initial_order(boxes), &DEFAULT_CRITERIA, 1, container)?;
    Ok((solution.height, solution))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const C48: Container = Container { width: 48, height: 48 };

    fn random_boxes(rng: &mut ChaCha8Rng, n: usize) -> Vec<TaskBox> {
        (0..n)
            .map(|i| TaskBox::new(i, rng.gen_range(1..=48), rng.gen_range(1..=48), rng.gen_range(0.001..0.2)))
            .collect()
    }

    #[test]
    fn initial_order_breaks_ties_by_depth_then_id() {
        let boxes = [
            TaskBox::new(0, 12, 12, 0.1),
            TaskBox::new(1, 24, 24, 0.1),
            TaskBox::new(2, 12, 12, 0.3),
            TaskBox::new(3, 12, 12, 0.1),
        ];
        let ids: Vec<_> = initial_order(&boxes).iter().map(|b| b.id).collect();
        assert_eq!(ids, vec![1, 2, 0, 3]);
    }

    #[test]
    fn criteria_order_by_top_face_first() {
        let s = dblf(
            &[TaskBox::new(0, 48, 24, 0.1), TaskBox::new(1, 24, 24, 0.1), TaskBox::new(2, 24, 24, 0.1)],
            C48,
        )
        .unwrap();
        // all tops equal: c1 prefers the higher y + h, c2 the higher x + w
        let c1: Vec<_> = sort_by_criterion(&s, SortCriterion::TopThenVerticalThenHorizontal)
            .iter()
            .map(|b| b.id)
            .collect();
        let c2: Vec<_> = sort_by_criterion(&s, SortCriterion::TopThenHorizontalThenVertical)
            .iter()
            .map(|b| b.id)
            .collect();
        assert_eq!(c1, vec![2, 1, 0]);
        assert_eq!(c2, vec![2, 0, 1]);
    }

    #[test]
    fn single_box_shake_equals_dblf() {
        let b = [TaskBox::new(0, 30, 20, 0.07)];
        for criteria in [&DEFAULT_CRITERIA[..1], &DEFAULT_CRITERIA[1..], &DEFAULT_CRITERIA[..]] {
            assert_eq!(shake(&b, criteria, 3, C48).unwrap(), dblf(&b, C48).unwrap());
        }
    }

    #[test]
    fn optimal_start_is_kept() {
        let boxes: Vec<_> = (0..4).map(|i| TaskBox::new(i, 24, 24, 0.05)).collect();
        let s = shake(&boxes, &DEFAULT_CRITERIA, 1, C48).unwrap();
        assert_eq!(s, dblf(&boxes, C48).unwrap());
        assert_eq!(s.height, 0.05);
    }

    #[test]
    fn shake_never_loses_to_dblf_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let boxes = random_boxes(&mut rng, 10);
            let plain = dblf(&boxes, C48).unwrap();
            let shaken = shake(&boxes, &DEFAULT_CRITERIA, 1, C48).unwrap();
            assert!(shaken.height <= plain.height);
            assert!(shaken.is_valid(C48));
        }
    }

    #[test]
    fn sapa_resource_examples() {
        let (g, _) = sapa_resource(&[TaskBox::new(0, 48, 48, 0.128)], C48).unwrap();
        assert_eq!(g, 0.128);
        let quarters: Vec<_> = (0..4).map(|i| TaskBox::new(i, 24, 24, 0.02)).collect();
        assert_eq!(sapa_resource(&quarters, C48).unwrap().0, 0.02);
    }

    proptest! {
        #[test]
        fn shaking_dominates_and_is_deterministic(seed in any::<u64>(), n in 1usize..20) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let boxes = random_boxes(&mut rng, n);
            let a = shake(&boxes, &DEFAULT_CRITERIA, 2, C48).unwrap();
            let b = shake(&boxes, &DEFAULT_CRITERIA, 2, C48).unwrap();
            prop_assert!(a.height <= dblf(&boxes, C48).unwrap().height);
            prop_assert!(a.is_valid(C48));
            prop_assert_eq!(a, b);
        }
    }
}
