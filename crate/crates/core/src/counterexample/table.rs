use serde::Serialize;

use super::{Ball, BallTag, CounterexampleSpec};

/// Ordered ball pairs `(A, B)` with `A` holding `xi` and `B` holding
/// `xi^k - xi`, for which the two supports meet in a set of positive area.
#[derive(Clone, Debug, Serialize)]
pub struct InteractionTable {
    pub k: i32,
    pub target: [f64; 2],
    pub pairs: Vec<(BallTag, BallTag)>,
}

impl InteractionTable {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub(crate) fn overlaps(a: &Ball, b: &Ball, target: [f64; 2]) -> bool {
    let d = (a.center[0] + b.center[0] - target[0]).hypot(a.center[1] + b.center[1] - target[1]);
    d < a.radius + b.radius
}

/// Enumerates every pair of construction balls whose Minkowski sum reaches `xi^k`.
pub fn interaction_table(k: i32, spec: &CounterexampleSpec) -> InteractionTable {
    let target = spec.xi(k);
    let balls = spec.balls();
    let mut pairs = Vec::new();
    for a in &balls {
        for b in &balls {
            if overlaps(a, b, target) {
                pairs.push((a.tag, b.tag));
            }
        }
    }
    pairs.sort();
    InteractionTable { k, target, pairs }
}
