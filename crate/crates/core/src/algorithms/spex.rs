use crate::cuts::{CutScorer, SplitCriterion};
use crate::graph::{GraphHandle, SweepState};

/// `CutScore = psi_G(S) + psi_G(X' \ S)` and `leaf_quality = psi_G(X')`,
/// all conductances taken against the whole graph.
#[derive(Debug, Clone, Copy)]
pub struct SpexCriterion<'g> {
    graph: &'g GraphHandle,
}

impl<'g> SpexCriterion<'g> {
    pub fn new(graph: &'g GraphHandle) -> Self {
        Self { graph }
    }

    pub fn graph(&self) -> &'g GraphHandle {
        self.graph
    }
}

pub struct SpexScorer<'g> {
    state: SweepState<'g>,
}

impl CutScorer for SpexScorer<'_> {
    fn reset(&mut self, sorted_points: &[usize]) {
        self.state.reset(sorted_points);
    }

    fn advance(&mut self, group: &[usize]) {
        for &x in group {
            self.state.advance(x);
        }
    }

    fn score(&self) -> f64 {
        self.state.conductance_split_score()
    }
}

impl<'g> SplitCriterion for SpexCriterion<'g> {
    type Scorer = SpexScorer<'g>;

    fn scorer(&self) -> SpexScorer<'g> {
        SpexScorer {
            state: SweepState::new(self.graph),
        }
    }

    fn leaf_quality(&self, points: &[usize]) -> f64 {
        let mut state = SweepState::new(self.graph);
        state.reset(points);
        state.suffix_measures().psi
    }
}
