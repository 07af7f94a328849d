use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{CaterpillarPolicy, GraphError, NodeId, PortGraph};

/// Renumbers the spine nodes of a caterpillar.
///
/// `spine` lists the spine in order; the agents start at its two ends. With
/// [`CaterpillarPolicy::Adversarial`] every spine node puts its leaves first,
/// then the spine edge leading away from the other agent, and gives the
/// highest port to the spine edge leading toward it. An agent probing ports in
/// ascending order therefore tries every leaf before it makes progress. The
/// middle node of an even spine treats the far end as "toward".
pub fn caterpillar_adversarial_numbering(
    g: &PortGraph,
    spine: &[NodeId],
    policy: CaterpillarPolicy,
) -> Result<PortGraph, GraphError> {
    if spine.len() < 2 {
        return Err(GraphError::InvalidParams(
            "caterpillar spine needs at least two nodes".into(),
        ));
    }
    for pair in spine.windows(2) {
        if !g.port_order(pair[0]).contains(&pair[1]) {
            return Err(GraphError::InvalidParams(format!(
                "spine nodes {} and {} are not adjacent",
                pair[0], pair[1]
            )));
        }
    }

    let last = spine.len() - 1;
    let mut rng = match policy {
        CaterpillarPolicy::Adversarial => None,
        CaterpillarPolicy::UniformRandom(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let mut order: Vec<Vec<NodeId>> = g.nodes().map(|v| g.port_order(v)).collect();
    for (i, &s) in spine.iter().enumerate() {
        let prev = i.checked_sub(1).map(|j| spine[j]);
        let next = (i < last).then(|| spine[i + 1]);
        let (toward, away) = if 2 * i <= last {
            (next, prev)
        } else {
            (prev, next)
        };
        let mut row: Vec<NodeId> = g
            .port_order(s)
            .into_iter()
            .filter(|&w| Some(w) != prev && Some(w) != next)
            .collect();
        row.sort_unstable();
        row.extend(away);
        row.extend(toward);
        if let Some(rng) = rng.as_mut() {
            row.shuffle(rng);
        }
        order[s.index()] = row;
    }
    PortGraph::from_port_order(&order)
}

#[cfg(test)]
mod tests {
    use crate::graph::{generate_caterpillar, CaterpillarPolicy};

    #[test]
    fn forward_edge_gets_top_port() {
        let c = generate_caterpillar(2, 4, CaterpillarPolicy::Adversarial).unwrap();
        let s = &c.spine;
        assert_eq!(c.graph.neighbor(s[0], 4).unwrap().0, s[1]);
        assert_eq!(c.graph.neighbor(s[1], 4).unwrap().0, s[2]);
        assert_eq!(c.graph.neighbor(s[1], 3).unwrap().0, s[0]);
        assert_eq!(c.graph.neighbor(s[2], 4).unwrap().0, s[1]);
    }

    #[test]
    fn random_policy_is_valid_and_deterministic() {
        let a = generate_caterpillar(6, 5, CaterpillarPolicy::UniformRandom(9)).unwrap();
        let b = generate_caterpillar(6, 5, CaterpillarPolicy::UniformRandom(9)).unwrap();
        assert_eq!(a.graph, b.graph);
        for &s in &a.spine {
            assert_eq!(a.graph.degree(s), 5);
        }
    }
}
