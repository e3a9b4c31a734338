use crate::error::{Error, InfeasibleReason, Result};
use crate::model::{
    bfs_levels, reverse_bfs_levels, DiffusionGraph, Edge, Levels, NodeId, ObservationMode,
    PartialObservation,
};

/// The part of the graph that can appear in some perfect consistent tree.
///
/// A node survives if, for some observed `(v_i, t_i)`, it lies on a walk
/// `source ⇝ node ⇝ v_i` of at most `t_i` hops. On top of that distance rule
/// the backbone records, per level `k`, which nodes can sit at depth `k`: they
/// need a walk of exactly `k` hops from the source and one of exactly
/// `t_i - k` hops to some observed `v_i`, both inside the backbone.
#[derive(Clone, Debug)]
pub struct Backbone {
    source: NodeId,
    t_max: u32,
    member: Vec<bool>,
    from_source: Levels,
    to_observed: Vec<(NodeId, u32, Levels)>,
    layers: Vec<Vec<bool>>,
}

impl Backbone {
    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn t_max(&self) -> u32 {
        self.t_max
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.member.get(v.index()).copied().unwrap_or(false)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.member
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| NodeId::from(i))
    }

    pub fn node_count(&self) -> usize {
        self.member.iter().filter(|&&m| m).count()
    }

    /// Edges of `g` with both ends in the backbone.
    pub fn edges<'g>(&'g self, g: &'g DiffusionGraph) -> impl Iterator<Item = &'g Edge> + 'g {
        g.edges()
            .iter()
            .filter(move |e| self.contains(e.src) && self.contains(e.dst))
    }

    pub fn dist_from_source(&self, v: NodeId) -> Option<u32> {
        self.from_source.get(v)
    }

    /// Hop distance from `v` to the observed node `target`, if within its time.
    pub fn dist_to(&self, v: NodeId, target: NodeId) -> Option<u32> {
        self.to_observed
            .iter()
            .find(|(o, _, _)| *o == target)
            .and_then(|(_, _, l)| l.get(v))
    }

    /// Whether `v` can sit at depth `level` of a perfect consistent tree.
    pub fn in_layer(&self, v: NodeId, level: u32) -> bool {
        self.layers
            .get(level as usize)
            .is_some_and(|l| l[v.index()])
    }
}

/// Prunes `g` down to the backbone of an "exact" observation.
pub fn build_backbone(g: &DiffusionGraph, x: &PartialObservation) -> Result<Backbone> {
    x.require_mode(ObservationMode::Exact, "perfect inference")?;
    x.check_in_graph(g)?;
    let n = g.node_count();
    let s = x.source();
    let t_max = x.t_max();
    let from_source = bfs_levels(g, s, Some(t_max))?;
    let observed = x.by_time();

    for &(v, t) in &observed {
        match from_source.get(v) {
            Some(d) if d <= t => {}
            Some(d) => return Err(Error::infeasible(v, t, InfeasibleReason::TooFar { dist: d })),
            None => {
                let reason = match bfs_levels(g, s, None)?.get(v) {
                    Some(d) => InfeasibleReason::TooFar { dist: d },
                    None => InfeasibleReason::Unreachable,
                };
                return Err(Error::infeasible(v, t, reason));
            }
        }
    }

    let mut member = vec![false; n];
    let mut to_observed = Vec::with_capacity(observed.len());
    for &(v, t) in &observed {
        let back = reverse_bfs_levels(g, v, Some(t))?;
        for (u, d) in back.iter() {
            if from_source.get(u).is_some_and(|ds| ds + d <= t) {
                member[u.index()] = true;
            }
        }
        to_observed.push((v, t, back));
    }

    // Exact-length reachability, forwards from the source and backwards from
    // the observations, restricted to backbone nodes.
    let levels = t_max as usize + 1;
    let mut forward = vec![vec![false; n]; levels];
    forward[0][s.index()] = true;
    for k in 1..levels {
        let (done, rest) = forward.split_at_mut(k);
        for u in g.nodes().filter(|u| done[k - 1][u.index()]) {
            for e in g.out_edges(u) {
                if member[e.dst.index()] {
                    rest[0][e.dst.index()] = true;
                }
            }
        }
    }
    let mut backward = vec![vec![false; n]; levels];
    for k in (0..levels).rev() {
        for &(v, t) in &observed {
            if t as usize == k {
                backward[k][v.index()] = true;
            }
        }
        if k + 1 < levels {
            let (head, tail) = backward.split_at_mut(k + 1);
            for w in g.nodes().filter(|w| tail[0][w.index()]) {
                for e in g.in_edges(w) {
                    if member[e.src.index()] {
                        head[k][e.src.index()] = true;
                    }
                }
            }
        }
    }
    let layers: Vec<Vec<bool>> = forward
        .iter()
        .zip(&backward)
        .map(|(f, b)| f.iter().zip(b).map(|(&f, &b)| f && b).collect())
        .collect();

    for &(v, t) in &observed {
        if !layers[t as usize][v.index()] {
            return Err(Error::infeasible(v, t, InfeasibleReason::NoExactLengthWalk));
        }
    }

    Ok(Backbone {
        source: s,
        t_max,
        member,
        from_source,
        to_observed,
        layers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::{self, node};

    fn exact(g: &DiffusionGraph, pts: &[(&str, u32)]) -> PartialObservation {
        PartialObservation::new(
            node(g, pts[0].0),
            pts.iter().map(|&(l, t)| (node(g, l), t)),
            ObservationMode::Exact,
        )
        .unwrap()
    }

    #[test]
    fn source_only_backbone() {
        let g = samples::g1();
        let bb = build_backbone(&g, &exact(&g, &[("s", 0)])).unwrap();
        assert_eq!(bb.nodes().collect::<Vec<_>>(), vec![node(&g, "s")]);
    }

    #[test]
    fn g1_keeps_everything() {
        let g = samples::g1();
        let bb = build_backbone(&g, &exact(&g, &[("s", 0), ("c", 2)])).unwrap();
        assert_eq!(bb.node_count(), 4);
        assert_eq!(bb.edges(&g).count(), 4);
        assert!(bb.in_layer(node(&g, "a"), 1));
        assert!(!bb.in_layer(node(&g, "a"), 2));
        assert_eq!(bb.dist_to(node(&g, "s"), node(&g, "c")), Some(2));
    }

    #[test]
    fn g1_too_early() {
        let g = samples::g1();
        let err = build_backbone(&g, &exact(&g, &[("s", 0), ("c", 1)])).unwrap_err();
        assert!(matches!(
            err,
            Error::Infeasible(ref i) if i.reason == InfeasibleReason::TooFar { dist: 2 }
        ));
    }

    #[test]
    fn parity_gap_is_caught() {
        // s→a→b plus b→a: b is reachable at 2, 4, ... but never at exactly 3.
        let g = DiffusionGraph::from_edges(3, [(0, 1, 0.5), (1, 2, 0.5), (2, 1, 0.5)]).unwrap();
        let x = PartialObservation::new(NodeId(0), [(NodeId(0), 0), (NodeId(2), 3)], ObservationMode::Exact)
            .unwrap();
        let err = build_backbone(&g, &x).unwrap_err();
        assert!(matches!(
            err,
            Error::Infeasible(ref i) if i.reason == InfeasibleReason::NoExactLengthWalk
        ));
    }

    #[test]
    fn ad_campaign_prunes_nothing_needed() {
        let g = samples::ad_campaign();
        let x = samples::ad_campaign_observation(&g, ObservationMode::Exact);
        let bb = build_backbone(&g, &x).unwrap();
        for name in ["Ann", "Bill", "Jack", "Tom", "Mike", "Mary"] {
            assert!(bb.contains(node(&g, name)), "{name}");
        }
        // Mary at 3 can be reached via Mike (level 2) or Tom (level 2).
        assert!(bb.in_layer(node(&g, "Mike"), 2));
        assert!(bb.in_layer(node(&g, "Tom"), 2));
        assert!(!bb.in_layer(node(&g, "Mike"), 1));
    }

    #[test]
    fn by_mode_is_rejected() {
        let g = samples::g1();
        let x = exact(&g, &[("s", 0)]).with_mode(ObservationMode::By);
        assert!(matches!(build_backbone(&g, &x), Err(Error::Contract(_))));
    }
}
