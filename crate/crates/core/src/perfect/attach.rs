//! Top-down construction used when the level-by-level build gets stuck.
//!
//! Observed nodes are hung off the partial tree in order of time, each along
//! the cheapest walk of exactly the right length whose interior nodes are new
//! to the tree, unobserved, and allowed at their depth by the backbone.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::Backbone;
use crate::model::{CascadeTree, DiffusionGraph, Edge, NodeId, PartialObservation};

#[derive(Copy, Clone)]
struct State {
    cost: f64,
    fresh: u32,
    pred: Option<NodeId>,
}

impl State {
    fn beats(&self, other: &State) -> bool {
        (self.cost, self.fresh) < (other.cost, other.fresh)
    }
}

pub(crate) fn attach_top_down(
    g: &DiffusionGraph,
    bb: &Backbone,
    x: &PartialObservation,
    weight: impl Fn(&Edge) -> f64,
) -> Option<CascadeTree> {
    let s = x.source();
    let mut depth: HashMap<NodeId, u32> = HashMap::from([(s, 0)]);
    let mut parent: Vec<(NodeId, NodeId)> = Vec::new();
    let mut targets: Vec<(u32, NodeId)> = x.points().filter(|&(v, _)| v != s).map(|(v, t)| (t, v)).collect();
    targets.sort_unstable();

    for (t, v) in targets {
        let path = cheapest_exact_walk(g, bb, x, &depth, v, t, &weight)?;
        for pair in path.windows(2) {
            let (p, c) = (pair[0], pair[1]);
            if !depth.contains_key(&c) {
                depth.insert(c, depth[&p] + 1);
                parent.push((c, p));
            }
        }
    }
    CascadeTree::from_parents(s, parent).ok()
}

/// Walk `[junction, .., target]` where the junction is a tree node at some
/// depth `d < t` and the walk has exactly `t - d` hops.
fn cheapest_exact_walk(
    g: &DiffusionGraph,
    bb: &Backbone,
    x: &PartialObservation,
    depth: &HashMap<NodeId, u32>,
    target: NodeId,
    t: u32,
    weight: &impl Fn(&Edge) -> f64,
) -> Option<Vec<NodeId>> {
    // back[j]: nodes with a walk of exactly j hops to the target.
    let mut back: Vec<HashSet<NodeId>> = vec![HashSet::from([target])];
    for j in 1..=t as usize {
        let next = back[j - 1]
            .iter()
            .flat_map(|&v| g.in_edges(v))
            .map(|e| e.src)
            .filter(|&u| bb.contains(u))
            .collect();
        back.push(next);
    }
    let fits = |u: NodeId, k: u32| back[(t - k) as usize].contains(&u);

    let mut seeds: BTreeMap<u32, Vec<NodeId>> = BTreeMap::new();
    for (&w, &d) in depth {
        if d < t && fits(w, d) {
            seeds.entry(d).or_default().push(w);
        }
    }

    let mut layers: Vec<BTreeMap<NodeId, State>> = Vec::with_capacity(t as usize);
    for k in 0..t {
        let mut layer: BTreeMap<NodeId, State> = BTreeMap::new();
        for &w in seeds.get(&k).into_iter().flatten() {
            layer.insert(
                w,
                State {
                    cost: 0.0,
                    fresh: 0,
                    pred: None,
                },
            );
        }
        if k > 0 {
            for (&z, st) in &layers[k as usize - 1] {
                for e in g.out_edges(z) {
                    let u = e.dst;
                    let fresh = !depth.contains_key(&u)
                        && !x.contains(u)
                        && bb.in_layer(u, k)
                        && fits(u, k);
                    if !fresh {
                        continue;
                    }
                    let cand = State {
                        cost: st.cost + weight(e),
                        fresh: st.fresh + 1,
                        pred: Some(z),
                    };
                    match layer.get(&u) {
                        Some(old) if !cand.beats(old) => {}
                        _ => {
                            layer.insert(u, cand);
                        }
                    }
                }
            }
        }
        layers.push(layer);
    }

    let mut best: Option<(State, NodeId)> = None;
    for (&z, st) in layers.last()? {
        if let Some(e) = g.out_edges(z).find(|e| e.dst == target) {
            let cand = State {
                cost: st.cost + weight(e),
                fresh: st.fresh,
                pred: Some(z),
            };
            if best.as_ref().map_or(true, |(b, _)| cand.beats(b)) {
                best = Some((cand, z));
            }
        }
    }
    let (_, mut z) = best?;
    let mut path = vec![target];
    let mut k = t - 1;
    loop {
        path.push(z);
        match layers[k as usize][&z].pred {
            Some(p) => {
                z = p;
                k -= 1;
            }
            None => break,
        }
    }
    path.reverse();
    // A walk may pass the same fresh node at two depths; that is not a tree.
    let mut seen = HashSet::new();
    path.iter().all(|v| seen.insert(*v)).then_some(path)
}
