//! Shortest-path consistent trees: perfect trees where every observed time
//! equals the hop distance from the source.
//!
//! An undirected Steiner tree over the backbone (metric-closure
//! 2-approximation) proposes which nodes to use; it is then oriented away from
//! the source level by level, splicing in directed shortest paths where the
//! undirected tree has no usable edge.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};

use crate::bounded::{build_bfs_dag, cheapest_attachment, grow_tree, BfsDag, BoundedMode};
use crate::error::{Error, InfeasibleReason, Result};
use crate::model::{
    bfs_levels, check_sp_consistent, tree_cost, CascadeTree, DiffusionGraph, Edge, NodeId,
    ObservationMode, PartialObservation,
};
use crate::perfect::{build_backbone, Backbone};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum SpMode {
    /// Minimize the negated log-likelihood.
    Weighted,
    /// Minimize the number of edges.
    MinSize,
}

impl SpMode {
    fn weight(self, e: &Edge) -> f64 {
        match self {
            SpMode::Weighted => e.weight(),
            SpMode::MinSize => 1.0,
        }
    }

    fn objective(self, g: &DiffusionGraph, t: &CascadeTree) -> f64 {
        match self {
            SpMode::Weighted => tree_cost(g, t).expect("tree uses graph edges"),
            SpMode::MinSize => t.edge_count() as f64,
        }
    }
}

/// Checks that every observed time equals the node's distance from the source.
pub fn check_sp_feasible(g: &DiffusionGraph, x: &PartialObservation) -> Result<()> {
    x.check_in_graph(g)?;
    let levels = bfs_levels(g, x.source(), None)?;
    for (v, t) in x.by_time() {
        match levels.get(v) {
            None => return Err(Error::infeasible(v, t, InfeasibleReason::Unreachable)),
            Some(d) if d != t => {
                return Err(Error::infeasible(
                    v,
                    t,
                    InfeasibleReason::NotShortestPath { dist: d },
                ))
            }
            Some(_) => {}
        }
    }
    Ok(())
}

/// Shortest-path consistent tree for an "exact" observation.
pub fn infer_sp_tree(g: &DiffusionGraph, x: &PartialObservation, mode: SpMode) -> Result<CascadeTree> {
    x.require_mode(ObservationMode::Exact, "shortest-path inference")?;
    check_sp_feasible(g, x)?;
    let bb = build_backbone(g, x)?;
    let dag = build_bfs_dag(g, x.source(), x.t_max())?;

    let fallback = grow_tree(&dag, x, bounded_mode(mode), 0);
    let steiner = undirected_steiner(g, &bb, x, mode);
    let oriented = orient(&dag, x, &steiner, mode);

    let tree = if mode.objective(g, &oriented) <= mode.objective(g, &fallback) {
        oriented
    } else {
        fallback
    };
    debug_assert!(check_sp_consistent(g, &tree, x));
    Ok(tree)
}

/// The tree obtained by hanging each observed node, in time order, off the
/// tree so far by its cheapest shortest path. Never beaten by
/// [`infer_sp_tree`].
pub fn sp_fallback_tree(g: &DiffusionGraph, x: &PartialObservation, mode: SpMode) -> Result<CascadeTree> {
    x.require_mode(ObservationMode::Exact, "shortest-path inference")?;
    check_sp_feasible(g, x)?;
    let dag = build_bfs_dag(g, x.source(), x.t_max())?;
    Ok(grow_tree(&dag, x, bounded_mode(mode), 0))
}

fn bounded_mode(mode: SpMode) -> BoundedMode {
    match mode {
        SpMode::Weighted => BoundedMode::Weighted,
        SpMode::MinSize => BoundedMode::MinSize,
    }
}

type Adjacency = BTreeMap<NodeId, BTreeMap<NodeId, f64>>;

/// Backbone edges with direction dropped, keeping the cheaper direction.
fn symmetrize(g: &DiffusionGraph, bb: &Backbone, mode: SpMode) -> Adjacency {
    let mut adj: Adjacency = BTreeMap::new();
    for e in bb.edges(g) {
        let w = mode.weight(e);
        for (a, b) in [(e.src, e.dst), (e.dst, e.src)] {
            let slot = adj.entry(a).or_default().entry(b).or_insert(w);
            *slot = slot.min(w);
        }
    }
    adj
}

struct ShortestPaths {
    dist: HashMap<NodeId, f64>,
    pred: HashMap<NodeId, NodeId>,
}

fn dijkstra(adj: &Adjacency, src: NodeId) -> ShortestPaths {
    #[derive(PartialEq)]
    struct Key(f64, u32);
    impl Eq for Key {}
    impl PartialOrd for Key {
        fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Key {
        fn cmp(&self, o: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&o.0).then(self.1.cmp(&o.1))
        }
    }

    let mut dist = HashMap::from([(src, 0.0)]);
    let mut pred = HashMap::new();
    let mut heap = BinaryHeap::from([Reverse(Key(0.0, src.0))]);
    while let Some(Reverse(Key(d, u))) = heap.pop() {
        let u = NodeId(u);
        if dist.get(&u).is_some_and(|&best| d > best) {
            continue;
        }
        for (&v, &w) in adj.get(&u).into_iter().flatten() {
            let nd = d + w;
            if dist.get(&v).map_or(true, |&cur| nd < cur) {
                dist.insert(v, nd);
                pred.insert(v, u);
                heap.push(Reverse(Key(nd, v.0)));
            }
        }
    }
    ShortestPaths { dist, pred }
}

/// Classic metric-closure Steiner tree over `{source} ∪ observed`, returned
/// as undirected adjacency.
fn undirected_steiner(
    g: &DiffusionGraph,
    bb: &Backbone,
    x: &PartialObservation,
    mode: SpMode,
) -> Adjacency {
    let adj = symmetrize(g, bb, mode);
    let terminals: Vec<NodeId> = x.points().map(|(v, _)| v).collect::<BTreeSet<_>>().into_iter().collect();
    let paths: Vec<ShortestPaths> = terminals.iter().map(|&t| dijkstra(&adj, t)).collect();

    // Prim over the closure, starting from the first terminal.
    let k = terminals.len();
    let mut in_mst = vec![false; k];
    let mut link: Vec<Option<(f64, usize)>> = vec![None; k];
    in_mst[0] = true;
    let mut expanded: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    let relax = |link: &mut Vec<Option<(f64, usize)>>, in_mst: &[bool], from: usize| {
        for j in 0..k {
            if in_mst[j] {
                continue;
            }
            if let Some(&d) = paths[from].dist.get(&terminals[j]) {
                if link[j].map_or(true, |(cur, _)| d < cur) {
                    link[j] = Some((d, from));
                }
            }
        }
    };
    relax(&mut link, &in_mst, 0);
    for _ in 1..k {
        let Some(j) = (0..k)
            .filter(|&j| !in_mst[j] && link[j].is_some())
            .min_by(|&a, &b| link[a].unwrap().0.total_cmp(&link[b].unwrap().0).then(a.cmp(&b)))
        else {
            break;
        };
        in_mst[j] = true;
        let from = link[j].unwrap().1;
        // Walk the shortest path from terminal j back to terminal `from`.
        let mut v = terminals[j];
        while v != terminals[from] {
            let p = paths[from].pred[&v];
            expanded.insert((v.min(p), v.max(p)));
            v = p;
        }
        relax(&mut link, &in_mst, j);
    }

    // Spanning tree of the expanded subgraph, then strip non-terminal leaves.
    let mut edges: Vec<(f64, NodeId, NodeId)> = expanded.into_iter().map(|(a, b)| (adj[&a][&b], a, b)).collect();
    edges.sort_by(|p, q| p.0.total_cmp(&q.0).then((p.1, p.2).cmp(&(q.1, q.2))));
    let mut dsu: HashMap<NodeId, NodeId> = HashMap::new();
    fn find(dsu: &mut HashMap<NodeId, NodeId>, v: NodeId) -> NodeId {
        let p = *dsu.entry(v).or_insert(v);
        if p == v {
            return v;
        }
        let r = find(dsu, p);
        dsu.insert(v, r);
        r
    }
    let mut tree: Adjacency = BTreeMap::new();
    for (w, a, b) in edges {
        let (ra, rb) = (find(&mut dsu, a), find(&mut dsu, b));
        if ra != rb {
            dsu.insert(ra, rb);
            tree.entry(a).or_default().insert(b, w);
            tree.entry(b).or_default().insert(a, w);
        }
    }
    let is_terminal = |v: &NodeId| x.contains(*v);
    loop {
        let leaves: Vec<NodeId> = tree
            .iter()
            .filter(|(v, nb)| nb.len() <= 1 && !is_terminal(v))
            .map(|(&v, _)| v)
            .collect();
        if leaves.is_empty() {
            break;
        }
        for v in leaves {
            if let Some(nb) = tree.remove(&v) {
                for u in nb.keys() {
                    if let Some(m) = tree.get_mut(u) {
                        m.remove(&v);
                    }
                }
            }
        }
    }
    tree
}

/// Directs the Steiner tree away from the source in ascending distance.
fn orient(dag: &BfsDag<'_>, x: &PartialObservation, steiner: &Adjacency, mode: SpMode) -> CascadeTree {
    let g = dag.graph();
    let s = x.source();
    let mut in_tree = vec![false; g.node_count()];
    in_tree[s.index()] = true;
    let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();

    let mut order: Vec<NodeId> = steiner.keys().copied().chain(x.points().map(|(v, _)| v)).collect();
    order.sort_by_key(|&v| (dag.level(v), v));
    order.dedup();
    for v in order {
        if in_tree[v.index()] {
            continue;
        }
        let Some(level) = dag.level(v) else { continue };
        let parent = steiner
            .get(&v)
            .into_iter()
            .flat_map(|nb| nb.keys())
            .filter(|&&u| in_tree[u.index()] && dag.level(u) == Some(level.wrapping_sub(1)))
            .filter_map(|&u| g.prob(u, v).map(|_| u))
            .min_by(|&a, &b| {
                let wa = g.out_edges(a).find(|e| e.dst == v).map(|e| mode.weight(e)).unwrap();
                let wb = g.out_edges(b).find(|e| e.dst == v).map(|e| mode.weight(e)).unwrap();
                wa.total_cmp(&wb).then(a.cmp(&b))
            });
        if let Some(u) = parent {
            in_tree[v.index()] = true;
            pairs.push((v, u));
        } else if x.contains(v) {
            let path = cheapest_attachment(dag, &in_tree, v, |e| mode.weight(e))
                .expect("observed node lies on a shortest path from the source");
            for w in path.windows(2) {
                in_tree[w[1].index()] = true;
                pairs.push((w[1], w[0]));
            }
        }
    }

    // Drop branches that end in unobserved nodes.
    let mut children: HashMap<NodeId, usize> = HashMap::new();
    for &(_, p) in &pairs {
        *children.entry(p).or_default() += 1;
    }
    let parent_of: HashMap<NodeId, NodeId> = pairs.iter().copied().collect();
    let mut keep: HashMap<NodeId, bool> = pairs.iter().map(|&(c, _)| (c, true)).collect();
    let mut stack: Vec<NodeId> = pairs
        .iter()
        .map(|&(c, _)| c)
        .filter(|c| !children.contains_key(c) && !x.contains(*c))
        .collect();
    while let Some(v) = stack.pop() {
        keep.insert(v, false);
        let p = parent_of[&v];
        let left = children.get_mut(&p).expect("parent has children");
        *left -= 1;
        if *left == 0 && p != s && !x.contains(p) {
            stack.push(p);
        }
    }
    CascadeTree::from_parents(s, pairs.into_iter().filter(|(c, _)| keep[c]))
        .expect("oriented edges form a tree")
}
