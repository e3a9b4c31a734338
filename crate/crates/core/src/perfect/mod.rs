//! Perfect consistent-tree inference: every observed node must sit in the
//! tree at a depth equal to its observed time.
//!
//! The tree is built bottom-up. Starting from the deepest observed time, each
//! level's nodes get parents one level up by solving a small facility-location
//! problem (see [`LevelForestProblem`]); the parents chosen become the next
//! level's nodes, alongside whatever was observed there.
//!
//! A new parent is only offered if some chain of still-available nodes can
//! carry it back to the source, and a node that is the last possible parent
//! of an already placed node is held for that role. If a level still ends up
//! with an orphan, the tree is built top-down instead (see `attach`).

mod attach;
mod backbone;
mod forest;

pub use backbone::{build_backbone, Backbone};
pub use forest::{
    solve_level_forest, ForestEdge, ForestStrategy, LevelForest, LevelForestProblem,
    RootCandidate, EXACT_ROOT_CAP,
};

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, InfeasibleReason, Result};
use crate::model::{check_perfect_consistent, CascadeTree, DiffusionGraph, NodeId, PartialObservation};
use crate::simulate::rng_from_seed;
use attach::attach_top_down;

/// Price of bringing a node into the tree as a new parent.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum OpeningCost {
    /// `-ln` of the node's most likely in-edge inside the backbone: a lower
    /// bound on the edge it will itself need one level up.
    MaxInEdge,
    /// New parents are free; the objective is edge weight alone.
    Zero,
    /// Every new parent costs 1.
    Unit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerfectSettings {
    pub strategy: ForestStrategy,
    pub opening: OpeningCost,
    /// Above this many optional roots the exact solver answers greedily.
    pub exact_cap: usize,
    /// Let nodes already placed one level up (other than the source) act as
    /// parents. Turning this off means an observed node can never be the
    /// parent of another observed node.
    pub allow_placed_roots: bool,
    /// When the level-by-level build fails, try hanging observed nodes off
    /// the tree one at a time instead.
    pub top_down_fallback: bool,
}

impl PerfectSettings {
    pub fn new(strategy: ForestStrategy) -> Self {
        PerfectSettings {
            strategy,
            opening: OpeningCost::MaxInEdge,
            exact_cap: EXACT_ROOT_CAP,
            allow_placed_roots: true,
            top_down_fallback: true,
        }
    }
}

impl Default for PerfectSettings {
    fn default() -> Self {
        PerfectSettings::new(ForestStrategy::Exact)
    }
}

/// The solved instance for one level, in the order levels were finalized.
#[derive(Clone, Debug)]
pub struct LevelRecord {
    pub problem: LevelForestProblem,
    pub forest: LevelForest,
    /// Roots that were not yet in the tree and got placed one level up.
    pub created: Vec<NodeId>,
}

#[derive(Clone, Debug)]
pub struct PerfectOutcome {
    pub tree: CascadeTree,
    /// Empty when the tree came from the top-down build.
    pub levels: Vec<LevelRecord>,
    /// The tree came from the top-down build.
    pub top_down: bool,
}

impl PerfectOutcome {
    /// Some level exceeded the exact solver's root cap.
    pub fn exact_fallback(&self) -> bool {
        self.levels.iter().any(|r| r.forest.exact_fallback)
    }
}

/// Perfect consistent tree with default settings for `strategy`.
pub fn infer_perfect_tree(
    g: &DiffusionGraph,
    x: &PartialObservation,
    strategy: ForestStrategy,
    seed: u64,
) -> Result<CascadeTree> {
    infer_perfect_with(g, x, &PerfectSettings::new(strategy), seed).map(|o| o.tree)
}

/// Perfect consistent tree plus the per-level instances that produced it.
pub fn infer_perfect_with(
    g: &DiffusionGraph,
    x: &PartialObservation,
    settings: &PerfectSettings,
    seed: u64,
) -> Result<PerfectOutcome> {
    let bb = build_backbone(g, x)?;
    let done = |tree, levels, top_down| PerfectOutcome {
        tree,
        levels,
        top_down,
    };
    let err = match build_levels(g, x, &bb, settings, seed) {
        Ok((tree, levels)) => return Ok(done(tree, levels, false)),
        Err(e) if e.is_infeasible() && settings.top_down_fallback => e,
        Err(e) => return Err(e),
    };
    let tree = match settings.strategy {
        ForestStrategy::Random => attach_top_down(g, &bb, x, |_| 1.0),
        _ => attach_top_down(g, &bb, x, |e| e.weight()),
    };
    match tree.filter(|t| check_perfect_consistent(g, t, x)) {
        Some(tree) => Ok(done(tree, Vec::new(), true)),
        None => Err(err),
    }
}

fn build_levels(
    g: &DiffusionGraph,
    x: &PartialObservation,
    bb: &Backbone,
    settings: &PerfectSettings,
    seed: u64,
) -> Result<(CascadeTree, Vec<LevelRecord>)> {
    let mut builder = LevelBuilder::new(g, x, bb, settings);
    let mut rng = rng_from_seed(seed);
    let mut records: Vec<LevelRecord> = Vec::new();

    let mut level = x.t_max();
    while level >= 1 {
        let problem = builder.problem(level);
        let uncovered = uncovered_leaves(&problem);
        if let Some(&v) = uncovered.first() {
            return Err(Error::infeasible(v, level, InfeasibleReason::LevelUncoverable));
        }
        if !problem.leaves.is_empty() {
            let forest = forest::solve_with(&problem, settings.strategy, settings.exact_cap, &mut rng)?;
            let created = builder.apply(&problem, &forest);
            records.push(LevelRecord {
                problem,
                forest,
                created,
            });
        }
        level -= 1;
    }

    let tree = builder.finish()?;
    if !check_perfect_consistent(g, &tree, x) {
        return Err(Error::infeasible(x.source(), 0, InfeasibleReason::NotATree));
    }
    Ok((tree, records))
}

fn uncovered_leaves(p: &LevelForestProblem) -> Vec<NodeId> {
    let mut covered = vec![false; p.leaves.len()];
    for e in &p.edges {
        covered[e.leaf] = true;
    }
    p.leaves
        .iter()
        .zip(covered)
        .filter(|(_, c)| !c)
        .map(|(&v, _)| v)
        .collect()
}

struct LevelBuilder<'a> {
    g: &'a DiffusionGraph,
    x: &'a PartialObservation,
    bb: &'a Backbone,
    settings: &'a PerfectSettings,
    /// Node -> depth, for observed nodes and parents placed so far.
    placed: HashMap<NodeId, u32>,
    by_level: BTreeMap<u32, Vec<NodeId>>,
    parent: HashMap<NodeId, NodeId>,
}

impl<'a> LevelBuilder<'a> {
    fn new(
        g: &'a DiffusionGraph,
        x: &'a PartialObservation,
        bb: &'a Backbone,
        settings: &'a PerfectSettings,
    ) -> Self {
        let mut b = LevelBuilder {
            g,
            x,
            bb,
            settings,
            placed: HashMap::new(),
            by_level: BTreeMap::new(),
            parent: HashMap::new(),
        };
        for (v, t) in x.points() {
            b.place(v, t);
        }
        b
    }

    fn place(&mut self, v: NodeId, level: u32) {
        self.placed.insert(v, level);
        let list = self.by_level.entry(level).or_default();
        let at = list.binary_search(&v).unwrap_or_else(|i| i);
        list.insert(at, v);
    }

    fn opening(&self, u: NodeId) -> f64 {
        match self.settings.opening {
            OpeningCost::Zero => 0.0,
            OpeningCost::Unit => 1.0,
            OpeningCost::MaxInEdge => self
                .g
                .in_edges(u)
                .filter(|e| self.bb.contains(e.src))
                .map(|e| e.weight())
                .reduce(f64::min)
                .map_or(0.0, |w| w.max(0.0)),
        }
    }

    fn fits(&self, w: NodeId, level: u32) -> bool {
        self.bb.dist_from_source(w).is_some_and(|d| d <= level)
            && self.bb.in_layer(w, level)
    }

    /// Whether `w` may sit at depth `level` given placements and pins.
    fn available(&self, w: NodeId, level: u32, pins: &HashMap<NodeId, u32>) -> bool {
        match self.placed.get(&w).or_else(|| pins.get(&w)) {
            Some(&l) => l == level,
            None => self.fits(w, level),
        }
    }

    /// Unplaced nodes that are the only parent left for some node placed
    /// above `level`, pinned to the depth that node needs. Pins cascade:
    /// a pinned node may in turn leave its own children a single option.
    fn pins(&self, level: u32) -> HashMap<NodeId, u32> {
        let mut pins: HashMap<NodeId, u32> = HashMap::new();
        let mut todo: Vec<(NodeId, u32)> = self
            .placed
            .iter()
            .filter(|&(_, &l)| l > 0 && l < level)
            .map(|(&v, &l)| (v, l))
            .collect();
        todo.sort_unstable();
        while let Some((v, l)) = todo.pop() {
            let mut sole = None;
            let mut options = 0;
            for e in self.g.in_edges(v) {
                let u = e.src;
                if !self.bb.contains(u) || !self.available(u, l - 1, &pins) {
                    continue;
                }
                if self.placed.contains_key(&u) || pins.contains_key(&u) {
                    options = 2;
                    break;
                }
                options += 1;
                sole = Some(u);
            }
            if let (1, Some(u)) = (options, sole) {
                pins.insert(u, l - 1);
                if l > 1 {
                    todo.push((u, l - 1));
                }
            }
        }
        pins
    }

    /// Nodes that can sit at depth `target` with a chain of available
    /// nodes, one per depth, back to the source. Used to avoid creating
    /// parents that are already dead ends.
    fn reachable_at(&self, target: u32, pins: &HashMap<NodeId, u32>) -> HashSet<NodeId> {
        let s = self.x.source();
        let mut cur: HashSet<NodeId> = HashSet::from([s]);
        for k in 1..=target {
            let mut next = HashSet::new();
            for &z in &cur {
                let parent_ok = z == s
                    || self.settings.allow_placed_roots
                    || !self.placed.contains_key(&z);
                if !parent_ok {
                    continue;
                }
                for e in self.g.out_edges(z) {
                    if self.bb.contains(e.dst) && self.available(e.dst, k, pins) {
                        next.insert(e.dst);
                    }
                }
            }
            cur = next;
        }
        cur
    }

    fn problem(&self, level: u32) -> LevelForestProblem {
        let leaves = self.by_level.get(&level).cloned().unwrap_or_default();
        let pins = self.pins(level);
        let reachable = self.reachable_at(level - 1, &pins);
        let mut roots: BTreeMap<NodeId, f64> = BTreeMap::new();
        let mut raw = Vec::new();
        for (li, &v) in leaves.iter().enumerate() {
            for e in self.g.in_edges(v) {
                let u = e.src;
                if !self.bb.contains(u) {
                    continue;
                }
                let opening = match self.placed.get(&u) {
                    Some(&l) if l + 1 == level => {
                        if !self.settings.allow_placed_roots && u != self.x.source() {
                            continue;
                        }
                        0.0
                    }
                    Some(_) => continue,
                    None => {
                        if !self.available(u, level - 1, &pins) || !reachable.contains(&u) {
                            continue;
                        }
                        self.opening(u)
                    }
                };
                roots.insert(u, opening);
                raw.push((u, li, e.weight()));
            }
        }
        let index: HashMap<NodeId, usize> = roots.keys().enumerate().map(|(i, &u)| (u, i)).collect();
        LevelForestProblem {
            level,
            leaves,
            roots: roots
                .into_iter()
                .map(|(node, opening)| RootCandidate { node, opening })
                .collect(),
            edges: raw
                .into_iter()
                .map(|(u, leaf, weight)| ForestEdge {
                    root: index[&u],
                    leaf,
                    weight,
                })
                .collect(),
        }
    }

    fn apply(&mut self, p: &LevelForestProblem, f: &LevelForest) -> Vec<NodeId> {
        let mut created = Vec::new();
        for (li, &ri) in f.assignment.iter().enumerate() {
            let u = p.roots[ri].node;
            if !self.placed.contains_key(&u) {
                self.place(u, p.level - 1);
                created.push(u);
            }
            self.parent.insert(p.leaves[li], u);
        }
        created
    }

    fn finish(self) -> Result<CascadeTree> {
        let s = self.x.source();
        let pairs: Vec<_> = self
            .placed
            .keys()
            .filter(|&&v| v != s)
            .map(|&v| {
                self.parent
                    .get(&v)
                    .map(|&p| (v, p))
                    .ok_or_else(|| Error::infeasible(v, self.placed[&v], InfeasibleReason::NotATree))
            })
            .collect::<Result<_>>()?;
        CascadeTree::from_parents(s, pairs)
            .map_err(|_| Error::infeasible(s, 0, InfeasibleReason::NotATree))
    }
}
