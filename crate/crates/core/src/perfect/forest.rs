use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, InfeasibleReason, Result};
use crate::model::NodeId;
use crate::simulate::rng_from_seed;

/// Default limit on optional roots for the exact solver.
pub const EXACT_ROOT_CAP: usize = 20;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct RootCandidate {
    pub node: NodeId,
    /// Paid once if any leaf is assigned to this root.
    pub opening: f64,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ForestEdge {
    /// Index into [`LevelForestProblem::roots`].
    pub root: usize,
    /// Index into [`LevelForestProblem::leaves`].
    pub leaf: usize,
    pub weight: f64,
}

/// One bottom-up step: give every node at `level` a parent one level up.
///
/// Roots are sorted by node id, so index order doubles as the id tie-break.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelForestProblem {
    pub level: u32,
    pub leaves: Vec<NodeId>,
    pub roots: Vec<RootCandidate>,
    pub edges: Vec<ForestEdge>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum ForestStrategy {
    /// Branch and bound over root subsets.
    Exact,
    /// Cheapest cost-per-leaf star, repeatedly.
    Greedy,
    /// A uniformly random candidate root per leaf.
    Random,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelForest {
    /// Root index chosen for each leaf, parallel to `leaves`.
    pub assignment: Vec<usize>,
    /// Chosen edge weights plus the opening cost of every used root.
    pub cost: f64,
    /// The exact solver hit its root cap and answered greedily instead.
    pub exact_fallback: bool,
}

impl LevelForestProblem {
    /// Candidate `(root index, weight)` lists per leaf, ascending by root index.
    fn by_leaf(&self) -> Vec<Vec<(usize, f64)>> {
        let mut out = vec![Vec::new(); self.leaves.len()];
        for e in &self.edges {
            out[e.leaf].push((e.root, e.weight));
        }
        for list in &mut out {
            list.sort_by_key(|&(r, _)| r);
        }
        out
    }

    /// Total cost of an assignment under this problem's weights and openings.
    pub fn cost_of(&self, assignment: &[usize]) -> f64 {
        let cands = self.by_leaf();
        let mut used = vec![false; self.roots.len()];
        let mut cost = 0.0;
        for (leaf, &r) in assignment.iter().enumerate() {
            let w = cands[leaf]
                .iter()
                .find(|&&(c, _)| c == r)
                .map(|&(_, w)| w)
                .expect("assignment uses a candidate edge");
            cost += w;
            used[r] = true;
        }
        cost + used
            .iter()
            .zip(&self.roots)
            .filter(|(&u, _)| u)
            .map(|(_, r)| r.opening)
            .sum::<f64>()
    }
}

/// Solves one level-forest instance. `seed` is used only by the random strategy.
pub fn solve_level_forest(
    p: &LevelForestProblem,
    strategy: ForestStrategy,
    seed: u64,
) -> Result<LevelForest> {
    solve_with(p, strategy, EXACT_ROOT_CAP, &mut rng_from_seed(seed))
}

pub(crate) fn solve_with(
    p: &LevelForestProblem,
    strategy: ForestStrategy,
    exact_cap: usize,
    rng: &mut impl Rng,
) -> Result<LevelForest> {
    let cands = p.by_leaf();
    if let Some(leaf) = cands.iter().position(|c| c.is_empty()) {
        return Err(Error::infeasible(
            p.leaves[leaf],
            p.level,
            InfeasibleReason::LevelUncoverable,
        ));
    }
    let (assignment, exact_fallback) = match strategy {
        ForestStrategy::Random => {
            let a = cands
                .iter()
                .map(|c| c.choose(rng).expect("non-empty").0)
                .collect();
            (a, false)
        }
        ForestStrategy::Greedy => (greedy(p, &cands), false),
        ForestStrategy::Exact => match exact(p, &cands, exact_cap) {
            Some(a) => (a, false),
            None => (greedy(p, &cands), true),
        },
    };
    let cost = p.cost_of(&assignment);
    Ok(LevelForest {
        assignment,
        cost,
        exact_fallback,
    })
}

/// Each leaf to its cheapest open root, ties to the smaller index.
fn assign_to_open(cands: &[Vec<(usize, f64)>], open: &[bool]) -> Option<Vec<usize>> {
    cands
        .iter()
        .map(|c| {
            c.iter()
                .filter(|&&(r, _)| open[r])
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
                .map(|&(r, _)| r)
        })
        .collect()
}

fn greedy(p: &LevelForestProblem, cands: &[Vec<(usize, f64)>]) -> Vec<usize> {
    let nr = p.roots.len();
    let mut star: Vec<Vec<(f64, usize)>> = vec![Vec::new(); nr];
    for (leaf, c) in cands.iter().enumerate() {
        for &(r, w) in c {
            star[r].push((w, leaf));
        }
    }
    for s in &mut star {
        s.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    }
    let mut open = vec![false; nr];
    let mut covered = vec![false; p.leaves.len()];
    let mut left = p.leaves.len();
    while left > 0 {
        // (ratio, root, prefix length)
        let mut best: Option<(f64, usize, usize)> = None;
        for r in 0..nr {
            let mut sum = if open[r] { 0.0 } else { p.roots[r].opening };
            let mut k = 0;
            for &(w, leaf) in &star[r] {
                if covered[leaf] {
                    continue;
                }
                sum += w;
                k += 1;
                let ratio = sum / k as f64;
                let better = match best {
                    None => true,
                    Some((br, bi, bk)) => ratio < br || (ratio == br && bi == r && k > bk),
                };
                if better {
                    best = Some((ratio, r, k));
                }
            }
        }
        let (_, r, k) = best.expect("every uncovered leaf has a candidate");
        open[r] = true;
        for &(_, leaf) in star[r].iter().filter(|(_, l)| !covered[*l]).take(k).collect::<Vec<_>>() {
            covered[leaf] = true;
            left -= 1;
        }
    }
    assign_to_open(cands, &open).expect("greedy covers every leaf")
}

/// Optimal assignment, or `None` when there are more than `cap` optional roots.
fn exact(p: &LevelForestProblem, cands: &[Vec<(usize, f64)>], cap: usize) -> Option<Vec<usize>> {
    let nr = p.roots.len();
    let nl = p.leaves.len();
    let mut forced = vec![false; nr];
    for (r, root) in p.roots.iter().enumerate() {
        if root.opening <= 0.0 {
            forced[r] = true;
        }
    }
    for c in cands {
        if let [(r, _)] = c[..] {
            forced[r] = true;
        }
    }
    let used: Vec<bool> = {
        let mut u = vec![false; nr];
        cands.iter().flatten().for_each(|&(r, _)| u[r] = true);
        u
    };
    let optional: Vec<usize> = (0..nr).filter(|&r| used[r] && !forced[r]).collect();
    if optional.len() > cap {
        return None;
    }

    // weight[leaf][root], infinite where there is no edge.
    let mut weight = vec![vec![f64::INFINITY; nr]; nl];
    for (leaf, c) in cands.iter().enumerate() {
        for &(r, w) in c {
            weight[leaf][r] = w;
        }
    }
    let base_open: f64 = (0..nr).filter(|&r| forced[r]).map(|r| p.roots[r].opening).sum();
    let best_forced: Vec<f64> = (0..nl)
        .map(|l| {
            (0..nr)
                .filter(|&r| forced[r])
                .map(|r| weight[l][r])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    // suffix[k][leaf]: cheapest edge from optional roots at positions >= k.
    let mut suffix = vec![vec![f64::INFINITY; nl]; optional.len() + 1];
    for k in (0..optional.len()).rev() {
        for l in 0..nl {
            suffix[k][l] = suffix[k + 1][l].min(weight[l][optional[k]]);
        }
    }

    let mut search = Search {
        p,
        weight: &weight,
        optional: &optional,
        suffix: &suffix,
        best_cost: f64::INFINITY,
        best_open: Vec::new(),
        chosen: Vec::new(),
    };
    // Start from the greedy answer so the bound prunes from the first node.
    let g = greedy(p, cands);
    let mut g_open = vec![false; nr];
    g.iter().for_each(|&r| g_open[r] = true);
    search.best_cost = p.cost_of(&g);
    search.best_open = optional.iter().filter(|&&r| g_open[r]).copied().collect();
    search.run(0, base_open, best_forced);

    let mut open = forced;
    for &r in &search.best_open {
        open[r] = true;
    }
    assign_to_open(cands, &open)
}

struct Search<'a> {
    p: &'a LevelForestProblem,
    weight: &'a [Vec<f64>],
    optional: &'a [usize],
    suffix: &'a [Vec<f64>],
    best_cost: f64,
    best_open: Vec<usize>,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, k: usize, open_cost: f64, best: Vec<f64>) {
        let bound = open_cost
            + best
                .iter()
                .zip(&self.suffix[k])
                .map(|(&b, &s)| b.min(s))
                .sum::<f64>();
        // Strict improvement only, so earlier (include-first) solutions win ties.
        if bound >= self.best_cost {
            return;
        }
        if k == self.optional.len() {
            self.best_cost = bound;
            self.best_open = self.chosen.clone();
            return;
        }
        let r = self.optional[k];
        let with: Vec<f64> = best
            .iter()
            .enumerate()
            .map(|(l, &b)| b.min(self.weight[l][r]))
            .collect();
        self.chosen.push(r);
        self.run(k + 1, open_cost + self.p.roots[r].opening, with);
        self.chosen.pop();
        self.run(k + 1, open_cost, best);
    }
}
