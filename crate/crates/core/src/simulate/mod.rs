//! Ground-truth cascades under the independent cascade model, and their
//! degradation into partial observations.

mod generators;

pub use generators::{assign_random_probs, erdos_renyi, power_law, random_prob};

use rand::seq::index;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{CascadeTree, DiffusionGraph, NodeId, ObservationMode, PartialObservation};

/// Deterministic RNG used everywhere a seed is accepted.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a base seed with a path of indices (splitmix64 finalizer per step),
/// so that e.g. cascade `i` under sigma `j` gets an independent stream.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    parts
        .iter()
        .fold(mix(base), |acc, &p| mix(acc ^ mix(p.wrapping_add(0x632B_E59B_D9B4_E019))))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SourceChoice {
    Node(NodeId),
    /// Uniform over all nodes, redrawn on every retry.
    Random,
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub seed: u64,
    pub source: SourceChoice,
    /// Cascades smaller than this are discarded and resampled.
    pub min_nodes: usize,
    /// Stop activating once the cascade holds this many nodes.
    pub max_nodes: Option<usize>,
    pub max_steps: Option<u32>,
    pub retry_cap: u32,
}

impl SimConfig {
    pub fn new(seed: u64, source: SourceChoice) -> Self {
        SimConfig {
            seed,
            source,
            min_nodes: 1,
            max_nodes: None,
            max_steps: None,
            retry_cap: 1000,
        }
    }

    fn validate(&self, g: &DiffusionGraph) -> Result<()> {
        if self.min_nodes == 0 {
            return Err(Error::Contract("min_nodes must be at least 1".into()));
        }
        if self.retry_cap == 0 {
            return Err(Error::Contract("retry cap must be positive".into()));
        }
        if let Some(max) = self.max_nodes {
            if max < self.min_nodes {
                return Err(Error::Contract(format!(
                    "max_nodes {max} below min_nodes {}",
                    self.min_nodes
                )));
            }
        }
        match self.source {
            SourceChoice::Node(s) => g.check_node(s),
            SourceChoice::Random if g.node_count() == 0 => {
                Err(Error::Contract("cannot pick a source in an empty graph".into()))
            }
            SourceChoice::Random => Ok(()),
        }
    }
}

/// Runs the independent cascade model from the configured source.
///
/// Nodes newly active at step `t` try each inactive out-neighbor once, in
/// ascending parent id then ascending child id; the first successful attempt
/// claims the child, which becomes newly active at `t + 1`.
pub fn simulate_icm(g: &DiffusionGraph, cfg: &SimConfig) -> Result<CascadeTree> {
    cfg.validate(g)?;
    let mut rng = rng_from_seed(cfg.seed);
    let mut active = vec![false; g.node_count()];
    for _ in 0..cfg.retry_cap {
        let source = match cfg.source {
            SourceChoice::Node(s) => s,
            SourceChoice::Random => NodeId::from(rng.gen_range(0..g.node_count())),
        };
        let pairs = run_once(g, source, cfg, &mut rng, &mut active);
        if pairs.len() + 1 >= cfg.min_nodes {
            return CascadeTree::from_parents(source, pairs);
        }
    }
    Err(Error::Generation {
        attempts: cfg.retry_cap,
        min_nodes: cfg.min_nodes,
    })
}

fn run_once(
    g: &DiffusionGraph,
    source: NodeId,
    cfg: &SimConfig,
    rng: &mut impl Rng,
    active: &mut [bool],
) -> Vec<(NodeId, NodeId)> {
    active.fill(false);
    active[source.index()] = true;
    let cap = cfg.max_nodes.unwrap_or(usize::MAX);
    let mut size = 1;
    let mut pairs = Vec::new();
    let mut frontier = vec![source];
    let mut step = 0;
    while !frontier.is_empty() && size < cap && cfg.max_steps.map_or(true, |m| step < m) {
        frontier.sort_unstable();
        let mut next = Vec::new();
        'attempts: for &u in &frontier {
            for e in g.out_edges(u) {
                if active[e.dst.index()] {
                    continue;
                }
                if rng.gen::<f64>() < e.prob {
                    active[e.dst.index()] = true;
                    pairs.push((e.dst, u));
                    next.push(e.dst);
                    size += 1;
                    if size >= cap {
                        break 'attempts;
                    }
                }
            }
        }
        frontier = next;
        step += 1;
    }
    pairs
}

/// Number of points kept at uncertainty `sigma` for a cascade of `n` nodes:
/// `max(1, round_half_up((1 - sigma) * n))`.
pub fn kept_count(n: usize, sigma: f64) -> usize {
    let raw = (1.0 - sigma) * n as f64;
    // The epsilon absorbs representation error such as 0.15 * 20 = 2.9999...
    let kept = (raw + 0.5 + 1e-9).floor() as usize;
    kept.clamp(1, n.max(1))
}

/// Hides uniformly chosen non-source nodes of `t` until the uncertainty
/// `1 - |X| / |V_T|` reaches `sigma`. Kept nodes carry their true times.
pub fn sample_observation(
    t: &CascadeTree,
    sigma: f64,
    seed: u64,
    mode: ObservationMode,
) -> Result<PartialObservation> {
    if !(0.0..1.0).contains(&sigma) {
        return Err(Error::Contract(format!("sigma {sigma} outside [0, 1)")));
    }
    let keep = kept_count(t.len(), sigma);
    let others: Vec<(NodeId, u32)> = t.timed_nodes().filter(|&(v, _)| v != t.root()).collect();
    let mut rng = rng_from_seed(seed);
    let mut chosen: Vec<usize> = index::sample(&mut rng, others.len(), keep - 1).into_vec();
    chosen.sort_unstable();
    let points = std::iter::once((t.root(), 0)).chain(chosen.into_iter().map(|i| others[i]));
    PartialObservation::new(t.root(), points, mode)
}
