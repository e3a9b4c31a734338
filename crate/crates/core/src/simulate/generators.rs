use rand::seq::SliceRandom;
use rand::Rng;

use super::rng_from_seed;
use crate::error::{Error, Result};
use crate::model::{DiffusionGraph, GraphBuilder, NodeId};

/// Uniform draw from `(0, 1]`. Zero is excluded because a zero-probability
/// edge is no edge at all.
pub fn random_prob(rng: &mut impl Rng) -> f64 {
    1.0 - rng.gen::<f64>()
}

/// Same topology with fresh uniform `(0, 1]` probabilities.
pub fn assign_random_probs(g: &DiffusionGraph, seed: u64) -> Result<DiffusionGraph> {
    let mut rng = rng_from_seed(seed);
    g.map_probs(|_| random_prob(&mut rng))
}

/// Preferential-attachment graph with a power-law degree tail.
///
/// Starts from a bidirected clique on `m + 1` nodes; every later node links
/// to `m` distinct existing nodes chosen proportionally to degree. Each link
/// becomes two directed edges with independent random probabilities.
pub fn power_law(n: usize, m: usize, seed: u64) -> Result<DiffusionGraph> {
    if m == 0 || n <= m {
        return Err(Error::Contract(format!(
            "power-law graph needs n > m >= 1 (got n = {n}, m = {m})"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut b = GraphBuilder::with_numbered_nodes(n);
    // Each node appears once per incident link.
    let mut ends: Vec<usize> = Vec::with_capacity(2 * n * m);
    let link = |b: &mut GraphBuilder, rng: &mut _, u: usize, v: usize| -> Result<()> {
        b.add_edge(NodeId::from(u), NodeId::from(v), random_prob(rng))?;
        b.add_edge(NodeId::from(v), NodeId::from(u), random_prob(rng))
    };
    for u in 0..=m {
        for v in (u + 1)..=m {
            link(&mut b, &mut rng, u, v)?;
            ends.extend([u, v]);
        }
    }
    let mut targets = Vec::with_capacity(m);
    for v in (m + 1)..n {
        targets.clear();
        while targets.len() < m {
            let &t = ends.choose(&mut rng).expect("seed clique is non-empty");
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        targets.sort_unstable();
        for &t in &targets {
            link(&mut b, &mut rng, t, v)?;
            ends.extend([t, v]);
        }
    }
    Ok(b.build())
}

/// Directed `G(n, p)`: each ordered pair is an edge with probability `p_edge`.
pub fn erdos_renyi(n: usize, p_edge: f64, seed: u64) -> Result<DiffusionGraph> {
    if !(0.0..=1.0).contains(&p_edge) {
        return Err(Error::Contract(format!("edge density {p_edge} outside [0, 1]")));
    }
    let mut rng = rng_from_seed(seed);
    let mut b = GraphBuilder::with_numbered_nodes(n);
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen::<f64>() < p_edge {
                b.add_edge(NodeId::from(u), NodeId::from(v), random_prob(&mut rng))?;
            }
        }
    }
    Ok(b.build())
}
