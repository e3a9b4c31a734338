//! Small hand-built graphs used throughout the docs, examples and tests.

use crate::model::{CascadeTree, DiffusionGraph, NodeId, ObservationMode, PartialObservation};

/// Looks up a node by label, panicking if absent. Meant for fixtures.
pub fn node(g: &DiffusionGraph, label: &str) -> NodeId {
    g.node_by_label(label)
        .unwrap_or_else(|| panic!("no node labelled {label:?}"))
}

fn labelled(edges: &[(&str, &str, f64)]) -> DiffusionGraph {
    let mut b = DiffusionGraph::builder();
    for &(u, v, p) in edges {
        let (u, v) = (b.intern(u), b.intern(v));
        b.add_edge(u, v, p).expect("fixture edge");
    }
    b.build()
}

/// Four-node diamond `s→a (.5), s→b (.8), a→c (.9), b→c (.1)`.
pub fn g1() -> DiffusionGraph {
    labelled(&[
        ("s", "a", 0.5),
        ("s", "b", 0.8),
        ("a", "c", 0.9),
        ("b", "c", 0.1),
    ])
}

/// Six-user advertising network: Ann posts, Bill and Jack follow her, and the
/// ad can reach Mary through Tom, Jack or Mike.
pub fn ad_campaign() -> DiffusionGraph {
    labelled(&[
        ("Ann", "Bill", 0.7),
        ("Ann", "Jack", 0.6),
        ("Bill", "Tom", 0.5),
        ("Jack", "Mike", 0.8),
        ("Jack", "Mary", 0.2),
        ("Tom", "Mary", 0.3),
        ("Mike", "Mary", 0.9),
        ("Mike", "Tom", 0.4),
    ])
}

/// `{(Ann,0), (Bill,1), (Mary,3)}`.
pub fn ad_campaign_observation(g: &DiffusionGraph, mode: ObservationMode) -> PartialObservation {
    let ann = node(g, "Ann");
    PartialObservation::new(
        ann,
        [(ann, 0), (node(g, "Bill"), 1), (node(g, "Mary"), 3)],
        mode,
    )
    .expect("fixture observation")
}

/// Candidate trees for [`ad_campaign_observation`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum AdCampaignTree {
    /// Mary reached at step 3 through Bill and Tom.
    T3,
    /// Mary reached at step 3 through Jack and Mike; the most likely perfect tree.
    T4,
    /// Mary reached early, at step 2, straight from Jack.
    T5,
    /// Mary reached too late, at step 4.
    T6,
}

pub fn ad_campaign_tree(g: &DiffusionGraph, which: AdCampaignTree) -> CascadeTree {
    let edges: &[(&str, &str)] = match which {
        AdCampaignTree::T3 => &[("Ann", "Bill"), ("Bill", "Tom"), ("Tom", "Mary")],
        AdCampaignTree::T4 => &[
            ("Ann", "Bill"),
            ("Ann", "Jack"),
            ("Jack", "Mike"),
            ("Mike", "Mary"),
        ],
        AdCampaignTree::T5 => &[("Ann", "Bill"), ("Ann", "Jack"), ("Jack", "Mary")],
        AdCampaignTree::T6 => &[
            ("Ann", "Bill"),
            ("Ann", "Jack"),
            ("Jack", "Mike"),
            ("Mike", "Tom"),
            ("Tom", "Mary"),
        ],
    };
    CascadeTree::from_parents(
        node(g, "Ann"),
        edges.iter().map(|&(p, c)| (node(g, c), node(g, p))),
    )
    .expect("fixture tree")
}
