//! Line-oriented text formats for graphs, observations and trees.
//!
//! Fields are separated by tabs or spaces, lines starting with `#` and blank
//! lines are ignored, and node labels are arbitrary non-whitespace tokens.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{CascadeTree, DiffusionGraph, NodeId, ObservationMode, PartialObservation};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim();
        (!line.is_empty() && !line.starts_with('#')).then(|| (i + 1, line.split_whitespace().collect()))
    })
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn resolve(g: &DiffusionGraph, line: usize, label: &str) -> Result<NodeId> {
    g.node_by_label(label)
        .ok_or_else(|| Error::parse(line, format!("unknown node {label:?}")))
}

/// Edge list `src dst prob`, one per line. A line holding a single label
/// declares a node without edges. Nodes get ids in order of first appearance.
pub fn parse_graph(text: &str) -> Result<DiffusionGraph> {
    let mut b = DiffusionGraph::builder();
    for (line, fields) in content_lines(text) {
        match fields[..] {
            [label] => {
                b.intern(label);
            }
            [src, dst, prob] => {
                let prob: f64 = prob
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad probability {prob:?}")))?;
                let (u, v) = (b.intern(src), b.intern(dst));
                b.add_edge(u, v, prob).map_err(|e| Error::parse(line, e.to_string()))?;
            }
            _ => {
                return Err(Error::parse(
                    line,
                    format!("expected `src dst prob`, got {} fields", fields.len()),
                ))
            }
        }
    }
    Ok(b.build())
}

/// Inverse of [`parse_graph`]: node declarations in id order, then edges.
pub fn format_graph(g: &DiffusionGraph) -> String {
    let mut out = String::new();
    for v in g.nodes() {
        writeln!(out, "{}", g.label(v)).unwrap();
    }
    for e in g.edges() {
        writeln!(out, "{}\t{}\t{}", g.label(e.src), g.label(e.dst), e.prob).unwrap();
    }
    out
}

pub fn read_graph(path: &Path) -> Result<DiffusionGraph> {
    parse_graph(&read_text(path)?).map_err(|e| e.with_path(path))
}

pub fn write_graph(path: &Path, g: &DiffusionGraph) -> Result<()> {
    write_text(path, &format_graph(g))
}

/// `node time` per line; the first line is the source at time 0.
pub fn parse_observation(text: &str, g: &DiffusionGraph, mode: ObservationMode) -> Result<PartialObservation> {
    let mut points = Vec::new();
    let mut source = None;
    for (line, fields) in content_lines(text) {
        let [label, time] = fields[..] else {
            return Err(Error::parse(line, "expected `node time`"));
        };
        let v = resolve(g, line, label)?;
        let t: u32 = match time.parse::<i64>() {
            Ok(t) if t < 0 => return Err(Error::parse(line, format!("negative time {t}"))),
            Ok(t) => u32::try_from(t).map_err(|_| Error::parse(line, "time too large"))?,
            Err(_) => return Err(Error::parse(line, format!("bad time {time:?}"))),
        };
        if source.is_none() {
            if t != 0 {
                return Err(Error::parse(line, "first line must be the source at time 0"));
            }
            source = Some(v);
        }
        if points.iter().any(|&(u, _)| u == v) {
            return Err(Error::parse(line, format!("duplicate node {label:?}")));
        }
        if t == 0 && Some(v) != source {
            return Err(Error::parse(line, "only the source may have time 0"));
        }
        points.push((v, t));
    }
    let source = source.ok_or_else(|| Error::InvalidObservation("no points: the source is required".into()))?;
    PartialObservation::new(source, points, mode)
}

/// Source first, then ascending time and label.
pub fn format_observation(g: &DiffusionGraph, x: &PartialObservation) -> String {
    let mut pts = x.by_time();
    pts.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| g.label(a.0).cmp(g.label(b.0))));
    let mut out = String::new();
    for (v, t) in pts {
        writeln!(out, "{}\t{}", g.label(v), t).unwrap();
    }
    out
}

pub fn read_observation(path: &Path, g: &DiffusionGraph, mode: ObservationMode) -> Result<PartialObservation> {
    parse_observation(&read_text(path)?, g, mode).map_err(|e| e.with_path(path))
}

pub fn write_observation(path: &Path, g: &DiffusionGraph, x: &PartialObservation) -> Result<()> {
    write_text(path, &format_observation(g, x))
}

/// `root <label>`, then `child parent time` per non-root node.
pub fn parse_tree(text: &str, g: &DiffusionGraph) -> Result<CascadeTree> {
    let mut lines = content_lines(text);
    let (line, header) = lines
        .next()
        .ok_or_else(|| Error::InvalidTree("missing `root <label>` header".into()))?;
    let ["root", root] = header[..] else {
        return Err(Error::parse(line, "expected `root <label>`"));
    };
    let root = resolve(g, line, root)?;
    let mut triples = Vec::new();
    for (line, fields) in lines {
        let [child, parent, time] = fields[..] else {
            return Err(Error::parse(line, "expected `child parent time`"));
        };
        let c = resolve(g, line, child)?;
        let p = resolve(g, line, parent)?;
        let t: u32 = time
            .parse()
            .map_err(|_| Error::parse(line, format!("bad time {time:?}")))?;
        if c == root || triples.iter().any(|&(u, _, _)| u == c) {
            return Err(Error::parse(line, format!("node {child:?} has more than one parent")));
        }
        triples.push((c, p, t));
    }
    CascadeTree::from_timed(root, triples)
}

/// Canonical form: children in ascending time, then label.
pub fn format_tree(g: &DiffusionGraph, t: &CascadeTree) -> String {
    let mut rows: Vec<(u32, &str, &str)> = t
        .edges()
        .map(|(p, c)| (t.time(c).expect("tree node"), g.label(c), g.label(p)))
        .collect();
    rows.sort();
    let mut out = format!("root {}\n", g.label(t.root()));
    for (time, c, p) in rows {
        writeln!(out, "{c}\t{p}\t{time}").unwrap();
    }
    out
}

pub fn read_tree(path: &Path, g: &DiffusionGraph) -> Result<CascadeTree> {
    parse_tree(&read_text(path)?, g).map_err(|e| e.with_path(path))
}

pub fn write_tree(path: &Path, g: &DiffusionGraph, t: &CascadeTree) -> Result<()> {
    write_text(path, &format_tree(g, t))
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<()> {
    write_text(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::{self, node};

    #[test]
    fn graph_parsing() {
        assert_eq!(parse_graph("").unwrap().node_count(), 0);
        let g = parse_graph("# ad campaign\nAnn\tBill\t0.7\n\nAnn Jack 0.6\n").unwrap();
        assert_eq!(g.prob(node(&g, "Ann"), node(&g, "Bill")), Some(0.7));
        assert_eq!(node(&g, "Jack"), NodeId(2));

        let dup = parse_graph("s a 0.5\ns a 0.7\n").unwrap_err();
        assert!(matches!(dup, Error::Parse { line: 2, .. }), "{dup}");
        for bad in ["s a 0\n", "s a 1.5\n", "s s 0.5\n", "s a\n", "s a x\n"] {
            assert!(matches!(parse_graph(bad), Err(Error::Parse { line: 1, .. })), "{bad:?}");
        }
    }

    #[test]
    fn graph_round_trip_keeps_ids_and_isolated_nodes() {
        let mut b = samples::ad_campaign().to_builder();
        b.add_node("Zoe").unwrap();
        let g = b.build();
        let h = parse_graph(&format_graph(&g)).unwrap();
        assert_eq!(h.node_count(), g.node_count());
        assert_eq!(h.edges(), g.edges());
        assert_eq!(h.label(NodeId(6)), "Zoe");
    }

    #[test]
    fn observation_parsing() {
        let g = samples::ad_campaign();
        let x = parse_observation("Ann 0\nBill 1\nMary 3\n", &g, ObservationMode::By).unwrap();
        assert_eq!(x, samples::ad_campaign_observation(&g, ObservationMode::By));
        assert_eq!(
            parse_observation(&format_observation(&g, &x), &g, ObservationMode::By).unwrap(),
            x
        );
        assert_eq!(parse_observation("Ann 0\n", &g, ObservationMode::Exact).unwrap().len(), 1);

        let err = |text: &str| parse_observation(text, &g, ObservationMode::By).unwrap_err();
        assert!(matches!(err("Ann 0\nAnn 1\n"), Error::Parse { line: 2, .. }));
        assert!(matches!(err("Bill 1\n"), Error::Parse { line: 1, .. }));
        assert!(matches!(err("Ann 0\nBill -1\n"), Error::Parse { line: 2, .. }));
        assert!(matches!(err("Ann 0\nBob 1\n"), Error::Parse { line: 2, .. }));
        assert!(matches!(err("Ann 0\nBill 0\n"), Error::Parse { line: 2, .. }));
        assert!(matches!(err(""), Error::InvalidObservation(_)));
    }

    #[test]
    fn tree_round_trip() {
        let g = samples::g1();
        let root = CascadeTree::singleton(node(&g, "s"));
        assert_eq!(format_tree(&g, &root), "root s\n");
        assert_eq!(parse_tree("root s\n", &g).unwrap(), root);

        let t = CascadeTree::from_parents(
            node(&g, "s"),
            [(node(&g, "a"), node(&g, "s")), (node(&g, "c"), node(&g, "a"))],
        )
        .unwrap();
        let text = format_tree(&g, &t);
        assert_eq!(text, "root s\na\ts\t1\nc\ta\t2\n");
        assert_eq!(parse_tree(&text, &g).unwrap(), t);

        let two_parents = "root s\na\ts\t1\nc\ta\t2\nc\tb\t2\n";
        assert!(matches!(parse_tree(two_parents, &g), Err(Error::Parse { line: 4, .. })));
        assert!(parse_tree("root s\nc\ta\t2\n", &g).is_err());
        assert!(parse_tree("root s\na\ts\t2\n", &g).is_err());
    }

    #[test]
    fn files_carry_their_path_in_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.tsv");
        fs::write(&p, "a b 0.5\na b 0.5\n").unwrap();
        let msg = read_graph(&p).unwrap_err().to_string();
        assert!(msg.contains("g.tsv") && msg.contains("line 2"), "{msg}");
        assert!(matches!(read_graph(&dir.path().join("missing")), Err(Error::Io { .. })));

        let g = samples::g1();
        let t = CascadeTree::singleton(node(&g, "s"));
        let nested = dir.path().join("deep/tree.txt");
        write_tree(&nested, &g, &t).unwrap();
        assert_eq!(read_tree(&nested, &g).unwrap(), t);
    }
}
