//! Write a graph, observation and tree to disk and read them back.

use cascade_infer::bounded::{infer_bounded_tree, BoundedMode};
use cascade_infer::io::{read_graph, read_observation, read_tree, write_graph, write_observation, write_tree};
use cascade_infer::samples::{ad_campaign, ad_campaign_observation};
use cascade_infer::ObservationMode;

fn main() -> cascade_infer::Result<()> {
    let dir = std::env::temp_dir().join("cascade_file_formats");
    let g = ad_campaign();
    let x = ad_campaign_observation(&g, ObservationMode::By);
    let t = infer_bounded_tree(&g, &x, BoundedMode::Weighted, 0)?;

    write_graph(&dir.join("graph.tsv"), &g)?;
    write_observation(&dir.join("obs.txt"), &g, &x)?;
    write_tree(&dir.join("tree.txt"), &g, &t)?;

    let g2 = read_graph(&dir.join("graph.tsv"))?;
    let x2 = read_observation(&dir.join("obs.txt"), &g2, ObservationMode::By)?;
    let t2 = read_tree(&dir.join("tree.txt"), &g2)?;
    assert_eq!((x2, t2), (x, t));

    for name in ["graph.tsv", "obs.txt", "tree.txt"] {
        println!("== {name}");
        print!("{}", std::fs::read_to_string(dir.join(name)).expect("just written"));
    }
    Ok(())
}
