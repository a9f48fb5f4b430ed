use exphier::decomp::{decompose, DecompParams};
use exphier::{ratio, DynGraph};

fn barbell() -> DynGraph {
    DynGraph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap()
}

fn complete(n: usize) -> DynGraph {
    let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    DynGraph::from_edges(n, &edges).unwrap()
}

#[test]
fn decomposition_of_k8_passes() {
    let g = complete(8);
    let all: Vec<usize> = g.vertices().collect();
    let d = decompose(&g, &all, &DecompParams::new(ratio(1, 16), ratio(1, 64)), 0).unwrap();
    assert!(d.verify(&g, 16).passed());
}

#[test]
fn inflated_phi_fails_property2_with_a_cut() {
    let g = barbell();
    let all: Vec<usize> = g.vertices().collect();
    let mut d = decompose(&g, &all, &DecompParams::new(ratio(1, 16), ratio(1, 64)), 0).unwrap();
    assert!(d.verify(&g, 16).passed());
    // pretend the whole barbell is one cluster expanding at φ = 1
    d.clusters.truncate(1);
    d.clusters[0].members = all.clone();
    d.clusters[0].phi = ratio(1, 1);
    d.clusters[0].slack = 1;
    let report = d.verify(&g, 16);
    let failed: Vec<_> = report.failures().map(|c| c.name.clone()).collect();
    assert!(failed.iter().any(|n| n == "property2"), "{failed:?}");
    let witness = report.failures().find(|c| c.name == "property2").unwrap().witness.clone();
    assert!(witness.is_some());
}

#[test]
fn overlapping_clusters_fail_the_partition_check() {
    let g = complete(4);
    let all: Vec<usize> = g.vertices().collect();
    let mut d = decompose(&g, &all, &DecompParams::new(ratio(1, 16), ratio(1, 64)), 0).unwrap();
    let dup = d.clusters[0].clone();
    d.clusters.push(dup);
    let report = d.verify(&g, 16);
    assert!(report.failures().any(|c| c.name == "partition"));
}
