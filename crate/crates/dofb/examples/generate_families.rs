//! Builds every built-in network family and summarizes its shape, then
//! prints one full canonical JSON document.
//!
//! Run with: cargo run --example generate_families

use dofb::family::{gen_family, FamilyParams};
use dofb::serialize_network;

fn main() {
    let families = [
        ("fig-2d1d2", FamilyParams::Fig2D1D2),
        ("fig-3d1d2", FamilyParams::Fig3D1D2),
        ("fig-full-dof", FamilyParams::FigFullDof),
        ("d1d2-one-half", FamilyParams::D1D2OneHalf),
        ("m-d1d2 m=4", FamilyParams::MD1D2 { m: 4 }),
        ("two-bounds m=3", FamilyParams::TwoBounds { m: 3 }),
        ("set-size-to-rank k=2", FamilyParams::SetSizeToRank { k: 2 }),
        (
            "random-layered [3,2]",
            FamilyParams::RandomLayered {
                interior: vec![3, 2],
                density: 0.7,
                seed: 1,
            },
        ),
    ];

    for (name, params) in families {
        let net = gen_family(&params).expect("built-in families generate");
        let nodes: usize = net.layers.iter().map(|l| l.len()).sum();
        println!(
            "{name:22} {} layers, {nodes:2} nodes, {} edges",
            net.layer_count(),
            net.edges.len(),
        );
    }

    println!("\ncanonical JSON for fig-2d1d2:\n");
    let net = gen_family(&FamilyParams::Fig2D1D2).unwrap();
    print!("{}", serialize_network(&net));
}
