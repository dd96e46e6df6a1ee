//! Scans networks for bottleneck nodes and prints the resulting
//! certificates, including a network where none exist.
//!
//! Run with: cargo run --example bottleneck_certificates

use dofb::bottleneck::{find_bottlenecks, find_omniscient, DEFAULT_SUBSET_CAP};
use dofb::family::{gen_family, FamilyParams};
use dofb::rank::DEFAULT_RANK_TRIALS;
use dofb::PrimeField;

fn main() {
    let field = PrimeField::default();
    let cases = [
        ("fig-2d1d2", FamilyParams::Fig2D1D2),
        ("fig-3d1d2", FamilyParams::Fig3D1D2),
        ("fig-full-dof", FamilyParams::FigFullDof),
        ("m-d1d2 m=5", FamilyParams::MD1D2 { m: 5 }),
        ("two-bounds m=3", FamilyParams::TwoBounds { m: 3 }),
    ];

    for (name, params) in cases {
        let net = gen_family(&params).expect("built-in families generate");
        let certs = find_bottlenecks(&net, field, DEFAULT_RANK_TRIALS, 0, DEFAULT_SUBSET_CAP)
            .expect("analysis fits under the default subset cap");
        let omniscient = find_omniscient(&net).expect("omniscient scan succeeds");

        println!("{name}:");
        if certs.is_empty() {
            println!("  no bottleneck certificates");
        }
        for cert in &certs {
            let members: Vec<&str> = cert.m_set.iter().map(|n| n.as_str()).collect();
            println!(
                "  {} is a rho={} bottleneck for {} in layer {} (M = {{{}}}, pruned from {})",
                cert.node,
                cert.rho,
                cert.dest,
                cert.layer,
                members.join(", "),
                cert.prior_m_size,
            );
        }
        for node in &omniscient {
            println!("  {} is omniscient for {}", node.node, node.dest);
        }
        println!();
    }
}
