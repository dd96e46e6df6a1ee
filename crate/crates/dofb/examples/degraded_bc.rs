//! Extracts the degraded broadcast channel hiding inside each bottleneck
//! certificate: receiver 1 sees only the bottleneck node's row, receiver 2
//! sees that row plus enough extra rows to reach generic rank rho.
//!
//! Run with: cargo run --example degraded_bc

use dofb::bottleneck::{construct_degraded_bc, find_bottlenecks, DEFAULT_SUBSET_CAP};
use dofb::family::{gen_family, FamilyParams};
use dofb::rank::DEFAULT_RANK_TRIALS;
use dofb::PrimeField;

fn row_text(row: &[bool]) -> String {
    row.iter().map(|&b| if b { '*' } else { '.' }).collect()
}

fn main() {
    let field = PrimeField::default();
    for (name, params) in [
        ("fig-3d1d2", FamilyParams::Fig3D1D2),
        ("two-bounds m=3", FamilyParams::TwoBounds { m: 3 }),
    ] {
        let net = gen_family(&params).expect("built-in families generate");
        let certs = find_bottlenecks(&net, field, DEFAULT_RANK_TRIALS, 0, DEFAULT_SUBSET_CAP)
            .expect("analysis fits under the default subset cap");

        println!("{name}:");
        for cert in &certs {
            let bc = construct_degraded_bc(&net, cert, field, 0)
                .expect("every certificate yields a degraded channel");
            let antennas: Vec<&str> = bc.m_nodes.iter().map(|n| n.as_str()).collect();
            println!(
                "  certificate: {} bottleneck {} (rho = {})",
                cert.dest, cert.node, cert.rho
            );
            println!("    transmit antennas  {}", antennas.join(" "));
            println!(
                "    receiver 1 row     {}   (node {})",
                row_text(&bc.rx1_row),
                bc.rx1_node
            );
            for (node, row) in bc.rx2_nodes.iter().zip(&bc.rx2_rows) {
                println!("    receiver 2 row     {}   (node {node})", row_text(row));
            }
            println!(
                "    receiver 2 rank {} ==> {} D_i + D_j <= {} with i = {}",
                bc.rho, bc.rho, bc.rho, cert.dest
            );
        }
        println!();
    }
}
