//! Demonstrates the delayed-knowledge reconstruction rule: a node may
//! re-derive another node's reception only if that reception is strictly
//! in the past AND lies in the requester's own knowledge span.
//!
//! Run with: cargo run --example delayed_csit_rules

use dofb::engine::{reconstruct_row, Block, KnowledgeState, Provenance};
use dofb::{NodeId, PrimeField};

fn main() {
    let field = PrimeField::default();
    let node = NodeId::from("v1");

    // v1 knows two rows over a 3-symbol space: (1 0 0) and (0 1 1).
    let mut state = KnowledgeState::new(field, 3);
    state.add_row(vec![1, 0, 0], Provenance::Source(Block::A));
    state.add_row(vec![0, 1, 1], Provenance::Received { hop: 1, slot: 1 });

    // Current time: hop 2, slot 1. The candidate rows another node heard.
    let current = (2, 1);
    let cases = [
        ("past + in span", vec![1, 1, 1], (1, 1)),
        ("past + outside span", vec![0, 1, 0], (1, 1)),
        ("same slot (not yet past)", vec![1, 0, 0], (2, 1)),
        ("future", vec![1, 0, 0], (2, 2)),
    ];

    for (label, row, requested) in cases {
        let verdict = reconstruct_row(&state, &node, &row, requested, current);
        print!(
            "reconstruct {row:?} heard at hop {} slot {} (now hop {} slot {}): ",
            requested.0, requested.1, current.0, current.1
        );
        match verdict {
            Ok(_) => println!("allowed        [{label}]"),
            Err(e) => println!("refused: {e}        [{label}]"),
        }
    }

    println!();
    println!("span membership is about linear combinations, not literal rows:");
    println!("  (1 1 1) = (1 0 0) + (0 1 1) is reconstructible,");
    println!("  (0 1 0) is not, even though v1 \"almost\" knows it.");
}
