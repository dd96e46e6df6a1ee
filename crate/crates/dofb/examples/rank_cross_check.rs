//! Cross-validates the two generic-rank routes: exact structural rank via
//! bipartite matching, and randomized rank over a large prime field.
//!
//! Run with: cargo run --example rank_cross_check

use dofb::rank::{field_rank, structural_rank, GainAssignment, SupportPattern};
use dofb::PrimeField;

fn show(name: &str, entries: Vec<Vec<bool>>) {
    let field = PrimeField::default();
    let pat = SupportPattern::from_bool_matrix(entries.clone());
    let structural = structural_rank(&pat);

    println!("{name}:");
    for row in &entries {
        let cells: Vec<&str> = row.iter().map(|&b| if b { "*" } else { "." }).collect();
        println!("    [{}]", cells.join(" "));
    }
    println!("  structural rank {structural}");
    for seed in 0..3 {
        let gains = GainAssignment::random_for_pattern(field, &pat, seed);
        let fr = field_rank(&pat, &gains).expect("pattern and gains agree");
        println!("  field rank {fr} at seed {seed} (never exceeds structural)");
        assert!(fr <= structural);
    }
    println!();
}

fn main() {
    println!("modulus: {}\n", PrimeField::default().modulus());

    show(
        "full 3x3 pattern",
        vec![vec![true; 3], vec![true; 3], vec![true; 3]],
    );
    show(
        "rank-deficient by structure (one live column)",
        vec![
            vec![true, false, false],
            vec![true, false, false],
            vec![true, false, false],
        ],
    );
    show(
        "staircase",
        vec![
            vec![true, true, false, false],
            vec![false, true, true, false],
            vec![false, false, true, true],
        ],
    );
    show(
        "wide with an empty row",
        vec![
            vec![false, false, false, false, false],
            vec![true, true, true, true, true],
        ],
    );
}
