//! Computes exact outer DoF regions for several networks and prints their
//! constraints, vertices, best sum DoF, and membership in the set
//! S = {2(1 - 1/k) : k >= 1} ∪ {2}.
//!
//! Run with: cargo run --example outer_regions

use dofb::bottleneck::{find_bottlenecks, DEFAULT_SUBSET_CAP};
use dofb::family::{gen_family, FamilyParams};
use dofb::rank::DEFAULT_RANK_TRIALS;
use dofb::region::{build_region, expressible_by_bottleneck_bounds, in_s, sum_dof};
use dofb::PrimeField;

fn main() {
    let field = PrimeField::default();
    let cases = [
        ("fig-2d1d2", FamilyParams::Fig2D1D2),
        ("fig-3d1d2", FamilyParams::Fig3D1D2),
        ("fig-full-dof", FamilyParams::FigFullDof),
        ("m-d1d2 m=6", FamilyParams::MD1D2 { m: 6 }),
        ("two-bounds m=4", FamilyParams::TwoBounds { m: 4 }),
    ];

    for (name, params) in cases {
        let net = gen_family(&params).expect("built-in families generate");
        let certs = find_bottlenecks(&net, field, DEFAULT_RANK_TRIALS, 0, DEFAULT_SUBSET_CAP)
            .expect("analysis fits under the default subset cap");
        let region = build_region(&certs);

        println!("{name}:");
        for constraint in &region.constraints {
            println!("  constraint  {constraint}");
        }
        let corners: Vec<String> = region
            .vertices
            .iter()
            .map(|(x, y)| format!("({x}, {y})"))
            .collect();
        println!("  vertices    {}", corners.join(" "));
        let sum = sum_dof(&region);
        println!("  sum DoF     {sum}  (in S: {})", in_s(sum));
        let verdict = expressible_by_bottleneck_bounds(&region);
        match verdict.witness {
            Some((m1, m2)) => println!("  expressible with witness ({m1}, {m2})"),
            None => println!("  expressible: {}", verdict.expressible),
        }
        println!();
    }
}
