//! Runs every library transmission scheme over random channel draws and
//! compares the achieved degrees of freedom with the exact outer region.
//!
//! Run with: cargo run --example run_schemes

use dofb::bottleneck::{find_bottlenecks, DEFAULT_SUBSET_CAP};
use dofb::engine::simulate;
use dofb::rank::DEFAULT_RANK_TRIALS;
use dofb::region::build_region;
use dofb::schemes::{
    scheme_2d1d2, scheme_example1, scheme_example2, scheme_m_d1d2, scheme_two_bounds,
};
use dofb::PrimeField;

fn main() {
    let field = PrimeField::default();
    let trials = 50;
    let seed = 42;
    let bundles = [
        ("2d1d2 scheme", scheme_2d1d2()),
        ("first worked example", scheme_example1()),
        ("second worked example", scheme_example2()),
        ("m-d1d2 m=4", scheme_m_d1d2(4).unwrap()),
        ("two-bounds m=3", scheme_two_bounds(3).unwrap()),
    ];

    for (name, bundle) in bundles {
        let report = simulate(
            &bundle.network,
            &bundle.program,
            bundle.space,
            trials,
            seed,
            field,
        )
        .expect("library schemes are legal");

        let certs = find_bottlenecks(
            &bundle.network,
            field,
            DEFAULT_RANK_TRIALS,
            seed,
            DEFAULT_SUBSET_CAP,
        )
        .expect("analysis fits under the default subset cap");
        let region = build_region(&certs);

        println!("{name}:");
        println!(
            "  decoded d1 {}/{} trials, d2 {}/{}",
            report.decode_d1, trials, report.decode_d2, trials
        );
        match report.achieved {
            Some(pair) => {
                println!("  achieved DoF ({}, {})", pair.0, pair.1);
                println!(
                    "  outer region: contains it {}, as a vertex {}",
                    region.contains(pair),
                    region.vertices.contains(&pair),
                );
            }
            None => println!("  some trials failed to decode"),
        }
        println!();
    }
}
