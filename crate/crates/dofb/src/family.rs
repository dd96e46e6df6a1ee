//! Generators for the canonical network families.
//!
//! Each generator returns a canonical, validated [`LayeredNetwork`]. The
//! fixed topologies (`fig-2d1d2`, `fig-3d1d2`, `fig-full-dof`,
//! `d1d2-one-half`) are small named networks; `m-d1d2`, `two-bounds`, and
//! `set-size-to-rank` are parameterized; `random-layered` draws seeded
//! random instances for property testing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::network::{LayeredNetwork, NodeId};

/// Parameters selecting one concrete network.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyParams {
    /// 4-layer network with a 2-bottleneck node `v4` for `d1`.
    Fig2D1D2,
    /// 4-layer network with a 3-bottleneck node `v5` for `d1`.
    Fig3D1D2,
    /// 4-layer network with no bottleneck node; the full (1,1) DoF pair is
    /// achievable on it.
    FigFullDof,
    /// 3-layer network with no bottleneck node whose true DoF region is
    /// nevertheless strictly smaller than the unit square.
    D1D2OneHalf,
    /// `m`-parameterized family with an m-bottleneck node for `d1`;
    /// requires `m ≥ 2`.
    MD1D2 { m: usize },
    /// Concatenation of `MD1D2{m}` with its flipped copy: one m-bottleneck
    /// node per destination; requires `m ≥ 2`.
    TwoBounds { m: usize },
    /// `Fig3D1D2` plus `k` extra second-layer relays, growing the minimum
    /// cut size `|M|` while the rank ρ stays 3.
    SetSizeToRank { k: usize },
    /// Seeded random layered network with the given interior layer sizes
    /// and edge density; resampled until both sessions are connected.
    RandomLayered {
        interior: Vec<usize>,
        density: f64,
        seed: u64,
    },
}

/// Errors from [`gen_family`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error(
        "could not sample a connected random network in {0} attempts \
         (raise the density or layer sizes)"
    )]
    ResampleExhausted(usize),
}

/// Maximum resampling attempts for `random-layered` before giving up.
pub const RANDOM_RESAMPLE_LIMIT: usize = 1000;

fn n(name: &str) -> NodeId {
    NodeId::from(name)
}

fn v(i: usize) -> NodeId {
    NodeId::from(format!("v{i}"))
}

fn build(layers: Vec<Vec<NodeId>>, edges: Vec<(NodeId, NodeId)>) -> LayeredNetwork {
    LayeredNetwork::new(layers, edges, (n("s1"), n("s2")), (n("d1"), n("d2")))
        .expect("generator output is valid by construction")
}

/// Generates the network selected by `params`.
pub fn gen_family(params: &FamilyParams) -> Result<LayeredNetwork, FamilyError> {
    match params {
        FamilyParams::Fig2D1D2 => Ok(fig_2d1d2()),
        FamilyParams::Fig3D1D2 => Ok(fig_3d1d2()),
        FamilyParams::FigFullDof => Ok(fig_full_dof()),
        FamilyParams::D1D2OneHalf => Ok(d1d2_one_half()),
        FamilyParams::MD1D2 { m } => m_d1d2(*m),
        FamilyParams::TwoBounds { m } => two_bounds(*m),
        FamilyParams::SetSizeToRank { k } => Ok(set_size_to_rank(*k)),
        FamilyParams::RandomLayered {
            interior,
            density,
            seed,
        } => random_layered(interior, *density, *seed),
    }
}

fn fig_2d1d2() -> LayeredNetwork {
    build(
        vec![
            vec![n("s1"), n("s2")],
            vec![v(1), v(2), v(3)],
            vec![v(4), v(5)],
            vec![n("d1"), n("d2")],
        ],
        vec![
            (n("s1"), v(1)),
            (n("s2"), v(2)),
            (n("s2"), v(3)),
            (v(1), v(4)),
            (v(2), v(4)),
            (v(3), v(4)),
            (v(2), v(5)),
            (v(3), v(5)),
            (v(4), n("d1")),
            (v(5), n("d2")),
        ],
    )
}

fn fig_3d1d2() -> LayeredNetwork {
    build(
        vec![
            vec![n("s1"), n("s2")],
            vec![v(1), v(2), v(3), v(4)],
            vec![v(5), v(6), v(7)],
            vec![n("d1"), n("d2")],
        ],
        vec![
            (n("s1"), v(1)),
            (n("s2"), v(2)),
            (n("s2"), v(3)),
            (n("s2"), v(4)),
            (v(1), v(5)),
            (v(2), v(5)),
            (v(2), v(6)),
            (v(3), v(5)),
            (v(3), v(6)),
            (v(3), v(7)),
            (v(4), v(5)),
            (v(4), v(7)),
            (v(5), n("d1")),
            (v(6), n("d2")),
            (v(7), n("d2")),
        ],
    )
}

fn fig_full_dof() -> LayeredNetwork {
    build(
        vec![
            vec![n("s1"), n("s2")],
            vec![v(1), v(2), v(3), v(4), v(5)],
            vec![v(6), v(7), v(8)],
            vec![n("d1"), n("d2")],
        ],
        vec![
            (n("s1"), v(1)),
            (n("s1"), v(2)),
            (n("s2"), v(3)),
            (n("s2"), v(4)),
            (n("s2"), v(5)),
            (v(1), v(6)),
            (v(1), v(7)),
            (v(2), v(6)),
            (v(2), v(7)),
            (v(3), v(6)),
            (v(3), v(8)),
            (v(4), v(6)),
            (v(4), v(7)),
            (v(4), v(8)),
            (v(5), v(6)),
            (v(5), v(7)),
            (v(5), v(8)),
            (v(6), n("d1")),
            (v(7), n("d1")),
            (v(8), n("d2")),
        ],
    )
}

fn d1d2_one_half() -> LayeredNetwork {
    build(
        vec![
            vec![n("s1"), n("s2")],
            vec![v(1), v(2), v(3)],
            vec![n("d1"), n("d2")],
        ],
        vec![
            (n("s1"), v(1)),
            (n("s1"), v(2)),
            (n("s2"), v(1)),
            (n("s2"), v(2)),
            (n("s2"), v(3)),
            (v(1), n("d1")),
            (v(1), n("d2")),
            (v(2), n("d1")),
            (v(2), n("d2")),
            (v(3), n("d2")),
        ],
    )
}

fn m_d1d2(m: usize) -> Result<LayeredNetwork, FamilyError> {
    if m < 2 {
        return Err(FamilyError::InvalidParams(format!(
            "m-d1d2 requires m >= 2, got {m}"
        )));
    }
    let mut edges = vec![(n("s1"), v(1))];
    for j in 2..=m + 1 {
        edges.push((n("s2"), v(j)));
    }
    // v1 feeds only the d1-side relay v_{m+2}; every other second-layer
    // node feeds the whole third layer.
    edges.push((v(1), v(m + 2)));
    for j in 2..=m + 1 {
        for t in m + 2..=2 * m + 1 {
            edges.push((v(j), v(t)));
        }
    }
    edges.push((v(m + 2), n("d1")));
    for t in m + 3..=2 * m + 1 {
        edges.push((v(t), n("d2")));
    }
    Ok(build(
        vec![
            vec![n("s1"), n("s2")],
            (1..=m + 1).map(v).collect(),
            (m + 2..=2 * m + 1).map(v).collect(),
            vec![n("d1"), n("d2")],
        ],
        edges,
    ))
}

fn w(i: usize) -> NodeId {
    NodeId::from(format!("w{i}"))
}

fn two_bounds(m: usize) -> Result<LayeredNetwork, FamilyError> {
    if m < 2 {
        return Err(FamilyError::InvalidParams(format!(
            "two-bounds requires m >= 2, got {m}"
        )));
    }
    // Direct construction of concatenate(m_d1d2(m), flip(m_d1d2(m))) with
    // the canonical boundary names u1, u2 and w-prefixed second half.
    let mut edges = vec![(n("s1"), v(1))];
    for j in 2..=m + 1 {
        edges.push((n("s2"), v(j)));
    }
    edges.push((v(1), v(m + 2)));
    for j in 2..=m + 1 {
        for t in m + 2..=2 * m + 1 {
            edges.push((v(j), v(t)));
        }
    }
    // First copy's destinations become the boundary: d1 ≡ u1, d2 ≡ u2.
    edges.push((v(m + 2), n("u1")));
    for t in m + 3..=2 * m + 1 {
        edges.push((v(t), n("u2")));
    }
    // Second (flipped) copy: its session-1 source is u2, session-2 is u1,
    // so u1 plays the old s2 role (feeding w2..w_{m+1}) and u2 the old s1
    // role (feeding w1 only).
    edges.push((n("u2"), w(1)));
    for j in 2..=m + 1 {
        edges.push((n("u1"), w(j)));
    }
    edges.push((w(1), w(m + 2)));
    for j in 2..=m + 1 {
        for t in m + 2..=2 * m + 1 {
            edges.push((w(j), w(t)));
        }
    }
    // Flipped destinations: the old d1-side relay now serves d2.
    edges.push((w(m + 2), n("d2")));
    for t in m + 3..=2 * m + 1 {
        edges.push((w(t), n("d1")));
    }
    Ok(build(
        vec![
            vec![n("s1"), n("s2")],
            (1..=m + 1).map(v).collect(),
            (m + 2..=2 * m + 1).map(v).collect(),
            vec![n("u1"), n("u2")],
            (1..=m + 1).map(w).collect(),
            (m + 2..=2 * m + 1).map(w).collect(),
            vec![n("d1"), n("d2")],
        ],
        edges,
    ))
}

fn set_size_to_rank(k: usize) -> LayeredNetwork {
    let base = fig_3d1d2();
    let mut layers = base.layers.clone();
    let mut edges = base.edges.clone();
    for i in 1..=k {
        let x = NodeId::from(format!("x{i}"));
        layers[1].push(x.clone());
        edges.push((n("s2"), x.clone()));
        edges.push((x.clone(), v(5)));
        edges.push((x.clone(), v(6)));
        edges.push((x, v(7)));
    }
    LayeredNetwork::new(layers, edges, base.sources, base.destinations)
        .expect("set-size-to-rank output is valid by construction")
}

fn random_layered(
    interior: &[usize],
    density: f64,
    seed: u64,
) -> Result<LayeredNetwork, FamilyError> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(FamilyError::InvalidParams(format!(
            "density must be in (0, 1], got {density}"
        )));
    }
    if interior.contains(&0) {
        return Err(FamilyError::InvalidParams(
            "interior layer sizes must be positive".into(),
        ));
    }
    let mut layers: Vec<Vec<NodeId>> = vec![vec![n("s1"), n("s2")]];
    for (i, &size) in interior.iter().enumerate() {
        layers.push(
            (1..=size)
                .map(|j| NodeId::from(format!("x{}_{}", i + 2, j)))
                .collect(),
        );
    }
    layers.push(vec![n("d1"), n("d2")]);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_RESAMPLE_LIMIT {
        let mut edges = Vec::new();
        for pair in layers.windows(2) {
            for from in &pair[0] {
                for to in &pair[1] {
                    if rng.random_bool(density) {
                        edges.push((from.clone(), to.clone()));
                    }
                }
            }
        }
        let candidate = LayeredNetwork::new(
            layers.clone(),
            edges,
            (n("s1"), n("s2")),
            (n("d1"), n("d2")),
        )
        .expect("random layered structure is valid by construction");
        if candidate.has_path(&n("s1"), &n("d1")) && candidate.has_path(&n("s2"), &n("d2")) {
            return Ok(candidate);
        }
    }
    Err(FamilyError::ResampleExhausted(RANDOM_RESAMPLE_LIMIT))
}

/// CLI-facing family names for the non-random families.
pub const FAMILY_NAMES: &[&str] = &[
    "fig-2d1d2",
    "fig-3d1d2",
    "fig-full-dof",
    "d1d2-one-half",
    "m-d1d2",
    "two-bounds",
    "set-size-to-rank",
];

/// Resolves a CLI family name plus optional `m`/`k` arguments.
///
/// `random-layered` is intentionally not constructible here: its layer-size
/// and density parameters have no CLI flags, so it stays library-only.
pub fn params_from_name(
    family: &str,
    m: Option<usize>,
    k: Option<usize>,
) -> Result<FamilyParams, FamilyError> {
    let need_m =
        || m.ok_or_else(|| FamilyError::InvalidParams(format!("family {family} requires --m")));
    match family {
        "fig-2d1d2" => Ok(FamilyParams::Fig2D1D2),
        "fig-3d1d2" => Ok(FamilyParams::Fig3D1D2),
        "fig-full-dof" => Ok(FamilyParams::FigFullDof),
        "d1d2-one-half" => Ok(FamilyParams::D1D2OneHalf),
        "m-d1d2" => Ok(FamilyParams::MD1D2 { m: need_m()? }),
        "two-bounds" => Ok(FamilyParams::TwoBounds { m: need_m()? }),
        "set-size-to-rank" => Ok(FamilyParams::SetSizeToRank {
            k: k.ok_or_else(|| {
                FamilyError::InvalidParams("family set-size-to-rank requires --k".into())
            })?,
        }),
        other => Err(FamilyError::InvalidParams(format!(
            "unknown family {other:?} (expected one of {})",
            FAMILY_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::network::concatenate;

    #[test]
    fn all_fixed_families_validate() {
        for params in [
            FamilyParams::Fig2D1D2,
            FamilyParams::Fig3D1D2,
            FamilyParams::FigFullDof,
            FamilyParams::D1D2OneHalf,
            FamilyParams::MD1D2 { m: 4 },
            FamilyParams::TwoBounds { m: 3 },
            FamilyParams::SetSizeToRank { k: 2 },
        ] {
            let net = gen_family(&params).expect("generates");
            assert!(net.validate().is_empty(), "{params:?} must validate");
        }
    }

    #[test]
    fn fig_3d1d2_parent_sets() {
        let net = gen_family(&FamilyParams::Fig3D1D2).unwrap();
        assert_eq!(
            net.parents(&v(5)).unwrap(),
            [v(1), v(2), v(3), v(4)].into_iter().collect()
        );
        assert_eq!(
            net.parents(&v(6)).unwrap(),
            [v(2), v(3)].into_iter().collect()
        );
        assert_eq!(
            net.parents(&v(7)).unwrap(),
            [v(3), v(4)].into_iter().collect()
        );
    }

    #[test]
    fn m_d1d2_layer_sizes_and_v1_fanout() {
        for m in 2..=8 {
            let net = gen_family(&FamilyParams::MD1D2 { m }).unwrap();
            let sizes: Vec<usize> = net.layers.iter().map(|l| l.len()).collect();
            assert_eq!(sizes, vec![2, m + 1, m, 2]);
            // v1 is connected only to v_{m+2}.
            assert_eq!(
                net.children(&v(1)),
                [v(m + 2)].into_iter().collect::<BTreeSet<_>>()
            );
            assert_eq!(
                net.parents(&v(m + 2)).unwrap(),
                (1..=m + 1).map(v).collect::<BTreeSet<_>>()
            );
        }
    }

    #[test]
    fn m_d1d2_m4_parent_example() {
        let net = gen_family(&FamilyParams::MD1D2 { m: 4 }).unwrap();
        assert_eq!(
            net.parents(&v(6)).unwrap(),
            (1..=5).map(v).collect::<BTreeSet<_>>()
        );
        let node_count: usize = net.layers.iter().map(|l| l.len()).sum();
        assert_eq!(node_count, 13);
    }

    #[test]
    fn generators_reject_degenerate_m() {
        assert!(matches!(
            gen_family(&FamilyParams::MD1D2 { m: 1 }),
            Err(FamilyError::InvalidParams(_))
        ));
        assert!(matches!(
            gen_family(&FamilyParams::TwoBounds { m: 0 }),
            Err(FamilyError::InvalidParams(_))
        ));
    }

    #[test]
    fn two_bounds_equals_concatenated_flipped_copies() {
        for m in 2..=4 {
            let half = gen_family(&FamilyParams::MD1D2 { m }).unwrap();
            let merged = concatenate(&half, &half.flip()).expect("concatenates");
            let direct = gen_family(&FamilyParams::TwoBounds { m }).unwrap();
            assert_eq!(merged, direct, "m={m}");
            assert_eq!(direct.layer_count(), 7);
        }
    }

    #[test]
    fn set_size_to_rank_extends_fig_3d1d2_conservatively() {
        let base = gen_family(&FamilyParams::SetSizeToRank { k: 0 }).unwrap();
        assert_eq!(base, gen_family(&FamilyParams::Fig3D1D2).unwrap());
        let k2 = gen_family(&FamilyParams::SetSizeToRank { k: 2 }).unwrap();
        // All original edges survive.
        for edge in &base.edges {
            assert!(k2.edges.contains(edge));
        }
        assert_eq!(k2.layers[1].len(), 6);
        assert_eq!(
            k2.children(&NodeId::from("x1")),
            [v(5), v(6), v(7)].into_iter().collect::<BTreeSet<_>>()
        );
    }

    #[test]
    fn random_layered_is_seeded_and_connected() {
        let params = FamilyParams::RandomLayered {
            interior: vec![3, 4],
            density: 0.5,
            seed: 11,
        };
        let a = gen_family(&params).unwrap();
        let b = gen_family(&params).unwrap();
        assert_eq!(a, b, "same seed must give the same network");
        assert!(a.has_path(&n("s1"), &n("d1")));
        assert!(a.has_path(&n("s2"), &n("d2")));
        assert!(a.validate().is_empty());

        let other = gen_family(&FamilyParams::RandomLayered {
            interior: vec![3, 4],
            density: 0.5,
            seed: 12,
        })
        .unwrap();
        assert_ne!(a, other, "different seeds should differ at density 0.5");
    }

    #[test]
    fn random_layered_rejects_bad_parameters() {
        assert!(matches!(
            gen_family(&FamilyParams::RandomLayered {
                interior: vec![2],
                density: 0.0,
                seed: 0
            }),
            Err(FamilyError::InvalidParams(_))
        ));
        assert!(matches!(
            gen_family(&FamilyParams::RandomLayered {
                interior: vec![0],
                density: 0.5,
                seed: 0
            }),
            Err(FamilyError::InvalidParams(_))
        ));
    }

    #[test]
    fn cli_name_resolution() {
        assert_eq!(
            params_from_name("fig-3d1d2", None, None),
            Ok(FamilyParams::Fig3D1D2)
        );
        assert_eq!(
            params_from_name("m-d1d2", Some(4), None),
            Ok(FamilyParams::MD1D2 { m: 4 })
        );
        assert!(params_from_name("m-d1d2", None, None).is_err());
        assert!(params_from_name("bogus", None, None).is_err());
    }
}
