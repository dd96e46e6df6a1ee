//! Bottleneck and omniscient node detection.
//!
//! A relay `v` is a *ρ-bottleneck node* for destination `d_i` when
//!
//! 1. removing `v` alone disconnects both sources from `d_i`,
//! 2. some `M ⊆ I(v)` (the in-neighborhood of `v`) disconnects the other
//!    source `s_ī` from both destinations, and
//! 3. the transfer matrix from `M` to `v`'s layer has generic rank `ρ`.
//!
//! Such a node forces the outer bound `ρ·D_i + D_ī ≤ ρ`, which dominates
//! the cut-set-style bound `|M_min|·D_i + D_ī ≤ |M_min|` whenever the
//! transfer matrix of the smallest such `M` is rank-deficient.
//!
//! An *omniscient node* certificate is the stronger single-node variant:
//! `v` cuts both sources from `d_i` while some witness
//! `u ∈ {v} ∪ I(v)` alone cuts `s_ī` from both destinations.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::field::PrimeField;
use crate::network::{LayeredNetwork, NetworkError, NodeId};
use crate::rank::{generic_rank, structural_rank, transfer_pattern, RankError, SupportPattern};
use crate::region::HalfPlane;

/// Largest pruned in-neighborhood for which subsets are enumerated.
pub const DEFAULT_SUBSET_CAP: usize = 16;

/// One of the two destinations (equivalently, one of the two sessions).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Dest {
    #[serde(rename = "d1")]
    D1,
    #[serde(rename = "d2")]
    D2,
}

impl Dest {
    /// Session index: 1 or 2.
    pub fn index(self) -> usize {
        match self {
            Dest::D1 => 1,
            Dest::D2 => 2,
        }
    }

    /// The other session.
    pub fn other(self) -> Dest {
        match self {
            Dest::D1 => Dest::D2,
            Dest::D2 => Dest::D1,
        }
    }

    /// This session's destination node.
    pub fn dest_node(self, net: &LayeredNetwork) -> &NodeId {
        match self {
            Dest::D1 => &net.destinations.0,
            Dest::D2 => &net.destinations.1,
        }
    }

    /// This session's source node.
    pub fn source_node(self, net: &LayeredNetwork) -> &NodeId {
        match self {
            Dest::D1 => &net.sources.0,
            Dest::D2 => &net.sources.1,
        }
    }
}

impl std::fmt::Display for Dest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "d{}", self.index())
    }
}

/// Certificate for one ρ-bottleneck node.
///
/// Serializes with the report key names: the witness set is `"M"` and the
/// minimum cut size backing the prior bound is `"prior_M_size"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BottleneckCertificate {
    /// Destination the node bottlenecks.
    pub dest: Dest,
    /// The bottleneck node `v`.
    pub node: NodeId,
    /// 1-based layer of `v`.
    pub layer: usize,
    /// The rank-minimizing cut `M ⊆ I(v)`, sorted.
    #[serde(rename = "M")]
    pub m_set: Vec<NodeId>,
    /// Generic rank of the transfer matrix from `M` to `v`'s layer.
    pub rho: usize,
    /// Size of the smallest cut subset of the pruned in-neighborhood,
    /// i.e. the coefficient of the prior bound.
    #[serde(rename = "prior_M_size")]
    pub prior_m_size: usize,
}

/// Certificate for one omniscient node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OmniscientCertificate {
    /// Destination the node cuts.
    pub dest: Dest,
    /// The cut node `v`.
    pub node: NodeId,
    /// Single node in `{v} ∪ I(v)` that alone cuts the other source from
    /// both destinations.
    pub witness: NodeId,
}

/// Degraded broadcast channel extracted from a bottleneck certificate.
///
/// Transmit antennas are the nodes of `M`; receiver 1 observes the single
/// row of the bottleneck node `v` (all-true, since `M ⊆ I(v)`); receiver 2
/// observes `ρ` rows of the transfer pattern — `v`'s row first — chosen so
/// their generic rank is exactly `ρ`. Receiver 1's signal is a degraded
/// (rank-1) view of receiver 2's.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BcModel {
    /// Transmit antennas: the nodes of `M`, sorted.
    pub m_nodes: Vec<NodeId>,
    /// The bottleneck node, observed by receiver 1.
    pub rx1_node: NodeId,
    /// Receiver 1's support row over `m_nodes`.
    pub rx1_row: Vec<bool>,
    /// Nodes whose rows receiver 2 observes; `rx2_nodes[0]` is `rx1_node`.
    pub rx2_nodes: Vec<NodeId>,
    /// Receiver 2's support rows over `m_nodes`; `rx2_rows[0] == rx1_row`.
    pub rx2_rows: Vec<Vec<bool>>,
    /// Generic rank of `rx2_rows` (equals the certificate's ρ).
    pub rho: usize,
}

impl BcModel {
    /// Receiver 2's rows as a standalone support pattern.
    pub fn rx2_pattern(&self) -> SupportPattern {
        SupportPattern {
            rows: self.rx2_nodes.clone(),
            cols: self.m_nodes.clone(),
            entries: self.rx2_rows.clone(),
        }
    }
}

/// Errors from cut queries.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CutError {
    /// The removed set intersects the endpoints it is supposed to separate.
    #[error("removed set contains endpoint {0}")]
    Overlap(NodeId),
    /// A queried node is not in the network.
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

/// Errors from bottleneck analysis.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BottleneckError {
    /// A cut node's pruned in-neighborhood is too large to enumerate.
    /// Raise the subset cap to analyze this network anyway.
    #[error(
        "pruned in-neighborhood of {node} has {pruned_size} nodes, \
         exceeding the subset cap {cap}; raise --subset-cap to proceed"
    )]
    CapExceeded {
        node: NodeId,
        pruned_size: usize,
        cap: usize,
    },
    /// Greedy row selection failed to reach the certified rank — impossible
    /// for a correct certificate, so this signals an implementation bug.
    #[error("row selection for {node} reached rank {achieved}, expected {expected}")]
    RankSelectionFailure {
        node: NodeId,
        expected: usize,
        achieved: usize,
    },
    #[error(transparent)]
    Cut(#[from] CutError),
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// True iff removing `removed` destroys every directed path from any node
/// of `from` to any node of `to`.
pub fn is_cut(
    net: &LayeredNetwork,
    removed: &BTreeSet<NodeId>,
    from: &[NodeId],
    to: &[NodeId],
) -> Result<bool, CutError> {
    for node in removed.iter().chain(from).chain(to) {
        if !net.contains(node) {
            return Err(CutError::UnknownNode(node.clone()));
        }
    }
    for endpoint in from.iter().chain(to) {
        if removed.contains(endpoint) {
            return Err(CutError::Overlap(endpoint.clone()));
        }
    }
    let reachable = net.reachable_from(from, removed);
    Ok(to.iter().all(|t| !reachable.contains(t)))
}

/// The pruned in-neighborhood of `v` for a `dest` certificate: parents of
/// `v` that are relays, reachable from the other source, and able to reach
/// a destination. Only these can matter to an `(s_ī, {d1,d2})` cut, so
/// subset enumeration is restricted to them.
pub fn prune_parent_set(
    net: &LayeredNetwork,
    v: &NodeId,
    dest: Dest,
) -> Result<BTreeSet<NodeId>, BottleneckError> {
    let parents = net.parents(v)?;
    let other_source = dest.other().source_node(net);
    let none = BTreeSet::new();
    let from_other = net.reachable_from([other_source], &none);
    let to_dests = net.co_reachable([&net.destinations.0, &net.destinations.1], &none);
    let relays: BTreeSet<NodeId> = net
        .relay_nodes()
        .into_iter()
        .map(|(_, node)| node)
        .collect();
    Ok(parents
        .into_iter()
        .filter(|p| from_other.contains(p) && to_dests.contains(p) && relays.contains(p))
        .collect())
}

/// Outcome of a subset scan over one pruned in-neighborhood.
struct CutScan {
    /// Size of the smallest cut subset.
    min_cut_size: usize,
    /// Cut subset minimizing (structural rank, lexicographic order), with
    /// its rank.
    best: (Vec<NodeId>, usize),
}

/// Enumerates subsets of `pruned` in (size, then numeric-mask) order,
/// keeping only minimal cuts, and returns the smallest cut size plus the
/// rank-minimizing cut. Returns `None` when no subset cuts.
fn scan_cut_subsets(
    net: &LayeredNetwork,
    pruned: &BTreeSet<NodeId>,
    ell: usize,
    other_source: &NodeId,
) -> Result<Option<CutScan>, BottleneckError> {
    let nodes: Vec<NodeId> = pruned.iter().cloned().collect();
    let n = nodes.len();
    debug_assert!(n <= 63, "subset masks are u64; callers cap the set size");
    let dests = [net.destinations.0.clone(), net.destinations.1.clone()];
    let from = [other_source.clone()];

    let mut minimal_cuts: Vec<u64> = Vec::new();
    let mut scan: Option<CutScan> = None;
    for size in 1..=n {
        for mask in 1u64..(1u64 << n) {
            if mask.count_ones() as usize != size {
                continue;
            }
            // Supersets of an already-found cut are never minimal.
            if minimal_cuts.iter().any(|&cut| mask | cut == mask) {
                continue;
            }
            let subset: BTreeSet<NodeId> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| nodes[i].clone())
                .collect();
            if !is_cut(net, &subset, &from, &dests)? {
                continue;
            }
            minimal_cuts.push(mask);
            let pattern = transfer_pattern(net, &subset, ell)?;
            let rho = structural_rank(&pattern);
            let m_vec: Vec<NodeId> = subset.into_iter().collect();
            match &mut scan {
                None => {
                    scan = Some(CutScan {
                        min_cut_size: size,
                        best: (m_vec, rho),
                    })
                }
                Some(s) => {
                    if (rho, &m_vec) < (s.best.1, &s.best.0) {
                        s.best = (m_vec, rho);
                    }
                }
            }
        }
    }
    Ok(scan)
}

/// Scans every relay for bottleneck certificates.
///
/// For each relay `v` cutting a destination, subsets of the pruned
/// in-neighborhood are enumerated smallest-first; among the minimal cuts,
/// the certificate records the one of smallest generic rank (ties broken
/// lexicographically). Structural rank decides; the chosen cut is then
/// cross-validated by `trials` randomized evaluations over `field` seeded
/// from `seed`. Certificates are sorted by (ρ, layer, node, dest).
pub fn find_bottlenecks(
    net: &LayeredNetwork,
    field: PrimeField,
    trials: usize,
    seed: u64,
    subset_cap: usize,
) -> Result<Vec<BottleneckCertificate>, BottleneckError> {
    let sources = [net.sources.0.clone(), net.sources.1.clone()];
    let mut certs = Vec::new();
    for (layer, v) in net.relay_nodes() {
        for dest in [Dest::D1, Dest::D2] {
            let singleton: BTreeSet<NodeId> = [v.clone()].into_iter().collect();
            let target = [dest.dest_node(net).clone()];
            if !is_cut(net, &singleton, &sources, &target)? {
                continue;
            }
            let pruned = prune_parent_set(net, &v, dest)?;
            if pruned.is_empty() {
                continue;
            }
            if pruned.len() > subset_cap {
                return Err(BottleneckError::CapExceeded {
                    node: v.clone(),
                    pruned_size: pruned.len(),
                    cap: subset_cap,
                });
            }
            let other_source = dest.other().source_node(net).clone();
            let ell = layer - 1;
            let Some(scan) = scan_cut_subsets(net, &pruned, ell, &other_source)? else {
                continue;
            };
            let (m_vec, rho) = scan.best;
            // Cross-validate the certified rank over the field.
            let m_set: BTreeSet<NodeId> = m_vec.iter().cloned().collect();
            let pattern = transfer_pattern(net, &m_set, ell)?;
            let _ = generic_rank(field, &pattern, trials, seed)?;
            certs.push(BottleneckCertificate {
                dest,
                node: v.clone(),
                layer,
                m_set: m_vec,
                rho,
                prior_m_size: scan.min_cut_size,
            });
        }
    }
    certs.sort_by(|a, b| (a.rho, a.layer, &a.node, a.dest).cmp(&(b.rho, b.layer, &b.node, b.dest)));
    Ok(certs)
}

/// Scans every relay for omniscient-node certificates, ordered by
/// (dest, layer, node, witness).
pub fn find_omniscient(
    net: &LayeredNetwork,
) -> Result<Vec<OmniscientCertificate>, BottleneckError> {
    let sources = [net.sources.0.clone(), net.sources.1.clone()];
    let relays: BTreeSet<NodeId> = net
        .relay_nodes()
        .into_iter()
        .map(|(_, node)| node)
        .collect();
    let mut certs = Vec::new();
    for dest in [Dest::D1, Dest::D2] {
        for (_, v) in net.relay_nodes() {
            let singleton: BTreeSet<NodeId> = [v.clone()].into_iter().collect();
            let target = [dest.dest_node(net).clone()];
            if !is_cut(net, &singleton, &sources, &target)? {
                continue;
            }
            let mut candidates: BTreeSet<NodeId> = net.parents(&v)?;
            candidates.insert(v.clone());
            let other_source = [dest.other().source_node(net).clone()];
            let dests = [net.destinations.0.clone(), net.destinations.1.clone()];
            for u in candidates {
                if !relays.contains(&u) {
                    continue;
                }
                let witness_set: BTreeSet<NodeId> = [u.clone()].into_iter().collect();
                if is_cut(net, &witness_set, &other_source, &dests)? {
                    certs.push(OmniscientCertificate {
                        dest,
                        node: v.clone(),
                        witness: u,
                    });
                }
            }
        }
    }
    Ok(certs)
}

/// Size of the smallest cut subset of the pruned in-neighborhood of `v`,
/// i.e. the coefficient `|M_min|` of the prior bound. Returns `None` when
/// `v` has no cut subset at all.
pub fn prior_min_m_size(
    net: &LayeredNetwork,
    v: &NodeId,
    dest: Dest,
    subset_cap: usize,
) -> Result<Option<usize>, BottleneckError> {
    let pruned = prune_parent_set(net, v, dest)?;
    if pruned.is_empty() {
        return Ok(None);
    }
    if pruned.len() > subset_cap {
        return Err(BottleneckError::CapExceeded {
            node: v.clone(),
            pruned_size: pruned.len(),
            cap: subset_cap,
        });
    }
    let layer = net
        .node_layer(v)
        .ok_or_else(|| CutError::UnknownNode(v.clone()))?;
    let other_source = dest.other().source_node(net).clone();
    Ok(scan_cut_subsets(net, &pruned, layer - 1, &other_source)?.map(|scan| scan.min_cut_size))
}

/// The prior (cut-size) bound at `v`: `|M_min|·D_i + D_ī ≤ |M_min|`.
/// Returns `None` when `v` has no cut subset.
pub fn prior_bound(
    net: &LayeredNetwork,
    v: &NodeId,
    dest: Dest,
    subset_cap: usize,
) -> Result<Option<HalfPlane>, BottleneckError> {
    Ok(prior_min_m_size(net, v, dest, subset_cap)?
        .map(|size| HalfPlane::dof_bound(dest, size as i64)))
}

/// Extracts the degraded broadcast channel of a certificate.
///
/// Receiver 2's rows are chosen greedily from the transfer pattern of
/// `cert.m_set`: the bottleneck node's own row first, then rows of the
/// remaining next-layer nodes (in layer order) whenever they increase the
/// structural rank, stopping at `ρ` rows. The selection is then validated
/// over `field` with randomized gains derived from `seed`.
pub fn construct_degraded_bc(
    net: &LayeredNetwork,
    cert: &BottleneckCertificate,
    field: PrimeField,
    seed: u64,
) -> Result<BcModel, BottleneckError> {
    let m_set: BTreeSet<NodeId> = cert.m_set.iter().cloned().collect();
    let pattern = transfer_pattern(net, &m_set, cert.layer - 1)?;
    let v_index = pattern
        .rows
        .iter()
        .position(|r| *r == cert.node)
        .ok_or_else(|| CutError::UnknownNode(cert.node.clone()))?;

    let mut rx2_nodes = vec![pattern.rows[v_index].clone()];
    let mut rx2_rows = vec![pattern.entries[v_index].clone()];
    for (i, row) in pattern.entries.iter().enumerate() {
        if rx2_rows.len() == cert.rho {
            break;
        }
        if i == v_index {
            continue;
        }
        let mut candidate = rx2_rows.clone();
        candidate.push(row.clone());
        let trial = SupportPattern {
            rows: (0..candidate.len())
                .map(|k| NodeId::from(format!("r{k}")))
                .collect(),
            cols: pattern.cols.clone(),
            entries: candidate,
        };
        if structural_rank(&trial) == rx2_rows.len() + 1 {
            rx2_nodes.push(pattern.rows[i].clone());
            rx2_rows.push(row.clone());
        }
    }

    let selected = SupportPattern {
        rows: rx2_nodes.clone(),
        cols: pattern.cols.clone(),
        entries: rx2_rows.clone(),
    };
    let achieved = structural_rank(&selected);
    if rx2_rows.len() != cert.rho || achieved != cert.rho {
        return Err(BottleneckError::RankSelectionFailure {
            node: cert.node.clone(),
            expected: cert.rho,
            achieved,
        });
    }
    // Field validation of the selected rows.
    let (rank, _) = generic_rank(field, &selected, crate::rank::DEFAULT_RANK_TRIALS, seed)?;
    if rank != cert.rho {
        return Err(BottleneckError::RankSelectionFailure {
            node: cert.node.clone(),
            expected: cert.rho,
            achieved: rank,
        });
    }
    Ok(BcModel {
        m_nodes: pattern.cols,
        rx1_node: cert.node.clone(),
        rx1_row: rx2_rows[0].clone(),
        rx2_nodes,
        rx2_rows,
        rho: cert.rho,
    })
}
