//! Generic rank of transfer matrices.
//!
//! The transfer matrix from a node set `M ⊆ V_ℓ` to the next layer has one
//! independent continuous gain per edge, so its almost-sure rank equals the
//! *structural rank* of its support pattern — the maximum bipartite matching
//! between rows and columns over the `true` entries. Structural rank is the
//! source of truth here; randomized evaluation over the prime field serves
//! as an independent cross-check ([`generic_rank`]), never as the answer.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::{derive_seed, PrimeField};
use crate::linalg;
use crate::network::{LayeredNetwork, NodeId};

/// Boolean support pattern of a transfer matrix.
///
/// Row `i` corresponds to receiving node `rows[i]` in layer `ℓ+1`, column
/// `j` to transmitting node `cols[j] ∈ M`; `entries[i][j]` is true iff the
/// edge `(cols[j], rows[i])` exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportPattern {
    pub rows: Vec<NodeId>,
    pub cols: Vec<NodeId>,
    pub entries: Vec<Vec<bool>>,
}

impl SupportPattern {
    /// `(row count, column count)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    /// Builds a pattern directly from a boolean matrix, naming rows
    /// `r1..` and columns `c1..`. Intended for tests and oracles.
    pub fn from_bool_matrix(entries: Vec<Vec<bool>>) -> Self {
        let rows = (1..=entries.len())
            .map(|i| NodeId::from(format!("r{i}")))
            .collect();
        let cols = (1..=entries.first().map_or(0, Vec::len))
            .map(|j| NodeId::from(format!("c{j}")))
            .collect();
        SupportPattern {
            rows,
            cols,
            entries,
        }
    }
}

/// Errors from rank computations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RankError {
    /// A node handed to [`transfer_pattern`] is not in layer `ℓ`.
    #[error("node {node} is not in layer {layer}")]
    LayerMismatch { node: NodeId, layer: usize },
    /// Layer index out of range (needs a following layer).
    #[error("layer index {0} out of range: need 1 <= l <= r-1")]
    LayerOutOfRange(usize),
    /// A gain required by [`field_rank`] is missing from the assignment.
    #[error("missing gain for edge ({from}, {to})")]
    MissingGain { from: NodeId, to: NodeId },
    /// A field rank exceeded the structural rank — impossible for correct
    /// code, so this signals an implementation bug.
    #[error(
        "internal inconsistency: field rank {field} exceeds structural rank \
         {structural}"
    )]
    InternalInconsistency { structural: usize, field: usize },
}

/// Channel gains: a map from `(edge, slot)` to a nonzero field element.
///
/// A transfer matrix is a single-slot snapshot, so pattern-level ranks read
/// gains at slot 1; the scheme engine draws gains for every slot of every
/// hop.
#[derive(Debug, Clone)]
pub struct GainAssignment {
    field: PrimeField,
    gains: BTreeMap<(NodeId, NodeId, usize), u64>,
}

impl GainAssignment {
    /// Empty assignment over the given field.
    pub fn new(field: PrimeField) -> Self {
        GainAssignment {
            field,
            gains: BTreeMap::new(),
        }
    }

    /// The field the gains live in.
    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Sets the gain of `(from, to)` at `slot` (1-based).
    ///
    /// # Panics
    /// Panics if `value` is zero or not reduced — gains are nonzero by
    /// definition.
    pub fn set(&mut self, from: NodeId, to: NodeId, slot: usize, value: u64) {
        assert!(
            value > 0 && value < self.field.modulus(),
            "gains must be nonzero field elements"
        );
        self.gains.insert((from, to, slot), value);
    }

    /// Gain of `(from, to)` at `slot`, if assigned.
    pub fn get(&self, from: &NodeId, to: &NodeId, slot: usize) -> Option<u64> {
        self.gains.get(&(from.clone(), to.clone(), slot)).copied()
    }

    /// Draws slot-1 gains for every `true` cell of a pattern.
    pub fn random_for_pattern(field: PrimeField, pat: &SupportPattern, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = GainAssignment::new(field);
        for (i, row) in pat.entries.iter().enumerate() {
            for (j, &present) in row.iter().enumerate() {
                if present {
                    let value = field.random_nonzero(&mut rng);
                    out.set(pat.cols[j].clone(), pat.rows[i].clone(), 1, value);
                }
            }
        }
        out
    }

    /// Draws gains for every edge of `net` and every slot of every hop:
    /// edges out of layer `h` get gains for slots `1..=slots_per_hop[h-1]`.
    /// Draw order is deterministic (layer-major, then sorted edges, then
    /// slots), so equal seeds give equal assignments.
    pub fn random_for_network(
        field: PrimeField,
        net: &LayeredNetwork,
        slots_per_hop: &[usize],
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = GainAssignment::new(field);
        for (h, &slots) in slots_per_hop.iter().enumerate() {
            let hop_layer = h + 1;
            for (from, to) in net.edges.iter() {
                if net.node_layer(from) == Some(hop_layer) {
                    for slot in 1..=slots {
                        let value = field.random_nonzero(&mut rng);
                        out.set(from.clone(), to.clone(), slot, value);
                    }
                }
            }
        }
        out
    }
}

/// Builds the support pattern of the transfer matrix from `M ⊆ V_ℓ` to
/// `V_{ℓ+1}` (`ℓ` is 1-based).
pub fn transfer_pattern(
    net: &LayeredNetwork,
    m: &BTreeSet<NodeId>,
    ell: usize,
) -> Result<SupportPattern, RankError> {
    if ell < 1 || ell + 1 > net.layer_count() {
        return Err(RankError::LayerOutOfRange(ell));
    }
    let layer = &net.layers[ell - 1];
    for node in m {
        if !layer.contains(node) {
            return Err(RankError::LayerMismatch {
                node: node.clone(),
                layer: ell,
            });
        }
    }
    let rows: Vec<NodeId> = net.layers[ell].clone();
    let cols: Vec<NodeId> = m.iter().cloned().collect();
    let edge_set: BTreeSet<(&NodeId, &NodeId)> = net.edges.iter().map(|(a, b)| (a, b)).collect();
    let entries = rows
        .iter()
        .map(|u| cols.iter().map(|w| edge_set.contains(&(w, u))).collect())
        .collect();
    Ok(SupportPattern {
        rows,
        cols,
        entries,
    })
}

/// Structural rank: the size of a maximum bipartite matching between rows
/// and columns over `true` entries. Equals the generic (almost-sure) rank
/// of a matrix whose `true` entries are independent continuous random
/// variables.
pub fn structural_rank(pat: &SupportPattern) -> usize {
    let (n_rows, n_cols) = (pat.entries.len(), pat.cols.len());
    // match_of_col[j] = row currently matched to column j.
    let mut match_of_col: Vec<Option<usize>> = vec![None; n_cols];

    fn augment(
        row: usize,
        pat: &SupportPattern,
        visited: &mut [bool],
        match_of_col: &mut [Option<usize>],
    ) -> bool {
        for (j, &present) in pat.entries[row].iter().enumerate() {
            if present && !visited[j] {
                visited[j] = true;
                let free = match match_of_col[j] {
                    None => true,
                    Some(other) => augment(other, pat, visited, match_of_col),
                };
                if free {
                    match_of_col[j] = Some(row);
                    return true;
                }
            }
        }
        false
    }

    let mut size = 0;
    for row in 0..n_rows {
        let mut visited = vec![false; n_cols];
        if augment(row, pat, &mut visited, &mut match_of_col) {
            size += 1;
        }
    }
    size
}

/// Exact rank of the concrete matrix with `true` entries replaced by their
/// gains (slot 1) and `false` entries by zero.
pub fn field_rank(pat: &SupportPattern, gains: &GainAssignment) -> Result<usize, RankError> {
    let field = gains.field();
    let mut rows = Vec::with_capacity(pat.entries.len());
    for (i, row) in pat.entries.iter().enumerate() {
        let mut out = vec![0u64; pat.cols.len()];
        for (j, &present) in row.iter().enumerate() {
            if present {
                out[j] = gains.get(&pat.cols[j], &pat.rows[i], 1).ok_or_else(|| {
                    RankError::MissingGain {
                        from: pat.cols[j].clone(),
                        to: pat.rows[i].clone(),
                    }
                })?;
            }
        }
        rows.push(out);
    }
    Ok(linalg::rank(field, &rows))
}

/// Default number of randomized validation trials for [`generic_rank`].
pub const DEFAULT_RANK_TRIALS: usize = 8;

/// Validation record attached to a [`generic_rank`] result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankReport {
    /// The structural rank (the returned value).
    pub structural: usize,
    /// Number of randomized gain draws.
    pub trials: usize,
    /// Master seed the per-trial seeds were derived from.
    pub seed: u64,
    /// Field rank observed on each draw.
    pub field_ranks: Vec<usize>,
    /// True iff the best field rank met the structural rank.
    pub agreement: bool,
}

/// Generic rank with randomized cross-validation.
///
/// Returns the structural rank together with a report of `trials`
/// independent field evaluations (per-trial seeds derived from `seed`, so
/// results are order-independent). Field ranks can only fall short of the
/// structural rank — by Schwartz–Zippel this happens with probability at
/// most `n/p` per trial — so any excess is reported as an error.
pub fn generic_rank(
    field: PrimeField,
    pat: &SupportPattern,
    trials: usize,
    seed: u64,
) -> Result<(usize, RankReport), RankError> {
    assert!(trials >= 1, "at least one validation trial is required");
    let structural = structural_rank(pat);
    let mut field_ranks = Vec::with_capacity(trials);
    for trial in 0..trials {
        let gains = GainAssignment::random_for_pattern(field, pat, derive_seed(seed, trial as u64));
        let fr = field_rank(pat, &gains)?;
        if fr > structural {
            return Err(RankError::InternalInconsistency {
                structural,
                field: fr,
            });
        }
        field_ranks.push(fr);
    }
    let agreement = field_ranks.iter().max().copied().unwrap_or(0) == structural;
    let report = RankReport {
        structural,
        trials,
        seed,
        field_ranks,
        agreement,
    };
    Ok((structural, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{gen_family, FamilyParams};

    fn v(i: usize) -> NodeId {
        NodeId::from(format!("v{i}"))
    }

    fn pat(rows: &[&[u8]]) -> SupportPattern {
        SupportPattern::from_bool_matrix(
            rows.iter()
                .map(|r| r.iter().map(|&x| x != 0).collect())
                .collect(),
        )
    }

    #[test]
    fn fig_3d1d2_transfer_pattern_matches_the_edge_list() {
        let net = gen_family(&FamilyParams::Fig3D1D2).unwrap();
        let m: BTreeSet<NodeId> = [v(2), v(3), v(4)].into_iter().collect();
        let p = transfer_pattern(&net, &m, 2).unwrap();
        assert_eq!(p.rows, vec![v(5), v(6), v(7)]);
        assert_eq!(p.cols, vec![v(2), v(3), v(4)]);
        assert_eq!(
            p.entries,
            vec![
                vec![true, true, true],
                vec![true, true, false],
                vec![false, true, true],
            ]
        );
        assert_eq!(structural_rank(&p), 3);
    }

    #[test]
    fn transfer_pattern_rejects_misplaced_nodes_and_bad_layers() {
        let net = gen_family(&FamilyParams::Fig3D1D2).unwrap();
        let m: BTreeSet<NodeId> = [v(5)].into_iter().collect();
        assert_eq!(
            transfer_pattern(&net, &m, 2),
            Err(RankError::LayerMismatch {
                node: v(5),
                layer: 2
            })
        );
        let empty = BTreeSet::new();
        assert!(matches!(
            transfer_pattern(&net, &empty, 4),
            Err(RankError::LayerOutOfRange(4))
        ));
        // Empty M gives a 0-column pattern of rank 0.
        let p = transfer_pattern(&net, &empty, 2).unwrap();
        assert_eq!(p.dims(), (3, 0));
        assert_eq!(structural_rank(&p), 0);
    }

    #[test]
    fn m_d1d2_pattern_is_dense_and_full_rank() {
        for m in 2..=6 {
            let net = gen_family(&FamilyParams::MD1D2 { m }).unwrap();
            let set: BTreeSet<NodeId> = (2..=m + 1).map(v).collect();
            let p = transfer_pattern(&net, &set, 2).unwrap();
            assert_eq!(p.dims(), (m, m));
            assert!(p.entries.iter().flatten().all(|&x| x));
            assert_eq!(structural_rank(&p), m);
        }
    }

    #[test]
    fn structural_rank_basics() {
        assert_eq!(structural_rank(&pat(&[&[1, 1], &[1, 1]])), 2);
        assert_eq!(structural_rank(&pat(&[&[0, 0], &[0, 0]])), 0);
        // One column shared by all rows: rank 1.
        assert_eq!(structural_rank(&pat(&[&[1, 0], &[1, 0]])), 1);
        // Wide and tall shapes.
        assert_eq!(structural_rank(&pat(&[&[1, 1, 1, 1, 1]])), 1);
        assert_eq!(structural_rank(&pat(&[&[1], &[1], &[1]])), 1);
    }

    #[test]
    fn field_rank_with_constant_gains_can_degenerate() {
        let p = pat(&[&[1, 1], &[1, 1]]);
        let mut gains = GainAssignment::new(PrimeField::default());
        for i in 1..=2 {
            for j in 1..=2 {
                gains.set(
                    NodeId::from(format!("c{j}")),
                    NodeId::from(format!("r{i}")),
                    1,
                    1,
                );
            }
        }
        // All-ones 2×2 has rank 1 even though the structural rank is 2.
        assert_eq!(field_rank(&p, &gains), Ok(1));
        assert_eq!(structural_rank(&p), 2);
    }

    #[test]
    fn field_rank_reports_missing_gains() {
        let p = pat(&[&[1]]);
        let gains = GainAssignment::new(PrimeField::default());
        assert!(matches!(
            field_rank(&p, &gains),
            Err(RankError::MissingGain { .. })
        ));
    }

    #[test]
    fn generic_rank_agrees_on_random_draws() {
        let p = pat(&[&[1, 1, 1], &[1, 1, 0], &[0, 1, 1]]);
        let field = PrimeField::default();
        let (rank, report) = generic_rank(field, &p, 8, 7).unwrap();
        assert_eq!(rank, 3);
        assert!(report.agreement, "random draws should hit rank 3");
        assert_eq!(report.field_ranks.len(), 8);
        assert!(report.field_ranks.iter().all(|&fr| fr <= rank));
        // Determinism.
        let (_, again) = generic_rank(field, &p, 8, 7).unwrap();
        assert_eq!(report, again);
    }

    #[test]
    fn gain_assignment_is_seed_deterministic() {
        let net = gen_family(&FamilyParams::Fig2D1D2).unwrap();
        let field = PrimeField::default();
        let a = GainAssignment::random_for_network(field, &net, &[2, 2, 2], 5);
        let b = GainAssignment::random_for_network(field, &net, &[2, 2, 2], 5);
        let edge = (NodeId::from("s1"), NodeId::from("v1"));
        assert_eq!(a.get(&edge.0, &edge.1, 1), b.get(&edge.0, &edge.1, 1));
        assert!(a.get(&edge.0, &edge.1, 2).is_some());
        assert!(a.get(&edge.0, &edge.1, 3).is_none());
    }
}
