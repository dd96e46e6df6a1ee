//! Execution of linear transmission schemes under delayed channel
//! knowledge.
//!
//! A scheme is a per-hop, per-slot table of node actions. Hops run
//! sequentially: during hop `h`, the nodes of layer `h` transmit and the
//! nodes of layer `h+1` receive; a receiver's row for a slot is the
//! gain-weighted sum of what its transmitting parents sent. Each node's
//! knowledge starts from its own source symbols (sources only) and grows
//! by its own receptions.
//!
//! Channel gains are known at the receiving node instantly and everywhere
//! else with one slot of delay. That yields the crate's central legality
//! rule: a node may transmit the reception of *another* node only if that
//! reception is strictly past — earlier hop, or same hop and earlier
//! slot — and the received row already lies in the requester's own
//! knowledge span (so it can actually be re-synthesized from what the
//! requester knows). Everything a node sends must lie in its knowledge
//! span.

use std::collections::BTreeMap;

use num_rational::Rational64;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::field::{derive_seed, PrimeField};
use crate::linalg::{self, Echelon};
use crate::network::{LayeredNetwork, NodeId};
use crate::rank::GainAssignment;

/// Message blocks: `A` is session 1's symbols (decoded by `d1`), `B` is
/// session 2's (decoded by `d2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Block {
    A,
    B,
}

impl Block {
    pub fn other(self) -> Block {
        match self {
            Block::A => Block::B,
            Block::B => Block::A,
        }
    }
}

/// Symbol counts per session: `p` symbols in block `A`, `q` in block `B`.
/// Rows are vectors over the concatenated columns `a1..ap, b1..bq`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpace {
    pub p: usize,
    pub q: usize,
}

impl SymbolSpace {
    pub fn new(p: usize, q: usize) -> Self {
        SymbolSpace { p, q }
    }

    /// Total row width.
    pub fn width(self) -> usize {
        self.p + self.q
    }

    /// Number of symbols in a block.
    pub fn block_size(self, block: Block) -> usize {
        match block {
            Block::A => self.p,
            Block::B => self.q,
        }
    }

    /// Column range of a block.
    pub fn block_range(self, block: Block) -> std::ops::Range<usize> {
        match block {
            Block::A => 0..self.p,
            Block::B => self.p..self.p + self.q,
        }
    }

    /// Unit row of the 1-based `index`-th symbol of `block`, if in range.
    pub fn unit_row(self, block: Block, index: usize) -> Option<Vec<u64>> {
        if index == 0 || index > self.block_size(block) {
            return None;
        }
        let mut row = vec![0u64; self.width()];
        row[self.block_range(block).start + index - 1] = 1;
        Some(row)
    }
}

/// How a knowledge row was acquired.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// Initial source knowledge of one block.
    Source(Block),
    /// The node's own reception at (hop, slot).
    Received { hop: usize, slot: usize },
}

/// Append-only per-node knowledge: rows with provenance, plus a reduced
/// basis for span queries.
#[derive(Debug, Clone)]
pub struct KnowledgeState {
    rows: Vec<Vec<u64>>,
    provenance: Vec<Provenance>,
    span: Echelon,
}

impl KnowledgeState {
    pub fn new(field: PrimeField, width: usize) -> Self {
        KnowledgeState {
            rows: Vec::new(),
            provenance: Vec::new(),
            span: Echelon::new(field, width),
        }
    }

    /// Appends a row. Returns true iff the row enlarged the span.
    pub fn add_row(&mut self, row: Vec<u64>, provenance: Provenance) -> bool {
        let fresh = self.span.insert(&row);
        self.rows.push(row);
        self.provenance.push(provenance);
        fresh
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    /// True iff `row` lies in the knowledge span.
    pub fn knows(&self, row: &[u64]) -> bool {
        self.span.contains(row)
    }

    /// Dimension of the knowledge span.
    pub fn rank(&self) -> usize {
        self.span.rank()
    }

    /// The node's own reception at (hop, slot), if any.
    pub fn reception(&self, hop: usize, slot: usize) -> Option<&Vec<u64>> {
        self.provenance
            .iter()
            .position(|p| matches!(p, Provenance::Received { hop: h, slot: s } if *h == hop && *s == slot))
            .map(|i| &self.rows[i])
    }
}

/// Reference to a row a node can try to transmit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnowledgeRef {
    /// A source symbol: unit row of `block[index]` (1-based).
    Sym { block: Block, index: usize },
    /// The node's own reception at (hop, slot).
    Rec { hop: usize, slot: usize },
    /// Another node's reception at (hop, slot), re-synthesized under the
    /// delayed-knowledge rule.
    Recon {
        node: NodeId,
        hop: usize,
        slot: usize,
    },
}

impl KnowledgeRef {
    pub fn sym(block: Block, index: usize) -> Self {
        KnowledgeRef::Sym { block, index }
    }

    pub fn rec(hop: usize, slot: usize) -> Self {
        KnowledgeRef::Rec { hop, slot }
    }

    pub fn recon(node: impl Into<NodeId>, hop: usize, slot: usize) -> Self {
        KnowledgeRef::Recon {
            node: node.into(),
            hop,
            slot,
        }
    }
}

/// What a transmitting node puts on the channel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowSpec {
    /// Fixed integer combination of referenced rows.
    Combine(Vec<(KnowledgeRef, i64)>),
    /// Gain-dependent combination: `base` plus whatever multiples of the
    /// `helpers` zero out every column of the `interference` block.
    Cancel {
        base: KnowledgeRef,
        helpers: Vec<KnowledgeRef>,
        interference: Block,
    },
}

impl RowSpec {
    /// Forwards a single referenced row unchanged.
    pub fn forward(reference: KnowledgeRef) -> Self {
        RowSpec::Combine(vec![(reference, 1)])
    }
}

/// A node's action in one slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Silent,
    Send(RowSpec),
}

/// One hop: a list of slots, each mapping transmitting nodes (which must
/// lie in the hop's layer) to actions. Nodes absent from a map are silent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hop {
    pub slots: Vec<BTreeMap<NodeId, Action>>,
}

/// A full scheme: one [`Hop`] per network hop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeProgram {
    pub hops: Vec<Hop>,
}

impl SchemeProgram {
    /// Slot count of each hop.
    pub fn slots_per_hop(&self) -> Vec<usize> {
        self.hops.iter().map(|h| h.slots.len()).collect()
    }
}

/// Errors from scheme execution.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    /// The scheme's hop count does not match the network's.
    #[error("scheme has {got} hop(s) but the network has {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    /// A node cannot take the requested action.
    #[error("hop {hop} slot {slot}: node {node} cannot act: {reason}")]
    IllegalAction {
        hop: usize,
        slot: usize,
        node: NodeId,
        reason: String,
    },
    /// A reference does not resolve to anything.
    #[error("hop {hop} slot {slot}: node {node} references {what}, which does not exist")]
    UnknownRef {
        hop: usize,
        slot: usize,
        node: NodeId,
        what: String,
    },
    /// A reconstruction request targets a reception that is not strictly
    /// past.
    #[error(
        "hop {hop} slot {slot}: node {node} requests the reception at \
         hop {req_hop} slot {req_slot}, which is not strictly past"
    )]
    CausalityViolation {
        hop: usize,
        slot: usize,
        node: NodeId,
        req_hop: usize,
        req_slot: usize,
    },
    /// A reconstruction target lies outside the requester's knowledge
    /// span.
    #[error(
        "hop {hop} slot {slot}: node {node} cannot reconstruct the \
         reception at hop {req_hop} slot {req_slot}: row outside its \
         knowledge span"
    )]
    IllegalReconstruction {
        hop: usize,
        slot: usize,
        node: NodeId,
        req_hop: usize,
        req_slot: usize,
    },
    /// No helper combination cancels the interference block.
    #[error(
        "hop {hop} slot {slot}: node {node} cannot cancel block {block:?} \
         interference with the given helpers"
    )]
    CancellationInfeasible {
        hop: usize,
        slot: usize,
        node: NodeId,
        block: Block,
    },
    /// The gain assignment lacks a required entry.
    #[error("missing gain for edge ({from}, {to}) at slot {slot}")]
    MissingGain {
        from: NodeId,
        to: NodeId,
        slot: usize,
    },
}

/// One transmitted row, for tracing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmission {
    pub hop: usize,
    pub slot: usize,
    pub node: NodeId,
    pub row: Vec<u64>,
}

/// Result of running a scheme once under a fixed gain assignment.
#[derive(Debug, Clone)]
pub struct Execution {
    /// Final knowledge of every node.
    pub states: BTreeMap<NodeId, KnowledgeState>,
    /// Every reception, keyed by (receiver, hop, slot).
    pub receptions: BTreeMap<(NodeId, usize, usize), Vec<u64>>,
    /// Every transmission in order.
    pub trace: Vec<Transmission>,
}

/// Checks the delayed-knowledge reconstruction rule for a single row:
/// `requested` must be strictly before `current` (lexicographically on
/// (hop, slot)) and `row` must lie in the requester's knowledge span.
/// Returns the row on success.
pub fn reconstruct_row(
    state: &KnowledgeState,
    node: &NodeId,
    row: &[u64],
    requested: (usize, usize),
    current: (usize, usize),
) -> Result<Vec<u64>, EngineError> {
    if requested >= current {
        return Err(EngineError::CausalityViolation {
            hop: current.0,
            slot: current.1,
            node: node.clone(),
            req_hop: requested.0,
            req_slot: requested.1,
        });
    }
    if !state.knows(row) {
        return Err(EngineError::IllegalReconstruction {
            hop: current.0,
            slot: current.1,
            node: node.clone(),
            req_hop: requested.0,
            req_slot: requested.1,
        });
    }
    Ok(row.to_vec())
}

struct SlotContext<'a> {
    field: PrimeField,
    space: SymbolSpace,
    hop: usize,
    slot: usize,
    states: &'a BTreeMap<NodeId, KnowledgeState>,
    receptions: &'a BTreeMap<(NodeId, usize, usize), Vec<u64>>,
}

impl SlotContext<'_> {
    fn resolve_ref(
        &self,
        node: &NodeId,
        reference: &KnowledgeRef,
    ) -> Result<Vec<u64>, EngineError> {
        match reference {
            KnowledgeRef::Sym { block, index } => {
                let row =
                    self.space
                        .unit_row(*block, *index)
                        .ok_or_else(|| EngineError::UnknownRef {
                            hop: self.hop,
                            slot: self.slot,
                            node: node.clone(),
                            what: format!("symbol {block:?}[{index}]"),
                        })?;
                if !self.states[node].knows(&row) {
                    return Err(EngineError::IllegalAction {
                        hop: self.hop,
                        slot: self.slot,
                        node: node.clone(),
                        reason: format!("symbol {block:?}[{index}] is outside its knowledge span"),
                    });
                }
                Ok(row)
            }
            KnowledgeRef::Rec { hop, slot } => self.states[node]
                .reception(*hop, *slot)
                .cloned()
                .ok_or_else(|| EngineError::UnknownRef {
                    hop: self.hop,
                    slot: self.slot,
                    node: node.clone(),
                    what: format!("own reception at hop {hop} slot {slot}"),
                }),
            KnowledgeRef::Recon {
                node: source,
                hop,
                slot,
            } => {
                // Causality comes first: a non-past request is illegal even
                // if the reception never happens.
                if (*hop, *slot) >= (self.hop, self.slot) {
                    return Err(EngineError::CausalityViolation {
                        hop: self.hop,
                        slot: self.slot,
                        node: node.clone(),
                        req_hop: *hop,
                        req_slot: *slot,
                    });
                }
                let row = self
                    .receptions
                    .get(&(source.clone(), *hop, *slot))
                    .ok_or_else(|| EngineError::UnknownRef {
                        hop: self.hop,
                        slot: self.slot,
                        node: node.clone(),
                        what: format!("reception of {source} at hop {hop} slot {slot}"),
                    })?;
                reconstruct_row(
                    &self.states[node],
                    node,
                    row,
                    (*hop, *slot),
                    (self.hop, self.slot),
                )
            }
        }
    }

    fn resolve_spec(&self, node: &NodeId, spec: &RowSpec) -> Result<Vec<u64>, EngineError> {
        let field = self.field;
        let width = self.space.width();
        match spec {
            RowSpec::Combine(terms) => {
                let mut row = vec![0u64; width];
                for (reference, weight) in terms {
                    let part = self.resolve_ref(node, reference)?;
                    let w = weight.rem_euclid(field.modulus() as i64) as u64;
                    for (acc, &x) in row.iter_mut().zip(&part) {
                        *acc = field.add(*acc, field.mul(w, x));
                    }
                }
                Ok(row)
            }
            RowSpec::Cancel {
                base,
                helpers,
                interference,
            } => {
                let base_row = self.resolve_ref(node, base)?;
                let helper_rows: Vec<Vec<u64>> = helpers
                    .iter()
                    .map(|h| self.resolve_ref(node, h))
                    .collect::<Result<_, _>>()?;
                let cols = self.space.block_range(*interference);
                let restricted: Vec<Vec<u64>> = helper_rows
                    .iter()
                    .map(|r| r[cols.clone()].to_vec())
                    .collect();
                let target: Vec<u64> = base_row[cols.clone()]
                    .iter()
                    .map(|&x| field.neg(x))
                    .collect();
                let coefficients = linalg::solve_combination(field, &restricted, &target)
                    .ok_or_else(|| EngineError::CancellationInfeasible {
                        hop: self.hop,
                        slot: self.slot,
                        node: node.clone(),
                        block: *interference,
                    })?;
                let mut row = base_row;
                for (c, helper) in coefficients.iter().zip(&helper_rows) {
                    for (acc, &x) in row.iter_mut().zip(helper) {
                        *acc = field.add(*acc, field.mul(*c, x));
                    }
                }
                debug_assert!(row[cols].iter().all(|&x| x == 0));
                Ok(row)
            }
        }
    }
}

/// Runs a scheme once under the given gains. Hops execute in order; inside
/// a hop, slots execute in order; inside a slot, every transmission is
/// resolved against pre-slot knowledge before any reception lands.
pub fn run_scheme(
    net: &LayeredNetwork,
    program: &SchemeProgram,
    space: SymbolSpace,
    gains: &GainAssignment,
    field: PrimeField,
) -> Result<Execution, EngineError> {
    let hop_count = net.layer_count() - 1;
    if program.hops.len() != hop_count {
        return Err(EngineError::ShapeMismatch {
            expected: hop_count,
            got: program.hops.len(),
        });
    }

    let width = space.width();
    let mut states: BTreeMap<NodeId, KnowledgeState> = net
        .layers
        .iter()
        .flatten()
        .map(|n| (n.clone(), KnowledgeState::new(field, width)))
        .collect();
    for (source, block) in [(&net.sources.0, Block::A), (&net.sources.1, Block::B)] {
        let state = states.get_mut(source).expect("sources are nodes");
        for index in 1..=space.block_size(block) {
            let row = space.unit_row(block, index).expect("index in range");
            state.add_row(row, Provenance::Source(block));
        }
    }

    let mut receptions: BTreeMap<(NodeId, usize, usize), Vec<u64>> = BTreeMap::new();
    let mut trace: Vec<Transmission> = Vec::new();

    for (hop_index, hop) in program.hops.iter().enumerate() {
        let h = hop_index + 1;
        for (slot_index, slot_map) in hop.slots.iter().enumerate() {
            let t = slot_index + 1;
            // Resolve all transmissions against pre-slot knowledge.
            let mut transmissions: BTreeMap<NodeId, Vec<u64>> = BTreeMap::new();
            for (node, action) in slot_map {
                let layer = net
                    .node_layer(node)
                    .ok_or_else(|| EngineError::IllegalAction {
                        hop: h,
                        slot: t,
                        node: node.clone(),
                        reason: "not a node of the network".into(),
                    })?;
                if layer != h {
                    return Err(EngineError::IllegalAction {
                        hop: h,
                        slot: t,
                        node: node.clone(),
                        reason: format!("lies in layer {layer}, not the transmitting layer {h}"),
                    });
                }
                let spec = match action {
                    Action::Silent => continue,
                    Action::Send(spec) => spec,
                };
                let context = SlotContext {
                    field,
                    space,
                    hop: h,
                    slot: t,
                    states: &states,
                    receptions: &receptions,
                };
                let row = context.resolve_spec(node, spec)?;
                trace.push(Transmission {
                    hop: h,
                    slot: t,
                    node: node.clone(),
                    row: row.clone(),
                });
                transmissions.insert(node.clone(), row);
            }
            // Deliver receptions to the next layer.
            for receiver in &net.layers[h] {
                let mut row = vec![0u64; width];
                let mut heard = false;
                for parent in net.parents(receiver).expect("receiver is a node") {
                    let Some(sent) = transmissions.get(&parent) else {
                        continue;
                    };
                    let gain = gains.get(&parent, receiver, t).ok_or_else(|| {
                        EngineError::MissingGain {
                            from: parent.clone(),
                            to: receiver.clone(),
                            slot: t,
                        }
                    })?;
                    for (acc, &x) in row.iter_mut().zip(sent) {
                        *acc = field.add(*acc, field.mul(gain, x));
                    }
                    heard = true;
                }
                if heard {
                    receptions.insert((receiver.clone(), h, t), row.clone());
                    states
                        .get_mut(receiver)
                        .expect("receiver is a node")
                        .add_row(row, Provenance::Received { hop: h, slot: t });
                }
            }
        }
    }

    Ok(Execution {
        states,
        receptions,
        trace,
    })
}

/// True iff the state can decode every symbol of `block`: the knowledge
/// rows must span `block_size` dimensions beyond their projection onto the
/// other block, i.e. `rank(K) = rank(K|other) + block_size`.
pub fn decode_check(
    state: &KnowledgeState,
    space: SymbolSpace,
    block: Block,
    field: PrimeField,
) -> bool {
    let other = space.block_range(block.other());
    let projected: Vec<Vec<u64>> = state
        .rows()
        .iter()
        .map(|r| r[other.clone()].to_vec())
        .collect();
    state.rank() == linalg::rank(field, &projected) + space.block_size(block)
}

/// The rate pair a scheme claims: `(p/T, q/T)` with `T` the largest slot
/// count of any hop.
///
/// # Panics
/// Panics if the program has no hops or only empty hops.
pub fn achieved_dof(program: &SchemeProgram, space: SymbolSpace) -> (Rational64, Rational64) {
    let t = program
        .slots_per_hop()
        .into_iter()
        .max()
        .expect("program has at least one hop");
    assert!(t > 0, "program must use at least one slot");
    (
        Rational64::new(space.p as i64, t as i64),
        Rational64::new(space.q as i64, t as i64),
    )
}

/// Outcome of a batch of seeded simulation trials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimReport {
    pub trials: usize,
    pub seed: u64,
    /// Trials in which `d1` decoded block `A`.
    pub decode_d1: usize,
    /// Trials in which `d2` decoded block `B`.
    pub decode_d2: usize,
    /// The claimed rate pair, present only when every trial decoded both
    /// blocks.
    pub achieved: Option<(Rational64, Rational64)>,
}

impl Serialize for SimReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut out = serializer.serialize_struct("SimReport", 5)?;
        out.serialize_field("trials", &self.trials)?;
        out.serialize_field("seed", &self.seed)?;
        out.serialize_field("decode_d1", &self.decode_d1)?;
        out.serialize_field("decode_d2", &self.decode_d2)?;
        match &self.achieved {
            Some((x, y)) => out.serialize_field("achieved_dof", &[x.to_string(), y.to_string()])?,
            None => out.serialize_field("achieved_dof", &Option::<[String; 2]>::None)?,
        }
        out.end()
    }
}

/// Runs `trials` seeded executions with fresh random gains per trial
/// (trial seeds derived from `seed`) and counts decode successes at both
/// destinations. The rate pair is reported only if every trial decoded.
pub fn simulate(
    net: &LayeredNetwork,
    program: &SchemeProgram,
    space: SymbolSpace,
    trials: usize,
    seed: u64,
    field: PrimeField,
) -> Result<SimReport, EngineError> {
    assert!(trials >= 1, "at least one trial is required");
    let slots = program.slots_per_hop();
    let mut decode_d1 = 0;
    let mut decode_d2 = 0;
    for trial in 0..trials {
        let gains =
            GainAssignment::random_for_network(field, net, &slots, derive_seed(seed, trial as u64));
        let execution = run_scheme(net, program, space, &gains, field)?;
        if decode_check(
            &execution.states[&net.destinations.0],
            space,
            Block::A,
            field,
        ) {
            decode_d1 += 1;
        }
        if decode_check(
            &execution.states[&net.destinations.1],
            space,
            Block::B,
            field,
        ) {
            decode_d2 += 1;
        }
    }
    let achieved =
        (decode_d1 == trials && decode_d2 == trials).then(|| achieved_dof(program, space));
    Ok(SimReport {
        trials,
        seed,
        decode_d1,
        decode_d2,
        achieved,
    })
}
