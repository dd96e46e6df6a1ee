//! Built-in transmission schemes, one per family that has a matching
//! achievability strategy.
//!
//! Schemes are data ([`SchemeProgram`] values), not code, so every one of
//! them passes through the engine's legality checks when executed. Each
//! constructor returns the scheme bundled with the network it targets and
//! its symbol space.
//!
//! All five schemes share a two-phase shape. Early hops deliver session
//! 2's symbols as mixed combinations; a designated relay on session 1's
//! side overhears those mixtures, re-learns them (directly or via the
//! delayed-knowledge reconstruction rule), and cancels them out of its own
//! receptions, leaving clean session-1 rows. Late hops forward clean rows
//! to `d1` and independent mixtures to `d2`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{Action, Block, Hop, KnowledgeRef, RowSpec, SchemeProgram, SymbolSpace};
use crate::family::{gen_family, FamilyError, FamilyParams};
use crate::network::{LayeredNetwork, NodeId};

/// A scheme together with the network it runs on and its symbol space.
#[derive(Debug, Clone)]
pub struct SchemeBundle {
    pub network: LayeredNetwork,
    pub program: SchemeProgram,
    pub space: SymbolSpace,
}

/// Errors from scheme selection.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    /// The family exists but has no built-in scheme.
    #[error("no built-in scheme targets family {0}")]
    NoScheme(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

fn v(i: usize) -> NodeId {
    NodeId::from(format!("v{i}"))
}

fn w(i: usize) -> NodeId {
    NodeId::from(format!("w{i}"))
}

fn n(name: &str) -> NodeId {
    NodeId::from(name)
}

fn sym(block: Block, index: usize) -> Action {
    Action::Send(RowSpec::forward(KnowledgeRef::sym(block, index)))
}

fn fwd(hop: usize, slot: usize) -> Action {
    Action::Send(RowSpec::forward(KnowledgeRef::rec(hop, slot)))
}

fn recon(node: NodeId, hop: usize, slot: usize) -> Action {
    Action::Send(RowSpec::forward(KnowledgeRef::recon(node, hop, slot)))
}

/// Cancel the `interference` block out of the reception at `base`, using
/// the reception at `helper` as the only helper.
fn cancel(base: (usize, usize), helper: (usize, usize), interference: Block) -> Action {
    Action::Send(RowSpec::Cancel {
        base: KnowledgeRef::rec(base.0, base.1),
        helpers: vec![KnowledgeRef::rec(helper.0, helper.1)],
        interference,
    })
}

fn slots(maps: Vec<Vec<(NodeId, Action)>>) -> Hop {
    Hop {
        slots: maps
            .into_iter()
            .map(|entries| entries.into_iter().collect())
            .collect(),
    }
}

/// Two-slot scheme achieving `(1/2, 1)`.
///
/// Slot 1 of the first hop puts `a1` and `b1` on the air; slot 2 sends
/// `b2`. In the middle hop the relays forward the two `b`-rows, then `v2`
/// uses the reconstruction rule to replay `v4`'s first mixture so that
/// `v4` can cancel it and hand `d1` a clean `a1` row, while `v5` collects
/// two independent `b`-mixtures for `d2`.
pub fn scheme_2d1d2() -> SchemeBundle {
    let network = gen_family(&FamilyParams::Fig2D1D2).expect("fixed family");
    let program = SchemeProgram {
        hops: vec![
            slots(vec![
                vec![(n("s1"), sym(Block::A, 1)), (n("s2"), sym(Block::B, 1))],
                vec![(n("s2"), sym(Block::B, 2))],
            ]),
            slots(vec![
                vec![(v(2), fwd(1, 1)), (v(3), fwd(1, 2))],
                vec![(v(1), fwd(1, 1)), (v(2), recon(v(4), 2, 1))],
            ]),
            slots(vec![
                vec![(v(4), cancel((2, 2), (2, 1), Block::B)), (v(5), fwd(2, 1))],
                vec![(v(5), fwd(2, 2))],
            ]),
        ],
    };
    SchemeBundle {
        network,
        program,
        space: SymbolSpace::new(1, 2),
    }
}

/// Three-slot scheme achieving `(2/3, 1)`.
///
/// The second hop is the heart: after the relays forward `b1, b2, b3`,
/// relay `v2` reconstructs `v5`'s slot-1 mixture and replays it alongside
/// `v1`'s `a1`, then `v1` finishes with `a2`. Destination `d1` subtracts
/// the known mixture itself (it hears it cleanly in the third hop), so no
/// cancellation step is needed; `d2` collects three independent
/// `b`-mixtures.
pub fn scheme_example1() -> SchemeBundle {
    let network = gen_family(&FamilyParams::Fig3D1D2).expect("fixed family");
    let program = SchemeProgram {
        hops: vec![
            slots(vec![
                vec![(n("s1"), sym(Block::A, 1)), (n("s2"), sym(Block::B, 1))],
                vec![(n("s1"), sym(Block::A, 2)), (n("s2"), sym(Block::B, 2))],
                vec![(n("s2"), sym(Block::B, 3))],
            ]),
            slots(vec![
                vec![(v(2), fwd(1, 1)), (v(3), fwd(1, 2)), (v(4), fwd(1, 3))],
                vec![(v(1), fwd(1, 1)), (v(2), recon(v(5), 2, 1))],
                vec![(v(1), fwd(1, 2))],
            ]),
            slots(vec![
                vec![(v(5), fwd(2, 1)), (v(6), fwd(2, 2))],
                vec![(v(5), fwd(2, 2)), (v(6), fwd(2, 1))],
                vec![(v(5), fwd(2, 3)), (v(7), fwd(2, 1))],
            ]),
        ],
    };
    SchemeBundle {
        network,
        program,
        space: SymbolSpace::new(2, 3),
    }
}

/// Three-slot scheme achieving the full `(1, 1)` pair.
///
/// Both sources send three symbols in three slots. In the second hop the
/// session-2 relays forward `b1, b2, b3`, then `v3` and `v4` replay the
/// mixtures that landed at `v6` and `v7` (reconstruction rule) while `v1`
/// and `v2` deliver `a1, a2, a3`. The third hop has `v6` and `v7` cancel
/// the replayed mixtures retroactively, handing `d1` three clean `a`-rows,
/// while `v8` forwards three independent `b`-mixtures to `d2`.
pub fn scheme_example2() -> SchemeBundle {
    let network = gen_family(&FamilyParams::FigFullDof).expect("fixed family");
    let program = SchemeProgram {
        hops: vec![
            slots(vec![
                vec![(n("s1"), sym(Block::A, 1)), (n("s2"), sym(Block::B, 1))],
                vec![(n("s1"), sym(Block::A, 2)), (n("s2"), sym(Block::B, 2))],
                vec![(n("s1"), sym(Block::A, 3)), (n("s2"), sym(Block::B, 3))],
            ]),
            slots(vec![
                vec![(v(3), fwd(1, 1)), (v(4), fwd(1, 2)), (v(5), fwd(1, 3))],
                vec![
                    (v(1), fwd(1, 1)),
                    (v(2), fwd(1, 2)),
                    (v(3), recon(v(6), 2, 1)),
                ],
                vec![(v(1), fwd(1, 3)), (v(4), recon(v(7), 2, 1))],
            ]),
            slots(vec![
                vec![(v(6), cancel((2, 2), (2, 1), Block::B)), (v(8), fwd(2, 1))],
                vec![(v(7), fwd(2, 2)), (v(8), fwd(2, 2))],
                vec![(v(7), cancel((2, 3), (2, 1), Block::B)), (v(8), fwd(2, 3))],
            ]),
        ],
    };
    SchemeBundle {
        network,
        program,
        space: SymbolSpace::new(3, 3),
    }
}

/// The first-hop slot maps of the `m-d1d2` strategy: session 2 sends
/// `b1..b_{a_count+1}`-style symbols... precisely, `s2` sends `b_t` in slot
/// `t` for `t = 1..=b_count` and `s1` sends `a_t` in slot `t` for
/// `t = 1..=a_count`.
fn source_hop(a_count: usize, b_count: usize) -> Hop {
    let t_max = a_count.max(b_count);
    slots(
        (1..=t_max)
            .map(|t| {
                let mut entries = Vec::new();
                if t <= a_count {
                    entries.push((n("s1"), sym(Block::A, t)));
                }
                if t <= b_count {
                    entries.push((n("s2"), sym(Block::B, t)));
                }
                entries
            })
            .collect(),
    )
}

/// `m`-slot scheme on `m-d1d2(m)` achieving `((m−1)/m, 1)`.
///
/// Hop 2, slot 1: the session-2 relays forward their `b`-rows, forming one
/// mixture at every third-layer node. Slot 2: `v1` sends `a1` while `v2`
/// replays `v_{m+2}`'s slot-1 mixture (reconstruction rule); the remaining
/// slots carry `a2..a_{m−1}` from `v1` alone. Hop 3: `v_{m+2}` forwards
/// everything it heard to `d1` (which can strip the mixture itself), and
/// the session-2 relays round-robin independent mixtures to `d2`.
pub fn scheme_m_d1d2(m: usize) -> Result<SchemeBundle, FamilyError> {
    let network = gen_family(&FamilyParams::MD1D2 { m })?;
    let bottleneck = v(m + 2);

    let mut hop2 = vec![(2..=m + 1)
        .map(|j| (v(j), fwd(1, j - 1)))
        .collect::<Vec<_>>()];
    hop2.push(vec![
        (v(1), fwd(1, 1)),
        (v(2), recon(bottleneck.clone(), 2, 1)),
    ]);
    for t in 3..=m {
        hop2.push(vec![(v(1), fwd(1, t - 1))]);
    }

    let mut hop3: Vec<Vec<(NodeId, Action)>> = (1..=m)
        .map(|t| vec![(bottleneck.clone(), fwd(2, t))])
        .collect();
    hop3[0].push((v(m + 3), fwd(2, 2)));
    for t in 2..=m {
        hop3[t - 1].push((v(m + 1 + t), fwd(2, 1)));
    }

    Ok(SchemeBundle {
        network,
        program: SchemeProgram {
            hops: vec![source_hop(m - 1, m), slots(hop2), slots(hop3)],
        },
        space: SymbolSpace::new(m - 1, m),
    })
}

/// `(m+1)`-slot scheme on `two-bounds(m)` achieving `(m/(m+1), m/(m+1))`.
///
/// The first three hops run the `m-d1d2` strategy with one extra slot in
/// which session 2 stays silent and session 1 sends its `m`-th symbol, so
/// the boundary pair ends up with `u1` holding all of session 1 cleanly
/// and `u2` holding `m` independent session-2 mixtures. The last three
/// hops replay the same strategy on the flipped half with the session
/// roles swapped: `u2`'s mixtures travel through the chain `w1 → w_{m+2}`
/// to `d2`, while `u1`'s clean rows mix at `w_{m+3}..w_{2m+1}` and reach
/// `d1`. Every hop is padded to `m+1` slots.
pub fn scheme_two_bounds(m: usize) -> Result<SchemeBundle, FamilyError> {
    let network = gen_family(&FamilyParams::TwoBounds { m })?;
    let t_len = m + 1;

    // Hop 1: b_t in slots 1..m, a_t in slots 1..m−1, and the extra slot
    // m+1 carries a_m alone.
    let mut hop1: Vec<Vec<(NodeId, Action)>> = (1..=t_len)
        .map(|t| {
            let mut entries = Vec::new();
            if t < m {
                entries.push((n("s1"), sym(Block::A, t)));
            }
            if t <= m {
                entries.push((n("s2"), sym(Block::B, t)));
            }
            entries
        })
        .collect();
    hop1[t_len - 1].push((n("s1"), sym(Block::A, m)));

    // Hop 2: as in m-d1d2, plus v1 forwarding its extra-slot reception of
    // a_m in the extra slot.
    let mut hop2 = vec![(2..=m + 1)
        .map(|j| (v(j), fwd(1, j - 1)))
        .collect::<Vec<_>>()];
    hop2.push(vec![(v(1), fwd(1, 1)), (v(2), recon(v(m + 2), 2, 1))]);
    for t in 3..=m {
        hop2.push(vec![(v(1), fwd(1, t - 1))]);
    }
    hop2.push(vec![(v(1), fwd(1, t_len))]);

    // Hop 3: v_{m+2} cancels the mixture out of its slot-2 reception and
    // then forwards its clean a-rows, so u1 ends fully informed about
    // session 1; the other relays deliver mixtures to u2.
    let mut hop3 = vec![vec![
        (v(m + 2), cancel((2, 2), (2, 1), Block::B)),
        (v(m + 3), fwd(2, 2)),
    ]];
    for t in 2..=m {
        hop3.push(vec![(v(m + 2), fwd(2, t + 1)), (v(m + 1 + t), fwd(2, 1))]);
    }
    hop3.push(Vec::new());

    // Hop 4: the boundary pair broadcasts everything it heard, in order.
    let mut hop4: Vec<Vec<(NodeId, Action)>> = (1..=m)
        .map(|t| vec![(n("u1"), fwd(3, t)), (n("u2"), fwd(3, t))])
        .collect();
    hop4.push(Vec::new());

    // Hop 5: mirror of hop 2 with the roles of the blocks swapped: the
    // w2..w_{m+1} relays (fed by u1) forward clean a-rows that mix into
    // the d1-bound equations, while w1 (fed by u2) re-injects the
    // session-2 mixtures, one of them replayed by w2 via reconstruction.
    let mut hop5 = vec![(2..=m + 1)
        .map(|j| (w(j), fwd(4, j - 1)))
        .collect::<Vec<_>>()];
    hop5.push(vec![(w(1), fwd(4, 1)), (w(2), recon(w(m + 2), 5, 1))]);
    for t in 3..=t_len {
        hop5.push(vec![(w(1), fwd(4, t - 1))]);
    }

    // Hop 6: mirror of hop 3 — w_{m+2} cancels the replayed a-mixture and
    // forwards the session-2 rows to d2; the other relays round-robin
    // independent a-mixtures to d1.
    let mut hop6 = vec![vec![
        (w(m + 2), cancel((5, 2), (5, 1), Block::A)),
        (w(m + 3), fwd(5, 2)),
    ]];
    for t in 2..=m {
        hop6.push(vec![(w(m + 2), fwd(5, t + 1)), (w(m + 1 + t), fwd(5, 1))]);
    }
    hop6.push(Vec::new());

    Ok(SchemeBundle {
        network,
        program: SchemeProgram {
            hops: vec![
                slots(hop1),
                slots(hop2),
                slots(hop3),
                slots(hop4),
                slots(hop5),
                slots(hop6),
            ],
        },
        space: SymbolSpace::new(m, m),
    })
}

/// The built-in scheme targeting the given family, when one exists.
pub fn scheme_for_family(params: &FamilyParams) -> Result<SchemeBundle, SchemeError> {
    match params {
        FamilyParams::Fig2D1D2 => Ok(scheme_2d1d2()),
        FamilyParams::Fig3D1D2 => Ok(scheme_example1()),
        FamilyParams::FigFullDof => Ok(scheme_example2()),
        FamilyParams::MD1D2 { m } => Ok(scheme_m_d1d2(*m)?),
        FamilyParams::TwoBounds { m } => Ok(scheme_two_bounds(*m)?),
        other => Err(SchemeError::NoScheme(format!("{other:?}"))),
    }
}

/// On-disk scheme document: symbol space plus the hop/slot action table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeDoc {
    pub space: SymbolSpace,
    pub hops: Vec<Hop>,
}

/// Serializes a scheme in canonical JSON form (two-space indentation, LF,
/// trailing newline).
pub fn serialize_scheme(space: SymbolSpace, program: &SchemeProgram) -> String {
    let doc = SchemeDoc {
        space,
        hops: program.hops.clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("scheme document serializes");
    text.push('\n');
    text
}

/// Parses a scheme document, rejecting unknown keys.
pub fn parse_scheme(text: &str) -> Result<(SymbolSpace, SchemeProgram), serde_json::Error> {
    let doc: SchemeDoc = serde_json::from_str(text)?;
    Ok((doc.space, SchemeProgram { hops: doc.hops }))
}
