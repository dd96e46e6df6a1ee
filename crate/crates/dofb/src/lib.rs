//! Degrees-of-freedom analysis for layered two-unicast wireless networks
//! with delayed channel state information.
//!
//! The crate has three pillars:
//!
//! * **Bottleneck analysis** — scanning a layered network for rank-deficient
//!   bottleneck nodes and omniscient nodes, and certifying each find
//!   ([`bottleneck`]).
//! * **Outer bounds** — turning certificates into exact rational half-plane
//!   bounds and intersecting them into a two-dimensional DoF region
//!   ([`region`]).
//! * **Scheme simulation** — executing linear transmission schemes over a
//!   prime field, slot by slot, under delayed-knowledge rules, and checking
//!   what each destination can decode ([`engine`], [`schemes`]).
//!
//! Networks are built by hand, parsed from JSON ([`network`]), or drawn
//! from the built-in parameterized families ([`family`]). All region
//! arithmetic is exact rational; all simulation is exact modular
//! arithmetic — no floating point anywhere in the analysis path.

pub mod bottleneck;
pub mod engine;
pub mod family;
pub mod field;
pub mod linalg;
pub mod network;
pub mod rank;
pub mod region;
pub mod schemes;
pub mod verify;

pub use bottleneck::{BottleneckCertificate, Dest, OmniscientCertificate};
pub use engine::{SchemeProgram, SimReport, SymbolSpace};
pub use family::FamilyParams;
pub use field::PrimeField;
pub use network::{parse_network, serialize_network, LayeredNetwork, NodeId};
pub use region::{DofRegion, HalfPlane};
