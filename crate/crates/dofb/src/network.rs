//! Layered two-unicast network model: validation, canonical JSON
//! serialization, and structural composition (flip, concatenate).
//!
//! A network is a DAG whose nodes are partitioned into ordered layers
//! `V_1..V_r`, with every edge running from some layer `ℓ` to layer `ℓ+1`.
//! The first layer holds exactly the two sources `(s1, s2)` and the last
//! layer exactly the two destinations `(d1, d2)`.
//!
//! Canonical form (produced by [`LayeredNetwork::new`], [`parse_network`],
//! and [`serialize_network`]): node lists inside each layer are sorted
//! lexicographically, the edge list is sorted, and JSON documents carry
//! their keys in alphabetical order with two-space indentation and a
//! trailing newline. Numeric name suffixes are not zero-padded, so `v10`
//! sorts before `v2`; nothing downstream depends on numeric order.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Interned node name; unique within a network.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    /// Wraps a name. Emptiness is caught by [`LayeredNetwork::validate`].
    pub fn new(name: impl Into<String>) -> Self {
        NodeId(name.into())
    }

    /// The bare name.
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// A single violated structural invariant, with the offending node or edge.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Violation {
    #[error("node name is empty")]
    EmptyNodeName,
    #[error("duplicate node name {0}")]
    DuplicateNode(NodeId),
    #[error("network has {0} layer(s); at least 2 are required")]
    TooFewLayers(usize),
    #[error("layer {0} is empty")]
    EmptyLayer(usize),
    #[error("first layer must equal the source pair {{s1, s2}}")]
    SourceLayerMismatch,
    #[error("last layer must equal the destination pair {{d1, d2}}")]
    DestinationLayerMismatch,
    #[error("sources and destinations must be four distinct nodes")]
    EndpointsNotDistinct,
    #[error("edge ({from}, {to}) references unknown node {missing}")]
    UnknownEdgeEndpoint {
        from: NodeId,
        to: NodeId,
        missing: NodeId,
    },
    #[error("edge not between adjacent layers: ({from}, {to})")]
    NonAdjacentEdge { from: NodeId, to: NodeId },
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge ({from}, {to})")]
    DuplicateEdge { from: NodeId, to: NodeId },
}

/// Errors from node-level queries and composition.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node {0} is in the first layer and has no parents")]
    FirstLayerNode(NodeId),
    #[error("incompatible boundary for concatenation: {0}")]
    IncompatibleBoundary(String),
}

/// Errors from [`parse_network`].
#[derive(Debug, Error)]
pub enum NetworkParseError {
    /// The text is not valid JSON or does not match the document schema.
    #[error("malformed network document: {0}")]
    Json(#[from] serde_json::Error),
    /// The document parsed but violates structural invariants.
    #[error("invalid network: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Wire form of a network document.
///
/// Field order is alphabetical so that serialization emits sorted keys:
/// `destinations`, `edges`, `layers`, `sources`. Unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDoc {
    pub destinations: (String, String),
    pub edges: Vec<(String, String)>,
    pub layers: Vec<Vec<String>>,
    pub sources: (String, String),
}

/// A layered two-unicast network.
///
/// Fields are public so that tests and tools can assemble arbitrary —
/// including deliberately invalid — structures and inspect them with
/// [`LayeredNetwork::validate`]. All analysis functions assume a valid,
/// canonical network; use [`LayeredNetwork::new`] or [`parse_network`] to
/// get one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredNetwork {
    /// Ordered layers `V_1..V_r`.
    pub layers: Vec<Vec<NodeId>>,
    /// Directed edges, each from layer `ℓ` to layer `ℓ+1`.
    pub edges: Vec<(NodeId, NodeId)>,
    /// `(s1, s2)`, the session sources; together they form layer 1.
    pub sources: (NodeId, NodeId),
    /// `(d1, d2)`, the session destinations; together they form layer `r`.
    pub destinations: (NodeId, NodeId),
}

impl LayeredNetwork {
    /// Validates and canonicalizes, returning every violation on failure.
    pub fn new(
        layers: Vec<Vec<NodeId>>,
        edges: Vec<(NodeId, NodeId)>,
        sources: (NodeId, NodeId),
        destinations: (NodeId, NodeId),
    ) -> Result<Self, Vec<Violation>> {
        let mut net = LayeredNetwork {
            layers,
            edges,
            sources,
            destinations,
        };
        let violations = net.validate();
        if violations.is_empty() {
            net.canonicalize();
            Ok(net)
        } else {
            Err(violations)
        }
    }

    /// Checks every structural invariant; an empty result means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.layers.len() < 2 {
            out.push(Violation::TooFewLayers(self.layers.len()));
        }
        let mut layer_of: BTreeMap<&NodeId, usize> = BTreeMap::new();
        for (i, layer) in self.layers.iter().enumerate() {
            if layer.is_empty() {
                out.push(Violation::EmptyLayer(i + 1));
            }
            for node in layer {
                if node.as_str().is_empty() {
                    out.push(Violation::EmptyNodeName);
                }
                if layer_of.insert(node, i + 1).is_some() {
                    out.push(Violation::DuplicateNode(node.clone()));
                }
            }
        }
        let (s1, s2) = (&self.sources.0, &self.sources.1);
        let (d1, d2) = (&self.destinations.0, &self.destinations.1);
        let endpoints: BTreeSet<&NodeId> = [s1, s2, d1, d2].into_iter().collect();
        if endpoints.len() != 4 {
            out.push(Violation::EndpointsNotDistinct);
        }
        if let Some(first) = self.layers.first() {
            let first_set: BTreeSet<&NodeId> = first.iter().collect();
            let expected: BTreeSet<&NodeId> = [s1, s2].into_iter().collect();
            if first_set != expected || first.len() != 2 {
                out.push(Violation::SourceLayerMismatch);
            }
        }
        if let Some(last) = self.layers.last() {
            let last_set: BTreeSet<&NodeId> = last.iter().collect();
            let expected: BTreeSet<&NodeId> = [d1, d2].into_iter().collect();
            if self.layers.len() >= 2 && (last_set != expected || last.len() != 2) {
                out.push(Violation::DestinationLayerMismatch);
            }
        }
        let mut seen_edges: BTreeSet<(&NodeId, &NodeId)> = BTreeSet::new();
        for (from, to) in &self.edges {
            if !seen_edges.insert((from, to)) {
                out.push(Violation::DuplicateEdge {
                    from: from.clone(),
                    to: to.clone(),
                });
            }
            if from == to {
                out.push(Violation::SelfLoop(from.clone()));
                continue;
            }
            let (from_layer, to_layer) = (layer_of.get(from), layer_of.get(to));
            let mut missing = None;
            if from_layer.is_none() {
                missing = Some(from.clone());
            } else if to_layer.is_none() {
                missing = Some(to.clone());
            }
            if let Some(missing) = missing {
                out.push(Violation::UnknownEdgeEndpoint {
                    from: from.clone(),
                    to: to.clone(),
                    missing,
                });
                continue;
            }
            let (fl, tl) = (*from_layer.unwrap(), *to_layer.unwrap());
            if tl != fl + 1 {
                out.push(Violation::NonAdjacentEdge {
                    from: from.clone(),
                    to: to.clone(),
                });
            }
        }
        out
    }

    /// Sorts node lists and edges into canonical order.
    pub fn canonicalize(&mut self) {
        for layer in &mut self.layers {
            layer.sort();
        }
        self.edges.sort();
    }

    /// Number of layers `r`.
    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// 1-based layer index of `v`, if present.
    pub fn node_layer(&self, v: &NodeId) -> Option<usize> {
        self.layers
            .iter()
            .position(|layer| layer.contains(v))
            .map(|i| i + 1)
    }

    /// True iff the network contains a node named `v`.
    pub fn contains(&self, v: &NodeId) -> bool {
        self.node_layer(v).is_some()
    }

    /// The parent set `I(v)`: nodes of the previous layer with an edge to `v`.
    pub fn parents(&self, v: &NodeId) -> Result<BTreeSet<NodeId>, NetworkError> {
        match self.node_layer(v) {
            None => Err(NetworkError::UnknownNode(v.clone())),
            Some(1) => Err(NetworkError::FirstLayerNode(v.clone())),
            Some(_) => Ok(self
                .edges
                .iter()
                .filter(|(_, to)| to == v)
                .map(|(from, _)| from.clone())
                .collect()),
        }
    }

    /// Child set of `v`; empty for unknown or last-layer nodes.
    pub fn children(&self, v: &NodeId) -> BTreeSet<NodeId> {
        self.edges
            .iter()
            .filter(|(from, _)| from == v)
            .map(|(_, to)| to.clone())
            .collect()
    }

    /// Interior (relay) nodes as `(layer, node)` pairs, layer-major.
    pub fn relay_nodes(&self) -> Vec<(usize, NodeId)> {
        let r = self.layers.len();
        let mut out = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            let layer_index = i + 1;
            if layer_index == 1 || layer_index == r {
                continue;
            }
            for node in layer {
                out.push((layer_index, node.clone()));
            }
        }
        out
    }

    /// Nodes reachable from `starts` by directed paths avoiding `removed`
    /// (start nodes in `removed` are themselves excluded).
    pub fn reachable_from<'a>(
        &self,
        starts: impl IntoIterator<Item = &'a NodeId>,
        removed: &BTreeSet<NodeId>,
    ) -> BTreeSet<NodeId> {
        let mut adjacency: BTreeMap<&NodeId, Vec<&NodeId>> = BTreeMap::new();
        for (from, to) in &self.edges {
            adjacency.entry(from).or_default().push(to);
        }
        let mut seen: BTreeSet<NodeId> = BTreeSet::new();
        let mut queue: VecDeque<&NodeId> = VecDeque::new();
        for s in starts {
            if !removed.contains(s) && seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
        while let Some(node) = queue.pop_front() {
            if let Some(next) = adjacency.get(node) {
                for &to in next {
                    if !removed.contains(to) && seen.insert(to.clone()) {
                        queue.push_back(to);
                    }
                }
            }
        }
        seen
    }

    /// Nodes from which some node of `targets` is reachable, avoiding
    /// `removed`.
    pub fn co_reachable<'a>(
        &self,
        targets: impl IntoIterator<Item = &'a NodeId>,
        removed: &BTreeSet<NodeId>,
    ) -> BTreeSet<NodeId> {
        let mut reverse: BTreeMap<&NodeId, Vec<&NodeId>> = BTreeMap::new();
        for (from, to) in &self.edges {
            reverse.entry(to).or_default().push(from);
        }
        let mut seen: BTreeSet<NodeId> = BTreeSet::new();
        let mut queue: VecDeque<&NodeId> = VecDeque::new();
        for t in targets {
            if !removed.contains(t) && seen.insert(t.clone()) {
                queue.push_back(t);
            }
        }
        while let Some(node) = queue.pop_front() {
            if let Some(prev) = reverse.get(node) {
                for &from in prev {
                    if !removed.contains(from) && seen.insert(from.clone()) {
                        queue.push_back(from);
                    }
                }
            }
        }
        seen
    }

    /// True iff a directed path `from → … → to` exists.
    pub fn has_path(&self, from: &NodeId, to: &NodeId) -> bool {
        self.reachable_from([from], &BTreeSet::new()).contains(to)
    }

    /// Swaps the session indices: sources `(s1,s2) → (s2,s1)` and
    /// destinations `(d1,d2) → (d2,d1)`. Node names and edges are untouched,
    /// so `flip` is an involution.
    pub fn flip(&self) -> LayeredNetwork {
        let mut out = self.clone();
        out.sources = (self.sources.1.clone(), self.sources.0.clone());
        out.destinations = (self.destinations.1.clone(), self.destinations.0.clone());
        out
    }

    /// Canonical wire document (sorted node lists, sorted edges).
    pub fn to_doc(&self) -> NetworkDoc {
        let mut canonical = self.clone();
        canonical.canonicalize();
        NetworkDoc {
            destinations: (
                canonical.destinations.0.as_str().to_owned(),
                canonical.destinations.1.as_str().to_owned(),
            ),
            edges: canonical
                .edges
                .iter()
                .map(|(a, b)| (a.as_str().to_owned(), b.as_str().to_owned()))
                .collect(),
            layers: canonical
                .layers
                .iter()
                .map(|layer| layer.iter().map(|n| n.as_str().to_owned()).collect())
                .collect(),
            sources: (
                canonical.sources.0.as_str().to_owned(),
                canonical.sources.1.as_str().to_owned(),
            ),
        }
    }

    /// Builds a network from a wire document, validating it.
    pub fn from_doc(doc: NetworkDoc) -> Result<Self, Vec<Violation>> {
        LayeredNetwork::new(
            doc.layers
                .into_iter()
                .map(|layer| layer.into_iter().map(NodeId::from).collect())
                .collect(),
            doc.edges
                .into_iter()
                .map(|(a, b)| (NodeId::from(a), NodeId::from(b)))
                .collect(),
            (NodeId::from(doc.sources.0), NodeId::from(doc.sources.1)),
            (
                NodeId::from(doc.destinations.0),
                NodeId::from(doc.destinations.1),
            ),
        )
    }
}

/// Parses a network JSON document, rejecting unknown keys and invalid
/// structures.
pub fn parse_network(text: &str) -> Result<LayeredNetwork, NetworkParseError> {
    let doc: NetworkDoc = serde_json::from_str(text)?;
    LayeredNetwork::from_doc(doc).map_err(NetworkParseError::Invalid)
}

/// Serializes a network to its canonical JSON form: alphabetical keys,
/// two-space indentation, sorted node and edge lists, LF line endings, and
/// a trailing newline.
pub fn serialize_network(net: &LayeredNetwork) -> String {
    let doc = net.to_doc();
    let mut text = serde_json::to_string_pretty(&doc).expect("network document serializes");
    text.push('\n');
    text
}

/// Concatenates two networks by identifying `first`'s destinations with
/// `second`'s sources (positionally: `first.d1 ≡ second.s1`).
///
/// The merged network keeps `first`'s node names except its destination
/// layer, which becomes the internal boundary relay pair `u1, u2`. The
/// second network's interior relays are renamed `w1, w2, …` (layer-major,
/// lexicographic within a layer) and its destinations become `d1, d2`.
/// Whenever a canonical name collides with a retained name, underscores are
/// appended until it is fresh. The result has `r1 + r2 − 1` layers — the
/// shared boundary layer is counted once — which is a hop count of
/// `(r1 − 1) + (r2 − 1)`.
pub fn concatenate(
    first: &LayeredNetwork,
    second: &LayeredNetwork,
) -> Result<LayeredNetwork, NetworkError> {
    let boundary_err = |msg: String| NetworkError::IncompatibleBoundary(msg);
    let first_last = first
        .layers
        .last()
        .ok_or_else(|| boundary_err("first network has no layers".into()))?;
    let second_first = second
        .layers
        .first()
        .ok_or_else(|| boundary_err("second network has no layers".into()))?;
    if second.layers.len() < 2 {
        return Err(boundary_err(
            "second network needs at least two layers".into(),
        ));
    }
    let first_dests: BTreeSet<&NodeId> = [&first.destinations.0, &first.destinations.1]
        .into_iter()
        .collect();
    if first_last.len() != 2 || first_last.iter().collect::<BTreeSet<_>>() != first_dests {
        return Err(boundary_err(format!(
            "first network's last layer has {} node(s) and must be exactly its destination pair",
            first_last.len()
        )));
    }
    let second_sources: BTreeSet<&NodeId> =
        [&second.sources.0, &second.sources.1].into_iter().collect();
    if second_first.len() != 2 || second_first.iter().collect::<BTreeSet<_>>() != second_sources {
        return Err(boundary_err(format!(
            "second network's first layer has {} node(s) and must be exactly its source pair",
            second_first.len()
        )));
    }

    // Names retained from `first`: everything except its destination layer.
    let mut taken: BTreeSet<String> = first
        .layers
        .iter()
        .take(first.layers.len() - 1)
        .flatten()
        .map(|n| n.as_str().to_owned())
        .collect();
    let fresh = |base: String, taken: &mut BTreeSet<String>| -> NodeId {
        let mut name = base;
        while taken.contains(&name) {
            name.push('_');
        }
        taken.insert(name.clone());
        NodeId::from(name)
    };

    let u1 = fresh("u1".into(), &mut taken);
    let u2 = fresh("u2".into(), &mut taken);

    // Rename map for the second network's nodes.
    let mut rename: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    rename.insert(second.sources.0.clone(), u1.clone());
    rename.insert(second.sources.1.clone(), u2.clone());
    let mut relay_counter = 0usize;
    for layer in &second.layers[1..second.layers.len() - 1] {
        let mut sorted: Vec<&NodeId> = layer.iter().collect();
        sorted.sort();
        for node in sorted {
            relay_counter += 1;
            let name = fresh(format!("w{relay_counter}"), &mut taken);
            rename.insert(node.clone(), name);
        }
    }
    let d1 = fresh("d1".into(), &mut taken);
    let d2 = fresh("d2".into(), &mut taken);
    rename.insert(second.destinations.0.clone(), d1.clone());
    rename.insert(second.destinations.1.clone(), d2.clone());

    let renamed = |node: &NodeId| -> NodeId { rename[node].clone() };

    let mut layers: Vec<Vec<NodeId>> = first.layers[..first.layers.len() - 1].to_vec();
    layers.push(vec![u1.clone(), u2.clone()]);
    for layer in &second.layers[1..] {
        layers.push(layer.iter().map(renamed).collect());
    }

    let boundary_map = |node: &NodeId| -> NodeId {
        if node == &first.destinations.0 {
            u1.clone()
        } else if node == &first.destinations.1 {
            u2.clone()
        } else {
            node.clone()
        }
    };
    let mut edges: Vec<(NodeId, NodeId)> = first
        .edges
        .iter()
        .map(|(from, to)| (boundary_map(from), boundary_map(to)))
        .collect();
    edges.extend(
        second
            .edges
            .iter()
            .map(|(from, to)| (renamed(from), renamed(to))),
    );

    Ok(
        LayeredNetwork::new(layers, edges, first.sources.clone(), (d1, d2))
            .expect("concatenation of valid networks is valid"),
    )
}
