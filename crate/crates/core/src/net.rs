//! Single-source multicast over a DAG with linear network coding.
//!
//! Every node `i` maps the packets on its incoming edges to its outgoing
//! edges through a local kernel `K_i` over F_q (rows: incoming edges, columns:
//! outgoing edges). The source is fed by `n` virtual edges carrying the
//! message packets, so its kernel has `n` rows. Global encoding vectors follow
//! by the downstream recursion `f_e = sum_d k_de f_d`.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::auth::{combine, TaggedPacket, VerifierKey};
use crate::error::{Error, Result};
use crate::field::ExtField;
use crate::linalg::{solve, Matrix};
use crate::rng::{substream, Stream};

pub const TOPOLOGY_VERSION: u32 = 1;

/// On-disk topology description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySpec {
    pub version: u32,
    pub source: String,
    /// Number of source messages `n`.
    pub messages: usize,
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    /// Row-major kernels keyed by node; missing kernels are drawn at random.
    #[serde(default)]
    pub kernels: BTreeMap<String, Vec<Vec<u32>>>,
    /// Verifier nodes; position in the list is the verifier index.
    #[serde(default)]
    pub verifiers: Vec<String>,
    #[serde(default)]
    pub sinks: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: String,
    pub tail: String,
    pub head: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

#[derive(Clone, Debug)]
pub struct Network {
    base: Arc<ExtField>,
    nodes: Vec<String>,
    source: usize,
    messages: usize,
    edges: Vec<Edge>,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
    kernels: Vec<Matrix>,
    verifier_of: Vec<Option<usize>>,
    sinks: Vec<usize>,
    order: Vec<usize>,
}

/// Global encoding vectors `f_e` over F_q, one per edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalKernels {
    base: Arc<ExtField>,
    messages: usize,
    vectors: Vec<Vec<u32>>,
}

/// A node replacing the packet it received on `edge` by an affine
/// combination of everything it received.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intervention {
    pub node: String,
    pub edge: String,
    /// One coefficient per incoming edge of `node`, summing to 1 in F_q.
    pub coeffs: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InterventionRecord {
    pub node: String,
    pub edge: String,
    pub coeffs: Vec<u32>,
    pub honest: Vec<u32>,
    pub substituted: Vec<u32>,
}

/// Packets on every edge after one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowState {
    pub packets: Vec<TaggedPacket>,
    pub log: Vec<InterventionRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeVerdict {
    pub edge: String,
    pub accepted: bool,
    /// The packet was all zero: accepted, but it authenticates nothing.
    pub uninformative: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeVerdicts {
    pub node: String,
    pub verifier: usize,
    pub edges: Vec<EdgeVerdict>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecodeOutcome {
    Decoded(Vec<TaggedPacket>),
    RankDeficient { rank: usize },
    /// Full rank, but the received packets are not a consistent image of any source batch.
    Inconsistent,
}

/// What a coalition of nodes jointly observes.
#[derive(Clone, Debug)]
pub struct CoalitionView {
    pub members: Vec<MemberView>,
    /// `H`: total number of incoming edges over all members.
    pub h_total: usize,
}

#[derive(Clone, Debug)]
pub struct MemberView {
    pub node: usize,
    pub verifier: Option<usize>,
    /// `H_i`: one row `f_e` per incoming edge.
    pub kernel: Matrix,
    pub packets: Vec<TaggedPacket>,
}

impl Network {
    /// Builds the network over F_q. Kernels absent from `spec` are drawn
    /// uniformly from the `kernels` substream of `seed`, in node order.
    pub fn from_spec(spec: &TopologySpec, q: u32, seed: u64) -> Result<Self> {
        let mut rng = substream(seed, Stream::Kernels);
        Self::from_spec_with(spec, q, &mut rng)
    }

    pub fn from_spec_with<R: Rng + ?Sized>(spec: &TopologySpec, q: u32, rng: &mut R) -> Result<Self> {
        if spec.version != TOPOLOGY_VERSION {
            return Err(Error::Topology(format!(
                "unsupported topology version {} (expected {TOPOLOGY_VERSION})",
                spec.version
            )));
        }
        if spec.messages == 0 {
            return Err(Error::Topology("the source must send at least one message".into()));
        }
        let base = Arc::new(ExtField::new(q, 1)?);
        let mut index = BTreeMap::new();
        for (i, name) in spec.nodes.iter().enumerate() {
            if index.insert(name.as_str(), i).is_some() {
                return Err(Error::Topology(format!("duplicate node `{name}`")));
            }
        }
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::Topology(format!("unknown node `{name}`")))
        };
        let source = lookup(&spec.source)?;
        let mut edges = Vec::with_capacity(spec.edges.len());
        let mut in_edges = vec![Vec::new(); spec.nodes.len()];
        let mut out_edges = vec![Vec::new(); spec.nodes.len()];
        for (e, es) in spec.edges.iter().enumerate() {
            if spec.edges[..e].iter().any(|o| o.id == es.id) {
                return Err(Error::Topology(format!("duplicate edge id `{}`", es.id)));
            }
            let (tail, head) = (lookup(&es.tail)?, lookup(&es.head)?);
            if head == source {
                return Err(Error::Topology(format!("edge `{}` enters the source", es.id)));
            }
            out_edges[tail].push(e);
            in_edges[head].push(e);
            edges.push(Edge {
                id: es.id.clone(),
                tail,
                head,
            });
        }
        for name in spec.kernels.keys() {
            lookup(name)?;
        }
        let mut kernels = Vec::with_capacity(spec.nodes.len());
        for (i, name) in spec.nodes.iter().enumerate() {
            let rows = if i == source { spec.messages } else { in_edges[i].len() };
            let cols = out_edges[i].len();
            let kernel = match spec.kernels.get(name) {
                Some(given) => {
                    if given.len() != rows || given.iter().any(|r| r.len() != cols) {
                        return Err(Error::Topology(format!(
                            "kernel of `{name}` must be {rows}x{cols}"
                        )));
                    }
                    if given.iter().flatten().any(|&x| x >= q) {
                        return Err(Error::Topology(format!("kernel of `{name}` has entries not reduced mod {q}")));
                    }
                    Matrix::from_base_rows(&base, cols, given)?
                }
                None => {
                    let data = (0..rows * cols).map(|_| base.random(rng)).collect();
                    Matrix::from_vec(&base, rows, cols, data)?
                }
            };
            kernels.push(kernel);
        }
        let mut verifier_of = vec![None; spec.nodes.len()];
        for (v, name) in spec.verifiers.iter().enumerate() {
            let i = lookup(name)?;
            if verifier_of[i].replace(v).is_some() {
                return Err(Error::Topology(format!("node `{name}` listed twice as verifier")));
            }
        }
        let sinks = spec.sinks.iter().map(|s| lookup(s)).collect::<Result<Vec<_>>>()?;
        let order = topological_order(spec.nodes.len(), &edges)?;
        Ok(Self {
            base,
            nodes: spec.nodes.clone(),
            source,
            messages: spec.messages,
            edges,
            in_edges,
            out_edges,
            kernels,
            verifier_of,
            sinks,
            order,
        })
    }

    pub fn base_field(&self) -> &Arc<ExtField> {
        &self.base
    }

    pub fn messages(&self) -> usize {
        self.messages
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_name(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn node_index(&self, name: &str) -> Result<usize> {
        self.nodes
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Topology(format!("unknown node `{name}`")))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_index(&self, id: &str) -> Result<usize> {
        self.edges
            .iter()
            .position(|e| e.id == id)
            .ok_or_else(|| Error::Topology(format!("unknown edge `{id}`")))
    }

    pub fn in_edges(&self, node: usize) -> &[usize] {
        &self.in_edges[node]
    }

    pub fn out_edges(&self, node: usize) -> &[usize] {
        &self.out_edges[node]
    }

    pub fn kernel(&self, node: usize) -> &Matrix {
        &self.kernels[node]
    }

    pub fn verifier_of(&self, node: usize) -> Option<usize> {
        self.verifier_of[node]
    }

    /// Number of verifier nodes `V`.
    pub fn verifier_count(&self) -> usize {
        self.verifier_of.iter().flatten().count()
    }

    pub fn sinks(&self) -> &[usize] {
        &self.sinks
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    /// Runs the recursion `f_e = sum_d k_de f_d` in topological order.
    pub fn global_kernels(&self) -> GlobalKernels {
        let n = self.messages;
        let q = self.base.characteristic() as u64;
        let mut vectors = vec![vec![0u32; n]; self.edges.len()];
        for &node in &self.order {
            let inputs: Vec<Vec<u32>> = if node == self.source {
                (0..n)
                    .map(|i| (0..n).map(|j| u32::from(i == j)).collect())
                    .collect()
            } else {
                self.in_edges[node].iter().map(|&d| vectors[d].clone()).collect()
            };
            let kernel = &self.kernels[node];
            for (j, &e) in self.out_edges[node].iter().enumerate() {
                let mut f = vec![0u64; n];
                for (d, input) in inputs.iter().enumerate() {
                    let k = kernel.get(d, j).raw() as u64;
                    for (acc, &x) in f.iter_mut().zip(input) {
                        *acc = (*acc + k * x as u64) % q;
                    }
                }
                vectors[e] = f.into_iter().map(|x| x as u32).collect();
            }
        }
        GlobalKernels {
            base: Arc::clone(&self.base),
            messages: n,
            vectors,
        }
    }

    /// Propagates `packets` through the network, applying `interventions` at
    /// the nodes that receive the named edges.
    pub fn simulate(
        &self,
        field: &ExtField,
        packets: &[TaggedPacket],
        interventions: &[Intervention],
    ) -> Result<FlowState> {
        if field.characteristic() != self.base.characteristic() {
            return Err(Error::Parameter(format!(
                "packets over characteristic {} on a network over F_{}",
                field.characteristic(),
                self.base.characteristic()
            )));
        }
        if packets.len() != self.messages {
            return Err(Error::Shape(format!(
                "network carries {} messages, got {} packets",
                self.messages,
                packets.len()
            )));
        }
        let poly_len = packets[0].tag.len();
        let mut by_node: BTreeMap<usize, Vec<(usize, &Intervention)>> = BTreeMap::new();
        for iv in interventions {
            let node = self.node_index(&iv.node)?;
            let edge = self.edge_index(&iv.edge)?;
            let pos = self.in_edges[node].iter().position(|&e| e == edge).ok_or_else(|| {
                Error::AttackSpec(format!("edge `{}` does not enter node `{}`", iv.edge, iv.node))
            })?;
            check_affine(self.base.characteristic(), self.in_edges[node].len(), &iv.coeffs)?;
            by_node.entry(node).or_default().push((pos, iv));
        }

        let mut flow: Vec<TaggedPacket> = vec![TaggedPacket::zero(poly_len); self.edges.len()];
        let mut log = Vec::new();
        for &node in &self.order {
            let mut inputs: Vec<TaggedPacket> = if node == self.source {
                packets.to_vec()
            } else {
                self.in_edges[node].iter().map(|&d| flow[d].clone()).collect()
            };
            if let Some(list) = by_node.get(&node) {
                let honest = inputs.clone();
                for &(pos, iv) in list {
                    let forged = combine(field, &honest, &iv.coeffs)?;
                    log.push(InterventionRecord {
                        node: iv.node.clone(),
                        edge: iv.edge.clone(),
                        coeffs: iv.coeffs.clone(),
                        honest: honest[pos].flatten(field),
                        substituted: forged.flatten(field),
                    });
                    flow[self.in_edges[node][pos]] = forged.clone();
                    inputs[pos] = forged;
                }
            }
            if self.out_edges[node].is_empty() {
                continue;
            }
            let kernel = &self.kernels[node];
            for (j, &e) in self.out_edges[node].iter().enumerate() {
                let column: Vec<u32> = kernel.column(j).iter().map(|x| x.raw()).collect();
                flow[e] = if inputs.is_empty() {
                    TaggedPacket::zero(poly_len)
                } else {
                    combine(field, &inputs, &column)?
                };
            }
        }
        Ok(FlowState { packets: flow, log })
    }

    /// Runs every verifier over every one of its incoming edges.
    pub fn verify_all(&self, flow: &FlowState, vkeys: &[VerifierKey]) -> Result<Vec<NodeVerdicts>> {
        let mut out = Vec::new();
        for node in 0..self.nodes.len() {
            let Some(v) = self.verifier_of[node] else { continue };
            let key = vkeys.get(v).ok_or_else(|| {
                Error::Parameter(format!("no key for verifier {v} at node `{}`", self.nodes[node]))
            })?;
            let edges = self.in_edges[node]
                .iter()
                .map(|&e| {
                    let p = &flow.packets[e];
                    EdgeVerdict {
                        edge: self.edges[e].id.clone(),
                        accepted: key.verify(p),
                        uninformative: p.is_zero(),
                    }
                })
                .collect();
            out.push(NodeVerdicts {
                node: self.nodes[node].clone(),
                verifier: v,
                edges,
            });
        }
        Ok(out)
    }

    /// Solves `F_t X = Y_t` at `sink` for the source packets.
    pub fn decode(
        &self,
        field: &ExtField,
        kernels: &GlobalKernels,
        flow: &FlowState,
        sink: usize,
    ) -> Result<DecodeOutcome> {
        let incoming = &self.in_edges[sink];
        let received: Vec<TaggedPacket> = incoming.iter().map(|&e| flow.packets[e].clone()).collect();
        decode_observations(field, &kernels.at(incoming), &received)
    }

    /// Stacks the global kernels and packets seen by each coalition member.
    pub fn coalition_view(
        &self,
        kernels: &GlobalKernels,
        flow: &FlowState,
        coalition: &[usize],
    ) -> Result<CoalitionView> {
        if coalition.is_empty() {
            return Err(Error::Parameter("coalition is empty".into()));
        }
        let mut members = Vec::with_capacity(coalition.len());
        for &node in coalition {
            if node >= self.nodes.len() {
                return Err(Error::Topology(format!("node index {node} out of range")));
            }
            let incoming = &self.in_edges[node];
            members.push(MemberView {
                node,
                verifier: self.verifier_of[node],
                kernel: kernels.at(incoming),
                packets: incoming.iter().map(|&e| flow.packets[e].clone()).collect(),
            });
        }
        let h_total = members.iter().map(|m| m.kernel.rows()).sum();
        Ok(CoalitionView { members, h_total })
    }
}

impl GlobalKernels {
    pub fn vector(&self, edge: usize) -> &[u32] {
        &self.vectors[edge]
    }

    /// `F_t`: the rows `f_e` for the given edges, over F_q.
    pub fn at(&self, edges: &[usize]) -> Matrix {
        let rows: Vec<Vec<u32>> = edges.iter().map(|&e| self.vectors[e].clone()).collect();
        Matrix::from_base_rows(&self.base, self.messages, &rows).expect("vectors have n entries")
    }
}

impl CoalitionView {
    /// `(H_1; ...; H_K)` over F_q.
    pub fn stacked_kernel(&self) -> Matrix {
        let mut members = self.members.iter();
        let first = members.next().expect("coalition is nonempty").kernel.clone();
        members.fold(first, |acc, m| acc.vstack(&m.kernel).expect("same column count"))
    }

    pub fn packets(&self) -> Vec<TaggedPacket> {
        self.members.iter().flat_map(|m| m.packets.iter().cloned()).collect()
    }
}

impl DecodeOutcome {
    pub fn payloads(&self) -> Option<Vec<crate::field::Fel>> {
        match self {
            DecodeOutcome::Decoded(ps) => Some(ps.iter().map(|p| p.payload).collect()),
            _ => None,
        }
    }
}

/// Recovers the source packets from packets observed on edges with global
/// vectors given by the rows of `kernel` (over F_q, `n` columns).
pub fn decode_observations(
    field: &ExtField,
    kernel: &Matrix,
    received: &[TaggedPacket],
) -> Result<DecodeOutcome> {
    if kernel.rows() != received.len() {
        return Err(Error::Shape(format!(
            "{} kernel rows but {} packets",
            kernel.rows(),
            received.len()
        )));
    }
    let rank = kernel.rank();
    if rank < kernel.cols() {
        return Ok(DecodeOutcome::RankDeficient { rank });
    }
    let poly_len = received.first().map_or(0, |p| p.tag.len());
    let width = crate::auth::flat_len(field, poly_len);
    let flat: Vec<Vec<u32>> = received.iter().map(|p| p.flatten(field)).collect();
    let y = Matrix::from_base_rows(kernel.field(), width, &flat)?;
    let Some(x) = solve(kernel, &y)? else {
        return Ok(DecodeOutcome::Inconsistent);
    };
    let packets = x
        .to_raw_rows()
        .iter()
        .map(|row| TaggedPacket::parse(field, poly_len, row))
        .collect::<Result<Vec<_>>>()?;
    Ok(DecodeOutcome::Decoded(packets))
}

/// Coefficients must be one per input and sum to 1 in F_q.
pub fn check_affine(q: u32, inputs: usize, coeffs: &[u32]) -> Result<()> {
    if coeffs.len() != inputs {
        return Err(Error::AttackSpec(format!(
            "{} coefficients for {inputs} inputs",
            coeffs.len()
        )));
    }
    if let Some(&bad) = coeffs.iter().find(|&&c| c >= q) {
        return Err(Error::AttackSpec(format!("coefficient {bad} not reduced mod {q}")));
    }
    let sum = coeffs.iter().map(|&c| c as u64).sum::<u64>() % q as u64;
    if sum != 1 {
        return Err(Error::AttackSpec(format!(
            "coefficients sum to {sum} mod {q}, not 1"
        )));
    }
    Ok(())
}

/// Kahn's algorithm, always releasing the lowest-numbered ready node.
fn topological_order(nodes: usize, edges: &[Edge]) -> Result<Vec<usize>> {
    let mut indegree = vec![0usize; nodes];
    let mut succ = vec![Vec::new(); nodes];
    for e in edges {
        indegree[e.head] += 1;
        succ[e.tail].push(e.head);
    }
    let mut ready: VecDeque<usize> = (0..nodes).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(nodes);
    while let Some(i) = ready.pop_front() {
        order.push(i);
        for &j in &succ[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.push_back(j);
            }
        }
    }
    if order.len() != nodes {
        return Err(Error::Topology("network contains a cycle".into()));
    }
    Ok(order)
}

/// Built-in topologies.
pub mod builtin {
    use super::*;

    fn edge(id: &str, tail: &str, head: &str) -> EdgeSpec {
        EdgeSpec {
            id: id.into(),
            tail: tail.into(),
            head: head.into(),
        }
    }

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    pub fn by_name(name: &str) -> Result<TopologySpec> {
        match name {
            "butterfly" => Ok(butterfly()),
            "line" => Ok(line()),
            "diamond" => Ok(diamond()),
            other => Err(Error::Topology(format!("unknown built-in topology `{other}`"))),
        }
    }

    /// The two-message butterfly. `c` codes `a-c` and `b-c` into `c-d`;
    /// `t1` and `t2` each see one direct message and the coded one.
    pub fn butterfly() -> TopologySpec {
        let kernels = [
            ("s", vec![vec![1, 0], vec![0, 1]]),
            ("a", vec![vec![1, 1]]),
            ("b", vec![vec![1, 1]]),
            ("c", vec![vec![1], vec![1]]),
            ("d", vec![vec![1, 1]]),
            ("t1", vec![vec![], vec![]]),
            ("t2", vec![vec![], vec![]]),
        ]
        .into_iter()
        .map(|(n, k)| (n.to_string(), k))
        .collect();
        TopologySpec {
            version: TOPOLOGY_VERSION,
            source: "s".into(),
            messages: 2,
            nodes: names(&["s", "a", "b", "c", "d", "t1", "t2"]),
            edges: vec![
                edge("s-a", "s", "a"),
                edge("s-b", "s", "b"),
                edge("a-t1", "a", "t1"),
                edge("a-c", "a", "c"),
                edge("b-c", "b", "c"),
                edge("b-t2", "b", "t2"),
                edge("c-d", "c", "d"),
                edge("d-t1", "d", "t1"),
                edge("d-t2", "d", "t2"),
            ],
            kernels,
            verifiers: names(&["c", "t1", "t2"]),
            sinks: names(&["t1", "t2"]),
        }
    }

    /// `s -> r1 -> r2 -> t` relaying a single message.
    pub fn line() -> TopologySpec {
        let kernels = [("s", vec![vec![1]]), ("r1", vec![vec![1]]), ("r2", vec![vec![1]]), ("t", vec![vec![]])]
            .into_iter()
            .map(|(n, k)| (n.to_string(), k))
            .collect();
        TopologySpec {
            version: TOPOLOGY_VERSION,
            source: "s".into(),
            messages: 1,
            nodes: names(&["s", "r1", "r2", "t"]),
            edges: vec![edge("s-r1", "s", "r1"), edge("r1-r2", "r1", "r2"), edge("r2-t", "r2", "t")],
            kernels,
            verifiers: names(&["r2", "t"]),
            sinks: names(&["t"]),
        }
    }

    /// Two disjoint relays from `s` to `t`, two messages.
    pub fn diamond() -> TopologySpec {
        let kernels = [
            ("s", vec![vec![1, 0], vec![0, 1]]),
            ("a", vec![vec![1]]),
            ("b", vec![vec![1]]),
            ("t", vec![vec![], vec![]]),
        ]
        .into_iter()
        .map(|(n, k)| (n.to_string(), k))
        .collect();
        TopologySpec {
            version: TOPOLOGY_VERSION,
            source: "s".into(),
            messages: 2,
            nodes: names(&["s", "a", "b", "t"]),
            edges: vec![
                edge("s-a", "s", "a"),
                edge("s-b", "s", "b"),
                edge("a-t", "a", "t"),
                edge("b-t", "b", "t"),
            ],
            kernels,
            verifiers: names(&["a", "b", "t"]),
            sinks: names(&["t"]),
        }
    }

    /// Source feeding each of `fan_in.len()` collector nodes `v1, v2, ...`
    /// over `fan_in[i]` parallel edges. With random source kernels the
    /// collectors' global kernels are uniformly random.
    pub fn fanout(messages: usize, fan_in: &[usize]) -> TopologySpec {
        let mut nodes = vec!["s".to_string()];
        let mut edges = Vec::new();
        for (i, &width) in fan_in.iter().enumerate() {
            let v = format!("v{}", i + 1);
            for j in 0..width {
                edges.push(edge(&format!("s-{v}.{j}"), "s", &v));
            }
            nodes.push(v);
        }
        let verifiers = nodes[1..].to_vec();
        let mut kernels = BTreeMap::new();
        for (i, &width) in fan_in.iter().enumerate() {
            kernels.insert(format!("v{}", i + 1), vec![vec![]; width]);
        }
        TopologySpec {
            version: TOPOLOGY_VERSION,
            source: "s".into(),
            messages,
            nodes,
            edges,
            kernels,
            verifiers,
            sinks: vec![],
        }
    }
}
