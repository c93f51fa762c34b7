//! Scenario configs, the keygen -> simulate -> attack -> analyze pipeline,
//! and deterministic reports.
//!
//! Configs are TOML; reports are pretty-printed JSON whose key order is fixed
//! by the struct definitions below, so the same config and seed always give
//! the same bytes. Elements of F_{q^l} appear in reports as coordinate
//! vectors (constant coordinate first).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attack::{
    brute_force_count, build_recovery_system, forge, gauss_count, h_condition_report, predicted_count,
    predicted_rank, solve_target_coeffs, ForgerySpec, HCondition, RecoverySystem, DEFAULT_GUARD,
};
use crate::auth::{keygen, random_points, SourceKey, SystemParams, TaggedPacket, VerifierKey};
use crate::error::{Error, Result};
use crate::field::{ExtField, Fel};
use crate::net::{builtin, check_affine, decode_observations, DecodeOutcome, FlowState, GlobalKernels, Intervention, InterventionRecord, Network, NodeVerdicts, TopologySpec};
use crate::rng::{substream, Stream};

pub const CONFIG_VERSION: u32 = 1;
pub const REPORT_VERSION: u32 = 1;
/// Flat packet layout: `[header] ++ payload ++ tag_0 ++ ... ++ tag_(k-1)`, each over F_q.
pub const PACKET_LAYOUT: &str = "flat-v1:header,payload[l],tag[k][l]";

const NOTES: [&str; 2] = [
    "key equations evaluate P_t at plain powers x^j of each public point",
    "L_j(s) is taken as coefficient j-1 of the tag polynomial A_s",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    #[serde(default)]
    pub seed: u64,
    pub params: ParamsConfig,
    pub topology: TopologyConfig,
    /// Explicit messages as coordinate vectors; drawn from the seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub messages: Option<Vec<Vec<u32>>>,
    #[serde(default)]
    pub adversaries: Vec<String>,
    #[serde(default)]
    pub attack: AttackConfig,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub q: u32,
    pub l: usize,
    pub k: usize,
    pub m: usize,
    /// Must match the topology's message count when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Public points as coordinate vectors, one per verifier; drawn when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<u32>>>,
    #[serde(default)]
    pub unsafe_n_gt_m: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    /// Path of a topology file, relative to the scenario file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inline: Option<TopologySpec>,
    /// Overrides the topology's verifier list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verifiers: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum AttackConfig {
    #[default]
    None,
    /// Replace the last source packet by an affine combination of the batch.
    Forge {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coeffs: Option<Vec<u32>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target: Option<Vec<u32>>,
    },
    /// `node` replaces what it received on `edge` by an affine combination of its inputs.
    Pollute { node: String, edge: String, coeffs: Vec<u32> },
    /// The adversaries pool their keys and views to count consistent source keys.
    Recover {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        guard: Option<u64>,
    },
}

impl AttackConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            AttackConfig::None => "none",
            AttackConfig::Forge { .. } => "forge",
            AttackConfig::Pollute { .. } => "pollute",
            AttackConfig::Recover { .. } => "recover",
        }
    }
}

/// Command-line overrides applied on top of a config.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub guard: Option<u64>,
    pub unsafe_n_gt_m: bool,
}

impl ScenarioConfig {
    /// Parses and validates a config document. TOML syntax errors carry line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::config(span_field(&e), e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::parse(&text)?, base))
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
        if overrides.unsafe_n_gt_m {
            self.params.unsafe_n_gt_m = true;
        }
        if let (Some(g), AttackConfig::Recover { guard }) = (overrides.guard, &mut self.attack) {
            *guard = Some(g);
        }
    }

    /// Checks that do not need the field or the network.
    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::config(
                "version",
                format!("unsupported version {} (expected {CONFIG_VERSION})", self.version),
            ));
        }
        let q = self.params.q;
        if !crate::field::is_prime(q) {
            return Err(Error::config("params.q", format!("{q} is not prime")));
        }
        let sources = [
            self.topology.builtin.is_some(),
            self.topology.file.is_some(),
            self.topology.inline.is_some(),
        ];
        if sources.iter().filter(|&&b| b).count() != 1 {
            return Err(Error::config(
                "topology",
                "give exactly one of `builtin`, `file`, `inline`",
            ));
        }
        match &self.attack {
            AttackConfig::Forge { coeffs, target } => match (coeffs, target) {
                (Some(c), None) => {
                    if c.is_empty() {
                        return Err(Error::config("attack.coeffs", "no coefficients given"));
                    }
                    check_affine(q, c.len(), c).map_err(|e| Error::config("attack.coeffs", e.to_string()))?
                }
                (None, Some(_)) => {}
                _ => {
                    return Err(Error::config(
                        "attack",
                        "forge needs exactly one of `coeffs` or `target`",
                    ))
                }
            },
            AttackConfig::Pollute { coeffs, .. } => {
                check_affine(q, coeffs.len(), coeffs)
                    .map_err(|e| Error::config("attack.coeffs", e.to_string()))?;
            }
            AttackConfig::Recover { .. } => {
                if self.adversaries.is_empty() {
                    return Err(Error::config("adversaries", "recover needs a nonempty coalition"));
                }
            }
            AttackConfig::None => {}
        }
        Ok(())
    }

    fn topology_spec(&self, base_dir: &Path) -> Result<TopologySpec> {
        let mut spec = if let Some(name) = &self.topology.builtin {
            builtin::by_name(name).map_err(|e| Error::config("topology.builtin", e.to_string()))?
        } else if let Some(file) = &self.topology.file {
            let path = base_dir.join(file);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::config("topology.file", format!("{}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| Error::config("topology.file", e.to_string()))?
        } else {
            self.topology.inline.clone().expect("validated")
        };
        if let Some(v) = &self.topology.verifiers {
            spec.verifiers = v.clone();
        }
        Ok(spec)
    }
}

fn span_field(e: &toml::de::Error) -> String {
    match e.span() {
        Some(span) => format!("bytes {}..{}", span.start, span.end),
        None => "document".into(),
    }
}

/// Everything set up before an attack runs.
pub struct Setup {
    pub field: Arc<ExtField>,
    pub network: Network,
    pub params: SystemParams,
    pub key: SourceKey,
    pub vkeys: Vec<VerifierKey>,
    pub messages: Vec<Fel>,
    pub packets: Vec<TaggedPacket>,
    pub kernels: GlobalKernels,
}

impl Setup {
    pub fn new(cfg: &ScenarioConfig, base_dir: &Path) -> Result<Self> {
        let p = &cfg.params;
        let field = Arc::new(ExtField::new(p.q, p.l).map_err(|e| Error::config("params", e.to_string()))?);
        let spec = cfg.topology_spec(base_dir)?;
        let network = Network::from_spec(&spec, p.q, cfg.seed)?;
        if let Some(n) = p.n {
            if n != network.messages() {
                return Err(Error::config(
                    "params.n",
                    format!("topology carries {} messages, config says {n}", network.messages()),
                ));
            }
        }
        let verifiers = network.verifier_count();
        let points = match &p.points {
            Some(list) => {
                if list.len() != verifiers {
                    return Err(Error::config(
                        "params.points",
                        format!("{} points for {verifiers} verifiers", list.len()),
                    ));
                }
                list.iter()
                    .map(|c| field.from_vector(c))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::config("params.points", e.to_string()))?
            }
            None => random_points(&field, verifiers, &mut substream(cfg.seed, Stream::Points))
                .map_err(|e| Error::config("params.points", e.to_string()))?,
        };
        let params = SystemParams::new(field.clone(), p.k, p.m, network.messages(), points, p.unsafe_n_gt_m)
            .map_err(|e| Error::config("params", e.to_string()))?;
        let (key, vkeys) = keygen(&params, cfg.seed);
        let messages = match &cfg.messages {
            Some(list) => {
                if list.len() != network.messages() {
                    return Err(Error::config(
                        "messages",
                        format!("{} messages for a topology carrying {}", list.len(), network.messages()),
                    ));
                }
                list.iter()
                    .map(|c| field.from_vector(c))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::config("messages", e.to_string()))?
            }
            None => {
                let mut rng = substream(cfg.seed, Stream::Messages);
                (0..network.messages()).map(|_| field.random(&mut rng)).collect()
            }
        };
        let packets = messages.iter().map(|&s| key.tag(s)).collect();
        let kernels = network.global_kernels();
        Ok(Self {
            field,
            network,
            params,
            key,
            vkeys,
            messages,
            packets,
            kernels,
        })
    }

    fn coalition(&self, names: &[String]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                self.network
                    .node_index(n)
                    .map_err(|e| Error::config("adversaries", e.to_string()))
            })
            .collect()
    }

    fn vec(&self, a: Fel) -> Vec<u32> {
        self.field.to_vector(a)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldReport {
    pub q: u32,
    pub l: usize,
    pub modulus: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamsReport {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub v: usize,
    pub points: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SinkReport {
    pub sink: String,
    /// `decoded`, `rank_deficient` or `inconsistent`.
    pub status: String,
    pub rank: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payloads: Option<Vec<Vec<u32>>>,
    /// Decoding did not return the original payloads.
    pub diverged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub format: &'static str,
    pub version: u32,
    pub packet_layout: &'static str,
    pub seed: u64,
    pub scenario: ScenarioConfig,
    pub field: FieldReport,
    pub params: ParamsReport,
    pub messages: Vec<Vec<u32>>,
    pub source_packets: Vec<Vec<u32>>,
    pub global_kernels: BTreeMap<String, Vec<u32>>,
    pub verification: Vec<NodeVerdicts>,
    pub all_accepted: bool,
    pub decoding: Vec<SinkReport>,
    pub interventions: Vec<InterventionRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attack: Option<AttackReport>,
    pub notes: Vec<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AttackReport {
    Forge(ForgeReport),
    Pollute(PolluteReport),
    Recover(RecoverReport),
}

#[derive(Clone, Debug, Serialize)]
pub struct ForgeReport {
    /// `source` when no coalition is named, otherwise whether the coalition could decode.
    pub knowledge: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forged: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forged_payload: Option<Vec<u32>>,
    /// The forged packet is coefficient-wise the honest packet for its payload.
    pub equals_honest_tag: bool,
    /// Direct verification of the forged packet, one bit per verifier index.
    pub accepts: Vec<bool>,
    pub decode_divergence: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolluteReport {
    pub node: String,
    pub edge: String,
    pub coeffs: Vec<u32>,
    pub changed_packet: bool,
    pub decode_divergence: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecoverReport {
    pub coalition: Vec<String>,
    pub rows: usize,
    pub unknowns: usize,
    pub r0: usize,
    pub rank: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_count: Option<String>,
    pub consistent: bool,
    pub gauss_count: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brute_count: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub true_key_satisfies: bool,
    pub h_condition: HCondition,
    pub counts_match: bool,
}

/// Runs a scenario end to end.
pub fn run_scenario(cfg: &ScenarioConfig, base_dir: &Path) -> Result<Report> {
    cfg.validate()?;
    let setup = Setup::new(cfg, base_dir)?;
    let field = setup.field.as_ref();

    let mut batch = setup.packets.clone();
    let mut interventions = Vec::new();
    let mut attack = None;
    match &cfg.attack {
        AttackConfig::None | AttackConfig::Recover { .. } => {}
        AttackConfig::Pollute { node, edge, coeffs } => {
            interventions.push(Intervention {
                node: node.clone(),
                edge: edge.clone(),
                coeffs: coeffs.clone(),
            });
        }
        AttackConfig::Forge { coeffs, target } => {
            let report = run_forge(&setup, cfg, coeffs.as_deref(), target.as_deref())?;
            if let (Some(flat), None) = (&report.forged, &report.failure) {
                let forged = TaggedPacket::parse(field, setup.params.poly_len(), flat)?;
                *batch.last_mut().expect("n >= 1") = forged;
            }
            attack = Some(report);
        }
    }

    let flow = setup
        .network
        .simulate(field, &batch, &interventions)
        .map_err(|e| match e {
            Error::AttackSpec(m) | Error::Topology(m) => Error::config("attack", m),
            other => other,
        })?;
    let verification = setup.network.verify_all(&flow, &setup.vkeys)?;
    let all_accepted = verification.iter().all(|n| n.edges.iter().all(|e| e.accepted));
    let decoding = decode_sinks(&setup, &flow)?;
    let any_diverged = decoding.iter().any(|d| d.diverged);

    let attack = match &cfg.attack {
        AttackConfig::None => None,
        AttackConfig::Forge { .. } => attack.map(|mut r| {
            r.decode_divergence = any_diverged;
            AttackReport::Forge(r)
        }),
        AttackConfig::Pollute { node, edge, coeffs } => {
            let changed = flow.log.iter().any(|r| r.honest != r.substituted);
            Some(AttackReport::Pollute(PolluteReport {
                node: node.clone(),
                edge: edge.clone(),
                coeffs: coeffs.clone(),
                changed_packet: changed,
                decode_divergence: any_diverged,
            }))
        }
        AttackConfig::Recover { guard } => Some(AttackReport::Recover(run_recover(
            &setup,
            cfg,
            &flow,
            guard.unwrap_or(DEFAULT_GUARD),
        )?)),
    };

    let global_kernels = setup
        .network
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| (edge.id.clone(), setup.kernels.vector(e).to_vec()))
        .collect();
    Ok(Report {
        format: "ncauth-report",
        version: REPORT_VERSION,
        packet_layout: PACKET_LAYOUT,
        seed: cfg.seed,
        scenario: cfg.clone(),
        field: FieldReport {
            q: field.characteristic(),
            l: field.degree(),
            modulus: field.modulus().to_vec(),
        },
        params: ParamsReport {
            k: setup.params.poly_len(),
            m: setup.params.tag_dim(),
            n: setup.params.messages(),
            v: setup.params.verifiers(),
            points: setup.params.points().iter().map(|&x| setup.vec(x)).collect(),
        },
        messages: setup.messages.iter().map(|&s| setup.vec(s)).collect(),
        source_packets: setup.packets.iter().map(|p| p.flatten(field)).collect(),
        global_kernels,
        verification,
        all_accepted,
        decoding,
        interventions: flow.log.clone(),
        attack,
        notes: NOTES.to_vec(),
    })
}

fn decode_sinks(setup: &Setup, flow: &FlowState) -> Result<Vec<SinkReport>> {
    let field = setup.field.as_ref();
    setup
        .network
        .sinks()
        .iter()
        .map(|&sink| {
            let outcome = setup.network.decode(field, &setup.kernels, flow, sink)?;
            let rank = setup.kernels.at(setup.network.in_edges(sink)).rank();
            let (status, payloads) = match &outcome {
                DecodeOutcome::Decoded(_) => ("decoded", outcome.payloads()),
                DecodeOutcome::RankDeficient { .. } => ("rank_deficient", None),
                DecodeOutcome::Inconsistent => ("inconsistent", None),
            };
            let diverged = match &payloads {
                Some(p) => p != &setup.messages,
                None => status == "inconsistent",
            };
            Ok(SinkReport {
                sink: setup.network.node_name(sink).to_string(),
                status: status.into(),
                rank,
                payloads: payloads.map(|p| p.iter().map(|&s| setup.vec(s)).collect()),
                diverged,
            })
        })
        .collect()
}

fn run_forge(
    setup: &Setup,
    cfg: &ScenarioConfig,
    coeffs: Option<&[u32]>,
    target: Option<&[u32]>,
) -> Result<ForgeReport> {
    let field = setup.field.as_ref();
    let mut report = ForgeReport {
        knowledge: "source".into(),
        coeffs: None,
        forged: None,
        forged_payload: None,
        equals_honest_tag: false,
        accepts: vec![],
        decode_divergence: false,
        failure: None,
    };
    // The adversaries first have to learn the batch by decoding what they saw.
    let known = if cfg.adversaries.is_empty() {
        setup.packets.clone()
    } else {
        let coalition = setup.coalition(&cfg.adversaries)?;
        let honest = setup.network.simulate(field, &setup.packets, &[])?;
        let view = setup.network.coalition_view(&setup.kernels, &honest, &coalition)?;
        match decode_observations(field, &view.stacked_kernel(), &view.packets())? {
            DecodeOutcome::Decoded(ps) => {
                report.knowledge = "coalition-decoded".into();
                ps
            }
            other => {
                report.knowledge = "coalition-cannot-decode".into();
                report.failure = Some(format!("coalition cannot decode: {other:?}"));
                return Ok(report);
            }
        }
    };
    let spec = match (coeffs, target) {
        (Some(c), _) => ForgerySpec::new(field.characteristic(), c.to_vec())
            .map_err(|e| Error::config("attack.coeffs", e.to_string()))?,
        (None, Some(t)) => {
            let target = field
                .from_vector(t)
                .map_err(|e| Error::config("attack.target", e.to_string()))?;
            let payloads: Vec<Fel> = known.iter().map(|p| p.payload).collect();
            match solve_target_coeffs(field, &payloads, target) {
                Some(spec) => spec,
                None => {
                    report.failure = Some("target outside the affine span of the messages".into());
                    return Ok(report);
                }
            }
        }
        (None, None) => unreachable!("validated"),
    };
    let forged = forge(field, &known, &spec).map_err(|e| Error::config("attack.coeffs", e.to_string()))?;
    report.equals_honest_tag = forged == setup.key.tag(forged.payload);
    report.accepts = setup.vkeys.iter().map(|v| v.verify(&forged)).collect();
    report.coeffs = Some(spec.coeffs().to_vec());
    report.forged_payload = Some(setup.vec(forged.payload));
    report.forged = Some(forged.flatten(field));
    Ok(report)
}

fn run_recover(setup: &Setup, cfg: &ScenarioConfig, flow: &FlowState, guard: u64) -> Result<RecoverReport> {
    let coalition = setup.coalition(&cfg.adversaries)?;
    let view = setup.network.coalition_view(&setup.kernels, flow, &coalition)?;
    let system = build_recovery_system(&setup.params, &view, &setup.vkeys)
        .map_err(|e| Error::config("adversaries", e.to_string()))?;
    let analysis = analyze(&system, setup.key.matrix(), guard)?;
    Ok(RecoverReport {
        coalition: cfg.adversaries.clone(),
        rows: system.coeff.rows(),
        unknowns: system.coeff.cols(),
        r0: system.meta.r0,
        rank: analysis.rank,
        predicted_rank: analysis.predicted_rank,
        predicted_count: analysis.predicted_count.clone(),
        consistent: analysis.consistent,
        gauss_count: analysis.gauss_count.clone(),
        brute_count: analysis.brute_count.clone(),
        skipped: analysis.skipped.clone(),
        true_key_satisfies: analysis.true_key_satisfies,
        h_condition: h_condition_report(&system.meta),
        counts_match: analysis.counts_match(),
    })
}

/// Counts and ranks for one recovery system.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub rank: usize,
    pub predicted_rank: Option<usize>,
    pub predicted_count: Option<String>,
    pub consistent: bool,
    pub gauss_count: String,
    pub brute_count: Option<String>,
    pub skipped: Option<String>,
    pub true_key_satisfies: bool,
}

impl Analysis {
    /// Every available count agrees; the brute-force count must be present.
    pub fn counts_match(&self) -> bool {
        match (&self.predicted_count, &self.brute_count) {
            (Some(p), Some(b)) => p == b && b == &self.gauss_count,
            _ => false,
        }
    }

    pub fn rank_match(&self) -> bool {
        self.predicted_rank == Some(self.rank)
    }
}

pub fn analyze(system: &RecoverySystem, true_key: &crate::linalg::Matrix, guard: u64) -> Result<Analysis> {
    let gauss = gauss_count(system)?;
    let (brute_count, skipped) = match brute_force_count(system, guard) {
        Ok(c) => (Some(c.to_string()), None),
        Err(Error::Resource(m)) => (None, Some(m)),
        Err(e) => return Err(e),
    };
    Ok(Analysis {
        rank: system.coeff.rank(),
        predicted_rank: predicted_rank(&system.meta).ok(),
        predicted_count: predicted_count(&system.meta).ok().map(|c| c.to_string()),
        consistent: gauss.consistent,
        gauss_count: gauss.count.to_string(),
        brute_count,
        skipped,
        true_key_satisfies: system.is_satisfied_by(true_key)?,
    })
}

/// Key material as reported by the `keygen` subcommand.
#[derive(Clone, Debug, Serialize)]
pub struct KeygenReport {
    pub format: &'static str,
    pub version: u32,
    pub seed: u64,
    pub field: FieldReport,
    pub params: ParamsReport,
    /// Row `t` lists the coefficients of `P_t`.
    pub source_key: Vec<Vec<Vec<u32>>>,
    pub verifier_keys: Vec<VerifierKeyReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifierKeyReport {
    pub index: usize,
    pub point: Vec<u32>,
    pub evals: Vec<Vec<u32>>,
}

pub fn run_keygen(cfg: &ScenarioConfig, base_dir: &Path) -> Result<KeygenReport> {
    cfg.validate()?;
    let setup = Setup::new(cfg, base_dir)?;
    let f = setup.field.as_ref();
    Ok(KeygenReport {
        format: "ncauth-keys",
        version: REPORT_VERSION,
        seed: cfg.seed,
        field: FieldReport {
            q: f.characteristic(),
            l: f.degree(),
            modulus: f.modulus().to_vec(),
        },
        params: ParamsReport {
            k: setup.params.poly_len(),
            m: setup.params.tag_dim(),
            n: setup.params.messages(),
            v: setup.params.verifiers(),
            points: setup.params.points().iter().map(|&x| setup.vec(x)).collect(),
        },
        source_key: setup
            .key
            .matrix()
            .to_rows()
            .into_iter()
            .map(|row| row.into_iter().map(|a| setup.vec(a)).collect())
            .collect(),
        verifier_keys: setup
            .vkeys
            .iter()
            .map(|v| VerifierKeyReport {
                index: v.index,
                point: setup.vec(v.point),
                evals: v.evals.iter().map(|&e| setup.vec(e)).collect(),
            })
            .collect(),
    })
}

/// Ranges for the solution-count experiment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub version: u32,
    #[serde(default)]
    pub seed: u64,
    pub q: Vec<u32>,
    pub l: Vec<usize>,
    pub k: Vec<usize>,
    pub m: Vec<usize>,
    /// Coalition sizes `K`.
    pub coalition: Vec<usize>,
    /// `fanout` or `butterfly`.
    #[serde(default = "default_family")]
    pub family: String,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_guard")]
    pub guard: u64,
    /// Upper bound on incoming edges per coalition member (fanout family); defaults to `M + 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_fan_in: Option<usize>,
    /// Draw up to `M + 1` messages instead of `M`.
    #[serde(default)]
    pub unsafe_n_gt_m: bool,
}

fn default_family() -> String {
    "fanout".into()
}

fn default_repetitions() -> usize {
    1
}

fn default_guard() -> u64 {
    DEFAULT_GUARD
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: SweepConfig =
            toml::from_str(text).map_err(|e| Error::config(span_field(&e), e.to_string()))?;
        if cfg.version != CONFIG_VERSION {
            return Err(Error::config("version", format!("unsupported version {}", cfg.version)));
        }
        if cfg.family != "fanout" && cfg.family != "butterfly" {
            return Err(Error::config("family", format!("unknown family `{}`", cfg.family)));
        }
        Ok(cfg)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub family: String,
    pub seed: u64,
    pub q: u32,
    pub l: usize,
    pub k: usize,
    pub m: usize,
    pub n: usize,
    #[serde(rename = "K")]
    pub coalition: usize,
    pub fan_in: Vec<usize>,
    pub repeated_messages: bool,
    pub r0: Option<usize>,
    pub h_total: Option<usize>,
    pub condition_held: Option<bool>,
    pub rank: Option<usize>,
    pub predicted_rank: Option<usize>,
    pub predicted_count: Option<String>,
    pub gauss_count: Option<String>,
    pub brute_count: Option<String>,
    pub consistent: Option<bool>,
    pub true_key_satisfies: Option<bool>,
    pub count_match: Option<bool>,
    pub rank_match: Option<bool>,
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    pub instances: usize,
    pub evaluated: usize,
    pub skipped: usize,
    pub mismatches: usize,
    pub h_exceeds_m: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub format: &'static str,
    pub version: u32,
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

#[derive(Clone, Debug)]
struct InstanceSpec {
    index: usize,
    seed: u64,
    q: u32,
    l: usize,
    k: usize,
    m: usize,
    coalition: usize,
}

/// Runs every `(q, l, k, M, K)` combination `repetitions` times.
pub fn lemma_sweep(cfg: &SweepConfig) -> SweepReport {
    let mut seeds = substream(cfg.seed, Stream::Instances);
    let mut specs = Vec::new();
    for &q in &cfg.q {
        for &l in &cfg.l {
            for &k in &cfg.k {
                for &m in &cfg.m {
                    for &coalition in &cfg.coalition {
                        for _ in 0..cfg.repetitions {
                            specs.push(InstanceSpec {
                                index: specs.len(),
                                seed: seeds.gen(),
                                q,
                                l,
                                k,
                                m,
                                coalition,
                            });
                        }
                    }
                }
            }
        }
    }
    let rows: Vec<SweepRow> = specs.par_iter().map(|s| sweep_instance(cfg, s)).collect();
    let evaluated = rows.iter().filter(|r| r.skipped.is_none()).count();
    let mismatches = rows
        .iter()
        .filter(|r| r.skipped.is_none())
        .filter(|r| {
            r.count_match != Some(true) || r.rank_match != Some(true) || r.true_key_satisfies != Some(true)
        })
        .count();
    let h_exceeds_m = rows
        .iter()
        .filter(|r| r.skipped.is_none() && r.condition_held == Some(false))
        .count();
    SweepReport {
        format: "ncauth-lemma-sweep",
        version: REPORT_VERSION,
        config: cfg.clone(),
        summary: SweepSummary {
            instances: rows.len(),
            evaluated,
            skipped: rows.len() - evaluated,
            mismatches,
            h_exceeds_m,
        },
        rows,
    }
}

fn sweep_instance(cfg: &SweepConfig, s: &InstanceSpec) -> SweepRow {
    let mut row = SweepRow {
        index: s.index,
        family: cfg.family.clone(),
        seed: s.seed,
        q: s.q,
        l: s.l,
        k: s.k,
        m: s.m,
        n: 0,
        coalition: s.coalition,
        fan_in: vec![],
        repeated_messages: false,
        r0: None,
        h_total: None,
        condition_held: None,
        rank: None,
        predicted_rank: None,
        predicted_count: None,
        gauss_count: None,
        brute_count: None,
        consistent: None,
        true_key_satisfies: None,
        count_match: None,
        rank_match: None,
        skipped: None,
    };
    if let Err(reason) = fill_instance(cfg, s, &mut row) {
        row.skipped = Some(reason.to_string());
    }
    row
}

fn fill_instance(cfg: &SweepConfig, s: &InstanceSpec, row: &mut SweepRow) -> Result<()> {
    if s.coalition == 0 || s.coalition >= s.k {
        return Err(Error::Hypothesis(format!("K = {} outside 1..=k-1", s.coalition)));
    }
    let field = Arc::new(ExtField::new(s.q, s.l)?);
    let unknowns = (s.k * (s.m + 1)) as u32;
    if (field.order() as u128).checked_pow(unknowns).is_none_or(|t| t > cfg.guard as u128) {
        return Err(Error::Resource(format!(
            "{}^{unknowns} candidates exceed the guard {}",
            field.order(),
            cfg.guard
        )));
    }
    let mut rng = substream(s.seed, Stream::Instances);
    let (spec, coalition_nodes) = match cfg.family.as_str() {
        "butterfly" => {
            let spec = builtin::butterfly();
            let mut members = spec.verifiers.clone();
            members.shuffle(&mut rng);
            members.truncate(s.coalition);
            if members.len() < s.coalition {
                return Err(Error::Parameter("butterfly has too few verifiers".into()));
            }
            (spec, members)
        }
        _ => {
            let max_n = if cfg.unsafe_n_gt_m { s.m + 1 } else { s.m };
            let n = rng.gen_range(1..=max_n);
            let max_fan_in = cfg.max_fan_in.unwrap_or(s.m + 2);
            let fan_in: Vec<usize> = (0..s.coalition).map(|_| rng.gen_range(0..=max_fan_in)).collect();
            row.fan_in = fan_in.clone();
            let mut spec = builtin::fanout(n, &fan_in);
            // Random source kernel: the members' global kernels are uniform.
            spec.kernels.remove("s");
            let members = spec.verifiers.clone();
            (spec, members)
        }
    };
    let network = Network::from_spec_with(&spec, s.q, &mut rng)?;
    row.n = network.messages();
    let points = random_points(&field, network.verifier_count(), &mut rng)?;
    let params = SystemParams::new(
        field.clone(),
        s.k,
        s.m,
        network.messages(),
        points,
        cfg.unsafe_n_gt_m,
    )?;
    let (key, vkeys) = keygen(&params, rng.gen());
    let messages: Vec<Fel> = (0..network.messages()).map(|_| field.random(&mut rng)).collect();
    row.repeated_messages = (1..messages.len()).any(|i| messages[..i].contains(&messages[i]));
    let packets: Vec<TaggedPacket> = messages.iter().map(|&x| key.tag(x)).collect();
    let flow = network.simulate(&field, &packets, &[])?;
    let kernels = network.global_kernels();
    let coalition = coalition_nodes
        .iter()
        .map(|n| network.node_index(n))
        .collect::<Result<Vec<_>>>()?;
    let view = network.coalition_view(&kernels, &flow, &coalition)?;
    let system = build_recovery_system(&params, &view, &vkeys)?;
    let analysis = analyze(&system, key.matrix(), cfg.guard)?;
    let hc = h_condition_report(&system.meta);
    row.r0 = Some(system.meta.r0);
    row.h_total = Some(hc.h_total);
    row.condition_held = Some(hc.condition_held);
    row.rank = Some(analysis.rank);
    row.predicted_rank = analysis.predicted_rank;
    row.predicted_count = analysis.predicted_count.clone();
    row.gauss_count = Some(analysis.gauss_count.clone());
    row.brute_count = analysis.brute_count.clone();
    row.consistent = Some(analysis.consistent);
    row.true_key_satisfies = Some(analysis.true_key_satisfies);
    row.count_match = Some(analysis.counts_match());
    row.rank_match = Some(analysis.rank_match());
    if let Some(reason) = analysis.skipped {
        return Err(Error::Resource(reason));
    }
    Ok(())
}

impl SweepReport {
    /// Tab-separated table followed by a one-line summary.
    pub fn to_table(&self) -> String {
        let mut out = String::from(
            "idx\tfamily\tq\tl\tk\tM\tn\tK\tH\tH<=M\tr0\trank\tpred_rank\tpredicted\tgauss\tbrute\tmatch\n",
        );
        let opt = |x: &Option<String>| x.clone().unwrap_or_else(|| "-".into());
        for r in &self.rows {
            if let Some(reason) = &r.skipped {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\tskipped: {reason}\n",
                    r.index, r.family, r.q, r.l, r.k, r.m, r.n, r.coalition
                ));
                continue;
            }
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                r.index,
                r.family,
                r.q,
                r.l,
                r.k,
                r.m,
                r.n,
                r.coalition,
                r.h_total.unwrap_or(0),
                r.condition_held.unwrap_or(false),
                r.r0.unwrap_or(0),
                r.rank.unwrap_or(0),
                r.predicted_rank.map_or("-".into(), |x| x.to_string()),
                opt(&r.predicted_count),
                opt(&r.gauss_count),
                opt(&r.brute_count),
                r.count_match == Some(true) && r.rank_match == Some(true),
            ));
        }
        out.push_str(&self.summary_line());
        out.push('\n');
        out
    }

    pub fn summary_line(&self) -> String {
        let s = &self.summary;
        format!(
            "{} instances, {} evaluated, {} skipped, {} mismatches, {} with H > M",
            s.instances, s.evaluated, s.skipped, s.mismatches, s.h_exceeds_m
        )
    }
}

/// Built-in demo: pollution on the binary butterfly.
pub fn demo_config() -> ScenarioConfig {
    ScenarioConfig {
        version: CONFIG_VERSION,
        seed: 2013,
        params: ParamsConfig {
            q: 2,
            l: 2,
            k: 3,
            m: 2,
            n: None,
            points: None,
            unsafe_n_gt_m: false,
        },
        topology: TopologyConfig {
            builtin: Some("butterfly".into()),
            file: None,
            inline: None,
            verifiers: None,
        },
        messages: Some(vec![vec![1, 0], vec![0, 1]]),
        adversaries: vec![],
        attack: AttackConfig::Pollute {
            node: "c".into(),
            edge: "a-c".into(),
            coeffs: vec![0, 1],
        },
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}
