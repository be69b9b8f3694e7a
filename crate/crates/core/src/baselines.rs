//! Distributed-election baselines: LEACH, SEP, E-SEP and DEEC.
//!
//! These follow their usual literature definitions:
//!
//! * LEACH: `T(n) = p / (1 − p·(r mod ⌈1/p⌉))` for nodes that have not been
//!   head in the current epoch, 0 otherwise.
//! * SEP (two tiers, advanced fraction `m`, extra energy `α`):
//!   `p_nrm = p / (1 + α·m)`, `p_adv = p·(1 + α) / (1 + α·m)`, each with its
//!   own epoch `⌈1/p_tier⌉`. Advance and super nodes together form SEP's
//!   advanced class; their mean extra energy is used as `α`.
//! * E-SEP (three tiers with extra energies `0, α, 2α` and fractions
//!   `f_n, f_i, f_a`): `p_t = p·(1 + extra_t) / (1 + α·f_i + 2α·f_a)`.
//! * DEEC: `p_i = p·E_i(r) / Ē(r)` with `Ē(r)` the true mean residual energy
//!   of alive nodes, clamped to `[0, 1]`, then used in the LEACH threshold
//!   with epoch `⌈1/p_i⌉`.
//!
//! Elected heads are joined by every other alive node through the nearest
//! head anywhere in the field. One uniform draw is consumed per alive node,
//! in ascending id order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::ceec::{ClusterAssignment, ClusterError};
use crate::scalar::{ceil_tolerant, Scalar};
use crate::topology::{NetworkConfig, NodeState, Tier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProtocolKind {
    Ceec,
    Leach,
    Sep,
    Esep,
    Deec,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 5] = [
        ProtocolKind::Ceec,
        ProtocolKind::Leach,
        ProtocolKind::Sep,
        ProtocolKind::Esep,
        ProtocolKind::Deec,
    ];

    /// Lower-case identifier used on the command line and in file names.
    pub fn key(self) -> &'static str {
        match self {
            ProtocolKind::Ceec => "ceec",
            ProtocolKind::Leach => "leach",
            ProtocolKind::Sep => "sep",
            ProtocolKind::Esep => "esep",
            ProtocolKind::Deec => "deec",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ProtocolKind::Ceec => "CEEC",
            ProtocolKind::Leach => "LEACH",
            ProtocolKind::Sep => "SEP",
            ProtocolKind::Esep => "E-SEP",
            ProtocolKind::Deec => "DEEC",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown protocol `{0}` (expected one of ceec, leach, sep, esep, deec)")]
pub struct UnknownProtocol(pub String);

impl FromStr for ProtocolKind {
    type Err = UnknownProtocol;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "").as_str() {
            "ceec" => Ok(ProtocolKind::Ceec),
            "leach" => Ok(ProtocolKind::Leach),
            "sep" => Ok(ProtocolKind::Sep),
            "esep" => Ok(ProtocolKind::Esep),
            "deec" => Ok(ProtocolKind::Deec),
            _ => Err(UnknownProtocol(s.to_string())),
        }
    }
}

/// Rotation epoch `⌈1/p⌉` in rounds; `None` when `p` is zero.
pub fn epoch_length<S: Scalar>(p: S) -> Option<u64> {
    if p.is_nan() || p <= S::zero() {
        return None;
    }
    let n = ceil_tolerant(S::one() / p.min(S::one()));
    Some(n.to_u64().unwrap_or(u64::MAX).max(1))
}

/// LEACH election threshold for zero-based round `round`.
pub fn leach_threshold<S: Scalar>(p: S, round: u64, eligible: bool) -> S {
    let Some(epoch) = epoch_length(p).filter(|_| eligible) else {
        return S::zero();
    };
    let phase = S::from_u64(round % epoch).expect("phase representable");
    let denom = S::one() - p * phase;
    if denom <= S::zero() {
        return S::one();
    }
    (p / denom).max(S::zero()).min(S::one())
}

/// SEP's `(p_normal, p_advanced)`.
pub fn sep_thresholds<S: Scalar>(p: S, alpha: S, m: S) -> (S, S) {
    let denom = S::one() + alpha * m;
    (p / denom, p * (S::one() + alpha) / denom)
}

/// E-SEP's `(p_normal, p_intermediate, p_advanced)` for tier fractions
/// `[normal, intermediate, advanced]`.
pub fn esep_thresholds<S: Scalar>(p: S, alpha: S, fractions: [S; 3]) -> (S, S, S) {
    let two_alpha = alpha + alpha;
    let denom = S::one() + alpha * fractions[1] + two_alpha * fractions[2];
    (
        p / denom,
        p * (S::one() + alpha) / denom,
        p * (S::one() + two_alpha) / denom,
    )
}

pub fn deec_probability<S: Scalar>(p: S, node_residual: S, network_average: S) -> S {
    if node_residual.is_nan() || network_average.is_nan() || node_residual <= S::zero() || network_average <= S::zero()
    {
        return S::zero();
    }
    (p * node_residual / network_average).min(S::one())
}

/// Per-tier probabilities for the static-weight protocols.
fn tier_probabilities<S: Scalar>(kind: ProtocolKind, config: &NetworkConfig<S>) -> [S; 3] {
    let total = S::from_count(config.total_nodes());
    let [f_n, f_a, f_s] = [config.n1, config.n2, config.n3].map(|c| S::from_count(c) / total);
    match kind {
        ProtocolKind::Sep => {
            let advanced = config.n2 + config.n3;
            let alpha_eff = if advanced == 0 {
                S::zero()
            } else {
                config.alpha * S::from_count(config.n2 + 2 * config.n3) / S::from_count(advanced)
            };
            let (pn, pa) = sep_thresholds(config.p, alpha_eff, f_a + f_s);
            [pn, pa, pa]
        }
        ProtocolKind::Esep => {
            let (pn, pi, pa) = esep_thresholds(config.p, config.alpha, [f_n, f_a, f_s]);
            [pn, pi, pa]
        }
        _ => [config.p; 3],
    }
}

fn tier_index(tier: Tier) -> usize {
    match tier {
        Tier::Normal => 0,
        Tier::Advance => 1,
        Tier::Super => 2,
    }
}

/// Stochastic election for one round (`round` is 1-based). Records each
/// elected head's round in `last_head_round`. An empty head list means
/// every alive node reports directly to the base station.
pub fn baseline_select<S: Scalar, R: Rng + ?Sized>(
    kind: ProtocolKind,
    nodes: &mut [NodeState<S>],
    config: &NetworkConfig<S>,
    round: u64,
    rng: &mut R,
) -> Result<ClusterAssignment, ClusterError> {
    assert!(
        kind != ProtocolKind::Ceec,
        "CEEC is selected centrally, not by election"
    );
    let alive: Vec<usize> = {
        let mut idx: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].alive).collect();
        idx.sort_unstable_by_key(|&i| nodes[i].id);
        idx
    };
    if alive.is_empty() {
        return Err(ClusterError::NetworkDead);
    }
    let r = round.saturating_sub(1);
    let static_p = tier_probabilities(kind, config);
    let average = if kind == ProtocolKind::Deec {
        alive.iter().fold(S::zero(), |acc, &i| acc + nodes[i].residual_energy) / S::from_count(alive.len())
    } else {
        S::zero()
    };

    let mut heads = Vec::new();
    for &i in &alive {
        let draw: f64 = rng.gen();
        let node = &nodes[i];
        let p_i = match kind {
            ProtocolKind::Deec => deec_probability(config.p, node.residual_energy, average),
            _ => static_p[tier_index(node.tier)],
        };
        let eligible = match (epoch_length(p_i), node.last_head_round) {
            (None, _) => false,
            (Some(_), None) => true,
            (Some(epoch), Some(last)) => last < r - r % epoch,
        };
        if draw < leach_threshold(p_i, r, eligible).as_f64() {
            heads.push(i);
        }
    }
    for &i in &heads {
        nodes[i].last_head_round = Some(r);
    }

    let mut membership = BTreeMap::new();
    if !heads.is_empty() {
        for &i in &alive {
            if heads.contains(&i) {
                continue;
            }
            let node = &nodes[i];
            let nearest = heads
                .iter()
                .map(|&h| (node.distance_sq_to(&nodes[h]), nodes[h].id))
                .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)))
                .expect("non-empty head list");
            membership.insert(node.id, nearest.1);
        }
    }
    let mut head_ids: Vec<usize> = heads.iter().map(|&i| nodes[i].id).collect();
    head_ids.sort_unstable();
    Ok(ClusterAssignment {
        round,
        heads: head_ids,
        membership,
    })
}
