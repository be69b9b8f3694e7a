//! Three-region heterogeneous deployment.
//!
//! The square field is cut into three equal horizontal strips. With the base
//! station on the top edge, the strip nearest to it (LER) hosts the normal
//! nodes, the middle strip (MER) the advance nodes and the far strip (HER)
//! the super nodes, so initial energy grows with distance from the sink.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::energy::RadioParams;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tier {
    Normal,
    Advance,
    Super,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Normal, Tier::Advance, Tier::Super];

    /// The strip this tier is deployed in.
    pub fn home_region(self) -> Region {
        match self {
            Tier::Normal => Region::Ler,
            Tier::Advance => Region::Mer,
            Tier::Super => Region::Her,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    /// Low energy region, adjacent to the base station.
    Ler,
    /// Medium energy region.
    Mer,
    /// Higher energy region, farthest from the base station.
    Her,
}

impl Region {
    pub const ALL: [Region; 3] = [Region::Ler, Region::Mer, Region::Her];

    pub fn tier(self) -> Tier {
        match self {
            Region::Ler => Tier::Normal,
            Region::Mer => Tier::Advance,
            Region::Her => Tier::Super,
        }
    }

    /// Region whose strip contains height `y`.
    pub fn containing<S: Scalar>(y: S, field_side: S) -> Region {
        let third = field_side / S::lit(3.0);
        if y >= third + third {
            Region::Ler
        } else if y >= third {
            Region::Mer
        } else {
            Region::Her
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Ler => "LER",
            Region::Mer => "MER",
            Region::Her => "HER",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    ClusterHead,
    Member,
    Unassigned,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeState<S> {
    pub id: usize,
    pub x: S,
    pub y: S,
    pub tier: Tier,
    pub region: Region,
    pub initial_energy: S,
    pub residual_energy: S,
    pub alive: bool,
    pub role: Role,
    pub ch_id: Option<usize>,
    /// Last round (zero-based) this node served as cluster head. Only the
    /// rotating-election baselines read it.
    pub last_head_round: Option<u64>,
}

impl<S: Scalar> NodeState<S> {
    pub fn new(id: usize, x: S, y: S, tier: Tier, energy: S) -> Self {
        Self {
            id,
            x,
            y,
            tier,
            region: tier.home_region(),
            initial_energy: energy,
            residual_energy: energy,
            alive: energy > S::zero(),
            role: Role::Unassigned,
            ch_id: None,
            last_head_round: None,
        }
    }

    pub fn distance_to(&self, other: &NodeState<S>) -> S {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub(crate) fn distance_sq_to(&self, other: &NodeState<S>) -> S {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Removes up to `cost` joules from the battery and returns what was
    /// actually drawn. The battery never goes below zero.
    pub fn draw(&mut self, cost: S) -> S {
        let drawn = cost.min(self.residual_energy).max(S::zero());
        self.residual_energy = self.residual_energy - drawn;
        drawn
    }
}

/// Position lookup from node id to slice index.
pub(crate) struct IdIndex(Vec<usize>);

impl IdIndex {
    pub(crate) fn new<S>(nodes: &[NodeState<S>]) -> Self {
        let len = nodes.iter().map(|n| n.id + 1).max().unwrap_or(0);
        let mut slots = vec![usize::MAX; len];
        for (i, n) in nodes.iter().enumerate() {
            slots[n.id] = i;
        }
        Self(slots)
    }

    pub(crate) fn get(&self, id: usize) -> Option<usize> {
        self.0.get(id).copied().filter(|&i| i != usize::MAX)
    }
}

impl std::ops::Index<usize> for IdIndex {
    type Output = usize;

    fn index(&self, id: usize) -> &usize {
        let slot = &self.0[id];
        assert!(*slot != usize::MAX, "unknown node id {id}");
        slot
    }
}

/// A configuration field failed validation.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid value for `{key}`: {reason}")]
pub struct InvalidConfig {
    pub key: &'static str,
    pub reason: String,
}

impl InvalidConfig {
    fn new(key: &'static str, reason: impl Into<String>) -> Self {
        Self {
            key,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig<S> {
    /// Side length `M` of the square field, metres.
    pub field_side: S,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    /// Normal-node initial energy, joules.
    pub e0: S,
    /// Heterogeneity factor.
    pub alpha: S,
    /// Desired cluster-head fraction per round.
    pub p: S,
    pub bs_x: S,
    pub bs_y: S,
    pub radio: RadioParams<S>,
    pub seed: u64,
    pub max_rounds: u32,
}

impl<S: Scalar> Default for NetworkConfig<S> {
    /// 100 m × 100 m field, 100 nodes split 34/33/33, E0 = 0.5 J, α = 1,
    /// p = 0.1, base station at the middle of the top edge.
    fn default() -> Self {
        let field_side = S::lit(100.0);
        Self {
            field_side,
            n1: 34,
            n2: 33,
            n3: 33,
            e0: S::lit(0.5),
            alpha: S::one(),
            p: S::lit(0.1),
            bs_x: field_side / S::lit(2.0),
            bs_y: field_side,
            radio: RadioParams::reference(),
            seed: 1,
            max_rounds: 10_000,
        }
    }
}

impl<S: Scalar> NetworkConfig<S> {
    pub fn total_nodes(&self) -> usize {
        self.n1 + self.n2 + self.n3
    }

    pub fn tier_count(&self, tier: Tier) -> usize {
        match tier {
            Tier::Normal => self.n1,
            Tier::Advance => self.n2,
            Tier::Super => self.n3,
        }
    }

    pub fn validate(&self) -> Result<(), InvalidConfig> {
        let positive = |key, v: S| {
            if v > S::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(InvalidConfig::new(key, format!("must be positive, got {v}")))
            }
        };
        positive("field_side", self.field_side)?;
        positive("e0", self.e0)?;
        if !(self.alpha >= S::zero() && self.alpha.is_finite()) {
            return Err(InvalidConfig::new(
                "alpha",
                format!("must be non-negative, got {}", self.alpha),
            ));
        }
        if !(self.p > S::zero() && self.p < S::one()) {
            return Err(InvalidConfig::new(
                "p",
                format!("must lie strictly between 0 and 1, got {}", self.p),
            ));
        }
        if !self.bs_x.is_finite() {
            return Err(InvalidConfig::new("bs_x", "must be finite"));
        }
        if !self.bs_y.is_finite() {
            return Err(InvalidConfig::new("bs_y", "must be finite"));
        }
        if let Some(key) = self.radio.first_non_positive() {
            return Err(InvalidConfig::new(key, "must be positive"));
        }
        if self.total_nodes() == 0 {
            return Err(InvalidConfig::new(
                "n1",
                "network needs at least one node (n1 + n2 + n3 > 0)",
            ));
        }
        Ok(())
    }
}

/// `(y_low, y_high)` of a region's strip. LER is the top third.
pub fn region_bounds<S: Scalar>(region: Region, field_side: S) -> (S, S) {
    let third = field_side / S::lit(3.0);
    match region {
        Region::Ler => (third + third, field_side),
        Region::Mer => (third, third + third),
        Region::Her => (S::zero(), third),
    }
}

/// Normal: `e0`; advance: `e0·(1+α)`; super: `e0·(1+2α)`.
pub fn tier_initial_energy<S: Scalar>(tier: Tier, e0: S, alpha: S) -> S {
    match tier {
        Tier::Normal => e0,
        Tier::Advance => e0 * (S::one() + alpha),
        Tier::Super => e0 * (S::one() + alpha + alpha),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeployError {
    #[error("cannot deploy an empty network")]
    Empty,
    #[error(transparent)]
    Config(#[from] InvalidConfig),
}

/// Places `n1` normal nodes in LER, `n2` advance nodes in MER and `n3` super
/// nodes in HER, uniformly at random within each strip. Ids are assigned in
/// that order starting at 0.
pub fn deploy<S: Scalar, R: Rng + ?Sized>(
    config: &NetworkConfig<S>,
    rng: &mut R,
) -> Result<Vec<NodeState<S>>, DeployError> {
    if config.total_nodes() == 0 {
        return Err(DeployError::Empty);
    }
    config.validate()?;
    let mut nodes = Vec::with_capacity(config.total_nodes());
    for tier in Tier::ALL {
        let (low, high) = region_bounds(tier.home_region(), config.field_side);
        let energy = tier_initial_energy(tier, config.e0, config.alpha);
        for _ in 0..config.tier_count(tier) {
            let x = S::lit(rng.gen::<f64>()) * config.field_side;
            let mut y = (low + S::lit(rng.gen::<f64>()) * (high - low)).min(high);
            // Only LER includes its upper edge.
            if y >= high && tier != Tier::Normal {
                y = high - high * S::epsilon();
            }
            nodes.push(NodeState::new(nodes.len(), x, y, tier, energy));
        }
    }
    Ok(nodes)
}

/// Sum of initial energies.
pub fn total_energy<S: Scalar>(nodes: &[NodeState<S>]) -> S {
    nodes.iter().fold(S::zero(), |acc, n| acc + n.initial_energy)
}

pub fn total_residual<S: Scalar>(nodes: &[NodeState<S>]) -> S {
    nodes.iter().fold(S::zero(), |acc, n| acc + n.residual_energy)
}

pub fn distance_to_bs<S: Scalar>(node: &NodeState<S>, config: &NetworkConfig<S>) -> S {
    (node.x - config.bs_x).hypot(node.y - config.bs_y)
}
