//! Round loop and metrics.
//!
//! Each round first forms clusters (centrally for CEEC, by election for the
//! baselines) and then moves one packet per node: members send to their
//! head, heads receive, fuse `members + 1` signals and forward a single
//! packet to the base station. If an election yields no head, every alive
//! node sends straight to the base station. Cluster formation itself is
//! charged nothing for every protocol.
//!
//! A node that runs out of energy mid-round still finishes its schedule; its
//! battery is drained to zero and it is marked dead when the round ends.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::baselines::{baseline_select, ProtocolKind};
use crate::ceec::{ceec_select, ClusterAssignment, ClusterError};
use crate::energy::{aggregation_energy, rx_energy, tx_energy};
use crate::scalar::Scalar;
use crate::topology::{
    deploy, distance_to_bs, total_residual, DeployError, IdIndex, InvalidConfig, NetworkConfig, NodeState, Role, Tier,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Config(#[from] InvalidConfig),
    #[error(transparent)]
    Deploy(#[from] DeployError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundMetrics<S> {
    pub round: u32,
    pub alive_total: usize,
    pub alive_normal: usize,
    pub alive_advance: usize,
    pub alive_super: usize,
    pub dead_total: usize,
    pub ch_count: usize,
    /// Cumulative packets received by the base station.
    pub packets_to_bs: u64,
    pub total_residual: S,
    /// Energy drawn from batteries during this round.
    pub energy_spent: S,
}

/// What a single round did.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome<S> {
    pub assignment: ClusterAssignment,
    pub packets_delivered: u64,
    pub energy_charged: S,
}

/// A lifetime landmark; `NotReached` carries the round cap it was censored at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Landmark {
    At(u32),
    NotReached { cap: u32 },
}

impl Landmark {
    /// The landmark round, or the cap when it was never reached.
    pub fn round(self) -> u32 {
        match self {
            Landmark::At(r) => r,
            Landmark::NotReached { cap } => cap,
        }
    }

    pub fn reached(self) -> bool {
        matches!(self, Landmark::At(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult<S> {
    pub per_round: Vec<RoundMetrics<S>>,
    pub first_death_round: Landmark,
    pub last_death_round: Landmark,
    pub protocol: ProtocolKind,
    pub config_echo: NetworkConfig<S>,
}

impl<S: Scalar> SimulationResult<S> {
    pub fn total_packets_to_bs(&self) -> u64 {
        self.per_round.last().map_or(0, |m| m.packets_to_bs)
    }
}

/// Rounds until the first node death.
pub fn stability_period<S>(result: &SimulationResult<S>) -> Landmark {
    result.first_death_round
}

/// Runs one round over `nodes` and updates their energies, roles and
/// liveness. `round` is 1-based.
pub fn run_round<S: Scalar>(
    nodes: &mut [NodeState<S>],
    config: &NetworkConfig<S>,
    protocol: ProtocolKind,
    round: u64,
    rng: &mut ChaCha8Rng,
) -> Result<RoundOutcome<S>, ClusterError> {
    for n in nodes.iter_mut() {
        n.role = Role::Unassigned;
        n.ch_id = None;
    }
    let assignment = match protocol {
        ProtocolKind::Ceec => ceec_select(nodes, config, round)?,
        kind => baseline_select(kind, nodes, config, round, rng)?,
    };

    let index = IdIndex::new(nodes);
    let bits = u64::from(config.radio.packet_bits);
    let radio = &config.radio;
    let mut charged = S::zero();
    let mut packets = 0u64;

    for &h in &assignment.heads {
        nodes[index[h]].role = Role::ClusterHead;
    }
    let mut member_count = vec![0u64; nodes.len()];
    for (&m, &h) in &assignment.membership {
        let (mi, hi) = (index[m], index[h]);
        let distance = nodes[mi].distance_to(&nodes[hi]);
        let member = &mut nodes[mi];
        member.role = Role::Member;
        member.ch_id = Some(h);
        let cost = tx_energy(radio, bits, distance).expect("finite node distance");
        charged = charged + member.draw(cost);
        member_count[hi] += 1;
    }

    for &h in &assignment.heads {
        let hi = index[h];
        let members = member_count[hi];
        let to_bs = distance_to_bs(&nodes[hi], config);
        let cost = rx_energy(radio, bits * members)
            + aggregation_energy(radio, bits, members + 1)
            + tx_energy(radio, bits, to_bs).expect("finite base-station distance");
        charged = charged + nodes[hi].draw(cost);
        packets += 1;
    }

    if assignment.heads.is_empty() {
        for node in nodes.iter_mut().filter(|n| n.alive) {
            let cost = tx_energy(radio, bits, distance_to_bs(node, config)).expect("finite base-station distance");
            charged = charged + node.draw(cost);
            packets += 1;
        }
    }

    for node in nodes.iter_mut() {
        if node.alive && node.residual_energy <= S::zero() {
            node.alive = false;
        }
    }

    Ok(RoundOutcome {
        assignment,
        packets_delivered: packets,
        energy_charged: charged,
    })
}

/// A simulation in progress: the deployed network plus its RNG stream.
#[derive(Debug, Clone)]
pub struct Simulation<S> {
    config: NetworkConfig<S>,
    protocol: ProtocolKind,
    nodes: Vec<NodeState<S>>,
    rng: ChaCha8Rng,
    round: u32,
    packets: u64,
}

impl<S: Scalar> Simulation<S> {
    /// Validates `config` and deploys the network from `config.seed`. The
    /// deployment does not depend on `protocol`.
    pub fn new(config: NetworkConfig<S>, protocol: ProtocolKind) -> Result<Self, EngineError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let nodes = deploy(&config, &mut rng)?;
        Ok(Self {
            config,
            protocol,
            nodes,
            rng,
            round: 0,
            packets: 0,
        })
    }

    pub fn nodes(&self) -> &[NodeState<S>] {
        &self.nodes
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn is_dead(&self) -> bool {
        !self.nodes.iter().any(|n| n.alive)
    }

    /// Advances one round and returns its metrics along with the assignment
    /// that was used.
    pub fn step(&mut self) -> Result<(RoundMetrics<S>, ClusterAssignment), EngineError> {
        let round = self.round + 1;
        let outcome = run_round(
            &mut self.nodes,
            &self.config,
            self.protocol,
            u64::from(round),
            &mut self.rng,
        )?;
        self.round = round;
        self.packets += outcome.packets_delivered;
        Ok((
            self.metrics(outcome.assignment.heads.len(), outcome.energy_charged),
            outcome.assignment,
        ))
    }

    fn metrics(&self, ch_count: usize, energy_spent: S) -> RoundMetrics<S> {
        let alive = |tier: Tier| self.nodes.iter().filter(|n| n.alive && n.tier == tier).count();
        let (alive_normal, alive_advance, alive_super) =
            (alive(Tier::Normal), alive(Tier::Advance), alive(Tier::Super));
        let alive_total = alive_normal + alive_advance + alive_super;
        RoundMetrics {
            round: self.round,
            alive_total,
            alive_normal,
            alive_advance,
            alive_super,
            dead_total: self.nodes.len() - alive_total,
            ch_count,
            packets_to_bs: self.packets,
            total_residual: total_residual(&self.nodes),
            energy_spent,
        }
    }

    /// Steps until the network is dead or the round cap is hit.
    pub fn run(mut self) -> Result<SimulationResult<S>, EngineError> {
        let cap = self.config.max_rounds;
        let mut per_round = Vec::new();
        let mut first_death = None;
        let mut last_death = None;
        while self.round < cap && !self.is_dead() {
            let (m, _) = self.step()?;
            if first_death.is_none() && m.dead_total > 0 {
                first_death = Some(m.round);
            }
            if m.alive_total == 0 {
                last_death = Some(m.round);
            }
            per_round.push(m);
        }
        let landmark = |r: Option<u32>| r.map_or(Landmark::NotReached { cap }, Landmark::At);
        Ok(SimulationResult {
            per_round,
            first_death_round: landmark(first_death),
            last_death_round: landmark(last_death),
            protocol: self.protocol,
            config_echo: self.config,
        })
    }
}

pub fn run_simulation<S: Scalar>(
    config: &NetworkConfig<S>,
    protocol: ProtocolKind,
) -> Result<SimulationResult<S>, EngineError> {
    Simulation::new(config.clone(), protocol)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::RadioParams;

    #[test]
    fn single_node_round_energy() {
        let config = NetworkConfig::<f64> {
            n1: 1,
            n2: 0,
            n3: 0,
            ..Default::default()
        };
        let mut sim = Simulation::new(config.clone(), ProtocolKind::Ceec).unwrap();
        let node = sim.nodes()[0].clone();
        let d = ((node.x - 50.0).powi(2) + (node.y - 100.0).powi(2)).sqrt();
        // aggregation of its own signal + one packet to the BS
        let expected = 200.0 * 50e-12 + 200.0 * 50e-9 + 200.0 * 100e-12 * d * d;
        let (m, a) = sim.step().unwrap();
        assert_eq!(a.heads, vec![0]);
        assert_eq!(m.packets_to_bs, 1);
        assert!((m.energy_spent - expected).abs() < 1e-18);
        assert!((0.5 - sim.nodes()[0].residual_energy - expected).abs() < 1e-15);
    }

    #[test]
    fn fresh_99_node_round_one() {
        let config = NetworkConfig::<f64> {
            n1: 33,
            n2: 33,
            n3: 33,
            ..Default::default()
        };
        let mut sim = Simulation::new(config, ProtocolKind::Ceec).unwrap();
        let (m, _) = sim.step().unwrap();
        assert_eq!(m.ch_count, 12);
        assert_eq!(m.packets_to_bs, 12);
    }

    #[test]
    fn zero_round_cap_gives_empty_result() {
        let config = NetworkConfig::<f64> {
            max_rounds: 0,
            ..Default::default()
        };
        let r = run_simulation(&config, ProtocolKind::Leach).unwrap();
        assert!(r.per_round.is_empty());
        assert_eq!(r.first_death_round, Landmark::NotReached { cap: 0 });
        assert_eq!(r.last_death_round, Landmark::NotReached { cap: 0 });
        assert_eq!(r.total_packets_to_bs(), 0);
    }

    #[test]
    fn stability_period_reports_cap_when_nothing_dies() {
        let config = NetworkConfig::<f64> {
            max_rounds: 50,
            ..Default::default()
        };
        let r = run_simulation(&config, ProtocolKind::Ceec).unwrap();
        assert_eq!(r.per_round.len(), 50);
        let s = stability_period(&r);
        assert!(!s.reached());
        assert_eq!(s.round(), 50);
    }

    #[test]
    fn invalid_config_rejected_before_first_round() {
        let config = NetworkConfig::<f64> {
            p: 0.0,
            ..Default::default()
        };
        assert!(matches!(run_simulation(&config, ProtocolKind::Ceec), Err(EngineError::Config(e)) if e.key == "p"));
    }

    /// Tiny batteries so that a full run to extinction is quick.
    fn short_lived() -> NetworkConfig<f64> {
        NetworkConfig {
            e0: 2e-3,
            n1: 10,
            n2: 10,
            n3: 10,
            ..Default::default()
        }
    }

    #[test]
    fn runs_to_extinction_with_monotone_metrics() {
        for kind in ProtocolKind::ALL {
            let sim = Simulation::new(short_lived(), kind).unwrap();
            let mut prev_residual = total_residual(sim.nodes());
            let r = sim.run().unwrap();
            assert!(r.last_death_round.reached(), "{kind}");
            assert!(r.first_death_round.round() <= r.last_death_round.round());
            let mut prev_packets = 0;
            for (i, m) in r.per_round.iter().enumerate() {
                assert_eq!(m.round as usize, i + 1);
                assert_eq!(m.alive_total + m.dead_total, 30);
                assert!(m.total_residual <= prev_residual);
                assert!(m.packets_to_bs >= prev_packets);
                assert!((prev_residual - m.total_residual - m.energy_spent).abs() < 1e-12);
                prev_residual = m.total_residual;
                prev_packets = m.packets_to_bs;
            }
            assert_eq!(r.per_round.last().unwrap().alive_total, 0);
        }
    }

    #[test]
    fn dead_nodes_stay_silent() {
        let mut sim = Simulation::new(short_lived(), ProtocolKind::Deec).unwrap();
        let mut dead = std::collections::BTreeSet::new();
        while !sim.is_dead() {
            let before: Vec<f64> = sim.nodes().iter().map(|n| n.residual_energy).collect();
            let (_, a) = sim.step().unwrap();
            for &d in &dead {
                assert!(!a.heads.contains(&d) && !a.membership.contains_key(&d));
                assert_eq!(sim.nodes()[d].residual_energy, before[d]);
            }
            dead.extend(sim.nodes().iter().filter(|n| !n.alive).map(|n| n.id));
        }
    }

    #[test]
    fn packets_follow_heads_for_ceec_while_all_alive() {
        let mut sim = Simulation::new(NetworkConfig::<f64>::default(), ProtocolKind::Ceec).unwrap();
        let mut prev = 0;
        for _ in 0..200 {
            let (m, _) = sim.step().unwrap();
            assert_eq!(m.ch_count, 12);
            assert_eq!(m.packets_to_bs - prev, 12);
            prev = m.packets_to_bs;
        }
    }

    #[test]
    fn identical_inputs_give_identical_results() {
        let config = NetworkConfig::<f64> {
            max_rounds: 300,
            ..Default::default()
        };
        for kind in ProtocolKind::ALL {
            assert_eq!(
                run_simulation(&config, kind).unwrap(),
                run_simulation(&config, kind).unwrap()
            );
        }
    }

    #[test]
    fn runs_in_single_precision() {
        let config = NetworkConfig::<f32> {
            max_rounds: 100,
            radio: RadioParams::reference(),
            ..Default::default()
        };
        let r = run_simulation(&config, ProtocolKind::Ceec).unwrap();
        assert_eq!(r.per_round.len(), 100);
        assert_eq!(r.per_round[0].ch_count, 12);
    }
}
