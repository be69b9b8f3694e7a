//! Centralized cluster-head selection run by the base station.
//!
//! Per region and per round: average the residual energy of the region's
//! alive nodes, keep the nodes at or above that average as expected cluster
//! heads (ECHs), then cut the ECH list down to `ceil(p · alive_in_region)`
//! finally selected heads (FSCHs) ranked by residual energy (descending),
//! distance to the base station (ascending) and node id. Every other alive
//! node joins the nearest head of its own region.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::scalar::{ceil_tolerant, Scalar};
use crate::topology::{distance_to_bs, IdIndex, NetworkConfig, NodeState, Region};

/// Heads and member→head relation for one round.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClusterAssignment {
    pub round: u64,
    /// Head ids in ascending order.
    pub heads: Vec<usize>,
    /// Member id → head id. Heads themselves are not keys.
    pub membership: BTreeMap<usize, usize>,
}

impl ClusterAssignment {
    pub fn members_of(&self, head: usize) -> impl Iterator<Item = usize> + '_ {
        self.membership.iter().filter(move |(_, &h)| h == head).map(|(&m, _)| m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ClusterError {
    #[error("no alive nodes left in region {0}")]
    RegionExtinct(Region),
    #[error("region {0} has alive members but no cluster head")]
    OrphanedRegion(Region),
    #[error("every node in the network is dead")]
    NetworkDead,
}

fn alive_in<S: Scalar>(nodes: &[NodeState<S>], region: Region) -> impl Iterator<Item = &NodeState<S>> {
    nodes.iter().filter(move |n| n.alive && n.region == region)
}

/// Mean residual energy of the region's alive nodes.
///
/// The mean is clamped into `[min, max]` of the residuals so that rounding
/// can never lift it above the best node.
pub fn region_average_energy<S: Scalar>(nodes: &[NodeState<S>], region: Region) -> Result<S, ClusterError> {
    // Summed in id order so the result does not depend on list order.
    let mut residuals: Vec<(usize, S)> = alive_in(nodes, region).map(|n| (n.id, n.residual_energy)).collect();
    if residuals.is_empty() {
        return Err(ClusterError::RegionExtinct(region));
    }
    residuals.sort_unstable_by_key(|&(id, _)| id);
    let (sum, lo, hi) = residuals.iter().fold(
        (S::zero(), S::infinity(), S::neg_infinity()),
        |(sum, lo, hi), &(_, e)| (sum + e, lo.min(e), hi.max(e)),
    );
    Ok((sum / S::from_count(residuals.len())).max(lo).min(hi))
}

/// Alive nodes of `region` whose residual energy is at least `avg`, by id.
pub fn expected_cluster_heads<S: Scalar>(nodes: &[NodeState<S>], region: Region, avg: S) -> Vec<usize> {
    let mut ids: Vec<usize> = alive_in(nodes, region)
        .filter(|n| n.residual_energy >= avg)
        .map(|n| n.id)
        .collect();
    ids.sort_unstable();
    ids
}

/// `ceil(p · alive)`, at least one when anything is alive.
pub fn target_head_count<S: Scalar>(p: S, alive: usize) -> usize {
    if alive == 0 {
        return 0;
    }
    let k = ceil_tolerant(p * S::from_count(alive)).to_usize().unwrap_or(alive);
    k.clamp(1, alive)
}

/// Higher energy first, then closer to the base station, then lower id.
fn candidate_order<S: Scalar>(config: &NetworkConfig<S>) -> impl Fn(&&NodeState<S>, &&NodeState<S>) -> Ordering + '_ {
    move |a, b| {
        b.residual_energy
            .partial_cmp(&a.residual_energy)
            .unwrap_or(Ordering::Equal)
            .then_with(|| {
                distance_to_bs(a, config)
                    .partial_cmp(&distance_to_bs(b, config))
                    .unwrap_or(Ordering::Equal)
            })
            .then_with(|| a.id.cmp(&b.id))
    }
}

/// Cuts the ECH list of `region` down to the target head count. The result
/// is in rank order.
pub fn finalize_cluster_heads<S: Scalar>(
    echs: &[usize],
    nodes: &[NodeState<S>],
    config: &NetworkConfig<S>,
    region: Region,
) -> Vec<usize> {
    let alive = alive_in(nodes, region).count();
    if alive == 0 {
        return Vec::new();
    }
    assert!(
        !echs.is_empty(),
        "region {region} has {alive} alive nodes but no expected cluster head"
    );
    let index = IdIndex::new(nodes);
    let mut candidates: Vec<&NodeState<S>> = echs
        .iter()
        .map(|&id| &nodes[index.get(id).expect("ECH id refers to a known node")])
        .collect();
    candidates.sort_by(candidate_order(config));
    candidates.truncate(target_head_count(config.p, alive));
    candidates.into_iter().map(|n| n.id).collect()
}

/// Joins each alive non-head node to the nearest alive head in its own
/// region, ties going to the lower head id.
pub fn associate_members<S: Scalar>(
    nodes: &[NodeState<S>],
    heads: &[usize],
    round: u64,
) -> Result<ClusterAssignment, ClusterError> {
    let index = IdIndex::new(nodes);
    let mut head_nodes: Vec<&NodeState<S>> = heads
        .iter()
        .filter_map(|&id| index.get(id).map(|i| &nodes[i]))
        .filter(|n| n.alive)
        .collect();
    head_nodes.sort_by_key(|n| n.id);
    head_nodes.dedup_by_key(|n| n.id);

    let mut membership = BTreeMap::new();
    for node in nodes.iter().filter(|n| n.alive) {
        if head_nodes.iter().any(|h| h.id == node.id) {
            continue;
        }
        let nearest = head_nodes
            .iter()
            .filter(|h| h.region == node.region)
            .map(|h| (node.distance_sq_to(h), h.id))
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)))
            .ok_or(ClusterError::OrphanedRegion(node.region))?;
        membership.insert(node.id, nearest.1);
    }
    Ok(ClusterAssignment {
        round,
        heads: head_nodes.iter().map(|h| h.id).collect(),
        membership,
    })
}

/// Full per-round selection: averages, ECHs, FSCHs for every region with
/// alive nodes, then own-region association.
pub fn ceec_select<S: Scalar>(
    nodes: &[NodeState<S>],
    config: &NetworkConfig<S>,
    round: u64,
) -> Result<ClusterAssignment, ClusterError> {
    if !nodes.iter().any(|n| n.alive) {
        return Err(ClusterError::NetworkDead);
    }
    let mut heads = Vec::new();
    for region in Region::ALL {
        let avg = match region_average_energy(nodes, region) {
            Ok(avg) => avg,
            Err(ClusterError::RegionExtinct(_)) => continue,
            Err(e) => return Err(e),
        };
        let echs = expected_cluster_heads(nodes, region, avg);
        heads.extend(finalize_cluster_heads(&echs, nodes, config, region));
    }
    heads.sort_unstable();
    associate_members(nodes, &heads, round)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{deploy, Tier};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn node(id: usize, x: f64, y: f64, tier: Tier, residual: f64) -> NodeState<f64> {
        let mut n = NodeState::new(id, x, y, tier, 2.0);
        n.residual_energy = residual;
        n
    }

    fn ler(residuals: &[f64]) -> Vec<NodeState<f64>> {
        residuals
            .iter()
            .enumerate()
            .map(|(i, &e)| node(i, 10.0 * i as f64, 80.0, Tier::Normal, e))
            .collect()
    }

    #[test]
    fn average_examples() {
        assert_eq!(region_average_energy(&ler(&[0.5, 0.5, 0.5]), Region::Ler), Ok(0.5));
        let avg = region_average_energy(&ler(&[0.2, 0.4, 0.6]), Region::Ler).unwrap();
        assert!((avg - 0.4).abs() < 1e-15);
        assert_eq!(region_average_energy(&ler(&[0.37]), Region::Ler), Ok(0.37));
        assert_eq!(
            region_average_energy(&ler(&[0.37]), Region::Her),
            Err(ClusterError::RegionExtinct(Region::Her))
        );
    }

    #[test]
    fn average_of_equal_values_is_exact() {
        let nodes = ler(&[0.3; 7]);
        assert_eq!(region_average_energy(&nodes, Region::Ler), Ok(0.3));
    }

    #[test]
    fn average_ignores_dead_nodes() {
        let mut nodes = ler(&[0.2, 0.4, 0.6]);
        nodes[2].alive = false;
        assert!((region_average_energy(&nodes, Region::Ler).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn ech_examples() {
        assert_eq!(
            expected_cluster_heads(&ler(&[0.2, 0.4, 0.6]), Region::Ler, 0.4),
            vec![1, 2]
        );
        assert_eq!(
            expected_cluster_heads(&ler(&[0.5; 4]), Region::Ler, 0.5),
            vec![0, 1, 2, 3]
        );
        assert_eq!(expected_cluster_heads(&ler(&[0.1]), Region::Ler, 0.1), vec![0]);
    }

    #[test]
    fn target_counts() {
        assert_eq!(target_head_count(0.1, 30), 3);
        assert_eq!(target_head_count(0.1, 33), 4);
        assert_eq!(target_head_count(0.1, 34), 4);
        assert_eq!(target_head_count(0.1, 5), 1);
        assert_eq!(target_head_count(0.1, 0), 0);
        assert_eq!(target_head_count(0.1_f32, 30), 3);
    }

    #[test]
    fn finalize_keeps_highest_residuals() {
        // 30 alive; the 12 nodes with ids 18..30 have the highest residuals.
        let residuals: Vec<f64> = (0..30).map(|i| 0.1 + 0.01 * i as f64).collect();
        let nodes = ler(&residuals);
        let echs: Vec<usize> = (18..30).collect();
        let config = NetworkConfig::<f64>::default();
        let heads = finalize_cluster_heads(&echs, &nodes, &config, Region::Ler);
        assert_eq!(heads, vec![29, 28, 27]);
    }

    #[test]
    fn finalize_small_region_takes_one() {
        let nodes = ler(&[0.1, 0.5, 0.3, 0.2, 0.4]);
        let config = NetworkConfig::<f64>::default();
        assert_eq!(
            finalize_cluster_heads(&[1, 2, 4], &nodes, &config, Region::Ler),
            vec![1]
        );
    }

    #[test]
    fn finalize_breaks_energy_ties_by_distance() {
        let config = NetworkConfig::<f64>::default();
        // BS at (50, 100): node 0 is 40 m away, node 1 is 10 m away.
        let nodes = vec![
            node(0, 50.0, 60.0, Tier::Normal, 0.5),
            node(1, 50.0, 90.0, Tier::Normal, 0.5),
        ];
        assert_eq!(finalize_cluster_heads(&[0, 1], &nodes, &config, Region::Ler), vec![1]);
        // and distance ties by id
        let nodes = vec![
            node(0, 40.0, 90.0, Tier::Normal, 0.5),
            node(1, 60.0, 90.0, Tier::Normal, 0.5),
        ];
        assert_eq!(finalize_cluster_heads(&[1, 0], &nodes, &config, Region::Ler), vec![0]);
    }

    #[test]
    fn members_join_nearest_head() {
        let nodes = vec![
            node(0, 0.0, 80.0, Tier::Normal, 0.5),
            node(1, 5.0, 80.0, Tier::Normal, 0.5),
            node(2, 20.0, 80.0, Tier::Normal, 0.5),
        ];
        let a = associate_members(&nodes, &[1, 2], 3).unwrap();
        assert_eq!(a.membership.get(&0), Some(&1));
        assert_eq!(a.round, 3);
    }

    #[test]
    fn equidistant_member_prefers_lower_head_id() {
        let nodes = vec![
            node(3, 0.0, 80.0, Tier::Normal, 0.5),
            node(5, 10.0, 80.0, Tier::Normal, 0.5),
            node(7, 20.0, 80.0, Tier::Normal, 0.5),
        ];
        let a = associate_members(&nodes, &[7, 3], 0).unwrap();
        assert_eq!(a.membership.get(&5), Some(&3));
        assert_eq!(a.heads, vec![3, 7]);
    }

    #[test]
    fn association_never_crosses_regions() {
        let nodes = vec![
            node(0, 50.0, 70.0, Tier::Normal, 0.5),
            node(1, 50.0, 65.0, Tier::Advance, 0.5),
            node(2, 50.0, 40.0, Tier::Advance, 0.5),
        ];
        let a = associate_members(&nodes, &[0, 2], 0).unwrap();
        assert_eq!(a.membership.get(&1), Some(&2));
        assert_eq!(
            associate_members(&nodes, &[0], 0),
            Err(ClusterError::OrphanedRegion(Region::Mer))
        );
    }

    #[test]
    fn fresh_99_node_network_gets_four_heads_per_region() {
        let config = NetworkConfig {
            n1: 33,
            n2: 33,
            n3: 33,
            ..NetworkConfig::<f64>::default()
        };
        let nodes = deploy(&config, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        for region in Region::ALL {
            let avg = region_average_energy(&nodes, region).unwrap();
            assert_eq!(expected_cluster_heads(&nodes, region, avg).len(), 33);
        }
        let a = ceec_select(&nodes, &config, 1).unwrap();
        assert_eq!(a.heads.len(), 12);
        for region in Region::ALL {
            assert_eq!(a.heads.iter().filter(|&&h| nodes[h].region == region).count(), 4);
        }
        assert_eq!(a.membership.len(), 87);
        for (&m, &h) in &a.membership {
            assert_eq!(nodes[m].region, nodes[h].region);
        }
    }

    #[test]
    fn single_alive_node_heads_itself() {
        let mut nodes = ler(&[0.2, 0.4, 0.6]);
        nodes[0].alive = false;
        nodes[2].alive = false;
        let a = ceec_select(&nodes, &NetworkConfig::default(), 9).unwrap();
        assert_eq!(a.heads, vec![1]);
        assert!(a.membership.is_empty());
    }

    #[test]
    fn dead_network_is_reported() {
        let mut nodes = ler(&[0.2]);
        nodes[0].alive = false;
        assert_eq!(
            ceec_select(&nodes, &NetworkConfig::default(), 1),
            Err(ClusterError::NetworkDead)
        );
    }
}
