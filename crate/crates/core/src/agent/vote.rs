use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ExecutorResult, LanguageTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConsensusReason {
    Majority,
    TieBroken,
    NoValidResults,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub representative: f64,
    pub members: Vec<LanguageTag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsensusReport {
    pub clusters: Vec<Cluster>,
    pub winner: Option<f64>,
    pub reason: ConsensusReason,
}

/// Clusters the ok values in tag order: a value joins the first cluster
/// whose representative is within `eps`, otherwise it starts a new one. The
/// largest cluster wins; among equals the one started by the earlier tag.
pub fn majority_vote(results: &BTreeMap<LanguageTag, ExecutorResult>, eps: f64) -> ConsensusReport {
    let mut clusters: Vec<Cluster> = Vec::new();
    for tag in LanguageTag::ALL {
        let Some(v) = results.get(&tag).and_then(ExecutorResult::ok_value) else { continue };
        match clusters.iter_mut().find(|c| (v - c.representative).abs() <= eps) {
            Some(c) => c.members.push(tag),
            None => clusters.push(Cluster { representative: v, members: vec![tag] }),
        }
    }
    let Some(best) = clusters.iter().map(|c| c.members.len()).max() else {
        return ConsensusReport { clusters, winner: None, reason: ConsensusReason::NoValidResults };
    };
    let top: Vec<&Cluster> = clusters.iter().filter(|c| c.members.len() == best).collect();
    let reason = if top.len() > 1 { ConsensusReason::TieBroken } else { ConsensusReason::Majority };
    let winner = Some(top[0].representative);
    ConsensusReport { clusters, winner, reason }
}
