//! One slot of the protocol: arrivals, contention, outcome, delivery.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::phy_link::PhyLink;
use crate::queue::QueueState;
use crate::{OutcomeMode, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotClassification {
    Empty,
    SingleOk,
    SingleFail,
    PairBoth,
    PairOne,
    PairNone,
    Collision,
}

#[derive(Debug, Clone, Copy)]
pub struct Delivery {
    pub user: usize,
    pub enqueued_slot: u64,
    pub head_of_line_slot: u64,
}

#[derive(Debug, Clone)]
pub struct SlotOutcome {
    pub contenders: Vec<usize>,
    pub delivered: Vec<Delivery>,
    pub classification: SlotClassification,
    pub arrivals: usize,
    /// Users with a non-empty queue after arrivals.
    pub active_users: usize,
}

/// Advance the system by one slot.
///
/// Arrivals happen at the slot start (a packet arriving now may transmit
/// now); each active queue contends with probability p; one or two
/// contenders resolve through the link model, three or more always collide.
pub fn step_slot(
    state: &mut QueueState,
    config: &SimConfig,
    mode: OutcomeMode,
    phy: Option<&PhyLink>,
    slot: u64,
    rng: &mut ChaCha8Rng,
) -> SlotOutcome {
    let users = state.users();
    let mut arrivals = 0;
    for user in 0..users {
        if rng.random::<f64>() < config.arrival_rate {
            state.enqueue(user, slot);
            arrivals += 1;
        }
    }
    let active_users = (0..users).filter(|&u| state.is_active(u)).count();

    let contenders: Vec<usize> = (0..users)
        .filter(|&u| state.is_active(u) && rng.random::<f64>() < config.contention)
        .collect();

    let winners: Vec<usize> = match (contenders.len(), mode) {
        (0, _) => Vec::new(),
        (n @ (1 | 2), OutcomeMode::Phy) => {
            let phy = phy.expect("phy mode without a phy link");
            let _ = n;
            phy.resolve_slot(&contenders, rng)
        }
        (1, OutcomeMode::Abstract) => {
            if rng.random::<f64>() < config.probs.p0 {
                vec![contenders[0]]
            } else {
                Vec::new()
            }
        }
        (2, OutcomeMode::Abstract) => {
            let u: f64 = rng.random();
            if u < config.probs.p1 {
                contenders.clone()
            } else if u < config.probs.p1 + config.probs.p2 {
                // either of the two with equal probability
                let pick = usize::from(rng.random::<f64>() < 0.5);
                vec![contenders[pick]]
            } else {
                Vec::new()
            }
        }
        _ => Vec::new(), // three or more: unresolvable collision
    };

    let classification = match (contenders.len(), winners.len()) {
        (0, _) => SlotClassification::Empty,
        (1, 1) => SlotClassification::SingleOk,
        (1, _) => SlotClassification::SingleFail,
        (2, 2) => SlotClassification::PairBoth,
        (2, 1) => SlotClassification::PairOne,
        (2, _) => SlotClassification::PairNone,
        _ => SlotClassification::Collision,
    };

    let delivered: Vec<Delivery> = winners
        .into_iter()
        .map(|user| {
            let packet = state.deliver_head(user, slot);
            Delivery {
                user,
                enqueued_slot: packet.enqueued_slot,
                head_of_line_slot: packet.head_of_line_slot,
            }
        })
        .collect();

    SlotOutcome {
        contenders,
        delivered,
        classification,
        arrivals,
        active_users,
    }
}
