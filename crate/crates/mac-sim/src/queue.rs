//! Per-user FIFO queues with arrival and head-of-line timestamps.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy)]
pub struct QueuedPacket {
    pub enqueued_slot: u64,
    /// Slot from which this packet has been eligible to contend.
    pub head_of_line_slot: u64,
}

#[derive(Debug, Clone)]
pub struct QueueState {
    queues: Vec<VecDeque<QueuedPacket>>,
}

impl QueueState {
    pub fn new(users: usize) -> QueueState {
        QueueState {
            queues: vec![VecDeque::new(); users],
        }
    }

    pub fn users(&self) -> usize {
        self.queues.len()
    }

    /// Arrival at the start of `slot`: the packet may contend this very slot.
    pub fn enqueue(&mut self, user: usize, slot: u64) {
        let head_of_line_slot = if self.queues[user].is_empty() {
            slot
        } else {
            // becomes head of line only after everything ahead leaves; the
            // timestamp is patched on dequeue
            u64::MAX
        };
        self.queues[user].push_back(QueuedPacket {
            enqueued_slot: slot,
            head_of_line_slot,
        });
    }

    pub fn backlog(&self, user: usize) -> usize {
        self.queues[user].len()
    }

    pub fn is_active(&self, user: usize) -> bool {
        !self.queues[user].is_empty()
    }

    pub fn total_backlog(&self) -> u64 {
        self.queues.iter().map(|q| q.len() as u64).sum()
    }

    /// Remove the head-of-line packet delivered in `slot`; the next packet
    /// becomes eligible from the following slot.
    pub fn deliver_head(&mut self, user: usize, slot: u64) -> QueuedPacket {
        let packet = self.queues[user]
            .pop_front()
            .expect("delivered from an empty queue");
        if let Some(next) = self.queues[user].front_mut() {
            next.head_of_line_slot = slot + 1;
        }
        packet
    }
}
