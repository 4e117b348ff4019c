//! The collusion recorder: captures exactly what a chosen coalition of
//! servers has seen. Transcripts hold only server-side observations (shares
//! installed, queries received, answers sent, timestamps) — there is no
//! field for the requested index or any client-side randomness, so a
//! transcript is by construction the coalition's entire view.

use crate::server::{ServerHandle, ServerLog};

#[derive(Debug, Clone)]
pub struct ServerView {
    pub server_index: u32,
    pub log: ServerLog,
}

#[derive(Debug, Clone)]
pub struct CollusionTranscript {
    pub coalition: Vec<u32>,
    pub views: Vec<ServerView>,
}

impl CollusionTranscript {
    /// The query matrices observed by coalition member `i`, newest last,
    /// as raw symbol indices.
    pub fn query_views(&self, i: usize) -> Vec<Vec<u64>> {
        self.views[i]
            .log
            .received_queries
            .iter()
            .map(|(_, q)| q.clone())
            .collect()
    }
}

/// Extracts the coalition's views from a running session's server handles.
pub fn record_collusion(coalition: &[u32], handles: &[ServerHandle]) -> CollusionTranscript {
    let mut views = Vec::with_capacity(coalition.len());
    for &idx in coalition {
        let handle = handles
            .iter()
            .find(|h| h.index == idx)
            .expect("coalition member exists");
        let log = handle
            .state
            .lock()
            .expect("server state lock")
            .log()
            .clone();
        views.push(ServerView {
            server_index: idx,
            log,
        });
    }
    CollusionTranscript {
        coalition: coalition.to_vec(),
        views,
    }
}
