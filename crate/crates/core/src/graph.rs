//! Undirected observation graph: which agents may observe which neighbors.
//!
//! Agents are 0-indexed in the API; external I/O (configs, CSV) is 1-indexed
//! and converts at the boundary.

use crate::error::Error;

/// Supported graph constructions. `Edges` pairs are 0-indexed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSpec {
    /// Agent 0 is the center, adjacent to all others.
    Star {
        agents: usize,
    },
    Complete {
        agents: usize,
    },
    Cycle {
        agents: usize,
    },
    Edges {
        agents: usize,
        pairs: Vec<(usize, usize)>,
    },
}

/// Validated undirected graph, stored as sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationGraph {
    agent_count: usize,
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl ObservationGraph {
    pub fn build(spec: &GraphSpec) -> Result<Self, Error> {
        match *spec {
            GraphSpec::Star { agents } => {
                Self::from_edges(agents, (1..agents).map(|j| (0, j)).collect())
            }
            GraphSpec::Complete { agents } => {
                let mut pairs = Vec::new();
                for k in 0..agents {
                    for j in (k + 1)..agents {
                        pairs.push((k, j));
                    }
                }
                Self::from_edges(agents, pairs)
            }
            GraphSpec::Cycle { agents } => {
                let pairs = match agents {
                    0 | 1 => Vec::new(),
                    2 => vec![(0, 1)],
                    _ => (0..agents).map(|k| (k, (k + 1) % agents)).collect(),
                };
                Self::from_edges(agents, pairs)
            }
            GraphSpec::Edges { agents, ref pairs } => Self::from_edges(agents, pairs.clone()),
        }
    }

    pub fn star(agents: usize) -> Result<Self, Error> {
        Self::build(&GraphSpec::Star { agents })
    }

    pub fn complete(agents: usize) -> Result<Self, Error> {
        Self::build(&GraphSpec::Complete { agents })
    }

    pub fn cycle(agents: usize) -> Result<Self, Error> {
        Self::build(&GraphSpec::Cycle { agents })
    }

    /// Graph with no edges: every agent runs single-agent UCB.
    pub fn edgeless(agents: usize) -> Result<Self, Error> {
        Self::from_edges(agents, Vec::new())
    }

    /// Build from explicit unordered pairs; rejects self-loops and
    /// duplicates (in either orientation).
    pub fn from_edges(agents: usize, pairs: Vec<(usize, usize)>) -> Result<Self, Error> {
        if agents == 0 {
            return Err(Error::InvalidGraph("at least one agent required".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut adjacency = vec![Vec::new(); agents];
        for (a, b) in pairs {
            if a >= agents || b >= agents {
                return Err(Error::AgentIndex {
                    index: a.max(b),
                    agents,
                });
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on agent {}", a + 1)));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    key.0 + 1,
                    key.1 + 1
                )));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            agent_count: agents,
            adjacency,
            edge_count: seen.len(),
        })
    }

    pub fn agent_count(&self) -> usize {
        self.agent_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Neighbors of `agent`, sorted ascending, excluding `agent` itself.
    pub fn neighbors(&self, agent: usize) -> Result<&[usize], Error> {
        self.adjacency
            .get(agent)
            .map(Vec::as_slice)
            .ok_or(Error::AgentIndex {
                index: agent,
                agents: self.agent_count,
            })
    }

    /// Number of neighbors d_k.
    pub fn degree(&self, agent: usize) -> Result<usize, Error> {
        Ok(self.neighbors(agent)?.len())
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }
}
