//! Deterministic in-memory rack cluster: stores stripes, injects node
//! failures, repairs them with per-stripe bandwidth accounting and serves
//! reads through any-`k` reconstruction.

use std::collections::BTreeMap;
use std::fmt;

use crate::encode::encode;
use crate::error::{Error, Result};
use crate::gf::Elem;
use crate::layout::{CodeMatrix, CodeParams, MessageMatrix, NodeId};
use crate::reconstruct::{reconstruct, ObservedColumn};
use crate::repair::{check_helpers, default_helpers, repair_node};
use crate::systematic::{read_systematic, systematic_encode, systematic_layout};

pub use crate::repair::BandwidthLedger;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeStatus {
    Healthy,
    Failed,
}

/// How [`Cluster::read_data_with`] obtains data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReadPath {
    /// Systematic nodes when possible, reconstruction otherwise.
    Auto,
    /// Always reconstruct from the `k` lowest healthy nodes.
    Reconstruct,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    params: CodeParams,
    systematic: bool,
    stripes: usize,
    /// per node, one column per stripe; empty when failed
    shards: BTreeMap<NodeId, Vec<Vec<Elem>>>,
    status: BTreeMap<NodeId, NodeStatus>,
}

impl Cluster {
    pub fn new(params: &CodeParams) -> Self {
        Self::with_mode(params, false)
    }

    /// A cluster whose stripes are (or will be) systematically encoded.
    pub fn with_mode(params: &CodeParams, systematic: bool) -> Self {
        Cluster {
            params: params.clone(),
            systematic,
            stripes: 0,
            shards: params.nodes().map(|id| (id, Vec::new())).collect(),
            status: params.nodes().map(|id| (id, NodeStatus::Healthy)).collect(),
        }
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn is_systematic(&self) -> bool {
        self.systematic
    }

    pub fn stripe_count(&self) -> usize {
        self.stripes
    }

    pub fn status(&self, id: NodeId) -> Result<NodeStatus> {
        self.status.get(&id).copied().ok_or(Error::NodeOutOfRange(id))
    }

    pub fn healthy_nodes(&self) -> Vec<NodeId> {
        self.status.iter().filter(|(_, &s)| s == NodeStatus::Healthy).map(|(&id, _)| id).collect()
    }

    pub fn failed_nodes(&self) -> Vec<NodeId> {
        self.status.iter().filter(|(_, &s)| s == NodeStatus::Failed).map(|(&id, _)| id).collect()
    }

    /// Replaces the stored content with `matrices`, one per stripe. Requires
    /// every node to be healthy.
    pub fn store_stripes(&mut self, matrices: &[CodeMatrix]) -> Result<()> {
        if let Some(&id) = self.failed_nodes().first() {
            return Err(Error::NodeUnavailable(id));
        }
        for m in matrices {
            if m.params() != &self.params || !m.is_complete() {
                return Err(Error::Dimension("stripe does not match cluster parameters".into()));
            }
        }
        for (&id, shard) in self.shards.iter_mut() {
            *shard = matrices.iter().map(|m| m.column(id).expect("complete").to_vec()).collect();
        }
        self.stripes = matrices.len();
        Ok(())
    }

    /// Encodes each `B`-symbol stripe in this cluster's mode and stores it.
    pub fn store_data(&mut self, stripes: &[Vec<Elem>]) -> Result<()> {
        let matrices = stripes
            .iter()
            .map(|data| {
                if self.systematic {
                    systematic_encode(&self.params, data)
                } else {
                    Ok(encode(&MessageMatrix::fill(&self.params, data)?))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        self.store_stripes(&matrices)
    }

    /// Stored column of `id` for every stripe.
    pub fn node_shards(&self, id: NodeId) -> Result<&[Vec<Elem>]> {
        match self.status(id)? {
            NodeStatus::Healthy => Ok(&self.shards[&id]),
            NodeStatus::Failed => Err(Error::NodeUnavailable(id)),
        }
    }

    pub fn fail_node(&mut self, id: NodeId) -> Result<()> {
        match self.status(id)? {
            NodeStatus::Failed => Err(Error::AlreadyFailed(id)),
            NodeStatus::Healthy => {
                self.status.insert(id, NodeStatus::Failed);
                self.shards.insert(id, Vec::new());
                Ok(())
            }
        }
    }

    fn stripe_view(&self, stripe: usize) -> CodeMatrix {
        let mut c = CodeMatrix::empty(&self.params);
        for (&id, shard) in &self.shards {
            if self.status[&id] == NodeStatus::Healthy {
                c.set_column(id, shard[stripe].clone()).expect("stored columns have alpha symbols");
            }
        }
        c
    }

    fn rack_healthy(&self, e: usize) -> bool {
        self.params.rack_nodes(e).all(|id| self.status[&id] == NodeStatus::Healthy)
    }

    /// Regenerates failed node `id` for every stripe. Each stripe must cost
    /// exactly `d * beta` cross-rack symbols.
    pub fn repair_failed(&mut self, id: NodeId, helpers: Option<&[usize]>) -> Result<BandwidthLedger> {
        if self.status(id)? != NodeStatus::Failed {
            return Err(Error::NotFailed(id));
        }
        let p = &self.params;
        if p.rack_nodes(id.rack).any(|g| g != id && self.status[&g] == NodeStatus::Failed) {
            return Err(Error::MultipleFailuresInRack { rack: id.rack });
        }
        let helpers = match helpers {
            Some(h) => {
                check_helpers(p, id.rack, h)?;
                if let Some(&bad) = h.iter().find(|&&e| !self.rack_healthy(e)) {
                    return Err(Error::HelperRackUnhealthy(bad));
                }
                h.to_vec()
            }
            None => default_helpers(p, id.rack, |e| self.rack_healthy(e))?,
        };

        let mut total = BandwidthLedger::default();
        let mut restored = Vec::with_capacity(self.stripes);
        for s in 0..self.stripes {
            let (col, ledger) = repair_node(&self.stripe_view(s), id, Some(&helpers))?;
            if ledger.cross_rack_symbols != p.d() * p.beta() {
                return Err(Error::Bandwidth { expected: p.d() * p.beta(), got: ledger.cross_rack_symbols });
            }
            total.merge(&ledger);
            restored.push(col);
        }
        self.shards.insert(id, restored);
        self.status.insert(id, NodeStatus::Healthy);
        Ok(total)
    }

    /// Data symbols of every stripe.
    pub fn read_data(&self) -> Result<Vec<Vec<Elem>>> {
        self.read_data_with(ReadPath::Auto)
    }

    pub fn read_data_with(&self, path: ReadPath) -> Result<Vec<Vec<Elem>>> {
        let p = &self.params;
        let healthy = self.healthy_nodes();
        if healthy.len() < p.k() {
            return Err(Error::InsufficientSurvivors { healthy: healthy.len(), k: p.k() });
        }
        let systematic_ok = healthy.iter().take(p.k()).eq(p.nodes().take(p.k()).collect::<Vec<_>>().iter());
        if self.systematic && path == ReadPath::Auto && systematic_ok {
            let layout = systematic_layout(p);
            return Ok((0..self.stripes)
                .map(|s| {
                    layout
                        .data_positions
                        .iter()
                        .map(|&(i, id)| self.shards[&id][s][i])
                        .collect()
                })
                .collect());
        }
        let chosen = &healthy[..p.k()];
        (0..self.stripes)
            .map(|s| {
                let cols: Vec<ObservedColumn> = chosen
                    .iter()
                    .map(|&id| ObservedColumn::new(id, self.shards[&id][s].clone()))
                    .collect();
                let m = reconstruct(p, &cols)?;
                if self.systematic {
                    read_systematic(p, &encode(&m))
                } else {
                    Ok(m.unfill())
                }
            })
            .collect()
    }
}

/// Storage and bandwidth figures for a parameter set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverheadReport {
    pub n: usize,
    pub k: usize,
    pub u: usize,
    pub d: usize,
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
    pub b: usize,
    /// `n * alpha`, numerator of the storage overhead
    pub stored_symbols: usize,
}

impl OverheadReport {
    pub fn storage_overhead(&self) -> f64 {
        self.stored_symbols as f64 / self.b as f64
    }

    /// `gamma / alpha`; 1 at the minimum-bandwidth point.
    pub fn bandwidth_to_storage(&self) -> f64 {
        self.gamma as f64 / self.alpha as f64
    }
}

impl fmt::Display for OverheadReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "stored_symbols = {}", self.stored_symbols)?;
        writeln!(f, "data_symbols = {}", self.b)?;
        writeln!(
            f,
            "storage_overhead = {}/{} = {:.4}",
            self.stored_symbols,
            self.b,
            self.storage_overhead()
        )?;
        writeln!(f, "alpha = {}", self.alpha)?;
        writeln!(f, "gamma = d*beta = {}", self.gamma)?;
        write!(f, "gamma/alpha = {}", self.bandwidth_to_storage())
    }
}

pub fn overhead_report(params: &CodeParams) -> OverheadReport {
    OverheadReport {
        n: params.n(),
        k: params.k(),
        u: params.u(),
        d: params.d(),
        alpha: params.alpha(),
        beta: params.beta(),
        gamma: params.gamma(),
        b: params.b(),
        stored_symbols: params.n() * params.alpha(),
    }
}
