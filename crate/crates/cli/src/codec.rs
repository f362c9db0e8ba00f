//! Byte files to shard sets and back.
//!
//! A file is cut into stripes of `B * bytes_per_symbol` bytes (the last one
//! zero-padded). Each data symbol packs `bytes_per_symbol` bytes big-endian,
//! where `bytes_per_symbol` is the largest of 1 or 2 with
//! `256^bytes_per_symbol <= q`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use mbrr_core::encode::encode;
use mbrr_core::repair::repair_node;
use mbrr_core::systematic::read_systematic;
use mbrr_core::{
    reconstruct, systematic_encode, systematic_layout, BandwidthLedger, CodeMatrix, CodeParams, Elem,
    Field, FieldChoice, MessageMatrix, NodeId, ObservedColumn,
};
use rayon::prelude::*;

use crate::shard::{ShardError, ShardFile, StripeInfo};

#[derive(Debug, thiserror::Error)]
pub enum CodecError {
    #[error("input is empty")]
    EmptyInput,
    #[error("field with {0} elements is too small for byte data (need at least 256)")]
    FieldTooSmall(u32),
    #[error("need at least {k} shards, found {found}")]
    InsufficientShards { k: usize, found: usize },
    #[error("shard {0} disagrees with the others on code parameters or file metadata")]
    HeaderMismatch(NodeId),
    #[error("shard for node {0} given twice")]
    DuplicateShard(NodeId),
    #[error("no shards found")]
    NoShards,
    #[error("decoded symbol {0} does not fit the byte mapping")]
    Integrity(u32),
    #[error(transparent)]
    Shard(#[from] ShardError),
    #[error(transparent)]
    Code(#[from] mbrr_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CodecError>;

/// Field for byte data: `--field-m` when given, else GF(2^8), GF(2^16), or the
/// smallest prime `p >= 257` with `u | p - 1` and `p > n`.
pub fn byte_field(n: usize, u: usize, m: Option<u32>) -> Result<Field> {
    let usable = |q: u64| (q - 1).is_multiple_of(u as u64) && q > n as u64;
    if let Some(m) = m {
        let f = Field::binary(m)?;
        if f.q() < 256 {
            return Err(CodecError::FieldTooSmall(f.q()));
        }
        return Ok(f);
    }
    for m in [8, 16] {
        if usable(1 << m) {
            return Ok(Field::binary(m)?);
        }
    }
    let p = (257u32..=65537)
        .find(|&p| usable(p as u64) && (2..p).take_while(|i| i * i <= p).all(|i| p % i != 0))
        .ok_or(mbrr_core::Error::NoField { n, u })?;
    Ok(Field::prime(p)?)
}

pub fn byte_params(n: usize, k: usize, u: usize, d: usize, m: Option<u32>) -> Result<CodeParams> {
    let field = byte_field(n, u, m)?;
    Ok(CodeParams::new(n, k, u, d, FieldChoice::Given(field))?)
}

pub fn bytes_per_symbol(field: &Field) -> usize {
    if field.q() >= 1 << 16 {
        2
    } else {
        1
    }
}

fn stripe_symbols(chunk: &[u8], b: usize, width: usize) -> Vec<Elem> {
    let mut out = vec![Elem::ZERO; b];
    for (slot, bytes) in out.iter_mut().zip(chunk.chunks(width)) {
        let v = bytes.iter().fold(0u32, |acc, &x| acc << 8 | x as u32);
        *slot = Elem::from_raw(v << (8 * (width - bytes.len())));
    }
    out
}

/// Encodes `data` into one shard per node.
pub fn encode_bytes(data: &[u8], params: &CodeParams, systematic: bool) -> Result<Vec<ShardFile>> {
    if data.is_empty() {
        return Err(CodecError::EmptyInput);
    }
    let f = params.field();
    if f.q() < 256 {
        return Err(CodecError::FieldTooSmall(f.q()));
    }
    let width = bytes_per_symbol(f);
    let stripe_bytes = params.b() * width;
    let stripes: Vec<CodeMatrix> = data
        .par_chunks(stripe_bytes)
        .map(|chunk| {
            let symbols = stripe_symbols(chunk, params.b(), width);
            if systematic {
                systematic_encode(params, &symbols)
            } else {
                Ok(encode(&MessageMatrix::fill(params, &symbols)?))
            }
        })
        .collect::<std::result::Result<_, _>>()?;

    let info = StripeInfo {
        field: f.kind(),
        systematic,
        n: params.n() as u32,
        k: params.k() as u32,
        u: params.u() as u32,
        d: params.d() as u32,
        stripe_count: stripes.len() as u64,
        original_len: data.len() as u64,
    };
    Ok(params
        .nodes()
        .map(|id| ShardFile {
            info,
            node: id,
            symbols: stripes.iter().flat_map(|c| c.column(id).expect("complete").iter().copied()).collect(),
        })
        .collect())
}

/// Checks that `shards` describe one encoding and indexes them by node.
pub fn index_shards(shards: &[ShardFile]) -> Result<(CodeParams, StripeInfo, BTreeMap<NodeId, &ShardFile>)> {
    let first = shards.first().ok_or(CodecError::NoShards)?;
    let info = first.info;
    let params = info.params()?;
    let mut by_node = BTreeMap::new();
    for s in shards {
        if s.info != info {
            return Err(CodecError::HeaderMismatch(s.node));
        }
        params.check_node(s.node)?;
        if by_node.insert(s.node, s).is_some() {
            return Err(CodecError::DuplicateShard(s.node));
        }
    }
    Ok((params, info, by_node))
}

/// Recovers the original bytes from any `k` or more consistent shards.
pub fn decode_shards(shards: &[ShardFile]) -> Result<Vec<u8>> {
    let (params, info, by_node) = index_shards(shards)?;
    let k = params.k();
    if by_node.len() < k {
        return Err(CodecError::InsufficientShards { k, found: by_node.len() });
    }
    let width = bytes_per_symbol(params.field());
    let systematic_nodes: Vec<NodeId> = params.nodes().take(k).collect();
    let fast = info.systematic && systematic_nodes.iter().all(|id| by_node.contains_key(id));
    let chosen: Vec<&ShardFile> = by_node.values().take(k).copied().collect();
    let layout = systematic_layout(&params);

    let stripes: Vec<Vec<Elem>> = (0..info.stripe_count as usize)
        .into_par_iter()
        .map(|s| -> Result<Vec<Elem>> {
            if fast {
                return Ok(layout.data_positions.iter().map(|&(i, id)| by_node[&id].stripe(s)[i]).collect());
            }
            let cols: Vec<ObservedColumn> =
                chosen.iter().map(|sh| ObservedColumn::new(sh.node, sh.stripe(s).to_vec())).collect();
            let m = reconstruct(&params, &cols)?;
            Ok(if info.systematic { read_systematic(&params, &encode(&m))? } else { m.unfill() })
        })
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(stripes.len() * params.b() * width);
    for sym in stripes.iter().flatten() {
        let v = sym.value();
        if width < 4 && v >> (8 * width) != 0 {
            return Err(CodecError::Integrity(v));
        }
        out.extend_from_slice(&v.to_be_bytes()[4 - width..]);
    }
    out.truncate(info.original_len as usize);
    Ok(out)
}

/// Regenerates the shard of `failed` from the others. The shard of
/// `failed`, if present in `shards`, is ignored.
pub fn repair_shard(
    shards: &[ShardFile],
    failed: NodeId,
    helpers: Option<&[usize]>,
) -> Result<(ShardFile, BandwidthLedger)> {
    let survivors: Vec<ShardFile> = shards.iter().filter(|s| s.node != failed).cloned().collect();
    let (params, info, by_node) = index_shards(&survivors)?;
    params.check_node(failed)?;
    let per_stripe: Vec<(Vec<Elem>, BandwidthLedger)> = (0..info.stripe_count as usize)
        .into_par_iter()
        .map(|s| {
            let mut c = CodeMatrix::empty(&params);
            for (&id, sh) in &by_node {
                c.set_column(id, sh.stripe(s).to_vec())?;
            }
            repair_node(&c, failed, helpers)
        })
        .collect::<std::result::Result<_, _>>()?;

    let mut ledger = BandwidthLedger::default();
    let mut symbols = Vec::with_capacity(per_stripe.len() * params.alpha());
    for (col, l) in per_stripe {
        ledger.merge(&l);
        symbols.extend(col);
    }
    Ok((ShardFile { info, node: failed, symbols }, ledger))
}

/// Reads every `*.mbrr` file in `dir`, sorted by file name.
pub fn load_dir(dir: &Path) -> Result<Vec<ShardFile>> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "mbrr"))
        .collect();
    paths.sort();
    paths.iter().map(|p| Ok(ShardFile::read(p)?)).collect()
}
