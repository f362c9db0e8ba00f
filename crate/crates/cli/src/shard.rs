//! On-disk shard format. All integers are big-endian.
//!
//! ```text
//! offset size field
//!      0    4 magic "MBRR"
//!      4    2 format version
//!      6    1 m (0 for a prime field)
//!      7    1 systematic flag
//!      8    4 primitive polynomial (the modulus p for a prime field)
//!     12   16 n, k, u, d
//!     28    8 rack e, slot g
//!     36    8 stripe count
//!     44    8 payload length in bytes
//!     52    8 original file length
//!     60      payload: stripe_count * alpha symbols, each symbol_width bytes
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use mbrr_core::{CodeParams, Elem, Field, FieldChoice, FieldKind, NodeId};

pub const MAGIC: &[u8; 4] = b"MBRR";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 60;

#[derive(Debug, thiserror::Error)]
pub enum ShardError {
    #[error("bad magic")]
    Magic,
    #[error("unsupported format version {0}")]
    Version(u16),
    #[error("file truncated: {0} bytes")]
    Truncated(usize),
    #[error("payload length {got}, header implies {expected}")]
    PayloadLength { expected: u64, got: u64 },
    #[error("symbol value {0} out of field range")]
    Symbol(u32),
    #[error("invalid parameters in header: {0}")]
    Params(#[from] mbrr_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Everything in the header except the node position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StripeInfo {
    pub field: FieldKind,
    pub systematic: bool,
    pub n: u32,
    pub k: u32,
    pub u: u32,
    pub d: u32,
    pub stripe_count: u64,
    pub original_len: u64,
}

impl StripeInfo {
    pub fn params(&self) -> Result<CodeParams, ShardError> {
        let field = Field::from_kind(self.field)?;
        Ok(CodeParams::new(
            self.n as usize,
            self.k as usize,
            self.u as usize,
            self.d as usize,
            FieldChoice::Given(field),
        )?)
    }

    fn field_bytes(&self) -> (u8, u32) {
        match self.field {
            FieldKind::Binary { m, poly } => (m as u8, poly),
            FieldKind::Prime { p } => (0, p),
        }
    }
}

/// Bytes used to store one symbol of a field with `q` elements.
pub fn symbol_width(kind: FieldKind) -> usize {
    match kind {
        FieldKind::Binary { m, .. } => (m as usize).div_ceil(8),
        FieldKind::Prime { p } => (32 - (p - 1).leading_zeros() as usize).div_ceil(8),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShardFile {
    pub info: StripeInfo,
    pub node: NodeId,
    /// `stripe_count * alpha` symbols, stripe by stripe.
    pub symbols: Vec<Elem>,
}

impl ShardFile {
    pub fn file_name(node: NodeId) -> String {
        format!("node_{}_{}.mbrr", node.rack, node.slot)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let width = symbol_width(self.info.field);
        let payload_len = self.symbols.len() * width;
        let (m, poly) = self.info.field_bytes();
        let mut out = Vec::with_capacity(HEADER_LEN + payload_len);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_be_bytes());
        out.push(m);
        out.push(self.info.systematic as u8);
        out.extend_from_slice(&poly.to_be_bytes());
        for v in [self.info.n, self.info.k, self.info.u, self.info.d] {
            out.extend_from_slice(&v.to_be_bytes());
        }
        out.extend_from_slice(&(self.node.rack as u32).to_be_bytes());
        out.extend_from_slice(&(self.node.slot as u32).to_be_bytes());
        out.extend_from_slice(&self.info.stripe_count.to_be_bytes());
        out.extend_from_slice(&(payload_len as u64).to_be_bytes());
        out.extend_from_slice(&self.info.original_len.to_be_bytes());
        for s in &self.symbols {
            out.extend_from_slice(&s.value().to_be_bytes()[4 - width..]);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ShardError> {
        if bytes.len() < HEADER_LEN {
            return Err(ShardError::Truncated(bytes.len()));
        }
        if &bytes[..4] != MAGIC {
            return Err(ShardError::Magic);
        }
        let u16_at = |o: usize| u16::from_be_bytes(bytes[o..o + 2].try_into().unwrap());
        let u32_at = |o: usize| u32::from_be_bytes(bytes[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_be_bytes(bytes[o..o + 8].try_into().unwrap());
        let version = u16_at(4);
        if version != VERSION {
            return Err(ShardError::Version(version));
        }
        let m = bytes[6] as u32;
        let poly = u32_at(8);
        let field = if m == 0 { FieldKind::Prime { p: poly } } else { FieldKind::Binary { m, poly } };
        let info = StripeInfo {
            field,
            systematic: bytes[7] != 0,
            n: u32_at(12),
            k: u32_at(16),
            u: u32_at(20),
            d: u32_at(24),
            stripe_count: u64_at(36),
            original_len: u64_at(52),
        };
        let node = NodeId::new(u32_at(28) as usize, u32_at(32) as usize);
        let width = symbol_width(field);
        let expected = info.stripe_count * info.d as u64 * width as u64;
        let declared = u64_at(44);
        let actual = (bytes.len() - HEADER_LEN) as u64;
        if declared != expected || actual != expected {
            return Err(ShardError::PayloadLength { expected, got: actual.min(declared) });
        }
        let q = match field {
            FieldKind::Binary { m, .. } => 1u64 << m,
            FieldKind::Prime { p } => p as u64,
        };
        let symbols = bytes[HEADER_LEN..]
            .chunks_exact(width)
            .map(|c| {
                let v = c.iter().fold(0u32, |acc, &b| acc << 8 | b as u32);
                if (v as u64) < q {
                    Ok(Elem::from_raw(v))
                } else {
                    Err(ShardError::Symbol(v))
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(ShardFile { info, node, symbols })
    }

    pub fn read(path: &Path) -> Result<Self, ShardError> {
        Self::from_bytes(&fs::read(path)?)
    }

    /// Writes to `dir/<file_name>` via a temporary file and a rename.
    pub fn write_atomic(&self, dir: &Path) -> Result<PathBuf, ShardError> {
        let path = dir.join(Self::file_name(self.node));
        let tmp = dir.join(format!(".{}.tmp", Self::file_name(self.node)));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&self.to_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Symbols of stripe `s`.
    pub fn stripe(&self, s: usize) -> &[Elem] {
        let a = self.info.d as usize;
        &self.symbols[s * a..(s + 1) * a]
    }
}
