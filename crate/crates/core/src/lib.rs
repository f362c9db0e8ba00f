//! Explicit minimum-bandwidth rack-aware regenerating (MBRR) codes.
//!
//! `n = n_bar * u` nodes sit in `n_bar` racks of `u` nodes. A stripe of `B`
//! data symbols is stored as `alpha = d` symbols per node so that
//!
//! * any `k` nodes recover the stripe ([`reconstruct`]), and
//! * a single failed node is regenerated from the `u - 1` other nodes in its
//!   rack plus one symbol from each of `d` helper racks ([`repair`]), so the
//!   cross-rack repair bandwidth equals the per-node storage.
//!
//! ```
//! use mbrr_core::{encode, CodeParams, Elem, FieldChoice, MessageMatrix, NodeId};
//!
//! let params = CodeParams::new(12, 7, 3, 3, FieldChoice::Auto).unwrap();
//! assert_eq!((params.alpha(), params.b()), (3, 20));
//!
//! let data: Vec<Elem> = (0..20).map(|i| Elem::from_raw(i % 16)).collect();
//! let mut code = encode::encode(&MessageMatrix::fill(&params, &data).unwrap());
//! let lost = code.erase(NodeId::new(1, 2)).unwrap();
//! let (repaired, ledger) = mbrr_core::repair::repair_node(&code, NodeId::new(1, 2), None).unwrap();
//! assert_eq!(repaired, lost);
//! assert_eq!(ledger.cross_rack_symbols, params.alpha());
//! ```

pub mod cluster;
pub mod encode;
pub mod error;
pub mod gf;
pub mod layout;
pub mod linalg;
pub mod reconstruct;
pub mod repair;
pub mod systematic;

pub use cluster::{overhead_report, BandwidthLedger, Cluster, NodeStatus, OverheadReport, ReadPath};
pub use error::{Error, Result};
pub use gf::{Elem, Field, FieldKind};
pub use layout::{CodeMatrix, CodeParams, FieldChoice, MessageMatrix, NodeId};
pub use linalg::{Matrix, Poly};
pub use reconstruct::{oracle_reconstruct, reconstruct, ObservedColumn};
pub use systematic::{systematic_encode, systematic_layout, systematic_message_matrix, SystematicLayout};
