//! Library side of the `mbrr` command: shard files, byte-level striping,
//! scenario scripts and the self-test.

pub mod codec;
pub mod scenario;
pub mod selftest;
pub mod shard;
