#![allow(dead_code)]

use mbrr_core::{CodeParams, Elem, FieldChoice, NodeId};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn params(n: usize, k: usize, u: usize, d: usize) -> CodeParams {
    CodeParams::new(n, k, u, d, FieldChoice::Auto).unwrap()
}

pub fn example1() -> CodeParams {
    params(12, 7, 3, 3)
}

/// Parameter sets covering u = 2, u0 = 0, d = k_bar, d = n_bar - 1, binary
/// and prime fields.
pub fn param_sets() -> Vec<CodeParams> {
    vec![
        params(12, 7, 3, 3),  // u0 = 1, GF(16)
        params(15, 7, 3, 3),  // 4 helper sets per failure
        params(8, 5, 2, 3),   // u = 2, GF(11)
        params(12, 6, 3, 3),  // u0 = 0
        params(20, 11, 4, 4), // u = 4, GF(29)
        params(12, 7, 3, 2),  // d = k_bar
        params(25, 13, 5, 3), // GF(256) with 5 racks
        params(21, 10, 3, 5), // k_bar = 3, GF(64)
    ]
}

pub fn random_data(p: &CodeParams, rng: &mut impl Rng) -> Vec<Elem> {
    (0..p.b()).map(|_| Elem::from_raw(rng.gen_range(0..p.field().q()))).collect()
}

pub fn random_subset(p: &CodeParams, size: usize, rng: &mut impl Rng) -> Vec<NodeId> {
    let mut ids: Vec<NodeId> = p.nodes().collect();
    ids.shuffle(rng);
    ids.truncate(size);
    ids
}

/// All `size`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}
