//! Built-in checks on the (12, 7, 3, 3) code: field tables, every 7-subset
//! reconstruction, every single-node repair and systematic placement.

use std::fmt;
use std::time::{Duration, Instant};

use mbrr_core::encode::encode;
use mbrr_core::layout::select_field;
use mbrr_core::repair::repair_node;
use mbrr_core::systematic::read_systematic;
use mbrr_core::{
    oracle_reconstruct, reconstruct, systematic_encode, CodeParams, Elem, FieldChoice, MessageMatrix,
    NodeId, ObservedColumn,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub stripes: usize,
    /// Flip one antilog table entry before running.
    pub inject_table_fault: bool,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options { stripes: 10, inject_table_fault: false, seed: 1 }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default)]
pub struct Summary {
    pub checks: Vec<Check>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn record(&mut self, name: &'static str, f: impl FnOnce() -> Result<String, String>) {
        let start = Instant::now();
        let (passed, detail) = match f() {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(Check { name, passed, detail, elapsed: start.elapsed() });
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<16} {:>9.1} ms  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.elapsed.as_secs_f64() * 1e3,
                c.detail
            )?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else { return out };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

pub fn run(opts: Options) -> Summary {
    let mut summary = Summary::default();
    let mut field = select_field(12, 3).expect("GF(16) exists");
    if opts.inject_table_fault {
        field = field.with_corrupted_exp(5);
    }
    summary.record("field tables", || {
        field.validate().map(|()| format!("{field} consistent")).map_err(|e| e.to_string())
    });

    let params = match CodeParams::new(12, 7, 3, 3, FieldChoice::Given(field)) {
        Ok(p) => p,
        Err(e) => {
            summary.record("parameters", || Err(e.to_string()));
            return summary;
        }
    };
    summary.record("parameters", || {
        let (a, b) = (params.alpha(), params.b());
        if (a, b) == (3, 20) {
            Ok(format!("alpha={a} B={b}"))
        } else {
            Err(format!("alpha={a} B={b}, expected alpha=3 B=20"))
        }
    });

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let q = params.field().q();
    let data: Vec<Vec<Elem>> = (0..opts.stripes)
        .map(|_| (0..params.b()).map(|_| Elem::from_raw(rng.gen_range(0..q))).collect())
        .collect();
    let messages: Vec<MessageMatrix> =
        data.iter().map(|d| MessageMatrix::fill(&params, d).expect("B symbols")).collect();
    let codes: Vec<_> = messages.iter().map(encode).collect();
    let nodes: Vec<NodeId> = params.nodes().collect();
    let all = subsets(12, 7);

    summary.record("reconstruction", || {
        for (m, c) in messages.iter().zip(&codes) {
            for s in &all {
                let ids: Vec<NodeId> = s.iter().map(|&i| nodes[i]).collect();
                let got = reconstruct(&params, &ObservedColumn::from_code(c, &ids));
                if got.as_ref() != Ok(m) {
                    return Err(format!("subset {s:?}: {got:?}"));
                }
            }
        }
        Ok(format!("{} stripes x {} subsets", codes.len(), all.len()))
    });

    summary.record("oracle", || {
        for (m, c) in messages.iter().zip(&codes) {
            for s in all.iter().step_by(37) {
                let ids: Vec<NodeId> = s.iter().map(|&i| nodes[i]).collect();
                let got = oracle_reconstruct(&params, &ObservedColumn::from_code(c, &ids));
                if got.as_ref() != Ok(m) {
                    return Err(format!("subset {s:?}: {got:?}"));
                }
            }
        }
        Ok("structured and linear-system decoders agree".into())
    });

    summary.record("repair", || {
        for c in &codes {
            for &id in &nodes {
                let mut damaged = c.clone();
                let lost = damaged.erase(id).expect("complete code");
                match repair_node(&damaged, id, None) {
                    Ok((col, l)) if col == lost && l.cross_rack_symbols == params.d() => {}
                    other => return Err(format!("node {id}: {other:?}")),
                }
            }
        }
        Ok(format!("{} stripes x 12 nodes, 3 cross-rack symbols each", codes.len()))
    });

    summary.record("systematic", || {
        for d in &data {
            let c = systematic_encode(&params, d).map_err(|e| e.to_string())?;
            if read_systematic(&params, &c).as_ref() != Ok(d) {
                return Err("data not found at systematic positions".into());
            }
        }
        Ok(format!("{} stripes placed uncoded on nodes 0..7", data.len()))
    });
    summary
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets(12, 7).len(), 792);
        assert_eq!(subsets(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn clean_build_passes() {
        let s = run(Options { stripes: 1, ..Options::default() });
        assert!(s.passed(), "{s}");
    }

    #[test]
    fn table_fault_is_detected() {
        let s = run(Options { stripes: 1, inject_table_fault: true, ..Options::default() });
        assert!(!s.passed());
        assert!(!s.check("field tables").unwrap().passed);
    }
}
