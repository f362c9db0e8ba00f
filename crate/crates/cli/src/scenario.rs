//! Line-based failure/repair scripts for the cluster simulator.
//!
//! ```text
//! params 12 7 3 3        # n k u d, optional 5th field: binary degree m
//! systematic on          # or off (default)
//! seed 7                 # data RNG seed (default 0)
//! store 4                # encode 4 random stripes
//! fail 1 2               # node (rack, slot)
//! repair 1 2             # default helpers
//! repair 1 2 0 2 3       # explicit helper racks
//! read                   # every stripe must match what was stored
//! expect-read-fail       # the read must be refused
//! expect-repair-fail 1 2 # the repair must be refused (helpers optional)
//! ```
//!
//! `#` starts a comment. The report is a pure function of the script.

use std::fmt;

use mbrr_core::{Cluster, CodeParams, Elem, FieldChoice, NodeId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Params { n: usize, k: usize, u: usize, d: usize, m: Option<u32> },
    Systematic(bool),
    Seed(u64),
    Store(usize),
    Fail(NodeId),
    Repair(NodeId, Option<Vec<usize>>),
    ExpectRepairFail(NodeId, Option<Vec<usize>>),
    Read,
    ExpectReadFail,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

pub fn parse(script: &str) -> Result<Vec<Step>, ParseError> {
    let mut steps = Vec::new();
    for (idx, raw) in script.lines().enumerate() {
        let line = idx + 1;
        let err = |msg: String| ParseError { line, msg };
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let mut words = text.split_whitespace();
        let cmd = words.next().expect("nonempty line");
        if cmd == "systematic" {
            let step = match (words.next(), words.next()) {
                (Some("on"), None) => Step::Systematic(true),
                (Some("off"), None) => Step::Systematic(false),
                _ => return Err(err("systematic expects on or off".into())),
            };
            steps.push(step);
            continue;
        }
        let args: Vec<u64> = words
            .map(|w| w.parse::<u64>().map_err(|_| err(format!("not a number: {w:?}"))))
            .collect::<Result<_, _>>()?;
        let arity = |lo: usize, hi: usize| {
            if args.len() < lo || args.len() > hi {
                Err(err(format!("{cmd} takes {lo}..={hi} arguments, got {}", args.len())))
            } else {
                Ok(())
            }
        };
        let step = match cmd {
            "params" => {
                arity(4, 5)?;
                let a: Vec<usize> = args.iter().map(|&v| v as usize).collect();
                Step::Params { n: a[0], k: a[1], u: a[2], d: a[3], m: args.get(4).map(|&m| m as u32) }
            }
            "seed" => {
                arity(1, 1)?;
                Step::Seed(args[0])
            }
            "store" => {
                arity(1, 1)?;
                Step::Store(args[0] as usize)
            }
            "fail" => {
                arity(2, 2)?;
                Step::Fail(NodeId::new(args[0] as usize, args[1] as usize))
            }
            "repair" | "expect-repair-fail" => {
                arity(2, usize::MAX)?;
                let id = NodeId::new(args[0] as usize, args[1] as usize);
                let helpers = (args.len() > 2).then(|| args[2..].iter().map(|&v| v as usize).collect());
                if cmd == "repair" {
                    Step::Repair(id, helpers)
                } else {
                    Step::ExpectRepairFail(id, helpers)
                }
            }
            "read" => {
                arity(0, 0)?;
                Step::Read
            }
            "expect-read-fail" => {
                arity(0, 0)?;
                Step::ExpectReadFail
            }
            _ => return Err(err(format!("unknown command {cmd:?}"))),
        };
        steps.push(step);
    }
    Ok(steps)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub lines: Vec<String>,
    pub checks: usize,
    pub failures: usize,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn check(&mut self, ok: bool, line: String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
        }
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.lines.push(format!("     {line}"));
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        write!(
            f,
            "summary: {} checks, {} failed: {}",
            self.checks,
            self.failures,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

struct State {
    cluster: Option<Cluster>,
    systematic: bool,
    rng: ChaCha8Rng,
    stored: Vec<Vec<Elem>>,
}

pub fn run(steps: &[Step]) -> Report {
    let mut r = Report::default();
    let mut st = State { cluster: None, systematic: false, rng: ChaCha8Rng::seed_from_u64(0), stored: Vec::new() };
    for step in steps {
        if let Step::Params { n, k, u, d, m } = *step {
            let choice = m.map_or(FieldChoice::Auto, FieldChoice::Binary);
            match CodeParams::new(n, k, u, d, choice) {
                Ok(p) => {
                    r.note(format!(
                        "params n={n} k={k} u={u} d={d} alpha={} beta={} B={} field={}",
                        p.alpha(),
                        p.beta(),
                        p.b(),
                        p.field()
                    ));
                    st.cluster = Some(Cluster::with_mode(&p, st.systematic));
                    st.stored.clear();
                }
                Err(e) => r.check(false, format!("params n={n} k={k} u={u} d={d}: {e}")),
            }
            continue;
        }
        match step {
            Step::Systematic(on) => {
                st.systematic = *on;
                if let Some(c) = &st.cluster {
                    st.cluster = Some(Cluster::with_mode(c.params(), *on));
                    st.stored.clear();
                }
                r.note(format!("systematic {}", if *on { "on" } else { "off" }));
                continue;
            }
            Step::Seed(s) => {
                st.rng = ChaCha8Rng::seed_from_u64(*s);
                r.note(format!("seed {s}"));
                continue;
            }
            _ => {}
        }
        let Some(cluster) = st.cluster.as_mut() else {
            r.check(false, format!("{step:?}: no params given"));
            continue;
        };
        let p = cluster.params().clone();
        match step {
            Step::Store(count) => {
                let q = p.field().q();
                let data: Vec<Vec<Elem>> = (0..*count)
                    .map(|_| (0..p.b()).map(|_| Elem::from_raw(st.rng.gen_range(0..q))).collect())
                    .collect();
                match cluster.store_data(&data) {
                    Ok(()) => {
                        r.note(format!("store {count} stripes ({} data symbols)", count * p.b()));
                        st.stored = data;
                    }
                    Err(e) => r.check(false, format!("store {count}: {e}")),
                }
            }
            Step::Fail(id) => match cluster.fail_node(*id) {
                Ok(()) => r.note(format!("fail {id}")),
                Err(e) => r.check(false, format!("fail {id}: {e}")),
            },
            Step::Repair(id, helpers) => match cluster.repair_failed(*id, helpers.as_deref()) {
                Ok(l) => {
                    let stripes = cluster.stripe_count();
                    let per_helper: Vec<String> =
                        l.per_helper.iter().map(|(rack, n)| format!("{rack}:{n}")).collect();
                    let expected = p.d() * p.beta() * stripes;
                    r.check(
                        l.cross_rack_symbols == expected && l.helper_total() == l.cross_rack_symbols,
                        format!(
                            "repair {id} helpers=[{}] cross_rack={} (expected d*beta*stripes={expected}) intra_rack={}",
                            per_helper.join(" "),
                            l.cross_rack_symbols,
                            l.intra_rack_symbols
                        ),
                    );
                }
                Err(e) => r.check(false, format!("repair {id}: {e}")),
            },
            Step::ExpectRepairFail(id, helpers) => match cluster.repair_failed(*id, helpers.as_deref()) {
                Ok(_) => r.check(false, format!("repair {id} succeeded but was expected to fail")),
                Err(e) => r.check(true, format!("repair {id} refused as expected: {e}")),
            },
            Step::Read => match cluster.read_data() {
                Ok(data) => r.check(
                    data == st.stored,
                    format!("read {} stripes from {} healthy nodes", data.len(), cluster.healthy_nodes().len()),
                ),
                Err(e) => r.check(false, format!("read: {e}")),
            },
            Step::ExpectReadFail => match cluster.read_data() {
                Ok(_) => r.check(false, "read succeeded but was expected to fail".into()),
                Err(e) => r.check(true, format!("read refused as expected: {e}")),
            },
            Step::Params { .. } | Step::Systematic(_) | Step::Seed(_) => unreachable!("handled above"),
        }
    }
    r
}

pub fn run_script(script: &str) -> Result<Report, ParseError> {
    Ok(run(&parse(script)?))
}
