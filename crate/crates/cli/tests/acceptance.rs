//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach stdout:
//! `cargo test -p mbrr-cli --test acceptance`.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use mbrr_core::encode::{encode, row_polynomial};
use mbrr_core::linalg::{matmul, Matrix};
use mbrr_core::repair::{local_polynomials, repair_node};
use mbrr_core::systematic::read_systematic;
use mbrr_core::{
    oracle_reconstruct, overhead_report, reconstruct, systematic_encode, systematic_layout,
    systematic_message_matrix, CodeMatrix, CodeParams, Elem, FieldChoice, MessageMatrix, NodeId,
    ObservedColumn,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

const STRIPES: usize = 100;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn params(n: usize, k: usize, u: usize, d: usize) -> CodeParams {
    CodeParams::new(n, k, u, d, FieldChoice::Auto).unwrap()
}

fn random_data(p: &CodeParams, rng: &mut ChaCha8Rng) -> Vec<Elem> {
    (0..p.b()).map(|_| Elem::from_raw(rng.gen_range(0..p.field().q()))).collect()
}

fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..size).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..size).rev().find(|&i| cur[i] < n - size + i) else { return out };
        cur[i] += 1;
        for j in i + 1..size {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(budget: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < budget, || format!("took {:.1} s, budget {} s", t.as_secs_f64(), budget.as_secs()))
}

/// Every k-subset reconstructs `m` from `c`.
fn all_subsets_reconstruct(p: &CodeParams, m: &MessageMatrix, c: &CodeMatrix) -> Result<usize, String> {
    let nodes: Vec<NodeId> = p.nodes().collect();
    let subsets = combinations(p.n(), p.k());
    for s in &subsets {
        let ids: Vec<NodeId> = s.iter().map(|&i| nodes[i]).collect();
        let got = reconstruct(p, &ObservedColumn::from_code(c, &ids));
        ensure(got.as_ref() == Ok(m), || format!("subset {s:?} gave {got:?}"))?;
    }
    Ok(subsets.len())
}

/// Every node repaired from every helper set; returns the number of repairs.
fn all_repairs(p: &CodeParams, c: &CodeMatrix) -> Result<usize, String> {
    let mut count = 0;
    for id in p.nodes() {
        let mut damaged = c.clone();
        let lost = damaged.erase(id).expect("complete");
        let others: Vec<usize> = (0..p.racks()).filter(|&e| e != id.rack).collect();
        for s in combinations(others.len(), p.d()) {
            let helpers: Vec<usize> = s.iter().map(|&i| others[i]).collect();
            let (col, ledger) = repair_node(&damaged, id, Some(&helpers)).map_err(|e| e.to_string())?;
            ensure(col == lost, || format!("node {id} helpers {helpers:?}: wrong column"))?;
            ensure(ledger.cross_rack_symbols == p.d() && p.d() == p.alpha(), || {
                format!("node {id}: ledger {} cross-rack symbols, d = {}", ledger.cross_rack_symbols, p.d())
            })?;
            count += 1;
        }
    }
    Ok(count)
}

/// Local polynomial and leading vector identities for the stripe `m`.
fn identities(p: &CodeParams, m: &MessageMatrix) -> Result<(), String> {
    let f = p.field();
    let rows: Vec<_> = (0..p.d()).map(|i| row_polynomial(m, i).unwrap()).collect();
    let mut phi = Matrix::zeros(p.d(), p.racks());
    let mut leading = Matrix::zeros(p.d(), p.racks());
    for e in 0..p.racks() {
        let h = local_polynomials(m, e).map_err(|e| e.to_string())?;
        for id in p.rack_nodes(e) {
            let x = p.evaluation_point(id).unwrap();
            for i in 0..p.d() {
                ensure(rows[i].eval(f, x) == h[i].eval(f, x), || format!("f_i != h_i at {id} row {i}"))?;
            }
        }
        for (i, v) in p.rack_vector(e).into_iter().enumerate() {
            phi[(i, e)] = v;
            leading[(i, e)] = h[i].coeff(p.u() - 1);
        }
    }
    let expected = matmul(f, &m.m1_matrix(), &phi).unwrap();
    ensure(leading == expected, || "leading coefficients differ from M1 * Phi".into())
}

fn criterion_1() -> Outcome {
    let p = params(12, 7, 3, 3);
    ensure((p.alpha(), p.b()) == (3, 20), || format!("alpha={} B={}", p.alpha(), p.b()))?;
    Ok("alpha=3 B=20".into())
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let p = params(12, 7, 3, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut total = 0;
    for _ in 0..STRIPES {
        let m = MessageMatrix::fill(&p, &random_data(&p, &mut rng)).unwrap();
        total += all_subsets_reconstruct(&p, &m, &encode(&m))?;
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!("{STRIPES} stripes x 792 subsets = {total} reconstructions in {:.2?}", start.elapsed()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut parts = Vec::new();
    for p in [params(12, 7, 3, 3), params(15, 7, 3, 3)] {
        let mut total = 0;
        for _ in 0..STRIPES {
            let c = encode(&MessageMatrix::fill(&p, &random_data(&p, &mut rng)).unwrap());
            total += all_repairs(&p, &c)?;
        }
        parts.push(format!("n={}: {total} repairs", p.n()));
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!("{} with d cross-rack symbols each, {:.2?}", parts.join(", "), start.elapsed()))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let sets = [params(12, 7, 3, 3), params(8, 5, 2, 3), params(12, 6, 3, 3), params(20, 11, 4, 4)];
    ensure(sets.iter().any(|p| p.u() == 2) && sets.iter().any(|p| p.u0() == 0), || "coverage".into())?;
    for p in &sets {
        for _ in 0..STRIPES {
            identities(p, &MessageMatrix::fill(p, &random_data(p, &mut rng)).unwrap())?;
        }
    }
    Ok(format!("{} parameter sets (incl. u=2, u0=0) x {STRIPES} stripes", sets.len()))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sets = [
        params(12, 7, 3, 3),
        params(15, 7, 3, 3),
        params(8, 5, 2, 3),
        params(12, 6, 3, 3),
        params(20, 11, 4, 4),
    ];
    let per_set = 250;
    for p in &sets {
        for _ in 0..per_set {
            let m = MessageMatrix::fill(p, &random_data(p, &mut rng)).unwrap();
            let c = encode(&m);
            let mut ids: Vec<NodeId> = p.nodes().collect();
            ids.shuffle(&mut rng);
            let cols = ObservedColumn::from_code(&c, &ids[..p.k()]);
            let a = reconstruct(p, &cols).map_err(|e| e.to_string())?;
            let b = oracle_reconstruct(p, &cols).map_err(|e| e.to_string())?;
            ensure(a == b && a == m, || format!("{p:?}: decoders disagree"))?;
        }
    }
    Ok(format!("{} instances bit-identical", per_set * sets.len()))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let ex1 = params(12, 7, 3, 3);
    let l = systematic_layout(&ex1);
    ensure(l.redundant_positions == vec![(1, NodeId::new(0, 2))], || {
        format!("(12,7,3,3) redundant cells {:?}", l.redundant_positions)
    })?;
    for p in [ex1, params(20, 11, 4, 4)] {
        let layout = systematic_layout(&p);
        let kb = p.k_bar();
        ensure(layout.redundant_positions.len() == kb * (kb - 1) / 2, || "redundant cell count".into())?;
        let f = p.field();
        let stripes = if p.n() == 12 { STRIPES } else { 10 };
        for _ in 0..stripes {
            let data = random_data(&p, &mut rng);
            let m = systematic_message_matrix(&p, &data).map_err(|e| e.to_string())?;
            let c = encode(&m);
            ensure(read_systematic(&p, &c).as_ref() == Ok(&data), || "data not at layout positions".into())?;
            ensure(systematic_encode(&p, &data).as_ref() == Ok(&c), || "systematic_encode".into())?;
            all_subsets_reconstruct(&p, &m, &c)?;
            all_repairs(&p, &c)?;
            identities(&p, &m)?;

            let other = random_data(&p, &mut rng);
            let a = Elem::from_raw(rng.gen_range(0..f.q()));
            let mix: Vec<Elem> = data.iter().zip(&other).map(|(&x, &y)| f.mul_add(y, a, x)).collect();
            let lhs = systematic_message_matrix(&p, &mix).unwrap();
            let rhs = m.scale_add(a, &systematic_message_matrix(&p, &other).unwrap());
            ensure(lhs == rhs, || "data -> M~ map is not linear".into())?;
        }
    }
    Ok("placement, suites 2-4 and linearity hold for (12,7,3,3) and (20,11,4,4)".into())
}

fn criterion_7() -> Outcome {
    let mut parts = Vec::new();
    for ((n, k, u, d), (num, den), published) in
        [((50, 44, 5, 9), (450, 368), 1.22), ((200, 194, 5, 39), (7800, 6863), 1.13)]
    {
        let p = CodeParams::new(n, k, u, d, FieldChoice::Binary(8)).map_err(|e| e.to_string())?;
        let r = overhead_report(&p);
        ensure((r.stored_symbols, r.b) == (num, den), || format!("{} / {}", r.stored_symbols, r.b))?;
        // the published figures are truncated to two decimals
        let two = (r.storage_overhead() * 100.0).floor() / 100.0;
        ensure(two == published, || format!("{:.4} vs {published}", r.storage_overhead()))?;
        parts.push(format!("{num}/{den} = {:.4}", r.storage_overhead()));
    }
    Ok(parts.join(", "))
}

fn sha256(path: &std::path::Path) -> Vec<u8> {
    Sha256::digest(fs::read(path).unwrap()).to_vec()
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_mbrr");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = tmp.path().join("input.bin");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut data = vec![0u8; 1 << 20];
    rng.fill(&mut data[..]);
    fs::write(&input, &data).unwrap();

    let run = |args: &[&std::ffi::OsStr]| -> Result<(), String> {
        let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())
    };
    let shards = tmp.path().join("shards");
    run(&["encode".as_ref(), input.as_os_str(), "--out".as_ref(), shards.as_os_str()])?;
    let p = params(12, 7, 3, 3);
    let names: Vec<String> = p.nodes().map(|id| format!("node_{}_{}.mbrr", id.rack, id.slot)).collect();
    ensure(names.iter().all(|n| shards.join(n).exists()), || "missing shard files".into())?;

    let subset_dir = tmp.path().join("subset");
    fs::create_dir(&subset_dir).unwrap();
    let mut chosen = names.clone();
    chosen.shuffle(&mut rng);
    for n in &chosen[..p.k()] {
        fs::copy(shards.join(n), subset_dir.join(n)).unwrap();
    }
    let decoded = tmp.path().join("decoded.bin");
    run(&["decode".as_ref(), subset_dir.as_os_str(), "--out".as_ref(), decoded.as_os_str()])?;
    ensure(fs::read(&decoded).unwrap() == data, || "decoded file differs".into())?;

    let victim = NodeId::new(rng.gen_range(0..p.racks()), rng.gen_range(0..p.u()));
    let victim_path = shards.join(format!("node_{}_{}.mbrr", victim.rack, victim.slot));
    let before = sha256(&victim_path);
    fs::remove_file(&victim_path).unwrap();
    let (rack, slot) = (victim.rack.to_string(), victim.slot.to_string());
    run(&["repair".as_ref(), shards.as_os_str(), rack.as_ref(), slot.as_ref()])?;
    ensure(sha256(&victim_path) == before, || format!("repaired shard {victim} hash differs"))?;

    within(Duration::from_secs(30), start)?;
    Ok(format!(
        "1 MiB: decoded from {:?}, repaired {victim} hash-identical, {:.2?}",
        chosen[..p.k()].iter().map(|n| n.trim_end_matches(".mbrr")).collect::<Vec<_>>(),
        start.elapsed()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("(12,7,3,3) parameters", criterion_1),
        ("exhaustive reconstruction", criterion_2),
        ("exhaustive repair", criterion_3),
        ("rack identities", criterion_4),
        ("oracle equivalence", criterion_5),
        ("systematic transform", criterion_6),
        ("storage overhead", criterion_7),
        ("cli round trip", criterion_8),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                println!("FAIL {} {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: {} of {} criteria passed", criteria.len(), criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
