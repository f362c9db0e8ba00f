mod common;

use mbrr_core::encode::encode;
use mbrr_core::{oracle_reconstruct, reconstruct, Error, MessageMatrix, NodeId, ObservedColumn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn every_k_subset_example1() {
    let p = common::example1();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let subsets = common::combinations(12, 7);
    assert_eq!(subsets.len(), 792);
    for _ in 0..5 {
        let data = common::random_data(&p, &mut rng);
        let m = MessageMatrix::fill(&p, &data).unwrap();
        let c = encode(&m);
        for s in &subsets {
            let ids: Vec<NodeId> = s.iter().map(|&i| p.node_at(i)).collect();
            let got = reconstruct(&p, &ObservedColumn::from_code(&c, &ids)).unwrap();
            assert_eq!(got, m);
            assert_eq!(got.unfill(), data);
        }
    }
}

#[test]
fn random_subsets_other_params() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for p in common::param_sets() {
        for _ in 0..1000 {
            let data = common::random_data(&p, &mut rng);
            let c = encode(&MessageMatrix::fill(&p, &data).unwrap());
            let ids = common::random_subset(&p, p.k(), &mut rng);
            let got = reconstruct(&p, &ObservedColumn::from_code(&c, &ids)).unwrap();
            assert_eq!(got.unfill(), data, "{p:?} {ids:?}");
        }
    }
}

#[test]
fn structured_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in common::param_sets() {
        for trial in 0..150 {
            let data = common::random_data(&p, &mut rng);
            let c = encode(&MessageMatrix::fill(&p, &data).unwrap());
            let ids = common::random_subset(&p, p.k(), &mut rng);
            let cols = ObservedColumn::from_code(&c, &ids);
            let a = reconstruct(&p, &cols).unwrap();
            assert_eq!(a, oracle_reconstruct(&p, &cols).unwrap());
            if trial % 10 == 0 {
                // the oracle also takes more than k columns
                let all: Vec<NodeId> = p.nodes().collect();
                assert_eq!(a, oracle_reconstruct(&p, &ObservedColumn::from_code(&c, &all)).unwrap());
            }
        }
    }
}

#[test]
fn fewer_than_k_is_rank_deficient() {
    // k-1 columns leave B unknowns underdetermined
    let p = common::example1();
    let c = encode(&MessageMatrix::zero(&p));
    let ids: Vec<NodeId> = p.nodes().take(6).collect();
    let cols = ObservedColumn::from_code(&c, &ids);
    assert!(matches!(reconstruct(&p, &cols), Err(Error::ColumnCount { .. })));
    assert!(matches!(oracle_reconstruct(&p, &cols), Err(Error::ColumnCount { .. })));
}
