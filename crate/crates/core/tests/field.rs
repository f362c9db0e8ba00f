mod common;

use mbrr_core::{Elem, Field, FieldKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shift-and-add multiply with reduction; no tables.
fn slow_mul(m: u32, poly: u32, a: u32, b: u32) -> u32 {
    let mut acc = 0u32;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> m & 1 == 1 {
            a ^= poly;
        }
    }
    acc
}

#[test]
fn random_triples_large_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF1E1D);
    for m in [8u32, 16] {
        let f = Field::binary(m).unwrap();
        let FieldKind::Binary { poly, .. } = f.kind() else { unreachable!() };
        for _ in 0..100_000 {
            let [a, b, c] = [(); 3].map(|_| Elem::from_raw(rng.gen_range(0..f.q())));
            assert_eq!(f.mul(a, b).value(), slow_mul(m, poly, a.value(), b.value()));
            assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
            }
        }
    }
}

#[test]
fn prime_field_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let f = Field::prime(65537).unwrap();
    let p = 65537u64;
    for _ in 0..100_000 {
        let [a, b, c] = [(); 3].map(|_| rng.gen_range(0..65537u32));
        let (ea, eb, ec) = (Elem::from_raw(a), Elem::from_raw(b), Elem::from_raw(c));
        assert_eq!(f.mul(ea, eb).value() as u64, a as u64 * b as u64 % p);
        assert_eq!(f.add(ea, eb).value() as u64, (a as u64 + b as u64) % p);
        assert_eq!(f.mul(ea, f.add(eb, ec)), f.add(f.mul(ea, eb), f.mul(ea, ec)));
    }
}

#[test]
fn evaluation_points_distinct_for_every_param_set() {
    for p in common::param_sets() {
        let f = p.field();
        let eta = p.eta();
        assert_eq!(f.order(eta).unwrap() as usize, p.u());
        let mut pts: Vec<Elem> = p.nodes().map(|id| p.evaluation_point(id).unwrap()).collect();
        assert!(pts.iter().all(|x| !x.is_zero()));
        pts.sort();
        pts.dedup();
        assert_eq!(pts.len(), p.n(), "{p:?}");
        // rack points x_e = xi^(eu) distinct too, as the repair solve needs
        let mut racks: Vec<Elem> = (0..p.racks()).map(|e| p.rack_point(e)).collect();
        racks.sort();
        racks.dedup();
        assert_eq!(racks.len(), p.racks());
    }
}

#[test]
fn xi_eta_separation_exhaustive() {
    // xi^e eta^g distinct over the whole [0, n_bar) x [0, u) grid for the
    // largest rack count GF(2^8) allows at u = 5
    let f = Field::binary(8).unwrap();
    let xi = f.primitive_element();
    let eta = f.element_of_order(5).unwrap();
    let mut seen = std::collections::HashSet::new();
    for e in 0..51 {
        for g in 0..5 {
            assert!(seen.insert(f.mul(f.pow_u(xi, e), f.pow_u(eta, g))));
        }
    }
}
