//! The criterion on Pythagorean triples against exact evaluation.

use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

use padic_wieferich::arith::FactorBudget;
use padic_wieferich::flt::{
    check_flt_candidate, gen_primitive_triples, verify_triple, Clause, Member, PythTriple,
};
use padic_wieferich::{is_prime, Error};

fn oracle_vp(x: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    while x.is_multiple_of(&p) {
        x /= &p;
        v += 1;
    }
    v
}

fn vp_u64(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

fn odd_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out.retain(|&p| p > 2);
    out
}

/// Every odd prime of every member of the small triples: the reported
/// order is vp(c^(p-1) - d^(p-1)) and equals 2 vp(member).
#[test]
fn small_triples_against_oracle() {
    let triples = gen_primitive_triples(700);
    assert!(triples.len() > 100);
    for t in triples {
        let verdicts = verify_triple(t, &FactorBudget::default()).unwrap();
        for (member, value, c, d) in [
            (Member::X, t.x, t.y, t.z),
            (Member::Y, t.y, t.x, t.z),
            (Member::Z, t.z, t.x, t.y),
        ] {
            for p in odd_prime_factors(value) {
                let v = verdicts
                    .iter()
                    .find(|v| v.p.get() == p && v.divides == member && v.clause == Clause::OddPrime)
                    .unwrap_or_else(|| panic!("{t:?}: no verdict at {p}"));
                let e = (p - 1) as u32;
                let exact = oracle_vp(&(BigInt::from(d).pow(e) - BigInt::from(c).pow(e)), p);
                assert_eq!(v.observed_order, exact, "{t:?} p={p}");
                assert_eq!(exact, 2 * vp_u64(value, p), "{t:?} p={p}");
                assert!(v.holds());
            }
        }
        let twos: Vec<_> = verdicts
            .iter()
            .filter(|v| v.clause == Clause::Two)
            .collect();
        assert_eq!(twos.len(), 1, "{t:?}");
        assert!(twos[0].holds(), "{:?}", twos[0]);
    }
}

#[test]
fn multiples_reduce_to_the_core() {
    let base = verify_triple(
        PythTriple::new(20, 21, 29).unwrap(),
        &FactorBudget::default(),
    );
    let scaled = verify_triple(
        PythTriple::new(60, 63, 87).unwrap(),
        &FactorBudget::default(),
    );
    assert_eq!(base, scaled);
    assert!(matches!(
        PythTriple::new(20, 21, 30),
        Err(Error::NotASolution(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn no_solutions_for_odd_prime_exponents(
        x in 1u64..5000, y in 1u64..5000, z in 1u64..10_000, n in 3u64..40,
    ) {
        prop_assume!(is_prime(n));
        prop_assert!(matches!(check_flt_candidate(x, y, z, n), Err(Error::NotASolution(_))));
    }

    /// Euclid's parametrization lands in the generator's output.
    #[test]
    fn euclid_triples_are_generated(m in 2u64..60, k in 1u64..60) {
        prop_assume!(k < m && (m - k) % 2 == 1 && m.gcd(&k) == 1);
        let (a, b, z) = (m * m - k * k, 2 * m * k, m * m + k * k);
        let t = PythTriple::new(a.min(b), a.max(b), z).unwrap();
        prop_assert!(t.primitive);
        prop_assert!(gen_primitive_triples(z).contains(&t));
    }
}
