use kohncert_core::local::{effective_exponent, local_gcd, squarefree_part};
use kohncert_core::projections::{multiplicity_via_projection, Shear};
use kohncert_core::{parse_germ, Colength, ExponentPair, Germ, LocalIdeal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAP: u32 = 32;

fn g(s: &str) -> Germ {
    parse_germ(s).unwrap()
}

fn ideal(gens: &[&str]) -> LocalIdeal {
    LocalIdeal::new(gens.iter().map(|s| g(s)).collect()).unwrap()
}

fn random_germ(rng: &mut ChaCha8Rng) -> Germ {
    let n = rng.gen_range(1..=4);
    let terms: Vec<(i64, u32, u32)> = (0..n)
        .map(|_| {
            let d = rng.gen_range(1..=4u32);
            let e1 = rng.gen_range(0..=d);
            (rng.gen_range(1..=3) * if rng.gen() { 1 } else { -1 }, e1, d - e1)
        })
        .collect();
    Germ::from_int_terms(&terms)
}

/// Seeded pairs with `1 ≤ s ≤ 12`.
fn random_finite_pairs(seed: u64, count: usize) -> Vec<(Germ, Germ, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let f = random_germ(&mut rng);
        let h = random_germ(&mut rng);
        if f.is_zero() || h.is_zero() {
            continue;
        }
        let id = LocalIdeal::new(vec![f.clone(), h.clone()]).unwrap();
        if let Colength::Finite(s) = id.colength(CAP) {
            if (1..=12).contains(&s) {
                out.push((f, h, s));
            }
        }
    }
    out
}

fn random_shear(rng: &mut ChaCha8Rng) -> Shear {
    loop {
        let mut e = || rng.gen_range(-3i64..=3);
        if let Some(s) = Shear::from_ints(e(), e(), e(), e()) {
            return s;
        }
    }
}

#[test]
fn monomial_colengths() {
    for a in 1..=5 {
        for b in 1..=5 {
            let id = LocalIdeal::new(vec![Germ::monomial(a, 0), Germ::monomial(0, b)]).unwrap();
            assert_eq!(id.colength(CAP), Colength::Finite((a * b) as usize));
        }
    }
}

#[test]
fn known_colengths() {
    assert_eq!(ideal(&["z1^2 - z2^3", "z1*z2"]).colength(CAP), Colength::Finite(5));
    assert_eq!(ideal(&["z2 - z1^2", "z2"]).colength(CAP), Colength::Finite(2));
    assert_eq!(ideal(&["z1^2", "z1*z2", "z2^2"]).colength(CAP), Colength::Finite(3));
    assert_eq!(ideal(&["z1*z2", "z1^2"]).colength(CAP), Colength::Infinite);
    assert_eq!(ideal(&["1 + z1", "z2"]).colength(CAP), Colength::Finite(0));
    // unit factor (1 + z2) is invisible locally
    assert_eq!(
        ideal(&["z1*(1 + z2)", "z2^2*(1 + z2)"]).colength(CAP),
        Colength::Finite(2)
    );
}

#[test]
fn nakayama_inclusion() {
    for (f, h, s) in random_finite_pairs(11, 20) {
        let id = LocalIdeal::new(vec![f, h]).unwrap();
        for e in ExponentPair::of_degree(s as u32) {
            let m = Germ::monomial(e.e1, e.e2);
            assert_eq!(id.contains(&m, CAP), Some(true), "{m} not in {id}");
        }
    }
}

#[test]
fn radical_idempotent_and_sound() {
    let cases: &[&[&str]] = &[
        &["z1^2", "z2^3"],
        &["z1^2*z2", "z1^3"],
        &["(z1 - z2)^3*(1 + z1)", "(z1 - z2)^2*z2"],
        &["z1^2*z2^2", "z1^2*z2^3 + z1^3*z2^2"],
        &["1 + z1", "z2"],
    ];
    for gens in cases {
        let id = ideal(gens);
        let r = id.radical();
        let rr = r.radical();
        assert_eq!(r.same_ideal(&rr, CAP), Some(true), "{gens:?}");
        assert_eq!(r.contains_ideal(&id, CAP), Some(true), "I ⊄ rad I for {gens:?}");
        for gen in r.generators() {
            assert!(effective_exponent(gen, &id, CAP).is_some(), "{gen} not nilpotent mod {gens:?}");
        }
    }
    assert_eq!(
        ideal(&["z1^2*z2", "z1^3"]).radical().same_ideal(&ideal(&["z1"]), CAP),
        Some(true)
    );
}

#[test]
fn effective_exponent_at_most_colength() {
    for (f, h, s) in random_finite_pairs(12, 20) {
        let id = LocalIdeal::new(vec![f, h]).unwrap();
        for v in ["z1", "z2", "z1 + 2*z2", "z1 - i*z2"] {
            let m = effective_exponent(&g(v), &id, CAP).expect("m-primary");
            assert!(m as usize <= s, "{v}^{m} with s = {s} in {id}");
        }
    }
}

#[test]
fn colength_invariant_under_linear_changes() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (f, h, s) in random_finite_pairs(13, 10) {
        for _ in 0..10 {
            let sh = random_shear(&mut rng);
            let id = LocalIdeal::new(vec![sh.apply(&f), sh.apply(&h)]).unwrap();
            assert_eq!(id.colength(CAP), Colength::Finite(s));
        }
    }
}

#[test]
fn projection_matches_jets() {
    for (i, (f, h, s)) in random_finite_pairs(14, 24).into_iter().enumerate() {
        let p = multiplicity_via_projection(&f, &h, i as u64, 16).unwrap();
        assert_eq!(p.multiplicity, s, "({f}, {h})");
    }
}

#[test]
fn local_gcd_strips_units() {
    assert_eq!(local_gcd(&[g("z1*(1 + z2)"), g("z1^2*(2 - z1)")]), g("z1"));
    assert!(local_gcd(&[g("1 + z1"), g("z2")]).is_one());
    assert_eq!(squarefree_part(&g("z1^3*(1 + z1)^2*z2")), g("z1*z2"));
}

#[test]
fn gaussian_coefficients() {
    // z1^2 + z2^2 = (z1 - i z2)(z1 + i z2)
    let shared = LocalIdeal::new(vec![g("z1^2 + z2^2"), g("z1 - i*z2")]).unwrap();
    assert_eq!(shared.colength(CAP), Colength::Infinite);
    assert_eq!(shared.radical().same_ideal(&ideal(&["z1 - i*z2"]), CAP), Some(true));
    let transverse = LocalIdeal::new(vec![g("z1^2 + z2^2"), g("z1 - z2")]).unwrap();
    assert_eq!(transverse.colength(CAP), Colength::Finite(2));
}
