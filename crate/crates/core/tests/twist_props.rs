use std::sync::Arc;

use proptest::prelude::*;
use twistmod::groups::cyclic;
use twistmod::harness::fixtures::fixture_sequences;
use twistmod::linalg::{Matrix, Prime};
use twistmod::morph::{is_split_mono, EquivariantMap, ShortExactSeq};
use twistmod::reps::{regular_module, trivial_module};
use twistmod::twist::{
    binomial_identity_check, check_relations, extract_splitting, freshman_check, solve_factorization,
    twist_projectivity, twisted_induction, ThetaBlocks, TwistModule,
};
use twistmod::Error;

fn socle_c2() -> ShortExactSeq {
    let p = Prime::new(2).unwrap();
    let g = cyclic(2).unwrap();
    let k = Arc::new(trivial_module(&g, p));
    let kg = Arc::new(regular_module(&g, p));
    let d1 = EquivariantMap::new(k.clone(), kg.clone(), Matrix::from_rows(p, &[vec![1], vec![1]]).unwrap()).unwrap();
    let d2 = EquivariantMap::new(kg, k, Matrix::from_rows(p, &[vec![1, 1]]).unwrap()).unwrap();
    ShortExactSeq::new(d1, d2).unwrap()
}

fn valid_pairs() -> Vec<(u64, usize)> {
    vec![(2, 2), (2, 4), (3, 3)]
}

#[test]
fn q2_shift_matches_hand_layout() {
    let t = twisted_induction(&socle_c2(), 2, Prime::new(2).unwrap()).unwrap();
    assert_eq!(t.module.dim(), 4);
    let expected = Matrix::from_rows(
        Prime::new(2).unwrap(),
        &[vec![0, 0, 0, 0], vec![1, 0, 0, 0], vec![1, 0, 0, 0], vec![0, 1, 1, 0]],
    )
    .unwrap();
    assert_eq!(t.shift(), expected);
}

#[test]
fn twisted_dimensions_follow_the_layout() {
    for f in fixture_sequences().unwrap() {
        let p = f.seq.x().prime();
        for (pp, q) in valid_pairs().into_iter().filter(|(pp, _)| *pp == p.value() as u64) {
            let t = twisted_induction(&f.seq, q, Prime::new(pp).unwrap()).unwrap();
            let (x, y, z) = (f.seq.x().dim(), f.seq.y().dim(), f.seq.z().dim());
            assert_eq!(t.module.dim(), (q - 1) * x + y + (q - 1) * z, "{}", f.name);
            assert!(t.shift().pow(q as u64).is_zero());
            let u = t.module.action(t.u_pow(1));
            assert!(u.pow(q as u64).is_identity());
        }
    }
}

#[test]
fn invalid_twists_are_rejected() {
    let s = socle_c2();
    assert!(matches!(twisted_induction(&s, 6, Prime::new(2).unwrap()), Err(Error::NotPowerOfP { q: 6, p: 2 })));
    assert!(matches!(twisted_induction(&s, 3, Prime::new(3).unwrap()), Err(Error::PrimeMismatch(..))));
    let bad = twistmod::harness::fixtures::corrupted_sequence().unwrap();
    assert!(matches!(twisted_induction(&bad, 2, Prime::new(2).unwrap()), Err(Error::NotExact(_))));
}

fn perturbed(t: &TwistModule) -> Vec<ThetaBlocks> {
    let Some(fac) = solve_factorization(t).unwrap() else { return Vec::new() };
    let mut all = vec![fac.particular.clone()];
    let mut acc = fac.particular.clone();
    for d in &fac.perturbations {
        all.push(fac.particular.add(d));
        acc = acc.add(d);
    }
    all.push(acc);
    all
}

#[test]
fn relations_hold_for_every_solution() {
    for f in fixture_sequences().unwrap().into_iter().filter(|f| f.split) {
        let p = f.seq.x().prime();
        for (_, q) in valid_pairs().into_iter().filter(|(pp, _)| *pp == p.value() as u64) {
            let t = twisted_induction(&f.seq, q, p).unwrap();
            let sols = perturbed(&t);
            assert!(!sols.is_empty(), "{}", f.name);
            for blocks in &sols {
                let r = check_relations(blocks, &t);
                assert!(r.passed(), "{} q={q}\n{r}", f.name);
                let s = extract_splitting(blocks, &t).unwrap();
                assert!((s.matrix() * f.seq.d1.matrix()).is_identity());
            }
        }
    }
}

#[test]
fn proposition_holds_on_fixtures() {
    for f in fixture_sequences().unwrap() {
        let p = f.seq.x().prime();
        for (_, q) in valid_pairs().into_iter().filter(|(pp, _)| *pp == p.value() as u64) {
            let t = twisted_induction(&f.seq, q, p).unwrap();
            let split = is_split_mono(&f.seq.d1).unwrap().is_split();
            let v = twist_projectivity(&t).unwrap();
            assert_eq!(v.projective, split, "{} q={q}", f.name);
            assert_eq!(solve_factorization(&t).unwrap().is_some(), split, "{} q={q}", f.name);
            if v.projective {
                assert!(v.verify_relative(&t.module, &t.h_embedding));
            }
        }
    }
}

/// Whether `θ_{r,s} = Σ_i C(k,i) θ_{r-k+i,s-k}` holds without alternating signs.
fn unsigned_formula_holds(blocks: &ThetaBlocks, t: &TwistModule) -> bool {
    let p = t.module.prime();
    let q = t.q() as isize;
    let dx = t.layout.x_dim;
    for s in 1..t.q() {
        for k in 0..s {
            for r in 1..=q {
                let mut sum = Matrix::zeros(p, dx, dx);
                let mut c = 1u64;
                for i in 0..=k {
                    sum.add_scaled((c % p.value() as u64) as u32, &blocks.block(r - k as isize + i as isize, s - k));
                    c = c * (k - i) as u64 / (i + 1) as u64;
                }
                if blocks.block(r, s) != sum {
                    return false;
                }
            }
        }
    }
    true
}

#[test]
fn induction_formula_needs_alternating_signs_in_odd_characteristic() {
    let p3: Vec<_> =
        fixture_sequences().unwrap().into_iter().filter(|f| f.split && f.seq.x().prime().value() == 3).collect();
    assert!(!p3.is_empty());
    for f in p3 {
        let t = twisted_induction(&f.seq, 3, f.seq.x().prime()).unwrap();
        let fac = solve_factorization(&t).unwrap().unwrap();
        assert!(check_relations(&fac.particular, &t).passed());
        assert!(!unsigned_formula_holds(&fac.particular, &t), "{}", f.name);
    }
    // in characteristic 2 the two forms coincide
    for f in fixture_sequences().unwrap().into_iter().filter(|f| f.split && f.seq.x().prime().value() == 2) {
        let t = twisted_induction(&f.seq, 2, f.seq.x().prime()).unwrap();
        let fac = solve_factorization(&t).unwrap().unwrap();
        assert!(unsigned_formula_holds(&fac.particular, &t), "{}", f.name);
    }
}

#[test]
fn binomial_examples() {
    let p2 = Prime::new(2).unwrap();
    let p3 = Prime::new(3).unwrap();
    for (q, p) in [(2, p2), (4, p2), (8, p2), (3, p3), (9, p3), (5, Prime::new(5).unwrap())] {
        assert!(binomial_identity_check(q, p).passed(), "q={q}");
        assert!(freshman_check(q, p).passed(), "q={q}");
    }
    let r = binomial_identity_check(6, p2);
    assert!(!r.passed());
    let residues: Vec<&str> = r.checks.iter().map(|c| c.detail.as_str()).collect();
    assert_eq!(residues, ["residue 1", "residue 1", "residue 0", "residue 0", "residue 1", "residue 1"]);
    assert!(!freshman_check(6, p2).passed());
}

/// `(-1)^i C(q-1, i) mod p`, computed with exact integers.
fn residue(q: u64, i: u64, p: u64) -> u64 {
    let mut c: u128 = 1;
    for j in 0..i {
        c = c * (q - 1 - j) as u128 / (j + 1) as u128;
    }
    let c = (c % p as u128) as u64;
    if i.is_multiple_of(2) {
        c
    } else {
        (p - c) % p
    }
}

proptest! {
    #[test]
    fn binomial_check_matches_integer_arithmetic(p in prop::sample::select(vec![2u64, 3, 5, 7]), q in 1u64..40) {
        let pr = Prime::new(p).unwrap();
        let all_one = (0..q).all(|i| residue(q, i, p) == 1);
        prop_assert_eq!(binomial_identity_check(q as usize, pr).passed(), all_one);
        let mut n = q;
        while n % p == 0 { n /= p; }
        prop_assert_eq!(all_one, n == 1);
    }
}
