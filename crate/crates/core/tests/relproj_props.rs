mod common;

use common::{group_zoo, is_free_p_group, random_module, random_subgroup};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twistmod::groups::{klein_four, subgroups, trivial_subgroup, SubgroupEmbedding};
use twistmod::relproj::{is_rel_projective, is_w_projective, lifting_oracle, vertex};
use twistmod::reps::{induce, regular_module, tensor, trivial_module};

fn contains(big: &SubgroupEmbedding, small: &SubgroupEmbedding) -> bool {
    let e = big.elements();
    small.elements().iter().all(|x| e.contains(x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trace_and_lifting_agree_and_witnesses_verify(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zoo = group_zoo();
        let (_, g, p) = &zoo[seed as usize % zoo.len()];
        let m = random_module(&mut rng, g, *p, 12);
        let h = random_subgroup(&mut rng, g);
        let v = is_rel_projective(&m, &h).unwrap();
        prop_assert_eq!(v.projective, lifting_oracle(&m, &h).unwrap());
        if v.projective {
            prop_assert!(v.verify_relative(&m, &h));
        }
    }

    #[test]
    fn projectivity_is_monotone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zoo = group_zoo();
        let (_, g, p) = &zoo[seed as usize % zoo.len()];
        let m = random_module(&mut rng, g, *p, 10);
        let subs = subgroups(g).unwrap();
        let verdicts: Vec<bool> = subs.iter().map(|h| is_rel_projective(&m, h).unwrap().projective).collect();
        for (a, va) in subs.iter().zip(&verdicts) {
            for (b, vb) in subs.iter().zip(&verdicts) {
                if *va && contains(b, a) {
                    prop_assert!(*vb);
                }
            }
        }
        prop_assert!(verdicts[subs.iter().position(|h| h.sub().order() == g.order()).unwrap()]);
    }

    #[test]
    fn tensor_absorption(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zoo = group_zoo();
        let (_, g, p) = &zoo[seed as usize % zoo.len()];
        let w = random_module(&mut rng, g, *p, 4);
        let n = random_module(&mut rng, g, *p, 4);
        let v = is_w_projective(&tensor(&w, &n).unwrap(), &w).unwrap();
        prop_assert!(v.projective);
        prop_assert!(v.verify_w(&tensor(&w, &n).unwrap(), &w));
    }

    #[test]
    fn trivial_subgroup_projectivity_is_freeness_for_p_groups(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zoo: Vec<_> = group_zoo().into_iter().filter(|(_, g, p)| g.is_p_group(p.value())).collect();
        let (_, g, p) = &zoo[seed as usize % zoo.len()];
        let m = random_module(&mut rng, g, *p, 16);
        let v = is_rel_projective(&m, &trivial_subgroup(g)).unwrap();
        prop_assert_eq!(v.projective, is_free_p_group(&m));
    }
}

#[test]
fn vertex_examples() {
    let p = twistmod::Prime::new(2).unwrap();
    let v4 = klein_four().unwrap();
    let v = vertex(&regular_module(&v4, p)).unwrap();
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].sub().order(), 1);
    let v = vertex(&trivial_module(&v4, p)).unwrap();
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].sub().order(), 4);
    for h in subgroups(&v4).unwrap() {
        let m = induce(&h, &trivial_module(h.sub(), p)).unwrap();
        let vs = vertex(&m).unwrap();
        assert!(!vs.is_empty());
        assert!(vs.iter().all(|q| contains(&h, q)));
    }
}

#[test]
fn regular_modules_are_projective_everywhere() {
    for (name, g, p) in group_zoo() {
        let kg = regular_module(&g, p);
        for h in subgroups(&g).unwrap() {
            assert!(is_rel_projective(&kg, &h).unwrap().projective, "{name}");
        }
    }
}

#[test]
fn trivial_module_of_a_p_group_needs_the_whole_group() {
    for (name, g, p) in group_zoo().into_iter().filter(|(_, g, p)| g.is_p_group(p.value())) {
        let k = trivial_module(&g, p);
        for h in subgroups(&g).unwrap() {
            assert_eq!(is_rel_projective(&k, &h).unwrap().projective, h.sub().order() == g.order(), "{name}");
        }
    }
}
