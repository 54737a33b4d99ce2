//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the target fails if any does.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{group_zoo, random_module, random_subgroup};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twistmod::groups::{
    cyclic, dihedral, direct_product, klein_four, subgroup_generated_by, trivial_subgroup, SubgroupEmbedding,
};
use twistmod::harness::fixtures::fixture_sequences;
use twistmod::harness::run::{verify_paper, Family, Scenario};
use twistmod::linalg::Prime;
use twistmod::morph::{is_isomorphic, is_split_mono, Isomorphism};
use twistmod::relproj::{is_rel_projective, is_w_projective, lifting_oracle, vertex};
use twistmod::reps::{induce, regular_module, restrict, submodule, tensor, trivial_module, Module};
use twistmod::telescope::{
    inclusions_non_split, jordan_family_cp, stage_twist_projective, string_family_v4, telescope_stage, tensor_family,
};
use twistmod::twist::{
    binomial_identity_check, check_relations, extract_splitting, solve_factorization, twist_projectivity,
    twisted_induction,
};

type Outcome = Result<String, String>;

/// Name, runtime budget in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: twistmod::Error) -> String {
    e.to_string()
}

const PAIRS: [(u64, usize); 3] = [(2, 2), (2, 4), (3, 3)];

fn proposition_equivalence() -> Outcome {
    let fixtures = fixture_sequences().map_err(err)?;
    let split = fixtures.iter().filter(|f| f.split).count();
    ensure(fixtures.len() >= 12 && split >= 4 && fixtures.len() - split >= 4, || {
        format!("fixture set too small: {} sequences, {split} split", fixtures.len())
    })?;
    let mut orders: Vec<usize> = fixtures.iter().map(|f| f.seq.x().group().order()).collect();
    orders.sort();
    orders.dedup();
    let mut cases = 0;
    for f in &fixtures {
        let p = f.seq.x().prime();
        for (_, q) in PAIRS.iter().filter(|(pp, _)| *pp == p.value() as u64) {
            let is_split = is_split_mono(&f.seq.d1).map_err(err)?.is_split();
            let t = twisted_induction(&f.seq, *q, p).map_err(err)?;
            let v = twist_projectivity(&t).map_err(err)?;
            let fac = solve_factorization(&t).map_err(err)?.is_some();
            ensure(is_split == f.split, || format!("{}: split verdict {is_split} against label {}", f.name, f.split))?;
            ensure(v.projective == is_split && fac == is_split, || {
                format!("{} q={q}: split {is_split}, projective {}, factorization {fac}", f.name, v.projective)
            })?;
            ensure(!v.projective || v.verify_relative(&t.module, &t.h_embedding), || {
                format!("{} q={q}: trace witness does not verify", f.name)
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} cases over {} sequences ({split} split), groups of orders {orders:?}", fixtures.len()))
}

fn splitting_extraction() -> Outcome {
    let mut solutions = 0;
    for f in fixture_sequences().map_err(err)?.iter().filter(|f| f.split) {
        let p = f.seq.x().prime();
        for (_, q) in PAIRS.iter().filter(|(pp, _)| *pp == p.value() as u64) {
            let t = twisted_induction(&f.seq, *q, p).map_err(err)?;
            let fac = solve_factorization(&t).map_err(err)?.ok_or_else(|| format!("{} q={q}: infeasible", f.name))?;
            let mut all = vec![fac.particular.clone()];
            all.extend(fac.perturbations.iter().map(|d| fac.particular.add(d)));
            for blocks in &all {
                let s = extract_splitting(blocks, &t).map_err(err)?;
                ensure((s.matrix() * f.seq.d1.matrix()).is_identity(), || format!("{} q={q}: s d1 != 1", f.name))?;
                let r = check_relations(blocks, &t);
                ensure(r.passed(), || format!("{} q={q}:\n{r}", f.name))?;
                solutions += 1;
            }
        }
    }
    Ok(format!("{solutions} solutions checked, induction formula with alternating signs"))
}

fn binomial_identity() -> Outcome {
    let p = |n| Prime::new(n).unwrap();
    for (q, pr) in [(2, 2), (4, 2), (8, 2), (3, 3), (9, 3), (5, 5)] {
        ensure(binomial_identity_check(q, p(pr)).passed(), || format!("q={q}, p={pr} failed"))?;
    }
    ensure(!binomial_identity_check(6, p(2)).passed(), || "q=6, p=2 passed".into())?;
    Ok("6 positive cases, q=6 p=2 rejected".into())
}

fn telescope_stages() -> Outcome {
    let p = Prime::new(2).unwrap();
    let family = string_family_v4(6).map_err(err)?;
    let mut largest = 0;
    for q in [2, 4] {
        for n in 1..=5 {
            let s = telescope_stage(&family, n).map_err(err)?;
            let split = is_split_mono(&s.d1).map_err(err)?;
            let w = split.witness().ok_or_else(|| format!("stage {n} does not split"))?;
            ensure((w.matrix() * s.d1.matrix()).is_identity(), || format!("stage {n}: bad section"))?;
            let o = stage_twist_projective(&family, n, q, p).map_err(err)?;
            ensure(o.report.passed(), || format!("N={n} q={q}:\n{}", o.report))?;
            largest = largest.max(o.twist_dim);
        }
    }
    let r = inclusions_non_split(&family).map_err(err)?;
    ensure(r.passed(), || format!("{r}"))?;
    Ok(format!("N = 1..5, q = 2, 4, largest twisted dim {largest}; iota_1..iota_5 not split"))
}

fn projection_formula() -> Outcome {
    let p = Prime::new(2).unwrap();
    let q = 2;
    let family = string_family_v4(4).map_err(err)?;
    let h = klein_four().map_err(err)?;
    let (_, h_emb, _) = direct_product(&h, &cyclic(q).map_err(err)?).map_err(err)?;
    let w = induce(&h_emb, &trivial_module(&h, p)).map_err(err)?;
    let v = restrict(&h_emb, &w).map_err(err)?;
    let vw = vertex(&w).map_err(err)?;
    ensure(vw.iter().all(|x| x.sub().order() <= h.order()), || "W has a vertex larger than H".into())?;
    for n in 1..=3 {
        let m = family.module(n);
        let left = Arc::new(induce(&h_emb, &tensor(&v, m).map_err(err)?).map_err(err)?);
        let right = Arc::new(tensor(&w, &induce(&h_emb, m).map_err(err)?).map_err(err)?);
        match is_isomorphic(&left, &right, 64, n as u64).map_err(err)? {
            Isomorphism::Yes(phi) => ensure(phi.is_equivariant() && phi.matrix().inverse().is_some(), || {
                format!("n={n}: witness fails re-verification")
            })?,
            other => return Err(format!("n={n}: {other:?}")),
        }
    }
    let tf = tensor_family(&v, &family).map_err(err)?;
    for n in 1..=3 {
        let t = twisted_induction(&telescope_stage(&tf, n).map_err(err)?, q, p).map_err(err)?;
        let w_t = w.with_group(t.group().clone()).map_err(err)?;
        let verdict = is_w_projective(&t.module, &w_t).map_err(err)?;
        ensure(verdict.projective && verdict.verify_w(&t.module, &w_t), || {
            format!("tensor stage {n} not W-projective")
        })?;
    }
    Ok("isomorphisms for n = 1..3, tensored stages 1..3 W-projective".into())
}

fn oracle_cross_validation() -> Outcome {
    let zoo = group_zoo();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut instances, mut rel_pos, mut free_pos) = (0, 0, 0);
    for round in 0..4 {
        for (name, g, p) in &zoo {
            let m = random_module(&mut rng, g, *p, 24);
            let h = random_subgroup(&mut rng, g);
            let tag = || format!("{name} round {round}, dim {}, |H| = {}", m.dim(), h.sub().order());
            let rel = is_rel_projective(&m, &h).map_err(err)?;
            let lift = lifting_oracle(&m, &h).map_err(err)?;
            ensure(rel.projective == lift, || format!("{}: trace {} vs lifting {lift}", tag(), rel.projective))?;
            let perm = induce(&h, &trivial_module(h.sub(), *p)).map_err(err)?;
            let via_w = is_w_projective(&m, &perm).map_err(err)?;
            ensure(via_w.projective == rel.projective, || {
                format!("{}: Ind k-projective {} vs H-projective {}", tag(), via_w.projective, rel.projective)
            })?;
            let free = is_rel_projective(&m, &trivial_subgroup(g)).map_err(err)?;
            let via_kg = is_w_projective(&m, &regular_module(g, *p)).map_err(err)?;
            ensure(via_kg.projective == free.projective, || {
                format!("{}: kG-projective {} vs projective {}", tag(), via_kg.projective, free.projective)
            })?;
            instances += 1;
            rel_pos += rel.projective as usize;
            free_pos += free.projective as usize;
        }
    }
    ensure(instances >= 50, || format!("only {instances} instances"))?;
    Ok(format!("{instances} instances, {rel_pos} H-projective, {free_pos} projective"))
}

fn vertex_property() -> Outcome {
    let p2 = Prime::new(2).unwrap();
    let p3 = Prime::new(3).unwrap();
    let v4 = klein_four().map_err(err)?;
    let d8 = dihedral(4).map_err(err)?;
    let s3 = dihedral(3).map_err(err)?;
    let c2c4 = direct_product(&cyclic(2).map_err(err)?, &cyclic(4).map_err(err)?).map_err(err)?.0;
    let perm = |h: &SubgroupEmbedding, p| induce(h, &trivial_module(h.sub(), p)).unwrap();
    let non_central_involution = (0..d8.order())
        .find(|&x| d8.element_order(x) == 2 && (0..d8.order()).any(|y| d8.mul(x, y) != d8.mul(y, x)))
        .unwrap();
    let jordan2 = jordan_family_cp(p3, 2).map_err(err)?.module(2).as_ref().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let kc2c4 = regular_module(&c2c4, p2);
    let cyc = submodule(&kc2c4, &[common::random_vector(&mut rng, p2, 8)]).map_err(err)?.module;
    let ws: Vec<(&str, Module)> = vec![
        ("kV4", regular_module(&v4, p2)),
        ("k_V4", trivial_module(&v4, p2)),
        ("Ind_C2^V4 k", perm(&subgroup_generated_by(&v4, &[1]).map_err(err)?, p2)),
        ("string_2", string_family_v4(2).map_err(err)?.module(2).as_ref().clone()),
        ("Ind_C2^D8 k", perm(&subgroup_generated_by(&d8, &[non_central_involution]).map_err(err)?, p2)),
        ("Ind_C3^S3 k", perm(&subgroup_generated_by(&s3, &[s3.generators()[0]]).map_err(err)?, p2)),
        ("J_2 over C3", jordan2),
        ("cyclic submodule of k[C2xC4]", cyc),
    ];
    let (mut tested, mut positive) = (0, 0);
    for (name, w) in &ws {
        let g = w.group();
        let vw = vertex(w).map_err(err)?;
        let mut candidates: Vec<Module> = (0..6).map(|_| random_module(&mut rng, g, w.prime(), 12)).collect();
        for _ in 0..3 {
            let n = random_module(&mut rng, g, w.prime(), 3);
            candidates.push(tensor(w, &n).map_err(err)?);
        }
        for m in &candidates {
            let verdict = is_w_projective(m, w).map_err(err)?;
            tested += 1;
            if !verdict.projective {
                continue;
            }
            positive += 1;
            ensure(verdict.verify_w(m, w), || format!("{name}: witness fails re-verification"))?;
            for q in &vw {
                ensure(is_rel_projective(m, q).map_err(err)?.projective, || {
                    format!(
                        "{name}: w-projective module of dim {} not projective relative to a vertex of order {}",
                        m.dim(),
                        q.sub().order()
                    )
                })?;
            }
        }
    }
    ensure(positive > 0, || "no w-projective candidates".into())?;
    Ok(format!("{} modules w, {tested} candidates, {positive} w-projective", ws.len()))
}

fn strip_timing(json: &str) -> String {
    let mut v: serde_json::Value = serde_json::from_str(json).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    serde_json::to_string(&v).unwrap()
}

fn determinism() -> Outcome {
    let scenario = Scenario {
        name: "determinism".into(),
        p: Prime::new(2).unwrap(),
        qs: vec![2, 4],
        family: Family::V4String,
        stages: 3,
        seed: 7,
        fixtures: None,
    };
    let a = verify_paper(&scenario).map_err(err)?;
    let b = verify_paper(&scenario).map_err(err)?;
    ensure(a.stable_json().map_err(err)? == b.stable_json().map_err(err)?, || "in-process reports differ".into())?;
    ensure(a.passed, || format!("run failed:\n{a}"))?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("r{i}.json"));
        let o = Command::new(env!("CARGO_BIN_EXE_twistmod"))
            .args(["verify-paper", "--p", "2", "--q", "2,4", "--family", "v4-string", "--stages", "3", "--seed", "7"])
            .arg("--json")
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(o.status.code() == Some(0), || format!("exit {:?}", o.status.code()))?;
        outputs.push(strip_timing(&read(&path)?));
    }
    ensure(outputs[0] == outputs[1], || "CLI reports differ outside timing".into())?;
    Ok(format!("{} records, identical across runs", a.records.len()))
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| e.to_string())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("proposition equivalence", 30, proposition_equivalence),
        ("splitting extraction and relations", 10, splitting_extraction),
        ("binomial identity", 1, binomial_identity),
        ("telescope stages", 60, telescope_stages),
        ("projection formula and w-projective stages", 60, projection_formula),
        ("oracle cross-validation", 120, oracle_cross_validation),
        ("vertex property", 60, vertex_property),
        ("determinism", 120, determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > Duration::from_secs(*budget) => {
                Err(format!("{detail}; took {:.1} s, budget {budget} s", elapsed.as_secs_f64()))
            }
            other => other,
        };
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name} ({:.2} s): {detail}", i + 1, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({:.2} s): {why}", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
