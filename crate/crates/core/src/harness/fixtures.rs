//! Built-in fixture sequences and modules, and their on-disk copies.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::error::Result;
use crate::groups::{cyclic, klein_four, Group};
use crate::harness::files::ses_to_file;
use crate::linalg::{Matrix, Prime};
use crate::morph::{direct_sum_ses, EquivariantMap, ShortExactSeq};
use crate::reps::{quotient, regular_module, submodule, trivial_module, Module};
use crate::telescope::{jordan_family_cp, string_family_v4, telescope_stage};

/// A named sequence and whether its first map splits, known from theory.
#[derive(Clone, Debug)]
pub struct FixtureSes {
    pub name: String,
    pub seq: ShortExactSeq,
    pub split: bool,
}

/// Completes an injective map to `0 → X → Y → Y/X → 0`.
pub fn ses_from_inclusion(d1: EquivariantMap) -> Result<ShortExactSeq> {
    let q = quotient(d1.dst(), d1.matrix())?;
    let z = Arc::new(q.module);
    let d2 = EquivariantMap::new(d1.dst().clone(), z, q.projection)?;
    ShortExactSeq::new(d1, d2)
}

/// `0 → k → kG → kG/k → 0` with `k` the span of the sum of all group elements.
fn socle_sequence(g: &Arc<Group>, p: Prime) -> Result<ShortExactSeq> {
    let k = Arc::new(trivial_module(g, p));
    let r = Arc::new(regular_module(g, p));
    let inc = Matrix::from_vec(p, g.order(), 1, vec![1; g.order()])?;
    ses_from_inclusion(EquivariantMap::new(k, r, inc)?)
}

/// `0 → I → kG → k → 0` with `I` the augmentation ideal.
fn augmentation_sequence(g: &Arc<Group>, p: Prime) -> Result<ShortExactSeq> {
    let r = regular_module(g, p);
    let n = g.order();
    let e = g.identity();
    let gens: Vec<Vec<u32>> = (0..n)
        .filter(|&x| x != e)
        .map(|x| {
            let mut v = vec![0u32; n];
            v[x] = 1;
            v[e] = p.neg(1);
            v
        })
        .collect();
    let sub = submodule(&r, &gens)?;
    let r = Arc::new(r);
    let d1 = EquivariantMap::new(Arc::new(sub.module), r.clone(), sub.inclusion)?;
    let aug = Matrix::from_vec(p, 1, n, vec![1; n])?;
    let d2 = EquivariantMap::new(r, Arc::new(trivial_module(g, p)), aug)?;
    ShortExactSeq::new(d1, d2)
}

fn tensored(w: &Module, s: &ShortExactSeq) -> Result<ShortExactSeq> {
    crate::morph::tensor_ses(s, w)
}

/// The fixture set: eight split and eight non-split sequences over `C2`, `V4` and `C3`.
pub fn fixture_sequences() -> Result<Vec<FixtureSes>> {
    let two = Prime::new(2)?;
    let three = Prime::new(3)?;
    let c2 = cyclic(2)?;
    let c3 = cyclic(3)?;
    let v4 = klein_four()?;
    let k2 = Arc::new(trivial_module(&c2, two));
    let r2 = Arc::new(regular_module(&c2, two));
    let strings = string_family_v4(2)?;
    let jordan = jordan_family_cp(three, 3)?;
    let kv4 = Arc::new(trivial_module(&v4, two));
    let rv4 = regular_module(&v4, two);
    let k3 = Arc::new(trivial_module(&c3, three));
    let r3 = Arc::new(regular_module(&c3, three));
    let socle_c2 = socle_sequence(&c2, two)?;
    let iota_v4 = ses_from_inclusion(strings.inclusion(1).clone())?;
    let mut out = Vec::new();
    let mut push = |name: &str, seq: ShortExactSeq, split: bool| {
        out.push(FixtureSes { name: name.into(), seq, split });
    };
    push("socle_c2", socle_c2.clone(), false);
    push("canonical_k_k_c2", ShortExactSeq::canonical(&k2, &k2)?, true);
    push("canonical_kc2_k_c2", ShortExactSeq::canonical(&r2, &k2)?, true);
    push("free_socle_c2", tensored(&r2, &socle_c2)?, true);
    push("socle_plus_split_c2", direct_sum_ses(&socle_c2, &ShortExactSeq::canonical(&k2, &k2)?)?, false);
    push("iota1_v4", iota_v4.clone(), false);
    push("socle_v4", socle_sequence(&v4, two)?, false);
    push("augmentation_v4", augmentation_sequence(&v4, two)?, false);
    push("stage1_v4", telescope_stage(&strings, 1)?, true);
    push("canonical_m1_k_v4", ShortExactSeq::canonical(strings.module(1), &kv4)?, true);
    push("free_iota1_v4", tensored(&rv4, &iota_v4)?, true);
    push("jordan_iota1_c3", ses_from_inclusion(jordan.inclusion(1).clone())?, false);
    push("socle_c3", socle_sequence(&c3, three)?, false);
    push("augmentation_c3", augmentation_sequence(&c3, three)?, false);
    push("canonical_j2_k_c3", ShortExactSeq::canonical(jordan.module(2), &k3)?, true);
    push("canonical_kc3_j2_c3", ShortExactSeq::canonical(&r3, jordan.module(2))?, true);
    Ok(out)
}

/// A sequence whose second map is equivariant but `d2 ∘ d1 ≠ 0`.
pub fn corrupted_sequence() -> Result<ShortExactSeq> {
    let two = Prime::new(2)?;
    let c2 = cyclic(2)?;
    let k = Arc::new(trivial_module(&c2, two));
    let good = ShortExactSeq::canonical(&k, &k)?;
    let bad = Matrix::from_rows(two, &[vec![1, 1]])?;
    let d2 = EquivariantMap::new(good.y().clone(), k, bad)?;
    Ok(ShortExactSeq { d1: good.d1, d2 })
}

/// Named modules shipped as standalone files.
pub fn fixture_modules() -> Result<Vec<(String, Module)>> {
    let two = Prime::new(2)?;
    let three = Prime::new(3)?;
    let c2 = cyclic(2)?;
    let c3 = cyclic(3)?;
    let v4 = klein_four()?;
    let mut out = vec![
        ("trivial_c2".to_string(), trivial_module(&c2, two)),
        ("regular_c2".to_string(), regular_module(&c2, two)),
        ("trivial_v4".to_string(), trivial_module(&v4, two)),
        ("regular_v4".to_string(), regular_module(&v4, two)),
        ("regular_c3".to_string(), regular_module(&c3, three)),
    ];
    for (n, m) in string_family_v4(3)?.modules.iter().enumerate() {
        out.push((format!("string{}_v4", n + 1), m.as_ref().clone()));
    }
    for (n, m) in jordan_family_cp(three, 3)?.modules.iter().enumerate() {
        out.push((format!("jordan{}_c3", n + 1), m.as_ref().clone()));
    }
    Ok(out)
}

fn render<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Every fixture file as `(relative path, contents)`.
pub fn fixture_files() -> Result<Vec<(String, String)>> {
    let mut files = Vec::new();
    for f in fixture_sequences()? {
        files.push((format!("{}.json", f.name), render(&ses_to_file(Some(&f.name), &f.seq))?));
    }
    files.push((
        "corrupt/canonical_k_k_c2_bad.json".to_string(),
        render(&ses_to_file(Some("canonical_k_k_c2_bad"), &corrupted_sequence()?))?,
    ));
    for (name, m) in fixture_modules()? {
        files.push((format!("modules/{name}.json"), render(&m.to_file())?));
    }
    Ok(files)
}

/// Writes all fixture files under `dir`.
pub fn write_fixtures(dir: &Path) -> Result<usize> {
    let files = fixture_files()?;
    for (rel, text) in &files {
        let path = dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, text)?;
    }
    Ok(files.len())
}

/// Relative paths whose contents under `dir` differ from a fresh regeneration.
pub fn diff_fixtures(dir: &Path) -> Result<Vec<String>> {
    Ok(fixture_files()?
        .into_iter()
        .filter(|(rel, text)| fs::read_to_string(dir.join(rel)).map_or(true, |old| &old != text))
        .map(|(rel, _)| rel)
        .collect())
}
