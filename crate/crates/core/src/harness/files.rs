//! JSON file formats for sequences and twisted modules.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::morph::{EquivariantMap, ShortExactSeq};
use crate::reps::{Module, ModuleFile};
use crate::twist::TwistFile;

/// A map between two named modules of the enclosing file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapFile {
    pub src_ref: String,
    pub dst_ref: String,
    pub matrix: Vec<Vec<u32>>,
}

/// `{"modules": {"X": …, "Y": …, "Z": …}, "d1": {…}, "d2": {…}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SesFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub modules: BTreeMap<String, ModuleFile>,
    pub d1: MapFile,
    pub d2: MapFile,
}

fn map_file(src: &str, dst: &str, m: &Matrix) -> MapFile {
    MapFile { src_ref: src.into(), dst_ref: dst.into(), matrix: m.to_rows() }
}

pub fn ses_to_file(name: Option<&str>, s: &ShortExactSeq) -> SesFile {
    let modules =
        [("X", s.x()), ("Y", s.y()), ("Z", s.z())].into_iter().map(|(k, m)| (k.to_string(), m.to_file())).collect();
    SesFile {
        name: name.map(str::to_string),
        modules,
        d1: map_file("X", "Y", s.d1.matrix()),
        d2: map_file("Y", "Z", s.d2.matrix()),
    }
}

fn load_map(f: &MapFile, modules: &BTreeMap<String, Arc<Module>>) -> Result<EquivariantMap> {
    let get = |r: &str| {
        modules.get(r).cloned().ok_or_else(|| Error::InvalidArgument(format!("unknown module reference {r:?}")))
    };
    let (src, dst) = (get(&f.src_ref)?, get(&f.dst_ref)?);
    let p = src.prime();
    let rows: Vec<Vec<i64>> = f.matrix.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
    let matrix = if rows.is_empty() { Matrix::zeros(p, 0, src.dim()) } else { Matrix::from_rows(p, &rows)? };
    EquivariantMap::new(src, dst, matrix)
}

/// Parses a sequence file. Maps must be equivariant; exactness is left to
/// [`crate::morph::check_ses`] so callers can report which condition fails.
pub fn ses_from_file(f: &SesFile) -> Result<ShortExactSeq> {
    let mut modules = BTreeMap::new();
    for (k, m) in &f.modules {
        modules.insert(k.clone(), Arc::new(Module::from_file(m)?));
    }
    let d1 = load_map(&f.d1, &modules)?;
    let d2 = load_map(&f.d2, &modules)?;
    if d1.dst().as_ref() != d2.src().as_ref() {
        return Err(Error::InvalidArgument("d1 and d2 are not composable".into()));
    }
    Ok(ShortExactSeq { d1, d2 })
}

pub fn load_ses(path: impl AsRef<Path>) -> Result<(SesFile, ShortExactSeq)> {
    let file: SesFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    let s = ses_from_file(&file)?;
    Ok((file, s))
}

pub fn save_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_twist(path: impl AsRef<Path>) -> Result<TwistFile> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}
