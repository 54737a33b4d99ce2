//! Chains of inclusions `m_1 ↪ m_2 ↪ …` and the finite stages of their telescope.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::groups::{cyclic, klein_four};
use crate::hom::{BlockHom, GenAction};
use crate::linalg::{rank, Matrix, Prime};
use crate::morph::{check_ses, is_split_mono, EquivariantMap, ShortExactSeq, Split};
use crate::relproj::Witness;
use crate::report::Report;
use crate::reps::{direct_sum_all, Module};
use crate::twist::{twist_projectivity, twisted_induction};

#[derive(Clone, Debug)]
pub struct InclusionFamily {
    pub label: String,
    pub modules: Vec<Arc<Module>>,
    /// `inclusions[i]` maps `modules[i]` into `modules[i + 1]`.
    pub inclusions: Vec<EquivariantMap>,
}

impl InclusionFamily {
    pub fn new(label: impl Into<String>, modules: Vec<Arc<Module>>, inclusions: Vec<EquivariantMap>) -> Result<Self> {
        if modules.is_empty() || inclusions.len() + 1 != modules.len() {
            return Err(Error::InvalidArgument("need K modules and K - 1 inclusions".into()));
        }
        for (i, f) in inclusions.iter().enumerate() {
            if f.src().as_ref() != modules[i].as_ref() || f.dst().as_ref() != modules[i + 1].as_ref() {
                return Err(Error::InvalidArgument(format!("inclusion {} has the wrong ends", i + 1)));
            }
            if !f.is_equivariant() || !f.is_injective() {
                return Err(Error::InvalidArgument(format!("inclusion {} is not an injective module map", i + 1)));
            }
        }
        Ok(InclusionFamily { label: label.into(), modules, inclusions })
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    /// `m_n`, 1-based.
    pub fn module(&self, n: usize) -> &Arc<Module> {
        &self.modules[n - 1]
    }

    /// `ι_n: m_n → m_{n+1}`, 1-based.
    pub fn inclusion(&self, n: usize) -> &EquivariantMap {
        &self.inclusions[n - 1]
    }

    /// Matrix of the composite `m_n → m_k` for `n ≤ k`.
    fn composite(&self, n: usize, k: usize) -> Matrix {
        let m = self.module(n);
        let mut acc = Matrix::identity(m.prime(), m.dim());
        for j in n..k {
            acc = self.inclusion(j).matrix() * &acc;
        }
        acc
    }
}

/// String modules over the Klein four group at `p = 2`.
///
/// `m_n` has basis `b_0, a_1, b_1, …, a_n, b_n` (so `b_i` is coordinate `2i`
/// and `a_i` is `2i - 1`) with `(g1 - 1)a_i = b_{i-1}`, `(g2 - 1)a_i = b_i`,
/// and both generators fixing every `b_i`.
pub fn string_family_v4(k: usize) -> Result<InclusionFamily> {
    if k == 0 {
        return Err(Error::InvalidArgument("family needs at least one module".into()));
    }
    let p = Prime::new(2)?;
    let h = klein_four()?;
    let modules: Vec<Arc<Module>> = (1..=k)
        .map(|n| {
            let dim = 2 * n + 1;
            let mut g1 = Matrix::identity(p, dim);
            let mut g2 = Matrix::identity(p, dim);
            for i in 1..=n {
                g1.set(2 * (i - 1), 2 * i - 1, 1);
                g2.set(2 * i, 2 * i - 1, 1);
            }
            Module::from_generators(h.clone(), p, dim, &[g1, g2]).map(Arc::new)
        })
        .collect::<Result<_>>()?;
    let inclusions = (1..k)
        .map(|n| {
            let (a, b) = (&modules[n - 1], &modules[n]);
            let mut m = Matrix::zeros(p, b.dim(), a.dim());
            for i in 0..a.dim() {
                m.set(i, i, 1);
            }
            EquivariantMap::new(a.clone(), b.clone(), m)
        })
        .collect::<Result<_>>()?;
    InclusionFamily::new("v4-string", modules, inclusions)
}

/// `m_n = k[x]/(x^n)` over `C_p` with the generator acting as `1 + x`, and
/// `ι_n` multiplication by `x`.
pub fn jordan_family_cp(p: Prime, k: usize) -> Result<InclusionFamily> {
    let pv = p.value() as usize;
    if k == 0 || k > pv {
        return Err(Error::InvalidArgument(format!("need 1 <= K <= p, got K = {k}, p = {pv}")));
    }
    let g = cyclic(pv)?;
    let modules: Vec<Arc<Module>> = (1..=k)
        .map(|n| {
            let mut u = Matrix::identity(p, n);
            for i in 0..n - 1 {
                u.set(i + 1, i, 1);
            }
            Module::from_generators(g.clone(), p, n, &[u]).map(Arc::new)
        })
        .collect::<Result<_>>()?;
    let inclusions = (1..k)
        .map(|n| {
            let (a, b) = (&modules[n - 1], &modules[n]);
            let mut m = Matrix::zeros(p, n + 1, n);
            for i in 0..n {
                m.set(i + 1, i, 1);
            }
            EquivariantMap::new(a.clone(), b.clone(), m)
        })
        .collect::<Result<_>>()?;
    InclusionFamily::new("jordan", modules, inclusions)
}

/// `V ⊗ m_n` with maps `id_V ⊗ ι_n`.
pub fn tensor_family(v: &Module, f: &InclusionFamily) -> Result<InclusionFamily> {
    let inclusions: Vec<EquivariantMap> = f.inclusions.iter().map(|i| i.tensor_left(v)).collect::<Result<_>>()?;
    let mut modules: Vec<Arc<Module>> = Vec::with_capacity(f.len());
    if inclusions.is_empty() {
        modules.push(Arc::new(crate::reps::tensor(v, &f.modules[0])?));
    } else {
        modules.push(inclusions[0].src().clone());
        modules.extend(inclusions.iter().map(|i| i.dst().clone()));
    }
    // rebuild the maps so consecutive inclusions share their module
    let inclusions = inclusions
        .iter()
        .enumerate()
        .map(|(i, f)| EquivariantMap::new(modules[i].clone(), modules[i + 1].clone(), f.matrix().clone()))
        .collect::<Result<_>>()?;
    InclusionFamily::new(format!("{}x{}", v.dim(), f.label), modules, inclusions)
}

/// `0 → ⊕_{n≤N} m_n → ⊕_{n≤N+1} m_n → m_{N+1} → 0`, the first map sending
/// `x ∈ m_n` to `(x, -ι_n x)` and the second summing composite inclusions.
pub fn telescope_stage(f: &InclusionFamily, n: usize) -> Result<ShortExactSeq> {
    if n == 0 || n + 1 > f.len() {
        return Err(Error::InvalidArgument(format!("stage {n} needs 1 <= N < {}", f.len())));
    }
    let p = f.modules[0].prime();
    let parts: Vec<&Module> = f.modules[..n].iter().map(|m| m.as_ref()).collect();
    let x = Arc::new(direct_sum_all(&parts)?);
    let parts: Vec<&Module> = f.modules[..=n].iter().map(|m| m.as_ref()).collect();
    let y = Arc::new(direct_sum_all(&parts)?);
    let z = f.module(n + 1).clone();
    let offsets: Vec<usize> = f.modules[..=n]
        .iter()
        .scan(0, |acc, m| {
            let o = *acc;
            *acc += m.dim();
            Some(o)
        })
        .collect();
    let mut d1 = Matrix::zeros(p, y.dim(), x.dim());
    for j in 1..=n {
        let id = Matrix::identity(p, f.module(j).dim());
        d1.set_block(offsets[j - 1], offsets[j - 1], &id);
        d1.set_block(offsets[j], offsets[j - 1], &f.inclusion(j).matrix().neg());
    }
    let mut d2 = Matrix::zeros(p, z.dim(), y.dim());
    for j in 1..=n + 1 {
        d2.set_block(0, offsets[j - 1], &f.composite(j, n + 1));
    }
    ShortExactSeq::new(EquivariantMap::new(x, y.clone(), d1)?, EquivariantMap::new(y, z, d2)?)
}

/// Hex SHA-256 of a matrix's shape and entries.
pub fn matrix_checksum(m: &Matrix) -> String {
    let mut h = Sha256::new();
    h.update((m.rows() as u64).to_le_bytes());
    h.update((m.cols() as u64).to_le_bytes());
    for &x in m.entries() {
        h.update(x.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Everything measured for one telescope stage.
#[derive(Clone, Debug, Serialize)]
pub struct StageOutcome {
    pub family: String,
    pub stage: usize,
    pub q: usize,
    pub x_dim: usize,
    pub y_dim: usize,
    pub z_dim: usize,
    pub twist_dim: usize,
    pub split_checksum: Option<String>,
    pub trace_checksum: Option<String>,
    pub report: Report,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Builds stage `N`, checks it splits, twists it by `C_q` and checks
/// projectivity relative to `H`.
pub fn stage_twist_projective(f: &InclusionFamily, n: usize, q: usize, p: Prime) -> Result<StageOutcome> {
    let start = Instant::now();
    let s = telescope_stage(f, n)?;
    let mut report = Report::new();
    report.record("stage exact", check_ses(&s).passed(), "");
    let split = is_split_mono(&s.d1)?;
    let split_checksum = split.witness().map(|w| matrix_checksum(w.matrix()));
    report.record("stage splits", split.is_split(), "");
    let t = twisted_induction(&s, q, p)?;
    let verdict = twist_projectivity(&t)?;
    let verified = verdict.verify_relative(&t.module, &t.h_embedding);
    let trace_checksum = match &verdict.witness {
        Some(Witness::TracePreimage(theta)) => Some(matrix_checksum(theta)),
        _ => None,
    };
    report.record("twist H-projective", verdict.projective && verified, "");
    Ok(StageOutcome {
        family: f.label.clone(),
        stage: n,
        q,
        x_dim: s.x().dim(),
        y_dim: s.y().dim(),
        z_dim: s.z().dim(),
        twist_dim: t.module.dim(),
        split_checksum,
        trace_checksum,
        report,
        elapsed: start.elapsed(),
    })
}

/// Non-splitness of every `ι_n`.
pub fn inclusions_non_split(f: &InclusionFamily) -> Result<Report> {
    let mut r = Report::new();
    for (i, inc) in f.inclusions.iter().enumerate() {
        let split = is_split_mono(inc)?;
        r.record(format!("iota_{} not split", i + 1), split == Split::NotSplit, "");
    }
    Ok(r)
}

/// Result of the randomized Fitting test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fitting {
    /// An endomorphism `φ` with `0 < rank φ^dim < dim`, so `M = im ⊕ ker` of it.
    Decomposes(Matrix),
    ProbablyIndecomposable,
}

/// Draws random endomorphisms and looks for one whose Fitting decomposition is nontrivial.
pub fn fitting_test(m: &Module, trials: usize, seed: u64) -> Fitting {
    let ga = GenAction::of_module(m);
    let end = BlockHom::compute(&ga, &ga);
    let p = m.prime();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let coeffs: Vec<u32> = (0..end.dim()).map(|_| rng.gen_range(0..p.value())).collect();
        let phi = end.combine(&coeffs).pow(m.dim() as u64);
        let r = rank(&phi);
        if r > 0 && r < m.dim() {
            return Fitting::Decomposes(phi);
        }
    }
    Fitting::ProbablyIndecomposable
}

pub const FITTING_TRIALS: usize = 200;
