//! The full verification pipeline and its JSON report.

use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{cyclic, direct_product, SubgroupEmbedding};
use crate::harness::fixtures::{fixture_sequences, ses_from_inclusion, FixtureSes};
use crate::linalg::Prime;
use crate::morph::{check_ses, is_isomorphic, is_split_mono, Isomorphism, DEFAULT_ISO_TRIALS};
use crate::relproj::{is_w_projective, Witness};
use crate::reps::{induce, restrict, tensor, trivial_module, Module};
use crate::telescope::{
    fitting_test, jordan_family_cp, matrix_checksum, stage_twist_projective, string_family_v4, telescope_stage,
    tensor_family, Fitting, InclusionFamily, FITTING_TRIALS,
};
use crate::twist::{
    binomial_identity_check, check_relations, extract_splitting, freshman_check, solve_factorization,
    twist_projectivity, twisted_induction,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    V4String,
    Jordan,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::V4String => "v4-string",
            Family::Jordan => "jordan",
        }
    }

    /// Number of stages used when none is given.
    pub fn default_stages(self, p: Prime) -> usize {
        match self {
            Family::V4String => 3,
            Family::Jordan => (p.value() as usize - 1).clamp(1, 3),
        }
    }
}

/// Parameters of one `verify-paper` run.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub p: Prime,
    pub qs: Vec<usize>,
    pub family: Family,
    pub stages: usize,
    pub seed: u64,
    /// Sequences to use instead of the built-in fixture set.
    pub fixtures: Option<Vec<FixtureSes>>,
}

pub const MAX_STAGES: usize = 8;

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.qs.is_empty() {
            return Err(Error::InvalidArgument("at least one q is required".into()));
        }
        for &q in &self.qs {
            if !self.p.is_power(q) {
                return Err(Error::NotPowerOfP { q, p: self.p.value() });
            }
        }
        if self.stages == 0 || self.stages > MAX_STAGES {
            return Err(Error::InvalidArgument(format!("stages must be between 1 and {MAX_STAGES}")));
        }
        match self.family {
            Family::V4String if self.p.value() != 2 => {
                Err(Error::InvalidArgument("the v4-string family needs p = 2".into()))
            }
            Family::Jordan if self.stages + 1 > self.p.value() as usize => Err(Error::InvalidArgument(format!(
                "the jordan family over C_{} has at most {} modules, so stages must be at most {}",
                self.p.value(),
                self.p.value(),
                self.p.value() - 1
            ))),
            _ => Ok(()),
        }
    }

    fn family(&self) -> Result<InclusionFamily> {
        match self.family {
            Family::V4String => string_family_v4(self.stages + 1),
            Family::Jordan => jordan_family_cp(self.p, self.stages + 1),
        }
    }
}

/// One check of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub id: String,
    /// Short statement of the property being checked.
    pub anchor: String,
    pub expected: bool,
    pub verdict: bool,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checksum: Option<String>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub total_ms: f64,
    pub records_ms: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Parameters {
    pub p: u32,
    pub q: Vec<usize>,
    pub family: Family,
    pub stages: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub seed: u64,
    pub parameters: Parameters,
    pub records: Vec<Record>,
    pub passed: bool,
    pub timing: Timing,
}

impl RunReport {
    /// The report as JSON with the `timing` key removed.
    pub fn stable_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timing");
        }
        Ok(serde_json::to_string_pretty(&v)?)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.passed)
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {} (seed {})", self.scenario, self.seed)?;
        for r in &self.records {
            let mark = if r.passed { "ok  " } else { "FAIL" };
            write!(f, "[{mark}] {}", r.id)?;
            if !r.detail.is_empty() {
                write!(f, ": {}", r.detail)?;
            }
            writeln!(f)?;
        }
        let failed = self.failures().count();
        writeln!(f, "{} checks, {} failed", self.records.len(), failed)
    }
}

struct Outcome {
    verdict: bool,
    checksum: Option<String>,
    detail: String,
}

impl Outcome {
    fn plain(verdict: bool, detail: impl Into<String>) -> Self {
        Outcome { verdict, checksum: None, detail: detail.into() }
    }
}

type Job<'a> = Box<dyn Fn() -> Result<Outcome> + Send + Sync + 'a>;

struct Planned<'a> {
    id: String,
    anchor: &'static str,
    expected: bool,
    job: Job<'a>,
}

fn plan<'a>(
    out: &mut Vec<Planned<'a>>,
    id: String,
    anchor: &'static str,
    expected: bool,
    job: impl Fn() -> Result<Outcome> + Send + Sync + 'a,
) {
    out.push(Planned { id, anchor, expected, job: Box::new(job) });
}

const A_BINOMIAL: &str = "(-1)^i C(q-1, i) is 1 mod p when q is a power of p";
const A_BINOMIAL_CONTROL: &str = "the residue identity fails when q is not a power of p";
const A_FRESHMAN: &str = "C(q, i) vanishes mod p for 0 < i < q, so (u - 1)^q = u^q - 1";
const A_FIXTURE: &str = "fixture sequence is exact";
const A_PROPOSITION: &str = "twisted module is H-projective iff X -> Y splits iff the factorization exists";
const A_EXTRACTION: &str = "theta_(1,q) splits X -> Y and the block relations hold";
const A_INCLUSION: &str = "inclusion m_n -> m_(n+1) does not split";
const A_INDECOMPOSABLE: &str = "m_n has no nontrivial Fitting decomposition in random trials";
const A_STAGE: &str = "each telescope stage splits and its twisted module is H-projective";
const A_CONTRAST: &str = "twisting a non-split sequence gives a module that is not H-projective";
const A_PROJECTION: &str = "Ind(Res(w) (x) m_n) is isomorphic to w (x) Ind(m_n)";
const A_TENSOR_STAGE: &str = "twisted stages of the tensored family are w-projective";
const A_SYLOW_POS: &str = "induction to a larger group keeps a projective stage w-projective";
const A_SYLOW_NEG: &str = "induction to a larger group keeps a non-projective twist outside P(w)";

fn binomial_jobs(out: &mut Vec<Planned<'_>>, s: &Scenario) {
    let p = s.p;
    for &q in &s.qs {
        plan(out, format!("binomial:q={q}"), A_BINOMIAL, true, move || {
            let r = binomial_identity_check(q, p);
            let residues: Vec<&str> = r.checks.iter().map(|c| c.detail.trim_start_matches("residue ")).collect();
            Ok(Outcome::plain(r.passed(), format!("residues {}", residues.join(","))))
        });
        plan(out, format!("freshman:q={q}"), A_FRESHMAN, true, move || {
            Ok(Outcome::plain(freshman_check(q, p).passed(), ""))
        });
    }
    let mut controls = vec![p.value() as usize + 1];
    if p.value() == 2 {
        controls.push(6);
    }
    for q in controls {
        plan(out, format!("binomial-control:q={q}"), A_BINOMIAL_CONTROL, false, move || {
            let r = binomial_identity_check(q, p);
            let residues: Vec<&str> = r.checks.iter().map(|c| c.detail.trim_start_matches("residue ")).collect();
            Ok(Outcome::plain(r.passed(), format!("residues {}", residues.join(","))))
        });
    }
}

fn proposition_jobs<'a>(out: &mut Vec<Planned<'a>>, s: &'a Scenario, fixtures: &'a [FixtureSes]) {
    let p = s.p;
    for f in fixtures.iter().filter(|f| f.seq.x().prime() == p) {
        plan(out, format!("fixture:{}", f.name), A_FIXTURE, true, move || {
            let r = check_ses(&f.seq);
            let names: Vec<String> = r.failures().map(|c| c.name.clone()).collect();
            Ok(Outcome::plain(r.passed(), names.join(", ")))
        });
        for &q in &s.qs {
            plan(out, format!("proposition:{}:q={q}", f.name), A_PROPOSITION, true, move || {
                if !check_ses(&f.seq).passed() {
                    return Ok(Outcome::plain(false, "sequence is not exact"));
                }
                let split = is_split_mono(&f.seq.d1)?.is_split();
                let t = twisted_induction(&f.seq, q, p)?;
                let verdict = twist_projectivity(&t)?;
                let factorization = solve_factorization(&t)?.is_some();
                let checksum = match &verdict.witness {
                    Some(Witness::TracePreimage(theta)) => Some(matrix_checksum(theta)),
                    _ => None,
                };
                Ok(Outcome {
                    verdict: split == verdict.projective && split == factorization,
                    checksum,
                    detail: format!(
                        "dim {}, split {split}, projective {}, factorization {factorization}",
                        t.module.dim(),
                        verdict.projective
                    ),
                })
            });
            if f.split {
                plan(out, format!("extraction:{}:q={q}", f.name), A_EXTRACTION, true, move || {
                    let t = twisted_induction(&f.seq, q, p)?;
                    let Some(fac) = solve_factorization(&t)? else {
                        return Ok(Outcome::plain(false, "no factorization"));
                    };
                    let relations = check_relations(&fac.particular, &t);
                    let s = extract_splitting(&fac.particular, &t)?;
                    let failed: Vec<String> = relations.failures().map(|c| c.name.clone()).collect();
                    Ok(Outcome {
                        verdict: relations.passed(),
                        checksum: Some(matrix_checksum(s.matrix())),
                        detail: failed.join(", "),
                    })
                });
            }
        }
    }
}

/// `G = H × C_q`, `W = Ind_H^G k` and `Res_H W`.
fn permutation_w(h: &Arc<crate::groups::Group>, q: usize, p: Prime) -> Result<(SubgroupEmbedding, Module, Module)> {
    let (_, h_emb, _) = direct_product(h, &cyclic(q)?)?;
    let w = induce(&h_emb, &trivial_module(h, p))?;
    let v = restrict(&h_emb, &w)?;
    Ok((h_emb, w, v))
}

fn telescope_jobs<'a>(out: &mut Vec<Planned<'a>>, s: &'a Scenario, family: &'a InclusionFamily) {
    let p = s.p;
    let seed = s.seed;
    for n in 1..=s.stages {
        plan(out, format!("inclusion:n={n}"), A_INCLUSION, true, move || {
            Ok(Outcome::plain(!is_split_mono(family.inclusion(n))?.is_split(), ""))
        });
    }
    for n in 1..=s.stages + 1 {
        plan(out, format!("indecomposable:n={n}"), A_INDECOMPOSABLE, true, move || {
            let m = family.module(n);
            let f = fitting_test(m, FITTING_TRIALS, seed.wrapping_add(n as u64));
            Ok(Outcome::plain(f == Fitting::ProbablyIndecomposable, format!("dim {}", m.dim())))
        });
    }
    for &q in &s.qs {
        for n in 1..=s.stages {
            plan(out, format!("stage:N={n}:q={q}"), A_STAGE, true, move || {
                let o = stage_twist_projective(family, n, q, p)?;
                let failed: Vec<String> = o.report.failures().map(|c| c.name.clone()).collect();
                let mut detail = format!("dims {} -> {} -> {}, twisted {}", o.x_dim, o.y_dim, o.z_dim, o.twist_dim);
                if !failed.is_empty() {
                    detail.push_str(&format!("; failed: {}", failed.join(", ")));
                }
                Ok(Outcome { verdict: o.report.passed(), checksum: o.trace_checksum, detail })
            });
        }
        plan(out, format!("contrast:q={q}"), A_CONTRAST, false, move || {
            let seq = ses_from_inclusion(family.inclusion(1).clone())?;
            let t = twisted_induction(&seq, q, p)?;
            Ok(Outcome::plain(twist_projectivity(&t)?.projective, format!("twisted {}", t.module.dim())))
        });
    }
    let q0 = s.qs[0];
    let h = family.module(1).group().clone();
    for n in 1..=family.len().min(3) {
        let h = h.clone();
        plan(out, format!("projection-formula:n={n}:q={q0}"), A_PROJECTION, true, move || {
            let (h_emb, w, v) = permutation_w(&h, q0, p)?;
            let m = family.module(n);
            let left = Arc::new(induce(&h_emb, &tensor(&v, m)?)?);
            let right = Arc::new(tensor(&w, &induce(&h_emb, m)?)?);
            Ok(match is_isomorphic(&left, &right, DEFAULT_ISO_TRIALS, seed)? {
                Isomorphism::Yes(phi) => Outcome {
                    verdict: true,
                    checksum: Some(matrix_checksum(phi.matrix())),
                    detail: format!("dim {}", left.dim()),
                },
                other => Outcome::plain(false, format!("{other:?}")),
            })
        });
    }
    for n in 1..=s.stages.min(3) {
        let h = h.clone();
        plan(out, format!("tensor-stage:N={n}:q={q0}"), A_TENSOR_STAGE, true, move || {
            let (_, w, v) = permutation_w(&h, q0, p)?;
            let tf = tensor_family(&v, family)?;
            let t = twisted_induction(&telescope_stage(&tf, n)?, q0, p)?;
            // the twist lives on its own copy of H × C_q; move W onto it
            let w = w.with_group(t.group().clone())?;
            let verdict = is_w_projective(&t.module, &w)?;
            Ok(Outcome::plain(verdict.projective, format!("twisted {}", t.module.dim())))
        });
    }
    let r = if p.value() == 2 { 3 } else { 2 };
    for (label, positive) in [("projective-stage", true), ("non-projective-twist", false)] {
        plan(
            out,
            format!("sylow:{label}:q={q0}:r={r}"),
            if positive { A_SYLOW_POS } else { A_SYLOW_NEG },
            positive,
            move || {
                let seq = if positive {
                    telescope_stage(family, 1)?
                } else {
                    ses_from_inclusion(family.inclusion(1).clone())?
                };
                let t = twisted_induction(&seq, q0, p)?;
                let (big, e_p, _) = direct_product(t.group(), &cyclic(r)?)?;
                let h_in_big = e_p.compose(&t.h_embedding)?;
                let w = induce(&h_in_big, &trivial_module(h_in_big.sub(), p))?;
                let m = induce(&e_p, &t.module)?;
                debug_assert_eq!(m.group().order(), big.order());
                let verdict = is_w_projective(&m, &w)?;
                Ok(Outcome::plain(verdict.projective, format!("dim {}, |G'| = {}", m.dim(), big.order())))
            },
        );
    }
}

/// Runs every check of the scenario; records keep their declared order.
pub fn verify_paper(s: &Scenario) -> Result<RunReport> {
    s.validate()?;
    let start = Instant::now();
    let fixtures = match &s.fixtures {
        Some(f) => f.clone(),
        None => fixture_sequences()?,
    };
    let family = s.family()?;
    let mut jobs = Vec::new();
    binomial_jobs(&mut jobs, s);
    proposition_jobs(&mut jobs, s, &fixtures);
    telescope_jobs(&mut jobs, s, &family);
    let results: Vec<(Record, f64)> = jobs
        .par_iter()
        .map(|j| {
            let t0 = Instant::now();
            let (verdict, checksum, detail) = match (j.job)() {
                Ok(o) => (o.verdict, o.checksum, o.detail),
                Err(e) => (!j.expected, None, format!("error: {e}")),
            };
            let record = Record {
                id: j.id.clone(),
                anchor: j.anchor.to_string(),
                expected: j.expected,
                verdict,
                passed: verdict == j.expected,
                checksum,
                detail,
            };
            (record, t0.elapsed().as_secs_f64() * 1e3)
        })
        .collect();
    let (records, records_ms): (Vec<Record>, Vec<f64>) = results.into_iter().unzip();
    let passed = records.iter().all(|r| r.passed);
    Ok(RunReport {
        schema: SCHEMA_VERSION,
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        scenario: s.name.clone(),
        seed: s.seed,
        parameters: Parameters { p: s.p.value(), q: s.qs.clone(), family: s.family, stages: s.stages },
        records,
        passed,
        timing: Timing { total_ms: start.elapsed().as_secs_f64() * 1e3, records_ms },
    })
}
