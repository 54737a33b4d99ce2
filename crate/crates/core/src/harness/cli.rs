//! Command-line front end. Exit codes: 0 success, 1 failed check, 2 bad input.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::groups::{subgroup_generated_by, trivial_subgroup};
use crate::harness::files::{load_ses, save_json, ses_from_file, SesFile};
use crate::harness::fixtures::{diff_fixtures, write_fixtures, FixtureSes};
use crate::harness::run::{verify_paper, Family, Scenario};
use crate::linalg::Prime;
use crate::morph::{check_ses, is_split_epi, is_split_mono};
use crate::relproj::{is_rel_projective, is_w_projective, vertex, ProjectivityVerdict, Witness};
use crate::reps::Module;
use crate::telescope::{jordan_family_cp, matrix_checksum, stage_twist_projective, string_family_v4};
use crate::twist::twisted_induction;

#[derive(Parser, Debug)]
#[command(name = "twistmod", version, about = "Twisted induction and relative projectivity over GF(p)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the twisted module of a short exact sequence.
    BuildTwist(BuildTwistArgs),
    /// Decide relative projectivity, w-projectivity or vertices of a module.
    CheckProjective(CheckProjectiveArgs),
    /// Check exactness and splitting of a short exact sequence.
    CheckSplit(CheckSplitArgs),
    /// Check the telescope stages of an inclusion family.
    Telescope(TelescopeArgs),
    /// Run the full verification pipeline.
    VerifyPaper(VerifyArgs),
    /// Write the fixture files, or compare them with the shipped copies.
    RegenFixtures(RegenArgs),
}

#[derive(Args, Debug)]
pub struct BuildTwistArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub ses: PathBuf,
    /// Where to write the twisted module.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckProjectiveArgs {
    #[arg(long)]
    pub module: PathBuf,
    /// Generators of the subgroup, as comma-separated element indices; empty for the trivial subgroup.
    #[arg(long)]
    pub subgroup: Option<String>,
    /// Module file for w-projectivity.
    #[arg(long)]
    pub w: Option<PathBuf>,
    #[arg(long)]
    pub vertex: bool,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckSplitArgs {
    #[arg(long)]
    pub ses: PathBuf,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TelescopeArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<usize>,
    #[arg(long, value_enum)]
    pub family: Family,
    /// Defaults to 3, or fewer when the family is shorter.
    #[arg(long)]
    pub stages: Option<usize>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<usize>,
    #[arg(long, value_enum, default_value = "v4-string")]
    pub family: Family,
    /// Defaults to 3, or fewer when the family is shorter.
    #[arg(long)]
    pub stages: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Directory of sequence files replacing the built-in fixture set.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RegenArgs {
    #[arg(long, default_value = "fixtures")]
    pub dir: PathBuf,
    /// Compare instead of writing; exit 1 on any difference.
    #[arg(long)]
    pub check: bool,
}

/// Failed mathematical checks map to 1, everything else to 2.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CheckFailed(_) => 1,
        _ => 2,
    }
}

fn emit<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => save_json(p, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

fn build_twist(a: &BuildTwistArgs) -> Result<i32> {
    let p = Prime::new(a.p)?;
    if !p.is_power(a.q) {
        return Err(Error::NotPowerOfP { q: a.q, p: p.value() });
    }
    let (_, s) = load_ses(&a.ses)?;
    let report = check_ses(&s);
    if !report.passed() {
        eprint!("{report}");
        let names: Vec<String> = report.failures().map(|c| c.name.clone()).collect();
        return Err(Error::NotExact(names.join(", ")));
    }
    let t = twisted_induction(&s, a.q, p)?;
    let l = t.layout;
    println!(
        "dim {} over group of order {} (q = {}, X {}, Y {}, Z {})",
        t.module.dim(),
        t.group().order(),
        l.q,
        l.x_dim,
        l.y_dim,
        l.z_dim
    );
    if let Some(out) = &a.out {
        save_json(out, &t.to_file())?;
    }
    if let Some(path) = &a.json {
        save_json(path, &json!({ "dim": t.module.dim(), "layout": l, "group_order": t.group().order() }))?;
    }
    Ok(0)
}

fn parse_generators(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| Error::InvalidArgument(format!("bad element index {x:?}"))))
        .collect()
}

fn witness_checksum(v: &ProjectivityVerdict) -> Option<String> {
    match v.witness.as_ref()? {
        Witness::TracePreimage(m) => Some(matrix_checksum(m)),
        Witness::Section(s) => Some(matrix_checksum(s.matrix())),
        Witness::EvalSection(parts) => {
            let joined: Vec<String> = parts.iter().map(|(_, m)| matrix_checksum(m)).collect();
            Some(joined.join(":"))
        }
    }
}

fn check_projective(a: &CheckProjectiveArgs) -> Result<i32> {
    let m = Module::load(&a.module)?;
    let g = m.group().clone();
    let out = if a.vertex {
        let v = vertex(&m)?;
        let subgroups: Vec<_> =
            v.iter().map(|h| json!({ "order": h.sub().order(), "elements": h.elements() })).collect();
        json!({ "test": "vertex", "vertex": subgroups })
    } else if let Some(wpath) = &a.w {
        let w = Module::load(wpath)?;
        let verdict = is_w_projective(&m, &w)?;
        json!({
            "test": "w-projective",
            "projective": verdict.projective,
            "method": verdict.method,
            "witness_checksum": witness_checksum(&verdict),
        })
    } else {
        let h = match &a.subgroup {
            Some(s) => subgroup_generated_by(&g, &parse_generators(s)?)?,
            None => trivial_subgroup(&g),
        };
        let verdict = is_rel_projective(&m, &h)?;
        json!({
            "test": "relative",
            "subgroup_order": h.sub().order(),
            "subgroup": h.elements(),
            "projective": verdict.projective,
            "method": verdict.method,
            "witness_checksum": witness_checksum(&verdict),
        })
    };
    emit(&out, a.json.as_deref())?;
    Ok(0)
}

fn check_split(a: &CheckSplitArgs) -> Result<i32> {
    let (_, s) = load_ses(&a.ses)?;
    let report = check_ses(&s);
    if !report.passed() {
        eprint!("{report}");
        let names: Vec<String> = report.failures().map(|c| c.name.clone()).collect();
        return Err(Error::NotExact(names.join(", ")));
    }
    let mono = is_split_mono(&s.d1)?;
    let epi = is_split_epi(&s.d2)?;
    let out = json!({
        "exact": true,
        "d1_split": mono.is_split(),
        "d2_split": epi.is_split(),
        "d1_witness_checksum": mono.witness().map(|w| matrix_checksum(w.matrix())),
        "d2_witness_checksum": epi.witness().map(|w| matrix_checksum(w.matrix())),
    });
    emit(&out, a.json.as_deref())?;
    Ok(if mono.is_split() == epi.is_split() { 0 } else { 1 })
}

fn telescope(a: &TelescopeArgs) -> Result<i32> {
    let p = Prime::new(a.p)?;
    let stages = a.stages.unwrap_or_else(|| a.family.default_stages(p));
    let scenario =
        Scenario { name: "telescope".into(), p, qs: a.q.clone(), family: a.family, stages, seed: 0, fixtures: None };
    scenario.validate()?;
    let family = match a.family {
        Family::V4String => string_family_v4(stages + 1)?,
        Family::Jordan => jordan_family_cp(p, stages + 1)?,
    };
    let mut outcomes = Vec::new();
    for &q in &a.q {
        for n in 1..=stages {
            let o = stage_twist_projective(&family, n, q, p)?;
            println!(
                "q={q} N={n}: {} -> {} -> {}, twisted dim {}, {} ({:.1} ms)",
                o.x_dim,
                o.y_dim,
                o.z_dim,
                o.twist_dim,
                if o.report.passed() { "split, H-projective" } else { "FAILED" },
                o.elapsed.as_secs_f64() * 1e3
            );
            outcomes.push(o);
        }
    }
    let passed = outcomes.iter().all(|o| o.report.passed());
    if let Some(path) = &a.json {
        save_json(path, &json!({ "schema": 1, "passed": passed, "stages": outcomes }))?;
    }
    Ok(if passed { 0 } else { 1 })
}

fn load_fixture_dir(dir: &Path) -> Result<Vec<FixtureSes>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|path| {
            let file: SesFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            let seq = ses_from_file(&file)?;
            let name = file
                .name
                .clone()
                .unwrap_or_else(|| path.file_stem().unwrap_or_default().to_string_lossy().into_owned());
            // the expected splitting is not recorded in files; the proposition check does not need it
            Ok(FixtureSes { name, seq, split: false })
        })
        .collect()
}

fn verify(a: &VerifyArgs) -> Result<i32> {
    let p = Prime::new(a.p)?;
    let fixtures = a.fixtures.as_deref().map(load_fixture_dir).transpose()?;
    let stages = a.stages.unwrap_or_else(|| a.family.default_stages(p));
    let qs: Vec<String> = a.q.iter().map(ToString::to_string).collect();
    let scenario = Scenario {
        name: format!("verify-paper p={} q={} family={} stages={}", a.p, qs.join(","), a.family.label(), stages),
        p,
        qs: a.q.clone(),
        family: a.family,
        stages,
        seed: a.seed,
        fixtures,
    };
    let report = verify_paper(&scenario)?;
    print!("{report}");
    if let Some(path) = &a.json {
        save_json(path, &report)?;
    }
    Ok(if report.passed { 0 } else { 1 })
}

fn regen(a: &RegenArgs) -> Result<i32> {
    if a.check {
        let drift = diff_fixtures(&a.dir)?;
        for f in &drift {
            println!("differs: {f}");
        }
        if drift.is_empty() {
            println!("fixtures match");
        }
        Ok(if drift.is_empty() { 0 } else { 1 })
    } else {
        let n = write_fixtures(&a.dir)?;
        println!("wrote {n} files to {}", a.dir.display());
        Ok(0)
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::BuildTwist(a) => build_twist(a),
        Command::CheckProjective(a) => check_projective(a),
        Command::CheckSplit(a) => check_split(a),
        Command::Telescope(a) => telescope(a),
        Command::VerifyPaper(a) => verify(a),
        Command::RegenFixtures(a) => regen(a),
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
