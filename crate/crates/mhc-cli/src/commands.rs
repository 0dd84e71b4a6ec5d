//! Implementations of the command-line verbs. Each returns the process exit
//! code: 0 for success (or "valid as requested"), 1 for a checked failure
//! (refutation found, certificate rejected), with usage errors reported as
//! `Err` and mapped to 2 by `main`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use mhc_core::algebra::{AlgebraClass, CountermodelQuery, ModalAlgebra, Valuation};
use mhc_core::calculi::GroupId;
use mhc_core::certs::{certificate, certificate_names};
use mhc_core::equipollence::run_pipeline;
use mhc_core::kernel::{check, deduction, refine, Derivation};
use mhc_core::kripke;
use mhc_core::syntax::{parse, Formula, Language};
use mhc_core::translate;

use crate::acceptance;
use crate::formats::{
    parse_algebra, parse_certificate, render_algebra, render_certificate, render_model,
    render_witness,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKED_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_certificate(path: &Path) -> Result<Derivation> {
    parse_certificate(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn parse_modal(text: &str) -> Result<Formula> {
    parse(text, Language::Modal).map_err(|e| anyhow!("{e}"))
}

fn write_or_print(out: Option<&Path>, content: &str, what: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))?;
            println!("{what} written to {}", path.display());
        }
        None => print!("{content}"),
    }
    Ok(())
}

/// `check`: verify a certificate file, printing one line per step.
pub fn cmd_check(file: &Path, extra_axioms: &[String]) -> Result<i32> {
    let mut d = load_certificate(file)?;
    if !extra_axioms.is_empty() {
        let axioms: Result<Vec<Formula>> = extra_axioms
            .iter()
            .map(|t| parse(t, d.calculus.language()).map_err(|e| anyhow!("{e}")))
            .collect();
        d.calculus = d.calculus.clone().with_extra_axioms(axioms?);
    }
    let verdict = check(&d).map_err(|e| anyhow!("{e}"))?;
    for diag in &verdict.diagnostics {
        let status = if diag.ok { "OK  " } else { "FAIL" };
        println!("{status} {}. {}", diag.line + 1, diag.message);
    }
    if verdict.ok {
        println!("accepted: {} |- {}", d.calculus.label(), verdict.conclusion);
        Ok(EXIT_OK)
    } else {
        println!("rejected");
        Ok(EXIT_CHECKED_FAILURE)
    }
}

/// `refine`: push substitutions down to axioms and premises.
pub fn cmd_refine(file: &Path, out: Option<&Path>) -> Result<i32> {
    let d = load_certificate(file)?;
    match refine(&d) {
        Ok(r) => {
            write_or_print(out, &render_certificate(&r), "refined certificate")?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            println!("refine failed: {e}");
            Ok(EXIT_CHECKED_FAILURE)
        }
    }
}

/// `deduce`: discharge a premise via the deduction theorem.
pub fn cmd_deduce(file: &Path, discharge: &str, out: Option<&Path>) -> Result<i32> {
    let d = load_certificate(file)?;
    let a = parse(discharge, d.calculus.language()).map_err(|e| anyhow!("{e}"))?;
    match deduction(&d, &a) {
        Ok(r) => {
            write_or_print(out, &render_certificate(&r), "deduced certificate")?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            println!("deduction failed: {e}");
            Ok(EXIT_CHECKED_FAILURE)
        }
    }
}

fn print_countermodel(m: &ModalAlgebra, v: &Valuation) {
    println!("countermodel found (base size {}):", m.size());
    print!("{}", render_algebra(m));
    print!("{}", render_witness(v));
}

/// `countermodel`: search finite algebras of a class for a refutation.
/// Exit 1 when one is found, 0 when none exists within the bound.
pub fn cmd_countermodel(
    formula: &str,
    class: &str,
    require_valid: Option<&str>,
    max: usize,
) -> Result<i32> {
    let f = parse_modal(formula)?;
    let class = AlgebraClass::parse(class)
        .ok_or_else(|| anyhow!("unknown class '{class}' (mHeyting, kuz, e, k4grz)"))?;
    let mut require = Vec::new();
    if let Some(groups) = require_valid {
        for g in groups.split(',') {
            let id = GroupId::parse(g.trim()).ok_or_else(|| anyhow!("unknown group '{g}'"))?;
            require.extend(id.axioms());
        }
    }
    let query = CountermodelQuery { class, require_valid: require, max_base_size: max };
    match mhc_core::algebra::find_countermodel(&f, &query).map_err(|e| anyhow!("{e}"))? {
        Some((m, v)) => {
            print_countermodel(&m, &v);
            Ok(EXIT_CHECKED_FAILURE)
        }
        None => {
            println!("no countermodel with base size <= {max}");
            Ok(EXIT_OK)
        }
    }
}

/// `kripke`: bounded Kripke countermodel search for an assertoric formula.
pub fn cmd_kripke(formula: &str, max_worlds: usize) -> Result<i32> {
    let f = parse(formula, Language::Assertoric).map_err(|e| anyhow!("{e}"))?;
    match kripke::countermodel(&f, max_worlds).map_err(|e| anyhow!("{e}"))? {
        Some((m, w)) => {
            println!("countermodel found, refuted at world {w}:");
            print!("{}", render_model(&m));
            Ok(EXIT_CHECKED_FAILURE)
        }
        None => {
            println!("no countermodel with <= {max_worlds} worlds");
            Ok(EXIT_OK)
        }
    }
}

/// `double`: apply the doubling construction to an algebra file.
pub fn cmd_double(file: &Path) -> Result<i32> {
    let (base, table) = parse_algebra(&read(file)?)?;
    let table = table.ok_or_else(|| anyhow!("algebra file has no box table"))?;
    let m = ModalAlgebra::new(base, table).map_err(|e| anyhow!("{e}"))?;
    match mhc_core::algebra::double(&m) {
        Ok(d) => {
            print!("{}", render_algebra(&d));
            Ok(EXIT_OK)
        }
        Err(e) => {
            println!("doubling failed: {e}");
            Ok(EXIT_CHECKED_FAILURE)
        }
    }
}

/// `translate`: apply `t`, `s`, or their composite to a formula.
pub fn cmd_translate(formula: &str, map: &str) -> Result<i32> {
    let out = match map {
        "t" => {
            let f = parse_modal(formula)?;
            translate::gmt_t(&f).map_err(|e| anyhow!("{e}"))?
        }
        "s" => {
            let f = parse(formula, Language::Bimodal).map_err(|e| anyhow!("{e}"))?;
            translate::split_s(&f)
        }
        "embed" => {
            let f = parse_modal(formula)?;
            translate::embed(&f).map_err(|e| anyhow!("{e}"))?
        }
        other => bail!("unknown map '{other}' (t, s, embed)"),
    };
    println!("{out}");
    Ok(EXIT_OK)
}

/// Pick the premise pattern for the assertoric extraction: the explicit
/// pattern if given, else the first erased premise of which every erased
/// premise is an instance, else `top` for premise-free inputs.
fn extraction_pattern(d: &Derivation, pattern: Option<&str>) -> Result<Formula> {
    if let Some(text) = pattern {
        return parse(text, Language::Assertoric).map_err(|e| anyhow!("{e}"));
    }
    if d.premises.is_empty() {
        return Ok(Formula::top());
    }
    let erased: Vec<Formula> = d.premises.iter().map(|p| p.erase_boxes()).collect();
    for candidate in &erased {
        if erased
            .iter()
            .all(|p| mhc_core::syntax::match_formula(candidate, p).is_some())
        {
            return Ok(candidate.clone());
        }
    }
    bail!("no premise subsumes the others; pass --pattern explicitly")
}

/// `transform`: run the full equipollence pipeline on an E-certificate,
/// emitting the intermediate and final certificates plus the replacement
/// table.
pub fn cmd_transform(file: &Path, out_dir: &Path, pattern: Option<&str>) -> Result<i32> {
    let input = load_certificate(file)?;
    let refined = match refine(&input) {
        Ok(r) => r,
        Err(e) => {
            println!("refine failed: {e}");
            return Ok(EXIT_CHECKED_FAILURE);
        }
    };
    let a = extraction_pattern(&refined, pattern)?;
    let b = match refined.conclusion() {
        Some(c) => c.erase_boxes(),
        None => bail!("certificate has no steps"),
    };
    let out = match run_pipeline(&refined, &a, &b) {
        Ok(out) => out,
        Err(e) => {
            println!("transform failed: {e}");
            return Ok(EXIT_CHECKED_FAILURE);
        }
    };

    let stem = file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "derivation".to_string());
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    let stages: [(&str, &Derivation); 3] = [
        ("dstar", &out.transform.derivation),
        ("dstarstar", &out.boxtimes.derivation),
        ("int", &out.extracted),
    ];
    let mut emitted: Vec<PathBuf> = Vec::new();
    for (tag, derivation) in stages {
        let path = out_dir.join(format!("{stem}.{tag}.cert"));
        fs::write(&path, render_certificate(derivation))
            .with_context(|| format!("writing {}", path.display()))?;
        // Emitted certificates must re-parse and re-check.
        let back = parse_certificate(&fs::read_to_string(&path)?)?;
        let verdict = check(&back).map_err(|e| anyhow!("{e}"))?;
        if !verdict.ok {
            bail!("emitted certificate {} does not re-check", path.display());
        }
        emitted.push(path);
    }

    println!("replacement table:");
    for entry in &out.transform.boxdot_map.entries {
        let boxtimes = out
            .transform
            .hypotheses
            .iter()
            .any(|h| h.head == entry.boxdot)
            .then(|| {
                out.boxtimes
                    .boxtimes
                    .iter()
                    .find(|(head, _)| *head == entry.boxdot)
                    .map(|(_, b)| b.clone())
            })
            .flatten();
        match boxtimes {
            Some(b) => println!("  {}  =>  {}  =>  {}", entry.boxed, entry.boxdot, b),
            None => println!("  {}  =>  {}", entry.boxed, entry.boxdot),
        }
    }
    for w in &out.transform.warnings {
        println!("warning: {w}");
    }
    for path in &emitted {
        println!("emitted {}", path.display());
    }
    println!(
        "Int + {} |- {}   (converse via axiom inclusion: {})",
        out.report.pattern,
        out.report.conclusion,
        if out.report.converse_checks_in_e { "re-checked in E" } else { "failed" }
    );
    Ok(EXIT_OK)
}

/// `certify-all`: run the acceptance suite; optionally export every bundled
/// certificate as a `.cert` file first.
pub fn cmd_certify_all(emit_dir: Option<&Path>) -> Result<i32> {
    if let Some(dir) = emit_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for name in certificate_names() {
            let d = certificate(name).map_err(|e| anyhow!("{e}"))?;
            let path = dir.join(format!("{name}.cert"));
            fs::write(&path, render_certificate(&d))
                .with_context(|| format!("writing {}", path.display()))?;
            println!("emitted {}", path.display());
        }
    }
    let results = acceptance::run_all();
    let all_pass = acceptance::print_report(&results);
    Ok(if all_pass { EXIT_OK } else { EXIT_CHECKED_FAILURE })
}
