//! Text file formats: certificates, algebras, and Kripke models.
//!
//! Rendering is canonical, so identical inputs produce byte-identical files;
//! every renderer/parser pair round-trips.

use anyhow::{anyhow, bail, Context, Result};
use mhc_core::algebra::{HeytingAlgebra, ModalAlgebra, Valuation};
use mhc_core::calculi::{calculus, AxiomRef, GroupId};
use mhc_core::kernel::{Derivation, Justification, Mode};
use mhc_core::kripke::KripkeModel;
use mhc_core::syntax::{parse, Formula, Language, Substitution, Variable};

fn parse_formula(text: &str) -> Result<Formula> {
    parse(text.trim(), Language::Bimodal).map_err(|e| anyhow!("{e} in '{}'", text.trim()))
}

fn parse_assignments(text: &str) -> Result<Substitution> {
    let mut s = Substitution::identity();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (var, formula) = part
            .split_once(":=")
            .ok_or_else(|| anyhow!("expected 'var:=formula' in '{part}'"))?;
        s.bind(Variable::new(var.trim()), parse_formula(formula)?);
    }
    Ok(s)
}

/// Parse a certificate file.
///
/// Layout: a header `calculus <name> [fragment g1 g2 ...] mode <mode>`,
/// then `premise <formula>` lines, then numbered steps
/// `<n>. <formula> ; prem <k> | ax <group>.<idx> [v:=f,...] | mp <i> <j> |
/// sub <i> v:=f,... | nec <i>` with one-based numbers throughout.
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_certificate(text: &str) -> Result<Derivation> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| anyhow!("empty certificate file"))?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("calculus") {
        bail!("header must start with 'calculus'");
    }
    let name = tokens.next().ok_or_else(|| anyhow!("missing calculus name"))?;
    let mut spec = calculus(name).map_err(|e| anyhow!("{e}"))?;
    let mut mode = None;
    let mut rest: Vec<&str> = tokens.collect();
    if rest.first() == Some(&"fragment") {
        let mode_pos = rest
            .iter()
            .position(|t| *t == "mode")
            .ok_or_else(|| anyhow!("header missing 'mode'"))?;
        let groups: Vec<GroupId> = rest[1..mode_pos]
            .iter()
            .map(|g| GroupId::parse(g).ok_or_else(|| anyhow!("unknown group '{g}'")))
            .collect::<Result<_>>()?;
        spec = spec.fragment(&groups).map_err(|e| anyhow!("{e}"))?;
        rest.drain(..mode_pos);
    }
    if rest.first() == Some(&"mode") {
        let m = rest.get(1).ok_or_else(|| anyhow!("missing mode value"))?;
        mode = Some(Mode::parse(m).ok_or_else(|| anyhow!("unknown mode '{m}'"))?);
        rest.drain(..2);
    }
    if !rest.is_empty() {
        bail!("unexpected header tokens: {rest:?}");
    }
    let mode = mode.ok_or_else(|| anyhow!("header missing 'mode'"))?;

    let mut d = Derivation::new(spec, mode, Vec::new());
    let mut step_no = 0usize;
    for line in lines {
        if let Some(p) = line.strip_prefix("premise ") {
            if step_no > 0 {
                bail!("premise after the first step");
            }
            d.premises.push(parse_formula(p)?);
            continue;
        }
        step_no += 1;
        let (num, rest) = line
            .split_once(". ")
            .ok_or_else(|| anyhow!("expected '<n>. <formula> ; <justification>': {line}"))?;
        let n: usize = num.trim().parse().context("step number")?;
        if n != step_no {
            bail!("step numbered {n}, expected {step_no}");
        }
        let (formula_text, just_text) = rest
            .split_once(';')
            .ok_or_else(|| anyhow!("step {n} missing ';'"))?;
        let formula = parse_formula(formula_text)?;
        let mut jt = just_text.trim().splitn(2, ' ');
        let kind = jt.next().unwrap_or_default();
        let args = jt.next().unwrap_or("").trim();
        let justification = match kind {
            "prem" => {
                let k: usize = args.parse().context("premise index")?;
                Justification::Premise(k.checked_sub(1).ok_or_else(|| anyhow!("premise 0"))?)
            }
            "ax" => {
                let mut parts = args.splitn(2, ' ');
                let r = parts.next().unwrap_or_default();
                let (g, i) = r
                    .split_once('.')
                    .ok_or_else(|| anyhow!("expected '<group>.<idx>', got '{r}'"))?;
                let group = GroupId::parse(g).ok_or_else(|| anyhow!("unknown group '{g}'"))?;
                let index: usize = i.parse().context("axiom index")?;
                let index = index.checked_sub(1).ok_or_else(|| anyhow!("axiom index 0"))?;
                let s = parse_assignments(parts.next().unwrap_or(""))?;
                Justification::Axiom(AxiomRef::new(group, index), s)
            }
            "mp" => {
                let mut ij = args.split_whitespace();
                let i: usize = ij.next().ok_or_else(|| anyhow!("mp needs two lines"))?.parse()?;
                let j: usize = ij.next().ok_or_else(|| anyhow!("mp needs two lines"))?.parse()?;
                Justification::ModusPonens(
                    i.checked_sub(1).ok_or_else(|| anyhow!("line 0"))?,
                    j.checked_sub(1).ok_or_else(|| anyhow!("line 0"))?,
                )
            }
            "sub" => {
                let mut parts = args.splitn(2, ' ');
                let i: usize = parts.next().unwrap_or_default().parse().context("line")?;
                let s = parse_assignments(parts.next().unwrap_or(""))?;
                Justification::Subst(i.checked_sub(1).ok_or_else(|| anyhow!("line 0"))?, s)
            }
            "nec" => {
                let i: usize = args.parse().context("line")?;
                Justification::Necessitation(i.checked_sub(1).ok_or_else(|| anyhow!("line 0"))?)
            }
            other => bail!("unknown justification '{other}'"),
        };
        d.push(formula, justification);
    }
    if d.steps.is_empty() {
        bail!("certificate has no steps");
    }
    Ok(d)
}

/// Render a certificate in the canonical layout.
pub fn render_certificate(d: &Derivation) -> String {
    let mut out = String::new();
    out.push_str("calculus ");
    out.push_str(d.calculus.name());
    let full = calculus(d.calculus.name())
        .map(|c| c.group_ids())
        .unwrap_or_default();
    if full != d.calculus.group_ids() {
        out.push_str(" fragment");
        for g in d.calculus.group_ids() {
            out.push(' ');
            out.push_str(g.as_str());
        }
    }
    out.push_str(" mode ");
    out.push_str(d.mode.as_str());
    out.push('\n');
    for p in &d.premises {
        out.push_str(&format!("premise {p}\n"));
    }
    for (k, step) in d.steps.iter().enumerate() {
        out.push_str(&format!("{}. {} ; {}\n", k + 1, step.formula, step.justification));
    }
    out
}

/// Parse an algebra file: `size n`, `order i j` lines (element `i` is below
/// element `j`), optional `box i v` lines. Lines starting with `#` and
/// `val` lines are ignored (witness blocks emitted next to countermodels).
pub fn parse_algebra(text: &str) -> Result<(HeytingAlgebra, Option<Vec<usize>>)> {
    let mut size: Option<usize> = None;
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut boxes: Vec<(usize, usize)> = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') || line.starts_with("val") {
            continue;
        }
        let mut t = line.split_whitespace();
        match t.next() {
            Some("size") => {
                size = Some(t.next().ok_or_else(|| anyhow!("size needs a count"))?.parse()?)
            }
            Some("order") => {
                let i: usize = t.next().ok_or_else(|| anyhow!("order needs two"))?.parse()?;
                let j: usize = t.next().ok_or_else(|| anyhow!("order needs two"))?.parse()?;
                order.push((i, j));
            }
            Some("box") => {
                let i: usize = t.next().ok_or_else(|| anyhow!("box needs two"))?.parse()?;
                let v: usize = t.next().ok_or_else(|| anyhow!("box needs two"))?.parse()?;
                boxes.push((i, v));
            }
            Some(other) => bail!("unknown directive '{other}'"),
            None => {}
        }
    }
    let size = size.ok_or_else(|| anyhow!("missing 'size' line"))?;
    let base = HeytingAlgebra::from_order(size, &order).map_err(|e| anyhow!("{e}"))?;
    let box_table = if boxes.is_empty() {
        None
    } else {
        let mut table = vec![None; size];
        for (i, v) in boxes {
            if i >= size || v >= size {
                bail!("box entry ({i}, {v}) out of range");
            }
            table[i] = Some(v);
        }
        Some(
            table
                .into_iter()
                .enumerate()
                .map(|(i, v)| v.ok_or_else(|| anyhow!("missing box value for element {i}")))
                .collect::<Result<Vec<usize>>>()?,
        )
    };
    Ok((base, box_table))
}

/// Render a modal algebra in the file format.
pub fn render_algebra(m: &ModalAlgebra) -> String {
    let mut out = format!("size {}\n", m.size());
    for (i, j) in m.base.order_pairs() {
        out.push_str(&format!("order {i} {j}\n"));
    }
    for x in 0..m.size() {
        out.push_str(&format!("box {x} {}\n", m.box_of(x)));
    }
    out
}

/// Render a refuting valuation as a `val` witness block.
pub fn render_witness(v: &Valuation) -> String {
    let mut out = String::new();
    for (var, e) in v.iter() {
        out.push_str(&format!("val {var} := {e}\n"));
    }
    out
}

/// Parse a Kripke model file: `worlds n`, `le i j`, `true x i`.
pub fn parse_model(text: &str) -> Result<KripkeModel> {
    let mut worlds: Option<usize> = None;
    let mut le: Vec<(usize, usize)> = Vec::new();
    let mut truths: Vec<(String, usize)> = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut t = line.split_whitespace();
        match t.next() {
            Some("worlds") => {
                worlds = Some(t.next().ok_or_else(|| anyhow!("worlds needs a count"))?.parse()?)
            }
            Some("le") => {
                let i: usize = t.next().ok_or_else(|| anyhow!("le needs two"))?.parse()?;
                let j: usize = t.next().ok_or_else(|| anyhow!("le needs two"))?.parse()?;
                le.push((i, j));
            }
            Some("true") => {
                let x = t.next().ok_or_else(|| anyhow!("true needs a variable"))?;
                let w: usize = t.next().ok_or_else(|| anyhow!("true needs a world"))?.parse()?;
                truths.push((x.to_string(), w));
            }
            Some(other) => bail!("unknown directive '{other}'"),
            None => {}
        }
    }
    let n = worlds.ok_or_else(|| anyhow!("missing 'worlds' line"))?;
    let mut val: std::collections::BTreeMap<String, Vec<bool>> = Default::default();
    for (x, w) in truths {
        if w >= n {
            bail!("world {w} out of range");
        }
        val.entry(x).or_insert_with(|| vec![false; n])[w] = true;
    }
    KripkeModel::new(
        n,
        &le,
        val.into_iter().map(|(x, set)| (Variable::new(x), set)),
    )
    .map_err(|e| anyhow!("{e}"))
}

/// Render a Kripke model in the file format.
pub fn render_model(m: &KripkeModel) -> String {
    let mut out = format!("worlds {}\n", m.worlds());
    for i in 0..m.worlds() {
        for j in 0..m.worlds() {
            if i != j && m.le(i, j) {
                out.push_str(&format!("le {i} {j}\n"));
            }
        }
    }
    for (x, set) in m.valuations() {
        for (w, &t) in set.iter().enumerate() {
            if t {
                out.push_str(&format!("true {x} {w}\n"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use mhc_core::certs::{certificate, certificate_names};
    use mhc_core::kernel::check;

    #[test]
    fn certificates_round_trip() {
        for name in certificate_names() {
            let d = certificate(name).unwrap();
            let text = render_certificate(&d);
            let back = parse_certificate(&text).unwrap();
            assert_eq!(back, d, "{name}");
            assert!(check(&back).unwrap().ok, "{name}");
            // Canonical: render is stable.
            assert_eq!(render_certificate(&back), text, "{name}");
        }
    }

    #[test]
    fn certificate_parse_errors() {
        assert!(parse_certificate("").is_err());
        assert!(parse_certificate("calculus Wat mode ws\n1. p ; prem 1\n").is_err());
        assert!(parse_certificate("calculus Int mode nope\n1. p ; prem 1\n").is_err());
        assert!(
            parse_certificate("calculus Int mode ws\n2. p ; prem 1\n").is_err(),
            "step numbering enforced"
        );
    }

    #[test]
    fn algebra_round_trip() {
        use mhc_core::algebra::{HeytingAlgebra as HA, ModalAlgebra, Poset};
        let base = HA::from_poset(&Poset::chain(2));
        let one = base.one();
        let m = ModalAlgebra::new(base, vec![one; 3]).unwrap();
        let text = render_algebra(&m);
        let (base2, table) = parse_algebra(&text).unwrap();
        assert_eq!(base2, m.base);
        assert_eq!(table, Some(m.box_table.clone()));
        assert!(parse_algebra("size 3\norder 0 2\norder 1 2\n").is_err(), "not a lattice");
    }

    #[test]
    fn model_round_trip() {
        let m = KripkeModel::new(
            2,
            &[(0, 1)],
            [
                (Variable::new("p"), vec![false, true]),
                (Variable::new("q"), vec![false, false]),
            ],
        )
        .unwrap();
        let text = render_model(&m);
        let back = parse_model(&text).unwrap();
        assert_eq!(back.worlds(), 2);
        assert!(back.le(0, 1));
        assert!(back.forces(1, &parse("p", Language::Assertoric).unwrap()).unwrap());
        // Variables mentioned nowhere default to false everywhere, so q is
        // dropped in the round trip; forcing q errs rather than lies.
        assert!(back.forces(0, &parse("q", Language::Assertoric).unwrap()).is_err());
    }
}
