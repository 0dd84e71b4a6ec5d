//! The assertoric-equipollence transformation: from a refined E-derivation
//! of an assertoric conclusion, build the corresponding Int□ derivation with
//! boxdot replacements and discharged hypothesis families, then the second
//! boxtimes pass, and finally erase boxes to obtain a pure Int derivation.
//!
//! Every emitted derivation is re-checked by the kernel; the transformer
//! carries no unverified steps.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use crate::calculi::{calculus, AxiomRef, CalculusSpec, GroupId};
use crate::certs::{certificate, conj, conj_project, ident};
use crate::kernel::{
    check, deduction, push_k_hoist, push_self_implication, splice, Derivation, Justification,
    KernelError, Mode, SpliceTarget,
};
use crate::syntax::{match_formula, Formula, Language, Substitution, Variable};

/// Errors from the pipeline stages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransformError {
    Kernel(KernelError),
    /// Input still contains substitution steps; apply refine first.
    NotRefined,
    WrongCalculus { expected: &'static str, found: String },
    /// A produced snippet does not state the required replaced line.
    SnippetMismatch { line: usize, expected: Formula, found: Formula },
    /// A Peirce argument of a residual hypothesis contains its own head.
    SelfReferentialBoxtimes { head: Formula, arg: Formula },
    /// The boxtimes replacement would have to cascade through a hypothesis.
    CascadedReplacement { line: usize, formula: Formula },
    PremiseNotInstance { premise: Formula, pattern: Formula },
    NonAssertoricConclusion(Formula),
    /// A modal-axiom line survived into a stage that must be box-free.
    ResidualModalAxiom { line: usize },
    /// A rebuilt stage failed the kernel check.
    Assembly { stage: &'static str, line: usize, message: String },
}

impl fmt::Display for TransformError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformError::Kernel(e) => write!(f, "{e}"),
            TransformError::NotRefined => {
                f.write_str("derivation contains substitution steps; refine it first")
            }
            TransformError::WrongCalculus { expected, found } => {
                write!(f, "expected a derivation in {expected}, found {found}")
            }
            TransformError::SnippetMismatch { line, expected, found } => write!(
                f,
                "line {}: assembled snippet concludes '{found}', required '{expected}'",
                line + 1
            ),
            TransformError::SelfReferentialBoxtimes { head, arg } => {
                write!(f, "hypothesis argument '{arg}' contains its own head '{head}'")
            }
            TransformError::CascadedReplacement { line, formula } => write!(
                f,
                "line {}: '{formula}' needs cascaded boxdot replacement, unsupported",
                line + 1
            ),
            TransformError::PremiseNotInstance { premise, pattern } => {
                write!(f, "premise '{premise}' is not a substitution instance of '{pattern}'")
            }
            TransformError::NonAssertoricConclusion(b) => {
                write!(f, "conclusion '{b}' is not assertoric")
            }
            TransformError::ResidualModalAxiom { line } => {
                write!(f, "line {} still cites a modal axiom", line + 1)
            }
            TransformError::Assembly { stage, line, message } => {
                write!(f, "{stage}: rebuilt line {} rejected: {message}", line + 1)
            }
        }
    }
}

impl From<KernelError> for TransformError {
    fn from(e: KernelError) -> TransformError {
        TransformError::Kernel(e)
    }
}

/// Source roles of a collected box-formula.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MRoles {
    /// Antecedent of a first- or third-m-axiom instance.
    pub axiom_antecedent: bool,
    /// Component of the consequent `[]a -> []b` of a first-m-axiom instance.
    pub first_consequent_component: bool,
    /// Consequent of a second-m-axiom instance, added so its replacement is
    /// defined; not part of the collected set proper.
    pub second_consequent: bool,
}

/// One collected box-formula with its third-axiom instance arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MEntry {
    /// The box-formula itself.
    pub boxed: Formula,
    /// Its immediate subformula.
    pub body: Formula,
    pub roles: MRoles,
    /// Arguments `b` of third-m-axiom instances `[]a -> P(b, a)` starting
    /// with this box-formula, deduplicated, in first-occurrence order.
    pub instances: Vec<Formula>,
}

/// The set of box-formulas driving the replacement, in first-occurrence
/// order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MSet {
    pub entries: Vec<MEntry>,
}

impl MSet {
    fn entry_mut(&mut self, boxed: &Formula) -> Option<&mut MEntry> {
        self.entries.iter_mut().find(|e| e.boxed == *boxed)
    }

    fn add(&mut self, body: Formula) -> &mut MEntry {
        let boxed = Formula::boxed(body.clone());
        if let Some(pos) = self.entries.iter().position(|e| e.boxed == boxed) {
            return &mut self.entries[pos];
        }
        self.entries.push(MEntry {
            boxed,
            body,
            roles: MRoles::default(),
            instances: Vec::new(),
        });
        self.entries.last_mut().unwrap()
    }

    pub fn contains(&self, boxed: &Formula) -> bool {
        self.entries.iter().any(|e| e.boxed == *boxed)
    }
}

fn axiom_binding(s: &Substitution, var: &str) -> Formula {
    s.image(&Variable::new(var))
}

fn require_e(d: &Derivation) -> Result<(), TransformError> {
    if d.calculus.name() != "E" {
        return Err(TransformError::WrongCalculus {
            expected: "E",
            found: String::from(d.calculus.name()),
        });
    }
    Ok(())
}

fn checked_input(d: &Derivation) -> Result<(), TransformError> {
    let v = check(d)?;
    if let Some(e) = v.first_error() {
        return Err(TransformError::Kernel(KernelError::InvalidInput {
            line: e.line,
            message: e.message.clone(),
        }));
    }
    Ok(())
}

/// Scan a refined E-derivation for the box-formulas that occur as m-axiom
/// antecedents or as components of a detachable first-m-axiom consequent.
pub fn collect_m(d: &Derivation) -> Result<MSet, TransformError> {
    require_e(d)?;
    if d.has_subst() {
        return Err(TransformError::NotRefined);
    }
    checked_input(d)?;
    let mut m = MSet::default();
    for step in &d.steps {
        if let Justification::Axiom(r, s) = &step.justification {
            if r.group != GroupId::M {
                continue;
            }
            match r.index {
                0 => {
                    let a = axiom_binding(s, "p");
                    let b = axiom_binding(s, "q");
                    let e = m.add(Formula::imp(a.clone(), b.clone()));
                    e.roles.axiom_antecedent = true;
                    m.add(a).roles.first_consequent_component = true;
                    m.add(b).roles.first_consequent_component = true;
                }
                1 => {
                    // Second m-axiom `a -> []a`: its consequent is collected
                    // during transform if nothing else introduces it.
                }
                2 => {
                    let a = axiom_binding(s, "p");
                    let b = axiom_binding(s, "q");
                    let e = m.add(a);
                    e.roles.axiom_antecedent = true;
                    if !e.instances.contains(&b) {
                        e.instances.push(b);
                    }
                }
                _ => unreachable!("group m has three axioms"),
            }
        }
    }
    Ok(m)
}

/// One boxdot assignment: the replacement formula for a collected
/// box-formula, with the conjunct data it is assembled from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxdotEntry {
    pub boxed: Formula,
    pub body: Formula,
    /// Third-axiom arguments with `[]body := top` applied.
    pub args_top: Vec<Formula>,
    /// `P(arg, body)` for each argument; the boxdot conjuncts.
    pub conjuncts: Vec<Formula>,
    /// Right-associated conjunction of the conjuncts, or `top` when empty.
    pub boxdot: Formula,
}

/// The boxdot assignment for every collected entry.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoxdotMap {
    pub entries: Vec<BoxdotEntry>,
}

impl BoxdotMap {
    pub fn get(&self, boxed: &Formula) -> Option<&BoxdotEntry> {
        self.entries.iter().find(|e| e.boxed == *boxed)
    }

    fn by_body(&self, body: &Formula) -> Option<&BoxdotEntry> {
        self.entries.iter().find(|e| e.body == *body)
    }

    /// Replacement pairs `[]a := boxdot a` in entry order.
    pub fn pairs(&self) -> Vec<(Formula, Formula)> {
        self.entries.iter().map(|e| (e.boxed.clone(), e.boxdot.clone())).collect()
    }
}

/// Assign each collected box-formula its boxdot.
pub fn boxdot(m: &MSet) -> BoxdotMap {
    let mut out = BoxdotMap::default();
    for entry in &m.entries {
        let top_pair = [(entry.boxed.clone(), Formula::top())];
        let args_top: Vec<Formula> =
            entry.instances.iter().map(|b| b.replace(&top_pair)).collect();
        let conjuncts: Vec<Formula> = args_top
            .iter()
            .map(|b| Formula::peirce(b.clone(), entry.body.clone()))
            .collect();
        let boxdot = if conjuncts.is_empty() { Formula::top() } else { conj(&conjuncts) };
        out.entries.push(BoxdotEntry {
            boxed: entry.boxed.clone(),
            body: entry.body.clone(),
            args_top,
            conjuncts,
            boxdot,
        });
    }
    out
}

/// A residual hypothesis of the transformed derivation: a premise of the
/// form `head -> P(arg, gamma)`, discharged by the boxtimes pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypothesis {
    pub formula: Formula,
    /// The boxdot formula the hypothesis begins with.
    pub head: Formula,
    /// First argument of the Peirce consequent.
    pub peirce_arg: Formula,
    /// Second argument of the Peirce consequent.
    pub gamma: Formula,
    /// The whole consequent `P(peirce_arg, gamma)`.
    pub consequent: Formula,
}

/// Result of the first pass.
#[derive(Debug, Clone)]
pub struct TransformOutput {
    /// The input derivation (refined, checked).
    pub source: Derivation,
    /// The Int□ ⊩ derivation; premises are the replaced originals followed
    /// by the hypothesis formulas.
    pub derivation: Derivation,
    pub m_set: MSet,
    pub boxdot_map: BoxdotMap,
    pub hypotheses: Vec<Hypothesis>,
    /// Index of the first hypothesis premise slot.
    pub hyp_premise_start: usize,
    /// The replaced original premises.
    pub lambda: Vec<Formula>,
    pub warnings: Vec<String>,
}

fn intbox() -> CalculusSpec {
    calculus("IntBox").expect("registered")
}

/// Derivation of `alpha -> C` where `C` is `top` for an empty argument
/// list and otherwise the right-associated conjunction of `P(arg_j, alpha)`
/// (premise-free, groups i and c).
fn e_three(calc: &CalculusSpec, alpha: &Formula, args: &[Formula]) -> Result<Derivation, TransformError> {
    let conjuncts: Vec<Formula> =
        args.iter().map(|x| Formula::peirce(x.clone(), alpha.clone())).collect();
    if conjuncts.is_empty() {
        let mut d = Derivation::new(calc.clone(), Mode::WithoutSubstitution, Vec::new());
        let top_line = push_self_implication(&mut d, &Formula::var("p"));
        push_k_hoist(&mut d, top_line, alpha);
        return Ok(d);
    }
    let whole = conj(&conjuncts);
    let lemma = certificate("lemma-p-implies-P")?.with_calculus(calc.clone())?;
    let mut host = Derivation::new(calc.clone(), Mode::WithoutSubstitution, Vec::new());
    let mut conjunct_lines = Vec::new();
    for arg in args {
        let inst = lemma.instantiate(&Substitution::from_pairs([
            (Variable::new("p"), alpha.clone()),
            (Variable::new("q"), arg.clone()),
        ]))?;
        conjunct_lines.push(splice(&mut host, &inst, &[])?);
    }
    // From alpha -> C_j for each j, derive alpha -> (C_1 & (C_2 & ...)).
    let k = conjuncts.len();
    let mut premises: Vec<Formula> = conjunct_lines
        .iter()
        .map(|&l| host.steps[l].formula.clone())
        .collect();
    premises.push(alpha.clone());
    let mut inner = Derivation::new(calc.clone(), Mode::WithoutSubstitution, premises);
    let mut imp_lines = Vec::new();
    for (j, c) in conjuncts.iter().enumerate() {
        imp_lines.push(inner.push(
            Formula::imp(alpha.clone(), c.clone()),
            Justification::Premise(j),
        ));
    }
    let alpha_line = inner.push(alpha.clone(), Justification::Premise(k));
    let mut c_lines = Vec::new();
    for (j, c) in conjuncts.iter().enumerate() {
        c_lines.push(inner.push(c.clone(), Justification::ModusPonens(alpha_line, imp_lines[j])));
    }
    let mut acc_line = c_lines[k - 1];
    let mut acc_formula = conjuncts[k - 1].clone();
    for j in (0..k.saturating_sub(1)).rev() {
        let cj = conjuncts[j].clone();
        let s = Substitution::from_pairs([
            (Variable::new("p"), cj.clone()),
            (Variable::new("q"), acc_formula.clone()),
        ]);
        let ax = calc
            .axiom(AxiomRef::new(GroupId::C, 2))
            .expect("group c present")
            .substitute(&s);
        let c3 = inner.push(ax, Justification::Axiom(AxiomRef::new(GroupId::C, 2), s));
        let mid = inner.push(
            Formula::imp(acc_formula.clone(), Formula::and(cj.clone(), acc_formula.clone())),
            Justification::ModusPonens(c_lines[j], c3),
        );
        acc_formula = Formula::and(cj, acc_formula);
        acc_line = inner.push(acc_formula.clone(), Justification::ModusPonens(acc_line, mid));
    }
    debug_assert_eq!(acc_formula, whole);
    let _ = acc_line;
    let seg = deduction(&inner, alpha)?;
    let targets: Vec<SpliceTarget> = conjunct_lines.iter().map(|&l| SpliceTarget::Line(l)).collect();
    splice(&mut host, &seg, &targets)?;
    Ok(host)
}

/// Derivation of `(C -> alpha) -> alpha` where `C` is as in [`e_three`]
/// (premise-free, groups i and c).
fn e_two(calc: &CalculusSpec, alpha: &Formula, args: &[Formula]) -> Result<Derivation, TransformError> {
    let conjuncts: Vec<Formula> =
        args.iter().map(|x| Formula::peirce(x.clone(), alpha.clone())).collect();
    let whole = if conjuncts.is_empty() { Formula::top() } else { conj(&conjuncts) };
    let hyp = Formula::imp(whole.clone(), alpha.clone());
    if conjuncts.is_empty() {
        // (top -> alpha) -> alpha.
        let mut inner =
            Derivation::new(calc.clone(), Mode::WithoutSubstitution, vec![hyp.clone()]);
        let h = inner.push(hyp.clone(), Justification::Premise(0));
        let top_line = push_self_implication(&mut inner, &Formula::var("p"));
        inner.push(alpha.clone(), Justification::ModusPonens(top_line, h));
        return Ok(deduction(&inner, &hyp)?);
    }
    let k = conjuncts.len();
    // Innermost level: premises [hyp, C_1, ..., C_k] ⊩ alpha.
    let mut premises = vec![hyp.clone()];
    premises.extend(conjuncts.iter().cloned());
    let mut level = Derivation::new(calc.clone(), Mode::WithoutSubstitution, premises);
    let h_line = level.push(hyp.clone(), Justification::Premise(0));
    let mut x_lines = Vec::new();
    for (j, c) in conjuncts.iter().enumerate() {
        x_lines.push(level.push(c.clone(), Justification::Premise(j + 1)));
    }
    let mut acc_line = x_lines[k - 1];
    let mut acc_formula = conjuncts[k - 1].clone();
    for j in (0..k - 1).rev() {
        let cj = conjuncts[j].clone();
        let s = Substitution::from_pairs([
            (Variable::new("p"), cj.clone()),
            (Variable::new("q"), acc_formula.clone()),
        ]);
        let ax = calc
            .axiom(AxiomRef::new(GroupId::C, 2))
            .expect("group c present")
            .substitute(&s);
        let c3 = level.push(ax, Justification::Axiom(AxiomRef::new(GroupId::C, 2), s));
        let mid = level.push(
            Formula::imp(acc_formula.clone(), Formula::and(cj.clone(), acc_formula.clone())),
            Justification::ModusPonens(x_lines[j], c3),
        );
        acc_formula = Formula::and(cj, acc_formula);
        acc_line = level.push(acc_formula.clone(), Justification::ModusPonens(acc_line, mid));
    }
    level.push(alpha.clone(), Justification::ModusPonens(acc_line, h_line));
    // Peel off C_k, ..., C_1 with Peirce-double instances.
    let pd = certificate("lemma-peirce-double")?.with_calculus(calc.clone())?;
    for j in (0..k).rev() {
        let discharged = deduction(&level, &conjuncts[j])?;
        let mut host =
            Derivation::new(calc.clone(), Mode::WithoutSubstitution, discharged.premises.clone());
        let targets: Vec<SpliceTarget> =
            (0..host.premises.len()).map(SpliceTarget::Premise).collect();
        let cja_line = splice(&mut host, &discharged, &targets)?;
        let inst = pd.instantiate(&Substitution::from_pairs([
            (Variable::new("p"), args[j].clone()),
            (Variable::new("q"), alpha.clone()),
        ]))?;
        let pd_line = splice(&mut host, &inst, &[])?;
        host.push(alpha.clone(), Justification::ModusPonens(cja_line, pd_line));
        level = host;
    }
    Ok(deduction(&level, &hyp)?)
}

/// First pass: replace collected box-formulas with their boxdots, turn
/// third-m-axiom lines into hypothesis premises, inline verified snippets
/// for the first and second m-axioms, and re-check in Int□ ⊩ mode.
pub fn transform(d: &Derivation) -> Result<TransformOutput, TransformError> {
    let mut m_set = collect_m(d)?;
    let mut warnings = Vec::new();
    // Second-m-axiom consequents must have a defined replacement; extend the
    // set with trivial entries where nothing else provides one.
    for step in &d.steps {
        if let Justification::Axiom(r, s) = &step.justification {
            if r.group == GroupId::M && r.index == 1 {
                let a = axiom_binding(s, "p");
                let boxed = Formula::boxed(a.clone());
                if !m_set.contains(&boxed) {
                    warnings.push(format!(
                        "extended the collected set with '{boxed}' (second-m-axiom consequent)"
                    ));
                    m_set.add(a).roles.second_consequent = true;
                } else {
                    m_set.entry_mut(&boxed).unwrap().roles.second_consequent = true;
                }
            }
        }
    }
    let boxdot_map = boxdot(&m_set);
    let pairs = boxdot_map.pairs();
    for e in &boxdot_map.entries {
        for other in &m_set.entries {
            if e.boxdot.contains(&other.boxed) {
                warnings.push(format!(
                    "boxdot of '{}' still contains collected formula '{}'",
                    e.boxed, other.boxed
                ));
            }
        }
    }

    // First-m-axiom instance pairs, first occurrence order, deduplicated.
    let mut first_pairs: Vec<(Formula, Formula)> = Vec::new();
    for step in &d.steps {
        if let Justification::Axiom(r, s) = &step.justification {
            if r.group == GroupId::M && r.index == 0 {
                let pair = (axiom_binding(s, "p"), axiom_binding(s, "q"));
                if !first_pairs.contains(&pair) {
                    first_pairs.push(pair);
                }
            }
        }
    }

    // Hypotheses: replaced third-m-axiom lines, then the two per first-axiom
    // instance.
    let mut hypotheses: Vec<Hypothesis> = Vec::new();
    let push_hyp = |h: Hypothesis, hypotheses: &mut Vec<Hypothesis>| {
        if !hypotheses.iter().any(|x| x.formula == h.formula) {
            hypotheses.push(h);
        }
    };
    for step in &d.steps {
        if let Justification::Axiom(r, s) = &step.justification {
            if r.group != GroupId::M {
                continue;
            }
            match r.index {
                2 => {
                    let body = axiom_binding(s, "p");
                    let arg = axiom_binding(s, "q");
                    let entry = boxdot_map.by_body(&body).expect("collected");
                    let formula = step.formula.replace(&pairs);
                    let gamma = body.replace(&pairs);
                    let peirce_arg = arg.replace(&[(entry.boxed.clone(), Formula::top())])
                        .replace(&pairs);
                    let consequent = Formula::peirce(peirce_arg.clone(), gamma.clone());
                    push_hyp(
                        Hypothesis {
                            formula,
                            head: entry.boxdot.clone(),
                            peirce_arg,
                            gamma,
                            consequent,
                        },
                        &mut hypotheses,
                    );
                }
                0 => {
                    let a = axiom_binding(s, "p");
                    let b = axiom_binding(s, "q");
                    let da = boxdot_map.by_body(&a).expect("collected").boxdot.clone();
                    let db = boxdot_map.by_body(&b).expect("collected").boxdot.clone();
                    let dab = boxdot_map
                        .by_body(&Formula::imp(a.clone(), b.clone()))
                        .expect("collected")
                        .boxdot
                        .clone();
                    let cons_a = Formula::peirce(db.clone(), a.clone());
                    push_hyp(
                        Hypothesis {
                            formula: Formula::imp(da.clone(), cons_a.clone()),
                            head: da,
                            peirce_arg: db.clone(),
                            gamma: a.clone(),
                            consequent: cons_a,
                        },
                        &mut hypotheses,
                    );
                    let ab = Formula::imp(a, b);
                    let cons_ab = Formula::peirce(db.clone(), ab.clone());
                    push_hyp(
                        Hypothesis {
                            formula: Formula::imp(dab.clone(), cons_ab.clone()),
                            head: dab,
                            peirce_arg: db,
                            gamma: ab,
                            consequent: cons_ab,
                        },
                        &mut hypotheses,
                    );
                }
                _ => {}
            }
        }
    }

    // Assemble D*.
    let calc = intbox();
    let lambda: Vec<Formula> = d.premises.iter().map(|p| p.replace(&pairs)).collect();
    let hyp_premise_start = lambda.len();
    let mut premises = lambda.clone();
    premises.extend(hypotheses.iter().map(|h| h.formula.clone()));
    let mut out = Derivation::new(calc.clone(), Mode::WithoutSubstitution, premises);
    let hyp_slot = |f: &Formula, hypotheses: &[Hypothesis]| -> Option<usize> {
        hypotheses
            .iter()
            .position(|h| h.formula == *f)
            .map(|k| hyp_premise_start + k)
    };

    // Per-beta cache of the e_two / e_three conclusion lines.
    let mut e2_cache: BTreeMap<Formula, usize> = BTreeMap::new();
    let mut e3_cache: BTreeMap<Formula, usize> = BTreeMap::new();
    let mut line_map: Vec<usize> = Vec::with_capacity(d.steps.len());

    for (idx, step) in d.steps.iter().enumerate() {
        let required = step.formula.replace(&pairs);
        let mapped = match &step.justification {
            Justification::Premise(k) => out.push(required, Justification::Premise(*k)),
            Justification::ModusPonens(i, j) => {
                out.push(required, Justification::ModusPonens(line_map[*i], line_map[*j]))
            }
            Justification::Axiom(r, s) if r.group != GroupId::M => {
                let s2 = Substitution::from_pairs(
                    s.iter().map(|(v, f)| (v.clone(), f.replace(&pairs))),
                );
                let axiom = calc.axiom(*r).ok_or(KernelError::AxiomUnavailable(*r))?;
                let stated = axiom.substitute(&s2);
                if stated != required {
                    return Err(TransformError::SnippetMismatch {
                        line: idx,
                        expected: required,
                        found: stated,
                    });
                }
                out.push(required, Justification::Axiom(*r, s2))
            }
            Justification::Axiom(r, s) => match r.index {
                2 => {
                    let slot = hyp_slot(&required, &hypotheses).ok_or_else(|| {
                        TransformError::SnippetMismatch {
                            line: idx,
                            expected: required.clone(),
                            found: required.clone(),
                        }
                    })?;
                    out.push(required, Justification::Premise(slot))
                }
                1 => {
                    let body = axiom_binding(s, "p");
                    let entry = boxdot_map.by_body(&body).expect("collected or extended");
                    let e3_line = match e3_cache.get(&body) {
                        Some(&l) => l,
                        None => {
                            let seg = e_three(&calc, &entry.body, &entry.args_top)?;
                            let l = splice(&mut out, &seg, &[])?;
                            e3_cache.insert(body.clone(), l);
                            l
                        }
                    };
                    let found = out.steps[e3_line].formula.clone();
                    if found != required {
                        return Err(TransformError::SnippetMismatch {
                            line: idx,
                            expected: required,
                            found,
                        });
                    }
                    e3_line
                }
                0 => {
                    let a = axiom_binding(s, "p");
                    let b = axiom_binding(s, "q");
                    let entry_b = boxdot_map.by_body(&b).expect("collected").clone();
                    let e2_line = match e2_cache.get(&b) {
                        Some(&l) => l,
                        None => {
                            let seg = e_two(&calc, &entry_b.body, &entry_b.args_top)?;
                            let l = splice(&mut out, &seg, &[])?;
                            e2_cache.insert(b.clone(), l);
                            l
                        }
                    };
                    let e3_line = match e3_cache.get(&b) {
                        Some(&l) => l,
                        None => {
                            let seg = e_three(&calc, &entry_b.body, &entry_b.args_top)?;
                            let l = splice(&mut out, &seg, &[])?;
                            e3_cache.insert(b.clone(), l);
                            l
                        }
                    };
                    let da = boxdot_map.by_body(&a).expect("collected").boxdot.clone();
                    let db = entry_b.boxdot.clone();
                    let dab = boxdot_map
                        .by_body(&Formula::imp(a.clone(), b.clone()))
                        .expect("collected")
                        .boxdot
                        .clone();
                    let snippet = certificate("snippet-e-five")?
                        .with_calculus(calc.clone())?
                        .instantiate(&Substitution::from_pairs([
                            (Variable::new("a"), a.clone()),
                            (Variable::new("b"), b.clone()),
                            (Variable::new("da"), da.clone()),
                            (Variable::new("db"), db),
                            (Variable::new("dab"), dab),
                        ]))?;
                    let hyp_a = &snippet.premises[0];
                    let hyp_ab = &snippet.premises[1];
                    let slot_a = hyp_slot(hyp_a, &hypotheses).ok_or_else(|| {
                        TransformError::SnippetMismatch {
                            line: idx,
                            expected: hyp_a.clone(),
                            found: hyp_a.clone(),
                        }
                    })?;
                    let slot_ab = hyp_slot(hyp_ab, &hypotheses).ok_or_else(|| {
                        TransformError::SnippetMismatch {
                            line: idx,
                            expected: hyp_ab.clone(),
                            found: hyp_ab.clone(),
                        }
                    })?;
                    let line = splice(
                        &mut out,
                        &snippet,
                        &[
                            SpliceTarget::Premise(slot_a),
                            SpliceTarget::Premise(slot_ab),
                            SpliceTarget::Line(e2_line),
                            SpliceTarget::Line(e3_line),
                        ],
                    )?;
                    let found = out.steps[line].formula.clone();
                    if found != required {
                        return Err(TransformError::SnippetMismatch {
                            line: idx,
                            expected: required,
                            found,
                        });
                    }
                    line
                }
                _ => unreachable!("group m has three axioms"),
            },
            Justification::Subst(..) => return Err(TransformError::NotRefined),
            Justification::Necessitation(_) => {
                return Err(TransformError::Kernel(KernelError::InvalidInput {
                    line: idx,
                    message: String::from("necessitation in an E-derivation"),
                }))
            }
        };
        line_map.push(mapped);
    }
    // The conclusion must remain the final step.
    let last = *line_map.last().expect("nonempty");
    if last != out.steps.len() - 1 {
        let dup = out.steps[last].clone();
        out.push(dup.formula, dup.justification);
    }

    let v = check(&out)?;
    if let Some(e) = v.first_error() {
        return Err(TransformError::Assembly {
            stage: "transform",
            line: e.line,
            message: e.message.clone(),
        });
    }
    Ok(TransformOutput {
        source: d.clone(),
        derivation: out,
        m_set,
        boxdot_map,
        hypotheses,
        hyp_premise_start,
        lambda,
        warnings,
    })
}

/// Result of the boxtimes pass.
#[derive(Debug, Clone)]
pub struct BoxtimesOutput {
    /// Int□ ⊩ derivation whose premises are the replaced originals only.
    pub derivation: Derivation,
    /// `(head, boxtimes)` for each residual-hypothesis head.
    pub boxtimes: Vec<(Formula, Formula)>,
    pub lambda: Vec<Formula>,
}

/// Second pass: group the residual hypotheses by their boxdot heads, build
/// each boxtimes conjunction, and re-derive the transformed derivation with
/// the updated assignment, discharging every former hypothesis by a
/// conjunction projection. The output depends only on the original
/// derivation and the boxtimes assignment.
pub fn boxtimes_pass(t: &TransformOutput) -> Result<BoxtimesOutput, TransformError> {
    // Group hypotheses by head formula, first occurrence order.
    let mut heads: Vec<Formula> = Vec::new();
    let mut groups: BTreeMap<Formula, Vec<&Hypothesis>> = BTreeMap::new();
    for h in &t.hypotheses {
        if !heads.contains(&h.head) {
            heads.push(h.head.clone());
        }
        groups.entry(h.head.clone()).or_default().push(h);
    }
    for h in &t.hypotheses {
        if h.peirce_arg.contains(&h.head) {
            return Err(TransformError::SelfReferentialBoxtimes {
                head: h.head.clone(),
                arg: h.peirce_arg.clone(),
            });
        }
        if h.gamma.contains(&h.head) {
            return Err(TransformError::SelfReferentialBoxtimes {
                head: h.head.clone(),
                arg: h.gamma.clone(),
            });
        }
    }
    let mut boxtimes: Vec<(Formula, Formula)> = Vec::new();
    for head in &heads {
        let conjuncts: Vec<Formula> =
            groups[head].iter().map(|h| h.consequent.clone()).collect();
        boxtimes.push((head.clone(), conj(&conjuncts)));
    }

    // Updated assignment: entries whose boxdot heads a hypothesis group take
    // the boxtimes conjunction; the projection arguments come from the group.
    struct Updated {
        boxed: Formula,
        body: Formula,
        args: Vec<Formula>,
        replacement: Formula,
        changed: bool,
    }
    let mut updated: Vec<Updated> = Vec::new();
    for entry in &t.boxdot_map.entries {
        match groups.get(&entry.boxdot) {
            Some(hyps) => {
                // Every grouped hypothesis must live on this entry's body,
                // or the projection arguments are meaningless.
                for h in hyps.iter() {
                    if h.gamma != entry.body {
                        return Err(TransformError::CascadedReplacement {
                            line: 0,
                            formula: h.formula.clone(),
                        });
                    }
                }
                let args: Vec<Formula> = hyps.iter().map(|h| h.peirce_arg.clone()).collect();
                let conjuncts: Vec<Formula> =
                    hyps.iter().map(|h| h.consequent.clone()).collect();
                let replacement = conj(&conjuncts);
                updated.push(Updated {
                    boxed: entry.boxed.clone(),
                    body: entry.body.clone(),
                    changed: replacement != entry.boxdot,
                    args,
                    replacement,
                });
            }
            None => updated.push(Updated {
                boxed: entry.boxed.clone(),
                body: entry.body.clone(),
                args: entry.args_top.clone(),
                replacement: entry.boxdot.clone(),
                changed: false,
            }),
        }
    }
    let pairs: Vec<(Formula, Formula)> =
        updated.iter().map(|u| (u.boxed.clone(), u.replacement.clone())).collect();
    let by_body = |body: &Formula| updated.iter().find(|u| u.body == *body);

    // Reassemble from the source derivation.
    let d = &t.source;
    let calc = t.derivation.calculus.clone();
    let lambda: Vec<Formula> = d.premises.iter().map(|p| p.replace(&pairs)).collect();
    let mut out = Derivation::new(calc.clone(), Mode::WithoutSubstitution, lambda.clone());
    let mut e2_cache: BTreeMap<Formula, usize> = BTreeMap::new();
    let mut e3_cache: BTreeMap<Formula, usize> = BTreeMap::new();
    let mut proj_cache: BTreeMap<Formula, usize> = BTreeMap::new();
    let mut line_map: Vec<usize> = Vec::with_capacity(d.steps.len());

    // Derive `u.replacement -> P(x, u.body)` by projection, memoized.
    let project = |u: &Updated,
                       target: &Formula,
                       idx: usize,
                       out: &mut Derivation,
                       proj_cache: &mut BTreeMap<Formula, usize>|
     -> Result<usize, TransformError> {
        let goal = Formula::imp(u.replacement.clone(), target.clone());
        if let Some(&l) = proj_cache.get(&goal) {
            return Ok(l);
        }
        let conjuncts: Vec<Formula> = u
            .args
            .iter()
            .map(|x| Formula::peirce(x.clone(), u.body.clone()))
            .collect();
        let seg = if u.replacement == *target {
            ident(&calc, target)
        } else if let Some(j) = conjuncts.iter().position(|c| c == target) {
            conj_project(&calc, &conjuncts, j)
        } else {
            return Err(TransformError::CascadedReplacement {
                line: idx,
                formula: target.clone(),
            });
        };
        let l = splice(out, &seg, &[])?;
        proj_cache.insert(goal, l);
        Ok(l)
    };

    for (idx, step) in d.steps.iter().enumerate() {
        let required = step.formula.replace(&pairs);
        let mapped = match &step.justification {
            Justification::Premise(k) => out.push(required, Justification::Premise(*k)),
            Justification::ModusPonens(i, j) => {
                out.push(required, Justification::ModusPonens(line_map[*i], line_map[*j]))
            }
            Justification::Axiom(r, s) if r.group != GroupId::M => {
                let s2 = Substitution::from_pairs(
                    s.iter().map(|(v, f)| (v.clone(), f.replace(&pairs))),
                );
                let axiom = calc.axiom(*r).ok_or(KernelError::AxiomUnavailable(*r))?;
                let stated = axiom.substitute(&s2);
                if stated != required {
                    return Err(TransformError::CascadedReplacement {
                        line: idx,
                        formula: step.formula.clone(),
                    });
                }
                out.push(required, Justification::Axiom(*r, s2))
            }
            Justification::Axiom(r, s) => match r.index {
                2 => {
                    let body = axiom_binding(s, "p");
                    let u = by_body(&body).expect("collected");
                    let Formula::Imp(head, target) = &required else {
                        return Err(TransformError::CascadedReplacement {
                            line: idx,
                            formula: required.clone(),
                        });
                    };
                    if **head != u.replacement {
                        return Err(TransformError::CascadedReplacement {
                            line: idx,
                            formula: required.clone(),
                        });
                    }
                    let line = project(u, target, idx, &mut out, &mut proj_cache)?;
                    debug_assert_eq!(out.steps[line].formula, required);
                    line
                }
                1 => {
                    let body = axiom_binding(s, "p");
                    let u = by_body(&body).expect("collected or extended");
                    let e3_line = match e3_cache.get(&body) {
                        Some(&l) => l,
                        None => {
                            let seg = e_three(&calc, &u.body, &u.args)?;
                            let l = splice(&mut out, &seg, &[])?;
                            e3_cache.insert(body.clone(), l);
                            l
                        }
                    };
                    let found = out.steps[e3_line].formula.clone();
                    if found != required {
                        return Err(TransformError::SnippetMismatch {
                            line: idx,
                            expected: required,
                            found,
                        });
                    }
                    e3_line
                }
                0 => {
                    let a = axiom_binding(s, "p");
                    let b = axiom_binding(s, "q");
                    let u_a = by_body(&a).expect("collected");
                    let u_b = by_body(&b).expect("collected");
                    let u_ab =
                        by_body(&Formula::imp(a.clone(), b.clone())).expect("collected");
                    // The Peirce arguments of the residual hypotheses cite the
                    // first-pass boxdot of b; an updated b cannot be patched.
                    if u_b.changed {
                        return Err(TransformError::CascadedReplacement {
                            line: idx,
                            formula: u_b.boxed.clone(),
                        });
                    }
                    let e2_line = match e2_cache.get(&b) {
                        Some(&l) => l,
                        None => {
                            let seg = e_two(&calc, &u_b.body, &u_b.args)?;
                            let l = splice(&mut out, &seg, &[])?;
                            e2_cache.insert(b.clone(), l);
                            l
                        }
                    };
                    let e3_line = match e3_cache.get(&b) {
                        Some(&l) => l,
                        None => {
                            let seg = e_three(&calc, &u_b.body, &u_b.args)?;
                            let l = splice(&mut out, &seg, &[])?;
                            e3_cache.insert(b.clone(), l);
                            l
                        }
                    };
                    let snippet = certificate("snippet-e-five")?
                        .with_calculus(calc.clone())?
                        .instantiate(&Substitution::from_pairs([
                            (Variable::new("a"), a.clone()),
                            (Variable::new("b"), b.clone()),
                            (Variable::new("da"), u_a.replacement.clone()),
                            (Variable::new("db"), u_b.replacement.clone()),
                            (Variable::new("dab"), u_ab.replacement.clone()),
                        ]))?;
                    // Discharge the two hypothesis premises by projection.
                    let cons_a = Formula::peirce(u_b.replacement.clone(), a.clone());
                    let proj_a = project(u_a, &cons_a, idx, &mut out, &mut proj_cache)?;
                    let ab = Formula::imp(a.clone(), b.clone());
                    let cons_ab = Formula::peirce(u_b.replacement.clone(), ab);
                    let proj_ab = project(u_ab, &cons_ab, idx, &mut out, &mut proj_cache)?;
                    let line = splice(
                        &mut out,
                        &snippet,
                        &[
                            SpliceTarget::Line(proj_a),
                            SpliceTarget::Line(proj_ab),
                            SpliceTarget::Line(e2_line),
                            SpliceTarget::Line(e3_line),
                        ],
                    )?;
                    let found = out.steps[line].formula.clone();
                    if found != required {
                        return Err(TransformError::SnippetMismatch {
                            line: idx,
                            expected: required,
                            found,
                        });
                    }
                    line
                }
                _ => unreachable!("group m has three axioms"),
            },
            Justification::Subst(..) | Justification::Necessitation(_) => {
                return Err(TransformError::Assembly {
                    stage: "boxtimes",
                    line: idx,
                    message: String::from("unexpected justification"),
                })
            }
        };
        line_map.push(mapped);
    }
    let last = *line_map.last().expect("nonempty");
    if last != out.steps.len() - 1 {
        let dup = out.steps[last].clone();
        out.push(dup.formula, dup.justification);
    }
    let v = check(&out)?;
    if let Some(e) = v.first_error() {
        return Err(TransformError::Assembly {
            stage: "boxtimes",
            line: e.line,
            message: e.message.clone(),
        });
    }
    Ok(BoxtimesOutput { derivation: out, boxtimes, lambda })
}

/// Report of the final extraction.
#[derive(Debug, Clone)]
pub struct ExtractReport {
    pub pattern: Formula,
    pub conclusion: Formula,
    /// Substitutions matching each premise against the pattern.
    pub premise_instances: Vec<Substitution>,
    /// Whether the extracted certificate also re-checks under E (the
    /// converse direction of equipollence; E extends Int).
    pub converse_checks_in_e: bool,
}

/// Final pass: erase every box, line by line, producing an Int derivation
/// of `b` from instances of `a`.
pub fn extract_assertoric(
    d: &Derivation,
    a: &Formula,
    b: &Formula,
) -> Result<(Derivation, ExtractReport), TransformError> {
    if b.language() != Language::Assertoric {
        return Err(TransformError::NonAssertoricConclusion(b.clone()));
    }
    if d.has_subst() {
        return Err(TransformError::NotRefined);
    }
    checked_input(d)?;
    let int = calculus("Int").expect("registered");
    let mut premise_instances = Vec::new();
    let mut premises = Vec::new();
    for p in &d.premises {
        let erased = p.erase_boxes();
        let s = match_formula(a, &erased).ok_or_else(|| TransformError::PremiseNotInstance {
            premise: erased.clone(),
            pattern: a.clone(),
        })?;
        premise_instances.push(s);
        premises.push(erased);
    }
    let mut out = Derivation::new(int.clone(), Mode::WithoutSubstitution, premises);
    for (idx, step) in d.steps.iter().enumerate() {
        let erased = step.formula.erase_boxes();
        let justification = match &step.justification {
            Justification::Premise(k) => Justification::Premise(*k),
            Justification::ModusPonens(i, j) => Justification::ModusPonens(*i, *j),
            Justification::Axiom(r, s) => {
                if !matches!(r.group, GroupId::I | GroupId::C | GroupId::D | GroupId::N) {
                    return Err(TransformError::ResidualModalAxiom { line: idx });
                }
                Justification::Axiom(
                    *r,
                    Substitution::from_pairs(s.iter().map(|(v, f)| (v.clone(), f.erase_boxes()))),
                )
            }
            Justification::Subst(..) | Justification::Necessitation(_) => {
                return Err(TransformError::ResidualModalAxiom { line: idx })
            }
        };
        out.push(erased, justification);
    }
    let v = check(&out)?;
    if let Some(e) = v.first_error() {
        return Err(TransformError::Assembly {
            stage: "extract",
            line: e.line,
            message: e.message.clone(),
        });
    }
    if v.conclusion != *b {
        return Err(TransformError::SnippetMismatch {
            line: d.steps.len() - 1,
            expected: b.clone(),
            found: v.conclusion,
        });
    }
    // Converse direction: the same certificate re-checks under E.
    let converse_checks_in_e = out
        .with_calculus(calculus("E").expect("registered"))
        .ok()
        .and_then(|e_version| check(&e_version).ok())
        .is_some_and(|verdict| verdict.ok);
    let report = ExtractReport {
        pattern: a.clone(),
        conclusion: b.clone(),
        premise_instances,
        converse_checks_in_e,
    };
    Ok((out, report))
}

/// Whole pipeline output.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub transform: TransformOutput,
    pub boxtimes: BoxtimesOutput,
    pub extracted: Derivation,
    pub report: ExtractReport,
}

/// Run transform, the boxtimes pass, and the assertoric extraction, checking
/// every stage.
pub fn run_pipeline(
    d: &Derivation,
    a: &Formula,
    b: &Formula,
) -> Result<PipelineOutput, TransformError> {
    let t = transform(d)?;
    let bx = boxtimes_pass(&t)?;
    let (extracted, report) = extract_assertoric(&bx.derivation, a, b)?;
    Ok(PipelineOutput { transform: t, boxtimes: bx, extracted, report })
}
