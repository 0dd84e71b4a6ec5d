//! Bundled derivation certificates and the small derivation builders used to
//! assemble them (identity blocks, syllogism, antecedent commutation,
//! conjunction projections).
//!
//! Every certificate returned by [`certificate`] passes [`check`] in the
//! fragment it is registered with; the store's own tests enforce this.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::calculi::{calculus, AxiomRef, CalculusSpec, GroupId};
use crate::kernel::{
    deduction, push_self_implication, splice, Derivation, Justification,
    KernelError, Mode, SpliceTarget,
};
use crate::search::search_proof;
use crate::syntax::{parse, Formula, Substitution, Variable};

fn pf(calc: &CalculusSpec, text: &str) -> Formula {
    parse(text, calc.language()).expect("bundled formula parses")
}

/// Fragment of a registered calculus, by name.
fn frag(name: &str, groups: &[GroupId]) -> CalculusSpec {
    calculus(name).expect("registered").fragment(groups).expect("valid fragment")
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// Premise-free derivation of `a -> a` using group (i) only.
pub(crate) fn ident(calc: &CalculusSpec, a: &Formula) -> Derivation {
    let mut d = Derivation::new(calc.clone(), Mode::WithoutSubstitution, Vec::new());
    push_self_implication(&mut d, a);
    d
}

/// Derivation of `x -> z` from premises `[x -> y, y -> z]`, group (i) only.
pub(crate) fn syllogism(calc: &CalculusSpec, x: &Formula, y: &Formula, z: &Formula) -> Derivation {
    let xy = Formula::imp(x.clone(), y.clone());
    let yz = Formula::imp(y.clone(), z.clone());
    let mut d = Derivation::new(
        calc.clone(),
        Mode::WithoutSubstitution,
        vec![xy.clone(), yz.clone()],
    );
    let l_xy = d.push(xy, Justification::Premise(0));
    let l_yz = d.push(yz.clone(), Justification::Premise(1));
    let hoist = Substitution::from_pairs([
        (Variable::new("p"), yz.clone()),
        (Variable::new("q"), x.clone()),
    ]);
    let k = d.push(
        Formula::imp(yz.clone(), Formula::imp(x.clone(), yz.clone())),
        Justification::Axiom(AxiomRef::new(GroupId::I, 0), hoist),
    );
    let x_yz = d.push(Formula::imp(x.clone(), yz), Justification::ModusPonens(l_yz, k));
    let s_inst = Substitution::from_pairs([
        (Variable::new("p"), x.clone()),
        (Variable::new("q"), y.clone()),
        (Variable::new("r"), z.clone()),
    ]);
    let s_axiom = calc.axiom(AxiomRef::new(GroupId::I, 1)).expect("group i present");
    let s_line = d.push(
        s_axiom.substitute(&s_inst),
        Justification::Axiom(AxiomRef::new(GroupId::I, 1), s_inst),
    );
    let step = d.push(
        Formula::imp(
            Formula::imp(x.clone(), y.clone()),
            Formula::imp(x.clone(), z.clone()),
        ),
        Justification::ModusPonens(x_yz, s_line),
    );
    d.push(Formula::imp(x.clone(), z.clone()), Justification::ModusPonens(l_xy, step));
    d
}

/// Derivation of `x -> (y -> z)` from the premise `y -> (x -> z)`.
pub(crate) fn commute(calc: &CalculusSpec, x: &Formula, y: &Formula, z: &Formula) -> Derivation {
    let premise = Formula::imp(y.clone(), Formula::imp(x.clone(), z.clone()));
    let mut inner = Derivation::new(
        calc.clone(),
        Mode::WithoutSubstitution,
        vec![premise, x.clone(), y.clone()],
    );
    let l_p = inner.push(inner.premises[0].clone(), Justification::Premise(0));
    let l_x = inner.push(x.clone(), Justification::Premise(1));
    let l_y = inner.push(y.clone(), Justification::Premise(2));
    let l_xz = inner.push(
        Formula::imp(x.clone(), z.clone()),
        Justification::ModusPonens(l_y, l_p),
    );
    inner.push(z.clone(), Justification::ModusPonens(l_x, l_xz));
    let step = deduction(&inner, y).expect("discharge y");
    deduction(&step, x).expect("discharge x")
}

/// Right-associated conjunction of a nonempty list.
pub(crate) fn conj(conjuncts: &[Formula]) -> Formula {
    let mut it = conjuncts.iter().rev();
    let mut acc = it.next().expect("nonempty").clone();
    for c in it {
        acc = Formula::and(c.clone(), acc);
    }
    acc
}

/// Premise-free derivation of `conj(conjuncts) -> conjuncts[j]`, groups (i,c).
pub(crate) fn conj_project(calc: &CalculusSpec, conjuncts: &[Formula], j: usize) -> Derivation {
    assert!(j < conjuncts.len());
    if conjuncts.len() == 1 {
        return ident(calc, &conjuncts[0]);
    }
    let whole = conj(conjuncts);
    let head = conjuncts[0].clone();
    let rest = conj(&conjuncts[1..]);
    let mut d = Derivation::new(calc.clone(), Mode::WithoutSubstitution, Vec::new());
    if j == 0 {
        let s = Substitution::from_pairs([
            (Variable::new("p"), head.clone()),
            (Variable::new("q"), rest),
        ]);
        d.push(
            Formula::imp(whole, head),
            Justification::Axiom(AxiomRef::new(GroupId::C, 0), s),
        );
        return d;
    }
    let s = Substitution::from_pairs([
        (Variable::new("p"), head),
        (Variable::new("q"), rest.clone()),
    ]);
    let l_tail = d.push(
        Formula::imp(whole.clone(), rest.clone()),
        Justification::Axiom(AxiomRef::new(GroupId::C, 1), s),
    );
    let sub = conj_project(calc, &conjuncts[1..], j - 1);
    let l_sub = splice(&mut d, &sub, &[]).expect("premise-free splice");
    let syl = syllogism(calc, &whole, &rest, &conjuncts[j]);
    splice(&mut d, &syl, &[SpliceTarget::Line(l_tail), SpliceTarget::Line(l_sub)])
        .expect("syllogism splice");
    d
}

/// Premise-free derivation of `(q -> p) -> ((r -> p) -> (r -> q) -> ... )`?
/// No: the closed composition law `(r -> q) -> ((q -> p) -> (r -> p))`.
fn closed_syllogism(calc: &CalculusSpec) -> Derivation {
    let r = Formula::var("r");
    let q = Formula::var("q");
    let p = Formula::var("p");
    let mut inner = Derivation::new(
        calc.clone(),
        Mode::WithoutSubstitution,
        vec![
            Formula::imp(r.clone(), q.clone()),
            Formula::imp(q.clone(), p.clone()),
            r.clone(),
        ],
    );
    let l_rq = inner.push(inner.premises[0].clone(), Justification::Premise(0));
    let l_qp = inner.push(inner.premises[1].clone(), Justification::Premise(1));
    let l_r = inner.push(r.clone(), Justification::Premise(2));
    let l_q = inner.push(q.clone(), Justification::ModusPonens(l_r, l_rq));
    inner.push(p, Justification::ModusPonens(l_q, l_qp));
    let s1 = deduction(&inner, &r).expect("discharge r");
    let s2 = deduction(&s1, &inner.premises[1]).expect("discharge q -> p");
    deduction(&s2, &inner.premises[0]).expect("discharge r -> q")
}

// ---------------------------------------------------------------------------
// The bundled store
// ---------------------------------------------------------------------------

/// Names of all bundled certificates.
pub fn certificate_names() -> &'static [&'static str] {
    &[
        "int-deducibility-2-hyp",
        "int-deducibility-2",
        "prop31a-hyp",
        "prop31a",
        "prop31b-hyp",
        "prop31b",
        "lemma-p-implies-P",
        "lemma-negative-occurrence",
        "lemma-13-inkm",
        "lemma-peirce-double",
        "snippet-e-five",
        "e-derives-kuzstar-axiom",
        "demo-e-derivation",
        "demo-e-derivation-2",
        "demo-e-derivation-3",
    ]
}

/// Look up a bundled certificate by name. Certificates are rebuilt on each
/// call; they are small.
pub fn certificate(name: &str) -> Result<Derivation, KernelError> {
    match name {
        "int-deducibility-2-hyp" => Ok(int_deducibility_2_hyp()),
        "int-deducibility-2" => {
            let hyp = int_deducibility_2_hyp();
            let a = hyp.premises[0].clone();
            deduction(&hyp, &a)
        }
        "prop31a-hyp" => Ok(kuz_form_hyp(
            frag("Kuz", &[GroupId::I, GroupId::C, GroupId::D, GroupId::Kuz]),
            AxiomRef::new(GroupId::Kuz, 0),
        )),
        "prop31a" => {
            let hyp = certificate("prop31a-hyp")?;
            let box_p = hyp.premises[0].clone();
            deduction(&hyp, &box_p)
        }
        "prop31b-hyp" => Ok(prop31b_hyp()),
        "prop31b" => {
            let hyp = prop31b_hyp();
            let step = deduction(&hyp, &hyp.premises[1])?;
            deduction(&step, &hyp.premises[0])
        }
        "lemma-p-implies-P" => Ok(lemma_p_implies_peirce()),
        "lemma-negative-occurrence" => Ok(lemma_negative_occurrence()),
        "lemma-13-inkm" => Ok(lemma_13_inkm()),
        "lemma-peirce-double" => Ok(lemma_peirce_double()),
        "snippet-e-five" => Ok(snippet_e_five()),
        "e-derives-kuzstar-axiom" => {
            let hyp = kuz_form_hyp(
                frag("E", &[GroupId::I, GroupId::C, GroupId::D, GroupId::M]),
                AxiomRef::new(GroupId::M, 2),
            );
            let box_p = hyp.premises[0].clone();
            deduction(&hyp, &box_p)
        }
        "demo-e-derivation" => Ok(demo_e_derivation()),
        "demo-e-derivation-2" => Ok(demo_e_derivation_2()),
        "demo-e-derivation-3" => Ok(demo_e_derivation_3()),
        _ => Err(KernelError::UnknownCertificate(String::from(name))),
    }
}

/// `Int[i,c,d] + (q | (q -> p)) -> p ⊩ q | (q -> p)`, mirroring the five
/// displayed macro steps with the cited sub-derivations inlined.
fn int_deducibility_2_hyp() -> Derivation {
    let calc = frag("Int", &[GroupId::I, GroupId::C, GroupId::D]);
    let x = pf(&calc, "q | (q -> p)");
    let p = pf(&calc, "p");
    let q = pf(&calc, "q");
    let qp = pf(&calc, "q -> p");
    let premise = Formula::imp(x.clone(), p.clone());

    let mut d = Derivation::new(calc.clone(), Mode::WithoutSubstitution, vec![premise.clone()]);
    let l_prem = d.push(premise, Justification::Premise(0));
    // q -> (q | (q -> p)) and (q -> p) -> (q | (q -> p))
    let s1 = Substitution::from_pairs([
        (Variable::new("p"), q.clone()),
        (Variable::new("q"), qp.clone()),
    ]);
    let l_d1 = d.push(
        Formula::imp(q.clone(), x.clone()),
        Justification::Axiom(AxiomRef::new(GroupId::D, 0), s1),
    );
    let s2 = Substitution::from_pairs([
        (Variable::new("p"), qp.clone()),
        (Variable::new("q"), q.clone()),
    ]);
    let l_d2 = d.push(
        Formula::imp(qp.clone(), x.clone()),
        Justification::Axiom(AxiomRef::new(GroupId::D, 1), s2),
    );
    // q -> p, (q -> p) -> p
    let syl1 = syllogism(&calc, &q, &x, &p);
    let l_qp = splice(&mut d, &syl1, &[SpliceTarget::Line(l_d1), SpliceTarget::Line(l_prem)])
        .expect("splice");
    let syl2 = syllogism(&calc, &qp, &x, &p);
    let l_qpp = splice(&mut d, &syl2, &[SpliceTarget::Line(l_d2), SpliceTarget::Line(l_prem)])
        .expect("splice");
    let l_p = d.push(p.clone(), Justification::ModusPonens(l_qp, l_qpp));
    // The displayed intermediate conjunctions (q -> p) & ((q -> p) -> p)
    // and (q -> p) & p.
    let qpp = Formula::imp(qp.clone(), p.clone());
    let c3 = Substitution::from_pairs([
        (Variable::new("p"), qp.clone()),
        (Variable::new("q"), qpp.clone()),
    ]);
    let l_c3 = d.push(
        Formula::imp(
            qp.clone(),
            Formula::imp(qpp.clone(), Formula::and(qp.clone(), qpp.clone())),
        ),
        Justification::Axiom(AxiomRef::new(GroupId::C, 2), c3),
    );
    let l_mid = d.push(
        Formula::imp(qpp.clone(), Formula::and(qp.clone(), qpp.clone())),
        Justification::ModusPonens(l_qp, l_c3),
    );
    d.push(Formula::and(qp.clone(), qpp), Justification::ModusPonens(l_qpp, l_mid));
    let c3b = Substitution::from_pairs([
        (Variable::new("p"), qp.clone()),
        (Variable::new("q"), p.clone()),
    ]);
    let l_c3b = d.push(
        Formula::imp(
            qp.clone(),
            Formula::imp(p.clone(), Formula::and(qp.clone(), p.clone())),
        ),
        Justification::Axiom(AxiomRef::new(GroupId::C, 2), c3b),
    );
    let l_midb = d.push(
        Formula::imp(p.clone(), Formula::and(qp.clone(), p.clone())),
        Justification::ModusPonens(l_qp, l_c3b),
    );
    d.push(Formula::and(qp.clone(), p), Justification::ModusPonens(l_p, l_midb));
    // q | (q -> p) by the second disjunction axiom applied to q -> p.
    d.push(x, Justification::ModusPonens(l_qp, l_d2));
    d
}

/// `calc + []p ⊩ q | (q -> p)` where `calc` provides the Kuz-form axiom
/// `[]p -> (((q -> p) -> q) -> q)` at `kuz_ref`. Inlines display (2).
fn kuz_form_hyp(calc: CalculusSpec, kuz_ref: AxiomRef) -> Derivation {
    let a = pf(&calc, "q | (q -> p)");
    let p = pf(&calc, "p");
    let box_p = Formula::boxed(p.clone());
    let mut d = Derivation::new(calc.clone(), Mode::WithoutSubstitution, vec![box_p.clone()]);
    let l1 = d.push(box_p, Justification::Premise(0));
    // []p -> (((A -> p) -> A) -> A), instance with q := A.
    let s = Substitution::single(Variable::new("q"), a.clone());
    let inst = calc.axiom(kuz_ref).expect("kuz-form axiom").substitute(&s);
    let l2 = d.push(inst, Justification::Axiom(kuz_ref, s));
    let l3 = d.push(
        Formula::imp(
            Formula::imp(Formula::imp(a.clone(), p.clone()), a.clone()),
            a.clone(),
        ),
        Justification::ModusPonens(l1, l2),
    );
    // Display (2): ((q | (q -> p)) -> p) -> (q | (q -> p)), i.e. (A -> p) -> A.
    let display2 = certificate("int-deducibility-2")
        .expect("store")
        .with_calculus(calc.clone())
        .expect("shared groups");
    let l5 = splice(&mut d, &display2, &[]).expect("premise-free splice");
    d.push(a, Justification::ModusPonens(l5, l3));
    d
}

/// `KuzStar[i,c,d,kuzstar] + {[]p, (q -> p) -> q} ⊩ q`.
fn prop31b_hyp() -> Derivation {
    let calc = frag("KuzStar", &[GroupId::I, GroupId::C, GroupId::D, GroupId::KuzStar]);
    let p = pf(&calc, "p");
    let q = pf(&calc, "q");
    let box_p = Formula::boxed(p.clone());
    let hyp = pf(&calc, "(q -> p) -> q");
    let a = pf(&calc, "q | (q -> p)");
    let qq = Formula::imp(q.clone(), q.clone());

    let mut d = Derivation::new(
        calc.clone(),
        Mode::WithoutSubstitution,
        vec![box_p.clone(), hyp.clone()],
    );
    let l1 = d.push(box_p, Justification::Premise(0));
    let l1b = d.push(hyp.clone(), Justification::Premise(1));
    let l2 = d.push(
        pf(&calc, "[]p -> (q | (q -> p))"),
        Justification::Axiom(AxiomRef::new(GroupId::KuzStar, 0), Substitution::identity()),
    );
    let l3 = d.push(a.clone(), Justification::ModusPonens(l1, l2));
    // (4) q -> q, derivable in Int[i].
    let l4 = push_self_implication(&mut d, &q);
    // (5) (q -> q) & ((q -> p) -> q).
    let c3 = Substitution::from_pairs([
        (Variable::new("p"), qq.clone()),
        (Variable::new("q"), hyp.clone()),
    ]);
    let l_c3 = d.push(
        Formula::imp(qq.clone(), Formula::imp(hyp.clone(), Formula::and(qq.clone(), hyp.clone()))),
        Justification::Axiom(AxiomRef::new(GroupId::C, 2), c3),
    );
    let l_mid = d.push(
        Formula::imp(hyp.clone(), Formula::and(qq.clone(), hyp.clone())),
        Justification::ModusPonens(l4, l_c3),
    );
    d.push(Formula::and(qq.clone(), hyp.clone()), Justification::ModusPonens(l1b, l_mid));
    // (6) (q | (q -> p)) -> q via the third disjunction axiom.
    let d3 = Substitution::from_pairs([
        (Variable::new("p"), q.clone()),
        (Variable::new("q"), Formula::imp(q.clone(), p.clone())),
        (Variable::new("r"), q.clone()),
    ]);
    let d3_axiom = calc.axiom(AxiomRef::new(GroupId::D, 2)).unwrap().substitute(&d3);
    let l_d3 = d.push(d3_axiom, Justification::Axiom(AxiomRef::new(GroupId::D, 2), d3));
    let l_step = d.push(
        Formula::imp(hyp.clone(), Formula::imp(a.clone(), q.clone())),
        Justification::ModusPonens(l4, l_d3),
    );
    let l6 = d.push(Formula::imp(a.clone(), q.clone()), Justification::ModusPonens(l1b, l_step));
    // (7) q.
    d.push(q, Justification::ModusPonens(l3, l6));
    d
}

/// `Int[i] ⊢ p -> P(q, p)` via the deduction theorem.
fn lemma_p_implies_peirce() -> Derivation {
    let calc = frag("Int", &[GroupId::I]);
    let p = pf(&calc, "p");
    let hyp = pf(&calc, "(q -> p) -> q");
    let mut inner = Derivation::new(
        calc.clone(),
        Mode::WithoutSubstitution,
        vec![p.clone(), hyp.clone()],
    );
    let l1 = inner.push(p.clone(), Justification::Premise(0));
    let l2 = inner.push(hyp.clone(), Justification::Premise(1));
    let s = Substitution::from_pairs([
        (Variable::new("p"), p.clone()),
        (Variable::new("q"), pf(&calc, "q")),
    ]);
    let l3 = inner.push(
        pf(&calc, "p -> (q -> p)"),
        Justification::Axiom(AxiomRef::new(GroupId::I, 0), s),
    );
    let l4 = inner.push(pf(&calc, "q -> p"), Justification::ModusPonens(l1, l3));
    inner.push(pf(&calc, "q"), Justification::ModusPonens(l4, l2));
    let step = deduction(&inner, &hyp).expect("discharge (q -> p) -> q");
    deduction(&step, &p).expect("discharge p")
}

/// `Int[i] ⊢ (q -> p) -> (((r -> p) -> r) -> ((r -> q) -> r))`.
fn lemma_negative_occurrence() -> Derivation {
    let calc = frag("Int", &[GroupId::I]);
    let rq = pf(&calc, "r -> q");
    let qp = pf(&calc, "q -> p");
    let rp_r = pf(&calc, "(r -> p) -> r");
    let mut d = Derivation::new(
        calc.clone(),
        Mode::WithoutSubstitution,
        vec![qp.clone(), rp_r.clone(), rq.clone()],
    );
    let l1 = d.push(rq.clone(), Justification::Premise(2));
    let l2 = d.push(qp.clone(), Justification::Premise(0));
    // (3) (r -> q) -> ((q -> p) -> (r -> p)), deducible in Int[i].
    let l3 = splice(&mut d, &closed_syllogism(&calc), &[]).expect("closed syllogism");
    let l3b = d.push(
        Formula::imp(qp.clone(), pf(&calc, "r -> p")),
        Justification::ModusPonens(l1, l3),
    );
    let l4 = d.push(pf(&calc, "r -> p"), Justification::ModusPonens(l2, l3b));
    let l5 = d.push(rp_r.clone(), Justification::Premise(1));
    d.push(pf(&calc, "r"), Justification::ModusPonens(l4, l5));
    let s1 = deduction(&d, &rq).expect("discharge r -> q");
    let s2 = deduction(&s1, &rp_r).expect("discharge (r -> p) -> r");
    deduction(&s2, &qp).expect("discharge q -> p")
}

/// `Int[i] ⊢ (p -> r) -> (((r -> p) -> p) -> ((((r -> q) -> r) -> (s -> r))
/// -> ((q -> p) -> (s -> r))))`.
fn lemma_13_inkm() -> Derivation {
    let calc = frag("Int", &[GroupId::I]);
    let pr = pf(&calc, "p -> r");
    let rpp = pf(&calc, "(r -> p) -> p");
    let big = pf(&calc, "((r -> q) -> r) -> (s -> r)");
    let qp = pf(&calc, "q -> p");
    let mut d = Derivation::new(
        calc.clone(),
        Mode::WithoutSubstitution,
        vec![pr.clone(), rpp.clone(), big.clone(), qp.clone()],
    );
    let l1 = d.push(qp.clone(), Justification::Premise(3));
    let l2 = d.push(rpp.clone(), Justification::Premise(1));
    let l_pr = d.push(pr.clone(), Justification::Premise(0));
    // Bridge (r -> p) -> r from (r -> p) -> p and p -> r.
    let syl = syllogism(&calc, &pf(&calc, "r -> p"), &pf(&calc, "p"), &pf(&calc, "r"));
    let l_rpr = splice(&mut d, &syl, &[SpliceTarget::Line(l2), SpliceTarget::Line(l_pr)])
        .expect("bridge splice");
    // (3) (r -> q) -> r from (1), the bridge, and the negative-occurrence lemma.
    let lemma = lemma_negative_occurrence();
    let l_lemma = splice(&mut d, &lemma, &[]).expect("lemma splice");
    let l_step = d.push(
        Formula::imp(
            pf(&calc, "(r -> p) -> r"),
            pf(&calc, "(r -> q) -> r"),
        ),
        Justification::ModusPonens(l1, l_lemma),
    );
    let l3 = d.push(pf(&calc, "(r -> q) -> r"), Justification::ModusPonens(l_rpr, l_step));
    // (4), (5).
    let l4 = d.push(big.clone(), Justification::Premise(2));
    d.push(pf(&calc, "s -> r"), Justification::ModusPonens(l3, l4));
    let s1 = deduction(&d, &qp).expect("discharge q -> p");
    let s2 = deduction(&s1, &big).expect("discharge ((r -> q) -> r) -> (s -> r)");
    let s3 = deduction(&s2, &rpp).expect("discharge (r -> p) -> p");
    deduction(&s3, &pr).expect("discharge p -> r")
}

/// The `(E:five)` eleven-step template over abstract components: with
/// `P = Peirce`, premises `da -> P(db, a)`, `dab -> P(db, a -> b)`,
/// `(db -> b) -> b`, `b -> db`, conclude `dab -> (da -> db)` in
/// `IntBox[i,c]` ⊩ mode.
fn snippet_e_five() -> Derivation {
    let calc = frag("IntBox", &[GroupId::I, GroupId::C]);
    let a = pf(&calc, "a");
    let b = pf(&calc, "b");
    let da = pf(&calc, "da");
    let db = pf(&calc, "db");
    let dab = pf(&calc, "dab");
    let ab = Formula::imp(a.clone(), b.clone());
    let prem0 = Formula::imp(da.clone(), Formula::peirce(db.clone(), a.clone()));
    let prem1 = Formula::imp(dab.clone(), Formula::peirce(db.clone(), ab.clone()));
    let prem2 = Formula::imp(Formula::imp(db.clone(), b.clone()), b.clone());
    let prem3 = Formula::imp(b.clone(), db.clone());

    let mut d = Derivation::new(
        calc.clone(),
        Mode::WithoutSubstitution,
        vec![prem0.clone(), prem1.clone(), prem2.clone(), prem3.clone(), dab.clone()],
    );
    // (1), (2), (3)
    let l1 = d.push(dab.clone(), Justification::Premise(4));
    let l2 = d.push(prem1.clone(), Justification::Premise(1));
    let l3 = d.push(Formula::peirce(db.clone(), ab.clone()), Justification::ModusPonens(l1, l2));
    // (4) (db -> (a -> b)) -> (a -> (db -> b))
    let db_ab = Formula::imp(db.clone(), ab.clone());
    let l4 = {
        let mut inner = Derivation::new(
            calc.clone(),
            Mode::WithoutSubstitution,
            vec![db_ab.clone(), a.clone(), db.clone()],
        );
        let h = inner.push(db_ab.clone(), Justification::Premise(0));
        let xa = inner.push(a.clone(), Justification::Premise(1));
        let xdb = inner.push(db.clone(), Justification::Premise(2));
        let l_ab = inner.push(ab.clone(), Justification::ModusPonens(xdb, h));
        inner.push(b.clone(), Justification::ModusPonens(xa, l_ab));
        let s1 = deduction(&inner, &db).expect("discharge db");
        let s2 = deduction(&s1, &a).expect("discharge a");
        let seg = deduction(&s2, &db_ab).expect("discharge db -> (a -> b)");
        splice(&mut d, &seg, &[]).expect("splice (4)")
    };
    // (5)
    let l5 = d.push(prem2.clone(), Justification::Premise(2));
    // (6) (db -> (a -> b)) -> (a -> b), from (4) and (5).
    let l6 = {
        let f4 = d.steps[l4].formula.clone();
        let f5 = d.steps[l5].formula.clone();
        let mut inner = Derivation::new(
            calc.clone(),
            Mode::WithoutSubstitution,
            vec![f4.clone(), f5.clone(), db_ab.clone(), a.clone()],
        );
        let p4 = inner.push(f4.clone(), Justification::Premise(0));
        let p5 = inner.push(f5.clone(), Justification::Premise(1));
        let h = inner.push(db_ab.clone(), Justification::Premise(2));
        let xa = inner.push(a.clone(), Justification::Premise(3));
        let l_adb = inner.push(
            Formula::imp(a.clone(), Formula::imp(db.clone(), b.clone())),
            Justification::ModusPonens(h, p4),
        );
        let l_dbb = inner.push(
            Formula::imp(db.clone(), b.clone()),
            Justification::ModusPonens(xa, l_adb),
        );
        inner.push(b.clone(), Justification::ModusPonens(l_dbb, p5));
        let s1 = deduction(&inner, &a).expect("discharge a");
        let seg = deduction(&s1, &db_ab).expect("discharge db -> (a -> b)");
        splice(&mut d, &seg, &[SpliceTarget::Line(l4), SpliceTarget::Line(l5)]).expect("splice (6)")
    };
    // (7)
    let l7 = d.push(prem0.clone(), Justification::Premise(0));
    // (8) (a -> b) -> (da -> db), per (E:four).
    let l8 = {
        let inst = lemma_13_inkm()
            .with_calculus(calc.clone())
            .expect("shared groups")
            .instantiate(&Substitution::from_pairs([
                (Variable::new("p"), b.clone()),
                (Variable::new("r"), db.clone()),
                (Variable::new("q"), a.clone()),
                (Variable::new("s"), da.clone()),
            ]))
            .expect("instantiate lemma-13");
        let l13 = splice(&mut d, &inst, &[]).expect("splice lemma-13 instance");
        let l_b_db = d.push(prem3.clone(), Justification::Premise(3));
        let mid1 = match &d.steps[l13].formula {
            Formula::Imp(_, rest) => (**rest).clone(),
            _ => unreachable!(),
        };
        let m1 = d.push(mid1.clone(), Justification::ModusPonens(l_b_db, l13));
        let mid2 = match &mid1 {
            Formula::Imp(_, rest) => (**rest).clone(),
            _ => unreachable!(),
        };
        let m2 = d.push(mid2.clone(), Justification::ModusPonens(l5, m1));
        // ((db -> a) -> db) -> (da -> db) by commuting premise (7).
        let x = Formula::imp(Formula::imp(db.clone(), a.clone()), db.clone());
        let com = commute(&calc, &x, &da, &db);
        let l_com = splice(&mut d, &com, &[SpliceTarget::Line(l7)]).expect("commute (7)");
        d.push(
            Formula::imp(ab.clone(), Formula::imp(da.clone(), db.clone())),
            Justification::ModusPonens(l_com, m2),
        )
    };
    // (9) (db -> (a -> b)) -> (da -> db).
    let syl = syllogism(&calc, &db_ab, &ab, &Formula::imp(da.clone(), db.clone()));
    let l9 = splice(&mut d, &syl, &[SpliceTarget::Line(l6), SpliceTarget::Line(l8)])
        .expect("splice (9)");
    // (10) da -> ((db -> (a -> b)) -> db).
    let l10 = {
        let mut inner = Derivation::new(
            calc.clone(),
            Mode::WithoutSubstitution,
            vec![d.steps[l9].formula.clone(), da.clone(), db_ab.clone()],
        );
        let p9 = inner.push(inner.premises[0].clone(), Justification::Premise(0));
        let xda = inner.push(da.clone(), Justification::Premise(1));
        let h = inner.push(db_ab.clone(), Justification::Premise(2));
        let l_dadb = inner.push(
            Formula::imp(da.clone(), db.clone()),
            Justification::ModusPonens(h, p9),
        );
        inner.push(db.clone(), Justification::ModusPonens(xda, l_dadb));
        let s1 = deduction(&inner, &db_ab).expect("discharge db -> (a -> b)");
        let seg = deduction(&s1, &da).expect("discharge da");
        splice(&mut d, &seg, &[SpliceTarget::Line(l9)]).expect("splice (10)")
    };
    // (11) da -> db, from (3) and (10).
    {
        let f3 = d.steps[l3].formula.clone();
        let f10 = d.steps[l10].formula.clone();
        let mut inner = Derivation::new(
            calc.clone(),
            Mode::WithoutSubstitution,
            vec![f3.clone(), f10.clone(), da.clone()],
        );
        let p3 = inner.push(f3, Justification::Premise(0));
        let p10 = inner.push(f10, Justification::Premise(1));
        let xda = inner.push(da.clone(), Justification::Premise(2));
        let l_mid = inner.push(
            Formula::imp(db_ab.clone(), db.clone()),
            Justification::ModusPonens(xda, p10),
        );
        inner.push(db.clone(), Justification::ModusPonens(l_mid, p3));
        let seg = deduction(&inner, &da).expect("discharge da");
        splice(&mut d, &seg, &[SpliceTarget::Line(l3), SpliceTarget::Line(l10)])
            .expect("splice (11)");
    }
    deduction(&d, &dab).expect("discharge dab")
}

/// `E + p ⊢ P(q, p)`: the five-line demonstration derivation.
fn demo_e_derivation() -> Derivation {
    let calc = calculus("E").unwrap();
    let p = pf(&calc, "p");
    let mut d = Derivation::new(calc, Mode::Unrestricted, vec![p.clone()]);
    let l1 = d.push(p, Justification::Premise(0));
    let l2 = d.push(
        pf(&d.calculus, "p -> []p"),
        Justification::Axiom(AxiomRef::new(GroupId::M, 1), Substitution::identity()),
    );
    let l3 = d.push(pf(&d.calculus, "[]p"), Justification::ModusPonens(l1, l2));
    let l4 = d.push(
        pf(&d.calculus, "[]p -> (((q -> p) -> q) -> q)"),
        Justification::Axiom(AxiomRef::new(GroupId::M, 2), Substitution::identity()),
    );
    d.push(pf(&d.calculus, "((q -> p) -> q) -> q"), Justification::ModusPonens(l3, l4));
    d
}

/// `E + {p, p -> q} ⊢ P(r, q)`, exercising the first m-axiom (with extra
/// Kuz-form instances so every boxdot stays nontrivial).
fn demo_e_derivation_2() -> Derivation {
    let calc = calculus("E").unwrap();
    let p = pf(&calc, "p");
    let pq = pf(&calc, "p -> q");
    let mut d = Derivation::new(calc, Mode::Unrestricted, vec![p.clone(), pq.clone()]);
    let l1 = d.push(p, Justification::Premise(0));
    let l2 = d.push(pq.clone(), Justification::Premise(1));
    let s_pq = Substitution::single(Variable::new("p"), pq.clone());
    let l3 = d.push(
        pf(&d.calculus, "(p -> q) -> [](p -> q)"),
        Justification::Axiom(AxiomRef::new(GroupId::M, 1), s_pq.clone()),
    );
    let l4 = d.push(pf(&d.calculus, "[](p -> q)"), Justification::ModusPonens(l2, l3));
    let l5 = d.push(
        pf(&d.calculus, "[](p -> q) -> ([]p -> []q)"),
        Justification::Axiom(AxiomRef::new(GroupId::M, 0), Substitution::identity()),
    );
    let l6 = d.push(pf(&d.calculus, "[]p -> []q"), Justification::ModusPonens(l4, l5));
    let l7 = d.push(
        pf(&d.calculus, "p -> []p"),
        Justification::Axiom(AxiomRef::new(GroupId::M, 1), Substitution::identity()),
    );
    let l8 = d.push(pf(&d.calculus, "[]p"), Justification::ModusPonens(l1, l7));
    let l9 = d.push(pf(&d.calculus, "[]q"), Justification::ModusPonens(l8, l6));
    let s_q = Substitution::from_pairs([
        (Variable::new("p"), pf(&d.calculus, "q")),
        (Variable::new("q"), pf(&d.calculus, "r")),
    ]);
    let l10 = d.push(
        pf(&d.calculus, "[]q -> (((r -> q) -> r) -> r)"),
        Justification::Axiom(AxiomRef::new(GroupId::M, 2), s_q),
    );
    let s_p = Substitution::single(Variable::new("q"), pf(&d.calculus, "s"));
    d.push(
        pf(&d.calculus, "[]p -> (((s -> p) -> s) -> s)"),
        Justification::Axiom(AxiomRef::new(GroupId::M, 2), s_p),
    );
    let s_pq2 = Substitution::from_pairs([
        (Variable::new("p"), pq.clone()),
        (Variable::new("q"), pf(&d.calculus, "s")),
    ]);
    d.push(
        pf(&d.calculus, "[](p -> q) -> (((s -> (p -> q)) -> s) -> s)"),
        Justification::Axiom(AxiomRef::new(GroupId::M, 2), s_pq2),
    );
    d.push(pf(&d.calculus, "((r -> q) -> r) -> r"), Justification::ModusPonens(l9, l10));
    d
}

/// `E + q ⊢ P(p, q)`: first m-axiom with a detached but unused consequent.
fn demo_e_derivation_3() -> Derivation {
    let calc = calculus("E").unwrap();
    let q = pf(&calc, "q");
    let pq = pf(&calc, "p -> q");
    let mut d = Derivation::new(calc, Mode::Unrestricted, vec![q.clone()]);
    let l1 = d.push(q.clone(), Justification::Premise(0));
    let s_i = Substitution::from_pairs([
        (Variable::new("p"), q.clone()),
        (Variable::new("q"), pf(&d.calculus, "p")),
    ]);
    let l2 = d.push(
        pf(&d.calculus, "q -> (p -> q)"),
        Justification::Axiom(AxiomRef::new(GroupId::I, 0), s_i),
    );
    let l3 = d.push(pq.clone(), Justification::ModusPonens(l1, l2));
    let s_pq = Substitution::single(Variable::new("p"), pq.clone());
    let l4 = d.push(
        pf(&d.calculus, "(p -> q) -> [](p -> q)"),
        Justification::Axiom(AxiomRef::new(GroupId::M, 1), s_pq),
    );
    let l5 = d.push(pf(&d.calculus, "[](p -> q)"), Justification::ModusPonens(l3, l4));
    let l6 = d.push(
        pf(&d.calculus, "[](p -> q) -> ([]p -> []q)"),
        Justification::Axiom(AxiomRef::new(GroupId::M, 0), Substitution::identity()),
    );
    d.push(pf(&d.calculus, "[]p -> []q"), Justification::ModusPonens(l5, l6));
    let s_q = Substitution::single(Variable::new("p"), q.clone());
    let l8 = d.push(
        pf(&d.calculus, "q -> []q"),
        Justification::Axiom(AxiomRef::new(GroupId::M, 1), s_q),
    );
    let l9 = d.push(pf(&d.calculus, "[]q"), Justification::ModusPonens(l1, l8));
    let s_m2 = Substitution::from_pairs([
        (Variable::new("p"), q.clone()),
        (Variable::new("q"), pf(&d.calculus, "p")),
    ]);
    let l10 = d.push(
        pf(&d.calculus, "[]q -> (((p -> q) -> p) -> p)"),
        Justification::Axiom(AxiomRef::new(GroupId::M, 2), s_m2),
    );
    let s_m2b = Substitution::from_pairs([
        (Variable::new("p"), pf(&d.calculus, "p")),
        (Variable::new("q"), pf(&d.calculus, "r")),
    ]);
    d.push(
        pf(&d.calculus, "[]p -> (((r -> p) -> r) -> r)"),
        Justification::Axiom(AxiomRef::new(GroupId::M, 2), s_m2b),
    );
    let s_m2c = Substitution::from_pairs([
        (Variable::new("p"), pq.clone()),
        (Variable::new("q"), pf(&d.calculus, "r")),
    ]);
    d.push(
        pf(&d.calculus, "[](p -> q) -> (((r -> (p -> q)) -> r) -> r)"),
        Justification::Axiom(AxiomRef::new(GroupId::M, 2), s_m2c),
    );
    d.push(pf(&d.calculus, "((p -> q) -> p) -> p"), Justification::ModusPonens(l9, l10));
    d
}

// ---------------------------------------------------------------------------
// The searched certificate, frozen as data
// ---------------------------------------------------------------------------

/// Bridging pool used when the searched certificate was generated: the
/// subformula closure of the goal alone saturates under modus ponens without
/// reaching it, so these implications (read off a deduction-theorem proof)
/// extend the instantiation pool. See [`regenerate_lemma_peirce_double`].
pub fn peirce_double_search_pool() -> Vec<Formula> {
    [
        "p -> p",
        "p -> ((p -> q) -> p) -> p",
        "p -> (((p -> q) -> p) -> p) -> q",
        "(p -> q) -> ((p -> q) -> p) -> p -> q",
        "(p -> ((p -> q) -> p) -> p) -> p -> q",
        "(p -> (((p -> q) -> p) -> p) -> q) -> (p -> ((p -> q) -> p) -> p) -> p -> q",
        "((p -> q) -> p) -> p -> q",
        "((p -> q) -> p) -> (p -> q) -> p",
        "(((p -> q) -> p) -> p -> q) -> ((p -> q) -> p) -> p",
        "((((p -> q) -> p) -> p) -> q) -> p -> (((p -> q) -> p) -> p) -> q",
        "((((p -> q) -> p) -> p) -> q) -> (((p -> q) -> p) -> p) -> q",
    ]
    .iter()
    .map(|t| parse(t, crate::syntax::Language::Assertoric).expect("pool formula parses"))
    .collect()
}

/// Re-run the bounded search that produced `lemma-peirce-double`.
pub fn regenerate_lemma_peirce_double() -> Option<Derivation> {
    let calc = frag("Int", &[GroupId::I]);
    let goal = pf(&calc, "((((p -> q) -> p) -> p) -> q) -> q");
    search_proof(&calc, &goal, &peirce_double_search_pool(), 2_000_000)
}

enum J {
    Ax(usize, &'static [(&'static str, &'static str)]),
    Mp(usize, usize),
}

/// `Int[i] ⊢ (P(p, q) -> q) -> q`, found by bounded search and shipped as
/// data; the table below is the searched 39-line proof verbatim.
fn lemma_peirce_double() -> Derivation {
    use J::{Ax, Mp};
    let lines: &[(&str, J)] = &[
        ("p -> ((p -> q) -> p) -> p", Ax(0, &[("q", "(p -> q) -> p")])),
        ("(p -> ((p -> q) -> p) -> p) -> ((((p -> q) -> p) -> p) -> q) -> p -> ((p -> q) -> p) -> p", Ax(0, &[("p", "p -> ((p -> q) -> p) -> p"), ("q", "(((p -> q) -> p) -> p) -> q")])),
        ("((((p -> q) -> p) -> p) -> q) -> p -> ((p -> q) -> p) -> p", Mp(0, 1)),
        ("((((p -> q) -> p) -> p) -> q) -> p -> (((p -> q) -> p) -> p) -> q", Ax(0, &[("p", "(((p -> q) -> p) -> p) -> q"), ("q", "p")])),
        ("(p -> (((p -> q) -> p) -> p) -> q) -> (p -> ((p -> q) -> p) -> p) -> p -> q", Ax(1, &[("q", "((p -> q) -> p) -> p"), ("r", "q")])),
        ("((p -> (((p -> q) -> p) -> p) -> q) -> (p -> ((p -> q) -> p) -> p) -> p -> q) -> ((((p -> q) -> p) -> p) -> q) -> (p -> (((p -> q) -> p) -> p) -> q) -> (p -> ((p -> q) -> p) -> p) -> p -> q", Ax(0, &[("p", "(p -> (((p -> q) -> p) -> p) -> q) -> (p -> ((p -> q) -> p) -> p) -> p -> q"), ("q", "(((p -> q) -> p) -> p) -> q")])),
        ("((((p -> q) -> p) -> p) -> q) -> (p -> (((p -> q) -> p) -> p) -> q) -> (p -> ((p -> q) -> p) -> p) -> p -> q", Mp(4, 5)),
        ("(((((p -> q) -> p) -> p) -> q) -> (p -> (((p -> q) -> p) -> p) -> q) -> (p -> ((p -> q) -> p) -> p) -> p -> q) -> (((((p -> q) -> p) -> p) -> q) -> p -> (((p -> q) -> p) -> p) -> q) -> ((((p -> q) -> p) -> p) -> q) -> (p -> ((p -> q) -> p) -> p) -> p -> q", Ax(1, &[("p", "(((p -> q) -> p) -> p) -> q"), ("q", "p -> (((p -> q) -> p) -> p) -> q"), ("r", "(p -> ((p -> q) -> p) -> p) -> p -> q")])),
        ("(((((p -> q) -> p) -> p) -> q) -> p -> (((p -> q) -> p) -> p) -> q) -> ((((p -> q) -> p) -> p) -> q) -> (p -> ((p -> q) -> p) -> p) -> p -> q", Mp(6, 7)),
        ("((((p -> q) -> p) -> p) -> q) -> (p -> ((p -> q) -> p) -> p) -> p -> q", Mp(3, 8)),
        ("(((((p -> q) -> p) -> p) -> q) -> (p -> ((p -> q) -> p) -> p) -> p -> q) -> (((((p -> q) -> p) -> p) -> q) -> p -> ((p -> q) -> p) -> p) -> ((((p -> q) -> p) -> p) -> q) -> p -> q", Ax(1, &[("p", "(((p -> q) -> p) -> p) -> q"), ("q", "p -> ((p -> q) -> p) -> p"), ("r", "p -> q")])),
        ("(((((p -> q) -> p) -> p) -> q) -> p -> ((p -> q) -> p) -> p) -> ((((p -> q) -> p) -> p) -> q) -> p -> q", Mp(9, 10)),
        ("((((p -> q) -> p) -> p) -> q) -> p -> q", Mp(2, 11)),
        ("(p -> q) -> ((p -> q) -> p) -> p -> q", Ax(0, &[("p", "p -> q"), ("q", "(p -> q) -> p")])),
        ("((p -> q) -> ((p -> q) -> p) -> p -> q) -> ((((p -> q) -> p) -> p) -> q) -> (p -> q) -> ((p -> q) -> p) -> p -> q", Ax(0, &[("p", "(p -> q) -> ((p -> q) -> p) -> p -> q"), ("q", "(((p -> q) -> p) -> p) -> q")])),
        ("((((p -> q) -> p) -> p) -> q) -> (p -> q) -> ((p -> q) -> p) -> p -> q", Mp(13, 14)),
        ("(((((p -> q) -> p) -> p) -> q) -> (p -> q) -> ((p -> q) -> p) -> p -> q) -> (((((p -> q) -> p) -> p) -> q) -> p -> q) -> ((((p -> q) -> p) -> p) -> q) -> ((p -> q) -> p) -> p -> q", Ax(1, &[("p", "(((p -> q) -> p) -> p) -> q"), ("q", "p -> q"), ("r", "((p -> q) -> p) -> p -> q")])),
        ("(((((p -> q) -> p) -> p) -> q) -> p -> q) -> ((((p -> q) -> p) -> p) -> q) -> ((p -> q) -> p) -> p -> q", Mp(15, 16)),
        ("((((p -> q) -> p) -> p) -> q) -> ((p -> q) -> p) -> p -> q", Mp(12, 17)),
        ("(p -> ((p -> q) -> p) -> p) -> ((p -> q) -> p) -> p -> ((p -> q) -> p) -> p", Ax(0, &[("p", "p -> ((p -> q) -> p) -> p"), ("q", "(p -> q) -> p")])),
        ("((p -> q) -> p) -> p -> ((p -> q) -> p) -> p", Mp(0, 19)),
        ("((p -> q) -> p) -> (p -> ((p -> q) -> p) -> p) -> (p -> q) -> p", Ax(0, &[("p", "(p -> q) -> p"), ("q", "p -> ((p -> q) -> p) -> p")])),
        ("(((p -> q) -> p) -> (p -> ((p -> q) -> p) -> p) -> (p -> q) -> p) -> (((p -> q) -> p) -> p -> ((p -> q) -> p) -> p) -> ((p -> q) -> p) -> (p -> q) -> p", Ax(1, &[("p", "(p -> q) -> p"), ("q", "p -> ((p -> q) -> p) -> p"), ("r", "(p -> q) -> p")])),
        ("(((p -> q) -> p) -> p -> ((p -> q) -> p) -> p) -> ((p -> q) -> p) -> (p -> q) -> p", Mp(21, 22)),
        ("((p -> q) -> p) -> (p -> q) -> p", Mp(20, 23)),
        ("(((p -> q) -> p) -> (p -> q) -> p) -> (((p -> q) -> p) -> p -> q) -> ((p -> q) -> p) -> p", Ax(1, &[("p", "(p -> q) -> p"), ("q", "p -> q"), ("r", "p")])),
        ("(((p -> q) -> p) -> p -> q) -> ((p -> q) -> p) -> p", Mp(24, 25)),
        ("((((p -> q) -> p) -> p -> q) -> ((p -> q) -> p) -> p) -> ((((p -> q) -> p) -> p) -> q) -> (((p -> q) -> p) -> p -> q) -> ((p -> q) -> p) -> p", Ax(0, &[("p", "(((p -> q) -> p) -> p -> q) -> ((p -> q) -> p) -> p"), ("q", "(((p -> q) -> p) -> p) -> q")])),
        ("((((p -> q) -> p) -> p) -> q) -> (((p -> q) -> p) -> p -> q) -> ((p -> q) -> p) -> p", Mp(26, 27)),
        ("(((((p -> q) -> p) -> p) -> q) -> (((p -> q) -> p) -> p -> q) -> ((p -> q) -> p) -> p) -> (((((p -> q) -> p) -> p) -> q) -> ((p -> q) -> p) -> p -> q) -> ((((p -> q) -> p) -> p) -> q) -> ((p -> q) -> p) -> p", Ax(1, &[("p", "(((p -> q) -> p) -> p) -> q"), ("q", "((p -> q) -> p) -> p -> q"), ("r", "((p -> q) -> p) -> p")])),
        ("(((((p -> q) -> p) -> p) -> q) -> ((p -> q) -> p) -> p -> q) -> ((((p -> q) -> p) -> p) -> q) -> ((p -> q) -> p) -> p", Mp(28, 29)),
        ("((((p -> q) -> p) -> p) -> q) -> ((p -> q) -> p) -> p", Mp(18, 30)),
        ("((((p -> q) -> p) -> p) -> q) -> (p -> ((p -> q) -> p) -> p) -> (((p -> q) -> p) -> p) -> q", Ax(0, &[("p", "(((p -> q) -> p) -> p) -> q"), ("q", "p -> ((p -> q) -> p) -> p")])),
        ("(((((p -> q) -> p) -> p) -> q) -> (p -> ((p -> q) -> p) -> p) -> (((p -> q) -> p) -> p) -> q) -> (((((p -> q) -> p) -> p) -> q) -> p -> ((p -> q) -> p) -> p) -> ((((p -> q) -> p) -> p) -> q) -> (((p -> q) -> p) -> p) -> q", Ax(1, &[("p", "(((p -> q) -> p) -> p) -> q"), ("q", "p -> ((p -> q) -> p) -> p"), ("r", "(((p -> q) -> p) -> p) -> q")])),
        ("(((((p -> q) -> p) -> p) -> q) -> p -> ((p -> q) -> p) -> p) -> ((((p -> q) -> p) -> p) -> q) -> (((p -> q) -> p) -> p) -> q", Mp(32, 33)),
        ("((((p -> q) -> p) -> p) -> q) -> (((p -> q) -> p) -> p) -> q", Mp(2, 34)),
        ("(((((p -> q) -> p) -> p) -> q) -> (((p -> q) -> p) -> p) -> q) -> (((((p -> q) -> p) -> p) -> q) -> ((p -> q) -> p) -> p) -> ((((p -> q) -> p) -> p) -> q) -> q", Ax(1, &[("p", "(((p -> q) -> p) -> p) -> q"), ("q", "((p -> q) -> p) -> p"), ("r", "q")])),
        ("(((((p -> q) -> p) -> p) -> q) -> ((p -> q) -> p) -> p) -> ((((p -> q) -> p) -> p) -> q) -> q", Mp(35, 36)),
        ("((((p -> q) -> p) -> p) -> q) -> q", Mp(31, 37)),
    ];
    let calc = frag("Int", &[GroupId::I]);
    let mut d = Derivation::new(calc.clone(), Mode::WithoutSubstitution, Vec::new());
    for (text, j) in lines {
        let formula = pf(&calc, text);
        let justification = match j {
            J::Ax(index, binds) => {
                let s = Substitution::from_pairs(
                    binds.iter().map(|(v, t)| (Variable::new(*v), pf(&calc, t))),
                );
                Justification::Axiom(AxiomRef::new(GroupId::I, *index), s)
            }
            J::Mp(i, k) => Justification::ModusPonens(*i, *k),
        };
        d.push(formula, justification);
    }
    d
}

/// Fragment (by group ids) each bundled certificate is registered with, for
/// reporting.
pub fn certificate_fragment(name: &str) -> Option<String> {
    let d = certificate(name).ok()?;
    Some(format!("{}", d.calculus.label()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{check, Verdict};

    fn checked(name: &str) -> (Derivation, Verdict) {
        let d = certificate(name).expect("bundled");
        let v = check(&d).expect("nonempty");
        assert!(v.ok, "{name}: {:?}", v.first_error());
        (d, v)
    }

    #[test]
    fn all_bundled_certificates_check() {
        for name in certificate_names() {
            checked(name);
        }
        assert!(certificate("nope").is_err());
    }

    #[test]
    fn display_2_certificate() {
        let (d, v) = checked("int-deducibility-2");
        assert_eq!(d.calculus.label(), "Int[i,c,d]");
        assert!(d.premises.is_empty());
        assert_eq!(
            v.conclusion,
            pf(&d.calculus, "((q | (q -> p)) -> p) -> (q | (q -> p))")
        );
    }

    #[test]
    fn prop31_certificates() {
        let (d, v) = checked("prop31a");
        assert_eq!(d.calculus.label(), "Kuz[i,c,d,kuz]");
        assert!(d.premises.is_empty());
        assert_eq!(v.conclusion, pf(&d.calculus, "[]p -> (q | (q -> p))"));

        let (d, v) = checked("prop31b");
        assert_eq!(d.calculus.label(), "KuzStar[i,c,d,kuzstar]");
        assert!(d.premises.is_empty());
        assert_eq!(v.conclusion, pf(&d.calculus, "[]p -> (((q -> p) -> q) -> q)"));
    }

    #[test]
    fn lemma_certificates() {
        let (d, v) = checked("lemma-p-implies-P");
        assert_eq!(d.calculus.label(), "Int[i]");
        assert_eq!(v.conclusion, pf(&d.calculus, "p -> (((q -> p) -> q) -> q)"));

        let (d, v) = checked("lemma-negative-occurrence");
        assert_eq!(d.calculus.label(), "Int[i]");
        assert_eq!(
            v.conclusion,
            pf(&d.calculus, "(q -> p) -> (((r -> p) -> r) -> ((r -> q) -> r))")
        );

        let (d, v) = checked("lemma-13-inkm");
        assert_eq!(d.calculus.label(), "Int[i]");
        assert_eq!(
            v.conclusion,
            pf(
                &d.calculus,
                "(p -> r) -> (((r -> p) -> p) -> ((((r -> q) -> r) -> (s -> r)) -> ((q -> p) -> (s -> r))))"
            )
        );
    }

    #[test]
    fn peirce_double_certificate_and_regeneration() {
        let (d, v) = checked("lemma-peirce-double");
        assert_eq!(d.calculus.label(), "Int[i]");
        assert!(d.premises.is_empty());
        assert_eq!(v.conclusion, pf(&d.calculus, "((((p -> q) -> p) -> p) -> q) -> q"));

        let found = regenerate_lemma_peirce_double().expect("search succeeds");
        let vf = check(&found).unwrap();
        assert!(vf.ok);
        assert_eq!(vf.conclusion, v.conclusion);
    }

    #[test]
    fn snippet_e_five_certificate() {
        let (d, v) = checked("snippet-e-five");
        assert_eq!(d.calculus.label(), "IntBox[i,c]");
        assert_eq!(d.mode, Mode::WithoutSubstitution);
        assert_eq!(v.conclusion, pf(&d.calculus, "dab -> (da -> db)"));
        assert_eq!(
            d.premises,
            alloc::vec![
                pf(&d.calculus, "da -> (((db -> a) -> db) -> db)"),
                pf(&d.calculus, "dab -> (((db -> (a -> b)) -> db) -> db)"),
                pf(&d.calculus, "(db -> b) -> b"),
                pf(&d.calculus, "b -> db"),
            ]
        );
    }

    #[test]
    fn demo_certificates_conclusions() {
        let (d, v) = checked("demo-e-derivation");
        assert_eq!(d.premises, alloc::vec![pf(&d.calculus, "p")]);
        assert_eq!(v.conclusion, pf(&d.calculus, "((q -> p) -> q) -> q"));

        let (_, v) = checked("demo-e-derivation-2");
        assert_eq!(v.conclusion, pf(&calculus("E").unwrap(), "((r -> q) -> r) -> r"));

        let (_, v) = checked("demo-e-derivation-3");
        assert_eq!(v.conclusion, pf(&calculus("E").unwrap(), "((p -> q) -> p) -> p"));

        let (d, v) = checked("e-derives-kuzstar-axiom");
        assert_eq!(d.calculus.label(), "E[i,c,d,m]");
        assert!(d.premises.is_empty());
        assert_eq!(v.conclusion, pf(&d.calculus, "[]p -> (q | (q -> p))"));
    }

    #[test]
    fn builders_check() {
        let int_i = frag("Int", &[GroupId::I]);
        let x = pf(&int_i, "p | q");
        let y = pf(&int_i, "~p");
        let z = pf(&int_i, "r");
        for d in [
            ident(&int_i, &x),
            syllogism(&int_i, &x, &y, &z),
            commute(&int_i, &x, &y, &z),
            closed_syllogism(&int_i),
        ] {
            let v = check(&d).unwrap();
            assert!(v.ok, "{:?}", v.first_error());
        }
        let int_ic = frag("Int", &[GroupId::I, GroupId::C]);
        let cs = alloc::vec![x.clone(), y.clone(), z.clone()];
        for j in 0..3 {
            let d = conj_project(&int_ic, &cs, j);
            let v = check(&d).unwrap();
            assert!(v.ok, "{:?}", v.first_error());
            assert_eq!(
                v.conclusion,
                Formula::imp(conj(&cs), cs[j].clone())
            );
        }
    }

    /// Mutating any single line of an accepted certificate must produce a
    /// rejection or leave the line's formula equal.
    #[test]
    fn single_line_mutation_is_rejected() {
        for name in ["int-deducibility-2", "lemma-p-implies-P", "prop31b", "snippet-e-five"] {
            let d = certificate(name).unwrap();
            for i in 0..d.steps.len() {
                let mut mutated = d.clone();
                let original = mutated.steps[i].formula.clone();
                let twisted = Formula::imp(original.clone(), original.clone());
                mutated.steps[i].formula = twisted.clone();
                let v = check(&mutated).unwrap();
                assert!(!v.ok || twisted == original, "{name}: line {i} mutation accepted");
            }
        }
    }
}
