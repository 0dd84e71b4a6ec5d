//! Bounded forward proof search over axiom instances, used as an offline
//! generator for a handful of bundled certificates. The kernel, not this
//! search, is the trust root: every result is re-checked before use.
//!
//! The instance pool is built by instantiating each axiom's variables with
//! formulas from the subformula closure of the goal (plus caller-supplied
//! extras); the pool is then saturated under modus ponens breadth-first,
//! recording back-pointers for proof reconstruction.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::calculi::{AxiomRef, CalculusSpec};
use crate::kernel::{Derivation, Justification, Mode};
use crate::syntax::{Formula, Substitution, Variable};

#[derive(Debug, Clone)]
enum How {
    Axiom(AxiomRef, Substitution),
    Mp(usize, usize),
}

/// Search for a premise-free derivation of `goal` in `calc`.
///
/// `pool_extra` adds formulas to the instantiation pool beyond the goal's
/// subformula closure. `max_entries` bounds the number of distinct derived
/// formulas before giving up. Deterministic for fixed inputs.
pub fn search_proof(
    calc: &CalculusSpec,
    goal: &Formula,
    pool_extra: &[Formula],
    max_entries: usize,
) -> Option<Derivation> {
    // Instantiation pool: subformula closure in deterministic order.
    let mut pool: Vec<Formula> = Vec::new();
    let mut seen: BTreeMap<Formula, ()> = BTreeMap::new();
    for f in goal.subformulas().into_iter().cloned().chain(pool_extra.iter().cloned()) {
        if seen.insert(f.clone(), ()).is_none() {
            pool.push(f);
        }
    }

    let mut entries: Vec<(Formula, How)> = Vec::new();
    let mut index: BTreeMap<Formula, usize> = BTreeMap::new();
    // antecedent -> indices of implication entries with that antecedent
    let mut wanted: BTreeMap<Formula, Vec<usize>> = BTreeMap::new();
    let mut queue: Vec<usize> = Vec::new();

    let add = |formula: Formula,
                   how: How,
                   entries: &mut Vec<(Formula, How)>,
                   index: &mut BTreeMap<Formula, usize>,
                   queue: &mut Vec<usize>|
     -> Option<usize> {
        if index.contains_key(&formula) {
            return None;
        }
        let idx = entries.len();
        index.insert(formula.clone(), idx);
        entries.push((formula, how));
        queue.push(idx);
        Some(idx)
    };

    // Seed with every axiom instance over the pool.
    for (r, axiom) in calc.axioms() {
        let vars: Vec<Variable> = axiom.variables().into_iter().collect();
        let mut slots = alloc::vec![0usize; vars.len()];
        loop {
            let s = Substitution::from_pairs(
                vars.iter().cloned().zip(slots.iter().map(|&k| pool[k].clone())),
            );
            add(axiom.substitute(&s), How::Axiom(r, s), &mut entries, &mut index, &mut queue);
            // Odometer over pool indices.
            let mut carry = true;
            for slot in slots.iter_mut() {
                *slot += 1;
                if *slot < pool.len() {
                    carry = false;
                    break;
                }
                *slot = 0;
            }
            if carry || vars.is_empty() {
                break;
            }
        }
    }

    // Saturate under modus ponens.
    let mut cursor = 0;
    while cursor < queue.len() && entries.len() < max_entries && !index.contains_key(goal) {
        let e = queue[cursor];
        cursor += 1;
        let formula = entries[e].0.clone();
        // As a major premise.
        if let Formula::Imp(a, b) = &formula {
            if let Some(&i) = index.get(a.as_ref()) {
                add((**b).clone(), How::Mp(i, e), &mut entries, &mut index, &mut queue);
            }
            wanted.entry((**a).clone()).or_default().push(e);
        }
        // As a minor premise of earlier implications.
        if let Some(majors) = wanted.get(&formula).cloned() {
            for j in majors {
                if let Formula::Imp(_, b) = entries[j].0.clone() {
                    add((*b).clone(), How::Mp(e, j), &mut entries, &mut index, &mut queue);
                }
            }
        }
    }

    let goal_idx = *index.get(goal)?;
    // Reconstruct: emit needed entries in dependency order.
    let mut out = Derivation::new(calc.clone(), Mode::WithoutSubstitution, Vec::new());
    let mut lines: BTreeMap<usize, usize> = BTreeMap::new();
    emit(goal_idx, &entries, &mut lines, &mut out);
    Some(out)
}

fn emit(
    idx: usize,
    entries: &[(Formula, How)],
    lines: &mut BTreeMap<usize, usize>,
    out: &mut Derivation,
) -> usize {
    if let Some(&l) = lines.get(&idx) {
        return l;
    }
    let (formula, how) = &entries[idx];
    let justification = match how {
        How::Axiom(r, s) => Justification::Axiom(*r, s.clone()),
        How::Mp(i, j) => {
            let li = emit(*i, entries, lines, out);
            let lj = emit(*j, entries, lines, out);
            Justification::ModusPonens(li, lj)
        }
    };
    let l = out.push(formula.clone(), justification);
    lines.insert(idx, l);
    l
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculi::{calculus, GroupId};
    use crate::kernel::check;
    use crate::syntax::{parse, Language};

    #[test]
    fn finds_trivial_theorems() {
        let int_i = calculus("Int").unwrap().fragment(&[GroupId::I]).unwrap();
        let goal = parse("p -> (q -> p)", Language::Assertoric).unwrap();
        let d = search_proof(&int_i, &goal, &[], 10_000).unwrap();
        let v = check(&d).unwrap();
        assert!(v.ok);
        assert_eq!(v.conclusion, goal);
    }

    #[test]
    fn finds_self_implication() {
        let int_i = calculus("Int").unwrap().fragment(&[GroupId::I]).unwrap();
        let goal = parse("q -> q", Language::Assertoric).unwrap();
        let d = search_proof(&int_i, &goal, &[], 50_000).unwrap();
        assert!(check(&d).unwrap().ok);
        assert_eq!(d.conclusion().unwrap(), &goal);
    }

    #[test]
    fn gives_up_within_bound() {
        let int_i = calculus("Int").unwrap().fragment(&[GroupId::I]).unwrap();
        // Peirce's law is not intuitionistically derivable.
        let goal = parse("((p -> q) -> p) -> p", Language::Assertoric).unwrap();
        assert!(search_proof(&int_i, &goal, &[], 20_000).is_none());
    }
}
