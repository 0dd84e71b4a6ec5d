//! Finite intuitionistic Kripke models for the assertoric language:
//! forcing, persistence, and bounded countermodel search.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use alloc::{format, string::String, vec};
use core::fmt;

use crate::algebra::{enumerate_posets, HeytingAlgebra, Poset};
use crate::syntax::{Connective, Formula, Language, Variable};

/// Errors from model construction and forcing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KripkeError {
    Malformed(String),
    /// A valuation set is not upward closed.
    NotPersistent(Variable),
    UnknownVariable(Variable),
    /// Forcing is defined for assertoric formulas only.
    ModalConnective(Connective),
}

impl fmt::Display for KripkeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KripkeError::Malformed(m) => write!(f, "malformed model: {m}"),
            KripkeError::NotPersistent(v) => {
                write!(f, "valuation of '{v}' is not upward closed")
            }
            KripkeError::UnknownVariable(v) => write!(f, "variable '{v}' has no valuation"),
            KripkeError::ModalConnective(c) => {
                write!(f, "connective '{c}' is not assertoric")
            }
        }
    }
}

/// A finite poset of worlds with a persistent valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    poset: Poset,
    val: BTreeMap<Variable, Vec<bool>>,
}

impl KripkeModel {
    /// Build a model, checking posetness and persistence.
    pub fn new(
        worlds: usize,
        le_pairs: &[(usize, usize)],
        val: impl IntoIterator<Item = (Variable, Vec<bool>)>,
    ) -> Result<KripkeModel, KripkeError> {
        let poset = Poset::new(worlds, le_pairs)
            .map_err(|e| KripkeError::Malformed(format!("{e}")))?;
        let mut model = KripkeModel { poset, val: BTreeMap::new() };
        for (v, set) in val {
            model.insert_valuation(v, set)?;
        }
        Ok(model)
    }

    fn insert_valuation(&mut self, v: Variable, set: Vec<bool>) -> Result<(), KripkeError> {
        if set.len() != self.poset.len() {
            return Err(KripkeError::Malformed(format!(
                "valuation of '{v}' covers {} worlds, expected {}",
                set.len(),
                self.poset.len()
            )));
        }
        for w in 0..set.len() {
            if set[w] {
                for w2 in 0..set.len() {
                    if self.poset.le(w, w2) && !set[w2] {
                        return Err(KripkeError::NotPersistent(v));
                    }
                }
            }
        }
        self.val.insert(v, set);
        Ok(())
    }

    pub fn worlds(&self) -> usize {
        self.poset.len()
    }

    pub fn le(&self, w1: usize, w2: usize) -> bool {
        self.poset.le(w1, w2)
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn valuations(&self) -> impl Iterator<Item = (&Variable, &Vec<bool>)> {
        self.val.iter()
    }

    /// Standard intuitionistic forcing at a world; implication and negation
    /// quantify over successor worlds.
    pub fn forces(&self, w: usize, f: &Formula) -> Result<bool, KripkeError> {
        match f {
            Formula::Var(v) => self
                .val
                .get(v)
                .map(|set| set[w])
                .ok_or_else(|| KripkeError::UnknownVariable(v.clone())),
            Formula::And(a, b) => Ok(self.forces(w, a)? && self.forces(w, b)?),
            Formula::Or(a, b) => Ok(self.forces(w, a)? || self.forces(w, b)?),
            Formula::Imp(a, b) => {
                for w2 in 0..self.worlds() {
                    if self.le(w, w2) && self.forces(w2, a)? && !self.forces(w2, b)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Not(a) => {
                for w2 in 0..self.worlds() {
                    if self.le(w, w2) && self.forces(w2, a)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Box(_) => Err(KripkeError::ModalConnective(Connective::Box)),
            Formula::Circle(_) => Err(KripkeError::ModalConnective(Connective::Circle)),
        }
    }

    /// The Heyting algebra of this model's upward-closed sets (downsets of
    /// the dual order), used to cross-validate the two semantics.
    pub fn upset_algebra(&self) -> HeytingAlgebra {
        HeytingAlgebra::from_poset(&self.poset.dual())
    }
}

/// Upward-closed subsets of a poset as world masks, ascending.
pub fn upsets(poset: &Poset) -> Vec<u32> {
    let n = poset.len();
    assert!(n <= 31);
    let mut out = Vec::new();
    'next: for mask in 0u32..(1 << n) {
        for w in 0..n {
            if mask & (1 << w) != 0 {
                for w2 in 0..n {
                    if poset.le(w, w2) && mask & (1 << w2) == 0 {
                        continue 'next;
                    }
                }
            }
        }
        out.push(mask);
    }
    out
}

/// Search all posets with at most `max_worlds` worlds and all persistent
/// valuations for a world refuting `f`. Returns the first hit in a fixed
/// order; `None` means no countermodel within the bound.
pub fn countermodel(
    f: &Formula,
    max_worlds: usize,
) -> Result<Option<(KripkeModel, usize)>, KripkeError> {
    if f.language() != Language::Assertoric {
        let c = if f.language() == Language::Bimodal {
            Connective::Circle
        } else {
            Connective::Box
        };
        return Err(KripkeError::ModalConnective(c));
    }
    let vars: Vec<Variable> = f.variables().into_iter().collect();
    for n in 1..=max_worlds {
        for poset in enumerate_posets(n) {
            let sets = upsets(&poset);
            let mut slots = vec![0usize; vars.len()];
            loop {
                let val: Vec<(Variable, Vec<bool>)> = vars
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let mask = sets[slots[k]];
                        (v.clone(), (0..n).map(|w| mask & (1 << w) != 0).collect())
                    })
                    .collect();
                let model = KripkeModel::new(n, &poset_pairs(&poset), val)
                    .expect("upsets are persistent");
                for w in 0..n {
                    if !model.forces(w, f)? {
                        return Ok(Some((model, w)));
                    }
                }
                let mut carry = true;
                for s in slots.iter_mut() {
                    *s += 1;
                    if *s < sets.len() {
                        carry = false;
                        break;
                    }
                    *s = 0;
                }
                if carry || vars.is_empty() {
                    break;
                }
            }
        }
    }
    Ok(None)
}

fn poset_pairs(poset: &Poset) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..poset.len() {
        for j in 0..poset.len() {
            if i != j && poset.le(i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{evaluate, ModalAlgebra, Valuation};
    use crate::syntax::parse;

    fn pa(s: &str) -> Formula {
        parse(s, Language::Assertoric).unwrap()
    }

    fn peirce_pq() -> Formula {
        pa("((p -> q) -> p) -> p")
    }

    #[test]
    fn forcing_basics() {
        let m = KripkeModel::new(
            1,
            &[],
            [
                (Variable::new("p"), vec![true]),
                (Variable::new("q"), vec![false]),
            ],
        )
        .unwrap();
        assert!(!m.forces(0, &pa("p -> q")).unwrap());
        assert!(m.forces(0, &Formula::top()).unwrap());
        assert!(matches!(
            m.forces(0, &pa("r")),
            Err(KripkeError::UnknownVariable(_))
        ));
        assert!(matches!(
            m.forces(0, &parse("[]p", Language::Modal).unwrap()),
            Err(KripkeError::ModalConnective(Connective::Box))
        ));
    }

    #[test]
    fn peirce_fails_on_two_chain() {
        // p true only at the upper world, q nowhere.
        let m = KripkeModel::new(
            2,
            &[(0, 1)],
            [
                (Variable::new("p"), vec![false, true]),
                (Variable::new("q"), vec![false, false]),
            ],
        )
        .unwrap();
        assert!(!m.forces(0, &peirce_pq()).unwrap());
        assert!(m.forces(1, &peirce_pq()).unwrap());
    }

    #[test]
    fn persistence_validation() {
        let bad = KripkeModel::new(
            2,
            &[(0, 1)],
            [(Variable::new("p"), vec![true, false])],
        );
        assert!(matches!(bad, Err(KripkeError::NotPersistent(_))));
    }

    #[test]
    fn countermodel_search_examples() {
        // (P(p,q) -> q) -> q has no countermodel with up to 4 worlds.
        let shifted = Formula::imp(
            Formula::imp(peirce_pq(), pa("q")),
            pa("q"),
        );
        assert!(countermodel(&shifted, 4).unwrap().is_none());
        // P(p,q) itself falls on two worlds.
        let (m, w) = countermodel(&peirce_pq(), 2).unwrap().unwrap();
        assert_eq!(m.worlds(), 2);
        assert!(!m.forces(w, &peirce_pq()).unwrap());
        // p -> p never fails.
        assert!(countermodel(&pa("p -> p"), 3).unwrap().is_none());
        // Modal input is rejected.
        assert!(countermodel(&parse("[]p", Language::Modal).unwrap(), 2).is_err());
    }

    #[test]
    fn forcing_is_persistent() {
        // Deterministic sweep over every persistent valuation of a fixed
        // poset and a few formulas.
        let poset = Poset::new(3, &[(0, 1), (0, 2)]).unwrap();
        let sets = upsets(&poset);
        let formulas = [
            pa("p -> q"),
            pa("~p | q"),
            pa("(p -> q) -> (p & q)"),
            peirce_pq(),
        ];
        for &mp in &sets {
            for &mq in &sets {
                let m = KripkeModel::new(
                    3,
                    &[(0, 1), (0, 2)],
                    [
                        (Variable::new("p"), (0..3).map(|w| mp & (1 << w) != 0).collect()),
                        (Variable::new("q"), (0..3).map(|w| mq & (1 << w) != 0).collect()),
                    ],
                )
                .unwrap();
                for f in &formulas {
                    for w1 in 0..3 {
                        for w2 in 0..3 {
                            if m.le(w1, w2) && m.forces(w1, f).unwrap() {
                                assert!(m.forces(w2, f).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn agreement_with_upset_algebra() {
        // Forcing-validity in a model equals validity of the formula in the
        // Heyting algebra of its upsets, for every valuation over a small
        // poset.
        let pairs = [(0usize, 1usize), (0, 2)];
        let poset = Poset::new(3, &pairs).unwrap();
        let algebra = HeytingAlgebra::from_poset(&poset.dual());
        let identity_box: Vec<usize> = (0..algebra.size()).collect();
        let alg = ModalAlgebra::new(algebra, identity_box).unwrap();
        let sets = upsets(&poset);
        // Element of the upset algebra corresponding to a world mask: the
        // downset-of-dual with the same members. Recover by matching sizes
        // via evaluation of a single variable.
        let formulas = [pa("p -> q"), pa("p | ~p"), peirce_pq(), pa("~~p -> p")];
        for f in &formulas {
            // Model-side validity: true at every world under every valuation.
            let mut model_valid = true;
            for &mp in &sets {
                for &mq in &sets {
                    let m = KripkeModel::new(
                        3,
                        &pairs,
                        [
                            (Variable::new("p"), (0..3).map(|w| mp & (1 << w) != 0).collect()),
                            (Variable::new("q"), (0..3).map(|w| mq & (1 << w) != 0).collect()),
                        ],
                    )
                    .unwrap();
                    for w in 0..3 {
                        if !m.forces(w, f).unwrap() {
                            model_valid = false;
                        }
                    }
                }
            }
            // Algebra-side validity over all valuations.
            let mut algebra_valid = true;
            for pe in 0..alg.size() {
                for qe in 0..alg.size() {
                    let v = Valuation::from_pairs([
                        (Variable::new("p"), pe),
                        (Variable::new("q"), qe),
                    ]);
                    if evaluate(f, &alg, &v).unwrap() != alg.base.one() {
                        algebra_valid = false;
                    }
                }
            }
            assert_eq!(model_valid, algebra_valid, "{f}");
        }
    }
}
