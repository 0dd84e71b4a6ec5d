//! Registry of axiom groups and Hilbert calculi, fragment selection, and
//! axiom-instance matching.
//!
//! Axioms are concrete formulas over the fixed distinct variables `p, q, r`
//! (and `s` nowhere); schematic behaviour arises only through the
//! substitution rule or through [`CalculusSpec::match_axiom`].

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::syntax::{match_formula, parse, Formula, Language, Substitution};

/// Identifier of an axiom group. Groups have fixed contents, shared by all
/// calculi that include them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupId {
    I,
    C,
    D,
    N,
    M,
    M1,
    M2,
    Kuz,
    KuzStar,
    KmExtra,
    K4GrzExtra,
    /// User-supplied extra axioms attached to a registered calculus.
    Extra,
}

impl GroupId {
    pub const ALL: [GroupId; 11] = [
        GroupId::I,
        GroupId::C,
        GroupId::D,
        GroupId::N,
        GroupId::M,
        GroupId::M1,
        GroupId::M2,
        GroupId::Kuz,
        GroupId::KuzStar,
        GroupId::KmExtra,
        GroupId::K4GrzExtra,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            GroupId::I => "i",
            GroupId::C => "c",
            GroupId::D => "d",
            GroupId::N => "n",
            GroupId::M => "m",
            GroupId::M1 => "m1",
            GroupId::M2 => "m2",
            GroupId::Kuz => "kuz",
            GroupId::KuzStar => "kuzstar",
            GroupId::KmExtra => "km_extra",
            GroupId::K4GrzExtra => "k4grz_extra",
            GroupId::Extra => "extra",
        }
    }

    pub fn parse(s: &str) -> Option<GroupId> {
        match s {
            "i" => Some(GroupId::I),
            "c" => Some(GroupId::C),
            "d" => Some(GroupId::D),
            "n" => Some(GroupId::N),
            "m" => Some(GroupId::M),
            "m1" => Some(GroupId::M1),
            "m2" => Some(GroupId::M2),
            "kuz" => Some(GroupId::Kuz),
            "kuzstar" => Some(GroupId::KuzStar),
            "km_extra" => Some(GroupId::KmExtra),
            "k4grz_extra" => Some(GroupId::K4GrzExtra),
            "extra" => Some(GroupId::Extra),
            _ => None,
        }
    }

    /// The fixed axioms of this group, in display order.
    pub fn axioms(&self) -> Vec<Formula> {
        let texts: &[&str] = match self {
            GroupId::I => &["p -> (q -> p)", "(p -> (q -> r)) -> ((p -> q) -> (p -> r))"],
            GroupId::C => &["(p & q) -> p", "(p & q) -> q", "p -> (q -> (p & q))"],
            GroupId::D => &[
                "p -> (p | q)",
                "p -> (q | p)",
                "(p -> r) -> ((q -> r) -> ((p | q) -> r))",
            ],
            GroupId::N => &["(p -> q) -> ((p -> ~q) -> ~p)", "p -> (~p -> q)"],
            GroupId::M => &[
                "[](p -> q) -> ([]p -> []q)",
                "p -> []p",
                "[]p -> (((q -> p) -> q) -> q)",
            ],
            GroupId::M1 => &["[](p -> q) -> ([]p -> []q)", "p -> []p"],
            GroupId::M2 => &["[]p -> (q | (q -> p))"],
            GroupId::Kuz => &["[]p -> (((q -> p) -> q) -> q)"],
            GroupId::KuzStar => &["[]p -> (q | (q -> p))"],
            GroupId::KmExtra => &["([]p -> p) -> p"],
            GroupId::K4GrzExtra => &[
                "~~p -> p",
                "[](p -> q) -> ([]p -> []q)",
                "[]p -> [][]p",
                "[]([](p -> []p) -> p) -> []p",
            ],
            GroupId::Extra => &[],
        };
        texts
            .iter()
            .map(|t| parse(t, Language::Modal).expect("registry axiom parses"))
            .collect()
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An axiom group together with its formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomGroup {
    pub id: GroupId,
    pub axioms: Vec<Formula>,
}

impl AxiomGroup {
    fn registry(id: GroupId) -> AxiomGroup {
        AxiomGroup { id, axioms: id.axioms() }
    }
}

/// Reference to one axiom: group plus zero-based index within the group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AxiomRef {
    pub group: GroupId,
    pub index: usize,
}

impl AxiomRef {
    pub fn new(group: GroupId, index: usize) -> AxiomRef {
        AxiomRef { group, index }
    }
}

impl fmt::Display for AxiomRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // One-based index in the printed form, matching the certificate format.
        write!(f, "{}.{}", self.group, self.index + 1)
    }
}

/// Which inference rules a calculus postulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleSet {
    pub substitution: bool,
    pub modus_ponens: bool,
    pub necessitation: bool,
}

impl RuleSet {
    pub const STANDARD: RuleSet =
        RuleSet { substitution: true, modus_ponens: true, necessitation: false };
    pub const WITH_NECESSITATION: RuleSet =
        RuleSet { substitution: true, modus_ponens: true, necessitation: true };
}

/// A calculus: a name, a language, an ordered list of axiom groups, and a
/// rule set. Values are immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CalculusSpec {
    name: String,
    language: Language,
    groups: Vec<AxiomGroup>,
    rules: RuleSet,
}

/// Errors from the registry operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CalculiError {
    UnknownCalculus(String),
    GroupNotInCalculus { calculus: String, group: GroupId },
}

impl fmt::Display for CalculiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CalculiError::UnknownCalculus(name) => write!(f, "unknown calculus '{name}'"),
            CalculiError::GroupNotInCalculus { calculus, group } => {
                write!(f, "calculus '{calculus}' has no axiom group '{group}'")
            }
        }
    }
}

/// Names of the registered calculi, as used on the command line.
pub const CALCULUS_NAMES: [&str; 8] =
    ["Int", "IntBox", "Kuz", "KuzStar", "mHC", "E", "KM", "K4Grz"];

/// Look up a calculus by name.
pub fn calculus(name: &str) -> Result<CalculusSpec, CalculiError> {
    let intuitionistic = [GroupId::I, GroupId::C, GroupId::D, GroupId::N];
    let (language, group_ids, rules): (Language, Vec<GroupId>, RuleSet) = match name {
        "Int" => (Language::Assertoric, intuitionistic.to_vec(), RuleSet::STANDARD),
        "IntBox" => (Language::Modal, intuitionistic.to_vec(), RuleSet::STANDARD),
        "Kuz" => {
            let mut g = intuitionistic.to_vec();
            g.push(GroupId::Kuz);
            (Language::Modal, g, RuleSet::STANDARD)
        }
        "KuzStar" => {
            let mut g = intuitionistic.to_vec();
            g.push(GroupId::KuzStar);
            (Language::Modal, g, RuleSet::STANDARD)
        }
        "mHC" => {
            let mut g = intuitionistic.to_vec();
            g.extend([GroupId::M1, GroupId::M2]);
            (Language::Modal, g, RuleSet::STANDARD)
        }
        "E" => {
            let mut g = intuitionistic.to_vec();
            g.push(GroupId::M);
            (Language::Modal, g, RuleSet::STANDARD)
        }
        "KM" => {
            let mut g = intuitionistic.to_vec();
            g.extend([GroupId::M1, GroupId::M2, GroupId::KmExtra]);
            (Language::Modal, g, RuleSet::STANDARD)
        }
        "K4Grz" => {
            let mut g = intuitionistic.to_vec();
            g.push(GroupId::K4GrzExtra);
            (Language::Modal, g, RuleSet::WITH_NECESSITATION)
        }
        _ => return Err(CalculiError::UnknownCalculus(name.to_owned())),
    };
    Ok(CalculusSpec {
        name: name.to_owned(),
        language,
        groups: group_ids.into_iter().map(AxiomGroup::registry).collect(),
        rules,
    })
}

impl CalculusSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn language(&self) -> Language {
        self.language
    }

    pub fn rules(&self) -> RuleSet {
        self.rules
    }

    pub fn groups(&self) -> &[AxiomGroup] {
        &self.groups
    }

    pub fn group_ids(&self) -> Vec<GroupId> {
        self.groups.iter().map(|g| g.id).collect()
    }

    pub fn has_group(&self, id: GroupId) -> bool {
        self.groups.iter().any(|g| g.id == id)
    }

    /// Human-readable label, e.g. `Int[i,c,d]` for a fragment.
    pub fn label(&self) -> String {
        let full = calculus(&self.name).map(|c| c.group_ids()).unwrap_or_default();
        if full == self.group_ids() {
            self.name.clone()
        } else {
            let mut out = self.name.clone();
            out.push('[');
            for (k, g) in self.groups.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(g.id.as_str());
            }
            out.push(']');
            out
        }
    }

    /// Restrict to the given groups, keeping registry order. The rules are
    /// unchanged. Errors if a requested group is not part of this calculus.
    pub fn fragment(&self, ids: &[GroupId]) -> Result<CalculusSpec, CalculiError> {
        for id in ids {
            if !self.has_group(*id) {
                return Err(CalculiError::GroupNotInCalculus {
                    calculus: self.name.clone(),
                    group: *id,
                });
            }
        }
        Ok(CalculusSpec {
            name: self.name.clone(),
            language: self.language,
            groups: self.groups.iter().filter(|g| ids.contains(&g.id)).cloned().collect(),
            rules: self.rules,
        })
    }

    /// Append user-supplied axioms as the `extra` group.
    pub fn with_extra_axioms(mut self, axioms: Vec<Formula>) -> CalculusSpec {
        if axioms.is_empty() {
            return self;
        }
        if let Some(g) = self.groups.iter_mut().find(|g| g.id == GroupId::Extra) {
            g.axioms.extend(axioms);
        } else {
            self.groups.push(AxiomGroup { id: GroupId::Extra, axioms });
        }
        self
    }

    /// All axioms in registry order with their references.
    pub fn axioms(&self) -> impl Iterator<Item = (AxiomRef, &Formula)> {
        self.groups.iter().flat_map(|g| {
            g.axioms
                .iter()
                .enumerate()
                .map(move |(i, a)| (AxiomRef::new(g.id, i), a))
        })
    }

    pub fn axiom_count(&self) -> usize {
        self.groups.iter().map(|g| g.axioms.len()).sum()
    }

    pub fn axiom(&self, r: AxiomRef) -> Option<&Formula> {
        self.groups.iter().find(|g| g.id == r.group)?.axioms.get(r.index)
    }

    /// Find the first axiom (in registry order) of which `f` is a
    /// substitution instance, together with the matching substitution.
    pub fn match_axiom(&self, f: &Formula) -> Option<(AxiomRef, Substitution)> {
        for (r, axiom) in self.axioms() {
            if let Some(s) = match_formula(axiom, f) {
                return Some((r, s));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Variable;
    use alloc::vec;

    #[test]
    fn axiom_counts() {
        assert_eq!(calculus("Int").unwrap().axiom_count(), 10);
        assert_eq!(calculus("IntBox").unwrap().axiom_count(), 10);
        assert_eq!(calculus("Kuz").unwrap().axiom_count(), 11);
        assert_eq!(calculus("KuzStar").unwrap().axiom_count(), 11);
        assert_eq!(calculus("mHC").unwrap().axiom_count(), 13);
        assert_eq!(calculus("E").unwrap().axiom_count(), 13);
        assert_eq!(calculus("KM").unwrap().axiom_count(), 14);
        assert_eq!(calculus("K4Grz").unwrap().axiom_count(), 14);
        assert!(calculus("Foo").is_err());
    }

    #[test]
    fn rule_sets() {
        for name in ["Int", "IntBox", "Kuz", "KuzStar", "mHC", "E", "KM"] {
            let c = calculus(name).unwrap();
            assert_eq!(c.rules(), RuleSet::STANDARD, "{name}");
        }
        let k4grz = calculus("K4Grz").unwrap();
        assert!(k4grz.rules().necessitation);
    }

    #[test]
    fn fragments() {
        let int = calculus("Int").unwrap();
        assert_eq!(int.fragment(&[GroupId::I, GroupId::C]).unwrap().axiom_count(), 5);
        assert_eq!(
            int.fragment(&[GroupId::I, GroupId::C, GroupId::D]).unwrap().axiom_count(),
            8
        );
        let e = calculus("E").unwrap();
        assert_eq!(e.fragment(&[GroupId::I, GroupId::M]).unwrap().axiom_count(), 5);
        assert!(int.fragment(&[GroupId::M]).is_err());
        // mHC exposes both the {i,m1} and the {i,m2} fragments.
        let mhc = calculus("mHC").unwrap();
        assert_eq!(mhc.fragment(&[GroupId::I, GroupId::M1]).unwrap().axiom_count(), 4);
        assert_eq!(mhc.fragment(&[GroupId::I, GroupId::M2]).unwrap().axiom_count(), 3);
        assert_eq!(int.fragment(&[GroupId::I, GroupId::C]).unwrap().label(), "Int[i,c]");
        assert_eq!(int.label(), "Int");
    }

    #[test]
    fn e_vs_mhc_axiom_sets() {
        // E and mHC differ exactly in kuz-form vs kuzstar-form of one axiom.
        let e: Vec<Formula> = calculus("E").unwrap().axioms().map(|(_, a)| a.clone()).collect();
        let mhc: Vec<Formula> =
            calculus("mHC").unwrap().axioms().map(|(_, a)| a.clone()).collect();
        let only_e: Vec<_> = e.iter().filter(|a| !mhc.contains(a)).collect();
        let only_mhc: Vec<_> = mhc.iter().filter(|a| !e.contains(a)).collect();
        assert_eq!(only_e, vec![&GroupId::Kuz.axioms()[0]]);
        assert_eq!(only_mhc, vec![&GroupId::KuzStar.axioms()[0]]);
    }

    #[test]
    fn match_axiom_examples() {
        let kuz = calculus("Kuz").unwrap();
        // []p -> (((A -> p) -> A) -> A) with A = q | (q -> p)
        let a = parse("q | (q -> p)", Language::Modal).unwrap();
        let target = Formula::imp(
            Formula::boxed(Formula::var("p")),
            Formula::peirce(a.clone(), Formula::var("p")),
        );
        let (r, s) = kuz.match_axiom(&target).unwrap();
        assert_eq!(r, AxiomRef::new(GroupId::Kuz, 0));
        assert_eq!(s.image(&Variable::new("q")), a);
        assert_eq!(s.image(&Variable::new("p")), Formula::var("p"));

        let int = calculus("Int").unwrap();
        let (r, s) = int
            .match_axiom(&parse("p -> (q -> p)", Language::Assertoric).unwrap())
            .unwrap();
        assert_eq!(r, AxiomRef::new(GroupId::I, 0));
        assert!(s.is_identity());
        assert!(int.match_axiom(&parse("p & q", Language::Assertoric).unwrap()).is_none());
    }

    #[test]
    fn every_axiom_matches_itself_and_instances() {
        for name in CALCULUS_NAMES {
            let c = calculus(name).unwrap();
            let axioms: Vec<(AxiomRef, Formula)> =
                c.axioms().map(|(r, a)| (r, a.clone())).collect();
            for (_, a) in &axioms {
                let (r, s) = c.match_axiom(a).expect("axiom matches itself");
                assert_eq!(c.axiom(r).unwrap().substitute(&s), *a);
                // An instance also matches (possibly against an earlier axiom).
                let inst = a.substitute(&Substitution::from_pairs([
                    (Variable::new("p"), parse("x | ~y", Language::Modal).unwrap()),
                    (Variable::new("q"), parse("[]z", Language::Modal).unwrap()),
                ]));
                let (r2, s2) = c.match_axiom(&inst).expect("instance matches");
                assert_eq!(c.axiom(r2).unwrap().substitute(&s2), inst);
            }
        }
    }

    #[test]
    fn extra_axioms() {
        let c = calculus("E")
            .unwrap()
            .with_extra_axioms(vec![parse("[]([]p -> p) -> []p", Language::Modal).unwrap()]);
        assert_eq!(c.axiom_count(), 14);
        assert!(c.has_group(GroupId::Extra));
    }
}
