//! The mapping `t` from the modal into the bimodal language, the splitting
//! mapping `s` back, and their composite `embed = s . t`.

use crate::syntax::{Formula, Language};

/// Error: `t` takes circle-free input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleInInput;

impl core::fmt::Display for CircleInInput {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("translation t is defined on the modal language; input contains O")
    }
}

/// `t`: variables, implications, negations and boxes acquire a leading `O`;
/// conjunction and disjunction pass through.
pub fn gmt_t(a: &Formula) -> Result<Formula, CircleInInput> {
    if a.language() > Language::Modal {
        return Err(CircleInInput);
    }
    Ok(t_rec(a))
}

fn t_rec(a: &Formula) -> Formula {
    match a {
        Formula::Var(_) => Formula::circle(a.clone()),
        Formula::And(x, y) => Formula::and(t_rec(x), t_rec(y)),
        Formula::Or(x, y) => Formula::or(t_rec(x), t_rec(y)),
        Formula::Imp(x, y) => Formula::circle(Formula::imp(t_rec(x), t_rec(y))),
        Formula::Not(x) => Formula::circle(Formula::neg(t_rec(x))),
        Formula::Box(x) => Formula::circle(Formula::boxed(t_rec(x))),
        Formula::Circle(_) => unreachable!("guarded by language check"),
    }
}

/// `s`: commutes with the modal connectives and splits each circle as
/// `s(O a) = s(a) & []s(a)`. Total; the result is circle-free.
pub fn split_s(b: &Formula) -> Formula {
    match b {
        Formula::Var(_) => b.clone(),
        Formula::And(x, y) => Formula::and(split_s(x), split_s(y)),
        Formula::Or(x, y) => Formula::or(split_s(x), split_s(y)),
        Formula::Imp(x, y) => Formula::imp(split_s(x), split_s(y)),
        Formula::Not(x) => Formula::neg(split_s(x)),
        Formula::Box(x) => Formula::boxed(split_s(x)),
        Formula::Circle(x) => {
            let inner = split_s(x);
            Formula::and(inner.clone(), Formula::boxed(inner))
        }
    }
}

/// The composite `s . t`, a circle-free image of a modal formula.
pub fn embed(a: &Formula) -> Result<Formula, CircleInInput> {
    Ok(split_s(&gmt_t(a)?))
}

/// Number of circle nodes in a formula.
pub fn circle_count(f: &Formula) -> usize {
    f.subformulas()
        .iter()
        .filter(|g| matches!(g, Formula::Circle(_)))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn pm(s: &str) -> Formula {
        parse(s, Language::Modal).unwrap()
    }

    fn pb(s: &str) -> Formula {
        parse(s, Language::Bimodal).unwrap()
    }

    #[test]
    fn t_examples() {
        assert_eq!(gmt_t(&pm("p")).unwrap(), pb("O p"));
        assert_eq!(gmt_t(&pm("p -> q")).unwrap(), pb("O (O p -> O q)"));
        assert_eq!(gmt_t(&pm("[]p")).unwrap(), pb("O [] O p"));
        assert!(gmt_t(&pb("O p")).is_err());
    }

    #[test]
    fn s_examples() {
        assert_eq!(split_s(&pb("O p")), pm("p & []p"));
        assert_eq!(split_s(&pb("[]p")), pm("[]p"));
        assert_eq!(
            split_s(&pb("O [] O p")),
            pm("[](p & []p) & [][](p & []p)")
        );
    }

    #[test]
    fn embed_examples() {
        assert_eq!(
            embed(&pm("[]p")).unwrap(),
            pm("[](p & []p) & [][](p & []p)")
        );
        assert_eq!(embed(&pm("p")).unwrap(), pm("p & []p"));
    }

    #[test]
    fn embed_of_box_splits_as_conjunction_of_box_and_boxbox() {
        // embed([]alpha) = []t'(alpha) & [][]t'(alpha) structurally.
        for text in ["p", "p -> q", "[]p & ~q", "[](p | q) -> p"] {
            let alpha = pm(text);
            let embedded = embed(&Formula::boxed(alpha.clone())).unwrap();
            let t_alpha = split_s(&gmt_t(&alpha).unwrap());
            assert_eq!(
                embedded,
                Formula::and(
                    Formula::boxed(t_alpha.clone()),
                    Formula::boxed(Formula::boxed(t_alpha))
                )
            );
        }
    }

    /// Spot-check report, not a theorem of this crate: the embedding images
    /// of all thirteen E-axioms are valid in every K4.Grz algebra with at
    /// most four elements enumerated here.
    #[test]
    fn embedded_e_axioms_valid_in_small_k4grz_algebras() {
        use crate::algebra::{
            enumerate_box_tables, valid, HeytingAlgebra, ModalAlgebra, Poset,
        };
        use crate::calculi::calculus;
        let e = calculus("E").unwrap();
        let mut report = Vec::new();
        for atoms in 1..=2 {
            let base = HeytingAlgebra::from_poset(&Poset::antichain(atoms));
            for table in enumerate_box_tables(&base) {
                let m = ModalAlgebra { base: base.clone(), box_table: table };
                if !m.classify().k4grz {
                    continue;
                }
                let all_valid = e
                    .axioms()
                    .all(|(_, a)| valid(&embed(a).unwrap(), &m).unwrap());
                report.push((m.size(), all_valid));
            }
        }
        assert_eq!(report.len(), 14);
        assert!(report.iter().all(|(_, ok)| *ok), "{report:?}");
    }

    #[test]
    fn circle_bookkeeping() {
        for text in ["p", "p -> q", "[]p", "~(p & []q) | (q -> p)"] {
            let f = pm(text);
            let t = gmt_t(&f).unwrap();
            let expected: usize = f
                .subformulas()
                .iter()
                .filter(|g| {
                    matches!(
                        g,
                        Formula::Var(_) | Formula::Imp(..) | Formula::Not(_) | Formula::Box(_)
                    )
                })
                .count();
            assert_eq!(circle_count(&t), expected, "{text}");
            assert_eq!(circle_count(&split_s(&t)), 0);
            assert_eq!(split_s(&t).language().max(Language::Modal), Language::Modal);
        }
    }
}
