//! The acceptance suite: eleven criteria, each with its content check and
//! runtime budget pinned. `certify-all` and the integration tests both run
//! these.

use std::time::{Duration, Instant};

use mhc_core::algebra::{
    check_lob_chains, double, enumerate_box_tables, enumerate_posets, find_countermodel,
    isomorphic, valid, weakening_witness, AlgebraClass, CountermodelQuery, HeytingAlgebra,
    ModalAlgebra, Poset, Valuation,
};
use mhc_core::calculi::{calculus, GroupId};
use mhc_core::certs::{certificate, certificate_names};
use mhc_core::equipollence::run_pipeline;
use mhc_core::kernel::{check, refine};
use mhc_core::kripke::{self, upsets, KripkeModel};
use mhc_core::syntax::{parse, Formula, Language, Variable};
use mhc_core::translate::{circle_count, embed, gmt_t, split_s};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one criterion.
#[derive(Debug, Clone)]
pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

fn criterion(
    id: usize,
    name: &'static str,
    budget: Duration,
    body: impl FnOnce() -> Result<String, String>,
) -> Criterion {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let within = elapsed <= budget;
    match outcome {
        Ok(detail) => Criterion {
            id,
            name,
            pass: within,
            detail: if within {
                detail
            } else {
                format!("{detail}; exceeded budget {budget:?}")
            },
            elapsed,
        },
        Err(detail) => Criterion { id, name, pass: false, detail, elapsed },
    }
}

fn pm(s: &str) -> Formula {
    parse(s, Language::Modal).expect("formula parses")
}

fn pa(s: &str) -> Formula {
    parse(s, Language::Assertoric).expect("formula parses")
}

/// Criterion 1: the bundled certificate suite passes in the stated
/// fragments.
fn certificates() -> Criterion {
    criterion(1, "bundled certificate suite", Duration::from_secs(1), || {
        let expected: &[(&str, &str, &str)] = &[
            ("int-deducibility-2", "Int[i,c,d]", "((q | (q -> p)) -> p) -> (q | (q -> p))"),
            ("prop31a", "Kuz[i,c,d,kuz]", "[]p -> (q | (q -> p))"),
            ("prop31b", "KuzStar[i,c,d,kuzstar]", "[]p -> (((q -> p) -> q) -> q)"),
            ("lemma-p-implies-P", "Int[i]", "p -> (((q -> p) -> q) -> q)"),
            (
                "lemma-negative-occurrence",
                "Int[i]",
                "(q -> p) -> (((r -> p) -> r) -> ((r -> q) -> r))",
            ),
            (
                "lemma-13-inkm",
                "Int[i]",
                "(p -> r) -> (((r -> p) -> p) -> ((((r -> q) -> r) -> (s -> r)) -> ((q -> p) -> (s -> r))))",
            ),
            ("snippet-e-five", "IntBox[i,c]", "dab -> (da -> db)"),
            ("lemma-peirce-double", "Int[i]", "((((p -> q) -> p) -> p) -> q) -> q"),
        ];
        let mut count = 0;
        for (name, fragment, conclusion) in expected {
            let d = certificate(name).map_err(|e| format!("{name}: {e}"))?;
            if d.calculus.label() != *fragment {
                return Err(format!("{name}: fragment {} != {fragment}", d.calculus.label()));
            }
            let v = check(&d).map_err(|e| format!("{name}: {e}"))?;
            if !v.ok {
                return Err(format!("{name}: {:?}", v.first_error()));
            }
            if v.conclusion != pm(conclusion) {
                return Err(format!("{name}: wrong conclusion {}", v.conclusion));
            }
            count += 1;
        }
        // Every other bundled certificate must check as well.
        for name in certificate_names() {
            let d = certificate(name).map_err(|e| format!("{name}: {e}"))?;
            let v = check(&d).map_err(|e| format!("{name}: {e}"))?;
            if !v.ok {
                return Err(format!("{name}: {:?}", v.first_error()));
            }
            count += 1;
        }
        Ok(format!("{count} certificate checks"))
    })
}

fn three_chain_box_one() -> ModalAlgebra {
    let base = HeytingAlgebra::from_poset(&Poset::chain(2));
    let one = base.one();
    ModalAlgebra::new(base, vec![one; 3]).unwrap()
}

/// Criterion 2: the separation-failure countermodel.
fn separation_failure() -> Criterion {
    criterion(2, "separation failure countermodel", Duration::from_secs(10), || {
        let alpha0 = pm("[]p -> (((q -> p) -> q) -> q)");
        let mut require = Vec::new();
        for id in [GroupId::I, GroupId::M1] {
            require.extend(id.axioms());
        }
        let query = CountermodelQuery {
            class: AlgebraClass::ModalHeyting,
            require_valid: require,
            max_base_size: 3,
        };
        let (m, v) = find_countermodel(&alpha0, &query)
            .map_err(|e| format!("{e}"))?
            .ok_or_else(|| "no countermodel found".to_string())?;
        if !isomorphic(&m, &three_chain_box_one()) {
            return Err("found algebra is not the 3-chain with box == 1".into());
        }
        let witness: Vec<String> = v.iter().map(|(x, e)| format!("{x}:={e}")).collect();
        Ok(format!("3-chain with box==1, witness {}", witness.join(",")))
    })
}

/// All K4Grz algebras over powerset bases of the given atom counts.
fn k4grz_algebras(atom_counts: &[usize]) -> Vec<ModalAlgebra> {
    let mut out = Vec::new();
    for &atoms in atom_counts {
        let base = HeytingAlgebra::from_poset(&Poset::antichain(atoms));
        for table in enumerate_box_tables(&base) {
            let m = ModalAlgebra { base: base.clone(), box_table: table };
            if m.classify().k4grz {
                out.push(m);
            }
        }
    }
    out
}

/// Criterion 3: doubling closure, exhaustive at sizes 2 and 4, randomized at
/// size 8.
fn doubling_closure() -> Criterion {
    criterion(3, "doubling closure", Duration::from_secs(120), || {
        let exhaustive = k4grz_algebras(&[1, 2]);
        let mut checked_count = 0;
        for m in &exhaustive {
            let d = double(m).map_err(|e| format!("{e}"))?;
            if !d.classify().k4grz {
                return Err(format!("doubleton of a size-{} algebra left the class", m.size()));
            }
            checked_count += 1;
        }
        // Randomized size-8 sampling: random assignments on the co-atoms of
        // the 8-element powerset algebra, filtered to K4Grz.
        let base = HeytingAlgebra::from_poset(&Poset::antichain(3));
        let mi = base.meet_irreducibles();
        let mut rng = ChaCha8Rng::seed_from_u64(0xE5A);
        let mut accepted = 0;
        let mut draws = 0;
        while accepted < 1000 {
            draws += 1;
            if draws > 200_000 {
                return Err(format!("only {accepted} random K4Grz tables in {draws} draws"));
            }
            let mut table = vec![0usize; base.size()];
            let assignment: Vec<usize> =
                (0..mi.len()).map(|_| rng.gen_range(0..base.size())).collect();
            for (x, slot) in table.iter_mut().enumerate() {
                let mut acc = base.one();
                for (k, &m) in mi.iter().enumerate() {
                    if base.leq(x, m) {
                        acc = base.meet(acc, assignment[k]);
                    }
                }
                *slot = acc;
            }
            let m = ModalAlgebra { base: base.clone(), box_table: table };
            if !m.classify().k4grz {
                continue;
            }
            accepted += 1;
            let d = double(&m).map_err(|e| format!("{e}"))?;
            if !d.classify().k4grz {
                return Err("a random size-8 doubleton left the class".into());
            }
        }
        Ok(format!(
            "{checked_count} exhaustive doubletons re-classified, {accepted} random size-8 samples, 0 failures"
        ))
    })
}

fn formula_pool() -> Vec<Formula> {
    [
        "p",
        "~p",
        "p -> q",
        "p | ~p",
        "~~p -> p",
        "[]p -> p",
        "p -> []p",
        "[](p -> q) -> ([]p -> []q)",
        "[]p -> [][]p",
        "[]([](p -> []p) -> p) -> []p",
        "[]p | ~[]p",
        "[](p & q) -> ([]p & []q)",
        "([]p -> p) -> p",
        "[]p -> (q | (q -> p))",
        "[]p -> (((q -> p) -> q) -> q)",
        "~[]p -> []~p",
        "(p & q) -> p",
        "[]~p -> ~[]p",
        "([]p & []q) -> [](p & q)",
        "[](p | q) -> ([]p | []q)",
    ]
    .iter()
    .map(|t| pm(t))
    .collect()
}

/// Criterion 4: every refutation lifts through doubling to refute the boxed
/// formula.
fn weakening_witnesses() -> Criterion {
    criterion(4, "weakening witnesses", Duration::from_secs(120), || {
        let algebras = k4grz_algebras(&[1, 2]);
        let pool = formula_pool();
        let mut pairs = 0;
        for m in &algebras {
            for f in &pool {
                let vars: Vec<Variable> = f.variables().into_iter().collect();
                let mut slots = vec![0usize; vars.len()];
                loop {
                    let v = Valuation::from_pairs(
                        vars.iter().cloned().zip(slots.iter().copied()),
                    );
                    let value =
                        mhc_core::algebra::evaluate(f, m, &v).map_err(|e| format!("{e}"))?;
                    if value != m.base.one() {
                        let w = weakening_witness(m, f, &v).map_err(|e| format!("{e}"))?;
                        if !w.refutes_box {
                            return Err(format!(
                                "lifted valuation fails to refute []({f}) on size {}",
                                m.size()
                            ));
                        }
                        pairs += 1;
                    }
                    let mut carry = true;
                    for s in slots.iter_mut() {
                        *s += 1;
                        if *s < m.size() {
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
        Ok(format!("{pairs} refutation pairs lifted, 0 failures"))
    })
}

/// Criterion 5: the E vs KM witness.
fn e_strictly_below_km() -> Criterion {
    criterion(5, "E strictly below KM", Duration::from_secs(10), || {
        let base = HeytingAlgebra::from_poset(&Poset::antichain(1));
        let id_box: Vec<usize> = (0..base.size()).collect();
        let m = ModalAlgebra::new(base, id_box).map_err(|e| format!("{e}"))?;
        let e = calculus("E").map_err(|e| format!("{e}"))?;
        let mut validated = 0;
        for (_, axiom) in e.axioms() {
            if !valid(axiom, &m).map_err(|e| format!("{e}"))? {
                return Err(format!("E axiom '{axiom}' fails in the identity-box algebra"));
            }
            validated += 1;
        }
        let km_extra = pm("([]p -> p) -> p");
        let witness = mhc_core::algebra::refute(&km_extra, &m)
            .map_err(|e| format!("{e}"))?
            .ok_or_else(|| "([]p -> p) -> p not refuted".to_string())?;
        // The countermodel search finds this algebra as well.
        let query = CountermodelQuery {
            class: AlgebraClass::E,
            require_valid: Vec::new(),
            max_base_size: 2,
        };
        let (found, _) = find_countermodel(&km_extra, &query)
            .map_err(|e| format!("{e}"))?
            .ok_or_else(|| "search missed the countermodel".to_string())?;
        if !isomorphic(&found, &m) {
            return Err("search found a different algebra".into());
        }
        let w: Vec<String> = witness.iter().map(|(x, e)| format!("{x}:={e}")).collect();
        Ok(format!("{validated} E axioms valid, witness {}", w.join(",")))
    })
}

/// Criterion 6: the Löb inequality chains hold in every modal Heyting
/// algebra with `x <= box x` over poset bases of size at most 4.
fn lob_chains() -> Criterion {
    criterion(6, "Loeb inequality chains", Duration::from_secs(120), || {
        let mut count = 0;
        for n in 1..=4 {
            for poset in enumerate_posets(n) {
                let base = HeytingAlgebra::from_poset(&poset);
                for table in enumerate_box_tables(&base) {
                    let m = ModalAlgebra { base: base.clone(), box_table: table };
                    if !m.classify().modal_heyting {
                        continue;
                    }
                    if !(0..m.size()).all(|x| m.base.leq(x, m.box_of(x))) {
                        continue;
                    }
                    if !check_lob_chains(&m).map_err(|e| format!("{e}"))? {
                        return Err(format!("chains fail on a size-{} algebra", m.size()));
                    }
                    count += 1;
                }
            }
        }
        Ok(format!("{count} algebras, 100% pass"))
    })
}

/// Criterion 7: the Kuz-form and KuzStar-form axioms are valid in exactly
/// the same modal Heyting algebras over small bases.
fn kuz_kuzstar_shadow() -> Criterion {
    criterion(7, "Kuz / KuzStar semantic shadow", Duration::from_secs(60), || {
        let kuz_axiom = pm("[]p -> (((q -> p) -> q) -> q)");
        let kuzstar_axiom = pm("[]p -> (q | (q -> p))");
        let mut count = 0;
        for n in 1..=3 {
            for poset in enumerate_posets(n) {
                let base = HeytingAlgebra::from_poset(&poset);
                for table in enumerate_box_tables(&base) {
                    let m = ModalAlgebra { base: base.clone(), box_table: table };
                    if !m.classify().modal_heyting {
                        continue;
                    }
                    let a = valid(&kuz_axiom, &m).map_err(|e| format!("{e}"))?;
                    let b = valid(&kuzstar_axiom, &m).map_err(|e| format!("{e}"))?;
                    if a != b {
                        return Err(format!("discrepancy on a size-{} algebra", m.size()));
                    }
                    count += 1;
                }
            }
        }
        Ok(format!("{count} algebras, 0 discrepancies"))
    })
}

fn random_formula(rng: &mut ChaCha8Rng, depth: usize, lang: Language) -> Formula {
    let vars = ["p", "q", "r"];
    if depth == 0 || rng.gen_range(0..4) == 0 {
        return Formula::var(vars[rng.gen_range(0..vars.len())]);
    }
    let top = match lang {
        Language::Assertoric => 4,
        Language::Modal => 5,
        Language::Bimodal => 6,
    };
    match rng.gen_range(0..top) {
        0 => Formula::and(
            random_formula(rng, depth - 1, lang),
            random_formula(rng, depth - 1, lang),
        ),
        1 => Formula::or(
            random_formula(rng, depth - 1, lang),
            random_formula(rng, depth - 1, lang),
        ),
        2 => Formula::imp(
            random_formula(rng, depth - 1, lang),
            random_formula(rng, depth - 1, lang),
        ),
        3 => Formula::neg(random_formula(rng, depth - 1, lang)),
        4 => Formula::boxed(random_formula(rng, depth - 1, lang)),
        _ => Formula::circle(random_formula(rng, depth - 1, lang)),
    }
}

/// Criterion 8: Kripke search results and persistence.
fn kripke_results() -> Criterion {
    criterion(8, "Kripke search and persistence", Duration::from_secs(120), || {
        let peirce = pa("((p -> q) -> p) -> p");
        let shifted = Formula::imp(Formula::imp(peirce.clone(), pa("q")), pa("q"));
        if kripke::countermodel(&shifted, 4).map_err(|e| format!("{e}"))?.is_some() {
            return Err("(P(p,q) -> q) -> q has a small countermodel".into());
        }
        let (m, w) = kripke::countermodel(&peirce, 2)
            .map_err(|e| format!("{e}"))?
            .ok_or_else(|| "P(p,q) not refuted on 2 worlds".to_string())?;
        if m.worlds() != 2 || m.forces(w, &peirce).map_err(|e| format!("{e}"))? {
            return Err("unexpected Peirce countermodel".into());
        }
        // Persistence on 10,000 random (model, formula) pairs.
        let mut rng = ChaCha8Rng::seed_from_u64(0x9E125);
        for _ in 0..10_000 {
            let n = rng.gen_range(1..=4usize);
            let mut pairs = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen_bool(0.4) {
                        pairs.push((i, j));
                    }
                }
            }
            let poset = Poset::new(n, &pairs).map_err(|e| format!("{e}"))?;
            let sets = upsets(&poset);
            let val: Vec<(Variable, Vec<bool>)> = ["p", "q", "r"]
                .iter()
                .map(|v| {
                    let mask = sets[rng.gen_range(0..sets.len())];
                    (Variable::new(*v), (0..n).map(|w| mask & (1 << w) != 0).collect())
                })
                .collect();
            let model = KripkeModel::new(n, &pairs, val).map_err(|e| format!("{e}"))?;
            let f = random_formula(&mut rng, 4, Language::Assertoric);
            for w1 in 0..n {
                if !model.forces(w1, &f).map_err(|e| format!("{e}"))? {
                    continue;
                }
                for w2 in 0..n {
                    if model.le(w1, w2)
                        && !model.forces(w2, &f).map_err(|e| format!("{e}"))?
                    {
                        return Err(format!("persistence fails for {f}"));
                    }
                }
            }
        }
        Ok("search results as stated; persistence on 10000 random pairs".into())
    })
}

/// Criterion 9: translation worked values and circle-freeness.
fn translations() -> Criterion {
    criterion(9, "translations", Duration::from_secs(60), || {
        if gmt_t(&pm("p")).unwrap() != parse("O p", Language::Bimodal).unwrap() {
            return Err("t(p) != O p".into());
        }
        if split_s(&parse("O p", Language::Bimodal).unwrap()) != pm("p & []p") {
            return Err("s(O p) != p & []p".into());
        }
        if embed(&pm("[]p")).unwrap() != pm("[](p & []p) & [][](p & []p)") {
            return Err("embed([]p) mismatch".into());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x51);
        for _ in 0..10_000 {
            let f = random_formula(&mut rng, 5, Language::Bimodal);
            if circle_count(&split_s(&f)) != 0 {
                return Err(format!("split_s left a circle in the image of {f}"));
            }
        }
        Ok("worked values and 10000 circle-free splits".into())
    })
}

/// Criterion 10: the equipollence pipeline on the bundled demonstrations.
fn equipollence_pipeline() -> Criterion {
    criterion(10, "equipollence pipeline", Duration::from_secs(5), || {
        let cases: &[(&str, &str, &str)] = &[
            ("demo-e-derivation", "p", "((q -> p) -> q) -> q"),
            ("demo-e-derivation-2", "p", "((r -> q) -> r) -> r"),
            ("demo-e-derivation-3", "q", "((p -> q) -> p) -> p"),
        ];
        let mut lines = 0;
        for (name, a, b) in cases {
            let d = certificate(name).map_err(|e| format!("{name}: {e}"))?;
            let refined = refine(&d).map_err(|e| format!("{name}: {e}"))?;
            let out = run_pipeline(&refined, &pa(a), &pa(b)).map_err(|e| format!("{name}: {e}"))?;
            for (stage, derivation) in [
                ("dstar", &out.transform.derivation),
                ("dstarstar", &out.boxtimes.derivation),
                ("int", &out.extracted),
            ] {
                let v = check(derivation).map_err(|e| format!("{name}/{stage}: {e}"))?;
                if !v.ok {
                    return Err(format!("{name}/{stage}: {:?}", v.first_error()));
                }
                lines += derivation.steps.len();
            }
            if out.extracted.conclusion() != Some(&pa(b)) {
                return Err(format!("{name}: wrong final conclusion"));
            }
            if out.extracted.calculus.name() != "Int" {
                return Err(format!("{name}: final calculus is not Int"));
            }
        }
        Ok(format!("3 pipelines, {lines} re-checked lines"))
    })
}

/// Criterion 11: soundness cross-check of premise-free E-theorems against
/// every classified E-algebra with at most four elements.
fn soundness_crosscheck() -> Criterion {
    criterion(11, "soundness cross-check", Duration::from_secs(60), || {
        // Conclusions of premise-free bundled E-certificates, plus the axioms
        // of E themselves.
        let mut theorems: Vec<Formula> = Vec::new();
        for name in certificate_names() {
            let d = certificate(name).map_err(|e| format!("{e}"))?;
            if d.calculus.name() == "E" && d.premises.is_empty() {
                theorems.push(d.conclusion().unwrap().clone());
            }
        }
        if theorems.is_empty() {
            return Err("no premise-free E-certificates bundled".into());
        }
        for (_, axiom) in calculus("E").map_err(|e| format!("{e}"))?.axioms() {
            theorems.push(axiom.clone());
        }
        let mut algebras = 0;
        let mut checks = 0;
        for n in 1..=3 {
            for poset in enumerate_posets(n) {
                let base = HeytingAlgebra::from_poset(&poset);
                if base.size() > 4 {
                    continue;
                }
                for table in enumerate_box_tables(&base) {
                    let m = ModalAlgebra { base: base.clone(), box_table: table };
                    if !m.classify().e {
                        continue;
                    }
                    algebras += 1;
                    for f in &theorems {
                        if !valid(f, &m).map_err(|e| format!("{e}"))? {
                            return Err(format!("'{f}' invalid in a size-{} E-algebra", m.size()));
                        }
                        checks += 1;
                    }
                }
            }
        }
        Ok(format!("{} theorems x {algebras} E-algebras, {checks} checks, 0 failures", theorems.len()))
    })
}

/// Run every criterion in order.
pub fn run_all() -> Vec<Criterion> {
    vec![
        certificates(),
        separation_failure(),
        doubling_closure(),
        weakening_witnesses(),
        e_strictly_below_km(),
        lob_chains(),
        kuz_kuzstar_shadow(),
        kripke_results(),
        translations(),
        equipollence_pipeline(),
        soundness_crosscheck(),
    ]
}

/// Print one line per criterion; returns whether all passed.
pub fn print_report(results: &[Criterion]) -> bool {
    let mut all = true;
    for c in results {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {status}  {} ({}; {:.2?})",
            c.id, c.name, c.detail, c.elapsed
        );
        all &= c.pass;
    }
    all
}
