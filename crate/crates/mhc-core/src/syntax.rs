//! Formula languages, parsing, printing, substitution and replacement.
//!
//! Three languages share one AST: the assertoric language (no modalities),
//! the modal language (adds `[]`) and the bimodal language (adds `O`).
//! A formula does not store its language; [`Formula::language`] computes the
//! minimal language containing the connectives that actually occur.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A sentential variable, identified by name.
///
/// Names follow the grammar `[a-z][a-z0-9]*`; the word `top` is reserved by
/// the parser as sugar for `p -> p`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    name: String,
}

impl Variable {
    pub fn new(name: impl Into<String>) -> Variable {
        let name = name.into();
        debug_assert!(is_valid_var_name(&name), "invalid variable name: {name:?}");
        Variable { name }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

pub(crate) fn is_valid_var_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    name != "top" && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
}

/// One of the three formula languages, ordered by inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Language {
    Assertoric,
    Modal,
    Bimodal,
}

impl Language {
    pub fn as_str(&self) -> &'static str {
        match self {
            Language::Assertoric => "assertoric",
            Language::Modal => "modal",
            Language::Bimodal => "bimodal",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Connective tags, as reported by [`Formula::connectives`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Connective {
    And,
    Or,
    Imp,
    Not,
    Box,
    Circle,
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Connective::And => "&",
            Connective::Or => "|",
            Connective::Imp => "->",
            Connective::Not => "~",
            Connective::Box => "[]",
            Connective::Circle => "O",
        };
        f.write_str(s)
    }
}

/// A formula over the largest (bimodal) signature.
///
/// Equality is structural; there is no normalization.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Var(Variable),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Box(Box<Formula>),
    Circle(Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Formula {
        Formula::Var(Variable::new(name))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn boxed(a: Formula) -> Formula {
        Formula::Box(Box::new(a))
    }

    pub fn circle(a: Formula) -> Formula {
        Formula::Circle(Box::new(a))
    }

    /// `top := p -> p` for the fixed variable `p`.
    pub fn top() -> Formula {
        Formula::imp(Formula::var("p"), Formula::var("p"))
    }

    /// Peirce's law `P(x, y) = ((x -> y) -> x) -> x`.
    pub fn peirce(x: Formula, y: Formula) -> Formula {
        Formula::imp(
            Formula::imp(Formula::imp(x.clone(), y), x.clone()),
            x,
        )
    }

    /// The minimal language containing this formula's connectives.
    pub fn language(&self) -> Language {
        match self {
            Formula::Var(_) => Language::Assertoric,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.language().max(b.language())
            }
            Formula::Not(a) => a.language(),
            Formula::Box(a) => a.language().max(Language::Modal),
            Formula::Circle(_) => Language::Bimodal,
        }
    }

    /// Set of variables occurring in the formula.
    pub fn variables(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<Variable>) {
        match self {
            Formula::Var(v) => {
                out.insert(v.clone());
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
            Formula::Not(a) | Formula::Box(a) | Formula::Circle(a) => a.collect_variables(out),
        }
    }

    /// Set of connective tags occurring in the formula.
    pub fn connectives(&self) -> BTreeSet<Connective> {
        let mut out = BTreeSet::new();
        self.collect_connectives(&mut out);
        out
    }

    fn collect_connectives(&self, out: &mut BTreeSet<Connective>) {
        match self {
            Formula::Var(_) => {}
            Formula::And(a, b) => {
                out.insert(Connective::And);
                a.collect_connectives(out);
                b.collect_connectives(out);
            }
            Formula::Or(a, b) => {
                out.insert(Connective::Or);
                a.collect_connectives(out);
                b.collect_connectives(out);
            }
            Formula::Imp(a, b) => {
                out.insert(Connective::Imp);
                a.collect_connectives(out);
                b.collect_connectives(out);
            }
            Formula::Not(a) => {
                out.insert(Connective::Not);
                a.collect_connectives(out);
            }
            Formula::Box(a) => {
                out.insert(Connective::Box);
                a.collect_connectives(out);
            }
            Formula::Circle(a) => {
                out.insert(Connective::Circle);
                a.collect_connectives(out);
            }
        }
    }

    /// All subformulas in pre-order, including `self`.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = alloc::vec![self];
        while let Some(f) = stack.pop() {
            out.push(f);
            match f {
                Formula::Var(_) => {}
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
                Formula::Not(a) | Formula::Box(a) | Formula::Circle(a) => stack.push(a),
            }
        }
        out
    }

    /// Does `target` occur as a subformula of `self`?
    pub fn contains(&self, target: &Formula) -> bool {
        self.subformulas().iter().any(|f| *f == target)
    }

    /// Apply a substitution homomorphically.
    pub fn substitute(&self, s: &Substitution) -> Formula {
        match self {
            Formula::Var(v) => s.image(v),
            Formula::And(a, b) => Formula::and(a.substitute(s), b.substitute(s)),
            Formula::Or(a, b) => Formula::or(a.substitute(s), b.substitute(s)),
            Formula::Imp(a, b) => Formula::imp(a.substitute(s), b.substitute(s)),
            Formula::Not(a) => Formula::neg(a.substitute(s)),
            Formula::Box(a) => Formula::boxed(a.substitute(s)),
            Formula::Circle(a) => Formula::circle(a.substitute(s)),
        }
    }

    /// Simultaneous replacement of subformula occurrences.
    ///
    /// Each node is scanned top-down against the pairs in order; the first
    /// matching target wins and its replacement is not rescanned
    /// (outer-first, single pass). Targets that do not occur are ignored.
    pub fn replace(&self, pairs: &[(Formula, Formula)]) -> Formula {
        for (target, replacement) in pairs {
            if self == target {
                return replacement.clone();
            }
        }
        match self {
            Formula::Var(_) => self.clone(),
            Formula::And(a, b) => Formula::and(a.replace(pairs), b.replace(pairs)),
            Formula::Or(a, b) => Formula::or(a.replace(pairs), b.replace(pairs)),
            Formula::Imp(a, b) => Formula::imp(a.replace(pairs), b.replace(pairs)),
            Formula::Not(a) => Formula::neg(a.replace(pairs)),
            Formula::Box(a) => Formula::boxed(a.replace(pairs)),
            Formula::Circle(a) => Formula::circle(a.replace(pairs)),
        }
    }

    /// Delete every `[]` node, keeping its child. `O` nodes are untouched,
    /// so the result is assertoric exactly when the input is circle-free.
    pub fn erase_boxes(&self) -> Formula {
        match self {
            Formula::Var(_) => self.clone(),
            Formula::And(a, b) => Formula::and(a.erase_boxes(), b.erase_boxes()),
            Formula::Or(a, b) => Formula::or(a.erase_boxes(), b.erase_boxes()),
            Formula::Imp(a, b) => Formula::imp(a.erase_boxes(), b.erase_boxes()),
            Formula::Not(a) => Formula::neg(a.erase_boxes()),
            Formula::Box(a) => a.erase_boxes(),
            Formula::Circle(a) => Formula::circle(a.erase_boxes()),
        }
    }
}

/// A finite mapping from variables to formulas, applied homomorphically.
/// Variables absent from the mapping are fixed.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Substitution {
    map: BTreeMap<Variable, Formula>,
}

impl Substitution {
    pub fn identity() -> Substitution {
        Substitution::default()
    }

    pub fn single(v: Variable, f: Formula) -> Substitution {
        let mut s = Substitution::identity();
        s.bind(v, f);
        s
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Variable, Formula)>) -> Substitution {
        let mut s = Substitution::identity();
        for (v, f) in pairs {
            s.bind(v, f);
        }
        s
    }

    /// Insert a binding; a binding of a variable to itself is dropped so that
    /// substitutions have a canonical representation.
    pub fn bind(&mut self, v: Variable, f: Formula) {
        if f == Formula::Var(v.clone()) {
            self.map.remove(&v);
        } else {
            self.map.insert(v, f);
        }
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, v: &Variable) -> Option<&Formula> {
        self.map.get(v)
    }

    /// Image of a single variable.
    pub fn image(&self, v: &Variable) -> Formula {
        self.map
            .get(v)
            .cloned()
            .unwrap_or_else(|| Formula::Var(v.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Formula)> {
        self.map.iter()
    }

    /// Composition `self` then `next`: `(self.then(next))(v) = next(self(v))`.
    ///
    /// Satisfies `f.substitute(s1).substitute(s2) == f.substitute(&s1.then(s2))`.
    pub fn then(&self, next: &Substitution) -> Substitution {
        let mut out = Substitution::identity();
        for (v, f) in &self.map {
            out.bind(v.clone(), f.substitute(next));
        }
        for (v, f) in &next.map {
            if !self.map.contains_key(v) {
                out.bind(v.clone(), f.clone());
            }
        }
        out
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, t) in &self.map {
            if !first {
                f.write_str(", ")?;
            }
            write!(f, "{v}:={t}")?;
            first = false;
        }
        Ok(())
    }
}

/// Match `pattern` against `target`, treating `pattern`'s variables as holes.
/// Returns the unique substitution `s` with `pattern.substitute(&s) == target`,
/// if one exists.
pub fn match_formula(pattern: &Formula, target: &Formula) -> Option<Substitution> {
    let mut binding = BTreeMap::new();
    if match_into(pattern, target, &mut binding) {
        Some(Substitution::from_pairs(binding))
    } else {
        None
    }
}

fn match_into(pattern: &Formula, target: &Formula, binding: &mut BTreeMap<Variable, Formula>) -> bool {
    match (pattern, target) {
        (Formula::Var(v), t) => match binding.get(v) {
            Some(bound) => bound == t,
            None => {
                binding.insert(v.clone(), t.clone());
                true
            }
        },
        (Formula::And(a1, b1), Formula::And(a2, b2))
        | (Formula::Or(a1, b1), Formula::Or(a2, b2))
        | (Formula::Imp(a1, b1), Formula::Imp(a2, b2)) => {
            match_into(a1, a2, binding) && match_into(b1, b2, binding)
        }
        (Formula::Not(a1), Formula::Not(a2))
        | (Formula::Box(a1), Formula::Box(a2))
        | (Formula::Circle(a1), Formula::Circle(a2)) => match_into(a1, a2, binding),
        _ => false,
    }
}

/// Error from [`parse`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    /// Malformed input with byte position.
    Syntax { position: usize, message: String },
    /// Well-formed formula using a connective outside the declared language.
    Language {
        connective: Connective,
        declared: Language,
    },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { position, message } => {
                write!(f, "syntax error at byte {position}: {message}")
            }
            ParseError::Language { connective, declared } => {
                write!(f, "connective '{connective}' not allowed in {declared} language")
            }
        }
    }
}

/// Parse a formula in the standard grammar, checking it fits `language`.
///
/// Grammar: variables `[a-z][a-z0-9]*`; prefix `~` (not), `[]` (box),
/// `O` (circle) bind tightest; then `&`, `|`, `->`, all right-associative,
/// with `->` loosest. `top` abbreviates `p -> p`. Whitespace is free.
pub fn parse(text: &str, language: Language) -> Result<Formula, ParseError> {
    let mut p = Parser { input: text.as_bytes(), pos: 0 };
    p.skip_ws();
    let f = p.parse_imp()?;
    p.skip_ws();
    if p.pos != p.input.len() {
        return Err(p.err("unexpected trailing input"));
    }
    let minimal = f.language();
    if minimal > language {
        let connective = if minimal == Language::Bimodal {
            Connective::Circle
        } else {
            Connective::Box
        };
        return Err(ParseError::Language { connective, declared: language });
    }
    Ok(f)
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: &str) -> ParseError {
        ParseError::Syntax { position: self.pos, message: message.to_owned() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.input[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn parse_imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_or()?;
        self.skip_ws();
        if self.eat("->") {
            self.skip_ws();
            let rhs = self.parse_imp()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_or(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_and()?;
        self.skip_ws();
        // Stop before "->"; a bare '|' continues the disjunction.
        if self.peek() == Some(b'|') {
            self.pos += 1;
            self.skip_ws();
            let rhs = self.parse_or()?;
            Ok(Formula::or(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_and(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_unary()?;
        self.skip_ws();
        if self.peek() == Some(b'&') {
            self.pos += 1;
            self.skip_ws();
            let rhs = self.parse_and()?;
            Ok(Formula::and(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_unary(&mut self) -> Result<Formula, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'~') => {
                self.pos += 1;
                Ok(Formula::neg(self.parse_unary()?))
            }
            Some(b'[') => {
                if self.eat("[]") {
                    Ok(Formula::boxed(self.parse_unary()?))
                } else {
                    Err(self.err("expected \"[]\""))
                }
            }
            Some(b'O') => {
                self.pos += 1;
                Ok(Formula::circle(self.parse_unary()?))
            }
            Some(b'(') => {
                self.pos += 1;
                let f = self.parse_imp()?;
                self.skip_ws();
                if self.eat(")") {
                    Ok(f)
                } else {
                    Err(self.err("expected \")\""))
                }
            }
            Some(c) if c.is_ascii_lowercase() => {
                let start = self.pos;
                self.pos += 1;
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
                {
                    self.pos += 1;
                }
                let name = core::str::from_utf8(&self.input[start..self.pos]).unwrap();
                if name == "top" {
                    Ok(Formula::top())
                } else {
                    Ok(Formula::Var(Variable::new(name)))
                }
            }
            _ => Err(self.err("expected a formula")),
        }
    }
}

// Rendering: minimal parentheses, inverse of the parser on ASTs.
const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;
const PREC_ATOM: u8 = 5;

fn prec_of(f: &Formula) -> u8 {
    match f {
        Formula::Var(_) => PREC_ATOM,
        Formula::Imp(..) => PREC_IMP,
        Formula::Or(..) => PREC_OR,
        Formula::And(..) => PREC_AND,
        Formula::Not(_) | Formula::Box(_) | Formula::Circle(_) => PREC_UNARY,
    }
}

fn fmt_prec(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = prec_of(f);
    let parens = prec < min;
    if parens {
        out.write_str("(")?;
    }
    match f {
        Formula::Var(v) => write!(out, "{v}")?,
        Formula::Imp(a, b) => {
            fmt_prec(a, PREC_IMP + 1, out)?;
            out.write_str(" -> ")?;
            fmt_prec(b, PREC_IMP, out)?;
        }
        Formula::Or(a, b) => {
            fmt_prec(a, PREC_OR + 1, out)?;
            out.write_str(" | ")?;
            fmt_prec(b, PREC_OR, out)?;
        }
        Formula::And(a, b) => {
            fmt_prec(a, PREC_AND + 1, out)?;
            out.write_str(" & ")?;
            fmt_prec(b, PREC_AND, out)?;
        }
        Formula::Not(a) => {
            out.write_str("~")?;
            fmt_prec(a, PREC_UNARY, out)?;
        }
        Formula::Box(a) => {
            out.write_str("[]")?;
            fmt_prec(a, PREC_UNARY, out)?;
        }
        Formula::Circle(a) => {
            out.write_str("O ")?;
            fmt_prec(a, PREC_UNARY, out)?;
        }
    }
    if parens {
        out.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;

    fn pa(s: &str) -> Formula {
        parse(s, Language::Assertoric).unwrap()
    }

    fn pm(s: &str) -> Formula {
        parse(s, Language::Modal).unwrap()
    }

    #[test]
    fn parse_basic() {
        assert_eq!(pa("p -> p"), Formula::imp(Formula::var("p"), Formula::var("p")));
        assert_eq!(pa("top"), Formula::top());
        let f = pm("[]p -> (q | (q -> p))");
        assert_eq!(
            f,
            Formula::imp(
                Formula::boxed(Formula::var("p")),
                Formula::or(
                    Formula::var("q"),
                    Formula::imp(Formula::var("q"), Formula::var("p"))
                )
            )
        );
    }

    #[test]
    fn parse_language_guard() {
        assert!(matches!(
            parse("O p", Language::Assertoric),
            Err(ParseError::Language { connective: Connective::Circle, .. })
        ));
        assert!(matches!(
            parse("[]p", Language::Assertoric),
            Err(ParseError::Language { connective: Connective::Box, .. })
        ));
        assert!(parse("O []p", Language::Bimodal).is_ok());
    }

    #[test]
    fn parse_errors_have_position() {
        match parse("p ->", Language::Assertoric) {
            Err(ParseError::Syntax { position, .. }) => assert_eq!(position, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(parse("p q", Language::Assertoric).is_err());
        assert!(parse("", Language::Assertoric).is_err());
    }

    #[test]
    fn precedence_and_associativity() {
        // ~ binds tightest, then &, |, ->; binaries are right-associative.
        assert_eq!(pa("~p & q | r -> s"), pa("((~p & q) | r) -> s"));
        assert_eq!(pa("p -> q -> r"), pa("p -> (q -> r)"));
        assert_eq!(pa("p & q & r"), pa("p & (q & r)"));
        assert_eq!(pa("p | q | r"), pa("p | (q | r)"));
        assert_eq!(pm("[]~p"), Formula::boxed(Formula::neg(Formula::var("p"))));
    }

    #[test]
    fn render_round_trips() {
        let samples = [
            "p -> p",
            "[]p -> (q | (q -> p))",
            "((p -> q) -> p) -> p",
            "~(p & q) | ~r",
            "[](p & []q)",
            "p & q & (r | s) -> ~p",
        ];
        for s in samples {
            let f = parse(s, Language::Modal).unwrap();
            let rendered = format!("{f}");
            assert_eq!(parse(&rendered, Language::Modal).unwrap(), f, "render of {s}: {rendered}");
        }
        let g = parse("O (p -> O q)", Language::Bimodal).unwrap();
        assert_eq!(parse(&format!("{g}"), Language::Bimodal).unwrap(), g);
    }

    #[test]
    fn substitution_examples() {
        // p -> p with {p := q & r}
        let s = Substitution::single(Variable::new("p"), pa("q & r"));
        assert_eq!(pa("p -> p").substitute(&s), pa("(q & r) -> (q & r)"));
        // []p -> (q | (q -> p)) with {p := top}
        let s = Substitution::single(Variable::new("p"), Formula::top());
        assert_eq!(
            pm("[]p -> (q | (q -> p))").substitute(&s),
            pm("[](p -> p) -> (q | (q -> (p -> p)))")
        );
        // identity substitution
        assert_eq!(pa("p").substitute(&Substitution::identity()), pa("p"));
    }

    #[test]
    fn replace_examples() {
        let box_p = pm("[]p");
        // ([]p -> []p)[[]p : top] -> top -> top
        assert_eq!(
            pm("[]p -> []p").replace(&[(box_p.clone(), Formula::top())]),
            pa("(p -> p) -> (p -> p)")
        );
        // no occurrence
        assert_eq!(pa("p -> q").replace(&[(pa("r"), Formula::top())]), pa("p -> q"));
        // P(q,p) does not contain []p
        let peirce_qp = Formula::peirce(Formula::var("q"), Formula::var("p"));
        assert!(!peirce_qp.contains(&box_p));
        assert_eq!(peirce_qp.replace(&[(box_p, Formula::top())]), peirce_qp);
    }

    #[test]
    fn replace_outer_first() {
        // Both the outer [][]p and the inner []p are targets: outer wins,
        // and the replacement is not rescanned.
        let outer = pm("[][]p");
        let inner = pm("[]p");
        let f = pm("[][]p & []p");
        let out = f.replace(&[
            (outer, Formula::var("a")),
            (inner.clone(), Formula::var("b")),
        ]);
        assert_eq!(out, pa("a & b"));
        // A replacement containing a target is left alone.
        let g = inner.clone().replace(&[(inner.clone(), Formula::boxed(inner))]);
        assert_eq!(g, pm("[][]p"));
    }

    #[test]
    fn erase_boxes_examples() {
        assert_eq!(pm("[]p -> p").erase_boxes(), pa("p -> p"));
        assert_eq!(pm("[](p & []q)").erase_boxes(), pa("p & q"));
        let a = pa("p -> (q | ~r)");
        assert_eq!(a.erase_boxes(), a);
        let f = pm("[]([]p -> [](q & []r))");
        assert_eq!(f.erase_boxes().erase_boxes(), f.erase_boxes());
    }

    #[test]
    fn peirce_examples() {
        assert_eq!(
            Formula::peirce(Formula::var("p"), Formula::var("q")),
            pa("((p -> q) -> p) -> p")
        );
        assert_eq!(
            Formula::peirce(Formula::var("q"), Formula::var("p")),
            pa("((q -> p) -> q) -> q")
        );
        let t = Formula::top();
        assert_eq!(
            Formula::peirce(t.clone(), t.clone()),
            Formula::imp(Formula::imp(Formula::imp(t.clone(), t.clone()), t.clone()), t)
        );
    }

    #[test]
    fn variables_and_connectives() {
        let f = pm("[]p -> (q | (q -> p))");
        let vars: Vec<_> = f.variables().into_iter().map(|v| v.name().to_owned()).collect();
        assert_eq!(vars, vec!["p", "q"]);
        assert_eq!(
            f.connectives(),
            BTreeSet::from([Connective::Or, Connective::Imp, Connective::Box])
        );
        assert_eq!(Formula::top().variables().len(), 1);
        assert_eq!(Formula::top().connectives(), BTreeSet::from([Connective::Imp]));
        assert_eq!(pa("~p").connectives(), BTreeSet::from([Connective::Not]));
    }

    #[test]
    fn match_formula_works() {
        let pat = pm("[]p -> (q | (q -> p))");
        let tgt = pm("[](a & b) -> (c | (c -> (a & b)))");
        let s = match_formula(&pat, &tgt).unwrap();
        assert_eq!(pat.substitute(&s), tgt);
        assert!(match_formula(&pat, &pm("[]p -> (q | (r -> p))")).is_none());
    }

    #[test]
    fn substitution_composition() {
        let s1 = Substitution::single(Variable::new("p"), pa("q -> q"));
        let s2 = Substitution::from_pairs([
            (Variable::new("q"), pa("r & r")),
            (Variable::new("p"), pa("s")),
        ]);
        let f = pa("p -> (q -> p)");
        assert_eq!(f.substitute(&s1).substitute(&s2), f.substitute(&s1.then(&s2)));
    }
}
