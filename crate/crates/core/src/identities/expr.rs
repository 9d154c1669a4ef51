// SPDX-License-Identifier: Apache-2.0

//! Linear combinations of information atoms, canonicalized onto joint-entropy
//! coordinates `H(S)` for nonempty variable sets `S`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use super::IdentityError;

pub type Rational = Ratio<i64>;
pub type VarSet = BTreeSet<String>;

/// Most variables an expression may mention (31 entropy coordinates).
pub const MAX_VARIABLES: usize = 5;

pub fn var_set<I, S>(names: I) -> VarSet
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    names.into_iter().map(Into::into).collect()
}

fn render_set(s: &VarSet) -> String {
    s.iter().cloned().collect::<Vec<_>>().join(",")
}

/// One information atom. `C` is conditional entropy, `I` conditional mutual
/// information, `J` the symmetric form `C(S|T) + C(S'|T) - C(S,S'|T)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    C { target: VarSet, given: VarSet },
    I { left: VarSet, right: VarSet, given: VarSet },
    J { left: VarSet, right: VarSet, given: VarSet },
}

impl Atom {
    pub fn c<'a>(target: &[&'a str], given: &[&'a str]) -> Atom {
        Atom::C {
            target: var_set(target.iter().copied()),
            given: var_set(given.iter().copied()),
        }
    }

    pub fn i<'a>(left: &[&'a str], right: &[&'a str], given: &[&'a str]) -> Atom {
        Atom::I {
            left: var_set(left.iter().copied()),
            right: var_set(right.iter().copied()),
            given: var_set(given.iter().copied()),
        }
    }

    pub fn j<'a>(left: &[&'a str], right: &[&'a str], given: &[&'a str]) -> Atom {
        Atom::J {
            left: var_set(left.iter().copied()),
            right: var_set(right.iter().copied()),
            given: var_set(given.iter().copied()),
        }
    }

    pub fn variables(&self) -> VarSet {
        match self {
            Atom::C { target, given } => target.union(given).cloned().collect(),
            Atom::I { left, right, given } | Atom::J { left, right, given } => {
                left.iter().chain(right).chain(given).cloned().collect()
            }
        }
    }

    pub fn canonical(&self) -> EntropyExpression {
        let one = Rational::from_integer(1);
        let mut e = EntropyExpression::zero();
        match self {
            Atom::C { target, given } => {
                e.add_coordinate(union(target, given), one);
                e.add_coordinate(given.clone(), -one);
            }
            Atom::I { left, right, given } | Atom::J { left, right, given } => {
                e.add_coordinate(union(left, given), one);
                e.add_coordinate(union(right, given), one);
                e.add_coordinate(union(&union(left, right), given), -one);
                e.add_coordinate(given.clone(), -one);
            }
        }
        e
    }
}

fn union(a: &VarSet, b: &VarSet) -> VarSet {
    a.union(b).cloned().collect()
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cond = |g: &VarSet| {
            if g.is_empty() {
                String::new()
            } else {
                format!("|{}", render_set(g))
            }
        };
        match self {
            Atom::C { target, given } => write!(f, "C({}{})", render_set(target), cond(given)),
            Atom::I { left, right, given } => {
                write!(f, "I({};{}{})", render_set(left), render_set(right), cond(given))
            }
            Atom::J { left, right, given } => {
                write!(f, "J({};{}{})", render_set(left), render_set(right), cond(given))
            }
        }
    }
}

/// Canonical form: coefficients on `H(S)`; `H(empty)` is identically zero and
/// never stored, nor are zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EntropyExpression {
    coords: BTreeMap<VarSet, Rational>,
}

impl EntropyExpression {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn atom(atom: &Atom) -> Self {
        atom.canonical()
    }

    pub fn from_terms<'a, I>(terms: I) -> Self
    where
        I: IntoIterator<Item = &'a (Rational, Atom)>,
    {
        terms
            .into_iter()
            .fold(Self::zero(), |acc, (c, a)| acc + a.canonical() * *c)
    }

    fn add_coordinate(&mut self, set: VarSet, coeff: Rational) {
        if set.is_empty() || coeff.is_zero() {
            return;
        }
        let entry = self.coords.entry(set).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.coords.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coordinates(&self) -> &BTreeMap<VarSet, Rational> {
        &self.coords
    }

    pub fn variables(&self) -> VarSet {
        self.coords.keys().flatten().cloned().collect()
    }

    /// Re-canonicalize from coordinates (the map is already canonical, so this
    /// is the identity; exposed for the idempotence property test).
    pub fn canonicalize(&self) -> Self {
        let mut out = Self::zero();
        for (s, c) in &self.coords {
            out.add_coordinate(s.clone(), *c);
        }
        out
    }

    /// Parse `2*I(q;x,y) + C(z|q,y) - 1/2 J(a;b|c)`. Variable names are
    /// identifiers; `:` and `;` both separate the two sides of `I`/`J`.
    pub fn parse(text: &str) -> Result<Self, IdentityError> {
        Ok(Self::from_terms(&parse_terms(text)?))
    }
}

impl Add for EntropyExpression {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (s, c) in rhs.coords {
            self.add_coordinate(s, c);
        }
        self
    }
}

impl Sub for EntropyExpression {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for EntropyExpression {
    type Output = Self;
    fn neg(mut self) -> Self {
        for v in self.coords.values_mut() {
            *v = -*v;
        }
        self
    }
}

impl Mul<Rational> for EntropyExpression {
    type Output = Self;
    fn mul(self, k: Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            coords: self.coords.into_iter().map(|(s, c)| (s, c * k)).collect(),
        }
    }
}

impl fmt::Display for EntropyExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (s, c)) in self.coords.iter().enumerate() {
            match (idx, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            if mag != Rational::from_integer(1) {
                write!(f, "{mag}*")?;
            }
            write!(f, "H({})", render_set(s))?;
        }
        Ok(())
    }
}

pub fn parse_rational(text: &str) -> Result<Rational, IdentityError> {
    let text = text.trim();
    let bad = || IdentityError::Parse(format!("bad coefficient {text:?}"));
    match text.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(text.parse().map_err(|_| bad())?)),
    }
}

fn parse_set(text: &str) -> Result<VarSet, IdentityError> {
    let mut out = VarSet::new();
    for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(IdentityError::Parse(format!("bad variable name {name:?}")));
        }
        out.insert(name.to_string());
    }
    Ok(out)
}

/// Parse a single atom such as `I(q;x|y,z)`, `C(z|q,y,x)`, `H(a,b)`.
pub fn parse_atom(text: &str) -> Result<Atom, IdentityError> {
    let text = text.trim();
    let open = text
        .find('(')
        .ok_or_else(|| IdentityError::Parse(format!("missing '(' in {text:?}")))?;
    if !text.ends_with(')') {
        return Err(IdentityError::Parse(format!("missing ')' in {text:?}")));
    }
    let kind = text[..open].trim();
    let inner = &text[open + 1..text.len() - 1];
    let (body, given) = match inner.split_once('|') {
        Some((b, g)) => (b, parse_set(g)?),
        None => (inner, VarSet::new()),
    };
    let sides: Vec<&str> = body.split([';', ':']).collect();
    match (kind, sides.as_slice()) {
        ("C" | "H", [target]) => {
            let target = parse_set(target)?;
            if target.is_empty() {
                return Err(IdentityError::Parse(format!("empty target in {text:?}")));
            }
            Ok(Atom::C { target, given })
        }
        ("I" | "J", [left, right]) => {
            let (left, right) = (parse_set(left)?, parse_set(right)?);
            if left.is_empty() || right.is_empty() {
                return Err(IdentityError::Parse(format!("empty side in {text:?}")));
            }
            Ok(if kind == "I" {
                Atom::I { left, right, given }
            } else {
                Atom::J { left, right, given }
            })
        }
        _ => Err(IdentityError::Parse(format!("unrecognized atom {text:?}"))),
    }
}

/// Split an expression into signed, scaled atoms.
pub fn parse_terms(text: &str) -> Result<Vec<(Rational, Atom)>, IdentityError> {
    if text.trim() == "0" {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let mut sign = Rational::from_integer(1);
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut flush = |from: usize, to: usize, sign: Rational| -> Result<(), IdentityError> {
        let chunk = text[from..to].trim();
        if chunk.is_empty() {
            if from > 0 {
                return Err(IdentityError::Parse(format!("dangling operator in {text:?}")));
            }
            return Ok(());
        }
        let (coeff, atom_text) = split_coefficient(chunk)?;
        terms.push((sign * coeff, parse_atom(atom_text)?));
        Ok(())
    };
    for &(i, c) in &chars {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            '+' | '-' if depth == 0 => {
                flush(start, i, sign)?;
                sign = Rational::from_integer(if c == '-' { -1 } else { 1 });
                start = i + 1;
            }
            _ => {}
        }
    }
    flush(start, text.len(), sign)?;
    if terms.is_empty() {
        return Err(IdentityError::Parse(format!("no terms in {text:?}")));
    }
    Ok(terms)
}

fn split_coefficient(chunk: &str) -> Result<(Rational, &str), IdentityError> {
    let atom_start = chunk
        .find(|c: char| c.is_ascii_alphabetic())
        .ok_or_else(|| IdentityError::Parse(format!("no atom in {chunk:?}")))?;
    let prefix = chunk[..atom_start].trim().trim_end_matches('*').trim();
    let coeff = if prefix.is_empty() {
        Rational::from_integer(1)
    } else {
        parse_rational(prefix)?
    };
    Ok((coeff, &chunk[atom_start..]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> EntropyExpression {
        EntropyExpression::parse(s).unwrap()
    }

    #[test]
    fn chain_rule_is_exact() {
        assert_eq!(e("C(x,y)"), e("C(x) + C(y|x)"));
        assert_eq!(e("C(x,y|z)"), e("C(x|z) + C(y|x,z)"));
    }

    #[test]
    fn commutativity() {
        assert_eq!(e("I(x;y)"), e("I(y:x)"));
        assert_eq!(e("I(x;y)"), e("J(x;y)"));
        assert_ne!(e("I(x;y)"), e("C(x)"));
    }

    #[test]
    fn coefficients_and_zero() {
        assert_eq!(e("2*C(x) - C(x) - 1/2 C(x) - 1/2*H(x)"), EntropyExpression::zero());
        assert!(e("0").is_zero());
        assert_eq!(
            e("3/4 I(a;b|c)"),
            EntropyExpression::atom(&Atom::i(&["a"], &["b"], &["c"])) * Rational::new(3, 4)
        );
    }

    #[test]
    fn parse_errors() {
        for bad in ["C()", "I(x)", "Q(x)", "C(x", "C(x|y) + ", "2/0 C(x)", "C(x-y)"] {
            assert!(EntropyExpression::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn atom_display_round_trips() {
        for s in ["C(x,y|z)", "I(q;x,y)", "J(a;b|c,d)"] {
            let a = parse_atom(s).unwrap();
            assert_eq!(parse_atom(&a.to_string()).unwrap(), a);
        }
    }
}
