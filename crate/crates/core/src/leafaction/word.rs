use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use super::ActionError;
use crate::plhomeo::PlMap;
use crate::qfield::QNum;

/// Largest multiple of a period we unroll when merging two factors.
const MAX_PERIOD_MULTIPLE: i64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Letter {
    pub generator: String,
    pub exponent: i64,
}

/// A group word `g_1^e_1 g_2^e_2 ...`, evaluated as `g_1^e_1 ∘ g_2^e_2 ∘ ...`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Result<Self, ActionError> {
        if let Some(l) = letters.iter().find(|l| l.exponent == 0) {
            return Err(ActionError::ZeroExponent(l.generator.clone()));
        }
        Ok(Word(letters))
    }

    pub fn letter(generator: &str, exponent: i64) -> Self {
        Word(vec![Letter {
            generator: generator.to_string(),
            exponent,
        }])
    }

    /// Parses `beta_l^2 beta_r^-1 alpha_l` (whitespace or `*` separated).
    pub fn parse(text: &str) -> Result<Self, ActionError> {
        let mut letters = Vec::new();
        for tok in text.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => (
                    n,
                    e.parse::<i64>()
                        .map_err(|_| ActionError::MalformedWord(text.to_string()))?,
                ),
                None => (tok, 1),
            };
            if name.is_empty() {
                return Err(ActionError::MalformedWord(text.to_string()));
            }
            letters.push(Letter {
                generator: name.to_string(),
                exponent: exp,
            });
        }
        Self::new(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|l| l.exponent.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        for l in &other.0 {
            out.push_right(l.clone());
        }
        out
    }

    /// `letter · self`, with free reduction against the first letter.
    pub fn prepend(&self, letter: Letter) -> Word {
        let mut out = Word(vec![letter]);
        for l in &self.0 {
            out.push_right(l.clone());
        }
        out
    }

    fn push_right(&mut self, l: Letter) {
        if let Some(last) = self.0.last_mut() {
            if last.generator == l.generator {
                last.exponent += l.exponent;
                if last.exponent == 0 {
                    self.0.pop();
                }
                return;
            }
        }
        self.0.push(l);
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if l.exponent == 1 {
                write!(f, "{}", l.generator)?;
            } else {
                write!(f, "{}^{}", l.generator, l.exponent)?;
            }
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A homeomorphism of the leaf space given as a composition of periodic PL
/// maps, applied right to left.
///
/// Adjacent factors are merged whenever they share a common period (always
/// for translations). Factors with incommensurable periods stay separate:
/// their composition commutes with no nontrivial translation and has no
/// finite periodic description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordMap {
    factors: Vec<PlMap>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapComparison {
    Equal,
    Differ { at: QNum },
    /// No difference found at the probe points; equality not decided.
    Undecided,
}

/// Common period of two maps if both periods are small rational multiples of
/// one another (or either map is a translation).
fn common_period(f: &PlMap, g: &PlMap) -> Option<QNum> {
    if f.is_translation() {
        return Some(g.period().clone());
    }
    if g.is_translation() {
        return Some(f.period().clone());
    }
    let (rational, ratio) = f.period().ratio_is_rational(g.period()).ok()?;
    if !rational {
        return None;
    }
    let r: &BigRational = ratio.rational_part();
    let a = r.numer().abs().to_i64()?;
    let b = r.denom().to_i64()?;
    if a > MAX_PERIOD_MULTIPLE || b > MAX_PERIOD_MULTIPLE {
        return None;
    }
    Some(f.period().scale_int(b))
}

fn merge(outer: &PlMap, inner: &PlMap) -> Option<PlMap> {
    let p = common_period(outer, inner)?;
    let o = outer.with_period(&p).ok()?;
    let i = inner.with_period(&p).ok()?;
    o.compose(&i).ok()
}

impl WordMap {
    pub fn identity() -> Self {
        WordMap { factors: Vec::new() }
    }

    pub fn from_map(f: PlMap) -> Self {
        let mut w = Self::identity();
        w.push_right(f);
        w
    }

    pub fn factors(&self) -> &[PlMap] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// The map as a single periodic PL map, when it has one.
    pub fn as_periodic(&self) -> Option<&PlMap> {
        match self.factors.as_slice() {
            [f] => Some(f),
            _ => None,
        }
    }

    fn push_right(&mut self, f: PlMap) {
        if f.is_identity() {
            return;
        }
        let mut current = f;
        while let Some(last) = self.factors.last() {
            match merge(last, &current) {
                Some(m) => {
                    self.factors.pop();
                    if m.is_identity() {
                        return;
                    }
                    current = m;
                }
                None => break,
            }
        }
        self.factors.push(current);
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &WordMap) -> WordMap {
        let mut out = self.clone();
        for f in &other.factors {
            out.push_right(f.clone());
        }
        out
    }

    pub fn inverse(&self) -> WordMap {
        let mut out = Self::identity();
        for f in self.factors.iter().rev() {
            out.push_right(f.inverse());
        }
        out
    }

    pub fn eval(&self, x: &QNum) -> QNum {
        self.factors
            .iter()
            .rev()
            .fold(x.clone(), |acc, f| f.eval(&acc))
    }

    fn probes(&self, d: u64) -> Vec<QNum> {
        let mut pts = vec![QNum::zero(d)];
        for f in &self.factors {
            for shift in -1..=2 {
                let s = f.period().scale_int(shift);
                for bp in f.breakpoints() {
                    pts.push(&bp.x + &s);
                }
            }
        }
        pts
    }

    /// Exact when both sides reduce to periodic maps with a common period;
    /// otherwise searches breakpoint probes for a witness of difference.
    pub fn compare(&self, other: &WordMap) -> MapComparison {
        let d = self
            .factors
            .iter()
            .chain(other.factors.iter())
            .map(|f| f.discriminant())
            .next();
        let Some(d) = d else {
            return MapComparison::Equal;
        };
        let diff = other.inverse().compose(self);
        if diff.is_identity() {
            return MapComparison::Equal;
        }
        if let Some(f) = diff.as_periodic() {
            // a non-identity canonical map moves one of its breakpoints
            let moved = f
                .breakpoints()
                .iter()
                .map(|bp| bp.x.clone())
                .find(|x| &f.eval(x) != x)
                .expect("non-identity map moves a breakpoint");
            return MapComparison::Differ { at: moved };
        }
        let mut pts = self.probes(d);
        pts.extend(other.probes(d));
        for x in pts {
            if self.eval(&x) != other.eval(&x) {
                return MapComparison::Differ { at: x };
            }
        }
        MapComparison::Undecided
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QNum {
        QNum::parse(s, 2).unwrap()
    }

    #[test]
    fn word_parsing_and_display() {
        let w = Word::parse("beta_l^2 beta_r^-1 alpha_l").unwrap();
        assert_eq!(w.letters().len(), 3);
        assert_eq!(w.len(), 4);
        assert_eq!(w.to_string(), "beta_l^2 beta_r^-1 alpha_l");
        assert!(matches!(Word::parse("a^0"), Err(ActionError::ZeroExponent(_))));
        assert!(matches!(Word::parse("a^x"), Err(ActionError::MalformedWord(_))));
        assert_eq!(Word::parse("").unwrap().to_string(), "1");
        let u = Word::parse("a b").unwrap();
        let v = Word::parse("b^-1 a").unwrap();
        assert_eq!(u.concat(&v).to_string(), "a^2");
    }

    #[test]
    fn commensurable_factors_merge() {
        let t = PlMap::translation(q("1"), q("1/3")).unwrap();
        let b = PlMap::new(
            q("1/2"),
            vec![
                crate::plhomeo::Breakpoint::new(q("0"), q("0")),
                crate::plhomeo::Breakpoint::new(q("1/4"), q("3/8")),
            ],
        )
        .unwrap();
        let c = PlMap::new(
            q("1"),
            vec![
                crate::plhomeo::Breakpoint::new(q("0"), q("0")),
                crate::plhomeo::Breakpoint::new(q("1/2"), q("3/4")),
            ],
        )
        .unwrap();
        let w = WordMap::from_map(t).compose(&WordMap::from_map(b.clone()));
        assert!(w.as_periodic().is_some());
        let w = w.compose(&WordMap::from_map(c));
        let f = w.as_periodic().unwrap();
        assert_eq!(f.period(), &q("1"));
        let back = w.compose(&w.inverse());
        assert!(back.is_identity());
    }

    #[test]
    fn incommensurable_factors_stay_apart() {
        let b1 = PlMap::new(
            q("1"),
            vec![
                crate::plhomeo::Breakpoint::new(q("0"), q("0")),
                crate::plhomeo::Breakpoint::new(q("1/2"), q("3/4")),
            ],
        )
        .unwrap();
        let b2 = b1.affine_conjugate(&QNum::sqrt_d(2)).unwrap();
        let u = WordMap::from_map(b1.clone()).compose(&WordMap::from_map(b2.clone()));
        let v = WordMap::from_map(b2).compose(&WordMap::from_map(b1));
        assert_eq!(u.factors().len(), 2);
        match u.compare(&v) {
            MapComparison::Differ { at } => assert_ne!(u.eval(&at), v.eval(&at)),
            other => panic!("expected a witness, got {other:?}"),
        }
        assert_eq!(u.compare(&u.clone()), MapComparison::Equal);
    }
}
