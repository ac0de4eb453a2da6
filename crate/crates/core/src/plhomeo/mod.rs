//! Piecewise-linear homeomorphisms of the line that commute with a fixed
//! translation `x -> x + p`.
//!
//! Every element of the universal central extension of the circle
//! homeomorphism group that we need is represented this way: the map is
//! stored by its breakpoints in one fundamental domain `[0, p)` and extended
//! by `f(x + p) = f(x) + p`. Maps are kept in canonical form (no collinear
//! breakpoints; translations stored as the single point `(0, t)`), so
//! structural equality is functional equality for a fixed period.

mod float;
mod rotation;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::qfield::{FieldError, QNum};

pub use float::FloatPlMap;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("period must be positive, got {0}")]
    NonPositivePeriod(QNum),
    #[error("a map needs at least one breakpoint")]
    NoBreakpoints,
    #[error("breakpoint abscissae must satisfy 0 <= x_0 < ... < x_(k-1) < period")]
    BreakpointOutOfOrder,
    #[error("map is not strictly increasing")]
    NotMonotone,
    #[error("period mismatch: {0} vs {1}")]
    PeriodMismatch(QNum, QNum),
    #[error("scale must be positive, got {0}")]
    NonPositiveScale(QNum),
    #[error("map does not commute with translation by {0}")]
    IncompatiblePeriod(QNum),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Breakpoint {
    pub x: QNum,
    pub y: QNum,
}

impl Breakpoint {
    pub fn new(x: QNum, y: QNum) -> Self {
        Breakpoint { x, y }
    }
}

/// A PL homeomorphism of the line commuting with translation by `period`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PlMap {
    period: QNum,
    breakpoints: Vec<Breakpoint>,
}

/// One connected component of a fixed-point set, reduced into `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FixedComponent {
    Point { x: QNum },
    /// A segment of the graph lying on the diagonal; `hi` may exceed `p`
    /// when the segment straddles the end of the fundamental domain.
    Interval { lo: QNum, hi: QNum },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "components", rename_all = "snake_case")]
pub enum FixedPoints {
    All,
    Empty,
    Set(Vec<FixedComponent>),
}

impl FixedPoints {
    pub fn is_empty(&self) -> bool {
        matches!(self, FixedPoints::Empty)
    }

    pub fn contains(&self, x: &QNum, period: &QNum) -> bool {
        match self {
            FixedPoints::All => true,
            FixedPoints::Empty => false,
            FixedPoints::Set(cs) => {
                let r = reduce_mod(x, period).0;
                cs.iter().any(|c| match c {
                    FixedComponent::Point { x } => *x == r,
                    FixedComponent::Interval { lo, hi } => {
                        (lo <= &r && &r <= hi) || (lo <= &(&r + period) && &(&r + period) <= hi)
                    }
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TranslationNumber {
    Exact { value: QNum },
    /// Rational enclosure `lo <= tau <= hi`.
    Bracket { lo: QNum, hi: QNum },
}

impl TranslationNumber {
    pub fn contains(&self, v: &QNum) -> bool {
        match self {
            TranslationNumber::Exact { value } => value == v,
            TranslationNumber::Bracket { lo, hi } => lo <= v && v <= hi,
        }
    }

    pub fn bounds(&self) -> (QNum, QNum) {
        match self {
            TranslationNumber::Exact { value } => (value.clone(), value.clone()),
            TranslationNumber::Bracket { lo, hi } => (lo.clone(), hi.clone()),
        }
    }
}

/// The group of translations `c` with `f(x + c) = f(x) + c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PeriodGroup {
    AllReals,
    Subgroup { step: QNum },
}

/// `(x - m p, m)` with the remainder in `[0, p)`.
pub(crate) fn reduce_mod(x: &QNum, p: &QNum) -> (QNum, BigInt) {
    let zero = QNum::zero(p.discriminant());
    if &zero <= x && x < p {
        return (x.clone(), BigInt::zero());
    }
    // float guess for m, accepted only if the remainder lands in [0, p)
    let guess = (x.to_f64() / p.to_f64()).floor();
    if guess.is_finite() && guess.abs() < 1e15 {
        let m = BigInt::from(guess as i64);
        let r = x - &p.scale(&BigRational::from_integer(m.clone()));
        if zero <= r && &r < p {
            return (r, m);
        }
    }
    let m = (x.try_div(p).expect("period is nonzero")).floor();
    let shift = p.scale(&BigRational::from_integer(m.clone()));
    (x - &shift, m)
}

/// Equal slopes on `[a, b]` and `[b, c]`, by cross-multiplication.
fn collinear(a: &Breakpoint, b: &Breakpoint, c: &Breakpoint) -> bool {
    (&b.y - &a.y) * (&c.x - &b.x) == (&c.y - &b.y) * (&b.x - &a.x)
}

fn slope(a: &Breakpoint, b: &Breakpoint) -> QNum {
    (&b.y - &a.y)
        .try_div(&(&b.x - &a.x))
        .expect("distinct abscissae")
}

impl PlMap {
    /// Builds a map from breakpoints in strict form: `0 <= x_0 < ... < p`,
    /// `y` strictly increasing and `y_(k-1) < y_0 + p`.
    pub fn new(period: QNum, breakpoints: Vec<Breakpoint>) -> Result<Self, PlError> {
        if breakpoints.is_empty() {
            return Err(PlError::NoBreakpoints);
        }
        let zero = QNum::zero(period.discriminant());
        for bp in &breakpoints {
            bp.x.try_cmp(&period)?;
            bp.y.try_cmp(&period)?;
        }
        if breakpoints[0].x < zero || breakpoints[breakpoints.len() - 1].x >= period {
            return Err(PlError::BreakpointOutOfOrder);
        }
        Self::from_window(period, breakpoints)
    }

    /// Accepts any strictly increasing breakpoint list spanning less than one
    /// period and reduces it to canonical form.
    pub(crate) fn from_window(period: QNum, points: Vec<Breakpoint>) -> Result<Self, PlError> {
        let zero = QNum::zero(period.discriminant());
        if period <= zero {
            return Err(PlError::NonPositivePeriod(period));
        }
        if points.is_empty() {
            return Err(PlError::NoBreakpoints);
        }
        for w in points.windows(2) {
            if w[0].x >= w[1].x {
                return Err(PlError::BreakpointOutOfOrder);
            }
            if w[0].y >= w[1].y {
                return Err(PlError::NotMonotone);
            }
        }
        let first = &points[0];
        let last = &points[points.len() - 1];
        if last.x >= &first.x + &period {
            return Err(PlError::BreakpointOutOfOrder);
        }
        if last.y >= &first.y + &period {
            return Err(PlError::NotMonotone);
        }

        let mut reduced: Vec<Breakpoint> = points
            .into_iter()
            .map(|bp| {
                let (x, m) = reduce_mod(&bp.x, &period);
                let shift = period.scale(&BigRational::from_integer(m));
                Breakpoint { x, y: &bp.y - &shift }
            })
            .collect();
        reduced.sort_by(|a, b| a.x.cmp(&b.x));

        let k = reduced.len();
        let at = |i: usize| -> Breakpoint {
            // cyclic access with the period shift applied past the ends
            if i < k {
                reduced[i].clone()
            } else {
                Breakpoint {
                    x: &reduced[i - k].x + &period,
                    y: &reduced[i - k].y + &period,
                }
            }
        };
        let mut kept = Vec::with_capacity(k);
        for i in 0..k {
            let prev = if i == 0 {
                let p = &reduced[k - 1];
                Breakpoint {
                    x: &p.x - &period,
                    y: &p.y - &period,
                }
            } else {
                reduced[i - 1].clone()
            };
            let next = at(i + 1);
            if !collinear(&prev, &reduced[i], &next) {
                kept.push(reduced[i].clone());
            }
        }
        if kept.is_empty() {
            // affine and p-equivariant, hence a translation
            let t = &reduced[0].y - &reduced[0].x;
            return Ok(Self::translation_unchecked(t, period));
        }
        Ok(PlMap {
            period,
            breakpoints: kept,
        })
    }

    fn translation_unchecked(t: QNum, period: QNum) -> Self {
        let zero = QNum::zero(period.discriminant());
        PlMap {
            breakpoints: vec![Breakpoint { x: zero, y: t }],
            period,
        }
    }

    /// `x -> x + t`, viewed as commuting with translation by `period`.
    pub fn translation(t: QNum, period: QNum) -> Result<Self, PlError> {
        t.try_cmp(&period)?;
        if !period.is_positive() {
            return Err(PlError::NonPositivePeriod(period));
        }
        Ok(Self::translation_unchecked(t, period))
    }

    pub fn identity(period: QNum) -> Result<Self, PlError> {
        Self::translation(QNum::zero(period.discriminant()), period)
    }

    pub fn period(&self) -> &QNum {
        &self.period
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn discriminant(&self) -> u64 {
        self.period.discriminant()
    }

    /// Canonical translations have exactly one breakpoint.
    pub fn is_translation(&self) -> bool {
        self.breakpoints.len() == 1
    }

    pub fn translation_length(&self) -> Option<QNum> {
        self.is_translation()
            .then(|| &self.breakpoints[0].y - &self.breakpoints[0].x)
    }

    pub fn is_identity(&self) -> bool {
        self.translation_length().is_some_and(|t| t.is_zero())
    }

    fn point(&self, i: usize) -> Breakpoint {
        let k = self.breakpoints.len();
        let cycles = (i / k) as i64;
        let bp = &self.breakpoints[i % k];
        if cycles == 0 {
            return bp.clone();
        }
        let shift = self.period.scale_int(cycles);
        Breakpoint {
            x: &bp.x + &shift,
            y: &bp.y + &shift,
        }
    }

    /// Slope of the segment starting at breakpoint `i` (cyclic).
    pub fn segment_slope(&self, i: usize) -> QNum {
        slope(&self.point(i), &self.point(i + 1))
    }

    pub fn eval(&self, x: &QNum) -> QNum {
        let x0 = &self.breakpoints[0].x;
        let (r, m) = reduce_mod(&(x - x0), &self.period);
        let xr = &r + x0;
        // last breakpoint with x_i <= xr
        let i = self.breakpoints.partition_point(|bp| bp.x <= xr) - 1;
        let a = self.point(i);
        let b = self.point(i + 1);
        let y = &a.y + &slope(&a, &b) * (&xr - &a.x);
        if m.is_zero() {
            return y;
        }
        y + self.period.scale(&BigRational::from_integer(m))
    }

    /// Evaluates the inverse map without constructing it.
    pub fn eval_inverse(&self, y: &QNum) -> QNum {
        let y0 = &self.breakpoints[0].y;
        let (r, m) = reduce_mod(&(y - y0), &self.period);
        let yr = &r + y0;
        let i = self.breakpoints.partition_point(|bp| bp.y <= yr) - 1;
        let a = self.point(i);
        let b = self.point(i + 1);
        let x = &a.x + (&yr - &a.y).try_div(&slope(&a, &b)).expect("positive slope");
        if m.is_zero() {
            return x;
        }
        x + self.period.scale(&BigRational::from_integer(m))
    }

    fn check_period(&self, other: &PlMap) -> Result<(), PlError> {
        if self.period.try_cmp(&other.period)? != Ordering::Equal {
            return Err(PlError::PeriodMismatch(
                self.period.clone(),
                other.period.clone(),
            ));
        }
        Ok(())
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &PlMap) -> Result<PlMap, PlError> {
        self.check_period(g)?;
        if self.is_translation() && g.is_translation() {
            let t = self.translation_length().unwrap() + g.translation_length().unwrap();
            return Ok(Self::translation_unchecked(t, self.period.clone()));
        }
        if let Some(c) = self.translation_length() {
            // shifting every value keeps the canonical abscissae
            let breakpoints = g
                .breakpoints
                .iter()
                .map(|bp| Breakpoint {
                    x: bp.x.clone(),
                    y: &bp.y + &c,
                })
                .collect();
            return Ok(PlMap {
                period: self.period.clone(),
                breakpoints,
            });
        }
        if let Some(c) = g.translation_length() {
            if c.is_zero() {
                return Ok(self.clone());
            }
            let points = self
                .breakpoints
                .iter()
                .map(|bp| Breakpoint {
                    x: &bp.x - &c,
                    y: bp.y.clone(),
                })
                .collect();
            return Self::from_window(self.period.clone(), points);
        }
        let p = &self.period;
        let mut xs: Vec<QNum> = g.breakpoints.iter().map(|bp| bp.x.clone()).collect();
        for bp in &self.breakpoints {
            xs.push(reduce_mod(&g.eval_inverse(&bp.x), p).0);
        }
        xs.sort();
        xs.dedup();
        let points = xs
            .into_iter()
            .map(|x| {
                let y = self.eval(&g.eval(&x));
                Breakpoint { x, y }
            })
            .collect();
        Self::from_window(p.clone(), points)
    }

    pub fn inverse(&self) -> PlMap {
        let points = self
            .breakpoints
            .iter()
            .map(|bp| Breakpoint {
                x: bp.y.clone(),
                y: bp.x.clone(),
            })
            .collect();
        Self::from_window(self.period.clone(), points).expect("inverse of a valid map is valid")
    }

    pub fn pow(&self, n: i64) -> PlMap {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::translation_unchecked(QNum::zero(self.discriminant()), self.period.clone());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq).expect("same period");
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose(&sq).expect("same period");
            }
        }
        acc
    }

    pub fn commutes(&self, g: &PlMap) -> Result<bool, PlError> {
        Ok(self.compose(g)? == g.compose(self)?)
    }

    /// Exact test of `f(x + c) = f(x) + c` for all `x`, for any real `c`.
    ///
    /// The breakpoint set must be invariant under `c` and the values must
    /// match there; on each segment both sides are then the same affine map.
    pub fn commutes_with_translation(&self, c: &QNum) -> Result<bool, PlError> {
        c.try_cmp(&self.period)?;
        if self.is_translation() {
            return Ok(true);
        }
        for bp in &self.breakpoints {
            let shifted = &bp.x + c;
            let r = reduce_mod(&shifted, &self.period).0;
            if self.breakpoints.binary_search_by(|b| b.x.cmp(&r)).is_err() {
                return Ok(false);
            }
            if self.eval(&shifted) != &bp.y + c {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Re-expresses the map with another period it commutes with.
    pub fn with_period(&self, period: &QNum) -> Result<PlMap, PlError> {
        if !period.is_positive() {
            return Err(PlError::NonPositivePeriod(period.clone()));
        }
        if let Some(t) = self.translation_length() {
            return Self::translation(t, period.clone());
        }
        if !self.commutes_with_translation(period)? {
            return Err(PlError::IncompatiblePeriod(period.clone()));
        }
        // a non-translation commutes only with translations in (p/k)Z, so the
        // ratio is rational and the new window meets finitely many copies
        let copies = period.try_div(&self.period)?.ceil();
        let copies: i64 = num_traits::ToPrimitive::to_i64(&copies).unwrap_or(i64::MAX);
        let mut points = Vec::new();
        for j in 0..copies.max(1) {
            let shift = self.period.scale_int(j);
            for bp in &self.breakpoints {
                let x = &bp.x + &shift;
                if &x < period {
                    points.push(Breakpoint { y: &bp.y + &shift, x });
                }
            }
        }
        Self::from_window(period.clone(), points)
    }

    /// Exact solutions of `f(x) = x` reduced into `[0, p)`.
    pub fn fixed_points(&self) -> FixedPoints {
        if let Some(t) = self.translation_length() {
            return if t.is_zero() {
                FixedPoints::All
            } else {
                FixedPoints::Empty
            };
        }
        let k = self.breakpoints.len();
        let g: Vec<QNum> = (0..=k)
            .map(|i| {
                let bp = self.point(i);
                &bp.y - &bp.x
            })
            .collect();
        let diagonal: Vec<bool> = (0..k).map(|i| g[i].is_zero() && g[i + 1].is_zero()).collect();
        let mut comps = Vec::new();
        for i in 0..k {
            let a = self.point(i);
            let b = self.point(i + 1);
            if diagonal[i] {
                let (lo, m) = reduce_mod(&a.x, &self.period);
                let shift = self.period.scale(&BigRational::from_integer(m));
                comps.push(FixedComponent::Interval { lo, hi: &b.x - &shift });
            } else if g[i].is_zero() {
                let prev_diag = diagonal[(i + k - 1) % k];
                if !prev_diag {
                    comps.push(FixedComponent::Point {
                        x: reduce_mod(&a.x, &self.period).0,
                    });
                }
            } else if !g[i + 1].is_zero() && g[i].signum() != g[i + 1].signum() {
                let t = (-&g[i]).try_div(&(&g[i + 1] - &g[i])).expect("sign change");
                let x = &a.x + t * (&b.x - &a.x);
                comps.push(FixedComponent::Point {
                    x: reduce_mod(&x, &self.period).0,
                });
            }
        }
        if comps.is_empty() {
            return FixedPoints::Empty;
        }
        comps.sort_by(|u, v| component_start(u).cmp(component_start(v)));
        FixedPoints::Set(comps)
    }

    /// Translation number in length units.
    ///
    /// Looks for `f^q(x) = x + m p` with `q <= max_denom` exactly; otherwise
    /// iterates the orbit of `0` with outward-rounded fixed-point bounds and
    /// returns a rational bracket of width at most `eps`.
    pub fn translation_number(&self, eps: &BigRational, max_denom: u32) -> TranslationNumber {
        if let Some(t) = self.translation_length() {
            return TranslationNumber::Exact { value: t };
        }
        if let Some(v) = self.periodic_orbit_translation(max_denom) {
            return TranslationNumber::Exact { value: v };
        }
        rotation::bracket(self, eps)
    }

    /// Exact translation number when some `f^q`, `q <= max_denom`, has a
    /// point moved by exactly a multiple of the period.
    pub fn periodic_orbit_translation(&self, max_denom: u32) -> Option<QNum> {
        let p = &self.period;
        let mut h = self.clone();
        for q in 1..=max_denom {
            // h(x) - x is periodic and PL, so its range is attained at breakpoints
            let disp: Vec<QNum> = h.breakpoints.iter().map(|bp| &bp.y - &bp.x).collect();
            let lo = disp.iter().min().unwrap();
            let hi = disp.iter().max().unwrap();
            let m = lo.try_div(p).ok()?.ceil();
            let mp = p.scale(&BigRational::from_integer(m));
            if &mp <= hi {
                let shifted = Self::translation_unchecked(-&mp, p.clone())
                    .compose(&h)
                    .expect("same period");
                if !shifted.fixed_points().is_empty() {
                    return Some(mp.scale(&BigRational::new(1.into(), q.into())));
                }
            }
            h = self.compose(&h).expect("same period");
        }
        None
    }

    /// `AllReals` for translations, otherwise `(p/k)Z` for the largest
    /// `k <= #breakpoints` such that `f` commutes with translation by `p/k`.
    pub fn period_group(&self) -> PeriodGroup {
        if self.is_translation() {
            return PeriodGroup::AllReals;
        }
        let k = self.breakpoints.len() as i64;
        for j in (1..=k).rev() {
            let step = self.period.scale(&BigRational::new(1.into(), j.into()));
            if self.commutes_with_translation(&step).expect("same field") {
                return PeriodGroup::Subgroup { step };
            }
        }
        unreachable!("every map commutes with its own period")
    }

    /// `h ∘ f ∘ h^-1` for `h(x) = x / scale`.
    pub fn affine_conjugate(&self, scale: &QNum) -> Result<PlMap, PlError> {
        if !scale.try_cmp(&QNum::zero(self.discriminant()))?.is_gt() {
            return Err(PlError::NonPositiveScale(scale.clone()));
        }
        let inv = scale.inv()?;
        let points = self
            .breakpoints
            .iter()
            .map(|bp| Breakpoint {
                x: &bp.x * &inv,
                y: &bp.y * &inv,
            })
            .collect();
        Self::from_window(&self.period * &inv, points)
    }

    /// `x -> f(x - c) + c`.
    pub fn conjugate_by_translation(&self, c: &QNum) -> PlMap {
        let points = self
            .breakpoints
            .iter()
            .map(|bp| Breakpoint {
                x: &bp.x + c,
                y: &bp.y + c,
            })
            .collect();
        Self::from_window(self.period.clone(), points).expect("shifted map is valid")
    }

    pub fn to_float(&self) -> FloatPlMap {
        FloatPlMap::from_exact(self)
    }
}

fn component_start(c: &FixedComponent) -> &QNum {
    match c {
        FixedComponent::Point { x } => x,
        FixedComponent::Interval { lo, .. } => lo,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QNum {
        QNum::parse(s, 2).unwrap()
    }

    fn bp(x: &str, y: &str) -> Breakpoint {
        Breakpoint::new(q(x), q(y))
    }

    fn beta() -> PlMap {
        PlMap::new(q("1"), vec![bp("0", "0"), bp("1/2", "3/4")]).unwrap()
    }

    #[test]
    fn translations() {
        let id = PlMap::translation(q("0"), q("1")).unwrap();
        assert!(id.is_identity());
        let t = PlMap::translation(QNum::sqrt_d(2), q("1")).unwrap();
        assert_eq!(t.eval(&q("0")), QNum::sqrt_d(2));
        let a = PlMap::translation(q("1/3"), q("1")).unwrap();
        let b = PlMap::translation(q("0+1*sqrt(2)"), q("1")).unwrap();
        assert_eq!(
            a.compose(&b).unwrap(),
            PlMap::translation(q("1/3+1*sqrt(2)"), q("1")).unwrap()
        );
        assert_eq!(a.inverse(), PlMap::translation(q("-1/3"), q("1")).unwrap());
        assert!(matches!(
            PlMap::translation(q("1"), q("0")),
            Err(PlError::NonPositivePeriod(_))
        ));
    }

    #[test]
    fn collinear_points_are_dropped() {
        let f = PlMap::new(
            q("1"),
            vec![bp("0", "0"), bp("1/4", "3/8"), bp("1/2", "3/4")],
        )
        .unwrap();
        assert_eq!(f, beta());
        let g = PlMap::new(q("1"), vec![bp("1/4", "1/2"), bp("1/2", "3/4")]).unwrap();
        assert!(g.is_translation());
        assert_eq!(g.translation_length(), Some(q("1/4")));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(PlMap::new(q("1"), vec![]), Err(PlError::NoBreakpoints));
        assert_eq!(
            PlMap::new(q("1"), vec![bp("0", "1"), bp("1/2", "1/2")]),
            Err(PlError::NotMonotone)
        );
        assert_eq!(
            PlMap::new(q("1"), vec![bp("0", "0"), bp("1/2", "3/2")]),
            Err(PlError::NotMonotone)
        );
        assert_eq!(
            PlMap::new(q("1"), vec![bp("1/2", "0"), bp("0", "1/2")]),
            Err(PlError::BreakpointOutOfOrder)
        );
        assert_eq!(
            PlMap::new(q("1"), vec![bp("0", "0"), bp("1", "1/2")]),
            Err(PlError::BreakpointOutOfOrder)
        );
    }

    #[test]
    fn eval_and_equivariance() {
        let f = beta();
        assert_eq!(f.eval(&q("1/2")), q("3/4"));
        assert_eq!(f.eval(&q("1/4")), q("3/8"));
        assert_eq!(f.eval(&q("3/4")), q("7/8"));
        assert_eq!(f.eval(&q("5/2")), q("11/4"));
        assert_eq!(f.eval(&q("-1/2")), q("-1/4"));
        let x = q("1/7+1/3*sqrt(2)");
        assert_eq!(f.eval(&(&x + &q("1"))), f.eval(&x) + q("1"));
        assert_eq!(f.eval_inverse(&f.eval(&x)), x);
    }

    #[test]
    fn compose_and_inverse() {
        let f = beta();
        let inv = f.inverse();
        assert!(f.compose(&inv).unwrap().is_identity());
        assert!(inv.compose(&f).unwrap().is_identity());
        let f3 = f.pow(3);
        assert_eq!(f3, f.compose(&f.compose(&f).unwrap()).unwrap());
        assert_eq!(f.pow(-2), inv.compose(&inv).unwrap());
        assert!(f.pow(0).is_identity());
        assert!(f.commutes(&f3).unwrap());
        let other = PlMap::translation(q("1"), q("2")).unwrap();
        assert!(matches!(f.compose(&other), Err(PlError::PeriodMismatch(..))));
    }

    #[test]
    fn beta_does_not_commute_with_irrational_translation() {
        let t = PlMap::translation(q("1+1*sqrt(2)"), q("1")).unwrap();
        let f = beta();
        assert!(!f.commutes(&t).unwrap());
        // the two compositions already differ at the breakpoint 1/2
        let x = q("1/2");
        assert_ne!(f.eval(&t.eval(&x)), t.eval(&f.eval(&x)));
    }

    #[test]
    fn fixed_point_sets() {
        assert_eq!(PlMap::identity(q("1")).unwrap().fixed_points(), FixedPoints::All);
        assert_eq!(
            PlMap::translation(q("1/3"), q("1")).unwrap().fixed_points(),
            FixedPoints::Empty
        );
        let fp = beta().fixed_points();
        assert_eq!(fp, FixedPoints::Set(vec![FixedComponent::Point { x: q("0") }]));
        assert!(fp.contains(&q("3"), &q("1")));

        // diagonal on [0, 1/4], pushed up on (1/4, 1)
        let f = PlMap::new(
            q("1"),
            vec![bp("0", "0"), bp("1/4", "1/4"), bp("1/2", "3/4")],
        )
        .unwrap();
        assert_eq!(
            f.fixed_points(),
            FixedPoints::Set(vec![FixedComponent::Interval {
                lo: q("0"),
                hi: q("1/4")
            }])
        );

        // crossing inside a segment: attracting point at 1/2
        let g = PlMap::new(
            q("1"),
            vec![bp("0", "0"), bp("1/4", "3/8"), bp("3/4", "5/8")],
        )
        .unwrap();
        assert_eq!(
            g.fixed_points(),
            FixedPoints::Set(vec![
                FixedComponent::Point { x: q("0") },
                FixedComponent::Point { x: q("1/2") },
            ])
        );
    }

    #[test]
    fn period_groups() {
        assert_eq!(
            PlMap::translation(q("1/3"), q("1")).unwrap().period_group(),
            PeriodGroup::AllReals
        );
        assert_eq!(beta().period_group(), PeriodGroup::Subgroup { step: q("1") });
        // two copies of the beta pattern per unit
        let doubled = PlMap::new(
            q("1"),
            vec![bp("0", "0"), bp("1/4", "3/8"), bp("1/2", "1/2"), bp("3/4", "7/8")],
        )
        .unwrap();
        assert_eq!(doubled.period_group(), PeriodGroup::Subgroup { step: q("1/2") });
        let half = PlMap::translation(q("1/2"), q("1")).unwrap();
        assert!(doubled.commutes(&half).unwrap());
        assert!(doubled.commutes_with_translation(&q("1/2")).unwrap());
        assert!(!doubled.commutes_with_translation(&q("1/4")).unwrap());
    }

    #[test]
    fn affine_conjugation() {
        let t = q("1+1*sqrt(2)");
        let tr = PlMap::translation(t.clone(), q("1")).unwrap();
        let c = tr.affine_conjugate(&t).unwrap();
        assert_eq!(c, PlMap::translation(q("1"), t.inv().unwrap()).unwrap());
        assert_eq!(beta().affine_conjugate(&q("1")).unwrap(), beta());
        let b = beta().affine_conjugate(&t).unwrap();
        assert_eq!(b.period_group(), PeriodGroup::Subgroup { step: q("-1+1*sqrt(2)") });
        assert!(matches!(
            beta().affine_conjugate(&q("0")),
            Err(PlError::NonPositiveScale(_))
        ));
    }

    #[test]
    fn changing_period() {
        let f = beta();
        let f2 = f.with_period(&q("2")).unwrap();
        assert_eq!(f2.breakpoints().len(), 4);
        let x = q("3/2");
        assert_eq!(f2.eval(&x), f.eval(&x));
        assert_eq!(f2.with_period(&q("1")).unwrap(), f);
        assert!(matches!(
            f.with_period(&q("1/2")),
            Err(PlError::IncompatiblePeriod(_))
        ));
    }

    #[test]
    fn translation_numbers() {
        let eps = BigRational::new(1.into(), 1000.into());
        let t = PlMap::translation(q("0+1*sqrt(2)"), q("1")).unwrap();
        assert_eq!(
            t.translation_number(&eps, 5),
            TranslationNumber::Exact {
                value: QNum::sqrt_d(2)
            }
        );
        assert_eq!(
            beta().translation_number(&eps, 5),
            TranslationNumber::Exact { value: q("0") }
        );
        let shifted = PlMap::translation(q("1/2"), q("1"))
            .unwrap()
            .compose(&beta().with_period(&q("1")).unwrap())
            .unwrap();
        let tn = shifted.translation_number(&eps, 0);
        let (lo, hi) = tn.bounds();
        assert!(&hi - &lo <= QNum::from_rational(eps.clone(), 2));
    }
}
