//! One-dimensional bookkeeping for shearing a product foliation along an
//! annulus `gamma x [-eps, 1 + eps]` in a `Z`-cover of a surface bundle.
//!
//! A curve that climbs one level per unit of length `t` has length `nt`
//! after `n` levels, but the pseudo-Anosov monodromy contracts its
//! projection to level 0 by `lambda` per level, so the projected length is
//! at most `sum t / lambda^i < t / (lambda - 1)`.
//!
//! The holonomy trace is exploratory: it follows a transverse interval
//! through repeated shears and reports how much of it survives. It does not
//! decide whether the sheared foliation is R-covered.

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::float17::Float17;
use crate::qfield::{FieldError, QNum};

pub const EXPLORATORY: &str = "EXPLORATORY";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShearError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("multiplier must exceed 1, got {0}")]
    MultiplierTooSmall(QNum),
    #[error("level count must be at least 1")]
    NoLevels,
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("shear must fix -eps and 1+eps")]
    EndpointsMoved,
    #[error("shear knots must be strictly increasing")]
    NotIncreasing,
    #[error("shear must move every interior point up (or be the identity)")]
    NotUpward,
    #[error("displacement must lie in [0, 1/2 + eps)")]
    DisplacementOutOfRange,
    #[error("interval [{0}, {1}] is not inside the annulus")]
    OutsideAnnulus(QNum, QNum),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LengthAccounting {
    /// Length `t` per level, `nt` after `n` levels.
    #[default]
    PerLevel,
    /// `t` for the first level and `2t` for each later one.
    DoubleAfterFirst,
}

impl LengthAccounting {
    pub fn curve_length(self, t: &QNum, level: u32) -> QNum {
        match self {
            LengthAccounting::PerLevel => t.scale_int(level as i64),
            LengthAccounting::DoubleAfterFirst => t.scale_int(2 * level as i64 - 1),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ShadowReport {
    pub label: &'static str,
    pub t: QNum,
    pub lambda: QNum,
    pub levels: u32,
    /// `sum_(i=1..n) t / lambda^i`.
    pub shadow: QNum,
    /// `t / (lambda - 1)`.
    pub limit: QNum,
    pub curve_length: QNum,
    pub accounting: LengthAccounting,
}

fn check_lambda(lambda: &QNum) -> Result<(), ShearError> {
    if lambda.try_cmp(&QNum::one(lambda.discriminant()))?.is_le() {
        return Err(ShearError::MultiplierTooSmall(lambda.clone()));
    }
    Ok(())
}

/// Partial shadows `sum_(i=1..m) t / lambda^i` for `m = 1..=n`.
pub fn shadow_series(t: &QNum, lambda: &QNum, n: u32) -> Result<Vec<QNum>, ShearError> {
    check_lambda(lambda)?;
    t.try_cmp(lambda)?;
    let inv = lambda.inv()?;
    let mut term = t.clone();
    let mut sum = QNum::zero(t.discriminant());
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        term = &term * &inv;
        sum = &sum + &term;
        out.push(sum.clone());
    }
    Ok(out)
}

pub fn shadow_length(
    t: &QNum,
    lambda: &QNum,
    n: u32,
    accounting: LengthAccounting,
) -> Result<ShadowReport, ShearError> {
    if n == 0 {
        return Err(ShearError::NoLevels);
    }
    let shadow = shadow_series(t, lambda, n)?.pop().expect("n >= 1");
    let limit = t.try_div(&(lambda - &QNum::one(lambda.discriminant())))?;
    Ok(ShadowReport {
        label: EXPLORATORY,
        t: t.clone(),
        lambda: lambda.clone(),
        levels: n,
        shadow,
        limit,
        curve_length: accounting.curve_length(t, n),
        accounting,
    })
}

/// An increasing PL self-map of `[-eps, 1 + eps]` fixing both endpoints and
/// moving every interior point up; the identity is also accepted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Shear {
    knots: Vec<(QNum, QNum)>,
}

impl Shear {
    pub fn new(eps: &QNum, interior: Vec<(QNum, QNum)>) -> Result<Self, ShearError> {
        if !eps.is_positive() {
            return Err(ShearError::NonPositive("eps"));
        }
        let d = eps.discriminant();
        let lo = -eps;
        let hi = QNum::one(d) + eps;
        let mut knots = vec![(lo.clone(), lo)];
        knots.extend(interior);
        knots.push((hi.clone(), hi));
        for (x, y) in &knots {
            x.try_cmp(eps)?;
            y.try_cmp(eps)?;
        }
        for w in knots.windows(2) {
            if w[0].0 >= w[1].0 || w[0].1 >= w[1].1 {
                return Err(ShearError::NotIncreasing);
            }
        }
        let inner = &knots[1..knots.len() - 1];
        let lifted = inner.iter().filter(|(x, y)| y > x).count();
        if lifted != inner.len() && inner.iter().any(|(x, y)| x != y) {
            return Err(ShearError::NotUpward);
        }
        Ok(Shear { knots })
    }

    pub fn identity(eps: &QNum) -> Result<Self, ShearError> {
        Self::new(eps, Vec::new())
    }

    /// One interior knot at the midpoint `1/2`, raised by `delta`.
    pub fn bump(eps: &QNum, delta: &QNum) -> Result<Self, ShearError> {
        let d = eps.discriminant();
        let half = QNum::from_ratio(1, 2, d);
        if delta.try_cmp(&QNum::zero(d))?.is_lt() || delta >= &(&half + eps) {
            return Err(ShearError::DisplacementOutOfRange);
        }
        if delta.is_zero() {
            return Self::identity(eps);
        }
        Self::new(eps, vec![(half.clone(), &half + delta)])
    }

    pub fn knots(&self) -> &[(QNum, QNum)] {
        &self.knots
    }

    pub fn lower(&self) -> &QNum {
        &self.knots[0].0
    }

    pub fn upper(&self) -> &QNum {
        &self.knots[self.knots.len() - 1].0
    }

    pub fn eval(&self, x: &QNum) -> QNum {
        let i = self.knots.partition_point(|(k, _)| k <= x).clamp(1, self.knots.len() - 1) - 1;
        let (x0, y0) = &self.knots[i];
        let (x1, y1) = &self.knots[i + 1];
        let slope = (y1 - y0).try_div(&(x1 - x0)).expect("distinct knots");
        y0 + &(&slope * &(x - x0))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let xs: Vec<f64> = self.knots.iter().map(|(k, _)| k.to_f64()).collect();
        let i = xs.partition_point(|&k| k <= x).clamp(1, xs.len() - 1) - 1;
        let (y0, y1) = (self.knots[i].1.to_f64(), self.knots[i + 1].1.to_f64());
        y0 + (y1 - y0) * (x - xs[i]) / (xs[i + 1] - xs[i])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ShearModel {
    pub lambda: QNum,
    pub eps: QNum,
    pub shear: Shear,
    pub t: QNum,
    pub accounting: LengthAccounting,
}

impl ShearModel {
    pub fn new(lambda: QNum, eps: QNum, shear: Shear, t: QNum) -> Result<Self, ShearError> {
        check_lambda(&lambda)?;
        if !t.try_cmp(&QNum::zero(t.discriminant()))?.is_gt() {
            return Err(ShearError::NonPositive("t"));
        }
        lambda.try_cmp(&eps)?;
        t.try_cmp(&eps)?;
        if shear.lower() != &-&eps {
            return Err(ShearError::EndpointsMoved);
        }
        Ok(ShearModel {
            lambda,
            eps,
            shear,
            t,
            accounting: LengthAccounting::PerLevel,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DomainFlag {
    ShrinksToPoint,
    Persists,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelRecord {
    pub level: u32,
    pub curve_length: QNum,
    pub shadow_length: QNum,
    pub domain: (QNum, QNum),
    /// Domain length in the level's own coordinates.
    pub domain_length: Float17,
    /// Domain length projected to level 0, i.e. divided by `lambda^level`.
    pub projected_length: Float17,
}

#[derive(Debug, Clone, Serialize)]
pub struct HolonomyTrace {
    pub label: &'static str,
    pub threshold: QNum,
    pub levels: Vec<LevelRecord>,
    pub flag: DomainFlag,
    /// First level whose domain length fell below the threshold.
    pub shrunk_at: Option<u32>,
}

/// Follows the transverse interval `start` through `n` levels.
///
/// Crossing one level applies the shear and then contracts by `1/lambda`
/// about the annulus base `-eps`; reading the result in the next level's
/// coordinates undoes the contraction, so in level coordinates the domain is
/// `mu^i(start)` and its level-0 projection is that divided by `lambda^i`.
/// The flag reports whether the level-coordinate length drops below
/// `threshold`, checked from level 0.
pub fn holonomy_domain_trace(
    model: &ShearModel,
    start: (&QNum, &QNum),
    n: u32,
    threshold: &QNum,
) -> Result<HolonomyTrace, ShearError> {
    if n == 0 {
        return Err(ShearError::NoLevels);
    }
    let (a, b) = start;
    if a.try_cmp(model.shear.lower())?.is_lt() || b.try_cmp(model.shear.upper())?.is_gt() || a >= b {
        return Err(ShearError::OutsideAnnulus(a.clone(), b.clone()));
    }
    threshold.try_cmp(a)?;
    let shadows = shadow_series(&model.t, &model.lambda, n)?;
    let d = a.discriminant();
    let (mut lo, mut hi) = (a.clone(), b.clone());
    let mut scale = QNum::one(d);
    let mut levels = Vec::with_capacity(n as usize + 1);
    let mut shrunk_at = None;
    for level in 0..=n {
        if level > 0 {
            lo = model.shear.eval(&lo);
            hi = model.shear.eval(&hi);
            scale = &scale * &model.lambda;
        }
        let len = &hi - &lo;
        if shrunk_at.is_none() && &len < threshold {
            shrunk_at = Some(level);
        }
        let projected = len.try_div(&scale)?.to_f64();
        levels.push(LevelRecord {
            level,
            curve_length: if level == 0 {
                QNum::zero(d)
            } else {
                model.accounting.curve_length(&model.t, level)
            },
            shadow_length: if level == 0 {
                QNum::zero(d)
            } else {
                shadows[level as usize - 1].clone()
            },
            domain: (lo.clone(), hi.clone()),
            domain_length: Float17(len.to_f64()),
            projected_length: Float17(projected),
        });
    }
    Ok(HolonomyTrace {
        label: EXPLORATORY,
        threshold: threshold.clone(),
        levels,
        flag: if shrunk_at.is_some() {
            DomainFlag::ShrinksToPoint
        } else {
            DomainFlag::Persists
        },
        shrunk_at,
    })
}

/// Disjointness of the closed intervals `[lo, hi]` and `[lo + shift, hi + shift]`.
pub fn disjointness_check(support: (&QNum, &QNum), shift: &QNum) -> Result<bool, ShearError> {
    let (lo, hi) = support;
    lo.try_cmp(hi)?;
    lo.try_cmp(shift)?;
    Ok(hi < &(lo + shift) || &(hi + shift) < lo)
}

/// Disjointness of the same two arcs on the circle `R/Z`.
pub fn disjoint_on_circle(support: (&QNum, &QNum), shift: &QNum) -> Result<bool, ShearError> {
    let (lo, hi) = support;
    lo.try_cmp(hi)?;
    lo.try_cmp(shift)?;
    let d = lo.discriminant();
    if (hi - lo).try_cmp(&QNum::one(d))?.is_ge() {
        return Ok(false);
    }
    // the shifted arc meets the original iff some integer translate of it does
    let s = shift - &QNum::from_rational(BigRational::from_integer(shift.floor()), d);
    for k in [-1i64, 0, 1] {
        let moved = &s + &QNum::from_int(k, d);
        if !disjointness_check(support, &moved)? {
            return Ok(false);
        }
    }
    Ok(true)
}
