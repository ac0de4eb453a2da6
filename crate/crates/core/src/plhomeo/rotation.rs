//! Rigorous translation-number brackets.
//!
//! Exact iteration of a PL map blows up denominators after a few thousand
//! steps, while a bracket of width `eps` needs about `2p/eps` steps. We
//! instead follow a lower and an upper orbit on the grid `2^-GRID_BITS Z`,
//! rounding every evaluation outward. Monotonicity of `f` keeps the true
//! orbit of `0` between the two tracks, and `|f^n(0) - n tau| < p` turns the
//! final positions into a bracket.
//!
//! Each track stores a position as `r * 2^-GRID_BITS + m * p` with `r` a grid
//! integer near the fundamental domain and `m` an exact period count, so
//! the irrational period never has to be rounded more than once per step.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::{PlMap, TranslationNumber};
use crate::qfield::QNum;

const GRID_BITS: u32 = 48;
const MAX_STEPS: u64 = 1 << 36;

trait GridInt: Clone + Ord + Sized {
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn small(v: i64) -> Self;
    /// `floor(self * o / 2^GRID_BITS)`
    fn mul_floor(&self, o: &Self) -> Option<Self>;
    /// `ceil(self * o / 2^GRID_BITS)`
    fn mul_ceil(&self, o: &Self) -> Option<Self>;
}

impl GridInt for i128 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn small(v: i64) -> Self {
        v as i128
    }
    fn mul_floor(&self, o: &Self) -> Option<Self> {
        // arithmetic shift rounds toward -inf
        Some(self.checked_mul(*o)? >> GRID_BITS)
    }
    fn mul_ceil(&self, o: &Self) -> Option<Self> {
        Some(-((-(self.checked_mul(*o)?)) >> GRID_BITS))
    }
}

impl GridInt for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn small(v: i64) -> Self {
        BigInt::from(v)
    }
    fn mul_floor(&self, o: &Self) -> Option<Self> {
        Some((self * o).div_floor(&(BigInt::one() << GRID_BITS)))
    }
    fn mul_ceil(&self, o: &Self) -> Option<Self> {
        Some((self * o).div_ceil(&(BigInt::one() << GRID_BITS)))
    }
}

fn grid_scale() -> BigRational {
    BigRational::from_integer(BigInt::one() << GRID_BITS)
}

fn enclose(q: &QNum) -> (BigInt, BigInt) {
    let s = q.scale(&grid_scale());
    (s.floor(), s.ceil())
}

/// Outward-rounded breakpoint, value and slope tables over two periods.
struct Tables<T> {
    x_lo: Vec<T>,
    x_hi: Vec<T>,
    y_lo: Vec<T>,
    y_hi: Vec<T>,
    s_lo: Vec<T>,
    s_hi: Vec<T>,
    p_lo: T,
    p_hi: T,
    window_lo: T,
    window_hi: T,
}

impl<T: GridInt> Tables<T> {
    fn build(f: &PlMap) -> Option<Self> {
        let k = f.breakpoints().len();
        let mut t = Tables {
            x_lo: Vec::new(),
            x_hi: Vec::new(),
            y_lo: Vec::new(),
            y_hi: Vec::new(),
            s_lo: Vec::new(),
            s_hi: Vec::new(),
            p_lo: T::small(0),
            p_hi: T::small(0),
            window_lo: T::small(0),
            window_hi: T::small(0),
        };
        let slopes: Vec<(BigInt, BigInt)> = (0..k).map(|i| enclose(&f.segment_slope(i))).collect();
        for i in 0..=2 * k {
            let bp = f.point(i);
            let (xl, xh) = enclose(&bp.x);
            let (yl, yh) = enclose(&bp.y);
            t.x_lo.push(T::from_big(&xl)?);
            t.x_hi.push(T::from_big(&xh)?);
            t.y_lo.push(T::from_big(&yl)?);
            t.y_hi.push(T::from_big(&yh)?);
            let (sl, sh) = &slopes[i % k];
            t.s_lo.push(T::from_big(sl)?);
            t.s_hi.push(T::from_big(sh)?);
        }
        let (pl, ph) = enclose(f.period());
        t.p_lo = T::from_big(&pl)?;
        t.p_hi = T::from_big(&ph)?;
        t.window_lo = t.x_hi[0].clone();
        // the gap of 2 grid units stops the two reductions from cycling
        t.window_hi = t.window_lo.add(&t.p_hi)?.add(&T::small(2))?;
        Some(t)
    }

    fn lower(&self, r: &T) -> Option<T> {
        let j = self.x_hi.partition_point(|v| v <= r).checked_sub(1)?;
        let dx = r.sub(&self.x_hi[j])?;
        let formula = self.y_lo[j].add(&self.s_lo[j].mul_floor(&dx)?)?;
        let next = self.x_lo.get(j + 1)?;
        if r >= next {
            // the true point may already be past x_(j+1), where f >= y_(j+1)
            Some(formula.min(self.y_lo[j + 1].clone()))
        } else {
            Some(formula)
        }
    }

    fn upper(&self, r: &T) -> Option<T> {
        let i = self.x_lo.partition_point(|v| v <= r).checked_sub(1)?;
        let dx = r.sub(&self.x_lo[i])?;
        self.y_hi[i].add(&self.s_hi[i].mul_ceil(&dx)?)
    }
}

#[derive(Clone)]
struct Track<T> {
    r: T,
    m: i64,
}

struct Orbit<T> {
    tables: Tables<T>,
    lower: Track<T>,
    upper: Track<T>,
    steps: u64,
}

impl<T: GridInt> Orbit<T> {
    fn start(f: &PlMap) -> Option<Self> {
        let tables = Tables::build(f)?;
        let mut orbit = Orbit {
            tables,
            lower: Track { r: T::small(0), m: 0 },
            upper: Track { r: T::small(0), m: 0 },
            steps: 0,
        };
        orbit.reduce()?;
        Some(orbit)
    }

    fn reduce(&mut self) -> Option<()> {
        let t = &self.tables;
        // lower track: every rewrite may only decrease the represented value
        while self.lower.r >= t.window_hi {
            self.lower.r = self.lower.r.sub(&t.p_hi)?;
            self.lower.m += 1;
        }
        while self.lower.r < t.window_lo {
            self.lower.r = self.lower.r.add(&t.p_lo)?;
            self.lower.m -= 1;
        }
        // upper track: may only increase
        while self.upper.r >= t.window_hi {
            self.upper.r = self.upper.r.sub(&t.p_lo)?;
            self.upper.m += 1;
        }
        while self.upper.r < t.window_lo {
            self.upper.r = self.upper.r.add(&t.p_hi)?;
            self.upper.m -= 1;
        }
        Some(())
    }

    fn advance(&mut self, steps: u64) -> Option<()> {
        for _ in 0..steps {
            self.lower.r = self.tables.lower(&self.lower.r)?;
            self.upper.r = self.tables.upper(&self.upper.r)?;
            self.reduce()?;
        }
        self.steps += steps;
        Some(())
    }

    fn position(&self, track: &Track<T>, p: &QNum) -> QNum {
        let grid = QNum::from_rational(
            BigRational::new(track.r.to_big(), BigInt::one() << GRID_BITS),
            p.discriminant(),
        );
        grid + p.scale_int(track.m)
    }

    /// Rational bracket `[(L - p)/n, (H + p)/n]` rounded outward.
    fn bracket(&self, p: &QNum) -> (QNum, QNum) {
        let d = p.discriminant();
        let n = BigRational::from_integer(self.steps.into());
        let lo = (self.position(&self.lower, p) - p).scale(&n.recip());
        let hi = (self.position(&self.upper, p) + p).scale(&n.recip());
        let den = (BigInt::one() << GRID_BITS) * BigInt::from(self.steps);
        let denq = BigRational::from_integer(den.clone());
        let lo = BigRational::new(lo.scale(&denq).floor(), den.clone());
        let hi = BigRational::new(hi.scale(&denq).ceil(), den);
        (QNum::from_rational(lo, d), QNum::from_rational(hi, d))
    }
}

fn run<T: GridInt>(f: &PlMap, eps: &QNum, first: u64) -> Option<(QNum, QNum)> {
    let mut orbit = Orbit::<T>::start(f)?;
    let mut target = first;
    loop {
        orbit.advance(target - orbit.steps)?;
        let (lo, hi) = orbit.bracket(f.period());
        if &(&hi - &lo) <= eps || target >= MAX_STEPS {
            return Some((lo, hi));
        }
        target = (target * 2).min(MAX_STEPS);
    }
}

pub(super) fn bracket(f: &PlMap, eps: &BigRational) -> TranslationNumber {
    let d = f.discriminant();
    let eps_q = QNum::from_rational(eps.clone(), d);
    let ratio = f.period().to_f64() / eps.to_f64().unwrap_or(f64::MIN_POSITIVE);
    let first = ((2.05 * ratio).ceil() as u64).clamp(1, MAX_STEPS);
    let (lo, hi) = run::<i128>(f, &eps_q, first)
        .or_else(|| run::<BigInt>(f, &eps_q, first))
        .expect("big integer arithmetic cannot overflow");
    TranslationNumber::Bracket { lo, hi }
}
