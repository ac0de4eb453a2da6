//! Chains of slithering pieces and the progress bookkeeping for curves
//! crossing them.
//!
//! A chain alternates left and right pieces separated by cylinders
//! `A_0, ..., A_m`. Each cylinder carries a metric `d_k` on the leaf space,
//! `d_k(x, y) = |phi_k(x) - phi_k(y)|`, where `phi_0` is the identity and
//! `phi_(k+1) = psi_k ∘ phi_k`. Because a piece slithers, its comparison map
//! `psi_k` commutes with translation by that piece's slithering period, so
//! adjacent metrics differ by at most one period.
//!
//! A curve supported by a thin cone field is modeled only by the
//! `d_k`-progress it makes per crossing and by the distortions incurred when
//! re-measuring in a neighboring cylinder.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::float17::Float17;
use crate::leafaction::{side_translation_subgroup, ActionError, ActionSpec, Side};
use crate::plhomeo::{PlError, PlMap};
use crate::qfield::{FieldError, QNum};
use crate::sample;

/// Sign patterns are searched exhaustively up to this many crossings.
pub const STALL_EXHAUSTIVE_DEPTH: usize = 20;
/// A stalling trace must stay below its ceiling for this many crossings.
pub const STALL_CROSSINGS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Pl(#[from] PlError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("{0} must be nonnegative")]
    Negative(&'static str),
    #[error("a ledger needs at least one crossing")]
    EmptyLedger,
    #[error("piece pattern must be a nonempty string over L and R, got {0:?}")]
    BadPattern(String),
    #[error("piece {index}: period {found} does not match the {side:?} period {expected}")]
    PeriodMismatch {
        index: usize,
        side: Side,
        found: QNum,
        expected: QNum,
    },
    #[error("piece {0}: comparison map does not commute with its slithering period")]
    ClampViolated(usize),
    #[error("cylinder index {index} out of range (chain has {count} cylinders)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("cylinder indices must satisfy i <= j, got {0} > {1}")]
    IndexOrder(usize, usize),
    #[error("crossing {index}: {reason}")]
    StepViolation { index: usize, reason: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub side: Side,
    pub period: QNum,
    pub comparison: PlMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricChain {
    left_period: QNum,
    right_period: QNum,
    pieces: Vec<Piece>,
}

impl MetricChain {
    /// Rejects any comparison map that does not commute with its piece's
    /// slithering period; such a map would let adjacent metrics drift apart
    /// by more than one period.
    pub fn new(left_period: QNum, right_period: QNum, pieces: Vec<Piece>) -> Result<Self, ConeError> {
        if !left_period.try_cmp(&QNum::zero(left_period.discriminant()))?.is_gt() {
            return Err(ConeError::NonPositive("left period"));
        }
        if !right_period.try_cmp(&QNum::zero(right_period.discriminant()))?.is_gt() {
            return Err(ConeError::NonPositive("right period"));
        }
        left_period.try_cmp(&right_period)?;
        for (index, p) in pieces.iter().enumerate() {
            let expected = match p.side {
                Side::Left => &left_period,
                Side::Right => &right_period,
            };
            if p.period.try_cmp(expected)?.is_ne() {
                return Err(ConeError::PeriodMismatch {
                    index,
                    side: p.side,
                    found: p.period.clone(),
                    expected: expected.clone(),
                });
            }
            if !p.comparison.commutes_with_translation(&p.period)? {
                return Err(ConeError::ClampViolated(index));
            }
        }
        Ok(MetricChain {
            left_period,
            right_period,
            pieces,
        })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn left_period(&self) -> &QNum {
        &self.left_period
    }

    pub fn right_period(&self) -> &QNum {
        &self.right_period
    }

    /// `r`, the larger of the two slithering periods.
    pub fn distortion(&self) -> QNum {
        self.left_period.max_of(&self.right_period)
    }

    pub fn cylinder_count(&self) -> usize {
        self.pieces.len() + 1
    }

    fn check_index(&self, index: usize) -> Result<(), ConeError> {
        if index >= self.cylinder_count() {
            return Err(ConeError::IndexOutOfRange {
                index,
                count: self.cylinder_count(),
            });
        }
        Ok(())
    }

    /// `phi_k(x)`.
    pub fn coordinate(&self, k: usize, x: &QNum) -> Result<QNum, ConeError> {
        self.check_index(k)?;
        Ok(self.pieces[..k]
            .iter()
            .fold(x.clone(), |acc, p| p.comparison.eval(&acc)))
    }

    /// `d_k(x, y)`.
    pub fn metric(&self, k: usize, x: &QNum, y: &QNum) -> Result<QNum, ConeError> {
        Ok((self.coordinate(k, x)? - self.coordinate(k, y)?).abs())
    }
}

/// A chain following `pattern` (a string over `L`, `R`) whose slithering
/// periods are the spec's exact side steps. Each comparison map is the
/// side's beta, raised to a random power in `{±1, ±2}` and conjugated by a
/// random rational translation, or occasionally a random translation.
pub fn build_chain_from_action(spec: &ActionSpec, pattern: &str, seed: u64) -> Result<MetricChain, ConeError> {
    if pattern.is_empty() || !pattern.chars().all(|c| c == 'L' || c == 'R') {
        return Err(ConeError::BadPattern(pattern.to_string()));
    }
    let left = side_translation_subgroup(spec, Side::Left)?;
    let right = side_translation_subgroup(spec, Side::Right)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pieces = Vec::with_capacity(pattern.len());
    for c in pattern.chars() {
        let side = if c == 'L' { Side::Left } else { Side::Right };
        let period = if c == 'L' { left.clone() } else { right.clone() };
        let beta = &spec.generator(side.beta_name())?.map;
        let comparison = if rng.gen_ratio(1, 5) {
            let t = sample::qnum(&mut rng, spec.discriminant(), 1);
            PlMap::translation(t, beta.period().clone())?
        } else {
            let e = [-2, -1, 1, 2][rng.gen_range(0..4)];
            let shift = QNum::from_rational(sample::rational(&mut rng, 0, 1), spec.discriminant());
            beta.pow(e).conjugate_by_translation(&shift)
        };
        pieces.push(Piece { side, period, comparison });
    }
    MetricChain::new(left, right, pieces)
}

#[derive(Debug, Clone, Serialize)]
pub struct GapViolation {
    pub x: QNum,
    pub y: QNum,
    pub gap: QNum,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub i: usize,
    pub j: usize,
    pub separating_cylinders: usize,
    /// `(n + 1) r`, with `r` the larger slithering period.
    pub bound: QNum,
    /// Sum of the periods of the pieces between the two cylinders.
    pub side_bound: QNum,
    pub samples: usize,
    pub max_gap: QNum,
    pub max_ratio: Float17,
    pub violations: Vec<GapViolation>,
}

/// Checks `|d_i - d_j| <= (n + 1) r` on every sample, where `n = j - i - 1`
/// cylinders lie strictly between `A_i` and `A_j`. For `i = j` the bound is 0.
pub fn metric_gap_check(
    chain: &MetricChain,
    i: usize,
    j: usize,
    samples: &[(QNum, QNum)],
) -> Result<GapReport, ConeError> {
    chain.check_index(i)?;
    chain.check_index(j)?;
    if i > j {
        return Err(ConeError::IndexOrder(i, j));
    }
    let d = chain.left_period.discriminant();
    let bound = chain.distortion().scale_int((j - i) as i64);
    let side_bound = chain.pieces[i..j]
        .iter()
        .fold(QNum::zero(d), |acc, p| acc + &p.period);
    let mut max_gap = QNum::zero(d);
    let mut violations = Vec::new();
    for (x, y) in samples {
        let gap = (chain.metric(i, x, y)? - chain.metric(j, x, y)?).abs();
        if gap.try_cmp(&bound)?.is_gt() {
            violations.push(GapViolation {
                x: x.clone(),
                y: y.clone(),
                gap: gap.clone(),
            });
        }
        if gap > max_gap {
            max_gap = gap;
        }
    }
    let max_ratio = if bound.is_zero() {
        if max_gap.is_zero() {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        max_gap.to_f64() / bound.to_f64()
    };
    Ok(GapReport {
        i,
        j,
        separating_cylinders: (j - i).saturating_sub(1),
        bound,
        side_bound,
        samples: samples.len(),
        max_gap,
        max_ratio: Float17(max_ratio),
        violations,
    })
}

/// One crossing of a curve through a piece.
///
/// `distortion` re-measures the running length from the previous cylinder's
/// metric into this one before `progress` is added; `return_distortion` is
/// the corresponding change when the same endpoint pair is measured back in
/// `d_1`. Both are zero for the first crossing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub progress: QNum,
    pub distortion: QNum,
    pub return_distortion: QNum,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Crossing {
    pub index: usize,
    pub progress: QNum,
    pub distortion: QNum,
    pub return_distortion: QNum,
    /// Length of the first `index` segments measured in their own last
    /// cylinder.
    pub current: QNum,
    /// `mT - (m-1)r`, the bound the induction proves for `current`.
    pub current_bound: QNum,
    /// `mT - 2mr`.
    pub certified_d1: QNum,
    pub simulated_d1: QNum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LedgerVerdict {
    Regulating,
    NotCertified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// Minimum progress and maximal negative distortion at every crossing.
    Adversarial,
    Random(u64),
}

#[derive(Debug, Clone, Serialize)]
pub struct ProgressLedger {
    pub t: QNum,
    pub r: QNum,
    pub crossings: Vec<Crossing>,
    pub final_certified_d1: QNum,
    pub final_simulated_d1: QNum,
    /// Crossings where the simulated `d_1` length fell below `mT - 2mr`.
    pub bound_violations: Vec<usize>,
    pub verdict: LedgerVerdict,
}

fn check_positive(v: &QNum, name: &'static str) -> Result<(), ConeError> {
    if !v.try_cmp(&QNum::zero(v.discriminant()))?.is_gt() {
        return Err(ConeError::NonPositive(name));
    }
    Ok(())
}

impl ProgressLedger {
    /// Replays `steps`, enforcing `progress >= T` and `|distortion| <= r`.
    pub fn replay(t: &QNum, r: &QNum, steps: &[Step]) -> Result<Self, ConeError> {
        check_positive(t, "T")?;
        if r.try_cmp(&QNum::zero(r.discriminant()))?.is_lt() {
            return Err(ConeError::Negative("r"));
        }
        if steps.is_empty() {
            return Err(ConeError::EmptyLedger);
        }
        let d = t.discriminant();
        let zero = QNum::zero(d);
        let mut current = zero.clone();
        let mut sim = zero.clone();
        let mut crossings = Vec::with_capacity(steps.len());
        let mut bound_violations = Vec::new();
        for (k, step) in steps.iter().enumerate() {
            let index = k + 1;
            if step.progress.try_cmp(t)?.is_lt() {
                return Err(ConeError::StepViolation { index, reason: "progress below T" });
            }
            if step.distortion.abs().try_cmp(r)?.is_gt() || step.return_distortion.abs().try_cmp(r)?.is_gt() {
                return Err(ConeError::StepViolation { index, reason: "distortion exceeds r" });
            }
            if k == 0 && !(step.distortion.is_zero() && step.return_distortion.is_zero()) {
                return Err(ConeError::StepViolation { index, reason: "first crossing has no distortion" });
            }
            current = current + &step.distortion + &step.progress;
            sim = sim + &step.distortion + &step.return_distortion + &step.progress;
            let m = index as i64;
            let current_bound = t.scale_int(m) - r.scale_int(m - 1);
            let certified_d1 = t.scale_int(m) - r.scale_int(2 * m);
            if sim < certified_d1 {
                bound_violations.push(index);
            }
            crossings.push(Crossing {
                index,
                progress: step.progress.clone(),
                distortion: step.distortion.clone(),
                return_distortion: step.return_distortion.clone(),
                current: current.clone(),
                current_bound,
                certified_d1,
                simulated_d1: sim.clone(),
            });
        }
        let last = crossings.last().expect("nonempty");
        let verdict = if t > &r.scale_int(2) {
            LedgerVerdict::Regulating
        } else {
            LedgerVerdict::NotCertified
        };
        Ok(ProgressLedger {
            t: t.clone(),
            r: r.clone(),
            final_certified_d1: last.certified_d1.clone(),
            final_simulated_d1: last.simulated_d1.clone(),
            crossings,
            bound_violations,
            verdict,
        })
    }
}

/// Simulates `n` crossings under `policy`.
///
/// The random policy draws progress in `[T, 2T]` and distortions in
/// `[-r, r]`, all on a `1/16` grid. The verdict is `REGULATING` exactly when
/// `T > 2r`, i.e. when the certified bounds `mT - 2mr` diverge.
pub fn run_progress_ledger(t: &QNum, r: &QNum, n: usize, policy: Policy) -> Result<ProgressLedger, ConeError> {
    check_positive(t, "T")?;
    check_positive(r, "r")?;
    if n == 0 {
        return Err(ConeError::EmptyLedger);
    }
    let zero = QNum::zero(t.discriminant());
    let sixteenth = |k: i64| BigRational::new(BigInt::from(k), BigInt::from(16));
    let mut rng = match policy {
        Policy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Policy::Adversarial => None,
    };
    let steps: Vec<Step> = (0..n)
        .map(|k| match rng.as_mut() {
            None => Step {
                progress: t.clone(),
                distortion: if k == 0 { zero.clone() } else { -r },
                return_distortion: if k == 0 { zero.clone() } else { -r },
            },
            Some(rng) => {
                let progress = t.scale(&sixteenth(16 + rng.gen_range(0..=16)));
                let (a, b) = (rng.gen_range(-16..=16), rng.gen_range(-16..=16));
                let (distortion, return_distortion) = if k == 0 {
                    (zero.clone(), zero.clone())
                } else {
                    (r.scale(&sixteenth(a)), r.scale(&sixteenth(b)))
                };
                Step {
                    progress,
                    distortion,
                    return_distortion,
                }
            }
        })
        .collect();
    ProgressLedger::replay(t, r, &steps)
}

#[derive(Debug, Clone, Serialize)]
pub struct StallTrace {
    /// Simulated `d_1` length stays at or below this for every crossing.
    pub ceiling: QNum,
    pub ledger: ProgressLedger,
}

/// Looks for distortion signs `(delta_k, epsilon_k) in {-r, r}^2` keeping
/// the simulated `d_1` progress at or below `T + 2r` for 1000 crossings,
/// with progress exactly `T` per crossing.
///
/// Every step moves the simulated length by `T + jr` with `j in {-2, 0, 2}`,
/// so the states after `m` crossings are the reachable sums `j`. These are
/// enumerated exhaustively for the first 20 crossings; the search then
/// extends greedily, keeping the length as close to zero as possible. The
/// resulting trace is replayed and checked before it is returned.
pub fn adversarial_stall(t: &QNum, r: &QNum) -> Result<Option<StallTrace>, ConeError> {
    check_positive(t, "T")?;
    if r.try_cmp(&QNum::zero(r.discriminant()))?.is_lt() {
        return Err(ConeError::Negative("r"));
    }
    let ceiling = t + &r.scale_int(2);
    let value = |m: usize, j: i64| t.scale_int(m as i64) + r.scale_int(j);
    // signs for (distortion, return distortion), tried in this order
    const MOVES: [(i64, i64); 4] = [(-1, -1), (-1, 1), (1, -1), (1, 1)];

    // layer[m-1] maps reachable j after m crossings to (parent j, move)
    type Layer = Vec<(i64, Option<(i64, usize)>)>;
    let mut layers: Vec<Layer> = vec![vec![(0, None)]];
    for m in 2..=STALL_EXHAUSTIVE_DEPTH {
        let mut next: Layer = Vec::new();
        for &(j, _) in layers.last().expect("nonempty") {
            for (mi, (a, b)) in MOVES.iter().enumerate() {
                let nj = j + a + b;
                if value(m, nj) <= ceiling && !next.iter().any(|(k, _)| *k == nj) {
                    next.push((nj, Some((j, mi))));
                }
            }
        }
        if next.is_empty() {
            return Ok(None);
        }
        next.sort_by_key(|(j, _)| *j);
        layers.push(next);
    }
    // deepest state closest to zero, then walk back to recover its moves
    let m0 = layers.len();
    let start = layers[m0 - 1]
        .iter()
        .min_by(|a, b| value(m0, a.0).abs().cmp(&value(m0, b.0).abs()).then(a.0.cmp(&b.0)))
        .expect("nonempty")
        .0;
    let mut moves = Vec::new();
    let mut j = start;
    for layer in layers.iter().skip(1).rev() {
        let &(_, parent) = layer.iter().find(|(k, _)| *k == j).expect("state recorded");
        let (pj, mi) = parent.expect("only the first layer has no parent");
        moves.push(mi);
        j = pj;
    }
    moves.reverse();
    let mut j = start;
    for m in m0 + 1..=STALL_CROSSINGS {
        let best = (0..MOVES.len())
            .filter(|&mi| value(m, j + MOVES[mi].0 + MOVES[mi].1) <= ceiling)
            .min_by(|&x, &y| {
                let vx = value(m, j + MOVES[x].0 + MOVES[x].1).abs();
                let vy = value(m, j + MOVES[y].0 + MOVES[y].1).abs();
                vx.cmp(&vy)
            });
        let Some(mi) = best else {
            return Ok(None);
        };
        j += MOVES[mi].0 + MOVES[mi].1;
        moves.push(mi);
    }

    let zero = QNum::zero(t.discriminant());
    let mut steps = vec![Step {
        progress: t.clone(),
        distortion: zero.clone(),
        return_distortion: zero,
    }];
    for mi in moves {
        let (a, b) = MOVES[mi];
        steps.push(Step {
            progress: t.clone(),
            distortion: r.scale_int(a),
            return_distortion: r.scale_int(b),
        });
    }
    let ledger = ProgressLedger::replay(t, r, &steps)?;
    if ledger.crossings.len() != STALL_CROSSINGS || ledger.crossings.iter().any(|c| c.simulated_d1 > ceiling) {
        return Ok(None);
    }
    Ok(Some(StallTrace { ceiling, ledger }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leafaction::{build_paper_action, standard_beta};

    fn q(s: &str) -> QNum {
        QNum::parse(s, 2).unwrap()
    }

    fn flagship() -> ActionSpec {
        build_paper_action(&q("1+1*sqrt(2)"), &QNum::sqrt_d(2), &standard_beta(2), &standard_beta(2)).unwrap()
    }

    #[test]
    fn flagship_chain_distortion() {
        let chain = build_chain_from_action(&flagship(), "LRLR", 1).unwrap();
        assert_eq!(chain.distortion(), q("0+1/2*sqrt(2)"));
        assert_eq!(chain.cylinder_count(), 5);
        let pairs = vec![(q("0"), q("3/2")), (q("-2"), q("1+1*sqrt(2)"))];
        let same = metric_gap_check(&chain, 2, 2, &pairs).unwrap();
        assert!(same.max_gap.is_zero() && same.bound.is_zero());
        let adj = metric_gap_check(&chain, 0, 1, &pairs).unwrap();
        assert_eq!(adj.bound, q("0+1/2*sqrt(2)"));
        assert_eq!(adj.side_bound, q("-1+1*sqrt(2)"));
        assert!(adj.violations.is_empty());
        assert!(matches!(metric_gap_check(&chain, 3, 1, &pairs), Err(ConeError::IndexOrder(3, 1))));
        assert!(matches!(metric_gap_check(&chain, 0, 5, &pairs), Err(ConeError::IndexOutOfRange { .. })));
    }

    #[test]
    fn clamp_rejects_wrong_comparison() {
        let spec = flagship();
        let left = side_translation_subgroup(&spec, Side::Left).unwrap();
        let right = side_translation_subgroup(&spec, Side::Right).unwrap();
        let wrong = spec.generator("beta_r").unwrap().map.clone();
        let piece = Piece { side: Side::Left, period: left.clone(), comparison: wrong };
        assert!(matches!(MetricChain::new(left, right, vec![piece]), Err(ConeError::ClampViolated(0))));
    }

    #[test]
    fn adversarial_ledger_bound() {
        let l = run_progress_ledger(&q("1"), &q("1/10"), 10, Policy::Adversarial).unwrap();
        assert_eq!(l.final_certified_d1, q("8"));
        assert_eq!(l.final_simulated_d1, q("41/5"));
        assert!(l.bound_violations.is_empty());
        assert_eq!(l.verdict, LedgerVerdict::Regulating);
        // the two quoted intermediate inequalities
        assert_eq!(l.crossings[0].current, q("1"));
        assert_eq!(l.crossings[1].current, q("19/10"));
        assert_eq!(l.crossings[1].current_bound, q("19/10"));

        let flat = run_progress_ledger(&q("1"), &q("1"), 4, Policy::Adversarial).unwrap();
        assert_eq!(flat.final_certified_d1, q("-4"));
        assert_eq!(flat.verdict, LedgerVerdict::NotCertified);
    }

    #[test]
    fn random_ledger_is_seeded() {
        let a = run_progress_ledger(&q("1"), &q("1/10"), 10, Policy::Random(3)).unwrap();
        let b = run_progress_ledger(&q("1"), &q("1/10"), 10, Policy::Random(3)).unwrap();
        assert_eq!(a.crossings, b.crossings);
        assert!(a.bound_violations.is_empty());
        assert!(matches!(
            run_progress_ledger(&q("0"), &q("1"), 3, Policy::Adversarial),
            Err(ConeError::NonPositive("T"))
        ));
    }

    #[test]
    fn replay_rejects_bad_steps() {
        let step = |p: &str, e: &str| Step { progress: q(p), distortion: q(e), return_distortion: q("0") };
        assert!(ProgressLedger::replay(&q("1"), &q("1/2"), &[step("1/2", "0")]).is_err());
        assert!(ProgressLedger::replay(&q("1"), &q("1/2"), &[step("1", "0"), step("1", "1")]).is_err());
        assert!(ProgressLedger::replay(&q("1"), &q("1/2"), &[step("1", "1/2")]).is_err());
        let ok = ProgressLedger::replay(&q("1"), &q("0"), &[step("1", "0"), step("1", "0")]).unwrap();
        assert_eq!(ok.final_simulated_d1, q("2"));
    }

    #[test]
    fn stall_search() {
        let trace = adversarial_stall(&q("1"), &q("1")).unwrap().expect("stall exists");
        assert_eq!(trace.ledger.crossings.len(), STALL_CROSSINGS);
        assert!(trace.ledger.crossings.iter().all(|c| c.simulated_d1 <= q("3")));
        assert!(adversarial_stall(&q("3"), &q("1")).unwrap().is_none());
        assert!(adversarial_stall(&q("1"), &q("0")).unwrap().is_none());
    }
}
