use std::collections::HashSet;

use serde::Serialize;

use super::{ActionError, ActionSpec, DensityParams, Letter, Word};
use crate::float17::Float17;
use crate::plhomeo::{FloatPlMap, PlMap};
use crate::qfield::QNum;

/// Orbit points closer than `2^-QUANTUM_BITS` are treated as one point.
const QUANTUM_BITS: i32 = 36;

#[derive(Debug, Clone, Serialize)]
pub struct OrbitGapReport {
    pub label: &'static str,
    pub x0: QNum,
    pub max_word_len: usize,
    pub window: (QNum, QNum),
    pub orbit_points: usize,
    pub points_in_window: usize,
    pub max_gap: Float17,
}

fn same_map(f: &PlMap, g: &PlMap) -> bool {
    match (f.translation_length(), g.translation_length()) {
        (Some(a), Some(b)) => a == b,
        (None, None) => f == g,
        _ => false,
    }
}

fn quantize(x: f64) -> i64 {
    (x * 2f64.powi(QUANTUM_BITS)).round() as i64
}

/// Largest gap between consecutive points of `points` inside `[lo, hi)`,
/// with the window read as a circle (the wrap gap joins the last point to
/// the first). An empty window has gap `hi - lo`.
pub fn orbit_gap(points: &[f64], lo: f64, hi: f64) -> (f64, usize) {
    let mut inside: Vec<f64> = points.iter().copied().filter(|&x| lo <= x && x < hi).collect();
    inside.sort_by(f64::total_cmp);
    let (Some(&first), Some(&last)) = (inside.first(), inside.last()) else {
        return (hi - lo, 0);
    };
    let wrap = (first - lo) + (hi - last);
    let gap = inside.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max);
    (gap, inside.len())
}

/// Breadth-first orbit of `x0` under all words of length at most
/// `max_word_len` in the generators and their inverses, evaluated in double
/// precision. Letters acting identically are used once; orbit points are
/// deduplicated on a `2^-36` grid. The orbit only grows with the bound, so
/// the reported gap is monotone non-increasing in it.
///
/// `only` restricts the generators used.
pub fn orbit_density(
    spec: &ActionSpec,
    params: &DensityParams,
    only: Option<&[&str]>,
) -> Result<OrbitGapReport, ActionError> {
    if params.max_word_len == 0 {
        return Err(ActionError::EmptySearch);
    }
    let (lo, hi) = &params.window;
    if lo.try_cmp(hi)?.is_ge() {
        return Err(ActionError::EmptyWindow(lo.clone(), hi.clone()));
    }
    if let Some(names) = only {
        for n in names {
            spec.generator(n)?;
        }
    }
    let mut exact: Vec<PlMap> = Vec::new();
    for g in spec.generators() {
        if only.is_some_and(|names| !names.contains(&g.name.as_str())) {
            continue;
        }
        for f in [g.map.clone(), g.map.inverse()] {
            if !f.is_identity() && !exact.iter().any(|h| same_map(h, &f)) {
                exact.push(f);
            }
        }
    }
    let letters: Vec<FloatPlMap> = exact.iter().map(PlMap::to_float).collect();

    let start = params.x0.to_f64();
    let mut seen = HashSet::from([quantize(start)]);
    let mut points = vec![start];
    let mut frontier = vec![start];
    for _ in 0..params.max_word_len {
        let mut next = Vec::new();
        for &x in &frontier {
            for f in &letters {
                let y = f.eval(x);
                if seen.insert(quantize(y)) {
                    next.push(y);
                }
            }
        }
        points.extend_from_slice(&next);
        frontier = next;
    }
    let (gap, in_window) = orbit_gap(&points, lo.to_f64(), hi.to_f64());
    Ok(OrbitGapReport {
        label: "NUMERIC_EVIDENCE",
        x0: params.x0.clone(),
        max_word_len: params.max_word_len,
        window: params.window.clone(),
        orbit_points: points.len(),
        points_in_window: in_window,
        max_gap: Float17(gap),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Nesting {
    /// `g(I)` is a proper subset of `I`.
    Subset,
    /// `g(I)` is a proper superset of `I`.
    Superset,
}

/// Result of a bounded incompressibility search. `IncompressibleUpToBound`
/// is not a proof: longer words may still compress the interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Incompressibility {
    IncompressibleUpToBound {
        max_word_len: usize,
        words_tested: u64,
    },
    CompressedBy {
        word: Word,
        image: (QNum, QNum),
        nesting: Nesting,
    },
}

/// Tests the images of `[a, b]` under every reduced word up to
/// `max_word_len`, breadth-first. Images are tracked exactly by their
/// endpoints; words reaching an already seen image are not extended.
pub fn incompressible_interval_search(
    spec: &ActionSpec,
    interval: (&QNum, &QNum),
    max_word_len: usize,
) -> Result<Incompressibility, ActionError> {
    let (a, b) = interval;
    if a.try_cmp(b)?.is_ge() {
        return Err(ActionError::DegenerateInterval(a.clone(), b.clone()));
    }
    let letters: Vec<(Letter, PlMap)> = spec
        .generators()
        .iter()
        .flat_map(|g| {
            [
                (Letter { generator: g.name.clone(), exponent: 1 }, g.map.clone()),
                (Letter { generator: g.name.clone(), exponent: -1 }, g.map.inverse()),
            ]
        })
        .collect();

    let mut seen = HashSet::from([(a.clone(), b.clone())]);
    let mut frontier = vec![(Word::default(), a.clone(), b.clone())];
    let mut tested = 0u64;
    for _ in 0..max_word_len {
        let mut next = Vec::new();
        for (word, x, y) in &frontier {
            for (letter, f) in &letters {
                if let Some(first) = word.letters().first() {
                    if first.generator == letter.generator && first.exponent.signum() != letter.exponent {
                        continue;
                    }
                }
                tested += 1;
                let (u, v) = (f.eval(x), f.eval(y));
                let inner = &u >= a && &v <= b;
                let outer = &u <= a && &v >= b;
                if inner != outer {
                    return Ok(Incompressibility::CompressedBy {
                        word: word.prepend(letter.clone()),
                        image: (u, v),
                        nesting: if inner { Nesting::Subset } else { Nesting::Superset },
                    });
                }
                if seen.insert((u.clone(), v.clone())) {
                    next.push((word.prepend(letter.clone()), u, v));
                }
            }
        }
        frontier = next;
    }
    Ok(Incompressibility::IncompressibleUpToBound {
        max_word_len,
        words_tested: tested,
    })
}
