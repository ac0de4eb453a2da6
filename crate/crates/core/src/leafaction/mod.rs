//! The amalgamated action of two slithering pieces on a common leaf space.
//!
//! Each side is a punctured-torus group acting through the central extension
//! of `Homeo(S^1)`: the longitude `alpha` acts as a translation (through `t`
//! on the left, `s` on the right) and `beta` as a map commuting with the unit
//! translation. Gluing identifies the longitudes, so both sides are rescaled
//! until the longitude is translation through one unit. In these common
//! coordinates each side's `beta` commutes only with a discrete group of
//! translations, generated by that side's slithering translation. When the
//! two generators are incommensurable no translation commutes with both
//! betas, which is the algebraic obstruction to a global slithering.

mod search;
mod word;

use serde::Serialize;
use thiserror::Error;

use crate::plhomeo::{PeriodGroup, PlError, PlMap};
use crate::qfield::{FieldError, QNum};

pub use search::{
    incompressible_interval_search, orbit_density, orbit_gap, Incompressibility, Nesting,
    OrbitGapReport,
};
pub use word::{Letter, MapComparison, Word, WordMap};

pub const ALPHA_L: &str = "alpha_l";
pub const BETA_L: &str = "beta_l";
pub const ALPHA_R: &str = "alpha_r";
pub const BETA_R: &str = "beta_r";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Pl(#[from] PlError),
    #[error("parameter {0} must be positive")]
    NonPositiveParameter(&'static str),
    #[error("{0} is a translation; it must not be")]
    BetaIsTranslation(String),
    #[error("{0} does not commute with the unit translation")]
    BetaNotCentral(String),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("duplicate generator {0:?}")]
    DuplicateGenerator(String),
    #[error("word letter {0:?} has exponent 0")]
    ZeroExponent(String),
    #[error("malformed word {0:?}")]
    MalformedWord(String),
    #[error("max_word_len must be at least 1")]
    EmptySearch,
    #[error("window [{0}, {1}) is empty")]
    EmptyWindow(QNum, QNum),
    #[error("interval [{0}, {1}] is degenerate")]
    DegenerateInterval(QNum, QNum),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn beta_name(self) -> &'static str {
        match self {
            Side::Left => BETA_L,
            Side::Right => BETA_R,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub name: String,
    pub side: Side,
    pub map: PlMap,
}

/// Generators of the amalgamated group mapped to PL homeomorphisms of the
/// common leaf-space coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionSpec {
    d: u64,
    t: QNum,
    s: QNum,
    longitude: String,
    generators: Vec<Generator>,
}

impl ActionSpec {
    /// A general action; no central-extension checks are made.
    pub fn new(
        d: u64,
        t: QNum,
        s: QNum,
        longitude: &str,
        generators: Vec<Generator>,
    ) -> Result<Self, ActionError> {
        crate::qfield::validate_discriminant(d)?;
        let field = QNum::zero(d);
        field.try_cmp(&t)?;
        field.try_cmp(&s)?;
        for (i, g) in generators.iter().enumerate() {
            field.try_cmp(g.map.period())?;
            if generators[..i].iter().any(|h| h.name == g.name) {
                return Err(ActionError::DuplicateGenerator(g.name.clone()));
            }
        }
        if !generators.iter().any(|g| g.name == longitude) {
            return Err(ActionError::UnknownGenerator(longitude.to_string()));
        }
        Ok(ActionSpec {
            d,
            t,
            s,
            longitude: longitude.to_string(),
            generators,
        })
    }

    pub fn discriminant(&self) -> u64 {
        self.d
    }

    pub fn t(&self) -> &QNum {
        &self.t
    }

    pub fn s(&self) -> &QNum {
        &self.s
    }

    pub fn longitude(&self) -> &str {
        &self.longitude
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Result<&Generator, ActionError> {
        self.generators
            .iter()
            .find(|g| g.name == name)
            .ok_or_else(|| ActionError::UnknownGenerator(name.to_string()))
    }
}

/// The standard beta map: period 1, fixes the integers, breakpoint at
/// `(1/2, 3/4)`, pushes `(0, 1)` upward.
pub fn standard_beta(d: u64) -> PlMap {
    use crate::plhomeo::Breakpoint;
    PlMap::new(
        QNum::one(d),
        vec![
            Breakpoint::new(QNum::zero(d), QNum::zero(d)),
            Breakpoint::new(QNum::from_ratio(1, 2, d), QNum::from_ratio(3, 4, d)),
        ],
    )
    .expect("standard beta is valid")
}

fn raw_beta(beta: &PlMap, name: &str) -> Result<PlMap, ActionError> {
    let d = beta.discriminant();
    if beta.is_translation() {
        return Err(ActionError::BetaIsTranslation(name.to_string()));
    }
    if !beta.commutes_with_translation(&QNum::one(d))? {
        return Err(ActionError::BetaNotCentral(name.to_string()));
    }
    Ok(beta.with_period(&QNum::one(d))?)
}

/// Builds the glued action: the left side sends `alpha_l` to translation
/// through `t` and the right side `alpha_r` to translation through `s`; both
/// sides are then rescaled so the common longitude moves one unit.
pub fn build_paper_action(
    t: &QNum,
    s: &QNum,
    beta_l: &PlMap,
    beta_r: &PlMap,
) -> Result<ActionSpec, ActionError> {
    let d = t.discriminant();
    let zero = QNum::zero(d);
    if t.try_cmp(&zero)?.is_le() {
        return Err(ActionError::NonPositiveParameter("t"));
    }
    if s.try_cmp(&zero)?.is_le() {
        return Err(ActionError::NonPositiveParameter("s"));
    }
    zero.try_cmp(beta_l.period())?;
    zero.try_cmp(beta_r.period())?;
    let bl = raw_beta(beta_l, BETA_L)?.affine_conjugate(t)?;
    let br = raw_beta(beta_r, BETA_R)?.affine_conjugate(s)?;
    let one = QNum::one(d);
    let al = PlMap::translation(one.clone(), bl.period().clone())?;
    let ar = PlMap::translation(one, br.period().clone())?;
    let gens = vec![
        Generator {
            name: ALPHA_L.into(),
            side: Side::Left,
            map: al,
        },
        Generator {
            name: BETA_L.into(),
            side: Side::Left,
            map: bl,
        },
        Generator {
            name: ALPHA_R.into(),
            side: Side::Right,
            map: ar,
        },
        Generator {
            name: BETA_R.into(),
            side: Side::Right,
            map: br,
        },
    ];
    ActionSpec::new(d, t.clone(), s.clone(), ALPHA_L, gens)
}

pub fn evaluate_word(spec: &ActionSpec, word: &Word) -> Result<WordMap, ActionError> {
    let mut acc = WordMap::identity();
    for l in word.letters() {
        let g = spec.generator(&l.generator)?;
        acc = acc.compose(&WordMap::from_map(g.map.pow(l.exponent)));
    }
    Ok(acc)
}

/// Step of the group of translations commuting with the side's beta, i.e.
/// the translation length of that side's minimal slithering map.
pub fn side_translation_subgroup(spec: &ActionSpec, side: Side) -> Result<QNum, ActionError> {
    let name = side.beta_name();
    let beta = spec.generator(name)?;
    match beta.map.period_group() {
        PeriodGroup::Subgroup { step } => Ok(step),
        PeriodGroup::AllReals => Err(ActionError::BetaIsTranslation(name.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    NoCommonTranslation,
    CommonTranslation {
        translation: QNum,
        commutes_with_beta_l: bool,
        commutes_with_beta_r: bool,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityParams {
    pub x0: QNum,
    pub max_word_len: usize,
    pub window: (QNum, QNum),
}

impl DensityParams {
    pub fn new(d: u64, max_word_len: usize) -> Self {
        DensityParams {
            x0: QNum::zero(d),
            max_word_len,
            window: (QNum::zero(d), QNum::one(d)),
        }
    }
}

/// Outcome of the no-common-translation test.
///
/// `NO_COMMON_TRANSLATION` rules out any slithering compatible with both
/// sides. The non-uniformity conclusion additionally needs the action to be
/// minimal, which is only supported by the numeric `density` evidence.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub t: QNum,
    pub s: QNum,
    pub left_step: QNum,
    pub right_step: QNum,
    pub quotient: QNum,
    pub quotient_is_rational: bool,
    pub verdict: Verdict,
    pub density: OrbitGapReport,
}

impl Certificate {
    pub fn is_nonuniform(&self) -> bool {
        self.verdict == Verdict::NoCommonTranslation
    }
}

pub fn certify_nonuniform(
    spec: &ActionSpec,
    density: &DensityParams,
) -> Result<Certificate, ActionError> {
    let left_step = side_translation_subgroup(spec, Side::Left)?;
    let right_step = side_translation_subgroup(spec, Side::Right)?;
    let (rational, quotient) = left_step.ratio_is_rational(&right_step)?;
    let verdict = if rational {
        // quotient = a/b in lowest terms, so b*left = a*right generates the
        // intersection of the two subgroups
        let b = quotient.rational_part().denom().clone();
        let c = left_step.scale(&num_rational::BigRational::from_integer(b));
        let bl = &spec.generator(BETA_L)?.map;
        let br = &spec.generator(BETA_R)?.map;
        let tl = PlMap::translation(c.clone(), bl.period().clone())?;
        let tr = PlMap::translation(c.clone(), br.period().clone())?;
        Verdict::CommonTranslation {
            commutes_with_beta_l: bl.commutes(&tl)?,
            commutes_with_beta_r: br.commutes(&tr)?,
            translation: c,
        }
    } else {
        Verdict::NoCommonTranslation
    };
    let density = orbit_density(spec, density, None)?;
    Ok(Certificate {
        t: spec.t.clone(),
        s: spec.s.clone(),
        left_step,
        right_step,
        quotient,
        quotient_is_rational: rational,
        verdict,
        density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QNum {
        QNum::parse(s, 2).unwrap()
    }

    fn flagship() -> ActionSpec {
        build_paper_action(&q("1+1*sqrt(2)"), &QNum::sqrt_d(2), &standard_beta(2), &standard_beta(2))
            .unwrap()
    }

    #[test]
    fn flagship_steps() {
        let spec = flagship();
        assert_eq!(side_translation_subgroup(&spec, Side::Left).unwrap(), q("-1+1*sqrt(2)"));
        assert_eq!(side_translation_subgroup(&spec, Side::Right).unwrap(), q("0+1/2*sqrt(2)"));
    }

    #[test]
    fn longitude_is_unit_translation() {
        let spec = flagship();
        for name in [ALPHA_L, ALPHA_R] {
            let w = evaluate_word(&spec, &Word::letter(name, 1)).unwrap();
            let f = w.as_periodic().unwrap();
            assert_eq!(f.translation_length(), Some(q("1")));
        }
    }

    #[test]
    fn word_evaluation() {
        let spec = flagship();
        let w = evaluate_word(&spec, &Word::parse("beta_l beta_l^-1").unwrap()).unwrap();
        assert!(w.is_identity());
        let lr = evaluate_word(&spec, &Word::parse("beta_l beta_r").unwrap()).unwrap();
        let rl = evaluate_word(&spec, &Word::parse("beta_r beta_l").unwrap()).unwrap();
        assert!(matches!(lr.compare(&rl), MapComparison::Differ { .. }));
        assert!(matches!(
            evaluate_word(&spec, &Word::parse("gamma").unwrap()),
            Err(ActionError::UnknownGenerator(_))
        ));
    }

    #[test]
    fn build_rejects_bad_betas() {
        let tr = PlMap::translation(q("1/3"), q("1")).unwrap();
        assert!(matches!(
            build_paper_action(&q("2"), &q("1"), &tr, &standard_beta(2)),
            Err(ActionError::BetaIsTranslation(_))
        ));
        let odd = standard_beta(2).affine_conjugate(&q("3/2")).unwrap();
        assert!(matches!(
            build_paper_action(&q("2"), &q("1"), &standard_beta(2), &odd),
            Err(ActionError::BetaNotCentral(_))
        ));
        assert!(matches!(
            build_paper_action(&q("-2"), &q("1"), &standard_beta(2), &standard_beta(2)),
            Err(ActionError::NonPositiveParameter("t"))
        ));
    }

    #[test]
    fn certificates() {
        let params = DensityParams::new(2, 3);
        let cert = certify_nonuniform(&flagship(), &params).unwrap();
        assert_eq!(cert.verdict, Verdict::NoCommonTranslation);
        assert_eq!(cert.quotient, q("2-1*sqrt(2)"));

        let spec = build_paper_action(&q("2"), &q("1"), &standard_beta(2), &standard_beta(2)).unwrap();
        let cert = certify_nonuniform(&spec, &params).unwrap();
        assert_eq!(
            cert.verdict,
            Verdict::CommonTranslation {
                translation: q("1"),
                commutes_with_beta_l: true,
                commutes_with_beta_r: true
            }
        );

        let t = q("1+1*sqrt(2)");
        let spec = build_paper_action(&t, &t, &standard_beta(2), &standard_beta(2)).unwrap();
        let cert = certify_nonuniform(&spec, &params).unwrap();
        assert!(matches!(cert.verdict, Verdict::CommonTranslation { .. }));
        assert_eq!(cert.quotient, q("1"));
    }
}
