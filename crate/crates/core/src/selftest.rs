//! Seeded randomized invariant suite.
//!
//! The log contains only counts and exact values, never timings, so two runs
//! with the same seed and size are byte-identical.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conemodel::{self, build_chain_from_action, metric_gap_check, run_progress_ledger, Policy};
use crate::leafaction::{
    build_paper_action, certify_nonuniform, evaluate_word, standard_beta, DensityParams, Letter,
    MapComparison, Verdict, Word, ALPHA_L, ALPHA_R, BETA_L, BETA_R,
};
use crate::plhomeo::{PeriodGroup, PlMap, TranslationNumber};
use crate::qfield::QNum;
use crate::sample;
use crate::shearlab::{shadow_length, LengthAccounting};

const D: u64 = 2;

#[derive(Debug, Clone, Copy)]
pub struct SelftestConfig {
    pub seed: u64,
    /// Multiplier on the number of randomized cases per section.
    pub size: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { seed: 0, size: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionResult {
    pub name: &'static str,
    pub checks: u64,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelftestReport {
    pub seed: u64,
    pub sections: Vec<SectionResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.sections.iter().all(|s| s.failures.is_empty())
    }

    pub fn log(&self) -> String {
        let mut out = String::new();
        writeln!(out, "selftest seed={}", self.seed).unwrap();
        for s in &self.sections {
            let status = if s.failures.is_empty() { "ok" } else { "FAIL" };
            writeln!(out, "{:<14} checks={:<6} failures={:<4} {status}", s.name, s.checks, s.failures.len()).unwrap();
            for f in s.failures.iter().take(5) {
                writeln!(out, "  {f}").unwrap();
            }
        }
        let total: u64 = self.sections.iter().map(|s| s.checks).sum();
        let failed: usize = self.sections.iter().map(|s| s.failures.len()).sum();
        writeln!(out, "total checks={total} failures={failed}").unwrap();
        out
    }
}

struct Tally {
    name: &'static str,
    checks: u64,
    failures: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, checks: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn done(self) -> SectionResult {
        SectionResult {
            name: self.name,
            checks: self.checks,
            failures: self.failures,
        }
    }
}

fn random_period<R: Rng>(rng: &mut R) -> QNum {
    loop {
        let p = sample::qnum(rng, D, 3).abs();
        if p.to_f64() > 0.05 {
            return p;
        }
    }
}

fn field_axioms(rng: &mut ChaCha8Rng, n: usize) -> SectionResult {
    let mut t = Tally::new("qfield");
    for _ in 0..n {
        let (a, b, c) = (sample::qnum(rng, D, 5), sample::qnum(rng, D, 5), sample::qnum(rng, D, 5));
        t.check((&a + &b) + &c == &a + (&b + &c), || format!("assoc {a} {b} {c}"));
        t.check(&a * (&b + &c) == &a * &b + &a * &c, || format!("distrib {a} {b} {c}"));
        if !a.is_zero() {
            t.check(&a * &a.inv().unwrap() == QNum::one(D), || format!("inverse {a}"));
        }
        let (fa, fb) = (a.to_f64(), b.to_f64());
        if (fa - fb).abs() > 1e-9 {
            t.check((a < b) == (fa < fb), || format!("order {a} {b}"));
        }
        let fl = BigRational::from_integer(a.floor());
        let fl = QNum::from_rational(fl, D);
        t.check(fl <= a && a < &fl + &QNum::one(D), || format!("floor {a}"));
    }
    t.done()
}

fn pl_algebra(rng: &mut ChaCha8Rng, n: usize) -> SectionResult {
    let mut t = Tally::new("plhomeo");
    for _ in 0..n {
        let p = random_period(rng);
        let k = rng.gen_range(1..5);
        let (f, g, h) = (sample::plmap(rng, &p, k), sample::plmap(rng, &p, k), sample::plmap(rng, &p, k));
        let id = PlMap::identity(p.clone()).unwrap();
        let fg = f.compose(&g).unwrap();
        t.check(fg.compose(&h).unwrap() == f.compose(&g.compose(&h).unwrap()).unwrap(), || {
            format!("assoc p={p}")
        });
        t.check(f.compose(&f.inverse()).unwrap() == id, || format!("inverse p={p}"));
        t.check(f.compose(&id).unwrap() == f, || format!("identity p={p}"));
        let x = sample::qnum(rng, D, 4);
        t.check(fg.eval(&x) == f.eval(&g.eval(&x)), || format!("eval coherence x={x}"));
        t.check(f.eval(&(&x + &p)) == &f.eval(&x) + &p, || format!("equivariance x={x}"));
        t.check(f.eval_inverse(&f.eval(&x)) == x, || format!("eval_inverse x={x}"));
        if let PeriodGroup::Subgroup { step } = f.period_group() {
            let tr = PlMap::translation(step.clone(), p.clone()).unwrap();
            t.check(f.commutes(&tr).unwrap(), || format!("step {step} does not commute"));
            let half = PlMap::translation(step.scale(&BigRational::new(1.into(), 2.into())), p.clone()).unwrap();
            t.check(!f.commutes(&half).unwrap(), || format!("half step {step} commutes"));
        }
    }
    t.done()
}

fn translation_numbers(rng: &mut ChaCha8Rng, n: usize) -> SectionResult {
    let mut t = Tally::new("rotation");
    let eps = BigRational::new(BigInt::from(1), BigInt::from(1_000_000));
    for _ in 0..n {
        let p = random_period(rng);
        let s = sample::qnum(rng, D, 3);
        let tr = PlMap::translation(s.clone(), p.clone()).unwrap();
        t.check(tr.translation_number(&eps, 8) == TranslationNumber::Exact { value: s.clone() }, || {
            format!("translation {s}")
        });
        // a conjugate of x -> x + m p / q has translation number m p / q
        let q = rng.gen_range(1..5i64);
        let m = rng.gen_range(-3..4i64);
        let shift = p.scale(&BigRational::new(BigInt::from(m), BigInt::from(q)));
        let fine = p.scale(&BigRational::new(BigInt::from(1), BigInt::from(q)));
        let rot = PlMap::translation(shift.clone(), fine.clone()).unwrap();
        let conj = sample::plmap(rng, &fine, 2);
        let f = conj
            .compose(&rot)
            .and_then(|x| x.compose(&conj.inverse()))
            .and_then(|x| x.with_period(&p))
            .unwrap();
        match f.translation_number(&eps, 8) {
            TranslationNumber::Exact { value } => t.check(value == shift, || format!("periodic {value} != {shift}")),
            other => t.check(false, || format!("periodic orbit missed: {other:?}")),
        }
        let bracket = f.translation_number(&eps, 0);
        t.check(bracket.contains(&shift), || format!("bracket misses {shift}"));
    }
    t.done()
}

fn random_word(rng: &mut ChaCha8Rng, len: usize) -> Word {
    let names = [ALPHA_L, BETA_L, ALPHA_R, BETA_R];
    let letters = (0..len)
        .map(|_| Letter {
            generator: names[rng.gen_range(0..4)].to_string(),
            exponent: [-2, -1, 1, 2][rng.gen_range(0..4)],
        })
        .collect();
    Word::new(letters).unwrap()
}

fn leaf_action(rng: &mut ChaCha8Rng, n: usize) -> SectionResult {
    let mut t = Tally::new("leafaction");
    let b = standard_beta(D);
    let q = |s: &str| QNum::parse(s, D).unwrap();
    let flagship = build_paper_action(&q("1+1*sqrt(2)"), &q("0+1*sqrt(2)"), &b, &b).unwrap();
    let comm = build_paper_action(&q("0+2*sqrt(2)"), &q("0+1*sqrt(2)"), &b, &b).unwrap();
    let params = DensityParams::new(D, 3);
    let cert = certify_nonuniform(&flagship, &params).unwrap();
    t.check(cert.verdict == Verdict::NoCommonTranslation && cert.quotient == q("2-1*sqrt(2)"), || {
        format!("flagship certificate {:?}", cert.verdict)
    });
    let cert = certify_nonuniform(&comm, &params).unwrap();
    let sound = matches!(
        cert.verdict,
        Verdict::CommonTranslation { commutes_with_beta_l: true, commutes_with_beta_r: true, .. }
    );
    t.check(sound, || format!("commensurable certificate {:?}", cert.verdict));
    for _ in 0..n {
        let (u, v) = (random_word(rng, 3), random_word(rng, 3));
        let lhs = evaluate_word(&flagship, &u.concat(&v)).unwrap();
        let rhs = evaluate_word(&flagship, &u).unwrap().compose(&evaluate_word(&flagship, &v).unwrap());
        t.check(lhs.compare(&rhs) == MapComparison::Equal, || format!("homomorphism {u} | {v}"));
        let x = sample::qnum(rng, D, 2);
        t.check(lhs.eval(&x) == rhs.eval(&x), || format!("homomorphism eval {u} | {v} at {x}"));
        let k = rng.gen_range(1..5i64);
        let scale = QNum::from_ratio(k, rng.gen_range(1..5), D);
        let spec = build_paper_action(&(&q("1+1*sqrt(2)") * &scale), &(&q("0+1*sqrt(2)") * &scale), &b, &b).unwrap();
        let again = certify_nonuniform(&spec, &DensityParams::new(D, 1)).unwrap();
        t.check(again.verdict == Verdict::NoCommonTranslation, || format!("rescaled by {scale}"));
    }
    t.done()
}

fn cone_model(rng: &mut ChaCha8Rng, n: usize) -> SectionResult {
    let mut t = Tally::new("conemodel");
    let b = standard_beta(D);
    let q = |s: &str| QNum::parse(s, D).unwrap();
    let spec = build_paper_action(&q("1+1*sqrt(2)"), &q("0+1*sqrt(2)"), &b, &b).unwrap();
    for _ in 0..n {
        let len = rng.gen_range(1..=8);
        let pattern: String = (0..len).map(|_| if rng.gen_bool(0.5) { 'L' } else { 'R' }).collect();
        let chain = build_chain_from_action(&spec, &pattern, rng.gen()).unwrap();
        let i = rng.gen_range(0..chain.cylinder_count());
        let j = rng.gen_range(i..chain.cylinder_count());
        let pairs = sample::leaf_pairs(rng, D, 4, 3);
        let report = metric_gap_check(&chain, i, j, &pairs).unwrap();
        t.check(report.violations.is_empty(), || format!("metric lemma {pattern} {i}..{j}"));

        let ledger = run_progress_ledger(&q("1"), &q("1/10"), 10, Policy::Random(rng.gen())).unwrap();
        t.check(ledger.bound_violations.is_empty(), || "ledger prefix bound".to_string());
        t.check(ledger.final_simulated_d1 >= q("8"), || "ledger final bound".to_string());
    }
    let stall = conemodel::adversarial_stall(&q("1"), &q("1")).unwrap();
    t.check(stall.is_some(), || "no stall at T = r".to_string());
    let stall = conemodel::adversarial_stall(&q("3"), &q("1")).unwrap();
    t.check(stall.is_none(), || "stall at T = 3r".to_string());
    t.done()
}

fn shear(n: usize) -> SectionResult {
    let mut t = Tally::new("shearlab");
    let one = QNum::one(D);
    let two = QNum::from_int(2, D);
    for k in 1..=(n.min(60) as u32) {
        let r = shadow_length(&one, &two, k, LengthAccounting::PerLevel).unwrap();
        let expected = BigRational::from_integer(1.into()) - BigRational::new(1.into(), BigInt::from(1) << k);
        t.check(r.shadow == QNum::from_rational(expected, D), || format!("shadow n={k}"));
        t.check(r.limit == one, || format!("limit n={k}"));
    }
    t.done()
}

pub fn run(config: SelftestConfig) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.size.max(1);
    let sections = vec![
        field_axioms(&mut rng, 200 * n),
        pl_algebra(&mut rng, 100 * n),
        translation_numbers(&mut rng, 20 * n),
        leaf_action(&mut rng, 20 * n),
        cone_model(&mut rng, 30 * n),
        shear(60),
    ];
    SelftestReport {
        seed: config.seed,
        sections,
    }
}
