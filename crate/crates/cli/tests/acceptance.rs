//! End-to-end acceptance: seven criteria, each with its own runtime budget.
//!
//! Every criterion prints one `PASS` or `FAIL` line; the test fails if any
//! criterion does. Lines go straight to stdout, bypassing the test harness
//! capture, so they show up in ordinary `cargo test` output.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use leafspace::conemodel::{build_chain_from_action, run_progress_ledger, Policy};
use leafspace::leafaction::{build_paper_action, standard_beta, ActionSpec};
use leafspace::plhomeo::{PeriodGroup, PlMap, TranslationNumber};
use leafspace::qfield::QNum;
use leafspace::sample;
use leafspace::shearlab::{shadow_length, LengthAccounting};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const D: u64 = 2;

fn q(s: &str) -> QNum {
    QNum::parse(s, D).unwrap()
}

fn json_num(v: &Value) -> QNum {
    q(v.as_str().expect("numbers serialize as text"))
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leafspace"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "configs", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn flagship() -> ActionSpec {
    build_paper_action(&q("1+1*sqrt(2)"), &q("0+1*sqrt(2)"), &standard_beta(D), &standard_beta(D)).unwrap()
}

type Check = Result<String, String>;

fn report(line: String) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").expect("stdout is writable");
}
type Criterion = (&'static str, fn() -> Check, u64);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn certify_criterion() -> Check {
    let started = Instant::now();
    let out = bin(&["certify", "--config", &config("flagship.json")]);
    let flag_time = started.elapsed();
    ensure(out.status.code() == Some(0), || format!("flagship exit {:?}", out.status.code()))?;
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure(v["verdict"]["kind"] == "NO_COMMON_TRANSLATION", || format!("flagship verdict {}", v["verdict"]))?;
    let quotient = json_num(&v["quotient"]);
    ensure(!quotient.is_rational(), || format!("flagship quotient {quotient} is rational"))?;
    // independent quotient: left step 1/t over right step 1/s is s/t
    ensure(quotient == q("0+1*sqrt(2)").try_div(&q("1+1*sqrt(2)")).unwrap(), || {
        format!("flagship quotient {quotient}")
    })?;

    let started = Instant::now();
    let out = bin(&["certify", "--config", &config("commensurable.json")]);
    let comm_time = started.elapsed();
    ensure(out.status.code() == Some(10), || format!("commensurable exit {:?}", out.status.code()))?;
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure(v["verdict"]["kind"] == "COMMON_TRANSLATION", || format!("commensurable verdict {}", v["verdict"]))?;
    let c = json_num(&v["verdict"]["translation"]);
    let spec = build_paper_action(&q("0+2*sqrt(2)"), &q("0+1*sqrt(2)"), &standard_beta(D), &standard_beta(D)).unwrap();
    for name in ["beta_l", "beta_r"] {
        let beta = &spec.generator(name).unwrap().map;
        let tr = PlMap::translation(c.clone(), beta.period().clone()).unwrap();
        ensure(beta.commutes(&tr).unwrap(), || format!("witness {c} does not commute with {name}"))?;
    }
    let limit = Duration::from_secs(1);
    ensure(flag_time < limit && comm_time < limit, || {
        format!("too slow: {flag_time:?}, {comm_time:?}")
    })?;
    Ok(format!("quotient {quotient}, witness {c}"))
}

fn metric_lemma_criterion() -> Check {
    let spec = flagship();
    // max(1/s, 1/t) from the defining parameters
    let r = q("1+1*sqrt(2)").inv().unwrap().max_of(&q("0+1*sqrt(2)").inv().unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (chains, pairs_per_chain) = (200, 50);
    let mut samples = 0;
    for c in 0..chains {
        let len = rng.gen_range(1..=19);
        let pattern: String = (0..len).map(|_| if rng.gen_bool(0.5) { 'L' } else { 'R' }).collect();
        let chain = build_chain_from_action(&spec, &pattern, c).map_err(|e| e.to_string())?;
        ensure(chain.cylinder_count() <= 20, || "chain too long".into())?;
        for _ in 0..pairs_per_chain {
            let i = rng.gen_range(0..chain.cylinder_count());
            let j = rng.gen_range(i..chain.cylinder_count());
            let (x, y) = (sample::qnum(&mut rng, D, 4), sample::qnum(&mut rng, D, 4));
            // coordinates by composing the comparison maps directly
            let (mut xi, mut yi) = (x.clone(), y.clone());
            let mut di = None;
            for (k, piece) in chain.pieces()[..j].iter().enumerate() {
                if k == i {
                    di = Some((&xi - &yi).abs());
                }
                xi = piece.comparison.eval(&xi);
                yi = piece.comparison.eval(&yi);
            }
            let dj = (&xi - &yi).abs();
            let di = di.unwrap_or_else(|| dj.clone());
            let n_between = (j - i).saturating_sub(1);
            let bound = if i == j { QNum::zero(D) } else { r.scale_int(n_between as i64 + 1) };
            let gap = (&di - &dj).abs();
            ensure(gap <= bound, || format!("pattern {pattern} i={i} j={j} x={x} y={y}: gap {gap} > {bound}"))?;
            samples += 1;
        }
    }
    Ok(format!("{samples} samples, 0 violations"))
}

fn progress_criterion() -> Check {
    let (t, r) = (q("1"), q("1/10"));
    let n = 10;
    for seed in 0..10_000u64 {
        let ledger = run_progress_ledger(&t, &r, n, Policy::Random(seed)).map_err(|e| e.to_string())?;
        let mut sum = QNum::zero(D);
        for (m, c) in ledger.crossings.iter().enumerate() {
            let m = m as i64 + 1;
            ensure(c.progress >= t && c.distortion.abs() <= r && c.return_distortion.abs() <= r, || {
                format!("seed {seed}: crossing {m} out of range")
            })?;
            sum = sum + &c.progress + &c.distortion + &c.return_distortion;
            ensure(sum == c.simulated_d1, || format!("seed {seed}: crossing {m} sum mismatch"))?;
            let bound = t.scale_int(m) - r.scale_int(2 * m);
            ensure(sum >= bound, || format!("seed {seed}: crossing {m}: {sum} < {bound}"))?;
        }
        ensure(ledger.crossings.len() == n && sum >= q("8"), || format!("seed {seed}: final {sum}"))?;
    }

    let out = bin(&["stall-search", "--T", "1", "--r", "1"]);
    ensure(out.status.success(), || format!("stall-search exit {:?}", out.status.code()))?;
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure(v["result"] == "STALL", || format!("stall-search result {}", v["result"]))?;
    let ceiling = json_num(&v["trace"]["ceiling"]);
    ensure(ceiling == q("3"), || format!("ceiling {ceiling}"))?;
    let crossings = v["trace"]["ledger"]["crossings"].as_array().ok_or("no crossings")?;
    let (t, r) = (q("1"), q("1"));
    let mut sum = QNum::zero(D);
    for (k, c) in crossings.iter().enumerate() {
        let (p, dl, e) = (json_num(&c["progress"]), json_num(&c["distortion"]), json_num(&c["return_distortion"]));
        ensure(p >= t && dl.abs() <= r && e.abs() <= r, || format!("stall crossing {} out of range", k + 1))?;
        ensure(k > 0 || (dl.is_zero() && e.is_zero()), || "first crossing distorted".into())?;
        sum = sum + &p + &dl + &e;
        ensure(sum <= ceiling, || format!("stall crossing {}: {sum} above ceiling", k + 1))?;
    }
    ensure(crossings.len() == 1000, || format!("{} crossings", crossings.len()))?;
    Ok(format!("10000 ledgers >= 8; stall trace of {} crossings below {ceiling}", crossings.len()))
}

fn pl_algebra_criterion() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let periods = [q("1"), q("1+1*sqrt(2)"), q("0+1/2*sqrt(2)")];
    let cases = 10_000;
    for case in 0..cases {
        let p = &periods[case % periods.len()];
        let k = rng.gen_range(1..=4);
        let f = if case % 7 == 0 {
            // a map with a forced symmetry so the period group is nontrivial
            let g = sample::plmap(&mut rng, &p.scale(&BigRational::new(1.into(), 2.into())), k);
            g.with_period(p).unwrap()
        } else {
            sample::plmap(&mut rng, p, k)
        };
        let (kg, kh) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let g = sample::plmap(&mut rng, p, kg);
        let h = sample::plmap(&mut rng, p, kh);
        let id = PlMap::identity(p.clone()).unwrap();
        let fail = |what: &str| format!("case {case}: {what}");

        let fg = f.compose(&g).unwrap();
        ensure(fg.compose(&h).unwrap() == f.compose(&g.compose(&h).unwrap()).unwrap(), || fail("associativity"))?;
        ensure(f.compose(&id).unwrap() == f && id.compose(&f).unwrap() == f, || fail("identity"))?;
        ensure(f.compose(&f.inverse()).unwrap().is_identity(), || fail("inverse"))?;
        let x = sample::qnum(&mut rng, D, 3);
        ensure(fg.eval(&x) == f.eval(&g.eval(&x)), || fail("eval coherence"))?;
        ensure(f.eval(&(&x + p)) == &f.eval(&x) + p, || fail("equivariance"))?;
        match f.period_group() {
            PeriodGroup::AllReals => ensure(f.is_translation(), || fail("AllReals for a non-translation"))?,
            PeriodGroup::Subgroup { step } => {
                ensure(f.commutes_with_translation(&step).unwrap(), || fail("step does not commute"))?;
                let half = step.scale(&BigRational::new(1.into(), 2.into()));
                ensure(!f.commutes_with_translation(&half).unwrap(), || fail("half step commutes"))?;
            }
        }
    }
    Ok(format!("{cases} cases, 0 failures"))
}

fn translation_number_criterion() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let eps = BigRational::new(BigInt::from(1), BigInt::from(1_000_000));
    let one_millionth = QNum::from_rational(eps.clone(), D);
    let p = q("1+1*sqrt(2)");
    for k in 0..100 {
        let t = sample::qnum(&mut rng, D, 5);
        let f = PlMap::translation(t.clone(), p.clone()).unwrap();
        ensure(f.translation_number(&eps, 16) == TranslationNumber::Exact { value: t.clone() }, || {
            format!("translation {k}: {t}")
        })?;
    }
    let mut forced = 0;
    let mut bracketed = 0;
    for case in 0..60 {
        let qd = rng.gen_range(1..=6i64);
        let m = [-3, -2, -1, 1, 2, 3][rng.gen_range(0..6)];
        // h T h^-1 with T translation by m p / q, so f^q = T^q = +m p
        let shift = p.scale(&BigRational::new(m.into(), qd.into()));
        let kh = rng.gen_range(2..=4);
        let h = sample::plmap(&mut rng, &p, kh);
        let tr = PlMap::translation(shift.clone(), p.clone()).unwrap();
        let f = h.compose(&tr).unwrap().compose(&h.inverse()).unwrap();
        if !f.is_translation() {
            forced += 1;
        }
        ensure(f.pow(qd).eval(&q("0")) == p.scale_int(m), || format!("case {case}: orbit not forced"))?;
        ensure(f.translation_number(&eps, 6) == TranslationNumber::Exact { value: shift.clone() }, || {
            format!("case {case}: exact {shift} not found")
        })?;
        // bracket mode only: no periodic-orbit search
        if !f.is_translation() {
            let tn = f.translation_number(&eps, 0);
            let (lo, hi) = tn.bounds();
            ensure(tn.contains(&shift) && &hi - &lo <= one_millionth, || {
                format!("case {case}: bracket [{lo}, {hi}] misses {shift}")
            })?;
            bracketed += 1;
        }
    }
    ensure(forced > 30, || format!("only {forced} forced maps were not translations"))?;
    Ok(format!("100 translations exact; {forced} forced orbits exact; {bracketed} brackets contain the value"))
}

fn shear_criterion() -> Check {
    let (t, lambda) = (q("1"), q("2"));
    for n in 1..=60u32 {
        let report = shadow_length(&t, &lambda, n, LengthAccounting::PerLevel).map_err(|e| e.to_string())?;
        let expected = QNum::from_rational(
            BigRational::new(BigInt::from(1), BigInt::from(1)) - BigRational::new(1.into(), BigInt::from(1) << n),
            D,
        );
        ensure(report.shadow == expected, || format!("n={n}: shadow {}", report.shadow))?;
        ensure(report.limit == q("1"), || format!("limit {}", report.limit))?;
        ensure(report.curve_length == QNum::from_int(n as i64, D), || format!("n={n}: curve {}", report.curve_length))?;
        ensure(report.shadow < report.limit, || format!("n={n}: shadow not below limit"))?;
    }
    let irr = shadow_length(&q("0+1*sqrt(2)"), &q("1+1*sqrt(2)"), 5, LengthAccounting::PerLevel).unwrap();
    // sqrt2 / ((1 + sqrt2) - 1)
    ensure(irr.limit == q("1"), || format!("limit {}", irr.limit))?;
    Ok("shadow 1 - 2^-n for n <= 60, curve length n, limit 1".into())
}

fn determinism_criterion() -> Check {
    let a = bin(&["selftest", "--seed", "7"]);
    let b = bin(&["selftest", "--seed", "7"]);
    ensure(a.status.success() && b.status.success(), || "selftest reported failures".into())?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || "logs differ".into())?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

#[test]
fn acceptance() {
    let suite = Instant::now();
    let criteria: [Criterion; 7] = [
        ("1 non-uniformity certificate", certify_criterion, 2),
        ("2 metric comparison lemma", metric_lemma_criterion, 10),
        ("3 progress induction", progress_criterion, 10),
        ("4 PL algebra", pl_algebra_criterion, 30),
        ("5 translation numbers", translation_number_criterion, 10),
        ("6 shear model", shear_criterion, 1),
        ("7 determinism", determinism_criterion, 60),
    ];
    let mut failed = Vec::new();
    for (name, run, budget) in criteria {
        let started = Instant::now();
        let result = run();
        let elapsed = started.elapsed();
        let result = result.and_then(|detail| {
            if elapsed < Duration::from_secs(budget) {
                Ok(detail)
            } else {
                Err(format!("{detail}; exceeded {budget} s"))
            }
        });
        match result {
            Ok(detail) => report(format!("PASS criterion {name} ({:.2} s): {detail}", elapsed.as_secs_f64())),
            Err(why) => {
                report(format!("FAIL criterion {name} ({:.2} s): {why}", elapsed.as_secs_f64()));
                failed.push(name);
            }
        }
    }
    let total = suite.elapsed();
    report(format!("acceptance suite finished in {:.2} s", total.as_secs_f64()));
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
    assert!(total < Duration::from_secs(60), "suite took {total:?}");
}
