use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use leafspace::conemodel::{
    adversarial_stall, build_chain_from_action, metric_gap_check, run_progress_ledger, Policy, ProgressLedger,
};
use leafspace::leafaction::{
    certify_nonuniform, evaluate_word, incompressible_interval_search, orbit_density, ActionError, DensityParams,
    Verdict, Word,
};
use leafspace::qfield::QNum;
use leafspace::sample;
use leafspace::selftest::{self, SelftestConfig};
use leafspace::shearlab::{holonomy_domain_trace, shadow_length, HolonomyTrace, LengthAccounting, Shear, ShearModel};
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;
use crate::input::{field_of, load_config, load_map, parse_num};
use crate::{AccountingArg, Command, Format, PolicyArg};

/// Exit status of `certify` when a common translation exists.
const EXIT_COMMON_TRANSLATION: u8 = 10;
/// Leaf pairs for `metric-lemma` are drawn from `[-SPAN, SPAN)`.
const SAMPLE_SPAN: i64 = 4;

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    emit(out, &text)
}

fn emit_csv(out: Option<&Path>, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        w.write_record(row).map_err(io_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    emit(out, &String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn parse_word(text: &str) -> Result<Word, CliError> {
    Word::parse(text).map_err(|e| match e {
        ActionError::MalformedWord(_) | ActionError::ZeroExponent(_) => CliError::Malformed(e.to_string()),
        other => other.into(),
    })
}

/// Parses standalone numbers sharing one inferred field.
fn parse_all<const N: usize>(texts: [&str; N]) -> Result<[QNum; N], CliError> {
    let d = field_of(None, texts)?;
    let mut out = Vec::with_capacity(N);
    for t in texts {
        out.push(parse_num(t, d)?);
    }
    Ok(out.try_into().expect("length N"))
}

fn accounting(a: AccountingArg) -> LengthAccounting {
    match a {
        AccountingArg::PerLevel => LengthAccounting::PerLevel,
        AccountingArg::DoubleAfterFirst => LengthAccounting::DoubleAfterFirst,
    }
}

fn ledger_csv(out: Option<&Path>, ledger: &ProgressLedger) -> Result<(), CliError> {
    let rows = ledger
        .crossings
        .iter()
        .map(|c| {
            vec![
                c.index.to_string(),
                c.progress.to_string(),
                c.distortion.to_string(),
                c.return_distortion.to_string(),
                c.certified_d1.to_string(),
                c.simulated_d1.to_string(),
            ]
        })
        .collect();
    emit_csv(
        out,
        &["crossing", "progress", "distortion", "return_distortion", "certified_d1_bound", "simulated_d1"],
        rows,
    )
}

fn holonomy_csv(out: Option<&Path>, trace: &HolonomyTrace) -> Result<(), CliError> {
    let rows = trace
        .levels
        .iter()
        .map(|l| {
            vec![
                l.level.to_string(),
                l.curve_length.to_string(),
                l.shadow_length.to_string(),
                l.domain_length.to_string(),
                l.projected_length.to_string(),
                trace.label.to_string(),
            ]
        })
        .collect();
    emit_csv(
        out,
        &["level", "curve_length", "shadow_length", "domain_length", "projected_domain_length", "label"],
        rows,
    )
}

pub fn run(command: Command, out: Option<&Path>) -> Result<ExitCode, CliError> {
    match command {
        Command::Rotnum { map, eps, max_denom } => {
            let f = load_map(&map)?;
            let eps = parse_num(&eps, f.discriminant())?;
            if !eps.is_rational() || !eps.is_positive() {
                return Err(CliError::Precondition(format!("eps must be a positive rational, got {eps}")));
            }
            let tn = f.translation_number(eps.rational_part(), max_denom);
            emit_json(out, &json!({ "map": f, "translation_number": tn }))?;
        }
        Command::Periods { map } => {
            let f = load_map(&map)?;
            emit_json(
                out,
                &json!({ "map": f, "period_group": f.period_group(), "fixed_points": f.fixed_points() }),
            )?;
        }
        Command::BuildAction(c) => {
            let cfg = load_config(&c.config)?;
            emit_json(out, &cfg.spec)?;
        }
        Command::EvalWord { config, word, at, compare } => {
            let cfg = load_config(&config.config)?;
            let w = parse_word(&word)?;
            let map = evaluate_word(&cfg.spec, &w)?;
            let mut values = Vec::new();
            for x in &at {
                let x = parse_num(x, cfg.d)?;
                values.push(json!({ "x": x, "y": map.eval(&x) }));
            }
            let comparison = match compare {
                Some(other) => {
                    let v = parse_word(&other)?;
                    Some(json!({ "word": v, "result": map.compare(&evaluate_word(&cfg.spec, &v)?) }))
                }
                None => None,
            };
            emit_json(out, &json!({ "word": w, "map": map, "values": values, "comparison": comparison }))?;
        }
        Command::Certify { config, max_word_len } => {
            let cfg = load_config(&config.config)?;
            let cert = certify_nonuniform(&cfg.spec, &DensityParams::new(cfg.d, max_word_len))?;
            emit_json(out, &cert)?;
            if let Verdict::CommonTranslation { .. } = cert.verdict {
                return Ok(ExitCode::from(EXIT_COMMON_TRANSLATION));
            }
        }
        Command::OrbitGap { config, max_word_len, x0, window_lo, window_hi, generators } => {
            let cfg = load_config(&config.config)?;
            let params = DensityParams {
                x0: parse_num(&x0, cfg.d)?,
                max_word_len,
                window: (parse_num(&window_lo, cfg.d)?, parse_num(&window_hi, cfg.d)?),
            };
            let names: Vec<&str> = generators.iter().map(String::as_str).collect();
            let only = if names.is_empty() { None } else { Some(names.as_slice()) };
            emit_json(out, &orbit_density(&cfg.spec, &params, only)?)?;
        }
        Command::Incompressible { config, lo, hi, max_word_len } => {
            let cfg = load_config(&config.config)?;
            let (a, b) = (parse_num(&lo, cfg.d)?, parse_num(&hi, cfg.d)?);
            let result = incompressible_interval_search(&cfg.spec, (&a, &b), max_word_len)?;
            emit_json(out, &json!({ "interval": [a, b], "result": result }))?;
        }
        Command::MetricLemma { config, pattern, seed, i, j, samples } => {
            let cfg = load_config(&config.config)?;
            let chain = build_chain_from_action(&cfg.spec, &pattern, seed)?;
            let j = j.unwrap_or(chain.cylinder_count() - 1);
            let pairs = sample::seeded_leaf_pairs(seed, cfg.d, samples, SAMPLE_SPAN);
            let report = metric_gap_check(&chain, i, j, &pairs)?;
            emit_json(
                out,
                &json!({
                    "pattern": pattern,
                    "seed": seed,
                    "left_period": chain.left_period(),
                    "right_period": chain.right_period(),
                    "r": chain.distortion(),
                    "report": report,
                }),
            )?;
        }
        Command::ConeProgress { t, r, n, policy, seed, format } => {
            let [t, r] = parse_all([&t, &r])?;
            let policy = match policy {
                PolicyArg::Adversarial => Policy::Adversarial,
                PolicyArg::Random => Policy::Random(seed),
            };
            let ledger = run_progress_ledger(&t, &r, n, policy)?;
            match format {
                Format::Csv => ledger_csv(out, &ledger)?,
                Format::Json => emit_json(out, &ledger)?,
            }
        }
        Command::StallSearch { t, r, format } => {
            let [t, r] = parse_all([&t, &r])?;
            let found = adversarial_stall(&t, &r)?;
            match (format, found) {
                (Format::Csv, Some(trace)) => ledger_csv(out, &trace.ledger)?,
                (Format::Json, Some(trace)) => emit_json(out, &json!({ "result": "STALL", "trace": trace }))?,
                (_, None) => emit_json(out, &json!({ "result": "NONE", "T": t, "r": r }))?,
            }
        }
        Command::ShearShadow { t, lambda, n, accounting: acc } => {
            let [t, lambda] = parse_all([&t, &lambda])?;
            emit_json(out, &shadow_length(&t, &lambda, n, accounting(acc))?)?;
        }
        Command::ShearHolonomy { lambda, delta, eps, t, n, threshold, lo, hi, accounting: acc, format } => {
            let [lambda, delta, eps, t, threshold, lo, hi] = parse_all([&lambda, &delta, &eps, &t, &threshold, &lo, &hi])?;
            let mut model = ShearModel::new(lambda, eps.clone(), Shear::bump(&eps, &delta)?, t)?;
            model.accounting = accounting(acc);
            let trace = holonomy_domain_trace(&model, (&lo, &hi), n, &threshold)?;
            match format {
                Format::Csv => holonomy_csv(out, &trace)?,
                Format::Json => emit_json(out, &json!({ "model": model, "trace": trace }))?,
            }
        }
        Command::Selftest { seed, size } => {
            let report = selftest::run(SelftestConfig { seed, size });
            emit(out, &report.log())?;
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
