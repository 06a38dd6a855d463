use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lce_lab::hyperimmunity::{least_beyond, majorize_k_from_p, majorize_p_from_k, principal};
use lce_lab::machines::{check_usch, measure_preserved, pad_length, uniformize, MachineFile, OverflowPolicy};
use lce_lab::numerics::{parse_rational, JsonRational};
use lce_lab::reducibility::{check_witness, default_samples, TranslationWitness, Variant};
use lce_lab::report::to_json;
use lce_lab::speedability::{
    amplify, check_total_speedup, default_probes, liminf_record, speedup_from_translation,
    translation_from_speedup, Verdict, DEFAULT_INDEX_SEARCH,
};
use lce_lab::{LabError, Rational, Result};

use crate::specs::{
    gallery_entries, load_machine, parse_majorizer, parse_real, parse_set, parse_speedup, parse_translation,
    parse_witness,
};

/// What a command produced: the report body, whether it passed, and a one-line summary.
pub struct Outcome {
    pub body: String,
    pub passed: bool,
    pub summary: String,
}

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn positive(s: &str) -> std::result::Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn jr(q: Rational) -> JsonRational {
    JsonRational(q)
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum VariantArg {
    Strict,
    Weakened,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Strict => Variant::Strict,
            VariantArg::Weakened => Variant::Weakened,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Overflow {
    Saturate,
    Drop,
}

#[derive(Args, Debug)]
pub struct GalleryArgs {
    /// Gallery config file (JSON); the built-in gallery when absent
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of approximation terms to list per real
    #[arg(long, default_value_t = 8)]
    pub terms: u64,
}

pub fn gallery(args: &GalleryArgs) -> Result<Outcome> {
    let entries = gallery_entries(args.config.as_deref())?;
    let reals = lce_lab::approximations::build_gallery(&entries)?;
    let listing: Vec<Value> = reals
        .iter()
        .map(|x| {
            let terms: Vec<JsonRational> = (0..args.terms).map(|n| jr(x.approx_at(n))).collect();
            json!({
                "name": x.name(),
                "limit": jr(x.oracle_limit().clone()),
                "settles_at": x.settles_at(),
                "approximations": terms,
            })
        })
        .collect();
    Ok(Outcome {
        body: to_json(&listing)?,
        passed: true,
        summary: format!("{} reals validated", reals.len()),
    })
}

#[derive(Args, Debug)]
pub struct CheckWitnessArgs {
    /// Reduced real: geometric:L[:r], set:NAME or a gallery name
    #[arg(long)]
    pub alpha: String,
    /// Target real, same syntax as --alpha
    #[arg(long)]
    pub beta: String,
    /// identity, linear:k, contraction:t:s, scaling:r:forward|backward, least
    #[arg(long)]
    pub witness: String,
    /// Constant c (num/den); overrides the witness default
    #[arg(long, value_parser = rational_arg)]
    pub c: Option<Rational>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    #[arg(long, default_value_t = 1000, value_parser = positive)]
    pub samples: u64,
    #[arg(long)]
    pub gallery: Option<PathBuf>,
}

pub fn check_witness_cmd(args: &CheckWitnessArgs) -> Result<Outcome> {
    let entries = gallery_entries(args.gallery.as_deref())?;
    let alpha = parse_real(&args.alpha, &entries)?;
    let beta = parse_real(&args.beta, &entries)?;
    let w = parse_witness(&args.witness, &alpha, args.c.as_ref(), args.variant.map(Into::into))?;
    let samples = default_samples(&beta, args.samples as usize);
    let report = check_witness(&alpha, &beta, &w, &samples)?;
    Ok(Outcome {
        body: to_json(&report)?,
        passed: report.passed(),
        summary: report.summary(),
    })
}

#[derive(Args, Debug)]
pub struct SpeedTraceArgs {
    /// geometric:L[:r], set:NAME or a gallery name
    #[arg(long)]
    pub real: String,
    /// Speed-up function: identity, linear:k, shift:k
    #[arg(long, conflicts_with = "translation", required_unless_present = "translation")]
    pub speedup: Option<String>,
    /// Total translation for the total speed-up check: identity, linear:k, contraction:t:s
    #[arg(long)]
    pub translation: Option<String>,
    /// Compose the translation with itself this many times
    #[arg(long, requires = "translation", value_parser = clap::value_parser!(u32).range(1..))]
    pub amplify: Option<u32>,
    #[arg(long, value_parser = positive)]
    pub horizon: u64,
    /// Evidence threshold; required with --translation
    #[arg(long, value_parser = rational_arg)]
    pub rho: Option<Rational>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long)]
    pub gallery: Option<PathBuf>,
}

pub fn speed_trace(args: &SpeedTraceArgs) -> Result<Outcome> {
    let entries = gallery_entries(args.gallery.as_deref())?;
    let x = parse_real(&args.real, &entries)?;
    if let Some(spec) = &args.translation {
        let rho = args
            .rho
            .as_ref()
            .ok_or_else(|| LabError::config("--translation needs --rho"))?;
        let mut g = parse_translation(spec)?;
        if let Some(k) = args.amplify {
            g = amplify(&g, k)?;
        }
        let report = check_total_speedup(&x, &g, rho, args.horizon, &default_probes(&x, args.horizon))?;
        let body = match (args.format, &report.trace) {
            (Format::Csv, Some(trace)) => trace.to_csv(),
            _ => to_json(&report)?,
        };
        return Ok(Outcome {
            body,
            passed: report.verdict == Verdict::Evidence,
            summary: format!("{:?} for rho = {rho} on {} probes", report.verdict, report.probes_checked),
        });
    }
    let f = parse_speedup(args.speedup.as_deref().expect("clap requires --speedup"))?;
    let trace = liminf_record(&x, &f, args.horizon)?;
    let one = Rational::from_integer(1.into());
    let passed = match &args.rho {
        Some(rho) => trace.is_evidence_for(rho),
        None => trace.running_min.0 < one,
    };
    let body = match args.format {
        Format::Csv => trace.to_csv(),
        Format::Json => to_json(&trace)?,
    };
    Ok(Outcome {
        body,
        passed,
        summary: format!("running_min {} after {} indices", trace.running_min.0, args.horizon + 1),
    })
}

#[derive(Subcommand, Debug)]
pub enum ConvertCommand {
    /// Speed-up function to partial translation: g(q) = a_f(n(q))
    ToTranslation {
        #[arg(long)]
        real: String,
        #[arg(long)]
        speedup: String,
        /// Evaluate g at a_0..=a_points
        #[arg(long, default_value_t = 16)]
        points: u64,
        /// Indices searched for n(q)
        #[arg(long, default_value_t = DEFAULT_INDEX_SEARCH)]
        search: u64,
        #[arg(long)]
        gallery: Option<PathBuf>,
    },
    /// Translation to speed-up function: f(i) = least n > i with a_n > g(a_(i+1))
    ToSpeedup {
        #[arg(long)]
        real: String,
        #[arg(long)]
        translation: String,
        #[arg(long, default_value_t = 16)]
        horizon: u64,
        /// Largest index n searched
        #[arg(long, default_value_t = DEFAULT_INDEX_SEARCH)]
        search_cap: u64,
        #[arg(long)]
        gallery: Option<PathBuf>,
    },
    /// Majorizer of k_A to majorizer of p_A (H(0) = g(0), H(n+1) = g(H(n)+1))
    GapToPrincipal {
        #[arg(long)]
        set: String,
        /// shift:k, affine:a:b, square
        #[arg(long)]
        g: String,
        #[arg(long, default_value_t = 100)]
        upto: u64,
    },
    /// Majorizer of p_A to majorizer of k_A (n -> g(n+1))
    PrincipalToGap {
        #[arg(long)]
        set: String,
        #[arg(long)]
        g: String,
        #[arg(long, default_value_t = 100)]
        upto: u64,
    },
}

pub fn convert(cmd: &ConvertCommand) -> Result<Outcome> {
    match cmd {
        ConvertCommand::ToTranslation {
            real,
            speedup,
            points,
            search,
            gallery,
        } => {
            let x = parse_real(real, &gallery_entries(gallery.as_deref())?)?;
            let f = parse_speedup(speedup)?;
            let g = translation_from_speedup(&x, &f, *search);
            let rows: Vec<Value> = (0..=*points)
                .map(|i| {
                    let q = x.approx_at(i);
                    let gq = g.eval(&q).map(jr);
                    json!({ "i": i, "q": jr(q), "g_q": gq })
                })
                .collect();
            let undefined = rows.iter().filter(|r| r["g_q"].is_null()).count();
            Ok(Outcome {
                body: to_json(&json!({ "translation": g.name(), "values": rows }))?,
                passed: undefined == 0,
                summary: format!("{} points, {undefined} undefined", points + 1),
            })
        }
        ConvertCommand::ToSpeedup {
            real,
            translation,
            horizon,
            search_cap,
            gallery,
        } => {
            let x = parse_real(real, &gallery_entries(gallery.as_deref())?)?;
            let g = parse_translation(translation)?;
            let f = speedup_from_translation(&x, &g, *search_cap);
            let mut rows = Vec::new();
            let mut exhausted = 0;
            for i in 0..=*horizon {
                let value = match f.eval(i) {
                    Ok(v) => Some(v),
                    Err(LabError::SearchExhausted { .. }) => {
                        exhausted += 1;
                        None
                    }
                    Err(e) => return Err(e),
                };
                rows.push(json!({ "i": i, "f_i": value }));
            }
            Ok(Outcome {
                body: to_json(&json!({ "speedup": f.name(), "values": rows }))?,
                passed: exhausted == 0,
                summary: format!("{} indices, {exhausted} past the search cap", horizon + 1),
            })
        }
        ConvertCommand::GapToPrincipal { set, g, upto } => {
            let a = parse_set(set)?;
            let g = parse_majorizer(g)?;
            let premise = g.majorizes_gaps_of(&a, *upto)?;
            let mut rows = Vec::new();
            let mut failures = 0;
            for n in 0..=*upto {
                let bound = majorize_p_from_k(&g, n)?;
                let actual = principal(&a, n)?;
                failures += usize::from(bound < actual);
                rows.push(json!({ "n": n, "bound": bound, "p": actual }));
            }
            majorizer_outcome(premise, rows, failures, "H(n) >= p(n)")
        }
        ConvertCommand::PrincipalToGap { set, g, upto } => {
            let a = parse_set(set)?;
            let g = parse_majorizer(g)?;
            let premise = g.majorizes_principal_of(&a, upto.saturating_add(1))?;
            let mut rows = Vec::new();
            let mut failures = 0;
            for n in 0..=*upto {
                let bound = majorize_k_from_p(&g, n);
                let actual = least_beyond(&a, n)?;
                failures += usize::from(bound < actual);
                rows.push(json!({ "n": n, "bound": bound, "k": actual }));
            }
            majorizer_outcome(premise, rows, failures, "g(n+1) >= k(n)")
        }
    }
}

fn majorizer_outcome(premise: bool, rows: Vec<Value>, failures: usize, claim: &str) -> Result<Outcome> {
    let count = rows.len();
    Ok(Outcome {
        body: to_json(&json!({ "premise_holds": premise, "failures": failures, "values": rows }))?,
        passed: failures == 0,
        summary: format!("{claim} fails at {failures} of {count} indices (premise holds: {premise})"),
    })
}

#[derive(Args, Debug)]
pub struct CmmBuildArgs {
    /// Machine file for B
    #[arg(long = "B")]
    pub b: PathBuf,
    /// Total translation: identity, linear:k, contraction:t:s
    #[arg(long, default_value = "identity")]
    pub witness: String,
    #[arg(long, default_value = "1", value_parser = rational_arg)]
    pub c: Rational,
    #[arg(long, value_enum, default_value = "saturate")]
    pub overflow: Overflow,
}

pub fn cmm_build(args: &CmmBuildArgs) -> Result<Outcome> {
    let b = load_machine(&args.b)?;
    let w = TranslationWitness::new(parse_translation(&args.witness)?, args.c.clone(), Variant::Strict)?;
    let policy = match args.overflow {
        Overflow::Saturate => OverflowPolicy::Saturate,
        Overflow::Drop => OverflowPolicy::Drop,
    };
    let a = uniformize(&b, &w, &args.c, policy)?;
    Ok(Outcome {
        body: to_json(&MachineFile::from(&a))?,
        passed: true,
        summary: format!("{} codes, pad length {}", a.len(), pad_length(&args.c)?),
    })
}

#[derive(Args, Debug)]
pub struct CmmCheckArgs {
    /// Machine file to validate
    #[arg(long = "A")]
    pub a: PathBuf,
    /// Machine A was built from; enables the measure check
    #[arg(long = "B")]
    pub b: Option<PathBuf>,
    #[arg(long, requires_all = ["b", "beta"])]
    pub alpha: Option<String>,
    #[arg(long, requires_all = ["b", "alpha"])]
    pub beta: Option<String>,
    /// Additive constant; defaults to the pad length recorded in A
    #[arg(long)]
    pub c: Option<u64>,
    #[arg(long, default_value_t = 16, value_parser = positive)]
    pub n_max: u64,
    #[arg(long)]
    pub gallery: Option<PathBuf>,
}

pub fn cmm_check(args: &CmmCheckArgs) -> Result<Outcome> {
    let a = load_machine(&args.a)?;
    let mut report = json!({
        "name": a.name(),
        "entries": a.len(),
        "measure": jr(a.measure()),
        "pad_length": a.pad_length(),
    });
    let mut passed = true;
    let mut summary = format!("{} is prefix-free with {} codes", a.name(), a.len());
    if let Some(path) = &args.b {
        let b = load_machine(path)?;
        let preserved = measure_preserved(&a, &b);
        passed &= preserved;
        report["measure_B"] = json!(jr(b.measure()));
        report["measure_preserved"] = json!(preserved);
        summary.push_str(&format!("; measure preserved: {preserved}"));
        if let (Some(alpha), Some(beta)) = (&args.alpha, &args.beta) {
            let entries = gallery_entries(args.gallery.as_deref())?;
            let alpha = parse_real(alpha, &entries)?;
            let beta = parse_real(beta, &entries)?;
            let c = match args.c.or(a.pad_length().map(u64::from)) {
                Some(c) => c,
                None => return Err(LabError::config("--c is required when A records no pad length")),
            };
            let usch = check_usch(&a, &b, &alpha, &beta, c, args.n_max)?;
            passed &= usch.passed;
            summary.push_str(&format!("; K_A <= K_B + {c} on {} lengths: {}", usch.checked.len(), usch.passed));
            report["usch"] = serde_json::to_value(&usch)?;
        }
    }
    Ok(Outcome {
        body: to_json(&report)?,
        passed,
        summary,
    })
}
