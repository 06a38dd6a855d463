//! Parsing of the short `kind:arg:arg` specs accepted on the command line.

use std::fs;
use std::path::Path;

use lce_lab::approximations::{build_gallery, default_gallery_config, parse_gallery, DeskReal, GalleryEntry};
use lce_lab::hyperimmunity::{MonotoneFn, NaturalSet};
use lce_lab::machines::{MachineFile, PrefixMachine};
use lce_lab::numerics::{parse_rational, rat};
use lce_lab::reducibility::{
    computable_least_witness, scaling_witness, Direction, TranslationFn, TranslationWitness, Variant,
};
use lce_lab::speedability::SpeedUpFn;
use lce_lab::{LabError, Rational, Result};

fn usage(msg: impl Into<String>) -> LabError {
    LabError::config(msg)
}

fn parse_u64(s: &str, what: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| usage(format!("{what}: {s:?} is not a natural number")))
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| LabError::Parse(format!("{}: {e}", path.display())))
}

pub fn load_machine(path: &Path) -> Result<PrefixMachine> {
    MachineFile::parse(&read_file(path)?)
}

/// Gallery entries from a config file, or the built-in gallery.
pub fn gallery_entries(config: Option<&Path>) -> Result<Vec<GalleryEntry>> {
    match config {
        Some(path) => parse_gallery(&read_file(path)?),
        None => Ok(default_gallery_config()),
    }
}

/// `geometric:L[:r]`, `set:evens|odds|naturals`, the name of a gallery
/// entry, or `scaled:r:SPEC` for `r` times another real.
pub fn parse_real(spec: &str, gallery: &[GalleryEntry]) -> Result<DeskReal> {
    if let Some(rest) = spec.strip_prefix("scaled:") {
        let (r, inner) = rest
            .split_once(':')
            .ok_or_else(|| usage(format!("cannot parse real {spec:?}")))?;
        let r = parse_rational(r)?;
        if r <= Rational::from_integer(0.into()) {
            return Err(usage(format!("scaling factor {r} must be positive")));
        }
        return Ok(parse_real(inner, gallery)?.scaled(&r));
    }
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["geometric", limit] => DeskReal::geometric(spec, parse_rational(limit)?, rat(1, 2)),
        ["geometric", limit, ratio] => DeskReal::geometric(spec, parse_rational(limit)?, parse_rational(ratio)?),
        ["set", name] => {
            let set = match *name {
                "evens" => NaturalSet::evens(),
                "odds" => NaturalSet::odds(),
                "naturals" => NaturalSet::naturals(),
                other => return Err(usage(format!("unknown set {other:?} (evens, odds, naturals)"))),
            };
            DeskReal::from_set(spec, set)
        }
        [name] => match gallery.iter().find(|e| e.name == *name) {
            Some(entry) => build_gallery(std::slice::from_ref(entry)).map(|mut v| v.remove(0)),
            None => Err(usage(format!("unknown real {name:?}"))),
        },
        _ => Err(usage(format!("cannot parse real {spec:?}"))),
    }
}

/// `identity`, `linear:k`, `contraction:t:s`.
pub fn parse_translation(spec: &str) -> Result<TranslationFn> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["identity"] => Ok(TranslationFn::identity()),
        ["linear", k] => Ok(TranslationFn::linear(parse_rational(k)?)),
        ["contraction", t, s] => Ok(TranslationFn::affine_contraction(parse_rational(t)?, parse_rational(s)?)),
        _ => Err(usage(format!(
            "unknown translation {spec:?} (identity, linear:k, contraction:t:s)"
        ))),
    }
}

/// A witness from the registry. `scaling:r:forward|backward` brings its own
/// constant and `least` its own variant; `c` and `variant` override them.
pub fn parse_witness(
    spec: &str,
    alpha: &DeskReal,
    c: Option<&Rational>,
    variant: Option<Variant>,
) -> Result<TranslationWitness> {
    let parts: Vec<&str> = spec.split(':').collect();
    let base = match parts.as_slice() {
        ["scaling", r, dir] => {
            let direction = match *dir {
                "forward" => Direction::Forward,
                "backward" => Direction::Backward,
                other => return Err(usage(format!("unknown direction {other:?} (forward, backward)"))),
            };
            scaling_witness(&parse_rational(r)?, direction)?
        }
        ["least"] => computable_least_witness(alpha)?,
        _ => TranslationWitness::new(parse_translation(spec)?, Rational::from_integer(1.into()), Variant::Strict)?,
    };
    let with_c = match c {
        Some(c) => base.with_constant(c.clone())?,
        None => base,
    };
    Ok(match variant {
        Some(v) if v != with_c.variant() => {
            TranslationWitness::new(with_c.translation().clone(), with_c.constant().clone(), v)?
        }
        _ => with_c,
    })
}

/// `identity`, `linear:k`, `shift:k`.
pub fn parse_speedup(spec: &str) -> Result<SpeedUpFn> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["identity"] => Ok(SpeedUpFn::identity()),
        ["linear", k] => SpeedUpFn::linear(parse_u64(k, "linear factor")?),
        ["shift", k] => Ok(SpeedUpFn::shift(parse_u64(k, "shift")?)),
        _ => Err(usage(format!("unknown speed-up {spec:?} (identity, linear:k, shift:k)"))),
    }
}

/// `evens`, `odds`, `naturals`, `squares`, `powers`.
pub fn parse_set(spec: &str) -> Result<NaturalSet> {
    Ok(match spec {
        "evens" => NaturalSet::evens(),
        "odds" => NaturalSet::odds(),
        "naturals" => NaturalSet::naturals(),
        "squares" => NaturalSet::squares(),
        "powers" => NaturalSet::powers_of_two(),
        other => return Err(usage(format!("unknown set {other:?}"))),
    })
}

/// `shift:k`, `affine:a:b`, `square`.
pub fn parse_majorizer(spec: &str) -> Result<MonotoneFn> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["shift", k] => Ok(MonotoneFn::shift(parse_u64(k, "shift")?)),
        ["affine", a, b] => Ok(MonotoneFn::affine(parse_u64(a, "slope")?, parse_u64(b, "offset")?)),
        ["square"] => Ok(MonotoneFn::square_plus_one()),
        _ => Err(usage(format!("unknown majorizer {spec:?} (shift:k, affine:a:b, square)"))),
    }
}
