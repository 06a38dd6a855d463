//! Speed-up functions on approximation indices, translation functions on
//! rationals, and the conversions between the two.
//!
//! A `liminf` cannot be evaluated at desk scale. Everything here reports the
//! running minimum over a finite horizon as evidence. Nothing here
//! concludes that a real is not speedable.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use num_traits::{One, Signed};
use serde::Serialize;

use crate::approximations::DeskReal;
use crate::error::{LabError, Result};
use crate::numerics::{two_pow_neg, JsonRational, Rational};
use crate::reducibility::{Totality, TranslationFn};

/// Default number of indices searched for `n(q)`.
pub const DEFAULT_INDEX_SEARCH: u64 = 1 << 14;

/// Nondecreasing `f` with `n <= f(n)`, checked on every evaluation that goes
/// through [`SpeedUpFn::eval`].
#[derive(Clone)]
pub struct SpeedUpFn {
    name: String,
    eval: Arc<dyn Fn(u64) -> Result<u64> + Send + Sync>,
}

impl fmt::Debug for SpeedUpFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpeedUpFn({})", self.name)
    }
}

impl SpeedUpFn {
    pub fn new(name: impl Into<String>, eval: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Self {
        Self::fallible(name, move |n| Ok(eval(n)))
    }

    fn fallible(name: impl Into<String>, eval: impl Fn(u64) -> Result<u64> + Send + Sync + 'static) -> Self {
        SpeedUpFn {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn identity() -> Self {
        Self::new("n", |n| n)
    }

    /// `n -> k n`, for `k >= 1`.
    pub fn linear(k: u64) -> Result<Self> {
        if k == 0 {
            return Err(LabError::config("linear speed-up needs k >= 1"));
        }
        Ok(Self::new(format!("{k}n"), move |n| n.saturating_mul(k)))
    }

    pub fn shift(k: u64) -> Self {
        Self::new(format!("n+{k}"), move |n| n.saturating_add(k))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, n: u64) -> Result<u64> {
        let v = (self.eval)(n)?;
        if v < n {
            return Err(LabError::Precondition(format!("{}({n}) = {v} < {n}", self.name)));
        }
        Ok(v)
    }

    /// Checks `n <= f(n) <= f(n+1)` for all `n < upto`.
    pub fn validate(&self, upto: u64) -> Result<()> {
        let mut prev = self.eval(0)?;
        for n in 1..=upto {
            let v = self.eval(n)?;
            if v < prev {
                return Err(LabError::Precondition(format!(
                    "{} decreases between {} and {n}",
                    self.name,
                    n - 1
                )));
            }
            prev = v;
        }
        Ok(())
    }
}

/// `(alpha - a_f(n)) / (alpha - a_n)`.
pub fn ratio(x: &DeskReal, f: &SpeedUpFn, n: u64) -> Result<Rational> {
    let denominator = x.gap(n)?;
    let numerator = x.oracle_limit() - x.approx_at(f.eval(n)?);
    Ok(numerator / denominator)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub n: u64,
    pub ratio: JsonRational,
    /// Minimum over this and all earlier entries.
    pub running_min: JsonRational,
}

/// Ratios at strictly increasing indices with their running minimum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatioTrace {
    pub entries: Vec<TraceEntry>,
    pub running_min: JsonRational,
}

impl RatioTrace {
    fn from_ratios(ratios: impl IntoIterator<Item = (u64, Rational)>) -> Option<Self> {
        let mut entries = Vec::new();
        let mut min: Option<Rational> = None;
        for (n, r) in ratios {
            let m = match min {
                Some(m) if m <= r => m,
                _ => r.clone(),
            };
            entries.push(TraceEntry {
                n,
                ratio: r.into(),
                running_min: m.clone().into(),
            });
            min = Some(m);
        }
        min.map(|m| RatioTrace {
            entries,
            running_min: m.into(),
        })
    }

    /// Finite-horizon evidence of `rho`-speedability: the running minimum is at most `rho`.
    pub fn is_evidence_for(&self, rho: &Rational) -> bool {
        &self.running_min.0 <= rho
    }

    /// Rows `n,ratio_num,ratio_den,running_min_num,running_min_den`, with a header line.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "n,ratio_num,ratio_den,running_min_num,running_min_den")?;
        for e in &self.entries {
            writeln!(
                out,
                "{},{},{},{},{}",
                e.n,
                e.ratio.0.numer(),
                e.ratio.0.denom(),
                e.running_min.0.numer(),
                e.running_min.0.denom()
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is ascii")
    }
}

/// Ratios for `n = 0..=horizon` with their running minimum.
pub fn liminf_record(x: &DeskReal, f: &SpeedUpFn, horizon: u64) -> Result<RatioTrace> {
    if horizon == 0 {
        return Err(LabError::Precondition("horizon must be at least 1".into()));
    }
    let ratios = (0..=horizon)
        .map(|n| ratio(x, f, n).map(|r| (n, r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RatioTrace::from_ratios(ratios).expect("horizon yields entries"))
}

/// `g(q) = a_f(n(q))` where `n(q)` is the least `i` with `q <= a_i`.
///
/// The search for `n(q)` runs over the approximation only; inputs it does
/// not resolve within `search` indices are treated as divergent. That
/// covers every `q >= alpha`.
pub fn translation_from_speedup(x: &DeskReal, f: &SpeedUpFn, search: u64) -> TranslationFn {
    let real = x.clone();
    let speed = f.clone();
    TranslationFn::partial(format!("a_{}(n(q))", f.name()), move |q| {
        let index = (0..=search).find(|&i| q <= &real.approx_at(i))?;
        speed.eval(index).ok().map(|m| real.approx_at(m))
    })
}

/// `f(i)` = least `n > i` with `g(a_{i+1}) < a_n`, searching `n <= search_cap`.
pub fn speedup_from_translation(x: &DeskReal, g: &TranslationFn, search_cap: u64) -> SpeedUpFn {
    let real = x.clone();
    let translation = g.clone();
    SpeedUpFn::fallible(format!("speedup({})", g.name()), move |i| {
        let target = translation.eval(&real.approx_at(i + 1)).ok_or_else(|| {
            LabError::Precondition(format!("{} undefined at a_{}", translation.name(), i + 1))
        })?;
        (i + 1..=search_cap)
            .find(|&n| real.approx_at(n) > target)
            .ok_or(LabError::SearchExhausted { index: i, cap: search_cap })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeFailure {
    Undefined,
    NotAboveProbe,
    NotBelowAlpha,
    NotMonotone,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeViolation {
    pub q: JsonRational,
    pub failure: ProbeFailure,
    pub g_q: Option<JsonRational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Evidence,
    NoEvidence,
    InvariantViolation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TotalSpeedupReport {
    pub verdict: Verdict,
    pub rho: JsonRational,
    pub probes_checked: u64,
    pub skipped: u64,
    pub violations: Vec<ProbeViolation>,
    /// Entries are indexed by the position of the probe in increasing order.
    pub trace: Option<RatioTrace>,
    pub probes: Vec<JsonRational>,
}

/// Default probes: `a_0..=a_horizon` plus `a_0 + (alpha - a_0)(1 - 2^-k)` for `k = 1..=horizon`.
pub fn default_probes(x: &DeskReal, horizon: u64) -> Vec<Rational> {
    let a0 = x.approx_at(0);
    let span = x.oracle_limit() - &a0;
    let mut probes: Vec<Rational> = (0..=horizon).map(|i| x.approx_at(i)).collect();
    probes.extend((1..=horizon).map(|k| &a0 + &span * (Rational::one() - two_pow_neg(k))));
    probes
}

/// Validates a total speed-up function on the probes and the approximation
/// points `a_0..=a_horizon`, then records `(alpha - g(q)) / (alpha - q)`.
pub fn check_total_speedup(
    x: &DeskReal,
    g: &TranslationFn,
    rho: &Rational,
    horizon: u64,
    probes: &[Rational],
) -> Result<TotalSpeedupReport> {
    if g.totality() != Totality::Total {
        return Err(LabError::Precondition("total speed-up check needs a total function".into()));
    }
    if !rho.is_positive() || rho >= &Rational::one() {
        return Err(LabError::config(format!("rho = {rho} must lie in (0,1)")));
    }
    if horizon == 0 {
        return Err(LabError::Precondition("horizon must be at least 1".into()));
    }
    let alpha = x.oracle_limit();
    let mut points: Vec<Rational> = probes.to_vec();
    points.extend((0..=horizon).map(|i| x.approx_at(i)));
    let total = points.len() as u64;
    points.retain(|q| q < alpha);
    let skipped = total - points.len() as u64;
    points.sort();
    points.dedup();

    let mut violations = Vec::new();
    let mut ratios = Vec::with_capacity(points.len());
    let mut prev: Option<Rational> = None;
    for (pos, q) in points.iter().enumerate() {
        let Some(v) = g.eval(q) else {
            violations.push(ProbeViolation {
                q: q.clone().into(),
                failure: ProbeFailure::Undefined,
                g_q: None,
            });
            continue;
        };
        let failure = if &v <= q {
            Some(ProbeFailure::NotAboveProbe)
        } else if &v >= alpha {
            Some(ProbeFailure::NotBelowAlpha)
        } else if prev.as_ref().is_some_and(|p| &v < p) {
            Some(ProbeFailure::NotMonotone)
        } else {
            None
        };
        if let Some(failure) = failure {
            violations.push(ProbeViolation {
                q: q.clone().into(),
                failure,
                g_q: Some(v.clone().into()),
            });
        }
        ratios.push((pos as u64, (alpha - &v) / (alpha - q)));
        prev = Some(v);
    }
    let trace = RatioTrace::from_ratios(ratios);
    let verdict = if !violations.is_empty() {
        Verdict::InvariantViolation
    } else if trace.as_ref().is_some_and(|t| t.is_evidence_for(rho)) {
        Verdict::Evidence
    } else {
        Verdict::NoEvidence
    };
    Ok(TotalSpeedupReport {
        verdict,
        rho: rho.clone().into(),
        probes_checked: points.len() as u64,
        skipped,
        violations,
        trace,
        probes: points.into_iter().map(JsonRational).collect(),
    })
}

/// `k`-fold composition `g ∘ ... ∘ g`.
pub fn amplify(g: &TranslationFn, k: u32) -> Result<TranslationFn> {
    if k == 0 {
        return Err(LabError::Precondition("amplification needs k >= 1".into()));
    }
    let base = g.clone();
    let name = format!("{}^{k}", g.name());
    let step = move |q: &Rational| -> Option<Rational> {
        let mut v = q.clone();
        for _ in 0..k {
            v = base.eval(&v)?;
        }
        Some(v)
    };
    Ok(match g.totality() {
        Totality::Total => TranslationFn::total(name, move |q| step(q).expect("total map")),
        Totality::Partial => TranslationFn::partial(name, step),
    })
}
