//! Left-c.e. reals at desk scale.
//!
//! A [`DeskReal`] is a nondecreasing rational sequence together with its exact
//! limit. The limit is an oracle: checkers and reporters read it through
//! [`DeskReal::oracle_limit`], witness constructions never do.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::hyperimmunity::{NaturalSet, SetSpec};
use crate::machines::{MachineFile, PrefixMachine};
use crate::numerics::{pow2, real_from_set, two_pow_neg, Bits, JsonRational, Rational};

type ApproxFn = Arc<dyn Fn(u64) -> Rational + Send + Sync>;

#[derive(Clone)]
pub struct DeskReal {
    name: String,
    approx: ApproxFn,
    limit: Rational,
    settles_at: Option<u64>,
}

impl fmt::Debug for DeskReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DeskReal")
            .field("name", &self.name)
            .field("limit", &self.limit)
            .field("settles_at", &self.settles_at)
            .finish_non_exhaustive()
    }
}

impl DeskReal {
    /// A real from an arbitrary approximation. The caller certifies that
    /// `approx` is nondecreasing, stays strictly below `limit` and converges to it.
    pub fn new(
        name: impl Into<String>,
        limit: Rational,
        approx: impl Fn(u64) -> Rational + Send + Sync + 'static,
    ) -> Self {
        DeskReal {
            name: name.into(),
            approx: Arc::new(approx),
            limit,
            settles_at: None,
        }
    }

    /// `a_n = limit * (1 - ratio^n)`.
    pub fn geometric(name: impl Into<String>, limit: Rational, ratio: Rational) -> Result<Self> {
        if !limit.is_positive() {
            return Err(LabError::config(format!("geometric limit {limit} must be positive")));
        }
        if !ratio.is_positive() || ratio >= Rational::one() {
            return Err(LabError::config(format!("geometric ratio {ratio} must lie in (0,1)")));
        }
        let l = limit.clone();
        Ok(Self::new(name, limit, move |n| {
            &l - &l * pow_rational(&ratio, n)
        }))
    }

    /// `0.A(0)A(1)...` approximated by its bitwise partial sums. Only sets
    /// whose binary value is an exact rational are accepted.
    pub fn from_set(name: impl Into<String>, set: NaturalSet) -> Result<Self> {
        let limit = set.binary_value().cloned().ok_or_else(|| {
            LabError::config(format!(
                "set {} has no exact rational binary value; use a periodic set",
                set.name()
            ))
        })?;
        Ok(Self::new(name, limit, move |n| real_from_set(|i| set.contains(i), n)))
    }

    /// `a_n = limit - G(n)` for a gap schedule `G` strictly decreasing to 0.
    pub fn staircase(name: impl Into<String>, limit: Rational, schedule: GapSchedule) -> Result<Self> {
        schedule.validate()?;
        let l = limit.clone();
        Ok(Self::new(name, limit, move |n| &l - schedule.gap(n)))
    }

    /// Halting probability of a finite prefix-free machine: stage `s` sums
    /// `2^-|x|` over the codes halted by stage `s`. Stages start at 1, so
    /// `a_0 = 0`; from the last halting stage on the approximation equals its limit.
    pub fn omega_toy(name: impl Into<String>, machine: &PrefixMachine, stages: Vec<(Bits, u64)>) -> Result<Self> {
        let mut halting = Vec::with_capacity(stages.len());
        for (code, stage) in stages {
            if !machine.contains_code(&code) {
                return Err(LabError::config(format!("halting stage given for unknown code {code}")));
            }
            if stage == 0 {
                return Err(LabError::config(format!("code {code} halts at stage 0; stages start at 1")));
            }
            halting.push((stage, two_pow_neg(code.len() as u64)));
        }
        if halting.len() != machine.len() {
            return Err(LabError::config("every code of an omega_toy machine needs a halting stage"));
        }
        let limit = machine.measure();
        let settles_at = halting.iter().map(|(s, _)| *s).max().unwrap_or(0);
        let mut real = Self::new(name, limit, move |s| {
            halting
                .iter()
                .filter(|(stage, _)| *stage <= s)
                .map(|(_, w)| w.clone())
                .fold(Rational::zero(), |acc, w| acc + w)
        });
        real.settles_at = Some(settles_at);
        Ok(real)
    }

    /// `r * self`, for `r > 0`.
    pub fn scaled(&self, r: &Rational) -> DeskReal {
        let inner = self.approx.clone();
        let factor = r.clone();
        DeskReal {
            name: format!("{}*({})", r, self.name),
            approx: Arc::new(move |n| &factor * inner(n)),
            limit: r * &self.limit,
            settles_at: self.settles_at,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn approx_at(&self, n: u64) -> Rational {
        (self.approx)(n)
    }

    pub fn oracle_limit(&self) -> &Rational {
        &self.limit
    }

    /// First index at which the approximation equals its limit, for reals
    /// that get there in finitely many steps.
    pub fn settles_at(&self) -> Option<u64> {
        self.settles_at
    }

    /// `limit - a_n`.
    pub fn gap(&self, n: u64) -> Result<Rational> {
        let g = &self.limit - self.approx_at(n);
        if g.is_positive() {
            Ok(g)
        } else {
            Err(LabError::DegenerateApproximation {
                real: self.name.clone(),
                index: n,
            })
        }
    }

    /// Checks monotonicity for `n <= upto` and strictness below the limit
    /// before the settling stage.
    pub fn validate(&self, upto: u64) -> Result<()> {
        let mut prev = self.approx_at(0);
        for n in 0..=upto {
            let next = self.approx_at(n + 1);
            if next < prev {
                return Err(LabError::config(format!(
                    "{}: approximation decreases at index {n}",
                    self.name
                )));
            }
            let before_settling = self.settles_at.is_none_or(|s| n < s);
            if before_settling && prev >= self.limit {
                return Err(LabError::config(format!(
                    "{}: approximation reaches its limit at index {n}",
                    self.name
                )));
            }
            if prev > self.limit {
                return Err(LabError::config(format!(
                    "{}: approximation exceeds its limit at index {n}",
                    self.name
                )));
            }
            prev = next;
        }
        Ok(())
    }
}

fn pow_rational(base: &Rational, n: u64) -> Rational {
    Rational::new(
        num_traits::pow::Pow::pow(base.numer(), n),
        num_traits::pow::Pow::pow(base.denom(), n),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GapSchedule {
    /// `G(0) = start`, `G(n+1) = G(n) * ratios[n mod len]`.
    RatioCycle {
        start: JsonRational,
        ratios: Vec<JsonRational>,
    },
    /// `G(n) = 2^-(2^n)`.
    DoubleExponential,
}

impl GapSchedule {
    pub fn validate(&self) -> Result<()> {
        match self {
            GapSchedule::RatioCycle { start, ratios } => {
                if !start.0.is_positive() {
                    return Err(LabError::config("staircase start gap must be positive"));
                }
                if ratios.is_empty() {
                    return Err(LabError::config("staircase ratio cycle is empty"));
                }
                if let Some(r) = ratios
                    .iter()
                    .find(|r| !r.0.is_positive() || r.0 >= Rational::one())
                {
                    return Err(LabError::config(format!(
                        "staircase ratio {} must lie in (0,1)",
                        r.0
                    )));
                }
                Ok(())
            }
            GapSchedule::DoubleExponential => Ok(()),
        }
    }

    pub fn gap(&self, n: u64) -> Rational {
        match self {
            GapSchedule::RatioCycle { start, ratios } => {
                let k = ratios.len() as u64;
                let cycle = ratios.iter().fold(Rational::one(), |acc, r| acc * &r.0);
                let partial = ratios[..(n % k) as usize]
                    .iter()
                    .fold(Rational::one(), |acc, r| acc * &r.0);
                &start.0 * pow_rational(&cycle, n / k) * partial
            }
            GapSchedule::DoubleExponential => {
                let exponent = 1u64
                    .checked_shl(n as u32)
                    .filter(|_| n < 40)
                    .expect("double-exponential gap beyond index 39 is not representable");
                Rational::new(1.into(), pow2(exponent))
            }
        }
    }
}

/// One entry of a gallery config file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GalleryEntry {
    pub name: String,
    #[serde(flatten)]
    pub kind: GalleryKind,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameters", rename_all = "snake_case")]
pub enum GalleryKind {
    Geometric {
        limit: JsonRational,
        ratio: JsonRational,
    },
    SetReal {
        set: SetSpec,
    },
    Staircase {
        limit: JsonRational,
        schedule: GapSchedule,
    },
    OmegaToy {
        machine: MachineFile,
        /// Halting stage per code; defaults to stages 1, 2, ... in code order.
        #[serde(default)]
        halting: Vec<HaltingStage>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HaltingStage {
    pub code: Bits,
    pub stage: u64,
}

/// How far gallery validation checks monotonicity and strictness.
pub const VALIDATION_RANGE: u64 = 1000;

impl GalleryEntry {
    pub fn build(&self) -> Result<DeskReal> {
        let real = match &self.kind {
            GalleryKind::Geometric { limit, ratio } => {
                DeskReal::geometric(&self.name, limit.0.clone(), ratio.0.clone())?
            }
            GalleryKind::SetReal { set } => DeskReal::from_set(&self.name, set.build()?)?,
            GalleryKind::Staircase { limit, schedule } => {
                DeskReal::staircase(&self.name, limit.0.clone(), schedule.clone())?
            }
            GalleryKind::OmegaToy { machine, halting } => {
                let m = machine.build()?;
                let stages = if halting.is_empty() {
                    m.codes().cloned().zip(1u64..).collect()
                } else {
                    halting.iter().map(|h| (h.code.clone(), h.stage)).collect()
                };
                DeskReal::omega_toy(&self.name, &m, stages)?
            }
        };
        let range = match &self.kind {
            GalleryKind::Staircase {
                schedule: GapSchedule::DoubleExponential,
                ..
            } => 12,
            _ => VALIDATION_RANGE,
        };
        real.validate(range)?;
        Ok(real)
    }
}

pub fn build_gallery(config: &[GalleryEntry]) -> Result<Vec<DeskReal>> {
    config
        .iter()
        .enumerate()
        .map(|(i, entry)| entry.build().map_err(|e| e.at_entry(i)))
        .collect()
}

pub fn parse_gallery(json: &str) -> Result<Vec<GalleryEntry>> {
    Ok(serde_json::from_str(json)?)
}

/// The built-in gallery used by the acceptance suite and the CLI.
pub fn default_gallery_config() -> Vec<GalleryEntry> {
    use crate::numerics::rat;
    let q = |n, d| JsonRational(rat(n, d));
    vec![
        GalleryEntry {
            name: "geometric-half".into(),
            kind: GalleryKind::Geometric {
                limit: q(1, 1),
                ratio: q(1, 2),
            },
        },
        GalleryEntry {
            name: "geometric-third".into(),
            kind: GalleryKind::Geometric {
                limit: q(3, 4),
                ratio: q(1, 3),
            },
        },
        GalleryEntry {
            name: "set-evens".into(),
            kind: GalleryKind::SetReal {
                set: SetSpec::Evens,
            },
        },
        GalleryEntry {
            name: "set-odds".into(),
            kind: GalleryKind::SetReal { set: SetSpec::Odds },
        },
        GalleryEntry {
            name: "staircase-alternating".into(),
            kind: GalleryKind::Staircase {
                limit: q(1, 1),
                schedule: GapSchedule::RatioCycle {
                    start: q(1, 2),
                    ratios: vec![q(1, 2), q(1, 3)],
                },
            },
        },
        GalleryEntry {
            name: "omega-toy".into(),
            kind: GalleryKind::OmegaToy {
                machine: MachineFile::from_pairs("toy", &[("0", "0"), ("10", "1"), ("11", "11")]),
                halting: Vec::new(),
            },
        },
    ]
}

pub fn default_gallery() -> Vec<DeskReal> {
    build_gallery(&default_gallery_config()).expect("built-in gallery is valid")
}
