//! Finite prefix-free machines, their Kraft measure and machine complexity,
//! and the pad construction that turns a machine for `beta` into one for
//! `alpha` given a total Solovay witness.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::approximations::DeskReal;
use crate::error::{LabError, Result};
use crate::numerics::{ceil_log2, truncate, two_pow_neg, Bits, Rational};
use crate::reducibility::{Totality, TranslationWitness};

/// Finite map from codes to outputs with prefix-free domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixMachine {
    name: String,
    pad_length: Option<u32>,
    table: BTreeMap<Bits, Bits>,
}

impl PrefixMachine {
    pub fn new(name: impl Into<String>, entries: impl IntoIterator<Item = (Bits, Bits)>) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (code, output) in entries {
            if table.contains_key(&code) {
                return Err(LabError::DuplicateCode(code.to_string()));
            }
            table.insert(code, output);
        }
        // in lexicographic order a proper prefix is immediately followed by an extension of it
        let codes: Vec<&Bits> = table.keys().collect();
        for pair in codes.windows(2) {
            if pair[0].is_proper_prefix_of(pair[1]) {
                return Err(LabError::PrefixViolation {
                    prefix: pair[0].to_string(),
                    extension: pair[1].to_string(),
                });
            }
        }
        Ok(PrefixMachine {
            name: name.into(),
            pad_length: None,
            table,
        })
    }

    pub fn from_pairs(name: &str, pairs: &[(&str, &str)]) -> Result<Self> {
        let entries = pairs
            .iter()
            .map(|(c, o)| Ok((c.parse()?, o.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, entries)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pad_length(&self) -> Option<u32> {
        self.pad_length
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn codes(&self) -> impl Iterator<Item = &Bits> {
        self.table.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Bits, &Bits)> {
        self.table.iter()
    }

    pub fn contains_code(&self, code: &Bits) -> bool {
        self.table.contains_key(code)
    }

    pub fn run(&self, code: &Bits) -> Option<&Bits> {
        self.table.get(code)
    }

    /// The machine with one code removed.
    pub fn without(&self, code: &Bits) -> PrefixMachine {
        let mut m = self.clone();
        m.table.remove(code);
        m
    }

    /// Kraft sum `sum_{x in dom} 2^-|x|`.
    pub fn measure(&self) -> Rational {
        self.table
            .keys()
            .map(|x| two_pow_neg(x.len() as u64))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// `K_M(tau)`: length of a shortest code producing `tau`, `None` when `tau` is not an output.
    pub fn complexity(&self, tau: &Bits) -> Option<u64> {
        self.table
            .iter()
            .filter(|(_, out)| *out == tau)
            .map(|(code, _)| code.len() as u64)
            .min()
    }
}

/// JSON form of a machine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pad_length: Option<u32>,
    pub entries: Vec<MachineEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineEntry {
    pub code: Bits,
    pub output: Bits,
}

impl MachineFile {
    pub fn from_pairs(name: &str, pairs: &[(&str, &str)]) -> Self {
        MachineFile {
            name: name.into(),
            pad_length: None,
            entries: pairs
                .iter()
                .map(|(c, o)| MachineEntry {
                    code: c.parse().expect("binary code"),
                    output: o.parse().expect("binary output"),
                })
                .collect(),
        }
    }

    pub fn build(&self) -> Result<PrefixMachine> {
        let mut m = PrefixMachine::new(
            &self.name,
            self.entries.iter().map(|e| (e.code.clone(), e.output.clone())),
        )?;
        m.pad_length = self.pad_length;
        Ok(m)
    }

    pub fn parse(json: &str) -> Result<PrefixMachine> {
        serde_json::from_str::<MachineFile>(json)?.build()
    }
}

impl From<&PrefixMachine> for MachineFile {
    fn from(m: &PrefixMachine) -> Self {
        MachineFile {
            name: m.name.clone(),
            pad_length: m.pad_length,
            entries: m
                .table
                .iter()
                .map(|(code, output)| MachineEntry {
                    code: code.clone(),
                    output: output.clone(),
                })
                .collect(),
        }
    }
}

/// What to do with a pad whose output would not fit in `n` bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OverflowPolicy {
    /// Output `1^n`; keeps every pad in the domain so the measure is preserved.
    #[default]
    Saturate,
    /// Leave the code undefined.
    Drop,
}

/// `ceil(log2(c + 1))`.
pub fn pad_length(c: &Rational) -> Result<u32> {
    if !c.is_positive() {
        return Err(LabError::config(format!("constant {c} must be positive")));
    }
    Ok(ceil_log2(&(c + Rational::one()))?.max(0) as u32)
}

/// Builds `A` from `B`: for `sigma = B(x)` with `n = |sigma|` and `tau` the
/// first `n` bits of `f(0.sigma)`, each code `x w` (`|w| = L`) outputs the
/// `n`-bit `y` with `0.y = 0.tau + int(w) 2^-n`.
pub fn uniformize(
    b: &PrefixMachine,
    w: &TranslationWitness,
    c: &Rational,
    overflow: OverflowPolicy,
) -> Result<PrefixMachine> {
    if w.translation().totality() != Totality::Total {
        return Err(LabError::Precondition("uniformize needs a total witness".into()));
    }
    let l = pad_length(c)?;
    let pads: Vec<Bits> = Bits::all_of_length(l as usize).collect();
    let mut entries = Vec::with_capacity(b.len() * pads.len());
    for (x, sigma) in &b.table {
        let n = sigma.len();
        let f = w
            .translation()
            .eval(&sigma.fraction_value())
            .expect("total witness is defined everywhere");
        let tau = truncate(&f, n as u64).map_err(|_| LabError::Construction {
            code: x.to_string(),
            value: f.clone(),
        })?;
        let base = tau.bits.to_uint();
        let top = BigUint::one() << n;
        for pad in &pads {
            let y = &base + pad.to_uint();
            let output = if y < top {
                Bits::from_uint(&y, n)
            } else {
                match overflow {
                    OverflowPolicy::Saturate => Bits::new(vec![true; n]),
                    OverflowPolicy::Drop => continue,
                }
            };
            entries.push((x.concat(pad), output));
        }
    }
    let mut a = PrefixMachine::new(format!("uniformized({})", b.name), entries)?;
    a.pad_length = Some(l);
    Ok(a)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LengthCheck {
    pub n: u64,
    pub k_b: u64,
    /// `None` when `A` has no code for `alpha` cut to `n` bits.
    pub k_a: Option<u64>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UschReport {
    pub constant: u64,
    pub n_max: u64,
    pub checked: Vec<LengthCheck>,
    pub first_failure: Option<u64>,
    pub passed: bool,
}

/// Checks `K_A(alpha|n) <= K_B(beta|n) + c` for every `n <= n_max` at
/// which `B` codes `beta|n`.
pub fn check_usch(
    a: &PrefixMachine,
    b: &PrefixMachine,
    alpha: &DeskReal,
    beta: &DeskReal,
    c: u64,
    n_max: u64,
) -> Result<UschReport> {
    if n_max == 0 {
        return Err(LabError::Precondition("n_max must be at least 1".into()));
    }
    let mut checked = Vec::new();
    for n in 0..=n_max {
        let beta_cut = truncate(beta.oracle_limit(), n)?.bits;
        let Some(k_b) = b.complexity(&beta_cut) else {
            continue;
        };
        let alpha_cut = truncate(alpha.oracle_limit(), n)?.bits;
        let k_a = a.complexity(&alpha_cut);
        let ok = k_a.is_some_and(|k| k <= k_b + c);
        checked.push(LengthCheck { n, k_b, k_a, ok });
    }
    let first_failure = checked.iter().find(|l| !l.ok).map(|l| l.n);
    Ok(UschReport {
        constant: c,
        n_max,
        passed: first_failure.is_none(),
        checked,
        first_failure,
    })
}

/// Whether `A`'s domain has exactly `B`'s measure.
pub fn measure_preserved(a: &PrefixMachine, b: &PrefixMachine) -> bool {
    a.measure() == b.measure()
}

/// Integer part of `(alpha|n - 0.tau) 2^n`, the pad index that recovers `alpha|n`.
pub fn pad_index(alpha_cut: &Bits, tau: &Bits) -> Option<BigInt> {
    let d = BigInt::from(alpha_cut.to_uint()) - BigInt::from(tau.to_uint());
    (!d.is_negative()).then_some(d)
}
