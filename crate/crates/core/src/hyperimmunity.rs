//! Principal and gap functions of sets of naturals, the majorizer
//! conversions between them, and both directions of the criterion linking
//! total Solovay reductions from a computable set-real to the growth of
//! the target set's gap function.

use std::fmt;
use std::sync::Arc;

use num_integer::Roots;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approximations::DeskReal;
use crate::error::{LabError, Result};
use crate::numerics::{ceil_log2, effective_length, real_from_set, two_pow_neg, Bits, Rational};
use crate::reducibility::{Totality, TranslationFn, TranslationWitness, Variant};

/// Truncation precision used to extend dyadic-only witnesses to all rationals.
pub const DEFAULT_PRECISION: u64 = 64;

type Membership = Arc<dyn Fn(u64) -> bool + Send + Sync>;
type Certificate = Arc<dyn Fn(u64) -> Option<u64> + Send + Sync>;

/// A decidable set of naturals. The certificate maps `n` to the least member
/// `>= n`, or `None` past the last one.
#[derive(Clone)]
pub struct NaturalSet {
    name: String,
    member: Membership,
    certificate: Certificate,
    binary_value: Option<Rational>,
}

impl fmt::Debug for NaturalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NaturalSet")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

impl NaturalSet {
    pub fn new(
        name: impl Into<String>,
        member: impl Fn(u64) -> bool + Send + Sync + 'static,
        certificate: impl Fn(u64) -> Option<u64> + Send + Sync + 'static,
    ) -> Self {
        NaturalSet {
            name: name.into(),
            member: Arc::new(member),
            certificate: Arc::new(certificate),
            binary_value: None,
        }
    }

    /// `{ n : n mod period in residues }`. Its binary value is rational.
    pub fn periodic(name: impl Into<String>, period: u64, residues: &[u64]) -> Result<Self> {
        if period == 0 || period > 64 {
            return Err(LabError::config(format!("period {period} must lie in 1..=64")));
        }
        let mut mask = 0u64;
        for &r in residues {
            if r >= period {
                return Err(LabError::config(format!("residue {r} not below period {period}")));
            }
            mask |= 1 << r;
        }
        if mask == 0 {
            return Err(LabError::config("periodic set without residues is empty"));
        }
        // sum_{r in R} 2^-(r+1) / (1 - 2^-period)
        let head = residues
            .iter()
            .map(|&r| two_pow_neg(r + 1))
            .fold(Rational::zero(), |a, b| a + b);
        let value = head / (Rational::one() - two_pow_neg(period));
        let is_member = move |n: u64| mask >> (n % period) & 1 == 1;
        let mut set = Self::new(name, is_member, move |n| (n..n.saturating_add(period)).find(|&m| is_member(m)));
        set.binary_value = Some(value);
        Ok(set)
    }

    pub fn evens() -> Self {
        Self::periodic("evens", 2, &[0]).expect("valid period")
    }

    pub fn odds() -> Self {
        Self::periodic("odds", 2, &[1]).expect("valid period")
    }

    pub fn naturals() -> Self {
        Self::periodic("naturals", 1, &[0]).expect("valid period")
    }

    pub fn squares() -> Self {
        Self::new(
            "squares",
            |n| {
                let r = n.sqrt();
                r * r == n
            },
            |n| {
                let r = n.sqrt();
                if r * r == n {
                    Some(n)
                } else {
                    (r + 1).checked_mul(r + 1)
                }
            },
        )
    }

    pub fn powers_of_two() -> Self {
        Self::new("powers", |n| n.is_power_of_two(), |n| n.max(1).checked_next_power_of_two())
    }

    /// A finite set; its gap function is undefined past the largest element.
    pub fn explicit(elements: &[u64]) -> Self {
        let mut sorted = elements.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let lookup = sorted.clone();
        Self::new(
            "explicit",
            move |n| lookup.binary_search(&n).is_ok(),
            move |n| sorted.iter().copied().find(|&m| m >= n),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn contains(&self, n: u64) -> bool {
        (self.member)(n)
    }

    /// `0.A(0)A(1)...` when it is an exactly known rational.
    pub fn binary_value(&self) -> Option<&Rational> {
        self.binary_value.as_ref()
    }
}

/// Set description as it appears in config files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetSpec {
    Evens,
    Odds,
    Naturals,
    Squares,
    Powers,
    Periodic { period: u64, residues: Vec<u64> },
    Explicit { elements: Vec<u64> },
}

impl SetSpec {
    pub fn build(&self) -> Result<NaturalSet> {
        Ok(match self {
            SetSpec::Evens => NaturalSet::evens(),
            SetSpec::Odds => NaturalSet::odds(),
            SetSpec::Naturals => NaturalSet::naturals(),
            SetSpec::Squares => NaturalSet::squares(),
            SetSpec::Powers => NaturalSet::powers_of_two(),
            SetSpec::Periodic { period, residues } => {
                NaturalSet::periodic(format!("periodic({period})"), *period, residues)?
            }
            SetSpec::Explicit { elements } => NaturalSet::explicit(elements),
        })
    }
}

/// `k_A(n)`: least member of `A` that is `>= n`.
pub fn least_beyond(set: &NaturalSet, n: u64) -> Result<u64> {
    let bound = (set.certificate)(n).ok_or_else(|| LabError::FiniteSet {
        set: set.name.clone(),
        from: n,
    })?;
    debug_assert!(bound >= n && set.contains(bound));
    debug_assert!(bound - n > 4096 || (n..bound).all(|m| !set.contains(m)));
    Ok(bound)
}

/// `p_A(n)`: the `(n+1)`-st smallest member of `A`.
pub fn principal(set: &NaturalSet, n: u64) -> Result<u64> {
    let mut p = least_beyond(set, 0)?;
    for _ in 0..n {
        p = least_beyond(set, next_candidate(set, p)?)?;
    }
    Ok(p)
}

fn next_candidate(set: &NaturalSet, p: u64) -> Result<u64> {
    p.checked_add(1).ok_or_else(|| LabError::FiniteSet {
        set: set.name.clone(),
        from: p,
    })
}

/// A total function on naturals, used as a candidate majorizer.
#[derive(Clone)]
pub struct MonotoneFn {
    name: String,
    eval: Arc<dyn Fn(u64) -> u64 + Send + Sync>,
}

impl fmt::Debug for MonotoneFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonotoneFn({})", self.name)
    }
}

impl MonotoneFn {
    pub fn new(name: impl Into<String>, eval: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Self {
        MonotoneFn {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn identity() -> Self {
        Self::new("n", |n| n)
    }

    pub fn shift(k: u64) -> Self {
        Self::new(format!("n+{k}"), move |n| n.saturating_add(k))
    }

    /// `a*n + b`.
    pub fn affine(a: u64, b: u64) -> Self {
        Self::new(format!("{a}n+{b}"), move |n| n.saturating_mul(a).saturating_add(b))
    }

    pub fn square_plus_one() -> Self {
        Self::new("n^2+1", |n| n.saturating_mul(n).saturating_add(1))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, n: u64) -> u64 {
        (self.eval)(n)
    }

    /// Whether `self(n) >= k_A(n)` for every `n <= upto`.
    pub fn majorizes_gaps_of(&self, set: &NaturalSet, upto: u64) -> Result<bool> {
        for n in 0..=upto {
            if self.eval(n) < least_beyond(set, n)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether `self(n) >= p_A(n)` for every `n <= upto`.
    pub fn majorizes_principal_of(&self, set: &NaturalSet, upto: u64) -> Result<bool> {
        let mut p = least_beyond(set, 0)?;
        for n in 0..=upto {
            if n > 0 {
                p = least_beyond(set, next_candidate(set, p)?)?;
            }
            if self.eval(n) < p {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check_step(&self, x: u64) -> Result<u64> {
        let here = self.eval(x);
        if x < u64::MAX && self.eval(x + 1) < here {
            return Err(LabError::Precondition(format!(
                "{} is not nondecreasing at {x}",
                self.name
            )));
        }
        Ok(here)
    }
}

/// The literal `n`-fold iterate `g(g(...g(0)...))`.
///
/// This does not majorize `p_A` in general: any `g` with `g(0) = 0` is
/// stuck at 0. See [`majorize_p_from_k`] for a majorizer that is.
pub fn iterate_at_zero(g: &MonotoneFn, n: u64) -> Result<u64> {
    let mut x = 0;
    for _ in 0..n {
        x = g.check_step(x)?;
    }
    Ok(x)
}

/// Majorizer of `p_A` built from a nondecreasing majorizer `g` of `k_A`:
/// `H(0) = g(0)`, `H(n+1) = g(H(n) + 1)`.
///
/// Since `p_A(0) = k_A(0)` and `p_A(n+1) = k_A(p_A(n) + 1)`, induction with
/// the monotonicity of `g` gives `H(n) >= p_A(n)`.
pub fn majorize_p_from_k(g: &MonotoneFn, n: u64) -> Result<u64> {
    let mut h = g.check_step(0)?;
    for _ in 0..n {
        h = g.check_step(h.saturating_add(1))?;
    }
    Ok(h)
}

/// `g(n+1)`, which majorizes `k_A(n)` whenever `g` majorizes `p_A`.
pub fn majorize_k_from_p(g: &MonotoneFn, n: u64) -> u64 {
    g.eval(n + 1)
}

/// Total witness for `0.A <=_S^tot 0.B` with constant 1, given a
/// nondecreasing `g` majorizing `k_B`:
/// `f(q) = 0.A(0)...A(g(|q|))`, the first `g(|q|) + 1` bits of `0.A`.
///
/// `f(q)` stays strictly below `0.A` as long as `A` is infinite, and
/// `0.A - f(q) < 2^-(g(|q|)+1) <= 2^-(k_B(|q|)+1) <= 0.B - q` for every
/// dyadic `q < 0.B`. Non-dyadic inputs are charged the length of their
/// truncation at `precision` bits.
pub fn total_witness_from_majorizer(a: &NaturalSet, g: &MonotoneFn, precision: u64) -> TranslationWitness {
    let set = a.clone();
    let depth = g.clone();
    let name = format!("bits of 0.{} to depth {}(|q|)+1", a.name(), g.name());
    let f = TranslationFn::total(name, move |q: &Rational| {
        let n = depth.eval(effective_length(q, precision)).saturating_add(1);
        real_from_set(|i| set.contains(i), n)
    });
    TranslationWitness::new(f, Rational::one(), Variant::Strict).expect("constant 1 is positive")
}

/// Default `d` for [`k_bound_from_witness`]: `max(ceil(log2 c), 0) + 1`.
pub fn default_offset(constant: &Rational) -> Result<u64> {
    Ok(ceil_log2(constant)?.max(0) as u64 + 1)
}

/// Computable upper bound for `k_B(n)` extracted from a witness of
/// `alpha <=_S^tot 0.B`: with `m(n)` the least positive `alpha - f(0.sigma)`
/// over all `sigma` of length `n`, returns `d + ceil(log2(1/m(n)))`.
pub fn k_bound_from_witness(w: &TranslationWitness, alpha: &DeskReal, n: u32, d: u64) -> Result<u64> {
    if w.translation().totality() != Totality::Total {
        return Err(LabError::Precondition("k-bound extraction needs a total witness".into()));
    }
    if n >= 28 {
        return Err(LabError::Precondition(format!("2^{n} strings is beyond desk scale")));
    }
    let a = alpha.oracle_limit();
    let min_positive = (0u64..(1u64 << n))
        .into_par_iter()
        .filter_map(|k| {
            let q = Bits::from_uint(&k.into(), n as usize).fraction_value();
            w.translation()
                .eval(&q)
                .map(|v| a - v)
                .filter(|diff| diff.is_positive())
        })
        .min()
        .ok_or(LabError::WitnessDegenerate { length: n })?;
    let log = ceil_log2(&min_positive.recip())?;
    Ok((d as i64 + log).max(0) as u64)
}
