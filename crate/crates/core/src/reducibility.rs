//! Translation-function witnesses for Solovay, total Solovay and weakened
//! total Solovay reducibility, checked pointwise and exactly on finite
//! sample sets.
//!
//! A check never proves `alpha <= beta`; a passing report only says that no
//! violation was found among the samples.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::approximations::DeskReal;
use crate::error::{LabError, Result};
use crate::numerics::{dyadic_length, effective_length, pow2, truncate, two_pow_neg, JsonRational, Rational};
use crate::hyperimmunity::DEFAULT_PRECISION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Totality {
    Partial,
    Total,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `alpha - f(q) < c (beta - q)`
    Strict,
    /// `alpha - f(q) < c (beta - q) + 2^-|q|`, dyadic `q` only
    Weakened,
}

type RationalMap = Arc<dyn Fn(&Rational) -> Option<Rational> + Send + Sync>;

/// A (partial or total) function from rationals to rationals. `None` models
/// divergence.
#[derive(Clone)]
pub struct TranslationFn {
    name: String,
    map: RationalMap,
    totality: Totality,
}

impl fmt::Debug for TranslationFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TranslationFn({}, {:?})", self.name, self.totality)
    }
}

impl TranslationFn {
    pub fn partial(
        name: impl Into<String>,
        map: impl Fn(&Rational) -> Option<Rational> + Send + Sync + 'static,
    ) -> Self {
        TranslationFn {
            name: name.into(),
            map: Arc::new(map),
            totality: Totality::Partial,
        }
    }

    pub fn total(name: impl Into<String>, map: impl Fn(&Rational) -> Rational + Send + Sync + 'static) -> Self {
        TranslationFn {
            name: name.into(),
            map: Arc::new(move |q| Some(map(q))),
            totality: Totality::Total,
        }
    }

    pub fn identity() -> Self {
        Self::total("identity", |q| q.clone())
    }

    /// `q -> k q`.
    pub fn linear(k: Rational) -> Self {
        Self::total(format!("{k}*q"), move |q| &k * q)
    }

    /// `q -> target - s (target - q)`: contracts toward `target` by factor `s`.
    pub fn affine_contraction(target: Rational, s: Rational) -> Self {
        Self::total(format!("{target}-{s}*({target}-q)"), move |q| {
            &target - &s * (&target - q)
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn totality(&self) -> Totality {
        self.totality
    }

    pub fn eval(&self, q: &Rational) -> Option<Rational> {
        (self.map)(q)
    }

    /// `q -> self(inner(q))`.
    pub fn compose(&self, inner: &TranslationFn) -> TranslationFn {
        let outer = self.map.clone();
        let first = inner.map.clone();
        let totality = if self.totality == Totality::Total && inner.totality == Totality::Total {
            Totality::Total
        } else {
            Totality::Partial
        };
        TranslationFn {
            name: format!("{}∘{}", self.name, inner.name),
            map: Arc::new(move |q| first(q).and_then(|p| outer(&p))),
            totality,
        }
    }
}

/// Translation function plus constant `c > 0`.
#[derive(Clone, Debug)]
pub struct TranslationWitness {
    translation: TranslationFn,
    constant: Rational,
    variant: Variant,
}

impl TranslationWitness {
    pub fn new(translation: TranslationFn, constant: Rational, variant: Variant) -> Result<Self> {
        if !constant.is_positive() {
            return Err(LabError::config(format!("constant {constant} must be positive")));
        }
        Ok(TranslationWitness {
            translation,
            constant,
            variant,
        })
    }

    pub fn translation(&self) -> &TranslationFn {
        &self.translation
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn with_constant(&self, constant: Rational) -> Result<Self> {
        Self::new(self.translation.clone(), constant, self.variant)
    }

    pub fn label(&self) -> String {
        format!(
            "{} (c = {}, {:?}, {:?})",
            self.translation.name, self.constant, self.translation.totality, self.variant
        )
        .to_lowercase()
    }

    /// Witness for `alpha <= gamma` from `self: alpha <= beta` and
    /// `inner: beta <= gamma`: `q -> f1(f2(q))` with constant `c1 c2`.
    pub fn compose(&self, inner: &TranslationWitness) -> Result<Self> {
        Self::new(
            self.translation.compose(&inner.translation),
            &self.constant * &inner.constant,
            Variant::Strict,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationReason {
    Undefined,
    NotBelowAlpha,
    GapBoundFailed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub q: JsonRational,
    pub reason: ViolationReason,
    pub phi_q: Option<JsonRational>,
    pub bound: Option<JsonRational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ViolationReport {
    pub witness: String,
    pub samples_checked: u64,
    pub skipped: u64,
    pub violations: Vec<Violation>,
    /// Largest `(alpha - phi(q)) / (beta - q)` over defined samples; 0 if none.
    pub max_ratio_seen: JsonRational,
}

impl ViolationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.passed() {
            format!("no violation found on {} samples", self.samples_checked)
        } else {
            format!(
                "{} violations on {} samples",
                self.violations.len(),
                self.samples_checked
            )
        }
    }

    /// Combines reports of the same witness over disjoint sample sets.
    pub fn merge(mut self, other: ViolationReport) -> ViolationReport {
        self.samples_checked += other.samples_checked;
        self.skipped += other.skipped;
        self.violations.extend(other.violations);
        self.violations.sort_by(|a, b| a.q.cmp(&b.q).then(a.reason.cmp(&b.reason)));
        if other.max_ratio_seen > self.max_ratio_seen {
            self.max_ratio_seen = other.max_ratio_seen;
        }
        self
    }
}

#[allow(clippy::large_enum_variant)]
enum SampleOutcome {
    Skipped,
    Checked {
        /// `(alpha - phi(q), beta - q)`, divided only when it sets a new maximum
        ratio: Option<(Rational, Rational)>,
        violation: Option<Violation>,
    },
}

// Hot-path arithmetic on unreduced fractions with positive denominators.
// Comparisons cross-multiply; only values that reach a report are reduced.

fn lt(x: &Rational, y: &Rational) -> bool {
    x.numer() * y.denom() < y.numer() * x.denom()
}

fn sub_raw(x: &Rational, y: &Rational) -> Rational {
    Rational::new_raw(x.numer() * y.denom() - y.numer() * x.denom(), x.denom() * y.denom())
}

fn add_raw(x: &Rational, y: &Rational) -> Rational {
    Rational::new_raw(x.numer() * y.denom() + y.numer() * x.denom(), x.denom() * y.denom())
}

fn mul_raw(x: &Rational, y: &Rational) -> Rational {
    Rational::new_raw(x.numer() * y.numer(), x.denom() * y.denom())
}

fn reduce(x: Rational) -> Rational {
    let (n, d) = x.into_raw();
    Rational::new(n, d)
}

/// `gap / distance > max` for a positive `distance`.
fn exceeds(gap: &Rational, distance: &Rational, max: &Rational) -> bool {
    let lhs = gap.numer() * distance.denom() * max.denom();
    let rhs = max.numer() * gap.denom() * distance.numer();
    lhs > rhs
}

fn check_one(
    alpha: &Rational,
    beta: &Rational,
    w: &TranslationWitness,
    q: &Rational,
) -> Result<SampleOutcome> {
    if !lt(q, beta) {
        return Ok(SampleOutcome::Skipped);
    }
    let slack = match w.variant {
        Variant::Strict => None,
        Variant::Weakened => Some(two_pow_neg(dyadic_length(q).map_err(|_| {
            LabError::Domain(format!("weakened check needs dyadic samples in [0,1), got {q}"))
        })?)),
    };
    let Some(phi) = w.translation.eval(q) else {
        return Ok(SampleOutcome::Checked {
            ratio: None,
            violation: Some(Violation {
                q: q.clone().into(),
                reason: ViolationReason::Undefined,
                phi_q: None,
                bound: None,
            }),
        });
    };
    let gap = sub_raw(alpha, &phi);
    let distance = sub_raw(beta, q);
    let scaled = if w.constant.is_one() {
        distance.clone()
    } else {
        mul_raw(&w.constant, &distance)
    };
    let bound = match &slack {
        Some(s) => add_raw(&scaled, s),
        None => scaled,
    };
    let reason = if !lt(&phi, alpha) {
        Some(ViolationReason::NotBelowAlpha)
    } else if !lt(&gap, &bound) {
        Some(ViolationReason::GapBoundFailed)
    } else {
        None
    };
    Ok(SampleOutcome::Checked {
        violation: reason.map(|reason| Violation {
            q: q.clone().into(),
            reason,
            phi_q: Some(phi.into()),
            bound: Some(reduce(bound).into()),
        }),
        ratio: Some((gap, distance)),
    })
}

/// Checks `alpha - phi(q) < c (beta - q)` (plus `2^-|q|` for the weakened
/// variant) and `phi(q) < alpha` at every sample `q < beta`. Samples at or
/// above `beta` are counted as skipped.
pub fn check_witness(
    alpha: &DeskReal,
    beta: &DeskReal,
    w: &TranslationWitness,
    samples: &[Rational],
) -> Result<ViolationReport> {
    let a = alpha.oracle_limit();
    let b = beta.oracle_limit();
    let tally = samples
        .par_iter()
        .try_fold(Tally::default, |mut t, q| {
            t.absorb(check_one(a, b, w, q)?);
            Ok::<_, LabError>(t)
        })
        .try_reduce(Tally::default, |x, y| Ok(x.join(y)))?;

    let mut violations = tally.violations;
    violations.sort_by(|a, b| a.q.cmp(&b.q).then(a.reason.cmp(&b.reason)));
    Ok(ViolationReport {
        witness: w.label(),
        samples_checked: tally.checked,
        skipped: tally.skipped,
        violations,
        max_ratio_seen: tally.max_ratio.unwrap_or_else(Rational::zero).into(),
    })
}

#[derive(Default)]
struct Tally {
    checked: u64,
    skipped: u64,
    violations: Vec<Violation>,
    max_ratio: Option<Rational>,
}

impl Tally {
    fn absorb(&mut self, outcome: SampleOutcome) {
        match outcome {
            SampleOutcome::Skipped => self.skipped += 1,
            SampleOutcome::Checked { ratio, violation } => {
                self.checked += 1;
                if let Some((gap, distance)) = ratio {
                    if self.max_ratio.as_ref().is_none_or(|m| exceeds(&gap, &distance, m)) {
                        self.max_ratio = Some(reduce(mul_raw(&gap, &distance.recip())));
                    }
                }
                self.violations.extend(violation);
            }
        }
    }

    fn join(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.violations.extend(other.violations);
        self.max_ratio = match (self.max_ratio, other.max_ratio) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        };
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `r alpha <= alpha`
    Forward,
    /// `alpha <= r alpha`
    Backward,
}

/// Witness for `r alpha == alpha` in one direction: `q -> r q` with
/// constant `r + 1` forward, `q -> q / r` with constant `1/r + 1` backward.
/// The constant must exceed the scaling factor because the bound is strict.
pub fn scaling_witness(r: &Rational, direction: Direction) -> Result<TranslationWitness> {
    if !r.is_positive() {
        return Err(LabError::config(format!("scaling factor {r} must be positive")));
    }
    let factor = match direction {
        Direction::Forward => r.clone(),
        Direction::Backward => r.recip(),
    };
    let constant = &factor + Rational::one();
    TranslationWitness::new(TranslationFn::linear(factor), constant, Variant::Strict)
}

/// Weakened total witness for a real with exactly known limit `alpha` in
/// `[0,1)`: `f(q) = alpha` cut to `|q| + 1` bits, or `alpha - 2^-(|q|+2)`
/// when the cut is not strictly below `alpha`. Constant 1.
pub fn computable_least_witness(alpha: &DeskReal) -> Result<TranslationWitness> {
    let a = alpha.oracle_limit().clone();
    truncate(&a, 0)?;
    let cut = move |len: u64| {
        let c = truncate(&a, len + 1).expect("alpha checked in [0,1)").value();
        if c < a {
            c
        } else {
            &a - two_pow_neg(len + 2)
        }
    };
    // f depends on q only through |q|; short lengths are tabulated
    let table: Vec<Rational> = (0..=DEFAULT_PRECISION).map(&cut).collect();
    let f = TranslationFn::total(format!("least({})", alpha.name()), move |q| {
        let len = effective_length(q, DEFAULT_PRECISION);
        match table.get(len as usize) {
            Some(v) => v.clone(),
            None => cut(len),
        }
    });
    TranslationWitness::new(f, Rational::one(), Variant::Weakened)
}

/// All `k 2^-depth` in `[0, limit)`.
pub fn dyadic_grid(limit: &Rational, depth: u64) -> Vec<Rational> {
    if !limit.is_positive() {
        return Vec::new();
    }
    let scale = pow2(depth);
    // number of k with k / 2^depth < limit
    let count = (limit.numer() * &scale + limit.denom() - BigInt::one()) / limit.denom();
    let count: u64 = count.try_into().expect("grid size fits in u64");
    (0..count)
        .map(|k| Rational::new(BigInt::from(k), scale.clone()))
        .collect()
}

/// Default sample set for checking against `beta`: approximation points
/// `b_0, b_1, ...` (up to half of `count`) plus a dyadic grid below the
/// limit, refined until at least `count` distinct samples are collected.
pub fn default_samples(beta: &DeskReal, count: usize) -> Vec<Rational> {
    let limit = beta.oracle_limit();
    let mut points: Vec<Rational> = (0..(count / 2) as u64)
        .map(|n| beta.approx_at(n))
        .filter(|b| b < limit)
        .collect();
    let base = points.clone();
    let mut depth = 1;
    loop {
        points = base.clone();
        points.extend(dyadic_grid(limit, depth));
        points.sort();
        points.dedup();
        if points.len() >= count || depth >= 40 {
            return points;
        }
        depth += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{int, rat};

    fn point(name: &str, limit: Rational) -> DeskReal {
        let l = limit.clone();
        DeskReal::new(name, limit, move |n| &l - two_pow_neg(n))
    }

    #[test]
    fn half_translation_passes() {
        let alpha = point("a", rat(1, 4));
        let beta = point("b", rat(1, 2));
        let w = TranslationWitness::new(TranslationFn::linear(rat(1, 2)), int(1), Variant::Strict).unwrap();
        let r = check_witness(&alpha, &beta, &w, &[int(0), rat(1, 4), rat(3, 8)]).unwrap();
        assert!(r.passed());
        assert_eq!(r.samples_checked, 3);
        assert_eq!(r.max_ratio_seen.0, rat(1, 2));
    }

    #[test]
    fn gap_bound_failure_is_reported() {
        let alpha = point("a", rat(1, 2));
        let beta = point("b", rat(1, 4));
        let w = TranslationWitness::new(TranslationFn::identity(), int(1), Variant::Strict).unwrap();
        let r = check_witness(&alpha, &beta, &w, &[rat(15, 64)]).unwrap();
        assert_eq!(r.violations.len(), 1);
        let v = &r.violations[0];
        assert_eq!(v.reason, ViolationReason::GapBoundFailed);
        assert_eq!(&rat(1, 2) - &v.phi_q.as_ref().unwrap().0, rat(17, 64));
        assert_eq!(v.bound.as_ref().unwrap().0, rat(1, 64));
    }

    #[test]
    fn self_reduction_needs_constant_above_one() {
        let x = point("x", int(1));
        let samples = default_samples(&x, 200);
        let c2 = TranslationWitness::new(TranslationFn::identity(), int(2), Variant::Strict).unwrap();
        assert!(check_witness(&x, &x, &c2, &samples).unwrap().passed());
        let c1 = c2.with_constant(int(1)).unwrap();
        let r = check_witness(&x, &x, &c1, &samples).unwrap();
        assert_eq!(r.violations.len() as u64, r.samples_checked);
    }

    #[test]
    fn undefined_and_not_below_alpha() {
        let x = point("x", int(1));
        let partial = TranslationFn::partial("half-defined", |q: &Rational| {
            if q < &rat(1, 2) {
                None
            } else {
                Some(int(2))
            }
        });
        let w = TranslationWitness::new(partial, int(5), Variant::Strict).unwrap();
        let r = check_witness(&x, &x, &w, &[rat(3, 4), rat(1, 4), int(3)]).unwrap();
        assert_eq!(r.skipped, 1);
        assert_eq!(r.samples_checked, 2);
        let reasons: Vec<_> = r.violations.iter().map(|v| v.reason).collect();
        assert_eq!(reasons, vec![ViolationReason::Undefined, ViolationReason::NotBelowAlpha]);
    }

    #[test]
    fn constant_must_be_positive() {
        assert!(TranslationWitness::new(TranslationFn::identity(), int(0), Variant::Strict).is_err());
        assert!(scaling_witness(&int(-1), Direction::Forward).is_err());
        assert!(scaling_witness(&int(0), Direction::Backward).is_err());
    }

    #[test]
    fn weakened_check_rejects_non_dyadic_samples() {
        let x = point("x", int(1));
        let w = TranslationWitness::new(TranslationFn::identity(), int(2), Variant::Weakened).unwrap();
        assert!(matches!(
            check_witness(&x, &x, &w, &[rat(1, 3)]),
            Err(LabError::Domain(_))
        ));
    }

    #[test]
    fn scaling_examples() {
        let base = point("third", rat(1, 3));
        let doubled = base.scaled(&int(2));
        let fwd = scaling_witness(&int(2), Direction::Forward).unwrap();
        assert_eq!(fwd.constant(), &int(3));
        assert_eq!(fwd.translation().eval(&rat(1, 4)).unwrap(), rat(1, 2));
        assert!(check_witness(&doubled, &base, &fwd, &[rat(1, 4)]).unwrap().passed());
        assert_eq!(rat(2, 3) - rat(1, 2), rat(1, 6));
        assert_eq!(int(3) * (rat(1, 3) - rat(1, 4)), rat(1, 4));

        let one = point("one", int(1));
        let third = one.scaled(&rat(1, 3));
        let back = scaling_witness(&rat(1, 3), Direction::Backward).unwrap();
        assert_eq!(back.constant(), &int(4));
        assert_eq!(back.translation().eval(&rat(1, 4)).unwrap(), rat(3, 4));
        assert!(check_witness(&one, &third, &back, &[rat(1, 4)]).unwrap().passed());

        let id = scaling_witness(&int(1), Direction::Forward).unwrap();
        assert_eq!(id.constant(), &int(2));
        assert!(check_witness(&one, &one, &id, &default_samples(&one, 300)).unwrap().passed());
    }

    #[test]
    fn literal_constant_r_fails() {
        // constant exactly r turns the strict bound into an equality
        let one = point("one", int(1));
        let doubled = one.scaled(&int(2));
        let w = scaling_witness(&int(2), Direction::Forward)
            .unwrap()
            .with_constant(int(2))
            .unwrap();
        let r = check_witness(&doubled, &one, &w, &[rat(1, 2)]).unwrap();
        assert_eq!(r.violations[0].reason, ViolationReason::GapBoundFailed);
    }

    #[test]
    fn least_witness_examples() {
        let alpha = point("two-thirds", rat(2, 3));
        let w = computable_least_witness(&alpha).unwrap();
        assert_eq!(w.variant(), Variant::Weakened);
        assert_eq!(w.translation().eval(&rat(1, 2)).unwrap(), rat(1, 2));
        assert_eq!(w.translation().eval(&int(0)).unwrap(), rat(1, 2));
        assert_eq!(rat(2, 3) - rat(1, 2), rat(1, 6));

        let half = point("half", rat(1, 2));
        let w = computable_least_witness(&half).unwrap();
        // cut of 1/2 at 2 bits equals 1/2, so the padded value is used
        assert_eq!(w.translation().eval(&rat(1, 2)).unwrap(), rat(1, 2) - rat(1, 8));
        assert!(computable_least_witness(&point("big", int(2))).is_err());
    }

    #[test]
    fn least_witness_handles_long_dyadics() {
        let third = point("third", rat(1, 3));
        let w = computable_least_witness(&third).unwrap();
        // 0.0101...01 with 100 bits
        let q = truncate(&rat(1, 3), 100).unwrap().value();
        let phi = w.translation().eval(&q).unwrap();
        assert_eq!(phi, truncate(&rat(1, 3), 101).unwrap().value());
        let r = check_witness(&third, &third, &w, &[q]).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn composition_is_transitive_on_samples() {
        // alpha = 1/6 <= beta = 1/3 <= gamma = 1
        let gamma = point("one", int(1));
        let beta = gamma.scaled(&rat(1, 3));
        let alpha = beta.scaled(&rat(1, 2));
        let w1 = scaling_witness(&rat(1, 2), Direction::Forward).unwrap();
        let w2 = scaling_witness(&rat(1, 3), Direction::Forward).unwrap();
        let s_gamma = default_samples(&gamma, 400);
        let s_beta = default_samples(&beta, 400);
        assert!(check_witness(&alpha, &beta, &w1, &s_beta).unwrap().passed());
        assert!(check_witness(&beta, &gamma, &w2, &s_gamma).unwrap().passed());
        let w = w1.compose(&w2).unwrap();
        assert_eq!(w.constant(), &(rat(3, 2) * rat(4, 3)));
        assert!(check_witness(&alpha, &gamma, &w, &s_gamma).unwrap().passed());
    }

    #[test]
    fn report_is_order_independent() {
        let alpha = point("a", rat(1, 2));
        let beta = point("b", rat(1, 4));
        let w = TranslationWitness::new(TranslationFn::identity(), int(1), Variant::Strict).unwrap();
        let mut samples = default_samples(&beta, 100);
        let forward = check_witness(&alpha, &beta, &w, &samples).unwrap();
        samples.reverse();
        let backward = check_witness(&alpha, &beta, &w, &samples).unwrap();
        assert_eq!(forward, backward);
    }

    #[test]
    fn default_samples_shape() {
        let x = point("x", rat(2, 3));
        let s = default_samples(&x, 1000);
        assert!(s.len() >= 1000);
        assert!(s.iter().all(|q| q < &rat(2, 3)));
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(dyadic_grid(&rat(2, 3), 2), vec![int(0), rat(1, 4), rat(1, 2)]);
        assert_eq!(dyadic_grid(&rat(1, 2), 1), vec![int(0)]);
    }
}
