//! Step functions on `[0, 1]`, the concrete model for elements of `L¹` and `L¹₀`.

use serde_json::{json, Value};

use crate::error::{Result, SnumError};
use crate::scalar::{Exact, Mode, Scalar};

/// A function constant on each `[b_i, b_{i+1})` with `b_0 = 0`, `b_last = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction<S: Scalar> {
    breakpoints: Vec<S>,
    values: Vec<S>,
}

impl<S: Scalar> StepFunction<S> {
    pub fn new(breakpoints: Vec<S>, values: Vec<S>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(SnumError::InvalidStep("need at least two breakpoints".into()));
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(SnumError::InvalidStep(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                values.len()
            )));
        }
        if !breakpoints[0].is_zero() || breakpoints[breakpoints.len() - 1] != S::one() {
            return Err(SnumError::InvalidStep("breakpoints must start at 0 and end at 1".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SnumError::InvalidStep(
                "breakpoints must be strictly increasing (zero-length pieces are forbidden)".into(),
            ));
        }
        Ok(Self { breakpoints, values })
    }

    /// Step function on the uniform grid with `values.len()` cells.
    pub fn uniform(values: Vec<S>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(SnumError::InvalidStep("no cells".into()));
        }
        let bps = (0..=n).map(|i| S::from_ratio(i as i64, n as i64)).collect();
        Self::new(bps, values)
    }

    pub fn zero() -> Self {
        Self { breakpoints: vec![S::zero(), S::one()], values: vec![S::zero()] }
    }

    pub fn constant(c: S) -> Self {
        Self { breakpoints: vec![S::zero(), S::one()], values: vec![c] }
    }

    /// `c·χ_[a,b)` with `0 ≤ a < b ≤ 1`.
    pub fn indicator(a: S, b: S, c: S) -> Result<Self> {
        if !(a >= S::zero() && a < b && b <= S::one()) {
            return Err(SnumError::InvalidStep("indicator needs 0 <= a < b <= 1".into()));
        }
        let mut bps = vec![S::zero()];
        let mut vals = Vec::new();
        if !a.is_zero() {
            bps.push(a.clone());
            vals.push(S::zero());
        }
        bps.push(b.clone());
        vals.push(c);
        if b != S::one() {
            bps.push(S::one());
            vals.push(S::zero());
        }
        Self::new(bps, vals)
    }

    pub fn breakpoints(&self) -> &[S] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn piece_count(&self) -> usize {
        self.values.len()
    }

    /// `(left, right, value)` for each piece.
    pub fn pieces(&self) -> impl Iterator<Item = (&S, &S, &S)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(self.values.iter())
            .map(|(w, v)| (&w[0], &w[1], v))
    }

    /// Value at `x`, right-continuous; `f(1)` is the last piece's value.
    pub fn eval(&self, x: &S) -> S {
        let idx = match self.breakpoints.binary_search_by(|b| b.partial_cmp(x).unwrap()) {
            Ok(i) => i.min(self.values.len() - 1),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.values.len() - 1),
        };
        self.values[idx].clone()
    }

    pub fn integral(&self) -> S {
        self.pieces()
            .fold(S::zero(), |acc, (a, b, v)| acc + v.clone() * (b.clone() - a.clone()))
    }

    pub fn l1_norm(&self) -> S {
        self.pieces()
            .fold(S::zero(), |acc, (a, b, v)| acc + v.abs() * (b.clone() - a.clone()))
    }

    pub fn sup_abs(&self) -> S {
        self.values.iter().fold(S::zero(), |m, v| if v.abs() > m { v.abs() } else { m })
    }

    /// `(|value|, piece length)` pairs as `f64`, the input of the Lorentz routines.
    pub fn abs_value_measures(&self) -> Vec<(f64, f64)> {
        self.pieces()
            .map(|(a, b, v)| (v.abs().to_f64_lossy(), (b.clone() - a.clone()).to_f64_lossy()))
            .collect()
    }

    /// Merges adjacent pieces carrying equal values. Norm-preserving.
    pub fn canonicalize(&self) -> Self {
        let mut bps = vec![self.breakpoints[0].clone()];
        let mut vals: Vec<S> = Vec::new();
        for (_, b, v) in self.pieces() {
            if vals.last() == Some(v) {
                *bps.last_mut().unwrap() = b.clone();
            } else {
                vals.push(v.clone());
                bps.push(b.clone());
            }
        }
        Self { breakpoints: bps, values: vals }
    }

    pub fn scale(&self, c: &S) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v.clone() * c.clone()).collect(),
        }
    }

    /// Union of both breakpoint sets.
    pub fn common_breakpoints(&self, other: &Self) -> Vec<S> {
        let mut out = Vec::with_capacity(self.breakpoints.len() + other.breakpoints.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.breakpoints, &other.breakpoints);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if x < y => {
                    i += 1;
                    x.clone()
                }
                (Some(x), Some(y)) if y < x => {
                    j += 1;
                    y.clone()
                }
                (Some(x), Some(_)) => {
                    i += 1;
                    j += 1;
                    x.clone()
                }
                (Some(x), None) => {
                    i += 1;
                    x.clone()
                }
                (None, Some(y)) => {
                    j += 1;
                    y.clone()
                }
                (None, None) => unreachable!(),
            };
            out.push(next);
        }
        out
    }

    /// Re-expresses `self` on a finer breakpoint set containing its own.
    pub fn refine_to(&self, bps: &[S]) -> Self {
        let values = bps
            .windows(2)
            .map(|w| self.eval(&w[0]))
            .collect();
        Self { breakpoints: bps.to_vec(), values }
    }

    pub fn zip_with(&self, other: &Self, op: impl Fn(&S, &S) -> S) -> Self {
        let bps = self.common_breakpoints(other);
        let values = bps
            .windows(2)
            .map(|w| op(&self.eval(&w[0]), &other.eval(&w[0])))
            .collect();
        Self { breakpoints: bps, values }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() * b.clone())
    }

    /// `∫₀¹ f·g`.
    pub fn inner(&self, other: &Self) -> S {
        self.mul(other).integral()
    }

    /// `f·χ_E` where `E` is a finite union of intervals `[a, b)`.
    pub fn restrict(&self, intervals: &[(S, S)]) -> Self {
        let mut bps = self.breakpoints.clone();
        for (a, b) in intervals {
            for p in [a, b] {
                if *p > S::zero() && *p < S::one() && !bps.contains(p) {
                    bps.push(p.clone());
                }
            }
        }
        bps.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let values = bps
            .windows(2)
            .map(|w| {
                let inside = intervals.iter().any(|(a, b)| *a <= w[0] && w[1] <= *b);
                if inside {
                    self.eval(&w[0])
                } else {
                    S::zero()
                }
            })
            .collect();
        Self { breakpoints: bps, values }
    }

    pub fn to_f64(&self) -> StepFunction<f64> {
        StepFunction {
            breakpoints: self.breakpoints.iter().map(|b| b.to_f64_lossy()).collect(),
            values: self.values.iter().map(|v| v.to_f64_lossy()).collect(),
        }
    }

    pub fn mode(&self) -> Mode {
        S::MODE
    }

    /// JSON form: `{"kind":"step","mode":..,"breakpoints":[..],"values":[..]}`.
    /// Float mode stores numbers, exact mode stores `"p/q"` strings.
    pub fn to_json(&self) -> Value {
        let enc = |xs: &[S]| -> Vec<Value> {
            xs.iter()
                .map(|x| match S::MODE {
                    Mode::Float => json!(x.to_f64_lossy()),
                    Mode::Exact => json!(x.to_json_string()),
                })
                .collect()
        };
        json!({
            "kind": "step",
            "mode": S::MODE,
            "breakpoints": enc(&self.breakpoints),
            "values": enc(&self.values),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let dec = |key: &str| -> Result<Vec<S>> {
            let arr = v
                .get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| SnumError::Serialization(format!("missing array `{key}`")))?;
            arr.iter()
                .map(|x| {
                    let parsed = match x {
                        Value::String(s) => S::parse_json(s),
                        Value::Number(n) => n.as_f64().and_then(|f| S::parse_json(&format!("{f:?}"))),
                        _ => None,
                    };
                    parsed.ok_or_else(|| SnumError::Serialization(format!("bad number {x}")))
                })
                .collect()
        };
        Self::new(dec("breakpoints")?, dec("values")?)
    }
}

impl StepFunction<Exact> {
    /// Uniform grid from integer numerators over a common denominator.
    pub fn uniform_ratios(nums: &[i64], den: i64) -> Result<Self> {
        Self::uniform(nums.iter().map(|&p| Exact::from_ratio(p, den)).collect())
    }
}

/// Marks a step function as an element of `L¹₀`: `|∫ f| ≤ tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MeanZeroTag {
    pub tolerance: f64,
}

impl MeanZeroTag {
    pub const EXACT: MeanZeroTag = MeanZeroTag { tolerance: 0.0 };

    pub fn new(tolerance: f64) -> Result<Self> {
        if !(tolerance >= 0.0) {
            return Err(SnumError::Domain("tolerance must be nonnegative".into()));
        }
        Ok(Self { tolerance })
    }

    pub fn admits<S: Scalar>(&self, f: &StepFunction<S>) -> bool {
        let m = f.integral();
        match S::MODE {
            Mode::Exact if self.tolerance == 0.0 => m.is_zero(),
            _ => m.abs().to_f64_lossy() <= self.tolerance,
        }
    }

    pub fn check<S: Scalar>(&self, f: &StepFunction<S>) -> Result<()> {
        if self.admits(f) {
            Ok(())
        } else {
            Err(SnumError::Precondition(format!(
                "function is not mean-zero: integral = {}",
                f.integral().to_json_string()
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(StepFunction::<f64>::new(vec![0.0, 0.5, 0.5, 1.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(StepFunction::<f64>::new(vec![0.1, 1.0], vec![1.0]).is_err());
        assert!(StepFunction::<f64>::new(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn l1_from_pieces() {
        let f = StepFunction::new(vec![q(0, 1), q(1, 4), q(1, 1)], vec![q(2, 1), q(-1, 1)]).unwrap();
        assert_eq!(f.l1_norm(), q(5, 4));
        assert_eq!(f.integral(), q(-1, 4));
    }

    #[test]
    fn canonicalize_merges_equal_neighbours() {
        let f = StepFunction::uniform_ratios(&[1, 1, 2, 2], 1).unwrap();
        let c = f.canonicalize();
        assert_eq!(c.piece_count(), 2);
        assert_eq!(c.l1_norm(), f.l1_norm());
        assert_eq!(c.breakpoints()[1], q(1, 2));
    }

    #[test]
    fn eval_is_right_continuous() {
        let f = StepFunction::indicator(0.0, 0.5, 1.0).unwrap();
        assert_eq!(f.eval(&0.5), 0.0);
        assert_eq!(f.eval(&0.49), 1.0);
        assert_eq!(f.eval(&1.0), 0.0);
    }

    #[test]
    fn restrict_and_inner() {
        let f = StepFunction::uniform_ratios(&[1, -1, 3, 2], 1).unwrap();
        let r = f.restrict(&[(q(1, 4), q(3, 4))]);
        assert_eq!(r.integral(), q(1, 2));
        let g = StepFunction::constant(q(2, 1));
        assert_eq!(f.inner(&g), q(5, 2));
    }

    #[test]
    fn json_round_trip_exact() {
        let f = StepFunction::uniform_ratios(&[1, -3, 0], 7).unwrap();
        let back = StepFunction::<Exact>::from_json(&f.to_json()).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn mean_zero_tag() {
        let f = StepFunction::uniform_ratios(&[1, -1], 1).unwrap();
        assert!(MeanZeroTag::EXACT.admits(&f));
        let g = StepFunction::uniform_ratios(&[1, 0], 1).unwrap();
        assert!(MeanZeroTag::EXACT.check(&g).is_err());
        assert!(MeanZeroTag::new(-1.0).is_err());
    }
}
