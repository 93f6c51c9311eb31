//! Distribution functions and Lorentz `L^{p,q}` norms of functions taking
//! finitely many values.
//!
//! Every function here is described by `(|value|, measure)` pairs. Since the
//! distribution function `μ_f` is then a step function of `s`, the norm
//!
//! ```text
//! ‖f‖_{p,q} = ( p ∫₀^∞ μ_f(s)^{q/p} s^{q-1} ds )^{1/q}
//! ```
//!
//! is a finite sum of closed-form antiderivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SnumError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzParams {
    p: f64,
    q: f64,
}

impl LorentzParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(SnumError::Domain(format!("Lorentz exponent p = {p} must be >= 1")));
        }
        if !(q >= 1.0) {
            return Err(SnumError::Domain(format!("Lorentz exponent q = {q} must be >= 1")));
        }
        if q > p {
            return Err(SnumError::UnsupportedRegime { p, q });
        }
        Ok(Self { p, q })
    }

    /// `L^{d,1}`, the critical space for the embedding into `C`.
    pub fn critical(d: usize) -> Self {
        Self { p: d as f64, q: 1.0 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `‖χ_E‖_{p,q}` for a set of measure `m`: `(p/q)^{1/q} m^{1/p}`.
    pub fn indicator_norm(&self, m: f64) -> f64 {
        (self.p / self.q).powf(1.0 / self.q) * m.powf(1.0 / self.p)
    }
}

/// `μ_f(t) = |{x : |f(x)| > t}|` for data given as `(|value|, measure)` pairs.
pub fn distribution_function(data: &[(f64, f64)], t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(SnumError::Domain(format!("distribution function needs t >= 0, got {t}")));
    }
    Ok(data.iter().filter(|(v, _)| v.abs() > t).map(|(_, m)| m).sum())
}

/// Level sets of `|f|`: distinct positive values in decreasing order with the
/// measure of `{|f| ≥ value}`.
fn levels(data: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = data
        .iter()
        .map(|&(v, m)| (v.abs(), m))
        .filter(|&(v, m)| v > 0.0 && m > 0.0)
        .collect();
    pts.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    let mut cum = 0.0;
    for (v, m) in pts {
        cum += m;
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 = cum,
            _ => out.push((v, cum)),
        }
    }
    out
}

/// `‖f‖_{p,q}` evaluated in closed form on each constancy interval of `μ_f`.
pub fn lorentz_norm(data: &[(f64, f64)], params: LorentzParams) -> f64 {
    let LorentzParams { p, q } = params;
    let lv = levels(data);
    let mut acc = 0.0;
    for (j, &(v, cum)) in lv.iter().enumerate() {
        let below = lv.get(j + 1).map_or(0.0, |l| l.0);
        // μ = cum on [below, v)
        acc += cum.powf(q / p) * (v.powf(q) - below.powf(q));
    }
    (p / q * acc).powf(1.0 / q)
}

/// Direct `L^p` norm `(Σ |v|^p m)^{1/p}`, used to cross-check `L^{p,p}`.
pub fn lp_norm(data: &[(f64, f64)], p: f64) -> f64 {
    data.iter().map(|(v, m)| v.abs().powf(p) * m).sum::<f64>().powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::step::StepFunction;

    fn data(f: &StepFunction<f64>) -> Vec<(f64, f64)> {
        f.abs_value_measures()
    }

    #[test]
    fn distribution_examples() {
        let chi = StepFunction::indicator(0.0, 0.5, 1.0).unwrap();
        assert_eq!(distribution_function(&data(&chi), 0.5).unwrap(), 0.5);
        assert_eq!(distribution_function(&data(&chi), 1.0).unwrap(), 0.0);
        let f = StepFunction::uniform(vec![2.0, 0.0, -1.0, 0.0]).unwrap();
        assert_eq!(distribution_function(&data(&f), 1.5).unwrap(), 0.25);
        assert!(distribution_function(&data(&f), -0.1).is_err());
    }

    #[test]
    fn norm_examples() {
        let chi = StepFunction::indicator(0.0, 0.5, 1.0).unwrap();
        let n = lorentz_norm(&data(&chi), LorentzParams::new(2.0, 1.0).unwrap());
        assert!((n - 2f64.sqrt()).abs() < 1e-15);
        let z = StepFunction::<f64>::zero();
        assert_eq!(lorentz_norm(&data(&z), LorentzParams::new(3.0, 2.0).unwrap()), 0.0);
        for d in 1..=5 {
            let n = lorentz_norm(&[(1.0, 1.0)], LorentzParams::critical(d));
            assert!((n - d as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn regime_checked() {
        assert!(matches!(
            LorentzParams::new(2.0, 3.0),
            Err(SnumError::UnsupportedRegime { .. })
        ));
        assert!(LorentzParams::new(0.5, 0.5).is_err());
    }

    #[test]
    fn indicator_closed_form_matches() {
        let p = LorentzParams::new(3.0, 2.0).unwrap();
        let n = lorentz_norm(&[(1.0, 0.3), (0.0, 0.7)], p);
        assert!((n - p.indicator_norm(0.3)).abs() < 1e-14);
    }

    #[test]
    fn duplicate_values_collapse() {
        let p = LorentzParams::new(2.0, 1.0).unwrap();
        let a = lorentz_norm(&[(1.0, 0.25), (1.0, 0.25), (3.0, 0.1)], p);
        let b = lorentz_norm(&[(1.0, 0.5), (3.0, 0.1)], p);
        assert!((a - b).abs() < 1e-15);
    }
}
