//! Certified lower and upper bounds for the s-numbers of the Volterra
//! operator `V: L¹₀ → C` and of the cube embedding `V¹₀L^{d,1} → C`.

mod cube;
mod interval;
mod widths;

pub use cube::*;
pub use interval::*;
pub use widths::*;

use nalgebra::DMatrix;
use num_traits::Zero;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Result, SnumError};
use crate::grid::{GridFunction, GridSpec};
use crate::scalar::{Exact, Mode};
use crate::step::StepFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Kind {
    #[serde(rename = "a")]
    Approximation,
    #[serde(rename = "c")]
    Gelfand,
    #[serde(rename = "d")]
    Kolmogorov,
    #[serde(rename = "b")]
    Bernstein,
    #[serde(rename = "i")]
    Isomorphism,
}

impl Kind {
    pub fn symbol(self) -> &'static str {
        match self {
            Kind::Approximation => "a",
            Kind::Gelfand => "c",
            Kind::Kolmogorov => "d",
            Kind::Bernstein => "b",
            Kind::Isomorphism => "i",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "a" => Kind::Approximation,
            "c" => Kind::Gelfand,
            "d" => Kind::Kolmogorov,
            "b" => Kind::Bernstein,
            "i" => Kind::Isomorphism,
            _ => return Err(SnumError::Domain(format!("unknown s-number kind {s:?}"))),
        })
    }

    pub const ALL: [Kind; 5] =
        [Kind::Approximation, Kind::Gelfand, Kind::Kolmogorov, Kind::Bernstein, Kind::Isomorphism];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// Every step was checked; the bound holds.
    Certified,
    /// Produced by a search without a completeness guarantee.
    Heuristic,
    /// The search did not reach its target; the reported numbers are still valid bounds.
    Inconclusive,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Certified => "certified",
            Status::Heuristic => "heuristic",
            Status::Inconclusive => "inconclusive",
        })
    }
}

fn extended_real<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// Which operator a bound belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    Volterra,
    Cube { dim: usize },
}

/// What a bound is about: the s-number of the operator itself, or a
/// quantity of one particular subspace (e.g. the Bernstein ratio of a given
/// `E`, which bounds `b_n` from below but not from above).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Operator,
    Subspace,
}

#[derive(Debug, Clone, Serialize)]
pub struct SNumberBound {
    pub kind: Kind,
    pub n: usize,
    #[serde(serialize_with = "extended_real")]
    pub lower: f64,
    #[serde(serialize_with = "extended_real")]
    pub upper: f64,
    /// Rational value of `lower`/`upper` when computed exactly.
    pub lower_exact: Option<String>,
    pub upper_exact: Option<String>,
    pub status: Status,
    pub mode: Mode,
    pub operator: Operator,
    pub scope: Scope,
    /// The closed-form value the bound is compared against, e.g. `1/(2n)`.
    pub anchor: String,
    pub witness: Value,
}

impl SNumberBound {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        kind: Kind,
        n: usize,
        lower: f64,
        upper: f64,
        status: Status,
        mode: Mode,
        operator: Operator,
        anchor: impl Into<String>,
        witness: Value,
    ) -> Result<Self> {
        if n == 0 {
            return Err(SnumError::Domain("s-number index starts at 1".into()));
        }
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(SnumError::Construction(format!(
                "{}_{n}: lower {lower} exceeds upper {upper}",
                kind.symbol()
            )));
        }
        Ok(Self {
            kind,
            n,
            lower,
            upper,
            lower_exact: None,
            upper_exact: None,
            status,
            mode,
            operator,
            scope: Scope::Operator,
            anchor: anchor.into(),
            witness,
        })
    }

    pub fn with_exact(mut self, lower: Option<&Exact>, upper: Option<&Exact>) -> Self {
        use crate::scalar::Scalar;
        self.lower_exact = lower.map(Scalar::to_json_string);
        self.upper_exact = upper.map(Scalar::to_json_string);
        self
    }

    pub fn for_subspace(mut self) -> Self {
        self.scope = Scope::Subspace;
        self
    }

    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }
}

/// Gaussian elimination over the rationals.
pub fn exact_rank(mut rows: Vec<Vec<Exact>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone() / rows[rank][col].clone();
                for c in col..cols {
                    let delta = factor.clone() * rows[rank][c].clone();
                    rows[r][c] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Solves a square rational system, `None` when singular.
pub fn solve_exact(mut m: Vec<Vec<Exact>>, mut rhs: Vec<Exact>) -> Option<Vec<Exact>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone() / m[col][col].clone();
                for c in col..n {
                    let delta = factor.clone() * m[col][c].clone();
                    m[r][c] -= delta;
                }
                let delta = factor * rhs[col].clone();
                rhs[r] -= delta;
            }
        }
    }
    Some((0..n).map(|i| rhs[i].clone() / m[i][i].clone()).collect())
}

/// Span of step functions on the uniform `N`-cell grid, stored by cell values.
#[derive(Debug, Clone)]
pub struct StepSubspace {
    cells: usize,
    basis: Vec<StepFunction<Exact>>,
    cell_values: Vec<Vec<Exact>>,
}

impl StepSubspace {
    pub fn new(cells: usize, basis: Vec<StepFunction<Exact>>) -> Result<Self> {
        if basis.is_empty() {
            return Err(SnumError::DegenerateBasis("empty basis".into()));
        }
        if cells == 0 {
            return Err(SnumError::Domain("need at least one cell".into()));
        }
        let grid: Vec<Exact> = (0..=cells).map(|i| crate::scalar::q(i as i64, cells as i64)).collect();
        let mut cell_values = Vec::with_capacity(basis.len());
        for f in &basis {
            if f.breakpoints().iter().any(|b| grid.binary_search(b).is_err()) {
                return Err(SnumError::InvalidStep(format!("basis function not constant on the {cells} grid cells")));
            }
            cell_values.push(f.refine_to(&grid).values().to_vec());
        }
        if exact_rank(cell_values.clone()) < basis.len() {
            return Err(SnumError::DegenerateBasis(format!(
                "{} basis functions span a smaller space",
                basis.len()
            )));
        }
        Ok(Self { cells, basis, cell_values })
    }

    pub fn from_cell_values(cells: usize, values: Vec<Vec<Exact>>) -> Result<Self> {
        let basis = values.into_iter().map(StepFunction::uniform).collect::<Result<Vec<_>>>()?;
        Self::new(cells, basis)
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[StepFunction<Exact>] {
        &self.basis
    }

    pub fn cell_values(&self) -> &[Vec<Exact>] {
        &self.cell_values
    }

    pub fn is_mean_zero(&self) -> bool {
        self.basis.iter().all(|f| f.integral().is_zero())
    }

    /// `Σ c_i e_i` as cell values.
    pub fn combine(&self, coeffs: &[Exact]) -> Vec<Exact> {
        (0..self.cells)
            .map(|t| {
                coeffs
                    .iter()
                    .zip(&self.cell_values)
                    .fold(Exact::zero(), |acc, (c, e)| acc + c.clone() * e[t].clone())
            })
            .collect()
    }
}

/// Span of boundary-zero grid functions.
#[derive(Debug, Clone)]
pub struct GridSubspace {
    spec: GridSpec,
    basis: Vec<GridFunction>,
}

impl GridSubspace {
    pub fn new(basis: Vec<GridFunction>) -> Result<Self> {
        let first = basis.first().ok_or_else(|| SnumError::DegenerateBasis("empty basis".into()))?;
        let spec = first.spec();
        if basis.iter().any(|u| u.spec() != spec) {
            return Err(SnumError::DimensionMismatch("basis functions on different grids".into()));
        }
        if basis.iter().any(|u| !u.boundary_zero()) {
            return Err(SnumError::Precondition("basis functions must vanish on the boundary".into()));
        }
        let m = DMatrix::from_fn(basis.len(), spec.node_count(), |i, t| basis[i].nodal_values()[t]);
        let sv = m.singular_values();
        let top = sv.max();
        if top == 0.0 || sv.iter().filter(|&&s| s > top * 1e-10).count() < basis.len() {
            return Err(SnumError::DegenerateBasis("Gram matrix is singular".into()));
        }
        Ok(Self { spec, basis })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[GridFunction] {
        &self.basis
    }
}

/// `A: C → ℓ∞_n` (evaluation at points) and `B: ℓ∞_n → X` (building blocks)
/// with `A ∘ T ∘ B = Id`.
#[derive(Debug, Clone, Serialize)]
pub struct FactorizationWitness {
    pub points: Vec<Vec<f64>>,
    pub synthesis: Vec<Value>,
    pub norm_a: f64,
    pub norm_b: f64,
    pub norm_a_exact: Option<String>,
    pub norm_b_exact: Option<String>,
    /// `A T B e_k = e_k` for every basis vector, checked without rounding.
    pub identity_verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub passed: bool,
    pub checks: usize,
    pub violations: Vec<String>,
}

const AXIOM_TOL: f64 = 1e-12;

/// Monotonicity in `n`, the `s_1 = ‖V‖ = 1/2` anchor, and the chain
/// `i_n ≤ b_n ≤ max(c_n, d_n) ≤ a_n` over certified bounds.
pub fn snumber_axiom_suite(bounds: &[SNumberBound]) -> AxiomReport {
    let mut violations = Vec::new();
    let mut checks = 0;
    let mut flag = |ok: bool, msg: String| {
        checks += 1;
        if !ok {
            violations.push(msg);
        }
    };
    let name = |b: &SNumberBound| format!("{}_{} ({:?})", b.kind.symbol(), b.n, b.operator);
    for b in bounds.iter().filter(|b| b.is_certified() && b.scope == Scope::Subspace) {
        flag(b.lower <= b.upper, format!("{} (subspace): lower {} > upper {}", name(b), b.lower, b.upper));
    }
    let certified: Vec<&SNumberBound> =
        bounds.iter().filter(|b| b.is_certified() && b.scope == Scope::Operator).collect();
    for b in &certified {
        flag(b.lower <= b.upper, format!("{}: lower {} > upper {}", name(b), b.lower, b.upper));
        if b.operator == Operator::Volterra {
            flag(
                b.lower <= 0.5 + AXIOM_TOL,
                format!("{}: lower {} exceeds s_1 = 1/2", name(b), b.lower),
            );
            if b.n == 1 {
                flag(
                    b.upper >= 0.5 - AXIOM_TOL,
                    format!("{}: upper {} below s_1 = 1/2", name(b), b.upper),
                );
            }
        }
    }
    for x in &certified {
        for y in &certified {
            if x.operator != y.operator {
                continue;
            }
            // s_n ≤ s_m for n ≥ m, same kind
            if x.kind == y.kind && x.n >= y.n {
                flag(
                    x.lower <= y.upper + AXIOM_TOL,
                    format!("monotonicity: lower {} of {} > upper {} of {}", x.lower, name(x), y.upper, name(y)),
                );
            }
            if x.n != y.n {
                continue;
            }
            let smaller_than = match (x.kind, y.kind) {
                (Kind::Isomorphism, k) => k != Kind::Isomorphism,
                (_, Kind::Approximation) => x.kind != Kind::Approximation,
                _ => false,
            };
            if smaller_than {
                flag(
                    x.lower <= y.upper + AXIOM_TOL,
                    format!("chain: lower {} of {} > upper {} of {}", x.lower, name(x), y.upper, name(y)),
                );
            }
        }
    }
    // b_n ≤ max(c_n, d_n)
    for b in certified.iter().filter(|b| b.kind == Kind::Bernstein) {
        let best = |k: Kind| {
            certified
                .iter()
                .filter(|x| x.kind == k && x.n == b.n && x.operator == b.operator)
                .map(|x| x.upper)
                .fold(f64::INFINITY, f64::min)
        };
        let (c, d) = (best(Kind::Gelfand), best(Kind::Kolmogorov));
        if c.is_finite() && d.is_finite() {
            flag(
                b.lower <= c.max(d) + AXIOM_TOL,
                format!("chain: lower {} of {} > max(c, d) upper {}", b.lower, name(b), c.max(d)),
            );
        }
    }
    for kind in Kind::ALL {
        let mut like: Vec<&&SNumberBound> = certified.iter().filter(|b| b.kind == kind).collect();
        like.sort_by_key(|b| b.n);
        for w in like.windows(2) {
            if w[0].operator == w[1].operator && w[0].n < w[1].n && w[0].upper.is_finite() {
                flag(
                    w[1].upper <= w[0].upper + AXIOM_TOL || w[1].lower <= w[0].upper + AXIOM_TOL,
                    format!("monotonicity: {} upper {} after {} upper {}", name(w[1]), w[1].upper, name(w[0]), w[0].upper),
                );
            }
        }
    }
    AxiomReport { passed: violations.is_empty(), checks, violations }
}

pub(crate) fn witness_json<T: Serialize>(w: &T) -> Value {
    serde_json::to_value(w).unwrap_or_else(|e| json!({ "serialization_error": e.to_string() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn bound(kind: Kind, n: usize, lower: f64, upper: f64) -> SNumberBound {
        SNumberBound::new(kind, n, lower, upper, Status::Certified, Mode::Exact, Operator::Volterra, "", Value::Null)
            .unwrap()
    }

    #[test]
    fn lower_above_upper_rejected() {
        assert!(SNumberBound::new(
            Kind::Gelfand, 2, 0.6, 0.5, Status::Certified, Mode::Float, Operator::Volterra, "", Value::Null
        )
        .is_err());
    }

    #[test]
    fn infinite_bounds_serialize() {
        let b = bound(Kind::Isomorphism, 3, 1.0 / 6.0, f64::INFINITY);
        let v = serde_json::to_value(&b).unwrap();
        assert_eq!(v["upper"], "inf");
        assert_eq!(v["kind"], "i");
    }

    #[test]
    fn rank_detects_dependence() {
        let rows = vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]];
        assert_eq!(exact_rank(rows), 1);
        let e = StepFunction::uniform_ratios(&[1, -1], 1).unwrap();
        assert!(StepSubspace::new(2, vec![e.clone(), e.scale(&q(3, 1))]).is_err());
        assert!(StepSubspace::new(4, vec![e]).is_ok());
    }

    #[test]
    fn axiom_suite_examples() {
        let iso: Vec<_> = (1..=10).map(|n| bound(Kind::Isomorphism, n, 0.5 / n as f64, f64::INFINITY)).collect();
        assert!(snumber_axiom_suite(&iso).passed);
        let a: Vec<_> = (1..=10).map(|n| bound(Kind::Approximation, n, f64::NEG_INFINITY, 0.5)).collect();
        assert!(snumber_axiom_suite(&a).passed);
        let mut bad = vec![bound(Kind::Bernstein, 2, 0.0, 0.2625), bound(Kind::Isomorphism, 2, 0.4, f64::INFINITY)];
        let r = snumber_axiom_suite(&bad);
        assert!(!r.passed);
        assert!(r.violations[0].contains("chain"));
        bad[1].status = Status::Heuristic;
        assert!(snumber_axiom_suite(&bad).passed);
        // a bound on one subspace's ratio does not bound b_n from above
        let scoped = vec![bound(Kind::Bernstein, 2, 0.0, 0.01).for_subspace(), bound(Kind::Isomorphism, 2, 0.25, f64::INFINITY)];
        assert!(snumber_axiom_suite(&scoped).passed);
    }
}
