//! Closed-form counts and asymptotic formulas.
//!
//! Every formula is split into a combinatorial prefactor (a [`FactorialExpr`],
//! evaluated exactly for moderate sizes and through log-gamma beyond) and an
//! exponential correction whose exponent is summed in exact rationals and
//! converted to `f64` once.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::degseq::{
    feasibility, mu_parameters, mu_single, rational_to_f64, residual, side_moments,
    subset_bipartition, Bipartition, DegreeSequence, Feasibility, InducedSubgraphSpec, Residual,
};
use crate::error::{Error, Result};
use crate::numeric::{
    falling_factorial, u_pairings, BigCount, FactorialExpr, LogValue, NumericPath,
};

/// Tunables for formula evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormulaConfig {
    /// Largest factorial argument evaluated with exact big integers.
    pub exact_threshold: u64,
    /// The Stirling form of the independent-set probability is flagged when
    /// `d (n - 2s)` is below this.
    pub stirling_threshold: f64,
    /// The simplified induced-subgraph form is flagged when its error hint
    /// exceeds this.
    pub regime_threshold: f64,
}

impl Default for FormulaConfig {
    fn default() -> Self {
        Self {
            exact_threshold: 10_000,
            stirling_threshold: 50.0,
            regime_threshold: 0.1,
        }
    }
}

/// The exponent actually applied, by formula family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ExponentTerms {
    None,
    /// `-mu - mu^2`.
    Single {
        mu: f64,
        mu_sq: f64,
    },
    /// `-mu0 - mu1 - mu2`.
    Bipartite {
        mu0: f64,
        mu1: f64,
        mu2: f64,
    },
    /// `-mu0(d') - mu1(d') - mu2(d') + mu(d) + mu(d)^2`.
    Induced {
        mu0: f64,
        mu1: f64,
        mu2: f64,
        mu: f64,
        mu_sq: f64,
    },
    /// `f(d, delta)`.
    Independent {
        f: f64,
    },
}

/// Conditions attached to a formula value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaFlag {
    /// Infeasible instance; the count is zero.
    Infeasible(Feasibility),
    /// `H` asks for more edges at `vertex` than its degree allows.
    NegativeResidual { vertex: usize },
    /// The residual sequence has `M_1(d', [n] \ S) < M_1(d', S)`.
    ResidualDeficit,
    /// The simplified form's error hint is above the configured threshold.
    OutsideRegime,
    /// `d (n - 2s)` is below the configured Stirling threshold.
    StirlingUnreliable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulaOutput {
    pub point: LogValue,
    pub exponent: ExponentTerms,
    /// The relative error scale of the asymptotic statement; never applied.
    pub error_hint: f64,
    pub path: NumericPath,
    pub flags: Vec<FormulaFlag>,
}

impl FormulaOutput {
    fn zero(flag: FormulaFlag) -> Self {
        Self {
            point: LogValue::zero(),
            exponent: ExponentTerms::None,
            error_hint: 0.0,
            path: NumericPath::Exact,
            flags: vec![flag],
        }
    }

    pub fn value(&self) -> f64 {
        self.point.value()
    }
}

/// Multiplies `expr` by `prod d_i!^{sign}`, grouping equal degrees.
fn with_degree_factorials(mut expr: FactorialExpr, degrees: &[u32], sign: i32) -> FactorialExpr {
    let mut counts: BTreeMap<u32, i32> = BTreeMap::new();
    for &d in degrees {
        if d > 1 {
            *counts.entry(d).or_default() += 1;
        }
    }
    for (d, c) in counts {
        expr = expr.factorial(u64::from(d), sign * c);
    }
    expr
}

/// `M_1(R)! / (2^t t! prod d_i!)`, shared by the plain and the bipartite count
/// so that `L = {}` gives bit-identical values.
fn pairing_prefactor(m1r: u64, t: u64, ds: &DegreeSequence) -> FactorialExpr {
    let expr = FactorialExpr::new()
        .factorial(m1r, 1)
        .power(2, -(t as i64))
        .factorial(t, -1);
    with_degree_factorials(expr, ds.degrees(), -1)
}

fn assemble(
    expr: &FactorialExpr,
    exponent: &BigRational,
    terms: ExponentTerms,
    error_hint: f64,
    cfg: &FormulaConfig,
) -> FormulaOutput {
    let (ln, path) = expr.ln_auto(cfg.exact_threshold);
    FormulaOutput {
        point: LogValue::from_ln(ln).scale_exp(rational_to_f64(exponent)),
        exponent: terms,
        error_hint,
        path,
        flags: Vec::new(),
    }
}

/// `|M(L, R, d)| = [M_1(R)]_{M_1(L)} U(M_1(R) - M_1(L))`; zero when infeasible.
pub fn count_restricted_pairings(ds: &DegreeSequence, bip: &Bipartition) -> Result<BigCount> {
    let (l, r) = side_moments(ds, bip)?;
    if !feasibility(ds, bip).is_feasible() {
        return Ok(BigCount::zero());
    }
    Ok(falling_factorial(r.m1, l.m1) * u_pairings(r.m1 - l.m1)?)
}

/// Asymptotic number of graphs with degree sequence `ds`:
/// `M! / (2^{M/2} (M/2)! prod d_i!) exp(-mu - mu^2)`.
pub fn g_asymptotic(ds: &DegreeSequence, cfg: &FormulaConfig) -> FormulaOutput {
    let m = ds.total();
    if m % 2 == 1 {
        return FormulaOutput::zero(FormulaFlag::Infeasible(Feasibility::OddTotal));
    }
    let mu = mu_single(ds);
    let mu_sq = &mu * &mu;
    let exponent = -(&mu + &mu_sq);
    let terms = ExponentTerms::Single {
        mu: rational_to_f64(&mu),
        mu_sq: rational_to_f64(&mu_sq),
    };
    assemble(
        &pairing_prefactor(m, m / 2, ds),
        &exponent,
        terms,
        ds.error_scale(),
        cfg,
    )
}

/// Asymptotic number of graphs with degree sequence `ds` in which `L` is
/// independent: `M_1(R)! exp(-mu0 - mu1 - mu2) / (2^t t! prod d_i!)`.
pub fn g_bgraph_asymptotic(
    ds: &DegreeSequence,
    bip: &Bipartition,
    cfg: &FormulaConfig,
) -> Result<FormulaOutput> {
    let (_, r) = side_moments(ds, bip)?;
    let feas = feasibility(ds, bip);
    if !feas.is_feasible() {
        return Ok(FormulaOutput::zero(FormulaFlag::Infeasible(feas)));
    }
    let mu = mu_parameters(ds, bip)?;
    let [mu0, mu1, mu2] = mu.to_f64();
    Ok(assemble(
        &pairing_prefactor(r.m1, mu.t, ds),
        &-mu.sum(),
        ExponentTerms::Bipartite { mu0, mu1, mu2 },
        ds.error_scale(),
        cfg,
    ))
}

/// Asymptotic probability that `G_S = H` in a uniform random graph with degrees
/// `ds`. Regular sequences use the regular specialization.
pub fn induced_probability_asymptotic(
    ds: &DegreeSequence,
    spec: &InducedSubgraphSpec,
    cfg: &FormulaConfig,
) -> Result<FormulaOutput> {
    match ds.regular_degree() {
        Some(_) => induced_probability_regular(ds, spec, cfg),
        None => induced_probability_general(ds, spec, cfg),
    }
}

/// Zero-probability screen shared by both induced forms.
fn induced_residual(
    ds: &DegreeSequence,
    spec: &InducedSubgraphSpec,
) -> Result<std::result::Result<(DegreeSequence, Bipartition), FormulaOutput>> {
    if ds.total() % 2 == 1 {
        return Err(Error::EmptyModel);
    }
    let bip = subset_bipartition(ds.n(), spec)?;
    Ok(match residual(ds, spec)? {
        Residual::Feasible(dp) => Ok((dp, bip)),
        Residual::NegativeDegree { vertex } => {
            Err(FormulaOutput::zero(FormulaFlag::NegativeResidual {
                vertex,
            }))
        }
        Residual::Deficit => Err(FormulaOutput::zero(FormulaFlag::ResidualDeficit)),
    })
}

fn prod_falling(
    expr: FactorialExpr,
    ds: &DegreeSequence,
    spec: &InducedSubgraphSpec,
) -> FactorialExpr {
    spec.subset()
        .iter()
        .zip(spec.degrees())
        .fold(expr, |e, (&v, &k)| {
            e.falling(u64::from(ds.degree(v)), u64::from(k), 1)
        })
}

/// General induced-subgraph probability:
/// `exp(-mu0(d') - mu1(d') - mu2(d') + mu + mu^2) prod [d_i]_{k_i}
///  M_1(d',R)! 2^{M_1(d',S) + h/2} (M/2)! / (((M_1(d',R) - M_1(d',S))/2)! M!)`.
pub fn induced_probability_general(
    ds: &DegreeSequence,
    spec: &InducedSubgraphSpec,
    cfg: &FormulaConfig,
) -> Result<FormulaOutput> {
    let (dp, bip) = match induced_residual(ds, spec)? {
        Ok(x) => x,
        Err(zero) => return Ok(zero),
    };
    let (l, r) = side_moments(&dp, &bip)?;
    let m = ds.total();
    let expr = prod_falling(FactorialExpr::new(), ds, spec)
        .factorial(r.m1, 1)
        .power(2, (l.m1 + spec.h() / 2) as i64)
        .factorial(m / 2, 1)
        .factorial((r.m1 - l.m1) / 2, -1)
        .factorial(m, -1);
    let mup = mu_parameters(&dp, &bip)?;
    let mu = mu_single(ds);
    let mu_sq = &mu * &mu;
    let exponent = -mup.sum() + &mu + &mu_sq;
    let [mu0, mu1, mu2] = mup.to_f64();
    let terms = ExponentTerms::Induced {
        mu0,
        mu1,
        mu2,
        mu: rational_to_f64(&mu),
        mu_sq: rational_to_f64(&mu_sq),
    };
    Ok(assemble(
        &expr,
        &exponent,
        terms,
        dp.error_scale() + ds.error_scale(),
        cfg,
    ))
}

/// Regular induced-subgraph probability:
/// `exp(-mu0(d') - mu1(d') - mu2(d') + (d^2-1)/4) prod [d]_{k_i}
///  (dn-ds)! (dn/2)! 2^{ds-h/2} / (((dn-2ds+h)/2)! (dn)!)`.
pub fn induced_probability_regular(
    ds: &DegreeSequence,
    spec: &InducedSubgraphSpec,
    cfg: &FormulaConfig,
) -> Result<FormulaOutput> {
    let d = ds
        .regular_degree()
        .ok_or_else(|| Error::OutOfRange("degree sequence is not regular".into()))?;
    let (dp, bip) = match induced_residual(ds, spec)? {
        Ok(x) => x,
        Err(zero) => return Ok(zero),
    };
    let (d, n, s, h) = (u64::from(d), ds.n() as u64, spec.s() as u64, spec.h());
    let expr = spec
        .degrees()
        .iter()
        .fold(FactorialExpr::new(), |e, &k| e.falling(d, u64::from(k), 1))
        .factorial(d * n - d * s, 1)
        .factorial(d * n / 2, 1)
        .power(2, (d * s) as i64 - (h / 2) as i64)
        .factorial((d * n + h - 2 * d * s) / 2, -1)
        .factorial(d * n, -1);
    let mup = mu_parameters(&dp, &bip)?;
    let quarter = BigRational::new(BigInt::from(d * d) - 1, BigInt::from(4));
    let exponent = -mup.sum() + &quarter;
    let [mu0, mu1, mu2] = mup.to_f64();
    let mu = rational_to_f64(&mu_single(ds));
    let terms = ExponentTerms::Induced {
        mu0,
        mu1,
        mu2,
        mu,
        mu_sq: mu * mu,
    };
    let hint = if d * n > h {
        (d as f64).powi(4) / (d * n - h) as f64
    } else {
        0.0
    };
    Ok(assemble(&expr, &exponent, terms, hint, cfg))
}

/// Small-`H` form for `d`-regular graphs: `(dn)^{-h/2} prod [d]_{k_i}`.
/// The error hint is `(d^3 + s^2 d + d^2 s) / n`.
pub fn induced_probability_simplified(
    n: u64,
    d: u32,
    spec: &InducedSubgraphSpec,
    cfg: &FormulaConfig,
) -> Result<FormulaOutput> {
    if n == 0 {
        return Err(Error::OutOfRange("n must be positive".into()));
    }
    let d = u64::from(d);
    let expr = spec
        .degrees()
        .iter()
        .fold(FactorialExpr::new(), |e, &k| e.falling(d, u64::from(k), 1))
        .power(d * n, -((spec.h() / 2) as i64));
    let s = spec.s() as f64;
    let df = d as f64;
    let hint = (df.powi(3) + s * s * df + df * df * s) / n as f64;
    let mut out = assemble(&expr, &BigRational::zero(), ExponentTerms::None, hint, cfg);
    if hint > cfg.regime_threshold {
        out.flags.push(FormulaFlag::OutsideRegime);
    }
    Ok(out)
}

/// `f(d, delta) = -delta (d-1) (delta d - 2 + delta) / (4 (1-delta)^2)` at
/// `delta = s/n`, exactly.
pub fn f_independent_exact(n: u64, d: u32, s: u64) -> BigRational {
    let (n, d, s) = (BigInt::from(n), BigInt::from(d), BigInt::from(s));
    let one = BigInt::from(1);
    let num: BigInt = -(&s * (&d - &one) * (&s * &d - BigInt::from(2) * &n + &s));
    let den = BigInt::from(4) * (&n - &s) * (&n - &s);
    BigRational::new(num, den)
}

/// `f(d, delta)` in floating point.
pub fn f_independent(d: f64, delta: f64) -> f64 {
    -delta * (d - 1.0) * (delta * d - 2.0 + delta) / (4.0 * (1.0 - delta).powi(2))
}

/// The full and the Stirling-simplified independent-set probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependentSetOutput {
    pub full: FormulaOutput,
    pub stirling: FormulaOutput,
}

/// Probability that a fixed `s`-set is independent in a random `d`-regular
/// graph on `n` vertices, for `s < n/2`.
pub fn independent_set_probability(
    n: u64,
    d: u32,
    s: u64,
    cfg: &FormulaConfig,
) -> Result<IndependentSetOutput> {
    if 2 * s >= n {
        return Err(Error::OutOfRange(format!(
            "independent-set size {s} must be below n/2 = {}",
            n as f64 / 2.0
        )));
    }
    let dd = u64::from(d);
    if (dd * n) % 2 == 1 {
        return Err(Error::Infeasible(Feasibility::OddTotal));
    }
    let f = f_independent_exact(n, d, s);
    let f64f = rational_to_f64(&f);
    let hint = if n > 0 {
        (dd as f64).powi(3) / n as f64
    } else {
        0.0
    };
    let expr = FactorialExpr::new()
        .factorial(dd * n - dd * s, 1)
        .factorial(dd * n / 2, 1)
        .power(2, (dd * s) as i64)
        .factorial((dd * n - 2 * dd * s) / 2, -1)
        .factorial(dd * n, -1);
    let full = assemble(&expr, &f, ExponentTerms::Independent { f: f64f }, hint, cfg);

    let delta = s as f64 / n as f64;
    let a = 1.0 - delta;
    let b = 1.0 - 2.0 * delta;
    let base = a * a.ln() - b / 2.0 * b.ln();
    let ln = 0.5 * (a / b).ln() + (dd * n) as f64 * base + f64f;
    let gap = (dd * (n - 2 * s)) as f64;
    let mut stirling = FormulaOutput {
        point: LogValue::from_ln(ln),
        exponent: ExponentTerms::Independent { f: f64f },
        error_hint: hint + if gap > 0.0 { 1.0 / gap } else { f64::INFINITY },
        path: NumericPath::LogGamma,
        flags: Vec::new(),
    };
    if gap < cfg.stirling_threshold {
        stirling.flags.push(FormulaFlag::StirlingUnreliable);
    }
    Ok(IndependentSetOutput { full, stirling })
}
