//! Conditional independence tests built on the histogram CMI estimate.
//!
//! Both tests shrink the plug-in estimate by a negative correction and call
//! the pair independent when nothing is left:
//! `corrected = max(0, I_n + C_n)`.
//!
//! * chi-squared: `C_n = −χ²_{α,df} / 2n` with `df = (|X|−1)(|Y|−1)|Z|`;
//!   `2n·I` (nats) is the likelihood-ratio statistic.
//! * stochastic complexity: each plug-in entropy is replaced by its NML
//!   code length per sample, so `C_n` is a signed sum of four regret terms.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_lr;

use crate::causal::CiOracle;
use crate::complexity::log_regret;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimators::{cmi_estimate, EstimateResult, VariableGroup};
use crate::histmd::FitConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "method")]
pub enum CiMethod {
    Chi2 { alpha: f64 },
    Sc,
}

impl CiMethod {
    pub fn name(&self) -> &'static str {
        match self {
            CiMethod::Chi2 { .. } => "chi2",
            CiMethod::Sc => "sc",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CITestResult {
    pub method: CiMethod,
    /// Plug-in CMI estimate, nats.
    pub raw: f64,
    /// Non-positive correction, nats.
    pub correction: f64,
    pub corrected: f64,
    pub independent: bool,
    /// Degrees of freedom (chi-squared only).
    pub df: Option<u64>,
    pub critical_value: Option<f64>,
    /// Signed regret sum in bits before division by n (SC only).
    pub regret_bits: Option<f64>,
    /// Set when the SC correction came out positive and was clamped to zero.
    pub positive_correction_clamped: bool,
    pub domain_x: u64,
    pub domain_y: u64,
    pub domain_z: u64,
    pub n: usize,
}

/// Upper `alpha` quantile of the chi-squared distribution with `df` degrees of freedom.
///
/// Bisection on the regularized lower incomplete gamma function.
pub fn chi2_critical(alpha: f64, df: u64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if df == 0 {
        return Err(Error::InvalidInput("chi-squared needs df >= 1".into()));
    }
    let target = 1.0 - alpha;
    let half_df = df as f64 / 2.0;
    let cdf = |x: f64| if x <= 0.0 { 0.0 } else { gamma_lr(half_df, x / 2.0) };

    let mut lo = 0.0;
    let mut hi = (df as f64).max(1.0);
    while cdf(hi) < target {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..2000 {
        let tol = 1e-10f64.max(4.0 * f64::EPSILON * hi);
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn degenerate(est: &EstimateResult) -> bool {
    est.domain_x <= 1 || est.domain_y <= 1
}

fn base_result(est: &EstimateResult, method: CiMethod) -> CITestResult {
    CITestResult {
        method,
        raw: est.value,
        correction: 0.0,
        corrected: 0.0,
        independent: true,
        df: None,
        critical_value: None,
        regret_bits: None,
        positive_correction_clamped: false,
        domain_x: est.domain_x,
        domain_y: est.domain_y,
        domain_z: est.domain_z,
        n: est.n,
    }
}

fn finish(mut r: CITestResult) -> CITestResult {
    r.corrected = (r.raw + r.correction).max(0.0);
    r.independent = r.corrected == 0.0;
    r
}

/// Applies the chi-squared correction to an existing estimate.
pub fn chi2_from_estimate(est: &EstimateResult, alpha: f64) -> Result<CITestResult> {
    let mut r = base_result(est, CiMethod::Chi2 { alpha });
    if degenerate(est) {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        r.df = Some(0);
        return Ok(r);
    }
    let df = (est.domain_x - 1) * (est.domain_y - 1) * est.domain_z.max(1);
    let critical = chi2_critical(alpha, df)?;
    r.df = Some(df);
    r.critical_value = Some(critical);
    r.correction = -critical / (2.0 * est.n as f64);
    Ok(finish(r))
}

/// Applies the stochastic-complexity correction to an existing estimate.
pub fn sc_from_estimate(est: &EstimateResult) -> Result<CITestResult> {
    let mut r = base_result(est, CiMethod::Sc);
    if degenerate(est) {
        r.regret_bits = Some(0.0);
        return Ok(r);
    }
    let n = est.n;
    let bits = log_regret(n, est.cells_xz)? + log_regret(n, est.cells_yz)?
        - log_regret(n, est.cells_xyz)?
        - log_regret(n, est.domain_z.max(1))?;
    r.regret_bits = Some(bits);
    let correction = bits * LN_2 / n as f64;
    if correction > 0.0 {
        r.positive_correction_clamped = true;
    } else {
        r.correction = correction;
    }
    Ok(finish(r))
}

/// Chi-squared corrected test of X ⊥ Y | Z.
pub fn citest_chi2(
    dataset: &Dataset,
    x: &VariableGroup,
    y: &VariableGroup,
    z: &VariableGroup,
    alpha: f64,
    config: &FitConfig,
) -> Result<CITestResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    chi2_from_estimate(&cmi_estimate(dataset, x, y, z, config)?, alpha)
}

/// Stochastic-complexity corrected test of X ⊥ Y | Z.
pub fn citest_sc(
    dataset: &Dataset,
    x: &VariableGroup,
    y: &VariableGroup,
    z: &VariableGroup,
    config: &FitConfig,
) -> Result<CITestResult> {
    sc_from_estimate(&cmi_estimate(dataset, x, y, z, config)?)
}

/// Runs either test with X, Y and Z given as single dataset columns.
pub fn run_test(
    dataset: &Dataset,
    method: CiMethod,
    x: usize,
    y: usize,
    given: &[usize],
    config: &FitConfig,
) -> Result<CITestResult> {
    let gx = VariableGroup::new("X", vec![x]);
    let gy = VariableGroup::new("Y", vec![y]);
    let gz = VariableGroup::new("Z", given.to_vec());
    match method {
        CiMethod::Chi2 { alpha } => citest_chi2(dataset, &gx, &gy, &gz, alpha, config),
        CiMethod::Sc => citest_sc(dataset, &gx, &gy, &gz, config),
    }
}

/// Data-driven CI oracle for skeleton discovery.
///
/// Queries are canonicalised by column name, so the answer does not depend
/// on the order in which variables or conditioning sets are presented.
pub struct DataCiTest<'a> {
    pub dataset: &'a Dataset,
    pub method: CiMethod,
    pub config: FitConfig,
}

impl CiOracle for DataCiTest<'_> {
    fn independent(&self, x: usize, y: usize, given: &[usize]) -> Result<bool> {
        let name = |i: usize| self.dataset.column(i).name();
        let (a, b) = if name(x) <= name(y) { (x, y) } else { (y, x) };
        let mut given = given.to_vec();
        given.sort_by(|&p, &q| name(p).cmp(name(q)));
        run_test(self.dataset, self.method, a, b, &given, &self.config)
            .map(|r| r.independent)
            .map_err(|e| Error::CiQuery {
                x: name(a).to_string(),
                y: name(b).to_string(),
                given: given.iter().map(|&g| name(g).to_string()).collect(),
                message: e.to_string(),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi2_quantiles() {
        assert!((chi2_critical(0.01, 1).unwrap() - 6.634896601021214).abs() < 1e-8);
        assert!((chi2_critical(0.05, 2).unwrap() + 2.0 * 0.05f64.ln()).abs() < 1e-8);
        assert!(chi2_critical(1.0 - 1e-12, 3).unwrap() < 1e-3);
        assert!(chi2_critical(0.0, 3).is_err());
        assert!(chi2_critical(1.0, 3).is_err());
        assert!(chi2_critical(0.05, 0).is_err());
        // large df stays near df + z·sqrt(2 df)
        let q = chi2_critical(0.01, 10_000).unwrap();
        assert!((q - 10_331.1).abs() < 1.0, "{q}");
    }

    #[test]
    fn constant_column_is_independent() {
        let v: Vec<f64> = (0..200).map(|i| (i as f64 * 0.37).sin()).collect();
        let ds = Dataset::from_raw(&["c", "v"], &[vec![2.0; 200], v], 5).unwrap();
        let x = VariableGroup::new("X", vec![0]);
        let y = VariableGroup::new("Y", vec![1]);
        let z = VariableGroup::new("Z", vec![]);
        let cfg = FitConfig::default();
        let r = citest_chi2(&ds, &x, &y, &z, 0.01, &cfg).unwrap();
        assert!(r.independent);
        assert_eq!((r.corrected, r.correction, r.df), (0.0, 0.0, Some(0)));
        let r = citest_sc(&ds, &x, &y, &z, &cfg).unwrap();
        assert!(r.independent);
        assert_eq!(r.correction, 0.0);
    }

    #[test]
    fn alpha_is_checked() {
        let ds = Dataset::from_raw(&["a", "b"], &[vec![0.0; 10], vec![1.0; 10]], 5).unwrap();
        let x = VariableGroup::new("X", vec![0]);
        let y = VariableGroup::new("Y", vec![1]);
        let z = VariableGroup::new("Z", vec![]);
        assert!(citest_chi2(&ds, &x, &y, &z, 1.5, &FitConfig::default()).is_err());
    }
}
