//! Ordinary least squares for reading-time prediction.
//!
//! Coefficients are solved through a column-pivoted QR decomposition rather
//! than the raw normal equations. Log-likelihoods use the Gaussian MLE
//! variance (divisor n); standard errors use the unbiased estimator
//! (divisor n - p - 1). A residual-variance floor of 1e-12 keeps exact-fit
//! fixtures finite.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::surprisal::FeatureRow;

pub const SIGMA2_FLOOR: f64 = 1e-12;

/// Named predictor columns of a design matrix.
pub type DesignColumns = Vec<(String, Vec<f64>)>;

/// One regression predictor: a feature type at a spillover lag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predictor {
    Surprisal(usize),
    Length(usize),
    LogFreq(usize),
}

impl Predictor {
    pub fn name(&self) -> String {
        match self {
            Predictor::Surprisal(lag) => format!("s{lag}"),
            Predictor::Length(lag) => format!("len{lag}"),
            Predictor::LogFreq(lag) => format!("f{lag}"),
        }
    }

    pub fn lag(&self) -> usize {
        match self {
            Predictor::Surprisal(l) | Predictor::Length(l) | Predictor::LogFreq(l) => *l,
        }
    }

    pub fn extract(&self, row: &FeatureRow) -> f64 {
        match self {
            Predictor::Surprisal(lag) => row.lags[*lag].surprisal,
            Predictor::Length(lag) => row.lags[*lag].length,
            Predictor::LogFreq(lag) => row.lags[*lag].log_freq,
        }
    }
}

/// Control features: length and log frequency at lags 0..=k.
pub fn baseline_predictors(k: usize) -> Vec<Predictor> {
    (0..=k)
        .flat_map(|lag| [Predictor::Length(lag), Predictor::LogFreq(lag)])
        .collect()
}

/// Controls plus surprisal at lags 0..=k.
pub fn full_predictors(k: usize) -> Vec<Predictor> {
    let mut preds = baseline_predictors(k);
    preds.extend((0..=k).map(Predictor::Surprisal));
    preds
}

/// A fitted OLS model.
#[derive(Debug, Clone)]
pub struct RegressionFit {
    pub predictor_names: Vec<String>,
    /// Intercept first, then one coefficient per predictor.
    pub coefficients: Vec<f64>,
    /// Maximum-likelihood residual variance (divisor n), floored.
    pub sigma2: f64,
    /// Gaussian log-likelihood at the MLE.
    pub loglik: f64,
    pub r2: f64,
    pub n: usize,
    pub p: usize,
    pub rss: f64,
    pub exact_fit: bool,
    /// Unscaled coefficient covariance, (X'X)^-1.
    cov_unscaled: DMatrix<f64>,
}

/// Per-token log-likelihood difference between nested fits.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeltaLogLik {
    pub value: f64,
    pub n: usize,
}

/// Fits reading-time rows with an intercept plus the named predictors.
pub fn fit_ols(rows: &[FeatureRow], predictors: &[Predictor]) -> Result<RegressionFit> {
    let (y, columns) = design(rows, predictors)?;
    fit_ols_columns(&y, &columns)
}

/// Extracts the response and named predictor columns from feature rows.
pub fn design(
    rows: &[FeatureRow],
    predictors: &[Predictor],
) -> Result<(Vec<f64>, DesignColumns)> {
    if let Some(row) = rows.first() {
        let max_lag = predictors.iter().map(Predictor::lag).max().unwrap_or(0);
        if max_lag > row.spillover() {
            return Err(Error::Config(format!(
                "predictor lag {} exceeds the rows' spillover window {}",
                max_lag,
                row.spillover()
            )));
        }
    }
    let y: Vec<f64> = rows.iter().map(|r| r.rt_ms).collect();
    let columns = predictors
        .iter()
        .map(|pred| (pred.name(), rows.iter().map(|r| pred.extract(r)).collect()))
        .collect();
    Ok((y, columns))
}

/// Core fit over an explicit response and predictor columns.
pub fn fit_ols_columns(y: &[f64], columns: &[(String, Vec<f64>)]) -> Result<RegressionFit> {
    let n = y.len();
    let p = columns.len();
    let pc = p + 1;
    if n <= pc {
        return Err(Error::Validation(format!(
            "need more than {pc} rows to fit {p} predictors, got {n}"
        )));
    }
    for (name, col) in columns {
        if col.len() != n {
            return Err(Error::Validation(format!(
                "column {name} has {} values for {n} responses",
                col.len()
            )));
        }
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("column {name} contains non-finite values")));
        }
    }

    let mut x = DMatrix::<f64>::zeros(n, pc);
    x.column_mut(0).fill(1.0);
    for (j, (_, col)) in columns.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            x[(i, j + 1)] = v;
        }
    }
    let yv = DVector::from_column_slice(y);

    let qr = x.clone().col_piv_qr();
    let r = qr.r();
    let rdiag_max = (0..pc).map(|i| r[(i, i)].abs()).fold(0.0f64, f64::max);
    let tol = f64::EPSILON * (n.max(pc) as f64) * rdiag_max;

    // Permutation as an explicit matrix: beta = perm * z where z solves the
    // permuted triangular system.
    let mut perm = DMatrix::<f64>::identity(pc, pc);
    qr.p().inv_permute_rows(&mut perm);

    let deficient: Vec<usize> = (0..pc).filter(|&i| r[(i, i)].abs() <= tol).collect();
    if !deficient.is_empty() {
        let names: Vec<String> = deficient
            .iter()
            .map(|&j| {
                let orig = (0..pc)
                    .find(|&i| perm[(i, j)] == 1.0)
                    .expect("permutation matrix has a unit entry per column");
                if orig == 0 {
                    "intercept".to_string()
                } else {
                    columns[orig - 1].0.clone()
                }
            })
            .collect();
        return Err(Error::SingularDesign { columns: names });
    }

    let qty = qr.q().transpose() * &yv;
    let z = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::SingularDesign {
            columns: vec!["<unknown>".into()],
        })?;
    let beta = &perm * z;

    let fitted = &x * &beta;
    let residuals = &yv - &fitted;
    let rss = residuals.dot(&residuals);

    // (X'X)^-1 = perm (R'R)^-1 perm'.
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(pc, pc))
        .expect("full-rank R is invertible");
    let cov_z = &r_inv * r_inv.transpose();
    let cov_unscaled = &perm * cov_z * perm.transpose();

    let sigma2 = (rss / n as f64).max(SIGMA2_FLOOR);
    let exact_fit = rss / n as f64 <= SIGMA2_FLOOR;
    let loglik = gaussian_loglik(n, sigma2);
    let y_mean = yv.mean();
    let sst: f64 = yv.iter().map(|v| (v - y_mean).powi(2)).sum();
    let r2 = if sst <= f64::EPSILON * n as f64 {
        0.0
    } else {
        (1.0 - rss / sst).clamp(0.0, 1.0)
    };

    Ok(RegressionFit {
        predictor_names: columns.iter().map(|(n, _)| n.clone()).collect(),
        coefficients: beta.iter().copied().collect(),
        sigma2,
        loglik,
        r2,
        n,
        p,
        rss,
        exact_fit,
        cov_unscaled,
    })
}

fn gaussian_loglik(n: usize, sigma2: f64) -> f64 {
    -(n as f64) / 2.0 * ((2.0 * std::f64::consts::PI * sigma2).ln() + 1.0)
}

impl RegressionFit {
    /// Fitted value for one row under this fit's predictor set.
    pub fn predict(&self, row: &FeatureRow, predictors: &[Predictor]) -> f64 {
        debug_assert_eq!(predictors.len(), self.p);
        let mut v = self.coefficients[0];
        for (j, pred) in predictors.iter().enumerate() {
            v += self.coefficients[j + 1] * pred.extract(row);
        }
        v
    }

    /// Total Gaussian log-likelihood of held-out rows under the training
    /// coefficients and training residual variance.
    pub fn heldout_loglik(&self, rows: &[FeatureRow], predictors: &[Predictor]) -> f64 {
        let m = rows.len() as f64;
        let rss: f64 = rows
            .iter()
            .map(|row| (row.rt_ms - self.predict(row, predictors)).powi(2))
            .sum();
        -m / 2.0 * (2.0 * std::f64::consts::PI * self.sigma2).ln() - rss / (2.0 * self.sigma2)
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        if name == "intercept" {
            return Some(self.coefficients[0]);
        }
        self.predictor_names
            .iter()
            .position(|n| n == name)
            .map(|i| self.coefficients[i + 1])
    }
}

/// In-sample per-token log-likelihood difference between a baseline and a
/// full model fit on the same rows. Non-negative for nested predictor sets.
pub fn delta_loglik(
    rows: &[FeatureRow],
    baseline: &[Predictor],
    full: &[Predictor],
) -> Result<DeltaLogLik> {
    if !baseline.iter().all(|b| full.contains(b)) {
        return Err(Error::Validation(
            "baseline predictors must be a subset of the full predictors".into(),
        ));
    }
    let base_fit = fit_ols(rows, baseline)?;
    let full_fit = fit_ols(rows, full)?;
    Ok(DeltaLogLik {
        value: (full_fit.loglik - base_fit.loglik) / rows.len() as f64,
        n: rows.len(),
    })
}

/// One coefficient's classical OLS test.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientTest {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientTests {
    pub tests: Vec<CoefficientTest>,
    pub df: usize,
    pub exact_fit: bool,
}

/// Classical t statistics and two-sided p-values, using the unbiased
/// variance estimator. Exact fits report p = 0 with a warning flag.
pub fn coefficient_tests(fit: &RegressionFit) -> Result<CoefficientTests> {
    let df = fit.n - fit.p - 1;
    let sigma2_hat = fit.rss / df as f64;
    let exact_fit = sigma2_hat <= SIGMA2_FLOOR;
    if exact_fit {
        log::warn!("exact fit: residual variance ~ 0; reporting p = 0 for all coefficients");
    }
    let t_dist = StudentsT::new(0.0, 1.0, df as f64)
        .map_err(|e| Error::Validation(format!("bad t distribution: {e}")))?;

    let mut tests = Vec::with_capacity(fit.p + 1);
    for i in 0..=fit.p {
        let name = if i == 0 {
            "intercept".to_string()
        } else {
            fit.predictor_names[i - 1].clone()
        };
        let estimate = fit.coefficients[i];
        let (std_error, t, p_value) = if exact_fit {
            (0.0, f64::INFINITY * estimate.signum(), 0.0)
        } else {
            let se = (sigma2_hat * fit.cov_unscaled[(i, i)]).sqrt();
            let t = estimate / se;
            (se, t, 2.0 * (1.0 - t_dist.cdf(t.abs())))
        };
        tests.push(CoefficientTest {
            name,
            estimate,
            std_error,
            t,
            p_value,
        });
    }
    Ok(CoefficientTests {
        tests,
        df,
        exact_fit,
    })
}

/// Cohen's f² for nested fits: (r2_full - r2_base) / (1 - r2_full).
pub fn cohens_f2(baseline: &RegressionFit, full: &RegressionFit) -> Result<f64> {
    if baseline.n != full.n {
        return Err(Error::Validation(
            "effect size requires fits over identical rows".into(),
        ));
    }
    if 1.0 - full.r2 <= f64::EPSILON {
        return Err(Error::InfiniteEffect);
    }
    Ok((full.r2 - baseline.r2) / (1.0 - full.r2))
}

/// Serializable fit summary: the JSON fit-report interface.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t: Vec<f64>,
    pub p_values: Vec<f64>,
    pub r2: f64,
    pub loglik: f64,
    pub n: usize,
    pub p: usize,
}

pub fn fit_report(fit: &RegressionFit) -> Result<FitReport> {
    let tests = coefficient_tests(fit)?;
    Ok(FitReport {
        names: tests.tests.iter().map(|t| t.name.clone()).collect(),
        coefficients: tests.tests.iter().map(|t| t.estimate).collect(),
        std_errors: tests.tests.iter().map(|t| t.std_error).collect(),
        t: tests.tests.iter().map(|t| t.t).collect(),
        p_values: tests.tests.iter().map(|t| t.p_value).collect(),
        r2: fit.r2,
        loglik: fit.loglik,
        n: fit.n,
        p: fit.p,
    })
}
