//! One-dimensional rate-doubling study: equal versus optimal weights on the
//! left-Riemann lattice, with every computed quantity cross-checked against
//! the closed forms from `analytic1d`.

use crate::analytic1d;
use crate::cubature::{
    assemble_gram, solve_optimal_weights, wce_equal, wce_optimal_from_weights, CubatureRule,
};
use crate::kernel::{CoordinateWeights, KernelSpec};
use crate::points::{generate_lattice, GeneratingVector};
use crate::rates::{fit_rate, RateFit};
use crate::{Error, Result};

/// Test integrands with exact integrals over [0,1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrand {
    /// exp(x), integral e - 1.
    Exp,
    /// x^2, integral 1/3.
    Square,
    /// 1/(1 + 25 x^2), integral atan(5)/5.
    Runge,
}

impl Integrand {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "exp" => Ok(Integrand::Exp),
            "square" => Ok(Integrand::Square),
            "runge" => Ok(Integrand::Runge),
            other => Err(Error::InvalidConfig(format!(
                "unknown integrand {other:?}; expected exp, square, or runge"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Integrand::Exp => "exp",
            Integrand::Square => "square",
            Integrand::Runge => "runge",
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Integrand::Exp => x.exp(),
            Integrand::Square => x * x,
            Integrand::Runge => 1.0 / (1.0 + 25.0 * x * x),
        }
    }

    pub fn integral(self) -> f64 {
        match self {
            Integrand::Exp => std::f64::consts::E - 1.0,
            Integrand::Square => 1.0 / 3.0,
            Integrand::Runge => 5.0f64.atan() / 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OnedRow {
    pub n: u64,
    pub err_equal: f64,
    pub err_optimal: f64,
    pub wce_equal: f64,
    pub wce_optimal: f64,
    /// Largest entrywise gap between solved and closed-form weights.
    pub delta_weights: f64,
    /// Gap between the solved squared worst-case error and (n+3)/(12n^3+n+3).
    pub delta_wce_sq: f64,
    /// Gap between the Gram entry sum and (3n^2+1)/3.
    pub delta_gram: f64,
}

#[derive(Debug, Clone)]
pub struct OnedReport {
    pub integrand: Integrand,
    pub rows: Vec<OnedRow>,
    pub slope_equal: RateFit,
    pub slope_optimal: RateFit,
}

fn check_schedule(schedule: &[u64], min_n: u64) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidConfig("n-schedule is empty".into()));
    }
    for pair in schedule.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::InvalidConfig(
                "n-schedule must be strictly increasing".into(),
            ));
        }
    }
    for &n in schedule {
        if !n.is_power_of_two() || n < min_n {
            return Err(Error::InvalidConfig(format!(
                "schedule entry {n} must be a power of two at least {min_n}"
            )));
        }
    }
    Ok(())
}

/// Fits log2 error against log2 n, dropping the two smallest n when enough
/// points remain; small pre-asymptotic n would otherwise bias the slope.
pub fn fit_with_default_window(ns: &[f64], errs: &[f64]) -> Result<RateFit> {
    if ns.len() >= 5 {
        fit_rate(&ns[2..], &errs[2..])
    } else {
        fit_rate(ns, errs)
    }
}

/// Runs the study over the given n-schedule (powers of two, n >= 2) on the
/// one-dimensional lattice t_k = k/n with the order-1 unit-weight kernel.
pub fn run_oned(schedule: &[u64], integrand: Integrand) -> Result<OnedReport> {
    check_schedule(schedule, 2)?;
    let spec = KernelSpec::new(1, CoordinateWeights::product(vec![1.0])?)?;
    let exact = integrand.integral();

    let mut rows = Vec::with_capacity(schedule.len());
    for &n in schedule {
        let gv = GeneratingVector::new(n, &[1])?;
        let points = generate_lattice(&gv);
        let gram = assemble_gram(&spec, &points)?;
        let weights = solve_optimal_weights(&gram)?;

        let oracle_w = analytic1d::closed_form_weights(n)?;
        let delta_weights = weights
            .iter()
            .zip(&oracle_w)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let wce_opt = wce_optimal_from_weights(&weights)?;
        let delta_wce_sq = (wce_opt * wce_opt - analytic1d::optimal_wce_sq(n)?).abs();
        let delta_gram = (gram.double_sum() - analytic1d::gram_double_sum(n)?).abs();

        let wce_eq = wce_equal(&spec, &points)?;
        let equal_rule = CubatureRule::equal_weight(points.clone())?;
        let optimal_rule = CubatureRule::from_weights(points, weights)?;
        let err_equal = (equal_rule.apply(|x| integrand.eval(x[0])) - exact).abs();
        let err_optimal = (optimal_rule.apply(|x| integrand.eval(x[0])) - exact).abs();

        rows.push(OnedRow {
            n,
            err_equal,
            err_optimal,
            wce_equal: wce_eq,
            wce_optimal: wce_opt,
            delta_weights,
            delta_wce_sq,
            delta_gram,
        });
    }

    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let eq: Vec<f64> = rows.iter().map(|r| r.err_equal).collect();
    let opt: Vec<f64> = rows.iter().map(|r| r.err_optimal).collect();
    let slope_equal = fit_with_default_window(&ns, &eq)?;
    let slope_optimal = fit_with_default_window(&ns, &opt)?;

    Ok(OnedReport {
        integrand,
        rows,
        slope_equal,
        slope_optimal,
    })
}
