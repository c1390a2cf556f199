//! Parametric elliptic model problem on the unit square and its uncertainty
//! quantification experiment: expected value of an integral quantity of
//! interest over a diffusion coefficient with affine parameter dependence,
//! estimated by lattice cubature in the parameter domain.

pub mod fem;
pub mod mesh;
pub mod uq;

pub use fem::solve_diffusion;
pub use mesh::{qoi, Mesh};
pub use uq::{run_uq_experiment, Method, ReferenceShift, UqConfig, UqResult, UqRow};

use crate::kernel::CoordinateWeights;
use crate::sum::Accumulator;
use crate::{Error, Result};

/// Diffusion coefficient `a(x, y) = 1/2 + (1/2) sum_j j^-2 y_j sin(j pi x1)
/// sin(j pi x2)` with parameters `y` in `[-1/2, 1/2]^s`.
///
/// Since `sum_j j^-2 <= pi^2/6 < 4`, the coefficient stays above
/// `1/2 - pi^2/24 > 0` uniformly in the parameters.
#[derive(Debug, Clone)]
pub struct ParametricCoefficient {
    inv_j_sq: Vec<f64>,
}

impl ParametricCoefficient {
    pub fn new(s: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::DomainTooSmall {
                op: "ParametricCoefficient::new",
                min: 1,
                n: 0,
            });
        }
        Ok(ParametricCoefficient {
            inv_j_sq: (1..=s).map(|j| 1.0 / (j * j) as f64).collect(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.inv_j_sq.len()
    }

    pub fn validate_y(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                context: "coefficient parameters",
                expected: self.dimension(),
                actual: y.len(),
            });
        }
        for (index, &value) in y.iter().enumerate() {
            if !(-0.5..=0.5).contains(&value) {
                return Err(Error::ParameterOutOfRange { index, value });
            }
        }
        Ok(())
    }

    pub fn eval(&self, x1: f64, x2: f64, y: &[f64]) -> Result<f64> {
        self.validate_y(y)?;
        Ok(self.eval_unchecked(x1, x2, y))
    }

    fn eval_unchecked(&self, x1: f64, x2: f64, y: &[f64]) -> f64 {
        debug_assert!((0.0..=1.0).contains(&x1) && (0.0..=1.0).contains(&x2));
        let mut acc = 0.5;
        for (j, (&yj, &inv)) in y.iter().zip(&self.inv_j_sq).enumerate() {
            let freq = (j + 1) as f64 * std::f64::consts::PI;
            acc += 0.5 * yj * inv * (freq * x1).sin() * (freq * x2).sin();
        }
        acc
    }
}

/// Solves the parametric problem at one parameter value and returns the
/// nodal P1 solution (zeros on the boundary).
pub fn solve_pde<F>(
    mesh: &Mesh,
    coeff: &ParametricCoefficient,
    y: &[f64],
    source: F,
    cg_tol: f64,
) -> Result<Vec<f64>>
where
    F: Fn(f64, f64) -> f64,
{
    coeff.validate_y(y)?;
    solve_diffusion(
        mesh,
        |x1, x2| coeff.eval_unchecked(x1, x2, y),
        source,
        cg_tol,
    )
}

/// Riemann zeta for real `x > 1` by an Euler-Maclaurin corrected partial
/// sum: 99 explicit terms, the integral tail, the half-term, and four
/// Bernoulli corrections. Absolute error is far below 1e-12 for `x >= 1.05`.
pub fn riemann_zeta(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 1.0 {
        return Err(Error::ZetaDomain(x));
    }
    let n = 100.0f64;
    let mut acc = Accumulator::new();
    for k in 1..100u32 {
        acc.add((k as f64).powf(-x));
    }
    acc.add(n.powf(1.0 - x) / (x - 1.0));
    acc.add(0.5 * n.powf(-x));
    // B_{2j}/(2j)! * x(x+1)...(x+2j-2) * n^{-x-2j+1} for j = 1..=4.
    let coeffs = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
    ];
    for (j, c) in coeffs.iter().enumerate() {
        let rising: f64 = (0..=2 * j).map(|i| x + i as f64).product();
        acc.add(c * rising * n.powf(-x - (2 * j + 1) as f64));
    }
    Ok(acc.value())
}

/// Product-and-order-dependent coordinate weights for the diffusion problem:
/// `gamma_u = (|u|! prod_{j in u} b_j / D)^(2/(1+lambda))` with
/// `b_j = (1 - zeta(2)/2)^{-1} j^{-2}`, `D = sqrt(2 zeta(2 lambda) /
/// (2 pi^2)^lambda)` and `lambda = 1/(2 - 2 delta)`, returned in factored
/// form with `Gamma_l = (l!)^(2/(1+lambda))`.
pub fn pod_weights_uq(s: usize, delta: f64) -> Result<CoordinateWeights> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    let lambda = 1.0 / (2.0 - 2.0 * delta);
    let expo = 2.0 / (1.0 + lambda);
    let d = uq_normalizer(lambda)?;
    let b_scale = uq_b_scale();
    let gamma_tilde: Vec<f64> = (1..=s)
        .map(|j| (b_scale / (j * j) as f64 / d).powf(expo))
        .collect();
    let mut gamma_order = Vec::with_capacity(s + 1);
    let mut factorial = 1.0f64;
    gamma_order.push(1.0);
    for l in 1..=s {
        factorial *= l as f64;
        gamma_order.push(factorial.powf(expo));
    }
    CoordinateWeights::pod(gamma_tilde, gamma_order)
}

/// `(1 - zeta(2)/2)^{-1}`, the scale of the coefficient fluctuation bounds.
pub fn uq_b_scale() -> f64 {
    let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
    1.0 / (1.0 - zeta2 / 2.0)
}

/// `sqrt(2 zeta(2 lambda) / (2 pi^2)^lambda)`, the shift-averaged error
/// normalizer.
pub fn uq_normalizer(lambda: f64) -> Result<f64> {
    let two_pi_sq = 2.0 * std::f64::consts::PI.powi(2);
    Ok((2.0 * riemann_zeta(2.0 * lambda)? / two_pi_sq.powf(lambda)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coefficient_hand_values() {
        let c1 = ParametricCoefficient::new(1).unwrap();
        assert_eq!(c1.eval(0.3, 0.8, &[0.0]).unwrap(), 0.5);
        // s=1, y=1/2 at the center: 1/2 + (1/2)(1/2) sin^2(pi/2) = 3/4.
        assert!((c1.eval(0.5, 0.5, &[0.5]).unwrap() - 0.75).abs() < 1e-15);
        // sin(j pi x) vanishes on the lateral boundary.
        let c3 = ParametricCoefficient::new(3).unwrap();
        for x1 in [0.0, 1.0] {
            let v = c3.eval(x1, 0.37, &[0.5, -0.5, 0.25]).unwrap();
            assert!((v - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn coefficient_rejects_bad_parameters() {
        let c = ParametricCoefficient::new(2).unwrap();
        assert!(c.eval(0.5, 0.5, &[0.0]).is_err());
        assert!(matches!(
            c.eval(0.5, 0.5, &[0.0, 0.7]),
            Err(Error::ParameterOutOfRange { index: 1, .. })
        ));
        assert!(ParametricCoefficient::new(0).is_err());
    }

    #[test]
    fn coefficient_keeps_ellipticity_margin() {
        // a >= 1/2 - pi^2/24 for every x and every admissible y.
        let c = ParametricCoefficient::new(20).unwrap();
        let margin = 0.5 - std::f64::consts::PI.powi(2) / 24.0;
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut min_seen = f64::INFINITY;
        for _ in 0..10_000 {
            let x1: f64 = rng.gen();
            let x2: f64 = rng.gen();
            let y: Vec<f64> = (0..20).map(|_| rng.gen::<f64>() - 0.5).collect();
            min_seen = min_seen.min(c.eval(x1, x2, &y).unwrap());
        }
        assert!(min_seen >= margin - 1e-12, "min {min_seen} vs {margin}");
    }

    #[test]
    fn zeta_known_values() {
        let pi = std::f64::consts::PI;
        assert!((riemann_zeta(2.0).unwrap() - pi * pi / 6.0).abs() < 1e-12);
        assert!((riemann_zeta(4.0).unwrap() - pi.powi(4) / 90.0).abs() < 1e-12);
        // High-precision references.
        assert!((riemann_zeta(3.0).unwrap() - 1.202_056_903_159_594_3).abs() < 1e-12);
        assert!((riemann_zeta(1.05).unwrap() - 20.580_844_302_037_003).abs() < 1e-11);
        assert!(riemann_zeta(1.0).is_err());
        assert!(riemann_zeta(0.5).is_err());
    }

    #[test]
    fn zeta_matches_brute_force_tail_oracle() {
        // 10^7-term direct sum plus integral tail and half-term correction;
        // its own error is ~1e-15 at this exponent.
        let x = 2.0 / 1.9;
        let m = 10_000_000u64;
        let mut acc = Accumulator::new();
        for k in 1..=m {
            acc.add((k as f64).powf(-x));
        }
        let mf = m as f64;
        acc.add(mf.powf(1.0 - x) / (x - 1.0));
        acc.add(-0.5 * mf.powf(-x));
        let oracle = acc.value();
        assert!((riemann_zeta(x).unwrap() - oracle).abs() < 1e-10);
        // Frozen high-precision value of zeta(2/1.9).
        assert!((oracle - 19.581_034_607_100_785).abs() < 1e-10);
    }

    #[test]
    fn pod_weights_match_hand_values() {
        // Frozen high-precision evaluations at delta = 0.05.
        assert!((uq_b_scale() - 5.632_756_660_845_569).abs() < 1e-12);
        let lambda = 1.0 / 1.9;
        assert!((uq_normalizer(lambda).unwrap() - 2.854_674_316_291_278).abs() < 1e-12);
        let weights = pod_weights_uq(5, 0.05).unwrap();
        match &weights {
            CoordinateWeights::Pod {
                gamma_tilde,
                gamma_order,
            } => {
                assert!((gamma_tilde[0] - 2.436_504_253_173_573).abs() < 1e-12);
                assert!((gamma_order[2] - 2.480_008_091_325_174).abs() < 1e-12);
                assert_eq!(gamma_order[0], 1.0);
                assert_eq!(gamma_order[1], 1.0);
                // gamma_tilde decreases in j.
                for pair in gamma_tilde.windows(2) {
                    assert!(pair[0] > pair[1]);
                }
            }
            other => panic!("expected POD weights, got {other:?}"),
        }
        assert!(pod_weights_uq(5, 0.0).is_err());
        assert!(pod_weights_uq(5, 1.0).is_err());
    }

    #[test]
    fn pod_factored_form_reproduces_subset_weights() {
        // gamma_u = (|u|! prod b_j / D)^e must equal Gamma_{|u|} prod
        // gamma_tilde_j for every subset with |u| <= 3 at s = 5.
        let s = 5;
        let delta = 0.05;
        let lambda = 1.0 / (2.0 - 2.0 * delta);
        let expo = 2.0 / (1.0 + lambda);
        let d = uq_normalizer(lambda).unwrap();
        let (gamma_tilde, gamma_order) = match pod_weights_uq(s, delta).unwrap() {
            CoordinateWeights::Pod {
                gamma_tilde,
                gamma_order,
            } => (gamma_tilde, gamma_order),
            other => panic!("expected POD weights, got {other:?}"),
        };
        for mask in 0u32..(1 << s) {
            let order = mask.count_ones() as usize;
            if order > 3 {
                continue;
            }
            let mut direct = (1..=order).map(|k| k as f64).product::<f64>();
            for j in 0..s {
                if mask & (1 << j) != 0 {
                    let b_j = uq_b_scale() / ((j + 1) * (j + 1)) as f64;
                    direct *= b_j / d;
                }
            }
            let direct = direct.powf(expo);
            let mut factored = gamma_order[order];
            for j in 0..s {
                if mask & (1 << j) != 0 {
                    factored *= gamma_tilde[j];
                }
            }
            assert!(
                (direct - factored).abs() <= 1e-12 * direct.max(1.0),
                "mask {mask:b}: {direct} vs {factored}"
            );
        }
    }
}
