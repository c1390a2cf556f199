//! Shift-averaged lattice cubature study for the parametric diffusion
//! problem: root-mean-square error of equal-weight and kernel-cubature
//! estimates of `E[G(u)]` against a fine reference rule of the same method.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::mesh::{qoi, Mesh};
use super::{pod_weights_uq, solve_pde, ParametricCoefficient};
use crate::cubature::{assemble_gram, solve_optimal_weights, wce_equal, wce_optimal_from_weights};
use crate::kernel::KernelSpec;
use crate::points::{apply_shift, generate_lattice, GeneratingVector, PointSet};
use crate::sum::neumaier_sum;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Plain shifted-lattice quasi-Monte Carlo with weights 1/n.
    Equal,
    /// Optimal kernel-cubature weights, recomputed per shift and per n.
    Kernel,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Equal => "equal",
            Method::Kernel => "kernel",
        }
    }
}

/// Shift applied to the reference rule. `Matched` compares each shifted
/// estimate against the reference computed on the same shifted point set, so
/// an estimate at `n = n_ref` reproduces its reference exactly. `Zero` keeps
/// a single unshifted reference for all shifts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReferenceShift {
    #[default]
    Matched,
    Zero,
}

#[derive(Debug, Clone)]
pub struct UqConfig {
    pub s: usize,
    pub mesh_level: u32,
    pub schedule: Vec<u64>,
    pub r_shifts: u32,
    pub seed: u64,
    pub delta: f64,
    pub n_ref: u64,
    pub methods: Vec<Method>,
    pub reference_shift: ReferenceShift,
    pub cg_tol: f64,
}

impl UqConfig {
    /// Desk-scale defaults: h = 2^-4, n = 2^1..2^9 against an n = 2^12
    /// reference, 8 random shifts.
    pub fn desk_default(s: usize) -> Self {
        UqConfig {
            s,
            mesh_level: 4,
            schedule: (1..=9).map(|m| 1u64 << m).collect(),
            r_shifts: 8,
            seed: 7,
            delta: 0.05,
            n_ref: 1 << 12,
            methods: vec![Method::Equal, Method::Kernel],
            reference_shift: ReferenceShift::Matched,
            cg_tol: 1e-12,
        }
    }

    pub fn lambda(&self) -> f64 {
        1.0 / (2.0 - 2.0 * self.delta)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.s == 0 {
            return fail("s must be at least 1".into());
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return fail(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        let lambda = self.lambda();
        if !(lambda > 0.5 && lambda < 1.0) {
            return fail(format!(
                "lambda = 1/(2 - 2 delta) = {lambda} must lie in (1/2, 1); \
                 use delta in (0, 1/2)"
            ));
        }
        if self.schedule.is_empty() {
            return fail("n-schedule is empty".into());
        }
        if !self.n_ref.is_power_of_two() {
            return fail(format!("n_ref = {} must be a power of two", self.n_ref));
        }
        for pair in self.schedule.windows(2) {
            if pair[0] >= pair[1] {
                return fail("n-schedule must be strictly increasing".into());
            }
        }
        for &n in &self.schedule {
            if !n.is_power_of_two() {
                return fail(format!("schedule entry {n} is not a power of two"));
            }
            if n > self.n_ref {
                return fail(format!(
                    "schedule entry {n} exceeds the reference size {}",
                    self.n_ref
                ));
            }
        }
        if self.r_shifts == 0 {
            return fail("at least one random shift is required".into());
        }
        if self.methods.is_empty() {
            return fail("method list is empty".into());
        }
        if self.methods.len() > 2
            || (self.methods.len() == 2 && self.methods[0] == self.methods[1])
        {
            return fail("method list repeats a method".into());
        }
        if !(self.cg_tol > 0.0 && self.cg_tol <= 1e-6) {
            return fail(format!(
                "cg tolerance {} must lie in (0, 1e-6]",
                self.cg_tol
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct UqRow {
    pub method: Method,
    pub n: u64,
    pub rms_error: f64,
    /// Mean over shifts of the per-shift worst-case error of this method's
    /// rule in the weighted order-1 space.
    pub wce: f64,
}

#[derive(Debug, Clone)]
pub struct UqResult {
    pub rows: Vec<UqRow>,
}

impl UqResult {
    /// (n, rms_error) pairs of one method, in schedule order.
    pub fn errors_for(&self, method: Method) -> Vec<(u64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.method == method)
            .map(|r| (r.n, r.rms_error))
            .collect()
    }
}

/// Quantity of interest at every cubature node: one PDE solve per node with
/// parameters `y = t - 1/2`.
fn qoi_at_nodes(
    mesh: &Mesh,
    coeff: &ParametricCoefficient,
    points: &PointSet,
    cg_tol: f64,
) -> Result<Vec<f64>> {
    let mut y = vec![0.0; points.dimension()];
    let mut vals = Vec::with_capacity(points.len());
    for node in points.rows() {
        for (yj, &tj) in y.iter_mut().zip(node) {
            *yj = tj - 0.5;
        }
        let u = solve_pde(mesh, coeff, &y, |x1, _| x1, cg_tol)?;
        vals.push(qoi(mesh, &u)?);
    }
    Ok(vals)
}

fn equal_weight_estimate(vals: &[f64]) -> f64 {
    neumaier_sum(vals.iter().copied()) / vals.len() as f64
}

fn kernel_estimate(weights: &[f64], vals: &[f64]) -> f64 {
    neumaier_sum(weights.iter().zip(vals).map(|(w, v)| w * v))
}

/// Runs the full shift-averaged study. For each of `R` shifts the PDE is
/// solved once per reference node; estimates at smaller `n` reuse those
/// values through the nested sub-lattices (every `n_ref/n`-th node).
pub fn run_uq_experiment(cfg: &UqConfig, gv: &GeneratingVector) -> Result<UqResult> {
    cfg.validate()?;
    for &n in &cfg.schedule {
        gv.rescaled(n)?;
    }
    let gv_ref = gv.rescaled(cfg.n_ref)?;
    if gv_ref.dimension() != cfg.s {
        return Err(Error::DimensionMismatch {
            context: "uq generating vector",
            expected: cfg.s,
            actual: gv_ref.dimension(),
        });
    }
    let mesh = Mesh::new(cfg.mesh_level)?;
    let coeff = ParametricCoefficient::new(cfg.s)?;
    let spec = KernelSpec::new(1, pod_weights_uq(cfg.s, cfg.delta)?)?;
    let base = generate_lattice(&gv_ref);
    let use_kernel = cfg.methods.contains(&Method::Kernel);

    // Unshifted references, only for the zero-shift policy.
    let zero_refs = match cfg.reference_shift {
        ReferenceShift::Matched => None,
        ReferenceShift::Zero => {
            let vals = qoi_at_nodes(&mesh, &coeff, &base, cfg.cg_tol)?;
            let ref_eq = equal_weight_estimate(&vals);
            let ref_ker = if use_kernel {
                let gram = assemble_gram(&spec, &base)?;
                let w = solve_optimal_weights(&gram)?;
                kernel_estimate(&w, &vals)
            } else {
                0.0
            };
            Some((ref_eq, ref_ker))
        }
    };

    let n_count = cfg.schedule.len();
    let mut errs = vec![vec![Vec::new(); n_count]; cfg.methods.len()];
    let mut wces = vec![vec![Vec::new(); n_count]; cfg.methods.len()];

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.r_shifts {
        let shift: Vec<f64> = (0..cfg.s).map(|_| rng.gen()).collect();
        let pts = apply_shift(&base, &shift)?;
        let vals = qoi_at_nodes(&mesh, &coeff, &pts, cfg.cg_tol)?;

        let ref_weights = if use_kernel {
            let gram = assemble_gram(&spec, &pts)?;
            Some(solve_optimal_weights(&gram)?)
        } else {
            None
        };
        let (ref_eq, ref_ker) = match (cfg.reference_shift, &ref_weights) {
            (ReferenceShift::Zero, _) => zero_refs.expect("zero refs were precomputed"),
            (ReferenceShift::Matched, Some(w)) => (
                equal_weight_estimate(&vals),
                kernel_estimate(w, &vals),
            ),
            (ReferenceShift::Matched, None) => (equal_weight_estimate(&vals), 0.0),
        };

        for (ni, &n) in cfg.schedule.iter().enumerate() {
            let stride = (cfg.n_ref / n) as usize;
            let sub = pts.strided(stride)?;
            let sv: Vec<f64> = vals.iter().step_by(stride).copied().collect();
            for (mi, &method) in cfg.methods.iter().enumerate() {
                let (est, wce) = match method {
                    Method::Equal => {
                        (equal_weight_estimate(&sv), wce_equal(&spec, &sub)?)
                    }
                    Method::Kernel => {
                        let w = if n == cfg.n_ref {
                            ref_weights
                                .clone()
                                .expect("kernel method implies reference weights")
                        } else {
                            let gram = assemble_gram(&spec, &sub)?;
                            solve_optimal_weights(&gram)?
                        };
                        let wce = wce_optimal_from_weights(&w)?;
                        (kernel_estimate(&w, &sv), wce)
                    }
                };
                let reference = match method {
                    Method::Equal => ref_eq,
                    Method::Kernel => ref_ker,
                };
                errs[mi][ni].push(est - reference);
                wces[mi][ni].push(wce);
            }
        }
    }

    let mut rows = Vec::with_capacity(cfg.methods.len() * n_count);
    for (mi, &method) in cfg.methods.iter().enumerate() {
        for (ni, &n) in cfg.schedule.iter().enumerate() {
            let sq = neumaier_sum(errs[mi][ni].iter().map(|e| e * e));
            let rms_error = (sq / cfg.r_shifts as f64).sqrt();
            let wce = neumaier_sum(wces[mi][ni].iter().copied()) / cfg.r_shifts as f64;
            rows.push(UqRow {
                method,
                n,
                rms_error,
                wce,
            });
        }
    }
    Ok(UqResult { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> UqConfig {
        UqConfig {
            s: 2,
            mesh_level: 2,
            schedule: vec![4, 16],
            r_shifts: 2,
            seed: 11,
            delta: 0.05,
            n_ref: 16,
            methods: vec![Method::Equal, Method::Kernel],
            reference_shift: ReferenceShift::Matched,
            cg_tol: 1e-12,
        }
    }

    fn tiny_gv() -> GeneratingVector {
        GeneratingVector::new(16, &[1, 7]).unwrap()
    }

    #[test]
    fn validation_catches_bad_configs() {
        let ok = tiny_config();
        assert!(ok.validate().is_ok());
        let breakers: [fn(&mut UqConfig); 12] = [
            |c| c.s = 0,
            |c| c.delta = 0.6,
            |c| c.delta = 0.0,
            |c| c.schedule = vec![],
            |c| c.schedule = vec![4, 4],
            |c| c.schedule = vec![3, 4],
            |c| c.schedule = vec![4, 32],
            |c| c.n_ref = 12,
            |c| c.r_shifts = 0,
            |c| c.methods = vec![],
            |c| c.methods = vec![Method::Equal, Method::Equal],
            |c| c.cg_tol = 0.0,
        ];
        for breaker in breakers {
            let mut bad = tiny_config();
            breaker(&mut bad);
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn matched_reference_zeroes_full_size_errors() {
        let mut cfg = tiny_config();
        cfg.r_shifts = 1;
        let result = run_uq_experiment(&cfg, &tiny_gv()).unwrap();
        for row in &result.rows {
            if row.n == 16 {
                assert_eq!(row.rms_error, 0.0, "{:?}", row.method);
            } else {
                assert!(row.rms_error > 0.0);
            }
            assert!(row.wce > 0.0);
        }
    }

    #[test]
    fn zero_shift_reference_keeps_full_size_errors_positive() {
        let mut cfg = tiny_config();
        cfg.r_shifts = 1;
        cfg.reference_shift = ReferenceShift::Zero;
        let result = run_uq_experiment(&cfg, &tiny_gv()).unwrap();
        for row in &result.rows {
            assert!(row.rms_error > 0.0, "{:?} n={}", row.method, row.n);
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let cfg = tiny_config();
        let a = run_uq_experiment(&cfg, &tiny_gv()).unwrap();
        let b = run_uq_experiment(&cfg, &tiny_gv()).unwrap();
        assert_eq!(a.rows.len(), b.rows.len());
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.rms_error.to_bits(), y.rms_error.to_bits());
            assert_eq!(x.wce.to_bits(), y.wce.to_bits());
        }
    }

    #[test]
    fn wce_shrinks_with_n() {
        let result = run_uq_experiment(&tiny_config(), &tiny_gv()).unwrap();
        let kernel = &result.rows[2..4];
        assert!(kernel[0].wce > kernel[1].wce);
    }

    #[test]
    fn non_extensible_vector_is_rejected() {
        // z_2 = 6 collapses to 0 mod 2, so a schedule containing n = 2 must
        // fail up front.
        let gv = GeneratingVector::new(16, &[1, 6]).unwrap();
        let mut cfg = tiny_config();
        cfg.schedule = vec![2, 4];
        assert!(matches!(
            run_uq_experiment(&cfg, &gv),
            Err(Error::GeneratingVectorComponent { .. })
        ));
    }
}
