//! Randomized structural properties of the kernel and the worst-case-error
//! algebra, exercised over shifted lattices of varying size and dimension.

use latcub::cubature::{
    assemble_gram, solve_optimal_weights, wce_general, wce_optimal_from_weights,
};
use latcub::kernel::{eta_alpha, CoordinateWeights, KernelSpec};
use latcub::neumaier_sum;
use latcub::points::{apply_shift, generate_lattice, sample_shift, GeneratingVector, PointSet};
use proptest::prelude::*;

fn shifted_lattice(log2n: u32, z: &[u64], seed: u64) -> PointSet {
    let n = 1u64 << log2n;
    let z: Vec<u64> = z.iter().map(|c| c % n).collect();
    let gv = GeneratingVector::new(n, &z).unwrap();
    let shift = sample_shift(seed, z.len());
    apply_shift(&generate_lattice(&gv), &shift).unwrap()
}

fn odd_components(s: usize) -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::vec((0u64..128).prop_map(|k| 2 * k + 1), s)
}

fn gamma_tildes(s: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.05f64..3.0, s)
}

/// Direct sum over all coordinate subsets; the reference the O(s^2)
/// recursion inside the kernel must reproduce.
fn brute_force_pod(
    alpha: u32,
    gamma_tilde: &[f64],
    gamma_order: &[f64],
    x: &[f64],
    y: &[f64],
) -> f64 {
    let s = x.len();
    let etas: Vec<f64> = (0..s)
        .map(|j| gamma_tilde[j] * eta_alpha(alpha, x[j], y[j]).unwrap())
        .collect();
    neumaier_sum((0u32..1 << s).map(|mask| {
        let mut term = gamma_order[mask.count_ones() as usize];
        for (j, eta) in etas.iter().enumerate() {
            if mask & (1 << j) != 0 {
                term *= eta;
            }
        }
        term
    }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pod_recursion_matches_subset_sum(
        s in 1usize..=10,
        alpha in 1u32..=4,
        seed in 0u64..1000,
    ) {
        let mut rng_vals = (0u64..).map(|k| {
            // Cheap deterministic values in [0,1); quality is irrelevant here.
            let h = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(k.wrapping_mul(1442695040888963407))
                >> 11;
            (h % (1u64 << 20)) as f64 / (1u64 << 20) as f64
        });
        let gamma_tilde: Vec<f64> = (0..s).map(|_| 0.1 + 2.0 * rng_vals.next().unwrap()).collect();
        let mut gamma_order: Vec<f64> = (0..=s).map(|_| 0.2 + rng_vals.next().unwrap()).collect();
        gamma_order[0] = 1.0;
        let x: Vec<f64> = (0..s).map(|_| rng_vals.next().unwrap()).collect();
        let y: Vec<f64> = (0..s).map(|_| rng_vals.next().unwrap()).collect();

        let spec = KernelSpec::new(
            alpha,
            CoordinateWeights::pod(gamma_tilde.clone(), gamma_order.clone()).unwrap(),
        ).unwrap();
        let fast = spec.eval(&x, &y).unwrap();
        let brute = brute_force_pod(alpha, &gamma_tilde, &gamma_order, &x, &y);
        prop_assert!(
            (fast - brute).abs() <= 1e-12 * brute.abs().max(1.0),
            "{fast} vs {brute}"
        );
    }

    #[test]
    fn pod_with_unit_order_factors_is_the_product_kernel(
        gt in gamma_tildes(6),
        alpha in 1u32..=4,
        seed in 0u64..1000,
    ) {
        let s = gt.len();
        let shift_x = sample_shift(seed, s);
        let shift_y = sample_shift(seed + 1, s);
        let pod = KernelSpec::new(
            alpha,
            CoordinateWeights::pod(gt.clone(), vec![1.0; s + 1]).unwrap(),
        ).unwrap();
        let product = KernelSpec::new(
            alpha,
            CoordinateWeights::product(gt.clone()).unwrap(),
        ).unwrap();
        let a = pod.eval(&shift_x, &shift_y).unwrap();
        let b = product.eval(&shift_x, &shift_y).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * b.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn wce_obeys_the_shifted_pythagoras_identity(
        log2n in 2u32..=5,
        z in odd_components(3),
        alpha in 1u32..=2,
        seed in 0u64..1000,
        scale in -0.5f64..0.5,
    ) {
        let points = shifted_lattice(log2n, &z, seed);
        let spec = KernelSpec::new(
            alpha,
            CoordinateWeights::product(vec![1.0, 0.5, 0.25]).unwrap(),
        ).unwrap();
        let gram = assemble_gram(&spec, &points).unwrap();
        let optimal = solve_optimal_weights(&gram).unwrap();
        let e_opt = wce_optimal_from_weights(&optimal).unwrap();

        // Arbitrary competing weights, built as a perturbation of optimal.
        let n = points.len();
        let weights: Vec<f64> = optimal
            .iter()
            .enumerate()
            .map(|(k, w)| w + scale * ((k as f64 + 1.0) / n as f64 - 0.5))
            .collect();
        let e_w = wce_general(&spec, &points, &weights).unwrap();

        let diff: Vec<f64> = weights.iter().zip(&optimal).map(|(a, b)| a - b).collect();
        let offset = gram.quadratic_form(&diff).unwrap();
        let lhs = e_w * e_w;
        let rhs = e_opt * e_opt + offset;
        prop_assert!(
            (lhs - rhs).abs() <= 1e-10 * rhs.max(1e-30),
            "lhs {lhs} rhs {rhs}"
        );
        // The identity forces optimality as a corollary.
        prop_assert!(e_w + 1e-12 >= e_opt);
    }

    #[test]
    fn optimal_wce_never_grows_when_nodes_are_added(
        z in odd_components(2),
        alpha in 1u32..=2,
        seed in 0u64..1000,
    ) {
        let fine = shifted_lattice(4, &z, seed);
        let coarse = fine.strided(2).unwrap();
        let spec = KernelSpec::new(
            alpha,
            CoordinateWeights::product(vec![1.0, 1.0]).unwrap(),
        ).unwrap();
        let wce_of = |pts: &PointSet| -> f64 {
            let gram = assemble_gram(&spec, pts).unwrap();
            let w = solve_optimal_weights(&gram).unwrap();
            wce_optimal_from_weights(&w).unwrap()
        };
        prop_assert!(wce_of(&fine) <= wce_of(&coarse) + 1e-12);
    }
}

#[test]
fn general_wce_at_equal_weights_is_the_equal_weight_wce_bitwise() {
    // wce_equal delegates to the general form, so agreement is structural;
    // this pins the contract against future refactors.
    let spec = KernelSpec::new(2, CoordinateWeights::product(vec![1.0, 1.0]).unwrap()).unwrap();
    let points = shifted_lattice(5, &[1, 11], 3);
    let n = points.len();
    let equal = vec![1.0 / n as f64; n];
    let a = wce_general(&spec, &points, &equal).unwrap();
    let b = latcub::cubature::wce_equal(&spec, &points).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
}
