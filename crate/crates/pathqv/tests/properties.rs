//! Randomized invariant checks over arbitrary step paths.

use pathqv::integrals::{co_jump_sum, lebesgue_stieltjes};
use pathqv::partitions::{drawupdown, epsilon_partition, lebesgue_1d, Partition};
use pathqv::paths::SampledPath;
use pathqv::quadvar::{discrete_qv, polarized_qv};
use pathqv::truncvar::{
    regularize, truncated_variation, truncated_variation_fast, tv_integral_identity,
    tv_sandwich_check,
};
use proptest::prelude::*;

fn step_path(max_len: usize) -> impl Strategy<Value = SampledPath> {
    prop::collection::vec(-10.0f64..10.0, 2..max_len).prop_map(|values| {
        let times: Vec<f64> = (0..values.len()).map(|k| k as f64).collect();
        let horizon = (values.len() - 1) as f64;
        SampledPath::scalar_path(times, values, horizon).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn tv_fast_equals_dp(path in step_path(40), c in 0.0f64..5.0) {
        let dp = truncated_variation(&path, c).unwrap();
        let fast = truncated_variation_fast(&path, c).unwrap();
        for k in 0..path.len() {
            prop_assert!((dp.running[k] - fast.running[k]).abs() <= 1e-10);
        }
    }

    #[test]
    fn tv_monotone_in_c_and_time(path in step_path(40), c in 0.0f64..3.0, dc in 0.0f64..3.0) {
        let lo = truncated_variation_fast(&path, c).unwrap();
        let hi = truncated_variation_fast(&path, c + dc).unwrap();
        prop_assert_eq!(lo.running[0], 0.0);
        for k in 1..path.len() {
            prop_assert!(lo.running[k] + 1e-12 >= lo.running[k - 1]);
            prop_assert!(hi.running[k] <= lo.running[k] + 1e-12);
        }
    }

    #[test]
    fn tv_zero_is_total_variation(path in step_path(40)) {
        let tv = truncated_variation_fast(&path, 0.0).unwrap();
        let direct: f64 = (1..path.len())
            .map(|k| (path.scalar(k) - path.scalar(k - 1)).abs())
            .sum();
        prop_assert!((tv.total - direct).abs() <= 1e-10);
    }

    #[test]
    fn companion_path_invariants(path in step_path(40), c in 0.01f64..2.0) {
        let reg = regularize(&path, c).unwrap();
        prop_assert_eq!(reg.path.scalar(0), path.scalar(0));
        for k in 0..path.len() {
            prop_assert!((path.scalar(k) - reg.path.scalar(k)).abs() <= c + 1e-12);
        }
        // sandwich TV^{2c} <= TV(companion) <= TV^{2c} + 2c must never error
        tv_sandwich_check(&path, c).unwrap();
        let id = tv_integral_identity(&path, c).unwrap();
        let scale = 1.0 + id.lhs_total.abs() + id.rhs_total.abs();
        prop_assert!(id.max_residual <= 1e-10 * scale);
    }

    #[test]
    fn partitions_are_causal_sample_times(path in step_path(40), n in 0i32..6) {
        for partition in [
            lebesgue_1d(&path, n).unwrap().partition,
            drawupdown(&path, n).unwrap().combined,
            epsilon_partition(&path, 2f64.powi(-n)).unwrap(),
        ] {
            let times = partition.times();
            prop_assert_eq!(times[0], 0.0);
            for w in times.windows(2) {
                prop_assert!(w[0] < w[1]);
            }
            for t in times {
                prop_assert!(
                    path.times().binary_search_by(|x| x.total_cmp(t)).is_ok(),
                    "partition time {} is not a sample", t
                );
            }
        }
    }

    #[test]
    fn qv_full_refinement_is_squared_increments(path in step_path(40)) {
        let qv = discrete_qv(&path, &Partition::all_samples(&path));
        let direct: f64 = (1..path.len())
            .map(|k| (path.scalar(k) - path.scalar(k - 1)).powi(2))
            .sum();
        let last = qv.entry(path.len() - 1, 0, 0);
        prop_assert!((last - direct).abs() <= 1e-9 * (1.0 + direct));
    }

    #[test]
    fn polarization_identity(a in step_path(25), n in 0i32..5) {
        // two coordinates from one draw: the path and its square-ish companion
        let values: Vec<f64> = (0..a.len())
            .flat_map(|k| [a.scalar(k), (a.scalar(k) * 0.3).sin()])
            .collect();
        let p = SampledPath::new(2, a.horizon(), a.times().to_vec(), values).unwrap();
        let partition = pathqv::partitions::lebesgue_multi(&p, n).unwrap();
        let pol = polarized_qv(&p, &partition, 0, 1).unwrap();
        let qv = discrete_qv(&p, &partition);
        for k in 0..p.len() {
            let tol = 64.0 * f64::EPSILON * (pol.r[k].abs() + pol.t[k].abs() + 1.0);
            prop_assert!((pol.r[k] - pol.t[k] - 4.0 * pol.q[k]).abs() <= tol);
            prop_assert!((pol.q[k] - qv.entry(k, 0, 1)).abs() <= tol);
        }
    }

    #[test]
    fn stieltjes_bounded_by_sup_times_variation(
        (g, a) in (2usize..30).prop_flat_map(|len| {
            let values = prop::collection::vec(-10.0f64..10.0, len);
            (values.clone(), values).prop_map(move |(gv, av)| {
                let times: Vec<f64> = (0..len).map(|k| k as f64).collect();
                let horizon = (len - 1) as f64;
                (
                    SampledPath::scalar_path(times.clone(), gv, horizon).unwrap(),
                    SampledPath::scalar_path(times, av, horizon).unwrap(),
                )
            })
        })
    ) {
        let int = lebesgue_stieltjes(&g, &a).unwrap();
        let sup_g = (0..g.len()).map(|k| g.scalar(k).abs()).fold(0.0, f64::max);
        let tv0: f64 = (1..a.len()).map(|k| (a.scalar(k) - a.scalar(k - 1)).abs()).sum();
        for v in &int.values {
            prop_assert!(v.abs() <= sup_g * tv0 + 1e-9);
        }
    }

    #[test]
    fn co_jump_filter_only_removes_small_jumps(a in step_path(30), eps in 0.001f64..5.0) {
        prop_assume!(a.len() >= 2);
        let b = a.clone();
        if co_jump_sum(&a, &b, eps).is_err() {
            // eps hit a jump size exactly; the validation is the contract
            return Ok(());
        }
        let full = co_jump_sum(&a, &b, 0.0).unwrap();
        let filtered = co_jump_sum(&a, &b, eps).unwrap();
        // here a = b, so both running sums are sums of squares: the filtered
        // one is dominated by the full one at every time
        for (f, g) in full.values.iter().zip(&filtered.values) {
            prop_assert!(*g <= f + 1e-12);
        }
    }
}
