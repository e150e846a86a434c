use proptest::prelude::*;

use shaping_core::channels::{
    bnsc, bnsc_mjt_input, pam, quantized_awgn, OutputGrid, PamAwgnConfig,
};
use shaping_core::info::{entropy, kl_divergence, mutual_information, output_marginal};
use shaping_core::montecarlo::Estimate;
use shaping_core::projection::{
    at_least_one, exact_pne_binary, exact_pne_types, maxwell_boltzmann, project,
};
use shaping_core::rates::{divergence_contraction_check, gallager_e0, mjt_applicable, Shaping};
use shaping_core::{Channel, ConstraintSet, Pmf};

fn pmf(n: usize) -> impl Strategy<Value = Pmf> {
    prop::collection::vec(0.02f64..1.0, n).prop_map(|w| Pmf::from_weights(w).unwrap())
}

fn channel(nx: usize, ny: usize) -> impl Strategy<Value = Channel> {
    prop::collection::vec(prop::collection::vec(0.01f64..1.0, ny), nx).prop_map(|rows| {
        Channel::new(
            rows.into_iter()
                .map(|r| {
                    let s: f64 = r.iter().sum();
                    r.into_iter().map(|v| v / s).collect()
                })
                .collect(),
        )
        .unwrap()
    })
}

/// A pmf, one random constraint whose budget lies strictly between the minimum
/// of `φ` and its mean under the pmf, and the budget fraction used.
fn instance(n: usize) -> impl Strategy<Value = (Pmf, ConstraintSet)> {
    (pmf(n), prop::collection::vec(0.0f64..1.0, n), 0.05f64..1.2).prop_map(|(p, phi, frac)| {
        let min = phi.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = p.expect(&phi);
        let beta = min + frac * (mean - min) + 1e-6;
        (p, ConstraintSet::new(vec![phi], vec![beta]).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_lies_in_set((p, e) in instance(3)) {
        let r = project(&p, &e).unwrap();
        prop_assert!(e.contains(&r.q_star, 1e-9));
        if e.contains(&p, 0.0) {
            prop_assert_eq!(r.q_star, p);
        }
    }

    #[test]
    fn pythagorean_inequality((p, e) in instance(3), other in pmf(3)) {
        prop_assume!(e.contains(&other, 0.0));
        let q = project(&p, &e).unwrap();
        let lhs = kl_divergence(&other, &p).unwrap();
        let rhs = kl_divergence(&other, &q.q_star).unwrap() + q.divergence_bits;
        prop_assert!(lhs >= rhs - 1e-8, "{} < {}", lhs, rhs);
    }

    #[test]
    fn projection_beats_members((p, e) in instance(4), other in pmf(4)) {
        prop_assume!(e.contains(&other, 0.0));
        let q = project(&p, &e).unwrap();
        prop_assert!(kl_divergence(&other, &p).unwrap() >= q.divergence_bits - 1e-9);
    }

    #[test]
    fn divergence_contracts(a in pmf(3), b in pmf(3), ch in channel(3, 4)) {
        let (dy, dx) = divergence_contraction_check(&a, &b, &ch).unwrap();
        prop_assert!(dy <= dx + 1e-12);
        prop_assert!(dy >= 0.0);
    }

    #[test]
    fn mutual_information_bounds(p in pmf(4), ch in channel(4, 3)) {
        let i = mutual_information(&p, &ch).unwrap();
        prop_assert!(i >= -1e-12);
        prop_assert!(i <= entropy(&p) + 1e-12);
        prop_assert!(i <= entropy(&output_marginal(&p, &ch).unwrap()) + 1e-12);
    }

    #[test]
    fn gallager_never_exceeds_matched((p, e) in instance(3), ch in channel(3, 3)) {
        let s = Shaping::new(&p, &e).unwrap();
        let m = s.matched(&ch).unwrap();
        let g = s.gallager(&ch).unwrap();
        prop_assert!(g <= m + 1e-12);
        prop_assert!(m <= s.codeword_cap() + 1e-12);
    }

    #[test]
    fn e0_is_bounded_by_rho_times_mi(p in pmf(3), ch in channel(3, 3), rho in 0.01f64..1.0) {
        let e0 = gallager_e0(rho, &p, &p, &ch).unwrap();
        let i = mutual_information(&p, &ch).unwrap();
        prop_assert!(e0 >= -1e-12);
        prop_assert!(e0 <= rho * i + 1e-9);
    }

    #[test]
    fn maxwell_boltzmann_meets_target(frac in 0.01f64..0.99) {
        let levels = pam(8).unwrap();
        let target = 1.0 + frac * (49.0 - 1.0);
        let mb = maxwell_boltzmann(&levels, target).unwrap();
        let power: f64 = levels.iter().map(|x| x * x).collect::<Vec<_>>().iter()
            .zip(mb.pmf.probs()).map(|(e, q)| e * q).sum();
        prop_assert!((power - target).abs() <= 1e-9 * target);
        prop_assert_eq!(mb.anti_shaping, target > 21.0);
    }

    #[test]
    fn wilson_interval_is_ordered(trials in 1u64..10_000, frac in 0.0f64..=1.0) {
        let k = (frac * trials as f64).floor() as u64;
        let e = Estimate::wilson(k, trials);
        prop_assert!(e.ci_low <= e.value + 1e-15 && e.value <= e.ci_high + 1e-15);
        prop_assert!(e.ci_low >= 0.0 && e.ci_high <= 1.0);
    }

    #[test]
    fn awgn_rows_are_pmfs(alpha in 0.1f64..3.0, sigma2 in 0.05f64..4.0) {
        let mut cfg = PamAwgnConfig::new(pam(4).unwrap(), alpha, sigma2, 5.0);
        cfg.output_grid = OutputGrid { half_width_sigmas: 8.0, points_per_sigma: 4 };
        let ch = quantized_awgn(&cfg).unwrap();
        for row in ch.rows() {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        prop_assert!(mjt_applicable(&Pmf::uniform(4).unwrap(), &ch, 1e-9).unwrap());
    }

    #[test]
    fn bnsc_input_always_applicable(g0 in 0.001f64..0.499, g1 in 0.001f64..0.499) {
        let p = bnsc_mjt_input(g0, g1).unwrap();
        prop_assert!(mjt_applicable(&p, &bnsc(g0, g1).unwrap(), 1e-9).unwrap());
    }

    #[test]
    fn type_enumeration_matches_binomial(n in 1usize..30, beta in 0.0f64..1.0, p1 in 0.05f64..0.95) {
        let p = Pmf::binary(p1).unwrap();
        let e = ConstraintSet::hamming(beta).unwrap();
        let a = exact_pne_types(&p, &e, n).unwrap();
        let b = exact_pne_binary(&p, beta, n).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300) + 1e-300);
    }

    #[test]
    fn at_least_one_grows_with_draws(q in 0.0f64..1.0, m in 1.0f64..1e6) {
        prop_assert!(at_least_one(q, m + 1.0) >= at_least_one(q, m));
        prop_assert!(at_least_one(q, m) >= q - 1e-15);
    }
}
