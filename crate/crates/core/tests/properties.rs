use proptest::prelude::*;

use pspectral::eigen_bounds::sharp_gap;
use pspectral::frequency::corpus::random_harmonic;
use pspectral::frequency::{frequency_curve, frequency_eval, rescale, symmetry_measure};
use pspectral::model_manifold::{capacity, cutoff_energy, radial_energy, Warping};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gap_decreases_with_diameter(p in 1.3f64..4.0, n in 2.0f64..6.0, k in -2.0f64..-0.05, d in 0.5f64..3.0, grow in 1.05f64..2.0) {
        let near = sharp_gap(p, n, k, d).unwrap();
        let far = sharp_gap(p, n, k, d * grow).unwrap();
        prop_assert!(far <= near * (1.0 + 1e-9));
    }

    #[test]
    fn gap_increases_with_curvature(p in 1.3f64..4.0, n in 2.0f64..6.0, k in -2.0f64..-0.05, d in 0.5f64..3.0) {
        let low = sharp_gap(p, n, 1.5 * k, d).unwrap();
        let high = sharp_gap(p, n, k, d).unwrap();
        let flat = sharp_gap(p, n, 0.0, d).unwrap();
        prop_assert!(low <= high * (1.0 + 1e-9));
        prop_assert!(high <= flat * (1.0 + 1e-9));
    }

    #[test]
    fn gap_decreases_with_dimension(p in 1.3f64..4.0, n in 2.0f64..6.0, k in -2.0f64..-0.05, d in 0.5f64..3.0) {
        let small = sharp_gap(p, n, k, d).unwrap();
        let large = sharp_gap(p, n + 1.0, k, d).unwrap();
        prop_assert!(large <= small * (1.0 + 1e-9));
    }

    #[test]
    fn flat_gap_scales_with_diameter(p in 1.2f64..5.0, d in 0.2f64..5.0, s in 0.2f64..5.0) {
        let a = sharp_gap(p, 3.0, 0.0, d).unwrap();
        let b = sharp_gap(p, 3.0, 0.0, s * d).unwrap();
        prop_assert!((b * s.powf(p) / a - 1.0).abs() < 1e-12);
    }

    #[test]
    fn capacity_bounds_hold(n in 2u32..6, p in 1.3f64..5.0, r1 in 0.2f64..2.0, width in 0.1f64..3.0) {
        let w = Warping::euclid(n).unwrap();
        let rep = capacity(&w, p, r1, r1 + width).unwrap();
        prop_assert!((rep.area_bound / rep.exact - 1.0).abs() < 1e-8);
        prop_assert!(rep.exact <= rep.volume_bound * (1.0 + 1e-10));
    }

    #[test]
    fn optimal_cutoff_beats_linear_cutoff(p in 1.3f64..4.0, r1 in 0.5f64..4.0, width in 0.2f64..4.0) {
        let w = Warping::exp_surface();
        let r2 = r1 + width;
        let rep = cutoff_energy(&w, p, r1, r2).unwrap();
        let linear = radial_energy(&w, p, r1, r2, |_| -1.0 / width).unwrap();
        prop_assert!((rep.phi_energy_quadrature / rep.phi_energy - 1.0).abs() < 1e-8);
        prop_assert!(rep.phi_energy <= linear * (1.0 + 1e-10));
        prop_assert!((linear / rep.xi_energy_bound - 1.0).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn frequency_is_monotone_off_center(seed in any::<u64>(), n in 2usize..4, x in prop::array::uniform3(-0.3f64..0.3)) {
        let u = random_harmonic(&mut ChaCha8Rng::seed_from_u64(seed), n, 4);
        let center = &x[..n];
        let radii: Vec<f64> = (1..=8).map(|i| 0.1 * i as f64).collect();
        let curve = frequency_curve(&u, center, &radii).unwrap();
        prop_assert!(curve.max_violation_n_bar <= 1e-8, "{}", curve.max_violation_n_bar);
        prop_assert!(curve.samples.iter().all(|s| s.frequency_bar >= 1.0 - 1e-9));
        prop_assert!(curve.samples.iter().all(|s| s.frequency_bar <= u.degree() as f64 + 1e-9));
    }

    #[test]
    fn blow_up_preserves_frequency(seed in any::<u64>(), n in 2usize..4, r in 0.1f64..1.0, s in 0.1f64..1.5) {
        let u = random_harmonic(&mut ChaCha8Rng::seed_from_u64(seed), n, 4);
        let x = vec![0.1; n];
        let t = rescale(&u, &x, r).unwrap();
        let direct = frequency_eval(&u, &x, r * s).unwrap().frequency_bar;
        let scaled = frequency_eval(&t, &vec![0.0; n], s).unwrap().frequency_bar;
        prop_assert!((direct - scaled).abs() < 1e-8 * direct.max(1.0));
    }

    #[test]
    fn symmetry_measure_is_a_bounded_distance(seed in any::<u64>(), r in 0.05f64..1.0) {
        let u = random_harmonic(&mut ChaCha8Rng::seed_from_u64(seed), 2, 5);
        let rep = symmetry_measure(&u, &[0.0, 0.0], r).unwrap();
        prop_assert!((0.0..=2.0 + 1e-12).contains(&rep.measure));
        prop_assert!(rep.per_degree.iter().all(|d| d.distance >= rep.measure));
    }
}
