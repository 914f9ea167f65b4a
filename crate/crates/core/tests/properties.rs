use std::f64::consts::PI;
use std::sync::OnceLock;

use proptest::prelude::*;

use bdf_lab::cli::RunConfig;
use bdf_lab::dispersion::{solve_dispersion, ModelParams};
use bdf_lab::numerics::{make_grid, Clustering};
use bdf_lab::pekar::{direct_energy, kinetic_energy, pekar_grid};
use bdf_lab::polarization::{
    b_screening, free_polarization_table_with, k_grid, linear_response_density, pair_factor, screened_density,
    FreeProfile, PolarizationTable, Resolution,
};

fn table() -> &'static PolarizationTable {
    static T: OnceLock<PolarizationTable> = OnceLock::new();
    T.get_or_init(|| {
        let params = ModelParams::new(0.05, 100.0).unwrap();
        let ks = k_grid(100.0, 24, 1e-3).unwrap();
        free_polarization_table_with(&params, &ks, Resolution::default()).unwrap()
    })
}

fn vec3() -> impl Strategy<Value = [f64; 3]> {
    (-3.0f64..3.0, 0.0f64..PI, 0.0f64..2.0 * PI).prop_map(|(lr, th, ph)| {
        let r = 10f64.powf(lr);
        [r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn screening_fraction_in_unit_interval(b in 0.0f64..1e6, alpha in 1e-4f64..1.2, db in 0.0f64..10.0) {
        let s = b_screening(b, alpha).unwrap();
        prop_assert!((0.0..1.0).contains(&s));
        prop_assert!(b_screening(b + db, alpha).unwrap() >= s);
    }

    #[test]
    fn pair_factor_nonnegative_symmetric(p in vec3(), q in vec3()) {
        let prof = FreeProfile { cutoff: 1e3 };
        let f = pair_factor(&prof, p, q);
        let g = pair_factor(&prof, q, p);
        prop_assert!(f >= 0.0);
        prop_assert!((f - g).abs() <= 1e-12 * f.max(1e-300) + 1e-300);
        prop_assert!(pair_factor(&prof, p, p) <= 1e-15);
    }

    #[test]
    fn linear_response_is_linear_and_signed(
        a in proptest::collection::vec(0.0f64..1.0, 24),
        b in proptest::collection::vec(0.0f64..1.0, 24),
        s in -3.0f64..3.0,
    ) {
        let t = table();
        let ra = linear_response_density(t, &a).unwrap();
        let rb = linear_response_density(t, &b).unwrap();
        let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + s * y).collect();
        let rm = linear_response_density(t, &mix).unwrap();
        for i in 0..a.len() {
            prop_assert!((rm[i] - (ra[i] + s * rb[i])).abs() <= 1e-12 * (1.0 + rm[i].abs()));
            prop_assert!(ra[i] <= 0.0);
        }
        let sc = screened_density(t, &a).unwrap();
        for i in 0..a.len() {
            prop_assert!(sc[i].abs() <= t.alpha() * t.big_b[i] * a[i] * (1.0 + 1e-14));
        }
    }

    #[test]
    fn config_round_trip(alpha in 0.0f64..1.0, l in 0.01f64..0.5, nodes in 8usize..2048, seed in 0..=i64::MAX as u64) {
        let mut c = RunConfig::default();
        c.model.alpha = alpha;
        c.model.l = Some(l);
        c.dispersion.nodes = nodes;
        c.output.seed = seed;
        let text = c.to_toml().unwrap();
        prop_assert_eq!(RunConfig::from_toml(&text, &[]).unwrap(), c.clone());
        c.output.seed = u64::MAX;
        prop_assert!(c.to_toml().is_err());
    }

    #[test]
    fn gaussian_kinetic_and_direct_scale(sigma in 1.5f64..6.0) {
        // T = 3/(2σ²), D = sqrt(2/π)/σ for φ = (πσ²)^(-3/4) exp(-r²/2σ²).
        let grid = pekar_grid(40.0, 2048).unwrap();
        let norm = (PI * sigma * sigma).powf(-0.75);
        let phi: Vec<f64> = grid.nodes().iter().map(|r| norm * (-r * r / (2.0 * sigma * sigma)).exp()).collect();
        let n: Vec<f64> = phi.iter().map(|p| p * p).collect();
        let t = kinetic_energy(&grid, &phi).unwrap();
        let d = direct_energy(&grid, &n).unwrap();
        prop_assert!((t * sigma * sigma / 1.5 - 1.0).abs() < 1e-4);
        prop_assert!((d * sigma / (2.0 / PI).sqrt() - 1.0).abs() < 1e-4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dispersion_ordering(alpha in 1e-3f64..0.2, lc in 1.0f64..4.0) {
        let cutoff = 10f64.powf(lc);
        let params = ModelParams::new(alpha, cutoff).unwrap();
        let grid = make_grid(cutoff, 96, Clustering::GeometricNearZero).unwrap();
        let d = solve_dispersion(params, grid, 1e-10, 200).unwrap();
        prop_assert!(d.satisfies_ordering());
        prop_assert_eq!(d.iterate_checks().ordering_violations, 0);
        prop_assert!(d.g0().iter().all(|&g| g >= 1.0));
        prop_assert!(d.g0().windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }
}
