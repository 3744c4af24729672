use cmalab_core::constructors::{build_nowhere_flat, rescale, HoloSeed};
use cmalab_core::elliptic::{
    donaldson_build, poisson_solve, GridSpec, HarmonicSeed, Lattice, ScalarGrid, SolveOptions,
};
use cmalab_core::potential::{det_residual, hessian, phi_identity_check, psh_check, PhiMode};
use cmalab_core::radial::{mae_residual, valid_points, RadialParams};
use cmalab_core::{BiSeries, Direction, SolutionCoeffs};
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::OnceLock;

const N: usize = 10;

fn complex(scale: f64) -> impl Strategy<Value = Complex64> {
    (-scale..scale, -scale..scale).prop_map(|(re, im)| Complex64::new(re, im))
}

fn series() -> impl Strategy<Value = BiSeries> {
    let len = (N + 1) * (N + 2) / 2;
    prop::collection::vec(complex(1.0), len).prop_map(|c| {
        let mut k = 0;
        BiSeries::from_fn(N, |i, j| {
            let v = c[k] * 0.5f64.powi((i + j) as i32);
            k += 1;
            v
        })
    })
}

fn point(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..radius, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn example() -> &'static SolutionCoeffs {
    static EX: OnceLock<SolutionCoeffs> = OnceLock::new();
    EX.get_or_init(|| {
        build_nowhere_flat(&HoloSeed::disc_coordinate(1.0, 41), &HoloSeed::zero(40), 40).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_commutative_and_associative(s in series(), t in series(), u in series()) {
        prop_assert!(s.mul(&t).max_abs_diff(&t.mul(&s)) < 1e-13);
        prop_assert!(s.mul(&t).mul(&u).max_abs_diff(&s.mul(&t.mul(&u))) < 1e-12);
    }

    #[test]
    fn mixed_derivatives_commute(s in series()) {
        let a = s.derive(Direction::W).derive(Direction::WBar);
        let b = s.derive(Direction::WBar).derive(Direction::W);
        prop_assert!(a.max_abs_diff(&b) < 1e-13);
    }

    #[test]
    fn real_part_evaluates_to_real(s in series(), w in point(0.9)) {
        let v = s.real_part().evaluate(w).unwrap();
        prop_assert_eq!(v.im, 0.0);
    }

    #[test]
    fn evaluation_respects_products(s in series(), t in series(), w in point(0.3)) {
        let lhs = s.mul(&t).evaluate(w).unwrap();
        let rhs = s.evaluate(w).unwrap() * t.evaluate(w).unwrap();
        // truncation tail of shells above N at |w| = 0.3
        prop_assert!((lhs - rhs).norm() < 1e-4);
    }

    #[test]
    fn dilations_compose(s in series(), l in 0.2f64..2.0, m in 0.2f64..2.0) {
        let d = s.dilate(l).dilate(m).max_abs_diff(&s.dilate(l * m));
        prop_assert!(d < 1e-12 * (l * m).max(1.0).powi(N as i32));
    }

    #[test]
    fn hessian_is_hermitian_and_unimodular(z in point(1.0), w in point(0.5)) {
        let h = hessian(example(), z, w, PhiMode::IdentityMap).unwrap();
        prop_assert!(h.hermitian_defect() < 1e-12);
        prop_assert!(h.h11.re > 0.0 && h.h11.im == 0.0);
        prop_assert!((h.det() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn example_is_plurisubharmonic(z in point(2.0), w in point(0.5)) {
        prop_assert!(psh_check(example(), &[(z, w)], PhiMode::IdentityMap));
    }

    #[test]
    fn rescaled_example_stays_a_solution(r in 0.5f64..3.0, z in point(1.0), w in point(0.5)) {
        let scaled = rescale(example(), r).unwrap();
        prop_assert_eq!(scaled.radius(), r);
        let res = det_residual(&scaled, &[(z, w * r)], PhiMode::IdentityMap).unwrap();
        prop_assert!(res < 1e-8, "residual {}", res);
    }

    #[test]
    fn phi_identity_for_random_alpha(alpha in complex(2.0).prop_filter("nonzero", |a| a.norm() > 0.05)) {
        let reach = 0.45 / alpha.norm();
        let pts: Vec<_> = (0..8).map(|k| Complex64::from_polar(reach * (k as f64 + 1.0) / 8.0, 0.9 * k as f64)).collect();
        prop_assert!(phi_identity_check(alpha, &pts).unwrap() < 1e-9);
    }

    #[test]
    fn case_one_family_solves_the_equation(
        c1 in 0.2f64..3.0,
        // steeper exponents make |det - 1| cancellation-limited at the window ends
        c2 in -0.9f64..1.8,
        c3 in complex(1.0),
        c4 in complex(1.0),
    ) {
        let p = RadialParams::case_i(c1, c2, c3, c4);
        let pts = valid_points(&p, 6).unwrap();
        prop_assert!(mae_residual(&p, &pts).unwrap() < 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn poisson_residual_is_recomputable(amp in -2.0f64..2.0, k in 0.5f64..3.0) {
        let lat = Lattice::new(GridSpec::new(2, 1.0 / 16.0, 1.0).unwrap());
        let rhs = ScalarGrid::from_fn(&lat, |x| amp * (k * x[0]).sin() * x[1]);
        let init = ScalarGrid::from_fn(&lat, |x| x[0] * x[1]);
        let tol = 1e-9;
        let (u, rep) = poisson_solve(&rhs, &init, &SolveOptions::with_tol(tol)).unwrap();
        let recomputed = u.laplacian().max_abs_diff_interior(&rhs);
        prop_assert!(recomputed <= tol);
        prop_assert!((recomputed - rep.residual).abs() <= 1e-12);
    }

    #[test]
    fn t_coefficients_match_defects(c in 1.5f64..3.0, g1 in -0.5f64..0.5, g2 in -0.5f64..0.5) {
        let spec = GridSpec::new(2, 1.0 / 16.0, 1.0).unwrap();
        let seed = HarmonicSeed::Linear { constant: c, gradient: vec![g1, g2] };
        let tr = donaldson_build(spec, &seed, &|x| x[0] - x[1], 1e-10).unwrap();
        let direct = tr.coefficients();
        let extracted = tr.extract_coefficients();
        for k in 0..3 {
            prop_assert!(direct[k].max_abs_diff_interior(&extracted[k]) < 1e-12);
        }
        prop_assert!(tr.harmonic_defect() < 1e-12);
    }
}
