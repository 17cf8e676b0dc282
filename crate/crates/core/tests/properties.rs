use mdtgn::conservation::{cone_charge_report, total_charge, ConeRegion};
use mdtgn::dirac::{duhamel_solve, free_solution, solve, InitialData, ModelParams, Scheme, SolverConfig};
use mdtgn::estimates::{check_data_inequalities, check_identities, run_trial, RandomFieldSpec};
use mdtgn::gauge::{gauge_transform, solve_wave};
use mdtgn::maxwell::{assemble_potentials, gauss_e0};
use mdtgn::norms::{d_norm, envelope_norm_slab, n_norm_slab, y_norm_slab};
use mdtgn::{
    build_grid, sample_function, sample_real, transport_shift, Complex64, Direction, FunctionSpec, GridFunction,
    LightConeGrid, Slab, SpinorHistory,
};
use proptest::prelude::*;

fn bump() -> impl Strategy<Value = FunctionSpec> {
    (-0.4..0.4f64, 0.04..0.2f64, 0.1..1.5f64, 0.0..std::f64::consts::TAU)
        .prop_map(|(c, w, a, p)| FunctionSpec::gaussian(c, w, a, p))
}

fn real_bump() -> impl Strategy<Value = FunctionSpec> {
    (-0.4..0.4f64, 0.04..0.2f64, -1.5..1.5f64).prop_map(|(c, w, a)| FunctionSpec::gaussian(c, w, a, 0.0))
}

fn data() -> impl Strategy<Value = FunctionSpec> {
    prop::collection::vec(bump(), 1..4).prop_map(|terms| FunctionSpec::Sum { terms })
}

/// `[-3, 3]` with `T = 0.5`, so Gaussians near the origin are interior.
fn grid(dx: f64) -> LightConeGrid {
    build_grid(-3.0, 3.0, dx, 0.5).unwrap()
}

fn random_slab(grid: &LightConeGrid, spec: &FunctionSpec, speed: f64) -> Slab<Complex64> {
    let f = sample_function(grid, spec).unwrap();
    Slab::from_fn(grid.n_x, grid.layers(), |i, k| {
        let decay = (-(k as f64) * grid.dx).exp();
        let shift = (speed * k as f64).round() as isize;
        f.at(i as isize - shift) * decay
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn repeated_shifts_reproduce_the_free_solution(f in data(), g in data()) {
        let grid = grid(1.0 / 64.0);
        let f = sample_function(&grid, &f).unwrap();
        let g = sample_function(&grid, &g).unwrap();
        let h = free_solution(&f, &g, &grid).unwrap();
        let (mut u, mut v) = (f.clone(), g.clone());
        for k in 0..grid.layers() {
            prop_assert_eq!(h.u.layer(k), &u.values[..]);
            prop_assert_eq!(h.v.layer(k), &v.values[..]);
            u = transport_shift(&u, Direction::Plus);
            v = transport_shift(&v, Direction::Minus);
        }
    }

    #[test]
    fn sampling_is_deterministic(f in data()) {
        let grid = grid(1.0 / 128.0);
        prop_assert_eq!(sample_function(&grid, &f).unwrap(), sample_function(&grid, &f).unwrap());
    }

    #[test]
    fn d_norm_is_translation_invariant_under_even_shifts(
        vals in prop::collection::vec(-2.0..2.0f64, 40),
        shift in 0usize..20,
    ) {
        let grid = build_grid(-1.0, 1.0, 1.0 / 64.0, 0.25).unwrap();
        let mut base = vec![0.0; grid.n_x];
        base[40..80].copy_from_slice(&vals);
        let mut moved = vec![0.0; grid.n_x];
        moved[40 + 2 * shift..80 + 2 * shift].copy_from_slice(&vals);
        let a = GridFunction::from_values(grid, base).unwrap();
        let b = GridFunction::from_values(grid, moved).unwrap();
        prop_assert_eq!(d_norm(&a, 0.25).unwrap(), d_norm(&b, 0.25).unwrap());
    }

    #[test]
    fn d_norm_is_monotone_in_t(f in data(), k1 in 1usize..32, k2 in 1usize..32) {
        let grid = grid(1.0 / 64.0);
        let f = sample_function(&grid, &f).unwrap();
        let (lo, hi) = (k1.min(k2) as f64 / 64.0, k1.max(k2) as f64 / 64.0);
        prop_assert!(d_norm(&f, lo).unwrap() <= d_norm(&f, hi).unwrap());
    }

    #[test]
    fn free_wave_identities_are_exact(f in data(), g in data()) {
        let grid = grid(1.0 / 128.0);
        let f = sample_function(&grid, &f).unwrap();
        let g = sample_function(&grid, &g).unwrap();
        for r in check_identities(&f, &g, 0.5).unwrap() {
            prop_assert!(r.pass, "{:?}", r);
        }
    }

    #[test]
    fn data_inequalities_hold(f in data(), a in -150isize..150, r in 1usize..200) {
        let grid = grid(1.0 / 128.0);
        let f = sample_function(&grid, &f).unwrap();
        for rep in check_data_inequalities(&f, 0.25, a as f64 / 128.0, r as f64 / 128.0).unwrap() {
            prop_assert!(rep.pass, "{:?}", rep);
        }
    }

    #[test]
    fn duhamel_output_obeys_the_linear_bound(f in data(), g_src in data(), speed in -1.0..1.0f64) {
        let grid = grid(1.0 / 64.0);
        let h = grid.dx;
        let f = sample_function(&grid, &f).unwrap();
        let zero = GridFunction::zeros(grid);
        let big_g = random_slab(&grid, &g_src, speed);
        let big_f = Slab::for_grid(&grid);
        let sol = duhamel_solve(&f, &zero, &big_g, &big_f, &grid).unwrap();
        let y = y_norm_slab(&sol.u, Direction::Plus, h);
        let rhs = 3.0 * d_norm(&f, 0.5).unwrap() + 3.0 * n_norm_slab(&big_g, Direction::Plus, h);
        prop_assert!(y <= rhs * (1.0 + 1e-9), "Y = {y}, bound = {rhs}");
        let env = envelope_norm_slab(&sol.u, Direction::Plus, h);
        prop_assert!(env.is_finite() && env <= y);
    }

    #[test]
    fn light_cone_potentials_recombine_exactly(f in data(), g in data(), a0 in real_bump(), lam in -2.0..2.0f64) {
        let grid = grid(1.0 / 64.0);
        let (f, g) = (sample_function(&grid, &f).unwrap(), sample_function(&grid, &g).unwrap());
        let spinor = free_solution(&f, &g, &grid).unwrap();
        let mut fields = mdtgn::FieldData::zeros(grid);
        fields.a0 = sample_real(&grid, &a0).unwrap();
        fields.e0 = gauss_e0(&f, &g, 0.1);
        let pa = assemble_potentials(&spinor, &fields, lam);
        let two = |s: &Slab<f64>| s.map(|x: f64| 2.0 * x);
        prop_assert_eq!(two(&pa.em.a0), pa.a_plus.zip_map(&pa.a_minus, |p, m| p + m));
        prop_assert_eq!(two(&pa.em.a1), pa.a_plus.zip_map(&pa.a_minus, |p, m| p - m));
    }

    #[test]
    fn free_charge_is_bitwise_constant(f in data(), g in data()) {
        let grid = grid(1.0 / 64.0);
        let h: SpinorHistory = free_solution(
            &sample_function(&grid, &f).unwrap(),
            &sample_function(&grid, &g).unwrap(),
            &grid,
        )
        .unwrap();
        let q0 = total_charge(&h, 0);
        for k in 1..grid.layers() {
            prop_assert_eq!(total_charge(&h, k), q0);
        }
    }

    #[test]
    fn null_and_field_estimates_hold(seed in any::<u64>(), trial in 0u64..1000) {
        let spec = RandomFieldSpec { seed, dx: 1.0 / 256.0, ..RandomFieldSpec::default() };
        for r in run_trial(&spec, trial).unwrap() {
            prop_assert!(r.pass, "{:?}", r);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn local_charge_bound_holds_on_every_cone(
        f in data(),
        g in data(),
        cones in prop::collection::vec((-40isize..40, 4usize..32, 0.0..1.0f64), 6),
    ) {
        let grid = grid(1.0 / 64.0);
        let mut d = InitialData::zeros(grid);
        let half = |spec: &FunctionSpec| {
            let mut s = sample_function(&grid, spec).unwrap();
            s.values.iter_mut().for_each(|z| *z *= 0.5);
            s
        };
        d.f = half(&f);
        d.g = half(&g);
        d.fields.e0 = gauss_e0(&d.f, &d.g, 0.0);
        let params = ModelParams::mdtgn(0.3, 1.0, 1.0, 1.0).unwrap();
        let config = SolverConfig { scheme: Scheme::Splitstep, ..SolverConfig::default() };
        let sol = solve(&d, &params, &grid, &config).unwrap();
        for (x0, t0, frac) in cones {
            let cone = ConeRegion::at(&sol.spinor, x0 as f64 / 64.0, t0 as f64 / 64.0).unwrap();
            let t = ((t0 as f64) * frac) as usize;
            for r in cone_charge_report(&sol.spinor, cone, t).unwrap() {
                if r.name == "LocalChargeBound" {
                    prop_assert!(r.pass, "{:?}", r);
                }
            }
        }
    }

    #[test]
    fn gauge_transform_preserves_moduli(f in data(), chi in real_bump(), chi_t in real_bump()) {
        let grid = grid(1.0 / 64.0);
        let mut d = InitialData::zeros(grid);
        d.f = sample_function(&grid, &f).unwrap();
        let sol = solve(&d, &ModelParams::free(0.5).unwrap(), &grid, &SolverConfig::default()).unwrap();
        let gf = solve_wave(&sample_real(&grid, &chi).unwrap(), &sample_real(&grid, &chi_t).unwrap(), &grid).unwrap();
        let moved = gauge_transform(&sol, &gf);
        for (a, b) in moved.spinor.u.data.iter().zip(&sol.spinor.u.data) {
            prop_assert!((a.norm() - b.norm()).abs() <= 4.0 * f64::EPSILON * b.norm());
        }
        prop_assert_eq!(&moved.em.e, &sol.em.e);
    }
}
