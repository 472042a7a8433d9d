use mproots_core::dk::{default_eps_rel, DEFAULT_MAX_ITER};
use mproots_core::pipeline::check_root_product;
use mproots_core::{
    chebyshev_poly, dk2_step, dk3_step, solve, wilkinson, MpComplex, Order, Polynomial, Precision, RootVector,
    SolveConfig, Start, UpdateMode,
};
use proptest::prelude::*;
use rug::Float;

const BITS: u32 = 256;

fn p(bits: u32) -> Precision {
    Precision::new(bits).unwrap()
}

fn close(a: &MpComplex, b: &MpComplex, slack: i32) -> bool {
    let d = (a - b).abs();
    let scale = a.abs().max(&Float::with_val(BITS, 1));
    d <= scale * p(BITS).pow2(slack - BITS as i32)
}

fn step(order: Order, poly: &Polynomial, z: &RootVector) -> RootVector {
    match order {
        Order::Second => dk2_step(&poly.make_monic(), z, UpdateMode::Jacobi).unwrap(),
        Order::Third => dk3_step(poly, z, UpdateMode::Jacobi).unwrap(),
    }
}

/// A random monic polynomial and well separated starting points.
fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<(f64, f64)>)> {
    (3usize..=9).prop_flat_map(|n| {
        (
            prop::collection::vec(-3.0f64..3.0, n),
            prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n),
        )
    })
}

fn separated(z: &[(f64, f64)]) -> bool {
    z.iter().enumerate().all(|(i, a)| {
        z[..i]
            .iter()
            .all(|b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt() > 0.05)
    })
}

fn build(coeffs: &[f64], z: &[(f64, f64)]) -> (Polynomial, RootVector) {
    let mut c = coeffs.to_vec();
    c.push(1.0);
    let poly = Polynomial::from_f64(&c, p(BITS)).unwrap();
    let roots = RootVector::new(z.iter().map(|&(a, b)| p(BITS).complex(a, b)).collect());
    (poly, roots)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn steps_commute_with_permutation(
        (coeffs, z) in instance(),
        third in any::<bool>(),
        seed in any::<u64>(),
    ) {
        prop_assume!(separated(&z));
        let order = if third { Order::Third } else { Order::Second };
        let (poly, roots) = build(&coeffs, &z);
        let n = z.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let permuted = RootVector::new(perm.iter().map(|&k| roots.z[k].clone()).collect());
        let a = step(order, &poly, &roots);
        let b = step(order, &poly, &permuted);
        // products run in a different order, so agreement is up to rounding
        for (i, &k) in perm.iter().enumerate() {
            prop_assert!(close(&b.z[i], &a.z[k], 24), "root {k}");
        }
    }

    #[test]
    fn steps_commute_with_conjugation(
        (coeffs, z) in instance(),
        third in any::<bool>(),
    ) {
        prop_assume!(separated(&z));
        let order = if third { Order::Third } else { Order::Second };
        let (poly, roots) = build(&coeffs, &z);
        let conj = RootVector::new(roots.z.iter().map(MpComplex::conj).collect());
        let a = step(order, &poly, &roots);
        let b = step(order, &poly, &conj);
        for (x, y) in a.z.iter().zip(&b.z) {
            prop_assert_eq!(x.conj(), y.clone());
        }
    }

    #[test]
    fn jacobi_is_thread_count_independent(n in 4usize..=24, threads in 2usize..=4) {
        let poly = chebyshev_poly(n, p(BITS)).unwrap();
        let cfg = SolveConfig::for_precision(p(BITS)).order(Order::Second);
        let one = solve(&poly, Start::Aberth, &cfg).unwrap();
        let many = solve(&poly, Start::Aberth, &cfg.clone().threads(threads)).unwrap();
        prop_assert!(one.converged);
        prop_assert_eq!(one.iterations, many.iterations);
        prop_assert_eq!(one.roots.z, many.roots.z);
        prop_assert_eq!(one.step_sizes, many.step_sizes);
    }
}

#[test]
fn integer_roots_are_fixed_points() {
    let (poly, exact) = wilkinson(20, p(BITS)).unwrap();
    let z = RootVector::new(exact.roots.clone());
    for order in [Order::Second, Order::Third] {
        for mode in [UpdateMode::Jacobi, UpdateMode::GaussSeidel] {
            let next = match order {
                Order::Second => dk2_step(&poly.make_monic(), &z, mode).unwrap(),
                Order::Third => dk3_step(&poly, &z, mode).unwrap(),
            };
            assert_eq!(next.z, z.z, "{order:?} {mode:?}");
        }
    }
}

#[test]
fn converged_roots_reproduce_constant_term() {
    for poly in [
        wilkinson(20, p(BITS)).unwrap().0,
        chebyshev_poly(32, p(BITS)).unwrap(),
        Polynomial::from_f64(&[-6.0, 11.0, -6.0, 1.0], p(BITS)).unwrap(),
    ] {
        for order in [Order::Second, Order::Third] {
            let cfg = SolveConfig::for_precision(p(BITS)).order(order);
            let res = solve(&poly, Start::Aberth, &cfg).unwrap();
            assert!(res.converged);
            check_root_product(&poly, &res.roots.z).unwrap();
        }
    }
}

#[test]
fn third_order_needs_fewer_sweeps() {
    for poly in [wilkinson(40, p(BITS)).unwrap().0, chebyshev_poly(48, p(BITS)).unwrap()] {
        let cfg = SolveConfig::for_precision(p(BITS));
        let k2 = solve(&poly, Start::Aberth, &cfg.clone().order(Order::Second)).unwrap();
        let k3 = solve(&poly, Start::Aberth, &cfg.clone().order(Order::Third)).unwrap();
        assert!(k2.converged && k3.converged);
        assert!(
            (k3.iterations as f64) <= 0.7 * k2.iterations as f64,
            "{} vs {}",
            k3.iterations,
            k2.iterations
        );
    }
}

#[test]
fn gauss_seidel_converges_with_threads() {
    let poly = chebyshev_poly(32, p(BITS)).unwrap();
    let reference = solve(
        &poly,
        Start::Aberth,
        &SolveConfig::for_precision(p(BITS)).order(Order::Third),
    )
    .unwrap();
    for threads in [1, 3] {
        let cfg = SolveConfig::for_precision(p(BITS))
            .mode(UpdateMode::GaussSeidel)
            .threads(threads);
        let res = solve(&poly, Start::Aberth, &cfg).unwrap();
        assert!(res.converged, "threads={threads}");
        let tol = Float::with_val(64, default_eps_rel(p(BITS))) * 1e6;
        for z in &res.roots.z {
            let best = reference
                .roots
                .z
                .iter()
                .map(|r| (z - r).abs())
                .min_by(|a, b| a.total_cmp(b))
                .unwrap();
            assert!(best <= tol, "threads={threads}");
        }
    }
}

#[test]
fn gauss_seidel_single_thread_is_deterministic() {
    let poly = wilkinson(24, p(BITS)).unwrap().0;
    let cfg = SolveConfig::for_precision(p(BITS)).mode(UpdateMode::GaussSeidel);
    let a = solve(&poly, Start::Aberth, &cfg).unwrap();
    let b = solve(&poly, Start::Aberth, &cfg).unwrap();
    assert_eq!(a.roots.z, b.roots.z);
    assert_eq!(a.iterations, b.iterations);
    assert!(a.iterations < DEFAULT_MAX_ITER);
}
