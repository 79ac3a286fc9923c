use proptest::prelude::*;

use tracelab::celliptic::{build_cover, build_pou, kernel_basis, project_fn, DiffOperator, DEFAULT_DEGREE_CAP};
use tracelab::celliptic::poly::TensorRule;
use tracelab::celliptic::Cube;
use tracelab::corpus::BoundaryProfile;
use tracelab::exponents::{interpolation_exponents, sobolev_conjugate, trace_exponent, ExponentSet, LebesgueExponent};
use tracelab::grid::{restrict_to_boundary, sample_boundary, sample_half_space, BoundaryGrid, BoundaryGridFunction, LevelSchedule};
use tracelab::lift_staircase::{staircase_bounds_check, staircase_extend, ApproximantOptions};
use tracelab::lift_truncation::{linf_extend, nonlinear_extend, onset_levels};
use tracelab::maximal::{maximal_function, RadiusLadder};
use tracelab::norms::{gagliardo_seminorm, lp_norm, SeminormParams};
use tracelab::poisson::poisson_extend;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 32, ..ProptestConfig::default() }
}

/// `(n, p, q)` with `1 < p < n` and `q > p*`.
fn valid_triple() -> impl Strategy<Value = (usize, f64, f64)> {
    (2usize..=7).prop_flat_map(|n| {
        (Just(n), 1.01f64..(n as f64 - 0.01)).prop_flat_map(|(n, p)| {
            let star = sobolev_conjugate(p, n).unwrap();
            (Just(n), Just(p), (star * 1.001)..(star * 20.0))
        })
    })
}

fn random_values(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, len)
}

fn line(h: f64) -> BoundaryGrid {
    BoundaryGrid::new(1, 1.0, h).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn exponent_identities((n, p, q) in valid_triple()) {
        let e = ExponentSet::new(n, p, q).unwrap();
        let (_, r, beta) = e.finite_triplet().unwrap();
        prop_assert!(rel(r, q - beta) <= 1e-12);
        prop_assert!(rel((r - 1.0) * p / (p - 1.0), q) <= 1e-12);
        prop_assert!(beta > 0.0 && q / beta > 1.0);
        prop_assert!(rel(p * (beta + 1.0), q) <= 1e-12);
        let gn = interpolation_exponents(n, p, q).unwrap();
        prop_assert!(rel(gn.p_max, r) <= 1e-12);
        prop_assert!(gn.r_tilde > r);
    }

    #[test]
    fn trace_exponent_monotone((_n, p, q) in valid_triple(), dq in 0.01f64..5.0, dp in 0.001f64..0.5) {
        prop_assert!(trace_exponent(p, q + dq).unwrap() > trace_exponent(p, q).unwrap());
        if p + dp < q {
            prop_assert!(trace_exponent(p + dp, q).unwrap() > trace_exponent(p, q).unwrap());
        }
    }

    #[test]
    fn trace_exponent_at_conjugate(n in 2usize..=9, t in 0.01f64..0.99) {
        let p = 1.0 + t * (n as f64 - 1.0);
        let nf = n as f64;
        let limit = trace_exponent(p, sobolev_conjugate(p, n).unwrap()).unwrap();
        prop_assert!((limit - p * (nf - 1.0) / (nf - p)).abs() <= 1e-12 * limit);
    }

    #[test]
    fn boundary_restriction_round_trip(a in -3.0f64..3.0, w in 0.1f64..1.0) {
        let g = BoundaryGrid::new(2, 1.0, 0.1).unwrap();
        let levels = [0.0, 0.1, 0.5];
        let f = |x: &[f64]| a * (-(x[0] * x[0] + x[1] * x[1]) / (w * w)).exp();
        let u = sample_half_space(|x, _| f(x), &g, &levels).unwrap();
        let b = sample_boundary(f, &g).unwrap();
        let r = restrict_to_boundary(&u).unwrap();
        prop_assert_eq!(r.values(), b.values());
    }

    #[test]
    fn refinement_nests_nodes(k in 1usize..20, factor in 1usize..5) {
        let g = line(1.0 / k as f64);
        let fine = g.refine(factor).unwrap();
        prop_assert_eq!(fine.half_extent(), g.half_extent());
        for i in 0..g.per_axis() {
            prop_assert!((fine.axis_coord(i * factor) - g.axis_coord(i)).abs() <= 1e-12);
        }
    }

    #[test]
    fn seminorm_homogeneous_and_subadditive(a in random_values(21), b in random_values(21), c in -4.0f64..4.0, s in 0.1f64..0.9, p in 1.1f64..3.0) {
        let g = line(0.1);
        let f = BoundaryGridFunction::new(g.clone(), a).unwrap();
        let k = BoundaryGridFunction::new(g, b).unwrap();
        let params = SeminormParams::new(s, p).unwrap();
        let sf = gagliardo_seminorm(&f, params).unwrap();
        let scaled = gagliardo_seminorm(&f.scaled(c), params).unwrap();
        prop_assert!((scaled - c.abs() * sf).abs() <= 1e-12 * sf.max(1.0));
        let sum = gagliardo_seminorm(&f.zip_with(&k, |x, y| x + y).unwrap(), params).unwrap();
        prop_assert!(sum <= sf + gagliardo_seminorm(&k, params).unwrap() + 1e-10);
    }

    #[test]
    fn lp_norm_monotone(a in random_values(41), t in prop::collection::vec(0.0f64..1.0, 41), p in 1.0f64..6.0) {
        let g = line(0.05);
        let big = BoundaryGridFunction::new(g.clone(), a.clone()).unwrap();
        let small = BoundaryGridFunction::new(g, a.iter().zip(&t).map(|(x, s)| x * s).collect()).unwrap();
        prop_assert!(lp_norm(&small, p).unwrap() <= lp_norm(&big, p).unwrap());
        prop_assert!(lp_norm(&small, LebesgueExponent::Infinite).unwrap() <= lp_norm(&big, LebesgueExponent::Infinite).unwrap());
    }

    #[test]
    fn maximal_sublinear_and_homogeneous(a in random_values(41), b in random_values(41), e in -3i32..3, neg in any::<bool>()) {
        let g = line(0.05);
        let ladder = RadiusLadder::default_for(&g);
        let f = BoundaryGridFunction::new(g.clone(), a).unwrap();
        let k = BoundaryGridFunction::new(g, b).unwrap();
        let (mf, mk) = (maximal_function(&f, &ladder).unwrap(), maximal_function(&k, &ladder).unwrap());
        let msum = maximal_function(&f.zip_with(&k, |x, y| x + y).unwrap(), &ladder).unwrap();
        for i in 0..mf.values().len() {
            // averages of f + g and of f, g round separately
            let bound = mf.value(i) + mk.value(i);
            prop_assert!(msum.value(i) <= bound + 1e-14 * bound.max(1.0));
        }
        // powers of two scale without rounding
        let c = if neg { -(2f64.powi(e)) } else { 2f64.powi(e) };
        let mc = maximal_function(&f.scaled(c), &ladder).unwrap();
        for i in 0..mf.values().len() {
            prop_assert_eq!(mc.value(i), c.abs() * mf.value(i));
        }
    }

    #[test]
    fn poisson_linear_positive_and_bounded(a in prop::collection::vec(0.0f64..2.0, 41), b in random_values(41), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let g = line(0.05);
        let levels = [0.05, 0.2, 1.0];
        let f = BoundaryGridFunction::new(g.clone(), a).unwrap();
        let k = BoundaryGridFunction::new(g, b).unwrap();
        let vf = poisson_extend(&f, &levels).unwrap();
        let vk = poisson_extend(&k, &levels).unwrap();
        let combo = poisson_extend(&f.zip_with(&k, |x, y| s * x + t * y).unwrap(), &levels).unwrap();
        for ((c, x), y) in combo.values().iter().zip(vf.values()).zip(vk.values()) {
            prop_assert!((c - (s * x + t * y)).abs() <= 1e-12);
        }
        prop_assert!(vf.values().iter().all(|&v| v >= 0.0));
        prop_assert!(vk.max_abs() <= k.max_abs() * (1.0 + 1e-3));
    }

    #[test]
    fn truncation_support_exact(amp in 0.5f64..30.0, width in 0.15f64..0.5, q in 7.0f64..14.0) {
        let g = line(0.05);
        let e = ExponentSet::new(2, 1.5, q).unwrap();
        let f = BoundaryProfile::gaussian(amp, width).sample(&g).unwrap();
        let levels = onset_levels(f.max_abs(), e.beta.unwrap(), 0.05, 1.25, 4.0).unwrap();
        let ext = nonlinear_extend(&f, e, &levels).unwrap();
        let rep = ext.check_support();
        prop_assert_eq!(rep.violations, 0);
        prop_assert!(rep.max_on_support <= 2.0);
    }

    #[test]
    fn mollifier_lifting_bounded(a in random_values(41)) {
        let f = BoundaryGridFunction::new(line(0.05), a).unwrap();
        let u = linf_extend(&f, &[0.0, 0.1, 0.5, 1.5, 2.0, 3.0]).unwrap();
        prop_assert!(u.max_abs() <= f.max_abs());
        prop_assert!(u.slice(4).iter().chain(u.slice(5)).all(|&v| v == 0.0));
    }

    #[test]
    fn staircase_layer_structure(radius in 0.2f64..0.9, depth in 2usize..6, infinite in any::<bool>()) {
        let g = BoundaryGrid::new(1, 1.5, 0.02).unwrap();
        let f = BoundaryProfile::Indicator { radius }.sample(&g).unwrap();
        let q = if infinite { LebesgueExponent::Infinite } else { LebesgueExponent::Finite(3.0) };
        let st = staircase_extend(&f, q, depth, 3, &ApproximantOptions::default()).unwrap();
        let rep = staircase_bounds_check(&st).unwrap();
        prop_assert!(rep.all_hold(), "{:?}", rep);
        let levels = st.field.levels();
        // strip j spans layer_index[j+1]..=layer_index[j]; inside it u is linear in x_n
        // and bounded by |f_j| + |f_{j+1}|
        for j in 0..depth {
            let (lo, hi) = (st.layer_index[j + 1], st.layer_index[j]);
            let (fj, fk) = (&st.sequence.members[j], &st.sequence.members[j + 1]);
            for k in lo..=hi {
                for i in 0..g.len() {
                    prop_assert!(st.field.at(k, i, 0).abs() <= fj.value(i).abs() + fk.value(i).abs() + 1e-15);
                }
            }
            for k in lo + 1..hi {
                let (a, b) = ((levels[k] - levels[k - 1]), (levels[k + 1] - levels[k]));
                for i in 0..g.len() {
                    let slope_l = (st.field.at(k, i, 0) - st.field.at(k - 1, i, 0)) / a;
                    let slope_r = (st.field.at(k + 1, i, 0) - st.field.at(k, i, 0)) / b;
                    let scale = (fj.value(i) - fk.value(i)).abs() / (levels[hi] - levels[lo]);
                    prop_assert!((slope_l - slope_r).abs() <= 1e-8 * scale.max(1.0));
                }
            }
        }
    }

    #[test]
    fn partition_sums_to_one(level in 0i32..6, x in -0.9f64..0.9, t in 0.05f64..0.95) {
        let pou = build_pou(build_cover(level, &[(-1.0, 1.0), (0.0, 1.0)]).unwrap());
        prop_assert!((pou.sum(&[x, t]) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn projection_reproduces_kernel(cx in -2.0f64..2.0, cy in -2.0f64..2.0, side in 0.01f64..4.0, sym in any::<bool>(), k in 0usize..3) {
        let op = if sym { DiffOperator::symmetric_gradient_2d() } else { DiffOperator::gradient(2).unwrap() };
        let basis = kernel_basis(&op, DEFAULT_DEGREE_CAP).unwrap();
        let i = k % basis.len();
        let comps = op.components();
        let cube = Cube::new(vec![cx, cy], side);
        let proj = project_fn(
            |x, out| {
                let mut s = vec![0.0; basis.len() * comps];
                basis.eval_on(&cube, x, &mut s);
                out.copy_from_slice(&s[i * comps..(i + 1) * comps]);
            },
            &cube,
            &basis,
            &TensorRule::new(2, 4, 1),
        );
        for (m, c) in proj.coefficients.iter().enumerate() {
            let expected = if m == i { 1.0 } else { 0.0 };
            prop_assert!((c - expected).abs() <= 1e-10, "coefficient {} = {}", m, c);
        }
    }
}

#[test]
fn corpus_sup_bound_on_levels() {
    let g = BoundaryGrid::new(1, 2.0, 0.05).unwrap();
    let levels = LevelSchedule::Geometric { first: 0.05, ratio: 1.25, top: 4.0 }.levels().unwrap();
    for p in tracelab::corpus::smooth_corpus() {
        let f = p.sample(&g).unwrap();
        let v = poisson_extend(&f, &levels).unwrap();
        assert!(v.max_abs() <= f.max_abs() * (1.0 + 1e-3));
    }
}
