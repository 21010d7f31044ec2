use proptest::prelude::*;
use rand::SeedableRng;

use qcx_core::expr::{parse_expr, parse_with, VarStyle};
use qcx_core::lp::fit_affine_upper_envelope;
use qcx_core::qconvex::{sup_convolve, witness_search, KernelProfile, KernelSpec, WitnessBudget};
use qcx_core::sampling::{gram_schmidt, random_direction};
use qcx_core::sets::{product_max_field, set_q_convex_check, NormSpec, OpenSetModel, SetVerdict};
use qcx_core::{
    eig_symmetric, inertia, levi_matrix, reinhardt_pullback, DomainBox, GridField, GridSpec, ScalarField,
    SymmetricMatrix,
};

fn small_budget() -> WitnessBudget {
    WitnessBudget {
        slices: 8,
        boundary_samples: 48,
        interior_samples: 48,
        centers_per_axis: 2,
        radii: 2,
        ..WitnessBudget::default()
    }
}

fn expr_source() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (1usize..=3).prop_map(|i| format!("x{i}")),
        (-5.0f64..5.0).prop_map(|c| format!("{c:.3}")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) * ({b})")),
            inner.clone().prop_map(|a| format!("-({a})")),
            inner.clone().prop_map(|a| format!("({a})^2")),
            inner.clone().prop_map(|a| format!("sqrt(1 + ({a})^2)")),
            inner.clone().prop_map(|a| format!("exp(({a}) / 10)")),
        ]
    })
}

fn symmetric(n: usize) -> impl Strategy<Value = SymmetricMatrix> {
    prop::collection::vec(-3.0f64..3.0, n * n).prop_map(move |v| SymmetricMatrix::symmetrized(n, &v))
}

fn same_eigs(a: &[f64], b: &[f64], tol: f64) -> bool {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_expressions_reparse_to_the_same_function(src in expr_source(), p in prop::array::uniform3(-2.0f64..2.0)) {
        let e = parse_expr(&src, 3).unwrap();
        let again = parse_with(&e.to_source(VarStyle::Real { dim: 3 }), VarStyle::Real { dim: 3 }).unwrap();
        match (e.eval(&p), again.eval(&p)) {
            (Ok(a), Ok(b)) => prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{src}: {a} vs {b}"),
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }

    #[test]
    fn eigenvalues_sum_to_the_trace(m in (1usize..=6).prop_flat_map(symmetric)) {
        let eigs = eig_symmetric(&m).unwrap();
        prop_assert!((eigs.iter().sum::<f64>() - m.trace()).abs() <= 1e-9 * m.frobenius().max(1.0));
    }

    #[test]
    fn eigenvalues_survive_orthogonal_similarity(m in symmetric(4), seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let q = gram_schmidt(&(0..4).map(|_| random_direction(&mut rng, 4)).collect::<Vec<_>>());
        prop_assume!(q.len() == 4);
        let mut data = vec![0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                data[i * 4 + j] = (0..4)
                    .flat_map(|k| (0..4).map(move |l| (k, l)))
                    .map(|(k, l)| q[k][i] * m.get(k, l) * q[l][j])
                    .sum();
            }
        }
        let rotated = SymmetricMatrix::symmetrized(4, &data);
        let tol = 1e-9 * m.frobenius().max(1.0);
        prop_assert!(same_eigs(&eig_symmetric(&m).unwrap(), &eig_symmetric(&rotated).unwrap(), tol));
    }

    #[test]
    fn inertia_ignores_positive_scaling_and_flips_under_negation(
        eigs in prop::collection::vec(prop_oneof![-5.0f64..-0.1, 0.1f64..5.0], 1..6),
        c in 0.5f64..50.0,
    ) {
        let base = inertia(&eigs, 1e-7);
        let scaled: Vec<f64> = eigs.iter().map(|l| c * l).collect();
        let negated: Vec<f64> = eigs.iter().map(|l| -l).collect();
        prop_assert_eq!(inertia(&scaled, 1e-7).negatives, base.negatives);
        prop_assert_eq!(inertia(&negated, 1e-7).negatives, base.positives);
    }

    #[test]
    fn envelope_matches_vertex_enumeration(
        angles in prop::collection::vec(0.0f64..std::f64::consts::TAU, 6..12),
        values in prop::collection::vec(-2.0f64..2.0, 12),
    ) {
        let mut pts: Vec<(Vec<f64>, f64)> = [0.0, 2.1, 4.2]
            .iter()
            .chain(&angles)
            .zip(&values)
            .map(|(a, u)| (vec![a.cos(), a.sin()], *u))
            .collect();
        pts.dedup_by(|a, b| (a.0[0] - b.0[0]).abs() + (a.0[1] - b.0[1]).abs() < 1e-6);
        let lp = fit_affine_upper_envelope(&pts, &[0.0, 0.0]).unwrap();

        // Brute force over planes through every triple of samples.
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                for k in j + 1..pts.len() {
                    let (p, q, r) = (&pts[i], &pts[j], &pts[k]);
                    let (a1, a2) = (q.0[0] - p.0[0], q.0[1] - p.0[1]);
                    let (b1, b2) = (r.0[0] - p.0[0], r.0[1] - p.0[1]);
                    let det = a1 * b2 - a2 * b1;
                    if det.abs() < 1e-9 {
                        continue;
                    }
                    let (du, dv) = (q.1 - p.1, r.1 - p.1);
                    let g = [(du * b2 - dv * a2) / det, (a1 * dv - b1 * du) / det];
                    let c = p.1 - g[0] * p.0[0] - g[1] * p.0[1];
                    let feasible = pts.iter().all(|(x, u)| g[0] * x[0] + g[1] * x[1] + c >= u - 1e-9);
                    if feasible {
                        best = best.min(c);
                    }
                }
            }
        }
        prop_assert!((lp.offset - best).abs() <= 1e-7, "lp {} vs vertices {}", lp.offset, best);
        for (x, u) in &pts {
            prop_assert!(lp.eval(x) >= u - 1e-9);
        }
    }

    #[test]
    fn norms_satisfy_the_axioms(
        kind in 0usize..4,
        p in 1.0f64..6.0,
        w in prop::collection::vec(0.1f64..3.0, 3),
        a in prop::array::uniform3(-3.0f64..3.0),
        b in prop::array::uniform3(-3.0f64..3.0),
        c in -4.0f64..4.0,
    ) {
        let nrm = match kind {
            0 => NormSpec::Euclidean,
            1 => NormSpec::Max,
            2 => NormSpec::P { p },
            _ => NormSpec::Weighted { weights: w },
        };
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let scaled: Vec<f64> = a.iter().map(|x| c * x).collect();
        let tol = 1e-12 * (nrm.eval(&a) + nrm.eval(&b)).max(1.0);
        prop_assert!(nrm.eval(&sum) <= nrm.eval(&a) + nrm.eval(&b) + tol);
        prop_assert!((nrm.eval(&scaled) - c.abs() * nrm.eval(&a)).abs() <= tol * c.abs().max(1.0));
        prop_assert!(nrm.eval(&a) >= 0.0);
        prop_assert_eq!(nrm.eval(&[0.0; 3]), 0.0);
    }
}

fn primitive(kind: usize) -> OpenSetModel {
    match kind {
        0 => OpenSetModel::Ball {
            center: vec![0.2, -0.1],
            radius: 1.1,
        },
        1 => OpenSetModel::Box(DomainBox::new(vec![(-1.0, 1.2), (-0.9, 1.0)]).unwrap()),
        2 => OpenSetModel::HalfSpace {
            a: vec![0.6, -0.8],
            b: 0.9,
        },
        _ => OpenSetModel::BallExterior {
            center: vec![3.0, 0.0],
            radius: 1.0,
        },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn directional_distance_bounds_the_euclidean_one(
        kind in 0usize..4,
        x in prop::array::uniform2(-0.8f64..0.8),
        angle in 0.0f64..std::f64::consts::TAU,
    ) {
        let s = primitive(kind);
        prop_assume!(s.member(&x).unwrap());
        let v = [angle.cos(), angle.sin()];
        let dir = s.dist_directional(&x, &v, 100.0).unwrap();
        prop_assert!(dir.value >= s.dist_euclid(&x).unwrap() - 1e-9);
    }

    #[test]
    fn sampled_euclidean_distance_tracks_the_closed_form(kind in 0usize..4, x in prop::array::uniform2(-0.8f64..0.8)) {
        let s = primitive(kind);
        prop_assume!(s.member(&x).unwrap());
        let exact = s.dist_euclid(&x).unwrap();
        let sampled = s.dist_norm(&x, &NormSpec::Euclidean, 1024, 0).unwrap();
        prop_assert!(sampled >= exact - 1e-9);
        prop_assert!(sampled <= exact * 1.01 + 1e-12, "{sampled} vs {exact}");
    }

    #[test]
    fn reinhardt_pullback_ignores_arguments(
        r in prop::array::uniform2(0.3f64..2.5),
        theta in prop::array::uniform2(0.0f64..std::f64::consts::TAU),
        phi in prop::array::uniform2(0.0f64..std::f64::consts::TAU),
    ) {
        let u = ScalarField::from_expr("x1^2 - x1*x2 + exp(x2 / 3)", 2).unwrap();
        let psi = reinhardt_pullback(&u);
        let at = |a: [f64; 2]| psi.eval(&[r[0] * a[0].cos(), r[1] * a[1].cos(), r[0] * a[0].sin(), r[1] * a[1].sin()]).unwrap();
        let (p, q) = (at(theta), at(phi));
        prop_assert!((p - q).abs() <= 1e-12 * p.abs().max(1.0));
    }

    #[test]
    fn pluriharmonic_fields_have_vanishing_levi_form(
        c in prop::array::uniform4(-2.0f64..2.0),
        z in prop::array::uniform4(-1.0f64..1.0),
    ) {
        // Real parts of c0 z1^2 + c1 z1 z2 + c2 z2^3 + c3 z1.
        let src = format!(
            "({})*(x1^2-y1^2) + ({})*(x1*x2-y1*y2) + ({})*(x2^3-3*x2*y2^2) + ({})*x1",
            c[0], c[1], c[2], c[3]
        );
        let psi = ScalarField::from_complex_expr(&src, 2).unwrap();
        let levi = levi_matrix(&psi, &z).unwrap();
        let scale = levi.real_hessian.max_abs().max(1.0);
        for k in 0..2 {
            for l in 0..2 {
                prop_assert!(levi.matrix.get(k, l).norm() <= 1e-6 * scale);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn witnesses_appear_exactly_above_the_negative_count(
        eigs in prop::collection::vec(prop_oneof![-2.0f64..-0.2, 0.2f64..2.0], 2..=3),
        q in 0usize..2,
    ) {
        let n = eigs.len();
        let src = eigs.iter().enumerate().map(|(i, l)| format!("({l})*x{}^2", i + 1)).collect::<Vec<_>>().join("+");
        let u = ScalarField::from_expr(&src, n).unwrap();
        let out = witness_search(&u, q, &DomainBox::cube(n, -1.0, 1.0), &small_budget(), 0).unwrap();
        let negatives = eigs.iter().filter(|l| **l < 0.0).count();
        prop_assert_eq!(out.witness.is_some(), negatives > q, "{} at q={}", src, q);
    }

    #[test]
    fn clean_levels_stay_clean_upwards(a in symmetric(3), seed in 0u64..1000) {
        let src = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| format!("({})*x{}*x{}", a.get(i, j), i + 1, j + 1))
            .collect::<Vec<_>>()
            .join("+");
        let u = ScalarField::from_expr(&src, 3).unwrap();
        let b = DomainBox::cube(3, -1.0, 1.0);
        let found: Vec<bool> = (0..3)
            .map(|q| witness_search(&u, q, &b, &small_budget(), seed).unwrap().witness.is_some())
            .collect();
        for q in 0..2 {
            prop_assert!(found[q] || !found[q + 1], "{src}: {found:?}");
        }
    }

    #[test]
    fn convex_primitives_pass_at_level_zero(kind in 0usize..3, seed in 0u64..1000) {
        let s = primitive(kind);
        let r = set_q_convex_check(&s, 0, &DomainBox::cube(2, -0.8, 0.8), &small_budget(), seed).unwrap();
        prop_assert_eq!(r.verdict, SetVerdict::Consistent);
    }

    #[test]
    fn max_over_a_product_adds_the_levels(a in 0.2f64..2.0, b in 0.2f64..2.0, c in 0.2f64..2.0) {
        // v1 is 1-convex on R^2 and v2 is 0-convex on R^1, so the product
        // field is 2-convex on R^3.
        let v1 = ScalarField::from_expr(&format!("{a}*x1^2 - {b}*x2^2"), 2).unwrap();
        let v2 = ScalarField::from_expr(&format!("{c}*x1^2"), 1).unwrap();
        let w = product_max_field(&v1, &v2);
        let out = witness_search(&w, 2, &DomainBox::cube(3, -1.0, 1.0), &small_budget(), 0).unwrap();
        prop_assert!(!out.trivial && out.witness.is_none());
        let out = witness_search(&v1, 1, &DomainBox::cube(2, -1.0, 1.0), &small_budget(), 0).unwrap();
        prop_assert!(out.witness.is_none());
    }

    #[test]
    fn sup_convolution_dominates_nonnegative_fields(shift in 0.5f64..3.0, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let grid = GridSpec::uniform(DomainBox::cube(2, -1.0, 1.0), 21).unwrap();
        let u = GridField::from_fn(grid.clone(), |p| shift + 0.2 * (a * p[0] * p[0] + b * p[0] * p[1]));
        let kernel = KernelSpec::new(0.2, KernelProfile::Polynomial).unwrap();
        let v = sup_convolve(&u, &kernel, Some(&grid.bounds)).unwrap();
        for (i, p) in v.grid.points().enumerate() {
            let idx: Vec<usize> = (0..2)
                .map(|ax| ((p[ax] - grid.bounds.intervals[ax].0) / grid.spacing(ax)).round() as usize)
                .collect();
            prop_assert!(v.values[i] >= u.at(&idx) - 1e-12);
        }
    }
}
