mod common;

use flat_torus::postype::{
    check_primal_feasible, collapse_multiple, embedding_map, evaluate_f, expansion_matrix,
    merge_coset_pair, reduce_support, spectral_expansion, PrimalCandidate, StepKind, Verdict,
    WeightFunction,
};
use flat_torus::Execution;
use proptest::prelude::*;

use common::{lattice, random_lattice, random_weights, rng};

fn weights_and_point() -> impl Strategy<Value = (u64, [f64; 2], [f64; 2])> {
    (any::<u64>(), [-2.0..2.0f64, -2.0..2.0], [-2.0..2.0f64, -2.0..2.0])
}

fn random_case(seed: u64) -> WeightFunction {
    let mut r = rng(seed);
    // The dual basis itself is drawn, so |u| stays moderate.
    let dual = random_lattice(&mut r, 2.0, 1e2);
    random_weights(&mut r, dual, 4, 8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn taylor_limit_matches_moment((seed, dir, _) in weights_and_point()) {
        let z = random_case(seed);
        let d = nalgebra::Vector2::new(dir[0], dir[1]);
        prop_assume!(d.norm() > 1e-3);
        let d = d / d.norm();
        let r = 1e-4;
        let x = [r * d.x, r * d.y];
        let m = expansion_matrix(&z);
        let quad = (d.transpose() * nalgebra::Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]) * d)[0];
        let lhs = evaluate_f(&z, &x) / (r * r);
        prop_assert!((lhs - quad).abs() <= 1e-4 * quad, "{lhs} vs {quad}");
    }

    #[test]
    fn embedding_distance_is_f((seed, x, y) in weights_and_point()) {
        let z = random_case(seed);
        let px = embedding_map(&z, &x);
        let py = embedding_map(&z, &y);
        let dist: f64 = px.iter().zip(&py).map(|((u, a), (w, b))| {
            assert_eq!(u, w);
            (a - b).norm_sqr()
        }).sum();
        let f = evaluate_f(&z, &[x[0] - y[0], x[1] - y[1]]);
        prop_assert!((dist - f).abs() <= 1e-10 * f.max(1.0), "{dist} vs {f}");
        let norm: f64 = px.iter().map(|(_, c)| c.norm_sqr()).sum();
        prop_assert!((norm - z.total_mass()).abs() <= 1e-12 * norm.max(1.0));
    }

    #[test]
    fn f_is_periodic((seed, x, _) in weights_and_point(), i in -3i64..=3, j in -3i64..=3) {
        let z = random_case(seed);
        let l = z.dual_basis().dual();
        let v = l.vector(&[i, j]);
        let a = evaluate_f(&z, &x);
        let b = evaluate_f(&z, &[x[0] + v[0], x[1] + v[1]]);
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
    }

    #[test]
    fn transforms_conserve_moment_and_grow_mass(seed in any::<u64>()) {
        let z = random_case(seed);
        let (out, rep) = reduce_support(&z).unwrap();
        let mut cur = z.clone();
        for s in &rep.steps {
            let next = match s.kind {
                StepKind::Merge => merge_coset_pair(&cur, &s.u, &s.v).unwrap(),
                StepKind::Collapse { k } => collapse_multiple(&cur, &s.u, &s.v, k).unwrap(),
            };
            prop_assert!((next.moment() - cur.moment()).amax() <= 1e-12 * cur.moment().amax().max(1.0));
            prop_assert!(next.total_mass() > cur.total_mass());
            cur = next;
        }
        prop_assert_eq!(cur, out);
    }
}

#[test]
fn transforms_preserve_feasibility() {
    // The optimal square-torus weights plus a diagonal pair in one coset;
    // extra weight only helps contraction, and C is the new expansion.
    let l = lattice([[1.0, 0.0], [0.0, 1.0]]);
    let z = WeightFunction::from_pairs(
        l.dual(),
        vec![
            (vec![1, 0], 1.0 / 32.0),
            (vec![0, 1], 1.0 / 32.0),
            (vec![1, 1], 0.01),
            (vec![1, -1], 0.004),
        ],
    )
    .unwrap();
    let c = spectral_expansion(&z) * (1.0 + 1e-12);
    let check = |z: &WeightFunction| {
        check_primal_feasible(&PrimalCandidate { c, z: z.clone() }, &l, 128, Execution::default())
            .unwrap()
            .verdict
    };
    assert_eq!(check(&z), Verdict::Feasible);
    let (reduced, rep) = reduce_support(&z).unwrap();
    assert!(!rep.steps.is_empty());
    assert_eq!(check(&reduced), Verdict::Feasible);
    let mut cur = z;
    for s in &rep.steps {
        if s.kind == StepKind::Merge {
            cur = merge_coset_pair(&cur, &s.u, &s.v).unwrap();
            assert_eq!(check(&cur), Verdict::Feasible);
        }
    }
}
