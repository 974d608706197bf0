use nalgebra::{DMatrix, Schur};
use proptest::prelude::*;

use teamsplit::cluster::{accuracy, lloyd, silhouette};
use teamsplit::embed::{embed, katz_from_adjacency, KatzConfig};
use teamsplit::graph::{blend_adjacency, bundle_from_json, bundle_to_json, GraphBundle, ModalityGraph, ModalityKind};

fn adjacency(n: usize, directed: bool) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(prop_oneof![3 => Just(0.0), 2 => 0.1f64..3.0], n * n).prop_map(move |vals| {
        let mut a = DMatrix::from_row_slice(n, n, &vals);
        for i in 0..n {
            a[(i, i)] = 0.0;
            if !directed {
                for j in 0..i {
                    a[(i, j)] = a[(j, i)];
                }
            }
        }
        a
    })
}

fn bundle(n: usize) -> impl Strategy<Value = GraphBundle> {
    (adjacency(n, false), adjacency(n, true), 0.05f64..0.95).prop_map(|(a, b, w)| {
        let graphs = vec![
            ModalityGraph::new(ModalityKind::Spatial, false, a).unwrap(),
            ModalityGraph::new(ModalityKind::Hierarchy, true, b).unwrap(),
        ];
        GraphBundle::new(graphs, vec![w, 1.0 - w], None).unwrap()
    })
}

fn is_nilpotent(a: &DMatrix<f64>) -> bool {
    let mut p = a.clone();
    for _ in 1..a.nrows() {
        p = &p * a;
    }
    p.iter().all(|&x| x == 0.0)
}

fn permute(a: &DMatrix<f64>, p: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(p[i], p[j])])
}

fn points(max_n: usize) -> impl Strategy<Value = (DMatrix<f64>, Vec<usize>)> {
    (4..max_n).prop_flat_map(|n| {
        (prop::collection::vec(-10.0f64..10.0, n * 2), prop::collection::vec(0usize..3, n))
            .prop_map(move |(v, l)| (DMatrix::from_row_slice(n, 2, &v), l))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn blend_is_linear_in_weights(b in bundle(6)) {
        let w = b.weights();
        let expected = b.graphs()[0].adjacency() * w[0] + b.graphs()[1].adjacency() * w[1];
        prop_assert!((blend_adjacency(&b) - expected).amax() < 1e-14);
    }

    #[test]
    fn json_round_trip_is_identity(b in bundle(7), truth in prop::collection::vec(0usize..3, 7)) {
        let b = b.with_ground_truth(Some(truth)).unwrap();
        prop_assert_eq!(bundle_from_json(&bundle_to_json(&b)).unwrap(), b);
    }

    #[test]
    fn silhouette_ignores_rigid_motion_and_scale(
        (pts, labels) in points(20),
        theta in 0.0f64..std::f64::consts::TAU,
        shift in (-50.0f64..50.0, -50.0f64..50.0),
        scale in 0.1f64..10.0,
    ) {
        prop_assume!(labels.iter().any(|&l| l != labels[0]));
        let (c, s) = (theta.cos(), theta.sin());
        let moved = DMatrix::from_fn(pts.nrows(), 2, |i, j| {
            let (x, y) = (pts[(i, 0)], pts[(i, 1)]);
            scale * if j == 0 { c * x - s * y + shift.0 } else { s * x + c * y + shift.1 }
        });
        let a = silhouette(&pts, &labels).unwrap();
        let b = silhouette(&moved, &labels).unwrap();
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn accuracy_ignores_label_names(
        labels in prop::collection::vec(0usize..4, 1..30),
        offset in 1usize..50,
    ) {
        let truth: Vec<usize> = labels.iter().enumerate().map(|(i, &l)| (l + i / 3) % 4).collect();
        let renamed: Vec<usize> = labels.iter().map(|&l| (3 - l) * 7 + offset).collect();
        prop_assert_eq!(accuracy(&labels, &truth).unwrap(), accuracy(&renamed, &truth).unwrap());
        prop_assert_eq!(accuracy(&truth, &labels).unwrap(), accuracy(&labels, &truth).unwrap());
    }

    #[test]
    fn katz_is_monotone_in_alpha(a in adjacency(6, true), t in 0.1f64..0.9) {
        prop_assume!(!is_nilpotent(&a));
        let schur = Schur::try_new(a.clone(), f64::EPSILON, 100_000);
        prop_assume!(schur.is_some());
        let rho = schur.unwrap().complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let lo = katz_from_adjacency(&a, &KatzConfig::explicit(0.5 * t / rho)).unwrap();
        let hi = katz_from_adjacency(&a, &KatzConfig::explicit(t / rho)).unwrap();
        for (x, y) in lo.matrix().iter().zip(hi.matrix().iter()) {
            prop_assert!(*x >= -1e-12 && *x <= *y + 1e-12);
        }
    }

    #[test]
    fn katz_preserves_symmetry(a in adjacency(7, false)) {
        let s = katz_from_adjacency(&a, &KatzConfig::default()).unwrap();
        prop_assert!((s.matrix() - s.matrix().transpose()).amax() < 1e-12);
    }

    #[test]
    fn embedding_follows_robot_relabeling(a in adjacency(6, true), seed in any::<u64>()) {
        let n = a.nrows();
        let mut p: Vec<usize> = (0..n).collect();
        let mut state = seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            p.swap(i, (state >> 33) as usize % (i + 1));
        }
        let cfg = KatzConfig::default();
        let s = katz_from_adjacency(&a, &cfg).unwrap();
        let sp = katz_from_adjacency(&permute(&a, &p), &cfg).unwrap();
        // only well-separated spectra have a unique embedding
        let sv = s.matrix().clone().singular_values();
        let mut sv: Vec<f64> = sv.iter().copied().collect();
        sv.sort_by(|x, y| y.total_cmp(x));
        let k = 2;
        prop_assume!(sv[k - 1] > 1e-6 && (0..k).all(|i| sv[i] - sv[i + 1] > 1e-3 * sv[0]));
        let x = embed(&s, k, false).unwrap();
        let xp = embed(&sp, k, false).unwrap();
        // sign flips come from ties in the largest-entry rule; compare columns up to sign
        for col in 0..2 * k {
            let direct: f64 = (0..n).map(|i| (xp.matrix()[(i, col)] - x.matrix()[(p[i], col)]).abs()).fold(0.0, f64::max);
            let flipped: f64 = (0..n).map(|i| (xp.matrix()[(i, col)] + x.matrix()[(p[i], col)]).abs()).fold(0.0, f64::max);
            prop_assert!(direct.min(flipped) < 1e-7, "column {} differs by {}", col, direct.min(flipped));
        }
    }

    #[test]
    fn lloyd_commutes_with_row_permutation((pts, _) in points(25), shift in 0usize..25) {
        let n = pts.nrows();
        let c = 3.min(n);
        let p: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let permuted = DMatrix::from_fn(n, 2, |i, j| pts[(p[i], j)]);
        let init = DMatrix::from_fn(c, 2, |r, j| pts[(r, j)]);
        let (a, _) = lloyd(&pts, init.clone(), 300);
        let (b, _) = lloyd(&permuted, init, 300);
        prop_assert!((a.inertia - b.inertia).abs() <= 1e-9 * a.inertia.max(1.0));
        for (i, &pi) in p.iter().enumerate() {
            prop_assert_eq!(b.labels[i], a.labels[pi]);
        }
    }
}
