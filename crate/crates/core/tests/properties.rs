use nalgebra::{DMatrix, DVector, SymmetricEigen};
use proptest::prelude::*;

use podlab::analysis::{
    error_identity, pointwise_bound_check, sequence_bound, tail_sum, weighted_sum_bound_check, IDENTITY_RTOL,
};
use podlab::fem::{assemble_operators, solve_heat_be, HeatProblem, SnapshotSet};
use podlab::linalg::Gram;
use podlab::pod::{
    build_dataset, compute_pod, compute_pod_with, difference_quotients, InnerProductKind, InnerProducts, PodDataset,
    PodMethod, PodVariant, DEFAULT_RANK_TOL,
};
use podlab::proj::{ProjectionKind, Projector, ReducedSpace};
use podlab::rom::{run_rom, RomConfig};

fn spd(entries: &[f64], n: usize) -> DMatrix<f64> {
    let b = DMatrix::from_column_slice(n, n, entries);
    &b * b.transpose() + DMatrix::identity(n, n) * 0.1
}

prop_compose! {
    fn instance()(dim in 2usize..=8, n in 2usize..=6)
        (u in prop::collection::vec(-1.0f64..1.0, dim * n),
         gm in prop::collection::vec(-1.0f64..1.0, dim * dim),
         ga in prop::collection::vec(-1.0f64..1.0, dim * dim),
         t in 0.1f64..4.0,
         dim in Just(dim), n in Just(n)) -> SnapshotSet {
        let inner = InnerProducts::new(
            Gram::dense(spd(&gm, dim)).unwrap(),
            Gram::dense(spd(&ga, dim)).unwrap(),
        ).unwrap();
        SnapshotSet::new(DMatrix::from_column_slice(dim, n, &u), t / (n - 1) as f64, inner).unwrap()
    }
}

fn variant() -> impl Strategy<Value = PodVariant> {
    prop::sample::select(PodVariant::ALL.to_vec())
}

fn kind() -> impl Strategy<Value = InnerProductKind> {
    prop::sample::select(InnerProductKind::ALL.to_vec())
}

/// `Γ^{1/2} (WᵀGW) Γ^{1/2}` eigenvalues, descending.
fn gram_eigen_oracle(data: &PodDataset) -> Vec<f64> {
    let g = data.space().gram.to_dense();
    let mut w = data.vectors().clone();
    for (j, gamma) in data.weights().iter().enumerate() {
        w.column_mut(j).scale_mut(gamma.sqrt());
    }
    let k = w.transpose() * g * &w;
    let mut e: Vec<f64> = SymmetricEigen::new((&k + k.transpose()) * 0.5).eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| b.total_cmp(a));
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dq_telescoping_sum(s in instance()) {
        let dq = difference_quotients(&s).unwrap();
        let mut acc = s.snapshot(0);
        for j in 1..s.len() {
            acc += dq.column(j - 1) * s.dt();
            prop_assert!((&acc - s.snapshot(j)).amax() < 1e-12 * (1.0 + acc.amax()));
        }
    }

    #[test]
    fn trace_identity_and_orthonormality(s in instance(), v in variant(), x in kind()) {
        let d = build_dataset(&s, v, x).unwrap();
        let b = compute_pod(&d, DEFAULT_RANK_TOL).unwrap();
        let energy = d.energy(&d.space().gram);
        let sum: f64 = b.eigenvalues().iter().sum();
        prop_assert!((energy - sum).abs() <= 1e-10 * energy);
        let gram = d.space().gram.cross(b.modes(), b.modes());
        prop_assert!((gram - DMatrix::identity(b.rank(), b.rank())).amax() < 1e-10);
        prop_assert!(b.eigenvalues().windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn svd_matches_gram_eigen_oracle(s in instance(), v in variant(), x in kind()) {
        let d = build_dataset(&s, v, x).unwrap();
        let b = compute_pod(&d, DEFAULT_RANK_TOL).unwrap();
        let oracle = gram_eigen_oracle(&d);
        let l1 = oracle[0];
        for (k, lam) in b.eigenvalues().iter().enumerate() {
            prop_assert!((lam - oracle[k]).abs() <= 1e-10 * l1, "k={} {} vs {}", k, lam, oracle[k]);
        }
        // everything the SVD dropped is round-off in the oracle as well
        for e in &oracle[b.rank()..] {
            prop_assert!(e.abs() <= 1e-10 * l1);
        }
        let snap = compute_pod_with(&d, 1e-10, PodMethod::Snapshots).unwrap();
        for (a, c) in snap.eigenvalues().iter().zip(b.eigenvalues()) {
            prop_assert!((a - c).abs() <= 1e-10 * l1);
        }
    }

    #[test]
    fn error_identity_every_r(s in instance(), v in variant(), x in kind()) {
        let d = build_dataset(&s, v, x).unwrap();
        let b = compute_pod(&d, DEFAULT_RANK_TOL).unwrap();
        let mut prev = f64::INFINITY;
        for r in 1..=b.rank() {
            for y in InnerProductKind::ALL {
                for p in ProjectionKind::ALL {
                    let rep = error_identity(&d, &b, r, y, p, s.inner()).unwrap();
                    prop_assert!(rep.identity_holds(IDENTITY_RTOL), "r={} {:?} {:?}: {} vs {}", r, y, p, rep.actual_error, rep.formula_value);
                }
            }
            let red = ReducedSpace::new(&b, r).unwrap();
            let t = tail_sum(&red, InnerProductKind::L2, ProjectionKind::Orthogonal, s.inner()).unwrap();
            prop_assert!(t <= prev * (1.0 + 1e-12));
            prev = t;
        }
    }

    #[test]
    fn pointwise_and_weighted_sum_bounds(s in instance(), dq in prop::sample::select(vec![PodVariant::StandardDq, PodVariant::NewDq]), x in kind()) {
        let d = build_dataset(&s, dq, x).unwrap();
        let b = compute_pod(&d, DEFAULT_RANK_TOL).unwrap();
        let t = s.final_time();
        for r in 1..=b.rank() {
            for y in InnerProductKind::ALL {
                for p in ProjectionKind::ALL {
                    let rep = pointwise_bound_check(&s, &b, r, y, p).unwrap();
                    prop_assert!(!rep.violated, "{:?}", rep);
                    if dq == PodVariant::NewDq {
                        let ws = weighted_sum_bound_check(&s, &b, r, y, p).unwrap();
                        prop_assert!(!ws.violated);
                        // N Δt = T + Δt <= 2T
                        prop_assert!(ws.weighted_sum.unwrap() <= 2.0 * t * ws.pointwise_max.unwrap() * (1.0 + 1e-12) + 1e-300);
                    }
                }
            }
        }
    }

    #[test]
    fn sequence_max_bounded_by_data_norm(s in instance(), x in kind()) {
        let b = sequence_bound(s.snapshots(), s.dt(), s.inner().gram(x)).unwrap();
        prop_assert!(b.holds(), "{:?}", b);
    }

    #[test]
    fn new_dq_dataset_keeps_independence(s in instance()) {
        // independent snapshots (generic when N <= dim) give a full-rank NewDQ Gram
        prop_assume!(s.len() <= s.dim());
        let smin = |m: &DMatrix<f64>| {
            let sv = m.clone().svd(false, false).singular_values;
            sv.min() / sv.max()
        };
        prop_assume!(smin(s.snapshots()) > 1e-6);
        let d = build_dataset(&s, PodVariant::NewDq, InnerProductKind::L2).unwrap();
        let b = compute_pod(&d, DEFAULT_RANK_TOL).unwrap();
        prop_assert_eq!(b.rank(), s.len());
    }

    #[test]
    fn projections_idempotent_and_linear(s in instance(), x in kind(), a in -3.0f64..3.0, c in -3.0f64..3.0) {
        let d = build_dataset(&s, PodVariant::NewDq, x).unwrap();
        let b = compute_pod(&d, DEFAULT_RANK_TOL).unwrap();
        let red = ReducedSpace::new(&b, 1.max(b.rank() / 2)).unwrap();
        let u = s.snapshot(0);
        let v = s.snapshot(s.len() - 1);
        for p in ProjectionKind::ALL {
            let pr = Projector::of_kind(&red, p, s.inner()).unwrap();
            let pu = pr.apply(&u).unwrap();
            let ppu = pr.apply(&pu).unwrap();
            let scale = 1.0 + pu.amax();
            prop_assert!((&ppu - &pu).amax() < 1e-10 * scale);
            let lin = pr.apply(&(&u * a + &v * c)).unwrap() - (pr.apply(&u).unwrap() * a + pr.apply(&v).unwrap() * c);
            prop_assert!(lin.amax() < 1e-10 * (1.0 + scale) * (1.0 + a.abs() + c.abs()));
        }
    }

    #[test]
    fn ritz_is_best_in_energy_norm(s in instance(), coeffs in prop::collection::vec(-2.0f64..2.0, 100 * 8)) {
        let d = build_dataset(&s, PodVariant::StandardDq, InnerProductKind::L2).unwrap();
        let b = compute_pod(&d, DEFAULT_RANK_TOL).unwrap();
        let r = 1.max(b.rank() / 2);
        let red = ReducedSpace::new(&b, r).unwrap();
        let a = &s.inner().stiffness;
        let v = s.snapshot(s.len() - 1);
        let rv = Projector::of_kind(&red, ProjectionKind::Ritz, s.inner()).unwrap().apply(&v).unwrap();
        let best = a.quad(&(&v - &rv));
        for k in 0..100 {
            let c = DVector::from_column_slice(&coeffs[k * 8..k * 8 + r]);
            let w = red.modes() * c;
            prop_assert!(best <= a.quad(&(&v - &w)) * (1.0 + 1e-10) + 1e-14);
        }
    }
}

fn heat(nodes: usize, snaps: usize) -> SnapshotSet {
    let p = HeatProblem::test_problem(nodes, snaps);
    solve_heat_be(&p, &assemble_operators(&p).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rom_is_stable_without_forcing(nodes in 6usize..40, n in 3usize..25, v in variant(), x in kind(), r in 1usize..6) {
        let s = heat(nodes, n);
        let b = compute_pod(&build_dataset(&s, v, x).unwrap(), DEFAULT_RANK_TOL).unwrap();
        let r = r.min(b.rank());
        let red = ReducedSpace::new(&b, r).unwrap();
        let run = run_rom(&RomConfig::new(r, x, s.dt()), &red, &s).unwrap();
        let m = &s.inner().mass;
        for k in 1..run.len() {
            prop_assert!(m.quad(&run.state(&red, k)) <= m.quad(&run.state(&red, k - 1)) * (1.0 + 1e-12));
        }
        prop_assert!(run.errors_l2.iter().chain(&run.errors_h01).all(|e| e.is_finite() && *e >= 0.0));
    }

    #[test]
    fn full_rank_rom_reproduces_fem(nodes in 6usize..30, n in 3usize..15, v in variant(), x in kind()) {
        let s = heat(nodes, n);
        let b = compute_pod(&build_dataset(&s, v, x).unwrap(), DEFAULT_RANK_TOL).unwrap();
        let red = ReducedSpace::new(&b, b.rank()).unwrap();
        let run = run_rom(&RomConfig::new(b.rank(), x, s.dt()), &red, &s).unwrap();
        let m = &s.inner().mass;
        let scale = (0..s.len()).map(|k| m.quad(&s.snapshot(k)).sqrt()).fold(0.0, f64::max);
        for k in 0..run.len() {
            let err = m.quad(&(&s.snapshot(k) - run.state(&red, k))).sqrt();
            prop_assert!(err <= 1e-10 * scale, "k={} err={}", k, err);
        }
    }
}
