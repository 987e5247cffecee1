mod common;

use std::collections::{BTreeSet, HashMap};

use proptest::prelude::*;
use smnn::geometry::build_delaunay;
use smnn::{Error, PointCloud};

fn cloud_strategy(dim: usize) -> impl Strategy<Value = PointCloud> {
    (dim + 2..dim + 16, any::<u64>()).prop_map(move |(count, seed)| {
        let mut rng = common::rng(seed);
        common::uniform_cloud(&mut rng, dim, count)
    })
}

fn any_cloud() -> impl Strategy<Value = PointCloud> {
    prop_oneof![cloud_strategy(2), cloud_strategy(3), cloud_strategy(4)]
}

fn lattice() -> impl Strategy<Value = PointCloud> {
    (2usize..4, any::<u64>()).prop_map(|(dim, seed)| {
        let mut rng = common::rng(seed);
        common::lattice_cloud(&mut rng, dim, 4 * dim + 4, 3)
    })
}

fn check_empty_balls(cloud: &PointCloud) -> Result<(), TestCaseError> {
    let tri = build_delaunay(cloud).unwrap();
    for s in tri.maximal() {
        let pts = tri.simplex_points(s);
        let (c, r) = common::circumsphere(&pts).expect("simplex has a circumsphere");
        for (i, p) in cloud.iter().enumerate() {
            if !s.contains_vertex(i) {
                prop_assert!(common::dist(p, &c) >= r * (1.0 - 1e-9), "point {i} inside {:?}", s.vertex_ids);
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circumspheres_are_empty(cloud in any_cloud()) {
        check_empty_balls(&cloud)?;
    }

    #[test]
    fn co_spherical_lattices_stay_delaunay(cloud in lattice()) {
        check_empty_balls(&cloud)?;
        let tri = build_delaunay(&cloud).unwrap();
        for s in tri.maximal() {
            let pts = tri.simplex_points(s);
            prop_assert!(common::barycentric(&pts, pts[0]).is_some(), "flat simplex {:?}", s.vertex_ids);
        }
    }

    #[test]
    fn facets_are_shared_by_at_most_two_cells(cloud in any_cloud()) {
        let tri = build_delaunay(&cloud).unwrap();
        let mut count: HashMap<Vec<usize>, usize> = HashMap::new();
        for s in tri.maximal() {
            prop_assert_eq!(s.vertex_ids.len(), cloud.dim() + 1);
            for (f, _) in s.facets() {
                *count.entry(f).or_default() += 1;
            }
        }
        prop_assert!(count.values().all(|&c| c <= 2));
        let once: BTreeSet<Vec<usize>> = count.into_iter().filter(|&(_, c)| c == 1).map(|(f, _)| f).collect();
        let boundary: BTreeSet<Vec<usize>> = tri.boundary().iter().map(|b| b.facet_ids.clone()).collect();
        prop_assert_eq!(once, boundary);
    }

    #[test]
    fn every_point_is_a_vertex(cloud in any_cloud()) {
        let tri = build_delaunay(&cloud).unwrap();
        let used: BTreeSet<usize> = tri.maximal().iter().flat_map(|s| s.vertex_ids.iter().copied()).collect();
        prop_assert_eq!(used.len(), cloud.len());
    }

    #[test]
    fn boundary_hyperplanes_support_the_cloud(cloud in any_cloud()) {
        let tri = build_delaunay(&cloud).unwrap();
        for b in tri.boundary() {
            let norm: f64 = b.normal.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() < 1e-9);
            for &v in &b.facet_ids {
                prop_assert!(b.signed_distance(cloud.point(v)).abs() < 1e-9);
            }
            prop_assert!(b.signed_distance(cloud.point(b.opposite_id)) < 0.0);
            for p in cloud.iter() {
                prop_assert!(b.signed_distance(p) < 1e-9);
            }
        }
    }

    #[test]
    fn hull_points_are_located(cloud in any_cloud(), seed in any::<u64>()) {
        let tri = build_delaunay(&cloud).unwrap();
        let mut rng = common::rng(seed);
        for _ in 0..10 {
            let w: Vec<f64> = (0..cloud.len()).map(|_| rand::Rng::random_range(&mut rng, 0.0..1.0)).collect();
            let total: f64 = w.iter().sum();
            let mut x = vec![0.0; cloud.dim()];
            for (p, wi) in cloud.iter().zip(&w) {
                for (xd, pd) in x.iter_mut().zip(p) {
                    *xd += wi / total * pd;
                }
            }
            let (_, bary) = tri.locate(&x).expect("convex combination lies in the hull");
            let pts = tri.simplex_points(&bary.simplex);
            let oracle = common::barycentric(&pts, &x).unwrap();
            for (a, b) in bary.coords.iter().zip(&oracle) {
                prop_assert!((a - b).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn rigid_motion_keeps_the_combinatorics(cloud in cloud_strategy(2), angle in 0.0..std::f64::consts::TAU, shift in -5.0..5.0f64) {
        let (s, c) = angle.sin_cos();
        let moved: Vec<[f64; 2]> = cloud.iter().map(|p| [c * p[0] - s * p[1] + shift, s * p[0] + c * p[1] - shift]).collect();
        let a = build_delaunay(&cloud).unwrap();
        let b = build_delaunay(&PointCloud::from_rows(&moved).unwrap()).unwrap();
        let set = |t: &smnn::Triangulation| t.maximal().iter().map(|s| s.vertex_ids.clone()).collect::<BTreeSet<_>>();
        prop_assert_eq!(set(&a), set(&b));
    }
}

#[test]
fn unit_square_uses_the_lower_index_diagonal() {
    let cloud = PointCloud::from_rows(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]).unwrap();
    let tri = build_delaunay(&cloud).unwrap();
    let got: Vec<Vec<usize>> = tri.maximal().iter().map(|s| s.vertex_ids.clone()).collect();
    assert_eq!(got, vec![vec![0, 1, 2], vec![1, 2, 3]]);
    assert_eq!(tri.boundary().len(), 4);
}

#[test]
fn degenerate_inputs_are_rejected() {
    let collinear = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]).unwrap();
    assert!(matches!(build_delaunay(&collinear), Err(Error::DegenerateSupport { .. })));
    let dup = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
    assert!(matches!(build_delaunay(&dup), Err(Error::DuplicatePoint { first: 1, second: 3 })));
    let few = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0]]).unwrap();
    assert!(matches!(build_delaunay(&few), Err(Error::DimensionTooSmall { .. })));
}

#[test]
fn f32_cloud_matches_f64() {
    let mut rng = common::rng(12);
    let cloud = common::uniform_cloud(&mut rng, 3, 25);
    let a = build_delaunay(&cloud).unwrap();
    let b = build_delaunay(&cloud.cast::<f32>()).unwrap();
    let ids = |s: &[smnn::geometry::Simplex]| s.iter().map(|s| s.vertex_ids.clone()).collect::<BTreeSet<_>>();
    assert_eq!(ids(a.maximal()), ids(b.maximal()));
}
