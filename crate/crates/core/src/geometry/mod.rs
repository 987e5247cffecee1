//! n-dimensional Delaunay triangulation, boundary extraction, barycentric
//! coordinates and point location.

mod cloud;
mod delaunay;
mod simplex;
mod triangulation;

pub use cloud::PointCloud;
pub use simplex::{
    barycentric_solve, circumsphere, circumsphere_contains, clamp_coords, Barycentric, Simplex,
    BARY_TOL, MAX_CONDITION, SPHERE_TOL,
};
pub use delaunay::DUPLICATE_TOL;
pub use triangulation::{build_delaunay, BoundaryFacet, Triangulation};

#[cfg(test)]
mod tests {
    use super::*;

    fn example_square() -> Triangulation<f64> {
        let cloud =
            PointCloud::from_rows(&[[-0.25, -0.25], [-0.25, 0.25], [0.25, -0.25], [0.25, 0.25]])
                .unwrap();
        build_delaunay(&cloud).unwrap()
    }

    #[test]
    fn square_matches_worked_example() {
        let t = example_square();
        let ids: Vec<_> = t.maximal().iter().map(|s| s.vertex_ids.clone()).collect();
        assert_eq!(ids, vec![vec![0, 1, 2], vec![1, 2, 3]]);
        assert_eq!(t.boundary().len(), 4);
        for f in t.boundary() {
            for &v in &f.facet_ids {
                assert!(f.signed_distance(t.cloud().point(v)).abs() < 1e-12);
            }
            assert!(f.signed_distance(t.cloud().point(f.opposite_id)) < 0.0);
        }
    }

    #[test]
    fn locate_interior_point() {
        let t = example_square();
        let (i, b) = t.locate(&[0.0, -0.15]).unwrap();
        assert_eq!(i, 0);
        assert_eq!(b.simplex.vertex_ids, vec![0, 1, 2]);
        for (got, want) in b.coords.iter().zip([0.3, 0.2, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(t.locate(&[0.0, 0.5]).is_none());
    }

    #[test]
    fn locate_vertex_gives_indicator() {
        let t = example_square();
        let (_, b) = t.locate(&[0.25, 0.25]).unwrap();
        for (v, c) in b.simplex.vertex_ids.iter().zip(&b.coords) {
            assert_eq!(*c, if *v == 3 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn shared_edge_goes_to_lowest_index() {
        let t = example_square();
        let (i, _) = t.locate(&[0.0, 0.0]).unwrap();
        assert_eq!(i, 0);
    }

    #[test]
    fn visible_facets() {
        let t = example_square();
        let top = t.visible_boundary_facets(&[0.0, 0.5]).unwrap();
        assert_eq!(top.len(), 1);
        assert_eq!(t.boundary()[top[0]].facet_ids, vec![1, 3]);
        let n = &t.boundary()[top[0]].normal;
        assert!((n[1] - 1.0).abs() < 1e-12);
        assert!((t.boundary()[top[0]].offset + 0.25).abs() < 1e-12);

        let corner = t.visible_boundary_facets(&[1.0, 1.0]).unwrap();
        let mut ids: Vec<_> = corner.iter().map(|&i| t.boundary()[i].facet_ids.clone()).collect();
        ids.sort();
        assert_eq!(ids, vec![vec![1, 3], vec![2, 3]]);

        assert!(matches!(
            t.visible_boundary_facets(&[0.0, 0.0]),
            Err(crate::Error::NoVisibleFacet)
        ));
    }

    #[test]
    fn triangle_single_visible_facet() {
        let cloud = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let t = build_delaunay(&cloud).unwrap();
        assert_eq!(t.maximal().len(), 1);
        assert_eq!(t.boundary().len(), 3);
        let vis = t.visible_boundary_facets(&[0.5, -1e-3]).unwrap();
        assert_eq!(vis.len(), 1);
        assert_eq!(t.boundary()[vis[0]].facet_ids, vec![0, 1]);
    }
}
