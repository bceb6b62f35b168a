//! Structured triangulations of generalized strips and disks: transfinite
//! grid meshing, concentric-ring disk meshing, uniform midpoint refinement
//! with boundary reprojection, quality measures, and plain-text export.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::geometry::{point, PlanarDomain, Point};

/// Role of a vertex on the meshed domain boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryTag {
    Interior,
    LowerCurve,
    UpperCurve,
    LeftCap,
    RightCap,
    DiskRim,
}

impl BoundaryTag {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryTag::Interior => "Interior",
            BoundaryTag::LowerCurve => "LowerCurve",
            BoundaryTag::UpperCurve => "UpperCurve",
            BoundaryTag::LeftCap => "LeftCap",
            BoundaryTag::RightCap => "RightCap",
            BoundaryTag::DiskRim => "DiskRim",
        }
    }
}

/// Which analytic boundary the mesh discretizes; used by refinement to
/// re-project new boundary vertices onto the true boundary curves.
#[derive(Debug, Clone)]
pub enum MeshGeometry {
    Free,
    Strip(PlanarDomain),
    Disk { radius: f64 },
}

#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("triangle {index} has non-positive area {area:.3e}")]
    DegenerateCell { index: usize, area: f64 },
}

/// Conforming triangle mesh with per-vertex boundary tags. Triangles are
/// counter-clockwise; the mesh is immutable after construction.
#[derive(Debug, Clone)]
pub struct TriangleMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    tags: Vec<BoundaryTag>,
    geometry: MeshGeometry,
}

/// Global quality measures of a mesh.
#[derive(Debug, Clone, Copy)]
pub struct MeshQuality {
    /// Longest edge length.
    pub h_max: f64,
    /// Smallest interior angle, degrees.
    pub min_angle: f64,
    pub triangle_count: usize,
}

impl TriangleMesh {
    fn new(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        tags: Vec<BoundaryTag>,
        geometry: MeshGeometry,
    ) -> Result<Self, MeshError> {
        assert_eq!(vertices.len(), tags.len());
        let mesh = TriangleMesh {
            vertices,
            triangles,
            tags,
            geometry,
        };
        for t in 0..mesh.triangles.len() {
            let area = mesh.triangle_area(t);
            if !(area > 0.0) {
                return Err(MeshError::DegenerateCell { index: t, area });
            }
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn tags(&self) -> &[BoundaryTag] {
        &self.tags
    }

    pub fn geometry(&self) -> &MeshGeometry {
        &self.geometry
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.tags[v] != BoundaryTag::Interior
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        0.5 * (b - a).cross(c - a)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.triangle_area(t)).sum()
    }

    /// Longest edge length over the whole mesh.
    pub fn h_max(&self) -> f64 {
        let mut h: f64 = 0.0;
        for t in 0..self.num_triangles() {
            let [a, b, c] = self.triangle_points(t);
            h = h.max(a.dist(b)).max(b.dist(c)).max(c.dist(a));
        }
        h
    }

    /// Unique undirected edges, each as (low index, high index), sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut set: Vec<(usize, usize)> = Vec::with_capacity(3 * self.num_triangles());
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                set.push((a.min(b), a.max(b)));
            }
        }
        set.sort_unstable();
        set.dedup();
        set
    }

    /// Undirected edges that belong to exactly one triangle.
    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let mut out: Vec<(usize, usize)> = counts
            .into_iter()
            .filter(|&(_, c)| c == 1)
            .map(|(e, _)| e)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn quality(&self) -> MeshQuality {
        let mut min_angle = f64::INFINITY;
        for t in 0..self.num_triangles() {
            let p = self.triangle_points(t);
            for k in 0..3 {
                let u = p[(k + 1) % 3] - p[k];
                let v = p[(k + 2) % 3] - p[k];
                let ang = (u.dot(v) / (u.norm() * v.norm())).clamp(-1.0, 1.0).acos();
                min_angle = min_angle.min(ang.to_degrees());
            }
        }
        MeshQuality {
            h_max: self.h_max(),
            min_angle,
            triangle_count: self.num_triangles(),
        }
    }

    /// Containing triangle and barycentric coordinates of `p`, if any.
    pub fn locate(&self, p: Point) -> Option<(usize, [f64; 3])> {
        let tol = -1.0e-9;
        for t in 0..self.num_triangles() {
            let [a, b, c] = self.triangle_points(t);
            let den = (b - a).cross(c - a);
            let la = (b - p).cross(c - p) / den;
            let lb = (c - p).cross(a - p) / den;
            let lc = 1.0 - la - lb;
            if la >= tol && lb >= tol && lc >= tol {
                return Some((t, [la, lb, lc]));
            }
        }
        None
    }

    /// Uniform midpoint refinement: every triangle splits into four, new
    /// boundary vertices are re-projected onto the analytic boundary and
    /// inherit tags from the boundary piece they subdivide.
    pub fn refine(&self) -> TriangleMesh {
        let boundary: std::collections::HashSet<(usize, usize)> =
            self.boundary_edges().into_iter().collect();
        let scale = self.h_max().max(1.0e-300);
        let tol = 1.0e-9 * scale.max(1.0);

        let mut vertices = self.vertices.clone();
        let mut tags = self.tags.clone();
        let mut midpoint_of: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize,
                       b: usize,
                       vertices: &mut Vec<Point>,
                       tags: &mut Vec<BoundaryTag>|
         -> usize {
            let key = (a.min(b), a.max(b));
            if let Some(&m) = midpoint_of.get(&key) {
                return m;
            }
            let pa = vertices[a];
            let pb = vertices[b];
            let mut pm = pa.lerp(pb, 0.5);
            let mut tag = BoundaryTag::Interior;
            if boundary.contains(&key) {
                match &self.geometry {
                    MeshGeometry::Strip(dom) => {
                        let (xlo, xhi) = dom.x_range();
                        let on_lower = |q: Point| (q.y - dom.b_minus().eval(q.x)).abs() <= tol;
                        let on_upper = |q: Point| (q.y - dom.b_plus().eval(q.x)).abs() <= tol;
                        if on_lower(pa) && on_lower(pb) {
                            pm.y = dom.b_minus().eval(pm.x);
                            tag = BoundaryTag::LowerCurve;
                        } else if on_upper(pa) && on_upper(pb) {
                            pm.y = dom.b_plus().eval(pm.x);
                            tag = BoundaryTag::UpperCurve;
                        } else if (pa.x - xlo).abs() <= tol && (pb.x - xlo).abs() <= tol {
                            pm.x = xlo;
                            tag = BoundaryTag::LeftCap;
                        } else if (pa.x - xhi).abs() <= tol && (pb.x - xhi).abs() <= tol {
                            pm.x = xhi;
                            tag = BoundaryTag::RightCap;
                        }
                    }
                    MeshGeometry::Disk { radius } => {
                        let r = pm.norm();
                        if r > 0.0 {
                            pm = pm * (radius / r);
                        }
                        tag = BoundaryTag::DiskRim;
                    }
                    MeshGeometry::Free => {
                        if self.tags[a] == self.tags[b] {
                            tag = self.tags[a];
                        }
                    }
                }
            }
            let idx = vertices.len();
            vertices.push(pm);
            tags.push(tag);
            midpoint_of.insert(key, idx);
            idx
        };

        let mut triangles = Vec::with_capacity(4 * self.num_triangles());
        for tri in &self.triangles {
            let [a, b, c] = *tri;
            let mab = mid(a, b, &mut vertices, &mut tags);
            let mbc = mid(b, c, &mut vertices, &mut tags);
            let mca = mid(c, a, &mut vertices, &mut tags);
            triangles.push([a, mab, mca]);
            triangles.push([b, mbc, mab]);
            triangles.push([c, mca, mbc]);
            triangles.push([mab, mbc, mca]);
        }
        TriangleMesh::new(vertices, triangles, tags, self.geometry.clone())
            .expect("refinement preserves orientation")
    }

    /// Plain-text export: header, one `x y tag` line per vertex, one
    /// `i j k` line per triangle. 17 significant digits.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "vertices {} triangles {}",
            self.num_vertices(),
            self.num_triangles()
        )
        .unwrap();
        for (v, tag) in self.vertices.iter().zip(&self.tags) {
            writeln!(out, "{:.16e} {:.16e} {}", v.x, v.y, tag.name()).unwrap();
        }
        for t in &self.triangles {
            writeln!(out, "{} {} {}", t[0], t[1], t[2]).unwrap();
        }
        out
    }
}

/// Transfinite grid mesh of a generalized strip: `nx` columns, `ny` rows,
/// each quad split along the (i,j)-(i+1,j+1) diagonal. A pinched left end
/// collapses the first column to a single vertex.
pub fn generate_strip_mesh(
    domain: &PlanarDomain,
    nx: usize,
    ny: usize,
) -> Result<TriangleMesh, MeshError> {
    assert!(nx >= 1 && ny >= 1, "resolution must be at least 1x1");
    let (xlo, xhi) = domain.x_range();
    let pinched = domain.pinched_left();

    let mut vertices: Vec<Point> = Vec::new();
    let mut tags: Vec<BoundaryTag> = Vec::new();
    // idx(i, j) for i in 0..=nx, j in 0..=ny.
    let idx = |i: usize, j: usize| -> usize {
        if pinched {
            if i == 0 {
                0
            } else {
                1 + (i - 1) * (ny + 1) + j
            }
        } else {
            i * (ny + 1) + j
        }
    };
    for i in 0..=nx {
        let x = xlo + (xhi - xlo) * (i as f64 / nx as f64);
        let lo = domain.b_minus().eval(x);
        let hi = domain.b_plus().eval(x);
        if pinched && i == 0 {
            vertices.push(point(x, lo));
            tags.push(BoundaryTag::LeftCap);
            continue;
        }
        for j in 0..=ny {
            let y = lo + (hi - lo) * (j as f64 / ny as f64);
            vertices.push(point(x, y));
            let tag = if i == 0 {
                BoundaryTag::LeftCap
            } else if i == nx {
                BoundaryTag::RightCap
            } else if j == 0 {
                BoundaryTag::LowerCurve
            } else if j == ny {
                BoundaryTag::UpperCurve
            } else {
                BoundaryTag::Interior
            };
            tags.push(tag);
        }
    }

    let merge_tol = 1.0e-12;
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            let p00 = idx(i, j);
            let p10 = idx(i + 1, j);
            let p11 = idx(i + 1, j + 1);
            let p01 = idx(i, j + 1);
            let keep = |a: usize, b: usize, c: usize| -> Option<[usize; 3]> {
                if a == b || b == c || c == a {
                    return None;
                }
                let area =
                    0.5 * (vertices[b] - vertices[a]).cross(vertices[c] - vertices[a]);
                if area.abs() <= merge_tol {
                    None
                } else {
                    Some([a, b, c])
                }
            };
            if let Some(t) = keep(p00, p10, p11) {
                triangles.push(t);
            }
            if let Some(t) = keep(p00, p11, p01) {
                triangles.push(t);
            }
        }
    }

    TriangleMesh::new(
        vertices,
        triangles,
        tags,
        MeshGeometry::Strip(domain.clone()),
    )
}

/// Concentric-ring triangulation of the disk of radius `radius` centered at
/// the origin: ring `k` carries `6k` vertices; bands are triangulated by an
/// angular merge. The rim is tagged `DiskRim`.
pub fn generate_disk_mesh(radius: f64, rings: usize) -> TriangleMesh {
    assert!(rings >= 1, "need at least one ring");
    assert!(radius > 0.0, "radius must be positive");
    let mut vertices = vec![point(0.0, 0.0)];
    let mut tags = vec![BoundaryTag::Interior];
    let ring_start = |k: usize| -> usize { 1 + 3 * k * (k - 1) };
    for k in 1..=rings {
        let n = 6 * k;
        let r = radius * (k as f64 / rings as f64);
        for m in 0..n {
            let th = std::f64::consts::TAU * (m as f64 / n as f64);
            vertices.push(point(r * th.cos(), r * th.sin()));
            tags.push(if k == rings {
                BoundaryTag::DiskRim
            } else {
                BoundaryTag::Interior
            });
        }
    }

    let mut triangles: Vec<[usize; 3]> = Vec::new();
    // Innermost band: fan around the center.
    for m in 0..6usize {
        triangles.push([0, ring_start(1) + m, ring_start(1) + (m + 1) % 6]);
    }
    // Outer bands: merge ring k-1 (inner) with ring k (outer) by angle.
    for k in 2..=rings {
        let n1 = 6 * (k - 1);
        let n2 = 6 * k;
        let s1 = ring_start(k - 1);
        let s2 = ring_start(k);
        let (mut i, mut j) = (0usize, 0usize);
        while i < n1 || j < n2 {
            let ang_i = if i < n1 {
                (i + 1) as f64 / n1 as f64
            } else {
                f64::INFINITY
            };
            let ang_j = if j < n2 {
                (j + 1) as f64 / n2 as f64
            } else {
                f64::INFINITY
            };
            if ang_j <= ang_i {
                triangles.push([s2 + j % n2, s2 + (j + 1) % n2, s1 + i % n1]);
                j += 1;
            } else {
                triangles.push([s1 + (i + 1) % n1, s1 + i % n1, s2 + j % n2]);
                i += 1;
            }
        }
    }

    TriangleMesh::new(vertices, triangles, tags, MeshGeometry::Disk { radius })
        .expect("disk construction is positively oriented")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PiecewiseLinearFn;

    fn unit_square() -> PlanarDomain {
        crate::geometry::build_generalized_strip(
            PiecewiseLinearFn::constant(0.0, 1.0, 0.0),
            PiecewiseLinearFn::constant(0.0, 1.0, 1.0),
            (0.0, 1.0),
            false,
        )
        .unwrap()
    }

    fn slanted_strip() -> PlanarDomain {
        crate::geometry::build_generalized_strip(
            PiecewiseLinearFn::new(vec![(0.0, -0.3), (2.0, -0.5), (4.0, -0.35)]).unwrap(),
            PiecewiseLinearFn::new(vec![(0.0, 0.4), (1.0, 0.3), (4.0, 0.5)]).unwrap(),
            (0.0, 4.0),
            false,
        )
        .unwrap()
    }

    fn wedge() -> PlanarDomain {
        crate::geometry::build_generalized_strip(
            PiecewiseLinearFn::new(vec![(0.0, 0.0), (4.0, -0.4)]).unwrap(),
            PiecewiseLinearFn::new(vec![(0.0, 0.0), (4.0, 0.4)]).unwrap(),
            (0.0, 4.0),
            true,
        )
        .unwrap()
    }

    fn check_invariants(mesh: &TriangleMesh) {
        for t in 0..mesh.num_triangles() {
            assert!(mesh.triangle_area(t) > 0.0, "triangle {t} inverted");
        }
        // Edge-manifold: every edge in at most two triangles.
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in mesh.triangles() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        assert!(counts.values().all(|&c| c <= 2), "non-manifold edge");
        // Boundary edges have non-Interior endpoints.
        for (a, b) in mesh.boundary_edges() {
            assert!(mesh.is_boundary_vertex(a), "boundary edge vertex untagged");
            assert!(mesh.is_boundary_vertex(b), "boundary edge vertex untagged");
        }
    }

    #[test]
    fn unit_square_minimal_grid() {
        let mesh = generate_strip_mesh(&unit_square(), 1, 1).unwrap();
        assert_eq!(mesh.num_vertices(), 4);
        assert_eq!(mesh.num_triangles(), 2);
        check_invariants(&mesh);
    }

    #[test]
    fn grid_counts() {
        let mesh = generate_strip_mesh(&unit_square(), 10, 8).unwrap();
        assert_eq!(mesh.num_vertices(), 99);
        assert_eq!(mesh.num_triangles(), 160);
        check_invariants(&mesh);
    }

    #[test]
    fn pinched_wedge_merges_left_cap() {
        let mesh = generate_strip_mesh(&wedge(), 10, 8).unwrap();
        assert_eq!(mesh.num_vertices(), 99 - 8);
        assert_eq!(mesh.num_triangles(), 160 - 8);
        check_invariants(&mesh);
        let caps = mesh
            .tags()
            .iter()
            .filter(|&&t| t == BoundaryTag::LeftCap)
            .count();
        assert_eq!(caps, 1);
    }

    #[test]
    fn strip_area_matches_domain_area() {
        let dom = slanted_strip();
        let mesh = generate_strip_mesh(&dom, 16, 5).unwrap();
        let rel = (mesh.total_area() - dom.area()).abs() / dom.area();
        assert!(rel < 1e-12, "relative area mismatch {rel}");
        check_invariants(&mesh);
    }

    #[test]
    fn disk_counts_and_orientation() {
        let mesh = generate_disk_mesh(0.5, 1);
        assert_eq!(mesh.num_vertices(), 7);
        assert_eq!(mesh.num_triangles(), 6);
        check_invariants(&mesh);

        for rings in [2usize, 5, 20] {
            let mesh = generate_disk_mesh(0.5, rings);
            assert_eq!(mesh.num_vertices(), 1 + 3 * rings * (rings + 1));
            assert_eq!(mesh.num_triangles(), 6 * rings * rings);
            check_invariants(&mesh);
        }
    }

    #[test]
    fn disk_area_approaches_circle_area() {
        let r = 0.5;
        let mesh = generate_disk_mesh(r, 40);
        let exact = std::f64::consts::PI * r * r;
        let rel = (mesh.total_area() - exact).abs() / exact;
        assert!(rel < 2e-4, "relative deficit {rel}");
    }

    #[test]
    fn refine_multiplies_triangles_by_four() {
        let mesh = generate_strip_mesh(&unit_square(), 1, 1).unwrap();
        let fine = mesh.refine();
        assert_eq!(fine.num_triangles(), 8);
        let finer = fine.refine();
        assert_eq!(finer.num_triangles(), 32);
        check_invariants(&fine);
        check_invariants(&finer);
    }

    #[test]
    fn refine_halves_h_max_on_strips() {
        let mesh = generate_strip_mesh(&slanted_strip(), 8, 4).unwrap();
        let fine = mesh.refine();
        let ratio = fine.h_max() / mesh.h_max();
        assert!(
            (ratio - 0.5).abs() <= 0.05,
            "h_max ratio {ratio} outside 0.5 +- 10%"
        );
        check_invariants(&fine);
    }

    #[test]
    fn refine_reprojects_disk_rim() {
        let r = 0.5;
        let mesh = generate_disk_mesh(r, 4);
        let fine = mesh.refine();
        assert_eq!(fine.num_triangles(), 4 * mesh.num_triangles());
        for (v, tag) in fine.vertices().iter().zip(fine.tags()) {
            if *tag == BoundaryTag::DiskRim {
                assert!((v.norm() - r).abs() < 1e-12, "rim vertex off circle");
            }
        }
        check_invariants(&fine);
        // Refinement gains area toward the disk.
        assert!(fine.total_area() > mesh.total_area());
    }

    #[test]
    fn refine_keeps_strip_area_exact() {
        let dom = slanted_strip();
        let mesh = generate_strip_mesh(&dom, 8, 4).unwrap();
        let fine = mesh.refine();
        let rel = (fine.total_area() - dom.area()).abs() / dom.area();
        assert!(rel < 1e-12);
    }

    #[test]
    fn refine_preserves_pinched_meshes() {
        let mesh = generate_strip_mesh(&wedge(), 6, 4).unwrap();
        let fine = mesh.refine();
        assert_eq!(fine.num_triangles(), 4 * mesh.num_triangles());
        check_invariants(&fine);
    }

    #[test]
    fn quality_angle_range() {
        let q = generate_strip_mesh(&unit_square(), 4, 4).unwrap().quality();
        assert!(q.h_max > 0.0);
        assert!(q.min_angle > 0.0 && q.min_angle <= 60.0 + 1e-9);
        assert_eq!(q.triangle_count, 32);
    }

    #[test]
    fn locate_finds_containing_triangle() {
        let mesh = generate_strip_mesh(&unit_square(), 4, 4).unwrap();
        let (t, bary) = mesh.locate(point(0.31, 0.57)).unwrap();
        assert!(t < mesh.num_triangles());
        assert!((bary.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(bary.iter().all(|&l| l >= -1e-9));
        assert!(mesh.locate(point(2.0, 0.5)).is_none());
    }

    #[test]
    fn export_format_is_stable() {
        let mesh = generate_strip_mesh(&unit_square(), 1, 1).unwrap();
        let text = mesh.export_text();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "vertices 4 triangles 2");
        let first = lines.next().unwrap();
        assert!(first.starts_with("0.0000000000000000e0 0.0000000000000000e0 "));
        assert_eq!(text.lines().count(), 1 + 4 + 2);
    }
}
