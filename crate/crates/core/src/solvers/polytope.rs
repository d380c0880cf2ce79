//! Payoff polytope (convex hull of the joint payoff points) and its Pareto front.
//!
//! Works in two or three dimensions with at most a handful of points, so the
//! hull is built exhaustively and every face keeps the list of constraints that
//! are tight on it. A face is on the Pareto front iff no nonzero nonnegative
//! direction is feasible from its relative interior.

use crate::error::{Error, Result};
use crate::game::RepeatedGame;

/// Hull construction and containment tolerance.
pub const GEOMETRY_TOLERANCE: f64 = 1e-9;

const DIRECTION_TOL: f64 = 1e-12;

type Point = Vec<f64>;

/// Inequality `normal . x <= offset`, `normal` unit length.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub normal: Point,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    /// Indices into [`PayoffPolytope::points`]; 2-faces list their vertices in
    /// boundary order.
    pub vertices: Vec<usize>,
    pub dim: usize,
    /// Indices of the constraints tight on the whole face.
    pub active: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PayoffPolytope {
    dim: usize,
    /// Distinct payoff points.
    points: Vec<Point>,
    /// Joint-action indices that map to each distinct point.
    provenance: Vec<Vec<usize>>,
    vertices: Vec<usize>,
    affine_dim: usize,
    constraints: Vec<Constraint>,
    /// Unit normals of the affine hull's equality constraints, with the offsets.
    equalities: Vec<(Point, f64)>,
    faces: Vec<Face>,
}

impl PayoffPolytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn affine_dim(&self) -> usize {
        self.affine_dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Hull vertices in index order.
    pub fn vertices(&self) -> Vec<&[f64]> {
        self.vertices.iter().map(|&i| self.points[i].as_slice()).collect()
    }

    pub fn vertex_indices(&self) -> &[usize] {
        &self.vertices
    }

    /// Joint actions whose payoff point is the given distinct point.
    pub fn provenance(&self, point: usize) -> &[usize] {
        &self.provenance[point]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Faces of the highest dimension.
    pub fn facets(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(move |f| f.dim == self.affine_dim)
    }

    pub fn face_points(&self, face: &Face) -> Vec<Point> {
        face.vertices.iter().map(|&i| self.points[i].clone()).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.constraints
            .iter()
            .all(|c| dot(&c.normal, x) <= c.offset + GEOMETRY_TOLERANCE)
            && self
                .equalities
                .iter()
                .all(|(n, b)| (dot(n, x) - b).abs() <= GEOMETRY_TOLERANCE)
    }

    /// Nearest polytope point; `x` itself when it is already inside.
    pub fn project(&self, x: &[f64]) -> Point {
        if self.contains(x) {
            return x.to_vec();
        }
        self.faces
            .iter()
            .map(|f| closest_on_face(x, &self.face_points(f), f.dim))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, p)| p)
            .expect("polytope has at least one face")
    }

    /// True iff some nonzero direction d >= 0 stays feasible from the relative
    /// interior of the face, i.e. its points are Pareto-dominated.
    fn face_is_dominated(&self, face: &Face) -> bool {
        let mut halfspaces: Vec<Point> = face
            .active
            .iter()
            .map(|&c| self.constraints[c].normal.clone())
            .collect();
        for (n, _) in &self.equalities {
            halfspaces.push(n.clone());
            halfspaces.push(n.iter().map(|x| -x).collect());
        }
        // d ranges over the standard simplex, clipped by normal . d <= 0
        let mut region: Vec<Point> = (0..self.dim)
            .map(|i| {
                let mut e = vec![0.0; self.dim];
                e[i] = 1.0;
                e
            })
            .collect();
        for h in &halfspaces {
            region = clip(&region, h);
            if region.is_empty() {
                return false;
            }
        }
        true
    }
}

/// Sutherland-Hodgman clip of a convex polygon (or segment) by `h . d <= 0`.
fn clip(poly: &[Point], h: &[f64]) -> Vec<Point> {
    let inside = |p: &Point| dot(h, p) <= DIRECTION_TOL;
    if poly.len() == 1 {
        return if inside(&poly[0]) { poly.to_vec() } else { Vec::new() };
    }
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let cur = &poly[i];
        let next = &poly[(i + 1) % poly.len()];
        let (ci, ni) = (inside(cur), inside(next));
        if ci {
            out.push(cur.clone());
        }
        if ci != ni {
            let (a, b) = (dot(h, cur), dot(h, next));
            let t = a / (a - b);
            out.push(cur.iter().zip(next).map(|(x, y)| x + t * (y - x)).collect());
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: &[f64], s: f64) -> Point {
    a.iter().map(|x| x * s).collect()
}

fn unit(a: &[f64]) -> Point {
    scale(a, 1.0 / norm(a))
}

fn cross(a: &[f64], b: &[f64]) -> Point {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Orthonormal basis of `span(vectors)` by Gram-Schmidt.
fn orthonormal_basis(vectors: &[Point]) -> Vec<Point> {
    let mut basis: Vec<Point> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for b in &basis {
            let c = dot(&w, b);
            w = sub(&w, &scale(b, c));
        }
        if norm(&w) > GEOMETRY_TOLERANCE {
            basis.push(unit(&w));
        }
    }
    basis
}

/// Orthonormal complement of an orthonormal basis in R^dim.
fn complement(basis: &[Point], dim: usize) -> Vec<Point> {
    let mut all = basis.to_vec();
    let mut extra = Vec::new();
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        let before = all.len();
        all = orthonormal_basis(&[all.clone(), vec![e]].concat());
        if all.len() > before {
            extra.push(all.last().unwrap().clone());
        }
    }
    extra
}

/// Counter-clockwise hull of 2D points (Andrew's monotone chain), collinear
/// points dropped. Returns indices into `pts`.
fn monotone_chain(pts: &[(f64, f64)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| {
        pts[a]
            .0
            .total_cmp(&pts[b].0)
            .then(pts[a].1.total_cmp(&pts[b].1))
    });
    if order.len() < 3 {
        return order;
    }
    let turn = |o: usize, a: usize, b: usize| {
        (pts[a].0 - pts[o].0) * (pts[b].1 - pts[o].1) - (pts[a].1 - pts[o].1) * (pts[b].0 - pts[o].0)
    };
    let mut hull: Vec<usize> = Vec::with_capacity(2 * order.len());
    for &i in &order {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], i) <= GEOMETRY_TOLERANCE {
            hull.pop();
        }
        hull.push(i);
    }
    let lower_len = hull.len() + 1;
    for &i in order.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && turn(hull[hull.len() - 2], hull[hull.len() - 1], i) <= GEOMETRY_TOLERANCE
        {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    hull
}

/// Convex hull of the game's joint payoff points.
pub fn build_payoff_polytope(game: &RepeatedGame) -> Result<PayoffPolytope> {
    let n = game.player_count();
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedShape(format!(
            "payoff polytope needs 2 or 3 players, got {n}"
        )));
    }
    let mut points: Vec<Point> = Vec::new();
    let mut provenance: Vec<Vec<usize>> = Vec::new();
    for (idx, p) in game.payoff_points().into_iter().enumerate() {
        match points
            .iter()
            .position(|q| norm(&sub(q, &p)) <= GEOMETRY_TOLERANCE)
        {
            Some(i) => provenance[i].push(idx),
            None => {
                points.push(p);
                provenance.push(vec![idx]);
            }
        }
    }
    let diffs: Vec<Point> = points.iter().skip(1).map(|p| sub(p, &points[0])).collect();
    let basis = orthonormal_basis(&diffs);
    let affine_dim = basis.len();
    let equalities: Vec<(Point, f64)> = complement(&basis, n)
        .into_iter()
        .map(|e| {
            let b = dot(&e, &points[0]);
            (e, b)
        })
        .collect();
    let mut poly = PayoffPolytope {
        dim: n,
        points,
        provenance,
        vertices: Vec::new(),
        affine_dim,
        constraints: Vec::new(),
        equalities,
        faces: Vec::new(),
    };
    match affine_dim {
        0 => {
            poly.vertices = vec![0];
            poly.faces.push(Face {
                vertices: vec![0],
                dim: 0,
                active: Vec::new(),
            });
        }
        1 => build_segment(&mut poly, &basis[0]),
        2 => build_polygon(&mut poly, &basis),
        _ => build_solid(&mut poly),
    }
    Ok(poly)
}

fn build_segment(poly: &mut PayoffPolytope, direction: &[f64]) {
    let along: Vec<f64> = poly.points.iter().map(|p| dot(p, direction)).collect();
    let lo = (0..along.len()).min_by(|&a, &b| along[a].total_cmp(&along[b])).unwrap();
    let hi = (0..along.len()).max_by(|&a, &b| along[a].total_cmp(&along[b])).unwrap();
    poly.constraints = vec![
        Constraint {
            normal: scale(direction, -1.0),
            offset: -along[lo],
        },
        Constraint {
            normal: direction.to_vec(),
            offset: along[hi],
        },
    ];
    poly.vertices = vec![lo.min(hi), lo.max(hi)];
    poly.faces = vec![
        Face {
            vertices: vec![lo],
            dim: 0,
            active: vec![0],
        },
        Face {
            vertices: vec![hi],
            dim: 0,
            active: vec![1],
        },
        Face {
            vertices: vec![lo, hi],
            dim: 1,
            active: Vec::new(),
        },
    ];
}

/// Hull of coplanar points given an orthonormal basis of their plane. Edges
/// become constraints whose normals lie in the plane.
fn build_polygon(poly: &mut PayoffPolytope, basis: &[Point]) {
    let origin = poly.points[0].clone();
    let coords: Vec<(f64, f64)> = poly
        .points
        .iter()
        .map(|p| {
            let d = sub(p, &origin);
            (dot(&d, &basis[0]), dot(&d, &basis[1]))
        })
        .collect();
    let ring = monotone_chain(&coords);
    let count = ring.len();
    for e in 0..count {
        let (a, b) = (ring[e], ring[(e + 1) % count]);
        let (dx, dy) = (coords[b].0 - coords[a].0, coords[b].1 - coords[a].1);
        // outward normal of a counter-clockwise edge, mapped back to payoff space
        let normal = unit(&sub(&scale(&basis[0], dy), &scale(&basis[1], dx)));
        let offset = dot(&normal, &poly.points[a]);
        poly.constraints.push(Constraint { normal, offset });
        poly.faces.push(Face {
            vertices: vec![a, b],
            dim: 1,
            active: vec![e],
        });
    }
    for (pos, &v) in ring.iter().enumerate() {
        poly.faces.push(Face {
            vertices: vec![v],
            dim: 0,
            active: vec![(pos + count - 1) % count, pos],
        });
    }
    poly.faces.push(Face {
        vertices: ring.clone(),
        dim: 2,
        active: Vec::new(),
    });
    let mut vertices = ring;
    vertices.sort_unstable();
    poly.vertices = vertices;
}

/// Full-dimensional 3D hull: every supporting plane through three points is a
/// facet candidate. Quartic in the point count, which never exceeds eight.
fn build_solid(poly: &mut PayoffPolytope) {
    let pts = poly.points.clone();
    let m = pts.len();
    let mut facet_sets: Vec<Vec<usize>> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let raw = cross(&sub(&pts[j], &pts[i]), &sub(&pts[k], &pts[i]));
                if norm(&raw) <= GEOMETRY_TOLERANCE {
                    continue;
                }
                let mut normal = unit(&raw);
                let side: Vec<f64> = pts.iter().map(|p| dot(&normal, &sub(p, &pts[i]))).collect();
                if side.iter().all(|&s| s <= GEOMETRY_TOLERANCE) {
                } else if side.iter().all(|&s| s >= -GEOMETRY_TOLERANCE) {
                    normal = scale(&normal, -1.0);
                } else {
                    continue;
                }
                let on: Vec<usize> = (0..m).filter(|&q| side[q].abs() <= GEOMETRY_TOLERANCE).collect();
                if facet_sets.contains(&on) {
                    continue;
                }
                facet_sets.push(on.clone());
                // order the facet's extreme points around its boundary
                let u = unit(&sub(&pts[j], &pts[i]));
                let w = cross(&normal, &u);
                let coords: Vec<(f64, f64)> = on
                    .iter()
                    .map(|&q| {
                        let d = sub(&pts[q], &pts[i]);
                        (dot(&d, &u), dot(&d, &w))
                    })
                    .collect();
                let ring: Vec<usize> = monotone_chain(&coords).into_iter().map(|r| on[r]).collect();
                let offset = dot(&normal, &pts[i]);
                poly.constraints.push(Constraint { normal, offset });
                poly.faces.push(Face {
                    vertices: ring,
                    dim: 2,
                    active: Vec::new(),
                });
            }
        }
    }
    let facet_count = poly.faces.len();
    for f in 0..facet_count {
        poly.faces[f].active = vec![f];
    }
    let contains_all = |ring: &[usize], vs: &[usize]| vs.iter().all(|v| ring.contains(v));
    let mut edges: Vec<Vec<usize>> = Vec::new();
    for f in 0..facet_count {
        let ring = poly.faces[f].vertices.clone();
        for e in 0..ring.len() {
            let mut edge = vec![ring[e], ring[(e + 1) % ring.len()]];
            edge.sort_unstable();
            if !edges.contains(&edge) {
                edges.push(edge);
            }
        }
    }
    let mut vertices: Vec<usize> = edges.iter().flatten().copied().collect();
    vertices.sort_unstable();
    vertices.dedup();
    let facet_rings: Vec<Vec<usize>> = poly.faces.iter().map(|f| f.vertices.clone()).collect();
    for edge in edges {
        let active = (0..facet_count).filter(|&f| contains_all(&facet_rings[f], &edge)).collect();
        poly.faces.push(Face {
            vertices: edge,
            dim: 1,
            active,
        });
    }
    for &v in &vertices {
        let active = (0..facet_count).filter(|&f| facet_rings[f].contains(&v)).collect();
        poly.faces.push(Face {
            vertices: vec![v],
            dim: 0,
            active,
        });
    }
    poly.vertices = vertices;
}

/// Closest point of a face (point, segment, or planar convex polygon) and its
/// distance.
fn closest_on_face(x: &[f64], pts: &[Point], dim: usize) -> (f64, Point) {
    match dim {
        0 => (norm(&sub(x, &pts[0])), pts[0].clone()),
        1 => closest_on_segment(x, &pts[0], &pts[1]),
        _ => closest_on_polygon(x, pts),
    }
}

fn closest_on_segment(x: &[f64], a: &[f64], b: &[f64]) -> (f64, Point) {
    let ab = sub(b, a);
    let len2 = dot(&ab, &ab);
    let t = if len2 == 0.0 {
        0.0
    } else {
        (dot(&sub(x, a), &ab) / len2).clamp(0.0, 1.0)
    };
    let p: Point = a.iter().zip(&ab).map(|(a, d)| a + t * d).collect();
    (norm(&sub(x, &p)), p)
}

fn closest_on_polygon(x: &[f64], ring: &[Point]) -> (f64, Point) {
    let edges = || (0..ring.len()).map(|e| (&ring[e], &ring[(e + 1) % ring.len()]));
    let boundary = || {
        edges()
            .map(|(a, b)| closest_on_segment(x, a, b))
            .min_by(|p, q| p.0.total_cmp(&q.0))
            .unwrap()
    };
    let basis = orthonormal_basis(&ring.iter().skip(1).map(|p| sub(p, &ring[0])).collect::<Vec<_>>());
    if basis.len() < 2 {
        return boundary();
    }
    // project into the polygon's plane
    let d = sub(x, &ring[0]);
    let mut proj = ring[0].clone();
    for b in &basis {
        let c = dot(&d, b);
        proj = proj.iter().zip(b).map(|(p, e)| p + c * e).collect();
    }
    let coord = |p: &[f64]| {
        let d = sub(p, &ring[0]);
        (dot(&d, &basis[0]), dot(&d, &basis[1]))
    };
    let q = coord(&proj);
    let signs: Vec<f64> = edges()
        .map(|(a, b)| {
            let (a, b) = (coord(a), coord(b));
            (b.0 - a.0) * (q.1 - a.1) - (b.1 - a.1) * (q.0 - a.0)
        })
        .collect();
    let inside = signs.iter().all(|&s| s >= -GEOMETRY_TOLERANCE)
        || signs.iter().all(|&s| s <= GEOMETRY_TOLERANCE);
    if inside {
        (norm(&sub(x, &proj)), proj)
    } else {
        boundary()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontFace {
    pub points: Vec<Point>,
    pub dim: usize,
    /// Joint actions of the face's vertices.
    pub joint_actions: Vec<Vec<usize>>,
}

/// Maximal Pareto-optimal faces of a payoff polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFront {
    pub faces: Vec<FrontFace>,
    polytope: PayoffPolytope,
}

impl ParetoFront {
    pub fn polytope(&self) -> &PayoffPolytope {
        &self.polytope
    }

    /// Edges of the front as point pairs (for 2D plots and tests).
    pub fn segments(&self) -> Vec<(Point, Point)> {
        self.faces
            .iter()
            .filter(|f| f.dim == 1)
            .map(|f| (f.points[0].clone(), f.points[1].clone()))
            .collect()
    }
}

pub fn pareto_front(polytope: &PayoffPolytope) -> ParetoFront {
    let efficient: Vec<&Face> = polytope
        .faces
        .iter()
        .filter(|f| !polytope.face_is_dominated(f))
        .collect();
    let faces = efficient
        .iter()
        .filter(|f| {
            !efficient.iter().any(|g| {
                g.dim > f.dim && f.vertices.iter().all(|v| g.vertices.contains(v))
            })
        })
        .map(|f| FrontFace {
            points: polytope.face_points(f),
            dim: f.dim,
            joint_actions: f
                .vertices
                .iter()
                .map(|&v| polytope.provenance[v].clone())
                .collect(),
        })
        .collect();
    ParetoFront {
        faces,
        polytope: polytope.clone(),
    }
}

/// Minimal Euclidean distance from a payoff point (projected onto the polytope
/// first if it lies outside) to the Pareto front.
pub fn distance_to_pareto_front(point: &[f64], front: &ParetoFront) -> f64 {
    assert!(!front.faces.is_empty(), "a nonempty polytope has a nonempty Pareto front");
    let x = front.polytope.project(point);
    front
        .faces
        .iter()
        .map(|f| closest_on_face(&x, &f.points, f.dim).0)
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{figure_one_game, random_strictly_ordinal};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sorted(mut v: Vec<Point>) -> Vec<Point> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn figure_one_hull_and_front() {
        let poly = build_payoff_polytope(&figure_one_game()).unwrap();
        let verts: Vec<Point> = poly.vertices().into_iter().map(|v| v.to_vec()).collect();
        assert_eq!(
            sorted(verts),
            vec![vec![1.0, 1.0], vec![1.0, 4.0], vec![3.0, 3.0], vec![4.0, 1.0]]
        );
        let front = pareto_front(&poly);
        let mut segs: Vec<Point> = front
            .segments()
            .into_iter()
            .map(|(a, b)| {
                let mut s = vec![a, b];
                s.sort_by(|x, y| x.partial_cmp(y).unwrap());
                s.concat()
            })
            .collect();
        segs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(
            segs,
            vec![vec![1.0, 4.0, 3.0, 3.0], vec![3.0, 3.0, 4.0, 1.0]]
        );
        assert_eq!(front.faces.len(), 2);
    }

    #[test]
    fn figure_one_distances() {
        let poly = build_payoff_polytope(&figure_one_game()).unwrap();
        let front = pareto_front(&poly);
        // closest point (2.7, 3.15) on the (3,3)-(1,4) edge
        let expected = ((2.7f64 - 2.25).powi(2) + (3.15f64 - 2.25).powi(2)).sqrt();
        assert_abs_diff_eq!(distance_to_pareto_front(&[2.25, 2.25], &front), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 1.0062, epsilon = 1e-4);
        assert_eq!(distance_to_pareto_front(&[3.0, 3.0], &front), 0.0);
        assert_abs_diff_eq!(distance_to_pareto_front(&[3.5, 2.0], &front), 0.0, epsilon = 1e-12);
        // (3.4, 2.0) against the line 2x + y = 9
        let line = (9.0f64 - 2.0 * 3.4 - 2.0).abs() / 5f64.sqrt();
        assert_abs_diff_eq!(distance_to_pareto_front(&[3.4, 2.0], &front), line, epsilon = 1e-12);
    }

    #[test]
    fn collinear_and_single_point_games() {
        let line = RepeatedGame::bimatrix(&[&[1.0, 2.0], &[3.0, 4.0]], &[&[4.0, 3.0], &[2.0, 1.0]])
            .unwrap();
        let poly = build_payoff_polytope(&line).unwrap();
        assert_eq!(poly.affine_dim(), 1);
        let front = pareto_front(&poly);
        assert_eq!(front.faces.len(), 1);
        assert_eq!(front.faces[0].dim, 1);

        let point = RepeatedGame::new(vec![2, 2], vec![vec![2.0; 4], vec![5.0; 4]]).unwrap();
        let poly = build_payoff_polytope(&point).unwrap();
        assert_eq!(poly.affine_dim(), 0);
        let front = pareto_front(&poly);
        assert_eq!(front.faces.len(), 1);
        assert_eq!(front.faces[0].points, vec![vec![2.0, 5.0]]);
        assert_eq!(distance_to_pareto_front(&[2.0, 5.0], &front), 0.0);
    }

    #[test]
    fn increasing_line_front_is_its_top_end() {
        let line = RepeatedGame::bimatrix(&[&[1.0, 2.0], &[3.0, 4.0]], &[&[1.0, 2.0], &[3.0, 4.0]])
            .unwrap();
        let front = pareto_front(&build_payoff_polytope(&line).unwrap());
        assert_eq!(front.faces.len(), 1);
        assert_eq!(front.faces[0].points, vec![vec![4.0, 4.0]]);
    }

    #[test]
    fn no_conflict_front_is_the_common_best_point() {
        let g = RepeatedGame::bimatrix(&[&[4.0, 1.0], &[2.0, 3.0]], &[&[4.0, 2.0], &[3.0, 1.0]])
            .unwrap();
        let front = pareto_front(&build_payoff_polytope(&g).unwrap());
        assert_eq!(front.faces.len(), 1);
        assert_eq!(front.faces[0].points, vec![vec![4.0, 4.0]]);
        assert_eq!(front.faces[0].joint_actions, vec![vec![0]]);
    }

    #[test]
    fn three_player_hulls_are_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let g = random_strictly_ordinal(&[2, 2, 2], &mut rng).unwrap();
            let poly = build_payoff_polytope(&g).unwrap();
            assert!(poly.vertices().len() <= 8);
            for p in g.payoff_points() {
                assert!(poly.contains(&p));
            }
            // Euler characteristic of a convex polytope's boundary
            let count = |d| poly.faces().iter().filter(|f| f.dim == d).count() as i64;
            assert_eq!(count(0) - count(1) + count(2), 2);
            let front = pareto_front(&poly);
            assert!(!front.faces.is_empty());
            for p in g.payoff_points() {
                let d = distance_to_pareto_front(&p, &front);
                let dominated = g.payoff_points().iter().any(|q| {
                    q.iter().zip(&p).all(|(a, b)| a >= b) && q.iter().zip(&p).any(|(a, b)| a > b)
                });
                if d == 0.0 {
                    assert!(!dominated);
                }
            }
        }
    }

    #[test]
    fn outside_points_are_projected() {
        let front = pareto_front(&build_payoff_polytope(&figure_one_game()).unwrap());
        assert_eq!(distance_to_pareto_front(&[5.0, 5.0], &front), 0.0);
        let poly = front.polytope();
        assert!(!poly.contains(&[0.0, 0.0]));
        assert_eq!(poly.project(&[0.0, 0.0]), vec![1.0, 1.0]);
    }

    #[test]
    fn distance_shrinks_toward_the_front() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let g = random_strictly_ordinal(&[2, 2], &mut rng).unwrap();
            let front = pareto_front(&build_payoff_polytope(&g).unwrap());
            let pts = g.payoff_points();
            let w: Vec<f64> = (0..4).map(|_| rng.gen::<f64>()).collect();
            let total: f64 = w.iter().sum();
            let x: Point = (0..2)
                .map(|c| pts.iter().zip(&w).map(|(p, w)| p[c] * w / total).sum())
                .collect();
            let target = front
                .faces
                .iter()
                .map(|f| closest_on_face(&x, &f.points, f.dim))
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .unwrap()
                .1;
            let mut last = f64::INFINITY;
            for s in 0..=10 {
                let t = s as f64 / 10.0;
                let y: Point = x.iter().zip(&target).map(|(a, b)| a + t * (b - a)).collect();
                let d = distance_to_pareto_front(&y, &front);
                assert!(d <= last + 1e-12);
                last = d;
            }
            assert!(last < 1e-9);
        }
    }
}
