//! Independent checks of the orbit census.
//!
//! The free-group check lists every word by brute force. The octagon-group
//! check never looks at words: it walks the tiling by group elements and
//! counts closed geodesics through the identity
//! `N(T) = Σ |axis(γ) ∩ F| / ℓ(γ)` over primitive hyperbolic `γ` with
//! `ℓ(γ) ≤ T`, where `F` is the octagon around the centre of the tiling.

mod common;

use std::collections::{BTreeSet, HashMap, VecDeque};

use ruelle_core::hyp_geom::IsometryMatrix;
use ruelle_core::orbit_enum::words::Letter;
use ruelle_core::orbit_enum::{census, enumerate_primitives, GroupModel};

#[test]
fn free_group_classes_match_brute_force() {
    let model = GroupModel::builtin("schottky-orientable").unwrap();
    let max_len = 7;
    let expected = common::free_group_classes(max_len);
    let got: BTreeSet<Vec<u8>> = enumerate_primitives(&model, max_len)
        .unwrap()
        .orbits
        .iter()
        .map(|o| common::codes(&o.word().render(model.generator_names())))
        .collect();
    assert_eq!(got.len(), expected.len());
    assert_eq!(got, expected);
    let by_len = |n: usize| got.iter().filter(|w| w.len() == n).count();
    assert_eq!(by_len(1), 4);
    assert_eq!(by_len(2), 4);
}

type Point = [f64; 3];

fn minkowski(x: Point, y: Point) -> f64 {
    -x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

/// Hyperboloid coordinates of `m(i)`.
fn orbit_point(m: &IsometryMatrix) -> Point {
    let [a, b, c, d] = m.entries();
    let den = c * c + d * d;
    let x = (a * c + b * d) / den;
    let y = 1.0 / den;
    let r2 = x * x + y * y;
    [(1.0 + r2) / (2.0 * y), (r2 - 1.0) / (2.0 * y), x / y]
}

/// Klein coordinates of a boundary point given as a projective vector.
fn boundary(v: [f64; 2]) -> [f64; 2] {
    let n = v[0] * v[0] + v[1] * v[1];
    [(v[0] * v[0] - v[1] * v[1]) / n, 2.0 * v[0] * v[1] / n]
}

fn fixed_points(m: &IsometryMatrix) -> ([f64; 2], [f64; 2]) {
    let [a, b, c, d] = m.entries();
    let tr = a + d;
    let root = (tr * tr - 4.0).sqrt();
    let vec = |mu: f64| {
        let u = [b, mu - a];
        let w = [mu - d, c];
        if u[0].hypot(u[1]) > w[0].hypot(w[1]) {
            u
        } else {
            w
        }
    };
    (vec((tr + root) / 2.0), vec((tr - root) / 2.0))
}

struct Octagon {
    /// Half-planes `<(1, k), n> <= 0` in Klein coordinates `k`.
    normals: Vec<Point>,
}

impl Octagon {
    fn new(model: &GroupModel) -> Self {
        let o = [1.0, 0.0, 0.0];
        let normals = (0..model.alphabet_size())
            .map(|k| {
                let p = orbit_point(&model.letter_matrix(Letter(k as u8)));
                [p[0] - o[0], p[1] - o[1], p[2] - o[2]]
            })
            .collect();
        Octagon { normals }
    }

    /// Hyperbolic length of the part of the chord `p -> q` inside the octagon.
    /// A chord along a side is shared with the neighbouring tile and counts
    /// half.
    fn clipped_length(&self, p: [f64; 2], q: [f64; 2]) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut share = 1.0;
        for n in &self.normals {
            let f = |k: [f64; 2]| minkowski([1.0, k[0], k[1]], *n) / n[0].abs();
            let (fp, fq) = (f(p), f(q));
            if fp.abs() < 1e-9 && fq.abs() < 1e-9 {
                share = 0.5;
                continue;
            }
            if fp > 0.0 && fq > 0.0 {
                return 0.0;
            }
            if fp > 0.0 {
                lo = lo.max(fp / (fp - fq));
            } else if fq > 0.0 {
                hi = hi.min(fp / (fp - fq));
            }
        }
        if hi <= lo {
            return 0.0;
        }
        let lift = |t: f64| {
            let k = [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])];
            let s = (1.0 - k[0] * k[0] - k[1] * k[1]).sqrt();
            [1.0 / s, k[0] / s, k[1] / s]
        };
        let (x, y) = (lift(lo), lift(hi));
        let diff = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
        // |x - y| = 2 sinh(d/2) in the Minkowski norm
        share * 2.0 * (minkowski(diff, diff).max(0.0).sqrt() / 2.0).asinh()
    }
}

/// All elements `g` with `d(i, g i) <= radius`, keyed by orbit point.
fn ball(model: &GroupModel, radius: f64, slack: f64) -> Vec<IsometryMatrix> {
    let cell = |p: Point| ((p[1] / 0.5).floor() as i64, (p[2] / 0.5).floor() as i64);
    let mut index: HashMap<(i64, i64), Vec<(Point, usize)>> = HashMap::new();
    let mut elements = vec![IsometryMatrix::IDENTITY];
    index.entry(cell([1.0, 0.0, 0.0])).or_default().push(([1.0, 0.0, 0.0], 0));
    // breadth first, so that every element is a short product of letters
    let mut frontier = VecDeque::from([0usize]);
    let limit = (radius + slack).cosh();
    while let Some(i) = frontier.pop_front() {
        for k in 0..model.alphabet_size() {
            let g = elements[i] * model.letter_matrix(Letter(k as u8));
            let p = orbit_point(&g);
            if p[0] > limit {
                continue;
            }
            let (cx, cy) = cell(p);
            let seen = (-1..=1).any(|dx| {
                (-1..=1).any(|dy| {
                    index
                        .get(&(cx + dx, cy + dy))
                        .is_some_and(|v| v.iter().any(|(q, _)| (q[1] - p[1]).abs() < 1e-3 && (q[2] - p[2]).abs() < 1e-3))
                })
            });
            if !seen {
                elements.push(g);
                index.entry((cx, cy)).or_default().push((p, elements.len() - 1));
                frontier.push_back(elements.len() - 1);
            }
        }
    }
    elements.into_iter().filter(|g| orbit_point(g)[0] <= radius.cosh()).collect()
}

#[test]
fn octagon_census_matches_tiling_count() {
    let t_max = 8.0;
    let model = GroupModel::builtin("bolza").unwrap();
    let octagon = Octagon::new(&model);
    // cosh of the circumradius of the regular octagon is 3 + 2√2
    let circumradius = (3.0 + 2.0 * 2f64.sqrt()).acosh();
    let elements = ball(&model, t_max + 2.0 * circumradius, circumradius);

    let axial = |g: &IsometryMatrix| -> Option<(f64, f64)> {
        let tr = g.trace().abs();
        if tr <= 2.0 + 1e-9 {
            return None;
        }
        let length = 2.0 * (tr / 2.0).acosh();
        let (p, q) = fixed_points(g);
        let inside = octagon.clipped_length(boundary(p), boundary(q));
        (length <= t_max + 1e-9 && inside > 0.0).then_some((length, inside))
    };
    let square_points: Vec<Point> = elements
        .iter()
        .filter(|g| axial(g).is_some_and(|(l, _)| 2.0 * l <= t_max + 1e-9))
        .map(|g| orbit_point(&(*g * *g)))
        .collect();
    // (length, weight, is a square)
    let contributions: Vec<(f64, f64, bool)> = elements
        .iter()
        .filter_map(|g| {
            let (length, inside) = axial(g)?;
            let p = orbit_point(g);
            let square = square_points.iter().any(|q| (p[1] - q[1]).abs() < 1e-3 && (p[2] - q[2]).abs() < 1e-3);
            Some((length, inside / length, square))
        })
        .collect();
    // an axis that only touches a vertex of F may be missed for one of g, g²
    assert!(contributions.iter().filter(|c| c.2).count() <= square_points.len());

    let c = census(&model, t_max).unwrap();
    assert!(c.complete);
    assert!(c.warnings.is_empty());
    let mut levels: Vec<f64> = c.orbits.iter().map(|o| o.t()).collect();
    levels.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    levels.push(t_max);
    for &t in &levels {
        let prim_oracle: f64 = contributions.iter().filter(|c| c.0 <= t + 1e-7 && !c.2).map(|c| c.1).sum();
        let prim_census = c.orbits.iter().filter(|o| o.m() == 1 && o.t() <= t + 1e-7).count();
        assert!(
            (prim_oracle - prim_census as f64).abs() < 1e-6,
            "primitive count at {t}: tiling {prim_oracle}, census {prim_census}"
        );
        let all_census = c.orbits.iter().filter(|o| o.t() <= t + 1e-7).count();
        let square_weight: f64 = contributions.iter().filter(|c| c.0 <= t + 1e-7 && c.2).map(|c| 2.0 * c.1).sum();
        assert!((prim_oracle + square_weight - all_census as f64).abs() < 1e-6);
    }
    // twelve systoles, each traversed both ways
    let systole = 2.0 * (1.0 + 2f64.sqrt()).acosh();
    assert_eq!(c.orbits.iter().filter(|o| (o.t() - systole).abs() < 1e-9).count(), 24);
    assert!((c.orbits[0].t() - systole).abs() < 1e-12);
}
