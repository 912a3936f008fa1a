//! Dirichlet domains and the closed geodesics that cross them.
//!
//! The group is conjugated so that the chosen centre sits at `i`, which the
//! Cayley map sends to the origin of the Klein disk. For each group element
//! `g` near the identity the bisector of `0` and `g(0)` is a straight chord
//! at Euclidean distance `|w|` from the origin, `w` being the Poincaré-disk
//! image of `g(i)`. Clipping a box by these half-planes gives the domain;
//! crossing the side of `g` leads into the tile `g(F)`.
//!
//! A closed geodesic meets `F` in finitely many chords. Walking the axis of a
//! conjugacy class from tile to tile visits all of them, so the chords form a
//! class invariant, and their hyperbolic lengths add up to the primitive
//! period. With a generic centre no closed geodesic passes through a vertex.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::hyp_geom::IsometryMatrix;

/// Default centre, chosen away from every symmetry of the shipped models.
pub const GENERIC_CENTRE: (f64, f64) = (0.123_456_7, 1.087_654_3);
/// Offset of the angular seam used to order chords.
const SEAM: f64 = 0.618_033_988_749_894_8;
/// Two chords whose endpoint angles agree to this are the same chord.
pub const MATCH_TOL: f64 = 1e-8;
/// Relative tolerance on the area of the domain.
pub const AREA_TOL: f64 = 1e-8;
const MAX_STEPS: usize = 10_000;

#[derive(Debug, Clone)]
struct Side {
    /// Inverse of the element whose tile lies across this side.
    pull_back: IsometryMatrix,
    normal: [f64; 2],
    offset: f64,
}

#[derive(Debug, Clone)]
pub struct DirichletDomain {
    /// Conjugation taking the centre to `i`.
    frame: IsometryMatrix,
    sides: Vec<Side>,
    /// Vertices in the Klein disk, counterclockwise.
    vertices: Vec<[f64; 2]>,
}

/// Canonical chord of a closed geodesic in the domain: endpoint angles of
/// the axis, repelling then attracting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordKey {
    pub repelling: f64,
    pub attracting: f64,
}

impl ChordKey {
    /// Largest angular distance between corresponding endpoints.
    pub fn distance(&self, other: &ChordKey) -> f64 {
        circular_gap(self.repelling, other.repelling).max(circular_gap(self.attracting, other.attracting))
    }
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Class data of a closed geodesic read off its chords in the domain.
#[derive(Debug, Clone, Copy)]
pub struct CuttingSequence {
    /// Least chord, a conjugacy invariant.
    pub key: ChordKey,
    /// False when the geodesic closes up before its full length, so the
    /// element is a proper power.
    pub primitive: bool,
}

/// Endpoint of an axis as a unit projective vector `(x : 1)` on the real line.
type Endpoint = [f64; 2];

/// Angle of the Cayley image `(x - i)/(x + i)` of a boundary point.
fn angle(v: Endpoint) -> f64 {
    (-2.0 * v[1].atan2(v[0])).rem_euclid(TAU)
}

fn klein(phi: f64) -> [f64; 2] {
    [phi.cos(), phi.sin()]
}

/// Repelling and attracting fixed points of an axial isometry on the
/// boundary.
pub fn axis_endpoints(m: &IsometryMatrix) -> Option<(Endpoint, Endpoint)> {
    let [a, b, c, d] = m.entries();
    let tr = a + d;
    let det = m.det();
    let disc = tr * tr - 4.0 * det;
    if disc <= 0.0 {
        return None;
    }
    let root = disc.sqrt();
    let big = if tr >= 0.0 { (tr + root) / 2.0 } else { (tr - root) / 2.0 };
    let small = det / big;
    let eigvec = |mu: f64| -> Endpoint {
        let u = [b, mu - a];
        let w = [mu - d, c];
        let pick = if u[0].hypot(u[1]) >= w[0].hypot(w[1]) { u } else { w };
        let n = pick[0].hypot(pick[1]);
        [pick[0] / n, pick[1] / n]
    };
    Some((eigvec(small), eigvec(big)))
}

/// Poincaré-disk image of `m(i)`.
fn disk_image_of_i(m: &IsometryMatrix) -> (f64, f64) {
    let [a, b, c, d] = m.entries();
    // orientation reversing maps act on the conjugate of i
    let s = if m.det() < 0.0 { -1.0 } else { 1.0 };
    let num = (b, s * a);
    let den = (d, s * c);
    let den2 = den.0 * den.0 + den.1 * den.1;
    let (x, y) = ((num.0 * den.0 + num.1 * den.1) / den2, (num.1 * den.0 - num.0 * den.1) / den2);
    // (z - i)/(z + i)
    let q = x * x + (y + 1.0) * (y + 1.0);
    ((x * x + y * y - 1.0) / q, -2.0 * x / q)
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl DirichletDomain {
    /// Dirichlet domain at `centre` (a point of the upper half-plane) for the
    /// group generated by `generators`, using bisectors of all elements of
    /// word length at most `radius`. Fails unless the result is a compact
    /// polygon of hyperbolic area `expected_area`.
    pub fn build(
        generators: &[IsometryMatrix],
        centre: (f64, f64),
        radius: usize,
        expected_area: f64,
    ) -> Result<Self> {
        let (x0, y0) = centre;
        let frame = IsometryMatrix::new(1.0, -x0, 0.0, y0)?;
        let frame_inv = frame.inverse();
        let mut letters = Vec::new();
        for g in generators {
            let c = frame * *g * frame_inv;
            letters.push(c);
            letters.push(c.inverse());
        }

        // freely reduced words up to the given length
        let mut elements: Vec<IsometryMatrix> = Vec::new();
        let mut layer: Vec<(usize, IsometryMatrix)> = (0..letters.len()).map(|k| (k, letters[k])).collect();
        for _ in 0..radius {
            elements.extend(layer.iter().map(|&(_, m)| m));
            let mut next = Vec::new();
            for &(last, m) in &layer {
                for (k, l) in letters.iter().enumerate() {
                    if k != (last ^ 1) {
                        next.push((k, m * *l));
                    }
                }
            }
            layer = next;
        }

        let mut halfplanes: Vec<Side> = Vec::new();
        for g in elements {
            let w = disk_image_of_i(&g);
            let r = w.0.hypot(w.1);
            if r < 1e-9 {
                continue;
            }
            halfplanes.push(Side { pull_back: g.inverse(), normal: [w.0 / r, w.1 / r], offset: r });
        }

        // clip the square [-2, 2]^2; edge k joins vertex k to vertex k+1
        let mut poly: Vec<([f64; 2], Option<usize>)> =
            vec![([-2.0, -2.0], None), ([2.0, -2.0], None), ([2.0, 2.0], None), ([-2.0, 2.0], None)];
        for (h, s) in halfplanes.iter().enumerate() {
            let f = |p: [f64; 2]| s.normal[0] * p[0] + s.normal[1] * p[1] - s.offset;
            let mut out = Vec::with_capacity(poly.len() + 1);
            for k in 0..poly.len() {
                let (p, label) = poly[k];
                let q = poly[(k + 1) % poly.len()].0;
                let (fp, fq) = (f(p), f(q));
                if fp <= 0.0 {
                    out.push((p, label));
                }
                if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
                    let t = fp / (fp - fq);
                    let x = [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])];
                    out.push((x, if fp < 0.0 { Some(h) } else { label }));
                }
            }
            poly = out;
        }
        // drop degenerate edges
        let mut cleaned: Vec<([f64; 2], Option<usize>)> = Vec::new();
        for k in 0..poly.len() {
            let p = poly[k].0;
            let q = poly[(k + 1) % poly.len()].0;
            if (p[0] - q[0]).hypot(p[1] - q[1]) > 1e-12 {
                cleaned.push(poly[k]);
            }
        }
        if cleaned.len() < 3 || cleaned.iter().any(|(p, l)| l.is_none() || p[0].hypot(p[1]) >= 1.0 - 1e-12) {
            return Err(Error::InvalidModel("Dirichlet domain is not a compact polygon".into()));
        }
        let used: Vec<usize> = cleaned.iter().map(|(_, l)| l.expect("checked")).collect();
        let vertices: Vec<[f64; 2]> = cleaned.iter().map(|(p, _)| *p).collect();
        let domain = DirichletDomain {
            frame,
            sides: used.iter().map(|&h| halfplanes[h].clone()).collect(),
            vertices,
        };
        let area = domain.area();
        if (area - expected_area).abs() > AREA_TOL * expected_area {
            return Err(Error::InvalidModel(format!(
                "Dirichlet domain has area {area}, expected {expected_area}"
            )));
        }
        Ok(domain)
    }

    pub fn side_count(&self) -> usize {
        self.sides.len()
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Hyperbolic area from the interior angles.
    pub fn area(&self) -> f64 {
        let n = self.sides.len();
        // outward Minkowski normal of n·x ≤ c is (n, c)
        let m = |s: &Side| [s.normal[0], s.normal[1], s.offset];
        let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] - a[2] * b[2];
        let angles: f64 = (0..n)
            .map(|k| {
                let (a, b) = (m(&self.sides[k]), m(&self.sides[(k + 1) % n]));
                let c = -dot(a, b) / (dot(a, a) * dot(b, b)).sqrt();
                c.clamp(-1.0, 1.0).acos()
            })
            .sum();
        debug_assert!((0..n).all(|k| cross(self.vertices[k], self.vertices[(k + 1) % n], self.vertices[(k + 2) % n]) > 0.0));
        (n as f64 - 2.0) * PI - angles
    }

    /// Klein parameters where the chord from `p` to `q` enters and leaves
    /// `F`, and the side it leaves through.
    fn chord_span(&self, p: [f64; 2], q: [f64; 2]) -> (f64, f64, usize) {
        let mut t_in = 0.0f64;
        let mut t_out = 1.0f64;
        let mut exit = 0;
        for (k, s) in self.sides.iter().enumerate() {
            let base = s.normal[0] * p[0] + s.normal[1] * p[1] - s.offset;
            let slope = s.normal[0] * (q[0] - p[0]) + s.normal[1] * (q[1] - p[1]);
            if slope > 0.0 {
                let t = -base / slope;
                if t < t_out {
                    t_out = t;
                    exit = k;
                }
            } else if slope < 0.0 {
                t_in = t_in.max(-base / slope);
            }
        }
        (t_in, t_out, exit)
    }

    /// Conjugates `g` until its axis passes through `F`.
    fn bring_in(&self, g: &IsometryMatrix) -> Option<IsometryMatrix> {
        let mut conj = *g;
        for _ in 0..MAX_STEPS {
            let (phi_r, phi_a) = endpoint_angles(&conj)?;
            let (p, q) = (klein(phi_r), klein(phi_a));
            let dir = [q[0] - p[0], q[1] - p[1]];
            let t = -(p[0] * dir[0] + p[1] * dir[1]) / (dir[0] * dir[0] + dir[1] * dir[1]);
            let foot = [p[0] + t * dir[0], p[1] + t * dir[1]];
            let worst = self
                .sides
                .iter()
                .map(|s| s.normal[0] * foot[0] + s.normal[1] * foot[1] - s.offset)
                .enumerate()
                .max_by(|x, y| x.1.total_cmp(&y.1))?;
            if worst.1 <= 0.0 {
                return Some(conj);
            }
            let back = self.sides[worst.0].pull_back;
            conj = back * conj * back.inverse();
        }
        None
    }

    /// Chords met while following the axis of `start` forward for `distance`,
    /// with the length of the first one.
    /// Rounding errors grow like `exp(distance)`, so walks stay short.
    fn walk(&self, start: IsometryMatrix, distance: f64) -> Option<(Vec<(f64, f64)>, f64)> {
        let mut conj = start;
        let mut travelled = 0.0;
        let mut chords = Vec::new();
        let mut first = None;
        for _ in 0..MAX_STEPS {
            let (phi_r, phi_a) = endpoint_angles(&conj)?;
            let (p, q) = (klein(phi_r), klein(phi_a));
            let (t_in, t_out, exit) = self.chord_span(p, q);
            if t_out > t_in {
                // arclength along a Klein chord is (1/2) log(t / (1 - t))
                let s = |t: f64| 0.5 * (t / (1.0 - t)).ln();
                chords.push((phi_r, phi_a));
                let l = s(t_out) - s(t_in);
                first.get_or_insert(l);
                travelled += l;
            }
            if travelled >= distance {
                return Some((chords, first.unwrap_or(0.0)));
            }
            let back = self.sides[exit].pull_back;
            conj = back * conj * back.inverse();
        }
        None
    }

    /// Least chord of the closed geodesic of an axial isometry, or `None`
    /// when the walk fails.
    pub fn cutting_sequence(&self, m: &IsometryMatrix) -> Option<CuttingSequence> {
        let length = m.translation_length().ok()?;
        let start = self.bring_in(&(self.frame * *m * self.frame.inverse()))?;
        // half a period forwards, and half a period back from the start of
        // the first chord
        let half = length / 2.0 + 1e-6;
        let (ahead, first_length) = self.walk(start, half)?;
        let (behind, _) = self.walk(start.inverse(), half + first_length)?;
        let first = ahead[0];
        let primitive = !ahead[1..]
            .iter()
            .any(|c| circular_gap(c.0, first.0) < MATCH_TOL && circular_gap(c.1, first.1) < MATCH_TOL);
        let key = ahead
            .iter()
            .copied()
            .chain(behind.iter().map(|&(r, a)| (a, r)))
            .map(|(r, a)| ChordKey { repelling: (r - SEAM).rem_euclid(TAU), attracting: (a - SEAM).rem_euclid(TAU) })
            .min_by(|x, y| (x.repelling, x.attracting).partial_cmp(&(y.repelling, y.attracting)).expect("finite angles"))?;
        Some(CuttingSequence { key, primitive })
    }
}

fn endpoint_angles(g: &IsometryMatrix) -> Option<(f64, f64)> {
    axis_endpoints(g).map(|(r, a)| (angle(r), angle(a)))
}
