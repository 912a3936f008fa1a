//! Integral homology of the one-vertex complexes, computed here with plain
//! integer Fox calculus and Smith normal form, against `twisted_betti`.

use ruelle_core::twisted_topology::{twisted_betti, LocalSystem, SurfaceKind, SurfacePresentation};

/// Invariant factors of an integer matrix.
fn smith(mut m: Vec<Vec<i64>>) -> Vec<i64> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pr, pc)) = (t..rows)
            .flat_map(|r| (t..cols).map(move |c| (r, c)))
            .filter(|&(r, c)| m[r][c] != 0)
            .min_by_key(|&(r, c)| m[r][c].abs())
        else {
            break;
        };
        m.swap(t, pr);
        for row in m.iter_mut() {
            row.swap(t, pc);
        }
        let mut clean = true;
        for r in t + 1..rows {
            let q = m[r][t] / m[t][t];
            for c in t..cols {
                m[r][c] -= q * m[t][c];
            }
            clean &= m[r][t] == 0;
        }
        for c in t + 1..cols {
            let q = m[t][c] / m[t][t];
            for r in t..rows {
                m[r][c] -= q * m[r][t];
            }
            clean &= m[t][c] == 0;
        }
        if !clean {
            continue;
        }
        // the pivot must divide the rest of the block
        if let Some(r) = (t + 1..rows).find(|&r| (t + 1..cols).any(|c| m[r][c] % m[t][t] != 0)) {
            for c in t..cols {
                m[t][c] += m[r][c];
            }
            continue;
        }
        out.push(m[t][t].abs());
        t += 1;
    }
    out
}

struct Homology {
    free: [usize; 3],
    torsion: [Vec<i64>; 3],
}

fn homology(s: &SurfacePresentation, signs: &[i8]) -> Homology {
    let n = s.generators();
    let omega = |w: &[(usize, bool)]| w.iter().map(|&(g, _)| i64::from(signs[g])).product::<i64>();
    // boundary of the 2-cell: Fox derivatives of the relator
    let r = s.relator();
    let mut d2 = vec![0i64; n];
    for (p, &(g, inverse)) in r.iter().enumerate() {
        let prefix = omega(&r[..p]);
        d2[g] += if inverse { -prefix * i64::from(signs[g]) } else { prefix };
    }
    let d1: Vec<i64> = signs.iter().map(|&w| i64::from(w) - 1).collect();
    let f1 = smith(vec![d1]);
    let f2 = smith(vec![d2]);
    let nontrivial = |f: &[i64]| f.iter().copied().filter(|&x| x > 1).collect::<Vec<_>>();
    Homology {
        free: [1 - f1.len(), n - f1.len() - f2.len(), 1 - f2.len()],
        torsion: [nontrivial(&f1), nontrivial(&f2), Vec::new()],
    }
}

fn kinds() -> Vec<SurfaceKind> {
    let mut v: Vec<SurfaceKind> = (0..=4).map(|genus| SurfaceKind::Orientable { genus }).collect();
    v.extend((1..=6).map(|genus| SurfaceKind::Nonorientable { genus }));
    v
}

fn all_characters(n: usize) -> impl Iterator<Item = Vec<i8>> {
    (0..1u32 << n).map(move |bits| (0..n).map(|g| if bits >> g & 1 == 1 { -1 } else { 1 }).collect())
}

#[test]
fn smith_form_examples() {
    assert_eq!(smith(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]), vec![2, 6, 12]);
    assert_eq!(smith(vec![vec![0, 0], vec![0, 0]]), Vec::<i64>::new());
    assert_eq!(smith(vec![vec![4, 6]]), vec![2]);
}

#[test]
fn rational_betti_numbers_match_the_integral_ranks() {
    for kind in kinds() {
        let s = SurfacePresentation::standard(kind).unwrap();
        for signs in all_characters(s.generators()) {
            let consistent = s.relator().iter().map(|&(g, _)| signs[g]).product::<i8>() == 1;
            let l = LocalSystem::from_signs(signs.clone()).unwrap();
            let got = twisted_betti(&s, &l);
            if !consistent {
                assert!(got.is_err(), "{kind} {signs:?}");
                continue;
            }
            let h = homology(&s, &signs);
            let b = got.unwrap().as_tuple();
            assert_eq!(b, (h.free[0] as i64, h.free[1] as i64, h.free[2] as i64), "{kind} {signs:?}");
        }
    }
}

#[test]
fn integral_homology_of_standard_surfaces() {
    for genus in 0..=4u32 {
        let s = SurfacePresentation::orientable(genus);
        let h = homology(&s, &vec![1; s.generators()]);
        assert_eq!(h.free, [1, 2 * genus as usize, 1]);
        assert!(h.torsion.iter().all(Vec::is_empty));
    }
    for genus in 1..=6u32 {
        let s = SurfacePresentation::nonorientable(genus).unwrap();
        let k = genus as usize;
        // untwisted: Z, Z^{k-1} + Z/2, 0
        let h = homology(&s, &vec![1; k]);
        assert_eq!(h.free, [1, k - 1, 0]);
        assert_eq!(h.torsion[1], vec![2]);
        // orientation twist: Z/2, Z^{k-1}, Z
        let w = s.orientation_character();
        let h = homology(&s, w.signs());
        assert_eq!(h.free, [0, k - 1, 1]);
        assert_eq!(h.torsion[0], vec![2]);
        assert!(h.torsion[1].is_empty());
    }
}
