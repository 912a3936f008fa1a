//! Structural properties of the census: inverse pairs, one representative
//! per class, and thread-count independence.

use ruelle_core::cli_reports::orbits_csv;
use ruelle_core::orbit_enum::words::rotate;
use ruelle_core::orbit_enum::{census, Census, ClosedOrbit, GroupModel};

fn cases() -> Vec<(GroupModel, Census)> {
    [("bolza", 6.5), ("schottky-orientable", 8.0), ("schottky-nonorientable", 8.0)]
        .iter()
        .map(|&(name, t)| {
            let m = GroupModel::builtin(name).unwrap();
            let c = census(&m, t).unwrap();
            (m, c)
        })
        .collect()
}

fn same_class(model: &GroupModel, a: &ClosedOrbit, b_holonomy: &ruelle_core::hyp_geom::IsometryMatrix) -> bool {
    match model.domain() {
        Some(d) => {
            let ka = d.cutting_sequence(&a.primitive_holonomy()).unwrap().key;
            let kb = d.cutting_sequence(b_holonomy).unwrap().key;
            ka.distance(&kb) < 1e-7
        }
        None => false,
    }
}

#[test]
fn every_orbit_has_its_inverse() {
    for (model, c) in cases() {
        for o in c.orbits.iter().filter(|o| o.m() == 1) {
            let inv = o.word().inverse();
            let h_inv = o.primitive_holonomy().inverse();
            let partner = c.orbits.iter().filter(|p| p.m() == 1).find(|p| {
                p.word() == &inv || same_class(&model, p, &h_inv)
            });
            let p = partner.unwrap_or_else(|| {
                panic!("{}: no inverse for {}", model.name(), o.word().render(model.generator_names()))
            });
            assert!((p.t_sharp() - o.t_sharp()).abs() <= 1e-12 * o.t_sharp());
            assert_eq!(p.epsilon(), o.epsilon());
            assert!((p.trace().abs() - o.trace().abs()).abs() <= 1e-9 * o.trace().abs());
        }
    }
}

#[test]
fn one_representative_per_class() {
    for (model, c) in cases() {
        let prims: Vec<&ClosedOrbit> = c.orbits.iter().filter(|o| o.m() == 1).collect();
        for (i, a) in prims.iter().enumerate() {
            let w = a.word().letters();
            for b in &prims[i + 1..] {
                let v = b.word().letters();
                let rotated = w.len() == v.len() && (0..w.len()).any(|s| rotate(w, s) == v);
                assert!(!rotated, "{}: two rotations of one word", model.name());
                if (a.t() - b.t()).abs() < 1e-9 {
                    assert!(!same_class(&model, a, &b.primitive_holonomy()), "{}: duplicate class", model.name());
                }
            }
        }
    }
}

#[test]
fn output_does_not_depend_on_thread_count() {
    for name in ["bolza", "schottky-nonorientable"] {
        let model = GroupModel::builtin(name).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| orbits_csv(&model, &census(&model, 6.0).unwrap()))
        };
        let one = run(1);
        assert_eq!(one, run(4));
        assert_eq!(one, run(1));
    }
}

#[test]
fn class_key_is_the_same_for_every_rotation() {
    let model = GroupModel::builtin("bolza").unwrap();
    let d = model.domain().unwrap();
    for o in census(&model, 6.5).unwrap().orbits.iter().filter(|o| o.m() == 1) {
        let w: Vec<char> = o.word().render(model.generator_names()).chars().collect();
        let key = |s: &[char]| {
            let s: String = s.iter().collect();
            d.cutting_sequence(&model.word_matrix(&model.parse(&s).unwrap())).unwrap().key
        };
        let k0 = key(&w);
        for s in 1..w.len() {
            let k = key(&[&w[s..], &w[..s]].concat());
            assert!(k.distance(&k0) < 1e-7, "{}: rotation {s} moves the key", w.iter().collect::<String>());
        }
    }
}
