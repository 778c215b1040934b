use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sldisk::complex::{
    convexity, find_key_or_twinkey, generate_disk, natural_edges, roof, verify_finding, Convexity, DiskShape,
};
use sldisk::corpus::{convexify_vertical, random_projective};
use sldisk::exact::{int, orientation, rat, sign, signed_vol, Point, ProjectiveMap, Rational};
use sldisk::extension::{extend, is_embedding, is_vertical, vertical_extend};
use sldisk::io::{disk_from_json, disk_to_json, from_json, to_json};
use sldisk::polytope::{build_system, sample_embeddings, Axis, HPolytope, RadialChart, VolumeSystem};
use sldisk::reduction::{check_reduced, collapse_height, plateau_collapse, reduce};
use sldisk::{SLDisk, SLMap};

fn small_rat() -> impl Strategy<Value = Rational> {
    (-24i64..=24, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn point() -> impl Strategy<Value = Point> {
    (small_rat(), small_rat()).prop_map(|(x, y)| Point::new(x, y))
}

fn shape() -> impl Strategy<Value = DiskShape> {
    prop_oneof![
        Just(DiskShape::StrictlyConvex),
        Just(DiskShape::Convex),
        Just(DiskShape::TrV)
    ]
}

/// `(disk, n_interior, n_boundary)`.
fn disk_of(shape: impl Strategy<Value = DiskShape>) -> impl Strategy<Value = (SLDisk, usize, usize)> {
    (any::<u64>(), 0usize..=5, 3usize..=8, shape).prop_map(|(seed, ni, nb, s)| {
        let ni = if nb == 3 && s != DiskShape::TrV { ni.max(1) } else { ni };
        (generate_disk(seed, ni, nb, s).expect("generator succeeds"), ni, nb)
    })
}

fn convex_disk() -> impl Strategy<Value = SLDisk> {
    disk_of(prop_oneof![Just(DiskShape::StrictlyConvex), Just(DiskShape::Convex)]).prop_map(|t| t.0)
}

fn trv_disk() -> impl Strategy<Value = SLDisk> {
    disk_of(shape())
        .prop_map(|t| t.0)
        .prop_filter("transverse to the verticals", |d| roof(d).is_ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn signed_vol_is_alternating(p in point(), q in point(), r in point()) {
        let v = signed_vol(&p, &q, &r);
        prop_assert_eq!(signed_vol(&q, &p, &r), -v.clone());
        prop_assert_eq!(signed_vol(&p, &r, &q), -v.clone());
        prop_assert_eq!(signed_vol(&r, &q, &p), -v.clone());
        prop_assert_eq!(signed_vol(&q, &r, &p), v);
    }

    #[test]
    fn orientation_is_the_sign_of_the_volume(p in point(), q in point(), r in point()) {
        prop_assert_eq!(orientation(&p, &q, &r), sign(&signed_vol(&p, &q, &r)));
    }

    #[test]
    fn signed_vol_scales_by_the_determinant(
        a in small_rat(), b in small_rat(), c in small_rat(), d in small_rat(), t in point(),
        p in point(), q in point(), r in point(),
    ) {
        let det = &a * &d - &b * &c;
        prop_assume!(!det.is_zero());
        let g = ProjectiveMap::affine(a, b, c, d, t).unwrap();
        let (gp, gq, gr) = (g.apply(&p).unwrap(), g.apply(&q).unwrap(), g.apply(&r).unwrap());
        prop_assert_eq!(signed_vol(&gp, &gq, &gr), det * signed_vol(&p, &q, &r));
    }

    #[test]
    fn projective_inverse_round_trips(
        m in proptest::collection::vec(small_rat(), 9), p in point(),
    ) {
        let rows = [
            [m[0].clone(), m[1].clone(), m[2].clone()],
            [m[3].clone(), m[4].clone(), m[5].clone()],
            [m[6].clone(), m[7].clone(), m[8].clone()],
        ];
        let Ok(g) = ProjectiveMap::new(rows) else { return Ok(()) };
        if let Ok(q) = g.apply(&p) {
            prop_assert_eq!(g.inverse().apply(&q), Ok(p));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_disks_are_valid((d, ni, nb) in disk_of(shape())) {
        prop_assert!(d.validate().is_valid(), "{}", d.validate());
        prop_assert_eq!(d.boundary_circle().len(), nb);
        prop_assert_eq!(d.interior_vertices().len(), ni);
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>(), s in shape()) {
        prop_assert_eq!(generate_disk(seed, 3, 6, s), generate_disk(seed, 3, 6, s));
    }

    #[test]
    fn disk_and_map_json_round_trip((d, _, _) in disk_of(shape()), seed in any::<u64>()) {
        prop_assert_eq!(&disk_from_json(&disk_to_json(&d)).unwrap(), &d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m: SLMap = d
            .used_vertices()
            .into_iter()
            .map(|v| (v, Point::new(d.point(v).x.clone() / int(3), rat(rand::Rng::gen_range(&mut rng, -50..50), 7))))
            .collect();
        prop_assert_eq!(from_json::<SLMap>(&to_json(&m)).unwrap(), m);
    }

    #[test]
    fn roof_is_a_path_over_the_full_width(d in trv_disk()) {
        let r = roof(&d).unwrap();
        for (a, b) in r.edges() {
            prop_assert!(d.is_boundary_edge(sldisk::complex::edge(a, b)));
        }
        let xs: Vec<&Rational> = d.used_vertices().into_iter().map(|v| &d.point(v).x).collect();
        let (lo, hi) = (*xs.iter().min().unwrap(), *xs.iter().max().unwrap());
        let ends: Vec<&Rational> = [r.vertices[0], *r.vertices.last().unwrap()].iter().map(|&v| &d.point(v).x).collect();
        prop_assert!((ends[0] == lo && ends[1] == hi) || (ends[0] == hi && ends[1] == lo));
    }

    #[test]
    fn simple_trv_disks_have_a_key(d in trv_disk()) {
        prop_assume!(d.is_simple() && d.triangles().len() > 1);
        let k = find_key_or_twinkey(&d).unwrap();
        prop_assert!(verify_finding(&d, &k));
        prop_assert!(d.triangles().len() >= 3);
    }

    #[test]
    fn split_partitions_triangles((d, _, _) in disk_of(shape())) {
        for e in d.spanning_simplices() {
            let (a, b) = d.split_at(e).unwrap();
            let mut all: Vec<_> = a.triangles().iter().chain(b.triangles()).copied().collect();
            let mut parent = d.triangles().to_vec();
            all.sort();
            parent.sort();
            prop_assert_eq!(all, parent);
            prop_assert!(a.validate().is_valid() && b.validate().is_valid());
        }
    }

    #[test]
    fn reduction_is_projective_and_reduced(d in convex_disk()) {
        let class = convexity(&d.boundary_circle());
        for mu in 0..natural_edges(&d.boundary_circle()).len() {
            let r = reduce(&d, mu).unwrap();
            for v in d.used_vertices() {
                prop_assert_eq!(&r.map.apply(d.point(v)).unwrap(), r.disk.point(v));
                prop_assert!(!r.map.weight(d.point(v)).is_zero());
            }
            let c = r.disk.boundary_circle();
            prop_assert_eq!(convexity(&c), class);
            prop_assert_eq!(check_reduced(&c.points, &natural_edges(&c)[mu]), Ok(()));
        }
    }

    #[test]
    fn plateau_collapse_is_vertical_and_strictly_convex(d in convex_disk(), k in 1i64..=8) {
        prop_assume!(convexity(&d.boundary_circle()) == Convexity::Convex);
        let c = d.boundary_circle();
        let Some(mu) = natural_edges(&c).iter().position(|r| r.len() > 2) else { return Ok(()) };
        let r = reduce(&d, mu).unwrap();
        let rc = r.disk.boundary_circle();
        let h = rat(1, k);
        let m = plateau_collapse(&rc, &h).unwrap();
        prop_assert!(is_vertical(&r.disk, &m));
        let mut base: Vec<Point> = rc
            .vertices
            .iter()
            .map(|&v| m.at(v).clone())
            .filter(|p| p.y <= Rational::zero() && p.x >= Rational::zero() && p.x <= Rational::one())
            .filter(|p| p.y.is_negative() || p.x.is_zero() || p.x.is_one())
            .collect();
        base.sort_by(|a, b| a.x.cmp(&b.x));
        prop_assert!(base.len() >= 3);
        for w in base.windows(3) {
            prop_assert!(orientation(&w[0], &w[1], &w[2]) > 0);
            prop_assert_eq!(&w[1].y, &collapse_height(&w[1].x, &h));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extend_yields_embeddings_with_the_given_boundary(d in convex_disk(), seed in any::<u64>()) {
        let g = random_projective(&d, &mut ChaCha8Rng::seed_from_u64(seed));
        let f = SLMap::boundary_identity(&d).map_points(|p| g.apply(p)).unwrap();
        let m = extend(&d, &f).unwrap();
        prop_assert!(is_embedding(&d, &m));
        prop_assert_eq!(m.restrict_to_boundary(&d), f);
    }

    #[test]
    fn vertical_extend_yields_vertical_embeddings(d in trv_disk()) {
        let v = convexify_vertical(&d);
        let m = vertical_extend(&d, &v).unwrap();
        prop_assert!(is_vertical(&d, &m));
        prop_assert!(is_embedding(&d, &m));
        prop_assert_eq!(m.restrict_to_boundary(&d), v);
        for t in 0..d.triangles().len() {
            prop_assert!(m.volume(&d, t).is_positive());
        }
    }

    #[test]
    fn vertical_maps_embed_iff_volumes_are_positive(
        d in trv_disk(),
        ys in proptest::collection::vec(-12i64..=12, 16),
    ) {
        let mut m = SLMap::identity(&d);
        for (i, v) in d.interior_vertices().into_iter().enumerate() {
            let p = d.point(v);
            m.insert(v, Point::new(p.x.clone(), &p.y + rat(ys[i % ys.len()], 8)));
        }
        let positive = (0..d.triangles().len()).all(|t| m.volume(&d, t).is_positive());
        prop_assert_eq!(positive, is_embedding(&d, &m));
    }

    #[test]
    fn volume_forms_at_the_identity_are_triangle_volumes((d, _, _) in disk_of(shape())) {
        let free: Vec<_> = d.interior_vertices().into_iter().map(|v| (v, Axis::Y)).collect();
        let vs = VolumeSystem::new(d.clone(), free, SLMap::identity(&d));
        let p = build_system(&vs).unwrap();
        let y = vs.coordinates_of(&SLMap::identity(&d));
        for (t, form) in p.forms().iter().enumerate() {
            prop_assert_eq!(form.eval(&y), d.volume(t));
            prop_assert!(form.eval(&y).is_positive());
        }
    }

    #[test]
    fn samples_are_embeddings_and_reproducible(d in convex_disk(), seed in any::<u64>()) {
        let f = SLMap::boundary_identity(&d);
        let a = sample_embeddings(&d, &f, 6, seed).unwrap();
        prop_assert_eq!(&a, &sample_embeddings(&d, &f, 6, seed).unwrap());
        for m in &a {
            prop_assert!(is_embedding(&d, m));
        }
    }
}

fn box_polytope() -> impl Strategy<Value = HPolytope> {
    (
        proptest::collection::vec((1i64..=6, 1i64..=6), 1..=3),
        proptest::collection::vec((-3i64..=3, -3i64..=3, 1i64..=6), 0..=3),
    )
        .prop_map(|(bounds, cuts)| {
            let n = bounds.len();
            let lo: Vec<Rational> = bounds.iter().map(|&(a, _)| rat(-a, 2)).collect();
            let hi: Vec<Rational> = bounds.iter().map(|&(_, b)| rat(b, 2)).collect();
            let mut p = HPolytope::cube(&lo, &hi);
            for (a, b, c) in cuts {
                // -a y_0 - b y_last + c >= 0 keeps the origin inside.
                let mut coeffs = vec![Rational::zero(); n];
                coeffs[0] -= int(a);
                coeffs[n - 1] -= int(b);
                p.push(sldisk::polytope::AffineForm::new(coeffs, int(c)));
            }
            p
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn centroid_is_strictly_interior(p in box_polytope()) {
        let c = p.centroid().unwrap();
        prop_assert!(p.strictly_contains(&c));
    }

    #[test]
    fn radial_chart_round_trips(
        p in box_polytope(),
        dir in proptest::collection::vec(-5i64..=5, 3),
        t in 0i64..=8,
    ) {
        let chart = RadialChart::centered(p.clone()).unwrap();
        let n = p.dim();
        let alpha: Vec<Rational> = dir[..n].iter().map(|&v| int(v)).collect();
        prop_assume!(alpha.iter().any(|a| !a.is_zero()));
        let t = rat(t, 8);
        let y = chart.forward(&alpha, &t).unwrap();
        prop_assert!(p.contains(&y));
        if t < Rational::one() {
            prop_assert!(p.strictly_contains(&y));
        }
        let (back, s) = chart.inverse(&y).unwrap();
        prop_assert_eq!(&s, &t);
        if !t.is_zero() {
            let back = back.unwrap();
            // Same ray: a positive multiple of the input direction.
            let k = alpha.iter().zip(&back).find(|(a, _)| !a.is_zero()).map(|(a, b)| b / a).unwrap();
            prop_assert!(k.is_positive());
            for (a, b) in alpha.iter().zip(&back) {
                prop_assert_eq!(a * &k, b.clone());
            }
        }
    }

    #[test]
    fn radial_boundary_is_continuous_across_a_corner(a in 1i64..=6, b in 1i64..=6) {
        // Directions bracketing the corner (a, b) of a centred box switch the
        // active constraint there; both sides converge to the corner.
        let half = |v: i64| rat(v, 1);
        let p = HPolytope::cube(&[-half(a), -half(b)], &[half(a), half(b)]);
        let chart = RadialChart::new(p, vec![int(0), int(0)]).unwrap();
        let corner = chart.forward(&[int(a), int(b)], &int(1)).unwrap();
        prop_assert_eq!(&corner, &vec![int(a), int(b)]);
        for side in [-1i64, 1] {
            let mut last: Option<Rational> = None;
            for k in 1..=6i64 {
                let dir = [int(a), int(b) + rat(side, k * k)];
                let q = chart.forward(&dir, &int(1)).unwrap();
                let dist = (&q[0] - &corner[0]) * (&q[0] - &corner[0]) + (&q[1] - &corner[1]) * (&q[1] - &corner[1]);
                if let Some(prev) = &last {
                    prop_assert!(dist < *prev);
                }
                last = Some(dist);
            }
        }
    }
}
