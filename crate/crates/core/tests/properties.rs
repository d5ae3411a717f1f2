//! Invariants checked over generated inputs.

use fwmips::aipe::envelope_holds;
use fwmips::counters::Counters;
use fwmips::fw::{step_size, HullPoint};
use fwmips::geometry::{PointSet, TransformPair};
use fwmips::linalg::{argmax, dot, norm, sub};
use fwmips::lsh::HashTables;
use fwmips::lsh_jl::quantize_query;
use fwmips::pointset_io::{decode, encode};
use fwmips::rng::StreamRng;
use proptest::prelude::*;

fn vec_of(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, d)
}

fn rows(n: usize, d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(vec_of(d), 1..=n)
}

proptest! {
    #[test]
    fn lifted_inner_product_is_the_scaled_linear_gain(
        a in vec_of(6), g in vec_of(6), b in vec_of(6),
    ) {
        prop_assume!(norm(&g) > 1e-6);
        let pair = TransformPair::new((1.0 + norm(&a)) * norm(&g), (1.0 + dot(&b, &b)).sqrt()).unwrap();
        let q = pair.query(&g, &a).unwrap();
        let y = pair.data(&b).unwrap();
        prop_assert!((norm(&q) - 1.0).abs() < 1e-12);
        prop_assert!((norm(&y) - 1.0).abs() < 1e-12);
        let want = -dot(&sub(&b, &a), &g);
        prop_assert!((dot(&q, &y) * pair.scale() - want).abs() <= 1e-9 * (1.0 + want.abs()));
    }

    #[test]
    fn argmax_takes_the_first_maximum(xs in prop::collection::vec(-3i32..3, 1..40)) {
        let vals: Vec<f64> = xs.iter().map(|&x| x as f64).collect();
        let (i, v) = argmax(vals.iter().copied()).unwrap();
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(v, max);
        prop_assert_eq!(i, vals.iter().position(|&x| x == max).unwrap());
    }

    #[test]
    fn steps_keep_the_iterate_in_the_hull(
        pts in rows(12, 3),
        picks in prop::collection::vec(0usize..12, 1..60),
        c in 0.3f64..=1.0,
    ) {
        let set = PointSet::from_rows(&pts).unwrap();
        let mut w = HullPoint::centroid(&set);
        for (t, &i) in picks.iter().enumerate() {
            let eta = step_size(c, t).unwrap().min(1.0);
            w.step_toward(&set, i % set.len(), eta);
        }
        prop_assert!(w.verify(&set).is_ok());
    }

    #[test]
    fn point_files_decode_to_what_was_encoded(pts in rows(20, 4)) {
        let set = PointSet::from_rows(&pts).unwrap();
        let back = decode(&encode(&set), std::path::Path::new("mem")).unwrap();
        prop_assert_eq!(back, set);
    }

    #[test]
    fn quantization_moves_each_coordinate_by_at_most_half_a_step(
        q in prop::collection::vec(-1.0f64..1.0, 1..64), lambda in 1e-3f64..0.5,
    ) {
        let step = lambda / (q.len() as f64).sqrt();
        let r = quantize_query(&q, lambda);
        for (a, b) in q.iter().zip(&r) {
            prop_assert!((a - b).abs() <= 0.5 * step + 1e-12);
        }
        prop_assert_eq!(quantize_query(&r, lambda), r);
    }

    #[test]
    fn envelope_contains_the_exact_value(ip in -1.0f64..=1.0, eps in 0.0f64..0.1) {
        // The lower edge `(1+ε)x - ε` never exceeds `x`, the upper edge never falls below it.
        prop_assert!(envelope_holds(ip, ip, eps));
    }

    #[test]
    fn uniforms_lie_in_the_unit_interval(seed in any::<u64>(), stream in any::<u64>()) {
        let mut rng = StreamRng::new(seed, stream);
        for _ in 0..64 {
            let u = rng.uniform();
            prop_assert!((0.0..1.0).contains(&u));
        }
        let picks = rng.sample_distinct(50, 20);
        let mut sorted = picks.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), 20);
        prop_assert!(picks.iter().all(|&i| i < 50));
    }

    #[test]
    fn scans_only_accept_what_the_predicate_accepts(seed in any::<u64>(), threshold in -0.5f64..0.9) {
        let mut rng = StreamRng::new(seed, 0);
        let d = 8;
        let flat: Vec<f64> = (0..100).flat_map(|_| fwmips::instances::unit_vector(&mut rng, d)).collect();
        let q = fwmips::instances::unit_vector(&mut rng, d);
        let tables = HashTables::build(&flat, d, 4, 6, seed);
        let mut seen = vec![false; 100];
        let mut counters = Counters::default();
        let hit = tables.scan(&q, 1000, &mut seen, &mut counters, |i| dot(&q, &flat[i * d..(i + 1) * d]) >= threshold);
        if let Some(i) = hit {
            prop_assert!(dot(&q, &flat[i * d..(i + 1) * d]) >= threshold);
        }
        prop_assert!(counters.candidates_verified as usize <= 100);
    }
}
