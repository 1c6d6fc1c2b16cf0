//! Property tests for the numerical pipeline: equivariances of the
//! detector, covariances of the gait report, matcher optimality, and
//! parser round-trips.

mod common;

use common::analyze;
use gaitpipe_core::detect::{
    detect_steps, remove_false_extrema, smooth_uniform, DetectorParams, Extremum, ExtremumKind,
};
use gaitpipe_core::eval::{evaluate, match_events, ClipEval};
use gaitpipe_core::ingest::{
    parse_kinect_skeleton, parse_pose_jsonl, write_kinect_skeleton, write_pose_jsonl,
    KINECT20_JOINTS,
};
use gaitpipe_core::model::{Joint, JointKind, Point3, PoseSequence, SkeletonFrame};
use gaitpipe_core::synth::{generate, GaitScenario};
use proptest::prelude::*;

fn map_positions(seq: &PoseSequence, f: impl Fn(Point3) -> Point3) -> PoseSequence {
    let frames: Vec<SkeletonFrame> = seq
        .frames()
        .iter()
        .map(|fr| {
            let joints = fr
                .joints()
                .iter()
                .map(|j| Joint {
                    kind: j.kind.clone(),
                    position: f(j.position),
                    confidence: j.confidence,
                    interpolated: j.interpolated,
                })
                .collect();
            SkeletonFrame::new(fr.frame_index, fr.timestamp, joints).unwrap()
        })
        .collect();
    PoseSequence::new(frames, seq.frame_rate_hz(), seq.source_id.clone()).unwrap()
}

fn scenario_strategy() -> impl Strategy<Value = GaitScenario> {
    (0.15f64..0.6, 1.2f64..2.8, 4.0f64..7.0, any::<u64>()).prop_map(|(s, cad, dur, seed)| {
        let mut sc = GaitScenario::symmetric(s, cad, dur, seed);
        sc.stance_width_m = 0.08 * s;
        sc
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn scaling_coordinates_scales_the_audit_and_keeps_step_frames(
        sc in scenario_strategy(),
        c in 0.2f64..5.0,
    ) {
        let (seq, _) = generate(&sc).unwrap();
        let params = DetectorParams::default();
        let base = detect_steps(&seq, &params).unwrap();
        let scaled_seq = map_positions(&seq, |p| p.scale(c));
        let scaled = detect_steps(&scaled_seq, &params).unwrap();
        prop_assert_eq!(&base.step_frames, &scaled.step_frames);
        prop_assert!((scaled.range_r - c * base.range_r).abs() <= 1e-9 * base.range_r.abs() * c);
        prop_assert!(
            (scaled.threshold_theta - c * base.threshold_theta).abs()
                <= 1e-9 * base.threshold_theta.abs() * c
        );
        for (a, b) in base.extrema.iter().zip(&scaled.extrema) {
            prop_assert_eq!(a.frame, b.frame);
            prop_assert!((b.value - c * a.value).abs() <= 1e-9 * a.value.abs() * c);
        }
    }

    #[test]
    fn prepending_constant_frames_shifts_step_frames(
        sc in scenario_strategy(),
        k in 1usize..40,
    ) {
        let (seq, _) = generate(&sc).unwrap();
        let params = DetectorParams::default();
        let base = detect_steps(&seq, &params).unwrap();

        let fps = seq.frame_rate_hz();
        let first = &seq.frames()[0];
        let mut frames = Vec::with_capacity(seq.len() + k);
        for i in 0..k {
            let t = first.timestamp - (k - i) as f64 / fps;
            frames.push(
                SkeletonFrame::new(i as u64, t, first.joints().to_vec()).unwrap(),
            );
        }
        for (i, fr) in seq.frames().iter().enumerate() {
            frames.push(
                SkeletonFrame::new((k + i) as u64, fr.timestamp, fr.joints().to_vec()).unwrap(),
            );
        }
        let shifted_seq = PoseSequence::new(frames, fps, "shifted").unwrap();
        let shifted = detect_steps(&shifted_seq, &params).unwrap();
        let expect: Vec<usize> = base.step_frames.iter().map(|f| f + k).collect();
        prop_assert_eq!(expect, shifted.step_frames);
    }

    #[test]
    fn smoothing_is_linear(
        f in prop::collection::vec(-1e3f64..1e3, 7..200),
        g_seed in any::<u64>(),
        a in -10.0f64..10.0,
        b in -10.0f64..10.0,
        width in prop::sample::select(vec![1usize, 3, 5, 7]),
    ) {
        // derive g from f's length with a cheap seeded hash
        let g: Vec<f64> = (0..f.len())
            .map(|i| {
                let x = (g_seed ^ (i as u64).wrapping_mul(0x9e3779b97f4a7c15)) >> 11;
                (x as f64 / (1u64 << 53) as f64) * 2e3 - 1e3
            })
            .collect();
        let combined: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let lhs = smooth_uniform(&combined, width).unwrap();
        let sf = smooth_uniform(&f, width).unwrap();
        let sg = smooth_uniform(&g, width).unwrap();
        let scale = (a.abs() + b.abs()) * 1e3 + 1.0;
        for ((l, x), y) in lhs.iter().zip(&sf).zip(&sg) {
            prop_assert!((l - (a * x + b * y)).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn rigid_motion_leaves_the_report_unchanged(
        sc in scenario_strategy(),
        angle in 0.0f64..std::f64::consts::TAU,
        tx in -50.0f64..50.0,
        ty in -50.0f64..50.0,
    ) {
        let (seq, _) = generate(&sc).unwrap();
        let params = DetectorParams::default();
        let (_, base) = analyze(&seq, &params);
        let (s, c) = angle.sin_cos();
        let moved_seq = map_positions(&seq, |p| {
            Point3::new(p.x * c - p.y * s + tx, p.x * s + p.y * c + ty, p.z)
        });
        let (_, moved) = analyze(&moved_seq, &params);
        let close = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => (a - b).abs() <= 1e-9 * (1.0 + a.abs()),
            (None, None) => true,
            _ => false,
        };
        prop_assert_eq!(base.n_steps, moved.n_steps);
        prop_assert!(close(base.speed_mps, moved.speed_mps));
        prop_assert!(close(base.stride_left_m, moved.stride_left_m));
        prop_assert!(close(base.stride_right_m, moved.stride_right_m));
        prop_assert!(close(base.step_length_m, moved.step_length_m));
        prop_assert!(close(base.step_width_m, moved.step_width_m));
        prop_assert!(close(base.swing_time_s, moved.swing_time_s));
        prop_assert!(close(base.asymmetry_index, moved.asymmetry_index));
    }

    #[test]
    fn doubling_timestamps_halves_speed_and_doubles_swing(sc in scenario_strategy()) {
        let (seq, _) = generate(&sc).unwrap();
        let params = DetectorParams::default();
        let (_, base) = analyze(&seq, &params);

        let frames: Vec<SkeletonFrame> = seq
            .frames()
            .iter()
            .map(|f| {
                SkeletonFrame::new(f.frame_index, 2.0 * f.timestamp, f.joints().to_vec()).unwrap()
            })
            .collect();
        let slow_seq =
            PoseSequence::new(frames, seq.frame_rate_hz() / 2.0, seq.source_id.clone()).unwrap();
        let (_, slow) = analyze(&slow_seq, &params);

        prop_assert_eq!(slow.speed_mps.unwrap(), base.speed_mps.unwrap() / 2.0);
        prop_assert_eq!(slow.swing_time_s.unwrap(), base.swing_time_s.unwrap() * 2.0);
        prop_assert_eq!(slow.stride_left_m, base.stride_left_m);
        prop_assert_eq!(slow.stride_right_m, base.stride_right_m);
        prop_assert_eq!(slow.step_length_m, base.step_length_m);
        prop_assert_eq!(slow.step_width_m, base.step_width_m);
    }

    #[test]
    fn detection_is_deterministic_byte_for_byte(sc in scenario_strategy()) {
        let params = DetectorParams::default();
        let (seq_a, _) = generate(&sc).unwrap();
        let (seq_b, _) = generate(&sc).unwrap();
        let a = detect_steps(&seq_a, &params).unwrap();
        let b = detect_steps(&seq_b, &params).unwrap();
        prop_assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
    }
}

fn alternating_extrema() -> impl Strategy<Value = Vec<Extremum>> {
    (any::<bool>(), prop::collection::vec(0.0f64..10.0, 1..20)).prop_map(|(start_max, values)| {
        values
            .into_iter()
            .enumerate()
            .map(|(i, value)| Extremum {
                frame: i * 5,
                value,
                kind: if (i % 2 == 0) == start_max {
                    ExtremumKind::Max
                } else {
                    ExtremumKind::Min
                },
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn false_pair_removal_keeps_alternation_and_clears_theta(
        extrema in alternating_extrema(),
        alpha in 0.05f64..0.95,
    ) {
        let out = remove_false_extrema(extrema, alpha);
        prop_assert_eq!(out.threshold_theta, alpha * out.range_r);
        for w in out.kept.windows(2) {
            prop_assert_ne!(w[0].kind, w[1].kind);
            prop_assert!((w[1].value - w[0].value).abs() >= out.threshold_theta);
        }
    }

    #[test]
    fn matcher_total_cost_is_the_brute_force_minimum(
        mut predicted in prop::collection::vec(0usize..200, 0..=8),
        mut truth in prop::collection::vec(0usize..200, 0..=8),
    ) {
        predicted.sort_unstable();
        truth.sort_unstable();
        let pairs = match_events(&predicted, &truth);
        let cost: f64 = pairs.iter().map(|&(p, t)| (p as f64 - t as f64).abs()).sum();
        prop_assert_eq!(cost, brute_force_min(&predicted, &truth));
        prop_assert_eq!(pairs.len(), predicted.len().min(truth.len()));
        // pairs stay monotone in both coordinates
        for w in pairs.windows(2) {
            prop_assert!(w[0].0 <= w[1].0 && w[0].1 <= w[1].1);
        }
    }

    #[test]
    fn evaluation_is_permutation_invariant(
        clips in prop::collection::vec(
            (prop::collection::vec(0usize..300, 0..6), prop::collection::vec(0usize..300, 0..6)),
            1..8,
        ),
        seed in any::<u64>(),
    ) {
        let clips: Vec<ClipEval> = clips
            .into_iter()
            .enumerate()
            .map(|(i, (mut p, mut t))| {
                p.sort_unstable();
                t.sort_unstable();
                ClipEval { id: format!("c{i}"), predicted: p, truth: t, frame_rate_hz: 30.0 }
            })
            .collect();
        let base = evaluate(&clips).unwrap();
        let mut shuffled = clips.clone();
        // Fisher-Yates with a splitmix-style stream
        let mut state = seed.wrapping_add(0x9e3779b97f4a7c15);
        for i in (1..shuffled.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            shuffled.swap(i, (state as usize) % (i + 1));
        }
        let other = evaluate(&shuffled).unwrap();
        prop_assert_eq!(base.count_accuracy, other.count_accuracy);
        prop_assert_eq!(base.mean_frame_error, other.mean_frame_error);
        prop_assert_eq!(base.mean_time_error_s, other.mean_time_error_s);
    }
}

fn brute_force_min(predicted: &[usize], truth: &[usize]) -> f64 {
    fn go(short: &[usize], long: &[usize]) -> f64 {
        if short.is_empty() {
            return 0.0;
        }
        if short.len() > long.len() {
            return f64::INFINITY;
        }
        let take = (short[0] as f64 - long[0] as f64).abs() + go(&short[1..], &long[1..]);
        let skip = go(short, &long[1..]);
        take.min(skip)
    }
    if predicted.len() <= truth.len() {
        go(predicted, truth)
    } else {
        go(truth, predicted)
    }
}

fn coordinate() -> impl Strategy<Value = f64> {
    prop_oneof![
        -10.0f64..10.0,
        (-1e4f64..1e4).prop_map(|v| v / 3.0),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kinect_round_trip_is_identity(
        rows in prop::collection::vec(prop::collection::vec(coordinate(), 60), 1..12),
        start in 0u64..1000,
        stride in 1u64..5,
    ) {
        let mut frames = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            let idx = start + i as u64 * stride;
            let joints: Vec<Joint> = KINECT20_JOINTS
                .iter()
                .enumerate()
                .map(|(j, kind)| {
                    Joint::new(
                        kind.clone(),
                        Point3::new(row[j * 3], row[j * 3 + 1], row[j * 3 + 2]),
                    )
                })
                .collect();
            frames.push(SkeletonFrame::new(idx, idx as f64 / 30.0, joints).unwrap());
        }
        let seq = PoseSequence::new(frames, 30.0, "prop").unwrap();
        let mut buf = Vec::new();
        write_kinect_skeleton(&seq, &mut buf).unwrap();
        let parsed = parse_kinect_skeleton(buf.as_slice(), 30.0, "prop").unwrap();
        prop_assert_eq!(seq, parsed);

        // a second write is byte-identical
        let mut buf2 = Vec::new();
        let reparsed = parse_kinect_skeleton(buf.as_slice(), 30.0, "prop").unwrap();
        write_kinect_skeleton(&reparsed, &mut buf2).unwrap();
        prop_assert_eq!(buf, buf2);
    }

    #[test]
    fn jsonl_round_trip_is_identity(
        joints_per_frame in prop::collection::vec(
            prop::collection::vec(
                (prop::sample::select(vec!["left_foot", "right_foot", "left_ankle", "head", "nose_tip"]),
                 coordinate(), coordinate(), coordinate(), 0.0f64..=1.0),
                1..5,
            ),
            1..10,
        ),
    ) {
        let mut frames = Vec::new();
        for (i, spec) in joints_per_frame.iter().enumerate() {
            let mut joints: Vec<Joint> = Vec::new();
            for (name, x, y, z, conf) in spec {
                let kind = JointKind::from_name(name);
                if joints.iter().any(|j| j.kind == kind) {
                    continue;
                }
                joints.push(Joint::with_confidence(kind, Point3::new(*x, *y, *z), *conf));
            }
            frames.push(SkeletonFrame::new(i as u64, i as f64 / 30.0, joints).unwrap());
        }
        let seq = PoseSequence::new(frames, 30.0, "track-a").unwrap();
        let mut buf = Vec::new();
        write_pose_jsonl(&seq, &mut buf).unwrap();
        let parsed = parse_pose_jsonl(buf.as_slice(), 30.0).unwrap();
        prop_assert_eq!(parsed.len(), 1);
        prop_assert_eq!(&seq, &parsed[0]);

        let mut buf2 = Vec::new();
        write_pose_jsonl(&parsed[0], &mut buf2).unwrap();
        prop_assert_eq!(buf, buf2);
    }
}
