//! Detector parameter sensitivity sweep: count accuracy and mean frame
//! error across kernel widths and threshold fractions, on the seeded
//! synthetic grid at two noise levels.
//!
//! Run with: cargo run -p gaitpipe-bench --example sweep --release

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gaitpipe_core::detect::{detect_steps, DetectorParams};
use gaitpipe_core::match_events;
use gaitpipe_core::synth::{generate, GaitScenario};

fn grid(noise: f64) -> Vec<GaitScenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..50u64)
        .map(|i| {
            let cadence = 0.8 + 2.2 * rng.random::<f64>();
            let step = 0.05 + 0.75 * rng.random::<f64>();
            let duration = 3.0 + 12.0 * rng.random::<f64>();
            let mut sc = GaitScenario::symmetric(step, cadence, duration, 1000 + i);
            sc.stance_width_m = 0.08 * step;
            sc.noise_sigma_m = noise;
            sc
        })
        .collect()
}

fn main() {
    println!("noise_sigma_m,kernel_width,alpha,count_accuracy,mean_frame_error");
    for noise in [0.0, 0.01] {
        let scenarios = grid(noise);
        let clips: Vec<_> = scenarios.iter().map(|sc| generate(sc).unwrap()).collect();
        for kernel_width in [1usize, 3, 5, 7, 9, 11] {
            for alpha in [0.05f64, 0.1, 0.2, 0.3, 0.4] {
                let params = DetectorParams { kernel_width, alpha, ..DetectorParams::default() };
                let mut exact = 0usize;
                let mut err_sum = 0.0;
                let mut n_matched = 0usize;
                for (seq, truth) in &clips {
                    let Ok(result) = detect_steps(seq, &params) else { continue };
                    if result.step_frames.len() == truth.step_frames.len() {
                        exact += 1;
                    }
                    for (p, t) in match_events(&result.step_frames, &truth.step_frames) {
                        err_sum += (p as f64 - t as f64).abs();
                        n_matched += 1;
                    }
                }
                let accuracy = exact as f64 / clips.len() as f64;
                let mean_err = if n_matched > 0 { err_sum / n_matched as f64 } else { f64::NAN };
                println!("{noise},{kernel_width},{alpha},{accuracy:.3},{mean_err:.3}");
            }
        }
    }
}
