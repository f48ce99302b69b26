//! Speech-like test material: syllable-length bursts of noise shaped by two
//! moving resonances, separated by short pauses.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stft_dereverb::SignalF64;

use crate::error::{io_err, AppError, AppResult};
use crate::wav::read_wav;

fn resonate(x: &[f64], freq: f64, fs: f64, radius: f64) -> Vec<f64> {
    let c = 2.0 * radius * (2.0 * std::f64::consts::PI * freq / fs).cos();
    let r2 = radius * radius;
    let (mut y1, mut y2) = (0.0, 0.0);
    x.iter()
        .map(|&v| {
            let y = v + c * y1 - r2 * y2;
            y2 = y1;
            y1 = y;
            y
        })
        .collect()
}

/// One utterance of `len` samples; same seed, same samples.
pub fn synthetic_utterance(len: usize, sample_rate: u32, seed: u64) -> SignalF64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fs = sample_rate as f64;
    let mut out = vec![0.0; len];
    let mut pos = rng.gen_range(0..(0.05 * fs) as usize + 1);
    while pos < len {
        let syllable = (rng.gen_range(0.12..0.3) * fs) as usize;
        let pause = (rng.gen_range(0.04..0.2) * fs) as usize;
        let end = (pos + syllable).min(len);
        let noise: Vec<f64> = (pos..end).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f1 = rng.gen_range(300.0..900.0);
        let f2 = rng.gen_range(1000.0f64..2500.0).min(0.45 * fs);
        let a = resonate(&noise, f1, fs, 0.98);
        let b = resonate(&noise, f2, fs, 0.97);
        let gain = rng.gen_range(0.3..1.0);
        let n = (end - pos).max(1) as f64;
        for (i, slot) in out[pos..end].iter_mut().enumerate() {
            let env = (std::f64::consts::PI * i as f64 / n).sin().powi(2);
            *slot = gain * env * (a[i] + 0.5 * b[i]);
        }
        pos = end + pause;
    }
    let peak = out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        out.iter_mut().for_each(|v| *v *= 0.5 / peak);
    }
    SignalF64::new(out, sample_rate).expect("finite samples")
}

/// `count` utterances: WAV files from `folder` in name order, or synthetic
/// ones seeded from `seed`.
pub fn utterances(
    count: usize,
    duration_s: f64,
    sample_rate: u32,
    folder: Option<&Path>,
    seed: u64,
) -> AppResult<Vec<SignalF64>> {
    if let Some(dir) = folder {
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(io_err(dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav")))
            .collect();
        paths.sort();
        let signals = paths
            .iter()
            .take(count)
            .map(|p| read_wav(p))
            .collect::<AppResult<Vec<_>>>()?;
        if let Some(s) = signals.iter().find(|s| s.sample_rate() != sample_rate) {
            return Err(AppError::SampleRateMismatch {
                input: s.sample_rate(),
                rir: sample_rate,
            });
        }
        return Ok(signals);
    }
    let len = (duration_s * sample_rate as f64).round() as usize;
    Ok((0..count as u64)
        .map(|i| synthetic_utterance(len, sample_rate, seed.wrapping_mul(1_000_003).wrapping_add(i)))
        .collect())
}
