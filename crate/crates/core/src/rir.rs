//! Shoebox room impulse responses by the image-source method, plus seeded
//! sampling of room/position corpora.
//!
//! Every wall reflects with the same pressure coefficient `beta`. An image
//! reached after `c` reflections at distance `d` adds `beta^c / (4 pi d)` at
//! delay `d * fs / speed_of_sound`, spread over neighbouring taps by a
//! Hann-tapered sinc with 8 sidelobes on each side.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{sinc, Real};
use crate::signal::ImpulseResponse;

/// Sidelobes of the fractional-delay kernel on each side of its centre.
pub const KERNEL_SIDELOBES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomSpec {
    /// `(Lx, Ly, Lz)` in metres.
    pub dimensions: [f64; 3],
    pub source: [f64; 3],
    pub mic: [f64; 3],
    /// Wall reflection coefficient in `[0, 1)`.
    pub beta: f64,
    pub sample_rate: u32,
    /// Taps of the generated response.
    pub rir_len: usize,
    /// Highest reflection order included; `None` keeps every image that
    /// arrives within `rir_len`.
    pub max_order: Option<u32>,
    pub speed_of_sound: f64,
}

impl RoomSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidRoom(msg));
        if self.dimensions.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return bad(format!("dimensions {:?} must be positive", self.dimensions));
        }
        for (name, p) in [("source", &self.source), ("mic", &self.mic)] {
            for (axis, (&v, &l)) in p.iter().zip(&self.dimensions).enumerate() {
                if !(v > 0.0 && v < l) {
                    return bad(format!("{name} coordinate {axis} = {v} not inside (0, {l})"));
                }
            }
        }
        if self.source == self.mic {
            return bad("source and mic coincide".into());
        }
        if !(0.0..1.0).contains(&self.beta) {
            return bad(format!("beta {} outside [0, 1)", self.beta));
        }
        if self.rir_len < 1 {
            return bad("rir_len must be at least 1".into());
        }
        if self.sample_rate == 0 || !(self.speed_of_sound > 0.0) {
            return bad("sample rate and speed of sound must be positive".into());
        }
        if self.direct_delay() >= self.rir_len as f64 {
            return bad(format!(
                "direct path arrives at sample {:.1}, beyond rir_len {}",
                self.direct_delay(),
                self.rir_len
            ));
        }
        Ok(())
    }

    pub fn distance(&self) -> f64 {
        dist(&self.source, &self.mic)
    }

    /// Direct-path delay in (fractional) samples.
    pub fn direct_delay(&self) -> f64 {
        self.distance() * self.sample_rate as f64 / self.speed_of_sound
    }
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// One image source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Image {
    /// Delay in samples.
    pub delay: f64,
    pub amplitude: f64,
    pub order: u32,
}

/// Image sources contributing to the response, in a fixed enumeration order.
pub fn image_sources(spec: &RoomSpec) -> Result<Vec<Image>> {
    spec.validate()?;
    let fs = spec.sample_rate as f64;
    let max_dist = (spec.rir_len + KERNEL_SIDELOBES) as f64 * spec.speed_of_sound / fs;
    let reach: Vec<i64> = spec
        .dimensions
        .iter()
        .map(|&l| (max_dist / (2.0 * l)).ceil() as i64 + 1)
        .collect();
    let mut images = Vec::new();
    for mx in -reach[0]..=reach[0] {
        for my in -reach[1]..=reach[1] {
            for mz in -reach[2]..=reach[2] {
                for parity in 0..8u32 {
                    let m = [mx, my, mz];
                    let mut d2 = 0.0;
                    let mut order = 0u32;
                    for axis in 0..3 {
                        let q = ((parity >> axis) & 1) as i64;
                        let l = spec.dimensions[axis];
                        let pos = (1 - 2 * q) as f64 * spec.source[axis] + 2.0 * m[axis] as f64 * l;
                        let diff = pos - spec.mic[axis];
                        d2 += diff * diff;
                        order += (2 * m[axis] - q).unsigned_abs() as u32;
                    }
                    if spec.max_order.is_some_and(|o| order > o) {
                        continue;
                    }
                    let d = d2.sqrt();
                    if d > max_dist {
                        continue;
                    }
                    images.push(Image {
                        delay: d * fs / spec.speed_of_sound,
                        amplitude: spec.beta.powi(order as i32)
                            / (4.0 * std::f64::consts::PI * d),
                        order,
                    });
                }
            }
        }
    }
    Ok(images)
}

/// Adds a Hann-tapered sinc pulse of `amplitude` centred at `delay`.
pub fn deposit<T: Real>(taps: &mut [T], delay: f64, amplitude: f64) {
    let half = KERNEL_SIDELOBES as f64;
    let taper = half + 1.0;
    let lo = (delay - half).ceil().max(0.0) as usize;
    let hi = (delay + half).floor();
    if hi < 0.0 {
        return;
    }
    let hi = (hi as usize).min(taps.len().saturating_sub(1));
    for (n, tap) in taps.iter_mut().enumerate().take(hi + 1).skip(lo) {
        let t = n as f64 - delay;
        let w = 0.5 * (1.0 + (std::f64::consts::PI * t / taper).cos());
        *tap = *tap + T::lit(amplitude * w * sinc(t));
    }
}

/// Room impulse response of `spec`. The direct index is whichever tap
/// beside the direct-path delay is larger; with strong reflections at long
/// range it need not be the largest tap overall.
pub fn generate_rir<T: Real>(spec: &RoomSpec) -> Result<ImpulseResponse<T>> {
    let images = image_sources(spec)?;
    let mut taps = vec![T::zero(); spec.rir_len];
    for img in &images {
        deposit(&mut taps, img.delay, img.amplitude);
    }
    let delay = spec.direct_delay();
    let lo = delay.floor() as usize;
    let hi = (lo + 1).min(spec.rir_len - 1);
    let nd = if taps[hi].abs() > taps[lo].abs() { hi } else { lo };
    ImpulseResponse::with_direct_index(taps, spec.sample_rate, nd)
}

/// Sampling ranges for [`batch_rooms`]. Each `(min, max)` pair may be
/// degenerate (`min == max`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RoomRanges {
    pub length_x: (f64, f64),
    pub length_y: (f64, f64),
    pub length_z: (f64, f64),
    pub beta: (f64, f64),
    /// Minimum distance of source and mic from every wall.
    pub wall_margin: f64,
    pub min_distance: f64,
    pub max_distance: Option<f64>,
    pub sample_rate: u32,
    pub rir_len: usize,
    pub max_order: Option<u32>,
    pub speed_of_sound: f64,
}

impl Default for RoomRanges {
    fn default() -> Self {
        Self {
            length_x: (4.0, 8.0),
            length_y: (3.0, 6.0),
            length_z: (2.5, 3.5),
            beta: (0.7, 0.92),
            wall_margin: 0.5,
            min_distance: 0.5,
            max_distance: None,
            sample_rate: 16000,
            rir_len: 1024,
            max_order: None,
            speed_of_sound: 343.0,
        }
    }
}

/// Smallest source-mic distance the sampler enforces.
pub const MIN_SOURCE_MIC_DISTANCE: f64 = 0.5;

const MAX_PLACEMENT_TRIES: usize = 10_000;

impl RoomRanges {
    pub fn validate(&self) -> Result<()> {
        let infeasible = |name: &str, reason: String| {
            Err(Error::InfeasibleRange {
                name: name.to_string(),
                reason,
            })
        };
        for (name, (lo, hi)) in [
            ("length_x", self.length_x),
            ("length_y", self.length_y),
            ("length_z", self.length_z),
            ("beta", self.beta),
        ] {
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                return infeasible(name, format!("min {lo} exceeds max {hi}"));
            }
        }
        if !(self.beta.0 >= 0.0 && self.beta.1 < 1.0) {
            return infeasible("beta", format!("{:?} must lie in [0, 1)", self.beta));
        }
        if self.min_distance < MIN_SOURCE_MIC_DISTANCE {
            return infeasible(
                "min_distance",
                format!("{} below the {MIN_SOURCE_MIC_DISTANCE} m floor", self.min_distance),
            );
        }
        let margin2 = 2.0 * self.wall_margin;
        let mut diag2 = 0.0;
        for (name, (lo, _)) in [
            ("length_x", self.length_x),
            ("length_y", self.length_y),
            ("length_z", self.length_z),
        ] {
            if lo <= margin2 {
                return infeasible(
                    name,
                    format!("minimum {lo} m leaves no room inside the {} m wall margin", self.wall_margin),
                );
            }
            diag2 += (lo - margin2) * (lo - margin2);
        }
        if diag2.sqrt() < self.min_distance {
            return infeasible(
                "length_x/length_y/length_z",
                format!(
                    "smallest room cannot separate source and mic by {} m",
                    self.min_distance
                ),
            );
        }
        if let Some(max) = self.max_distance {
            if max < self.min_distance {
                return infeasible(
                    "max_distance",
                    format!("{max} below min_distance {}", self.min_distance),
                );
            }
        }
        let c = self.speed_of_sound;
        let reach = self.max_distance.unwrap_or_else(|| {
            let hi = [self.length_x.1, self.length_y.1, self.length_z.1];
            hi.iter().map(|l| l * l).sum::<f64>().sqrt()
        });
        if reach * self.sample_rate as f64 / c >= self.rir_len as f64 {
            return infeasible(
                "rir_len",
                format!("{} taps shorter than the longest direct path", self.rir_len),
            );
        }
        Ok(())
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// `n_rooms * n_positions` room specifications drawn deterministically from
/// `ranges`, rooms outermost.
pub fn batch_rooms(
    n_rooms: usize,
    n_positions: usize,
    ranges: &RoomRanges,
    seed: u64,
) -> Result<Vec<RoomSpec>> {
    ranges.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_rooms * n_positions);
    for _ in 0..n_rooms {
        let dims = [
            uniform(&mut rng, ranges.length_x),
            uniform(&mut rng, ranges.length_y),
            uniform(&mut rng, ranges.length_z),
        ];
        let beta = uniform(&mut rng, ranges.beta);
        for _ in 0..n_positions {
            let mut placed = None;
            for _ in 0..MAX_PLACEMENT_TRIES {
                let mut point = || {
                    let mut p = [0.0; 3];
                    for (v, &l) in p.iter_mut().zip(&dims) {
                        *v = uniform(&mut rng, (ranges.wall_margin, l - ranges.wall_margin));
                    }
                    p
                };
                let source = point();
                let mic = point();
                let d = dist(&source, &mic);
                if d >= ranges.min_distance && ranges.max_distance.is_none_or(|m| d <= m) {
                    placed = Some((source, mic));
                    break;
                }
            }
            let Some((source, mic)) = placed else {
                return Err(Error::InfeasibleRange {
                    name: "min_distance/max_distance".into(),
                    reason: format!("no placement found in room {dims:?}"),
                });
            };
            let spec = RoomSpec {
                dimensions: dims,
                source,
                mic,
                beta,
                sample_rate: ranges.sample_rate,
                rir_len: ranges.rir_len,
                max_order: ranges.max_order,
                speed_of_sound: ranges.speed_of_sound,
            };
            spec.validate()?;
            out.push(spec);
        }
    }
    Ok(out)
}

/// Schroeder backward-integrated energy decay curve in dB re total energy.
pub fn energy_decay_curve<T: Real>(taps: &[T]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut curve: Vec<f64> = taps
        .iter()
        .rev()
        .map(|&x| {
            let v = x.to_f64_lossy();
            acc += v * v;
            acc
        })
        .collect();
    curve.reverse();
    let total = curve.first().copied().unwrap_or(0.0);
    curve
        .into_iter()
        .map(|e| 10.0 * (e / total).log10())
        .collect()
}

/// Reverberation time from a line fit to the decay curve between -5 dB and
/// -25 dB (or -15 dB when the curve does not reach -25 dB), extrapolated to
/// -60 dB. `None` when the curve never reaches -15 dB.
pub fn estimate_t60<T: Real>(taps: &[T], sample_rate: u32) -> Option<f64> {
    let edc = energy_decay_curve(taps);
    let lowest = edc.iter().copied().fold(f64::INFINITY, f64::min);
    let floor = if lowest <= -25.0 {
        -25.0
    } else if lowest <= -15.0 {
        -15.0
    } else {
        return None;
    };
    let pts: Vec<(f64, f64)> = edc
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v <= -5.0 && v >= floor)
        .map(|(i, &v)| (i as f64 / sample_rate as f64, v))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope < 0.0).then(|| -60.0 / slope)
}
