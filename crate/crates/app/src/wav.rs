//! Mono WAV input and output: 16-bit PCM or 32-bit IEEE float.

use std::io::Cursor;
use std::path::Path;

use stft_dereverb::SignalF64;

use crate::error::{io_err, AppError, AppResult};
use crate::files::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavFormat {
    Pcm16,
    Float32,
}

const PCM16_SCALE: f64 = 32768.0;

/// Walks the RIFF chunks far enough to find `fmt ` and `data`, returning the
/// channel count. Reports the byte offset where the structure breaks.
fn scan_header(path: &Path, bytes: &[u8]) -> AppResult<u16> {
    let fail = |offset: usize, reason: &str| AppError::WavHeader {
        path: path.to_path_buf(),
        offset: offset as u64,
        reason: reason.to_string(),
    };
    if bytes.len() < 12 {
        return Err(fail(bytes.len(), "file ends inside the RIFF header"));
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(fail(0, "missing RIFF tag"));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(fail(8, "missing WAVE tag"));
    }
    let mut pos = 12;
    let mut channels = None;
    loop {
        if pos + 8 > bytes.len() {
            return Err(fail(
                bytes.len(),
                if channels.is_none() {
                    "file ends before the fmt chunk"
                } else {
                    "file ends before the data chunk"
                },
            ));
        }
        let id = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body = pos + 8;
        if id == b"fmt " {
            if size < 16 || body + size > bytes.len() {
                return Err(fail(bytes.len().min(body + size), "fmt chunk truncated"));
            }
            channels = Some(u16::from_le_bytes([bytes[body + 2], bytes[body + 3]]));
        } else if id == b"data" {
            let Some(ch) = channels else {
                return Err(fail(pos, "data chunk before fmt chunk"));
            };
            if body + size > bytes.len() {
                return Err(fail(bytes.len(), "data chunk truncated"));
            }
            return Ok(ch);
        }
        pos = body + size + (size & 1);
    }
}

pub fn read_wav(path: &Path) -> AppResult<SignalF64> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    let channels = scan_header(path, &bytes)?;
    let format_err = |reason: String| AppError::WavFormat {
        path: path.to_path_buf(),
        reason,
    };
    if channels != 1 {
        return Err(format_err(format!(
            "expected mono audio, found {channels} channels"
        )));
    }
    let reader = hound::WavReader::new(Cursor::new(&bytes)).map_err(|e| format_err(e.to_string()))?;
    let spec = reader.spec();
    let samples: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| v as f64 / PCM16_SCALE))
            .collect::<Result<_, _>>(),
        (hound::SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<Result<_, _>>(),
        (fmt, bits) => {
            return Err(format_err(format!(
                "unsupported sample format {fmt:?} with {bits} bits"
            )))
        }
    }
    .map_err(|e| format_err(e.to_string()))?;
    Ok(SignalF64::new(samples, spec.sample_rate)?)
}

/// Encodes a mono signal. PCM samples are rounded and clipped to 16 bits.
pub fn encode_wav(signal: &SignalF64, format: WavFormat) -> Vec<u8> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: signal.sample_rate(),
        bits_per_sample: match format {
            WavFormat::Pcm16 => 16,
            WavFormat::Float32 => 32,
        },
        sample_format: match format {
            WavFormat::Pcm16 => hound::SampleFormat::Int,
            WavFormat::Float32 => hound::SampleFormat::Float,
        },
    };
    let mut out = Cursor::new(Vec::new());
    {
        let mut w = hound::WavWriter::new(&mut out, spec).expect("in-memory writer");
        for &x in signal.samples() {
            match format {
                WavFormat::Pcm16 => {
                    let v = (x * PCM16_SCALE).round().clamp(-32768.0, 32767.0) as i16;
                    w.write_sample(v).expect("in-memory write");
                }
                WavFormat::Float32 => w.write_sample(x as f32).expect("in-memory write"),
            }
        }
        w.finalize().expect("in-memory finalize");
    }
    out.into_inner()
}

pub fn write_wav(path: &Path, signal: &SignalF64, format: WavFormat) -> AppResult<()> {
    write_atomic(path, &encode_wav(signal, format))
}
