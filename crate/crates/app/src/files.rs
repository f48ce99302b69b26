//! Atomic file output and impulse-response files.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use stft_dereverb::{ImpulseResponseF64, RoomSpec};

use crate::error::{io_err, AppError, AppResult};
use crate::wav;

/// Writes `bytes` through a temporary file in the same directory, renamed
/// into place once complete.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> AppResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.flush().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| AppError::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

/// JSON form of an impulse response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RirFile {
    pub sample_rate: u32,
    pub direct_index: usize,
    pub taps: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub room: Option<RoomSpec>,
}

impl RirFile {
    pub fn new(h: &ImpulseResponseF64, room: Option<RoomSpec>) -> Self {
        Self {
            sample_rate: h.sample_rate(),
            direct_index: h.direct_index(),
            taps: h.taps().to_vec(),
            room,
        }
    }

    pub fn response(&self) -> AppResult<ImpulseResponseF64> {
        Ok(ImpulseResponseF64::with_direct_index(
            self.taps.clone(),
            self.sample_rate,
            self.direct_index,
        )?)
    }
}

/// Loads an impulse response from `.json` or `.wav`. A WAV response takes
/// its largest tap as the direct path.
pub fn read_rir(path: &Path) -> AppResult<ImpulseResponseF64> {
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let file: RirFile = serde_json::from_str(&text).map_err(|e| AppError::Parse {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        file.response()
    } else {
        let s = wav::read_wav(path)?;
        let rate = s.sample_rate();
        Ok(ImpulseResponseF64::new(s.into_samples(), rate)?)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> AppResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| AppError::Parse {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
