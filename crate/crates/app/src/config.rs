//! Experiment configuration, read from JSON. Every field has a default, so
//! `{}` is a valid file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stft_dereverb::{make_window, DrrParams, RoomRanges, StftConfigF64, WindowKind};

use crate::error::{io_err, AppError, AppResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StftSection {
    pub overlap: usize,
    pub hop: usize,
    pub window: WindowKind,
}

impl Default for StftSection {
    fn default() -> Self {
        Self {
            overlap: 4,
            hop: 64,
            window: WindowKind::SqrtHann,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterSection {
    /// Future frames `A`.
    pub future: usize,
    /// Past frames `B`.
    pub past: usize,
}

impl Default for FilterSection {
    fn default() -> Self {
        Self { future: 9, past: 9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    pub ranges: RoomRanges,
    pub rooms: usize,
    pub positions: usize,
    pub seed: u64,
    /// Keep only responses whose DRR is below this value (dB).
    pub max_input_drr_db: Option<f64>,
}

impl Default for CorpusSection {
    fn default() -> Self {
        Self {
            ranges: RoomRanges::default(),
            rooms: 4,
            positions: 5,
            seed: 1,
            max_input_drr_db: None,
        }
    }
}

impl CorpusSection {
    pub fn count(&self) -> usize {
        self.rooms * self.positions
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineSection {
    pub enabled: bool,
    /// Taps of the time-domain inverse.
    pub filter_len: usize,
    /// Modelling delay; `n_d + filter_len / 2` when absent.
    pub target_delay: Option<usize>,
}

impl Default for BaselineSection {
    fn default() -> Self {
        Self {
            enabled: true,
            filter_len: 1024,
            target_delay: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpeechSection {
    /// Utterances per response; 0 skips the SRR columns.
    pub utterances_per_rir: usize,
    /// Length of each synthetic utterance in seconds.
    pub duration_s: f64,
    /// Folder of mono WAV files used instead of synthetic material.
    pub folder: Option<PathBuf>,
    pub seed: u64,
}

impl Default for SpeechSection {
    fn default() -> Self {
        Self {
            utterances_per_rir: 2,
            duration_s: 1.5,
            folder: None,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub stft: StftSection,
    pub filter: FilterSection,
    pub corpus: CorpusSection,
    pub baseline: BaselineSection,
    pub metrics: DrrParams,
    pub speech: SpeechSection,
    /// Worker threads for evaluation; 0 uses every core.
    pub jobs: usize,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let config: Self = serde_json::from_str(&text).map_err(|e| AppError::Parse {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Switches the corpus to 40 rooms x 15 positions (600 responses).
    pub fn full_scale(&mut self) {
        self.corpus.rooms = 40;
        self.corpus.positions = 15;
    }

    pub fn stft_config(&self) -> AppResult<StftConfigF64> {
        Ok(make_window(self.stft.window, self.stft.overlap, self.stft.hop)?)
    }

    pub fn validate(&self) -> AppResult<()> {
        self.stft_config()?;
        self.metrics.validate()?;
        self.corpus.ranges.validate()?;
        if self.baseline.filter_len == 0 {
            return Err(AppError::Config("baseline filter_len must be positive".into()));
        }
        if !(self.speech.duration_s > 0.0) {
            return Err(AppError::Config("speech duration must be positive".into()));
        }
        Ok(())
    }
}
