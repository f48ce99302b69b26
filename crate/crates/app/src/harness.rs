//! Batch evaluation: builds the response corpus, runs the filter-bank method
//! and the time-domain baseline on every response, and writes one CSV row per
//! response plus a summary row of means.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use stft_dereverb::metrics::{drr_single, DB_CAP};
use stft_dereverb::{batch_rooms, generate_rir, Decibels, ImpulseResponseF64, RoomSpec, SignalF64};

use crate::config::{CorpusSection, ExperimentConfig};
use crate::error::{AppError, AppResult};
use crate::files::write_atomic;
use crate::pipeline::{enhanced_drr, solve, srr_pair, widrow_drr};
use crate::speech::utterances;

pub const CSV_VERSION: &str = "# stft-dereverb evaluation v1";

/// Candidate batches tried when filtering the corpus by input DRR.
const MAX_CORPUS_BATCHES: u64 = 1000;

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub id: usize,
    pub room: RoomSpec,
    pub rir: ImpulseResponseF64,
    pub drr_db: f64,
}

/// Responses of the configured corpus, in id order. With an input DRR limit,
/// candidate batches are drawn from successive seeds until enough pass.
pub fn build_corpus(corpus: &CorpusSection, params: &stft_dereverb::DrrParams) -> AppResult<Vec<CorpusEntry>> {
    let want = corpus.count();
    if want == 0 {
        return Err(AppError::EmptyCorpus("zero rooms or positions".into()));
    }
    let mut out = Vec::with_capacity(want);
    for batch in 0..MAX_CORPUS_BATCHES {
        let seed = corpus.seed.wrapping_add(batch.wrapping_mul(0x9E37_79B9));
        for room in batch_rooms(corpus.rooms, corpus.positions, &corpus.ranges, seed)? {
            let rir = generate_rir::<f64>(&room)?;
            let drr_db = drr_single(&rir, params)?.db;
            if corpus.max_input_drr_db.is_some_and(|m| !(drr_db < m)) {
                continue;
            }
            out.push(CorpusEntry {
                id: out.len(),
                room,
                rir,
                drr_db,
            });
            if out.len() == want {
                return Ok(out);
            }
        }
        if corpus.max_input_drr_db.is_none() {
            break;
        }
    }
    Err(AppError::EmptyCorpus(format!(
        "only {} of {want} responses met the input DRR limit",
        out.len()
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRow {
    pub rir_id: String,
    pub drr_before_db: f64,
    pub drr_after_db: f64,
    pub drr_widrow_db: Option<f64>,
    pub srr_before_db: Option<f64>,
    pub srr_after_db: Option<f64>,
    pub drr_improvement_db: f64,
    pub drr_widrow_improvement_db: Option<f64>,
    /// Proposed minus baseline enhanced DRR.
    pub widrow_delta_db: Option<f64>,
    pub srr_improvement_db: Option<f64>,
    /// `;`-separated names of values clipped to the +100 dB cap.
    pub flags: String,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub rows: Vec<EvalRow>,
    pub summary: EvalRow,
}

fn capped(name: &str, d: Decibels<f64>, flags: &mut Vec<String>) -> f64 {
    let (v, hit) = d.capped();
    if hit {
        flags.push(name.to_string());
    }
    v
}

fn evaluate_one(
    entry: &CorpusEntry,
    config: &ExperimentConfig,
    speech: &[SignalF64],
) -> AppResult<EvalRow> {
    let start = Instant::now();
    let stft = config.stft_config()?;
    let mut flags = Vec::new();
    let h = &entry.rir;
    let before = capped("drr_before", Decibels { db: entry.drr_db }, &mut flags);
    let solved = solve(h, config)?;
    let after = capped(
        "drr_after",
        enhanced_drr(h, &solved.bank, &stft, &config.metrics)?,
        &mut flags,
    );
    let widrow = if config.baseline.enabled {
        let (_, db) = widrow_drr(h, config)?;
        Some(capped("drr_widrow", db, &mut flags))
    } else {
        None
    };
    let srr = if speech.is_empty() {
        None
    } else {
        let mut b = 0.0;
        let mut a = 0.0;
        for s in speech {
            let (x, y) = srr_pair(s, h, &solved.bank)?;
            b += x;
            a += y;
        }
        let n = speech.len() as f64;
        Some((b / n, a / n))
    };
    log::debug!("rir {} done: DRR {before:.2} -> {after:.2} dB", entry.id);
    Ok(EvalRow {
        rir_id: format!("{:04}", entry.id),
        drr_before_db: before,
        drr_after_db: after,
        drr_widrow_db: widrow,
        srr_before_db: srr.map(|p| p.0),
        srr_after_db: srr.map(|p| p.1),
        drr_improvement_db: after - before,
        drr_widrow_improvement_db: widrow.map(|w| w - before),
        widrow_delta_db: widrow.map(|w| after - w),
        srr_improvement_db: srr.map(|p| p.1 - p.0),
        flags: flags.join(";"),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.collect::<Option<Vec<_>>>()?;
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn summarize(rows: &[EvalRow]) -> EvalRow {
    let m = |f: fn(&EvalRow) -> Option<f64>| mean(rows.iter().map(f));
    let capped = rows.iter().filter(|r| !r.flags.is_empty()).count();
    EvalRow {
        rir_id: "mean".into(),
        drr_before_db: m(|r| Some(r.drr_before_db)).unwrap_or(f64::NAN),
        drr_after_db: m(|r| Some(r.drr_after_db)).unwrap_or(f64::NAN),
        drr_widrow_db: m(|r| r.drr_widrow_db),
        srr_before_db: m(|r| r.srr_before_db),
        srr_after_db: m(|r| r.srr_after_db),
        drr_improvement_db: m(|r| Some(r.drr_improvement_db)).unwrap_or(f64::NAN),
        drr_widrow_improvement_db: m(|r| r.drr_widrow_improvement_db),
        widrow_delta_db: m(|r| r.widrow_delta_db),
        srr_improvement_db: m(|r| r.srr_improvement_db),
        flags: if capped > 0 {
            format!("capped_rows={capped}")
        } else {
            String::new()
        },
        wall_time_s: rows.iter().map(|r| r.wall_time_s).sum(),
    }
}

/// Runs the whole corpus on `config.jobs` threads (0 = all cores).
pub fn evaluate(config: &ExperimentConfig) -> AppResult<Evaluation> {
    config.validate()?;
    let corpus = build_corpus(&config.corpus, &config.metrics)?;
    let speech = utterances(
        config.speech.utterances_per_rir,
        config.speech.duration_s,
        config.corpus.ranges.sample_rate,
        config.speech.folder.as_deref(),
        config.speech.seed,
    )?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| AppError::Config(e.to_string()))?;
    let mut rows = pool.install(|| {
        corpus
            .par_iter()
            .map(|entry| evaluate_one(entry, config, &speech))
            .collect::<AppResult<Vec<_>>>()
    })?;
    rows.sort_by(|a, b| a.rir_id.cmp(&b.rir_id));
    let summary = summarize(&rows);
    Ok(Evaluation { rows, summary })
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

pub fn render_csv(eval: &Evaluation) -> AppResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| AppError::Csv(e.to_string());
    w.write_record([
        "rir_id",
        "drr_before_db",
        "drr_after_db",
        "drr_widrow_db",
        "srr_before_db",
        "srr_after_db",
        "drr_improvement_db",
        "drr_widrow_improvement_db",
        "widrow_delta_db",
        "srr_improvement_db",
        "flags",
        "wall_time_s",
    ])
    .map_err(csv_err)?;
    for r in eval.rows.iter().chain(std::iter::once(&eval.summary)) {
        w.write_record([
            r.rir_id.clone(),
            cell(Some(r.drr_before_db)),
            cell(Some(r.drr_after_db)),
            cell(r.drr_widrow_db),
            cell(r.srr_before_db),
            cell(r.srr_after_db),
            cell(Some(r.drr_improvement_db)),
            cell(r.drr_widrow_improvement_db),
            cell(r.widrow_delta_db),
            cell(r.srr_improvement_db),
            r.flags.clone(),
            format!("{:.3}", r.wall_time_s),
        ])
        .map_err(csv_err)?;
    }
    let body = w.into_inner().map_err(|e| AppError::Csv(e.to_string()))?;
    let mut text = format!("{CSV_VERSION} (values capped at +{DB_CAP} dB are listed in flags)\n");
    text.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    Ok(text)
}

/// Evaluates and writes the CSV atomically to `out`.
pub fn cmd_evaluate(config: &ExperimentConfig, out: &Path) -> AppResult<Evaluation> {
    let eval = evaluate(config)?;
    write_atomic(out, render_csv(&eval)?.as_bytes())?;
    Ok(eval)
}
