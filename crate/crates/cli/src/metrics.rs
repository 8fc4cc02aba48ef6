//! Streaming metrics: per-round records and run summaries.
//!
//! Records serialize as JSON lines (or scalar-column CSV) and are
//! byte-for-byte reproducible for a fixed config and seed; wall-clock
//! fields only appear when timing is explicitly requested.

use std::collections::VecDeque;
use std::time::Instant;

use serde::Serialize;

use crate::config::RecordFormat;

/// One recorded evaluation round.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsRecord {
    /// Global round index (training rounds included in the count).
    pub t: u64,
    /// Mean rank loss over all recorded rounds so far.
    pub cum_rank_loss: f64,
    /// Mean rank loss over the trailing window of recorded rounds.
    pub window_rank_loss: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expert_losses: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_edges: Option<Vec<Option<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_secs: Option<f64>,
}

/// Collects per-round losses and renders the metrics file.
pub struct Recorder {
    window: usize,
    emit_timing: bool,
    start: Instant,
    window_buf: VecDeque<f64>,
    window_sum: f64,
    cum_sum: f64,
    recorded: u64,
    records: Vec<MetricsRecord>,
}

impl Recorder {
    pub fn new(window: usize, emit_timing: bool) -> Self {
        Self {
            window: window.max(1),
            emit_timing,
            start: Instant::now(),
            window_buf: VecDeque::new(),
            window_sum: 0.0,
            cum_sum: 0.0,
            recorded: 0,
            records: Vec::new(),
        }
    }

    /// Record one evaluated round.
    pub fn observe(
        &mut self,
        t: u64,
        rank_loss: f64,
        expert_losses: Option<Vec<f64>>,
        empirical_edges: Option<Vec<Option<f64>>>,
    ) {
        self.cum_sum += rank_loss;
        self.recorded += 1;
        self.window_buf.push_back(rank_loss);
        self.window_sum += rank_loss;
        if self.window_buf.len() > self.window {
            self.window_sum -= self.window_buf.pop_front().expect("nonempty");
        }
        self.records.push(MetricsRecord {
            t,
            cum_rank_loss: self.cum_sum / self.recorded as f64,
            window_rank_loss: self.window_sum / self.window_buf.len() as f64,
            expert_losses,
            empirical_edges,
            wall_clock_secs: self.emit_timing.then(|| self.start.elapsed().as_secs_f64()),
        });
    }

    pub fn recorded_rounds(&self) -> u64 {
        self.recorded
    }

    /// Mean rank loss over every recorded round.
    pub fn mean_rank_loss(&self) -> f64 {
        if self.recorded == 0 {
            0.0
        } else {
            self.cum_sum / self.recorded as f64
        }
    }

    pub fn elapsed_secs(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    pub fn records(&self) -> &[MetricsRecord] {
        &self.records
    }

    /// Render the metrics file bytes.
    pub fn render(&self, format: RecordFormat) -> Vec<u8> {
        let mut buffer = Vec::new();
        match format {
            RecordFormat::Jsonl => {
                for record in &self.records {
                    serde_json::to_writer(&mut buffer, record).expect("record serializes");
                    buffer.push(b'\n');
                }
            }
            RecordFormat::Csv => {
                let header = if self.emit_timing {
                    "t,cum_rank_loss,window_rank_loss,wall_clock_secs\n"
                } else {
                    "t,cum_rank_loss,window_rank_loss\n"
                };
                buffer.extend_from_slice(header.as_bytes());
                for record in &self.records {
                    let mut line = format!("{},{},{}", record.t, record.cum_rank_loss, record.window_rank_loss);
                    if let Some(wall) = record.wall_clock_secs {
                        line.push_str(&format!(",{wall}"));
                    }
                    line.push('\n');
                    buffer.extend_from_slice(line.as_bytes());
                }
            }
        }
        buffer
    }
}

/// One row of the run summary CSV.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    /// `seed`, `mean`, or `best`.
    pub scope: String,
    pub algo: String,
    pub learner: String,
    pub loss: String,
    pub n_learners: usize,
    pub gamma: Option<f64>,
    pub seed: Option<u64>,
    pub rounds_recorded: u64,
    pub mean_rank_loss: Option<f64>,
    /// Loss-bound overlay where one applies.
    pub bound: Option<f64>,
    pub runtime_secs: Option<f64>,
    pub note: String,
}

fn opt<T: std::fmt::Display>(value: &Option<T>) -> String {
    value.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

/// Render summary rows as CSV with a fixed column set.
pub fn render_summary(rows: &[SummaryRow]) -> String {
    let mut text = String::from(
        "scope,algo,learner,loss,n_learners,gamma,seed,rounds_recorded,mean_rank_loss,bound,runtime_secs,note\n",
    );
    for row in rows {
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            row.scope,
            row.algo,
            row.learner,
            row.loss,
            row.n_learners,
            opt(&row.gamma),
            opt(&row.seed),
            row.rounds_recorded,
            opt(&row.mean_rank_loss),
            opt(&row.bound),
            opt(&row.runtime_secs),
            row.note,
        ));
    }
    text
}
