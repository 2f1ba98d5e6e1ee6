use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use super::config::{CampaignConfig, ConfigError, StopRule};
use super::detect::{detect_k_longest, detect_k_saturation};
use super::pathset::PathSet;
use super::report::{CampaignReport, CampaignRow, StopReason};
use super::sample::sample_input;
use super::shapes::{Scheduler, ShapeSpace};
use crate::dsl::{DecisionTable, Program};
use crate::interp::{ExecError, Interpreter};
use crate::rng::stream;
use crate::schema::{validate_schema, InputSchema, InputVector, SchemaError};
use crate::trace::{render_events, PathKey};

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Parallel executors per step; results do not depend on this.
    pub workers: usize,
    /// Zero the timing column.
    pub stable_time: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            workers: 1,
            stable_time: false,
        }
    }
}

enum Outcome {
    Path(PathKey, InputVector),
    Skipped,
}

pub fn run_campaign(
    program: &Program,
    table: &DecisionTable,
    schema: &InputSchema,
    config: &CampaignConfig,
) -> Result<(CampaignReport, PathSet), CampaignError> {
    run_campaign_with(program, table, schema, config, RunOptions::default())
}

pub fn run_campaign_with(
    program: &Program,
    table: &DecisionTable,
    schema: &InputSchema,
    config: &CampaignConfig,
    options: RunOptions,
) -> Result<(CampaignReport, PathSet), CampaignError> {
    config.validate()?;
    validate_schema(program, schema)?;
    let space = ShapeSpace::new(schema, config)?;
    let k_cap = space.k_cap();
    let interp = Interpreter::new(program, table);
    let pool = if options.workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(options.workers)
                .build()
                .map_err(|e| CampaignError::Pool(e.to_string()))?,
        )
    } else {
        None
    };

    let mut scheduler = Scheduler::new(&space);
    let mut set = PathSet::new();
    let mut rows: Vec<CampaignRow> = Vec::new();
    let mut skipped = 0u64;
    let mut executions = 0u64;
    let mut stop = StopReason::KMax;

    for k in 0..=config.k_max {
        let started = Instant::now();
        let plan = scheduler.plan(&space, k, config.batch);
        let shapes = space.all();
        let draw = |(i, &shape_idx): (usize, &usize)| -> Outcome {
            let mut rng = stream(config.seed, k, i as u64);
            let Ok(input) = sample_input(schema, &shapes[shape_idx].shape, config.domain, &mut rng)
            else {
                return Outcome::Skipped;
            };
            let events = match interp.run(&input, config.step_budget) {
                Ok(run) => run.trace.events,
                Err(
                    ExecError::BudgetExceeded { partial, .. } | ExecError::Runtime { partial, .. },
                ) if config.include_errored_paths => partial.events,
                Err(_) => return Outcome::Skipped,
            };
            match render_events(&events, table) {
                Ok(key) => Outcome::Path(key, input),
                Err(_) => Outcome::Skipped,
            }
        };
        let outcomes: Vec<Outcome> = match &pool {
            Some(pool) => pool.install(|| plan.par_iter().enumerate().map(draw).collect()),
            None => plan.iter().enumerate().map(draw).collect(),
        };

        // Insertion in input-index order keeps the first-seen input stable.
        let before = set.len();
        for outcome in outcomes {
            executions += 1;
            match outcome {
                Outcome::Path(key, input) => {
                    set.insert(key, input, k, table);
                }
                Outcome::Skipped => skipped += 1,
            }
        }
        let prev_tests = rows.last().map_or(0, |r| r.test_cases);
        rows.push(CampaignRow {
            k,
            test_cases: prev_tests + plan.len() as u64,
            ufp: set.len(),
            nfp: set.len() - before,
            llp: set.longest_length(),
            etime_ms: if options.stable_time {
                0.0
            } else {
                started.elapsed().as_secs_f64() * 1000.0
            },
        });

        let fired = match config.stop_rule {
            StopRule::Saturation { window } => {
                let w = window as usize;
                rows.len() >= w
                    && k >= k_cap + window
                    && rows[rows.len() - w..].iter().all(|r| r.nfp == 0)
                    && detect_k_saturation(&rows, window).is_some()
            }
            StopRule::LongestPath => {
                k > k_cap && rows.len() >= 2 && rows[rows.len() - 2].llp == rows[rows.len() - 1].llp
            }
            StopRule::KMax => false,
        };
        if fired {
            stop = match config.stop_rule {
                StopRule::Saturation { .. } => StopReason::Saturation,
                StopRule::LongestPath => StopReason::LongestPath,
                StopRule::KMax => StopReason::KMax,
            };
            break;
        }
    }

    let window = config.stop_rule.window();
    let report = CampaignReport {
        subject: program.name.clone(),
        config: config.clone(),
        k_longest: detect_k_longest(&rows),
        k_saturation: detect_k_saturation(&rows, window),
        rows,
        k_cap,
        stop,
        skipped,
        executions,
    };
    Ok((report, set))
}
