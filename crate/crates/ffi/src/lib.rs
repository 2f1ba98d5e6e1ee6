//! C ABI over the tdgen core.
//!
//! Strings cross the boundary as NUL-terminated UTF-8. Strings returned
//! through `char **out` are owned by the caller and released with
//! `tdg_string_free`. On any non-OK status, `tdg_last_error` describes the
//! failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tdgen::campaign::{run_campaign_with, CampaignConfig, CampaignReport, RunOptions};
use tdgen::dsl::{assign_labels, parse, DecisionTable, FrontendError, Program};
use tdgen::interp::{execute, ExecError};
use tdgen::oracle::{predict, Construct};
use tdgen::schema::{InputSchema, InputVector};
use tdgen::suite::{export, extract_suite, Exportable, Format};
use tdgen::trace::render_trace;
use tdgen::Subject;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    SemanticError = 4,
    SchemaError = 5,
    InputError = 6,
    RuntimeError = 7,
    BudgetExceeded = 8,
    ConfigError = 9,
    UnknownConstruct = 10,
    Panic = 11,
}

/// A parsed and labelled subject program.
pub struct TdgProgram {
    source: String,
    program: Program,
    table: DecisionTable,
}

/// A finished campaign with its rendered outputs.
pub struct TdgCampaign {
    report: CampaignReport,
    report_csv: String,
    suite_json: String,
}

/// Closed-form heuristic values; `k_s` is meaningful only if `has_k_s`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TdgHeuristic {
    pub k_l: u64,
    pub k_s: u64,
    pub has_k_s: bool,
    pub l_max: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl ToString) {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

type Failure = (TdgStatus, String);

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TdgStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TdgStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TdgStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err((TdgStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (TdgStatus::InvalidUtf8, format!("{what}: {e}")))
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .unwrap_or_default()
        .into_raw()
}

fn frontend_failure(e: FrontendError) -> Failure {
    let status = match e {
        FrontendError::Parse(_) => TdgStatus::ParseError,
        FrontendError::Semantic(_) => TdgStatus::SemanticError,
    };
    (status, e.to_string())
}

/// Message for the last failed call on this thread; empty after success.
/// Valid until the next `tdg_*` call on the same thread.
#[no_mangle]
pub extern "C" fn tdg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn tdg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn tdg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse subject source text.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdg_program_parse(
    source: *const c_char,
    out: *mut *mut TdgProgram,
) -> TdgStatus {
    guard(|| {
        if out.is_null() {
            return Err((TdgStatus::NullArgument, "out is null".into()));
        }
        *out = ptr::null_mut();
        let source = text(source, "source")?;
        let program = parse(source).map_err(frontend_failure)?;
        let table = assign_labels(&program);
        *out = Box::into_raw(Box::new(TdgProgram {
            source: source.to_string(),
            program,
            table,
        }));
        Ok(())
    })
}

/// # Safety
/// `program` must be null or a handle from `tdg_program_parse`, freed once.
#[no_mangle]
pub unsafe extern "C" fn tdg_program_free(program: *mut TdgProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Number of labelled decisions; 0 for a null handle.
///
/// # Safety
/// `program` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tdg_program_decision_count(program: *const TdgProgram) -> usize {
    program.as_ref().map_or(0, |p| p.table.len())
}

/// Execute one JSON input and return its path string in `*out_path`.
///
/// # Safety
/// `program` must be a live handle, `input_json` a NUL-terminated string,
/// `out_path` writable.
#[no_mangle]
pub unsafe extern "C" fn tdg_program_run(
    program: *const TdgProgram,
    input_json: *const c_char,
    step_budget: u64,
    out_path: *mut *mut c_char,
) -> TdgStatus {
    guard(|| {
        if out_path.is_null() {
            return Err((TdgStatus::NullArgument, "out_path is null".into()));
        }
        *out_path = ptr::null_mut();
        let p = program
            .as_ref()
            .ok_or((TdgStatus::NullArgument, "program is null".to_string()))?;
        let input = InputVector::from_json(text(input_json, "input_json")?)
            .map_err(|e| (TdgStatus::InputError, e.to_string()))?;
        let run = execute(&p.program, &p.table, &input, step_budget).map_err(|e| {
            let status = match e {
                ExecError::BudgetExceeded { .. } => TdgStatus::BudgetExceeded,
                ExecError::Input(_) | ExecError::ZeroBudget => TdgStatus::InputError,
                ExecError::Runtime { .. } => TdgStatus::RuntimeError,
            };
            (status, e.to_string())
        })?;
        let key = render_trace(&run.trace, &p.table)
            .map_err(|e| (TdgStatus::RuntimeError, e.to_string()))?;
        *out_path = owned(key.as_str().to_string());
        Ok(())
    })
}

/// Closed-form prediction for `construct` ("linear", "bubble", "matrix",
/// "merge") with `ndims` dimensions.
///
/// # Safety
/// `construct` must be a NUL-terminated string, `dims` must point to
/// `ndims` values (or be null when `ndims` is 0), `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tdg_predict(
    construct: *const c_char,
    dims: *const u64,
    ndims: usize,
    out: *mut TdgHeuristic,
) -> TdgStatus {
    guard(|| {
        let out = out
            .as_mut()
            .ok_or((TdgStatus::NullArgument, "out is null".to_string()))?;
        let construct: Construct =
            text(construct, "construct")?
                .parse()
                .map_err(|e: tdgen::oracle::PredictError| {
                    (TdgStatus::UnknownConstruct, e.to_string())
                })?;
        let dims: &[u64] = match (dims.is_null(), ndims) {
            (_, 0) => &[],
            (true, _) => return Err((TdgStatus::NullArgument, "dims is null".into())),
            (false, n) => std::slice::from_raw_parts(dims, n),
        };
        let entry =
            predict(construct, dims).map_err(|e| (TdgStatus::ConfigError, e.to_string()))?;
        *out = TdgHeuristic {
            k_l: entry.k_l,
            k_s: entry.k_s.unwrap_or(0),
            has_k_s: entry.k_s.is_some(),
            l_max: entry.l_max,
        };
        Ok(())
    })
}

/// Run a campaign. `config_json` may be null for defaults; `workers` of 0
/// means 1. Timing columns are zeroed when `stable_time` is set.
///
/// # Safety
/// `program` must be a live handle, `schema_json` a NUL-terminated string,
/// `config_json` null or NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tdg_campaign_run(
    program: *const TdgProgram,
    schema_json: *const c_char,
    config_json: *const c_char,
    workers: usize,
    stable_time: bool,
    out: *mut *mut TdgCampaign,
) -> TdgStatus {
    guard(|| {
        if out.is_null() {
            return Err((TdgStatus::NullArgument, "out is null".into()));
        }
        *out = ptr::null_mut();
        let p = program
            .as_ref()
            .ok_or((TdgStatus::NullArgument, "program is null".to_string()))?;
        let schema = InputSchema::from_json(text(schema_json, "schema_json")?)
            .map_err(|e| (TdgStatus::SchemaError, e.to_string()))?;
        let config = if config_json.is_null() {
            CampaignConfig::default()
        } else {
            CampaignConfig::from_json(text(config_json, "config_json")?)
                .map_err(|e| (TdgStatus::ConfigError, e.to_string()))?
        };
        let subject = Subject::new(&p.source, p.program.clone(), schema)
            .map_err(|e| (TdgStatus::SchemaError, e.to_string()))?;
        let options = RunOptions {
            workers: workers.max(1),
            stable_time,
        };
        let (report, set) = run_campaign_with(
            &subject.program,
            &subject.table,
            &subject.schema,
            &config,
            options,
        )
        .map_err(|e| (TdgStatus::ConfigError, e.to_string()))?;
        let config_value =
            serde_json::to_value(&config).map_err(|e| (TdgStatus::RuntimeError, e.to_string()))?;
        let suite = extract_suite(&set, &subject, config_value, Some(config.seed))
            .map_err(|e| (TdgStatus::RuntimeError, e.to_string()))?;
        let render = |item, format| {
            export(item, format)
                .map(|b| String::from_utf8_lossy(&b).into_owned())
                .map_err(|e| (TdgStatus::RuntimeError, e.to_string()))
        };
        let report_csv = render(Exportable::Report(&report), Format::Csv)?;
        let suite_json = render(Exportable::Suite(&suite), Format::Json)?;
        *out = Box::into_raw(Box::new(TdgCampaign {
            report,
            report_csv,
            suite_json,
        }));
        Ok(())
    })
}

/// # Safety
/// `campaign` must be null or a handle from `tdg_campaign_run`, freed once.
#[no_mangle]
pub unsafe extern "C" fn tdg_campaign_free(campaign: *mut TdgCampaign) {
    if !campaign.is_null() {
        drop(Box::from_raw(campaign));
    }
}

/// Detected longest-path level, or -1 if none was detected.
///
/// # Safety
/// `campaign` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tdg_campaign_k_longest(campaign: *const TdgCampaign) -> i64 {
    campaign
        .as_ref()
        .and_then(|c| c.report.k_longest)
        .map_or(-1, |k| k as i64)
}

/// Detected saturation level, or -1 if none was detected.
///
/// # Safety
/// `campaign` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tdg_campaign_k_saturation(campaign: *const TdgCampaign) -> i64 {
    campaign
        .as_ref()
        .and_then(|c| c.report.k_saturation)
        .map_or(-1, |k| k as i64)
}

/// Number of unique feasible paths found; 0 for a null handle.
///
/// # Safety
/// `campaign` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tdg_campaign_path_count(campaign: *const TdgCampaign) -> usize {
    campaign
        .as_ref()
        .and_then(|c| c.report.final_row())
        .map_or(0, |r| r.ufp)
}

/// Per-step report as CSV, in a new string.
///
/// # Safety
/// `campaign` must be a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tdg_campaign_report_csv(
    campaign: *const TdgCampaign,
    out: *mut *mut c_char,
) -> TdgStatus {
    copy_out(campaign, out, |c| &c.report_csv)
}

/// Extracted test suite as JSON, in a new string.
///
/// # Safety
/// `campaign` must be a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tdg_campaign_suite_json(
    campaign: *const TdgCampaign,
    out: *mut *mut c_char,
) -> TdgStatus {
    copy_out(campaign, out, |c| &c.suite_json)
}

unsafe fn copy_out(
    campaign: *const TdgCampaign,
    out: *mut *mut c_char,
    field: impl FnOnce(&TdgCampaign) -> &String,
) -> TdgStatus {
    guard(|| {
        if out.is_null() {
            return Err((TdgStatus::NullArgument, "out is null".into()));
        }
        *out = ptr::null_mut();
        let c = campaign
            .as_ref()
            .ok_or((TdgStatus::NullArgument, "campaign is null".to_string()))?;
        *out = owned(field(c).clone());
        Ok(())
    })
}
