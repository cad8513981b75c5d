//! C ABI over the evagap toolkit.
//!
//! Every fallible function returns an [`EvagapStatus`] and writes its result
//! through an out-pointer. On failure a message is kept per thread and can be
//! read with [`evagap_last_error_message`].
//!
//! Objects are opaque handles created by `*_from_*` or producer functions and
//! released with the matching `*_free`. Strings returned through out-pointers
//! are owned by the caller and released with [`evagap_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use evagap::eva::{self, EvaSeries};
use evagap::indicators::{
    load_economy_file, load_economy_in, parse_peer_table, CountryEconomy, IndicatorSeries, Unit,
};
use evagap::projection::{load_projection_in, present_value, project_eva};
use evagap::ratinggap::{
    load_gap_config, rating_gap_report, total_required_investment, years_to_close,
    InvestmentComponent, RatingGapError, YearsToClose,
};
use evagap::regression::{self, estimate_elasticity};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvagapStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Inputs failed validation or a computation was undefined for them.
    InvalidInput = 3,
    /// Inputs were valid but the analysis cannot be completed.
    Infeasible = 4,
    /// An index was past the end of a collection.
    OutOfRange = 5,
    /// An internal panic was caught at the boundary.
    Internal = 99,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(EvagapStatus, String);

impl Failure {
    fn input(e: impl std::fmt::Display) -> Self {
        Failure(EvagapStatus::InvalidInput, e.to_string())
    }
}

type FfiResult = Result<(), Failure>;

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> FfiResult) -> EvagapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            EvagapStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            EvagapStatus::Internal
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(EvagapStatus::NullPointer, format!("`{name}` is NULL")))
}

unsafe fn in_ref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(EvagapStatus::NullPointer, format!("`{name}` is NULL")))
}

unsafe fn in_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(
            EvagapStatus::NullPointer,
            format!("`{name}` is NULL"),
        ));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(EvagapStatus::InvalidUtf8, format!("`{name}` is not UTF-8")))
}

unsafe fn opt_str<'a>(p: *const c_char, name: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        in_str(p, name).map(Some)
    }
}

unsafe fn in_slice<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure(
            EvagapStatus::NullPointer,
            format!("`{name}` is NULL"),
        ));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(EvagapStatus::Internal, "string contains NUL".into()))
}

/// Message of the last failed call on this thread, or NULL after a success.
///
/// The pointer stays valid until the next evagap call on the same thread.
#[no_mangle]
pub extern "C" fn evagap_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn evagap_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn evagap_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// A validated country economy.
pub struct EvagapEconomy(CountryEconomy);

/// An ordered EVA series, historical or projected.
pub struct EvagapEvaSeries(EvaSeries);

/// One year (or projection offset) of an EVA series.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EvagapEvaRecord {
    pub year: i32,
    pub gdp: f64,
    pub nopat: f64,
    pub total_wealth: f64,
    pub capital_charge: f64,
    pub eva: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EvagapEvaSummary {
    pub mean: f64,
    pub min: f64,
    pub min_year: i32,
    pub max: f64,
    pub max_year: i32,
}

/// Log-log elasticity estimate with significance.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EvagapRegression {
    pub slope: f64,
    pub intercept: f64,
    pub pearson_r: f64,
    pub r_squared: f64,
    pub t_statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Loads an economy from its JSON configuration text.
///
/// Relative series paths resolve against `base_dir`, which may be NULL when
/// every series is inline.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evagap_economy_from_json(
    json: *const c_char,
    base_dir: *const c_char,
    out: *mut *mut EvagapEconomy,
) -> EvagapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let text = in_str(json, "json")?;
        let dir = opt_str(base_dir, "base_dir")?;
        let loaded = load_economy_in(text, dir.map(Path::new)).map_err(Failure::input)?;
        *out = Box::into_raw(Box::new(EvagapEconomy(loaded.economy)));
        Ok(())
    })
}

/// Loads an economy from a JSON file; series paths resolve next to it.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evagap_economy_from_file(
    path: *const c_char,
    out: *mut *mut EvagapEconomy,
) -> EvagapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let path = in_str(path, "path")?;
        let loaded = load_economy_file(Path::new(path)).map_err(Failure::input)?;
        *out = Box::into_raw(Box::new(EvagapEconomy(loaded.economy)));
        Ok(())
    })
}

/// # Safety
/// `econ` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn evagap_economy_free(econ: *mut EvagapEconomy) {
    if !econ.is_null() {
        drop(Box::from_raw(econ));
    }
}

/// Year-by-year EVA over the economy's history.
///
/// # Safety
/// `econ` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evagap_economy_eva(
    econ: *const EvagapEconomy,
    out: *mut *mut EvagapEvaSeries,
) -> EvagapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let econ = in_ref(econ, "econ")?;
        let series = eva::eva_series(&econ.0).map_err(Failure::input)?;
        *out = Box::into_raw(Box::new(EvagapEvaSeries(series)));
        Ok(())
    })
}

/// Projected EVA under a scenario given as projection JSON text.
///
/// Records are keyed by offsets 1..horizon. When `discount_rate` is not NULL
/// it receives the scenario's discount rate (the central bank rate when the
/// scenario sets none).
///
/// # Safety
/// `econ` must be a live handle; strings NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn evagap_economy_project_eva(
    econ: *const EvagapEconomy,
    projection_json: *const c_char,
    base_dir: *const c_char,
    out: *mut *mut EvagapEvaSeries,
    discount_rate: *mut f64,
) -> EvagapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let econ = in_ref(econ, "econ")?;
        let text = in_str(projection_json, "projection_json")?;
        let dir = opt_str(base_dir, "base_dir")?;
        let cfg = load_projection_in(text, dir.map(Path::new))
            .map_err(Failure::input)?
            .config;
        let series = project_eva(&econ.0, &cfg).map_err(Failure::input)?;
        if let Some(rate) = discount_rate.as_mut() {
            *rate = cfg.discount_rate_for(&econ.0);
        }
        *out = Box::into_raw(Box::new(EvagapEvaSeries(series)));
        Ok(())
    })
}

/// Number of records; 0 for NULL.
///
/// # Safety
/// `series` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn evagap_eva_series_len(series: *const EvagapEvaSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.records().len())
}

/// # Safety
/// `series` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evagap_eva_series_record(
    series: *const EvagapEvaSeries,
    index: usize,
    out: *mut EvagapEvaRecord,
) -> EvagapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let series = in_ref(series, "series")?;
        let records = series.0.records();
        let r = records.get(index).ok_or_else(|| {
            Failure(
                EvagapStatus::OutOfRange,
                format!("index {index} out of range for {} records", records.len()),
            )
        })?;
        *out = EvagapEvaRecord {
            year: r.year,
            gdp: r.gdp,
            nopat: r.nopat,
            total_wealth: r.total_wealth,
            capital_charge: r.capital_charge,
            eva: r.eva,
        };
        Ok(())
    })
}

/// Mean, minimum and maximum EVA; ties resolve to the earliest year.
///
/// # Safety
/// `series` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evagap_eva_series_summary(
    series: *const EvagapEvaSeries,
    out: *mut EvagapEvaSummary,
) -> EvagapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let s = in_ref(series, "series")?.0.summary();
        *out = EvagapEvaSummary {
            mean: s.mean,
            min: s.min,
            min_year: s.min_year,
            max: s.max,
            max_year: s.max_year,
        };
        Ok(())
    })
}

/// # Safety
/// `series` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn evagap_eva_series_free(series: *mut EvagapEvaSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// `gdp * (1 - atr)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evagap_nopat(gdp: f64, atr: f64, out: *mut f64) -> EvagapStatus {
    guard(|| {
        *out_ref(out, "out")? = eva::nopat(gdp, atr).map_err(Failure::input)?;
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evagap_total_wealth(
    produced: f64,
    human: f64,
    natural: f64,
    net_foreign: f64,
    out: *mut f64,
) -> EvagapStatus {
    guard(|| {
        *out_ref(out, "out")? =
            eva::total_wealth(produced, human, natural, net_foreign).map_err(Failure::input)?;
        Ok(())
    })
}

/// `nopat - total_wealth * cbr`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evagap_eva_value(
    nopat: f64,
    total_wealth: f64,
    cbr: f64,
    out: *mut f64,
) -> EvagapStatus {
    guard(|| {
        *out_ref(out, "out")? = eva::eva_value(nopat, total_wealth, cbr).map_err(Failure::input)?;
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evagap_implied_cbr(
    gdp: f64,
    atr: f64,
    total_wealth: f64,
    eva_value: f64,
    out: *mut f64,
) -> EvagapStatus {
    guard(|| {
        *out_ref(out, "out")? =
            eva::implied_cbr(gdp, atr, total_wealth, eva_value).map_err(Failure::input)?;
        Ok(())
    })
}

/// Student's t cumulative distribution.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evagap_student_t_cdf(t: f64, df: u32, out: *mut f64) -> EvagapStatus {
    guard(|| {
        *out_ref(out, "out")? = regression::student_t_cdf(t, df).map_err(Failure::input)?;
        Ok(())
    })
}

/// Two-sided p-value of a correlation `r` over `n` observations.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evagap_p_value(r: f64, n: usize, out: *mut f64) -> EvagapStatus {
    guard(|| {
        *out_ref(out, "out")? = regression::p_value(r, n).map_err(Failure::input)?;
        Ok(())
    })
}

/// Log-log elasticity of `gdp` with respect to `rd`, both of length `len`
/// and aligned by position.
///
/// # Safety
/// `rd` and `gdp` must each point to `len` readable doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn evagap_estimate_elasticity(
    rd: *const f64,
    gdp: *const f64,
    len: usize,
    out: *mut EvagapRegression,
) -> EvagapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let series = |name: &str, values: &[f64]| {
            let points = values
                .iter()
                .enumerate()
                .map(|(i, &v)| (i as i32 + 1, v))
                .collect();
            IndicatorSeries::new(name, Unit::BillionsUsd, points).map_err(Failure::input)
        };
        let rd = series("rd", in_slice(rd, len, "rd")?)?;
        let gdp = series("gdp", in_slice(gdp, len, "gdp")?)?;
        let r = estimate_elasticity(&rd, &gdp).map_err(Failure::input)?;
        *out = EvagapRegression {
            slope: r.slope,
            intercept: r.intercept,
            pearson_r: r.pearson_r,
            r_squared: r.r_squared,
            t_statistic: r.t_statistic,
            p_value: r.p_value,
            n: r.n,
        };
        Ok(())
    })
}

/// End-of-period present value of `len` cash flows.
///
/// # Safety
/// `values` must point to `len` readable doubles (may be NULL when `len` is 0).
#[no_mangle]
pub unsafe extern "C" fn evagap_present_value(
    values: *const f64,
    len: usize,
    rate: f64,
    out: *mut f64,
) -> EvagapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = present_value(in_slice(values, len, "values")?, rate).map_err(Failure::input)?;
        Ok(())
    })
}

/// First period whose cumulative discounted EVA covers `required`.
///
/// `out_years` receives 0 when the requirement is never covered.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out_years` writable.
#[no_mangle]
pub unsafe extern "C" fn evagap_years_to_close(
    values: *const f64,
    len: usize,
    rate: f64,
    required: f64,
    out_years: *mut u32,
) -> EvagapStatus {
    guard(|| {
        let out = out_ref(out_years, "out_years")?;
        let values = in_slice(values, len, "values")?;
        *out = match years_to_close(values, rate, required).map_err(Failure::input)? {
            YearsToClose::Years(k) => k,
            YearsToClose::Unreachable => 0,
        };
        Ok(())
    })
}

/// Order-independent sum of non-negative investment amounts.
///
/// # Safety
/// `amounts` must point to `len` readable doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn evagap_total_required_investment(
    amounts: *const f64,
    len: usize,
    out: *mut f64,
) -> EvagapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let comps: Vec<_> = in_slice(amounts, len, "amounts")?
            .iter()
            .enumerate()
            .map(|(i, &a)| InvestmentComponent::new(format!("component {}", i + 1), a))
            .collect();
        *out = total_required_investment(&comps).map_err(Failure::input)?;
        Ok(())
    })
}

/// Rating-gap analysis as a JSON document.
///
/// `subject_csv` is a one-row peer-format table and `peers_csv` the peer
/// table, both with header. The result is written to `out_json` and must be
/// released with [`evagap_string_free`]. An indicator left without peers after
/// exclusions yields [`EvagapStatus::Infeasible`].
///
/// # Safety
/// String arguments must be NUL-terminated; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn evagap_rating_gap_json(
    subject_csv: *const c_char,
    peers_csv: *const c_char,
    gap_config_json: *const c_char,
    out_json: *mut *mut c_char,
) -> EvagapStatus {
    guard(|| {
        let out = out_ref(out_json, "out_json")?;
        let subject =
            parse_peer_table(in_str(subject_csv, "subject_csv")?).map_err(Failure::input)?;
        let [subject] = <[_; 1]>::try_from(subject).map_err(|v| {
            Failure::input(format!(
                "subject table must hold one row, found {}",
                v.len()
            ))
        })?;
        let peers = parse_peer_table(in_str(peers_csv, "peers_csv")?).map_err(Failure::input)?;
        let cfg =
            load_gap_config(in_str(gap_config_json, "gap_config_json")?).map_err(Failure::input)?;
        let report = rating_gap_report(&subject, &peers, &cfg, None).map_err(|e| match e {
            RatingGapError::EmptyInclusion(_) | RatingGapError::NoPeers => {
                Failure(EvagapStatus::Infeasible, e.to_string())
            }
            other => Failure::input(other),
        })?;
        let json = serde_json::to_string(&report)
            .map_err(|e| Failure(EvagapStatus::Internal, e.to_string()))?;
        *out = into_c_string(json)?;
        Ok(())
    })
}
