use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use evagap_ffi::*;

const T2_EVA: [f64; 9] = [
    10.74, 11.00, 11.01, 11.04, 10.69, 10.56, 10.44, 10.31, 10.18,
];

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures/georgia")
        .join(name)
}

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = evagap_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn load(name: &str) -> *mut EvagapEconomy {
    let path = cstr(fixture(name).to_str().unwrap());
    let mut econ = ptr::null_mut();
    assert_eq!(
        unsafe { evagap_economy_from_file(path.as_ptr(), &mut econ) },
        EvagapStatus::Ok
    );
    econ
}

#[test]
fn historical_eva_through_handles() {
    let econ = load("economy.json");
    let mut series = ptr::null_mut();
    unsafe {
        assert_eq!(evagap_economy_eva(econ, &mut series), EvagapStatus::Ok);
        assert_eq!(evagap_eva_series_len(series), 9);
        let mut rec = EvagapEvaRecord::default();
        assert_eq!(
            evagap_eva_series_record(series, 8, &mut rec),
            EvagapStatus::Ok
        );
        assert_eq!(rec.year, 2022);
        assert!((rec.eva - 8.78).abs() < 0.01);
        assert!((rec.eva + rec.capital_charge - rec.nopat).abs() < 1e-12);

        assert_eq!(
            evagap_eva_series_record(series, 9, &mut rec),
            EvagapStatus::OutOfRange
        );
        assert!(last_error().contains("out of range"));

        let mut sum = EvagapEvaSummary::default();
        assert_eq!(
            evagap_eva_series_summary(series, &mut sum),
            EvagapStatus::Ok
        );
        assert!(evagap_last_error_message().is_null());
        assert!((sum.mean - 3.58).abs() < 0.02);
        assert_eq!((sum.min_year, sum.max_year), (2020, 2022));

        evagap_eva_series_free(series);
        evagap_economy_free(econ);
    }
}

#[test]
fn csv_backed_economy_from_json_text() {
    let text = std::fs::read_to_string(fixture("economy_csv.json")).unwrap();
    let json = cstr(&text);
    let dir = cstr(fixture("").to_str().unwrap());
    let mut econ = ptr::null_mut();
    unsafe {
        assert_eq!(
            evagap_economy_from_json(json.as_ptr(), dir.as_ptr(), &mut econ),
            EvagapStatus::Ok
        );
        evagap_economy_free(econ);
        assert_eq!(
            evagap_economy_from_json(json.as_ptr(), ptr::null(), &mut econ),
            EvagapStatus::InvalidInput
        );
    }
}

#[test]
fn projection_and_present_value() {
    let econ = load("economy.json");
    let proj = cstr(&std::fs::read_to_string(fixture("projection.json")).unwrap());
    let mut series = ptr::null_mut();
    let mut rate = 0.0;
    unsafe {
        assert_eq!(
            evagap_economy_project_eva(econ, proj.as_ptr(), ptr::null(), &mut series, &mut rate),
            EvagapStatus::Ok
        );
        assert_eq!(rate, 0.083);
        let n = evagap_eva_series_len(series);
        assert_eq!(n, 9);
        let mut values = Vec::new();
        for (i, want) in T2_EVA.iter().enumerate() {
            let mut rec = EvagapEvaRecord::default();
            assert_eq!(
                evagap_eva_series_record(series, i, &mut rec),
                EvagapStatus::Ok
            );
            assert_eq!(rec.year, i as i32 + 1);
            assert!((rec.eva - want).abs() < 0.08);
            values.push(rec.eva);
        }
        let mut pv = 0.0;
        assert_eq!(
            evagap_present_value(values.as_ptr(), n, rate, &mut pv),
            EvagapStatus::Ok
        );
        assert!((pv - 66.2).abs() < 0.5);
        assert_eq!(
            evagap_present_value(ptr::null(), 0, rate, &mut pv),
            EvagapStatus::Ok
        );
        assert_eq!(pv, 0.0);
        evagap_eva_series_free(series);
        evagap_economy_free(econ);
    }
}

#[test]
fn scalar_formulas() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(evagap_nopat(17.63, 0.122, &mut v), EvagapStatus::Ok);
        assert!((v - 15.48).abs() < 0.005);
        assert_eq!(
            evagap_total_wealth(74.58, 61.80, 14.32, -15.29, &mut v),
            EvagapStatus::Ok
        );
        assert!((v - 135.41).abs() < 1e-9);
        assert_eq!(
            evagap_eva_value(15.48, 135.41, 0.08248, &mut v),
            EvagapStatus::Ok
        );
        assert!((v - 4.31).abs() < 0.01);
        assert_eq!(
            evagap_implied_cbr(24.78, 0.122, 157.38, 8.78, &mut v),
            EvagapStatus::Ok
        );
        assert!((v - 0.08248).abs() < 2e-4);
        assert_eq!(
            evagap_implied_cbr(1.0, 0.1, 0.0, 1.0, &mut v),
            EvagapStatus::InvalidInput
        );
        assert!(last_error().contains("wealth"));
        assert_eq!(
            evagap_nopat(1.0, 0.1, ptr::null_mut()),
            EvagapStatus::NullPointer
        );

        assert_eq!(evagap_student_t_cdf(0.0, 4, &mut v), EvagapStatus::Ok);
        assert_eq!(v, 0.5);
        assert_eq!(evagap_p_value(0.901, 5, &mut v), EvagapStatus::Ok);
        assert!((v - 0.0366).abs() < 0.001);
        assert_eq!(evagap_p_value(0.5, 2, &mut v), EvagapStatus::InvalidInput);
    }
}

#[test]
fn elasticity_and_collinearity() {
    let rd: [f64; 9] = [
        0.0406, 0.0421, 0.0445, 0.0452, 0.0480, 0.0497, 0.0503, 0.0541, 0.0570,
    ];
    let noise = [1.0, 1.002, 0.998, 1.001, 0.999, 1.003, 0.997, 1.0, 1.001];
    let gdp: Vec<f64> = rd
        .iter()
        .zip(noise)
        .map(|(x, e)| 40.0 * x.powf(0.07) * e)
        .collect();
    let mut out = EvagapRegression::default();
    unsafe {
        assert_eq!(
            evagap_estimate_elasticity(rd.as_ptr(), gdp.as_ptr(), rd.len(), &mut out),
            EvagapStatus::Ok
        );
        assert_eq!(out.n, 9);
        assert!((out.r_squared - out.pearson_r * out.pearson_r).abs() < 1e-15);
        assert!(out.p_value > 0.0 && out.p_value < 1.0);

        assert_eq!(
            evagap_estimate_elasticity(rd.as_ptr(), rd.as_ptr(), rd.len(), &mut out),
            EvagapStatus::InvalidInput
        );
        assert!(last_error().contains("collinear"));
        assert_eq!(
            evagap_estimate_elasticity(ptr::null(), rd.as_ptr(), 3, &mut out),
            EvagapStatus::NullPointer
        );
    }
}

#[test]
fn investment_and_years_to_close() {
    let amounts = [47.7, 5.0, 3.0, 5.0, 1.0];
    let mut total = 0.0;
    let mut years = 99;
    unsafe {
        assert_eq!(
            evagap_total_required_investment(amounts.as_ptr(), amounts.len(), &mut total),
            EvagapStatus::Ok
        );
        assert_eq!(total, 61.7);
        assert_eq!(
            evagap_years_to_close(T2_EVA.as_ptr(), 9, 0.083, total, &mut years),
            EvagapStatus::Ok
        );
        assert_eq!(years, 9);
        assert_eq!(
            evagap_years_to_close(T2_EVA.as_ptr(), 9, 0.083, 1000.0, &mut years),
            EvagapStatus::Ok
        );
        assert_eq!(years, 0);
        let bad = [1.0, -2.0];
        assert_eq!(
            evagap_total_required_investment(bad.as_ptr(), 2, &mut total),
            EvagapStatus::InvalidInput
        );
    }
}

#[test]
fn rating_gap_json_round_trip() {
    let read = |n: &str| cstr(&std::fs::read_to_string(fixture(n)).unwrap());
    let (subject, peers, gap) = (read("subject.csv"), read("peers.csv"), read("gap.json"));
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(
            evagap_rating_gap_json(subject.as_ptr(), peers.as_ptr(), gap.as_ptr(), &mut out),
            EvagapStatus::Ok
        );
        let text = CStr::from_ptr(out).to_str().unwrap().to_owned();
        evagap_string_free(out);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["subject_country"], "Georgia");
        assert_eq!(v["total_required_investment"], 61.7);

        let all_out = cstr(
            r#"{"exclusions": {"debt_gdp": ["Greece", "Hungary", "India", "Kazakhstan"]},
                               "investment_components": [{"name": "x", "amount": 1}]}"#,
        );
        assert_eq!(
            evagap_rating_gap_json(subject.as_ptr(), peers.as_ptr(), all_out.as_ptr(), &mut out),
            EvagapStatus::Infeasible
        );
        assert!(last_error().contains("debt_gdp"));
        assert_eq!(
            evagap_rating_gap_json(peers.as_ptr(), peers.as_ptr(), gap.as_ptr(), &mut out),
            EvagapStatus::InvalidInput
        );
        evagap_string_free(ptr::null_mut());
    }
}

#[test]
fn invalid_utf8_is_reported() {
    let bytes = [0xffu8, 0xfe, 0];
    let mut econ = ptr::null_mut();
    let status = unsafe { evagap_economy_from_json(bytes.as_ptr().cast(), ptr::null(), &mut econ) };
    assert_eq!(status, EvagapStatus::InvalidUtf8);
}

#[test]
fn header_is_current_and_c_program_links() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(manifest.join("include/evagap.h")).unwrap();
    for sym in [
        "evagap_economy_from_file",
        "evagap_rating_gap_json",
        "EVAGAP_STATUS_INFEASIBLE",
    ] {
        assert!(header.contains(sym), "header lacks {sym}");
    }

    // Integration tests run from target/<profile>/deps; the static library sits one level up.
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libevagap_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());

    let out_dir = tempfile::tempdir().unwrap();
    let bin = out_dir.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let run = Command::new(&bin)
        .arg(fixture("economy.json"))
        .output()
        .unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
