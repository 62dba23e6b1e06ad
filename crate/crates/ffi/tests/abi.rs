use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use radar_evidence::feature_model::{fit, write_model, CompositeMode};
use radar_evidence::radar_data::{generate, radar_frame, Feature, GeneratorConfig};
use radar_evidence_ffi::*;

fn model_file(dir: &std::path::Path) -> PathBuf {
    let data = generate(&GeneratorConfig::well_separated(3, 50, 50)).unwrap();
    let model = fit(
        &data.records,
        &[Feature::Density, Feature::Reflection, Feature::Velocity],
        &radar_frame(),
        CompositeMode::SumOfSingletons,
    )
    .unwrap();
    let path = dir.join("model.txt");
    write_model(&model, &[], &path).unwrap();
    path
}

fn last_error() -> String {
    let p = rde_last_error_message();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { rde_string_free(p) };
    s
}

#[test]
fn mass_round_trip_and_combination() {
    unsafe {
        let labels = [c"s".as_ptr(), c"m".as_ptr()];
        let mut frame = ptr::null_mut();
        assert_eq!(rde_frame_new(labels.as_ptr(), 2, &mut frame), RdeStatus::Ok);
        let mut len = 0;
        assert_eq!(rde_frame_len(frame, &mut len), RdeStatus::Ok);
        assert_eq!(len, 2);

        let mut vac = ptr::null_mut();
        assert_eq!(rde_mass_vacuous(frame, &mut vac), RdeStatus::Ok);
        let values = [0.0, 0.6, 0.1, 0.3];
        let mut a = ptr::null_mut();
        assert_eq!(rde_mass_new(frame, values.as_ptr(), 4, &mut a), RdeStatus::Ok);

        let mut c = ptr::null_mut();
        let mut k = -1.0;
        assert_eq!(rde_mass_combine(a, vac, &mut c, &mut k), RdeStatus::Ok);
        assert_eq!(k, 0.0);
        for (bits, expected) in [(1, 0.6), (2, 0.1), (3, 0.3)] {
            let mut v = 0.0;
            assert_eq!(rde_mass_get(c, bits, &mut v), RdeStatus::Ok);
            assert!((v - expected).abs() < 1e-12);
        }
        let (mut bel, mut pl) = (0.0, 0.0);
        assert_eq!(rde_mass_belief(a, 1, &mut bel), RdeStatus::Ok);
        assert_eq!(rde_mass_plausibility(a, 1, &mut pl), RdeStatus::Ok);
        assert!((bel - 0.6).abs() < 1e-12 && (pl - 0.9).abs() < 1e-12);

        let mut v = 0.0;
        assert_eq!(rde_mass_get(a, 4, &mut v), RdeStatus::FrameMismatch);
        assert!(last_error().contains("frame"));

        rde_mass_free(a);
        rde_mass_free(vac);
        rde_mass_free(c);
        rde_frame_free(frame);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut frame = ptr::null_mut();
        assert_eq!(rde_frame_radar(ptr::null_mut()), RdeStatus::NullPointer);
        assert_eq!(rde_frame_radar(&mut frame), RdeStatus::Ok);

        let s_only = [0.0, 1.0, 0.0, 0.0];
        let m_only = [0.0, 0.0, 1.0, 0.0];
        let (mut a, mut b, mut c) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(rde_mass_new(frame, s_only.as_ptr(), 4, &mut a), RdeStatus::Ok);
        assert_eq!(rde_mass_new(frame, m_only.as_ptr(), 4, &mut b), RdeStatus::Ok);
        assert_eq!(
            rde_mass_combine(a, b, &mut c, ptr::null_mut()),
            RdeStatus::TotalConflict
        );
        assert!(c.is_null());

        let short = [1.0, 0.0];
        assert_eq!(
            rde_mass_new(frame, short.as_ptr(), 2, &mut c),
            RdeStatus::InvalidArgument
        );
        assert!(last_error().contains("4"));

        let dup = [c"s".as_ptr(), c"s".as_ptr()];
        let mut f2 = ptr::null_mut();
        assert_eq!(rde_frame_new(dup.as_ptr(), 2, &mut f2), RdeStatus::InvalidArgument);

        let bad = [0xffu8, 0];
        let mut bits = 0;
        assert_eq!(
            rde_frame_parse_set(frame, bad.as_ptr().cast::<c_char>(), &mut bits),
            RdeStatus::InvalidUtf8
        );

        let mut model = ptr::null_mut();
        assert_eq!(rde_model_load(c"/no/such/model".as_ptr(), &mut model), RdeStatus::Io);

        rde_mass_free(a);
        rde_mass_free(b);
        rde_frame_free(frame);
        rde_mass_free(ptr::null_mut());
        rde_string_free(ptr::null_mut());
    }
}

#[test]
fn classify_through_the_abi() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(model_file(dir.path()).to_str().unwrap()).unwrap();
    unsafe {
        let mut model = ptr::null_mut();
        assert_eq!(rde_model_load(path.as_ptr(), &mut model), RdeStatus::Ok);

        let mut mass = ptr::null_mut();
        assert_eq!(
            rde_model_mass_from_feature(model, c"velocity".as_ptr(), 0.5, &mut mass),
            RdeStatus::Ok
        );
        let mut sm = 0.0;
        assert_eq!(rde_mass_get(mass, 3, &mut sm), RdeStatus::Ok);
        assert_eq!(sm, 0.5);
        rde_mass_free(mass);
        assert_eq!(
            rde_model_mass_from_feature(model, c"speed".as_ptr(), 0.5, &mut mass),
            RdeStatus::InvalidArgument
        );

        let record = RdeRecord {
            timestamp: 1.0,
            density: 2.0,
            reflection: 61.0,
            velocity: 0.2,
            label: c"m".as_ptr(),
        };
        let mut verdict = ptr::null_mut();
        assert_eq!(
            rde_classify(model, &record, c"velocity,reflection".as_ptr(), 0.5, &mut verdict),
            RdeStatus::Ok
        );
        let (mut decided, mut flagged, mut k) = (0, false, -1.0);
        assert_eq!(rde_verdict_decided(verdict, &mut decided), RdeStatus::Ok);
        assert_eq!(rde_verdict_spoof_flagged(verdict, &mut flagged), RdeStatus::Ok);
        assert_eq!(rde_verdict_conflict(verdict, &mut k), RdeStatus::Ok);
        assert_eq!(decided, 1);
        assert!(flagged);
        assert!((0.0..1.0).contains(&k));

        let mut combined = ptr::null_mut();
        assert_eq!(rde_verdict_combined(verdict, &mut combined), RdeStatus::Ok);
        let mut iv = RdeInterval::default();
        assert_eq!(rde_mass_interval(combined, 1, &mut iv), RdeStatus::Ok);
        assert!(iv.belief > 0.5 && iv.belief <= iv.plausibility);
        rde_mass_free(combined);

        let mut json = ptr::null_mut();
        assert_eq!(rde_verdict_explain_json(verdict, &mut json), RdeStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        rde_string_free(json);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["decided"], "s");
        assert_eq!(value["claimed"], "m");

        assert_eq!(
            rde_classify(model, &record, ptr::null(), 2.0, &mut verdict),
            RdeStatus::InvalidArgument
        );
        rde_verdict_free(verdict);
        rde_model_free(model);
    }
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(rde_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn c_program_compiles_and_runs() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libradar_evidence_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .expect("a C compiler is available as cc");
    assert!(status.success());

    let out = Command::new(&exe).arg(model_file(dir.path())).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
