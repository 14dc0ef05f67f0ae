use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use wprop_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = wprop_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn bound_round_trip() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(wprop_model_builtin(cstr("sigmoid").as_ptr(), &mut m), WpropStatus::Ok);
        let (mut di, mut do_) = (0, 0);
        assert_eq!(wprop_model_dims(m, &mut di, &mut do_), WpropStatus::Ok);
        assert_eq!((di, do_), (1, 1));

        let mut y = [0.0];
        assert_eq!(wprop_model_evaluate(m, [0.0].as_ptr(), 1, y.as_mut_ptr(), 1), WpropStatus::Ok);
        assert!((y[0] - 0.5).abs() < 1e-15);

        let mut d = ptr::null_mut();
        assert_eq!(wprop_distribution_gaussian([0.2].as_ptr(), [0.5].as_ptr(), 1, &mut d), WpropStatus::Ok);
        let mut q = ptr::null_mut();
        assert_eq!(wprop_quantizer_optimized(d, 10, &mut q), WpropStatus::Ok);
        let mut n = 0;
        assert_eq!(wprop_quantizer_len(q, &mut n), WpropStatus::Ok);
        assert_eq!(n, 10);
        let mut td = 0.0;
        assert_eq!(wprop_quantizer_theta_d(q, d, 2, &mut td), WpropStatus::Ok);

        let mut b = std::mem::zeroed::<WpropBound>();
        assert_eq!(wprop_bound(m, q, d, 0.0, 2, WpropMethod::Thm6, &mut b), WpropStatus::Ok);
        assert_eq!(b.method, WpropMethod::Thm6);
        assert!(b.value > 0.0 && b.value <= 5e-2);
        assert_eq!(b.theta_d, td);
        let mut l = std::mem::zeroed::<WpropBound>();
        assert_eq!(wprop_bound(m, q, d, 0.0, 2, WpropMethod::Lipschitz, &mut l), WpropStatus::Ok);
        assert!(b.value <= l.value + 1e-12);

        assert_eq!(wprop_bound(m, q, d, 0.1, 2, WpropMethod::Thm6, &mut b), WpropStatus::InvalidArgument);
        assert!(last_error().contains("theta"));

        wprop_quantizer_free(q);
        wprop_distribution_free(d);
        wprop_model_free(m);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(wprop_model_builtin(cstr("nope").as_ptr(), &mut m), WpropStatus::InvalidArgument);
        assert!(last_error().contains("nope"));
        assert!(m.is_null());
        assert_eq!(wprop_model_builtin(ptr::null(), &mut m), WpropStatus::NullPointer);

        let mut d = ptr::null_mut();
        assert_eq!(wprop_distribution_from_json(cstr("{not json").as_ptr(), &mut d), WpropStatus::Parse);
        assert_eq!(wprop_distribution_gaussian([0.0].as_ptr(), [-1.0].as_ptr(), 1, &mut d), WpropStatus::InvalidArgument);

        assert_eq!(wprop_model_builtin(cstr("mountain_car").as_ptr(), &mut m), WpropStatus::Ok);
        let mut y = [0.0; 1];
        assert_eq!(wprop_model_evaluate(m, [0.0].as_ptr(), 1, y.as_mut_ptr(), 1), WpropStatus::DimensionMismatch);
        assert_eq!(wprop_model_evaluate(m, [0.0, 0.0].as_ptr(), 2, y.as_mut_ptr(), 1), WpropStatus::BufferTooSmall);

        let mut q = ptr::null_mut();
        assert_eq!(wprop_quantizer_from_json(cstr("{}").as_ptr(), &mut q), WpropStatus::Parse);
        wprop_model_free(m);
        wprop_model_free(ptr::null_mut());
    }
}

#[test]
fn propagation_and_mc() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(wprop_system_builtin(cstr("quadruple_tank").as_ptr(), &mut s), WpropStatus::Ok);
        let mut th = [0.0; 3];
        let mut lip = [0.0; 3];
        assert_eq!(wprop_propagate(s, 3, 20, 5, 2, 0, th.as_mut_ptr(), lip.as_mut_ptr()), WpropStatus::Ok);
        for (a, b) in th.iter().zip(&lip) {
            assert!(*a > 0.0 && (a - b).abs() <= 1e-9 * b);
        }
        wprop_system_free(s);

        let json = r#"{"kind": "discrete", "atoms": [{"loc": [0.0], "w": 1.0}]}"#;
        let json2 = r#"{"kind": "discrete", "atoms": [{"loc": [2.0], "w": 1.0}]}"#;
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(wprop_distribution_from_json(cstr(json).as_ptr(), &mut a), WpropStatus::Ok);
        assert_eq!(wprop_distribution_from_json(cstr(json2).as_ptr(), &mut b), WpropStatus::Ok);
        let mut dim = 0;
        assert_eq!(wprop_distribution_dim(a, &mut dim), WpropStatus::Ok);
        assert_eq!(dim, 1);
        let (mut e, mut se) = (0.0, 0.0);
        assert_eq!(wprop_mc_wasserstein(a, b, 50, 3, 2, 1, &mut e, &mut se), WpropStatus::Ok);
        assert!((e - 2.0).abs() < 1e-12 && se == 0.0);
        wprop_distribution_free(a);
        wprop_distribution_free(b);
    }
}

#[test]
fn header_declares_the_api() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/wprop.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in [
        "wprop_last_error",
        "wprop_bound",
        "wprop_propagate",
        "typedef struct WpropModel WpropModel",
        "WPROP_STATUS_BUDGET_EXHAUSTED",
    ] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    // compile a small C client against the header when a compiler is present
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    std::fs::write(
        &src,
        "#include \"wprop.h\"\nint main(void) { WpropModel *m = 0; WpropStatus s = wprop_model_builtin(\"sigmoid\", &m); wprop_model_free(m); return s == WPROP_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let inc = header.parent().unwrap();
    match Command::new("cc").arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg("-I").arg(inc).arg(&src).status() {
        Ok(st) => assert!(st.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler; skipped syntax check"),
    }
}
