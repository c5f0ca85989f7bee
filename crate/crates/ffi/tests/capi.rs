use std::f64::consts::PI;
use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use krauslab_ffi::*;

unsafe fn matrix(rows: usize, cols: usize, data: &[f64]) -> *mut KlMatrix {
    let mut m = ptr::null_mut();
    assert_eq!(kl_matrix_new(rows, cols, data.as_ptr(), &mut m), KlStatus::Ok);
    m
}

unsafe fn entries(m: *const KlMatrix) -> Vec<f64> {
    let n = 2 * kl_matrix_rows(m) * kl_matrix_cols(m);
    let mut buf = vec![0.0; n];
    assert_eq!(kl_matrix_copy_data(m, buf.as_mut_ptr(), n), KlStatus::Ok);
    buf
}

unsafe fn last_error() -> String {
    let p = kl_last_error_message();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

unsafe fn bloch_state(r: f64, theta: f64, phi: f64) -> *mut KlState {
    let mut s = ptr::null_mut();
    assert_eq!(kl_state_from_bloch(KlBloch { r, theta, phi }, &mut s), KlStatus::Ok);
    s
}

#[test]
fn matrix_handles() {
    unsafe {
        let m = matrix(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0]);
        assert_eq!((kl_matrix_rows(m), kl_matrix_cols(m)), (2, 3));
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(kl_matrix_get(m, 1, 2, &mut re, &mut im), KlStatus::Ok);
        assert_eq!((re, im), (11.0, 12.0));
        assert_eq!(kl_matrix_get(m, 2, 0, &mut re, &mut im), KlStatus::InvalidArgument);
        assert!(last_error().contains("outside"));

        let mut small = [0.0; 4];
        assert_eq!(kl_matrix_copy_data(m, small.as_mut_ptr(), 4), KlStatus::InvalidArgument);
        kl_matrix_free(m);

        assert_eq!(kl_matrix_rows(ptr::null()), 0);
        kl_matrix_free(ptr::null_mut());
    }
}

#[test]
fn null_and_invalid_inputs() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(kl_matrix_new(2, 2, ptr::null(), &mut out), KlStatus::NullPointer);
        assert!(out.is_null());

        let nan = [f64::NAN, 0.0];
        assert_eq!(kl_matrix_new(1, 1, nan.as_ptr(), &mut out), KlStatus::InvalidArgument);

        let bad = matrix(2, 2, &[1.5, 0.0, 0.0, 0.0, 0.0, 0.0, -0.5, 0.0]);
        let mut s = ptr::null_mut();
        assert_eq!(kl_state_from_matrix(bad, 1e-10, &mut s), KlStatus::InvalidState);
        assert!(s.is_null());
        kl_matrix_free(bad);

        assert_eq!(
            kl_state_from_bloch(KlBloch { r: 1.5, theta: 0.0, phi: 0.0 }, &mut s),
            KlStatus::InvalidArgument
        );
        assert_eq!(kl_kraus_cnot_analytic(2.0, 0.0, &mut ptr::null_mut()), KlStatus::InvalidArgument);
    }
}

#[test]
fn state_round_trip() {
    unsafe {
        let s = bloch_state(0.6, 1.1, -2.0);
        assert_eq!(kl_state_dim(s), 2);
        let mut b = KlBloch { r: 0.0, theta: 0.0, phi: 0.0 };
        assert_eq!(kl_state_to_bloch(s, &mut b), KlStatus::Ok);
        assert!((b.r - 0.6).abs() < 1e-12);
        assert!((b.theta - 1.1).abs() < 1e-12);
        assert!((b.phi - (2.0 * PI - 2.0)).abs() < 1e-12, "phi is reported in [0, 2π)");

        let mut m = ptr::null_mut();
        assert_eq!(kl_state_matrix(s, &mut m), KlStatus::Ok);
        let mut copy = ptr::null_mut();
        assert_eq!(kl_state_from_matrix(m, 1e-10, &mut copy), KlStatus::Ok);
        let mut d = 1.0;
        assert_eq!(kl_state_trace_distance(s, copy, &mut d), KlStatus::Ok);
        assert!(d < 1e-14);

        kl_matrix_free(m);
        kl_state_free(copy);
        kl_state_free(s);
    }
}

#[test]
fn kraus_builders_agree_and_verify() {
    unsafe {
        let b0 = KlBloch { r: 0.4, theta: 0.7, phi: 0.3 };
        let bt = KlBloch { r: 0.8, theta: 2.1, phi: -1.2 };
        let rho0 = bloch_state(b0.r, b0.theta, b0.phi);
        let rhot = bloch_state(bt.r, bt.theta, bt.phi);

        let mut general = ptr::null_mut();
        let mut closed = ptr::null_mut();
        let mut mp = ptr::null_mut();
        assert_eq!(kl_kraus_general(rho0, rhot, &mut general), KlStatus::Ok);
        assert_eq!(kl_kraus_closed_form(b0, bt, &mut closed), KlStatus::Ok);
        assert_eq!(kl_kraus_measure_prepare(rho0, rhot, &mut mp), KlStatus::Ok);
        assert_eq!(kl_kraus_len(general), 2);
        assert_eq!(kl_kraus_len(mp), 4);

        for k in [general, closed, mp] {
            let mut rep = KlChannelReport {
                completeness_residual: 1.0,
                reconstruction_residual: 1.0,
                choi_min_eigenvalue: -1.0,
                output_trace_residual: 1.0,
                output_min_eigenvalue: -1.0,
            };
            assert_eq!(kl_kraus_verify(k, rho0, rhot, &mut rep), KlStatus::Ok);
            assert!(rep.completeness_residual < 1e-12, "{rep:?}");
            assert!(rep.reconstruction_residual < 1e-12, "{rep:?}");
            assert!(rep.choi_min_eigenvalue > -1e-12, "{rep:?}");

            let mut out = ptr::null_mut();
            assert_eq!(kl_kraus_apply(k, rho0, 1e-10, &mut out), KlStatus::Ok);
            let mut d = 1.0;
            assert_eq!(kl_state_trace_distance(out, rhot, &mut d), KlStatus::Ok);
            assert!(d < 1e-12);
            kl_state_free(out);
        }

        for i in 0..2 {
            let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
            assert_eq!(kl_kraus_op(general, i, &mut a), KlStatus::Ok);
            assert_eq!(kl_kraus_op(closed, i, &mut b), KlStatus::Ok);
            let diff = entries(a)
                .iter()
                .zip(entries(b))
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            assert!(diff < 1e-10, "operator {i} differs by {diff}");
            kl_matrix_free(a);
            kl_matrix_free(b);
        }
        let mut none = ptr::null_mut();
        assert_eq!(kl_kraus_op(general, 2, &mut none), KlStatus::InvalidArgument);

        kl_kraus_free(general);
        kl_kraus_free(closed);
        kl_kraus_free(mp);
        kl_state_free(rho0);
        kl_state_free(rhot);
    }
}

#[test]
fn from_ops_remix_and_json() {
    unsafe {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m0 = matrix(2, 2, &[s, 0.0, 0.0, 0.0, 0.0, 0.0, s, 0.0]);
        let m1 = matrix(2, 2, &[0.0, 0.0, s, 0.0, s, 0.0, 0.0, 0.0]);
        let mut k = ptr::null_mut();
        assert_eq!(kl_kraus_from_ops([m0 as *const _, m1].as_ptr(), 2, &mut k), KlStatus::Ok);
        kl_matrix_free(m0);
        kl_matrix_free(m1);

        let hadamard = matrix(2, 2, &[s, 0.0, s, 0.0, s, 0.0, -s, 0.0]);
        let mut mixed = ptr::null_mut();
        assert_eq!(kl_kraus_remix(k, hadamard, &mut mixed), KlStatus::Ok);
        assert_eq!(kl_kraus_len(mixed), 2);

        let rho = bloch_state(0.9, 0.4, 1.0);
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(kl_kraus_apply(k, rho, 1e-10, &mut a), KlStatus::Ok);
        assert_eq!(kl_kraus_apply(mixed, rho, 1e-10, &mut b), KlStatus::Ok);
        let mut d = 1.0;
        assert_eq!(kl_state_trace_distance(a, b, &mut d), KlStatus::Ok);
        assert!(d < 1e-14);

        let not_unitary = matrix(2, 2, &[1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let mut bad = ptr::null_mut();
        assert_eq!(kl_kraus_remix(k, not_unitary, &mut bad), KlStatus::NotUnitary);

        let mut text = ptr::null_mut();
        assert_eq!(kl_kraus_to_json(k, &mut text), KlStatus::Ok);
        let json = CStr::from_ptr(text).to_str().unwrap().to_owned();
        kl_string_free(text);
        assert!(json.starts_with("{\"d_in\":2,\"d_out\":2,\"ops\":["), "{json}");

        for p in [hadamard, not_unitary] {
            kl_matrix_free(p);
        }
        kl_state_free(a);
        kl_state_free(b);
        kl_state_free(rho);
        kl_kraus_free(k);
        kl_kraus_free(mixed);
    }
}

#[test]
fn incomplete_set_is_rejected_on_apply() {
    unsafe {
        let half = matrix(2, 2, &[0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0]);
        let mut k = ptr::null_mut();
        assert_eq!(kl_kraus_from_ops([half as *const _].as_ptr(), 1, &mut k), KlStatus::Ok);
        let rho = bloch_state(0.0, 0.0, 0.0);
        let mut out = ptr::null_mut();
        assert_eq!(kl_kraus_apply(k, rho, 1e-10, &mut out), KlStatus::Completeness);
        assert!(out.is_null());
        assert!(last_error().contains("completeness"));
        kl_matrix_free(half);
        kl_state_free(rho);
        kl_kraus_free(k);
    }
}

#[test]
fn cnot_example_through_the_abi() {
    unsafe {
        let (r0, t) = (0.5, PI / 2.0);
        let (mut rho_t, mut delta) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(kl_cnot_evolve(r0, t, &mut rho_t, &mut delta), KlStatus::Ok);
        let d = entries(delta);
        let expected = [0.375, 0.0, 0.0, 0.0, 0.0, 0.0, -0.375, 0.0];
        for (x, y) in d.iter().zip(expected) {
            assert!((x - y).abs() < 1e-12, "{d:?}");
        }

        let mut k = ptr::null_mut();
        assert_eq!(kl_kraus_cnot_analytic(r0, 0.9, &mut k), KlStatus::Ok);
        let rho0 = bloch_state(r0, PI, 0.0);
        let mut at = ptr::null_mut();
        assert_eq!(kl_cnot_evolve(r0, 0.9, &mut at, ptr::null_mut()), KlStatus::Ok);
        let mut rep = std::mem::zeroed::<KlChannelReport>();
        assert_eq!(kl_kraus_verify(k, rho0, at, &mut rep), KlStatus::Ok);
        assert!(rep.completeness_residual < 1e-12 && rep.reconstruction_residual < 1e-12, "{rep:?}");

        kl_state_free(rho_t);
        kl_state_free(at);
        kl_state_free(rho0);
        kl_matrix_free(delta);
        kl_kraus_free(k);
    }
}

#[test]
fn local_unitary_factorisation() {
    unsafe {
        // σx ⊗ σz
        let mut data = [0.0; 32];
        for (row, col, v) in [(0, 2, 1.0), (1, 3, -1.0), (2, 0, 1.0), (3, 1, -1.0)] {
            data[2 * (4 * row + col)] = v;
        }
        let u = matrix(4, 4, &data);
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(kl_factor_local_unitary(u, 2, 2, 1e-10, &mut a, &mut b), KlStatus::Ok);
        assert_eq!((kl_matrix_rows(a), kl_matrix_rows(b)), (2, 2));
        kl_matrix_free(a);
        kl_matrix_free(b);
        kl_matrix_free(u);

        // CNOT is entangling.
        let mut data = [0.0; 32];
        for (row, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            data[2 * (4 * row + col)] = 1.0;
        }
        let cnot = matrix(4, 4, &data);
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(kl_factor_local_unitary(cnot, 2, 2, 1e-10, &mut a, &mut b), KlStatus::NotFactorable);
        assert!(a.is_null() && b.is_null());
        kl_matrix_free(cnot);
    }
}

#[test]
fn default_tolerance_matches_core() {
    assert_eq!(kl_default_tolerance(), krauslab::DEFAULT_TOL);
}

const C_SMOKE: &str = r#"
#include <math.h>
#include <stdio.h>
#include "krauslab.h"

int main(void) {
    KlBloch b0 = {0.3, 1.0, 0.5};
    KlBloch bt = {0.9, 2.0, -0.5};
    KlKrausSet *k = NULL;
    KlState *rho0 = NULL, *rhot = NULL;
    KlChannelReport rep;
    if (kl_kraus_closed_form(b0, bt, &k) != KL_STATUS_OK) return 10;
    if (kl_state_from_bloch(b0, &rho0) != KL_STATUS_OK) return 11;
    if (kl_state_from_bloch(bt, &rhot) != KL_STATUS_OK) return 12;
    if (kl_kraus_verify(k, rho0, rhot, &rep) != KL_STATUS_OK) return 13;
    if (rep.reconstruction_residual > 1e-12) return 14;
    if (kl_state_from_matrix(NULL, 1e-10, &rho0) != KL_STATUS_NULL_POINTER) return 15;
    if (kl_last_error_message() == NULL) return 16;
    printf("%zu\n", kl_kraus_len(k));
    kl_kraus_free(k);
    kl_state_free(rho0);
    kl_state_free(rhot);
    return 0;
}
"#;

/// Compiles a C program against the generated header and the shared library.
/// Skipped when no C compiler is on PATH.
#[test]
fn header_compiles_and_links() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(header_dir.join("krauslab.h").is_file(), "build script did not write the header");

    let lib_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .and_then(|deps| deps.parent())
        .unwrap()
        .to_path_buf();
    if !lib_dir.join("libkrauslab_ffi.so").is_file() {
        eprintln!("skipping: shared library not found in {}", lib_dir.display());
        return;
    }

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, C_SMOKE).unwrap();

    let compiled = match Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&header_dir)
        .arg(&src)
        .arg("-o")
        .arg(&exe)
        .arg("-L")
        .arg(&lib_dir)
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .arg("-lkrauslab_ffi")
        .output()
    {
        Ok(out) => out,
        Err(_) => {
            eprintln!("skipping: no C compiler");
            return;
        }
    };
    assert!(
        compiled.status.success(),
        "cc failed:\n{}",
        String::from_utf8_lossy(&compiled.stderr)
    );

    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "smoke program exited with {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "2");
}
