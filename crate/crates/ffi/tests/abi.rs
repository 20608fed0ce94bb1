use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use negdep_qmc_ffi::*;

fn last_error() -> String {
    let p = nq_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn sample_round_trip_and_discrepancy() {
    unsafe {
        let mut ps = ptr::null_mut();
        assert_eq!(
            nq_sample(NqSamplerKind::Lhs, 8, 2, 0, 42, 3, &mut ps),
            NqStatus::Ok
        );
        assert_eq!(nq_pointset_len(ps), 8);
        assert_eq!(nq_pointset_dim(ps), 2);
        let mut coords = vec![0.0; 16];
        assert_eq!(
            nq_pointset_coords(ps, coords.as_mut_ptr(), coords.len()),
            NqStatus::Ok
        );
        // One point per stratum on each axis.
        for j in 0..2 {
            let mut cells: Vec<usize> =
                (0..8).map(|i| (coords[2 * i + j] * 8.0) as usize).collect();
            cells.sort();
            assert_eq!(cells, (0..8).collect::<Vec<_>>());
        }

        let mut copy = ptr::null_mut();
        assert_eq!(
            nq_pointset_new(8, 2, coords.as_ptr(), &mut copy),
            NqStatus::Ok
        );
        let (mut a, mut b) = (0.0, 0.0);
        assert_eq!(nq_star_discrepancy_exact(ps, &mut a), NqStatus::Ok);
        assert_eq!(nq_star_discrepancy_exact(copy, &mut b), NqStatus::Ok);
        assert_eq!(a, b);
        assert!(a > 0.0 && a < 1.0);

        let mut cover = ptr::null_mut();
        assert_eq!(nq_cover_new(2, 0.1, &mut cover), NqStatus::Ok);
        assert_eq!(nq_cover_len(cover), 400);
        let mut valid = -1;
        assert_eq!(nq_cover_verify(cover, 100, 1, &mut valid), NqStatus::Ok);
        assert_eq!(valid, 1);
        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(
            nq_star_discrepancy_cover(ps, cover, &mut lo, &mut hi),
            NqStatus::Ok
        );
        assert!(lo <= a + 1e-12 && a <= hi + 1e-12);

        nq_cover_free(cover);
        nq_pointset_free(copy);
        nq_pointset_free(ps);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut ps = ptr::null_mut();
        assert_eq!(
            nq_sample(NqSamplerKind::Lhs, 0, 2, 0, 0, 0, &mut ps),
            NqStatus::InvalidArgument
        );
        assert!(ps.is_null());
        assert!(last_error().contains("at least 1"));

        let coords = [0.5, 1.5];
        assert_eq!(
            nq_pointset_new(1, 2, coords.as_ptr(), &mut ps),
            NqStatus::CoordinateOutOfRange
        );
        assert_eq!(
            nq_pointset_new(1, 2, ptr::null(), &mut ps),
            NqStatus::NullPointer
        );
        assert_eq!(
            nq_sample(NqSamplerKind::MonteCarlo, 4, 1, 0, 0, 0, ptr::null_mut()),
            NqStatus::NullPointer
        );

        let mut out = 0.0;
        assert_eq!(
            nq_star_discrepancy_exact(ptr::null(), &mut out),
            NqStatus::NullPointer
        );

        let mut big = ptr::null_mut();
        assert_eq!(
            nq_sample(NqSamplerKind::MonteCarlo, 200, 4, 0, 0, 0, &mut big),
            NqStatus::Ok
        );
        assert_eq!(
            nq_star_discrepancy_exact(big, &mut out),
            NqStatus::BudgetExceeded
        );
        nq_pointset_free(big);

        let a = [0.4];
        let b = [0.2];
        assert_eq!(
            nq_gamma_for_boxdiff(a.as_ptr(), b.as_ptr(), 1, 5, 1, &mut out),
            NqStatus::InvalidArgument
        );

        // Freeing null is a no-op.
        nq_pointset_free(ptr::null_mut());
        nq_cover_free(ptr::null_mut());
        nq_constants_free(ptr::null_mut());
        assert_eq!(nq_pointset_len(ptr::null()), 0);
    }
}

#[test]
fn dependence_factor() {
    let mut g = 0.0;
    unsafe {
        let a = [0.0, 0.2];
        let b = [0.5, 0.8];
        assert_eq!(
            nq_gamma_for_boxdiff(a.as_ptr(), b.as_ptr(), 2, 5, 2, &mut g),
            NqStatus::Ok
        );
        assert_eq!(g, 1.0);
        let a = [0.1, 0.2];
        let b = [0.5, 0.8];
        assert_eq!(
            nq_gamma_for_boxdiff(a.as_ptr(), b.as_ptr(), 2, 5, 2, &mut g),
            NqStatus::Ok
        );
        assert_eq!(g, std::f64::consts::E);
        assert_eq!(
            nq_gamma_for_boxdiff(a.as_ptr(), b.as_ptr(), 2, 7, 1, &mut g),
            NqStatus::Ok
        );
        assert_eq!(g, std::f64::consts::E);
    }
}

#[test]
fn bounds_through_the_abi() {
    unsafe {
        let mut k = ptr::null_mut();
        assert_eq!(
            nq_constants_new(NqPrecision::Published, &mut k),
            NqStatus::Ok
        );
        let (mut e, mut o, mut c) = (0.0, 0.0, 0.0);
        assert_eq!(
            nq_constants_coefficients(k, &mut e, &mut o, &mut c),
            NqStatus::Ok
        );
        assert_eq!((e, o, c), (1.6741, 10.7042, 0.7729));

        let mut p = 0.0;
        assert_eq!(nq_success_probability(k, 3.0, 1, 0.0, &mut p), NqStatus::Ok);
        assert!((p - 0.987256).abs() < 1e-5);
        let mut m = 0.0;
        assert_eq!(nq_min_coefficient(k, 1.0, &mut m), NqStatus::Ok);
        assert!((m - 2.6442).abs() < 1e-4);
        let mut n = 0u64;
        assert_eq!(
            nq_inverse_discrepancy_bound(k, 0.1, 5, 0.0, &mut n),
            NqStatus::Ok
        );
        assert_eq!(n, 3198);
        let mut v = 0.0;
        assert_eq!(
            nq_bound_at_confidence(k, 1000, 10, 1.0, 1.5, &mut v),
            NqStatus::InvalidArgument
        );
        nq_constants_free(k);

        let mut f = ptr::null_mut();
        assert_eq!(nq_constants_derive(13, 0.0887, &mut f), NqStatus::Ok);
        assert_eq!(
            nq_constants_coefficients(f, &mut e, &mut o, &mut c),
            NqStatus::Ok
        );
        assert!(
            (e - 1.6741).abs() < 1e-4 && (o - 10.7042).abs() < 1e-4 && (c - 0.7729).abs() < 1e-4
        );
        nq_constants_free(f);
        assert_eq!(
            nq_constants_derive(1, 0.0887, &mut f),
            NqStatus::InvalidArgument
        );
    }
    assert!((nq_hoeffding_tail(100, 1.0, 10.0) - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
    assert!(nq_bernstein_tail(100, 1.0, 5.0, 0.01) < nq_hoeffding_tail(100, 1.0, 5.0));
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(nq_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("negdep_qmc.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "nq_last_error",
        "nq_version",
        "nq_sample",
        "nq_pointset_new",
        "nq_pointset_free",
        "nq_pointset_coords",
        "nq_star_discrepancy_exact",
        "nq_cover_new",
        "nq_cover_verify",
        "nq_star_discrepancy_cover",
        "nq_gamma_for_boxdiff",
        "nq_hoeffding_tail",
        "nq_bernstein_tail",
        "nq_constants_new",
        "nq_constants_derive",
        "nq_success_probability",
        "nq_min_coefficient",
        "nq_bound_at_confidence",
        "nq_inverse_discrepancy_bound",
        "typedef struct NqPointSet NqPointSet",
        "NQ_STATUS_BUDGET_EXCEEDED = 5",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

/// The header must compile as C and as C++ when a compiler is available.
#[test]
fn header_compiles() {
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        if Command::new(compiler).arg("--version").output().is_err() {
            eprintln!("skipping {lang}: no {compiler}");
            continue;
        }
        let dir = tempfile_dir();
        let src = dir.join(if lang == "c" { "t.c" } else { "t.cpp" });
        std::fs::write(
            &src,
            "#include \"negdep_qmc.h\"\nint main(void) { NqPointSet *p = 0; (void)p; return (int)NQ_STATUS_OK; }\n",
        )
        .unwrap();
        let status = Command::new(compiler)
            .arg("-fsyntax-only")
            .arg("-Wall")
            .arg("-Werror")
            .arg("-I")
            .arg(header().parent().unwrap())
            .arg(&src)
            .status()
            .unwrap();
        assert!(status.success(), "{lang} compile failed");
    }
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nq-header-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Links a small C program against the shared library and runs it.
#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no cc");
        return;
    }
    // target/<profile>/deps/<this test> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap().to_path_buf();
    if !lib_dir.join("libnegdep_qmc_ffi.so").exists() {
        eprintln!(
            "skipping: shared library not built in {}",
            lib_dir.display()
        );
        return;
    }
    let dir = tempfile_dir();
    let src = dir.join("run.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "negdep_qmc.h"

int main(void) {
    NqPointSet *p = NULL;
    if (nq_sample(NQ_SAMPLER_KIND_CENTERED_LHS, 8, 1, 1, 0, 0, &p) != NQ_STATUS_OK) return 1;
    double d = 0.0;
    if (nq_star_discrepancy_exact(p, &d) != NQ_STATUS_OK) return 2;
    nq_pointset_free(p);
    if (d != 1.0 / 16.0) return 3;
    if (nq_sample(NQ_SAMPLER_KIND_LHS, 0, 1, 1, 0, 0, &p) != NQ_STATUS_INVALID_ARGUMENT) return 4;
    if (nq_last_error() == NULL) return 5;
    printf("%.17g\n", d);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.join("run");
    let status = Command::new("cc")
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg("-o")
        .arg(&bin)
        .arg("-L")
        .arg(&lib_dir)
        .arg("-lnegdep_qmc_ffi")
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .status()
        .unwrap();
    assert!(status.success(), "link failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit status {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.0625");
}
