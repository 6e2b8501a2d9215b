use std::ffi::{c_char, CStr};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use netmatch_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 512];
    unsafe {
        nm_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn simulate(n: usize, link: &CStr, seed: u64) -> *mut NmSample {
    let mut s = ptr::null_mut();
    let st = unsafe { nm_sample_simulate(n, link.as_ptr(), ptr::null(), seed, &mut s) };
    assert_eq!(st, NmStatus::Ok, "{}", last_error());
    s
}

#[test]
fn simulated_sample_matches_core() {
    let s = simulate(40, c"blockmodel", 11);
    let core = netmatch::simulate_sample(
        40,
        &netmatch::LinkFunction::Blockmodel,
        &netmatch::TrueParameters::default(),
        11,
    )
    .unwrap();
    unsafe {
        assert_eq!(nm_sample_n(s), 40);
        assert_eq!(nm_sample_k(s), 1);
        let mut y = vec![9u8; 40];
        assert_eq!(nm_sample_copy_y(s, y.as_mut_ptr(), y.len()), NmStatus::Ok);
        assert_eq!(y, core.y());
        let mut x = vec![0.0; 40];
        assert_eq!(nm_sample_copy_x(s, x.as_mut_ptr(), x.len()), NmStatus::Ok);
        assert_eq!(x.as_slice(), core.x().as_slice());
        let mut a = vec![0u8; 1600];
        assert_eq!(nm_sample_copy_adjacency(s, a.as_mut_ptr(), a.len()), NmStatus::Ok);
        assert_eq!(a, core.adjacency().cells());

        let mut d = vec![0.0; 1600];
        assert_eq!(nm_codegree_distance(s, d.as_mut_ptr(), d.len()), NmStatus::Ok);
        let c = netmatch::codegree_distance_matrix(core.adjacency());
        for i in 0..40 {
            for j in 0..40 {
                assert_eq!(d[i * 40 + j], c.get(i, j));
            }
        }
        nm_sample_free(s);
    }
}

#[test]
fn estimate_round_trip() {
    let s = simulate(80, c"homophily", 3);
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(nm_estimate(s, ptr::null(), &mut r), NmStatus::Ok, "{}", last_error());
        assert_eq!(nm_result_k(r), 1);
        assert_eq!(nm_result_n(r), 80);
        let mut beta = [0.0];
        assert_eq!(nm_result_beta(r, beta.as_mut_ptr(), 1), NmStatus::Ok);

        let core = netmatch::simulate_sample(
            80,
            &netmatch::LinkFunction::Homophily,
            &netmatch::TrueParameters::default(),
            3,
        )
        .unwrap();
        let expected = netmatch::estimate(&core, &Default::default()).unwrap();
        assert_eq!(beta[0], expected.beta_hat[0]);
        assert_eq!(nm_result_converged(r), expected.converged as i32);
        assert_eq!(nm_result_iterations(r), expected.iterations);
        assert_eq!(nm_result_effective_pair_mass(r), expected.effective_pair_mass);

        let mut lambda = vec![0.0; 80];
        assert_eq!(nm_result_lambda(r, lambda.as_mut_ptr(), 80), NmStatus::Ok);
        for (got, want) in lambda.iter().zip(expected.lambda_hat.unwrap()) {
            match want {
                Some(v) => assert_eq!(*got, v),
                None => assert!(got.is_nan()),
            }
        }
        nm_result_free(r);
        nm_sample_free(s);
    }
}

#[test]
fn from_arrays_validates() {
    let x = [0.5, -1.0, 2.0];
    let y = [1u8, 0, 1];
    let good = [0u8, 1, 0, 1, 0, 1, 0, 1, 0];
    let asym = [0u8, 1, 0, 0, 0, 1, 0, 1, 0];
    unsafe {
        let mut s = ptr::null_mut();
        let st = nm_sample_from_arrays(3, 1, x.as_ptr(), y.as_ptr(), good.as_ptr(), &mut s);
        assert_eq!(st, NmStatus::Ok);
        let mut d = [0.0; 9];
        assert_eq!(nm_codegree_distance(s, d.as_mut_ptr(), 9), NmStatus::Ok);
        // path 0-1-2: agents 0 and 2 share their only neighbour
        assert_eq!(d[2], 0.0);
        assert!(d[1] > 0.0);
        nm_sample_free(s);

        let mut s = ptr::null_mut();
        let st = nm_sample_from_arrays(3, 1, x.as_ptr(), y.as_ptr(), asym.as_ptr(), &mut s);
        assert_eq!(st, NmStatus::Validation);
        assert!(s.is_null());
        assert!(nm_last_error_length() > 0);

        let bad_y = [1u8, 2, 0];
        let st = nm_sample_from_arrays(3, 1, x.as_ptr(), bad_y.as_ptr(), good.as_ptr(), &mut s);
        assert_eq!(st, NmStatus::Validation);
        assert!(last_error().contains("agent 1"), "{}", last_error());
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(
            nm_sample_simulate(10, c"nope".as_ptr(), ptr::null(), 1, &mut s),
            NmStatus::Config
        );
        assert!(last_error().contains("nope"));
        assert_eq!(
            nm_sample_simulate(10, ptr::null(), ptr::null(), 1, &mut s),
            NmStatus::NullPointer
        );
        assert_eq!(
            nm_sample_simulate(10, c"beta".as_ptr(), c"cubic".as_ptr(), 1, &mut s),
            NmStatus::Config
        );
        assert_eq!(
            nm_sample_simulate(10, c"beta".as_ptr(), ptr::null(), 1, ptr::null_mut()),
            NmStatus::NullPointer
        );

        let s = simulate(5, c"beta", 1);
        assert_eq!(nm_last_error_length(), 0);
        let mut buf = [0.0; 4];
        assert_eq!(nm_codegree_distance(s, buf.as_mut_ptr(), 4), NmStatus::BufferTooSmall);
        assert_eq!(nm_codegree_distance(ptr::null(), buf.as_mut_ptr(), 4), NmStatus::NullPointer);

        let mut cfg = nm_estimator_config_default();
        cfg.gradient_tolerance = -1.0;
        let mut r = ptr::null_mut();
        assert_eq!(nm_estimate(s, &cfg, &mut r), NmStatus::Config);
        cfg = nm_estimator_config_default();
        cfg.prob_clip = 0.7;
        assert_eq!(nm_estimate(s, &cfg, &mut r), NmStatus::Config);
        assert!(r.is_null());
        nm_sample_free(s);

        // null handles are tolerated by the free functions and accessors
        nm_sample_free(ptr::null_mut());
        nm_result_free(ptr::null_mut());
        assert_eq!(nm_sample_n(ptr::null()), 0);
        assert!(nm_result_gradient_norm(ptr::null()).is_nan());
    }
}

#[test]
fn degenerate_matching_is_reported() {
    // every outcome equal: no discordant pairs
    let x = [0.1, 0.2, 0.3, 0.4];
    let y = [1u8; 4];
    let a = [0u8, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0];
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(
            nm_sample_from_arrays(4, 1, x.as_ptr(), y.as_ptr(), a.as_ptr(), &mut s),
            NmStatus::Ok
        );
        let mut r = ptr::null_mut();
        assert_eq!(nm_estimate(s, ptr::null(), &mut r), NmStatus::DegenerateMatching);
        nm_sample_free(s);
    }
}

#[test]
fn message_truncation() {
    unsafe {
        let mut s = ptr::null_mut();
        nm_sample_simulate(10, c"definitely-not-a-link".as_ptr(), ptr::null(), 1, &mut s);
        let full = nm_last_error_length();
        let mut buf = [1 as c_char; 8];
        assert_eq!(nm_last_error_message(buf.as_mut_ptr(), buf.len()), full);
        assert_eq!(buf[7], 0);
        assert_eq!(CStr::from_ptr(buf.as_ptr()).to_bytes().len(), 7);
        assert_eq!(nm_last_error_message(ptr::null_mut(), 0), full);
    }
}

#[test]
fn scalar_helpers() {
    assert_eq!(nm_kernel_weight(0.0, 0.1), 0.75);
    // u = 0.2² / 0.08 = 0.5
    assert!((nm_kernel_weight(0.2, 0.08) - 0.5625).abs() < 1e-15);
    assert_eq!(nm_kernel_weight(1.0, 0.5), 0.0);
    assert!(nm_kernel_weight(0.1, 0.0).is_nan());
    assert!((nm_bandwidth(512) - 0.05).abs() < 1e-15);
    assert!(nm_bandwidth(0).is_nan());
    let v = unsafe { CStr::from_ptr(nm_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn profile_dir() -> PathBuf {
    // <target>/tmp -> <target>/<profile>
    let tmp = Path::new(env!("CARGO_TARGET_TMPDIR"));
    let exe = std::env::current_exe().unwrap();
    exe.parent()
        .and_then(Path::parent)
        .map(Path::to_path_buf)
        .unwrap_or_else(|| tmp.parent().unwrap().join("debug"))
}

#[test]
fn header_compiles_and_links_from_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let lib = profile_dir().join("libnetmatch_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = Path::new(env!("CARGO_TARGET_TMPDIR")).join("netmatch_smoke");
    let out = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror"])
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).contains("beta_hat="));
}
