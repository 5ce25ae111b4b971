//! The `rldeconv` binary driven as a subprocess.

use std::path::Path;
use std::process::{Command, Output};

use rldeconv::core::psf::parse_sparse_psf;
use rldeconv::core::rl::{blur_image, richardson_lucy, BlurMode};
use rldeconv::core::{NoClock, Psf, RlConfig};
use rldeconv::pgm::{read_pgm_file, write_pgm, write_pgm_file};
use rldeconv::psfspec::PsfSpec;

mod common;

fn rldeconv(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rldeconv"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn rldeconv")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim().to_owned()
}

#[test]
fn deconv_writes_the_library_result() {
    let dir = tempfile::tempdir().unwrap();
    let g = common::scene(40, 3);
    let psf: Psf = "box:5x3".parse::<PsfSpec>().unwrap().build().unwrap();
    let f = blur_image(&g, &psf, BlurMode::Cyclic).unwrap();
    let f = rldeconv::pgm::read_pgm(&write_pgm(&f)).unwrap();
    write_pgm_file(dir.path().join("f.pgm"), &f).unwrap();

    let out = rldeconv(
        &[
            "deconv", "--in", "f.pgm", "--psf", "box:5x3", "--iters", "12", "--out", "u.pgm",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("box2d-cumul"));

    let cfg = RlConfig::default().with_iterations(12);
    let (u, _) = richardson_lucy(&f, &psf, &cfg, &NoClock).unwrap();
    assert_eq!(std::fs::read(dir.path().join("u.pgm")).unwrap(), write_pgm(&u));
}

#[test]
fn snr_of_an_image_against_itself_is_infinite() {
    let dir = tempfile::tempdir().unwrap();
    write_pgm_file(dir.path().join("g.pgm"), &common::scene(16, 1)).unwrap();
    let out = rldeconv(&["snr", "--ref", "g.pgm", "--test", "g.pgm"], dir.path());
    assert!(out.status.success());
    assert_eq!(stdout(&out), "inf");
}

#[test]
fn generated_psf_reloads_with_the_same_taps() {
    let dir = tempfile::tempdir().unwrap();
    for spec in ["line:9", "box:4x6", "disc:9", "diag:7"] {
        let out = rldeconv(&["psf-gen", "--psf", spec, "--out", "h.txt"], dir.path());
        assert!(out.status.success(), "{spec}");
        let text = std::fs::read_to_string(dir.path().join("h.txt")).unwrap();
        let reloaded = parse_sparse_psf(&text).unwrap();
        let built = spec.parse::<PsfSpec>().unwrap().build().unwrap();
        assert_eq!(reloaded.taps(), built.to_sparse().taps(), "{spec}");
    }
}

#[test]
fn psf_gen_without_out_prints_the_tap_list() {
    let dir = tempfile::tempdir().unwrap();
    let out = rldeconv(&["psf-gen", "--psf", "diag:3"], dir.path());
    assert!(out.status.success());
    let taps = parse_sparse_psf(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(taps.support(), 3);
}

#[test]
fn blur_then_deconv_through_a_psf_file() {
    let dir = tempfile::tempdir().unwrap();
    write_pgm_file(dir.path().join("g.pgm"), &common::scene(32, 5)).unwrap();
    let steps: [&[&str]; 3] = [
        &["psf-gen", "--psf", "diag:5", "--out", "h.txt"],
        &[
            "blur",
            "--in",
            "g.pgm",
            "--psf",
            "file:h.txt",
            "--mode",
            "replicate",
            "--out",
            "f.pgm",
        ],
        &[
            "deconv",
            "--in",
            "f.pgm",
            "--psf",
            "file:h.txt",
            "--iters",
            "5",
            "--thin",
            "0.1",
            "--out",
            "u.pgm",
        ],
    ];
    for args in steps {
        let out = rldeconv(args, dir.path());
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let u = read_pgm_file(dir.path().join("u.pgm")).unwrap();
    assert_eq!((u.width(), u.height()), (32, 32));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["deconv", "--in", "a.pgm", "--psf", "ring:3", "--out", "b.pgm"][..],
        &[
            "deconv",
            "--in",
            "a.pgm",
            "--psf",
            "line:3",
            "--reactivate",
            "5",
            "--out",
            "b.pgm",
        ],
        &["bench", "--experiment", "table9", "--in", "a.pgm"],
        &["frobnicate"],
    ] {
        let out = rldeconv(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn runtime_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = rldeconv(
        &["snr", "--ref", "missing.pgm", "--test", "missing.pgm"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("rldeconv: "));

    std::fs::write(dir.path().join("bad.pgm"), b"P5 2 2 255\n\x01").unwrap();
    let out = rldeconv(
        &["deconv", "--in", "bad.pgm", "--psf", "line:3", "--out", "u.pgm"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));

    // Selective iteration needs an operator with masked evaluation.
    std::fs::write(dir.path().join("g.pgm"), write_pgm(&common::scene(8, 2))).unwrap();
    let out = rldeconv(
        &[
            "deconv", "--in", "g.pgm", "--psf", "disc:5", "--thin", "0.1", "--out", "u.pgm",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}
