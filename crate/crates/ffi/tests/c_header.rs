use std::path::{Path, PathBuf};
use std::process::Command;

fn target_dir() -> PathBuf {
    // test binaries live in <target>/<profile>/deps
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/daont.h")).unwrap();
    for name in [
        "typedef struct DaontSession DaontSession",
        "DAONT_STATUS_OK = 0",
        "daont_session_new(void)",
        "daont_session_free(",
        "daont_load_turtle(",
        "daont_load_fixture(",
        "daont_check(",
        "daont_query(",
        "daont_apply_facts(",
        "daont_last_error_message(void)",
        "daont_string_free(",
        "daont_version(void)",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let lib = target_dir().join("libdaont_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = tempfile_path();
    let status = Command::new("cc")
        .arg(dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}

fn tempfile_path() -> PathBuf {
    std::env::temp_dir().join(format!("daont-smoke-{}", std::process::id()))
}
