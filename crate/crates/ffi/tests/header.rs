use std::path::Path;
use std::process::Command;

const EXPORTED: [&str; 17] = [
    "brst_last_error",
    "brst_version",
    "brst_string_free",
    "brst_system_new",
    "brst_system_from_json",
    "brst_system_to_json",
    "brst_system_free",
    "brst_state_new",
    "brst_state_soliton",
    "brst_state_set_field",
    "brst_state_get_field",
    "brst_state_info",
    "brst_state_free",
    "brst_evolve",
    "brst_functional",
    "brst_verify",
    "brst_euler",
];

fn header() -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/brst.h")).unwrap()
}

#[test]
fn header_declares_every_export() {
    let h = header();
    for f in EXPORTED {
        assert!(h.contains(&format!("{f}(")), "{f} missing from brst.h");
    }
    assert!(h.contains("typedef struct BrstSystem BrstSystem;"));
    assert!(h.contains("BRST_STATUS_OK = 0"));
}

/// Compiles the header as C and C++ when a compiler is on the path.
#[test]
fn header_compiles() {
    let dir = tempfile::tempdir().unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    for (compiler, file) in [("cc", "t.c"), ("c++", "t.cpp")] {
        let src = dir.path().join(file);
        std::fs::write(&src, "#include \"brst.h\"\nint main(void) { BrstSystem *s = 0; return brst_system_new(\"kdv\", 0, &s) == BRST_STATUS_OK; }\n").unwrap();
        let Ok(out) =
            Command::new(compiler).arg("-fsyntax-only").arg("-Wall").arg("-I").arg(&include).arg(&src).output()
        else {
            eprintln!("{compiler} not available, skipping");
            continue;
        };
        assert!(out.status.success(), "{compiler}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
