use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").expect("manifest dir"));
    let bindings = cbindgen::generate(&crate_dir).expect("header generation");
    let out = PathBuf::from(env::var("OUT_DIR").expect("out dir")).join("sphermean.h");
    bindings.write_to_file(&out);
    // Keep the committed header in sync with the source of truth.
    let committed = crate_dir.join("include").join("sphermean.h");
    std::fs::create_dir_all(committed.parent().expect("include dir")).ok();
    bindings.write_to_file(&committed);
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
