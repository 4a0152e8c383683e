// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::Command;

#[test]
fn header_declares_the_interface() {
    let header =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/corelab.h"))
            .unwrap();
    for sym in [
        "typedef struct CorelabGraph CorelabGraph;",
        "CORELAB_STATUS_OK = 0",
        "corelab_graph_from_edges",
        "corelab_graph_parse",
        "corelab_graph_sample_gnp",
        "corelab_graph_free",
        "corelab_kcore",
        "corelab_rank_gf2",
        "corelab_rank_rational",
        "corelab_last_error",
        "corelab_version",
    ] {
        assert!(header.contains(sym), "missing {sym}");
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    for (cc, lang) in [("cc", "c"), ("c++", "c++")] {
        let Ok(out) = Command::new(cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(include.join("corelab.h"))
            .output()
        else {
            eprintln!("{cc} not available; skipped");
            continue;
        };
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
