//! Compiles a C translation unit against the generated header.

use std::path::Path;
use std::process::Command;

#[test]
fn header_compiles_as_c() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = root.join("include").join("hypermotif.h");
    assert!(header.exists(), "header not generated");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        r#"#include "hypermotif.h"
int probe(void) {
    HmGraph *g = 0;
    HmStatus s = hm_graph_parse("a b\n", true, &g);
    uint64_t counts[HM_TRIAD_CLASSES];
    if (s == HM_STATUS_OK) s = hm_graph_triad_census(g, counts, NULL);
    hm_graph_free(g);
    return s == HM_STATUS_OK ? 0 : (int)s;
}
"#,
    )
    .unwrap();
    let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(root.join("include"))
        .arg(&src)
        .status()
    else {
        eprintln!("no C compiler available, skipping");
        return;
    };
    assert!(status.success());
}
