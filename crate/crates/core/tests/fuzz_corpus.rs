//! Replays the checked-in fuzz seeds on stable with the fuzz targets' invariants.

use std::path::PathBuf;

use crlab::syntax::{parse_config, parse_expression, parse_point, parse_rational, parse_solution, solution_to_config};

fn seeds(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<Vec<u8>> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| std::fs::read(entry.unwrap().path()).unwrap())
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn expression_seeds() {
    for data in seeds("parse_expression") {
        let Ok(text) = std::str::from_utf8(&data) else { continue };
        if let Ok(node) = parse_expression(text) {
            let printed = node.to_string();
            assert_eq!(parse_expression(&printed).unwrap().to_string(), printed);
        }
    }
}

#[test]
fn config_seeds() {
    let mut solutions = 0;
    for data in seeds("parse_config") {
        let Ok(config) = parse_config(std::str::from_utf8(&data).unwrap()) else { continue };
        if let Ok(sol) = parse_solution(&config) {
            let again = parse_solution(&parse_config(&solution_to_config(&sol)).unwrap()).unwrap();
            assert_eq!(again.big_n, sol.big_n);
            solutions += 1;
        }
    }
    assert!(solutions > 0);
}

#[test]
fn rational_seeds() {
    for data in seeds("parse_rational") {
        if let Ok(r) = parse_rational(std::str::from_utf8(&data).unwrap()) {
            assert_eq!(parse_rational(&r.to_string()), Ok(r));
        }
    }
}

#[test]
fn point_seeds() {
    for data in seeds("parse_point") {
        let (&n, rest) = data.split_first().unwrap();
        let n = usize::from(n % 10);
        if let Ok(p) = parse_point(std::str::from_utf8(rest).unwrap(), n) {
            assert_eq!(p.z.len(), n);
        }
    }
}
