use std::path::PathBuf;

use cutmilnor::cdj;
use cutmilnor::gauss::GaussDiagram;
use cutmilnor::milnor::{InvariantTable, TableOptions};
use cutmilnor::spun::spun;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

#[test]
fn cdj_files_round_trip() {
    for entry in std::fs::read_dir(data_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "cdj") {
            let text = std::fs::read_to_string(&path).unwrap();
            let d = cdj::parse(&text).unwrap_or_else(|e| panic!("{}: {}", path.display(), e));
            assert_eq!(cdj::emit(&d), text, "{}", path.display());
        }
    }
}

#[test]
fn gauss_files_import_cleanly() {
    for entry in std::fs::read_dir(data_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "gauss") {
            let g = GaussDiagram::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
            let d = g.to_cut_diagram();
            assert!(d.validate().is_ok(), "{}", path.display());
            let again = cdj::parse(&cdj::emit(&d)).unwrap();
            assert_eq!(cdj::emit(&again), cdj::emit(&d));
        }
    }
}

/// The W_m files are the spun X_m tangles.
#[test]
fn wm_files_are_spun_tangles() {
    for m in 0..=4 {
        let x = GaussDiagram::parse(&std::fs::read_to_string(data_dir().join(format!("x_{}.gauss", m))).unwrap()).unwrap();
        let w = std::fs::read_to_string(data_dir().join(format!("wm_{}.cdj", m))).unwrap();
        assert_eq!(cdj::emit(&spun(&x.to_cut_diagram()).0), w, "m = {}", m);
    }
}

/// The tangle X_m itself carries mu(2211) = -m on its closed component.
#[test]
fn tangle_values() {
    for m in 0..=4i64 {
        let x = GaussDiagram::parse(&std::fs::read_to_string(data_dir().join(format!("x_{}.gauss", m))).unwrap()).unwrap();
        let t = InvariantTable::compute(&x.to_cut_diagram(), &TableOptions { max_len: 3, ..Default::default() }).unwrap();
        assert_eq!(t.entry(&[1, 1, 0, 0]).unwrap().loop_mu[0], (-m).into());
    }
}
