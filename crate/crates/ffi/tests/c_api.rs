use std::ffi::CStr;
use std::ptr;

use spex_ffi::*;

fn dataset(values: &[f64], n: usize, d: usize) -> *mut SpexDataset {
    let mut ds = ptr::null_mut();
    assert_eq!(
        unsafe { spex_dataset_new(values.as_ptr(), n, d, &mut ds) },
        SpexStatus::Ok
    );
    ds
}

fn options(algorithm: SpexAlgorithm) -> SpexFitOptions {
    SpexFitOptions {
        algorithm,
        leaves: 0,
        kappa: 2,
        l1_norm: false,
        kmeans_k: 0,
        restarts: 1,
        seed: 0,
    }
}

const POINTS: [f64; 12] = [0.0, 0.0, 0.5, 0.2, 0.1, 0.4, 9.0, 9.0, 9.5, 9.2, 9.1, 9.4];

#[test]
fn fit_assign_and_round_trip_every_algorithm() {
    let ds = dataset(&POINTS, 6, 2);
    assert_eq!(unsafe { (spex_dataset_n(ds), spex_dataset_d(ds)) }, (6, 2));
    let labels = [0usize, 0, 0, 1, 1, 1];
    for algo in [
        SpexAlgorithm::SpexClique,
        SpexAlgorithm::Cart,
        SpexAlgorithm::Imm,
        SpexAlgorithm::Emn,
    ] {
        let mut tree = ptr::null_mut();
        let status =
            unsafe { spex_fit(ds, labels.as_ptr(), labels.len(), &options(algo), &mut tree) };
        assert_eq!(status, SpexStatus::Ok, "{algo:?}");
        assert_eq!(unsafe { spex_tree_leaf_count(tree) }, 2);
        let mut out = [9usize; 6];
        assert_eq!(
            unsafe { spex_tree_assign(tree, ds, out.as_mut_ptr(), out.len()) },
            SpexStatus::Ok
        );
        let mut v = 0.0;
        assert_eq!(
            unsafe { spex_ari(labels.as_ptr(), out.as_ptr(), 6, &mut v) },
            SpexStatus::Ok
        );
        assert_eq!(v, 1.0, "{algo:?}");

        let mut json = ptr::null_mut();
        assert_eq!(
            unsafe { spex_tree_to_json(tree, &mut json) },
            SpexStatus::Ok
        );
        let mut back = ptr::null_mut();
        assert_eq!(
            unsafe { spex_tree_from_json(json, &mut back) },
            SpexStatus::Ok
        );
        let mut json2 = ptr::null_mut();
        assert_eq!(
            unsafe { spex_tree_to_json(back, &mut json2) },
            SpexStatus::Ok
        );
        assert_eq!(unsafe { CStr::from_ptr(json) }, unsafe {
            CStr::from_ptr(json2)
        });
        unsafe {
            spex_string_free(json);
            spex_string_free(json2);
            spex_tree_free(back);
            spex_tree_free(tree);
        }
    }
    unsafe { spex_dataset_free(ds) };
}

#[test]
fn knn_and_kmeans_without_labels() {
    let ds = dataset(&POINTS, 6, 2);
    let mut tree = ptr::null_mut();
    let mut opts = options(SpexAlgorithm::SpexKnn);
    opts.leaves = 2;
    assert_eq!(
        unsafe { spex_fit(ds, ptr::null(), 0, &opts, &mut tree) },
        SpexStatus::Ok
    );
    unsafe { spex_tree_free(tree) };
    let mut opts = options(SpexAlgorithm::Imm);
    opts.kmeans_k = 2;
    assert_eq!(
        unsafe { spex_fit(ds, ptr::null(), 0, &opts, &mut tree) },
        SpexStatus::Ok
    );
    assert_eq!(unsafe { spex_tree_leaf_count(tree) }, 2);
    let mut short = [0usize; 3];
    assert_eq!(
        unsafe { spex_tree_assign(tree, ds, short.as_mut_ptr(), 3) },
        SpexStatus::InvalidArgument
    );
    let msg = unsafe { CStr::from_ptr(spex_last_error()) }
        .to_str()
        .unwrap()
        .to_string();
    assert!(msg.contains("need 6"), "{msg}");
    unsafe {
        spex_tree_free(tree);
        spex_dataset_free(ds);
    }
}

#[test]
fn dimension_mismatch_on_assign() {
    let ds = dataset(&POINTS, 6, 2);
    let narrow = dataset(&[1.0, 2.0], 2, 1);
    let labels = [0usize, 0, 0, 1, 1, 1];
    let mut tree = ptr::null_mut();
    assert_eq!(
        unsafe {
            spex_fit(
                ds,
                labels.as_ptr(),
                6,
                &options(SpexAlgorithm::Cart),
                &mut tree,
            )
        },
        SpexStatus::Ok
    );
    let mut out = [0usize; 2];
    assert_eq!(
        unsafe { spex_tree_assign(tree, narrow, out.as_mut_ptr(), 2) },
        SpexStatus::InvalidArgument
    );
    unsafe {
        spex_tree_free(tree);
        spex_dataset_free(ds);
        spex_dataset_free(narrow);
    }
}

#[test]
fn ami_through_the_boundary() {
    let (a, b) = ([0usize, 0, 1, 1], [0usize, 0, 1, 1]);
    let mut v = 0.0;
    assert_eq!(
        unsafe { spex_ami(a.as_ptr(), b.as_ptr(), 4, &mut v) },
        SpexStatus::Ok
    );
    assert_eq!(v, 1.0);
    assert_eq!(
        unsafe { spex_ami(a.as_ptr(), b.as_ptr(), 1, &mut v) },
        SpexStatus::InvalidArgument
    );
}

/// The generated header compiles as C when a C compiler is around.
#[test]
fn header_compiles_as_c() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    std::fs::write(
        &src,
        "#include \"spex.h\"\nint main(void) { SpexDataset *ds = 0; double v[2] = {0, 1};\n\
         return spex_dataset_new(v, 2, 1, &ds) == SPEX_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = std::process::Command::new(&cc)
        .args([
            "-std=c99",
            "-Wall",
            "-Werror",
            "-fsyntax-only",
            "-I",
            include,
        ])
        .arg(&src)
        .status();
    match status {
        Ok(s) => assert!(s.success(), "header does not compile"),
        Err(e) => eprintln!("skipped: no C compiler ({cc}: {e})"),
    }
}
