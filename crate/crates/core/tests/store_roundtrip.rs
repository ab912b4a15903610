mod common;

use std::fs;

use common::{interrupted_save, model, random_catalogue};
use proptest::prelude::*;
use udc_core::store::{import_ckan, lock, ENTRIES_DIR};
use udc_core::{Catalogue, Error};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn load_after_save_is_identity(seed in any::<u64>()) {
        let dir = tempfile::tempdir().unwrap();
        let c = random_catalogue(seed, dir.path());
        c.save().unwrap();
        prop_assert_eq!(Catalogue::load(dir.path(), &model()).unwrap(), c);
    }

    #[test]
    fn interrupted_save_never_tears_entries(seed in any::<u64>(), after in 0usize..10, partial in 0usize..400) {
        if let Err(e) = interrupted_save(seed, after, partial) {
            return Err(TestCaseError::fail(e));
        }
    }
}

#[test]
fn id_mismatch_and_empty_directory() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join(ENTRIES_DIR)).unwrap();
    let c = Catalogue::load(dir.path(), &model()).unwrap();
    assert!(c.entries.is_empty());
    fs::write(dir.path().join("entries/a.json"), r#"{"id":"b"}"#).unwrap();
    assert!(matches!(Catalogue::load(dir.path(), &model()), Err(Error::IdMismatch { .. })));
}

#[test]
fn lock_is_exclusive() {
    let dir = tempfile::tempdir().unwrap();
    let held = lock(dir.path()).unwrap();
    assert!(matches!(lock(dir.path()), Err(Error::Locked(_))));
    drop(held);
    lock(dir.path()).unwrap();
}

#[test]
fn ckan_import_is_deterministic() {
    let pkg = r#"{"name":"bike_lanes","title":"Bike Lanes","notes":"Network","tags":[{"name":"cycling"}],
        "resources":[{"name":"a","url":"http://x.org/a.csv","format":"CSV"},{"name":"b","url":"http://x.org/b.pdf","format":"PDF"}],
        "extras":[{"key":"versionInfo","value":"2"},{"key":"colour","value":"red"}]}"#;
    let (a, wa) = import_ckan(pkg, &model()).unwrap();
    let (b, wb) = import_ckan(pkg, &model()).unwrap();
    assert_eq!(a, b);
    assert_eq!(wa, wb);
    assert_eq!(a.id, "bike-lanes");
    let formats: Vec<_> = a.resources.iter().map(|r| r.format.clone().unwrap()).collect();
    assert_eq!(formats, ["CSV", "PDF"]);
    assert_eq!(wa.len(), 1);
    assert!(a.is_filled("versionInfo"));
}
