mod common;

use common::{fixture, model, rio_ntriples};
use sha1::{Digest, Sha1};
use udc_core::mapping::{map_entry, parse_mapping, UuidMode, UUID_NAMESPACE};
use udc_core::parse_entry;
use udc_core::rdf::serialize_ntriples;

/// RFC 4122 version-5 UUID computed directly from SHA-1.
fn uuid5(namespace: &[u8; 16], name: &str) -> String {
    let mut h = Sha1::new();
    h.update(namespace);
    h.update(name.as_bytes());
    let d = h.finalize();
    let mut b = [0u8; 16];
    b.copy_from_slice(&d[..16]);
    b[6] = (b[6] & 0x0f) | 0x50;
    b[8] = (b[8] & 0x3f) | 0x80;
    let hex: String = b.iter().map(|x| format!("{x:02x}")).collect();
    format!("{}-{}-{}-{}-{}", &hex[..8], &hex[8..12], &hex[12..16], &hex[16..20], &hex[20..])
}

fn mapped() -> String {
    let cfg = parse_mapping(&fixture("fig8_mapping.json")).unwrap();
    let entry = parse_entry(&fixture("fig8_entry.json"), &model()).unwrap();
    serialize_ntriples(&map_entry(&cfg, &entry, UuidMode::Deterministic).unwrap().graph)
}

#[test]
fn figure_mapping_matches_golden() {
    let golden = fixture("fig8.nt");
    let out = mapped();
    assert_eq!(out, golden);
    assert_eq!(out.lines().count(), 7);
    assert_eq!(mapped(), out);
    assert_eq!(rio_ntriples(&out).unwrap().len(), 7);
}

#[test]
fn creator_iri_is_the_name_based_uuid() {
    let want = uuid5(UUID_NAMESPACE.as_bytes(), "bike-lanes-2019/dct:creator/@id");
    assert!(mapped().contains(&format!("<http://data.urbandatacentre.ca/creator/{want}>")));
}

#[test]
fn random_mode_changes_only_the_minted_iri() {
    let cfg = parse_mapping(&fixture("fig8_mapping.json")).unwrap();
    let entry = parse_entry(&fixture("fig8_entry.json"), &model()).unwrap();
    let a = map_entry(&cfg, &entry, UuidMode::Random).unwrap();
    let b = map_entry(&cfg, &entry, UuidMode::Random).unwrap();
    assert_ne!(a.minted, b.minted);
    assert_eq!(a.graph.len(), 7);
}
