//! Static snapshot of common IANA media types and bare file extensions.

const MEDIA_TYPES: &[&str] = &[
    "application/atom+xml",
    "application/csvm+json",
    "application/ecmascript",
    "application/epub+zip",
    "application/geo+json",
    "application/gml+xml",
    "application/gzip",
    "application/java-archive",
    "application/javascript",
    "application/json",
    "application/ld+json",
    "application/msword",
    "application/n-quads",
    "application/n-triples",
    "application/netcdf",
    "application/octet-stream",
    "application/ogg",
    "application/pdf",
    "application/postscript",
    "application/rdf+xml",
    "application/rss+xml",
    "application/rtf",
    "application/sparql-query",
    "application/sparql-results+json",
    "application/sparql-results+xml",
    "application/sparql-update",
    "application/sql",
    "application/trig",
    "application/vnd.apache.parquet",
    "application/vnd.geo+json",
    "application/vnd.google-earth.kml+xml",
    "application/vnd.google-earth.kmz",
    "application/vnd.ms-access",
    "application/vnd.ms-excel",
    "application/vnd.ms-powerpoint",
    "application/vnd.oasis.opendocument.presentation",
    "application/vnd.oasis.opendocument.spreadsheet",
    "application/vnd.oasis.opendocument.text",
    "application/vnd.openxmlformats-officedocument.presentationml.presentation",
    "application/vnd.openxmlformats-officedocument.spreadsheetml.sheet",
    "application/vnd.openxmlformats-officedocument.wordprocessingml.document",
    "application/vnd.rar",
    "application/vnd.sqlite3",
    "application/x-7z-compressed",
    "application/x-bzip2",
    "application/x-hdf5",
    "application/x-shapefile",
    "application/x-tar",
    "application/xhtml+xml",
    "application/xml",
    "application/yaml",
    "application/zip",
    "application/ace+json",
    "audio/mpeg",
    "audio/ogg",
    "audio/wav",
    "image/bmp",
    "image/gif",
    "image/jpeg",
    "image/png",
    "image/svg+xml",
    "image/tiff",
    "image/webp",
    "text/calendar",
    "text/css",
    "text/csv",
    "text/csv-schema",
    "text/html",
    "text/markdown",
    "text/n3",
    "text/plain",
    "text/tab-separated-values",
    "text/turtle",
    "text/xml",
    "video/mp4",
    "video/mpeg",
    "video/webm",
];

const EXTENSIONS: &[&str] = &[
    "7z", "accdb", "api", "bz2", "csv", "dbf", "doc", "docx", "esri rest", "geojson", "geopackage", "gml", "gpkg", "gz",
    "h5", "hdf5", "html", "jpeg", "jpg", "json", "jsonld", "kml", "kmz", "mdb", "md", "n3", "nc", "nq", "nt", "ods",
    "odt", "parquet", "pdf", "png", "ppt", "pptx", "rar", "rdf", "rss", "shp", "sql", "sqlite", "svg", "tar", "tif",
    "tiff", "trig", "tsv", "ttl", "txt", "wfs", "wms", "xls", "xlsx", "xml", "yaml", "yml", "zip",
];

/// Whether `token` names a known media type, a known subtype on its own
/// (`vnd.ms-excel`), or a bare extension (`csv`, `.xlsx`).
pub fn is_known_format(token: &str) -> bool {
    let t = token.trim().trim_start_matches('.').to_ascii_lowercase();
    if t.is_empty() {
        return false;
    }
    // Media type parameters (`;charset=utf-8`) do not change the type.
    let t = t.split(';').next().unwrap().trim();
    MEDIA_TYPES.contains(&t)
        || MEDIA_TYPES.iter().any(|m| m.split_once('/').is_some_and(|(_, sub)| sub == t))
        || EXTENSIONS.contains(&t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recognises_common_forms() {
        for t in ["csv", "CSV", "json", "pdf", "vnd.ms-excel", "ace+json", "csvm+json", "csv-schema", "text/csv; charset=utf-8", ".xlsx", "GeoJSON"] {
            assert!(is_known_format(t), "{t}");
        }
        assert!(!is_known_format("html, pdf"));
        assert!(!is_known_format(""));
        assert!(!is_known_format("floppy"));
    }
}
