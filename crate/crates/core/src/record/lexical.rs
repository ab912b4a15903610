//! XSD lexical-form checks used for coercion and validation.

use std::sync::OnceLock;

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use regex::Regex;

macro_rules! re {
    ($name:ident, $pat:expr) => {
        fn $name() -> &'static Regex {
            static RE: OnceLock<Regex> = OnceLock::new();
            RE.get_or_init(|| Regex::new($pat).unwrap())
        }
    };
}

re!(date_re, r"^(\d{4})-(\d{2})-(\d{2})(Z|[+-]\d{2}:\d{2})?$");
re!(datetime_re, r"^(\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})(\.\d+)?(Z|[+-]\d{2}:\d{2})?$");
re!(decimal_re, r"^[+-]?(\d+(\.\d*)?|\.\d+)$");
re!(duration_re, r"^-?P(\d+Y)?(\d+M)?(\d+D)?(T(\d+H)?(\d+M)?(\d+(\.\d+)?S)?)?$");
re!(integer_re, r"^[+-]?\d+$");
re!(lang_re, r"^[A-Za-z]{1,8}(-[A-Za-z0-9]{1,8})*$");

fn tz_ok(tz: Option<&str>) -> bool {
    match tz {
        None | Some("Z") => true,
        Some(t) => {
            let h: u32 = t[1..3].parse().unwrap();
            let m: u32 = t[4..6].parse().unwrap();
            m < 60 && (h < 14 || (h == 14 && m == 0))
        }
    }
}

fn ymd(caps: &regex::Captures<'_>) -> Option<NaiveDate> {
    NaiveDate::from_ymd_opt(caps[1].parse().ok()?, caps[2].parse().ok()?, caps[3].parse().ok()?)
}

/// Parses an `xsd:date` lexical form (four-digit years only).
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let caps = date_re().captures(s)?;
    if !tz_ok(caps.get(4).map(|m| m.as_str())) {
        return None;
    }
    ymd(&caps)
}

/// Parses an `xsd:dateTime` lexical form; the timezone is checked but dropped.
pub fn parse_datetime(s: &str) -> Option<NaiveDateTime> {
    let caps = datetime_re().captures(s)?;
    if !tz_ok(caps.get(8).map(|m| m.as_str())) {
        return None;
    }
    let date = ymd(&caps)?;
    let (h, m, sec): (u32, u32, u32) = (caps[4].parse().ok()?, caps[5].parse().ok()?, caps[6].parse().ok()?);
    let time = if h == 24 && m == 0 && sec == 0 && caps.get(7).is_none_or(|f| f.as_str().trim_matches(['.', '0']).is_empty()) {
        return Some(date.succ_opt()?.and_time(NaiveTime::MIN));
    } else {
        NaiveTime::from_hms_opt(h, m, sec)?
    };
    Some(date.and_time(time))
}

pub fn is_date(s: &str) -> bool {
    parse_date(s).is_some()
}

pub fn is_datetime(s: &str) -> bool {
    parse_datetime(s).is_some()
}

/// Either temporal form as a comparable instant (dates at midnight).
pub fn temporal_key(s: &str) -> Option<NaiveDateTime> {
    parse_datetime(s).or_else(|| parse_date(s).map(|d| d.and_time(NaiveTime::MIN)))
}

pub fn is_decimal(s: &str) -> bool {
    decimal_re().is_match(s)
}

pub fn is_duration(s: &str) -> bool {
    duration_re().is_match(s) && !s.ends_with('P') && !s.ends_with('T')
}

pub fn parse_boolean(s: &str) -> Option<bool> {
    match s {
        "true" | "1" => Some(true),
        "false" | "0" => Some(false),
        _ => None,
    }
}

/// Integer lexical form, any sign.
pub fn parse_integer(s: &str) -> Option<i128> {
    if integer_re().is_match(s) {
        s.parse().ok()
    } else {
        None
    }
}

pub fn is_language_tag(s: &str) -> bool {
    lang_re().is_match(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dates() {
        assert!(is_date("2024-02-07"));
        assert!(is_date("2024-02-07Z"));
        assert!(is_date("2024-02-07-05:00"));
        assert!(!is_date("2024-02-30"));
        assert!(!is_date("07/02/2024"));
        assert!(!is_date("2024-2-7"));
        assert!(!is_date("2024-02-07+15:00"));
    }

    #[test]
    fn datetimes() {
        assert!(is_datetime("2022-03-05T10:00:00Z"));
        assert!(is_datetime("2024-02-07T12:34:56.123456"));
        assert!(is_datetime("2024-02-07T24:00:00"));
        assert!(!is_datetime("2024-02-07T25:00:00"));
        assert!(!is_datetime("2024-02-07 10:00:00"));
        assert!(!is_datetime("2024-02-07"));
    }

    #[test]
    fn ordering_mixes_forms() {
        assert!(temporal_key("2020-01-01").unwrap() < temporal_key("2020-01-01T00:00:01").unwrap());
    }

    #[test]
    fn numbers_and_durations() {
        assert!(is_decimal("12.5") && is_decimal("-3") && is_decimal(".5") && is_decimal("7."));
        assert!(!is_decimal("1e3") && !is_decimal("") && !is_decimal("."));
        assert!(is_duration("P1Y2M") && is_duration("PT15M") && is_duration("P1DT0.5S"));
        assert!(!is_duration("P") && !is_duration("P1DT") && !is_duration("1 day"));
        assert_eq!(parse_integer("+42"), Some(42));
        assert_eq!(parse_integer("-3"), Some(-3));
        assert_eq!(parse_integer("4.0"), None);
    }
}
