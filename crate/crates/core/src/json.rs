//! JSON formats for series and operator matrices.
//!
//! Series: `{"order": N, "coeffs": [[re, im], ...]}` with `N + 1` pairs.
//! Matrices: `{"order": N, "rows": [[[re, im], ...], ...]}`, row-major.
//!
//! Numerals may be JSON numbers or decimal strings on input. Output writes
//! every real with 17 significant digits; non-finite values are written as
//! the strings `"inf"`, `"-inf"` or `"NaN"`, which the reader accepts back.

use std::fmt::{self, Write as _};

use num_complex::Complex64;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::opalg::OperatorMatrix;
use crate::series::TruncatedSeries;

/// A real accepted either as a JSON number or as a decimal string.
#[derive(Debug, Clone, Copy)]
struct Numeral(f64);

impl<'de> Deserialize<'de> for Numeral {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Numeral;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a decimal string")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Numeral, E> {
                Ok(Numeral(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Numeral, E> {
                Ok(Numeral(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Numeral, E> {
                Ok(Numeral(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Numeral, E> {
                v.trim()
                    .parse::<f64>()
                    .map(Numeral)
                    .map_err(|_| E::custom(format!("invalid decimal string {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy)]
struct ComplexPair(Complex64);

impl<'de> Deserialize<'de> for ComplexPair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = ComplexPair;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a [re, im] pair")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<ComplexPair, A::Error> {
                let re: Numeral = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: Numeral = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(ComplexPair(Complex64::new(re.0, im.0)))
            }
        }
        d.deserialize_seq(V)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeries {
    order: usize,
    coeffs: Vec<ComplexPair>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    order: usize,
    rows: Vec<Vec<ComplexPair>>,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Parses the series format. Errors carry the line and column reported by
/// the JSON reader.
pub fn parse_series(text: &str) -> Result<TruncatedSeries> {
    let raw: RawSeries = serde_json::from_str(text).map_err(parse_err)?;
    if raw.coeffs.len() != raw.order + 1 {
        return Err(Error::Parse(format!(
            "order {} requires {} coefficients, found {}",
            raw.order,
            raw.order + 1,
            raw.coeffs.len()
        )));
    }
    TruncatedSeries::from_coeffs(raw.coeffs.into_iter().map(|c| c.0).collect())
}

pub fn parse_matrix(text: &str) -> Result<OperatorMatrix> {
    let raw: RawMatrix = serde_json::from_str(text).map_err(parse_err)?;
    let dim = raw.order + 1;
    if raw.rows.len() != dim || raw.rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Parse(format!("order {} requires a {dim} x {dim} matrix", raw.order)));
    }
    OperatorMatrix::from_rows(raw.rows.into_iter().map(|r| r.into_iter().map(|c| c.0).collect()).collect())
}

/// A real with 17 significant digits, or a quoted marker for non-finite values.
pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "\"NaN\"".to_string()
    } else if x > 0.0 {
        "\"inf\"".to_string()
    } else {
        "\"-inf\"".to_string()
    }
}

/// `[re, im]`.
pub fn format_complex(z: Complex64) -> String {
    format!("[{}, {}]", format_real(z.re), format_real(z.im))
}

fn write_pairs(out: &mut String, values: &[Complex64]) {
    out.push('[');
    for (i, &c) in values.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&format_complex(c));
    }
    out.push(']');
}

pub fn series_to_json(f: &TruncatedSeries) -> String {
    let mut out = String::new();
    write!(out, "{{\"order\": {}, \"coeffs\": ", f.order()).unwrap();
    write_pairs(&mut out, f.coeffs());
    out.push('}');
    out
}

pub fn matrix_to_json(m: &OperatorMatrix) -> String {
    let mut out = String::new();
    write!(out, "{{\"order\": {}, \"rows\": [", m.order()).unwrap();
    for (i, row) in m.rows().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_pairs(&mut out, row);
    }
    out.push_str("]}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parses_numbers_and_strings() {
        let s = parse_series(r#"{"order": 2, "coeffs": [[1, 0], ["0.5", "-2.5e-1"], [3.0, "1"]]}"#).unwrap();
        assert_eq!(s.coeffs(), &[c(1.0, 0.0), c(0.5, -0.25), c(3.0, 1.0)]);
    }

    #[test]
    fn rejects_bad_input_with_position() {
        let err = parse_series("{\n  \"order\": 1,\n  \"coeffs\": [[1, 0], [2]]\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");

        let err = parse_series(r#"{"order": 2, "coeffs": [[1, 0]]}"#).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        assert!(parse_series(r#"{"order": 0, "coeffs": [["x", 0]]}"#).is_err());
        assert!(parse_series(r#"{"order": 0, "coeffs": [[1, 0, 0]]}"#).is_err());
        assert!(parse_series(r#"{"order": 0, "coeffs": [[1, 0]], "extra": 1}"#).is_err());
        assert!(parse_series("not json").is_err());
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_real(2.0 / 3.0), "6.6666666666666663e-1");
        assert_eq!(format_real(1.0), "1.0000000000000000e0");
        assert_eq!(format_real(f64::INFINITY), "\"inf\"");
        let s = TruncatedSeries::from_real(&[1.0, 0.5]).unwrap();
        assert_eq!(
            series_to_json(&s),
            r#"{"order": 1, "coeffs": [[1.0000000000000000e0, 0.0000000000000000e0], [5.0000000000000000e-1, 0.0000000000000000e0]]}"#
        );
    }

    #[test]
    fn matrix_format() {
        let m = OperatorMatrix::from_rows(vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.5, -1.0), c(2.0, 0.0)]]).unwrap();
        let text = matrix_to_json(&m);
        assert_eq!(parse_matrix(&text).unwrap(), m);
        assert!(parse_matrix(r#"{"order": 1, "rows": [[[1, 0]]]}"#).is_err());
    }

    proptest! {
        #[test]
        fn series_text_round_trip(coeffs in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 1..20)) {
            let s = TruncatedSeries::from_coeffs(coeffs.iter().map(|&(a, b)| c(a, b)).collect()).unwrap();
            prop_assert_eq!(parse_series(&series_to_json(&s)).unwrap(), s);
        }

        #[test]
        fn non_finite_round_trip(x in prop_oneof![Just(f64::INFINITY), Just(f64::NEG_INFINITY), -1e300f64..1e300]) {
            let s = TruncatedSeries::from_coeffs(vec![c(x, -x)]).unwrap();
            prop_assert_eq!(parse_series(&series_to_json(&s)).unwrap(), s);
        }
    }
}
