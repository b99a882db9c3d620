//! JSON and CSV encoders.
//!
//! JSON floats are written with 17 significant digits in scientific
//! notation; CSV floats use the same text through [`F17`], so both formats
//! carry every bit of each value and parse back exactly.

use std::fmt;
use std::io::{self, Write};

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::ser::Formatter;

/// Formats a float with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

struct SignificantDigits;

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes `value` as compact JSON with 17-significant-digit floats.
pub fn to_json_bytes<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SignificantDigits);
    value.serialize(&mut ser)?;
    Ok(out)
}

/// A float cell that serializes through [`format_f64`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F17(pub f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_f64(self.0))
    }
}

impl<'de> Deserialize<'de> for F17 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<f64>().map(F17).map_err(de::Error::custom)
    }
}

impl fmt::Display for F17 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_f64(self.0))
    }
}

/// Writes rows as CSV with a header, `,` separators and LF line endings.
pub fn to_csv_bytes<T: Serialize>(rows: &[T]) -> csv::Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// Parses CSV produced by [`to_csv_bytes`].
pub fn from_csv_bytes<T: for<'de> Deserialize<'de>>(bytes: &[u8]) -> csv::Result<Vec<T>> {
    csv::Reader::from_reader(bytes).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_f64(-0.25), "-2.5000000000000000e-1");
        assert_eq!(format_f64(0.0), "0.0000000000000000e0");
        let json =
            String::from_utf8(to_json_bytes(&serde_json::json!({"x": 0.1, "n": 3})).unwrap())
                .unwrap();
        assert_eq!(json, r#"{"n":3,"x":1.0000000000000001e-1}"#);
    }

    proptest! {
        #[test]
        fn float_text_round_trips(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
            let back: f64 = format_f64(v).parse().unwrap();
            prop_assert_eq!(back.to_bits(), v.to_bits());
            let json = to_json_bytes(&v).unwrap();
            let parsed: f64 = serde_json::from_slice(&json).unwrap();
            prop_assert_eq!(parsed.to_bits(), v.to_bits());
        }
    }
}
