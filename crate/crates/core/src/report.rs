//! Deterministic JSON emission: floats at fixed 17-significant-digit
//! precision so identical runs produce byte-identical reports.

use std::io;

use serde::Serialize;

struct FixedFloats;

impl serde_json::ser::Formatter for FixedFloats {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes to compact JSON with all floats at 17 significant digits.
pub fn to_json_fixed<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats);
    value
        .serialize(&mut ser)
        .expect("report serialization cannot fail");
    String::from_utf8(buf).expect("serde_json emits utf8")
}
