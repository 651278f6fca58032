//! JSON representations shared by certificates, instance files and reports.
//!
//! Complex numbers are written as `[re, im]`; a bare JSON number is accepted
//! on input as a real value. Matrices are row-major nested arrays.

use num_complex::Complex64;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A complex number with the `[re, im]` wire format.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Cx(pub Complex64);

impl Serialize for Cx {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(2)?;
        t.serialize_element(&self.0.re)?;
        t.serialize_element(&self.0.im)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for Cx {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CxVisitor;

        impl<'de> Visitor<'de> for CxVisitor {
            type Value = Cx;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a complex number as [re, im] or a real number")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Cx, E> {
                Ok(Cx(Complex64::new(v, 0.0)))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Cx, E> {
                Ok(Cx(Complex64::new(v as f64, 0.0)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Cx, E> {
                Ok(Cx(Complex64::new(v as f64, 0.0)))
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Cx, A::Error> {
                let re: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(Cx(Complex64::new(re, im)))
            }
        }

        deserializer.deserialize_any(CxVisitor)
    }
}

impl From<Complex64> for Cx {
    fn from(c: Complex64) -> Self {
        Cx(c)
    }
}

/// Row-major complex matrix as it appears on the wire.
pub type MatrixRepr = Vec<Vec<Cx>>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_and_real_forms() {
        let c: Cx = serde_json::from_str("[3.0, -4.5]").unwrap();
        assert_eq!(c.0, Complex64::new(3.0, -4.5));
        let r: Cx = serde_json::from_str("2").unwrap();
        assert_eq!(r.0, Complex64::new(2.0, 0.0));
        assert!(serde_json::from_str::<Cx>("[1.0]").is_err());
        assert!(serde_json::from_str::<Cx>("[1.0, 2.0, 3.0]").is_err());
        assert_eq!(serde_json::to_string(&Cx(Complex64::new(0.5, 1.0))).unwrap(), "[0.5,1.0]");
    }

    #[test]
    fn full_precision_round_trip() {
        let v = Cx(Complex64::new(0.1 + 0.2, std::f64::consts::PI / 7.0));
        let text = serde_json::to_string(&v).unwrap();
        let back: Cx = serde_json::from_str(&text).unwrap();
        assert_eq!(back.0.re.to_bits(), v.0.re.to_bits());
        assert_eq!(back.0.im.to_bits(), v.0.im.to_bits());
    }
}
