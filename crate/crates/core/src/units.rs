use serde::{Deserialize, Serialize};

/// Logarithm base used when reporting entropic quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum Base {
    #[default]
    Nats,
    Bits,
    Other(f64),
}

impl Base {
    pub fn from_f64(b: f64) -> Self {
        if (b - 2.0).abs() < 1e-15 {
            Base::Bits
        } else if (b - std::f64::consts::E).abs() < 1e-12 {
            Base::Nats
        } else {
            Base::Other(b)
        }
    }

    pub fn ln_base(self) -> f64 {
        match self {
            Base::Nats => 1.0,
            Base::Bits => std::f64::consts::LN_2,
            Base::Other(b) => b.ln(),
        }
    }

    /// Convert a value measured in nats.
    pub fn from_nats(self, v: f64) -> f64 {
        match self {
            Base::Nats => v,
            _ => v / self.ln_base(),
        }
    }

    /// Convert a value in this base back to nats.
    pub fn to_nats(self, v: f64) -> f64 {
        match self {
            Base::Nats => v,
            _ => v * self.ln_base(),
        }
    }
}

/// Serde helpers mapping `±f64::INFINITY` to the strings `"inf"` / `"-inf"`.
pub mod serde_inf {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(D::Error::custom(format!("expected number or \"inf\", got {other:?}"))),
            },
        }
    }

    pub mod option {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => super::serialize(x, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            #[derive(serde::Deserialize)]
            struct W(#[serde(with = "super")] f64);
            Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
        }
    }
}
