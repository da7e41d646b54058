//! Two-letter ISO codes for languages and countries.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// ISO 639-1 language code, stored lowercase.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LangCode([u8; 2]);

/// ISO 3166-1 alpha-2 country code, stored uppercase.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountryCode([u8; 2]);

fn two_letters(raw: &str) -> Option<[u8; 2]> {
    let bytes = raw.trim().as_bytes();
    match bytes {
        [a, b] if a.is_ascii_alphabetic() && b.is_ascii_alphabetic() => Some([*a, *b]),
        _ => None,
    }
}

impl LangCode {
    pub const EN: LangCode = LangCode(*b"en");

    pub fn new(raw: &str) -> Result<Self, Error> {
        two_letters(raw)
            .map(|[a, b]| LangCode([a.to_ascii_lowercase(), b.to_ascii_lowercase()]))
            .ok_or_else(|| Error::InvalidLanguageCode(raw.to_string()))
    }

    pub fn as_str(&self) -> &str {
        // Both bytes are ASCII letters.
        std::str::from_utf8(&self.0).unwrap()
    }

    pub fn is_english(&self) -> bool {
        *self == Self::EN
    }
}

impl CountryCode {
    pub fn new(raw: &str) -> Result<Self, Error> {
        two_letters(raw)
            .map(|[a, b]| CountryCode([a.to_ascii_uppercase(), b.to_ascii_uppercase()]))
            .ok_or_else(|| Error::InvalidCountryCode(raw.to_string()))
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).unwrap()
    }
}

macro_rules! code_impls {
    ($ty:ident) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self, Error> {
                $ty::new(s)
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl fmt::Debug for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({})", stringify!($ty), self.as_str())
            }
        }

        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let raw = String::deserialize(d)?;
                $ty::new(&raw).map_err(serde::de::Error::custom)
            }
        }
    };
}

code_impls!(LangCode);
code_impls!(CountryCode);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn language_codes_are_lowercased() {
        assert_eq!(LangCode::new("RU").unwrap().as_str(), "ru");
        assert!(LangCode::new("rus").is_err());
        assert!(LangCode::new("r1").is_err());
        assert!(LangCode::new("").is_err());
    }

    #[test]
    fn country_codes_are_uppercased() {
        assert_eq!(CountryCode::new("jp").unwrap().as_str(), "JP");
        assert!(CountryCode::new("Japan").is_err());
    }

    #[test]
    fn serde_uses_plain_strings() {
        let code: LangCode = serde_json::from_str("\"ja\"").unwrap();
        assert_eq!(serde_json::to_string(&code).unwrap(), "\"ja\"");
        assert!(serde_json::from_str::<LangCode>("\"japanese\"").is_err());
    }
}
