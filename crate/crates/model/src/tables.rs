//! Row types for the register (`reg*`) and core (`tls*`) relations.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::ids::{ApplnId, PublnId, RegId};

/// Weekly bulletin identifier: `(year, week)`. Orders as an integer tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Bulletin {
    pub year: u16,
    pub week: u8,
}

impl Bulletin {
    pub const MIN_YEAR: u16 = 1978;
    pub const MAX_YEAR: u16 = 2100;

    pub fn new(year: u16, week: u8) -> Self {
        Self { year, week }
    }

    pub fn is_valid(self) -> bool {
        (Self::MIN_YEAR..=Self::MAX_YEAR).contains(&self.year) && (1..=53).contains(&self.week)
    }
}

impl fmt::Display for Bulletin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{:02}", self.year, self.week)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterApplication {
    pub id: RegId,
    pub appln_id: ApplnId,
    pub appln_filing_date: NaiveDate,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreApplication {
    pub appln_id: ApplnId,
    pub appln_auth: String,
    pub appln_kind: String,
    pub appln_filing_date: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IpcAssignment {
    pub appln_id: ApplnId,
    pub ipc_class_symbol: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorePublication {
    pub pat_publn_id: PublnId,
    pub appln_id: ApplnId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Citation {
    pub pat_publn_id: PublnId,
    pub cited_pat_publn_id: PublnId,
    /// `0` rows are kept but never count as patent citations.
    pub pat_citn_seq_nr: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterPublication {
    pub id: RegId,
    pub publn_kind: String,
    pub bulletin: Bulletin,
}

/// Error returned when a coded column holds an unknown value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownCode {
    pub field: &'static str,
    pub value: String,
}

impl fmt::Display for UnknownCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown {} code {:?}", self.field, self.value)
    }
}

impl std::error::Error for UnknownCode {}

macro_rules! coded_enum {
    ($(#[$meta:meta])* $name:ident, $field:literal, { $($variant:ident => $code:literal $(| $alias:literal)*),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $code)] $variant),+
        }

        impl $name {
            pub fn code(self) -> &'static str {
                match self {
                    $($name::$variant => $code),+
                }
            }
        }

        impl FromStr for $name {
            type Err = UnknownCode;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                $(
                    if s.eq_ignore_ascii_case($code) $(|| s.eq_ignore_ascii_case($alias))* {
                        return Ok($name::$variant);
                    }
                )+
                Err(UnknownCode { field: $field, value: s.to_string() })
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.code())
            }
        }
    };
}

coded_enum!(
    /// `type` column of the parties table.
    PartyType, "party type", {
        Applicant => "A",
        Representative => "R",
        Inventor => "I",
    }
);

coded_enum!(
    LicenseType, "license type", {
        Exclusive => "EXC",
        NonExclusive => "NEX",
        RightInRem => "RIR",
    }
);

coded_enum!(
    /// Whether a licence lists its states explicitly or covers every
    /// contracting state at the time.
    Designation, "designation", {
        All => "all",
        AsIndicated => "as-indicated" | "as_indicated" | "asindicated",
    }
);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Party {
    pub id: RegId,
    pub party_type: PartyType,
    pub seq_nr: u32,
    pub set_seq_nr: u32,
    pub is_latest: bool,
    pub name: String,
    pub customer_id: String,
    /// Absent when the change was never announced in a bulletin.
    pub bulletin: Option<Bulletin>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterEvent {
    pub id: RegId,
    pub event_code: String,
    pub event_date: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcedureStep {
    pub id: RegId,
    pub step_code: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Licensee {
    pub id: RegId,
    pub licensee_seq_nr: u32,
    pub type_license: LicenseType,
    pub designation: Designation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LicenseeState {
    pub id: RegId,
    pub licensee_seq_nr: u32,
    pub licensee_country: String,
    pub bulletin: Bulletin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignatedState {
    pub id: RegId,
    pub country: String,
}

/// One INPADOC legal-status row. `country` carries L501EP and
/// `fee_payment_year` carries L520EP.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegalStatusEvent {
    pub appln_id: ApplnId,
    pub prs_code: String,
    pub country: Option<String>,
    pub fee_payment_year: Option<u16>,
}

pub const PGFP: &str = "PGFP";

/// Two ASCII uppercase letters.
pub fn is_country_code(s: &str) -> bool {
    s.len() == 2 && s.bytes().all(|b| b.is_ascii_uppercase())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coded_enums_parse_case_insensitively() {
        assert_eq!("a".parse::<PartyType>().unwrap(), PartyType::Applicant);
        assert_eq!("nex".parse::<LicenseType>().unwrap(), LicenseType::NonExclusive);
        assert_eq!("ALL".parse::<Designation>().unwrap(), Designation::All);
        assert_eq!(
            "As_Indicated".parse::<Designation>().unwrap(),
            Designation::AsIndicated
        );
        assert!("X".parse::<PartyType>().is_err());
        assert_eq!(Designation::AsIndicated.to_string(), "as-indicated");
    }

    #[test]
    fn bulletin_orders_numerically() {
        assert!(Bulletin::new(2001, 5) < Bulletin::new(2001, 30));
        assert!(Bulletin::new(2000, 52) < Bulletin::new(2001, 1));
        assert!(!Bulletin::new(1977, 10).is_valid());
        assert!(!Bulletin::new(2000, 54).is_valid());
        assert!(Bulletin::new(2100, 53).is_valid());
    }

    #[test]
    fn country_codes() {
        assert!(is_country_code("DE"));
        assert!(!is_country_code("de"));
        assert!(!is_country_code("DEU"));
        assert!(!is_country_code(""));
    }
}
