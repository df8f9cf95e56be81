use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::tables::*;

/// The thirteen relations a dump may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Table {
    #[serde(rename = "reg101_appln")]
    Reg101Appln,
    #[serde(rename = "reg102_pat_publn")]
    Reg102PatPubln,
    #[serde(rename = "reg107_parties")]
    Reg107Parties,
    #[serde(rename = "reg109_design_states")]
    Reg109DesignStates,
    #[serde(rename = "reg111_licensee")]
    Reg111Licensee,
    #[serde(rename = "reg112_licensee_states")]
    Reg112LicenseeStates,
    #[serde(rename = "reg201_proc_step")]
    Reg201ProcStep,
    #[serde(rename = "reg301_event_data")]
    Reg301EventData,
    #[serde(rename = "tls201_appln")]
    Tls201Appln,
    #[serde(rename = "tls209_appln_ipc")]
    Tls209ApplnIpc,
    #[serde(rename = "tls211_pat_publn")]
    Tls211PatPubln,
    #[serde(rename = "tls212_citation")]
    Tls212Citation,
    #[serde(rename = "tls221_inpadoc_prs")]
    Tls221InpadocPrs,
}

impl Table {
    pub const ALL: [Table; 13] = [
        Table::Reg101Appln,
        Table::Reg102PatPubln,
        Table::Reg107Parties,
        Table::Reg109DesignStates,
        Table::Reg111Licensee,
        Table::Reg112LicenseeStates,
        Table::Reg201ProcStep,
        Table::Reg301EventData,
        Table::Tls201Appln,
        Table::Tls209ApplnIpc,
        Table::Tls211PatPubln,
        Table::Tls212Citation,
        Table::Tls221InpadocPrs,
    ];

    /// Lowercase table name; also the file stem on disk.
    pub fn name(self) -> &'static str {
        match self {
            Table::Reg101Appln => "reg101_appln",
            Table::Reg102PatPubln => "reg102_pat_publn",
            Table::Reg107Parties => "reg107_parties",
            Table::Reg109DesignStates => "reg109_design_states",
            Table::Reg111Licensee => "reg111_licensee",
            Table::Reg112LicenseeStates => "reg112_licensee_states",
            Table::Reg201ProcStep => "reg201_proc_step",
            Table::Reg301EventData => "reg301_event_data",
            Table::Tls201Appln => "tls201_appln",
            Table::Tls209ApplnIpc => "tls209_appln_ipc",
            Table::Tls211PatPubln => "tls211_pat_publn",
            Table::Tls212Citation => "tls212_citation",
            Table::Tls221InpadocPrs => "tls221_inpadoc_prs",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.csv", self.name())
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Table {
    type Err = UnknownCode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let stem = s.strip_suffix(".csv").unwrap_or(s);
        Table::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(stem))
            .ok_or_else(|| UnknownCode {
                field: "table",
                value: s.to_string(),
            })
    }
}

/// A fully typed dump. Relations keep their input order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub applications: Vec<RegisterApplication>,
    pub publications: Vec<RegisterPublication>,
    pub parties: Vec<Party>,
    pub designated_states: Vec<DesignatedState>,
    pub licensees: Vec<Licensee>,
    pub licensee_states: Vec<LicenseeState>,
    pub procedure_steps: Vec<ProcedureStep>,
    pub events: Vec<RegisterEvent>,
    pub core_applications: Vec<CoreApplication>,
    pub ipc: Vec<IpcAssignment>,
    pub core_publications: Vec<CorePublication>,
    pub citations: Vec<Citation>,
    pub legal_status: Vec<LegalStatusEvent>,
}

impl Dataset {
    pub fn row_count(&self, table: Table) -> usize {
        match table {
            Table::Reg101Appln => self.applications.len(),
            Table::Reg102PatPubln => self.publications.len(),
            Table::Reg107Parties => self.parties.len(),
            Table::Reg109DesignStates => self.designated_states.len(),
            Table::Reg111Licensee => self.licensees.len(),
            Table::Reg112LicenseeStates => self.licensee_states.len(),
            Table::Reg201ProcStep => self.procedure_steps.len(),
            Table::Reg301EventData => self.events.len(),
            Table::Tls201Appln => self.core_applications.len(),
            Table::Tls209ApplnIpc => self.ipc.len(),
            Table::Tls211PatPubln => self.core_publications.len(),
            Table::Tls212Citation => self.citations.len(),
            Table::Tls221InpadocPrs => self.legal_status.len(),
        }
    }

    pub fn total_rows(&self) -> usize {
        Table::ALL.iter().map(|t| self.row_count(*t)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total_rows() == 0
    }

    /// Appends every relation of `other` after this one's rows.
    pub fn extend(&mut self, other: Dataset) {
        self.applications.extend(other.applications);
        self.publications.extend(other.publications);
        self.parties.extend(other.parties);
        self.designated_states.extend(other.designated_states);
        self.licensees.extend(other.licensees);
        self.licensee_states.extend(other.licensee_states);
        self.procedure_steps.extend(other.procedure_steps);
        self.events.extend(other.events);
        self.core_applications.extend(other.core_applications);
        self.ipc.extend(other.ipc);
        self.core_publications.extend(other.core_publications);
        self.citations.extend(other.citations);
        self.legal_status.extend(other.legal_status);
    }
}
