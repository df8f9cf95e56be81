//! Hash indexes over an immutable [`Dataset`].
//!
//! Every index maps a key to row positions in the owned relations, so the
//! raw rows stay available (the reference evaluator reads them directly).

use std::collections::HashMap;
use std::hash::Hash;

use patreg_model::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("duplicate register id {0}")]
    DuplicateRegisterId(RegId),
    #[error("appln_id {0} appears on more than one register application")]
    DuplicateRegisterLink(ApplnId),
    #[error("duplicate core appln_id {0}")]
    DuplicateCoreId(ApplnId),
    #[error("appln_id 0 never links to a core application")]
    UnlinkedApplnId,
}

type MultiIndex<K> = HashMap<K, Vec<usize>>;

fn multi<K: Hash + Eq, T>(rows: &[T], key: impl Fn(&T) -> K) -> MultiIndex<K> {
    let mut idx: MultiIndex<K> = HashMap::with_capacity(rows.len() / 2 + 1);
    for (i, r) in rows.iter().enumerate() {
        idx.entry(key(r)).or_default().push(i);
    }
    idx
}

fn lookup<'a, K: Hash + Eq, T>(
    rows: &'a [T],
    idx: &'a MultiIndex<K>,
    key: &K,
) -> impl Iterator<Item = &'a T> + 'a {
    idx.get(key)
        .map(Vec::as_slice)
        .unwrap_or_default()
        .iter()
        .map(move |&i| &rows[i])
}

/// Subclass key of an IPC symbol: its first four characters.
pub fn ipc_subclass(symbol: &str) -> &str {
    match symbol.char_indices().nth(4) {
        Some((end, _)) => &symbol[..end],
        None => symbol,
    }
}

#[derive(Debug)]
pub struct IndexedStore {
    dataset: Dataset,
    reg_by_id: HashMap<RegId, usize>,
    reg_by_appln: HashMap<ApplnId, usize>,
    core_by_appln: HashMap<ApplnId, usize>,
    core_publications: MultiIndex<ApplnId>,
    citations: MultiIndex<PublnId>,
    publications: MultiIndex<RegId>,
    parties: MultiIndex<RegId>,
    events: MultiIndex<RegId>,
    steps: MultiIndex<RegId>,
    licensees: MultiIndex<RegId>,
    licensee_states: MultiIndex<RegId>,
    designated_states: MultiIndex<RegId>,
    legal_status: MultiIndex<ApplnId>,
    ipc_by_subclass: MultiIndex<String>,
}

#[derive(Default)]
struct Indexes {
    core_publications: MultiIndex<ApplnId>,
    citations: MultiIndex<PublnId>,
    publications: MultiIndex<RegId>,
    parties: MultiIndex<RegId>,
    events: MultiIndex<RegId>,
    steps: MultiIndex<RegId>,
    licensees: MultiIndex<RegId>,
    licensee_states: MultiIndex<RegId>,
    designated_states: MultiIndex<RegId>,
    legal_status: MultiIndex<ApplnId>,
    ipc_by_subclass: MultiIndex<String>,
}

impl IndexedStore {
    /// Builds every index. Relations are indexed in parallel, one thread
    /// each.
    pub fn build(dataset: Dataset) -> Result<Self, StoreError> {
        let mut reg_by_id = HashMap::with_capacity(dataset.applications.len());
        let mut reg_by_appln = HashMap::with_capacity(dataset.applications.len());
        for (i, a) in dataset.applications.iter().enumerate() {
            if reg_by_id.insert(a.id, i).is_some() {
                return Err(StoreError::DuplicateRegisterId(a.id));
            }
            if a.appln_id.is_linked() && reg_by_appln.insert(a.appln_id, i).is_some() {
                return Err(StoreError::DuplicateRegisterLink(a.appln_id));
            }
        }
        let mut core_by_appln = HashMap::with_capacity(dataset.core_applications.len());
        for (i, a) in dataset.core_applications.iter().enumerate() {
            if core_by_appln.insert(a.appln_id, i).is_some() {
                return Err(StoreError::DuplicateCoreId(a.appln_id));
            }
        }

        let ds = &dataset;
        let idx = std::thread::scope(|s| {
            let core_publications = s.spawn(|| multi(&ds.core_publications, |r| r.appln_id));
            let citations = s.spawn(|| multi(&ds.citations, |r| r.pat_publn_id));
            let publications = s.spawn(|| multi(&ds.publications, |r| r.id));
            let parties = s.spawn(|| multi(&ds.parties, |r| r.id));
            let events = s.spawn(|| multi(&ds.events, |r| r.id));
            let steps = s.spawn(|| multi(&ds.procedure_steps, |r| r.id));
            let licensees = s.spawn(|| multi(&ds.licensees, |r| r.id));
            let licensee_states = s.spawn(|| multi(&ds.licensee_states, |r| r.id));
            let designated_states = s.spawn(|| multi(&ds.designated_states, |r| r.id));
            let legal_status = s.spawn(|| multi(&ds.legal_status, |r| r.appln_id));
            let ipc = s.spawn(|| multi(&ds.ipc, |r| ipc_subclass(&r.ipc_class_symbol).to_string()));
            Indexes {
                core_publications: core_publications.join().unwrap(),
                citations: citations.join().unwrap(),
                publications: publications.join().unwrap(),
                parties: parties.join().unwrap(),
                events: events.join().unwrap(),
                steps: steps.join().unwrap(),
                licensees: licensees.join().unwrap(),
                licensee_states: licensee_states.join().unwrap(),
                designated_states: designated_states.join().unwrap(),
                legal_status: legal_status.join().unwrap(),
                ipc_by_subclass: ipc.join().unwrap(),
            }
        });

        Ok(Self {
            dataset,
            reg_by_id,
            reg_by_appln,
            core_by_appln,
            core_publications: idx.core_publications,
            citations: idx.citations,
            publications: idx.publications,
            parties: idx.parties,
            events: idx.events,
            steps: idx.steps,
            licensees: idx.licensees,
            licensee_states: idx.licensee_states,
            designated_states: idx.designated_states,
            legal_status: idx.legal_status,
            ipc_by_subclass: idx.ipc_by_subclass,
        })
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn into_dataset(self) -> Dataset {
        self.dataset
    }

    pub fn application(&self, id: RegId) -> Option<&RegisterApplication> {
        self.reg_by_id.get(&id).map(|&i| &self.dataset.applications[i])
    }

    /// The register application linked to a core application.
    pub fn register_for_core(
        &self,
        appln_id: ApplnId,
    ) -> Result<Option<&RegisterApplication>, StoreError> {
        if !appln_id.is_linked() {
            return Err(StoreError::UnlinkedApplnId);
        }
        Ok(self
            .reg_by_appln
            .get(&appln_id)
            .map(|&i| &self.dataset.applications[i]))
    }

    pub fn core_application(&self, appln_id: ApplnId) -> Option<&CoreApplication> {
        self.core_by_appln
            .get(&appln_id)
            .map(|&i| &self.dataset.core_applications[i])
    }

    pub fn core_publications(&self, appln_id: ApplnId) -> impl Iterator<Item = &CorePublication> {
        lookup(&self.dataset.core_publications, &self.core_publications, &appln_id)
    }

    /// Citations made by a publication.
    pub fn citations(&self, pat_publn_id: PublnId) -> impl Iterator<Item = &Citation> {
        lookup(&self.dataset.citations, &self.citations, &pat_publn_id)
    }

    pub fn publications(&self, id: RegId) -> impl Iterator<Item = &RegisterPublication> {
        lookup(&self.dataset.publications, &self.publications, &id)
    }

    pub fn parties(&self, id: RegId) -> impl Iterator<Item = &Party> {
        lookup(&self.dataset.parties, &self.parties, &id)
    }

    pub fn events(&self, id: RegId) -> impl Iterator<Item = &RegisterEvent> {
        lookup(&self.dataset.events, &self.events, &id)
    }

    pub fn procedure_steps(&self, id: RegId) -> impl Iterator<Item = &ProcedureStep> {
        lookup(&self.dataset.procedure_steps, &self.steps, &id)
    }

    pub fn licensees(&self, id: RegId) -> impl Iterator<Item = &Licensee> {
        lookup(&self.dataset.licensees, &self.licensees, &id)
    }

    pub fn licensee_states(&self, id: RegId) -> impl Iterator<Item = &LicenseeState> {
        lookup(&self.dataset.licensee_states, &self.licensee_states, &id)
    }

    pub fn designated_states(&self, id: RegId) -> impl Iterator<Item = &DesignatedState> {
        lookup(&self.dataset.designated_states, &self.designated_states, &id)
    }

    pub fn legal_status(&self, appln_id: ApplnId) -> impl Iterator<Item = &LegalStatusEvent> {
        lookup(&self.dataset.legal_status, &self.legal_status, &appln_id)
    }

    /// IPC rows whose symbol starts with `prefix`. Prefixes of four or more
    /// characters hit a single subclass bucket; shorter ones scan the
    /// matching bucket keys.
    pub fn ipc_with_prefix<'a>(&'a self, prefix: &'a str) -> Vec<&'a IpcAssignment> {
        let rows = &self.dataset.ipc;
        let key = ipc_subclass(prefix);
        let mut out: Vec<&IpcAssignment> = if prefix.chars().count() >= 4 {
            lookup(rows, &self.ipc_by_subclass, &key.to_string()).collect()
        } else {
            self.ipc_by_subclass
                .iter()
                .filter(|(k, _)| k.starts_with(prefix))
                .flat_map(|(_, v)| v.iter().map(|&i| &rows[i]))
                .collect()
        };
        out.retain(|r| r.ipc_class_symbol.starts_with(prefix));
        out
    }

    /// Number of `(key, row)` entries in the multimap for a table.
    pub fn index_entries(&self, table: Table) -> usize {
        fn count<K>(m: &MultiIndex<K>) -> usize {
            m.values().map(Vec::len).sum()
        }
        match table {
            Table::Reg101Appln => self.reg_by_id.len(),
            Table::Tls201Appln => self.core_by_appln.len(),
            Table::Tls211PatPubln => count(&self.core_publications),
            Table::Tls212Citation => count(&self.citations),
            Table::Reg102PatPubln => count(&self.publications),
            Table::Reg107Parties => count(&self.parties),
            Table::Reg301EventData => count(&self.events),
            Table::Reg201ProcStep => count(&self.steps),
            Table::Reg111Licensee => count(&self.licensees),
            Table::Reg112LicenseeStates => count(&self.licensee_states),
            Table::Reg109DesignStates => count(&self.designated_states),
            Table::Tls221InpadocPrs => count(&self.legal_status),
            Table::Tls209ApplnIpc => count(&self.ipc_by_subclass),
        }
    }
}
