use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! id_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u64);

        impl $name {
            pub fn get(self) -> u64 {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }

        impl From<u64> for $name {
            fn from(v: u64) -> Self {
                Self(v)
            }
        }
    };
}

id_newtype!(
    /// Register-side application identifier (`id` in the reg* tables).
    RegId
);
id_newtype!(
    /// Core-side application identifier. `0` on the register side means the
    /// application has no core record.
    ApplnId
);
id_newtype!(
    /// Core publication identifier (`pat_publn_id`).
    PublnId
);

impl ApplnId {
    pub const UNLINKED: ApplnId = ApplnId(0);

    pub fn is_linked(self) -> bool {
        self.0 != 0
    }
}
