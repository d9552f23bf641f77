//! Identifier newtypes shared across the simulator and the broker.
//!
//! All identifiers are restricted to `[A-Za-z0-9_.:-]` so they can appear
//! verbatim in metrics CSV rows and canonical wire messages.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::DomainError;

fn check_id(kind: &'static str, value: &str) -> Result<(), DomainError> {
    if value.is_empty() {
        return Err(DomainError::BadIdentifier {
            kind,
            value: value.to_string(),
            detail: "must not be empty",
        });
    }
    if !value
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | ':' | '-'))
    {
        return Err(DomainError::BadIdentifier {
            kind,
            value: value.to_string(),
            detail: "allowed characters are [A-Za-z0-9_.:-]",
        });
    }
    Ok(())
}

macro_rules! string_id {
    ($(#[$doc:meta])* $name:ident, $kind:literal) => {
        $(#[$doc])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            pub fn new(value: impl Into<String>) -> Result<Self, DomainError> {
                let value = value.into();
                check_id($kind, &value)?;
                Ok(Self(value))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<String> for $name {
            type Error = DomainError;
            fn try_from(value: String) -> Result<Self, Self::Error> {
                Self::new(value)
            }
        }

        impl From<$name> for String {
            fn from(id: $name) -> String {
                id.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($kind, "({})"), self.0)
            }
        }
    };
}

string_id!(
    /// A radio cell in the shared RAN.
    CellId,
    "CellId"
);
string_id!(
    /// A granted network slice (assigned by the broker, `sl-NNNNNN`).
    SliceId,
    "SliceId"
);
string_id!(
    /// A tenant-chosen request identifier, unique across the broker lifetime.
    RequestId,
    "RequestId"
);
string_id!(
    /// A user equipment (device) in the simulated RAN.
    UeId,
    "UeId"
);
string_id!(
    /// A core-network routing endpoint (an MME id in this model).
    EndpointId,
    "EndpointId"
);
string_id!(
    /// A registered third party (vertical or OTT provider).
    ServiceId,
    "ServiceId"
);

/// Public Land Mobile Network identifier: 5 or 6 decimal digits (MCC+MNC).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PlmnId(String);

impl PlmnId {
    pub fn new(value: impl Into<String>) -> Result<Self, DomainError> {
        let value = value.into();
        if !(value.len() == 5 || value.len() == 6) || !value.chars().all(|c| c.is_ascii_digit()) {
            return Err(DomainError::BadIdentifier {
                kind: "PlmnId",
                value,
                detail: "must be 5 or 6 decimal digits (MCC+MNC)",
            });
        }
        Ok(Self(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for PlmnId {
    type Error = DomainError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<PlmnId> for String {
    fn from(id: PlmnId) -> String {
        id.0
    }
}

impl fmt::Display for PlmnId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for PlmnId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlmnId({})", self.0)
    }
}

/// The party a slice (or UE, or session) belongs to.
///
/// Operators are identified by PLMN-id; verticals and OTT providers by a
/// registered service identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "TenantIdRepr", into = "TenantIdRepr")]
pub enum TenantId {
    Operator(PlmnId),
    Service(ServiceId),
}

impl TenantId {
    pub fn operator(plmn: impl Into<String>) -> Result<Self, DomainError> {
        Ok(TenantId::Operator(PlmnId::new(plmn)?))
    }

    pub fn service(id: impl Into<String>) -> Result<Self, DomainError> {
        Ok(TenantId::Service(ServiceId::new(id)?))
    }

    pub fn is_operator(&self) -> bool {
        matches!(self, TenantId::Operator(_))
    }

    pub fn value(&self) -> &str {
        match self {
            TenantId::Operator(p) => p.as_str(),
            TenantId::Service(s) => s.as_str(),
        }
    }
}

impl fmt::Display for TenantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TenantId::Operator(p) => write!(f, "OPERATOR:{p}"),
            TenantId::Service(s) => write!(f, "SERVICE:{s}"),
        }
    }
}

impl fmt::Debug for TenantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TenantId({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct TenantIdRepr {
    kind: TenantKind,
    value: String,
}

#[derive(Serialize, Deserialize)]
enum TenantKind {
    #[serde(rename = "OPERATOR")]
    Operator,
    #[serde(rename = "SERVICE")]
    Service,
}

impl TryFrom<TenantIdRepr> for TenantId {
    type Error = DomainError;
    fn try_from(repr: TenantIdRepr) -> Result<Self, Self::Error> {
        match repr.kind {
            TenantKind::Operator => TenantId::operator(repr.value),
            TenantKind::Service => TenantId::service(repr.value),
        }
    }
}

impl From<TenantId> for TenantIdRepr {
    fn from(id: TenantId) -> Self {
        match id {
            TenantId::Operator(p) => TenantIdRepr {
                kind: TenantKind::Operator,
                value: p.0,
            },
            TenantId::Service(s) => TenantIdRepr {
                kind: TenantKind::Service,
                value: s.0.clone(),
            },
        }
    }
}
