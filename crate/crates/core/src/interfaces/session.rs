//! Session authentication and scope gating.
//!
//! A session is established by the first message on a connection (AUTH_REQ)
//! against the scenario's registered-party list. Operator tenants get
//! OPERATOR (Type-5 style) scope; verticals and OTT providers get
//! THIRD_PARTY (service-exposure) scope. The scope gates which message types
//! the session may send.

use std::collections::BTreeMap;

use crate::domain::TenantId;

use super::wire::{Message, SessionScope};

/// Registered parties and their shared secrets.
#[derive(Debug, Clone, Default)]
pub struct PartyDirectory {
    secrets: BTreeMap<TenantId, String>,
}

impl PartyDirectory {
    pub fn register(&mut self, tenant: TenantId, secret: impl Into<String>) {
        self.secrets.insert(tenant, secret.into());
    }

    pub fn is_registered(&self, tenant: &TenantId) -> bool {
        self.secrets.contains_key(tenant)
    }

    pub fn tenants(&self) -> impl Iterator<Item = &TenantId> {
        self.secrets.keys()
    }

    fn secret_matches(&self, tenant: &TenantId, secret: &str) -> bool {
        self.secrets.get(tenant).map(String::as_str) == Some(secret)
    }
}

/// An authenticated session bound to one tenant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    pub session_id: String,
    pub tenant: TenantId,
    pub auth_token: String,
    pub scope: SessionScope,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SessionError {
    #[error("unknown party or bad secret")]
    AuthFailed,
    #[error("message type {message_type} not allowed in this scope")]
    ScopeViolation { message_type: &'static str },
    #[error("request tenant does not match the session tenant")]
    TenantMismatch,
    #[error("session is not authenticated")]
    NotAuthenticated,
}

/// Validate credentials and mint a session scoped to the registered tenant.
pub fn authenticate(
    directory: &PartyDirectory,
    tenant: &TenantId,
    secret: &str,
    session_number: u64,
) -> Result<Session, SessionError> {
    if !directory.secret_matches(tenant, secret) {
        return Err(SessionError::AuthFailed);
    }
    let scope = match tenant {
        TenantId::Operator(_) => SessionScope::Operator,
        TenantId::Service(_) => SessionScope::ThirdParty,
    };
    Ok(Session {
        session_id: format!("S{session_number}"),
        tenant: tenant.clone(),
        auth_token: format!("tok-{session_number}"),
        scope,
    })
}

/// May a session of `scope` send this message type?
///
/// Slice requests/releases and the service-exposure queries (context,
/// charging) are open to both scopes; KPI performance feedback is an
/// operator-interface duty, so third-party sessions may not request it.
/// Server-to-client types are never accepted from a client.
pub fn scope_allows(scope: SessionScope, message: &Message) -> bool {
    match message {
        Message::SliceReq(_)
        | Message::SliceRelease(_)
        | Message::ContextQuery(_)
        | Message::ChargingQuery(_) => true,
        Message::KpiReport(body) => scope == SessionScope::Operator && body.report.is_none(),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interfaces::wire::{ContextQueryBody, KpiReportBody};

    fn directory() -> PartyDirectory {
        let mut d = PartyDirectory::default();
        d.register(TenantId::operator("00101").unwrap(), "op-secret");
        d.register(TenantId::service("grid-util").unwrap(), "svc-secret");
        d
    }

    #[test]
    fn registered_vertical_gets_third_party_scope() {
        let session = authenticate(
            &directory(),
            &TenantId::service("grid-util").unwrap(),
            "svc-secret",
            1,
        )
        .unwrap();
        assert_eq!(session.scope, SessionScope::ThirdParty);
        assert_eq!(session.session_id, "S1");
    }

    #[test]
    fn unknown_party_or_bad_secret_fails() {
        let d = directory();
        assert_eq!(
            authenticate(&d, &TenantId::service("nobody").unwrap(), "x", 1),
            Err(SessionError::AuthFailed)
        );
        assert_eq!(
            authenticate(&d, &TenantId::operator("00101").unwrap(), "wrong", 1),
            Err(SessionError::AuthFailed)
        );
    }

    #[test]
    fn kpi_feedback_is_operator_only() {
        let kpi = Message::KpiReport(KpiReportBody {
            tenant: TenantId::operator("00101").unwrap(),
            from_slot: 0,
            to_slot: 10,
            report: None,
        });
        assert!(scope_allows(SessionScope::Operator, &kpi));
        assert!(!scope_allows(SessionScope::ThirdParty, &kpi));

        let ctx = Message::ContextQuery(ContextQueryBody { ue_ids: None });
        assert!(scope_allows(SessionScope::Operator, &ctx));
        assert!(scope_allows(SessionScope::ThirdParty, &ctx));
    }
}
