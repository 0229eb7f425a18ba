//! Interactive disputes: a client plays one member of a closed net move by
//! move, the other members answer from their trees.

mod http;
mod session;

pub use http::{router, serve};
pub use session::{CreateSession, ServiceError, Session, SessionStore, Snapshot, Status};
