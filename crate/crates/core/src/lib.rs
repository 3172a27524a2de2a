//! Generalized probabilistic theories with quantum, classical and
//! boxworld atoms, composed under the max tensor product.

pub mod atomic;
pub mod builtins;
pub mod compose;
pub mod error;
pub mod hermitian;
pub mod json;
pub mod lp;
pub mod protocols;
pub mod search;
pub mod steering;
pub mod system;
pub mod transforms;
pub mod vector;
pub mod verdict;

pub use error::{Error, Result};
pub use search::SearchConfig;
pub use system::{AtomicSystem, SystemType};
pub use transforms::LinearMap;
pub use vector::GptVector;
pub use verdict::{MembershipVerdict, Witness};
