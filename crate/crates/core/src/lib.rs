pub mod eval;
pub mod impact;
pub mod lifetime;
pub mod mitigation;
pub mod predicate;
pub mod registry;
pub mod resolver;
pub(crate) mod source;
