//! Registry snapshot model: versions, requirements, dependency declarations
//! and package features.

mod index;
mod model;
mod version;

use thiserror::Error;

pub use index::{load_index, IndexDep, IndexRecord, RecordSource, RegistryIndex};
pub use model::{DepKind, DependencyDecl, FeatureDef, FeatureItem, PackageId, PackageVersion};
pub use version::{matches, parse_requirement, parse_version, Bucket, Comparator, ReqOp, SemVer, VersionReq};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("malformed version `{text}`: {reason}")]
    MalformedVersion { text: String, reason: String },
    #[error("malformed requirement `{text}`: {reason}")]
    MalformedRequirement { text: String, reason: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{file}:{line}: {message}")]
    Schema { file: String, line: usize, message: String },
    #[error("{file}:{line}: {message}")]
    Referential { file: String, line: usize, message: String },
    #[error("unknown package `{0}`")]
    UnknownPackage(String),
}
