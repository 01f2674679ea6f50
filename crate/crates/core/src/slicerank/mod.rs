//! Slice rank: decompositions, an exact oracle for small tensors, triangle
//! decompositions, power bounds and instability certificates.

pub mod counting;
pub mod decomposition;
pub mod instability;
pub mod oracle;
pub mod triangle;

use thiserror::Error;

use crate::fftensor::TensorError;

pub use counting::{power_slice_bound, triangle_to_slice_power_bound, weighted_tuple_count, TriangleSliceBound};
pub use decomposition::{
    product_slice_decomposition, verify_slice_decomposition, ProductMode, RankOneTerm, SliceDecomposition, SliceTerm,
    TensorDecomposition,
};
pub use instability::{
    instability_from_slice, search_instability_certificate, verify_instability_certificate, InstabilityCertificate,
    InstabilityReport, InstabilityVerdict, SearchLimits,
};
pub use oracle::{exact_slice_rank, slice_rank_witness, OracleLimits, SliceRankWitness};
pub use triangle::{
    triangle_decomposition_cyclic, triangle_decomposition_poly, verify_triangle_decomposition, TriangleDecomposition,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SliceRankError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("tensor is {tensor:?} but the decomposition is {decomposition:?} (field, dims)")]
    ShapeMismatch { tensor: (u64, [usize; 3]), decomposition: (u64, [usize; 3]) },
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("unverified input: {0}")]
    Unverified(String),
    #[error("guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("decomposition of size {size} is not below the smallest axis {min}")]
    NotBelowMinDims { size: usize, min: usize },
    #[error("basis on axis {0} is not invertible")]
    SingularBasis(char),
}
