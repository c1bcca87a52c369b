use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("image table is not a bijection of 0..{degree}")]
    NotABijection { degree: usize },

    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },

    #[error("generator list is empty")]
    NoGenerators,

    #[error("group order exceeds the enumeration cap of {cap} elements")]
    GroupTooLarge { cap: usize },

    #[error("{what} of size {size} exceeds the cap of {cap}")]
    OverCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("dimension {n} is outside the supported range {min}..={max}")]
    Dimension { n: usize, min: usize, max: usize },

    #[error("degenerate case: {0}")]
    Degenerate(String),

    #[error("character is not irreducible: <chi, chi> = {0}")]
    NotIrreducible(String),

    #[error("closed form disagrees with brute force: {0}")]
    Mismatch(String),

    #[error("group is not an affine group on 2^n points")]
    NotAffine,
}
