use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("adaptive quadrature did not converge: {0}")]
    NonConvergent(String),
    #[error("ray cutoff cannot meet the tolerance (decay {decay})")]
    TailBoundViolated { decay: f64 },
    #[error("leading coefficient is numerically zero")]
    DegenerateLeadingCoefficient,
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("argument lies on the branch cut [1, inf)")]
    BranchCutInput,
    #[error("argument lies on an excluded ray")]
    ExcludedRay,
    #[error("torsion is singular at u = kappa")]
    TorsionSingular,
    #[error("denominator 1 - q^{0} vanishes")]
    DenominatorVanishes(u32),
    #[error("exponent range exceeded")]
    Overflow,
    #[error("logarithm branch jumped at index {0}")]
    BranchJump(usize),
    #[error("branches d3 and d4 collide near m0")]
    BranchCollision,
    #[error("longitude image is not upper triangular (|c| = {0:e})")]
    NonUpperTriangular(f64),
    #[error("path endpoints are not in the prescribed valleys")]
    PathOutsideValleys,
}

pub type Result<T> = std::result::Result<T, Error>;
