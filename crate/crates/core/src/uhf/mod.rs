//! UHF algebras: supernatural numbers, certificates, the direct-limit
//! presentation, traces, and certificate extraction.

pub mod certificate;
pub mod extract;
pub mod machine;
pub mod qepsilon;
pub mod stage;
pub mod supernatural;

pub use certificate::{
    evaluate, limit_norm, mvn_decide_uhf, presentation_from_supernatural, supernatural_from_certificate, trace,
    trace_exact, trace_value, uhf_presentation, Dims, DimsRule, Embedding, TraceDisk, UhfCertificate, UhfMvn,
    UhfPresentation, DENSE_LIMIT,
};
pub use extract::{extract_certificate, find_unit, ExtractConfig, Extraction, Inv1Check, StageReport, UnitSearch};
pub use machine::{CounterMachine, Instr};
pub use qepsilon::{membership, Membership, QEpsilonElement};
pub use stage::StageMatrix;
pub use supernatural::{hard_supernatural, nth_prime, prime_index, valuation, Exponent, Supernatural};
