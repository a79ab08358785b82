//! Funny-business detectors: finitary, infinitary, combinatorial and ε-funny business,
//! Postulates A and B, cone localization, Condition posC, and cause-like loci.

use std::fmt;

use serde::Serialize;

pub mod eps;
pub mod fin2inf;
pub mod finite;
pub mod symbolic;

pub use eps::{
    check_eps_fb, check_eps_fb_finite, check_min_gap_no_inffb, check_postulate_a, check_postulate_a_finite, locate_cone_boundary,
    locate_cone_boundary_indexed, BoundaryCase, ChainStep, DirectCheck, EpsReport, LocateReport, MinGapReport,
    PostulateAReport, RegionCheck,
};
pub use fin2inf::{construct_inffb_from_finfb, inffb_passthrough, Fin2InfCertificate, SampledPoint};
pub use finite::{
    belnap_witness, cause_like_loci, check_cfb, check_finfb, check_finfb_unpruned, check_inffb_finite,
    scan_product_functions, verify_finfb, BelnapWitness, CfbReport, Clause, FinfbReport, FinfbWitness,
    InffbCertificate, LociReport, ScanReport,
};
pub use symbolic::{
    check_cfb_symbolic, check_finfb_symbolic, check_inffb, check_postulate_b, check_postulate_b_finite,
    improper_choice, verify_inffb, PostulateBReport, SpotCheck, SymbolicFinfb, SymbolicPoints,
};

/// Verdict kinds shared by all detectors.
#[allow(clippy::upper_case_acronyms)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FbKind {
    NONE,
    FINFB,
    INFFB,
    CFB,
    EPSFB,
}

impl fmt::Display for FbKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
