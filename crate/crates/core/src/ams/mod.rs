//! Simultaneous proximalization: classification of boundary actions,
//! word searches, the separation radius, the finite set `S` and the
//! procedure picking `s` in `S` for a given element.

mod classify;
mod pipeline;
mod prox;
mod search;
mod separation;
mod set;
mod spec;

pub use classify::{
    classify_semigroup, lineal_fix_reduction, partition, ParityMap, ParityRep, Partition,
    SemigroupClass,
};
pub use pipeline::{construct_ams_set, Construction};
pub use prox::{
    proximalize, verify_main_corollary, CorollaryReport, CorollaryRow, CorollarySummary, DeltaKind,
    ProximalizeFailure, ProximalizeOutcome, ProximalizeSuccess, RepDelta, Selection,
};
pub use search::{
    build_general_position_family, find_large_displacement, find_simultaneous_proximal,
    find_transversal, Transversal, TransversalityTask,
};
pub use separation::{
    linear_width, pigeonhole_bound, separation_radius, RepRadius, SeparationRadius,
};
pub use set::{build_ams_set, AmsConfig, AmsElement, AmsSet, LinealSchedule, RepSchedule};
pub use spec::{separation, RepElement, RepPoint, Representation, SemigroupSpec, Word};
