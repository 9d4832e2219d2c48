//! The hard-core model on bipartite expanders, expressed as two polymer
//! models (one per side).

pub mod enumerate;
pub mod graph;
pub mod model;
pub mod thresholds;

pub use enumerate::{
    connected_set_count_bound, enumerate_all_connected_sets, enumerate_connected_sets,
};
pub use graph::{
    check_bipartite_expander, square_graph, BipartiteGraph, ExpanderCheck, ExpanderWitness, Side,
    SimpleGraph,
};
pub use model::{
    build_polymer_model, combine_sides, combined_estimate, exact_combination, exact_hardcore,
    polymer_weight, CombinedEstimate, ExactCombination, HardCoreParams, SideEstimate, SideModel,
};
pub use thresholds::{
    lambda_threshold, table1_evaluate, LambdaThreshold, Table1Row, ThresholdReport,
};
