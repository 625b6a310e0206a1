//! Line families built from layer decompositions under the four product
//! orders.

mod driver;
mod layer_family;
mod properties;
mod zero_layer;

pub use driver::{
    construct_on_subset, construct_order, construct_theorem1, construct_theorem1_orders, OrderConstruction,
    SingleCResolution, Theorem1Outcome, Theorem1Result, ZeroLayerLines,
};
pub use layer_family::{build_family, build_plus_line, FamilyLi, PlusKind, PlusLine};
pub use properties::{
    check_property, ConstructedLine, Property, PropertyContext, PropertyFailure, PropertyTally, Role,
};
pub use zero_layer::{
    build_l0_decr, build_l0_incr, one_layer_structure, zero_layer_partition, OneLayerStructure, ZeroLayerPartition,
};
