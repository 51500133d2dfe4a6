//! Indexed categories, the Grothendieck construction, cartesian arrows,
//! Giraud topologies and base change of fibrations.

mod base_change;
mod bundle;
mod indexed;
mod limits;

pub use base_change::*;
pub use bundle::{
    fiber_functor, fiber_of, giraud_topology, grothendieck, grothendieck_functor, grothendieck_with_caps, is_cartesian_arrow,
    is_cartesian_search, is_fibration, is_morphism_of_fibrations, CartesianMode, Coordinates, FibrationBundle,
    MissingLift,
};
pub use indexed::{coproduct_category, product_category, IndexedCategory};
pub use limits::*;
