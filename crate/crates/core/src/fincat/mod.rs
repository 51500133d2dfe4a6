//! Finite categories, functors, natural transformations and comma categories.

mod category;
mod comma;
mod functor;

pub use category::{Arr, ArrowInfo, Caps, CategoryBuilder, FinCategory, Obj};
pub use comma::{
    comma_category, comma_category_with_caps, connected_components, find_natural_iso, is_equivalence, CommaCategory,
    EquivalenceWitness, UnionFind,
};
pub(crate) use functor::same_category;
pub use functor::{check_adjunction, full_subcategory, Adjunction, FinFunctor, NatTransform};
