pub mod algebra;
pub mod closed_form;
pub mod jets;
pub mod numeric;
pub mod quadrature;
pub mod quantities;
pub mod syntax;
