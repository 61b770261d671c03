pub mod convergence;
pub mod form;
pub mod forms_gea;
pub mod hilbert;
pub mod instances;
pub mod kernel;
pub mod linalg;
pub mod report;
