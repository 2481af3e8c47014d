//! Numerical tolerances shared by the LP solver, the cutting-plane loop and
//! the verification checks.

/// Primal feasibility of an LP solution, applied to every row and bound.
pub const FEASIBILITY: f64 = 1e-7;

/// Reduced costs must be within this of the correct sign at an optimum.
pub const REDUCED_COST: f64 = 1e-7;

/// Smallest pivot element the ratio test will accept.
pub const PIVOT: f64 = 1e-10;

/// A subtour cut is violated when the cut weight falls below `2 - SEPARATION`.
pub const SEPARATION: f64 = 1e-6;

/// Agreement between two routes to the same closed-form value.
pub const CLOSED_FORM: f64 = 1e-9;

/// Agreement between a cutting-plane LP optimum and a closed form.
pub const LP_COMPARE: f64 = 1e-5;
