//! Generic linear programs: a small model builder, a dense bounded-variable
//! revised simplex solver, and a vertex-enumeration oracle for tiny models.
//!
//! Every optimization model in the crate (dispatch windows, attack problems)
//! is expressed as a [`LinearProgram`] and solved with [`solve`]. The oracle in
//! [`oracle_solve`] shares no code with the simplex path and exists to
//! cross-check it.

mod mps;
mod oracle;
mod simplex;

pub use mps::write_mps;
pub use oracle::{oracle_solve, oracle_solve_with_limits, OracleLimits};
pub use simplex::{solve, solve_with_options, SolverOptions};

use std::fmt;

/// Primal feasibility tolerance (absolute) used when classifying solutions.
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Relative optimality tolerance on the objective.
pub const OPTIMALITY_TOL: f64 = 1e-6;
/// Pivot elements smaller than this are treated as zero.
pub const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum LpError {
    #[error("term in {context} references undeclared variable #{index}")]
    UnknownVariable { context: String, index: usize },
    #[error("variable {name} has lower bound {lower} above upper bound {upper}")]
    InvertedBounds { name: String, lower: f64, upper: f64 },
    #[error("non-finite coefficient in {context}")]
    NonFinite { context: String },
    #[error("model too large for the oracle: {vars} variables, {constraints} constraints (limit {max_vars}/{max_constraints})")]
    OracleSizeExceeded {
        vars: usize,
        constraints: usize,
        max_vars: usize,
        max_constraints: usize,
    },
    #[error("simplex iteration limit of {0} reached")]
    IterationLimit(usize),
    #[error("basis became numerically singular after {0} pivots")]
    SingularBasis(usize),
}

impl LpError {
    pub fn code(&self) -> &'static str {
        match self {
            LpError::UnknownVariable { .. } => "lp::unknown_variable",
            LpError::InvertedBounds { .. } => "lp::inverted_bounds",
            LpError::NonFinite { .. } => "lp::non_finite",
            LpError::OracleSizeExceeded { .. } => "lp::oracle_size",
            LpError::IterationLimit(_) => "lp::iteration_limit",
            LpError::SingularBasis(_) => "lp::singular_basis",
        }
    }
}

/// Handle to a variable of one [`LinearProgram`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

/// Handle to a constraint of one [`LinearProgram`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstraintId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * values[v.0]).sum()
    }

    /// Amount by which `values` violate this constraint (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A linear program over continuous variables with simple bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(VarId, f64)>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        Self {
            sense,
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> VarId {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        VarId(self.variables.len() - 1)
    }

    pub fn add_free_var(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> ConstraintId {
        self.constraints.push(Constraint {
            name: name.into(),
            terms,
            relation,
            rhs,
        });
        ConstraintId(self.constraints.len() - 1)
    }

    /// Adds `coef * var` to the objective.
    pub fn add_objective_term(&mut self, var: VarId, coef: f64) {
        self.objective.push((var, coef));
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    /// Dense objective vector with duplicate terms summed.
    pub fn objective_vector(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.variables.len()];
        for &(v, a) in &self.objective {
            c[v.0] += a;
        }
        c
    }

    pub fn objective_at(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, a)| a * values[v.0]).sum()
    }

    /// Largest constraint or bound violation at `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let rows = self
            .constraints
            .iter()
            .map(|c| c.violation(values))
            .fold(0.0, f64::max);
        let bounds = self
            .variables
            .iter()
            .zip(values)
            .map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0))
            .fold(0.0, f64::max);
        rows.max(bounds)
    }

    /// Checks that the model is well formed: every term references a declared
    /// variable, bounds are ordered, and all data is finite (bounds may be
    /// infinite).
    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.variables.len();
        for v in &self.variables {
            if v.lower.is_nan() || v.upper.is_nan() || v.lower == f64::INFINITY || v.upper == f64::NEG_INFINITY {
                return Err(LpError::NonFinite {
                    context: format!("bounds of {}", v.name),
                });
            }
            if v.lower > v.upper {
                return Err(LpError::InvertedBounds {
                    name: v.name.clone(),
                    lower: v.lower,
                    upper: v.upper,
                });
            }
        }
        let check_terms = |terms: &[(VarId, f64)], context: &str| -> Result<(), LpError> {
            for &(v, a) in terms {
                if v.0 >= n {
                    return Err(LpError::UnknownVariable {
                        context: context.to_string(),
                        index: v.0,
                    });
                }
                if !a.is_finite() {
                    return Err(LpError::NonFinite {
                        context: context.to_string(),
                    });
                }
            }
            Ok(())
        };
        check_terms(&self.objective, "objective")?;
        for c in &self.constraints {
            check_terms(&c.terms, &format!("constraint {}", c.name))?;
            if !c.rhs.is_finite() {
                return Err(LpError::NonFinite {
                    context: format!("right-hand side of {}", c.name),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        })
    }
}

/// Solver outcome.
///
/// `values` holds one entry per variable. For infeasible models the objective
/// is `+inf` (minimize) or `-inf` (maximize); for unbounded models the signs
/// are reversed.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective_value: f64,
    /// Simplex pivots performed (0 for the oracle).
    pub pivots: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn value(&self, v: VarId) -> f64 {
        self.values[v.0]
    }

    pub(crate) fn non_optimal(status: LpStatus, sense: Sense, n: usize, pivots: usize) -> Self {
        let objective_value = match (status, sense) {
            (LpStatus::Infeasible, Sense::Minimize) | (LpStatus::Unbounded, Sense::Maximize) => {
                f64::INFINITY
            }
            (LpStatus::Infeasible, Sense::Maximize) | (LpStatus::Unbounded, Sense::Minimize) => {
                f64::NEG_INFINITY
            }
            (LpStatus::Optimal, _) => unreachable!("optimal solutions carry values"),
        };
        Self {
            status,
            values: vec![0.0; n],
            objective_value,
            pivots,
        }
    }
}
