use thiserror::Error;

/// Errors raised by the simulator, controllers and validators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StefanError {
    /// A physical parameter or configuration value lies outside its domain.
    #[error("parameter `{name}` = {value} is out of range: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// A function was evaluated outside its domain of definition.
    #[error("domain error in {func}: {reason}")]
    Domain { func: &'static str, reason: String },
    /// The plant or observer state became invalid.
    #[error("invalid state: {0}")]
    State(String),
    /// Explicit step requested with a time step above the stability limit.
    #[error("explicit step dt = {dt:e} s exceeds the stability limit {limit:e} s")]
    Cfl { dt: f64, limit: f64 },
    /// The requested setpoint cannot be reached with a nonnegative input.
    #[error("infeasible setpoint: {0}")]
    Infeasible(String),
    /// A theorem precondition required by a bound computation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The similarity-solution root solve failed.
    #[error("similarity oracle: {0}")]
    Oracle(String),
    /// Exponential fit on an invalid series.
    #[error("exponential fit: {0}")]
    Fit(String),
    /// Scenario description is malformed or fails validation.
    #[error("scenario: {0}")]
    Scenario(String),
}

pub type Result<T> = std::result::Result<T, StefanError>;
