use alloc::string::String;

/// Errors raised by partitioning, null distributions and tests.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two reference points share the extreme projected value at a cut, so
    /// the block construction is ambiguous.
    #[error(
        "tied projected values at cut {step} (component {component}): points {first} and {second} both equal {value}"
    )]
    Tie {
        /// 0-based cut index.
        step: usize,
        /// 0-based coordinate the cut projects onto.
        component: usize,
        /// 0-based index of the first tied point.
        first: usize,
        /// 0-based index of the second tied point.
        second: usize,
        /// The shared projected value.
        value: f64,
    },

    /// A tie between the two samples in a test that requires none.
    #[error("cross-sample tie: x[{x_index}] and y[{y_index}] both equal {value}")]
    CrossSampleTie {
        /// 0-based index into the X sample.
        x_index: usize,
        /// 0-based index into the Y sample.
        y_index: usize,
        /// The shared value.
        value: f64,
    },

    /// An exact enumeration would exceed the configured cap.
    #[error(
        "exact enumeration needs {required} frequency vectors but the cap is {cap}; use the Monte Carlo or normal method instead"
    )]
    Capacity {
        /// Number of vectors the enumeration would visit (saturating).
        required: u64,
        /// The active cap.
        cap: u64,
    },
}

/// Result alias for this crate.
pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
