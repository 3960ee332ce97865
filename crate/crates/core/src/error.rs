use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("placement infeasible: only {placed} of {requested} points placed before {rejections} consecutive rejections")]
    PlacementInfeasible {
        placed: usize,
        requested: usize,
        rejections: usize,
    },

    #[error("gateway outside region at ({x}, {y})")]
    GatewayOutsideRegion { x: f64, y: f64 },

    #[error("no connected BS")]
    NoConnectedBs,

    #[error("instance too large for exhaustive search: {activations} activations (limit {limit})")]
    InstanceTooLarge { activations: usize, limit: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown figure id `{0}` (expected fig3a, fig3b, fig4a or fig4b)")]
    UnknownFigure(String),
}

impl SimError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        SimError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
