use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("metric not Lorentzian at ({x}, {y})")]
    MetricNotLorentzian { x: f64, y: f64 },

    #[error("curve {component} self-intersects near t = {t}")]
    SelfIntersecting { component: usize, t: f64 },

    #[error("irregular point on curve {component} at t = {t} (v = 0)")]
    IrregularPoint { component: usize, t: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("light-like arc on component {component} near t = {t} (assumption B)")]
    AssumptionB { component: usize, t: f64 },

    #[error("vanishing curvature {kappa} at light point t = {t} on component {component} (assumption C)")]
    AssumptionC { component: usize, t: f64, kappa: f64 },

    #[error("transversal field is tangent to the boundary")]
    NormalTangent,

    #[error("start point is light-like: the characteristic is tangent to the boundary")]
    StartOnLightPoint,

    #[error("no boundary intersection found from ({x}, {y})")]
    NoIntersection { x: f64, y: f64 },

    #[error("involution undefined: characteristics do not return to the boundary")]
    InvolutionUndefined,

    #[error("equivalence class exceeds {bound} points")]
    ClassTooLarge { bound: usize },

    #[error("point outside the arc where the closed form applies")]
    OutsideArc,

    #[error("function is not invariant under the involution (residual {residual:e})")]
    NotInvariant { residual: f64 },

    #[error("one-sided limits disagree at light point t = {t} on component {component} ({gap:e})")]
    LightLimitDisagreement { component: usize, t: f64, gap: f64 },

    #[error("alpha + beta is not exact on component {component} (period {period:e})")]
    NonExact { component: usize, period: f64 },

    #[error("integration path failed: {0}")]
    PathFailure(String),

    #[error("holonomy arcs not found for component {component}")]
    OrderingUnsatisfiable { component: usize },

    #[error("grid mismatch")]
    GridMismatch,

    #[error("linear map is not conformal for the Minkowski metric")]
    NonConformal,

    #[error("orbit reaches the exceptional set at iterate {iterate}")]
    OrbitHitsExceptional { iterate: usize },

    #[error("periodicity precondition fails (residual {residual:e})")]
    PeriodPrecondition { residual: f64 },

    #[error("no periodic arc found")]
    NoPeriodicArc,

    #[error("orbit leaves the component")]
    LeavesComponent,

    #[error("field is not in L (residual {residual:e})")]
    NotInL { residual: f64 },

    #[error("field violates the light-angle constraint (residual {residual:e})")]
    C0Violation { residual: f64 },

    #[error("field is outside the flow domain (residual {residual:e})")]
    MembershipFails { residual: f64 },
}
