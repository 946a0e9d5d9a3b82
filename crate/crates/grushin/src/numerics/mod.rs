//! Internal numerical kernels: an embedded Runge–Kutta 5(4) integrator with
//! PI step control, adaptive Gauss–Kronrod 7/15 quadrature, scalar root
//! finding and bracketed minimization, and a weighted-graph shortest-path
//! oracle on regular grids.

pub(crate) mod dijkstra;
pub(crate) mod ode;
pub(crate) mod quad;
pub(crate) mod roots;
