#pragma once

namespace catforge {

/// Scratch buffers for one classical RK4 step on an Eigen dense object.
template <typename State>
struct Rk4Workspace {
    State k1, k2, k3, k4, stage;
};

/// y(t) -> y(t + dt) with the classical four-stage scheme. `rhs(t, y, dy)`
/// writes the derivative into `dy` (already sized like `y`).
template <typename State, typename Rhs>
void rk4_step(State& y, double t, double dt, Rhs&& rhs, Rk4Workspace<State>& ws) {
    ws.k1.resizeLike(y);
    ws.k2.resizeLike(y);
    ws.k3.resizeLike(y);
    ws.k4.resizeLike(y);
    rhs(t, y, ws.k1);
    ws.stage = y + (0.5 * dt) * ws.k1;
    rhs(t + 0.5 * dt, ws.stage, ws.k2);
    ws.stage = y + (0.5 * dt) * ws.k2;
    rhs(t + 0.5 * dt, ws.stage, ws.k3);
    ws.stage = y + dt * ws.k3;
    rhs(t + dt, ws.stage, ws.k4);
    y += (dt / 6.0) * (ws.k1 + 2.0 * ws.k2 + 2.0 * ws.k3 + ws.k4);
}

} // namespace catforge
