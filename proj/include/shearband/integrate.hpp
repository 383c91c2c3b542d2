#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace shearband::integrate {

using State = std::vector<double>;
// f(x, y, dydx) with dydx preallocated to y.size().
using Field = std::function<void(double, const State&, State&)>;
// Scalar event function; a root along the trajectory is an event crossing.
using EventFn = std::function<double(double, const State&)>;

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double h_init = 1e-4;
    double h_min = 1e-12;
    double h_max = 1.0;
    long max_steps = 1000000;
    bool record = true; // keep every accepted step in the trajectory
};

struct Event {
    EventFn fn;
    bool stopping = true;
};

struct EventHit {
    int id = -1;
    double x = 0.0;
    State state;
};

struct Trajectory {
    std::vector<double> x;      // monotone in the direction of integration
    std::vector<State> y;
    std::vector<EventHit> events;
    bool stopped_by_event = false;
    int stop_event_id = -1;
};

// Dormand-Prince 5(4) with 4th-order dense output.  Backward spans (b < a) are
// integrated by negating the field internally.  Events are located by bisection on
// the dense output to 1e-10 in the independent variable (at most 200 iterations).
// Throws StepUnderflow / BudgetExceeded / NonFinite.
Trajectory integrate(const Field& f, State y0, double a, double b, const IntegratorConfig& cfg,
                     const std::vector<Event>& events = {});

// First crossing of a single stopping event; EventNotFound if none occurs before
// x_limit (or the step budget).
std::pair<State, double> integrate_to_event(const Field& f, State y0, double a, double x_limit,
                                            const IntegratorConfig& cfg, const EventFn& event);

} // namespace shearband::integrate
