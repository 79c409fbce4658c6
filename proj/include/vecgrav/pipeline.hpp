#pragma once

// Rolling time-level bookkeeping for a leapfrog run: keeps the two newest
// potential states, the derived fields and gauge scalar at the last three
// levels that have a centered time derivative, and the matching sources.

#include <deque>
#include <optional>
#include <utility>

#include "vecgrav/energy_momentum.hpp"
#include "vecgrav/field_kinematics.hpp"
#include "vecgrav/potential_solvers.hpp"
#include "vecgrav/sources.hpp"

namespace vecgrav {

enum class InitMode {
  /// Potentials start from the Poisson solution of the t = 0 density with
  /// A = 0, which satisfies chi = dchi/dt = 0 for a source at rest.
  static_equilibrium,
  /// Potentials start at zero.
  zero,
};

class Simulation {
 public:
  /// Sourced run starting at t = 0.
  Simulation(SourceModel model, const Grid3& grid, const SolverConfig& cfg,
             const SimulationUnits& units, InitMode init)
      : model_(std::move(model)), cfg_(cfg), units_(units) {
    grid.validate();
    cfg.validate();
    units.validate();
    MassFluxState src0 = sample_scenario(*model_, 0.0, grid);
    PotentialState s = init == InitMode::static_equilibrium
                           ? static_state(solve_static(src0.sigma, cfg, units), cfg, units)
                           : zero_state(grid, cfg, units);
    // The body sits still for t < 0.
    MassFluxState src_prev = src0;
    src_prev.time = -s.dt;
    src_prev.flux = VectorField(grid);
    sources_.push_back(std::move(src_prev));
    sources_.push_back(std::move(src0));
    states_.push_back(std::move(s));
  }

  /// Source-free run from caller-supplied initial data.
  Simulation(PotentialState initial, const SolverConfig& cfg, const SimulationUnits& units,
             BoundaryDriver driver = {})
      : cfg_(cfg), units_(units), driver_(std::move(driver)) {
    cfg.validate();
    units.validate();
    const Grid3& g = initial.grid();
    sources_.push_back(empty_source(g, initial.time - initial.dt));
    sources_.push_back(empty_source(g, initial.time));
    states_.push_back(std::move(initial));
  }

  void advance() {
    const PotentialState& cur = states_.back();
    PotentialState next = step_wave(cur, sources_.back(), cfg_, units_, driver_);
    fields_.push_back(derive_fields(cur, next));
    gauge_.push_back(gauge_scalar(cur, next, units_));
    if (fields_.size() > 3) {
      fields_.pop_front();
      gauge_.pop_front();
    }
    states_.push_back(std::move(next));
    if (states_.size() > 2) states_.pop_front();
    sources_.push_back(model_ ? sample_scenario(*model_, states_.back().time, grid())
                              : empty_source(grid(), states_.back().time));
    if (sources_.size() > 4) sources_.pop_front();
  }

  void advance(long steps) {
    for (long n = 0; n < steps; ++n) advance();
  }

  /// True once fields exist at three consecutive levels.
  bool centered() const { return fields_.size() == 3; }

  /// Offsets -1, 0, +1 around the centered level.
  const FieldPair& fields(int offset) const { return fields_.at(static_cast<std::size_t>(offset + 1)); }
  const GaugeScalar& gauge(int offset) const { return gauge_.at(static_cast<std::size_t>(offset + 1)); }
  /// Sources aligned with fields(offset).
  const MassFluxState& source(int offset) const {
    return sources_.at(sources_.size() - 4 + static_cast<std::size_t>(offset + 1));
  }
  /// Newest field level (available right after every advance).
  const FieldPair& latest_fields() const { return fields_.back(); }
  const GaugeScalar& latest_gauge() const { return gauge_.back(); }
  const MassFluxState& latest_fields_source() const { return sources_.at(sources_.size() - 2); }

  double center_time() const { return fields_.at(1).time; }
  const PotentialState& state() const { return states_.back(); }
  const PotentialState& previous_state() const { return states_.front(); }
  const Grid3& grid() const { return states_.back().grid(); }
  double dt() const { return states_.back().dt; }
  const SolverConfig& solver() const { return cfg_; }
  const SimulationUnits& units() const { return units_; }
  const std::optional<SourceModel>& model() const { return model_; }

  MaxwellResiduals residuals(int margin) const {
    return eq5_residuals(fields(-1), fields(0), fields(1), gauge(-1), gauge(0), gauge(1),
                         source(0), units_, margin);
  }

  ConservationReport conservation(int margin) const {
    return conservation_residual(fields(-1), fields(0), fields(1), source(-1), source(0),
                                 source(1), units_, margin);
  }

 private:
  std::optional<SourceModel> model_;
  SolverConfig cfg_;
  SimulationUnits units_;
  BoundaryDriver driver_;
  std::deque<PotentialState> states_;
  std::deque<FieldPair> fields_;
  std::deque<GaugeScalar> gauge_;
  std::deque<MassFluxState> sources_;
};

}  // namespace vecgrav
