#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "meadsr/core/types.hpp"

namespace meadsr {

// Radio power draw. Idle and sleep states cost nothing.
struct EnergyModel {
  double tx_power{1.4};  // W
  double rx_power{1.0};  // W
  bool overhear_charging{false};

  void validate() const
  {
    if (!(tx_power > 0) || !(rx_power > 0)) throw std::invalid_argument("energy: tx/rx power must be positive");
  }

  // Powers are applied at milliwatt resolution: mW x ns = pJ exactly.
  std::int64_t tx_milliwatts() const { return std::llround(tx_power * 1000.0); }
  std::int64_t rx_milliwatts() const { return std::llround(rx_power * 1000.0); }

  Energy tx_cost(SimTime airtime) const { return Energy{tx_milliwatts() * airtime.count()}; }
  Energy rx_cost(SimTime airtime) const { return Energy{rx_milliwatts() * airtime.count()}; }
};

enum class ChargeMode : std::uint8_t { tx, rx };

// Per-node battery state. residual = initial - consumed and never goes
// negative: a charge larger than what is left is capped and the node dies.
class EnergyLedger {
public:
  EnergyLedger() = default;
  EnergyLedger(std::size_t nodes, Energy initial, EnergyModel model) : model_{model}
  {
    if (initial.picojoules() <= 0) throw std::invalid_argument("energy: initial energy must be positive");
    model_.validate();
    initial_.assign(nodes, initial);
    consumed_.assign(nodes, Energy{});
  }

  std::size_t size() const { return initial_.size(); }
  const EnergyModel& model() const { return model_; }

  Energy initial(NodeId n) const { return initial_.at(n); }
  Energy consumed(NodeId n) const { return consumed_.at(n); }
  Energy residual(NodeId n) const { return initial_.at(n) - consumed_.at(n); }
  bool alive(NodeId n) const { return residual(n).picojoules() > 0; }

  double residual_ratio(NodeId n) const
  {
    return static_cast<double>(residual(n).picojoules()) / static_cast<double>(initial_.at(n).picojoules());
  }

  Energy total_consumed() const
  {
    Energy sum;
    for (Energy e : consumed_) sum += e;
    return sum;
  }

  // Returns what was actually drawn. Depleted nodes are charged nothing.
  Energy charge(NodeId n, Energy amount)
  {
    const Energy left = residual(n);
    const Energy drawn = amount < left ? amount : left;
    consumed_.at(n) += drawn;
    return drawn;
  }

  Energy charge_tx(NodeId n, SimTime airtime) { return charge(n, model_.tx_cost(airtime)); }
  Energy charge_rx(NodeId n, SimTime airtime) { return charge(n, model_.rx_cost(airtime)); }

private:
  EnergyModel model_;
  std::vector<Energy> initial_;
  std::vector<Energy> consumed_;
};

}  // namespace meadsr
