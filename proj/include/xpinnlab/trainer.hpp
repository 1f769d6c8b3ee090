#pragma once

#include "xpinnlab/losses.hpp"

#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace xpinnlab::train {

enum class Optimizer { Adam, Lbfgs };
Optimizer optimizer_from_name(const std::string& name);
std::string optimizer_name(Optimizer opt);

struct AdamState {
    linalg::Vector m, v;
    std::uint64_t t = 0;
};

/// One bias-corrected Adam update in place (β₁=0.9, β₂=0.999, ε=1e-8).
void adam_step(AdamState& st, linalg::Vector& x, const linalg::Vector& g, double lr);

struct CurvaturePair {
    linalg::Vector s, y;
    double rho = 0.0;
};

struct LbfgsState {
    std::size_t memory = 10;
    std::deque<CurvaturePair> pairs;
    std::optional<linalg::Vector> prev_x, prev_g; // completes a pair next step
};

struct LbfgsObjective {
    std::function<double(const linalg::Vector&)> value;
    std::function<std::pair<double, linalg::Vector>(const linalg::Vector&)> value_grad;
};

struct LbfgsOutcome {
    double f0 = 0.0;       // objective at the incoming point
    double step = 0.0;     // accepted step length (0 on fallback)
    bool fallback = false; // line search failed; took a safeguarded gradient step
    std::size_t trials = 0;
};

/// One L-BFGS update in place: two-loop direction from stored pairs,
/// Armijo backtracking (c=1e-4, halving, ≤30 trials) from t=lr. A pair is
/// stored only when sᵀy > 1e-10. On line-search failure the step falls back
/// to x −= lr/(1+‖g‖)·g and the curvature history is cleared.
LbfgsOutcome lbfgs_step(LbfgsState& st, linalg::Vector& x, const LbfgsObjective& obj, double lr);

struct TrainConfig {
    Optimizer optimizer = Optimizer::Adam;
    double lr = 1e-3;
    std::size_t epochs = 1000;
    std::size_t lbfgs_memory = 10;
    std::size_t record_every = 100;
    std::uint64_t seed = 0;
    domain::SampleCounts counts;
    losses::LossWeights weights;
    double divergence_limit = 1e8;
};

struct HistoryRecord {
    std::size_t epoch = 0; // 1-based, counted in completed epochs
    losses::LossBreakdown loss;
};

struct TrainResult {
    std::vector<Mlp> nets;
    std::vector<HistoryRecord> history;
    domain::TrainingSet set;
    losses::XpinnLoss final_loss;
    std::size_t epochs_run = 0;
    bool diverged = false;
    double wall_seconds = 0.0;
    std::vector<std::string> warnings;
    std::vector<AdamState> adam_states;   // per net, when optimizer == Adam
    std::vector<LbfgsState> lbfgs_states; // per net, when optimizer == Lbfgs
};

/// Full-batch training of one net per subdomain (a single-part decomposition
/// is a plain PINN). Samples the training set from cfg.seed/cfg.counts; every
/// epoch takes one simultaneous optimizer step per net, from gradients (and
/// line searches) evaluated at the epoch-start parameters with the other nets
/// frozen. Aborts early, keeping partial history, if the objective exceeds
/// divergence_limit or goes non-finite.
TrainResult train(const PdeProblem& p, const domain::Decomposition& dec, std::vector<Mlp> nets,
                  const TrainConfig& cfg);

} // namespace xpinnlab::train
