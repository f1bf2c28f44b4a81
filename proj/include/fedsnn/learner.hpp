#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "fedsnn/network.hpp"
#include "fedsnn/rng.hpp"
#include "fedsnn/spike_record.hpp"
#include "fedsnn/traces.hpp"

namespace fedsnn {

struct Hyperparams {
    double learning_rate = 0.05; // alpha
    double trace_decay = 0.2;    // kappa
    std::size_t window_len = 5;  // local steps per global round
};

// Mutable per-device learning state: the eligibility vector (one entry per
// model parameter, concatenated in layout order), the scalar learning signal,
// the filtered spike history and the device's private random stream.
struct LearnerState {
    std::vector<double> eligibility;
    double learning_signal = 0.0;
    TraceState traces;
    RngStream rng;
    std::size_t local_step = 0;   // s, steps consumed from the stream
    std::size_t global_round = 0; // t, rounds completed

    LearnerState(const Network& net, std::uint64_t seed)
        : eligibility(net.layout->total_size(), 0.0),
          traces(net.topology, net.basis),
          rng(seed) {}
};

struct WindowResult {
    double visible_log_prob = 0.0;     // sum over the window, visible neurons
    std::vector<double> gradient_sum;  // per-parameter, summed over the window
};

// Run one window of window_len steps against the clamped streams, starting
// after state.local_step. Per step: membrane potentials from the previous
// step's traces, hidden spikes sampled, visible spikes clamped to data,
// per-parameter log-probability gradients and visible log-probabilities
// accumulated, traces advanced. Parameters are held fixed for the whole
// window. Throws DimensionError if the streams do not cover the window or
// have the wrong number of rows.
WindowResult step_window(const Network& net, const ModelParams& params, LearnerState& state,
                         const SpikeRecord& inputs, const SpikeRecord& targets,
                         std::size_t window_len);

// Closed-form gradient of log p(o|u) for neuron n's parameter block, from the
// traces that produced u: with err = o - sigmoid(u), the bias entry is err,
// the feedback entry err * feedback trace, each synapse entry err * synaptic
// trace of its source/kernel.
std::vector<double> gradient_log_prob(const Network& net, std::size_t n, bool o, double u,
                                      const TraceState& traces);

// In-place accumulating form used by the window loop; block points at the
// neuron's slice of a full-size gradient vector.
void accumulate_gradient_log_prob(const Network& net, std::size_t n, bool o, double u,
                                  const TraceState& traces, std::span<double> block);

inline double update_learning_signal(double prev, double window_visible_log_prob,
                                     double kappa) {
    return kappa * prev + (1.0 - kappa) * window_visible_log_prob;
}

// Elementwise e <- kappa*e + (1-kappa)*window_sum. Throws DimensionError on
// size mismatch.
void update_eligibility(std::span<double> eligibility, std::span<const double> window_sum,
                        double kappa);

// Ascent step on the data log-probability: visible neurons (inputs and
// outputs) move by alpha * e, hidden neurons by alpha * signal * e.
void apply_local_update(const Network& net, ModelParams& params,
                        std::span<const double> eligibility, double learning_signal,
                        double alpha);

// Negative log-probability of the target raster given the input raster.
// With no hidden neurons the value is exact and consumes no randomness;
// otherwise it is the mean over num_samples clamped-input, sampled-hidden
// runs, an upper bound on the true log-loss in expectation.
double evaluate_log_loss(const Network& net, const ModelParams& params,
                         const SpikeRecord& inputs, const SpikeRecord& targets,
                         std::size_t num_samples, RngStream& rng);

// One device's training loop: owns the parameters and learning state, runs
// one global round at a time against its clamped data streams.
class Learner {
public:
    Learner(std::shared_ptr<const Network> net, Hyperparams hyper, ModelParams params,
            std::uint64_t rng_seed)
        : net_(std::move(net)), hyper_(hyper), params_(std::move(params)),
          state_(*net_, rng_seed) {}

    // step_window + learning-signal/eligibility updates + parameter update.
    // Returns the updated learning signal.
    double run_round(const SpikeRecord& inputs, const SpikeRecord& targets);

    const ModelParams& params() const { return params_; }
    ModelParams& params() { return params_; }
    const LearnerState& state() const { return state_; }
    const Network& network() const { return *net_; }
    const Hyperparams& hyper() const { return hyper_; }

private:
    std::shared_ptr<const Network> net_;
    Hyperparams hyper_;
    ModelParams params_;
    LearnerState state_;
};

} // namespace fedsnn
