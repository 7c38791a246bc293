#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "corridor/rng.hpp"

namespace corridor {

class TrainingDivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Branch layout: `agents` local heads (green-split options) plus one global
// head (half-cycle duration options). With shared_local_head the local heads
// collapse into a single head whose choice applies to every agent (the
// no-action-branching ablation arm).
struct BranchSpec {
  int agents = 1;
  int local_cardinality = 49;
  int global_cardinality = 41;
  bool shared_local_head = false;

  int branches() const { return (shared_local_head ? 1 : agents) + 1; }
  int local_branches() const { return branches() - 1; }
  int cardinality(int j) const {
    return j < local_branches() ? local_cardinality : global_cardinality;
  }
  bool operator==(const BranchSpec&) const = default;
};

// One joint action: a split index per agent plus the shared duration index.
struct BranchAction {
  std::vector<int> local;
  int global = 0;
};

struct DenseLayer {
  Eigen::MatrixXd W;  // out x in
  Eigen::VectorXd b;
};

struct LayerNormParams {
  Eigen::VectorXd gain;
  Eigen::VectorXd offset;
};

// Two dense+layer-norm+ReLU trunk layers feeding n+1 linear heads. The
// input_scale vector is the fixed observation normalization applied before
// the first affine.
struct QNetworkParams {
  int input_dim = 0;
  int hidden = 256;
  BranchSpec spec;
  Eigen::VectorXd input_scale;
  DenseLayer fc1, fc2;
  LayerNormParams ln1, ln2;
  std::vector<DenseLayer> heads;

  // He-uniform dense weights, zero biases, unit layer-norm gains
  static QNetworkParams init(int input_dim, int hidden, const BranchSpec& spec,
                             const Eigen::VectorXd& input_scale, Rng& rng);
  static QNetworkParams zeros_like(const QNetworkParams& other);

  long long param_count() const;
  // flattened parameter access in a fixed tensor order (Adam, serialization,
  // finite differences all share it)
  std::vector<std::pair<double*, long long>> tensors();
  std::vector<std::pair<const double*, long long>> tensors() const;
};

using QNetworkGrads = QNetworkParams;

struct ForwardCache {
  Eigen::MatrixXd xn;            // normalized input
  Eigen::MatrixXd xhat1, xhat2;  // layer-norm unit-variance activations
  Eigen::VectorXd inv_std1, inv_std2;
  Eigen::MatrixXd h1, h2;  // post-ReLU trunk activations
};

// Batched forward pass; rows of `states` are observations. Returns one
// (batch x cardinality) Q matrix per branch.
std::vector<Eigen::MatrixXd> forward(const QNetworkParams& net,
                                     const Eigen::MatrixXd& states,
                                     ForwardCache* cache = nullptr);

std::vector<Eigen::VectorXd> forward_single(const QNetworkParams& net,
                                            const Eigen::VectorXd& state);

// Per-branch noisy argmax; sigma[j] scales a unit Gaussian added to branch
// j's Q-values. Ties break toward the lowest index. The returned action has
// one local index per AGENT (the shared-head ablation repeats its choice).
BranchAction select_action(const QNetworkParams& net,
                           const std::vector<Eigen::VectorXd>& qvalues,
                           const std::vector<double>& sigma, Rng& rng);

struct TransitionBatch {
  Eigen::MatrixXd states;       // B x input
  Eigen::MatrixXd next_states;  // B x input
  std::vector<std::vector<int>> actions;  // [branch][B]
  Eigen::VectorXd rewards;
  std::vector<char> terminal;

  long long size() const { return states.rows(); }
};

// Double-DQN targets: the primary network picks argmax a', the target network
// evaluates it. Terminal transitions reduce to the reward.
std::vector<Eigen::VectorXd> td_targets(const QNetworkParams& primary,
                                        const QNetworkParams& target,
                                        const TransitionBatch& batch,
                                        double gamma);

// Mean over branches of the mean squared TD error (loss only).
double loss(const QNetworkParams& net, const TransitionBatch& batch,
            const std::vector<Eigen::VectorXd>& targets);

// Loss plus exact analytic gradients for every parameter.
double backward(const QNetworkParams& net, const TransitionBatch& batch,
                const std::vector<Eigen::VectorXd>& targets,
                QNetworkGrads& grads);

struct AdamState {
  Eigen::VectorXd m, v;
  long long t = 0;

  static AdamState zeros(const QNetworkParams& net);
};

// Standard Adam with bias correction. Throws TrainingDivergenceError on
// non-finite gradients.
void adam_step(QNetworkParams& params, const QNetworkGrads& grads,
               AdamState& state, double lr, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8);

void sync_target(const QNetworkParams& primary, QNetworkParams& target);

struct Transition {
  Eigen::VectorXd state;
  Eigen::VectorXd next_state;
  BranchAction action;
  double reward = 0.0;
  bool terminal = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {}

  void push(Transition t);
  size_t size() const { return data_.size(); }
  size_t capacity() const { return capacity_; }

  // uniform sample with replacement
  TransitionBatch sample(int batch_size, const BranchSpec& spec, Rng& rng) const;

 private:
  size_t capacity_;
  size_t next_ = 0;
  std::vector<Transition> data_;
};

// Welford accumulator for the per-branch Q-value spread that anchors the
// exploration noise scale.
struct RunningStat {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  double stddev() const;
};

// ---------------------------------------------------------------------------
// Checkpointing: versioned binary with parameters, Adam moments, step
// counters and RNG state, so a reloaded learner continues bit-identically.

struct Checkpoint {
  QNetworkParams primary;
  QNetworkParams target;
  AdamState adam;
  long long grad_steps = 0;
  long long episode = 0;
  double best_cumulative_reward = 0.0;
  std::array<uint64_t, 4> action_rng_state{};
  std::array<uint64_t, 4> replay_rng_state{};
  std::vector<RunningStat> branch_stats;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace corridor
