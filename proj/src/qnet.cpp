#include "corridor/qnet.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace corridor {

namespace {

constexpr double kLnEps = 1e-5;
constexpr uint32_t kCkptMagic = 0x43524c51;  // "CRLQ"
constexpr uint32_t kCkptVersion = 1;

Eigen::MatrixXd he_uniform(int rows, int cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / cols);
  Eigen::MatrixXd w(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) w(r, c) = (2.0 * rng.uniform01() - 1.0) * limit;
  return w;
}

// row-wise layer norm; fills xhat and inv_std, returns gain * xhat + offset
Eigen::MatrixXd layer_norm(const Eigen::MatrixXd& z, const LayerNormParams& ln,
                           Eigen::MatrixXd& xhat, Eigen::VectorXd& inv_std) {
  Eigen::VectorXd mu = z.rowwise().mean();
  Eigen::MatrixXd xc = z.colwise() - mu;
  Eigen::VectorXd var = xc.array().square().rowwise().mean().matrix();
  inv_std = (var.array() + kLnEps).sqrt().inverse().matrix();
  xhat = (xc.array().colwise() * inv_std.array()).matrix();
  Eigen::MatrixXd y = (xhat.array().rowwise() * ln.gain.transpose().array()).matrix();
  y.array().rowwise() += ln.offset.transpose().array();
  return y;
}

// gradient through layer norm, consuming dY and the cached xhat / inv_std
Eigen::MatrixXd layer_norm_backward(const Eigen::MatrixXd& dy,
                                    const LayerNormParams& ln,
                                    const Eigen::MatrixXd& xhat,
                                    const Eigen::VectorXd& inv_std,
                                    Eigen::VectorXd& dgain,
                                    Eigen::VectorXd& doffset) {
  dgain = (dy.array() * xhat.array()).matrix().colwise().sum().transpose();
  doffset = dy.colwise().sum().transpose();
  Eigen::MatrixXd dxhat =
      (dy.array().rowwise() * ln.gain.transpose().array()).matrix();
  Eigen::VectorXd mean_dxhat = dxhat.rowwise().mean();
  Eigen::VectorXd mean_dxhat_xhat =
      (dxhat.array() * xhat.array()).rowwise().mean().matrix();
  Eigen::ArrayXXd centered = (dxhat.colwise() - mean_dxhat).array() -
                             (xhat.array().colwise() * mean_dxhat_xhat.array());
  return (centered.colwise() * inv_std.array()).matrix();
}

void write_bytes(std::ofstream& os, const void* p, size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_bytes(std::ifstream& is, void* p, size_t n) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
}

template <typename T>
void write_pod(std::ofstream& os, const T& v) {
  write_bytes(os, &v, sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& is) {
  T v;
  read_bytes(is, &v, sizeof(T));
  return v;
}

void write_params(std::ofstream& os, const QNetworkParams& p) {
  for (const auto& [ptr, n] : p.tensors())
    write_bytes(os, ptr, sizeof(double) * static_cast<size_t>(n));
}

void read_params(std::ifstream& is, QNetworkParams& p) {
  for (auto& [ptr, n] : p.tensors())
    read_bytes(is, ptr, sizeof(double) * static_cast<size_t>(n));
}

}  // namespace

QNetworkParams QNetworkParams::init(int input_dim, int hidden,
                                    const BranchSpec& spec,
                                    const Eigen::VectorXd& input_scale, Rng& rng) {
  QNetworkParams p;
  p.input_dim = input_dim;
  p.hidden = hidden;
  p.spec = spec;
  p.input_scale = input_scale;
  p.fc1 = {he_uniform(hidden, input_dim, rng), Eigen::VectorXd::Zero(hidden)};
  p.fc2 = {he_uniform(hidden, hidden, rng), Eigen::VectorXd::Zero(hidden)};
  p.ln1 = {Eigen::VectorXd::Ones(hidden), Eigen::VectorXd::Zero(hidden)};
  p.ln2 = {Eigen::VectorXd::Ones(hidden), Eigen::VectorXd::Zero(hidden)};
  for (int j = 0; j < spec.branches(); ++j)
    p.heads.push_back({he_uniform(spec.cardinality(j), hidden, rng),
                       Eigen::VectorXd::Zero(spec.cardinality(j))});
  return p;
}

QNetworkParams QNetworkParams::zeros_like(const QNetworkParams& o) {
  QNetworkParams p;
  p.input_dim = o.input_dim;
  p.hidden = o.hidden;
  p.spec = o.spec;
  p.input_scale = o.input_scale;
  p.fc1 = {Eigen::MatrixXd::Zero(o.fc1.W.rows(), o.fc1.W.cols()),
           Eigen::VectorXd::Zero(o.fc1.b.size())};
  p.fc2 = {Eigen::MatrixXd::Zero(o.fc2.W.rows(), o.fc2.W.cols()),
           Eigen::VectorXd::Zero(o.fc2.b.size())};
  p.ln1 = {Eigen::VectorXd::Zero(o.hidden), Eigen::VectorXd::Zero(o.hidden)};
  p.ln2 = {Eigen::VectorXd::Zero(o.hidden), Eigen::VectorXd::Zero(o.hidden)};
  for (const auto& h : o.heads)
    p.heads.push_back({Eigen::MatrixXd::Zero(h.W.rows(), h.W.cols()),
                       Eigen::VectorXd::Zero(h.b.size())});
  return p;
}

long long QNetworkParams::param_count() const {
  long long n = 0;
  for (const auto& [ptr, len] : tensors()) n += len;
  return n;
}

std::vector<std::pair<double*, long long>> QNetworkParams::tensors() {
  std::vector<std::pair<double*, long long>> t;
  auto add_m = [&](Eigen::MatrixXd& m) { t.emplace_back(m.data(), m.size()); };
  auto add_v = [&](Eigen::VectorXd& v) { t.emplace_back(v.data(), v.size()); };
  add_m(fc1.W);
  add_v(fc1.b);
  add_v(ln1.gain);
  add_v(ln1.offset);
  add_m(fc2.W);
  add_v(fc2.b);
  add_v(ln2.gain);
  add_v(ln2.offset);
  for (auto& h : heads) {
    add_m(h.W);
    add_v(h.b);
  }
  return t;
}

std::vector<std::pair<const double*, long long>> QNetworkParams::tensors() const {
  auto mut = const_cast<QNetworkParams*>(this)->tensors();
  std::vector<std::pair<const double*, long long>> t;
  for (auto& [p, n] : mut) t.emplace_back(p, n);
  return t;
}

std::vector<Eigen::MatrixXd> forward(const QNetworkParams& net,
                                     const Eigen::MatrixXd& states,
                                     ForwardCache* cache) {
  if (states.cols() != net.input_dim)
    throw std::invalid_argument("forward: state width " +
                                std::to_string(states.cols()) + " != input_dim " +
                                std::to_string(net.input_dim));
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;

  c.xn = (states.array().rowwise() * net.input_scale.transpose().array()).matrix();

  Eigen::MatrixXd z1 = (c.xn * net.fc1.W.transpose()).rowwise() + net.fc1.b.transpose();
  Eigen::MatrixXd y1 = layer_norm(z1, net.ln1, c.xhat1, c.inv_std1);
  c.h1 = y1.cwiseMax(0.0);

  Eigen::MatrixXd z2 = (c.h1 * net.fc2.W.transpose()).rowwise() + net.fc2.b.transpose();
  Eigen::MatrixXd y2 = layer_norm(z2, net.ln2, c.xhat2, c.inv_std2);
  c.h2 = y2.cwiseMax(0.0);

  std::vector<Eigen::MatrixXd> q;
  q.reserve(net.heads.size());
  for (const auto& head : net.heads)
    q.push_back((c.h2 * head.W.transpose()).rowwise() + head.b.transpose());
  return q;
}

std::vector<Eigen::VectorXd> forward_single(const QNetworkParams& net,
                                            const Eigen::VectorXd& state) {
  auto q = forward(net, state.transpose());
  std::vector<Eigen::VectorXd> out;
  out.reserve(q.size());
  for (auto& m : q) out.push_back(m.row(0).transpose());
  return out;
}

namespace {

int argmax_lowest(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v(i) > v(best)) best = i;
  return best;
}

}  // namespace

BranchAction select_action(const QNetworkParams& net,
                           const std::vector<Eigen::VectorXd>& qvalues,
                           const std::vector<double>& sigma, Rng& rng) {
  const BranchSpec& spec = net.spec;
  std::vector<int> chosen(spec.branches());
  for (int j = 0; j < spec.branches(); ++j) {
    Eigen::VectorXd q = qvalues[j];
    if (sigma[j] > 0.0)
      for (int i = 0; i < q.size(); ++i) q(i) += sigma[j] * rng.normal();
    chosen[j] = argmax_lowest(q);
  }
  BranchAction a;
  a.global = chosen.back();
  if (spec.shared_local_head) {
    a.local.assign(spec.agents, chosen[0]);
  } else {
    a.local.assign(chosen.begin(), chosen.end() - 1);
  }
  return a;
}

std::vector<Eigen::VectorXd> td_targets(const QNetworkParams& primary,
                                        const QNetworkParams& target,
                                        const TransitionBatch& batch,
                                        double gamma) {
  const auto qp = forward(primary, batch.next_states);
  const auto qt = forward(target, batch.next_states);
  const long long B = batch.size();
  std::vector<Eigen::VectorXd> y(qp.size(), Eigen::VectorXd(B));
  for (size_t j = 0; j < qp.size(); ++j) {
    for (long long i = 0; i < B; ++i) {
      if (batch.terminal[i]) {
        y[j](i) = batch.rewards(i);
      } else {
        const int best = argmax_lowest(qp[j].row(i).transpose());
        y[j](i) = batch.rewards(i) + gamma * qt[j](i, best);
      }
    }
  }
  return y;
}

double loss(const QNetworkParams& net, const TransitionBatch& batch,
            const std::vector<Eigen::VectorXd>& targets) {
  if (static_cast<int>(targets.size()) != net.spec.branches() ||
      static_cast<int>(batch.actions.size()) != net.spec.branches())
    throw std::invalid_argument("loss: targets/actions must cover every branch");
  const auto q = forward(net, batch.states);
  const long long B = batch.size();
  const int nb = net.spec.branches();
  double total = 0.0;
  for (int j = 0; j < nb; ++j) {
    double br = 0.0;
    for (long long i = 0; i < B; ++i) {
      const double err = q[j](i, batch.actions[j][i]) - targets[j](i);
      br += err * err;
    }
    total += br / static_cast<double>(B);
  }
  return total / nb;
}

double backward(const QNetworkParams& net, const TransitionBatch& batch,
                const std::vector<Eigen::VectorXd>& targets,
                QNetworkGrads& grads) {
  if (static_cast<int>(targets.size()) != net.spec.branches() ||
      static_cast<int>(batch.actions.size()) != net.spec.branches())
    throw std::invalid_argument("backward: targets/actions must cover every branch");
  ForwardCache c;
  const auto q = forward(net, batch.states, &c);
  const long long B = batch.size();
  const int nb = net.spec.branches();

  double total = 0.0;
  Eigen::MatrixXd dh2 = Eigen::MatrixXd::Zero(B, net.hidden);
  for (int j = 0; j < nb; ++j) {
    Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(B, net.spec.cardinality(j));
    double br = 0.0;
    for (long long i = 0; i < B; ++i) {
      const double err = q[j](i, batch.actions[j][i]) - targets[j](i);
      br += err * err;
      dq(i, batch.actions[j][i]) = 2.0 * err / (static_cast<double>(B) * nb);
    }
    total += br / static_cast<double>(B);
    grads.heads[j].W = dq.transpose() * c.h2;
    grads.heads[j].b = dq.colwise().sum().transpose();
    dh2 += dq * net.heads[j].W;
  }

  Eigen::MatrixXd dy2 =
      ((c.h2.array() > 0.0).cast<double>() * dh2.array()).matrix();
  Eigen::MatrixXd dz2 = layer_norm_backward(dy2, net.ln2, c.xhat2, c.inv_std2,
                                            grads.ln2.gain, grads.ln2.offset);
  grads.fc2.W = dz2.transpose() * c.h1;
  grads.fc2.b = dz2.colwise().sum().transpose();
  Eigen::MatrixXd dh1 = dz2 * net.fc2.W;

  Eigen::MatrixXd dy1 =
      ((c.h1.array() > 0.0).cast<double>() * dh1.array()).matrix();
  Eigen::MatrixXd dz1 = layer_norm_backward(dy1, net.ln1, c.xhat1, c.inv_std1,
                                            grads.ln1.gain, grads.ln1.offset);
  grads.fc1.W = dz1.transpose() * c.xn;
  grads.fc1.b = dz1.colwise().sum().transpose();

  return total / nb;
}

AdamState AdamState::zeros(const QNetworkParams& net) {
  AdamState s;
  s.m = Eigen::VectorXd::Zero(net.param_count());
  s.v = Eigen::VectorXd::Zero(net.param_count());
  s.t = 0;
  return s;
}

void adam_step(QNetworkParams& params, const QNetworkGrads& grads,
               AdamState& state, double lr, double beta1, double beta2,
               double eps) {
  state.t += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  long long off = 0;
  auto ptensors = params.tensors();
  auto gtensors = grads.tensors();
  for (size_t k = 0; k < ptensors.size(); ++k) {
    double* p = ptensors[k].first;
    const double* g = gtensors[k].first;
    const long long n = ptensors[k].second;
    for (long long i = 0; i < n; ++i) {
      if (!std::isfinite(g[i]))
        throw TrainingDivergenceError("non-finite gradient at parameter " +
                                      std::to_string(off + i));
      double& m = state.m(off + i);
      double& v = state.v(off + i);
      m = beta1 * m + (1.0 - beta1) * g[i];
      v = beta2 * v + (1.0 - beta2) * g[i] * g[i];
      p[i] -= lr * (m / bc1) / (std::sqrt(v / bc2) + eps);
    }
    off += n;
  }
}

void sync_target(const QNetworkParams& primary, QNetworkParams& target) {
  target = primary;
}

void ReplayBuffer::push(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

TransitionBatch ReplayBuffer::sample(int batch_size, const BranchSpec& spec,
                                     Rng& rng) const {
  if (data_.empty())
    throw std::logic_error("ReplayBuffer::sample on an empty buffer");
  const int in = static_cast<int>(data_.front().state.size());
  TransitionBatch b;
  b.states.resize(batch_size, in);
  b.next_states.resize(batch_size, in);
  b.actions.assign(spec.branches(), std::vector<int>(batch_size));
  b.rewards.resize(batch_size);
  b.terminal.resize(batch_size);
  for (int i = 0; i < batch_size; ++i) {
    const Transition& t = data_[rng.uniform_int(static_cast<int>(data_.size()))];
    b.states.row(i) = t.state.transpose();
    b.next_states.row(i) = t.next_state.transpose();
    for (int j = 0; j < spec.local_branches(); ++j)
      b.actions[j][i] = t.action.local[j];
    b.actions[spec.branches() - 1][i] = t.action.global;
    b.rewards(i) = t.reward;
    b.terminal[i] = t.terminal ? 1 : 0;
  }
  return b;
}

void RunningStat::add(double x) {
  n += 1;
  const double d = x - mean;
  mean += d / static_cast<double>(n);
  m2 += d * (x - mean);
}

double RunningStat::stddev() const {
  if (n < 2) return 0.0;
  return std::sqrt(m2 / static_cast<double>(n - 1));
}

// ---------------------------------------------------------------------------
// checkpoint io

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path);
  write_pod(os, kCkptMagic);
  write_pod(os, kCkptVersion);
  write_pod(os, ckpt.primary.input_dim);
  write_pod(os, ckpt.primary.hidden);
  write_pod(os, ckpt.primary.spec.agents);
  write_pod(os, ckpt.primary.spec.local_cardinality);
  write_pod(os, ckpt.primary.spec.global_cardinality);
  write_pod(os, static_cast<uint8_t>(ckpt.primary.spec.shared_local_head));
  write_bytes(os, ckpt.primary.input_scale.data(),
              sizeof(double) * ckpt.primary.input_scale.size());
  write_params(os, ckpt.primary);
  write_params(os, ckpt.target);
  write_bytes(os, ckpt.adam.m.data(), sizeof(double) * ckpt.adam.m.size());
  write_bytes(os, ckpt.adam.v.data(), sizeof(double) * ckpt.adam.v.size());
  write_pod(os, ckpt.adam.t);
  write_pod(os, ckpt.grad_steps);
  write_pod(os, ckpt.episode);
  write_pod(os, ckpt.best_cumulative_reward);
  write_bytes(os, ckpt.action_rng_state.data(), sizeof(uint64_t) * 4);
  write_bytes(os, ckpt.replay_rng_state.data(), sizeof(uint64_t) * 4);
  const uint32_t nstats = static_cast<uint32_t>(ckpt.branch_stats.size());
  write_pod(os, nstats);
  for (const auto& s : ckpt.branch_stats) {
    write_pod(os, s.n);
    write_pod(os, s.mean);
    write_pod(os, s.m2);
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
  if (read_pod<uint32_t>(is) != kCkptMagic)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  if (read_pod<uint32_t>(is) != kCkptVersion)
    throw std::runtime_error("checkpoint: unsupported version in " + path);

  const int input_dim = read_pod<int>(is);
  const int hidden = read_pod<int>(is);
  BranchSpec spec;
  spec.agents = read_pod<int>(is);
  spec.local_cardinality = read_pod<int>(is);
  spec.global_cardinality = read_pod<int>(is);
  spec.shared_local_head = read_pod<uint8_t>(is) != 0;
  Eigen::VectorXd scale(input_dim);
  read_bytes(is, scale.data(), sizeof(double) * input_dim);

  Rng dummy(0);
  Checkpoint ckpt;
  ckpt.primary = QNetworkParams::init(input_dim, hidden, spec, scale, dummy);
  ckpt.target = ckpt.primary;
  read_params(is, ckpt.primary);
  read_params(is, ckpt.target);
  ckpt.adam = AdamState::zeros(ckpt.primary);
  read_bytes(is, ckpt.adam.m.data(), sizeof(double) * ckpt.adam.m.size());
  read_bytes(is, ckpt.adam.v.data(), sizeof(double) * ckpt.adam.v.size());
  ckpt.adam.t = read_pod<long long>(is);
  ckpt.grad_steps = read_pod<long long>(is);
  ckpt.episode = read_pod<long long>(is);
  ckpt.best_cumulative_reward = read_pod<double>(is);
  read_bytes(is, ckpt.action_rng_state.data(), sizeof(uint64_t) * 4);
  read_bytes(is, ckpt.replay_rng_state.data(), sizeof(uint64_t) * 4);
  const uint32_t nstats = read_pod<uint32_t>(is);
  ckpt.branch_stats.resize(nstats);
  for (auto& s : ckpt.branch_stats) {
    s.n = read_pod<long long>(is);
    s.mean = read_pod<double>(is);
    s.m2 = read_pod<double>(is);
  }
  return ckpt;
}

}  // namespace corridor
