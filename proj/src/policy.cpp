#include "gaitsim/policy.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace gaitsim {

namespace {

constexpr double kNormEps = 1e-8;
constexpr double kNormClip = 10.0;
constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)

// Orthogonal matrix via QR of a Gaussian draw, signs fixed so the
// factorization is unique, scaled by gain.
MatrixXd orthogonal(int rows, int cols, Rng& rng, double gain) {
  const bool tall = rows >= cols;
  const int r = tall ? rows : cols;
  const int c = tall ? cols : rows;
  MatrixXd g(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(r, c);
  const MatrixXd rmat = qr.matrixQR().topRows(c).triangularView<Eigen::Upper>();
  for (int j = 0; j < c; ++j)
    if (rmat(j, j) < 0.0) q.col(j) = -q.col(j);
  MatrixXd out = tall ? q : MatrixXd(q.transpose());
  return gain * out;
}

}  // namespace

void MlpGrads::zero() {
  for (auto& w : W) w.setZero();
  for (auto& v : b) v.setZero();
}

double MlpGrads::squared_norm() const {
  double s = 0.0;
  for (const auto& w : W) s += w.squaredNorm();
  for (const auto& v : b) s += v.squaredNorm();
  return s;
}

MlpNet MlpNet::make(const std::vector<int>& sizes, Rng& rng, double out_gain) {
  if (sizes.size() < 2) throw std::invalid_argument("MlpNet: need at least two sizes");
  MlpNet net;
  for (size_t i = 0; i + 1 < sizes.size(); ++i) {
    const bool last = i + 2 == sizes.size();
    net.W.push_back(orthogonal(sizes[i + 1], sizes[i], rng, last ? out_gain : 1.0));
    net.b.push_back(VectorXd::Zero(sizes[i + 1]));
  }
  return net;
}

VectorXd MlpNet::forward(const VectorXd& x) const {
  VectorXd h = x;
  for (int i = 0; i < num_layers(); ++i) {
    h = (W[i] * h + b[i]).eval();
    if (i + 1 < num_layers()) h = h.array().tanh();
  }
  return h;
}

MatrixXd MlpNet::forward_batch(const MatrixXd& X, MlpCache* cache) const {
  if (X.rows() != in_dim())
    throw std::invalid_argument("MlpNet::forward_batch: input dimension mismatch");
  if (cache) {
    cache->acts.assign(1, X);
    cache->acts.reserve(num_layers() + 1);
  }
  MatrixXd h = X;
  for (int i = 0; i < num_layers(); ++i) {
    h = (W[i] * h).colwise() + b[i];
    if (i + 1 < num_layers()) h = h.array().tanh();
    if (cache) cache->acts.push_back(h);
  }
  return h;
}

void MlpNet::backward(const MlpCache& cache, const MatrixXd& dY,
                      MlpGrads* grads) const {
  const int L = num_layers();
  if (static_cast<int>(cache.acts.size()) != L + 1)
    throw std::invalid_argument("MlpNet::backward: cache does not match net");
  MatrixXd delta = dY;  // dL/d(pre-activation of layer L-1) for the last layer
  for (int i = L - 1; i >= 0; --i) {
    grads->W[i] += delta * cache.acts[i].transpose();
    grads->b[i] += delta.rowwise().sum();
    if (i > 0) {
      // Propagate through the affine map, then through the tanh of layer i-1
      // (cache.acts[i] holds that tanh output).
      delta = W[i].transpose() * delta;
      delta.array() *= 1.0 - cache.acts[i].array().square();
    }
  }
}

MlpGrads MlpNet::zero_grads() const {
  MlpGrads g;
  for (const auto& w : W) g.W.push_back(MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& v : b) g.b.push_back(VectorXd::Zero(v.size()));
  return g;
}

void RunningStat::observe(const VectorXd& x) {
  if (mean.size() == 0) {
    mean = VectorXd::Zero(x.size());
    m2 = VectorXd::Zero(x.size());
  }
  count += 1.0;
  const VectorXd delta = x - mean;
  mean += delta / count;
  m2.array() += delta.array() * (x - mean).array();
}

VectorXd RunningStat::variance() const {
  if (count < 2.0) return VectorXd::Ones(mean.size());
  return m2 / count;
}

VectorXd RunningStat::normalize(const VectorXd& x) const {
  if (count < 2.0) return x;
  const VectorXd sd = (variance().array() + kNormEps).sqrt();
  return ((x - mean).array() / sd.array())
      .cwiseMax(-kNormClip)
      .cwiseMin(kNormClip)
      .matrix();
}

MatrixXd RunningStat::normalize_batch(const MatrixXd& X) const {
  if (count < 2.0) return X;
  const Eigen::ArrayXd sd = (variance().array() + kNormEps).sqrt();
  return ((X.colwise() - mean).array().colwise() / sd)
      .cwiseMax(-kNormClip)
      .cwiseMin(kNormClip)
      .matrix();
}

VectorXd Agent::mean_action(const VectorXd& obs) const {
  return pi.forward(norm.normalize(obs));
}

VectorXd Agent::sample_action(const VectorXd& obs, Rng& rng, double* logp) const {
  const VectorXd mean = mean_action(obs);
  const VectorXd std = log_std.array().exp();
  VectorXd a(mean.size());
  for (int i = 0; i < a.size(); ++i) a[i] = mean[i] + std[i] * rng.normal();
  if (logp) {
    double lp = -0.5 * act_dim() * kLog2Pi - log_std.sum();
    lp -= 0.5 * (((a - mean).array() / std.array()).square()).sum();
    *logp = lp;
  }
  return a;
}

double Agent::log_prob(const VectorXd& obs, const VectorXd& action) const {
  const VectorXd mean = mean_action(obs);
  const VectorXd std = log_std.array().exp();
  double lp = -0.5 * act_dim() * kLog2Pi - log_std.sum();
  lp -= 0.5 * (((action - mean).array() / std.array()).square()).sum();
  return lp;
}

double Agent::state_value(const VectorXd& obs) const {
  return value.forward(norm.normalize(obs))[0];
}

void Agent::clamp_log_std() {
  log_std = log_std.cwiseMax(kLogStdFloor).cwiseMin(kLogStdCeil);
}

Agent make_agent(int obs_dim, int act_dim, Rng& rng, int hidden) {
  Agent a;
  a.pi = MlpNet::make({obs_dim, hidden, hidden, act_dim}, rng, 0.01);
  a.value = MlpNet::make({obs_dim, hidden, hidden, 1}, rng, 1.0);
  a.log_std = VectorXd::Constant(act_dim, -1.0);
  a.norm = RunningStat(obs_dim);
  return a;
}

void PpoConfig::validate() const {
  if (!(clip > 0.0 && clip < 1.0)) throw std::invalid_argument("PpoConfig: clip in (0,1)");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("PpoConfig: gamma in (0,1]");
  if (!(lam >= 0.0 && lam <= 1.0)) throw std::invalid_argument("PpoConfig: lambda in [0,1]");
  if (learning_rate <= 0.0) throw std::invalid_argument("PpoConfig: learning_rate > 0");
  if (epochs < 1 || minibatch < 1 || batch_steps < 1)
    throw std::invalid_argument("PpoConfig: epochs/minibatch/batch_steps >= 1");
  if (value_coef < 0.0 || entropy_coef < 0.0 || max_grad_norm <= 0.0)
    throw std::invalid_argument("PpoConfig: bad regularization constants");
}

void TrajectoryBatch::check_aligned() const {
  const int n = size();
  if (obs.cols() != n || actions.cols() != n || logp.size() != n ||
      values.size() != n)
    throw std::invalid_argument("TrajectoryBatch: misaligned fields");
  if (episode_start.empty() || episode_start.front() != 0)
    throw std::invalid_argument("TrajectoryBatch: episode_start must begin at 0");
  for (size_t e = 1; e < episode_start.size(); ++e)
    if (episode_start[e] <= episode_start[e - 1] || episode_start[e] >= n)
      throw std::invalid_argument("TrajectoryBatch: bad episode boundaries");
  if (final_value.size() != episode_start.size())
    throw std::invalid_argument("TrajectoryBatch: final_value per episode required");
}

namespace {

void put_bytes(std::ofstream& out, const void* p, size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void get_bytes(std::ifstream& in, void* p, size_t n) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!in) throw CheckpointError("checkpoint: truncated file");
}

void put_i64(std::ofstream& out, std::int64_t v) { put_bytes(out, &v, sizeof v); }
void put_f64(std::ofstream& out, double v) { put_bytes(out, &v, sizeof v); }

std::int64_t get_i64(std::ifstream& in) {
  std::int64_t v;
  get_bytes(in, &v, sizeof v);
  return v;
}

double get_f64(std::ifstream& in) {
  double v;
  get_bytes(in, &v, sizeof v);
  return v;
}

void put_matrix(std::ofstream& out, const MatrixXd& m) {
  put_i64(out, m.rows());
  put_i64(out, m.cols());
  put_bytes(out, m.data(), sizeof(double) * m.size());
}

MatrixXd get_matrix(std::ifstream& in) {
  const std::int64_t r = get_i64(in), c = get_i64(in);
  if (r < 0 || c < 0 || r * c > (1 << 28))
    throw CheckpointError("checkpoint: implausible tensor size");
  MatrixXd m(r, c);
  get_bytes(in, m.data(), sizeof(double) * m.size());
  return m;
}

void put_vector(std::ofstream& out, const VectorXd& v) {
  put_i64(out, v.size());
  put_bytes(out, v.data(), sizeof(double) * v.size());
}

VectorXd get_vector(std::ifstream& in) {
  const std::int64_t n = get_i64(in);
  if (n < 0 || n > (1 << 28)) throw CheckpointError("checkpoint: implausible vector size");
  VectorXd v(n);
  get_bytes(in, v.data(), sizeof(double) * v.size());
  return v;
}

void put_net(std::ofstream& out, const MlpNet& net) {
  put_i64(out, net.num_layers());
  for (int i = 0; i < net.num_layers(); ++i) {
    put_matrix(out, net.W[i]);
    put_vector(out, net.b[i]);
  }
}

MlpNet get_net(std::ifstream& in) {
  const std::int64_t L = get_i64(in);
  if (L < 1 || L > 16) throw CheckpointError("checkpoint: implausible layer count");
  MlpNet net;
  for (std::int64_t i = 0; i < L; ++i) {
    net.W.push_back(get_matrix(in));
    net.b.push_back(get_vector(in));
  }
  return net;
}

constexpr char kCkptMagic[] = "gaitsim-ckpt v1\n";

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open checkpoint for writing: " + path);
  out.write(kCkptMagic, sizeof(kCkptMagic) - 1);
  put_net(out, ckpt.agent.pi);
  put_vector(out, ckpt.agent.log_std);
  put_net(out, ckpt.agent.value);
  put_vector(out, ckpt.agent.norm.mean);
  put_vector(out, ckpt.agent.norm.m2);
  put_f64(out, ckpt.agent.norm.count);
  const PpoConfig& c = ckpt.config;
  put_f64(out, c.clip);
  put_f64(out, c.gamma);
  put_f64(out, c.lam);
  put_f64(out, c.learning_rate);
  put_i64(out, c.epochs);
  put_i64(out, c.minibatch);
  put_i64(out, c.batch_steps);
  put_f64(out, c.entropy_coef);
  put_f64(out, c.value_coef);
  put_f64(out, c.max_grad_norm);
  put_i64(out, static_cast<std::int64_t>(ckpt.rng_state.size()));
  put_bytes(out, ckpt.rng_state.data(), ckpt.rng_state.size());
  put_i64(out, ckpt.iteration);
  put_f64(out, ckpt.best_return);
  if (!out.flush()) throw CheckpointError("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  char magic[sizeof(kCkptMagic) - 1];
  get_bytes(in, magic, sizeof magic);
  if (std::memcmp(magic, kCkptMagic, sizeof magic) != 0)
    throw CheckpointError("checkpoint: bad magic/version");
  Checkpoint ckpt;
  ckpt.agent.pi = get_net(in);
  ckpt.agent.log_std = get_vector(in);
  ckpt.agent.value = get_net(in);
  ckpt.agent.norm.mean = get_vector(in);
  ckpt.agent.norm.m2 = get_vector(in);
  ckpt.agent.norm.count = get_f64(in);
  PpoConfig& c = ckpt.config;
  c.clip = get_f64(in);
  c.gamma = get_f64(in);
  c.lam = get_f64(in);
  c.learning_rate = get_f64(in);
  c.epochs = static_cast<int>(get_i64(in));
  c.minibatch = static_cast<int>(get_i64(in));
  c.batch_steps = static_cast<int>(get_i64(in));
  c.entropy_coef = get_f64(in);
  c.value_coef = get_f64(in);
  c.max_grad_norm = get_f64(in);
  const std::int64_t rng_len = get_i64(in);
  if (rng_len < 0 || rng_len > (1 << 20))
    throw CheckpointError("checkpoint: implausible rng state size");
  ckpt.rng_state.resize(static_cast<size_t>(rng_len));
  get_bytes(in, ckpt.rng_state.data(), ckpt.rng_state.size());
  ckpt.iteration = get_i64(in);
  ckpt.best_return = get_f64(in);
  c.validate();
  ckpt.agent.clamp_log_std();
  return ckpt;
}

}  // namespace gaitsim
