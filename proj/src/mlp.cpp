#include "findbench/mlp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "findbench/rng.hpp"

namespace findbench {

namespace {

struct TrainingData {
  Eigen::VectorXd x;  // standardized
  Eigen::VectorXd y;  // standardized
  double x_mean, x_std, y_mean, y_std;
  double raw_y_sq_mean;
};

TrainingData sample_training_data(const NumericExpr& expr, std::uint64_t seed,
                                  const MlpTrainOptions& opts) {
  Rng rng(mix_keys(seed, 0x6d6c7000u));
  std::vector<double> xs, ys;
  xs.reserve(opts.sample_count);
  for (int i = 0; i < opts.sample_count; ++i) {
    const double x = rng.uniform(opts.domain_lo, opts.domain_hi);
    if (const auto y = eval_numeric(expr, x)) {
      xs.push_back(x);
      ys.push_back(*y);
    }
  }
  if (xs.size() < 100)
    throw std::runtime_error("function is unapproximable on the training domain: only " +
                             std::to_string(xs.size()) + " defined points");
  const auto n = static_cast<Eigen::Index>(xs.size());
  TrainingData d;
  d.x = Eigen::Map<Eigen::VectorXd>(xs.data(), n);
  d.y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
  d.x_mean = d.x.mean();
  d.y_mean = d.y.mean();
  d.x_std = std::sqrt((d.x.array() - d.x_mean).square().mean());
  d.y_std = std::sqrt((d.y.array() - d.y_mean).square().mean());
  if (d.x_std == 0.0) d.x_std = 1.0;
  if (d.y_std == 0.0) d.y_std = 1.0;
  d.raw_y_sq_mean = d.y.array().square().mean();
  d.x = (d.x.array() - d.x_mean) / d.x_std;
  d.y = (d.y.array() - d.y_mean) / d.y_std;
  return d;
}

// NMSE in raw target units given standardized predictions.
double raw_nmse(const Eigen::VectorXd& pred_std, const TrainingData& d) {
  const double mse_std = (pred_std - d.y).array().square().mean();
  const double mse_raw = mse_std * d.y_std * d.y_std;
  return d.raw_y_sq_mean > 0.0 ? mse_raw / d.raw_y_sq_mean : mse_raw;
}

struct Adam {
  Eigen::ArrayXd m, v;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  int t = 0;

  explicit Adam(Eigen::Index n) : m(Eigen::ArrayXd::Zero(n)), v(Eigen::ArrayXd::Zero(n)) {}

  void step(Eigen::Ref<Eigen::ArrayXd> param, const Eigen::ArrayXd& grad, double lr, int tick) {
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.square();
    const double c1 = 1.0 - std::pow(beta1, tick);
    const double c2 = 1.0 - std::pow(beta2, tick);
    param -= lr * (m / c1) / ((v / c2).sqrt() + eps);
  }
};

}  // namespace

MlpWeights train_approximation(const NumericExpr& expr, std::uint64_t seed,
                               const MlpTrainOptions& opts) {
  const TrainingData data = sample_training_data(expr, seed, opts);
  const Eigen::Index n = data.x.size();
  const Eigen::Index h = opts.hidden;

  Rng init(mix_keys(seed, 0x6d6c7001u));
  Eigen::ArrayXd w1(h), b1(h), w2(h);
  const double s1 = std::sqrt(2.0);          // He-style for 1-d input
  const double s2 = std::sqrt(2.0 / static_cast<double>(h));
  for (Eigen::Index j = 0; j < h; ++j) w1[j] = init.normal(0.0, s1);
  for (Eigen::Index j = 0; j < h; ++j) b1[j] = init.uniform(-1.0, 1.0);
  for (Eigen::Index j = 0; j < h; ++j) w2[j] = init.normal(0.0, s2);
  double b2 = 0.0;

  Adam opt_w1(h), opt_b1(h), opt_w2(h), opt_b2(1);
  Eigen::ArrayXd b2arr(1);
  b2arr[0] = 0.0;

  Eigen::MatrixXd z(n, h), a(n, h);
  Eigen::VectorXd pred(n), delta(n);
  Eigen::ArrayXd gw1(h), gb1(h), gw2(h), gb2(1);

  double nmse = std::numeric_limits<double>::infinity();
  int epoch = 0;
  for (; epoch < opts.epochs; ++epoch) {
    // forward
    z.noalias() = data.x * w1.matrix().transpose();
    z.rowwise() += b1.matrix().transpose();
    a = z.array().max(0.0);
    pred.noalias() = a * w2.matrix();
    pred.array() += b2;

    // loss gradient (mean squared error in standardized units)
    delta = 2.0 * (pred - data.y) / static_cast<double>(n);

    gw2 = (a.transpose() * delta).array();
    gb2[0] = delta.sum();
    // back through ReLU
    Eigen::MatrixXd dz = (delta * w2.matrix().transpose()).cwiseProduct(
        (z.array() > 0.0).cast<double>().matrix());
    gw1 = (dz.transpose() * data.x).array();
    gb1 = dz.colwise().sum().array();

    const int tick = epoch + 1;
    opt_w1.step(w1, gw1, opts.learning_rate, tick);
    opt_b1.step(b1, gb1, opts.learning_rate, tick);
    opt_w2.step(w2, gw2, opts.learning_rate, tick);
    opt_b2.step(b2arr, gb2, opts.learning_rate, tick);
    b2 = b2arr[0];

    if ((epoch + 1) % 100 == 0 || epoch + 1 == opts.epochs) {
      z.noalias() = data.x * w1.matrix().transpose();
      z.rowwise() += b1.matrix().transpose();
      pred.noalias() = z.array().max(0.0).matrix() * w2.matrix();
      pred.array() += b2;
      nmse = raw_nmse(pred, data);
      if (nmse < opts.early_stop_nmse) {
        ++epoch;
        break;
      }
    }
  }

  MlpWeights net;
  net.hidden = static_cast<int>(h);
  net.w1.assign(w1.data(), w1.data() + h);
  net.b1.assign(b1.data(), b1.data() + h);
  net.w2.assign(w2.data(), w2.data() + h);
  net.b2 = b2;
  net.x_mean = data.x_mean;
  net.x_std = data.x_std;
  net.y_mean = data.y_mean;
  net.y_std = data.y_std;
  net.epochs_run = epoch;
  net.train_nmse = nmse;
  return net;
}

double mlp_forward(const MlpWeights& net, double x) {
  const double xs = (x - net.x_mean) / net.x_std;
  double acc = net.b2;
  for (int j = 0; j < net.hidden; ++j) {
    const double z = net.w1[j] * xs + net.b1[j];
    if (z > 0.0) acc += net.w2[j] * z;
  }
  return acc * net.y_std + net.y_mean;
}

double recompute_train_nmse(const MlpWeights& net, const NumericExpr& expr, std::uint64_t seed,
                            const MlpTrainOptions& opts) {
  const TrainingData data = sample_training_data(expr, seed, opts);
  double se = 0.0, sy = 0.0;
  for (Eigen::Index i = 0; i < data.x.size(); ++i) {
    const double x_raw = data.x[i] * data.x_std + data.x_mean;
    const double y_raw = data.y[i] * data.y_std + data.y_mean;
    const double p = mlp_forward(net, x_raw);
    se += (p - y_raw) * (p - y_raw);
    sy += y_raw * y_raw;
  }
  return sy > 0.0 ? se / sy : se / static_cast<double>(data.x.size());
}

void save_mlp(const MlpWeights& net, const std::string& path) {
  nlohmann::ordered_json j;
  j["hidden"] = net.hidden;
  j["w1"] = net.w1;
  j["b1"] = net.b1;
  j["w2"] = net.w2;
  j["b2"] = net.b2;
  j["x_mean"] = net.x_mean;
  j["x_std"] = net.x_std;
  j["y_mean"] = net.y_mean;
  j["y_std"] = net.y_std;
  j["epochs_run"] = net.epochs_run;
  j["train_nmse"] = net.train_nmse;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write weights: " + path);
  out << j.dump() << "\n";
}

MlpWeights load_mlp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read weights: " + path);
  nlohmann::json j;
  in >> j;
  MlpWeights net;
  net.hidden = j.at("hidden").get<int>();
  net.w1 = j.at("w1").get<std::vector<double>>();
  net.b1 = j.at("b1").get<std::vector<double>>();
  net.w2 = j.at("w2").get<std::vector<double>>();
  net.b2 = j.at("b2").get<double>();
  net.x_mean = j.at("x_mean").get<double>();
  net.x_std = j.at("x_std").get<double>();
  net.y_mean = j.at("y_mean").get<double>();
  net.y_std = j.at("y_std").get<double>();
  net.epochs_run = j.at("epochs_run").get<int>();
  net.train_nmse = j.at("train_nmse").get<double>();
  return net;
}

}  // namespace findbench
