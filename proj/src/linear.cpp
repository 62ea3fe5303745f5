#include "mgt/errors.hpp"
#include "mgt/models.hpp"
#include "mgt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mgt {
namespace {

Prediction from_scores(std::span<const double> scores) {
    Prediction p;
    p.probabilities = softmax(scores);
    p.label = static_cast<std::size_t>(
        std::max_element(p.probabilities.begin(), p.probabilities.end()) - p.probabilities.begin());
    return p;
}

/// Accumulates the unregularised cross-entropy and its gradient over `rows`.
double accumulate_batch(const LinearModel& model, const FeatureMatrix& x,
                        std::span<const std::uint32_t> y, std::span<const std::size_t> rows,
                        std::vector<double>& gw, std::vector<double>& gb) {
    const std::size_t k = model.num_classes();
    const std::size_t d = model.dim();
    std::fill(gw.begin(), gw.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    double loss = 0.0;
    for (auto i : rows) {
        const auto xi = x.row(i);
        auto p = softmax(model.scores(xi));
        loss -= std::log(std::max(p[y[i]], 1e-300));
        p[y[i]] -= 1.0;
        for (std::size_t c = 0; c < k; ++c) {
            const double r = p[c];
            gb[c] += r;
            double* g = gw.data() + c * d;
            for (std::size_t j = 0; j < d; ++j) {
                g[j] += r * xi[j];
            }
        }
    }
    return loss;
}

} // namespace

void LinearConfig::validate() const {
    if (batch_size == 0) {
        throw ValidationError("batch size must be positive");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ValidationError("learning rate must be positive");
    }
    if (!(l2_lambda >= 0.0) || !std::isfinite(l2_lambda)) {
        throw ValidationError("l2 lambda must be non-negative");
    }
}

LinearModel::LinearModel(std::vector<std::string> classes, std::size_t dim, double l2_lambda)
    : classes_{std::move(classes)}, dim_{dim}, weights_(classes_.size() * dim, 0.0),
      bias_(classes_.size(), 0.0), l2_lambda_{l2_lambda} {
    config_.l2_lambda = l2_lambda;
}

std::vector<double> LinearModel::scores(std::span<const double> x) const {
    if (x.size() != dim_) {
        throw ValidationError("input has " + std::to_string(x.size()) + " features, model expects " +
                              std::to_string(dim_));
    }
    std::vector<double> s(bias_.begin(), bias_.end());
    for (std::size_t c = 0; c < s.size(); ++c) {
        const double* w = weights_.data() + c * dim_;
        double acc = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) {
            acc += w[j] * x[j];
        }
        s[c] += acc;
    }
    return s;
}

Prediction LinearModel::predict(std::span<const double> x) const { return from_scores(scores(x)); }

LossGrad linear_loss_grad(const LinearModel& model, const FeatureMatrix& x,
                          std::span<const std::uint32_t> y) {
    if (x.rows() != y.size() || x.rows() == 0) {
        throw ValidationError("feature rows and labels must be non-empty and of equal length");
    }
    if (x.cols() != model.dim()) {
        throw ValidationError("feature dimension does not match the model");
    }
    for (auto label : y) {
        if (label >= model.num_classes()) {
            throw ValidationError("label index out of range");
        }
    }
    LossGrad out;
    out.weight_grad.resize(model.weights().size());
    out.bias_grad.resize(model.num_classes());
    std::vector<std::size_t> rows(x.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const double n = static_cast<double>(x.rows());
    out.loss = accumulate_batch(model, x, y, rows, out.weight_grad, out.bias_grad) / n;
    const auto w = model.weights();
    const double lambda = model.l2_lambda();
    double norm2 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        out.weight_grad[i] = out.weight_grad[i] / n + lambda * w[i];
        norm2 += w[i] * w[i];
    }
    for (auto& g : out.bias_grad) {
        g /= n;
    }
    out.loss += 0.5 * lambda * norm2;
    return out;
}

LinearModel train_linear(const FeatureMatrix& x, std::span<const std::uint32_t> y,
                         std::vector<std::string> classes, const LinearConfig& cfg) {
    cfg.validate();
    check_training_data(x, y, classes.size());
    LinearModel model{std::move(classes), x.cols(), cfg.l2_lambda};
    model.config() = cfg;

    const std::size_t n = x.rows();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> gw(model.weights().size());
    std::vector<double> gb(model.num_classes());
    const double lr = cfg.learning_rate;
    const double shrink = 1.0 / (1.0 + lr * cfg.l2_lambda);

    for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng rng{mix_seed(cfg.rng_seed, epoch)};
        rng.shuffle(std::span<std::size_t>(order));
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const auto batch = std::span<const std::size_t>(order).subspan(
                start, std::min<std::size_t>(cfg.batch_size, n - start));
            accumulate_batch(model, x, y, batch, gw, gb);
            const double scale = lr / static_cast<double>(batch.size());
            auto w = model.weights();
            for (std::size_t i = 0; i < w.size(); ++i) {
                w[i] = (w[i] - scale * gw[i]) * shrink;
            }
            auto b = model.bias();
            for (std::size_t c = 0; c < b.size(); ++c) {
                b[c] -= scale * gb[c];
            }
        }
        const double loss = linear_loss_grad(model, x, y).loss;
        if (!std::isfinite(loss)) {
            throw NumericalError("linear training diverged in epoch " + std::to_string(epoch + 1));
        }
        model.epoch_loss().push_back(loss);
    }
    return model;
}

} // namespace mgt
