#include "mgt/errors.hpp"
#include "mgt/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mgt {
namespace {

constexpr double kMinHessian = 1e-16;

struct SlotScan {
    double g{0.0};
    double h{0.0};
    double last{0.0};
    bool has_last{false};
};

/// Scans one presorted feature column and records the best split per open node.
void scan_feature(const LevelSplitInput& in, std::size_t feature, std::vector<SlotScan>& state,
                  std::vector<SplitCandidate>& best) {
    std::fill(state.begin(), state.end(), SlotScan{});
    std::fill(best.begin(), best.end(), SplitCandidate{});
    const auto column = in.sorted->column(feature);
    for (auto row : column) {
        const auto slot = in.node_of_row[row];
        if (slot < 0) {
            continue;
        }
        auto& s = state[static_cast<std::size_t>(slot)];
        const double v = (*in.x)(row, feature);
        if (s.has_last && v > s.last) {
            const double g_total = in.node_g[static_cast<std::size_t>(slot)];
            const double h_total = in.node_h[static_cast<std::size_t>(slot)];
            const double h_right = h_total - s.h;
            if (s.h >= in.min_child_weight && h_right >= in.min_child_weight) {
                const double gain = split_gain(s.g, s.h, g_total - s.g, h_right, in.lambda, in.gamma);
                auto& b = best[static_cast<std::size_t>(slot)];
                if (gain > 0.0 && gain > b.gain) {
                    double threshold = s.last + (v - s.last) / 2.0;
                    if (!(threshold > s.last)) {
                        threshold = v;
                    }
                    b = SplitCandidate{gain, static_cast<std::int32_t>(feature), threshold, s.g, s.h};
                }
            }
        }
        s.g += in.grad[row];
        s.h += in.hess[row];
        s.last = v;
        s.has_last = true;
    }
}

void merge_candidates(std::vector<SplitCandidate>& into, const std::vector<SplitCandidate>& from) {
    for (std::size_t s = 0; s < into.size(); ++s) {
        if (from[s].valid() && (!into[s].valid() || from[s].gain > into[s].gain)) {
            into[s] = from[s];
        }
    }
}

RegressionTree grow_tree(const FeatureMatrix& x, const SortedColumns& sorted,
                         std::span<const double> grad, std::span<const double> hess,
                         const GbdtConfig& cfg, int threads) {
    const std::size_t n = x.rows();
    RegressionTree tree;
    tree.nodes.emplace_back();

    std::vector<std::int32_t> node_of_row(n, 0);
    std::vector<std::uint32_t> open{0};
    std::vector<double> node_g(1, 0.0);
    std::vector<double> node_h(1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        node_g[0] += grad[i];
        node_h[0] += hess[i];
    }

    auto make_leaf = [&](std::uint32_t node, double g, double h) {
        tree.nodes[node].feature = -1;
        tree.nodes[node].value = -g / (h + cfg.lambda) * cfg.eta;
    };

    for (std::uint32_t depth = 0; !open.empty(); ++depth) {
        if (depth == cfg.max_depth) {
            for (std::size_t s = 0; s < open.size(); ++s) {
                make_leaf(open[s], node_g[s], node_h[s]);
            }
            break;
        }
        LevelSplitInput in;
        in.x = &x;
        in.sorted = &sorted;
        in.node_of_row = node_of_row;
        in.grad = grad;
        in.hess = hess;
        in.node_g = node_g;
        in.node_h = node_h;
        in.lambda = cfg.lambda;
        in.gamma = cfg.gamma;
        in.min_child_weight = cfg.min_child_weight;
        const auto splits = threads > 1 ? find_level_splits(in, threads) : find_level_splits_serial(in);

        std::vector<std::uint32_t> next_open;
        // child slot for (slot, side); -1 when the slot became a leaf
        std::vector<std::int32_t> left_slot(open.size(), -1);
        for (std::size_t s = 0; s < open.size(); ++s) {
            const auto& c = splits[s];
            if (!c.valid()) {
                make_leaf(open[s], node_g[s], node_h[s]);
                continue;
            }
            const auto left = static_cast<std::uint32_t>(tree.nodes.size());
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            auto& node = tree.nodes[open[s]];
            node.feature = c.feature;
            node.threshold = c.threshold;
            node.left = left;
            node.right = left + 1;
            left_slot[s] = static_cast<std::int32_t>(next_open.size());
            next_open.push_back(left);
            next_open.push_back(left + 1);
        }
        if (next_open.empty()) {
            break;
        }
        std::vector<double> next_g(next_open.size(), 0.0);
        std::vector<double> next_h(next_open.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto slot = node_of_row[i];
            if (slot < 0) {
                continue;
            }
            const auto base = left_slot[static_cast<std::size_t>(slot)];
            if (base < 0) {
                node_of_row[i] = -1;
                continue;
            }
            const auto& c = splits[static_cast<std::size_t>(slot)];
            const auto child = base + (x(i, static_cast<std::size_t>(c.feature)) < c.threshold ? 0 : 1);
            node_of_row[i] = child;
            next_g[static_cast<std::size_t>(child)] += grad[i];
            next_h[static_cast<std::size_t>(child)] += hess[i];
        }
        open = std::move(next_open);
        node_g = std::move(next_g);
        node_h = std::move(next_h);
    }
    return tree;
}

double mean_logloss(const std::vector<double>& scores, std::span<const std::uint32_t> y, std::size_t k) {
    double loss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const auto p = softmax(std::span<const double>(scores).subspan(i * k, k));
        loss -= std::log(std::max(p[y[i]], 1e-300));
    }
    return loss / static_cast<double>(y.size());
}

} // namespace

void GbdtConfig::validate() const {
    if (max_depth == 0) {
        throw ValidationError("max_depth must be positive");
    }
    if (!(eta >= 0.0) || !(lambda >= 0.0) || !(gamma >= 0.0) || !(min_child_weight >= 0.0) ||
        !std::isfinite(eta) || !std::isfinite(lambda) || !std::isfinite(gamma) ||
        !std::isfinite(min_child_weight) || !std::isfinite(base_score)) {
        throw ValidationError("boosting eta, lambda, gamma and min_child_weight must be finite and non-negative");
    }
}

std::size_t RegressionTree::leaf_index(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const auto& node = nodes[i];
        i = x[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left : node.right;
    }
    return i;
}

TreeEnsemble::TreeEnsemble(std::vector<std::string> classes, std::size_t dim, GbdtConfig config)
    : classes_{std::move(classes)}, dim_{dim}, config_{config} {}

std::vector<double> TreeEnsemble::raw_scores(std::span<const double> x, std::size_t rounds) const {
    if (x.size() != dim_) {
        throw ValidationError("input has " + std::to_string(x.size()) + " features, model expects " +
                              std::to_string(dim_));
    }
    const std::size_t k = classes_.size();
    std::vector<double> s(k, config_.base_score);
    const std::size_t used = std::min(rounds, this->rounds());
    for (std::size_t r = 0; r < used; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            s[c] += trees_[r * k + c].evaluate(x);
        }
    }
    return s;
}

Prediction TreeEnsemble::predict(std::span<const double> x) const {
    Prediction p;
    p.probabilities = softmax(raw_scores(x));
    p.label = static_cast<std::size_t>(
        std::max_element(p.probabilities.begin(), p.probabilities.end()) - p.probabilities.begin());
    return p;
}

double split_gain(double g_left, double h_left, double g_right, double h_right, double lambda,
                  double gamma) noexcept {
    const double g = g_left + g_right;
    return 0.5 * (g_left * g_left / (h_left + lambda) + g_right * g_right / (h_right + lambda) -
                  g * g / (h_left + h_right + lambda)) -
           gamma;
}

SortedColumns::SortedColumns(const FeatureMatrix& x) : rows_{x.rows()}, order_(x.rows() * x.cols()) {
    for (std::size_t f = 0; f < x.cols(); ++f) {
        auto col = std::span<std::uint32_t>(order_).subspan(f * rows_, rows_);
        std::iota(col.begin(), col.end(), std::uint32_t{0});
        std::stable_sort(col.begin(), col.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return x(a, f) < x(b, f); });
    }
}

std::vector<SplitCandidate> find_level_splits_serial(const LevelSplitInput& in) {
    const std::size_t slots = in.node_g.size();
    std::vector<SplitCandidate> best(slots);
    std::vector<SplitCandidate> feature_best(slots);
    std::vector<SlotScan> state(slots);
    for (std::size_t f = 0; f < in.x->cols(); ++f) {
        scan_feature(in, f, state, feature_best);
        merge_candidates(best, feature_best);
    }
    return best;
}

std::vector<SplitCandidate> find_level_splits(const LevelSplitInput& in, int threads) {
    const std::size_t slots = in.node_g.size();
    const std::size_t features = in.x->cols();
    std::vector<std::vector<SplitCandidate>> per_feature(features, std::vector<SplitCandidate>(slots));
    const auto nf = static_cast<std::ptrdiff_t>(features);
#pragma omp parallel num_threads(threads)
    {
        std::vector<SlotScan> state(slots);
#pragma omp for schedule(dynamic, 4)
        for (std::ptrdiff_t f = 0; f < nf; ++f) {
            scan_feature(in, static_cast<std::size_t>(f), state, per_feature[static_cast<std::size_t>(f)]);
        }
    }
    std::vector<SplitCandidate> best(slots);
    for (const auto& candidates : per_feature) {
        merge_candidates(best, candidates);
    }
    return best;
}

TreeEnsemble train_gbdt(const FeatureMatrix& x, std::span<const std::uint32_t> y,
                        std::vector<std::string> classes, const GbdtConfig& cfg, int threads) {
    cfg.validate();
    check_training_data(x, y, classes.size());
    const std::size_t k = classes.size();
    const std::size_t n = x.rows();
    TreeEnsemble ensemble{std::move(classes), x.cols(), cfg};
    const SortedColumns sorted{x};

    std::vector<double> scores(n * k, cfg.base_score);
    std::vector<double> grad(k * n);
    std::vector<double> hess(k * n);
    for (std::uint32_t round = 0; round < cfg.rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto p = softmax(std::span<const double>(scores).subspan(i * k, k));
            for (std::size_t c = 0; c < k; ++c) {
                grad[c * n + i] = p[c] - (y[i] == c ? 1.0 : 0.0);
                hess[c * n + i] = std::max(p[c] * (1.0 - p[c]), kMinHessian);
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            ensemble.trees().push_back(grow_tree(x, sorted, std::span<const double>(grad).subspan(c * n, n),
                                                 std::span<const double>(hess).subspan(c * n, n), cfg,
                                                 threads));
        }
        for (std::size_t c = 0; c < k; ++c) {
            const auto& tree = ensemble.trees()[round * k + c];
            for (std::size_t i = 0; i < n; ++i) {
                scores[i * k + c] += tree.evaluate(x.row(i));
            }
        }
        const double loss = mean_logloss(scores, y, k);
        if (!std::isfinite(loss)) {
            throw NumericalError("boosting diverged in round " + std::to_string(round + 1));
        }
        ensemble.train_loss().push_back(loss);
    }
    return ensemble;
}

} // namespace mgt
