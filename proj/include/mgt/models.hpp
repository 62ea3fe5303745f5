#pragma once

#include "mgt/matrix.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mgt {

struct Prediction {
    std::vector<double> probabilities;
    std::size_t label{0};  ///< index of the most probable class
};

/// Numerically stable softmax; probabilities sum to 1 within rounding.
std::vector<double> softmax(std::span<const double> scores);

struct LinearConfig {
    std::uint32_t epochs{100};
    std::uint32_t batch_size{32};
    double learning_rate{0.1};
    double l2_lambda{1e-4};
    std::uint64_t rng_seed{0};

    void validate() const;
};

struct GbdtConfig {
    std::uint32_t rounds{100};
    std::uint32_t max_depth{6};
    double eta{0.3};
    double lambda{1.0};
    double gamma{0.0};
    double min_child_weight{1.0};
    double base_score{0.0};
    std::uint64_t rng_seed{0};

    void validate() const;
};

struct TrainConfig {
    LinearConfig linear;
    GbdtConfig gbdt;
};

/// Softmax regression: scores = W x + b, W is K x D row-major.
class LinearModel {
public:
    LinearModel() = default;
    LinearModel(std::vector<std::string> classes, std::size_t dim, double l2_lambda);

    std::size_t num_classes() const noexcept { return classes_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    const std::vector<std::string>& classes() const noexcept { return classes_; }

    std::span<double> weights() noexcept { return weights_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<double> bias() noexcept { return bias_; }
    std::span<const double> bias() const noexcept { return bias_; }

    double l2_lambda() const noexcept { return l2_lambda_; }
    LinearConfig& config() noexcept { return config_; }
    const LinearConfig& config() const noexcept { return config_; }
    std::vector<double>& epoch_loss() noexcept { return epoch_loss_; }
    const std::vector<double>& epoch_loss() const noexcept { return epoch_loss_; }

    std::vector<double> scores(std::span<const double> x) const;
    Prediction predict(std::span<const double> x) const;

private:
    std::vector<std::string> classes_;
    std::size_t dim_{0};
    std::vector<double> weights_;
    std::vector<double> bias_;
    double l2_lambda_{0.0};
    LinearConfig config_;
    std::vector<double> epoch_loss_;
};

struct LossGrad {
    double loss{0.0};
    std::vector<double> weight_grad;  ///< K x D
    std::vector<double> bias_grad;    ///< K
};

/// Mean cross-entropy plus (lambda/2)||W||^2 and its analytic gradient. The bias is
/// not regularised.
LossGrad linear_loss_grad(const LinearModel& model, const FeatureMatrix& x,
                          std::span<const std::uint32_t> y);

/// Mini-batch gradient descent; the L2 term is applied as an implicit (proximal) step
/// so the update stays stable for any lambda. Deterministic in cfg.rng_seed.
LinearModel train_linear(const FeatureMatrix& x, std::span<const std::uint32_t> y,
                         std::vector<std::string> classes, const LinearConfig& cfg);

struct TreeNode {
    std::int32_t feature{-1};  ///< -1 marks a leaf
    double threshold{0.0};     ///< rows with x[feature] < threshold go left
    std::uint32_t left{0};
    std::uint32_t right{0};
    double value{0.0};         ///< leaf output, already scaled by eta

    bool is_leaf() const noexcept { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  ///< nodes[0] is the root

    std::size_t leaf_index(std::span<const double> x) const;
    double evaluate(std::span<const double> x) const { return nodes[leaf_index(x)].value; }
};

/// Second-order boosted trees for softmax cross-entropy. Trees are stored round-major:
/// trees()[round * K + class].
class TreeEnsemble {
public:
    TreeEnsemble() = default;
    TreeEnsemble(std::vector<std::string> classes, std::size_t dim, GbdtConfig config);

    std::size_t num_classes() const noexcept { return classes_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t rounds() const noexcept { return classes_.empty() ? 0 : trees_.size() / classes_.size(); }
    const std::vector<std::string>& classes() const noexcept { return classes_; }
    const GbdtConfig& config() const noexcept { return config_; }

    std::vector<RegressionTree>& trees() noexcept { return trees_; }
    const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
    const RegressionTree& tree(std::size_t round, std::size_t cls) const {
        return trees_[round * classes_.size() + cls];
    }
    std::vector<double>& train_loss() noexcept { return train_loss_; }
    const std::vector<double>& train_loss() const noexcept { return train_loss_; }

    /// base_score plus the outputs of the first `rounds` rounds (all rounds by default).
    std::vector<double> raw_scores(std::span<const double> x, std::size_t rounds = SIZE_MAX) const;
    Prediction predict(std::span<const double> x) const;

private:
    std::vector<std::string> classes_;
    std::size_t dim_{0};
    GbdtConfig config_;
    std::vector<RegressionTree> trees_;
    std::vector<double> train_loss_;
};

/// 1/2 [GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l)] - gamma
double split_gain(double g_left, double h_left, double g_right, double h_right, double lambda,
                  double gamma) noexcept;

/// Feature columns presorted by value (ties by row index), shared by every tree.
class SortedColumns {
public:
    explicit SortedColumns(const FeatureMatrix& x);
    std::span<const std::uint32_t> column(std::size_t feature) const {
        return std::span<const std::uint32_t>(order_).subspan(feature * rows_, rows_);
    }

private:
    std::size_t rows_{0};
    std::vector<std::uint32_t> order_;
};

struct SplitCandidate {
    double gain{0.0};
    std::int32_t feature{-1};
    double threshold{0.0};
    double g_left{0.0};
    double h_left{0.0};

    bool valid() const noexcept { return feature >= 0; }
};

/// Best exact split of every open node in one tree level.
/// `node_of_row[i]` is the open-node slot of row i, or -1 when the row sits in a closed leaf.
/// Candidates must beat gain 0 and leave min_child_weight hessian on both sides. Ties go to
/// the lower feature index, then the lower threshold.
struct LevelSplitInput {
    const FeatureMatrix* x{nullptr};
    const SortedColumns* sorted{nullptr};
    std::span<const std::int32_t> node_of_row;
    std::span<const double> grad;
    std::span<const double> hess;
    std::span<const double> node_g;  ///< gradient sum per open node
    std::span<const double> node_h;  ///< hessian sum per open node
    double lambda{1.0};
    double gamma{0.0};
    double min_child_weight{1.0};
};

/// OpenMP kernel parallel over features.
std::vector<SplitCandidate> find_level_splits(const LevelSplitInput& in, int threads);

/// Serial reference for find_level_splits.
std::vector<SplitCandidate> find_level_splits_serial(const LevelSplitInput& in);

/// `threads` only parallelises the split search; the result does not depend on it.
TreeEnsemble train_gbdt(const FeatureMatrix& x, std::span<const std::uint32_t> y,
                        std::vector<std::string> classes, const GbdtConfig& cfg, int threads = 1);

using Classifier = std::variant<LinearModel, TreeEnsemble>;

Prediction predict(const Classifier& model, std::span<const double> x);
std::size_t input_dim(const Classifier& model);
const std::vector<std::string>& class_list(const Classifier& model);

/// OpenMP kernel over rows; output follows row order.
std::vector<Prediction> predict_batch(const Classifier& model, const FeatureMatrix& x, int threads);

/// Serial reference for predict_batch.
std::vector<Prediction> predict_batch_serial(const Classifier& model, const FeatureMatrix& x);

/// Shared input checks for both trainers: shapes, label range, at least two classes.
void check_training_data(const FeatureMatrix& x, std::span<const std::uint32_t> y,
                         std::size_t num_classes);

} // namespace mgt
