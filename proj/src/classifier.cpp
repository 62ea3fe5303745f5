#include "mgt/errors.hpp"
#include "mgt/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mgt {

void FeatureMatrix::push_row(std::span<const double> values) {
    if (rows_ == 0 && data_.empty()) {
        cols_ = values.size();
    } else if (values.size() != cols_) {
        throw ValidationError("feature row has " + std::to_string(values.size()) +
                              " columns, expected " + std::to_string(cols_));
    }
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

std::vector<double> softmax(std::span<const double> scores) {
    std::vector<double> p(scores.begin(), scores.end());
    if (p.empty()) {
        return p;
    }
    const double max = *std::max_element(p.begin(), p.end());
    double sum = 0.0;
    for (auto& v : p) {
        v = std::exp(v - max);
        sum += v;
    }
    for (auto& v : p) {
        v /= sum;
    }
    return p;
}

void check_training_data(const FeatureMatrix& x, std::span<const std::uint32_t> y,
                         std::size_t num_classes) {
    if (x.rows() != y.size()) {
        throw ValidationError("feature rows (" + std::to_string(x.rows()) + ") and labels (" +
                              std::to_string(y.size()) + ") differ in length");
    }
    if (x.rows() == 0 || x.cols() == 0) {
        throw ValidationError("empty training matrix");
    }
    if (num_classes < 2) {
        throw ValidationError("a classifier needs at least two classes");
    }
    std::vector<bool> seen(num_classes, false);
    for (auto label : y) {
        if (label >= num_classes) {
            throw ValidationError("label index " + std::to_string(label) + " out of range");
        }
        seen[label] = true;
    }
    if (std::count(seen.begin(), seen.end(), true) < 2) {
        throw ValidationError("training data contains fewer than 2 classes");
    }
    for (double v : x.data()) {
        if (!std::isfinite(v)) {
            throw ValidationError("training matrix contains a non-finite value");
        }
    }
}

Prediction predict(const Classifier& model, std::span<const double> x) {
    return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

std::size_t input_dim(const Classifier& model) {
    return std::visit([](const auto& m) { return m.dim(); }, model);
}

const std::vector<std::string>& class_list(const Classifier& model) {
    return std::visit([](const auto& m) -> const std::vector<std::string>& { return m.classes(); }, model);
}

std::vector<Prediction> predict_batch(const Classifier& model, const FeatureMatrix& x, int threads) {
    if (x.rows() > 0 && x.cols() != input_dim(model)) {
        throw ValidationError("input has " + std::to_string(x.cols()) + " features, model expects " +
                              std::to_string(input_dim(model)));
    }
    std::vector<Prediction> out(x.rows());
    const auto n = static_cast<std::ptrdiff_t>(x.rows());
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = predict(model, x.row(static_cast<std::size_t>(i)));
    }
    return out;
}

std::vector<Prediction> predict_batch_serial(const Classifier& model, const FeatureMatrix& x) {
    std::vector<Prediction> out;
    out.reserve(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        out.push_back(predict(model, x.row(i)));
    }
    return out;
}

} // namespace mgt
