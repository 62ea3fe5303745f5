#pragma once

#include "mgt/corpus.hpp"
#include "mgt/models.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mgt {

/// Rows are gold classes, columns predicted classes.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::vector<std::string> classes);

    const std::vector<std::string>& classes() const noexcept { return classes_; }
    std::size_t num_classes() const noexcept { return classes_.size(); }
    std::uint64_t count(std::size_t gold, std::size_t pred) const { return counts_[gold * classes_.size() + pred]; }
    std::uint64_t total() const noexcept { return total_; }
    std::uint64_t row_total(std::size_t gold) const;
    std::uint64_t column_total(std::size_t pred) const;

    void add(std::size_t gold, std::size_t pred, std::uint64_t n = 1);

private:
    std::vector<std::string> classes_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_{0};
};

ConfusionMatrix confusion(std::span<const std::uint32_t> gold, std::span<const std::uint32_t> pred,
                          std::vector<std::string> classes);

/// F1 per class in class order. A class with no predictions, no gold rows, or P+R = 0 scores 0.
std::vector<double> per_class_f1(const ConfusionMatrix& cm);
double macro_f1(const ConfusionMatrix& cm);
double accuracy(const ConfusionMatrix& cm);
/// 1 - recall per class; classes absent from gold are omitted.
std::map<std::string, double> per_class_error(const ConfusionMatrix& cm);

struct EvalReport {
    std::map<std::string, double> per_class_f1;
    double macro_f1{0.0};
    double accuracy{0.0};
    std::map<std::string, double> per_class_error;
    std::optional<Language> language;
    std::size_t n_test{0};
    ConfusionMatrix matrix{{}};
};

EvalReport make_report(const ConfusionMatrix& cm, std::optional<Language> language = std::nullopt);

/// "key: value" lines, starting with the report format version.
void write_report_text(std::ostream& out, const EvalReport& report);
/// Long format: scope, metric, class, value.
void write_report_tsv(std::ostream& out, std::span<const EvalReport> reports);

/// Stratified, nested sample of `per_language_n` documents from each language.
/// For a fixed seed the sample for n is a prefix (per language) of the sample for any larger n.
Corpus fewshot_sample(const Corpus& en, const Corpus& es, std::size_t per_language_n, std::uint64_t seed);

/// (1/n) sum of per-example losses.
double mean_loss(std::span<const double> per_example_losses);

struct FewShotPoint {
    std::size_t total_samples{0};
    std::size_t per_language_samples{0};
    EvalReport joint;
    EvalReport en;
    EvalReport es;
    double mean_loss{0.0};  ///< mean cross-entropy on the joint evaluation set
};

struct FewShotReport {
    std::vector<FewShotPoint> points;
    std::uint64_t rng_seed{0};
};

inline const std::vector<std::size_t> kDefaultFewShotSizes{200, 400, 600, 800, 1000};

/// Trains a fresh model on `train` and returns one prediction per document of `test`.
using FewShotRunner =
    std::function<std::vector<Prediction>(const Corpus& train, const Corpus& test, std::uint64_t seed)>;

/// One point per total size (split evenly between languages), each trained from scratch.
FewShotReport fewshot_curve(const Corpus& en_train, const Corpus& es_train, std::span<const std::size_t> sizes,
                            const FewShotRunner& runner, const Corpus& en_test, const Corpus& es_test,
                            std::uint64_t seed);

/// Columns total_n, per_lang_n, macro_f1_en, macro_f1_es, macro_f1_joint, mean_loss.
void write_fewshot_tsv(std::ostream& out, const FewShotReport& report);

/// Per-class error rates of several named models: model, class, error, n_gold.
void write_error_csv(std::ostream& out, std::span<const std::pair<std::string, EvalReport>> models);
/// Grouped bar chart of the same data.
void write_error_svg(std::ostream& out, std::span<const std::pair<std::string, EvalReport>> models);

} // namespace mgt
