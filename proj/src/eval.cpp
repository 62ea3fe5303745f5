#include "mgt/eval.hpp"

#include "mgt/errors.hpp"
#include "mgt/log.hpp"
#include "mgt/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace mgt {
namespace {

constexpr std::string_view kReportFormat = "mgt-eval-report/1";

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string scope_name(const EvalReport& r) {
    return r.language ? std::string(to_string(*r.language)) : std::string("joint");
}

std::vector<std::size_t> class_members(const Corpus& corpus, std::size_t cls) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        if (corpus.documents[i].label.value == cls) {
            out.push_back(i);
        }
    }
    return out;
}

/// Stratified ordering of one language's documents whose every prefix is balanced
/// to within one document of the class proportions.
std::vector<std::size_t> nested_order(const Corpus& corpus, Language lang, std::size_t n,
                                      std::uint64_t seed) {
    const std::size_t k = class_count(corpus.task);
    std::vector<std::vector<std::size_t>> pools(k);
    for (std::size_t c = 0; c < k; ++c) {
        pools[c] = class_members(corpus, c);
        if (pools[c].empty()) {
            throw InsufficientDataError("the " + std::string(to_string(lang)) + " corpus has no documents of class " +
                                        std::string(class_names(corpus.task)[c]));
        }
        Rng rng{mix_seed(seed, static_cast<std::uint64_t>(lang) * 64 + c)};
        rng.shuffle(std::span<std::size_t>(pools[c]));
    }
    const double total = static_cast<double>(corpus.size());
    std::vector<std::size_t> taken(k, 0);
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        std::size_t pick = k;
        double best = -1e300;
        for (std::size_t c = 0; c < k; ++c) {
            if (taken[c] == pools[c].size()) {
                continue;
            }
            const double share = static_cast<double>(pools[c].size()) / total;
            const double deficit = share * static_cast<double>(t + 1) - static_cast<double>(taken[c]);
            if (deficit > best) {
                best = deficit;
                pick = c;
            }
        }
        order.push_back(pools[pick][taken[pick]++]);
    }
    return order;
}

void check_language(const Corpus& corpus, Language lang) {
    for (const auto& doc : corpus.documents) {
        if (doc.language != lang) {
            throw ValidationError("document " + doc.id + " is not tagged " + std::string(to_string(lang)));
        }
    }
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

} // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes)
    : classes_{std::move(classes)}, counts_(classes_.size() * classes_.size(), 0) {}

std::uint64_t ConfusionMatrix::row_total(std::size_t gold) const {
    std::uint64_t s = 0;
    for (std::size_t p = 0; p < classes_.size(); ++p) {
        s += count(gold, p);
    }
    return s;
}

std::uint64_t ConfusionMatrix::column_total(std::size_t pred) const {
    std::uint64_t s = 0;
    for (std::size_t g = 0; g < classes_.size(); ++g) {
        s += count(g, pred);
    }
    return s;
}

void ConfusionMatrix::add(std::size_t gold, std::size_t pred, std::uint64_t n) {
    counts_[gold * classes_.size() + pred] += n;
    total_ += n;
}

ConfusionMatrix confusion(std::span<const std::uint32_t> gold, std::span<const std::uint32_t> pred,
                          std::vector<std::string> classes) {
    if (gold.size() != pred.size()) {
        throw ValidationError("gold and predicted label lists differ in length");
    }
    if (gold.empty()) {
        throw ValidationError("cannot build a confusion matrix from zero predictions");
    }
    ConfusionMatrix cm{std::move(classes)};
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] >= cm.num_classes() || pred[i] >= cm.num_classes()) {
            throw ValidationError("label index outside the class list");
        }
        cm.add(gold[i], pred[i]);
    }
    return cm;
}

std::vector<double> per_class_f1(const ConfusionMatrix& cm) {
    std::vector<double> f1(cm.num_classes(), 0.0);
    for (std::size_t c = 0; c < cm.num_classes(); ++c) {
        const double tp = static_cast<double>(cm.count(c, c));
        const double predicted = static_cast<double>(cm.column_total(c));
        const double actual = static_cast<double>(cm.row_total(c));
        if (predicted == 0.0 || actual == 0.0) {
            continue;
        }
        const double precision = tp / predicted;
        const double recall = tp / actual;
        if (precision + recall == 0.0) {
            continue;
        }
        f1[c] = 2.0 * precision * recall / (precision + recall);
    }
    return f1;
}

double macro_f1(const ConfusionMatrix& cm) {
    const auto f1 = per_class_f1(cm);
    if (f1.empty()) {
        throw ValidationError("macro-F1 of an empty class list");
    }
    double sum = 0.0;
    for (double v : f1) {
        sum += v;
    }
    return sum / static_cast<double>(f1.size());
}

double accuracy(const ConfusionMatrix& cm) {
    if (cm.total() == 0) {
        throw ValidationError("accuracy of an empty confusion matrix");
    }
    std::uint64_t trace = 0;
    for (std::size_t c = 0; c < cm.num_classes(); ++c) {
        trace += cm.count(c, c);
    }
    return static_cast<double>(trace) / static_cast<double>(cm.total());
}

std::map<std::string, double> per_class_error(const ConfusionMatrix& cm) {
    std::map<std::string, double> out;
    for (std::size_t c = 0; c < cm.num_classes(); ++c) {
        const auto row = cm.row_total(c);
        if (row == 0) {
            continue;
        }
        out[cm.classes()[c]] = static_cast<double>(row - cm.count(c, c)) / static_cast<double>(row);
    }
    return out;
}

EvalReport make_report(const ConfusionMatrix& cm, std::optional<Language> language) {
    EvalReport r;
    const auto f1 = per_class_f1(cm);
    for (std::size_t c = 0; c < cm.num_classes(); ++c) {
        r.per_class_f1[cm.classes()[c]] = f1[c];
    }
    r.macro_f1 = macro_f1(cm);
    r.accuracy = accuracy(cm);
    r.per_class_error = per_class_error(cm);
    r.language = language;
    r.n_test = static_cast<std::size_t>(cm.total());
    r.matrix = cm;
    return r;
}

void write_report_text(std::ostream& out, const EvalReport& report) {
    out << "format: " << kReportFormat << '\n';
    out << "scope: " << scope_name(report) << '\n';
    out << "n_test: " << report.n_test << '\n';
    out << "accuracy: " << fixed(report.accuracy) << '\n';
    out << "macro_f1: " << fixed(report.macro_f1) << '\n';
    for (const auto& name : report.matrix.classes()) {
        out << "f1." << name << ": " << fixed(report.per_class_f1.at(name)) << '\n';
    }
    for (const auto& [name, err] : report.per_class_error) {
        out << "error." << name << ": " << fixed(err) << '\n';
    }
    const auto& cm = report.matrix;
    for (std::size_t g = 0; g < cm.num_classes(); ++g) {
        out << "confusion." << cm.classes()[g] << ':';
        for (std::size_t p = 0; p < cm.num_classes(); ++p) {
            out << ' ' << cm.count(g, p);
        }
        out << '\n';
    }
}

void write_report_tsv(std::ostream& out, std::span<const EvalReport> reports) {
    out << "scope\tmetric\tclass\tvalue\n";
    for (const auto& r : reports) {
        const auto scope = scope_name(r);
        out << scope << "\tn_test\t-\t" << r.n_test << '\n';
        out << scope << "\taccuracy\t-\t" << fixed(r.accuracy) << '\n';
        out << scope << "\tmacro_f1\t-\t" << fixed(r.macro_f1) << '\n';
        for (const auto& name : r.matrix.classes()) {
            out << scope << "\tf1\t" << name << '\t' << fixed(r.per_class_f1.at(name)) << '\n';
        }
        for (const auto& [name, err] : r.per_class_error) {
            out << scope << "\terror\t" << name << '\t' << fixed(err) << '\n';
        }
    }
}

Corpus fewshot_sample(const Corpus& en, const Corpus& es, std::size_t per_language_n, std::uint64_t seed) {
    if (en.task != es.task) {
        throw ValidationError("few-shot corpora belong to different tasks");
    }
    if (per_language_n == 0) {
        throw ValidationError("few-shot sample size must be positive");
    }
    if (per_language_n % 100 != 0 || per_language_n > 500) {
        log_warning("few-shot size " + std::to_string(per_language_n) +
                    " per language is outside the 100..500 step 100 protocol");
    }
    check_language(en, Language::en);
    check_language(es, Language::es);
    for (const auto* corpus : {&en, &es}) {
        if (corpus->size() < per_language_n) {
            throw InsufficientDataError("few-shot sampling needs " + std::to_string(per_language_n) +
                                        " documents per language, corpus has " + std::to_string(corpus->size()));
        }
    }
    Corpus out;
    out.task = en.task;
    out.split_tag = SplitTag::train;
    for (const auto& [corpus, lang] : {std::pair{&en, Language::en}, std::pair{&es, Language::es}}) {
        for (auto i : nested_order(*corpus, lang, per_language_n, seed)) {
            out.documents.push_back(corpus->documents[i]);
        }
    }
    return out;
}

double mean_loss(std::span<const double> per_example_losses) {
    if (per_example_losses.empty()) {
        throw ValidationError("mean loss of an empty list");
    }
    double sum = 0.0;
    for (double v : per_example_losses) {
        if (!(v >= 0.0)) {
            throw ValidationError("per-example losses must be non-negative");
        }
        sum += v;
    }
    return sum / static_cast<double>(per_example_losses.size());
}

FewShotReport fewshot_curve(const Corpus& en_train, const Corpus& es_train, std::span<const std::size_t> sizes,
                            const FewShotRunner& runner, const Corpus& en_test, const Corpus& es_test,
                            std::uint64_t seed) {
    if (sizes.empty()) {
        throw ValidationError("few-shot curve needs at least one size");
    }
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] == 0 || sizes[i] % 2 != 0) {
            throw ValidationError("few-shot totals must be positive and even (split across two languages)");
        }
        if (i > 0 && sizes[i] <= sizes[i - 1]) {
            throw ValidationError("few-shot totals must be strictly increasing");
        }
    }
    check_language(en_test, Language::en);
    check_language(es_test, Language::es);
    const Corpus test = merge_bilingual(en_test, es_test);
    if (test.empty()) {
        throw InsufficientDataError("few-shot evaluation set is empty");
    }
    const auto classes_view = class_names(test.task);
    const std::vector<std::string> classes(classes_view.begin(), classes_view.end());

    FewShotReport report;
    report.rng_seed = seed;
    for (auto total : sizes) {
        const std::size_t per_lang = total / 2;
        const Corpus sample = fewshot_sample(en_train, es_train, per_lang, seed);
        const auto predictions = runner(sample, test, seed);
        if (predictions.size() != test.size()) {
            throw ValidationError("few-shot runner returned the wrong number of predictions");
        }
        std::array<std::vector<std::uint32_t>, 2> gold_by_lang;
        std::array<std::vector<std::uint32_t>, 2> pred_by_lang;
        std::vector<std::uint32_t> gold;
        std::vector<std::uint32_t> pred;
        std::vector<double> losses;
        for (std::size_t i = 0; i < test.size(); ++i) {
            const auto& doc = test.documents[i];
            const auto g = static_cast<std::uint32_t>(doc.label.value);
            const auto p = static_cast<std::uint32_t>(predictions[i].label);
            gold.push_back(g);
            pred.push_back(p);
            gold_by_lang[static_cast<std::size_t>(doc.language)].push_back(g);
            pred_by_lang[static_cast<std::size_t>(doc.language)].push_back(p);
            losses.push_back(-std::log(std::max(predictions[i].probabilities.at(g), 1e-15)));
        }
        FewShotPoint point;
        point.total_samples = total;
        point.per_language_samples = per_lang;
        point.joint = make_report(confusion(gold, pred, classes));
        for (std::size_t l = 0; l < 2; ++l) {
            if (gold_by_lang[l].empty()) {
                continue;
            }
            auto r = make_report(confusion(gold_by_lang[l], pred_by_lang[l], classes), static_cast<Language>(l));
            (l == 0 ? point.en : point.es) = std::move(r);
        }
        point.mean_loss = mean_loss(losses);
        report.points.push_back(std::move(point));
    }
    return report;
}

void write_fewshot_tsv(std::ostream& out, const FewShotReport& report) {
    out << "total_n\tper_lang_n\tmacro_f1_en\tmacro_f1_es\tmacro_f1_joint\tmean_loss\n";
    for (const auto& p : report.points) {
        out << p.total_samples << '\t' << p.per_language_samples << '\t' << fixed(p.en.macro_f1) << '\t'
            << fixed(p.es.macro_f1) << '\t' << fixed(p.joint.macro_f1) << '\t' << fixed(p.mean_loss) << '\n';
    }
}

void write_error_csv(std::ostream& out, std::span<const std::pair<std::string, EvalReport>> models) {
    out << "model,class,error,n_gold\n";
    for (const auto& [name, report] : models) {
        const auto& cm = report.matrix;
        for (std::size_t c = 0; c < cm.num_classes(); ++c) {
            const auto it = report.per_class_error.find(cm.classes()[c]);
            if (it == report.per_class_error.end()) {
                continue;
            }
            out << name << ',' << it->first << ',' << fixed(it->second) << ',' << cm.row_total(c) << '\n';
        }
    }
}

void write_error_svg(std::ostream& out, std::span<const std::pair<std::string, EvalReport>> models) {
    std::vector<std::string> classes;
    for (const auto& [name, report] : models) {
        for (const auto& [cls, err] : report.per_class_error) {
            if (std::find(classes.begin(), classes.end(), cls) == classes.end()) {
                classes.push_back(cls);
            }
        }
    }
    std::sort(classes.begin(), classes.end());
    constexpr std::array<std::string_view, 6> kColors{"#4e79a7", "#f28e2b", "#59a14f",
                                                      "#e15759", "#76b7b2", "#edc948"};
    const double bar = 18.0;
    const double gap = 24.0;
    const double group = bar * static_cast<double>(std::max<std::size_t>(models.size(), 1)) + gap;
    const double left = 60.0;
    const double top = 30.0;
    const double height = 240.0;
    const double width = left + group * static_cast<double>(classes.size()) + 160.0;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0) << "\" height=\""
        << fixed(top + height + 60.0, 0) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<text x=\"" << fixed(left, 0) << "\" y=\"18\">Per-class error rate (%)</text>\n";
    for (int tick = 0; tick <= 100; tick += 25) {
        const double y = top + height * (1.0 - tick / 100.0);
        out << "<line x1=\"" << fixed(left, 0) << "\" x2=\"" << fixed(width - 160.0, 0) << "\" y1=\"" << fixed(y, 1)
            << "\" y2=\"" << fixed(y, 1) << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << fixed(left - 8.0, 0) << "\" y=\"" << fixed(y + 4.0, 1)
            << "\" text-anchor=\"end\">" << tick << "</text>\n";
    }
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const double x0 = left + gap / 2.0 + group * static_cast<double>(c);
        for (std::size_t m = 0; m < models.size(); ++m) {
            const auto& errors = models[m].second.per_class_error;
            const auto it = errors.find(classes[c]);
            if (it == errors.end()) {
                continue;
            }
            const double h = height * it->second;
            out << "<rect x=\"" << fixed(x0 + bar * static_cast<double>(m), 1) << "\" y=\""
                << fixed(top + height - h, 1) << "\" width=\"" << fixed(bar - 2.0, 1) << "\" height=\"" << fixed(h, 1)
                << "\" fill=\"" << kColors[m % kColors.size()] << "\"><title>" << xml_escape(models[m].first) << ' '
                << xml_escape(classes[c]) << ": " << fixed(100.0 * it->second, 2) << "%</title></rect>\n";
        }
        out << "<text x=\"" << fixed(x0 + bar * static_cast<double>(models.size()) / 2.0, 1) << "\" y=\""
            << fixed(top + height + 18.0, 1) << "\" text-anchor=\"middle\">" << xml_escape(classes[c]) << "</text>\n";
    }
    for (std::size_t m = 0; m < models.size(); ++m) {
        const double y = top + 16.0 * static_cast<double>(m);
        out << "<rect x=\"" << fixed(width - 150.0, 0) << "\" y=\"" << fixed(y, 0)
            << "\" width=\"12\" height=\"12\" fill=\"" << kColors[m % kColors.size()] << "\"/>\n";
        out << "<text x=\"" << fixed(width - 132.0, 0) << "\" y=\"" << fixed(y + 10.0, 0) << "\">"
            << xml_escape(models[m].first) << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace mgt
