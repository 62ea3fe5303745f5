#include "doctest.h"

#include "oracles.hpp"

#include "mgt/errors.hpp"
#include "mgt/eval.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace mgt;

namespace {

const std::vector<std::string> kDet{"generated", "human"};

std::vector<std::string> letters(std::size_t k) {
    std::vector<std::string> out;
    for (std::size_t c = 0; c < k; ++c) {
        out.push_back(std::string(1, static_cast<char>('A' + c)));
    }
    return out;
}

/// `n` documents of one language; every third one is generated.
Corpus language_corpus(Language lang, std::size_t n) {
    Corpus c;
    c.task = Task::detection;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t label = i % 3 == 0 ? 0 : 1;
        c.documents.push_back(Document{std::string(to_string(lang)) + "-" + std::to_string(i), lang,
                                       TaskLabel{Task::detection, label}, "text " + std::to_string(i), ""});
    }
    return c;
}

std::vector<std::string> ids(const Corpus& c, Language lang) {
    std::vector<std::string> out;
    for (const auto& d : c.documents) {
        if (d.language == lang) {
            out.push_back(d.id);
        }
    }
    return out;
}

} // namespace

TEST_CASE("metrics on the worked example") {
    // classes: generated = 0, human = 1
    const std::vector<std::uint32_t> gold{1, 1, 0, 0};
    const std::vector<std::uint32_t> pred{1, 0, 0, 0};
    const auto cm = confusion(gold, pred, kDet);
    const auto f1 = per_class_f1(cm);
    CHECK(f1[0] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(f1[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(macro_f1(cm) == doctest::Approx(11.0 / 15.0).epsilon(1e-15));
    CHECK(accuracy(cm) == 0.75);
    const auto err = per_class_error(cm);
    CHECK(err.at("human") == 0.5);
    CHECK(err.at("generated") == 0.0);
    CHECK(cm.count(1, 0) == 1);
    CHECK(cm.row_total(1) == 2);
    CHECK(cm.column_total(0) == 3);
}

TEST_CASE("degenerate classes score zero F1 and have no error entry") {
    // class C never appears, class B is never predicted
    const std::vector<std::uint32_t> gold{0, 0, 1, 1};
    const std::vector<std::uint32_t> pred{0, 0, 0, 0};
    const auto cm = confusion(gold, pred, letters(3));
    const auto f1 = per_class_f1(cm);
    CHECK(f1[1] == 0.0);
    CHECK(f1[2] == 0.0);
    CHECK(f1[0] == doctest::Approx(2.0 / 3.0));
    CHECK(macro_f1(cm) == doctest::Approx(2.0 / 9.0));
    const auto err = per_class_error(cm);
    CHECK(err.count("C") == 0);
    CHECK(err.at("B") == 1.0);

    CHECK_THROWS_AS(confusion(std::vector<std::uint32_t>{}, std::vector<std::uint32_t>{}, kDet), ValidationError);
    CHECK_THROWS_AS(confusion(std::vector<std::uint32_t>{0}, std::vector<std::uint32_t>{0, 1}, kDet), ValidationError);
    CHECK_THROWS_AS(confusion(std::vector<std::uint32_t>{2}, std::vector<std::uint32_t>{0}, kDet), ValidationError);
}

TEST_CASE("metrics agree with an independent tally") {
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t k = 2 + gen() % 5;
        const std::size_t n = 1 + gen() % 40;
        std::vector<std::uint32_t> gold(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            gold[i] = static_cast<std::uint32_t>(gen() % k);
            // bias towards correct predictions so both regimes appear
            pred[i] = gen() % 3 == 0 ? static_cast<std::uint32_t>(gen() % k) : gold[i];
        }
        const auto cm = confusion(gold, pred, letters(k));
        const auto want = oracle::metrics(gold, pred, k);
        const auto f1 = per_class_f1(cm);
        const auto err = per_class_error(cm);
        for (std::size_t c = 0; c < k; ++c) {
            REQUIRE(std::abs(f1[c] - want.f1[c]) <= 1e-12);
            if (want.error[c] < 0.0) {
                REQUIRE(err.count(letters(k)[c]) == 0);
            } else {
                REQUIRE(std::abs(err.at(letters(k)[c]) - want.error[c]) <= 1e-12);
            }
        }
        REQUIRE(std::abs(macro_f1(cm) - want.macro_f1) <= 1e-12);
        REQUIRE(std::abs(accuracy(cm) - want.accuracy) <= 1e-12);
    }
}

TEST_CASE("metric identities") {
    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t k = 2 + gen() % 4;
        const std::size_t n = 5 + gen() % 60;
        std::vector<std::uint32_t> gold(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            gold[i] = static_cast<std::uint32_t>(gen() % k);
            pred[i] = static_cast<std::uint32_t>(gen() % k);
        }
        const auto cm = confusion(gold, pred, letters(k));

        // accuracy weights per-class recall by class size
        double weighted = 0.0;
        for (const auto& [cls, e] : per_class_error(cm)) {
            const auto c = static_cast<std::size_t>(cls[0] - 'A');
            const double recall = static_cast<double>(cm.count(c, c)) / static_cast<double>(cm.row_total(c));
            CHECK(e + recall == doctest::Approx(1.0).epsilon(1e-15));
            weighted += recall * static_cast<double>(cm.row_total(c));
        }
        CHECK(accuracy(cm) == doctest::Approx(weighted / static_cast<double>(n)).epsilon(1e-12));

        const auto f1 = per_class_f1(cm);
        const double lo = *std::min_element(f1.begin(), f1.end());
        const double hi = *std::max_element(f1.begin(), f1.end());
        CHECK(macro_f1(cm) >= lo - 1e-15);
        CHECK(macro_f1(cm) <= hi + 1e-15);

        if (k == 2) {
            // swapping gold and prediction transposes the matrix; F1 is symmetric in P and R
            const auto swapped = per_class_f1(confusion(pred, gold, letters(2)));
            CHECK(swapped[0] == doctest::Approx(f1[0]).epsilon(1e-14));
            CHECK(swapped[1] == doctest::Approx(f1[1]).epsilon(1e-14));
        }
    }
}

TEST_CASE("report writers") {
    const std::vector<std::uint32_t> gold{1, 1, 0, 0};
    const std::vector<std::uint32_t> pred{1, 0, 0, 0};
    const auto report = make_report(confusion(gold, pred, kDet), Language::es);
    std::ostringstream text;
    write_report_text(text, report);
    CHECK(text.str() ==
          "format: mgt-eval-report/1\n"
          "scope: es\n"
          "n_test: 4\n"
          "accuracy: 0.750000\n"
          "macro_f1: 0.733333\n"
          "f1.generated: 0.800000\n"
          "f1.human: 0.666667\n"
          "error.generated: 0.000000\n"
          "error.human: 0.500000\n"
          "confusion.generated: 2 0\n"
          "confusion.human: 1 1\n");

    std::ostringstream tsv;
    const std::vector<EvalReport> reports{report};
    write_report_tsv(tsv, reports);
    CHECK(tsv.str().rfind("scope\tmetric\tclass\tvalue\nes\tn_test\t-\t4\n", 0) == 0);
    CHECK(tsv.str().find("es\tf1\thuman\t0.666667\n") != std::string::npos);

    const std::vector<std::pair<std::string, EvalReport>> models{{"logreg", report}, {"gbdt", make_report(confusion(gold, gold, kDet))}};
    std::ostringstream csv;
    write_error_csv(csv, models);
    CHECK(csv.str() ==
          "model,class,error,n_gold\n"
          "logreg,generated,0.000000,2\n"
          "logreg,human,0.500000,2\n"
          "gbdt,generated,0.000000,2\n"
          "gbdt,human,0.000000,2\n");
    std::ostringstream svg;
    write_error_svg(svg, models);
    CHECK(svg.str().rfind("<svg", 0) == 0);
    CHECK(svg.str().find("</svg>") != std::string::npos);
    CHECK(svg.str().find("logreg") != std::string::npos);
}

TEST_CASE("few-shot samples are balanced, nested and reproducible") {
    const auto en = language_corpus(Language::en, 900);
    const auto es = language_corpus(Language::es, 700);

    const auto s100 = fewshot_sample(en, es, 100, 5);
    CHECK(s100.size() == 200);
    const auto s500 = fewshot_sample(en, es, 500, 5);
    CHECK(s500.size() == 1000);

    for (auto lang : {Language::en, Language::es}) {
        const auto small = ids(s100, lang);
        const auto large = ids(s500, lang);
        CHECK(small.size() == 100);
        CHECK(large.size() == 500);
        CHECK(std::equal(small.begin(), small.end(), large.begin()));
        CHECK(std::set<std::string>(large.begin(), large.end()).size() == 500);
    }

    // every prefix stays within one document of the one-third share
    std::size_t generated = 0;
    std::size_t seen = 0;
    for (const auto& d : s500.documents) {
        if (d.language != Language::en) {
            continue;
        }
        ++seen;
        generated += d.label.value == 0;
        CHECK(std::abs(static_cast<double>(generated) - static_cast<double>(seen) / 3.0) <= 1.0);
    }

    const auto again = fewshot_sample(en, es, 300, 5);
    const auto other = fewshot_sample(en, es, 300, 6);
    CHECK(ids(again, Language::en) == ids(fewshot_sample(en, es, 300, 5), Language::en));
    CHECK(ids(again, Language::en) != ids(other, Language::en));

    CHECK_THROWS_AS(fewshot_sample(en, es, 800, 5), InsufficientDataError);
    CHECK_THROWS_AS(fewshot_sample(es, en, 100, 5), ValidationError);
    CHECK_THROWS_AS(fewshot_sample(en, es, 0, 5), ValidationError);
}

TEST_CASE("mean loss") {
    CHECK(mean_loss(std::vector<double>{1.0, 2.0, 3.0}) == 2.0);
    CHECK(mean_loss(std::vector<double>{0.0}) == 0.0);
    CHECK_THROWS_AS(mean_loss(std::vector<double>{}), ValidationError);
    CHECK_THROWS_AS(mean_loss(std::vector<double>{-1.0}), ValidationError);
}

TEST_CASE("few-shot curve trains once per size") {
    const auto en = language_corpus(Language::en, 600);
    const auto es = language_corpus(Language::es, 600);
    const auto en_test = language_corpus(Language::en, 30);
    const auto es_test = language_corpus(Language::es, 30);
    std::vector<std::size_t> seen_sizes;
    // predicts gold for English and a coin flip for Spanish
    const FewShotRunner runner = [&](const Corpus& train, const Corpus& test, std::uint64_t) {
        seen_sizes.push_back(train.size());
        std::vector<Prediction> out;
        for (const auto& d : test.documents) {
            Prediction p;
            if (d.language == Language::en) {
                p.probabilities = d.label.value == 0 ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0};
                p.label = d.label.value;
            } else {
                p.probabilities = {0.5, 0.5};
                p.label = 1;
            }
            out.push_back(p);
        }
        return out;
    };
    const auto report = fewshot_curve(en, es, kDefaultFewShotSizes, runner, en_test, es_test, 9);
    REQUIRE(report.points.size() == 5);
    CHECK(seen_sizes == std::vector<std::size_t>{200, 400, 600, 800, 1000});
    for (std::size_t i = 0; i < 5; ++i) {
        const auto& p = report.points[i];
        CHECK(p.total_samples == kDefaultFewShotSizes[i]);
        CHECK(p.per_language_samples == kDefaultFewShotSizes[i] / 2);
        CHECK(p.en.macro_f1 == 1.0);
        CHECK(p.es.language == Language::es);
        CHECK(p.joint.n_test == 60);
        // half the rows cost ln 2, the other half cost nothing
        CHECK(p.mean_loss == doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-12));
    }

    const std::vector<std::size_t> single{200};
    CHECK(fewshot_curve(en, es, single, runner, en_test, es_test, 9).points.size() == 1);
    const std::vector<std::size_t> odd{201};
    CHECK_THROWS_AS(fewshot_curve(en, es, odd, runner, en_test, es_test, 9), ValidationError);
    const std::vector<std::size_t> descending{400, 200};
    CHECK_THROWS_AS(fewshot_curve(en, es, descending, runner, en_test, es_test, 9), ValidationError);

    std::ostringstream out;
    write_fewshot_tsv(out, report);
    const auto tsv = out.str();
    CHECK(tsv.rfind("total_n\tper_lang_n\tmacro_f1_en\tmacro_f1_es\tmacro_f1_joint\tmean_loss\n", 0) == 0);
    CHECK(tsv.find("\n200\t100\t1.000000\t") != std::string::npos);
    CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 6);
}
