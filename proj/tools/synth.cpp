// Writes a synthetic labelled corpus as TSV, for demos and smoke tests.
#include "mgt/corpus.hpp"
#include "mgt/errors.hpp"
#include "mgt/synthetic.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Generate a synthetic bilingual corpus", "mgt-synth"};
    std::string task{"detection"};
    std::size_t per_language{1000};
    std::uint64_t seed{0};
    std::string out;
    app.add_option("--task", task, "detection or attribution")
        ->check(CLI::IsMember({"detection", "attribution"}))
        ->capture_default_str();
    app.add_option("--docs-per-language", per_language, "documents per language")->capture_default_str();
    app.add_option("--seed", seed, "generator seed")->capture_default_str();
    app.add_option("--out", out, "output TSV path")->required();
    CLI11_PARSE(app, argc, argv);

    try {
        mgt::SyntheticConfig cfg;
        cfg.task = mgt::parse_task(task);
        cfg.docs_per_language = per_language;
        cfg.seed = seed;
        const auto corpus = mgt::synthetic_corpus(cfg);
        std::ofstream file(out, std::ios::binary);
        mgt::write_tsv(file, corpus);
        if (!file) {
            std::cerr << "error: cannot write " << out << '\n';
            return 2;
        }
        std::cout << "wrote " << corpus.size() << " documents to " << out << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
