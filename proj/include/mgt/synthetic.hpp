#pragma once

#include "mgt/corpus.hpp"

#include <cstdint>
#include <vector>

namespace mgt {

/// Generated corpus whose classes are "authors" differing in word length and in how
/// often they repeat words. Used by tests, benchmarks and demos.
struct SyntheticConfig {
    Task task{Task::detection};
    std::size_t docs_per_language{1000};
    std::vector<Language> languages{Language::en, Language::es};
    std::uint64_t seed{0};
    /// Fraction of words drawn from a vocabulary shared by every author.
    double shared_word_rate{0.15};
};

Corpus synthetic_corpus(const SyntheticConfig& config);

} // namespace mgt
