#pragma once

#include <cstdint>
#include <vector>

#include "bibmatch/corpus.hpp"
#include "bibmatch/eval.hpp"

namespace bibmatch {

// Stand-in for non-redistributable evaluation datasets: a synthetic corpus
// plus a gold set whose positives are noisy renderings of real records and
// whose negatives cite fabricated records absent from the corpus.
struct SynthConfig {
    std::size_t records = 1000;
    std::size_t gold = 200;
    double negative_fraction = 0.2;
    double token_drop_p = 0.1;       // drop each title token independently
    double author_initial_p = 0.5;   // abbreviate a given name to its initial
    double year_jitter_p = 0.05;     // shift the cited year by +-1
    std::uint64_t seed = 42;
};

struct SynthOutput {
    Corpus corpus;
    std::vector<GoldItem> gold;
};

// Deterministic under (config, seed). Throws BadConfigError when the corpus
// cannot supply the requested number of distinct positive gold items.
SynthOutput make_synthetic(const SynthConfig& config);

}  // namespace bibmatch
