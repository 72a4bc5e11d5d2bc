#include "bibmatch/synth.hpp"

#include <algorithm>
#include <cmath>

#include "bibmatch/errors.hpp"
#include "bibmatch/rng.hpp"

namespace bibmatch {

namespace {

const char* const kTitleWords[] = {
    "spectral",      "operators",    "manifolds",   "graph",        "theory",
    "prime",         "numbers",      "boundary",    "problems",     "stochastic",
    "equations",     "differential", "algebraic",   "geometry",     "topology",
    "homology",      "cohomology",   "categories",  "functors",     "lattices",
    "rings",         "fields",       "modules",     "groups",       "representations",
    "matrices",      "eigenvalues",  "convergence", "estimates",    "inequalities",
    "asymptotic",    "expansions",   "polynomials", "orthogonal",   "hypergeometric",
    "elliptic",      "parabolic",    "hyperbolic",  "nonlinear",    "dynamics",
    "chaos",         "entropy",      "measure",     "integration",  "probability",
    "martingales",   "random",       "walks",       "percolation",  "optimization",
    "convex",        "duality",      "variational", "methods",      "approximation",
    "interpolation", "quadrature",   "splines",     "wavelets",     "transforms",
    "harmonic",      "analysis",     "functional",  "spaces",       "banach",
    "hilbert",       "sobolev",      "embeddings",  "compactness",  "regularity",
    "singular",      "perturbation", "bifurcation", "stability",    "control",
    "systems",       "automata",     "complexity",  "algorithms",   "computation",
    "cryptography",  "curves",       "surfaces",    "varieties",    "schemes",
    "sheaves",       "bundles",      "connections", "curvature",    "metrics",
    "geodesics",     "symmetry",     "invariants",  "quantization", "solitons",
    "scattering",    "waves",        "diffusion",   "kernels",      "semigroups",
    "resolvent",     "spectrum",     "zeta",        "modular",      "forms",
    "galois",        "extensions",   "ideals",      "valuations",   "adelic",
    "arithmetic",    "diophantine",  "continued",   "fractions",    "partitions",
    "combinatorics", "designs",      "codes",       "graphs",       "colorings",
    "matchings",     "flows",        "networks",    "games",        "equilibria",
};

const char* const kSurnames[] = {
    "Abramov",   "Beckmann",  "Cartier",   "Delacroix", "Eriksen",  "Falkner",
    "Gruber",    "Hofmann",   "Ivanova",   "Jansen",    "Kowalski", "Lindqvist",
    "Marchetti", "Novak",     "Okamoto",   "Petrov",    "Quirarte", "Rasmussen",
    "Schneider", "Takahashi", "Ullmann",   "Vasquez",   "Weidmann", "Xenakis",
    "Yamamoto",  "Zielinski", "Andersson", "Bergstrom", "Castellan", "Dubois",
    "Engelhardt", "Fiorelli", "Goldmann",  "Haraldsen", "Ibsen",    "Jovanovic",
    "Kessler",   "Lombardi",  "Moreau",    "Nakamura",  "Olsson",   "Pellegrini",
    "Quastel",   "Richter",   "Sorensen",  "Tanaka",    "Urbanski", "Vogel",
    "Wagner",    "Yoshida",
};

const char* const kGivenNames[] = {
    "Albert",   "Boris",   "Clara",  "Dmitri",  "Elena",   "Felix",  "Greta",
    "Henri",    "Ingrid",  "Jonas",  "Katrin",  "Laszlo",  "Marta",  "Nikolai",
    "Oskar",    "Paula",   "Quentin", "Renata", "Stefan",  "Tatiana", "Ulrich",
    "Viktor",   "Wilhelmina", "Xavier", "Yvonne", "Zoltan",
};

const char* const kSerials[] = {
    "Ann. of Math.",        "J. Algebra",        "Acta Arith.",
    "Math. Z.",             "Invent. Math.",     "Proc. Amer. Math. Soc.",
    "J. Number Theory",     "Adv. Math.",        "Numer. Math.",
    "SIAM J. Comput.",      "J. Funct. Anal.",   "Comm. Math. Phys.",
    "Arch. Ration. Mech.",  "Discrete Math.",    "Topology Appl.",
};

const char* const kMscPool[] = {
    "11A25", "11B39", "11M06", "33C45", "33E05", "34A12", "35J25", "37D20",
    "41A10", "42B20", "46E35", "47A10", "53C21", "55N10", "60G50", "62F12",
    "65F10", "65N30", "68Q25", "81Q10", "90C25", "94A60", "05C15", "20F65",
};

template <typename T, std::size_t N>
const T& pick(std::mt19937_64& rng, const T (&pool)[N]) {
    return pool[uniform_index(rng, N)];
}

std::string make_title(std::mt19937_64& rng) {
    std::size_t n_words = 3 + uniform_index(rng, 6);  // 3..8
    std::string title;
    for (std::size_t i = 0; i < n_words; ++i) {
        std::string word = pick(rng, kTitleWords);
        if (i == 0) word[0] = static_cast<char>(word[0] - 'a' + 'A');
        if (!title.empty()) title += ' ';
        title += word;
    }
    return title;
}

std::vector<AuthorName> make_authors(std::mt19937_64& rng, long long record_id) {
    std::size_t n_authors = 1 + uniform_index(rng, 3);  // 1..3
    std::vector<AuthorName> authors;
    for (std::size_t i = 0; i < n_authors; ++i) {
        AuthorName a;
        a.surname = pick(rng, kSurnames);
        a.given = pick(rng, kGivenNames);
        // roughly half of the authors carry a disambiguated id
        if (uniform01(rng) < 0.5)
            a.author_id = a.surname + "." + std::to_string(record_id % 7 + 1);
        authors.push_back(std::move(a));
    }
    return authors;
}

BibRecord make_record(std::mt19937_64& rng, long long id) {
    BibRecord r;
    r.id = id;
    r.title = make_title(rng);
    r.authors = make_authors(rng, id);
    r.year = 1950 + static_cast<int>(uniform_index(rng, 74));
    r.serial = pick(rng, kSerials);
    r.volume = std::to_string(1 + uniform_index(rng, 200));
    long long first_page = 1 + static_cast<long long>(uniform_index(rng, 900));
    long long last_page = first_page + 1 + static_cast<long long>(uniform_index(rng, 40));
    r.pages = std::to_string(first_page) + "-" + std::to_string(last_page);
    std::size_t n_msc = 1 + uniform_index(rng, 3);
    for (std::size_t i = 0; i < n_msc; ++i) {
        std::string code = pick(rng, kMscPool);
        if (std::find(r.msc.begin(), r.msc.end(), code) == r.msc.end())
            r.msc.push_back(std::move(code));
    }
    if (uniform01(rng) < 0.2)
        r.doi = "10.5555/synth." + std::to_string(id);
    r.abstract_redacted = uniform01(rng) < 0.1;
    return r;
}

// "<authors>, <title>, <serial> <volume> (<year>), <pages>." with the
// configured noise applied.
std::string render_citation(std::mt19937_64& rng, const BibRecord& record,
                            const SynthConfig& config) {
    std::string out;
    for (const AuthorName& author : record.authors) {
        if (!out.empty()) out += ", ";
        std::string given = author.given.value_or("");
        if (!given.empty() && uniform01(rng) < config.author_initial_p)
            given = std::string(1, given[0]) + ".";
        if (!given.empty()) out += given + " ";
        out += author.surname;
    }

    std::string title;
    {
        std::vector<std::string> kept;
        std::string word;
        for (char c : record.title) {
            if (c == ' ') {
                if (!word.empty() && uniform01(rng) >= config.token_drop_p)
                    kept.push_back(word);
                word.clear();
            } else {
                word.push_back(c);
            }
        }
        if (!word.empty() && uniform01(rng) >= config.token_drop_p) kept.push_back(word);
        if (kept.empty()) kept.push_back(record.title.substr(0, record.title.find(' ')));
        for (const auto& w : kept) {
            if (!title.empty()) title += ' ';
            title += w;
        }
    }

    int year = record.year.value_or(2000);
    if (uniform01(rng) < config.year_jitter_p) year += uniform01(rng) < 0.5 ? -1 : 1;

    out += ", " + title + ", " + record.serial.value_or("Unknown J.") + " "
           + record.volume.value_or("1") + " (" + std::to_string(year) + "), "
           + record.pages.value_or("1-2") + ".";
    return out;
}

}  // namespace

SynthOutput make_synthetic(const SynthConfig& config) {
    if (config.negative_fraction < 0.0 || config.negative_fraction > 1.0)
        throw BadConfigError("negative_fraction must be in [0, 1]");
    if (config.token_drop_p < 0.0 || config.token_drop_p > 1.0
        || config.author_initial_p < 0.0 || config.author_initial_p > 1.0
        || config.year_jitter_p < 0.0 || config.year_jitter_p > 1.0)
        throw BadConfigError("perturbation probabilities must be in [0, 1]");

    std::size_t n_negative = static_cast<std::size_t>(
        std::llround(config.negative_fraction * static_cast<double>(config.gold)));
    std::size_t n_positive = config.gold - n_negative;
    if (n_positive > config.records)
        throw BadConfigError("corpus too small for " + std::to_string(n_positive)
                             + " positive gold items");

    std::mt19937_64 rng(config.seed);
    SynthOutput out;
    for (std::size_t i = 1; i <= config.records; ++i)
        out.corpus.add(make_record(rng, static_cast<long long>(i)));

    // positives: distinct records, sampled by seeded shuffle
    std::vector<long long> ids(config.records);
    for (std::size_t i = 0; i < config.records; ++i) ids[i] = static_cast<long long>(i + 1);
    shuffle_vector(ids, rng);
    for (std::size_t i = 0; i < n_positive; ++i) {
        const BibRecord* record = out.corpus.find(ids[i]);
        GoldItem item;
        item.input = render_citation(rng, *record, config);
        item.expected_id = record->id;
        out.gold.push_back(std::move(item));
    }

    // negatives: fabricated records that never enter the corpus
    for (std::size_t i = 0; i < n_negative; ++i) {
        BibRecord ghost = make_record(rng, static_cast<long long>(config.records + 1 + i));
        GoldItem item;
        item.input = render_citation(rng, ghost, config);
        out.gold.push_back(std::move(item));
    }

    // deterministic interleaving of positives and negatives
    std::mt19937_64 order_rng(config.seed ^ 0x9e3779b97f4a7c15ull);
    shuffle_vector(out.gold, order_rng);
    return out;
}

}  // namespace bibmatch
