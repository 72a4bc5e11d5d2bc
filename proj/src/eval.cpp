#include "bibmatch/eval.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "bibmatch/errors.hpp"
#include "bibmatch/features.hpp"
#include "bibmatch/rng.hpp"

namespace bibmatch {

GoldPartition partition_gold(const std::vector<GoldItem>& gold, std::uint64_t seed,
                             std::array<double, 3> ratios) {
    double sum = ratios[0] + ratios[1] + ratios[2];
    for (double r : ratios)
        if (r <= 0.0) throw BadRatiosError("split ratios must be positive");
    if (std::abs(sum - 1.0) > 1e-9) throw BadRatiosError("split ratios must sum to 1");

    std::vector<std::size_t> order(gold.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    shuffle_vector(order, rng);

    std::size_t n = gold.size();
    std::size_t n_train = static_cast<std::size_t>(std::llround(ratios[0] * n));
    std::size_t n_eval = static_cast<std::size_t>(std::llround(ratios[1] * n));
    if (n_train > n) n_train = n;
    if (n_train + n_eval > n) n_eval = n - n_train;

    GoldPartition part;
    for (std::size_t i = 0; i < n; ++i) {
        const GoldItem& item = gold[order[i]];
        if (i < n_train)
            part.train.push_back(item);
        else if (i < n_train + n_eval)
            part.eval.push_back(item);
        else
            part.test.push_back(item);
    }
    return part;
}

ConfusionCounts confusion_counts(const std::vector<std::pair<GoldItem, MatchResult>>& results) {
    ConfusionCounts c;
    for (const auto& [gold, result] : results) {
        if (gold.expected_id) {
            if (!result.matched_id)
                ++c.fn;
            else if (*result.matched_id == *gold.expected_id)
                ++c.tp;
            else
                ++c.fm;
        } else {
            if (result.matched_id)
                ++c.fp;
            else
                ++c.tn;
        }
    }
    return c;
}

double informedness(const ConfusionCounts& counts, const PenaltyParams& params) {
    double rp = static_cast<double>(counts.rp());
    double rn = static_cast<double>(counts.rn());
    double tp_term = rp > 0 ? static_cast<double>(counts.tp) / rp : 0.0;
    double fm_term = rp > 0 ? static_cast<double>(counts.fm) / rp : 0.0;
    double fp_term = rn > 0 ? static_cast<double>(counts.fp) / rn : 0.0;
    return tp_term - (params.alpha - 1.0) * fm_term - params.beta * fp_term;
}

std::vector<SweepRow> threshold_sweep(const Model& model, const std::vector<GoldItem>& gold,
                                      const Index& index, const Corpus& corpus,
                                      const std::vector<double>& thresholds,
                                      const std::vector<PenaltyParams>& penalties,
                                      std::size_t k) {
    // One pipeline pass with threshold 0 caches per-item argmax scores; every
    // threshold afterwards only reinterprets the cache.
    struct Cached {
        bool expected;
        long long expected_id;
        bool has_best;
        long long best_id;
        double best_score;
    };
    std::vector<Cached> cache;
    cache.reserve(gold.size());
    MatchConfig config{k, 0.0};
    for (const GoldItem& item : gold) {
        Cached entry{};
        entry.expected = item.expected_id.has_value();
        entry.expected_id = item.expected_id.value_or(0);
        std::vector<MatchResult> r = match_batch({item.input}, index, corpus, model, config);
        entry.has_best = !r.front().ranked.empty();
        if (entry.has_best) {
            entry.best_id = r.front().ranked.front().first;
            entry.best_score = r.front().ranked.front().second;
        }
        cache.push_back(entry);
    }

    std::vector<SweepRow> rows;
    rows.reserve(thresholds.size() * penalties.size());
    for (const PenaltyParams& p : penalties) {
        for (double threshold : thresholds) {
            ConfusionCounts c;
            for (const Cached& entry : cache) {
                bool matched = entry.has_best && accept(entry.best_score, threshold);
                if (entry.expected) {
                    if (!matched)
                        ++c.fn;
                    else if (entry.best_id == entry.expected_id)
                        ++c.tp;
                    else
                        ++c.fm;
                } else {
                    matched ? ++c.fp : ++c.tn;
                }
            }
            rows.push_back({threshold, p.alpha, p.beta, c, informedness(c, p)});
        }
    }
    return rows;
}

namespace {

// Shortest round-trip decimal form, so CSV output is exact and byte-stable.
std::string format_double(double v) { return nlohmann::json(v).dump(); }

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "threshold,alpha,beta,tp,fm,fn,fp,tn,informedness\n";
    for (const SweepRow& row : rows) {
        out << format_double(row.threshold) << ',' << format_double(row.alpha) << ','
            << format_double(row.beta) << ',' << row.counts.tp << ',' << row.counts.fm << ','
            << row.counts.fn << ',' << row.counts.fp << ',' << row.counts.tn << ','
            << format_double(row.informedness) << '\n';
    }
}

std::vector<GoldItem> load_gold(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open gold file '" + path.string() + "'");

    std::vector<GoldItem> gold;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (blank) continue;

        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
        if (!j.is_object() || !j.contains("input"))
            throw ParseError("line " + std::to_string(line_no) + ": gold item needs 'input'",
                             line_no);
        for (const auto& [key, value] : j.items()) {
            (void)value;
            if (key != "input" && key != "expected_id")
                throw ParseError("line " + std::to_string(line_no) + ": unknown gold key '" + key
                                     + "'",
                                 line_no);
        }

        GoldItem item;
        const nlohmann::json& input = j["input"];
        if (input.is_string()) {
            item.input = input.get<std::string>();
        } else if (input.is_object()) {
            std::map<std::string, std::string> fields;
            for (const auto& [key, value] : input.items()) {
                if (!value.is_string())
                    throw ParseError("line " + std::to_string(line_no)
                                         + ": structured input values must be strings",
                                     line_no);
                fields[key] = value.get<std::string>();
            }
            item.input = std::move(fields);
        } else {
            throw ParseError("line " + std::to_string(line_no)
                                 + ": 'input' must be a string or object",
                             line_no);
        }
        if (j.contains("expected_id") && !j["expected_id"].is_null()) {
            if (!j["expected_id"].is_number_integer())
                throw ParseError("line " + std::to_string(line_no)
                                     + ": 'expected_id' must be an integer or null",
                                 line_no);
            item.expected_id = j["expected_id"].get<long long>();
        }
        gold.push_back(std::move(item));
    }
    if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
    return gold;
}

void save_gold(const std::vector<GoldItem>& gold, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    for (const GoldItem& item : gold) {
        nlohmann::json j;
        if (std::holds_alternative<std::string>(item.input)) {
            j["input"] = std::get<std::string>(item.input);
        } else {
            nlohmann::json obj = nlohmann::json::object();
            for (const auto& [key, value] : std::get<std::map<std::string, std::string>>(item.input))
                obj[key] = value;
            j["input"] = std::move(obj);
        }
        j["expected_id"] = item.expected_id ? nlohmann::json(*item.expected_id)
                                            : nlohmann::json(nullptr);
        out << j.dump() << '\n';
    }
    if (!out.flush()) throw IoError("write failure on '" + path.string() + "'");
}

TrainingSet build_training_set(const std::vector<GoldItem>& gold, const Index& index,
                               const Corpus& corpus, std::size_t k) {
    TrainingSet data;
    for (const GoldItem& item : gold) {
        ExtractedReference query;
        try {
            query = extract_query(item.input);
        } catch (const Error&) {
            continue;
        }
        std::vector<Candidate> candidates = index.candidates(query, k);
        if (candidates.empty()) continue;
        double max_retrieval = candidates.front().retrieval_score;
        for (const Candidate& c : candidates) {
            const BibRecord* record = corpus.find(c.record_id);
            if (!record) continue;
            TrainingRow row;
            row.features = feature_vector(query, *record, c.retrieval_score, max_retrieval);
            row.match = item.expected_id && *item.expected_id == c.record_id;
            data.rows.push_back(std::move(row));
        }
    }
    return data;
}

}  // namespace bibmatch
