#include "bibmatch/service.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "bibmatch/errors.hpp"
#include "bibmatch/matcher.hpp"
#include "bibmatch/msc_titles.hpp"
#include "bibmatch/oai.hpp"
#include "bibmatch/queryparse.hpp"

namespace bibmatch {

namespace {

HttpResponse json_response(int status, const nlohmann::json& body) {
    return {status, "application/json", body.dump()};
}

HttpResponse error_response(int status, const std::string& message) {
    return json_response(status, nlohmann::json{{"error", message}});
}

std::string trim_copy(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string quote_for_query(const std::string& value) {
    std::string out = "\"";
    for (char c : value) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

Service::Service(const Corpus& corpus, const Index& index, const Model* model,
                 const LinkSet* links, ServiceConfig config, std::uint64_t generation)
    : corpus_(corpus),
      index_(index),
      model_(model),
      links_(links),
      config_(std::move(config)),
      generation_(generation) {}

HttpResponse Service::handle_oai(const std::map<std::string, std::string>& params) const {
    return {200, "text/xml", handle_oai_request(corpus_, config_, generation_, params)};
}

HttpResponse Service::handle_match(const std::string& body) const {
    if (!model_) return error_response(503, "no model loaded");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        return error_response(400, std::string("malformed JSON body: ") + e.what());
    }
    if (!j.is_object() || !j.contains("citations") || !j["citations"].is_array())
        return error_response(400, "body must be {\"citations\": [...]}");

    if (j["citations"].size() > config_.batch_cap)
        return error_response(413, "citation batch exceeds cap of "
                                       + std::to_string(config_.batch_cap));

    MatchConfig match_config{config_.candidates_k, config_.min_score};
    if (j.contains("min_score")) {
        if (!j["min_score"].is_number()) return error_response(400, "min_score must be a number");
        match_config.min_score = j["min_score"].get<double>();
    }

    std::vector<MatchInput> inputs;
    inputs.reserve(j["citations"].size());
    for (const auto& c : j["citations"]) {
        if (c.is_string()) {
            inputs.emplace_back(c.get<std::string>());
        } else if (c.is_object()) {
            std::map<std::string, std::string> fields;
            for (const auto& [key, value] : c.items()) {
                if (!value.is_string())
                    return error_response(400, "structured citation values must be strings");
                fields[key] = value.get<std::string>();
            }
            inputs.emplace_back(std::move(fields));
        } else {
            return error_response(400, "citations must be strings or objects");
        }
    }

    auto results = match_batch(inputs, index_, corpus_, *model_, match_config);
    auto out = nlohmann::json::array();
    for (const MatchResult& r : results) out.push_back(match_result_to_json(r));
    return json_response(200, out);
}

HttpResponse Service::handle_search(const std::map<std::string, std::string>& params) const {
    static const char* const kStructured[] = {"au", "ti", "py", "so", "cc", "an"};
    bool has_q = params.count("q") > 0;
    std::vector<std::pair<std::string, std::string>> structured;
    for (const char* field : kStructured) {
        if (auto it = params.find(field); it != params.end())
            structured.emplace_back(field, it->second);
    }
    for (const auto& [key, value] : params) {
        (void)value;
        bool known = key == "q" || key == "page" || key == "page_size"
                     || std::find_if(std::begin(kStructured), std::end(kStructured),
                                     [&](const char* f) { return key == f; })
                            != std::end(kStructured);
        if (!known) return error_response(400, "unknown search parameter '" + key + "'");
    }
    if (has_q == !structured.empty())
        return error_response(400, "exactly one of 'q' or structured field parameters required");

    QueryAst ast;
    try {
        if (has_q) {
            ast = parse_query(params.at("q"));
        } else {
            // structured params compile to an &-chain over the fixed field order
            std::string q;
            for (const auto& [field, value] : structured) {
                if (!q.empty()) q += " & ";
                q += field + ":" + quote_for_query(value);
            }
            ast = parse_query(q);
        }
    } catch (const QuerySyntaxError& e) {
        return json_response(400, nlohmann::json{{"error", e.what()}, {"offset", e.offset()}});
    } catch (const UnknownFieldError& e) {
        return error_response(400, e.what());
    }

    std::set<long long> ids = evaluate_query(*ast, corpus_);

    std::size_t page = 1;
    std::size_t page_size = std::min<std::size_t>(config_.page_size, 100);
    if (auto it = params.find("page"); it != params.end()) {
        try {
            page = std::stoull(it->second);
        } catch (const std::exception&) {
            return error_response(400, "page must be a positive integer");
        }
        if (page == 0) return error_response(400, "page must be a positive integer");
    }
    if (auto it = params.find("page_size"); it != params.end()) {
        try {
            page_size = std::stoull(it->second);
        } catch (const std::exception&) {
            return error_response(400, "page_size must be a positive integer");
        }
        if (page_size == 0) return error_response(400, "page_size must be a positive integer");
        page_size = std::min<std::size_t>(page_size, 100);
    }

    std::vector<long long> sorted(ids.begin(), ids.end());  // std::set is already id-sorted
    nlohmann::json records = nlohmann::json::array();
    std::size_t begin = (page - 1) * page_size;
    for (std::size_t i = begin; i < sorted.size() && i < begin + page_size; ++i)
        records.push_back(record_to_json(*corpus_.find(sorted[i])));

    nlohmann::json out{{"total", sorted.size()},
                       {"page", page},
                       {"page_size", page_size},
                       {"records", std::move(records)}};
    return json_response(200, out);
}

HttpResponse Service::handle_entity(const std::string& kind, const std::string& key) const {
    if (kind == "document") {
        if (key.empty()
            || !std::all_of(key.begin(), key.end(), [](char c) { return c >= '0' && c <= '9'; }))
            return error_response(404, "unknown document id '" + key + "'");
        const BibRecord* record = corpus_.find(std::stoll(key));
        if (!record) return error_response(404, "unknown document id '" + key + "'");
        return json_response(200, record_to_json(*record));
    }

    if (kind == "author") {
        std::set<std::string> name_forms;
        std::vector<long long> documents;
        for (const auto& [id, record] : corpus_) {
            for (const AuthorName& author : record.authors) {
                if (author.author_id && *author.author_id == key) {
                    std::string form = author.surname;
                    if (author.given) form += ", " + *author.given;
                    name_forms.insert(form);
                    documents.push_back(id);
                    break;
                }
            }
        }
        if (documents.empty()) return error_response(404, "unknown author id '" + key + "'");
        return json_response(200, nlohmann::json{{"author_id", key},
                                                 {"name_forms", name_forms},
                                                 {"documents", documents},
                                                 {"count", documents.size()}});
    }

    if (kind == "classification") {
        if (!is_valid_msc_code(key)) return error_response(404, "malformed MSC code '" + key + "'");
        auto title = msc_title(key);
        if (!title) return error_response(404, "unknown MSC class '" + key + "'");
        std::size_t count = 0;
        for (const auto& [id, record] : corpus_) {
            (void)id;
            for (const std::string& code : record.msc) {
                if (code.rfind(key, 0) == 0) {
                    ++count;
                    break;
                }
            }
        }
        return json_response(
            200, nlohmann::json{{"code", key}, {"description", *title}, {"count", count}});
    }

    if (kind == "serial") {
        std::string wanted = trim_copy(key);
        std::size_t count = 0;
        for (const auto& [id, record] : corpus_) {
            (void)id;
            if (record.serial && trim_copy(*record.serial) == wanted) ++count;
        }
        if (count == 0) return error_response(404, "unknown serial '" + key + "'");
        return json_response(200, nlohmann::json{{"serial", wanted}, {"count", count}});
    }

    return error_response(404, "unknown entity kind '" + kind + "'");
}

HttpResponse Service::handle_links(const std::map<std::string, std::string>& params) const {
    std::vector<std::string> filters;
    for (const char* name : {"msc", "author_id", "provider"})
        if (params.count(name)) filters.push_back(name);
    for (const auto& [key, value] : params) {
        (void)value;
        if (key != "msc" && key != "author_id" && key != "provider")
            return error_response(400, "unknown links parameter '" + key + "'");
    }
    if (filters.size() != 1)
        return error_response(400, "exactly one of msc, author_id or provider required");

    std::vector<ScholixLink> links;
    if (links_) {
        try {
            if (filters[0] == "msc")
                links = links_->by_msc(params.at("msc"));
            else if (filters[0] == "author_id")
                links = links_->by_author(params.at("author_id"));
            else
                links = links_->by_provider(params.at("provider"));
        } catch (const BadMscCodeError& e) {
            return error_response(400, e.what());
        }
    }
    auto out = nlohmann::json::array();
    for (const ScholixLink& link : links) out.push_back(link_to_scholix_json(link));
    return json_response(200, out);
}

namespace {

std::map<std::string, std::string> collect_params(const httplib::Request& req) {
    std::map<std::string, std::string> params;
    for (const auto& [key, value] : req.params) params[key] = value;
    return params;
}

void apply(const HttpResponse& response, httplib::Response& res) {
    res.status = response.status;
    res.set_content(response.body, response.content_type);
}

}  // namespace

void Service::mount(httplib::Server& server) const {
    server.Get("/oai", [this](const httplib::Request& req, httplib::Response& res) {
        apply(handle_oai(collect_params(req)), res);
    });
    server.Post("/match", [this](const httplib::Request& req, httplib::Response& res) {
        apply(handle_match(req.body), res);
    });
    server.Get("/search", [this](const httplib::Request& req, httplib::Response& res) {
        apply(handle_search(collect_params(req)), res);
    });
    server.Get(R"(/document/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
        apply(handle_entity("document", req.matches[1]), res);
    });
    server.Get(R"(/author/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
        apply(handle_entity("author", req.matches[1]), res);
    });
    server.Get(R"(/classification/(.+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                   apply(handle_entity("classification", req.matches[1]), res);
               });
    server.Get(R"(/serial/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
        apply(handle_entity("serial", req.matches[1]), res);
    });
    server.Get("/links", [this](const httplib::Request& req, httplib::Response& res) {
        apply(handle_links(collect_params(req)), res);
    });
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path.string() + "'");
    ServiceConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = trim_copy(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(line_no) + ": expected key = value",
                             line_no);
        std::string key = trim_copy(stripped.substr(0, eq));
        std::string value = trim_copy(stripped.substr(eq + 1));
        try {
            if (key == "port") config.port = std::stoi(value);
            else if (key == "base_url") config.base_url = value;
            else if (key == "repository_name") config.repository_name = value;
            else if (key == "admin_email") config.admin_email = value;
            else if (key == "corpus") config.corpus_path = value;
            else if (key == "model") config.model_path = value;
            else if (key == "links") config.links_path = value;
            else if (key == "page_size") config.page_size = std::stoull(value);
            else if (key == "batch_cap") config.batch_cap = std::stoull(value);
            else if (key == "min_score") config.min_score = std::stod(value);
            else if (key == "candidates_k") config.candidates_k = std::stoull(value);
            else if (key == "deterministic_time") config.deterministic_time = value == "true";
            else
                throw ParseError("config line " + std::to_string(line_no) + ": unknown key '" + key
                                     + "'",
                                 line_no);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError("config line " + std::to_string(line_no) + ": bad value for '" + key
                                 + "'",
                             line_no);
        }
    }
    return config;
}

}  // namespace bibmatch
