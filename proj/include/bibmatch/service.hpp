#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "bibmatch/classifier.hpp"
#include "bibmatch/corpus.hpp"
#include "bibmatch/index.hpp"
#include "bibmatch/links.hpp"

namespace httplib {
class Server;
}

namespace bibmatch {

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

struct ServiceConfig {
    int port = 8080;
    std::string base_url = "http://localhost:8080";
    std::string repository_name = "bibmatch";
    std::string admin_email = "admin@example.org";
    std::string corpus_path;
    std::string model_path;
    std::string links_path;
    std::size_t page_size = 100;   // OAI and search pagination
    std::size_t batch_cap = 1000;  // match endpoint request cap
    double min_score = 0.5;
    std::size_t candidates_k = 20;
    bool deterministic_time = false;  // zeroes OAI response dates
};

// Stateless HTTP facade over shared immutable state. Handlers are plain
// request -> response functions so they can be exercised without sockets;
// mount() wires them onto an httplib server. Tokens embed the state
// generation, so swapping in a new corpus invalidates them by design.
class Service {
public:
    Service(const Corpus& corpus, const Index& index, const Model* model, const LinkSet* links,
            ServiceConfig config, std::uint64_t generation = 1);

    HttpResponse handle_oai(const std::map<std::string, std::string>& params) const;
    HttpResponse handle_match(const std::string& body) const;
    HttpResponse handle_search(const std::map<std::string, std::string>& params) const;
    HttpResponse handle_entity(const std::string& kind, const std::string& key) const;
    HttpResponse handle_links(const std::map<std::string, std::string>& params) const;

    void mount(httplib::Server& server) const;

    const ServiceConfig& config() const { return config_; }
    std::uint64_t generation() const { return generation_; }

private:
    const Corpus& corpus_;
    const Index& index_;
    const Model* model_;
    const LinkSet* links_;
    ServiceConfig config_;
    std::uint64_t generation_;
};

// Flat "key = value" config file; unknown keys rejected.
ServiceConfig load_service_config(const std::filesystem::path& path);

}  // namespace bibmatch
