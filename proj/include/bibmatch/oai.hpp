#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "bibmatch/corpus.hpp"
#include "bibmatch/service.hpp"

namespace bibmatch {

// OAI-PMH 2.0 endpoint: the six verbs Identify, ListMetadataFormats,
// ListSets, ListIdentifiers, ListRecords and GetRecord, with protocol
// errors returned in-band as XML at HTTP 200.
std::string handle_oai_request(const Corpus& corpus, const ServiceConfig& config,
                               std::uint64_t generation,
                               const std::map<std::string, std::string>& params);

std::string xml_escape(std::string_view text);

}  // namespace bibmatch
