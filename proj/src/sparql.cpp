#include "pog/sparql.hpp"

#include <httplib.h>
#include <json.hpp>

namespace pog {

namespace {

constexpr const char* kFreebaseNs = "http://rdf.freebase.com/ns/";

const char* kNeighborsTemplate =
    "PREFIX ns: <http://rdf.freebase.com/ns/>\n"
    "SELECT ?relation ?connectedEntity ?direction\n"
    "WHERE {\n"
    "    {\n"
    "        ns:%ID% ?relation ?connectedEntity .\n"
    "        BIND(\"tail\" AS ?direction)\n"
    "    }\n"
    "    UNION\n"
    "    {\n"
    "        ?connectedEntity ?relation ns:%ID% .\n"
    "        BIND(\"head\" AS ?direction)\n"
    "    }\n"
    "}";

const char* kLabelTemplate =
    "PREFIX ns: <http://rdf.freebase.com/ns/>\n"
    "SELECT DISTINCT ?tailEntity\n"
    "WHERE {\n"
    "    {\n"
    "        ?entity ns:type.object.name ?tailEntity .\n"
    "        FILTER(?entity = ns:%ID%)\n"
    "    }\n"
    "    UNION\n"
    "    {\n"
    "        ?entity <http://www.w3.org/2002/07/owlsameAs> ?tailEntity .\n"
    "        FILTER(?entity = ns:%ID%)\n"
    "    }\n"
    "}";

const char* kSubgraphTemplate =
    "PREFIX ns: <http://rdf.freebase.com/ns/>\n"
    "SELECT ?relation ?connectedEntity ?connectedEntityName ?direction\n"
    "WHERE {\n"
    "    {\n"
    "        ns:%ID% ?relation ?connectedEntity .\n"
    "        OPTIONAL {\n"
    "            ?connectedEntity ns:type.object.name ?name .\n"
    "            FILTER(lang(?name) = 'en')\n"
    "        }\n"
    "        BIND(COALESCE(?name, \"Unnamed Entity\") AS ?connectedEntityName)\n"
    "        BIND(\"tail\" AS ?direction)\n"
    "    }\n"
    "    UNION\n"
    "    {\n"
    "        ?connectedEntity ?relation ns:%ID% .\n"
    "        OPTIONAL {\n"
    "            ?connectedEntity ns:type.object.name ?name .\n"
    "            FILTER(lang(?name) = 'en')\n"
    "        }\n"
    "        BIND(COALESCE(?name, \"Unnamed Entity\") AS ?connectedEntityName)\n"
    "        BIND(\"head\" AS ?direction)\n"
    "    }\n"
    "}";

std::string substitute_id(const char* templ, const std::string& id) {
    std::string out(templ);
    const std::string marker = "%ID%";
    std::size_t pos = 0;
    while ((pos = out.find(marker, pos)) != std::string::npos) {
        out.replace(pos, marker.size(), id);
        pos += id.size();
    }
    return out;
}

// Freebase ids come back as full ns URIs; everything else stays verbatim.
std::string strip_ns(const std::string& value) {
    if (value.rfind(kFreebaseNs, 0) == 0) return value.substr(std::string(kFreebaseNs).size());
    return value;
}

Direction parse_direction(const std::string& s) {
    return s == "head" ? Direction::Head : Direction::Tail;
}

} // namespace

std::string sparql_neighbors_query(const EntityId& id) {
    return substitute_id(kNeighborsTemplate, id);
}

std::string sparql_label_query(const std::string& id) {
    return substitute_id(kLabelTemplate, id);
}

std::string sparql_subgraph_query(const EntityId& id) {
    return substitute_id(kSubgraphTemplate, id);
}

SparqlGraphSource::SparqlGraphSource(std::string endpoint_url) {
    // Split scheme://authority from the path.
    std::size_t scheme = endpoint_url.find("://");
    std::size_t path_start =
        endpoint_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) {
        host_ = endpoint_url;
        path_ = "/";
    } else {
        host_ = endpoint_url.substr(0, path_start);
        path_ = endpoint_url.substr(path_start);
    }
}

std::string SparqlGraphSource::execute(const std::string& query) const {
    httplib::Client client(host_);
    client.set_read_timeout(30, 0);
    httplib::Headers headers{{"Accept", "application/sparql-results+json"}};
    httplib::Params params{{"query", query}};
    auto res = client.Post(path_, headers, params);
    if (!res)
        throw TransportError("SPARQL endpoint unreachable: " + host_ + path_);
    if (res->status != 200)
        throw TransportError("SPARQL endpoint returned status " +
                             std::to_string(res->status));
    return res->body;
}

std::vector<NeighborRecord> SparqlGraphSource::neighbors_1hop(const EntityId& e) const {
    nlohmann::json body = nlohmann::json::parse(execute(sparql_neighbors_query(e)));
    std::vector<NeighborRecord> records;
    for (const auto& b : body.at("results").at("bindings")) {
        records.push_back(NeighborRecord{
            strip_ns(b.at("relation").at("value").get<std::string>()),
            strip_ns(b.at("connectedEntity").at("value").get<std::string>()),
            parse_direction(b.at("direction").at("value").get<std::string>())});
    }
    return records;
}

std::string SparqlGraphSource::label(const std::string& id) const {
    nlohmann::json body = nlohmann::json::parse(execute(sparql_label_query(id)));
    const auto& bindings = body.at("results").at("bindings");
    if (bindings.empty()) return "Unnamed Entity";
    return bindings.front().at("tailEntity").at("value").get<std::string>();
}

std::vector<NamedNeighbor> SparqlGraphSource::expand_1hop(const EntityId& e) const {
    nlohmann::json body = nlohmann::json::parse(execute(sparql_subgraph_query(e)));
    std::vector<NamedNeighbor> records;
    for (const auto& b : body.at("results").at("bindings")) {
        records.push_back(NamedNeighbor{
            strip_ns(b.at("relation").at("value").get<std::string>()),
            strip_ns(b.at("connectedEntity").at("value").get<std::string>()),
            b.at("connectedEntityName").at("value").get<std::string>(),
            parse_direction(b.at("direction").at("value").get<std::string>())});
    }
    return records;
}

} // namespace pog
