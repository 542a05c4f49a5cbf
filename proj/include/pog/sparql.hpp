#pragma once
// SPARQL endpoint client. Query builders are exposed separately from the
// HTTP transport so the exact query text can be golden-tested; the client
// POSTs the `query` form field and accepts application/sparql-results+json.

#include "pog/kg.hpp"

#include <string>
#include <vector>

namespace pog {

// Pre-defined query templates, with the query entity id substituted in.
std::string sparql_neighbors_query(const EntityId& id);
std::string sparql_label_query(const std::string& id);
std::string sparql_subgraph_query(const EntityId& id);

class SparqlGraphSource final : public GraphSource {
public:
    // endpoint: http://host[:port][/path]
    explicit SparqlGraphSource(std::string endpoint_url);

    std::vector<NeighborRecord> neighbors_1hop(const EntityId& e) const override;
    std::string label(const std::string& id) const override;
    std::vector<NamedNeighbor> expand_1hop(const EntityId& e) const override;

private:
    std::string execute(const std::string& query) const;

    std::string host_; // scheme://host[:port]
    std::string path_;
};

} // namespace pog
