// Builds a hypergraph from three in-memory documents and runs the four
// entity-oriented search tasks against it.

#include <iostream>

#include "hgoe/hgoe.hpp"

int main() {
    using namespace hgoe;

    std::vector<Document> docs(3);
    docs[0].doc_id = "d1";
    docs[0].text = "Lisbon is the capital of Portugal. The city sits on the Tagus river estuary.";
    docs[0].mentions = {{"Lisbon", std::nullopt}, {"Portugal", std::nullopt}, {"Tagus", std::nullopt}};
    docs[0].links = {{"Lisbon", {"Portugal", "Tagus"}, false}};
    docs[1].doc_id = "d2";
    docs[1].text = "Porto is a coastal city in northern Portugal known for port wine and the Douro river.";
    docs[1].mentions = {{"Porto", std::nullopt}, {"Portugal", std::nullopt}, {"Douro", std::nullopt}};
    docs[1].links = {{"Porto", {"Portugal", "Douro"}, false}};
    docs[2].doc_id = "d3";
    docs[2].text = "Madrid is the capital of Spain. The Tagus river rises in Spain and flows west.";
    docs[2].mentions = {{"Madrid", std::nullopt}, {"Spain", std::nullopt}, {"Tagus", std::nullopt}};
    docs[2].links = {{"Madrid", {"Spain"}, false}};

    IndexConfig config;
    config.ratio = 1.0;
    const auto built = build_index(docs, config);
    std::cout << format_stats(built.graph.stats()) << '\n';

    RwsParams params;
    params.repeats = 2000;

    auto show = [](const char* title, const RankedList& list) {
        std::cout << title << '\n' << format_ranking(list, 5) << '\n';
    };
    show("documents for 'capital river'", ad_hoc_document_retrieval("capital river", built.graph, params));
    show("entities for 'capital river'", ad_hoc_entity_retrieval("capital river", built.graph, params));
    show("related to Lisbon", related_entity_finding("Lisbon", built.graph, params));
    const std::vector<std::string> examples = {"Lisbon", "Madrid"};
    show("more like Lisbon, Madrid", entity_list_completion(examples, built.graph, params));
}
