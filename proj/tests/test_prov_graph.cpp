#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "provkit/prov_graph.hpp"

using namespace provkit;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;

TEST_CASE("graphs round-trip through JSON unchanged") {
    ProvGraph g = fixtures::lab_graph();
    auto doc = g.to_json();
    ProvGraph copy = ProvGraph::from_json(doc);
    CHECK(copy.to_json() == doc);

    // Spot checks on the document layout.
    CHECK(doc["agents"][0]["id"] == "institute");
    CHECK(doc["agents"][0]["kind"] == "organization");
    CHECK(doc["entities"][0]["id"] == "cell-sample"); // sorted by id
    CHECK(doc["entities"][0]["category"] == "sample");
    CHECK(doc["edges"][0]["type"] == "actedOnBehalfOf"); // edges sorted by type
    CHECK(doc["notes"][0]["target"] == "analyse");
    CHECK(doc["notes"][0]["kind"] == "design-comment");
}

TEST_CASE("every edge type rejects wrongly-typed endpoints") {
    ProvGraph g = fixtures::lab_graph();
    auto rejected = [&](EdgeType type, const char* from, const char* to) {
        CHECK_THROWS_MATCHES(g.add_edge(type, from, to), UserError,
                             MessageMatches(ContainsSubstring("must point from")));
    };
    rejected(EdgeType::Used, "cell-sample", "microscope");             // entity -> entity
    rejected(EdgeType::WasGeneratedBy, "measure", "cell-sample");      // activity -> entity
    rejected(EdgeType::WasAssociatedWith, "dataset-R", "researcher");  // entity -> agent
    rejected(EdgeType::WasAttributedTo, "measure", "researcher");      // activity -> agent
    rejected(EdgeType::ActedOnBehalfOf, "researcher", "experiment");   // agent -> activity
    rejected(EdgeType::WasDerivedFrom, "dataset-R", "analyse");        // entity -> activity
    rejected(EdgeType::WasInformedBy, "analyse", "microscopy-images"); // activity -> entity
    rejected(EdgeType::HadPlan, "experiment", "cell-sample");          // plan target required
    rejected(EdgeType::WasRevisionOf, "cell-sample", "sop-v1");        // plan source required
}

TEST_CASE("node and edge bookkeeping rejects duplicates and unknowns") {
    ProvGraph g = fixtures::lab_graph();
    CHECK_THROWS_MATCHES(g.add_entity("researcher", "x", EntityCategory::Data), UserError,
                         MessageMatches(ContainsSubstring("duplicate node id")));
    CHECK_THROWS_MATCHES(g.add_edge(EdgeType::Used, "measure", "ghost"), UserError,
                         MessageMatches(ContainsSubstring("unknown node")));
    CHECK_THROWS_MATCHES(g.add_edge(EdgeType::Used, "measure", "cell-sample"), UserError,
                         MessageMatches(ContainsSubstring("duplicate edge")));
    CHECK_THROWS_MATCHES(g.add_note("ghost", NoteKind::Note, "x"), UserError,
                         MessageMatches(ContainsSubstring("unknown node")));
    CHECK_THROWS_MATCHES(g.add_activity("a", "x", "ghost"), UserError,
                         MessageMatches(ContainsSubstring("unknown parent activity")));
    CHECK_THROWS_MATCHES(g.add_edge(EdgeType::WasRevisionOf, "sop-v1", "sop-v2"), UserError,
                         MessageMatches(ContainsSubstring("wasRevisionOf cycle")));
}

TEST_CASE("derivation chains order the upstream history origins-first") {
    ProvGraph g = fixtures::lab_graph();
    auto chain = g.derivation_chain("dataset-R");
    REQUIRE(chain.size() == 5);
    CHECK(chain[0].entity == "cell-sample");
    CHECK(chain[1].entity == "microscope");
    CHECK(chain[2].entity == "stimulation-device");
    CHECK(chain[3].entity == "microscopy-images");
    CHECK(chain[4].entity == "dataset-R");

    CHECK(chain[0].activity == "prepare");
    CHECK(!chain[1].activity.has_value()); // devices were not generated here
    CHECK(chain[3].activity == "measure");
    CHECK(chain[4].activity == "analyse");

    CHECK(chain[4].agents == std::vector<std::string>{"researcher"});
    CHECK(chain[1].agents.empty());

    CHECK_THROWS_AS(g.derivation_chain("ghost"), DataError);
    CHECK_THROWS_AS(g.derivation_chain("experiment"), DataError); // not an entity
}

TEST_CASE("derivation cycles are reported") {
    ProvGraph g;
    g.add_entity("e1", "one", EntityCategory::Data);
    g.add_entity("e2", "two", EntityCategory::Data);
    g.add_edge(EdgeType::WasDerivedFrom, "e1", "e2");
    g.add_edge(EdgeType::WasDerivedFrom, "e2", "e1");
    CHECK_THROWS_MATCHES(g.derivation_chain("e1"), DataError,
                         MessageMatches(ContainsSubstring("derivation cycle")));
}

TEST_CASE("activity traces order by start time and honor granularity") {
    ProvGraph g = fixtures::lab_graph();
    CHECK(g.activity_trace("dataset-R", Granularity::Fine) ==
          std::vector<std::string>{"prepare", "measure", "analyse"});
    CHECK(g.activity_trace("dataset-R", Granularity::Coarse) ==
          std::vector<std::string>{"experiment"});
    CHECK(g.activity_trace("cell-sample", Granularity::Fine) ==
          std::vector<std::string>{"prepare"});
}

TEST_CASE("fine traces descend to leaf activities, coarse to top ancestors") {
    ProvGraph g;
    g.add_activity("exp", "experiment");
    g.add_activity("m", "measure", "exp");
    g.add_activity("m1", "warm up", "m", "09:00");
    g.add_activity("m2", "record", "m", "10:00");
    g.add_entity("out", "output", EntityCategory::Data);
    g.add_edge(EdgeType::WasGeneratedBy, "out", "m");

    CHECK(g.activity_trace("out", Granularity::Fine) == std::vector<std::string>{"m1", "m2"});
    CHECK(g.activity_trace("out", Granularity::Coarse) == std::vector<std::string>{"exp"});

    CHECK(g.children_of("exp") == std::vector<std::string>{"m"});
    CHECK(g.descendants_of("exp") == std::vector<std::string>{"m", "m1", "m2"});
    CHECK(g.ancestors_of("m1") == std::vector<std::string>{"m", "exp"});
    CHECK(g.top_ancestor_of("m1") == "exp");
    CHECK(g.leaf_descendants_of("exp") == std::vector<std::string>{"m1", "m2"});
}

TEST_CASE("plan revision chains run oldest to newest from any entry point") {
    ProvGraph g = fixtures::lab_graph();
    std::vector<std::string> expected = {"sop-v1", "sop-v2"};
    CHECK(g.plan_revisions("sop-v2") == expected);
    CHECK(g.plan_revisions("sop-v1") == expected);

    CHECK_THROWS_MATCHES(g.plan_revisions("dataset-R"), UserError,
                         MessageMatches(ContainsSubstring("not a plan")));

    g.add_entity("sop-v2b", "fork", EntityCategory::Plan);
    g.add_edge(EdgeType::WasRevisionOf, "sop-v2b", "sop-v1");
    CHECK_THROWS_MATCHES(g.plan_revisions("sop-v1"), UserError,
                         MessageMatches(ContainsSubstring("ambiguous revision chain")));
}

TEST_CASE("notes attach to nodes and keep their kind") {
    ProvGraph g = fixtures::lab_graph();
    auto notes = g.notes_for("measure");
    REQUIRE(notes.size() == 1);
    CHECK(notes[0].kind == NoteKind::Warning);
    CHECK(notes[0].text == "stimulation device recalibrated mid-series");
    CHECK(g.notes_for("prepare").empty());
}

TEST_CASE("deserialization validates the assembled graph") {
    ProvGraph g = fixtures::lab_graph();
    auto good = g.to_json();

    auto bad_edge = good;
    bad_edge["edges"][0]["type"] = "madeUpEdge";
    CHECK_THROWS_MATCHES(ProvGraph::from_json(bad_edge), UserError,
                         MessageMatches(ContainsSubstring("bad edge type")));

    auto bad_target = good;
    bad_target["notes"][0]["target"] = "ghost";
    CHECK_THROWS_AS(ProvGraph::from_json(bad_target), UserError);

    auto missing_keys = nlohmann::json::parse(R"({"agents": 3})");
    CHECK_THROWS_MATCHES(ProvGraph::from_json(missing_keys), UserError,
                         MessageMatches(ContainsSubstring("malformed provenance document")));

    // Parent cycles cannot be built through the API but could arrive in a
    // document; they must be rejected as malformed input, not crash later.
    auto cyclic = nlohmann::json::parse(R"({
        "agents": [], "entities": [], "edges": [], "notes": [],
        "activities": [
            {"id": "a", "name": "a", "parent": "b"},
            {"id": "b", "name": "b", "parent": "a"}
        ]
    })");
    CHECK_THROWS_AS(ProvGraph::from_json(cyclic), UserError);
}
