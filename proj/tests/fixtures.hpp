#pragma once

// Shared test fixtures: a small lab scenario with two measurement relations,
// a workflow graph for the experiment that produced them, and an id database
// linking tuple ids to the exported data files.

#include <string>
#include <vector>

#include "provkit/database.hpp"
#include "provkit/id_database.hpp"
#include "provkit/prov_graph.hpp"
#include "provkit/schema.hpp"
#include "provkit/sha256.hpp"
#include "provkit/value.hpp"

namespace fixtures {

inline std::vector<provkit::Value> row(const provkit::Schema& schema,
                                       const std::vector<std::string>& texts) {
    std::vector<provkit::Value> values;
    values.reserve(texts.size());
    for (size_t i = 0; i < texts.size(); ++i)
        values.push_back(provkit::Value::parse(schema.attributes[i].type, texts[i]));
    return values;
}

/// Two relations of instrument readings keyed by sample_id. With the update
/// applied, r2 has two revisions (r2@t1 and r2@t2).
inline provkit::VersionedDatabase lab_database(bool with_update = true) {
    provkit::VersionedDatabase db;
    db.define_relation(
        provkit::parse_schema("R", "sample_id:int,intensity_1:decimal(6,3),voltage_1:decimal(3,1)"));
    db.define_relation(
        provkit::parse_schema("S", "sample_id:int,intensity_2:decimal(6,3),voltage_2:decimal(3,1)"));
    const provkit::Schema& r = db.schema("R");
    const provkit::Schema& s = db.schema("S");
    db.insert("R", row(r, {"1", "40.027", "0.9"}));
    db.insert("R", row(r, {"2", "41.038", "1.4"}));
    db.insert("S", row(s, {"1", "40.375", "1.0"}));
    db.insert("S", row(s, {"1", "39.998", "1.3"}));
    db.insert("S", row(s, {"1", "42.001", "1.0"}));
    if (with_update) db.update("R", "r2", row(r, {"2", "41.033", "1.4"}));
    return db;
}

constexpr const char* kLabQuery =
    "SELECT voltage_2 FROM R NATURAL JOIN S WHERE intensity_1 < intensity_2";

/// Workflow graph for the experiment: one top-level activity with three
/// nested steps, two plan revisions, the devices used, and the two datasets
/// the analysis produced.
inline provkit::ProvGraph lab_graph() {
    using namespace provkit;
    ProvGraph g;

    g.add_agent("researcher", "Researcher", AgentKind::Person);
    g.add_agent("institute", "Institute", AgentKind::Organization);

    g.add_activity("experiment", "Calibration experiment", std::nullopt, "2024-03-01T09:00",
                   "2024-03-01T17:00", {{"location", "wetlab"}});
    g.add_activity("prepare", "Prepare sample", "experiment", "2024-03-01T09:00",
                   "2024-03-01T10:00");
    g.add_activity("measure", "Measure intensities", "experiment", "2024-03-01T10:30",
                   "2024-03-01T12:00");
    g.add_activity("analyse", "Analyse readings", "experiment", "2024-03-01T13:00",
                   "2024-03-01T15:00");

    g.add_entity("sop-v1", "Measurement protocol v1", EntityCategory::Plan);
    g.add_entity("sop-v2", "Measurement protocol v2", EntityCategory::Plan);
    g.add_entity("cell-sample", "Prepared cell sample", EntityCategory::Sample);
    g.add_entity("microscopy-images", "Raw microscopy images", EntityCategory::Data);
    g.add_entity("dataset-R", "First reading series", EntityCategory::Data);
    g.add_entity("dataset-S", "Second reading series", EntityCategory::Data);
    g.add_entity("microscope", "Confocal microscope", EntityCategory::Device);
    g.add_entity("stimulation-device", "Stimulation device", EntityCategory::Device);

    g.add_edge(EdgeType::ActedOnBehalfOf, "researcher", "institute");
    g.add_edge(EdgeType::HadPlan, "experiment", "sop-v2");
    g.add_edge(EdgeType::WasRevisionOf, "sop-v2", "sop-v1");

    g.add_edge(EdgeType::WasGeneratedBy, "cell-sample", "prepare");
    g.add_edge(EdgeType::Used, "measure", "cell-sample");
    g.add_edge(EdgeType::Used, "measure", "microscope");
    g.add_edge(EdgeType::Used, "measure", "stimulation-device");
    g.add_edge(EdgeType::WasGeneratedBy, "microscopy-images", "measure");
    g.add_edge(EdgeType::Used, "analyse", "microscopy-images");
    g.add_edge(EdgeType::WasGeneratedBy, "dataset-R", "analyse");
    g.add_edge(EdgeType::WasGeneratedBy, "dataset-S", "analyse");
    g.add_edge(EdgeType::WasInformedBy, "analyse", "measure");
    g.add_edge(EdgeType::WasDerivedFrom, "dataset-R", "microscopy-images");
    g.add_edge(EdgeType::WasDerivedFrom, "dataset-S", "microscopy-images");
    g.add_edge(EdgeType::WasAttributedTo, "dataset-R", "researcher");
    g.add_edge(EdgeType::WasAttributedTo, "dataset-S", "researcher");
    g.add_edge(EdgeType::WasAssociatedWith, "prepare", "researcher");
    g.add_edge(EdgeType::WasAssociatedWith, "measure", "researcher");
    g.add_edge(EdgeType::WasAssociatedWith, "analyse", "researcher");

    g.add_note("measure", NoteKind::Warning, "stimulation device recalibrated mid-series");
    g.add_note("analyse", NoteKind::DesignComment,
               "normalization follows protocol v2; v1 results are not comparable");
    return g;
}

/// Id database linking the tuples of R and S to their exported files and to
/// the workflow datasets. Must be built against the updated lab database so
/// r2 has its two revisions.
inline provkit::IdDatabase lab_ids() {
    provkit::IdDatabase ids;
    ids.register_file("fR", "r.csv", provkit::Sha256::hex_digest("fixture:R"), "R",
                      {"r1", "r2@t1", "r2@t2"}, "dataset-R");
    ids.register_file("fS", "s.csv", provkit::Sha256::hex_digest("fixture:S"), "S",
                      {"s1", "s2", "s3"}, "dataset-S");
    return ids;
}

} // namespace fixtures
