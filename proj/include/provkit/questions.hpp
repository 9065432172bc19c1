#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "provkit/algebra.hpp"
#include "provkit/database.hpp"
#include "provkit/errors.hpp"
#include "provkit/evaluate.hpp"
#include "provkit/id_database.hpp"
#include "provkit/polynomial.hpp"
#include "provkit/prov_graph.hpp"
#include "provkit/why_not.hpp"

namespace provkit {

enum class QuestionKind { What, When, Where, Who, Which, How, Why, WhyNot };
enum class QuestionScope { Data, Workflow, Combined };

inline std::string to_string(QuestionKind kind) {
    switch (kind) {
        case QuestionKind::What: return "what";
        case QuestionKind::When: return "when";
        case QuestionKind::Where: return "where";
        case QuestionKind::Who: return "who";
        case QuestionKind::Which: return "which";
        case QuestionKind::How: return "how";
        case QuestionKind::Why: return "why";
        case QuestionKind::WhyNot: return "why_not";
    }
    return "?";
}

inline QuestionKind question_kind_from_string(const std::string& text) {
    if (text == "what") return QuestionKind::What;
    if (text == "when") return QuestionKind::When;
    if (text == "where") return QuestionKind::Where;
    if (text == "who") return QuestionKind::Who;
    if (text == "which") return QuestionKind::Which;
    if (text == "how") return QuestionKind::How;
    if (text == "why") return QuestionKind::Why;
    if (text == "why_not" || text == "why-not") return QuestionKind::WhyNot;
    throw UserError("bad question kind '" + text + "'");
}

inline const std::vector<QuestionKind>& all_question_kinds() {
    static const std::vector<QuestionKind> kinds = {
        QuestionKind::What, QuestionKind::When, QuestionKind::Where, QuestionKind::Who,
        QuestionKind::Which, QuestionKind::How, QuestionKind::Why, QuestionKind::WhyNot};
    return kinds;
}

inline std::string to_string(QuestionScope scope) {
    switch (scope) {
        case QuestionScope::Data: return "data";
        case QuestionScope::Workflow: return "workflow";
        case QuestionScope::Combined: return "combined";
    }
    return "?";
}

inline QuestionScope question_scope_from_string(const std::string& text) {
    if (text == "data") return QuestionScope::Data;
    if (text == "workflow") return QuestionScope::Workflow;
    if (text == "combined") return QuestionScope::Combined;
    throw UserError("bad question scope '" + text + "'");
}

inline const std::vector<QuestionScope>& all_question_scopes() {
    static const std::vector<QuestionScope> scopes = {QuestionScope::Data, QuestionScope::Workflow,
                                                      QuestionScope::Combined};
    return scopes;
}

/// Raised for question kinds that have no data-level meaning: timing, actors
/// and instruments live in the workflow graph, not in tuple annotations.
struct UnsupportedScope : UserError {
    explicit UnsupportedScope(QuestionKind kind)
        : UserError(to_string(kind) + " is only defined for workflow provenance") {}
};

// ---- subjects ----

/// A row of a query result, identified by its 0-based position in value order.
struct RowSubject {
    std::shared_ptr<const AlgebraExpr> query;
    size_t row = 0;
};

struct EntitySubject {
    std::string entity_id;
};

/// A row that is expected but absent, for why-not questions.
struct ExpectationSubject {
    std::shared_ptr<const AlgebraExpr> query;
    std::vector<std::pair<std::string, Value>> expected;
};

using Subject = std::variant<RowSubject, EntitySubject, ExpectationSubject>;

// ---- answer payloads ----

/// A cell at file granularity: which registered file an attribute value
/// traces back to.
struct FileCell {
    std::string file_id;
    std::string attribute;

    bool operator==(const FileCell&) const = default;
    bool operator<(const FileCell& other) const {
        if (file_id != other.file_id) return file_id < other.file_id;
        return attribute < other.attribute;
    }

    std::string to_string() const { return file_id + "." + attribute; }
};

struct HowDataAnswer {
    Polynomial polynomial; // lifted to file variables at coarse granularity
    Granularity granularity = Granularity::Fine;
};

struct WhyDataAnswer {
    WitnessBasis basis; // witnesses of the (possibly lifted) polynomial
    Granularity granularity = Granularity::Fine;
};

struct WhereDataAnswer {
    std::map<std::string, std::set<WhereCell>> cells;
    // Present at coarse granularity: the same cells lifted to files.
    std::optional<std::map<std::string, std::set<FileCell>>> file_cells;
};

struct WhatDataAnswer {
    std::map<std::string, AttributeOrigin> origins;
    // Present at coarse granularity: per attribute, the registered files
    // backing its source relations.
    std::optional<std::map<std::string, std::set<std::string>>> files;
};

/// "How was it made" / "what happened": the derivation chain (origins first)
/// and the activities behind it at the requested granularity.
struct WorkflowTrace {
    std::vector<DerivationStep> chain;
    std::vector<Activity> activities;
    Granularity granularity = Granularity::Fine;
};

struct WorkflowPlans {
    struct PlanChain {
        std::string plan;
        std::vector<std::string> revisions; // oldest first, ending at the newest
    };
    std::vector<PlanChain> plans;
};

struct WorkflowLocations {
    struct Location {
        std::string activity;
        std::optional<std::string> location; // nearest "location" attribute up the nesting chain
    };
    std::vector<Location> locations;
};

struct WorkflowTimes {
    struct Span {
        std::string activity;
        std::optional<std::string> start;
        std::optional<std::string> end;
    };
    std::vector<Span> spans;
};

struct WorkflowAgents {
    std::vector<Agent> agents; // responsibility closure, sorted by id
};

struct WorkflowDevices {
    std::vector<Entity> devices; // sorted by id
};

struct WorkflowNotes {
    std::vector<Note> notes;
};

struct Answer;

/// One workflow entity reached from a data-level answer, with the files that
/// link to it and its own workflow answer of the same kind.
struct CombinedPart {
    std::string entity;
    std::vector<std::string> files;
    std::vector<DerivationStep> chain;
    std::shared_ptr<const Answer> workflow;
};

/// A combined answer carries the fine-grained data answer, the same
/// provenance lifted to file granularity (for how/why), and the workflow
/// story of every entity the involved files are registered to.
struct CombinedAnswer {
    std::shared_ptr<const Answer> data; // absent for workflow-only kinds
    std::optional<Polynomial> file_polynomial;
    std::optional<WitnessBasis> file_basis;
    std::vector<std::string> files; // all registered files involved, sorted
    std::vector<CombinedPart> parts;
};

using AnswerPayload =
    std::variant<HowDataAnswer, WhyDataAnswer, WhereDataAnswer, WhatDataAnswer, WhyNotReport,
                 WorkflowTrace, WorkflowPlans, WorkflowLocations, WorkflowTimes, WorkflowAgents,
                 WorkflowDevices, WorkflowNotes, CombinedAnswer>;

namespace detail {
inline nlohmann::ordered_json basis_to_json(const WitnessBasis& basis) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& witness : basis.witnesses) {
        auto w = nlohmann::ordered_json::array();
        for (const auto& id : witness) w.push_back(id.to_string());
        arr.push_back(std::move(w));
    }
    return arr;
}

inline nlohmann::ordered_json chain_to_json(const std::vector<DerivationStep>& chain) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& step : chain) {
        nlohmann::ordered_json s;
        s["entity"] = step.entity;
        if (step.activity) s["activity"] = *step.activity;
        s["agents"] = step.agents;
        arr.push_back(std::move(s));
    }
    return arr;
}
} // namespace detail

struct Answer {
    QuestionKind kind = QuestionKind::What;
    QuestionScope scope = QuestionScope::Data;
    AnswerPayload payload;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json doc;
        doc["kind"] = provkit::to_string(kind);
        doc["scope"] = provkit::to_string(scope);
        doc["answer"] = payload_json(payload);
        return doc;
    }

private:
    static nlohmann::ordered_json payload_json(const AnswerPayload& payload) {
        nlohmann::ordered_json j;
        if (const auto* how = std::get_if<HowDataAnswer>(&payload)) {
            j["granularity"] = provkit::to_string(how->granularity);
            j["polynomial"] = how->polynomial.to_string();
        } else if (const auto* why = std::get_if<WhyDataAnswer>(&payload)) {
            j["granularity"] = provkit::to_string(why->granularity);
            j["witnesses"] = detail::basis_to_json(why->basis);
        } else if (const auto* where = std::get_if<WhereDataAnswer>(&payload)) {
            j["cells"] = nlohmann::ordered_json::object();
            for (const auto& [attr, cells] : where->cells) {
                auto arr = nlohmann::ordered_json::array();
                for (const auto& cell : cells) arr.push_back(cell.to_string());
                j["cells"][attr] = std::move(arr);
            }
            if (where->file_cells) {
                j["file_cells"] = nlohmann::ordered_json::object();
                for (const auto& [attr, cells] : *where->file_cells) {
                    auto arr = nlohmann::ordered_json::array();
                    for (const auto& cell : cells) arr.push_back(cell.to_string());
                    j["file_cells"][attr] = std::move(arr);
                }
            }
        } else if (const auto* what = std::get_if<WhatDataAnswer>(&payload)) {
            j["attributes"] = nlohmann::ordered_json::array();
            for (const auto& [name, origin] : what->origins) {
                nlohmann::ordered_json a;
                a["name"] = name;
                a["type"] = origin.type.to_string();
                a["relations"] = nlohmann::ordered_json::array();
                for (const auto& rel : origin.relations) a["relations"].push_back(rel);
                if (what->files) {
                    auto it = what->files->find(name);
                    a["files"] = nlohmann::ordered_json::array();
                    if (it != what->files->end())
                        for (const auto& f : it->second) a["files"].push_back(f);
                }
                j["attributes"].push_back(std::move(a));
            }
        } else if (const auto* report = std::get_if<WhyNotReport>(&payload)) {
            j = report->to_json();
        } else if (const auto* trace = std::get_if<WorkflowTrace>(&payload)) {
            j["granularity"] = provkit::to_string(trace->granularity);
            j["chain"] = detail::chain_to_json(trace->chain);
            j["activities"] = nlohmann::ordered_json::array();
            for (const auto& act : trace->activities) {
                nlohmann::ordered_json a;
                a["id"] = act.id;
                a["name"] = act.name;
                if (act.start) a["start"] = *act.start;
                if (act.end) a["end"] = *act.end;
                j["activities"].push_back(std::move(a));
            }
        } else if (const auto* plans = std::get_if<WorkflowPlans>(&payload)) {
            j["plans"] = nlohmann::ordered_json::array();
            for (const auto& plan : plans->plans)
                j["plans"].push_back({{"plan", plan.plan}, {"revisions", plan.revisions}});
        } else if (const auto* locations = std::get_if<WorkflowLocations>(&payload)) {
            j["locations"] = nlohmann::ordered_json::array();
            for (const auto& loc : locations->locations) {
                nlohmann::ordered_json l;
                l["activity"] = loc.activity;
                if (loc.location) l["location"] = *loc.location;
                j["locations"].push_back(std::move(l));
            }
        } else if (const auto* times = std::get_if<WorkflowTimes>(&payload)) {
            j["times"] = nlohmann::ordered_json::array();
            for (const auto& span : times->spans) {
                nlohmann::ordered_json t;
                t["activity"] = span.activity;
                if (span.start) t["start"] = *span.start;
                if (span.end) t["end"] = *span.end;
                j["times"].push_back(std::move(t));
            }
        } else if (const auto* agents = std::get_if<WorkflowAgents>(&payload)) {
            j["agents"] = nlohmann::ordered_json::array();
            for (const auto& agent : agents->agents)
                j["agents"].push_back(
                    {{"id", agent.id}, {"name", agent.name}, {"kind", provkit::to_string(agent.kind)}});
        } else if (const auto* devices = std::get_if<WorkflowDevices>(&payload)) {
            j["devices"] = nlohmann::ordered_json::array();
            for (const auto& device : devices->devices)
                j["devices"].push_back({{"id", device.id}, {"name", device.name}});
        } else if (const auto* notes = std::get_if<WorkflowNotes>(&payload)) {
            j["notes"] = nlohmann::ordered_json::array();
            for (const auto& note : notes->notes)
                j["notes"].push_back({{"target", note.target},
                                      {"kind", provkit::to_string(note.kind)},
                                      {"text", note.text}});
        } else if (const auto* combined = std::get_if<CombinedAnswer>(&payload)) {
            if (combined->data) j["data"] = payload_json(combined->data->payload);
            if (combined->file_polynomial) j["file_polynomial"] = combined->file_polynomial->to_string();
            if (combined->file_basis) j["file_witnesses"] = detail::basis_to_json(*combined->file_basis);
            j["files"] = combined->files;
            j["entities"] = nlohmann::ordered_json::array();
            for (const auto& part : combined->parts) {
                nlohmann::ordered_json p;
                p["entity"] = part.entity;
                p["files"] = part.files;
                p["chain"] = detail::chain_to_json(part.chain);
                p["workflow"] = part.workflow->to_json();
                j["entities"].push_back(std::move(p));
            }
        }
        return j;
    }
};

/// Answers the eight provenance questions (what, when, where, who, which,
/// how, why, why not) at data, workflow or combined scope. Timing, actor and
/// instrument questions have no data-level meaning and raise UnsupportedScope
/// there; everything else is answered from the snapshot, the workflow graph
/// and the id database that bridges them.
class QuestionEngine {
public:
    QuestionEngine(const Snapshot& snapshot, const ProvGraph& graph, const IdDatabase& ids)
        : snapshot_(snapshot), graph_(graph), ids_(ids) {}

    Answer ask(QuestionKind kind, QuestionScope scope, const Subject& subject,
               Granularity granularity = Granularity::Fine) const {
        switch (scope) {
            case QuestionScope::Data: return ask_data(kind, subject, granularity);
            case QuestionScope::Workflow: return ask_workflow(kind, subject, granularity);
            case QuestionScope::Combined: return ask_combined(kind, subject, granularity);
        }
        throw UserError("bad question scope");
    }

private:
    const Snapshot& snapshot_;
    const ProvGraph& graph_;
    const IdDatabase& ids_;

    // ---- data scope ----

    Answer ask_data(QuestionKind kind, const Subject& subject, Granularity granularity) const {
        if (kind == QuestionKind::When || kind == QuestionKind::Who || kind == QuestionKind::Which)
            throw UnsupportedScope(kind);

        if (kind == QuestionKind::WhyNot) {
            const auto* expectation = std::get_if<ExpectationSubject>(&subject);
            if (!expectation)
                throw UserError("why_not questions need a query and an expected row");
            WhyNotReport report = why_not(snapshot_, expectation->query, expectation->expected);
            return Answer{kind, QuestionScope::Data, std::move(report)};
        }

        const auto* row_subject = std::get_if<RowSubject>(&subject);
        if (!row_subject) throw UserError("data questions need a query row subject");
        AnnotatedResult result = evaluate(snapshot_, row_subject->query);
        const ResultRow& row = result_row(result, row_subject->row);

        switch (kind) {
            case QuestionKind::How: {
                Polynomial poly = row.annotation;
                if (granularity == Granularity::Coarse) poly = ids_.lift(poly);
                return Answer{kind, QuestionScope::Data, HowDataAnswer{std::move(poly), granularity}};
            }
            case QuestionKind::Why: {
                Polynomial poly = row.annotation;
                if (granularity == Granularity::Coarse) poly = ids_.lift(poly);
                return Answer{kind, QuestionScope::Data,
                              WhyDataAnswer{poly.witness_basis(), granularity}};
            }
            case QuestionKind::Where: {
                WhereDataAnswer answer;
                answer.cells = row.where;
                if (granularity == Granularity::Coarse) {
                    std::map<std::string, std::set<FileCell>> lifted;
                    for (const auto& [attr, cells] : answer.cells) {
                        for (const auto& cell : cells) {
                            const FileRecord* rec = ids_.resolve(cell.tuple.to_string());
                            if (!rec)
                                throw DataError("tuple '" + cell.tuple.to_string() +
                                                "' is not registered in the id database");
                            lifted[attr].insert(FileCell{rec->file_id, cell.attribute});
                        }
                    }
                    answer.file_cells = std::move(lifted);
                }
                return Answer{kind, QuestionScope::Data, std::move(answer)};
            }
            case QuestionKind::What: {
                WhatDataAnswer answer;
                answer.origins = result.origins;
                if (granularity == Granularity::Coarse) {
                    std::map<std::string, std::set<std::string>> files;
                    for (const auto& [attr, origin] : answer.origins) {
                        for (const FileRecord* rec : ids_.records())
                            if (origin.relations.count(rec->relation)) files[attr].insert(rec->file_id);
                    }
                    answer.files = std::move(files);
                }
                return Answer{kind, QuestionScope::Data, std::move(answer)};
            }
            default:
                throw UserError("bad question kind");
        }
    }

    // ---- workflow scope ----

    Answer ask_workflow(QuestionKind kind, const Subject& subject, Granularity granularity) const {
        const auto* entity_subject = std::get_if<EntitySubject>(&subject);
        if (!entity_subject) throw UserError("workflow questions need an entity subject");
        const std::string& entity = entity_subject->entity_id;

        std::vector<DerivationStep> chain = graph_.derivation_chain(entity);
        std::vector<std::string> trace = graph_.activity_trace(entity, granularity);

        switch (kind) {
            case QuestionKind::How:
            case QuestionKind::What: {
                WorkflowTrace answer;
                answer.chain = std::move(chain);
                for (const auto& id : trace) answer.activities.push_back(graph_.activity(id));
                answer.granularity = granularity;
                return Answer{kind, QuestionScope::Workflow, std::move(answer)};
            }
            case QuestionKind::Why: {
                std::set<std::string> acts;
                for (const auto& step : chain) {
                    if (!step.activity) continue;
                    acts.insert(*step.activity);
                    for (const auto& up : graph_.ancestors_of(*step.activity)) acts.insert(up);
                }
                std::set<std::string> plan_ids;
                for (const auto& act : acts)
                    for (const auto& plan : graph_.targets(EdgeType::HadPlan, act)) plan_ids.insert(plan);
                WorkflowPlans answer;
                for (const auto& plan : plan_ids)
                    answer.plans.push_back({plan, graph_.plan_revisions(plan)});
                return Answer{kind, QuestionScope::Workflow, std::move(answer)};
            }
            case QuestionKind::Where: {
                WorkflowLocations answer;
                for (const auto& id : trace) answer.locations.push_back({id, location_of(id)});
                return Answer{kind, QuestionScope::Workflow, std::move(answer)};
            }
            case QuestionKind::When: {
                WorkflowTimes answer;
                for (const auto& id : trace) {
                    const Activity& act = graph_.activity(id);
                    answer.spans.push_back({id, act.start, act.end});
                }
                return Answer{kind, QuestionScope::Workflow, std::move(answer)};
            }
            case QuestionKind::Who: {
                std::set<std::string> agent_ids;
                for (const auto& step : chain)
                    agent_ids.insert(step.agents.begin(), step.agents.end());
                for (const auto& act : trace)
                    for (const auto& a : graph_.targets(EdgeType::WasAssociatedWith, act))
                        agent_ids.insert(a);
                // Responsibility closure: whoever the direct agents act for.
                std::vector<std::string> frontier(agent_ids.begin(), agent_ids.end());
                while (!frontier.empty()) {
                    std::string current = frontier.back();
                    frontier.pop_back();
                    for (const auto& up : graph_.targets(EdgeType::ActedOnBehalfOf, current))
                        if (agent_ids.insert(up).second) frontier.push_back(up);
                }
                WorkflowAgents answer;
                for (const auto& id : agent_ids) answer.agents.push_back(graph_.agent(id));
                return Answer{kind, QuestionScope::Workflow, std::move(answer)};
            }
            case QuestionKind::Which: {
                std::set<std::string> act_ids(trace.begin(), trace.end());
                for (const auto& id : trace)
                    for (const auto& down : graph_.descendants_of(id)) act_ids.insert(down);
                std::set<std::string> device_ids;
                for (const auto& act : act_ids)
                    for (const auto& used : graph_.targets(EdgeType::Used, act))
                        if (graph_.entity(used).category == EntityCategory::Device)
                            device_ids.insert(used);
                WorkflowDevices answer;
                for (const auto& id : device_ids) answer.devices.push_back(graph_.entity(id));
                return Answer{kind, QuestionScope::Workflow, std::move(answer)};
            }
            case QuestionKind::WhyNot: {
                // What went differently than expected: every note attached to
                // the derivation chain or the activities around it.
                std::set<std::string> targets;
                for (const auto& step : chain) targets.insert(step.entity);
                for (const auto& id : trace) {
                    targets.insert(id);
                    for (const auto& up : graph_.ancestors_of(id)) targets.insert(up);
                    for (const auto& down : graph_.descendants_of(id)) targets.insert(down);
                }
                std::vector<Note> notes;
                for (const auto& target : targets)
                    for (auto& note : graph_.notes_for(target)) notes.push_back(std::move(note));
                std::sort(notes.begin(), notes.end(), [](const Note& a, const Note& b) {
                    if (a.target != b.target) return a.target < b.target;
                    std::string ka = provkit::to_string(a.kind), kb = provkit::to_string(b.kind);
                    if (ka != kb) return ka < kb;
                    return a.text < b.text;
                });
                notes.erase(std::unique(notes.begin(), notes.end()), notes.end());
                return Answer{kind, QuestionScope::Workflow, WorkflowNotes{std::move(notes)}};
            }
        }
        throw UserError("bad question kind");
    }

    // ---- combined scope ----

    Answer ask_combined(QuestionKind kind, const Subject& subject, Granularity granularity) const {
        CombinedAnswer combined;
        std::set<std::string> tuple_ids;

        if (kind == QuestionKind::WhyNot) {
            const auto* expectation = std::get_if<ExpectationSubject>(&subject);
            if (!expectation)
                throw UserError("why_not questions need a query and an expected row");
            WhyNotReport report = why_not(snapshot_, expectation->query, expectation->expected);
            for (const auto& finding : report.findings) {
                if (const auto* ps = std::get_if<PickySelection>(&finding.detail))
                    for (const auto& id : ps->derivation) tuple_ids.insert(id.to_string());
                else if (const auto* mj = std::get_if<MissingJoinPartner>(&finding.detail))
                    tuple_ids.insert(mj->tuple.to_string());
            }
            combined.data = std::make_shared<Answer>(
                Answer{kind, QuestionScope::Data, std::move(report)});
        } else {
            const auto* row_subject = std::get_if<RowSubject>(&subject);
            if (!row_subject) throw UserError("combined questions need a query row subject");
            AnnotatedResult result = evaluate(snapshot_, row_subject->query);
            const ResultRow& row = result_row(result, row_subject->row);
            for (const auto& id : row.annotation.variables()) tuple_ids.insert(id.to_string());

            switch (kind) {
                case QuestionKind::How:
                    combined.file_polynomial = ids_.lift(row.annotation);
                    combined.file_basis = combined.file_polynomial->witness_basis();
                    combined.data = std::make_shared<Answer>(Answer{
                        kind, QuestionScope::Data, HowDataAnswer{row.annotation, Granularity::Fine}});
                    break;
                case QuestionKind::Why:
                    combined.file_polynomial = ids_.lift(row.annotation);
                    combined.file_basis = combined.file_polynomial->witness_basis();
                    combined.data = std::make_shared<Answer>(
                        Answer{kind, QuestionScope::Data,
                               WhyDataAnswer{row.annotation.witness_basis(), Granularity::Fine}});
                    break;
                case QuestionKind::Where:
                    combined.data = std::make_shared<Answer>(
                        Answer{kind, QuestionScope::Data, WhereDataAnswer{row.where, std::nullopt}});
                    break;
                case QuestionKind::What:
                    combined.data = std::make_shared<Answer>(Answer{
                        kind, QuestionScope::Data, WhatDataAnswer{result.origins, std::nullopt}});
                    break;
                case QuestionKind::When:
                case QuestionKind::Who:
                case QuestionKind::Which:
                    break; // workflow-only kinds: no data component
                case QuestionKind::WhyNot:
                    break; // handled above
            }
        }

        // Resolve tuples to files; why_not tolerates unregistered tuples
        // (how/why would have failed in lift above).
        std::map<std::string, std::vector<std::string>> entity_files;
        std::set<std::string> files;
        for (const auto& id : tuple_ids) {
            const FileRecord* rec = ids_.resolve(id);
            if (!rec) continue;
            files.insert(rec->file_id);
            if (rec->workflow_entity) {
                auto& list = entity_files[*rec->workflow_entity];
                if (std::find(list.begin(), list.end(), rec->file_id) == list.end())
                    list.push_back(rec->file_id);
            }
        }
        combined.files.assign(files.begin(), files.end());

        for (auto& [entity, file_list] : entity_files) {
            CombinedPart part;
            part.entity = entity;
            std::sort(file_list.begin(), file_list.end());
            part.files = std::move(file_list);
            part.chain = graph_.derivation_chain(entity);
            part.workflow = std::make_shared<Answer>(
                ask_workflow(kind, EntitySubject{entity}, granularity));
            combined.parts.push_back(std::move(part));
        }

        return Answer{kind, QuestionScope::Combined, std::move(combined)};
    }

    // ---- helpers ----

    static const ResultRow& result_row(const AnnotatedResult& result, size_t row) {
        if (row >= result.rows.size())
            throw UserError("row " + std::to_string(row) + " is out of range: the result has " +
                            std::to_string(result.rows.size()) + " row(s)");
        return result.rows[row];
    }

    /// The activity's own "location" attribute, or the nearest one up the
    /// nesting chain.
    std::optional<std::string> location_of(const std::string& activity_id) const {
        const Activity* current = &graph_.activity(activity_id);
        while (true) {
            auto it = current->attributes.find("location");
            if (it != current->attributes.end()) return it->second;
            if (!current->parent) return std::nullopt;
            current = &graph_.activity(*current->parent);
        }
    }
};

} // namespace provkit
