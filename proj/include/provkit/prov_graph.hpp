#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "provkit/errors.hpp"

namespace provkit {

enum class AgentKind { Person, Organization, Software };
enum class EntityCategory { Data, Sample, Device, Document, Plan };
enum class NoteKind { Note, DesignComment, Warning };

/// How much workflow detail an answer should carry: leaf activities (fine)
/// or their top-level ancestors (coarse).
enum class Granularity { Fine, Coarse };

inline std::string to_string(Granularity g) { return g == Granularity::Fine ? "fine" : "coarse"; }

inline Granularity granularity_from_string(const std::string& text) {
    if (text == "fine") return Granularity::Fine;
    if (text == "coarse") return Granularity::Coarse;
    throw UserError("bad granularity '" + text + "': expected fine or coarse");
}

inline std::string to_string(AgentKind kind) {
    switch (kind) {
        case AgentKind::Person: return "person";
        case AgentKind::Organization: return "organization";
        case AgentKind::Software: return "software";
    }
    return "?";
}

inline AgentKind agent_kind_from_string(const std::string& text) {
    if (text == "person") return AgentKind::Person;
    if (text == "organization") return AgentKind::Organization;
    if (text == "software") return AgentKind::Software;
    throw UserError("bad agent kind '" + text + "'");
}

inline std::string to_string(EntityCategory category) {
    switch (category) {
        case EntityCategory::Data: return "data";
        case EntityCategory::Sample: return "sample";
        case EntityCategory::Device: return "device";
        case EntityCategory::Document: return "document";
        case EntityCategory::Plan: return "plan";
    }
    return "?";
}

inline EntityCategory entity_category_from_string(const std::string& text) {
    if (text == "data") return EntityCategory::Data;
    if (text == "sample") return EntityCategory::Sample;
    if (text == "device") return EntityCategory::Device;
    if (text == "document") return EntityCategory::Document;
    if (text == "plan") return EntityCategory::Plan;
    throw UserError("bad entity category '" + text + "'");
}

inline std::string to_string(NoteKind kind) {
    switch (kind) {
        case NoteKind::Note: return "note";
        case NoteKind::DesignComment: return "design-comment";
        case NoteKind::Warning: return "warning";
    }
    return "?";
}

inline NoteKind note_kind_from_string(const std::string& text) {
    if (text == "note") return NoteKind::Note;
    if (text == "design-comment") return NoteKind::DesignComment;
    if (text == "warning") return NoteKind::Warning;
    throw UserError("bad note kind '" + text + "'");
}

/// The nine supported relation types. Edges point from the result to its
/// origin (an entity points at the activity that generated it, a revision
/// points at what it revises, and so on).
enum class EdgeType {
    Used,              // activity -> entity
    WasGeneratedBy,    // entity -> activity
    WasAssociatedWith, // activity -> agent
    WasAttributedTo,   // entity -> agent
    ActedOnBehalfOf,   // agent -> agent
    WasDerivedFrom,    // entity -> entity
    WasInformedBy,     // activity -> activity
    HadPlan,           // activity -> plan entity
    WasRevisionOf,     // plan entity -> plan entity
};

inline const std::vector<EdgeType>& all_edge_types() {
    static const std::vector<EdgeType> types = {
        EdgeType::Used,           EdgeType::WasGeneratedBy, EdgeType::WasAssociatedWith,
        EdgeType::WasAttributedTo, EdgeType::ActedOnBehalfOf, EdgeType::WasDerivedFrom,
        EdgeType::WasInformedBy,  EdgeType::HadPlan,        EdgeType::WasRevisionOf};
    return types;
}

inline std::string to_string(EdgeType type) {
    switch (type) {
        case EdgeType::Used: return "used";
        case EdgeType::WasGeneratedBy: return "wasGeneratedBy";
        case EdgeType::WasAssociatedWith: return "wasAssociatedWith";
        case EdgeType::WasAttributedTo: return "wasAttributedTo";
        case EdgeType::ActedOnBehalfOf: return "actedOnBehalfOf";
        case EdgeType::WasDerivedFrom: return "wasDerivedFrom";
        case EdgeType::WasInformedBy: return "wasInformedBy";
        case EdgeType::HadPlan: return "hadPlan";
        case EdgeType::WasRevisionOf: return "wasRevisionOf";
    }
    return "?";
}

inline EdgeType edge_type_from_string(const std::string& text) {
    for (EdgeType type : all_edge_types())
        if (to_string(type) == text) return type;
    throw UserError("bad edge type '" + text + "'");
}

struct Agent {
    std::string id;
    std::string name;
    AgentKind kind = AgentKind::Person;
};

struct Activity {
    std::string id;
    std::string name;
    std::optional<std::string> parent; // enclosing activity, for granularity
    std::optional<std::string> start;  // opaque timestamps, ordered lexicographically
    std::optional<std::string> end;
    std::map<std::string, std::string> attributes;
};

struct Entity {
    std::string id;
    std::string name;
    EntityCategory category = EntityCategory::Data;
    std::map<std::string, std::string> attributes;
};

struct Note {
    std::string target; // any node id
    NoteKind kind = NoteKind::Note;
    std::string text;

    bool operator==(const Note&) const = default;
};

struct Edge {
    EdgeType type = EdgeType::Used;
    std::string from;
    std::string to;

    bool operator==(const Edge&) const = default;
};

/// A step in a derivation chain: the entity, the activity that generated it
/// (if recorded) and the agents responsible for either.
struct DerivationStep {
    std::string entity;
    std::optional<std::string> activity;
    std::vector<std::string> agents; // sorted, unique

    bool operator==(const DerivationStep&) const = default;
};

/// Workflow provenance graph over agents, activities and entities, connected
/// by typed edges and annotated with free-text notes. Node ids share one
/// namespace. Construction validates incrementally; deserialization validates
/// the assembled graph as a whole.
class ProvGraph {
public:
    // ---- construction ----

    void add_agent(std::string id, std::string name, AgentKind kind) {
        require_fresh_id(id);
        agents_.emplace(id, Agent{id, std::move(name), kind});
    }

    void add_activity(std::string id, std::string name, std::optional<std::string> parent = {},
                      std::optional<std::string> start = {}, std::optional<std::string> end = {},
                      std::map<std::string, std::string> attributes = {}) {
        require_fresh_id(id);
        if (parent && !activities_.count(*parent))
            throw UserError("unknown parent activity '" + *parent + "'");
        activities_.emplace(id, Activity{id, std::move(name), std::move(parent), std::move(start),
                                         std::move(end), std::move(attributes)});
    }

    void add_entity(std::string id, std::string name, EntityCategory category,
                    std::map<std::string, std::string> attributes = {}) {
        require_fresh_id(id);
        entities_.emplace(id, Entity{id, std::move(name), category, std::move(attributes)});
    }

    void add_note(const std::string& target, NoteKind kind, std::string text) {
        if (!has_node(target)) throw UserError("unknown node '" + target + "'");
        notes_.push_back(Note{target, kind, std::move(text)});
    }

    void add_edge(EdgeType type, const std::string& from, const std::string& to) {
        check_edge(type, from, to);
        Edge edge{type, from, to};
        if (std::find(edges_.begin(), edges_.end(), edge) != edges_.end())
            throw UserError("duplicate edge " + to_string(type) + " from '" + from + "' to '" + to + "'");
        if (type == EdgeType::WasRevisionOf && revision_reaches(to, from))
            throw UserError("wasRevisionOf cycle involving '" + from + "'");
        edges_.push_back(std::move(edge));
    }

    // ---- lookup ----

    bool has_node(const std::string& id) const {
        return agents_.count(id) || activities_.count(id) || entities_.count(id);
    }
    bool has_agent(const std::string& id) const { return agents_.count(id) > 0; }
    bool has_activity(const std::string& id) const { return activities_.count(id) > 0; }
    bool has_entity(const std::string& id) const { return entities_.count(id) > 0; }

    const Agent& agent(const std::string& id) const {
        auto it = agents_.find(id);
        if (it == agents_.end()) throw DataError("unknown agent '" + id + "'");
        return it->second;
    }
    const Activity& activity(const std::string& id) const {
        auto it = activities_.find(id);
        if (it == activities_.end()) throw DataError("unknown activity '" + id + "'");
        return it->second;
    }
    const Entity& entity(const std::string& id) const {
        auto it = entities_.find(id);
        if (it == entities_.end()) throw DataError("unknown entity '" + id + "'");
        return it->second;
    }

    const std::map<std::string, Agent>& agents() const { return agents_; }
    const std::map<std::string, Activity>& activities() const { return activities_; }
    const std::map<std::string, Entity>& entities() const { return entities_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Note>& all_notes() const { return notes_; }

    /// Edge targets of the given type leaving `from`, sorted.
    std::vector<std::string> targets(EdgeType type, const std::string& from) const {
        std::vector<std::string> out;
        for (const auto& edge : edges_)
            if (edge.type == type && edge.from == from) out.push_back(edge.to);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Edge sources of the given type arriving at `to`, sorted.
    std::vector<std::string> sources(EdgeType type, const std::string& to) const {
        std::vector<std::string> out;
        for (const auto& edge : edges_)
            if (edge.type == type && edge.to == to) out.push_back(edge.from);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<Note> notes_for(const std::string& target) const {
        std::vector<Note> out;
        for (const auto& note : notes_)
            if (note.target == target) out.push_back(note);
        return out;
    }

    // ---- activity nesting ----

    std::vector<std::string> children_of(const std::string& activity_id) const {
        std::vector<std::string> out;
        for (const auto& [id, act] : activities_)
            if (act.parent && *act.parent == activity_id) out.push_back(id);
        return out; // map iteration keeps this sorted
    }

    /// All strictly nested activities, sorted.
    std::vector<std::string> descendants_of(const std::string& activity_id) const {
        std::vector<std::string> out;
        std::vector<std::string> frontier = children_of(activity_id);
        while (!frontier.empty()) {
            std::string current = frontier.back();
            frontier.pop_back();
            out.push_back(current);
            for (auto& child : children_of(current)) frontier.push_back(std::move(child));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Enclosing activities from the immediate parent up to the root.
    std::vector<std::string> ancestors_of(const std::string& activity_id) const {
        std::vector<std::string> out;
        const Activity* current = &activity(activity_id);
        std::set<std::string> guard;
        while (current->parent) {
            if (!guard.insert(*current->parent).second)
                throw DataError("activity parent cycle involving '" + *current->parent + "'");
            out.push_back(*current->parent);
            current = &activity(*current->parent);
        }
        return out;
    }

    std::string top_ancestor_of(const std::string& activity_id) const {
        auto up = ancestors_of(activity_id);
        return up.empty() ? activity_id : up.back();
    }

    /// Activities nested under `activity_id` that have no children; the
    /// activity itself if it is already a leaf.
    std::vector<std::string> leaf_descendants_of(const std::string& activity_id) const {
        std::vector<std::string> leaves;
        auto down = descendants_of(activity_id);
        if (down.empty()) return {activity_id};
        for (const auto& id : down)
            if (children_of(id).empty()) leaves.push_back(id);
        std::sort(leaves.begin(), leaves.end());
        return leaves;
    }

    // ---- derivation ----

    /// The activity recorded as generating this entity; the smallest id wins
    /// if several generation edges exist.
    std::optional<std::string> generating_activity(const std::string& entity_id) const {
        auto gens = targets(EdgeType::WasGeneratedBy, entity_id);
        if (gens.empty()) return std::nullopt;
        return gens.front();
    }

    /// Entities this entity directly derives from: explicit wasDerivedFrom
    /// edges plus the inputs used by its generating activities.
    std::vector<std::string> derivation_predecessors(const std::string& entity_id) const {
        std::set<std::string> preds;
        for (const auto& origin : targets(EdgeType::WasDerivedFrom, entity_id)) preds.insert(origin);
        for (const auto& act : targets(EdgeType::WasGeneratedBy, entity_id))
            for (const auto& input : targets(EdgeType::Used, act)) preds.insert(input);
        return {preds.begin(), preds.end()};
    }

    /// Full upstream history of an entity, origins first, ending with the
    /// entity itself. Ties are broken by entity id, so the order is stable.
    std::vector<DerivationStep> derivation_chain(const std::string& entity_id) const {
        (void)entity(entity_id); // must exist

        // Backward closure with predecessor lists.
        std::map<std::string, std::vector<std::string>> preds;
        std::map<std::string, std::vector<std::string>> succs;
        std::vector<std::string> frontier = {entity_id};
        preds[entity_id] = derivation_predecessors(entity_id);
        while (!frontier.empty()) {
            std::string current = frontier.back();
            frontier.pop_back();
            for (const auto& p : preds.at(current)) {
                succs[p].push_back(current);
                if (!preds.count(p)) {
                    preds[p] = derivation_predecessors(p);
                    frontier.push_back(p);
                }
            }
        }

        std::map<std::string, size_t> indegree;
        for (const auto& [id, ps] : preds) indegree[id] = ps.size();
        std::set<std::string> ready;
        for (const auto& [id, deg] : indegree)
            if (deg == 0) ready.insert(id);

        std::vector<DerivationStep> chain;
        while (!ready.empty()) {
            std::string current = *ready.begin();
            ready.erase(ready.begin());
            chain.push_back(make_step(current));
            auto it = succs.find(current);
            if (it == succs.end()) continue;
            for (const auto& next : it->second) {
                if (--indegree.at(next) == 0) ready.insert(next);
            }
        }
        if (chain.size() != preds.size())
            throw DataError("derivation cycle involving entity '" + entity_id + "'");
        return chain;
    }

    /// The activities that produced an entity's derivation chain, at the
    /// requested granularity, ordered by start time (activities without a
    /// start go last), then id.
    std::vector<std::string> activity_trace(const std::string& entity_id, Granularity granularity) const {
        std::set<std::string> selected;
        for (const auto& step : derivation_chain(entity_id)) {
            if (!step.activity) continue;
            if (granularity == Granularity::Coarse) {
                selected.insert(top_ancestor_of(*step.activity));
            } else {
                for (auto& leaf : leaf_descendants_of(*step.activity)) selected.insert(std::move(leaf));
            }
        }
        std::vector<std::string> out(selected.begin(), selected.end());
        std::sort(out.begin(), out.end(), [this](const std::string& a, const std::string& b) {
            const Activity& aa = activity(a);
            const Activity& ab = activity(b);
            bool sa = aa.start.has_value(), sb = ab.start.has_value();
            if (sa != sb) return sa; // timed activities first
            if (sa && *aa.start != *ab.start) return *aa.start < *ab.start;
            return a < b;
        });
        return out;
    }

    // ---- plans ----

    /// The revision chain through this plan, oldest first. Branching or
    /// merging revisions cannot be ordered and are rejected.
    std::vector<std::string> plan_revisions(const std::string& plan_id) const {
        const Entity& plan = entity(plan_id);
        if (plan.category != EntityCategory::Plan)
            throw UserError("entity '" + plan_id + "' is not a plan");

        // Connected component over wasRevisionOf, ignoring direction.
        std::set<std::string> component = {plan_id};
        bool grew = true;
        while (grew) {
            grew = false;
            for (const auto& edge : edges_) {
                if (edge.type != EdgeType::WasRevisionOf) continue;
                if (component.count(edge.from) && component.insert(edge.to).second) grew = true;
                if (component.count(edge.to) && component.insert(edge.from).second) grew = true;
            }
        }
        std::optional<std::string> oldest;
        for (const auto& id : component) {
            auto older = targets(EdgeType::WasRevisionOf, id);
            auto newer = sources(EdgeType::WasRevisionOf, id);
            if (older.size() > 1 || newer.size() > 1) throw UserError("ambiguous revision chain");
            if (older.empty()) {
                if (oldest) throw UserError("ambiguous revision chain");
                oldest = id;
            }
        }
        if (!oldest) throw UserError("ambiguous revision chain"); // a pure cycle has no oldest
        std::vector<std::string> chain = {*oldest};
        while (true) {
            auto newer = sources(EdgeType::WasRevisionOf, chain.back());
            if (newer.empty()) break;
            chain.push_back(newer.front());
        }
        return chain;
    }

    // ---- serialization ----

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json doc;
        doc["agents"] = nlohmann::ordered_json::array();
        for (const auto& [id, agent] : agents_) {
            doc["agents"].push_back(
                {{"id", id}, {"name", agent.name}, {"kind", to_string(agent.kind)}});
        }
        doc["activities"] = nlohmann::ordered_json::array();
        for (const auto& [id, act] : activities_) {
            nlohmann::ordered_json a;
            a["id"] = id;
            a["name"] = act.name;
            if (act.parent) a["parent"] = *act.parent;
            if (act.start) a["start"] = *act.start;
            if (act.end) a["end"] = *act.end;
            if (!act.attributes.empty()) a["attributes"] = act.attributes;
            doc["activities"].push_back(std::move(a));
        }
        doc["entities"] = nlohmann::ordered_json::array();
        for (const auto& [id, ent] : entities_) {
            nlohmann::ordered_json e;
            e["id"] = id;
            e["name"] = ent.name;
            e["category"] = to_string(ent.category);
            if (!ent.attributes.empty()) e["attributes"] = ent.attributes;
            doc["entities"].push_back(std::move(e));
        }
        std::vector<Edge> sorted = edges_;
        std::sort(sorted.begin(), sorted.end(), [](const Edge& a, const Edge& b) {
            std::string ta = to_string(a.type), tb = to_string(b.type);
            if (ta != tb) return ta < tb;
            if (a.from != b.from) return a.from < b.from;
            return a.to < b.to;
        });
        doc["edges"] = nlohmann::ordered_json::array();
        for (const auto& edge : sorted)
            doc["edges"].push_back(
                {{"type", to_string(edge.type)}, {"from", edge.from}, {"to", edge.to}});
        std::vector<Note> notes = notes_;
        std::sort(notes.begin(), notes.end(), [](const Note& a, const Note& b) {
            if (a.target != b.target) return a.target < b.target;
            std::string ka = to_string(a.kind), kb = to_string(b.kind);
            if (ka != kb) return ka < kb;
            return a.text < b.text;
        });
        doc["notes"] = nlohmann::ordered_json::array();
        for (const auto& note : notes)
            doc["notes"].push_back(
                {{"target", note.target}, {"kind", to_string(note.kind)}, {"text", note.text}});
        return doc;
    }

    static ProvGraph from_json(const nlohmann::json& doc) {
        ProvGraph g;
        try {
            for (const auto& a : doc.at("agents"))
                g.agents_.emplace(a.at("id").get<std::string>(),
                                  Agent{a.at("id").get<std::string>(), a.at("name").get<std::string>(),
                                        agent_kind_from_string(a.at("kind").get<std::string>())});
            for (const auto& a : doc.at("activities")) {
                Activity act;
                act.id = a.at("id").get<std::string>();
                act.name = a.at("name").get<std::string>();
                if (a.contains("parent")) act.parent = a.at("parent").get<std::string>();
                if (a.contains("start")) act.start = a.at("start").get<std::string>();
                if (a.contains("end")) act.end = a.at("end").get<std::string>();
                if (a.contains("attributes"))
                    act.attributes = a.at("attributes").get<std::map<std::string, std::string>>();
                g.activities_.emplace(act.id, std::move(act));
            }
            for (const auto& e : doc.at("entities")) {
                Entity ent;
                ent.id = e.at("id").get<std::string>();
                ent.name = e.at("name").get<std::string>();
                ent.category = entity_category_from_string(e.at("category").get<std::string>());
                if (e.contains("attributes"))
                    ent.attributes = e.at("attributes").get<std::map<std::string, std::string>>();
                g.entities_.emplace(ent.id, std::move(ent));
            }
            for (const auto& e : doc.at("edges"))
                g.edges_.push_back(Edge{edge_type_from_string(e.at("type").get<std::string>()),
                                        e.at("from").get<std::string>(),
                                        e.at("to").get<std::string>()});
            for (const auto& n : doc.at("notes"))
                g.notes_.push_back(Note{n.at("target").get<std::string>(),
                                        note_kind_from_string(n.at("kind").get<std::string>()),
                                        n.at("text").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            throw UserError(std::string("malformed provenance document: ") + e.what());
        }
        g.validate();
        return g;
    }

    /// Full consistency check; used after deserialization.
    void validate() const {
        // One namespace for all node ids.
        for (const auto& [id, _] : activities_)
            if (agents_.count(id)) throw UserError("duplicate node id '" + id + "'");
        for (const auto& [id, _] : entities_)
            if (agents_.count(id) || activities_.count(id))
                throw UserError("duplicate node id '" + id + "'");

        for (const auto& [id, act] : activities_) {
            if (act.parent && !activities_.count(*act.parent))
                throw UserError("unknown parent activity '" + *act.parent + "'");
            try {
                ancestors_of(id);
            } catch (const DataError& e) {
                throw UserError(e.what()); // parent cycle is a construction defect
            }
        }

        std::set<std::string> seen_edges;
        for (const auto& edge : edges_) {
            check_edge(edge.type, edge.from, edge.to);
            std::string key = to_string(edge.type) + "|" + edge.from + "|" + edge.to;
            if (!seen_edges.insert(key).second)
                throw UserError("duplicate edge " + to_string(edge.type) + " from '" + edge.from +
                                "' to '" + edge.to + "'");
        }

        // wasRevisionOf must be acyclic.
        for (const auto& edge : edges_)
            if (edge.type == EdgeType::WasRevisionOf && revision_reaches(edge.to, edge.from, &edge))
                throw UserError("wasRevisionOf cycle involving '" + edge.from + "'");

        for (const auto& note : notes_)
            if (!has_node(note.target)) throw UserError("unknown node '" + note.target + "'");
    }

private:
    void require_fresh_id(const std::string& id) const {
        if (id.empty()) throw UserError("empty node id");
        if (has_node(id)) throw UserError("duplicate node id '" + id + "'");
    }

    bool is_plan(const std::string& id) const {
        auto it = entities_.find(id);
        return it != entities_.end() && it->second.category == EntityCategory::Plan;
    }

    void check_edge(EdgeType type, const std::string& from, const std::string& to) const {
        if (!has_node(from)) throw UserError("unknown node '" + from + "'");
        if (!has_node(to)) throw UserError("unknown node '" + to + "'");
        auto fail = [&](const std::string& requirement) {
            throw UserError("edge " + to_string(type) + " must point from " + requirement);
        };
        switch (type) {
            case EdgeType::Used:
                if (!has_activity(from) || !has_entity(to)) fail("an activity to an entity");
                break;
            case EdgeType::WasGeneratedBy:
                if (!has_entity(from) || !has_activity(to)) fail("an entity to an activity");
                break;
            case EdgeType::WasAssociatedWith:
                if (!has_activity(from) || !has_agent(to)) fail("an activity to an agent");
                break;
            case EdgeType::WasAttributedTo:
                if (!has_entity(from) || !has_agent(to)) fail("an entity to an agent");
                break;
            case EdgeType::ActedOnBehalfOf:
                if (!has_agent(from) || !has_agent(to)) fail("an agent to an agent");
                break;
            case EdgeType::WasDerivedFrom:
                if (!has_entity(from) || !has_entity(to)) fail("an entity to an entity");
                break;
            case EdgeType::WasInformedBy:
                if (!has_activity(from) || !has_activity(to)) fail("an activity to an activity");
                break;
            case EdgeType::HadPlan:
                if (!has_activity(from) || !is_plan(to)) fail("an activity to a plan entity");
                break;
            case EdgeType::WasRevisionOf:
                if (!is_plan(from) || !is_plan(to)) fail("a plan entity to a plan entity");
                break;
        }
    }

    /// True when `target` is reachable from `start` over wasRevisionOf edges.
    /// `skip` ignores one edge (so validate can test each edge as-if-new).
    bool revision_reaches(const std::string& start, const std::string& target,
                          const Edge* skip = nullptr) const {
        std::set<std::string> visited;
        std::vector<std::string> frontier = {start};
        while (!frontier.empty()) {
            std::string current = frontier.back();
            frontier.pop_back();
            if (current == target) return true;
            if (!visited.insert(current).second) continue;
            for (const auto& edge : edges_) {
                if (edge.type != EdgeType::WasRevisionOf || edge.from != current) continue;
                if (skip && edge == *skip) continue;
                frontier.push_back(edge.to);
            }
        }
        return false;
    }

    DerivationStep make_step(const std::string& entity_id) const {
        DerivationStep step;
        step.entity = entity_id;
        step.activity = generating_activity(entity_id);
        std::set<std::string> agents;
        if (step.activity)
            for (const auto& a : targets(EdgeType::WasAssociatedWith, *step.activity)) agents.insert(a);
        for (const auto& a : targets(EdgeType::WasAttributedTo, entity_id)) agents.insert(a);
        step.agents.assign(agents.begin(), agents.end());
        return step;
    }

    std::map<std::string, Agent> agents_;
    std::map<std::string, Activity> activities_;
    std::map<std::string, Entity> entities_;
    std::vector<Edge> edges_;
    std::vector<Note> notes_;
};

} // namespace provkit
