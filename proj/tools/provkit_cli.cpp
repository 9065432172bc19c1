// provkit: command-line front end for the provenance toolkit.
//
// Commands: init, load-csv, update, register-file, prov import/export,
// query, why-not, ask. Exit codes: 0 success, 1 user error (bad arguments,
// validation), 2 data error (query evaluation, type errors).

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "provkit/provkit.hpp"

namespace {

using namespace provkit;

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : text) {
        if (c == ',') {
            parts.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    parts.push_back(current);
    return parts;
}

/// Column-aligned plain-text table; deterministic for golden-file tests.
std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
    std::vector<size_t> widths(header.size());
    for (size_t i = 0; i < header.size(); ++i) widths[i] = header[i].size();
    for (const auto& row : rows)
        for (size_t i = 0; i < row.size() && i < widths.size(); ++i)
            widths[i] = std::max(widths[i], row[i].size());

    auto render_row = [&](const std::vector<std::string>& cells) {
        std::string line;
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) line += " | ";
            line += cells[i];
            if (i + 1 < cells.size()) line += std::string(widths[i] - cells[i].size(), ' ');
        }
        return line;
    };

    std::string out = render_row(header) + "\n";
    std::string rule;
    for (size_t i = 0; i < widths.size(); ++i) {
        if (i) rule += "-+-";
        rule += std::string(widths[i], '-');
    }
    out += rule + "\n";
    for (const auto& row : rows) out += render_row(row) + "\n";
    return out;
}

std::string render_where_cells(const AnnotatedResult& result, const ResultRow& row,
                               const IdDatabase& ids, Granularity granularity) {
    std::string out;
    for (size_t i = 0; i < result.attributes.size(); ++i) {
        const std::string& attr = result.attributes[i].name;
        if (i) out += "; ";
        out += attr + "={";
        auto it = row.where.find(attr);
        bool first = true;
        if (it != row.where.end()) {
            if (granularity == Granularity::Coarse) {
                std::set<FileCell> cells;
                for (const auto& cell : it->second) {
                    const FileRecord* rec = ids.resolve(cell.tuple.to_string());
                    if (!rec)
                        throw DataError("tuple '" + cell.tuple.to_string() +
                                        "' is not registered in the id database");
                    cells.insert(FileCell{rec->file_id, cell.attribute});
                }
                for (const auto& cell : cells) {
                    if (!first) out += ",";
                    out += cell.to_string();
                    first = false;
                }
            } else {
                for (const auto& cell : it->second) {
                    if (!first) out += ",";
                    out += cell.to_string();
                    first = false;
                }
            }
        }
        out += "}";
    }
    return out;
}

void run_query(Project& project, const std::string& sql, std::optional<uint64_t> at_time,
               const std::string& provenance, Granularity granularity) {
    Snapshot snapshot =
        at_time ? project.database().snapshot_at(*at_time) : project.database().snapshot();
    auto expr = parse_query(sql);
    AnnotatedResult result = evaluate(snapshot, expr);

    std::vector<std::string> header;
    for (const auto& attr : result.attributes) header.push_back(attr.name);
    if (!provenance.empty() && provenance != "what") header.push_back(provenance);

    std::vector<std::vector<std::string>> rows;
    for (const auto& row : result.rows) {
        std::vector<std::string> cells;
        for (const auto& value : row.values) cells.push_back(value.to_string());
        if (provenance == "how") {
            Polynomial poly = row.annotation;
            if (granularity == Granularity::Coarse) poly = project.id_database().lift(poly);
            cells.push_back(poly.to_string());
        } else if (provenance == "why") {
            Polynomial poly = row.annotation;
            if (granularity == Granularity::Coarse) poly = project.id_database().lift(poly);
            cells.push_back(poly.witness_basis().to_string());
        } else if (provenance == "where") {
            cells.push_back(render_where_cells(result, row, project.id_database(), granularity));
        }
        rows.push_back(std::move(cells));
    }
    std::cout << render_table(header, rows);

    if (provenance == "what") {
        std::vector<std::string> what_header = {"attribute", "type", "relations"};
        if (granularity == Granularity::Coarse) what_header.push_back("files");
        std::vector<std::vector<std::string>> what_rows;
        for (const auto& attr : result.attributes) {
            const AttributeOrigin& origin = result.origins.at(attr.name);
            std::string relations;
            for (const auto& rel : origin.relations) {
                if (!relations.empty()) relations += ",";
                relations += rel;
            }
            std::vector<std::string> cells = {attr.name, origin.type.to_string(), relations};
            if (granularity == Granularity::Coarse) {
                std::set<std::string> files;
                for (const FileRecord* rec : project.id_database().records())
                    if (origin.relations.count(rec->relation)) files.insert(rec->file_id);
                std::string joined;
                for (const auto& f : files) {
                    if (!joined.empty()) joined += ",";
                    joined += f;
                }
                cells.push_back(joined);
            }
            what_rows.push_back(std::move(cells));
        }
        std::cout << "\n" << render_table(what_header, what_rows);
    }
}

void run_load_csv(Project& project, const std::string& relation, const std::string& schema_spec,
                  const std::string& csv_path) {
    Schema schema = parse_schema(relation, schema_spec);
    std::ifstream in(csv_path);
    if (!in) throw UserError("cannot read '" + csv_path + "'");
    CsvTable table = parse_csv(in);

    std::vector<std::string> expected_header;
    for (const auto& attr : schema.attributes) expected_header.push_back(attr.name);
    if (table.header != expected_header) {
        std::string got;
        for (size_t i = 0; i < table.header.size(); ++i) {
            if (i) got += ",";
            got += table.header[i];
        }
        std::string want;
        for (size_t i = 0; i < expected_header.size(); ++i) {
            if (i) want += ",";
            want += expected_header[i];
        }
        throw UserError("CSV header mismatch: expected '" + want + "', got '" + got + "'");
    }

    project.database().define_relation(schema);
    std::vector<ProvenanceId> ids;
    for (const auto& record : table.rows) {
        std::vector<Value> values;
        for (size_t i = 0; i < record.size(); ++i)
            values.push_back(Value::parse(schema.attributes[i].type, record[i]));
        ids.push_back(project.database().insert(relation, std::move(values)));
    }
    project.save();
    std::cout << "loaded " << ids.size() << " tuple(s) into " << relation;
    if (!ids.empty()) std::cout << " (" << ids.front().to_string() << " .. " << ids.back().to_string() << ")";
    std::cout << "\n";
}

void run_update(Project& project, const std::string& relation, const std::string& id,
                const std::string& values_text) {
    const Schema& schema = project.database().schema(relation);
    std::vector<std::string> fields = split_commas(values_text);
    if (fields.size() != schema.attributes.size())
        throw UserError("expected " + std::to_string(schema.attributes.size()) + " values, got " +
                        std::to_string(fields.size()));
    std::vector<Value> values;
    for (size_t i = 0; i < fields.size(); ++i)
        values.push_back(Value::parse(schema.attributes[i].type, fields[i]));
    ProvenanceId new_id = project.database().update(relation, id, std::move(values));
    project.save();
    std::cout << "updated " << relation << ": " << new_id.to_string() << "\n";
}

void run_register_file(Project& project, const std::string& relation, const std::string& ids_text,
                       const std::string& entity, const std::string& file_id,
                       const std::string& path) {
    if (!project.database().has_relation(relation)) throw UserError("unknown relation '" + relation + "'");
    std::vector<std::string> ids = split_commas(ids_text);
    std::vector<std::string> known = project.database().tuple_ids(relation);
    for (const auto& id : ids) {
        if (id.empty()) throw UserError("empty tuple id in --ids");
        if (std::find(known.begin(), known.end(), id) == known.end())
            throw UserError("tuple '" + id + "' does not exist in relation '" + relation + "'");
    }
    std::optional<std::string> workflow_entity;
    if (!entity.empty()) {
        if (!project.graph().has_entity(entity)) throw UserError("unknown entity '" + entity + "'");
        workflow_entity = entity;
    }
    std::string sha = Sha256::hex_digest_file(path);
    std::string assigned =
        project.id_database().register_file(file_id, path, sha, relation, ids, workflow_entity);
    project.save();
    std::cout << "registered " << assigned << " (sha256 " << sha << ") covering " << ids.size()
              << " tuple(s) of " << relation << "\n";
}

void run_why_not(Project& project, const std::string& sql, const std::string& expect) {
    Snapshot snapshot = project.database().snapshot();
    auto expr = parse_query(sql);
    WhyNotReport report = why_not(snapshot, expr, parse_expectation(expect));
    if (report.findings.empty()) {
        std::cout << "no explanation found\n";
        return;
    }
    for (const auto& finding : report.findings) std::cout << finding.to_string() << "\n";
}

void run_ask(Project& project, const std::string& kind_text, const std::string& scope_text,
             const std::string& sql, std::optional<uint64_t> row, const std::string& entity,
             const std::string& expect, Granularity granularity) {
    QuestionKind kind = question_kind_from_string(kind_text);
    QuestionScope scope = question_scope_from_string(scope_text);

    // The documented unsupported combinations fail regardless of subject
    // arguments, so check them before demanding --sql/--entity.
    if (scope == QuestionScope::Data &&
        (kind == QuestionKind::When || kind == QuestionKind::Who || kind == QuestionKind::Which))
        throw UnsupportedScope(kind);

    Subject subject;
    if (scope == QuestionScope::Workflow) {
        if (entity.empty()) throw UserError("ask --scope workflow needs --entity");
        subject = EntitySubject{entity};
    } else if (kind == QuestionKind::WhyNot) {
        if (sql.empty() || expect.empty())
            throw UserError("ask --kind why_not needs --sql and --expect");
        subject = ExpectationSubject{parse_query(sql), parse_expectation(expect)};
    } else {
        if (sql.empty()) throw UserError("ask needs --sql with --row (or --entity at workflow scope)");
        subject = RowSubject{parse_query(sql), row.value_or(0)};
    }

    Snapshot snapshot = project.database().snapshot();
    QuestionEngine engine(snapshot, project.graph(), project.id_database());
    Answer answer = engine.ask(kind, scope, subject, granularity);
    std::cout << answer.to_json().dump(2) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"provenance toolkit: versioned relations, annotated queries, workflow graphs"};
    app.require_subcommand(1);

    std::string project_dir = ".";
    std::string relation, schema_spec, csv_path, id, values_text, ids_text, entity, file_id;
    std::string sql, expect, provenance, kind_text, scope_text, granularity_text = "fine";
    std::string init_dir, prov_file;
    std::optional<uint64_t> at_time, row;

    auto add_project_option = [&](CLI::App* cmd) {
        cmd->add_option("--project", project_dir, "project directory")->capture_default_str();
    };

    CLI::App* cmd_init = app.add_subcommand("init", "create a new project directory");
    cmd_init->add_option("dir", init_dir, "directory to initialize")->required();

    CLI::App* cmd_load = app.add_subcommand("load-csv", "define a relation and load tuples from CSV");
    add_project_option(cmd_load);
    cmd_load->add_option("--relation", relation, "relation name")->required();
    cmd_load->add_option("--schema", schema_spec, "schema as name:type,... (int, decimal(p,s), text, bool)")
        ->required();
    cmd_load->add_option("file", csv_path, "CSV file with a header row")->required();

    CLI::App* cmd_update = app.add_subcommand("update", "store a new revision of a tuple");
    add_project_option(cmd_update);
    cmd_update->add_option("--relation", relation, "relation name")->required();
    cmd_update->add_option("--id", id, "tuple id base, e.g. r2")->required();
    cmd_update->add_option("--values", values_text, "comma-separated values")->required();

    CLI::App* cmd_register = app.add_subcommand("register-file", "map tuple ids to a source file");
    add_project_option(cmd_register);
    cmd_register->add_option("--relation", relation, "relation the tuples belong to")->required();
    cmd_register->add_option("--ids", ids_text, "comma-separated tuple ids")->required();
    cmd_register->add_option("--entity", entity, "workflow entity the file stands for");
    cmd_register->add_option("--file-id", file_id, "explicit file id (default: next free f<n>)");
    cmd_register->add_option("file", csv_path, "file to fingerprint")->required();

    CLI::App* cmd_prov = app.add_subcommand("prov", "import or export the workflow graph");
    add_project_option(cmd_prov);
    cmd_prov->require_subcommand(1);
    CLI::App* cmd_prov_import = cmd_prov->add_subcommand("import", "replace the graph from a JSON file");
    cmd_prov_import->fallthrough(); // accept --project after the nested subcommand too
    cmd_prov_import->add_option("file", prov_file, "graph JSON file")->required();
    CLI::App* cmd_prov_export = cmd_prov->add_subcommand("export", "write the graph to a JSON file");
    cmd_prov_export->fallthrough();
    cmd_prov_export->add_option("file", prov_file, "output path")->required();

    CLI::App* cmd_query = app.add_subcommand("query", "run a query, optionally with provenance");
    add_project_option(cmd_query);
    cmd_query->add_option("--sql", sql, "query text")->required();
    cmd_query->add_option("--at-time", at_time, "evaluate against the snapshot at this version");
    cmd_query->add_option("--provenance", provenance, "how, why, where or what")
        ->check(CLI::IsMember({"how", "why", "where", "what"}));
    cmd_query->add_option("--granularity", granularity_text, "fine or coarse")
        ->capture_default_str()
        ->check(CLI::IsMember({"fine", "coarse"}));

    CLI::App* cmd_why_not = app.add_subcommand("why-not", "explain why an expected row is missing");
    add_project_option(cmd_why_not);
    cmd_why_not->add_option("--sql", sql, "query text")->required();
    cmd_why_not->add_option("--expect", expect, "expected row as attr=value,...")->required();

    CLI::App* cmd_ask = app.add_subcommand("ask", "ask a provenance question");
    add_project_option(cmd_ask);
    cmd_ask->add_option("--kind", kind_text, "what, when, where, who, which, how, why or why_not")
        ->required();
    cmd_ask->add_option("--scope", scope_text, "data, workflow or combined")->required();
    cmd_ask->add_option("--sql", sql, "query text (data/combined scope)");
    cmd_ask->add_option("--row", row, "0-based result row (data/combined scope)");
    cmd_ask->add_option("--entity", entity, "workflow entity id (workflow scope)");
    cmd_ask->add_option("--expect", expect, "expected row for why_not, as attr=value,...");
    cmd_ask->add_option("--granularity", granularity_text, "fine or coarse")
        ->capture_default_str()
        ->check(CLI::IsMember({"fine", "coarse"}));

    try {
        app.parse(argc, argv);

        if (cmd_init->parsed()) {
            provkit::Project::init(init_dir);
            std::cout << "initialized project at " << init_dir << "\n";
            return 0;
        }

        provkit::Project project = provkit::Project::open(project_dir);
        provkit::Granularity granularity = provkit::granularity_from_string(granularity_text);

        if (cmd_load->parsed()) {
            run_load_csv(project, relation, schema_spec, csv_path);
        } else if (cmd_update->parsed()) {
            run_update(project, relation, id, values_text);
        } else if (cmd_register->parsed()) {
            run_register_file(project, relation, ids_text, entity, file_id, csv_path);
        } else if (cmd_prov->parsed()) {
            if (cmd_prov_import->parsed()) {
                project.graph() = provkit::ProvGraph::from_json(provkit::Project::read_json(prov_file));
                project.save();
                std::cout << "imported provenance graph (" << project.graph().agents().size()
                          << " agents, " << project.graph().activities().size() << " activities, "
                          << project.graph().entities().size() << " entities)\n";
            } else {
                provkit::Project::write_atomic(prov_file, project.graph().to_json());
                std::cout << "exported provenance graph to " << prov_file << "\n";
            }
        } else if (cmd_query->parsed()) {
            run_query(project, sql, at_time, provenance, granularity);
        } else if (cmd_why_not->parsed()) {
            run_why_not(project, sql, expect);
        } else if (cmd_ask->parsed()) {
            run_ask(project, kind_text, scope_text, sql, row, entity, expect, granularity);
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1; // bad arguments are user errors
    } catch (const provkit::UserError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const provkit::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
