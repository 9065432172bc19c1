// Acceptance checks for the provenance toolkit. Each numbered check prints a
// single PASS or FAIL line and the process exits nonzero if any check fails,
// so the suite doubles as a quick smoke test:
//
//   1  annotated worked example        exact result row, polynomial, witnesses
//   2  why-not explanation             exact PickySelection finding
//   3  time-travel annotations (CLI)   r2@t1 vs r2@t2 via --at-time
//   4  granularity lifting             tuple ids -> file ids, merged terms
//   5  semiring law suite              >= 1000 randomized algebraic checks
//   6  witness oracle suite            >= 200 random instances vs reference
//   7  question totality               24 (kind, scope) pairs answer or refuse
//   8  graph round-trip + validation   JSON identity, nine edge constraints
//   9  combined trace                  data + file polynomials + activity chain

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fixtures.hpp"
#include "laws.hpp"
#include "provkit/provkit.hpp"
#include "witness_suite.hpp"

namespace fs = std::filesystem;
using namespace provkit;

namespace {

int g_failures = 0;

void expect(bool condition, const std::string& message) {
    if (!condition) throw std::runtime_error(message);
}

void run_check(int number, const std::string& title, const std::function<void()>& body) {
    try {
        body();
        std::cout << "PASS: " << number << " " << title << "\n";
    } catch (const std::exception& e) {
        std::cout << "FAIL: " << number << " " << title << ": " << e.what() << "\n";
        ++g_failures;
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---- helpers for the command-line check ----

struct CliResult {
    int code = -1;
    std::string out;
};

std::string shell_quote(const std::string& arg) {
    std::string quoted = "'";
    for (char c : arg) {
        if (c == '\'')
            quoted += "'\\''";
        else
            quoted += c;
    }
    quoted += "'";
    return quoted;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

CliResult run_cli(const fs::path& scratch, const std::vector<std::string>& args) {
    fs::path out_file = scratch / ".stdout";
    std::string command = shell_quote(PROVKIT_CLI_PATH);
    for (const auto& arg : args) command += " " + shell_quote(arg);
    command += " > " + shell_quote(out_file.string()) + " 2>&1";
    int status = std::system(command.c_str());
    CliResult result;
    result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_file);
    return result;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::string current;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) lines.push_back(current);
    return lines;
}

// ---- the checks ----

void check_worked_example() {
    auto start = std::chrono::steady_clock::now();
    VersionedDatabase db = fixtures::lab_database(/*with_update=*/false);
    AnnotatedResult result = evaluate(db.snapshot(), parse_query(fixtures::kLabQuery));
    expect(result.rows.size() == 1,
           "expected 1 result row, got " + std::to_string(result.rows.size()));
    expect(result.attributes.size() == 1 && result.attributes[0].name == "voltage_2",
           "result schema is not (voltage_2)");
    const ResultRow& row = result.rows[0];
    expect(row.values[0].to_string() == "1.0",
           "expected voltage_2 = 1.0, got " + row.values[0].to_string());
    expect(row.annotation.to_string() == "r1*s1 + r1*s3",
           "polynomial is " + row.annotation.to_string());
    expect(row.annotation.witness_basis().to_string() == "{{r1,s1},{r1,s3}}",
           "witness basis is " + row.annotation.witness_basis().to_string());
    expect(seconds_since(start) < 1.0, "took longer than 1 s");
}

void check_why_not() {
    VersionedDatabase db = fixtures::lab_database(/*with_update=*/false);
    WhyNotReport report = why_not(db.snapshot(), parse_query(fixtures::kLabQuery),
                                  parse_expectation("voltage_2=1.3"));
    expect(report.findings.size() == 1,
           "expected 1 finding, got " + std::to_string(report.findings.size()));
    const std::string rendered = report.findings[0].to_string();
    const std::string wanted =
        "PickySelection(predicate = intensity_1 < intensity_2, derivation = {r1,s2}, "
        "compared 40.027 vs 39.998)";
    expect(rendered == wanted, "finding is: " + rendered);
}

void check_time_travel_cli() {
    std::string tmpl = (fs::temp_directory_path() / "provkit_accept_XXXXXX").string();
    std::vector<char> buffer(tmpl.begin(), tmpl.end());
    buffer.push_back('\0');
    expect(mkdtemp(buffer.data()) != nullptr, "cannot create scratch directory");
    fs::path scratch(buffer.data());
    fs::path project = scratch / "proj";

    try {
        std::ofstream(scratch / "r.csv")
            << "sample_id,intensity_1,voltage_1\n1,40.027,0.9\n2,41.038,1.4\n";

        auto step = [&](const std::vector<std::string>& args) {
            CliResult r = run_cli(scratch, args);
            expect(r.code == 0, "command failed: " + args[0] + ": " + r.out);
            return r;
        };
        step({"init", project.string()});
        step({"load-csv", "--project", project.string(), "--relation", "R", "--schema",
              "sample_id:int,intensity_1:decimal(6,3),voltage_1:decimal(3,1)",
              (scratch / "r.csv").string()});
        step({"update", "--project", project.string(), "--relation", "R", "--id", "r2",
              "--values", "2,41.033,1.4"});

        const std::string sql = "SELECT intensity_1 FROM R";
        CliResult at_one = step({"query", "--project", project.string(), "--sql", sql,
                                 "--at-time", "1", "--provenance", "how"});
        auto lines = lines_of(at_one.out);
        expect(lines.size() == 4, "expected 4 output lines at time 1, got:\n" + at_one.out);
        expect(lines[2] == "40.027      | r1", "time 1 row 0 is: " + lines[2]);
        expect(lines[3] == "41.038      | r2@t1", "time 1 row 1 is: " + lines[3]);

        CliResult at_two = step({"query", "--project", project.string(), "--sql", sql,
                                 "--at-time", "2", "--provenance", "how"});
        lines = lines_of(at_two.out);
        expect(lines.size() == 4, "expected 4 output lines at time 2, got:\n" + at_two.out);
        expect(lines[2] == "40.027      | r1", "time 2 row 0 is: " + lines[2]);
        expect(lines[3] == "41.033      | r2@t2", "time 2 row 1 is: " + lines[3]);
    } catch (...) {
        std::error_code ec;
        fs::remove_all(scratch, ec);
        throw;
    }
    std::error_code ec;
    fs::remove_all(scratch, ec);
}

void check_granularity_lifting() {
    Polynomial poly = Polynomial::parse("r1*s1 + r1*s3");
    std::map<ProvenanceId, ProvenanceId> mapping = {
        {ProvenanceId::parse("r1"), ProvenanceId::parse("fR")},
        {ProvenanceId::parse("s1"), ProvenanceId::parse("fS")},
        {ProvenanceId::parse("s3"), ProvenanceId::parse("fS")},
    };
    Polynomial lifted = poly.rename(mapping);
    expect(lifted.to_string() == "2*fR*fS", "lifted polynomial is " + lifted.to_string());
    expect(lifted.witness_basis().to_string() == "{{fR,fS}}",
           "lifted witness basis is " + lifted.witness_basis().to_string());
}

void check_law_suite() {
    auto start = std::chrono::steady_clock::now();
    lawsuite::Stats stats = lawsuite::run(100);
    expect(stats.checks >= 1000,
           "only " + std::to_string(stats.checks) + " checks were executed");
    if (!stats.failures.empty())
        throw std::runtime_error(std::to_string(stats.failures.size()) +
                                 " failure(s), first: " + stats.failures.front());
    expect(seconds_since(start) < 10.0, "took longer than 10 s");
}

void check_witness_suite() {
    auto start = std::chrono::steady_clock::now();
    witness_suite::Stats stats = witness_suite::run(200);
    expect(stats.instances >= 200,
           "only " + std::to_string(stats.instances) + " instances were executed");
    expect(stats.rows_checked > 0, "no result rows were checked");
    if (!stats.failures.empty())
        throw std::runtime_error(std::to_string(stats.failures.size()) +
                                 " failure(s), first: " + stats.failures.front());
    expect(seconds_since(start) < 30.0, "took longer than 30 s");
}

void check_question_totality() {
    VersionedDatabase db = fixtures::lab_database();
    Snapshot snapshot = db.snapshot();
    ProvGraph graph = fixtures::lab_graph();
    IdDatabase ids = fixtures::lab_ids();
    QuestionEngine engine(snapshot, graph, ids);
    auto query = parse_query(fixtures::kLabQuery);

    auto subject_for = [&](QuestionKind kind, QuestionScope scope) -> Subject {
        if (scope == QuestionScope::Workflow) return EntitySubject{"dataset-R"};
        if (kind == QuestionKind::WhyNot)
            return ExpectationSubject{query, parse_expectation("voltage_2=1.3")};
        return RowSubject{query, 0};
    };

    size_t answered = 0;
    size_t refused = 0;
    for (QuestionKind kind : all_question_kinds()) {
        for (QuestionScope scope : all_question_scopes()) {
            bool unsupported =
                scope == QuestionScope::Data &&
                (kind == QuestionKind::When || kind == QuestionKind::Who ||
                 kind == QuestionKind::Which);
            const std::string pair = to_string(kind) + "/" + to_string(scope);
            if (unsupported) {
                try {
                    engine.ask(kind, scope, subject_for(kind, scope));
                    expect(false, pair + " was answered but must be refused");
                } catch (const UnsupportedScope& e) {
                    expect(std::string(e.what()) ==
                               to_string(kind) + " is only defined for workflow provenance",
                           pair + " refusal message is: " + e.what());
                    ++refused;
                }
            } else {
                Answer answer = engine.ask(kind, scope, subject_for(kind, scope));
                nlohmann::json doc = answer.to_json();
                expect(doc["kind"] == to_string(kind) && doc["scope"] == to_string(scope),
                       pair + " answer does not echo kind and scope");
                expect(doc.contains("answer"), pair + " answer has no payload");
                ++answered;
            }
        }
    }
    expect(answered == 21, "answered " + std::to_string(answered) + " of 21 pairs");
    expect(refused == 3, "refused " + std::to_string(refused) + " of 3 pairs");
}

void check_graph_round_trip() {
    ProvGraph graph = fixtures::lab_graph();
    nlohmann::ordered_json doc = graph.to_json();
    expect(ProvGraph::from_json(doc).to_json() == doc, "serialize/deserialize is not an identity");

    auto base = [] {
        ProvGraph g;
        g.add_agent("ag", "Agent", AgentKind::Person);
        g.add_activity("act", "Activity", std::nullopt, std::nullopt, std::nullopt);
        g.add_entity("e1", "Entity 1", EntityCategory::Data);
        g.add_entity("e2", "Entity 2", EntityCategory::Data);
        g.add_entity("p1", "Plan 1", EntityCategory::Plan);
        return g;
    };
    const std::vector<std::tuple<EdgeType, std::string, std::string>> violations = {
        {EdgeType::Used, "e1", "e2"},            // from must be an activity
        {EdgeType::WasGeneratedBy, "act", "e1"}, // from must be an entity
        {EdgeType::WasAssociatedWith, "e1", "ag"},
        {EdgeType::WasAttributedTo, "act", "ag"},
        {EdgeType::ActedOnBehalfOf, "ag", "act"}, // to must be an agent
        {EdgeType::WasDerivedFrom, "e1", "act"},
        {EdgeType::WasInformedBy, "act", "e1"},
        {EdgeType::HadPlan, "act", "e1"},    // to must be a plan entity
        {EdgeType::WasRevisionOf, "e1", "p1"}, // from must be a plan entity
    };
    size_t rejected = 0;
    for (const auto& [type, from, to] : violations) {
        ProvGraph g = base();
        try {
            g.add_edge(type, from, to);
            expect(false, provkit::to_string(type) + " " + from + " -> " + to + " was accepted");
        } catch (const UserError& e) {
            expect(std::string(e.what()).find("must point from") != std::string::npos,
                   provkit::to_string(type) + " rejection message is: " + std::string(e.what()));
            ++rejected;
        }
    }
    expect(rejected == 9, "only " + std::to_string(rejected) + " of 9 edge types were validated");
}

void check_combined_trace() {
    VersionedDatabase db = fixtures::lab_database();
    Snapshot snapshot = db.snapshot();
    ProvGraph graph = fixtures::lab_graph();
    IdDatabase ids = fixtures::lab_ids();
    QuestionEngine engine(snapshot, graph, ids);

    Answer answer = engine.ask(QuestionKind::How, QuestionScope::Combined,
                               RowSubject{parse_query(fixtures::kLabQuery), 0});
    nlohmann::json doc = answer.to_json();
    expect(doc["answer"]["data"]["polynomial"] == "r1*s1 + r1*s3",
           "data polynomial is " + doc["answer"]["data"]["polynomial"].dump());
    expect(doc["answer"]["file_polynomial"] == "2*fR*fS",
           "file polynomial is " + doc["answer"]["file_polynomial"].dump());

    bool found = false;
    for (const auto& part : doc["answer"]["entities"]) {
        if (part["entity"] != "dataset-R") continue;
        found = true;
        std::vector<std::string> activity_ids;
        for (const auto& act : part["workflow"]["answer"]["activities"])
            activity_ids.push_back(act["id"].get<std::string>());
        std::vector<std::string> wanted = {"prepare", "measure", "analyse"};
        size_t next = 0;
        for (const auto& id : activity_ids)
            if (next < wanted.size() && id == wanted[next]) ++next;
        expect(next == wanted.size(),
               "activities for dataset-R do not contain prepare, measure, analyse in order");
    }
    expect(found, "no combined part for dataset-R");
}

} // namespace

int main() {
    run_check(1, "annotated worked example", check_worked_example);
    run_check(2, "why-not explanation", check_why_not);
    run_check(3, "time-travel annotations via the command line", check_time_travel_cli);
    run_check(4, "granularity lifting to file ids", check_granularity_lifting);
    run_check(5, "semiring law suite", check_law_suite);
    run_check(6, "witness oracle suite", check_witness_suite);
    run_check(7, "question totality across kinds and scopes", check_question_totality);
    run_check(8, "graph round-trip and edge validation", check_graph_round_trip);
    run_check(9, "combined data and workflow trace", check_combined_trace);

    if (g_failures != 0) {
        std::cout << g_failures << " acceptance check(s) failed\n";
        return 1;
    }
    std::cout << "all acceptance checks passed\n";
    return 0;
}
