#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "fixtures.hpp"
#include "provkit/csv.hpp"
#include "provkit/database.hpp"
#include "provkit/schema.hpp"
#include "provkit/value.hpp"

using namespace provkit;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;

TEST_CASE("attribute types parse and render") {
    CHECK(AttributeType::parse("int") == AttributeType::integer());
    CHECK(AttributeType::parse("integer") == AttributeType::integer());
    CHECK(AttributeType::parse("text") == AttributeType::text());
    CHECK(AttributeType::parse("bool") == AttributeType::boolean());
    CHECK(AttributeType::parse("decimal(6,3)") == AttributeType::decimal(6, 3));
    CHECK(AttributeType::decimal(6, 3).to_string() == "decimal(6,3)");

    CHECK_THROWS_AS(AttributeType::parse("float"), UserError);
    CHECK_THROWS_AS(AttributeType::parse("decimal(6)"), UserError);
    CHECK_THROWS_AS(AttributeType::decimal(19, 0), UserError);
    CHECK_THROWS_AS(AttributeType::decimal(3, 4), UserError);
    CHECK_THROWS_AS(AttributeType::decimal(0, 0), UserError);
}

TEST_CASE("decimal values are exact scaled integers") {
    AttributeType d63 = AttributeType::decimal(6, 3);
    Value v = Value::parse(d63, "40.027");
    CHECK(v.unscaled() == 40027);
    CHECK(v.to_string() == "40.027");

    CHECK(Value::parse(d63, "40").to_string() == "40.000");
    CHECK(Value::parse(d63, "40.1").to_string() == "40.100");
    CHECK(Value::parse(d63, "-0.5").to_string() == "-0.500");
    CHECK(Value::parse(AttributeType::decimal(3, 1), "1.0").to_string() == "1.0");

    // No silent rounding, no overflow past the declared precision.
    CHECK_THROWS_AS(Value::parse(d63, "40.0275"), DataError);
    CHECK_THROWS_AS(Value::parse(d63, "1234.0"), DataError);
    CHECK_THROWS_AS(Value::parse(d63, "abc"), DataError);
    CHECK_THROWS_AS(Value::parse(d63, ""), DataError);
    CHECK_THROWS_AS(Value::parse(d63, "1..2"), DataError);
}

TEST_CASE("values of each kind parse and compare") {
    CHECK(Value::parse(AttributeType::integer(), "-17").as_integer() == -17);
    CHECK_THROWS_AS(Value::parse(AttributeType::integer(), "1.5"), DataError);
    CHECK(Value::parse(AttributeType::boolean(), "true").as_boolean());
    CHECK_THROWS_AS(Value::parse(AttributeType::boolean(), "TRUE"), DataError);
    CHECK(Value::parse(AttributeType::text(), "hello").as_text() == "hello");

    // Numerics compare exactly across scales; 0.30 == 0.3, and an integer is
    // a decimal of scale zero.
    CHECK(Value::parse(AttributeType::decimal(6, 2), "0.30")
              .equals(Value::parse(AttributeType::decimal(3, 1), "0.3")));
    CHECK(Value::integer(2).compare(Value::parse(AttributeType::decimal(6, 3), "2.000")) == 0);
    CHECK(Value::integer(2).compare(Value::parse(AttributeType::decimal(6, 3), "2.001")) < 0);
    CHECK(Value::parse(AttributeType::decimal(6, 3), "40.027")
              .compare(Value::parse(AttributeType::decimal(6, 3), "39.998")) > 0);

    CHECK(Value::text("a").compare(Value::text("b")) < 0);
    CHECK(Value::boolean(false).compare(Value::boolean(true)) < 0);
    CHECK_THROWS_MATCHES(Value::text("a").compare(Value::integer(1)), DataError,
                         MessageMatches(ContainsSubstring("cannot compare")));
}

TEST_CASE("schemas parse from declaration strings") {
    Schema r = parse_schema("R", "sample_id:int,intensity_1:decimal(6,3),voltage_1:decimal(3,1)");
    CHECK(r.relation_name == "R");
    REQUIRE(r.attributes.size() == 3);
    CHECK(r.attributes[0].name == "sample_id");
    CHECK(r.attributes[1].type == AttributeType::decimal(6, 3));

    CHECK_THROWS_AS(parse_schema("R", ""), UserError);
    CHECK_THROWS_AS(parse_schema("R", "a:int,a:text"), UserError);
    CHECK_THROWS_AS(parse_schema("R", "a"), UserError);
    CHECK_THROWS_AS(parse_schema("R", "a:float"), UserError);
    CHECK_THROWS_AS(parse_schema("", "a:int"), UserError);
    CHECK_THROWS_AS(parse_schema("R", "9a:int"), UserError);
}

TEST_CASE("inserts assign sequential ids with a relation prefix") {
    VersionedDatabase db;
    db.define_relation(parse_schema("R", "a:int"));
    db.define_relation(parse_schema("Results", "a:int")); // prefix 'r' is taken
    CHECK(db.insert("R", {Value::integer(1)}).to_string() == "r1");
    CHECK(db.insert("R", {Value::integer(2)}).to_string() == "r2");
    CHECK(db.insert("Results", {Value::integer(3)}).to_string() == "rel_Results_1");

    CHECK_THROWS_AS(db.define_relation(parse_schema("R", "b:int")), UserError);
    CHECK_THROWS_AS(db.insert("Q", {Value::integer(1)}), DataError);
    CHECK_THROWS_AS(db.insert("R", {Value::text("x")}), DataError);
    CHECK_THROWS_AS(db.insert("R", {Value::integer(1), Value::integer(2)}), DataError);
}

TEST_CASE("updates create revisions addressable by logical timestamp") {
    VersionedDatabase db = fixtures::lab_database(false);
    CHECK(db.current_version() == 1);

    // Before any update the tuple has a single revision and renders bare.
    {
        Snapshot snap = db.snapshot();
        const SnapshotRelation& r = snap.relation("R");
        REQUIRE(r.tuples.size() == 2);
        CHECK(r.tuples[1].first.to_string() == "r2");
    }

    ProvenanceId updated = db.update("R", "r2", fixtures::row(db.schema("R"), {"2", "41.033", "1.4"}));
    CHECK(db.current_version() == 2);
    CHECK(updated.to_string() == "r2@t2");

    // Once a second revision exists, every revision renders with its version.
    Snapshot at1 = db.snapshot_at(1);
    Snapshot at2 = db.snapshot_at(2);
    CHECK(at1.relation("R").tuples[1].first.to_string() == "r2@t1");
    CHECK(at1.relation("R").tuples[1].second[1].to_string() == "41.038");
    CHECK(at2.relation("R").tuples[1].first.to_string() == "r2@t2");
    CHECK(at2.relation("R").tuples[1].second[1].to_string() == "41.033");

    // Unrevised tuples keep their bare ids.
    CHECK(at2.relation("R").tuples[0].first.to_string() == "r1");
    CHECK(at2.relation("S").tuples.size() == 3);

    // The universe of registrable ids covers every revision.
    CHECK(db.tuple_ids("R") == std::vector<std::string>{"r1", "r2@t1", "r2@t2"});

    CHECK(db.snapshot_at(0).relation("R").tuples.empty());
    CHECK_THROWS_MATCHES(db.snapshot_at(3), DataError,
                         MessageMatches(ContainsSubstring("out of range")));
    CHECK_THROWS_MATCHES(db.update("R", "r9", fixtures::row(db.schema("R"), {"2", "1.0", "1.0"})),
                         DataError, MessageMatches(ContainsSubstring("unknown tuple base")));
}

TEST_CASE("a database can stamp versions on every id") {
    VersionedDatabase db(true);
    db.define_relation(parse_schema("R", "a:int"));
    CHECK(db.insert("R", {Value::integer(1)}).to_string() == "r1@t1");
    CHECK(db.snapshot().relation("R").tuples[0].first.to_string() == "r1@t1");
}

TEST_CASE("snapshots restrict to an id set for witness replay") {
    VersionedDatabase db = fixtures::lab_database();
    Snapshot snap = db.snapshot();
    Snapshot only = snap.restricted_to({"r1", "s3"});
    CHECK(only.relation("R").tuples.size() == 1);
    CHECK(only.relation("S").tuples.size() == 1);
    CHECK(only.relation("S").tuples[0].first.to_string() == "s3");
    CHECK_THROWS_MATCHES(snap.relation("Q"), DataError,
                         MessageMatches(ContainsSubstring("unknown relation")));
}

TEST_CASE("databases round-trip through JSON") {
    VersionedDatabase db = fixtures::lab_database();
    auto doc = db.to_json();
    VersionedDatabase copy = VersionedDatabase::from_json(doc);
    CHECK(copy.to_json() == doc);
    CHECK(copy.current_version() == db.current_version());

    // The copy keeps revision history: time travel still works.
    CHECK(copy.snapshot_at(1).relation("R").tuples[1].second[1].to_string() == "41.038");

    // Decimals survive exactly (serialized in their rendered form).
    CHECK(doc["relations"][0]["tuples"][0]["values"][1] == "40.027");

    CHECK_THROWS_AS(VersionedDatabase::from_json(nlohmann::json::parse("{}")), UserError);
}

TEST_CASE("CSV parsing handles quoting and reports malformed input") {
    std::istringstream ok("a,b\n1,\"x,y\"\n2,\"he said \"\"hi\"\"\"\r\n3,\n");
    CsvTable table = parse_csv(ok);
    CHECK(table.header == std::vector<std::string>{"a", "b"});
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0][1] == "x,y");
    CHECK(table.rows[1][1] == "he said \"hi\"");
    CHECK(table.rows[2][1] == "");

    std::istringstream ragged("a,b\n1\n");
    CHECK_THROWS_MATCHES(parse_csv(ragged), DataError,
                         MessageMatches(ContainsSubstring("expected 2")));

    std::istringstream unterminated("a,b\n1,\"x\n");
    CHECK_THROWS_MATCHES(parse_csv(unterminated), DataError,
                         MessageMatches(ContainsSubstring("unterminated")));

    std::istringstream empty("");
    CHECK_THROWS_MATCHES(parse_csv(empty), DataError,
                         MessageMatches(ContainsSubstring("missing header")));
}
