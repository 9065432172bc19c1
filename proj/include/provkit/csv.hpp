#pragma once

#include <istream>
#include <string>
#include <vector>

#include "provkit/errors.hpp"

namespace provkit {

/// Minimal CSV support: comma-separated records, double-quoted fields with
/// "" escapes, tolerant of \r\n line endings and a trailing newline.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline CsvTable parse_csv(std::istream& in) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false; // true once the current record has any content
    size_t line = 1;

    auto end_field = [&] {
        record.push_back(field);
        field.clear();
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
        field_started = false;
    };

    char c;
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                end_field();
                field_started = true;
                break;
            case '\r':
                break; // handled with the following \n
            case '\n':
                ++line;
                if (field_started || !field.empty() || !record.empty()) end_record();
                break;
            default:
                field += c;
                field_started = true;
                break;
        }
    }
    if (in_quotes) throw DataError("malformed CSV: unterminated quoted field at line " + std::to_string(line));
    if (field_started || !field.empty() || !record.empty()) end_record();

    if (records.empty()) throw DataError("malformed CSV: missing header row");
    CsvTable table;
    table.header = std::move(records.front());
    for (size_t i = 1; i < records.size(); ++i) {
        if (records[i].size() != table.header.size())
            throw DataError("malformed CSV: record " + std::to_string(i) + " has " +
                            std::to_string(records[i].size()) + " fields, expected " +
                            std::to_string(table.header.size()));
        table.rows.push_back(std::move(records[i]));
    }
    return table;
}

} // namespace provkit
