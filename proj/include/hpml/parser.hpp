#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hpml/dataset.hpp"

namespace hpml::parser {

struct RulesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// kind: "text", "number" (currency/commas tolerated), "int", "date"
// (ISO or "Month D, YYYY").  Field names are the dataset CSV columns.
struct FieldRule {
    std::string field;
    std::string label;
    std::string kind;
};

// anchors: text fragments that must appear on every listing page; the first
// one not found names the parse error.  detail_link_pattern: substring that
// marks an <a href> as a property-detail link on index pages.
struct RuleTable {
    std::string detail_link_pattern;
    std::vector<std::string> anchors;
    std::vector<FieldRule> fields;
};

RuleTable load_rules(const std::string& path);
RuleTable rules_from_json(const std::string& text);

struct ParsedPage {
    std::string source_path;
    dataset::RawListing record;
    std::vector<std::string> missing_fields;
};

// Tolerant pass over the markup: comments, doctypes, script/style bodies and
// unknown entities never fail, they just contribute no text.
struct DocumentText {
    std::vector<std::string> runs;
    std::vector<std::string> hrefs;
};
DocumentText tokenize_html(std::string_view document);

std::vector<std::string> parse_index_page(std::string_view document, const RuleTable& rules);
ParsedPage parse_listing_page(std::string_view document, const RuleTable& rules);
ParsedPage parse_listing_file(const std::string& path, const RuleTable& rules);

std::vector<std::string> absent_fields(const dataset::RawListing& rec);

void export_csv(const std::vector<ParsedPage>& pages, const std::string& path);

}  // namespace hpml::parser
