#include "hpml/parser.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hpml/csv.hpp"
#include "json.hpp"

namespace hpml::parser {

namespace {

using dataset::Date;
using dataset::RawListing;

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

void append_entity(std::string_view name, std::string& out) {
    if (name.empty()) {
        out += '&';
        return;
    }
    if (name[0] == '#') {
        int code = 0;
        bool ok = false;
        size_t i = 1;
        int base = 10;
        if (i < name.size() && (name[i] == 'x' || name[i] == 'X')) {
            base = 16;
            ++i;
        }
        for (; i < name.size(); ++i) {
            int digit;
            char c = name[i];
            if (c >= '0' && c <= '9') digit = c - '0';
            else if (base == 16 && c >= 'a' && c <= 'f') digit = c - 'a' + 10;
            else if (base == 16 && c >= 'A' && c <= 'F') digit = c - 'A' + 10;
            else { ok = false; break; }
            code = code * base + digit;
            ok = true;
            if (code > 0x10ffff) { ok = false; break; }
        }
        if (ok && code >= 32 && code < 127) {
            out += static_cast<char>(code);
        } else if (ok && code == 160) {
            out += ' ';
        } else if (ok) {
            out += '?';  // non-ASCII: placeholder, fixtures stay ASCII
        } else {
            out += '&';
            out += name;
            out += ';';
        }
        return;
    }
    if (iequals(name, "amp")) out += '&';
    else if (iequals(name, "lt")) out += '<';
    else if (iequals(name, "gt")) out += '>';
    else if (iequals(name, "quot")) out += '"';
    else if (iequals(name, "apos")) out += '\'';
    else if (iequals(name, "nbsp")) out += ' ';
    else {
        out += '&';
        out += name;
        out += ';';
    }
}

std::string decode_entities(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (size_t i = 0; i < raw.size();) {
        if (raw[i] != '&') {
            out += raw[i++];
            continue;
        }
        size_t semi = raw.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out += '&';
            ++i;
            continue;
        }
        append_entity(raw.substr(i + 1, semi - i - 1), out);
        i = semi + 1;
    }
    return out;
}

struct Attr {
    std::string name;
    std::string value;
};

// Reads one tag starting at document[pos] == '<'. Returns the position just
// past the tag and fills name/attrs for start tags (name empty otherwise).
size_t read_tag(std::string_view doc, size_t pos, std::string& name, std::vector<Attr>& attrs,
                bool& closing) {
    name.clear();
    attrs.clear();
    closing = false;
    size_t i = pos + 1;
    if (i < doc.size() && doc[i] == '!') {
        if (doc.compare(i, 3, "!--") == 0) {
            size_t end = doc.find("-->", i + 3);
            return end == std::string_view::npos ? doc.size() : end + 3;
        }
        size_t end = doc.find('>', i);
        return end == std::string_view::npos ? doc.size() : end + 1;
    }
    if (i < doc.size() && doc[i] == '?') {
        size_t end = doc.find('>', i);
        return end == std::string_view::npos ? doc.size() : end + 1;
    }
    if (i < doc.size() && doc[i] == '/') {
        closing = true;
        ++i;
    }
    while (i < doc.size() && (std::isalnum(static_cast<unsigned char>(doc[i])) || doc[i] == '-')) {
        name += static_cast<char>(std::tolower(static_cast<unsigned char>(doc[i])));
        ++i;
    }
    if (name.empty()) {
        // stray '<' in text: treat the character as text by skipping it
        return pos + 1;
    }
    while (i < doc.size() && doc[i] != '>') {
        while (i < doc.size() && (std::isspace(static_cast<unsigned char>(doc[i])) || doc[i] == '/'))
            ++i;
        if (i >= doc.size() || doc[i] == '>') break;
        Attr attr;
        while (i < doc.size() && doc[i] != '=' && doc[i] != '>' &&
               !std::isspace(static_cast<unsigned char>(doc[i])) && doc[i] != '/') {
            attr.name += static_cast<char>(std::tolower(static_cast<unsigned char>(doc[i])));
            ++i;
        }
        while (i < doc.size() && std::isspace(static_cast<unsigned char>(doc[i]))) ++i;
        if (i < doc.size() && doc[i] == '=') {
            ++i;
            while (i < doc.size() && std::isspace(static_cast<unsigned char>(doc[i]))) ++i;
            if (i < doc.size() && (doc[i] == '"' || doc[i] == '\'')) {
                char quote = doc[i++];
                size_t end = doc.find(quote, i);
                if (end == std::string_view::npos) end = doc.size();
                attr.value = decode_entities(doc.substr(i, end - i));
                i = end < doc.size() ? end + 1 : end;
            } else {
                size_t start = i;
                while (i < doc.size() && !std::isspace(static_cast<unsigned char>(doc[i])) &&
                       doc[i] != '>')
                    ++i;
                attr.value = decode_entities(doc.substr(start, i - start));
            }
        }
        if (!attr.name.empty()) attrs.push_back(std::move(attr));
    }
    return i < doc.size() ? i + 1 : doc.size();
}

const std::array<std::string_view, 12> kMonths = {
    "january", "february", "march",     "april",   "may",      "june",
    "july",    "august",   "september", "october", "november", "december"};

std::optional<Date> parse_loose_date(std::string_view text) {
    std::string t = csv::trim(text);
    if (auto iso = dataset::parse_iso_date(t)) return iso;
    std::string lower = csv::to_lower(t);
    for (size_t m = 0; m < kMonths.size(); ++m) {
        const std::string_view month = kMonths[m];
        if (lower.size() <= month.size() || lower.compare(0, month.size(), month) != 0) continue;
        std::istringstream rest(lower.substr(month.size()));
        int day = 0, year = 0;
        char comma = 0;
        if (!(rest >> day >> comma >> year) || comma != ',') return std::nullopt;
        char dummy;
        if (rest >> dummy) return std::nullopt;
        std::ostringstream iso;
        iso << year << '-';
        iso.width(2);
        iso.fill('0');
        iso << m + 1 << '-';
        iso.width(2);
        iso << day;
        return dataset::parse_iso_date(iso.str());
    }
    return std::nullopt;
}

std::optional<int> parse_int_cell(std::string_view text) {
    double value;
    if (!csv::parse_number(text, value)) return std::nullopt;
    if (std::floor(value) != value || std::abs(value) > 2e9) return std::nullopt;
    return static_cast<int>(value);
}

// Field setters keyed by CSV column name; "int" fields reject fractions.
void assign_field(RawListing& rec, const std::string& field, const std::string& kind,
                  const std::string& raw) {
    if (kind == "text") {
        if (field == "address") rec.address = raw;
        else if (field == "city") rec.city = raw;
        else if (field == "property_type") rec.property_type = raw;
        else if (field == "high_school") rec.high_school = raw;
        else if (field == "heating") rec.heating = raw;
        else if (field == "cooling") rec.cooling = raw;
        else if (field == "basement") rec.basement = raw;
        else if (field == "basement_description") rec.basement_description = raw;
        else throw RulesError("rule field is not a text column: " + field);
        return;
    }
    if (kind == "number") {
        double value;
        if (!csv::parse_number(raw, value)) return;
        if (field == "sqft") rec.sqft = value;
        else if (field == "price") rec.price = value;
        else if (field == "basement_sqft") rec.basement_sqft = value;
        else if (field == "tax_annual") rec.tax_annual = value;
        else throw RulesError("rule field is not a number column: " + field);
        return;
    }
    if (kind == "int") {
        std::optional<int> value = parse_int_cell(raw);
        if (!value) return;
        if (field == "year_built") rec.year_built = value;
        else if (field == "car_spaces") rec.car_spaces = value;
        else if (field == "beds") rec.beds = value;
        else if (field == "baths_full") rec.baths_full = value;
        else if (field == "baths_half") rec.baths_half = value;
        else if (field == "carpet_rooms") rec.carpet_rooms = value;
        else if (field == "hardwood_rooms") rec.hardwood_rooms = value;
        else throw RulesError("rule field is not an int column: " + field);
        return;
    }
    if (kind == "date") {
        if (field != "sold_date") throw RulesError("rule field is not a date column: " + field);
        rec.sold_date = parse_loose_date(raw);
        return;
    }
    throw RulesError("unknown rule kind: " + kind);
}

bool label_matches(const std::string& run, const std::string& label) {
    if (iequals(run, label)) return true;
    if (run.size() == label.size() + 1 && run.back() == ':' &&
        iequals(std::string_view(run).substr(0, label.size()), label)) {
        return true;
    }
    return false;
}

}  // namespace

DocumentText tokenize_html(std::string_view document) {
    DocumentText out;
    std::string pending;
    auto flush = [&] {
        std::string text = csv::trim(pending);
        if (!text.empty()) out.runs.push_back(std::move(text));
        pending.clear();
    };
    std::string name;
    std::vector<Attr> attrs;
    bool closing = false;
    size_t i = 0;
    while (i < document.size()) {
        if (document[i] != '<') {
            size_t next = document.find('<', i);
            if (next == std::string_view::npos) next = document.size();
            pending += decode_entities(document.substr(i, next - i));
            i = next;
            continue;
        }
        size_t after = read_tag(document, i, name, attrs, closing);
        if (after == i + 1 && name.empty()) {
            pending += '<';
            i = after;
            continue;
        }
        flush();
        i = after;
        if (!closing && (name == "script" || name == "style")) {
            std::string close = "</" + name;
            size_t end = i;
            while (end < document.size()) {
                end = document.find('<', end);
                if (end == std::string_view::npos) {
                    end = document.size();
                    break;
                }
                if (document.size() - end >= close.size() &&
                    iequals(document.substr(end, close.size()), close)) {
                    break;
                }
                ++end;
            }
            i = end;
            continue;
        }
        if (!closing && name == "a") {
            for (const Attr& attr : attrs) {
                if (attr.name == "href" && !attr.value.empty()) out.hrefs.push_back(attr.value);
            }
        }
    }
    flush();
    return out;
}

RuleTable rules_from_json(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw RulesError("rules file is not valid JSON");
    RuleTable rules;
    try {
        rules.detail_link_pattern = doc.at("detail_link_pattern").get<std::string>();
        for (const auto& a : doc.at("anchors")) rules.anchors.push_back(a.get<std::string>());
        for (const auto& f : doc.at("fields")) {
            FieldRule rule;
            rule.field = f.at("field").get<std::string>();
            rule.label = f.at("label").get<std::string>();
            rule.kind = f.at("kind").get<std::string>();
            rules.fields.push_back(std::move(rule));
        }
    } catch (const nlohmann::json::exception& e) {
        throw RulesError(std::string("malformed rules file: ") + e.what());
    }
    const std::vector<std::string>& columns = dataset::csv_columns();
    for (const FieldRule& rule : rules.fields) {
        bool known = false;
        for (const std::string& col : columns) known = known || col == rule.field;
        if (!known) throw RulesError("rule names unknown field: " + rule.field);
    }
    return rules;
}

RuleTable load_rules(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RulesError("cannot open rules file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return rules_from_json(buf.str());
}

std::vector<std::string> parse_index_page(std::string_view document, const RuleTable& rules) {
    DocumentText doc = tokenize_html(document);
    std::vector<std::string> out;
    for (const std::string& href : doc.hrefs) {
        if (href.find(rules.detail_link_pattern) == std::string::npos) continue;
        bool seen = false;
        for (const std::string& prior : out) seen = seen || prior == href;
        if (!seen) out.push_back(href);
    }
    return out;
}

ParsedPage parse_listing_page(std::string_view document, const RuleTable& rules) {
    DocumentText doc = tokenize_html(document);
    for (const std::string& anchor : rules.anchors) {
        bool found = false;
        for (const std::string& run : doc.runs) found = found || run.find(anchor) != std::string::npos;
        if (!found) throw ParseError("required anchor not found: " + anchor);
    }
    ParsedPage page;
    for (const FieldRule& rule : rules.fields) {
        for (size_t i = 0; i + 1 < doc.runs.size(); ++i) {
            if (!label_matches(doc.runs[i], rule.label)) continue;
            assign_field(page.record, rule.field, rule.kind, doc.runs[i + 1]);
            break;
        }
    }
    page.missing_fields = absent_fields(page.record);
    return page;
}

ParsedPage parse_listing_file(const std::string& path, const RuleTable& rules) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open listing file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    ParsedPage page = parse_listing_page(buf.str(), rules);
    page.source_path = path;
    return page;
}

std::vector<std::string> absent_fields(const RawListing& rec) {
    std::vector<std::string> out;
    auto note = [&](bool absent, const char* name) {
        if (absent) out.emplace_back(name);
    };
    note(!rec.sqft, "sqft");
    note(!rec.property_type, "property_type");
    note(!rec.year_built, "year_built");
    note(!rec.price, "price");
    note(!rec.car_spaces, "car_spaces");
    note(rec.address.empty(), "address");
    note(!rec.high_school, "high_school");
    note(!rec.beds, "beds");
    note(!rec.baths_full, "baths_full");
    note(!rec.baths_half, "baths_half");
    note(!rec.heating, "heating");
    note(!rec.cooling, "cooling");
    note(!rec.carpet_rooms, "carpet_rooms");
    note(!rec.hardwood_rooms, "hardwood_rooms");
    note(!rec.basement, "basement");
    note(!rec.basement_sqft, "basement_sqft");
    note(!rec.basement_description, "basement_description");
    note(!rec.tax_annual, "tax_annual");
    note(!rec.sold_date, "sold_date");
    note(rec.city.empty(), "city");
    return out;
}

void export_csv(const std::vector<ParsedPage>& pages, const std::string& path) {
    std::vector<RawListing> records;
    records.reserve(pages.size());
    for (const ParsedPage& page : pages) records.push_back(page.record);
    dataset::write_listings(records, path);
}

}  // namespace hpml::parser
