#include "turbulent/io.hpp"

#include <cassert>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace turbulent::io {

std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void JsonWriter::separate() {
    if (!first_.empty()) {
        if (!first_.back()) buf_ += ", ";
        first_.back() = false;
    }
}

void JsonWriter::write_key(const std::string& key) {
    separate();
    write_string(key);
    buf_ += ": ";
}

void JsonWriter::write_string(const std::string& s) {
    buf_ += '"';
    for (char c : s) {
        switch (c) {
            case '"': buf_ += "\\\""; break;
            case '\\': buf_ += "\\\\"; break;
            case '\n': buf_ += "\\n"; break;
            case '\t': buf_ += "\\t"; break;
            case '\r': buf_ += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char esc[8];
                    std::snprintf(esc, sizeof esc, "\\u%04x", c);
                    buf_ += esc;
                } else {
                    buf_ += c;
                }
        }
    }
    buf_ += '"';
}

void JsonWriter::write_number(double v) { buf_ += format_double(v); }

JsonWriter& JsonWriter::begin_object() {
    separate();
    buf_ += '{';
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::begin_object(const std::string& key) {
    write_key(key);
    buf_ += '{';
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    assert(!first_.empty());
    first_.pop_back();
    buf_ += '}';
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    separate();
    buf_ += '[';
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::begin_array(const std::string& key) {
    write_key(key);
    buf_ += '[';
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    assert(!first_.empty());
    first_.pop_back();
    buf_ += ']';
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, bool v) {
    write_key(key);
    buf_ += v ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, int v) {
    return field(key, static_cast<long long>(v));
}

JsonWriter& JsonWriter::field(const std::string& key, long long v) {
    write_key(key);
    buf_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, double v) {
    write_key(key);
    write_number(v);
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, const std::string& v) {
    write_key(key);
    write_string(v);
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, const char* v) {
    return field(key, std::string(v));
}

JsonWriter& JsonWriter::field(const std::string& key, cplx v) {
    write_key(key);
    buf_ += '[';
    write_number(v.real());
    buf_ += ", ";
    write_number(v.imag());
    buf_ += ']';
    return *this;
}

JsonWriter& JsonWriter::element(bool v) {
    separate();
    buf_ += v ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::element(int v) {
    separate();
    buf_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::element(double v) {
    separate();
    write_number(v);
    return *this;
}

JsonWriter& JsonWriter::element(const std::string& v) {
    separate();
    write_string(v);
    return *this;
}

JsonWriter& JsonWriter::element(cplx v) {
    separate();
    buf_ += '[';
    write_number(v.real());
    buf_ += ", ";
    write_number(v.imag());
    buf_ += ']';
    return *this;
}

namespace {

double parse_double_token(const std::string& token, const std::string& whole) {
    const char* begin = token.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw std::invalid_argument("malformed number in \"" + whole + "\"");
    while (*end == ' ') ++end;
    if (*end != '\0') throw std::invalid_argument("trailing characters in \"" + whole + "\"");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

cplx parse_complex(const std::string& text) {
    const std::vector<std::string> parts = split(text, ',');
    if (parts.empty() || parts.size() > 2)
        throw std::invalid_argument("expected \"re,im\", got \"" + text + "\"");
    const double re = parse_double_token(parts[0], text);
    const double im = parts.size() == 2 ? parse_double_token(parts[1], text) : 0.0;
    return {re, im};
}

TorusPoint parse_coords(const std::string& text) {
    const std::vector<std::string> parts = split(text, ',');
    if (parts.size() != 2) throw std::invalid_argument("expected \"a,b\", got \"" + text + "\"");
    return {parse_double_token(parts[0], text), parse_double_token(parts[1], text)};
}

std::vector<cplx> parse_path(const std::string& text) {
    const std::vector<std::string> parts = split(text, ';');
    std::vector<cplx> path;
    path.reserve(parts.size());
    for (const std::string& p : parts) {
        if (p.empty()) continue;
        path.push_back(parse_complex(p));
    }
    if (path.empty()) throw std::invalid_argument("empty path \"" + text + "\"");
    return path;
}

std::string write_pair_document(const DivisorPair& pair, cplx scale, cplx abel_defect) {
    JsonWriter w;
    w.begin_object();
    w.field("tau", pair.lattice.tau());
    w.begin_array("x");
    for (const TorusPoint& p : pair.x) w.begin_array().element(p.a).element(p.b).end_array();
    w.end_array();
    w.begin_array("y");
    for (const TorusPoint& p : pair.y) w.begin_array().element(p.a).element(p.b).end_array();
    w.end_array();
    w.field("scale", scale);
    w.field("abel_defect", abel_defect);
    w.end_object();
    return w.str();
}

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
    }
}

cplx get_complex(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw std::invalid_argument(std::string("expected [re, im] for \"") + what + "\"");
    return {j[0].get<double>(), j[1].get<double>()};
}

const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw std::invalid_argument(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

std::vector<TorusPoint> get_points(const json& j, const char* what) {
    if (!j.is_array())
        throw std::invalid_argument(std::string("expected an array of [a, b] for \"") + what + "\"");
    std::vector<TorusPoint> pts;
    pts.reserve(j.size());
    for (const json& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw std::invalid_argument(std::string("expected [a, b] entries in \"") + what + "\"");
        pts.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return pts;
}

SL2Element get_matrix(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 ||
        !j[1].is_array() || j[1].size() != 2)
        throw std::invalid_argument(std::string("expected a 2x2 matrix for \"") + what + "\"");
    return {get_complex(j[0][0], what), get_complex(j[0][1], what), get_complex(j[1][0], what),
            get_complex(j[1][1], what)};
}

}  // namespace

RawPairDocument read_pair_document(const std::string& text) {
    const json j = parse_json(text);
    RawPairDocument doc;
    doc.tau = get_complex(require(j, "tau"), "tau");
    doc.x = get_points(require(j, "x"), "x");
    doc.y = get_points(require(j, "y"), "y");
    if (j.contains("scale")) doc.scale = get_complex(j.at("scale"), "scale");
    return doc;
}

RawBundleDocument read_bundle_document(const std::string& text) {
    const json j = parse_json(text);
    RawBundleDocument doc;
    doc.tau = get_complex(require(j, "tau"), "tau");
    doc.monodromy_a = get_matrix(require(j, "monodromy_a"), "monodromy_a");
    doc.monodromy_b = get_matrix(require(j, "monodromy_b"), "monodromy_b");
    if (j.contains("connection")) doc.connection = get_matrix(j.at("connection"), "connection");
    if (j.contains("theta")) doc.theta = get_matrix(j.at("theta"), "theta");
    if (j.contains("section")) {
        const json& s = j.at("section");
        const json& name = require(s, "name");
        if (!name.is_string()) throw std::invalid_argument("section \"name\" must be a string");
        doc.section_name = name.get<std::string>();
        if (s.contains("param")) doc.section_param = get_complex(s.at("param"), "param");
    }
    return doc;
}

std::string write_trace_csv(const LeafTrace& trace) {
    std::string out = "t,c_a,c_b,x_a,x_b,chart,drift\n";
    for (const LeafSample& s : trace.samples) {
        out += format_double(s.t);
        out += ',';
        out += format_double(s.c.a);
        out += ',';
        out += format_double(s.c.b);
        out += ',';
        out += format_double(s.x.a);
        out += ',';
        out += format_double(s.x.b);
        out += ',';
        out += s.chart;
        out += ',';
        out += format_double(s.drift);
        out += '\n';
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file \"" + path + "\"");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot create file \"" + path + "\"");
    out << content;
    if (!out) throw std::invalid_argument("write failed for \"" + path + "\"");
}

}  // namespace turbulent::io
