#pragma once

/// \file io.hpp
/// Deterministic serialization for the command-line surface: an
/// insertion-ordered JSON writer with 17-significant-digit floats (identical
/// inputs produce byte-identical documents), flag-value parsers for complex
/// numbers, torus coordinates and polyline paths, readers and writers for
/// the divisor-pair and flat-bundle document formats, and the CSV trace
/// format.
///
/// Readers return raw, unvalidated data: validation (distinctness, Abel
/// condition, commuting monodromies) belongs to the caller so that failures
/// can be reported with their measured defect rather than as parse errors.

#include <optional>
#include <string>
#include <vector>

#include "turbulent/common.hpp"
#include "turbulent/elliptic.hpp"
#include "turbulent/foliation.hpp"
#include "turbulent/projective.hpp"

namespace turbulent::io {

/// Formats a double as the shortest %.17g representation; round-trips
/// exactly through strtod. Non-finite values are rendered as null (JSON has
/// no inf/nan literals).
std::string format_double(double v);

/// Streaming JSON writer. Keys are emitted in call order; members are
/// separated by ", " and keys by ": " so documents are single-line and
/// byte-stable. No validation beyond container balance (asserted).
class JsonWriter {
  public:
    JsonWriter& begin_object();
    JsonWriter& begin_object(const std::string& key);
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& begin_array(const std::string& key);
    JsonWriter& end_array();

    JsonWriter& field(const std::string& key, bool v);
    JsonWriter& field(const std::string& key, int v);
    JsonWriter& field(const std::string& key, long long v);
    JsonWriter& field(const std::string& key, double v);
    JsonWriter& field(const std::string& key, const std::string& v);
    JsonWriter& field(const std::string& key, const char* v);
    /// Complex values are written as two-element arrays [re, im].
    JsonWriter& field(const std::string& key, cplx v);

    JsonWriter& element(bool v);
    JsonWriter& element(int v);
    JsonWriter& element(double v);
    JsonWriter& element(const std::string& v);
    JsonWriter& element(cplx v);

    [[nodiscard]] const std::string& str() const { return buf_; }

  private:
    void separate();
    void write_key(const std::string& key);
    void write_string(const std::string& s);
    void write_number(double v);

    std::string buf_;
    std::vector<bool> first_;
};

/// Parses "re,im" (or a bare "re") into a complex number. Throws
/// std::invalid_argument on malformed input.
cplx parse_complex(const std::string& text);

/// Parses "a,b" into torus coordinates. Throws std::invalid_argument.
TorusPoint parse_coords(const std::string& text);

/// Parses a polyline "re,im;re,im;..." into cover points. Throws
/// std::invalid_argument on malformed input or an empty list.
std::vector<cplx> parse_path(const std::string& text);

/// Divisor-pair document as parsed, before validation.
struct RawPairDocument {
    cplx tau;
    std::vector<TorusPoint> x;
    std::vector<TorusPoint> y;
    cplx scale{1.0, 0.0};
};

/// Serializes a divisor pair with its form scale and recorded Abel defect.
/// Field order: tau, x, y, scale, abel_defect.
std::string write_pair_document(const DivisorPair& pair, cplx scale, cplx abel_defect);

/// Parses a pair document. Accepts unknown fields; "scale" defaults to 1.
/// Throws std::invalid_argument on malformed JSON or missing fields.
RawPairDocument read_pair_document(const std::string& text);

/// Flat-bundle document as parsed. Monodromies are 2x2 complex matrices
/// written row-major with [re, im] entries; "connection" (a constant
/// coefficient matrix), "theta", and "section" {"name", "param"} are
/// optional.
struct RawBundleDocument {
    cplx tau;
    SL2Element monodromy_a;
    SL2Element monodromy_b;
    std::optional<SL2Element> connection;
    std::optional<SL2Element> theta;
    std::string section_name;  ///< empty when the document names no section
    cplx section_param{0.0, 0.0};
};

RawBundleDocument read_bundle_document(const std::string& text);

/// Trace CSV: header "t,c_a,c_b,x_a,x_b,chart,drift", one row per accepted
/// sample, numbers in %.17g.
std::string write_trace_csv(const LeafTrace& trace);

/// Reads a whole file into a string. Throws std::invalid_argument when the
/// file cannot be opened.
std::string read_file(const std::string& path);

/// Writes a string to a file, truncating. Throws std::invalid_argument when
/// the file cannot be created.
void write_file(const std::string& path, const std::string& content);

}  // namespace turbulent::io
