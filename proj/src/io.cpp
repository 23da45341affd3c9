#include "ritzforge/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ritzforge/errors.hpp"

namespace ritzforge::io {

namespace {

using nlohmann::json;

std::string json_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (const char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out;
}

// {"im": y, "re": x} — keys sorted, as everywhere in emitted JSON.
std::string complex_json(Complex z) {
    return "{\"im\":" + format_double(z.imag()) + ",\"re\":" + format_double(z.real()) + "}";
}

std::string ritz_value_json(const HarmonicRitzValue& v) {
    if (v.is_infinite()) return "\"inf\"";
    return complex_json(v.value());
}

std::string ritz_steps_json(const std::vector<RitzTuple>& steps) {
    std::string out = "[";
    for (std::size_t k = 0; k < steps.size(); ++k) {
        if (k) out += ",";
        out += "[";
        for (std::size_t i = 0; i < steps[k].size(); ++i) {
            if (i) out += ",";
            out += ritz_value_json(steps[k][i]);
        }
        out += "]";
    }
    out += "]";
    return out;
}

std::string double_array_json(const std::vector<double>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        out += format_double(xs[i]);
    }
    out += "]";
    return out;
}

std::string index_set_json(const std::set<std::size_t>& s) {
    std::string out = "[";
    bool first = true;
    for (std::size_t v : s) {
        if (!first) out += ",";
        first = false;
        out += std::to_string(v);
    }
    out += "]";
    return out;
}

double require_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError("expected a number", path);
    return j.get<double>();
}

Complex parse_complex(const json& j, const std::string& path) {
    if (!j.is_object()) throw ParseError("expected an object with re/im", path);
    if (!j.contains("re") || !j.contains("im")) {
        throw ParseError("expected keys \"re\" and \"im\"", path);
    }
    for (const auto& item : j.items()) {
        if (item.key() != "re" && item.key() != "im") {
            throw ParseError("unknown key \"" + item.key() + "\"", path);
        }
    }
    return {require_number(j["re"], path + "/re"), require_number(j["im"], path + "/im")};
}

std::vector<Complex> parse_sign_list(const json& j, const std::string& path,
                                     std::size_t expected) {
    if (!j.is_array()) throw ParseError("expected an array", path);
    if (j.size() != expected) {
        throw ParseError("expected " + std::to_string(expected) + " entries", path);
    }
    std::vector<Complex> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "/" + std::to_string(i);
        const Complex z = parse_complex(j[i], p);
        if (std::abs(std::abs(z) - 1.0) > kUnitTol) {
            throw ParseError("sign is not unimodular", p);
        }
        out.push_back(z);
    }
    return out;
}

} // namespace

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s = buf;
    if (s.find_first_of(".eE") == std::string::npos &&
        s.find_first_of("nN") == std::string::npos) {
        s += ".0";
    }
    return s;
}

void write_matrix_market(const Matrix& m, const std::filesystem::path& path) {
    if (!m.all_finite()) {
        throw ArgumentError("matrix has non-finite entries and cannot be written");
    }
    std::string out = "%%MatrixMarket matrix array complex general\n";
    out += std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
    for (std::size_t j = 0; j < m.cols(); ++j) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
            out += format_double(m(i, j).real()) + " " + format_double(m(i, j).imag()) + "\n";
        }
    }
    atomic_write_file(path, out);
}

Matrix read_matrix_market(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) throw FormatError("missing header line", 1);
    ++lineno;
    {
        std::istringstream hs(line);
        std::string banner, object, fmt, field, symmetry;
        hs >> banner >> object >> fmt >> field >> symmetry;
        auto lower = [](std::string s) {
            for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            return s;
        };
        if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(fmt) != "array" ||
            lower(field) != "complex" || lower(symmetry) != "general") {
            throw FormatError("header must be \"%%MatrixMarket matrix array complex general\"",
                              lineno);
        }
    }

    // Skip comment lines, then read dimensions.
    std::size_t rows = 0, cols = 0;
    for (;;) {
        if (!std::getline(in, line)) throw FormatError("missing dimension line", lineno + 1);
        ++lineno;
        if (!line.empty() && line[0] == '%') continue;
        std::istringstream ds(line);
        long long r = 0, c = 0;
        if (!(ds >> r >> c) || r < 1 || c < 1) {
            throw FormatError("expected two positive dimensions", lineno);
        }
        std::string rest;
        if (ds >> rest) throw FormatError("trailing tokens after dimensions", lineno);
        rows = static_cast<std::size_t>(r);
        cols = static_cast<std::size_t>(c);
        break;
    }

    Matrix m(rows, cols);
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i < rows; ++i) {
            if (!std::getline(in, line)) {
                throw FormatError("file truncated: expected value line", lineno + 1);
            }
            ++lineno;
            std::istringstream vs(line);
            double re = 0.0, im = 0.0;
            if (!(vs >> re >> im)) throw FormatError("expected \"re im\"", lineno);
            std::string rest;
            if (vs >> rest) throw FormatError("trailing tokens after value", lineno);
            m(i, j) = Complex(re, im);
        }
    }
    while (std::getline(in, line)) {
        ++lineno;
        for (const char c : line) {
            if (!std::isspace(static_cast<unsigned char>(c))) {
                throw FormatError("unexpected content after matrix data", lineno);
            }
        }
    }
    return m;
}

Prescription parse_prescription(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), "/");
    }
    if (!doc.is_object()) throw ParseError("top level must be an object", "/");
    for (const auto& item : doc.items()) {
        if (item.key() != "residual_norms" && item.key() != "harmonic_ritz" &&
            item.key() != "first_row_signs" && item.key() != "rho_signs") {
            throw ParseError("unknown key \"" + item.key() + "\"", "/" + item.key());
        }
    }
    if (!doc.contains("residual_norms")) throw ParseError("missing key", "/residual_norms");
    if (!doc.contains("harmonic_ritz")) throw ParseError("missing key", "/harmonic_ritz");

    Prescription p;
    const json& norms = doc["residual_norms"];
    if (!norms.is_array() || norms.empty()) {
        throw ParseError("expected a nonempty array", "/residual_norms");
    }
    for (std::size_t i = 0; i < norms.size(); ++i) {
        p.schedule.norms.push_back(
            require_number(norms[i], "/residual_norms/" + std::to_string(i)));
    }
    const std::size_t n = p.schedule.norms.size();

    const json& ritz = doc["harmonic_ritz"];
    if (!ritz.is_array()) throw ParseError("expected an array", "/harmonic_ritz");
    if (ritz.size() != n) {
        throw ParseError("expected one tuple per step (" + std::to_string(n) + ")",
                         "/harmonic_ritz");
    }
    p.ritz.steps.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::string path = "/harmonic_ritz/" + std::to_string(k);
        const json& tuple = ritz[k];
        if (!tuple.is_array()) throw ParseError("expected an array", path);
        if (tuple.size() != k + 1) {
            throw ParseError("step " + std::to_string(k + 1) + " needs exactly " +
                                 std::to_string(k + 1) + " entries",
                             path);
        }
        for (std::size_t i = 0; i < tuple.size(); ++i) {
            const std::string vp = path + "/" + std::to_string(i);
            const json& v = tuple[i];
            if (v.is_string()) {
                if (v.get<std::string>() != "inf") {
                    throw ParseError("the only allowed string is \"inf\"", vp);
                }
                p.ritz.steps[k].push_back(HarmonicRitzValue::infinity());
            } else {
                p.ritz.steps[k].push_back(HarmonicRitzValue::finite(parse_complex(v, vp)));
            }
        }
        canonical_sort(p.ritz.steps[k]);
    }

    if (doc.contains("first_row_signs")) {
        p.first_row_signs = parse_sign_list(doc["first_row_signs"], "/first_row_signs", n);
    }
    if (doc.contains("rho_signs")) {
        p.rho_signs = parse_sign_list(doc["rho_signs"], "/rho_signs", n - 1);
    }
    return p;
}

std::string emit_prescription(const Prescription& p) {
    std::string out = "{";
    if (p.first_row_signs) {
        out += "\"first_row_signs\":[";
        for (std::size_t i = 0; i < p.first_row_signs->size(); ++i) {
            if (i) out += ",";
            out += complex_json((*p.first_row_signs)[i]);
        }
        out += "],";
    }
    out += "\"harmonic_ritz\":" + ritz_steps_json(p.ritz.steps);
    out += ",\"residual_norms\":" + double_array_json(p.schedule.norms);
    if (p.rho_signs) {
        out += ",\"rho_signs\":[";
        for (std::size_t i = 0; i < p.rho_signs->size(); ++i) {
            if (i) out += ",";
            out += complex_json((*p.rho_signs)[i]);
        }
        out += "]";
    }
    out += "}\n";
    return out;
}

std::string emit_forge_report(const ForgeResult& f) {
    std::string out = "{";
    out += "\"condition_estimates\":" + double_array_json(f.condition_estimates);
    out += ",\"harmonic_ritz\":" + ritz_steps_json(f.prescription.ritz.steps);
    out += ",\"n\":" + std::to_string(f.prescription.size());
    out += ",\"residual_norms\":" + double_array_json(f.prescription.schedule.norms);
    out += ",\"stagnation_steps\":" + index_set_json(f.prescription.schedule.plateau_steps());
    out += "}\n";
    return out;
}

std::string emit_analysis(const AnalysisReport& a) {
    std::string out = "{";
    out += "\"harmonic_ritz\":" + ritz_steps_json(a.harmonic_ritz_per_step);
    out += ",\"residual_history\":" + double_array_json(a.residual_history);
    out += ",\"stagnation_steps\":" + index_set_json(a.stagnation_steps);
    out += "}\n";
    return out;
}

std::string emit_verify_report(const VerifyReport& v, double tol_res, double tol_ritz) {
    std::string out = "{";
    out += "\"first_failing_step\":";
    out += v.first_failing_step ? std::to_string(*v.first_failing_step) : "null";
    out += ",\"per_step\":[";
    for (std::size_t i = 0; i < v.per_step.size(); ++i) {
        const StepDetail& d = v.per_step[i];
        if (i) out += ",";
        out += "{\"inf_count_match\":";
        out += d.inf_count_match ? "true" : "false";
        out += ",\"residual_abs_err\":" + format_double(d.residual_abs_err);
        out += ",\"ritz_rel_err\":" + format_double(d.ritz_rel_err);
        out += ",\"step\":" + std::to_string(d.step) + "}";
    }
    out += "],\"residual_max_abs_err\":" + format_double(v.residual_max_abs_err);
    out += ",\"ritz_max_rel_err\":" + format_double(v.ritz_max_rel_err);
    out += ",\"tolerances\":{\"residual_abs\":" + format_double(tol_res) +
           ",\"ritz_rel\":" + format_double(tol_ritz) + "}";
    out += ",\"verdict\":\"";
    out += v.pass ? "pass" : "fail";
    out += "\"}\n";
    return out;
}

std::string emit_residual_csv(const std::vector<double>& history) {
    std::string out = "step,residual_norm\n";
    for (std::size_t k = 0; k < history.size(); ++k) {
        out += std::to_string(k) + "," + format_double(history[k]) + "\n";
    }
    return out;
}

std::string emit_error_record(std::string_view kind, std::string_view message) {
    return "{\"error\":{\"kind\":\"" + json_escape(kind) + "\",\"message\":\"" +
           json_escape(message) + "\"}}\n";
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string());
}

} // namespace ritzforge::io
