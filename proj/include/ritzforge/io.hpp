#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ritzforge/krylov.hpp"
#include "ritzforge/matrix.hpp"
#include "ritzforge/prescription.hpp"
#include "ritzforge/r_builder.hpp"

namespace ritzforge::io {

/// 17-significant-digit decimal form with a guaranteed decimal point
/// (or exponent), so emitted artifacts are byte-deterministic and
/// round-trip exactly.
std::string format_double(double x);

/// Matrix Market "array complex general": header, dimension line, then
/// one "re im" pair per line in column-major order.
void write_matrix_market(const Matrix& m, const std::filesystem::path& path);
Matrix read_matrix_market(const std::filesystem::path& path);

/// Prescription JSON: {"residual_norms": [...], "harmonic_ritz": [[...]]}
/// where each Ritz entry is {"re": x, "im": y} or the string "inf";
/// optional "first_row_signs" and "rho_signs" arrays of unimodular
/// {"re","im"} objects. Structural validation only; admissibility is
/// checked separately so violations stay reportable.
Prescription parse_prescription(const std::string& text);
std::string emit_prescription(const Prescription& p);

std::string emit_forge_report(const ForgeResult& f);
std::string emit_analysis(const AnalysisReport& a);
std::string emit_verify_report(const VerifyReport& v, double tol_res, double tol_ritz);
std::string emit_residual_csv(const std::vector<double>& history);
/// Single-line machine-parsable error record for the diagnostic stream.
std::string emit_error_record(std::string_view kind, std::string_view message);

std::string read_file(const std::filesystem::path& path);
/// Whole-file atomic write: write to a temporary sibling, then rename.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

} // namespace ritzforge::io
