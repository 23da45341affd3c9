#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ritzforge/errors.hpp"
#include "ritzforge/io.hpp"
#include "ritzforge/krylov.hpp"
#include "ritzforge/linalg.hpp"
#include "ritzforge/prescription.hpp"
#include "ritzforge/r_builder.hpp"

namespace {

using namespace ritzforge;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitVerifyFail = 2;

std::string violations_message(const AdmissibilityReport& rep) {
    std::ostringstream os;
    os << "prescription is inadmissible (" << rep.violations.size() << " violation(s)):";
    for (const Violation& v : rep.violations) {
        os << " [step " << v.step << "] " << v.message << ";";
    }
    return os.str();
}

std::set<std::size_t> parse_plateau_list(const std::string& text) {
    std::set<std::size_t> out;
    if (text.empty()) return out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(item, &pos);
        } catch (const std::exception&) {
            throw ArgumentError("cannot parse plateau step \"" + item + "\"");
        }
        while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
        if (pos != item.size()) {
            throw ArgumentError("cannot parse plateau step \"" + item + "\"");
        }
        out.insert(static_cast<std::size_t>(v));
    }
    return out;
}

Vector unit_e1(std::size_t n) {
    Vector b(n, Complex(0.0, 0.0));
    b[0] = Complex(1.0, 0.0);
    return b;
}

Vector read_rhs(const std::string& path, std::size_t n) {
    const Matrix m = io::read_matrix_market(path);
    if (m.cols() != 1 || m.rows() != n) {
        throw ArgumentError("right-hand side must be an n x 1 matrix matching the system");
    }
    return m.column(0);
}

struct Options {
    std::string prescription_path;
    std::string matrix_path;
    std::string rhs_path;
    std::string out_path;
    std::string report_path;
    std::string csv_path;
    double tol_res = 1e-8;
    double tol_ritz = 1e-6;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::string plateau_list;
};

int run_forge(const Options& opt) {
    const Prescription p = io::parse_prescription(io::read_file(opt.prescription_path));
    const AdmissibilityReport rep = validate(p);
    if (!rep.ok()) throw AdmissibilityError(violations_message(rep));
    const ForgeResult f = forge(p);
    io::write_matrix_market(f.h, opt.out_path);
    if (!opt.report_path.empty()) {
        io::atomic_write_file(opt.report_path, io::emit_forge_report(f));
    }
    return kExitOk;
}

int run_analyze(const Options& opt) {
    const Matrix h = io::read_matrix_market(opt.matrix_path);
    if (!h.is_square()) throw ArgumentError("analyze requires a square matrix");
    const Vector b = opt.rhs_path.empty() ? unit_e1(h.rows()) : read_rhs(opt.rhs_path, h.rows());
    const AnalysisReport rep = analyze(h, b);
    io::atomic_write_file(opt.out_path, io::emit_analysis(rep));
    if (!opt.csv_path.empty()) {
        io::atomic_write_file(opt.csv_path, io::emit_residual_csv(rep.residual_history));
    }
    return kExitOk;
}

int run_verify(const Options& opt) {
    const Prescription p = io::parse_prescription(io::read_file(opt.prescription_path));
    const AdmissibilityReport rep = validate(p);
    if (!rep.ok()) throw AdmissibilityError(violations_message(rep));
    const Matrix h = opt.matrix_path.empty() ? forge(p).h : io::read_matrix_market(opt.matrix_path);
    const VerifyReport v = verify(p, h, opt.tol_res, opt.tol_ritz);
    io::atomic_write_file(opt.out_path, io::emit_verify_report(v, opt.tol_res, opt.tol_ritz));
    return v.pass ? kExitOk : kExitVerifyFail;
}

int run_random(const Options& opt) {
    const Prescription p =
        random_prescription(opt.n, parse_plateau_list(opt.plateau_list), opt.seed);
    io::atomic_write_file(opt.out_path, io::emit_prescription(p));
    return kExitOk;
}

int report_error(std::string_view kind, const std::exception& e) {
    std::cerr << io::emit_error_record(kind, e.what());
    return kExitError;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Construct and verify matrices with prescribed GMRES residual norms "
                 "and harmonic Ritz values"};
    app.require_subcommand(1);

    Options opt;

    CLI::App* forge_cmd = app.add_subcommand(
        "forge", "Construct the matrix realizing a prescription, write it as Matrix Market");
    forge_cmd->add_option("--prescription", opt.prescription_path, "prescription JSON")
        ->required();
    forge_cmd->add_option("--out", opt.out_path, "output matrix path (.mtx)")->required();
    forge_cmd->add_option("--report", opt.report_path, "construction report JSON");

    CLI::App* analyze_cmd = app.add_subcommand(
        "analyze", "Measure residual norms and harmonic Ritz values of a matrix");
    analyze_cmd->add_option("--matrix", opt.matrix_path, "matrix path (.mtx)")->required();
    analyze_cmd->add_option("--rhs", opt.rhs_path, "unit-norm starting vector (n x 1 .mtx)");
    analyze_cmd->add_option("--out", opt.out_path, "analysis JSON")->required();
    analyze_cmd->add_option("--csv", opt.csv_path, "residual history CSV");

    CLI::App* verify_cmd = app.add_subcommand(
        "verify", "Forge (or load) a matrix and check it reproduces the prescription");
    verify_cmd->add_option("--prescription", opt.prescription_path, "prescription JSON")
        ->required();
    verify_cmd->add_option("--matrix", opt.matrix_path,
                           "verify this matrix instead of re-forging");
    verify_cmd->add_option("--tol-res", opt.tol_res, "residual tolerance (absolute)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    verify_cmd->add_option("--tol-ritz", opt.tol_ritz, "harmonic Ritz tolerance (relative)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    verify_cmd->add_option("--out", opt.out_path, "verification report JSON")->required();

    CLI::App* random_cmd =
        app.add_subcommand("random", "Generate a random admissible prescription");
    random_cmd->add_option("--n", opt.n, "problem size")->required()->check(CLI::PositiveNumber);
    random_cmd->add_option("--plateaus", opt.plateau_list,
                           "comma-separated plateau step indices");
    random_cmd->add_option("--seed", opt.seed, "random seed")->capture_default_str();
    random_cmd->add_option("--out", opt.out_path, "prescription JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (forge_cmd->parsed()) return run_forge(opt);
        if (analyze_cmd->parsed()) return run_analyze(opt);
        if (verify_cmd->parsed()) return run_verify(opt);
        if (random_cmd->parsed()) return run_random(opt);
        return kExitError;
    } catch (const ParseError& e) {
        return report_error("parse_error", e);
    } catch (const FormatError& e) {
        return report_error("format_error", e);
    } catch (const AdmissibilityError& e) {
        return report_error("admissibility_error", e);
    } catch (const DegeneratePrescriptionError& e) {
        return report_error("degenerate_prescription", e);
    } catch (const SingularRError& e) {
        return report_error("singular_r", e);
    } catch (const PrematureTerminationError& e) {
        return report_error("premature_termination", e);
    } catch (const SingularSystemError& e) {
        return report_error("singular_system", e);
    } catch (const SingularTriangularError& e) {
        return report_error("singular_triangular", e);
    } catch (const ConvergenceError& e) {
        return report_error("convergence_error", e);
    } catch (const StructuralError& e) {
        return report_error("structural_error", e);
    } catch (const ArgumentError& e) {
        return report_error("argument_error", e);
    } catch (const InternalConsistencyError& e) {
        return report_error("internal_consistency", e);
    } catch (const IoError& e) {
        return report_error("io_error", e);
    } catch (const std::exception& e) {
        return report_error("internal_error", e);
    }
}
