#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nldiff/evolution.hpp"
#include "nldiff/stochastic.hpp"
#include "nldiff/viscous.hpp"

namespace nldiff {

/// thrown for malformed configuration; the CLI maps it to exit code 1
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class InitialFamily { Zero, Bump, Linear, Constant };
enum class BoundaryFamily { Zero, Constant, Affine };

struct InitialSpec {
    InitialFamily family = InitialFamily::Bump;
    double center = 0.0;
    double halfwidth = 0.6;
    double height = 1.0;
    double slope = 0.0;      // Linear
    double intercept = 0.0;  // Linear
    double value = 0.0;      // Constant
    bool normalize = false;  // rescale to unit interior mass
};

struct BoundarySpec {
    BoundaryFamily family = BoundaryFamily::Zero;
    double value = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
};

struct RunConfig {
    KernelSpec kernel;
    std::string table_path;  // tabulated family: two-column offset/density file
    double xl = -1.0, xr = 1.0;
    double h = 0.01;
    InitialSpec initial;
    BoundarySpec boundary;
    SolverConfig solver;
    std::optional<double> stationary_tol;  // solve: assert sup drift from u0
    std::vector<double> viscous_epsilons{1e-1, 1e-2, 1e-3};
    double viscous_dt = 0.01;
    double viscous_t_final = 1.0;
    McConfig mc;
    std::vector<double> etas{0.05, 0.1};
    double tol_pos = 1e-12;
    double compare_picard_tol = 1e-6;
    double compare_l1_tol = 0.02;
    std::string output_dir = "out";
    std::string format = "csv";
};

/// skeleton with every recognized key and its default
nlohmann::ordered_json default_config();

/// Deep-merge user keys over base; a key absent from the skeleton at the
/// same path is rejected.
nlohmann::ordered_json merge_config(nlohmann::ordered_json base, const nlohmann::json& user);

/// Validate and materialize a resolved config document.
RunConfig materialize(const nlohmann::ordered_json& resolved);

/// `--set section.key=value` applied to a document; the value is parsed as
/// JSON when possible, otherwise taken as a string.
void apply_override(nlohmann::ordered_json& doc, const std::string& assignment);

/// bundled experiment configs, one per reproduced study
std::vector<std::pair<std::string, std::string>> preset_list();
nlohmann::ordered_json preset_config(const std::string& name);

/// Problem objects assembled from a RunConfig.
struct Problem {
    Kernel kernel;
    std::shared_ptr<const DomainGeometry> geometry;
    Field u0;
    BoundaryData phi;
};

Problem build_problem(const RunConfig& cfg);

}  // namespace nldiff
