#pragma once

// The five CLI commands as library functions returning tables, plus the
// random-state sampler and the per-state oracle check behind `verify`.

#include <optional>
#include <random>
#include <string>

#include "contractive/grid_oracle.hpp"
#include "contractive/run_config.hpp"
#include "contractive/scan_table.hpp"

namespace contractive {

inline constexpr Cat2Params kPaperCat2{2.26, 127.0, 0.49};
inline constexpr double kPaperCat2Eta = 1.105;
inline constexpr Cat3Params kPaperCat3{1.0, 2.38, 249.0, 249.0, 1.21};
inline constexpr double kPaperCat3Eta = 1.270;

inline constexpr double kVerifyTolerance = 1e-6;
/// Scans evaluate Lambda at max(eta, kMinScanEta).
inline constexpr double kMinScanEta = 1e-4;

/// Fills family, params, eta and sweep for fig1..fig7 where the config leaves
/// them unset. Throws Error(Config) for unknown names.
RunConfig apply_preset(RunConfig cfg, const std::string& name);

struct SampledFamilyState {
    Family family;
    GaussianSuperposition state;
    Moments closed_form;
};

/// Random valid cat2, cat3 or four-component superposition state together with
/// its closed-form moments. Draws again on a degenerate norm.
SampledFamilyState random_state(std::mt19937_64& rng, Family family);

struct VerifyReport {
    double moment_discrepancy = 0.0;  // max over fields of |a - b| / max(|a|, 1)
    double curve_residual = 0.0;      // max over eta of |v_grid - v_curve| / max(v_curve, 1)
    double spectral_residual = 0.0;   // same, with the FFT propagator at eta_max
    double im_xp_error = 0.0;         // |Im<xp> - 1/2| on the grid

    double worst() const;
};

/// Compares closed-form moments with grid quadrature at eta = 0 and the
/// variance parabola with the evolved grid variance at n_eta points in (0, eta_max].
VerifyReport verify_state(const GaussianSuperposition& state, const Moments& closed_form,
                          std::optional<Grid> grid = std::nullopt, int n_eta = 20, double eta_max = 3.0);

ScanTable cmd_eval(const RunConfig& cfg);
ScanTable cmd_scan(const RunConfig& cfg);
ScanTable cmd_compare(const RunConfig& cfg);
ScanTable cmd_verify(const RunConfig& cfg);
ScanTable cmd_optimize(const RunConfig& cfg);

/// True when every row of a verify table is within kVerifyTolerance.
bool verification_passed(const ScanTable& t);

}  // namespace contractive
