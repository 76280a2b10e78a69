#pragma once

// JSON certificate files:
//   b_form        "ones" | "identity"
//   alpha_range   [lo, hi]
//   Y, P          3x3 row-major nested arrays
//   Ka, K         m x 3 nested arrays
//   eps, delta    reals
//   lmi_margins, bmi_margins, p_eigenvalues   arrays of reals
// Reals are written in shortest round-trip form (17 significant digits at most,
// never lossy).

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "switchsync/lmi.hpp"

namespace switchsync {

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, const char* field);

nlohmann::json certificate_to_json(const GainCertificate& c);

/// Parses without verifying: a certificate read from disk is only trusted after
/// verify_certificate passes on its P and K. Throws InvalidInput on malformed
/// or mis-shaped content.
GainCertificate certificate_from_json(const nlohmann::json& j);

void write_certificate(const std::filesystem::path& path, const GainCertificate& c);
GainCertificate read_certificate(const std::filesystem::path& path);

}  // namespace switchsync
