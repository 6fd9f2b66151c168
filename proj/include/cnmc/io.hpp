#pragma once

#include <string>
#include <vector>

#include "cnmc/branch.hpp"
#include "cnmc/profile.hpp"

namespace cnmc {

/// 17 significant digits, shared by every CSV and JSON writer.
std::string fmt17(double x);

/// JSON string literal with escapes.
std::string json_string(const std::string& s);

std::string json_array(const std::vector<double>& v);

/// {"N": .., "alpha": .., "coeffs": [..]} plus "sin_coeffs" when present.
std::string profile_to_json(const Profile& u, const ModelParams& params);
std::string branch_point_to_json(const BranchPoint& bp, const ModelParams& params);

struct ProfileFile {
    Profile profile;
    ModelParams params;
};

/// Parses the profile schema; throws DomainError on malformed input.
ProfileFile profile_from_json(const std::string& text);

/// Header a,mu,lambda,residual_sup,newton_iters and one row per point.
std::string branch_csv(const std::vector<BranchPoint>& points);

}  // namespace cnmc
