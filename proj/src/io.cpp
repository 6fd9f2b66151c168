#include "cnmc/io.hpp"

#include <cstdio>
#include <json.hpp>
#include <sstream>

namespace cnmc {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

std::string json_array(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt17(v[i]);
    }
    return out + "]";
}

std::string profile_to_json(const Profile& u, const ModelParams& params) {
    std::ostringstream os;
    os << "{\"N\": " << params.N << ", \"alpha\": " << fmt17(params.alpha) << ", \"coeffs\": " << json_array(u.coeffs);
    if (!u.sin_coeffs.empty()) os << ", \"sin_coeffs\": " << json_array(u.sin_coeffs);
    os << "}";
    return os.str();
}

std::string branch_point_to_json(const BranchPoint& bp, const ModelParams& params) {
    std::string s = profile_to_json(bp.rescaled(), params);
    s.pop_back();
    return s + ", \"a\": " + fmt17(bp.a) + ", \"mu\": " + fmt17(bp.mu) + "}";
}

ProfileFile profile_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("profile JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("N") || !j.contains("alpha") || !j.contains("coeffs"))
        throw DomainError("profile JSON: expected an object with N, alpha and coeffs");
    try {
        ProfileFile f;
        f.params.N = j.at("N").get<int>();
        f.params.alpha = j.at("alpha").get<double>();
        f.profile.coeffs = j.at("coeffs").get<std::vector<double>>();
        if (j.contains("sin_coeffs")) f.profile.sin_coeffs = j.at("sin_coeffs").get<std::vector<double>>();
        if (f.profile.coeffs.empty()) throw DomainError("profile JSON: coeffs must not be empty");
        f.params.validate();
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("profile JSON: ") + e.what());
    }
}

std::string branch_csv(const std::vector<BranchPoint>& points) {
    std::string out = "a,mu,lambda,residual_sup,newton_iters\n";
    for (const BranchPoint& p : points)
        out += fmt17(p.a) + "," + fmt17(p.mu) + "," + fmt17(p.lambda) + "," + fmt17(p.residual_sup) + "," +
               std::to_string(p.newton_iters) + "\n";
    return out;
}

}  // namespace cnmc
