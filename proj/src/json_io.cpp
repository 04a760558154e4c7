#include "rangebound/json_io.hpp"

#include <json.hpp>

#include "rangebound/errors.hpp"

namespace rangebound::json {

namespace {

using ordered = nlohmann::ordered_json;

nlohmann::json parse_text(const std::string& text, const char* what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

std::vector<double> numbers(const nlohmann::json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : j) {
        if (!x.is_number()) throw ParseError(std::string(what) + " must contain only numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<std::vector<double>> rows(const nlohmann::json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + " must be an array of arrays");
    std::vector<std::vector<double>> out;
    for (const auto& r : j) out.push_back(numbers(r, what));
    return out;
}

const nlohmann::json& field(const nlohmann::json& j, const char* key, const char* what) {
    if (!j.is_object() || !j.contains(key))
        throw ParseError(std::string(what) + ": missing field \"" + key + "\"");
    return j[key];
}

ordered index_list(const std::vector<std::size_t>& v) {
    ordered a = ordered::array();
    for (auto i : v) a.push_back(i);
    return a;
}

}  // namespace

MomentSpec parse_spec(const std::string& text) {
    const auto j = parse_text(text, "moment spec");
    return MomentSpec(numbers(field(j, "mu", "moment spec"), "mu"),
                      numbers(field(j, "sigma", "moment spec"), "sigma"));
}

std::string dump(const MomentSpec& spec) {
    ordered j;
    j["mu"] = std::vector<double>(spec.mu().begin(), spec.mu().end());
    j["sigma"] = std::vector<double>(spec.sigma().begin(), spec.sigma().end());
    return j.dump();
}

std::string dump(const BoundReport& r) {
    ordered j;
    j["rho"] = r.rho;
    j["c"] = r.optimum.c;
    j["lambda"] = r.optimum.lambda;
    j["ag"] = r.ag;
    j["infimum"] = r.infimum;
    j["method"] = r.method_tag();
    j["regions"] = {{"I1", index_list(r.regions.i1)},
                    {"I2", index_list(r.regions.i2)},
                    {"I3", index_list(r.regions.i3)},
                    {"I4", index_list(r.regions.i4)}};
    j["residual"] = r.residual;
    j["iterations"] = r.iterations;
    return j.dump();
}

JointDiscreteDistribution parse_joint(const std::string& text) {
    const auto j = parse_text(text, "joint distribution");
    return JointDiscreteDistribution(rows(field(j, "support", "joint distribution"), "support"),
                                     numbers(field(j, "prob", "joint distribution"), "prob"));
}

std::string dump(const JointDiscreteDistribution& joint) {
    ordered j;
    j["support"] = joint.support();
    j["prob"] = joint.probs();
    return j.dump();
}

ProbabilityMatrix parse_matrix(const std::string& text) {
    const auto j = parse_text(text, "probability matrix");
    return ProbabilityMatrix(rows(field(j, "q", "probability matrix"), "q"));
}

std::string dump(const ProbabilityMatrix& m) {
    ordered j;
    j["q"] = m.rows();
    return j.dump();
}

std::string dump(const MomentCheckReport& r) {
    ordered j;
    j["mean_errors"] = r.mean_errors;
    j["var_errors"] = r.var_errors;
    j["expected_range"] = r.expected_range;
    j["pass"] = r.pass;
    return j.dump();
}

}  // namespace rangebound::json
