#include "rangebound/rangebound.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "rangebound/bounds.hpp"
#include "rangebound/errors.hpp"
#include "rangebound/extremal.hpp"
#include "rangebound/json_io.hpp"
#include "rangebound/verify.hpp"

using namespace rangebound;

struct rb_spec {
    MomentSpec value;
};
struct rb_report {
    BoundReport value;
};
struct rb_joint {
    JointDiscreteDistribution value;
};
struct rb_matrix {
    ProbabilityMatrix value;
};

namespace {

thread_local std::string last_error;

rb_status fail(rb_status s, const std::string& msg) {
    last_error = msg;
    return s;
}

template <class F>
rb_status guard(F&& f) {
    try {
        f();
        return RB_OK;
    } catch (const ConvergenceError& e) {
        std::ostringstream os;
        os.precision(17);
        os << e.what() << " (best c = " << e.best_c() << ", lambda = " << e.best_lambda() << ")";
        return fail(RB_NO_CONVERGENCE, os.str());
    } catch (const InfeasibleError& e) {
        return fail(RB_INFEASIBLE, e.what());
    } catch (const ParseError& e) {
        return fail(RB_PARSE_ERROR, e.what());
    } catch (const DomainError& e) {
        return fail(RB_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(RB_INTERNAL_ERROR, "out of memory");
    } catch (const std::exception& e) {
        return fail(RB_INTERNAL_ERROR, e.what());
    } catch (...) {
        return fail(RB_INTERNAL_ERROR, "unknown error");
    }
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

SolverOptions to_options(const rb_solver_options* opts) {
    SolverOptions o;
    if (!opts) return o;
    o.tol = opts->tol;
    o.inner_max_iter = opts->inner_max_iter;
    o.outer_max_iter = opts->outer_max_iter;
    if (opts->has_initial_c) o.initial_c = opts->initial_c;
    return o;
}

rb_method to_c(Method m) {
    switch (m) {
        case Method::GeneralSolver: return RB_METHOD_GENERAL_SOLVER;
        case Method::N2ClosedForm: return RB_METHOD_N2_CLOSED_FORM;
        case Method::EqualMeansClosedForm: return RB_METHOD_EQUAL_MEANS_CLOSED_FORM;
    }
    return RB_METHOD_GENERAL_SOLVER;
}

rb_uniqueness to_c(Uniqueness u) {
    switch (u) {
        case Uniqueness::Unique: return RB_UNIQUE;
        case Uniqueness::NotUnique: return RB_NOT_UNIQUE;
        case Uniqueness::Unknown: return RB_UNKNOWN;
    }
    return RB_UNKNOWN;
}

}  // namespace

extern "C" {

const char* rb_last_error(void) { return last_error.c_str(); }

const char* rb_version(void) { return "1.0.0"; }

void rb_string_free(char* s) { delete[] s; }

rb_status rb_spec_create(const double* mu, const double* sigma, size_t n, rb_spec** out) {
    return guard([&] {
        require(mu && sigma && out, "rb_spec_create: null argument");
        *out = new rb_spec{MomentSpec(std::vector<double>(mu, mu + n), std::vector<double>(sigma, sigma + n))};
    });
}

rb_status rb_spec_from_json(const char* text, rb_spec** out) {
    return guard([&] {
        require(text && out, "rb_spec_from_json: null argument");
        *out = new rb_spec{json::parse_spec(text)};
    });
}

rb_status rb_spec_to_json(const rb_spec* spec, char** out) {
    return guard([&] {
        require(spec && out, "rb_spec_to_json: null argument");
        *out = copy_string(json::dump(spec->value));
    });
}

size_t rb_spec_size(const rb_spec* spec) { return spec ? spec->value.size() : 0; }

rb_status rb_spec_get(const rb_spec* spec, double* mu, double* sigma) {
    return guard([&] {
        require(spec && mu && sigma, "rb_spec_get: null argument");
        for (std::size_t i = 0; i < spec->value.size(); ++i) {
            mu[i] = spec->value.mu(i);
            sigma[i] = spec->value.sigma(i);
        }
    });
}

void rb_spec_free(rb_spec* spec) { delete spec; }

void rb_solver_options_default(rb_solver_options* opts) {
    if (!opts) return;
    const SolverOptions d;
    opts->tol = d.tol;
    opts->inner_max_iter = d.inner_max_iter;
    opts->outer_max_iter = d.outer_max_iter;
    opts->has_initial_c = 0;
    opts->initial_c = 0.0;
}

rb_status rb_bound(const rb_spec* spec, const rb_solver_options* opts, rb_report** out) {
    return guard([&] {
        require(spec && out, "rb_bound: null argument");
        *out = new rb_report{rho_bound(spec->value, to_options(opts))};
    });
}

rb_status rb_report_get(const rb_report* report, rb_report_values* out) {
    return guard([&] {
        require(report && out, "rb_report_get: null argument");
        const BoundReport& r = report->value;
        out->rho = r.rho;
        out->c = r.optimum.c;
        out->lambda = r.optimum.lambda;
        out->ag = r.ag;
        out->infimum = r.infimum;
        out->residual = r.residual;
        out->iterations = r.iterations;
        out->method = to_c(r.method);
        out->boundary_degenerate = r.regions.boundary_degenerate ? 1 : 0;
    });
}

rb_status rb_report_region(const rb_report* report, int region, size_t* indices, size_t cap, size_t* count) {
    return guard([&] {
        require(report && count, "rb_report_region: null argument");
        require(region >= 1 && region <= 4, "rb_report_region: region must be 1, 2, 3 or 4");
        const auto& set = report->value.regions.set(static_cast<Region>(region));
        *count = set.size();
        for (std::size_t k = 0; k < set.size() && k < cap && indices; ++k) indices[k] = set[k];
    });
}

rb_status rb_report_to_json(const rb_report* report, char** out) {
    return guard([&] {
        require(report && out, "rb_report_to_json: null argument");
        *out = copy_string(json::dump(report->value));
    });
}

void rb_report_free(rb_report* report) { delete report; }

rb_status rb_compare(const rb_spec* spec, const rb_solver_options* opts, rb_comparison* out) {
    return guard([&] {
        require(spec && out, "rb_compare: null argument");
        const MomentSpec& s = spec->value;
        const BoundReport r = rho_bound(s, to_options(opts));
        out->rho = r.rho;
        out->ag = r.ag;
        out->bnt_range = bnt_range_bound(s);
        out->infimum = r.infimum;
        out->has_plackett = 0;
        out->plackett = 0.0;
        bool homogeneous = s.has_equal_means();
        for (std::size_t i = 1; i < s.size() && homogeneous; ++i) homogeneous = s.sigma(i) == s.sigma(0);
        if (homogeneous) {
            out->has_plackett = 1;
            out->plackett = plackett_iid_bound(s.size(), s.sigma(0));
        }
    });
}

rb_status rb_ag_bound(const rb_spec* spec, double* out) {
    return guard([&] {
        require(spec && out, "rb_ag_bound: null argument");
        *out = ag_bound(spec->value);
    });
}

rb_status rb_bnt_max_bound(const rb_spec* spec, double* bound, double* y0) {
    return guard([&] {
        require(spec && bound, "rb_bnt_max_bound: null argument");
        const BntResult r = bnt_max_bound(spec->value);
        *bound = r.bound;
        if (y0) *y0 = r.y0;
    });
}

rb_status rb_bnt_range_bound(const rb_spec* spec, double* out) {
    return guard([&] {
        require(spec && out, "rb_bnt_range_bound: null argument");
        *out = bnt_range_bound(spec->value);
    });
}

rb_status rb_equal_means_bound(const rb_spec* spec, double* out) {
    return guard([&] {
        require(spec && out, "rb_equal_means_bound: null argument");
        *out = equal_means_bound(spec->value);
    });
}

rb_status rb_plackett_iid_bound(size_t n, double sigma, double* out) {
    return guard([&] {
        require(out, "rb_plackett_iid_bound: null argument");
        *out = plackett_iid_bound(n, sigma);
    });
}

rb_status rb_gamma2_bound(double mu1, double mu2, double sigma1, double sigma2, double rho, double* out) {
    return guard([&] {
        require(out, "rb_gamma2_bound: null argument");
        *out = gamma2_bound(mu1, mu2, sigma1, sigma2, rho);
    });
}

rb_status rb_phi(const rb_spec* spec, double c, double lambda, double* value, double* gradient) {
    return guard([&] {
        require(spec && value, "rb_phi: null argument");
        *value = phi({c, lambda}, spec->value);
        if (gradient) {
            const auto g = phi_gradient({c, lambda}, spec->value);
            gradient[0] = g[0];
            gradient[1] = g[1];
        }
    });
}

rb_status rb_extremal(const rb_spec* spec, const rb_solver_options* opts, rb_joint** joint, rb_matrix** coupling,
                      rb_report** report, rb_uniqueness* uniqueness) {
    return guard([&] {
        require(spec && joint, "rb_extremal: null argument");
        ExtremalConstruction e = build_extremal(spec->value, to_options(opts));
        auto j = std::make_unique<rb_joint>(rb_joint{std::move(e.joint)});
        std::unique_ptr<rb_matrix> m;
        std::unique_ptr<rb_report> r;
        if (coupling) m = std::make_unique<rb_matrix>(rb_matrix{std::move(e.coupling)});
        if (report) r = std::make_unique<rb_report>(rb_report{std::move(e.report)});
        if (uniqueness) *uniqueness = to_c(e.uniqueness);
        *joint = j.release();
        if (coupling) *coupling = m.release();
        if (report) *report = r.release();
    });
}

rb_status rb_extremal_marginals(const rb_spec* spec, double c, double lambda, double* p_plus, double* p_minus) {
    return guard([&] {
        require(spec && p_plus && p_minus, "rb_extremal_marginals: null argument");
        const ExtremalMarginals m = extremal_marginals(spec->value, {c, lambda});
        for (std::size_t i = 0; i < m.p_plus.size(); ++i) {
            p_plus[i] = m.p_plus[i];
            p_minus[i] = m.p_minus[i];
        }
    });
}

rb_status rb_ag_tightness(const rb_spec* spec, int* tight, rb_uniqueness* unique, rb_joint** construction) {
    return guard([&] {
        require(spec && tight, "rb_ag_tightness: null argument");
        AgTightness t = ag_tightness(spec->value);
        *tight = t.tight ? 1 : 0;
        if (unique) *unique = to_c(t.unique);
        if (construction)
            *construction = t.construction ? new rb_joint{std::move(*t.construction)} : nullptr;
    });
}

rb_status rb_bnt_extremal_max(const rb_spec* spec, rb_joint** out) {
    return guard([&] {
        require(spec && out, "rb_bnt_extremal_max: null argument");
        *out = new rb_joint{bnt_extremal_max(spec->value)};
    });
}

rb_status rb_joint_create(const double* points, const double* prob, size_t count, size_t dimension, rb_joint** out) {
    return guard([&] {
        require(points && prob && out, "rb_joint_create: null argument");
        std::vector<std::vector<double>> support(count);
        for (std::size_t k = 0; k < count; ++k) support[k].assign(points + k * dimension, points + (k + 1) * dimension);
        *out = new rb_joint{JointDiscreteDistribution(std::move(support), std::vector<double>(prob, prob + count))};
    });
}

rb_status rb_joint_from_json(const char* text, rb_joint** out) {
    return guard([&] {
        require(text && out, "rb_joint_from_json: null argument");
        *out = new rb_joint{json::parse_joint(text)};
    });
}

rb_status rb_joint_to_json(const rb_joint* joint, char** out) {
    return guard([&] {
        require(joint && out, "rb_joint_to_json: null argument");
        *out = copy_string(json::dump(joint->value));
    });
}

size_t rb_joint_size(const rb_joint* joint) { return joint ? joint->value.size() : 0; }

size_t rb_joint_dimension(const rb_joint* joint) { return joint ? joint->value.dimension() : 0; }

rb_status rb_joint_point(const rb_joint* joint, size_t k, double* x, double* prob) {
    return guard([&] {
        require(joint, "rb_joint_point: null argument");
        require(k < joint->value.size(), "rb_joint_point: index out of range");
        const auto& p = joint->value.point(k);
        if (x) std::copy(p.begin(), p.end(), x);
        if (prob) *prob = joint->value.prob(k);
    });
}

void rb_joint_free(rb_joint* joint) { delete joint; }

rb_status rb_zero_trace_coupling(const double* p, const double* q, size_t n, rb_matrix** out) {
    return guard([&] {
        require(p && q && out, "rb_zero_trace_coupling: null argument");
        *out = new rb_matrix{zero_trace_coupling(std::span<const double>(p, n), std::span<const double>(q, n))};
    });
}

rb_status rb_perturb_coupling(const rb_matrix* m, rb_matrix** out) {
    return guard([&] {
        require(m && out, "rb_perturb_coupling: null argument");
        auto next = perturb_coupling(m->value);
        *out = next ? new rb_matrix{std::move(*next)} : nullptr;
    });
}

rb_status rb_matrix_from_json(const char* text, rb_matrix** out) {
    return guard([&] {
        require(text && out, "rb_matrix_from_json: null argument");
        *out = new rb_matrix{json::parse_matrix(text)};
    });
}

rb_status rb_matrix_to_json(const rb_matrix* m, char** out) {
    return guard([&] {
        require(m && out, "rb_matrix_to_json: null argument");
        *out = copy_string(json::dump(m->value));
    });
}

size_t rb_matrix_size(const rb_matrix* m) { return m ? m->value.size() : 0; }

double rb_matrix_get(const rb_matrix* m, size_t i, size_t j) {
    if (!m || i >= m->value.size() || j >= m->value.size()) return 0.0;
    return m->value(i, j);
}

void rb_matrix_free(rb_matrix* m) { delete m; }

rb_status rb_expected_range(const rb_joint* joint, double* out) {
    return guard([&] {
        require(joint && out, "rb_expected_range: null argument");
        *out = expected_range(joint->value);
    });
}

rb_status rb_check_moments(const rb_joint* joint, const rb_spec* spec, double tol, rb_moment_check* out) {
    return guard([&] {
        require(joint && spec && out, "rb_check_moments: null argument");
        const MomentCheckReport r = check_moments(joint->value, spec->value, tol);
        out->max_mean_error = 0.0;
        out->max_var_error = 0.0;
        for (double e : r.mean_errors) out->max_mean_error = std::max(out->max_mean_error, e);
        for (double e : r.var_errors) out->max_var_error = std::max(out->max_var_error, e);
        out->expected_range = r.expected_range;
        out->pass = r.pass ? 1 : 0;
    });
}

rb_status rb_check_moments_json(const rb_joint* joint, const rb_spec* spec, double tol, char** out) {
    return guard([&] {
        require(joint && spec && out, "rb_check_moments_json: null argument");
        *out = copy_string(json::dump(check_moments(joint->value, spec->value, tol)));
    });
}

rb_status rb_mc_expected_range(const rb_joint* joint, size_t n_samples, uint64_t seed, double* estimate,
                               double* std_error) {
    return guard([&] {
        require(joint && estimate, "rb_mc_expected_range: null argument");
        const McEstimate e = mc_expected_range(joint->value, n_samples, seed);
        *estimate = e.estimate;
        if (std_error) *std_error = e.std_error;
    });
}

rb_status rb_pair_mc_expected_gap(double mu1, double mu2, double sigma1, double sigma2, double rho,
                                  size_t n_samples, uint64_t seed, double* estimate, double* std_error) {
    return guard([&] {
        require(estimate, "rb_pair_mc_expected_gap: null argument");
        const PairSampler s = extremal_pair_given_correlation(mu1, mu2, sigma1, sigma2, rho, seed);
        const McEstimate e = mc_expected_range(s, n_samples, seed);
        *estimate = e.estimate;
        if (std_error) *std_error = e.std_error;
    });
}

rb_status rb_feasible_probe(const rb_spec* spec, size_t trials, uint64_t seed, double* out) {
    return guard([&] {
        require(spec && out, "rb_feasible_probe: null argument");
        *out = feasible_probe(spec->value, trials, seed);
    });
}

rb_status rb_dual_grid_check(const rb_spec* spec, size_t grid, double* out) {
    return guard([&] {
        require(spec && out, "rb_dual_grid_check: null argument");
        *out = dual_grid_check(spec->value, grid);
    });
}

rb_status rb_infimum_witness(const rb_spec* spec, double epsilon, size_t n_samples, uint64_t seed, double* estimate,
                             double* std_error) {
    return guard([&] {
        require(spec && estimate, "rb_infimum_witness: null argument");
        const McEstimate e = infimum_witness(spec->value, std::nullopt, epsilon, n_samples, seed);
        *estimate = e.estimate;
        if (std_error) *std_error = e.std_error;
    });
}

}  // extern "C"
